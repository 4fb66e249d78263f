//! The finite group `Q_k = E^1 / (E^1 ∩ (1 + ϖ^k O_E))` and its dual.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::snf::smith_normal_form;
use crate::cyclo::CycloValue;
use crate::error::{Error, Result};
use crate::quad_ext::{ExtElem, QuadExt};
use crate::torus::{level_key, quotient_reps};

type Key = Vec<u32>;

/// `Q_k` with coordinates `y ∈ ⊕ Z/d_i` for every element.
#[derive(Debug)]
pub struct TorusGroup {
    pub level: u32,
    ext: QuadExt,
    reps: BTreeMap<Key, ExtElem>,
    /// Invariant factors `d_i > 1`.
    pub invariants: Vec<u64>,
    coords: HashMap<Key, Vec<u64>>,
    identity: Key,
}

impl TorusGroup {
    pub fn new(e: &QuadExt, k: u32) -> Result<Arc<Self>> {
        if k == 0 {
            return Err(Error::InvalidArgument("level must be at least 1".into()));
        }
        let reps = quotient_reps(e, k)?;
        let identity = level_key(e, &e.one(), k)?;
        let mul = |x: &Key, y: &Key| -> Result<Key> { level_key(e, &e.mul(&reps[x], &reps[y]), k) };

        // greedy generators with exponent vectors on the subgroup they span
        let mut gens: Vec<Key> = Vec::new();
        let mut span: HashMap<Key, Vec<i64>> = HashMap::new();
        span.insert(identity.clone(), Vec::new());
        let mut relations: Vec<Vec<i64>> = Vec::new();
        for g in reps.keys() {
            if span.contains_key(g) {
                continue;
            }
            let i = gens.len();
            gens.push(g.clone());
            for v in span.values_mut() {
                v.push(0);
            }
            // smallest n with g^n in the old span
            let mut pow = g.clone();
            let mut n = 1i64;
            while !span.contains_key(&pow) {
                pow = mul(&pow, g)?;
                n += 1;
            }
            let prev: Vec<(Key, Vec<i64>)> = span.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let mut rel = span[&pow].clone();
            rel[i] -= n;
            relations.push(rel);
            // new span = old span × {g^0 .. g^{n-1}}
            for (h, hv) in &prev {
                let mut x = h.clone();
                for j in 1..n {
                    x = mul(&x, g)?;
                    let mut xv = hv.clone();
                    xv[i] = j;
                    span.insert(x.clone(), xv);
                }
            }
        }
        if span.len() != reps.len() {
            return Err(Error::precision("generators do not exhaust the quotient"));
        }
        let r = gens.len();
        for rel in relations.iter_mut() {
            rel.resize(r, 0);
        }
        let (_, d, v) = smith_normal_form(&relations);
        let diag: Vec<i64> = (0..r).map(|i| d.get(i).map_or(0, |row| row[i])).collect();
        if diag.iter().any(|&x| x <= 0) {
            return Err(Error::precision("relation lattice is not of full rank"));
        }
        let keep: Vec<usize> = (0..r).filter(|&i| diag[i] > 1).collect();
        let mut coords = HashMap::new();
        for (key, x) in &span {
            let mut x = x.clone();
            x.resize(r, 0);
            let y: Vec<u64> = keep
                .iter()
                .map(|&j| {
                    let s: i64 = (0..r).map(|i| x[i] * v[i][j]).sum();
                    s.rem_euclid(diag[j]) as u64
                })
                .collect();
            coords.insert(key.clone(), y);
        }
        let invariants = keep.iter().map(|&j| diag[j] as u64).collect();
        Ok(Arc::new(TorusGroup { level: k, ext: e.clone(), reps, invariants, coords, identity }))
    }

    pub fn order(&self) -> u64 {
        self.reps.len() as u64
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn elements(&self) -> impl Iterator<Item = (&Key, &ExtElem)> {
        self.reps.iter()
    }

    pub fn identity(&self) -> &Key {
        &self.identity
    }

    pub fn key_of(&self, t: &ExtElem) -> Result<Key> {
        level_key(&self.ext, t, self.level)
    }

    pub fn coords(&self, key: &Key) -> Result<&[u64]> {
        self.coords.get(key).map(|v| v.as_slice()).ok_or_else(|| Error::InvalidArgument("not an element of E^1 at this level".into()))
    }

    pub fn exponent(&self) -> u64 {
        self.invariants.iter().fold(1, |a, &b| num_integer::lcm(a, b))
    }

    /// All characters, in lexicographic order of their exponent vectors.
    pub fn characters(self: &Arc<Self>) -> Vec<TorusChar> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariants {
            out = out
                .into_iter()
                .flat_map(|c: Vec<u64>| (0..d).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                }))
                .collect();
        }
        out.into_iter().map(|c| TorusChar { group: Arc::clone(self), exps: c }).collect()
    }
}

/// `θ(y) = Π ζ_{d_i}^{c_i y_i}`.
#[derive(Clone, Debug)]
pub struct TorusChar {
    group: Arc<TorusGroup>,
    pub exps: Vec<u64>,
}

impl TorusChar {
    pub fn group(&self) -> &Arc<TorusGroup> {
        &self.group
    }

    /// Order of `θ` in the dual group.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.group.invariants)
            .map(|(&c, &d)| d / num_integer::gcd(c, d))
            .fold(1, num_integer::lcm)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&c| c == 0)
    }

    pub fn inverse(&self) -> TorusChar {
        let exps = self.exps.iter().zip(&self.group.invariants).map(|(&c, &d)| (d - c) % d).collect();
        TorusChar { group: Arc::clone(&self.group), exps }
    }

    pub fn square(&self) -> TorusChar {
        let exps = self.exps.iter().zip(&self.group.invariants).map(|(&c, &d)| (2 * c) % d).collect();
        TorusChar { group: Arc::clone(&self.group), exps }
    }

    pub fn eval_key(&self, key: &Key) -> Result<CycloValue> {
        let y = self.group.coords(key)?;
        let m = self.group.exponent();
        // Σ c_i y_i / d_i as a fraction of m
        let mut e = 0u64;
        for ((&c, &yi), &d) in self.exps.iter().zip(y).zip(&self.group.invariants) {
            e = (e + c * yi % d * (m / d)) % m;
        }
        Ok(CycloValue::root_of_unity(m as u32, e as i64))
    }

    pub fn eval(&self, t: &ExtElem) -> Result<CycloValue> {
        self.eval_key(&self.group.key_of(t)?)
    }

    pub fn label(&self) -> String {
        let c: Vec<String> = self.exps.iter().map(|c| c.to_string()).collect();
        let d: Vec<String> = self.group.invariants.iter().map(|d| d.to_string()).collect();
        format!("({}) mod ({})", c.join(","), d.join(","))
    }
}
