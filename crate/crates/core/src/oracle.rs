//! Brute-force verifiers over finite quotient rings and the Bruhat–Tits
//! tree. Nothing here uses the closed formulas of the other modules; these
//! routines exist so the formulas can be checked against plain counting.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{enumerate_residues, square_class_count, LocalElem, LocalField};
use crate::error::{Error, Result};
use crate::matrix::{Mat2, TestFunction};
use crate::quad_ext::{ExtKind, QuadExt};

/// Upper bound on enumerated elements.
pub const SIZE_GUARD: u64 = 1_000_000;

fn guard(n: u64) -> Result<()> {
    if n > SIZE_GUARD {
        Err(Error::SizeGuard(n))
    } else {
        Ok(())
    }
}

/// `O / ϖ^k` with table-driven arithmetic. Index `i` encodes the digits of
/// the residue in base `q`, lowest first.
pub struct QuotientRing {
    k: u32,
    n: u32,
    q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    elems: Vec<LocalElem>,
}

impl QuotientRing {
    pub fn new(f: &LocalField, k: u32) -> Result<Self> {
        let q = f.q() as u64;
        let n = q.checked_pow(k).unwrap_or(u64::MAX);
        guard(n * n)?;
        let elems = enumerate_residues(f, k)?;
        let mut ring = QuotientRing { k, n: n as u32, q: q as u32, add: Vec::new(), mul: Vec::new(), elems };
        let nn = n as usize;
        let mut add = vec![0; nn * nn];
        let mut mul = vec![0; nn * nn];
        for i in 0..nn {
            for j in 0..nn {
                add[i * nn + j] = ring.index_of(f, &f.add(&ring.elems[i], &ring.elems[j]))?;
                mul[i * nn + j] = ring.index_of(f, &f.mul(&ring.elems[i], &ring.elems[j]))?;
            }
        }
        ring.add = add;
        ring.mul = mul;
        Ok(ring)
    }

    pub fn size(&self) -> u32 {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    /// Residue index of an integral element.
    pub fn index_of(&self, f: &LocalField, x: &LocalElem) -> Result<u32> {
        let ds = f.residue_digits(x, self.k as i64)?;
        Ok(ds.iter().rev().fold(0, |acc, &d| acc * self.q + d))
    }

    pub fn elem(&self, i: u32) -> &LocalElem {
        &self.elems[i as usize]
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.n + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.n + b) as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        (0..self.n).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn is_unit(&self, a: u32) -> bool {
        a % self.q != 0
    }

    pub fn units(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n).filter(|&a| self.is_unit(a))
    }
}

/// `O_E / ϖ^k` as pairs `a + bτ` over a [`QuotientRing`].
pub struct ExtQuotient {
    pub ring: QuotientRing,
    tr: u32,
    det: u32,
    neg_det: u32,
}

impl ExtQuotient {
    pub fn new(e: &QuadExt, k: u32) -> Result<Self> {
        let f = e.base();
        let ring = QuotientRing::new(f, k)?;
        guard(ring.size() as u64 * ring.size() as u64)?;
        let tr = ring.index_of(f, e.tr())?;
        let det = ring.index_of(f, e.det())?;
        let neg_det = ring.neg(det);
        Ok(ExtQuotient { ring, tr, det, neg_det })
    }

    pub fn mul(&self, x: (u32, u32), y: (u32, u32)) -> (u32, u32) {
        let r = &self.ring;
        let bd = r.mul(x.1, y.1);
        let a = r.add(r.mul(x.0, y.0), r.mul(bd, self.neg_det));
        let b = r.add(r.add(r.mul(x.0, y.1), r.mul(x.1, y.0)), r.mul(bd, self.tr));
        (a, b)
    }

    pub fn norm(&self, x: (u32, u32)) -> u32 {
        let r = &self.ring;
        let t1 = r.mul(x.0, x.0);
        let t2 = r.mul(r.mul(x.0, x.1), self.tr);
        let t3 = r.mul(r.mul(x.1, x.1), self.det);
        r.add(r.add(t1, t2), t3)
    }

    pub fn elements(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let n = self.ring.size();
        (0..n).flat_map(move |b| (0..n).map(move |a| (a, b)))
    }

    pub fn units(&self) -> Vec<(u32, u32)> {
        self.elements().filter(|&x| self.ring.is_unit(self.norm(x))).collect()
    }
}

/// An element of `E` with norm of valuation 1 (ramified) or `None`.
fn norm_valuation_one(e: &QuadExt) -> Option<crate::quad_ext::ExtElem> {
    let f = e.base();
    for a in 0..f.p().min(8) {
        let x = e.elem(f.from_int(a as i64), f.one());
        if e.norm(&x).val() == Some(1) {
            return Some(x);
        }
    }
    None
}

/// `card(E^× / F^× (1 + ϖ^m O_E))`, by counting `O^×`-orbits on
/// `(O_E/ϖ^m)^×` and doubling when `E/F` is ramified.
pub fn oracle_unit_quotient(e: &QuadExt, m: u32) -> Result<u64> {
    if !e.is_field() {
        return Err(Error::InvalidArgument("extension must be a field".into()));
    }
    let ram = if norm_valuation_one(e).is_some() { 2 } else { 1 };
    if m == 0 {
        return Ok(ram);
    }
    let eq = ExtQuotient::new(e, m)?;
    let units = eq.units();
    let base_units: Vec<u32> = eq.ring.units().collect();
    guard(units.len() as u64 * base_units.len() as u64)?;
    let mut seen = HashSet::new();
    let mut orbits = 0u64;
    for &x in &units {
        if seen.contains(&x) {
            continue;
        }
        orbits += 1;
        for &u in &base_units {
            seen.insert(eq.mul((u, 0), x));
        }
    }
    Ok(orbits * ram)
}

/// Image `N(O_E^×) mod ϖ^k` as residue indices.
pub fn norm_image(e: &QuadExt, k: u32) -> Result<(QuotientRing, HashSet<u32>)> {
    let eq = ExtQuotient::new(e, k)?;
    let set: HashSet<u32> = eq.units().into_iter().map(|x| eq.norm(x)).collect();
    Ok((eq.ring, set))
}

/// Norm-group membership tester at a fixed level `k`; exact once `k`
/// reaches the conductor of `E/F`.
pub struct NormOracle {
    ext: QuadExt,
    ring: QuotientRing,
    image: HashSet<u32>,
    pi_norm: Option<LocalElem>,
}

impl NormOracle {
    pub fn new(e: &QuadExt, k: u32) -> Result<Self> {
        let (ring, image) = norm_image(e, k)?;
        let pi_norm = norm_valuation_one(e).map(|pi| e.norm(&pi));
        Ok(NormOracle { ext: e.clone(), ring, image, pi_norm })
    }

    pub fn contains(&self, x: &LocalElem) -> Result<bool> {
        let f = self.ext.base();
        if self.ext.kind() == ExtKind::Split {
            return Ok(true);
        }
        let v = f.val_checked(x)?;
        let unit = match &self.pi_norm {
            Some(n) => f.div(x, &f.pow(n, v)?)?,
            None => {
                if v % 2 != 0 {
                    return Ok(false);
                }
                f.shift(x, -v)
            }
        };
        Ok(self.image.contains(&self.ring.index_of(f, &unit)?))
    }
}

/// Whether `x ∈ N(E^×)`, decided modulo `ϖ^k`.
pub fn oracle_norm_membership(e: &QuadExt, x: &LocalElem, k: u32) -> Result<bool> {
    if e.kind() == ExtKind::Split {
        return Ok(true);
    }
    NormOracle::new(e, k)?.contains(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatGroup {
    Sl2,
    Gl2,
}

/// Whether some `g ∈ G(O/ϖ^k)` satisfies `g M1 = M2 g` modulo `ϖ^k`.
pub fn oracle_conjugacy(f: &LocalField, m1: &Mat2, m2: &Mat2, k: u32, group: MatGroup) -> Result<bool> {
    let r = QuotientRing::new(f, k)?;
    let n = r.size() as u64;
    guard(n.pow(4))?;
    let idx = |m: &Mat2| -> Result<[u32; 4]> {
        Ok([r.index_of(f, &m.a)?, r.index_of(f, &m.b)?, r.index_of(f, &m.c)?, r.index_of(f, &m.d)?])
    };
    let x = idx(m1)?;
    let y = idx(m2)?;
    let one = r.index_of(f, &f.one())?;
    let n = r.size();
    for g0 in 0..n {
        for g1 in 0..n {
            for g2 in 0..n {
                for g3 in 0..n {
                    let det = r.add(r.mul(g0, g3), r.neg(r.mul(g1, g2)));
                    let ok_det = match group {
                        MatGroup::Sl2 => det == one,
                        MatGroup::Gl2 => r.is_unit(det),
                    };
                    if !ok_det {
                        continue;
                    }
                    // g·M1
                    let l = [
                        r.add(r.mul(g0, x[0]), r.mul(g1, x[2])),
                        r.add(r.mul(g0, x[1]), r.mul(g1, x[3])),
                        r.add(r.mul(g2, x[0]), r.mul(g3, x[2])),
                        r.add(r.mul(g2, x[1]), r.mul(g3, x[3])),
                    ];
                    // M2·g
                    let rr = [
                        r.add(r.mul(y[0], g0), r.mul(y[1], g2)),
                        r.add(r.mul(y[0], g1), r.mul(y[1], g3)),
                        r.add(r.mul(y[2], g0), r.mul(y[3], g2)),
                        r.add(r.mul(y[2], g1), r.mul(y[3], g3)),
                    ];
                    if l == rr {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Square-class count through level `k`, by enumeration of unit squares.
pub fn oracle_square_classes(f: &LocalField, k: u32) -> Result<u64> {
    square_class_count(f, k)
}

/// Lattice representatives `g` (columns spanning the lattice) for the
/// vertices at distance `d` from `O^2`.
pub fn tree_shell(f: &LocalField, d: u32) -> Result<Vec<Mat2>> {
    if d == 0 {
        return Ok(vec![Mat2::identity(f)]);
    }
    let pd = f.pi_pow(d as i64);
    let mut out = Vec::new();
    for y in enumerate_residues(f, d)? {
        out.push(Mat2::new(f.one(), f.zero(), y, pd.clone()));
    }
    for z in enumerate_residues(f, d - 1)? {
        out.push(Mat2::new(f.shift(&z, 1), pd.clone(), f.one(), f.zero()));
    }
    guard(out.len() as u64)?;
    Ok(out)
}

/// Result of a tree count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCount {
    /// `Σ_{v even} f(g_v^{-1} M g_v)`.
    pub even: BigRational,
    /// The same sum over odd vertices.
    pub odd: BigRational,
    /// Radius searched; the outermost shell was checked to lie outside the
    /// convex set `{v : d(v, Mv) ≤ 2 r_max}`.
    pub radius: u32,
}

/// Orbital sums over the Bruhat–Tits tree of `SL(2, F)` for an elliptic
/// `M ∈ SL(2, O)`, with `vol(K) = vol(T) = 1`. The plain orbital integral
/// is `even`; the `GL(2)` (stable) sum is `even + odd`.
pub fn tree_orbital(f: &LocalField, m: &Mat2, tf: &TestFunction, radius: u32) -> Result<TreeCount> {
    let r_max = tf.r_max();
    let mut even = BigRational::zero();
    let mut odd = BigRational::zero();
    for d in 0..=radius {
        let mut near = false;
        for g in tree_shell(f, d)? {
            let c = m.conjugate_by(f, &g)?;
            let r = TestFunction::cell_of(f, &c)?;
            if r <= r_max {
                near = true;
            }
            let v = tf.coeff(r);
            if d % 2 == 0 {
                even += v;
            } else {
                odd += v;
            }
        }
        if d == radius && near {
            return Err(Error::precision(format!("support reaches tree radius {radius}")));
        }
    }
    Ok(TreeCount { even, odd, radius })
}

/// `∫_F f([[a, n], [0, a^{-1}]]) dn` by summing over `n ∈ ϖ^{-R} O / ϖ O`,
/// `R = r_max`, each class of measure `q^{-1}`, reading the Hecke cell off
/// the matrix itself. Classes outside `ϖ^{-R} O` lie in cells `> r_max`.
pub fn oracle_split_orbital(f: &LocalField, a: &LocalElem, tf: &TestFunction) -> Result<BigRational> {
    let r = tf.r_max() as i64;
    let ainv = f.inv(a)?;
    let mut total = BigRational::zero();
    let weight = BigRational::new(1.into(), f.q().into());
    for y in enumerate_residues(f, (r + 1) as u32)? {
        let n = f.shift(&y, -r);
        let m = Mat2::new(a.clone(), n, f.zero(), ainv.clone());
        total += tf.eval(f, &m)? * &weight;
    }
    Ok(total)
}
