//! Elements of the norm-one torus `E^1`, produced as `x / x̄`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::arith::{enumerate_residues, LocalElem};
use crate::error::{Error, Result};
use crate::quad_ext::{ExtElem, QuadExt};

/// `x / x̄ = x^2 / N(x)`.
pub fn hilbert90(e: &QuadExt, x: &ExtElem) -> Result<ExtElem> {
    let f = e.base();
    let n = e.norm(x);
    if n.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ninv = f.inv(&n)?;
    Ok(e.scale(&ninv, &e.mul(x, x)))
}

/// Deterministic search for a regular `t ∈ E^1` with `v(b) = n`, and
/// `ε(b) = marker` when a marker is requested. `Ok(None)` when no such
/// element exists among the candidates `x = X + ϖ^k Y τ`.
pub fn torus_element(e: &QuadExt, n: u32, marker: Option<i32>) -> Result<Option<ExtElem>> {
    if !e.is_field() {
        return Err(Error::InvalidArgument("E^1 of a split algebra is not elliptic".into()));
    }
    let f = e.base();
    let digits = enumerate_residues(f, 1)?;
    let mut xs: Vec<LocalElem> = digits.clone();
    xs.extend(enumerate_residues(f, 2)?.into_iter().filter(|x| !x.is_zero() && x.val() == Some(1)));
    for k in 0..=n as i64 {
        for y in &digits {
            if y.is_zero() {
                continue;
            }
            let yk = f.shift(y, k);
            for x in &xs {
                if k > 0 && x.val() != Some(0) {
                    continue;
                }
                let t = hilbert90(e, &e.elem(x.clone(), yk.clone()))?;
                if t.b.val() != Some(n as i64) {
                    continue;
                }
                if let Some(s) = marker {
                    if e.epsilon(&t.b)? != s {
                        continue;
                    }
                }
                return Ok(Some(t));
            }
        }
    }
    Ok(None)
}

/// A random regular element of `E^1` with `v(b) ≤ max_depth`, from
/// `x = X + ϖ^k Y τ` with `X`, `Y` random lifts of `level` digits.
pub fn random_torus_element<R: Rng>(e: &QuadExt, rng: &mut R, max_depth: u32, level: usize) -> Result<ExtElem> {
    let f = e.base();
    let q = f.q();
    for _ in 0..10_000 {
        let k = rng.gen_range(0..=max_depth as i64);
        let dx: Vec<u32> = (0..level).map(|_| rng.gen_range(0..q)).collect();
        let mut dy: Vec<u32> = (0..level).map(|_| rng.gen_range(0..q)).collect();
        if dy[0] == 0 {
            dy[0] = 1;
        }
        let x = f.from_digits(0, dx, None);
        let y = f.shift(&f.from_digits(0, dy, None), k);
        if k > 0 && !f.is_unit(&x) {
            continue;
        }
        let t = hilbert90(e, &e.elem(x, y))?;
        match t.b.val() {
            Some(v) if v <= max_depth as i64 => return Ok(t),
            _ => continue,
        }
    }
    Err(Error::precision("no regular torus element found in the sampled range"))
}

/// Residue key of `t = a + bτ` at level `k`: the digits of `a` and `b` mod `ϖ^k`.
pub fn level_key(e: &QuadExt, t: &ExtElem, k: u32) -> Result<Vec<u32>> {
    let f = e.base();
    let mut key = f.residue_digits(&t.a, k as i64)?;
    key.extend(f.residue_digits(&t.b, k as i64)?);
    Ok(key)
}

/// Representatives of `E^1 / (E^1 ∩ (1 + ϖ^k O_E))`, keyed by
/// [`level_key`], obtained as `x / x̄` for `x` running over
/// `(O_E/ϖ^k)^×`, and over `ϖ_E (O_E/ϖ^k)^×` when `E/F` is ramified.
pub fn quotient_reps(e: &QuadExt, k: u32) -> Result<BTreeMap<Vec<u32>, ExtElem>> {
    if !e.is_field() {
        return Err(Error::InvalidArgument("E must be a field".into()));
    }
    let f = e.base();
    let rs = enumerate_residues(f, k.max(1))?;
    let total = (rs.len() as u64).pow(2);
    if total > crate::oracle::SIZE_GUARD {
        return Err(Error::SizeGuard(total));
    }
    let mut shifts = vec![e.one()];
    if e.kind() == crate::quad_ext::ExtKind::Ramified {
        shifts.push(uniformizer_of(e)?);
    }
    let mut out = BTreeMap::new();
    for x in &rs {
        for y in &rs {
            let u = e.elem(x.clone(), y.clone());
            if !f.is_unit(&e.norm(&u)) {
                continue;
            }
            for s in &shifts {
                let t = hilbert90(e, &e.mul(s, &u))?;
                out.entry(level_key(e, &t, k)?).or_insert(t);
            }
        }
    }
    Ok(out)
}

/// An element of `E` whose norm has valuation 1 (`E/F` ramified).
pub fn uniformizer_of(e: &QuadExt) -> Result<ExtElem> {
    let f = e.base();
    for x in enumerate_residues(f, 1)? {
        let c = e.elem(x, f.one());
        if e.norm(&c).val() == Some(1) {
            return Ok(c);
        }
    }
    Err(Error::InvalidArgument("E/F is not ramified".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;
    use crate::quad_ext::ExtKind;
    use rand::SeedableRng;

    #[test]
    fn norm_one_and_depths() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let un = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let ra = QuadExt::canonical(&f, ExtKind::Ramified).unwrap();
        for n in 0..4 {
            // unramified: ε(b) = (-1)^{v(b)} is forced
            let s = if n % 2 == 0 { 1 } else { -1 };
            assert!(torus_element(&un, n, Some(-s)).unwrap().is_none());
            let t = torus_element(&un, n, Some(s)).unwrap().unwrap();
            assert!(f.eq(&un.norm(&t), &f.one()));
            assert_eq!(t.b.val(), Some(n as i64));
            for s in [1, -1] {
                let t = torus_element(&ra, n, Some(s)).unwrap().unwrap();
                assert!(f.eq(&ra.norm(&t), &f.one()));
                assert_eq!(ra.epsilon(&t.b).unwrap(), s);
            }
        }
    }

    #[test]
    fn quotient_orders() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let un = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        assert_eq!(quotient_reps(&un, 1).unwrap().len(), 4);
        assert_eq!(quotient_reps(&un, 2).unwrap().len(), 12);
        let f2 = parse_field("Fq:p=2,f=1,prec=12").unwrap();
        let un2 = QuadExt::canonical(&f2, ExtKind::Unramified).unwrap();
        assert_eq!(quotient_reps(&un2, 1).unwrap().len(), 3);
        assert_eq!(quotient_reps(&un2, 2).unwrap().len(), 6);
    }

    #[test]
    fn char2_unramified_depths_are_even() {
        let f = parse_field("Fq:p=2,f=1,prec=16").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        assert!(torus_element(&e, 2, None).unwrap().is_some());
        assert!(torus_element(&e, 1, None).unwrap().is_none());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let t = random_torus_element(&e, &mut rng, 4, 3).unwrap();
            assert!(f.eq(&e.norm(&t), &f.one()));
            assert_eq!(t.b.val().unwrap() % 2, 0);
        }
    }
}
