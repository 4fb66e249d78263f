use std::collections::HashSet;

use super::local::{LocalElem, LocalField};
use crate::error::{Error, Result};

/// All elements of `O / ϖ^k`, as exact elements with digits below `k`.
pub fn enumerate_residues(f: &LocalField, k: u32) -> Result<Vec<LocalElem>> {
    let q = f.q() as u64;
    let n = q.checked_pow(k).filter(|&n| n <= 4_000_000).ok_or(Error::SizeGuard(u64::MAX))?;
    let mut out = Vec::with_capacity(n as usize);
    let mut digits = vec![0u32; k as usize];
    for _ in 0..n {
        out.push(f.from_digits(0, digits.clone(), None));
        for d in digits.iter_mut() {
            *d += 1;
            if *d < f.q() {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// `|F^x / (F^x)^2|` estimated through level `k`: twice the index of the
/// squares in `(O / ϖ^k)^x`. Stabilizes at 4 for odd `p` and at 8 for
/// `Q_2`; grows without bound in equal characteristic 2.
pub fn square_class_count(f: &LocalField, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    let units: Vec<LocalElem> = enumerate_residues(f, k)?
        .into_iter()
        .filter(|x| f.is_unit(x))
        .collect();
    let mut squares = HashSet::new();
    for u in &units {
        let s = f.truncate(&f.square(u), k as i64);
        squares.insert(f.residue_digits(&s, k as i64)?);
    }
    Ok(2 * units.len() as u64 / squares.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_residue_characteristic_gives_four() {
        let f = LocalField::qp(5, 10).unwrap();
        for k in 1..=3 {
            assert_eq!(square_class_count(&f, k).unwrap(), 4);
        }
    }

    #[test]
    fn dyadic_counts() {
        let q2 = LocalField::qp(2, 10).unwrap();
        let got: Vec<u64> = (1..=5).map(|k| square_class_count(&q2, k).unwrap()).collect();
        assert_eq!(got, vec![2, 4, 8, 8, 8]);
        let f2 = LocalField::laurent(2, 1, 10, None).unwrap();
        let got: Vec<u64> = (1..=6).map(|k| square_class_count(&f2, k).unwrap()).collect();
        assert!(got.windows(2).all(|w| w[0] <= w[1]));
        assert!(got[5] > got[1]);
    }
}
