//! Rank over GF(p) of polynomial coefficient vectors.

use super::poly::ReducedPolynomial;
use crate::exactnum::inv_mod;
use std::collections::BTreeMap;

/// Rank of the coefficient matrix (rows = polynomials, columns = monomials
/// occurring in any row). Incremental row echelon form, lazily reduced.
pub fn rank_gfp(rows: &[ReducedPolynomial], p: u64) -> usize {
    let mut cols: BTreeMap<u64, usize> = BTreeMap::new();
    for r in rows {
        assert_eq!(r.p, p, "row over a different field");
        for &m in r.coeffs.keys() {
            cols.insert(m, 0);
        }
    }
    // low degree first: pivots cluster on the left
    let mut order: Vec<u64> = cols.keys().copied().collect();
    order.sort_by_key(|&m| (m.count_ones(), m));
    for (i, m) in order.iter().enumerate() {
        cols.insert(*m, i);
    }
    let width = order.len();
    let dense: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![0u64; width];
            for (m, &c) in &r.coeffs {
                v[cols[m]] = c % p;
            }
            v
        })
        .collect();
    rank_dense(dense, width, p)
}

/// Rank of dense rows (entries already < p).
pub fn rank_dense(rows: Vec<Vec<u64>>, width: usize, p: u64) -> usize {
    // (pivot column, row normalized to pivot 1), sorted by pivot
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    // headroom before a lazily accumulated entry must be reduced
    let flush = u64::MAX / ((p - 1) * (p - 1) + 1) - 1;
    for mut row in rows {
        if basis.len() == width {
            break;
        }
        let mut pending = 0u64;
        for (piv, b) in &basis {
            let f = row[*piv] % p;
            if f == 0 {
                continue;
            }
            let m = p - f;
            for (x, &y) in row[*piv..].iter_mut().zip(&b[*piv..]) {
                *x += m * y;
            }
            pending += 1;
            if pending == flush {
                row.iter_mut().for_each(|x| *x %= p);
                pending = 0;
            }
        }
        row.iter_mut().for_each(|x| *x %= p);
        if let Some(piv) = row.iter().position(|&x| x != 0) {
            let inv = inv_mod(row[piv], p);
            row.iter_mut().for_each(|x| *x = *x * inv % p);
            let at = basis.partition_point(|(q, _)| *q < piv);
            basis.insert(at, (piv, row));
        }
    }
    basis.len()
}
