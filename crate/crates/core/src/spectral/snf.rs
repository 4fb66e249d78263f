//! Smith normal form of small integer matrices.

/// `(U, D, V)` with `U A V = D`, `U` and `V` unimodular, `D` diagonal with
/// non-negative entries each dividing the next.
pub fn smith_normal_form(a: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<i64>> = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero |entry| in the remaining block
        let Some((pi, pj)) = min_entry(&d, t) else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                let q = d[i][t].div_euclid(d[t][t]);
                if q != 0 {
                    add_row(&mut d, i, t, -q);
                    add_row(&mut u, i, t, -q);
                }
                if d[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                let q = d[t][j].div_euclid(d[t][t]);
                if q != 0 {
                    add_col(&mut d, j, t, -q);
                    add_col(&mut v, j, t, -q);
                }
                if d[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the remaining block
                let bad = (t + 1..m).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| d[i][j] % d[t][t] != 0);
                match bad {
                    Some((i, _)) => {
                        add_row(&mut d, t, i, 1);
                        add_row(&mut u, t, i, 1);
                        continue;
                    }
                    None => break,
                }
            }
            let (pi, pj) = min_entry(&d, t).expect("nonzero block");
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    (u, d, v)
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn min_entry(d: &[Vec<i64>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < d[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(d: &mut [Vec<i64>], a: usize, b: usize) {
    for row in d.iter_mut() {
        row.swap(a, b);
    }
}

/// `row_i += k row_j`.
fn add_row(d: &mut [Vec<i64>], i: usize, j: usize, k: i64) {
    let src = d[j].clone();
    for (x, y) in d[i].iter_mut().zip(src) {
        *x += k * y;
    }
}

/// `col_i += k col_j`.
fn add_col(d: &mut [Vec<i64>], i: usize, j: usize, k: i64) {
    for row in d.iter_mut() {
        row[i] += k * row[j];
    }
}
