//! Small-integer lattice algebra: Hermite and Smith normal forms, left
//! kernels, and LLL reduction. Dimensions here are tiny (tens of rows), so
//! plain `i128` rows and `f64` Gram-Schmidt are enough.

pub type Row = Vec<i128>;

fn is_zero_row(r: &[i128]) -> bool {
    r.iter().all(|&x| x == 0)
}

/// Row-style Hermite normal form of the lattice spanned by `rows`; zero rows
/// are dropped. Pivots are positive and entries above a pivot are reduced
/// into `[0, pivot)`.
pub fn hnf(rows: &[Row]) -> Vec<Row> {
    let mut m: Vec<Row> = rows.iter().filter(|r| !is_zero_row(r)).cloned().collect();
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == m.len() {
            break;
        }
        // Euclid down the column until a single nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..m.len() {
                if m[i][c] != 0 && best.is_none_or(|b| m[i][c].abs() < m[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..m.len() {
                if m[i][c] != 0 {
                    let q = m[i][c].div_euclid(m[pivot_row][c]);
                    let p = m[pivot_row].clone();
                    for (x, y) in m[i].iter_mut().zip(&p) {
                        *x -= q * y;
                    }
                    if m[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && m[pivot_row][c] != 0 {
            if m[pivot_row][c] < 0 {
                for x in m[pivot_row].iter_mut() {
                    *x = -*x;
                }
            }
            let p = m[pivot_row].clone();
            for i in 0..pivot_row {
                let q = m[i][c].div_euclid(p[c]);
                for (x, y) in m[i].iter_mut().zip(&p) {
                    *x -= q * y;
                }
            }
            pivot_row += 1;
        }
    }
    m.retain(|r| !is_zero_row(r));
    m
}

/// Basis of `{z ∈ Z^rows : z·M = 0}`.
pub fn left_kernel(m: &[Row]) -> Vec<Row> {
    let n = m.len();
    if n == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let augmented: Vec<Row> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| i128::from(i == j)));
            row
        })
        .collect();
    hnf(&augmented)
        .into_iter()
        .filter(|r| is_zero_row(&r[..cols]))
        .map(|r| r[cols..].to_vec())
        .collect()
}

/// Smith form `D = U·A·V` of a `k × n` matrix; only `V` and `V⁻¹` are tracked.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal entries, `min(k, n)` of them, each dividing the next
    /// (zeros last).
    pub diagonal: Vec<i128>,
    pub v: Vec<Row>,
    pub v_inv: Vec<Row>,
}

pub fn smith(a: &[Row], n: usize) -> Smith {
    let mut a: Vec<Row> = a.to_vec();
    let k = a.len();
    let mut v: Vec<Row> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let mut v_inv = v.clone();

    // Column op: col_j += q·col_i.
    let col_add = |a: &mut Vec<Row>, v: &mut Vec<Row>, v_inv: &mut Vec<Row>, j: usize, i: usize, q: i128| {
        for row in a.iter_mut() {
            row[j] += q * row[i];
        }
        for row in v.iter_mut() {
            row[j] += q * row[i];
        }
        let ri = v_inv[j].clone();
        for (x, y) in v_inv[i].iter_mut().zip(&ri) {
            *x -= q * y;
        }
    };
    let col_swap = |a: &mut Vec<Row>, v: &mut Vec<Row>, v_inv: &mut Vec<Row>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    };

    let t_max = k.min(n);
    for t in 0..t_max {
        loop {
            // Smallest nonzero entry of the trailing block goes to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            if bj != t {
                col_swap(&mut a, &mut v, &mut v_inv, t, bj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..k {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    let pr = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(&pr) {
                        *x -= q * y;
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    col_add(&mut a, &mut v, &mut v_inv, j, t, -q);
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any offending row into row t and retry.
            let offending = (t + 1..k).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match offending {
                Some(i) => {
                    let ri = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&ri) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if t < k && a[t][t] < 0 {
            // Row negation; row t is zero off the diagonal and V is unaffected.
            a[t][t] = -a[t][t];
        }
    }
    let diagonal = (0..t_max).map(|t| a[t][t].abs()).collect();
    Smith { diagonal, v, v_inv }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LLL reduction (`δ = 0.99`) with floating Gram-Schmidt recomputed after
/// every change; fine for the handful of rows used here.
pub fn lll(rows: &[Row]) -> Vec<Row> {
    let mut b: Vec<Row> = rows.iter().filter(|r| !is_zero_row(r)).cloned().collect();
    let n = b.len();
    if n <= 1 {
        return b;
    }
    let delta = 0.99;
    let gram_schmidt = |b: &[Row]| -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(b.len());
        let mut mu = vec![vec![0.0; b.len()]; b.len()];
        for i in 0..b.len() {
            let bi: Vec<f64> = b[i].iter().map(|&x| x as f64).collect();
            let mut s = bi.clone();
            for j in 0..i {
                let denom = dot(&star[j], &star[j]);
                mu[i][j] = if denom > 0.0 { dot(&bi, &star[j]) / denom } else { 0.0 };
                for (x, y) in s.iter_mut().zip(&star[j]) {
                    *x -= mu[i][j] * y;
                }
            }
            star.push(s);
        }
        (star, mu)
    };
    let (mut star, mut mu) = gram_schmidt(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i128;
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= qi * y;
                }
                let (s, m) = gram_schmidt(&b);
                star = s;
                mu = m;
            }
        }
        let lhs = dot(&star[k], &star[k]);
        let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * dot(&star[k - 1], &star[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let (s, m) = gram_schmidt(&b);
            star = s;
            mu = m;
            k = (k - 1).max(1);
        }
    }
    b.retain(|r| !is_zero_row(r));
    b
}

/// Integer matrix product `a·b`.
pub fn mat_mul(a: &[Row], b: &[Row]) -> Vec<Row> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|r| (0..cols).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> Vec<Row> {
        (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
    }

    #[test]
    fn hnf_of_multiples() {
        let h = hnf(&[vec![4, -2, 0], vec![-2, 1, 0], vec![6, -3, 0]]);
        assert_eq!(h, vec![vec![2, -1, 0]]);
        let h = hnf(&[vec![2, 0], vec![0, 3], vec![4, 6]]);
        assert_eq!(h, vec![vec![2, 0], vec![0, 3]]);
    }

    #[test]
    fn kernel_annihilates() {
        let m = vec![vec![1, 0], vec![3, 1], vec![5, 2], vec![0, 4]];
        let ker = left_kernel(&m);
        assert_eq!(ker.len(), 2);
        for z in &ker {
            let prod: Vec<i128> = (0..2).map(|j| z.iter().zip(&m).map(|(a, r)| a * r[j]).sum()).collect();
            assert_eq!(prod, vec![0, 0]);
        }
    }

    #[test]
    fn smith_examples() {
        // Z^2 / <(2, 0), (0, 3)> ≅ Z/6.
        let s = smith(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diagonal, vec![1, 6]);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(2));
        // Z^3 / <(2, -1, 0)> ≅ Z^2.
        let s = smith(&[vec![2, -1, 0]], 3);
        assert_eq!(s.diagonal, vec![1]);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(3));
        // Z^2 / <(2, 0), (0, 2)> has two torsion factors.
        let s = smith(&[vec![2, 0], vec![0, 2]], 2);
        assert_eq!(s.diagonal, vec![2, 2]);
        let s = smith(&[vec![4, 6], vec![6, 4]], 2);
        assert_eq!(s.diagonal, vec![2, 10]);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(2));
    }

    #[test]
    fn lll_finds_short_vector() {
        let w = 1_000_000i128;
        let theta = [0.41421356237309503f64, 0.8284271247461901];
        let mut rows: Vec<Row> = (0..2)
            .map(|i| {
                let mut r = vec![0; 3];
                r[i] = 1;
                r[2] = (theta[i] * w as f64).round() as i128;
                r
            })
            .collect();
        rows.push(vec![0, 0, w]);
        let red = lll(&rows);
        let first = &red[0];
        assert_eq!(first[..2].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![2, 1]);
    }
}
