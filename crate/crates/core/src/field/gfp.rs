//! Small dense linear algebra over the prime field GF(p), on plain `u32` digit
//! vectors. Used to treat GF(p^d) as a d-dimensional GF(p)-space.

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, (a % p) as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i64) as u32
}

/// Reduce `rows` in place to reduced row-echelon form; zero rows are dropped.
/// Returns the pivot column of each surviving row.
pub(crate) fn rref(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = (*x * inv) % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + (p - f) * rows[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Eliminate `v` against a reduced basis; returns the residual.
pub(crate) fn reduce(v: &mut [u32], rows: &[Vec<u32>], pivots: &[usize], p: u32) {
    for (row, &c) in rows.iter().zip(pivots) {
        let f = v[c];
        if f != 0 {
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + (p - f) * y) % p;
            }
        }
    }
}

/// Basis of {c : Σ cᵢ·rowsᵢ = 0}.
pub(crate) fn kernel(rows: &[Vec<u32>], p: u32) -> Vec<Vec<u32>> {
    let n = rows.len();
    // transpose, then read the nullspace off the reduced form
    let cols = rows.first().map_or(0, |r| r.len());
    let mut t: Vec<Vec<u32>> = (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let pivots = if t.is_empty() { Vec::new() } else { rref(&mut t, p) };
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; n];
            v[free] = 1;
            for (row, &pc) in t.iter().zip(&pivots) {
                v[pc] = (p - row[free]) % p;
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix given as rows, or `None` when singular.
pub(crate) fn inverse(m: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let mut aug: Vec<Vec<u32>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let pivots = rref(&mut aug, p);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_dependent_rows() {
        let rows = vec![vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 3]];
        let ker = kernel(&rows, 5);
        assert_eq!(ker, vec![vec![3, 1, 0]]);
    }

    #[test]
    fn inverses_mod_seven() {
        for a in 1..7 {
            assert_eq!(a * inv_mod(a, 7) % 7, 1);
        }
    }

    #[test]
    fn rref_drops_dependent_rows() {
        let mut rows = vec![vec![1, 2], vec![2, 4]];
        let piv = rref(&mut rows, 5);
        assert_eq!(rows, vec![vec![1, 2]]);
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn matrix_inverse_roundtrip() {
        let m = vec![vec![2, 1], vec![1, 1]];
        let inv = inverse(&m, 5).unwrap();
        // [[2,1],[1,1]]^{-1} = [[1,-1],[-1,2]]
        assert_eq!(inv, vec![vec![1, 4], vec![4, 2]]);
        assert!(inverse(&[vec![1, 2], vec![2, 4]], 5).is_none());
    }
}
