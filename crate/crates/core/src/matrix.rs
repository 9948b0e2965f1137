//! Exact linear algebra over the rationals.
//!
//! Small dense routines used by the lattice layers: determinants, linear
//! solves, coordinate expression of a vector in a given spanning set, and
//! the signature of a symmetric matrix via congruence diagonalization.
//! Everything is exact; matrices are row-major `Vec<Vec<Rat>>`.

use crate::rat::Rat;

/// Determinant of a square matrix by fraction-exact Gaussian elimination.
pub fn determinant(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    for row in m {
        assert!(row.len() == n, "determinant requires a square matrix");
    }
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Solves the square system `a x = b`. Returns `None` if `a` is singular.
pub fn solve_square(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    assert!(b.len() == n, "right-hand side length must match matrix size");
    for row in a {
        assert!(row.len() == n, "solve_square requires a square matrix");
    }
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        let p = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    Some(m.into_iter().map(|row| row[row.len() - 1].clone()).collect())
}

/// Writes `target` as a linear combination of `columns`.
///
/// The system may be overdetermined; returns the unique coefficient vector
/// when the columns are independent and the system is consistent, and
/// `None` when the target lies outside the span or the columns are
/// dependent (so no unique expression exists).
pub fn express(columns: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let k = columns.len();
    let n = target.len();
    for col in columns {
        assert!(col.len() == n, "column length must match target length");
    }
    if k == 0 {
        return if target.iter().all(Rat::is_zero) { Some(vec![]) } else { None };
    }
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..k {
        let pivot = match (rank..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return None,
        };
        m.swap(pivot, rank);
        let p = m[rank][col].clone();
        for c in col..=k {
            m[rank][c] = &m[rank][c] / &p;
        }
        for r in 0..n {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=k {
                let delta = &factor * &m[rank][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
    }
    if m.iter().skip(rank).any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

/// Signature `(positive, negative, zero)` of a symmetric matrix, computed
/// by exact simultaneous row and column reduction.
pub fn signature(sym: &[Vec<Rat>]) -> (usize, usize, usize) {
    let n = sym.len();
    for (i, row) in sym.iter().enumerate() {
        assert!(row.len() == n, "signature requires a square matrix");
        for j in 0..n {
            assert!(row[j] == sym[j][i], "signature requires a symmetric matrix");
        }
    }
    let mut m: Vec<Vec<Rat>> = sym.to_vec();
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    for k in 0..n {
        if m[k][k].is_zero() {
            // A zero diagonal entry with some off-diagonal partner can be
            // repaired by the congruence "add row and column j to k", which
            // makes the new diagonal entry 2 m[k][j] (nonzero over Q).
            if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                for c in 0..n {
                    let add = m[j][c].clone();
                    m[k][c] += add;
                }
                for r in 0..n {
                    let add = m[r][j].clone();
                    m[r][k] += add;
                }
            } else {
                zero += 1;
                continue;
            }
        }
        let p = m[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let factor = &m[r][k] / &p;
            for c in 0..n {
                let delta = &factor * &m[k][c];
                m[r][c] -= delta;
            }
            for c in 0..n {
                let delta = &factor * &m[c][k];
                m[c][r] -= delta;
            }
        }
    }
    (pos, neg, zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(entries: &[&[i64]]) -> Vec<Vec<Rat>> {
        entries
            .iter()
            .map(|row| row.iter().map(|&x| Rat::int(x)).collect())
            .collect()
    }

    /// Intersection matrix of a chain of rational curves with
    /// self-intersections `-c[i]` and consecutive curves meeting once.
    fn chain_gram(c: &[i64]) -> Vec<Vec<Rat>> {
        let n = c.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rat::int(-c[i])
                        } else if i.abs_diff(j) == 1 {
                            Rat::one()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn determinant_hand_values() {
        assert_eq!(determinant(&rows(&[&[1]])), Rat::int(1));
        assert_eq!(determinant(&rows(&[&[0, 1], &[1, 0]])), Rat::int(-1));
        assert_eq!(determinant(&rows(&[&[-2, 1], &[1, 0]])), Rat::int(-1));
        assert_eq!(determinant(&rows(&[&[1, 1], &[1, 1]])), Rat::int(0));
        assert_eq!(
            determinant(&rows(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]])),
            Rat::int(30)
        );
        // Row swaps flip the sign.
        assert_eq!(
            determinant(&rows(&[&[0, 3, 0], &[2, 0, 0], &[0, 0, 5]])),
            Rat::int(-30)
        );
    }

    #[test]
    fn chain_grams_have_determinant_plus_minus_r() {
        // A chain with self-intersections -c1..-ck resolving the cyclic
        // quotient of order r has |det| = r; the sign alternates with k.
        for (chain, r) in [
            (vec![4], 4i64),
            (vec![3, 3], 8),
            (vec![2, 4], 7),
            (vec![3, 2, 2], 7),
            (vec![2, 2], 3),
            (vec![3, 2, 2, 2, 3], 20),
        ] {
            let det = determinant(&chain_gram(&chain));
            let expected = if chain.len() % 2 == 0 { r } else { -r };
            assert_eq!(det, Rat::int(expected), "chain {chain:?}");
        }
    }

    #[test]
    fn solve_square_hand_values() {
        // Discrepancy system for a single -4 curve: -4 d = K.E = 2, d = -1/2
        // on the resolution side, i.e. coefficient +1/2 after negation.
        let sol = solve_square(&rows(&[&[-4]]), &[Rat::int(2)]).unwrap();
        assert_eq!(sol, vec![Rat::new(-1, 2)]);

        // The [2,4] chain: ( -2 1 ; 1 -4 ) d = (0, 2).
        let sol = solve_square(&chain_gram(&[2, 4]), &[Rat::int(0), Rat::int(2)]).unwrap();
        assert_eq!(sol, vec![Rat::new(-2, 7), Rat::new(-4, 7)]);

        assert!(solve_square(&rows(&[&[1, 1], &[1, 1]]), &[Rat::int(1), Rat::int(0)]).is_none());
    }

    #[test]
    fn express_in_spanning_sets() {
        // (5, 1) = 5*(1,0) + 1*(0,1).
        let cols = vec![
            vec![Rat::int(1), Rat::int(0)],
            vec![Rat::int(0), Rat::int(1)],
        ];
        assert_eq!(
            express(&cols, &[Rat::int(5), Rat::int(1)]).unwrap(),
            vec![Rat::int(5), Rat::int(1)]
        );

        // Overdetermined but consistent: (2,2,4) over (1,0,1) and (1,2,3).
        let cols = vec![
            vec![Rat::int(1), Rat::int(0), Rat::int(1)],
            vec![Rat::int(1), Rat::int(2), Rat::int(3)],
        ];
        assert_eq!(
            express(&cols, &[Rat::int(2), Rat::int(2), Rat::int(4)]).unwrap(),
            vec![Rat::int(1), Rat::int(1)]
        );
        // Inconsistent target.
        assert!(express(&cols, &[Rat::int(1), Rat::int(0), Rat::int(0)]).is_none());
        // Dependent columns have no unique expression.
        let dep = vec![
            vec![Rat::int(1), Rat::int(0)],
            vec![Rat::int(2), Rat::int(0)],
        ];
        assert!(express(&dep, &[Rat::int(3), Rat::int(0)]).is_none());
    }

    #[test]
    fn signatures_of_standard_lattices() {
        // Rank-one lattice of the plane.
        assert_eq!(signature(&rows(&[&[1]])), (1, 0, 0));
        // Hyperbolic plane of the quadric (zero diagonal exercises the
        // repair step).
        assert_eq!(signature(&rows(&[&[0, 1], &[1, 0]])), (1, 1, 0));
        // Second Hirzebruch surface.
        assert_eq!(signature(&rows(&[&[-2, 1], &[1, 0]])), (1, 1, 0));
        // Plane blown up four times: (1, 4).
        let dp5 = rows(&[
            &[1, 0, 0, 0, 0],
            &[0, -1, 0, 0, 0],
            &[0, 0, -1, 0, 0],
            &[0, 0, 0, -1, 0],
            &[0, 0, 0, 0, -1],
        ]);
        assert_eq!(signature(&dp5), (1, 4, 0));
        // Chains are negative definite.
        assert_eq!(signature(&chain_gram(&[3, 2, 2, 2, 3])), (0, 5, 0));
        assert_eq!(signature(&chain_gram(&[2, 4])), (0, 2, 0));
        // Degenerate example.
        assert_eq!(signature(&rows(&[&[1, 1], &[1, 1]])), (1, 0, 1));
    }
}
