//! Small dense exact linear algebra.

use num_traits::Zero;

use crate::rational::{dot, scale_vec, sub_vec, unit_vec, Rational};

pub type Matrix = Vec<Vec<Rational>>;

/// Row-reduces in place and returns the pivot columns.
fn row_reduce(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v / &lead;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Unique solution of the square system `a z = b`, if `a` is nonsingular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.len() != n || pivots.last() == Some(&n) {
        return None;
    }
    Some(m.into_iter().map(|mut r| r.pop().expect("augmented row")).collect())
}

/// Orthogonalizes `vectors` in order, dropping those dependent on earlier ones.
pub fn gram_schmidt(vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b) / dot(b, b);
            w = sub_vec(&w, &scale_vec(&c, b));
        }
        if w.iter().any(|x| !x.is_zero()) {
            basis.push(w);
        }
    }
    basis
}

/// Orthogonal basis of `{ y : normal · y = 0 }` in dimension `normal.len()`.
pub fn orthogonal_complement(normal: &[Rational]) -> Vec<Vec<Rational>> {
    let n = normal.len();
    let mut gens = vec![normal.to_vec()];
    gens.extend((0..n).map(|i| unit_vec(n, i)));
    let mut basis = gram_schmidt(&gens);
    if normal.iter().any(|x| !x.is_zero()) {
        basis.remove(0);
    }
    basis
}

/// Orthogonal projection of `u` onto `{ y : normal · y = offset }`.
pub fn project_onto_hyperplane(u: &[Rational], normal: &[Rational], offset: &Rational) -> Vec<Rational> {
    let c = (dot(normal, u) - offset) / dot(normal, normal);
    sub_vec(u, &scale_vec(&c, normal))
}

pub fn transpose(m: &[Vec<Rational>]) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn solves_square_system() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let z = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(z, vec![rat(4, 5), rat(7, 5)]);
        assert!(solve(&m(&[&[1, 1], &[2, 2]]), &[int(1), int(2)]).is_none());
    }

    #[test]
    fn complement_is_orthogonal() {
        let normal = vec![int(1), int(2), int(-1)];
        let basis = orthogonal_complement(&normal);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(dot(b, &normal).is_zero());
        }
        assert!(dot(&basis[0], &basis[1]).is_zero());
    }

    #[test]
    fn projection_lands_on_hyperplane() {
        let normal = vec![int(1), int(1)];
        let p = project_onto_hyperplane(&[int(3), int(0)], &normal, &int(1));
        assert_eq!(p, vec![int(2), int(-1)]);
    }
}
