//! Exact linear feasibility over nonnegative variables.
//!
//! Phase-one simplex on a dense rational tableau with Bland's rule, so it
//! always terminates. An infeasible system comes back with a Farkas
//! multiplier vector that can be checked independently of the solver.

use num_traits::{Signed, Zero};

use crate::rational::{dot, one, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `coeffs · z (relation) rhs` rows over variables `z >= 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearSystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

/// Nonnegative row multipliers `y` (sign fixed per relation) with
/// `y^T A >= 0` componentwise and `y^T b < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Sparse form of [`LinearSystem::push`].
    pub fn push_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![zero(); self.num_vars];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.push(coeffs, relation, rhs);
    }

    pub fn is_satisfied_by(&self, z: &[Rational]) -> bool {
        z.len() == self.num_vars
            && z.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, z);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn solve(&self) -> Feasibility {
        Tableau::phase_one(self).finish(self)
    }
}

impl FarkasCertificate {
    pub fn verify(&self, system: &LinearSystem) -> bool {
        let rows = system.constraints();
        if self.multipliers.len() != rows.len() {
            return false;
        }
        let signs_ok = rows.iter().zip(&self.multipliers).all(|(c, y)| match c.relation {
            Relation::Le => !y.is_negative(),
            Relation::Ge => !y.is_positive(),
            Relation::Eq => true,
        });
        if !signs_ok {
            return false;
        }
        let columns_ok = (0..system.num_vars()).all(|j| {
            let s: Rational = rows
                .iter()
                .zip(&self.multipliers)
                .map(|(c, y)| y * &c.coeffs[j])
                .sum();
            !s.is_negative()
        });
        let rhs: Rational = rows
            .iter()
            .zip(&self.multipliers)
            .map(|(c, y)| y * &c.rhs)
            .sum();
        columns_ok && rhs.is_negative()
    }
}

/// Columns: original variables, one slack per inequality row, one artificial
/// per row that cannot start on its own slack, then the right-hand side.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of the phase-one objective; last entry is `-w`.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    /// Per row, the identity column of the starting basis and whether it is
    /// artificial; its reduced cost yields that row's phase-one dual.
    start_column: Vec<(usize, bool)>,
}

impl Tableau {
    fn phase_one(system: &LinearSystem) -> Tableau {
        let m = system.constraints.len();
        let n = system.num_vars;
        let slack_rows: Vec<usize> = (0..m)
            .filter(|&i| system.constraints[i].relation != Relation::Eq)
            .collect();
        // Rows are flipped to a nonnegative right-hand side; a zero `>=` row
        // is flipped too so that its slack enters with +1.
        let flipped: Vec<bool> = system
            .constraints
            .iter()
            .map(|c| c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge))
            .collect();
        let own_slack: Vec<Option<usize>> = (0..m)
            .map(|i| {
                let k = slack_rows.iter().position(|&r| r == i)?;
                let positive = (system.constraints[i].relation == Relation::Le) != flipped[i];
                positive.then_some(n + k)
            })
            .collect();
        let first_artificial = n + slack_rows.len();
        let num_artificial = own_slack.iter().filter(|s| s.is_none()).count();
        let width = first_artificial + num_artificial + 1;
        let mut rows = Vec::with_capacity(m);
        let mut start_column = Vec::with_capacity(m);
        let mut next_artificial = first_artificial;
        for (i, c) in system.constraints.iter().enumerate() {
            let mut row = vec![zero(); width];
            row[..n].clone_from_slice(&c.coeffs);
            if let Some(k) = slack_rows.iter().position(|&r| r == i) {
                row[n + k] = match c.relation {
                    Relation::Le => one(),
                    _ => -one(),
                };
            }
            row[width - 1] = c.rhs.clone();
            if flipped[i] {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            match own_slack[i] {
                Some(col) => start_column.push((col, false)),
                None => {
                    row[next_artificial] = one();
                    start_column.push((next_artificial, true));
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }
        let mut cost = vec![zero(); width];
        for (row, &(col, artificial)) in rows.iter().zip(&start_column) {
            if artificial {
                cost[col] = one();
                for (cj, rj) in cost.iter_mut().zip(row) {
                    *cj -= rj;
                }
            }
        }
        let basis = start_column.iter().map(|&(col, _)| col).collect();
        let mut t = Tableau {
            rows,
            cost,
            basis,
            flipped,
            start_column,
        };
        t.run();
        t
    }

    fn width(&self) -> usize {
        self.cost.len()
    }

    fn run(&mut self) {
        let rhs = self.width() - 1;
        // Bland: lowest entering index, ties in the ratio test by lowest basic index.
        while let Some(enter) = (0..rhs).find(|&j| self.cost[j].is_negative()) {
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // Phase one is bounded below by zero, so a leaving row always exists.
            let (pivot_row, _) = leave.expect("phase-one objective is bounded");
            self.pivot(pivot_row, enter);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn finish(self, system: &LinearSystem) -> Feasibility {
        let rhs = self.width() - 1;
        let objective = -&self.cost[rhs];
        if objective.is_zero() {
            let mut z = vec![zero(); system.num_vars];
            for (i, &b) in self.basis.iter().enumerate() {
                if b < system.num_vars {
                    z[b] = self.rows[i][rhs].clone();
                }
            }
            return Feasibility::Feasible(z);
        }
        // Phase-one duals: y_i = c_j - reduced cost of row i's starting column
        // (c_j = 1 for an artificial, 0 for a slack). Negating and undoing row
        // flips turns them into the certificate convention.
        let multipliers = (0..system.constraints.len())
            .map(|i| {
                let (col, artificial) = self.start_column[i];
                let base = if artificial { one() } else { zero() };
                let y = base - &self.cost[col];
                if self.flipped[i] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        Feasibility::Infeasible(FarkasCertificate { multipliers })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn expect_feasible(sys: &LinearSystem) -> Vec<Rational> {
        match sys.solve() {
            Feasibility::Feasible(z) => {
                assert!(sys.is_satisfied_by(&z), "{z:?}");
                z
            }
            Feasibility::Infeasible(c) => panic!("unexpected infeasibility {c:?}"),
        }
    }

    fn expect_infeasible(sys: &LinearSystem) {
        match sys.solve() {
            Feasibility::Infeasible(c) => assert!(c.verify(sys), "{c:?}"),
            Feasibility::Feasible(z) => panic!("unexpected point {z:?}"),
        }
    }

    #[test]
    fn simplex_point() {
        let mut sys = LinearSystem::new(3);
        sys.push(vec![int(1), int(1), int(1)], Relation::Eq, int(1));
        sys.push(vec![int(0), int(1), int(2)], Relation::Eq, rat(1, 2));
        expect_feasible(&sys);
    }

    #[test]
    fn negative_rhs_rows() {
        let mut sys = LinearSystem::new(2);
        sys.push(vec![int(-1), int(-1)], Relation::Le, int(-3));
        sys.push(vec![int(1), int(0)], Relation::Le, int(1));
        let z = expect_feasible(&sys);
        assert!(z[1] >= int(2));
    }

    #[test]
    fn contradictory_bounds() {
        let mut sys = LinearSystem::new(2);
        sys.push(vec![int(1), int(1)], Relation::Ge, int(3));
        sys.push(vec![int(1), int(0)], Relation::Le, int(1));
        sys.push(vec![int(0), int(1)], Relation::Le, int(1));
        expect_infeasible(&sys);
    }

    #[test]
    fn infeasible_equalities_with_flip() {
        let mut sys = LinearSystem::new(2);
        sys.push(vec![int(1), int(1)], Relation::Eq, int(1));
        sys.push(vec![int(1), int(1)], Relation::Eq, int(-1));
        expect_infeasible(&sys);
    }

    #[test]
    fn nonnegativity_alone_can_refute() {
        let mut sys = LinearSystem::new(1);
        sys.push(vec![int(1)], Relation::Le, rat(-1, 5));
        expect_infeasible(&sys);
    }

    #[test]
    fn empty_system_is_feasible() {
        let sys = LinearSystem::new(2);
        assert_eq!(expect_feasible(&sys), vec![int(0), int(0)]);
    }

    #[test]
    fn certificate_rejects_wrong_signs() {
        let mut sys = LinearSystem::new(1);
        sys.push(vec![int(1)], Relation::Le, int(1));
        let bogus = FarkasCertificate {
            multipliers: vec![int(-1)],
        };
        assert!(!bogus.verify(&sys));
    }

    #[test]
    fn degenerate_cycling_prone_system() {
        // Beale-style degenerate rows; Bland's rule must terminate.
        let mut sys = LinearSystem::new(4);
        sys.push(vec![rat(1, 4), int(-8), int(-1), int(9)], Relation::Le, int(0));
        sys.push(vec![rat(1, 2), int(-12), rat(-1, 2), int(3)], Relation::Le, int(0));
        sys.push(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        sys.push(vec![int(1), int(1), int(1), int(1)], Relation::Ge, int(1));
        expect_feasible(&sys);
    }
}
