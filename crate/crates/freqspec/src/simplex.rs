//! A small dense two-phase simplex over exact rationals, used as an
//! independent cross-check backend for linear optimization over the
//! frequency polytopes. Bland's rule, so no cycling.

use crate::error::{Error, Result};
use crate::Rational;
use num_traits::{One, Signed, Zero};

/// Minimizes c·x subject to A x = b, x >= 0. Returns the optimal value and
/// one optimal solution. The system must be feasible and bounded.
pub fn minimize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
    let rows = a.len();
    let cols = c.len();
    for row in a {
        if row.len() != cols {
            return Err(Error::InvariantViolation("ragged constraint matrix".into()));
        }
    }
    if b.len() != rows {
        return Err(Error::InvariantViolation("rhs length mismatch".into()));
    }

    // Tableau layout: structural columns, artificial columns, rhs.
    let total = cols + rows + 1;
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<Rational> = Vec::with_capacity(total);
        let flip = b[r].is_negative();
        for value in &a[r] {
            row.push(if flip { -value.clone() } else { value.clone() });
        }
        for j in 0..rows {
            row.push(if j == r { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -b[r].clone() } else { b[r].clone() });
        tableau.push(row);
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Phase 1: minimize the sum of artificials.
    let mut objective = vec![Rational::zero(); total];
    for j in cols..cols + rows {
        objective[j] = Rational::one();
    }
    reduce_objective(&mut objective, &tableau, &basis);
    run_simplex(&mut tableau, &mut objective, &mut basis, cols + rows)?;
    if !objective[total - 1].is_zero() {
        return Err(Error::NotInPolytope("linear program is infeasible".into()));
    }
    // Pivot remaining artificials out of the basis when possible.
    for r in 0..rows {
        if basis[r] >= cols {
            if let Some(enter) = (0..cols).find(|&j| !tableau[r][j].is_zero()) {
                pivot(&mut tableau, &mut objective, r, enter);
                basis[r] = enter;
            }
        }
    }

    // Phase 2: the real objective over structural columns only; artificials
    // left in the basis sit at zero and never re-enter.
    let mut objective = vec![Rational::zero(); total];
    objective[..cols].clone_from_slice(c);
    reduce_objective(&mut objective, &tableau, &basis);
    run_simplex(&mut tableau, &mut objective, &mut basis, cols)?;

    let mut solution = vec![Rational::zero(); cols];
    for (r, &var) in basis.iter().enumerate() {
        if var < cols {
            solution[var] = tableau[r][total - 1].clone();
        }
    }
    let value = -objective[total - 1].clone();
    Ok((value, solution))
}

/// Maximizes c·x subject to A x = b, x >= 0.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
    let negated: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    let (value, solution) = minimize(a, b, &negated)?;
    Ok((-value, solution))
}

/// Rewrites the objective row in terms of nonbasic variables.
fn reduce_objective(objective: &mut [Rational], tableau: &[Vec<Rational>], basis: &[usize]) {
    for (r, &var) in basis.iter().enumerate() {
        if objective[var].is_zero() {
            continue;
        }
        let factor = objective[var].clone();
        for j in 0..objective.len() {
            let delta = &factor * &tableau[r][j];
            objective[j] -= delta;
        }
    }
}

/// Bland's-rule simplex loop over the first `eligible` columns.
fn run_simplex(
    tableau: &mut [Vec<Rational>],
    objective: &mut [Rational],
    basis: &mut [usize],
    eligible: usize,
) -> Result<()> {
    let total = objective.len();
    let rhs = total - 1;
    loop {
        let Some(enter) = (0..eligible).find(|&j| objective[j].is_negative()) else {
            return Ok(());
        };
        let mut leaving: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for (r, row) in tableau.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[rhs] / &row[enter];
                let better = match &best {
                    None => true,
                    Some(current) => {
                        ratio < *current
                            || (ratio == *current && basis[r] < basis[leaving.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leaving = Some(r);
                }
            }
        }
        let Some(leave) = leaving else {
            return Err(Error::InvariantViolation(
                "linear program is unbounded".into(),
            ));
        };
        pivot(tableau, objective, leave, enter);
        basis[leave] = enter;
    }
}

fn pivot(tableau: &mut [Vec<Rational>], objective: &mut [Rational], row: usize, col: usize) {
    let head = tableau[row][col].clone();
    for value in tableau[row].iter_mut() {
        *value /= &head;
    }
    let pivot_row = tableau[row].clone();
    for (r, other) in tableau.iter_mut().enumerate() {
        if r == row || other[col].is_zero() {
            continue;
        }
        let factor = other[col].clone();
        for (j, value) in other.iter_mut().enumerate() {
            let delta = &factor * &pivot_row[j];
            *value -= delta;
        }
    }
    if !objective[col].is_zero() {
        let factor = objective[col].clone();
        for (j, value) in objective.iter_mut().enumerate() {
            let delta = &factor * &pivot_row[j];
            *value -= delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn solves_a_tiny_transport_problem() {
        // min x0 + 2 x1 s.t. x0 + x1 = 1, x >= 0
        let a = vec![vec![rat(1, 1), rat(1, 1)]];
        let b = vec![rat(1, 1)];
        let c = vec![rat(1, 1), rat(2, 1)];
        let (value, solution) = minimize(&a, &b, &c).unwrap();
        assert_eq!(value, rat(1, 1));
        assert_eq!(solution, vec![rat(1, 1), rat(0, 1)]);

        let (value, _) = maximize(&a, &b, &c).unwrap();
        assert_eq!(value, rat(2, 1));
    }

    #[test]
    fn handles_redundant_equalities() {
        // x0 + x1 = 1 stated twice
        let a = vec![
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ];
        let b = vec![rat(1, 1), rat(1, 1)];
        let c = vec![rat(3, 1), rat(5, 1)];
        let (value, _) = minimize(&a, &b, &c).unwrap();
        assert_eq!(value, rat(3, 1));
    }

    #[test]
    fn detects_infeasibility() {
        let a = vec![
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ];
        let b = vec![rat(1, 1), rat(2, 1)];
        let c = vec![rat(1, 1), rat(1, 1)];
        assert!(minimize(&a, &b, &c).is_err());
    }

    #[test]
    fn exact_fractions_survive() {
        // min x0/3 + x1/7 with x0 + x1 = 1 picks x1
        let a = vec![vec![rat(1, 1), rat(1, 1)]];
        let b = vec![rat(1, 1)];
        let c = vec![rat(1, 3), rat(1, 7)];
        let (value, solution) = minimize(&a, &b, &c).unwrap();
        assert_eq!(value, rat(1, 7));
        assert_eq!(solution[1], rat(1, 1));
    }
}
