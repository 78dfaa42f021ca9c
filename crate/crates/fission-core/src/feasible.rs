//! Exact feasibility of homogeneous linear systems over the rationals.
//!
//! Constraints are `sum c_i x_i REL 0` with integer coefficients and
//! `REL` one of `=`, `<=`, `<`. Solving eliminates variables one at a
//! time: by substitution when an equality is available, otherwise by
//! Fourier-Motzkin projection (combining each lower bound with each upper
//! bound, strictness propagating through). Because the system is
//! homogeneous the residual constraints are all `0 REL 0`, so
//! infeasibility shows up as a derived `0 < 0`. A feasible run replays the
//! elimination in reverse to produce an explicit rational witness.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

/// `sum coeffs[i] * x_i REL 0`; homogeneous by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<BigInt>,
    pub rel: Rel,
}

impl LinearConstraint {
    pub fn eq(coeffs: Vec<BigInt>) -> Self {
        LinearConstraint {
            coeffs,
            rel: Rel::Eq,
        }
    }

    pub fn le(coeffs: Vec<BigInt>) -> Self {
        LinearConstraint {
            coeffs,
            rel: Rel::Le,
        }
    }

    pub fn lt(coeffs: Vec<BigInt>) -> Self {
        LinearConstraint {
            coeffs,
            rel: Rel::Lt,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// For a constant row, whether `0 REL 0` holds.
    fn constant_holds(&self) -> bool {
        !matches!(self.rel, Rel::Lt)
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let value: Rational = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| Rational::from_integer(c.clone()) * v)
            .sum();
        match self.rel {
            Rel::Eq => value.is_zero(),
            Rel::Le => !value.is_positive(),
            Rel::Lt => value.is_negative(),
        }
    }
}

/// One bound on an eliminated variable: `x REL (sum coeffs * x)/divisor`
/// with `divisor > 0`; `strict` carries the original strictness.
#[derive(Debug, Clone)]
struct Bound {
    coeffs: Vec<BigInt>,
    divisor: BigInt,
    strict: bool,
}

impl Bound {
    fn eval(&self, x: &[Option<Rational>]) -> Rational {
        let num: Rational = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_zero() {
                    Rational::zero()
                } else {
                    Rational::from_integer(c.clone())
                        * x[i].as_ref().expect("later variables already assigned")
                }
            })
            .sum();
        num / Rational::from_integer(self.divisor.clone())
    }
}

enum Step {
    /// `x_var = (sum coeffs * x)/divisor`, divisor > 0.
    Subst {
        var: usize,
        coeffs: Vec<BigInt>,
        divisor: BigInt,
    },
    /// Bounds the projection removed: `lowers REL x_var REL uppers`.
    Project {
        var: usize,
        lowers: Vec<Bound>,
        uppers: Vec<Bound>,
    },
}

/// A homogeneous system of linear constraints in `n_vars` variables.
#[derive(Debug, Clone, Default)]
pub struct FeasibilitySystem {
    pub n_vars: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl FeasibilitySystem {
    pub fn new(n_vars: usize) -> Self {
        FeasibilitySystem {
            n_vars,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: LinearConstraint) {
        debug_assert_eq!(c.coeffs.len(), self.n_vars);
        self.constraints.push(c);
    }

    /// `Some(witness)` iff the system has a rational solution.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        let mut rows: Vec<LinearConstraint> = Vec::new();
        for c in &self.constraints {
            if c.is_constant() {
                if !c.constant_holds() {
                    return None;
                }
            } else {
                rows.push(c.clone());
            }
        }
        let mut steps: Vec<Step> = Vec::new();
        for var in 0..self.n_vars {
            rows = eliminate(rows, var, &mut steps)?;
        }
        debug_assert!(rows.is_empty());
        // back-substitution
        let mut values: Vec<Option<Rational>> = vec![None; self.n_vars];
        for step in steps.iter().rev() {
            match step {
                Step::Subst {
                    var,
                    coeffs,
                    divisor,
                } => {
                    let b = Bound {
                        coeffs: coeffs.clone(),
                        divisor: divisor.clone(),
                        strict: false,
                    };
                    values[*var] = Some(b.eval(&values));
                }
                Step::Project {
                    var,
                    lowers,
                    uppers,
                } => {
                    // ties between bounds must OR their strictness
                    let mut lo: Option<(Rational, bool)> = None;
                    for b in lowers {
                        let v = b.eval(&values);
                        lo = Some(match lo {
                            None => (v, b.strict),
                            Some((bv, bs)) => match v.cmp(&bv) {
                                std::cmp::Ordering::Greater => (v, b.strict),
                                std::cmp::Ordering::Equal => (bv, bs || b.strict),
                                std::cmp::Ordering::Less => (bv, bs),
                            },
                        });
                    }
                    let mut up: Option<(Rational, bool)> = None;
                    for b in uppers {
                        let v = b.eval(&values);
                        up = Some(match up {
                            None => (v, b.strict),
                            Some((bv, bs)) => match v.cmp(&bv) {
                                std::cmp::Ordering::Less => (v, b.strict),
                                std::cmp::Ordering::Equal => (bv, bs || b.strict),
                                std::cmp::Ordering::Greater => (bv, bs),
                            },
                        });
                    }
                    let value = match (lo, up) {
                        (None, None) => Rational::one(),
                        (Some((l, strict)), None) => {
                            if strict {
                                l + Rational::one()
                            } else {
                                l
                            }
                        }
                        (None, Some((u, strict))) => {
                            if strict {
                                u - Rational::one()
                            } else {
                                u
                            }
                        }
                        (Some((l, ls)), Some((u, us))) => {
                            debug_assert!(l <= u, "projection left an empty interval");
                            if l == u {
                                debug_assert!(!ls && !us, "strict bounds cannot coincide");
                                l
                            } else {
                                (l + u) / Rational::from_integer(BigInt::from(2))
                            }
                        }
                    };
                    values[*var] = Some(value);
                }
            }
        }
        let witness: Vec<Rational> = values.into_iter().map(|v| v.unwrap()).collect();
        debug_assert!(self.constraints.iter().all(|c| c.satisfied_by(&witness)));
        Some(witness)
    }
}

/// Removes `var` from every row; returns the projected rows or `None` on
/// a derived contradiction.
fn eliminate(
    rows: Vec<LinearConstraint>,
    var: usize,
    steps: &mut Vec<Step>,
) -> Option<Vec<LinearConstraint>> {
    // prefer substitution through an equality involving the variable
    if let Some(pos) = rows
        .iter()
        .position(|c| c.rel == Rel::Eq && !c.coeffs[var].is_zero())
    {
        let mut eq = rows[pos].clone();
        if eq.coeffs[var].is_negative() {
            for c in eq.coeffs.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        let a = eq.coeffs[var].clone();
        let mut rest: Vec<BigInt> = eq.coeffs.iter().map(|c| -c).collect();
        rest[var] = BigInt::zero();
        steps.push(Step::Subst {
            var,
            coeffs: rest,
            divisor: a.clone(),
        });
        let mut out = Vec::new();
        for (idx, row) in rows.into_iter().enumerate() {
            if idx == pos {
                continue;
            }
            let b = row.coeffs[var].clone();
            if b.is_zero() {
                out.push(row);
                continue;
            }
            // a*row - b*eq, with a > 0 so the relation is preserved
            let coeffs: Vec<BigInt> = row
                .coeffs
                .iter()
                .zip(&eq.coeffs)
                .map(|(rc, ec)| rc * &a - ec * &b)
                .collect();
            let combined = LinearConstraint {
                coeffs,
                rel: row.rel,
            };
            debug_assert!(combined.coeffs[var].is_zero());
            if combined.is_constant() {
                if !combined.constant_holds() {
                    return None;
                }
            } else {
                out.push(combined);
            }
        }
        return Some(out);
    }

    let mut lowers: Vec<(LinearConstraint, Bound)> = Vec::new();
    let mut uppers: Vec<(LinearConstraint, Bound)> = Vec::new();
    let mut out = Vec::new();
    for row in rows {
        let a = row.coeffs[var].clone();
        if a.is_zero() {
            out.push(row);
            continue;
        }
        let strict = row.rel == Rel::Lt;
        debug_assert_ne!(row.rel, Rel::Eq, "equalities were handled above");
        let mut rest = row.coeffs.clone();
        rest[var] = BigInt::zero();
        if a.is_positive() {
            // a x + R <= 0  =>  x <= -R/a
            let bound = Bound {
                coeffs: rest.iter().map(|c| -c).collect(),
                divisor: a.clone(),
                strict,
            };
            uppers.push((row, bound));
        } else {
            // a x + R <= 0 with a < 0  =>  x >= R/(-a)
            let bound = Bound {
                coeffs: rest,
                divisor: -a.clone(),
                strict,
            };
            lowers.push((row, bound));
        }
    }
    for (lo_row, _) in &lowers {
        for (up_row, _) in &uppers {
            let a_lo = &lo_row.coeffs[var]; // negative
            let a_up = &up_row.coeffs[var]; // positive
            let coeffs: Vec<BigInt> = lo_row
                .coeffs
                .iter()
                .zip(&up_row.coeffs)
                .enumerate()
                .map(|(i, (lc, uc))| {
                    if i == var {
                        BigInt::zero()
                    } else {
                        lc * a_up - uc * a_lo
                    }
                })
                .collect();
            let rel = if lo_row.rel == Rel::Lt || up_row.rel == Rel::Lt {
                Rel::Lt
            } else {
                Rel::Le
            };
            let combined = LinearConstraint { coeffs, rel };
            if combined.is_constant() {
                if !combined.constant_holds() {
                    return None;
                }
            } else {
                out.push(combined);
            }
        }
    }
    steps.push(Step::Project {
        var,
        lowers: lowers.into_iter().map(|(_, b)| b).collect(),
        uppers: uppers.into_iter().map(|(_, b)| b).collect(),
    });
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;
    use proptest::prelude::*;

    fn c(coeffs: &[i64], rel: Rel) -> LinearConstraint {
        LinearConstraint {
            coeffs: coeffs.iter().map(|&x| BigInt::from(x)).collect(),
            rel,
        }
    }

    #[test]
    fn positivity_conflict() {
        let mut sys = FeasibilitySystem::new(1);
        sys.push(c(&[-1], Rel::Lt)); // x > 0
        sys.push(c(&[1], Rel::Lt)); // x < 0
        assert!(sys.solve().is_none());
    }

    #[test]
    fn ratio_equalities() {
        // x = 2y, x <= y, x > 0, y > 0 is infeasible
        let mut sys = FeasibilitySystem::new(2);
        sys.push(c(&[1, -2], Rel::Eq));
        sys.push(c(&[1, -1], Rel::Le));
        sys.push(c(&[-1, 0], Rel::Lt));
        sys.push(c(&[0, -1], Rel::Lt));
        assert!(sys.solve().is_none());
        // dropping the inequality makes it feasible with x/y = 2
        let mut sys = FeasibilitySystem::new(2);
        sys.push(c(&[1, -2], Rel::Eq));
        sys.push(c(&[-1, 0], Rel::Lt));
        sys.push(c(&[0, -1], Rel::Lt));
        let w = sys.solve().unwrap();
        assert_eq!(w[0], &w[1] * rat_int(2));
        assert!(w.iter().all(|x| x > &rat_int(0)));
    }

    #[test]
    fn pure_strict_chain() {
        // x < y < z together with z < x is a cycle
        let mut sys = FeasibilitySystem::new(3);
        sys.push(c(&[1, -1, 0], Rel::Lt));
        sys.push(c(&[0, 1, -1], Rel::Lt));
        sys.push(c(&[-1, 0, 1], Rel::Lt));
        assert!(sys.solve().is_none());
        // without the closing edge there is a witness
        let mut sys = FeasibilitySystem::new(3);
        sys.push(c(&[1, -1, 0], Rel::Lt));
        sys.push(c(&[0, 1, -1], Rel::Lt));
        let w = sys.solve().unwrap();
        assert!(w[0] < w[1] && w[1] < w[2]);
    }

    proptest! {
        /// Any returned witness satisfies every constraint, and `None`
        /// agrees with a brute-force search over small positive integer
        /// vectors (sufficient for ratio systems of this size).
        #[test]
        fn witness_soundness(rows in proptest::collection::vec(
            (proptest::collection::vec(-3i64..4, 3), 0u8..3), 1..6)) {
            let mut sys = FeasibilitySystem::new(3);
            for v in 0..3 {
                let mut coeffs = vec![0i64; 3];
                coeffs[v] = -1;
                sys.push(c(&coeffs, Rel::Lt));
            }
            for (coeffs, rel) in rows {
                let rel = match rel { 0 => Rel::Eq, 1 => Rel::Le, _ => Rel::Lt };
                sys.push(c(&coeffs, rel));
            }
            match sys.solve() {
                Some(w) => {
                    prop_assert!(sys.constraints.iter().all(|cc| cc.satisfied_by(&w)));
                }
                None => {
                    for a in 1i64..=6 {
                        for b in 1i64..=6 {
                            for d in 1i64..=6 {
                                let x = vec![rat_int(a), rat_int(b), rat_int(d)];
                                prop_assert!(
                                    !sys.constraints.iter().all(|cc| cc.satisfied_by(&x)),
                                    "solver said infeasible but {:?} works", (a, b, d)
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}
