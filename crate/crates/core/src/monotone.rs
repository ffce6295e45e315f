//! Orthant orders and numerical monotonicity certificates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Polytope;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::integrate::integrate_variational;
use crate::integrate::{integrate, IntegratorConfig, Output, Status};
use crate::linalg::Matrix;
use crate::real::Real;

/// `C = {v : s_i v_i ≥ 0}` for a sign vector `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthantCone {
    signs: Vec<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Unrelated,
    /// `u = v`.
    Leq,
    /// `v − u ∈ C \ {0}`.
    Strict,
    /// `v − u ∈ int C`.
    Strong,
}

impl Order {
    pub fn is_ordered(self) -> bool {
        self != Order::Unrelated
    }
}

/// `λ(v) = sign · v[index]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualFunctional {
    pub index: usize,
    pub sign: i8,
}

impl DualFunctional {
    pub fn eval<T: Real>(&self, v: &[T]) -> T {
        T::of(self.sign as f64) * v[self.index]
    }
}

impl OrthantCone {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!("cone signature must be ±1 entries, got {signs:?}")));
        }
        Ok(Self { signs })
    }

    pub fn positive(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    /// Parses a signature such as `-+` or `(-,+)`.
    pub fn parse(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::InvalidParameter(format!("bad cone signature `{s}`"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(signs)
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    fn s<T: Real>(&self, i: usize) -> T {
        T::of(self.signs[i] as f64)
    }

    pub fn contains<T: Real>(&self, v: &[T]) -> bool {
        (0..self.dim()).all(|i| self.s::<T>(i) * v[i] >= T::zero())
    }

    /// Interior membership with the threshold `T::interior_threshold()`.
    pub fn in_interior<T: Real>(&self, v: &[T]) -> bool {
        let th = T::interior_threshold();
        (0..self.dim()).all(|i| self.s::<T>(i) * v[i] > th)
    }

    pub fn compare<T: Real>(&self, u: &[T], v: &[T]) -> Order {
        let d: Vec<T> = v.iter().zip(u).map(|(&a, &b)| a - b).collect();
        if d.iter().all(|&x| x == T::zero()) {
            Order::Leq
        } else if self.in_interior(&d) {
            Order::Strong
        } else if self.contains(&d) {
            Order::Strict
        } else {
            Order::Unrelated
        }
    }

    /// Signed unit vectors `s_j e_j`.
    pub fn generators<T: Real>(&self) -> Vec<Vec<T>> {
        (0..self.dim())
            .map(|j| {
                let mut e = vec![T::zero(); self.dim()];
                e[j] = self.s(j);
                e
            })
            .collect()
    }

    pub fn dual_generators(&self) -> Vec<DualFunctional> {
        self.signs
            .iter()
            .enumerate()
            .map(|(index, &sign)| DualFunctional { index, sign })
            .collect()
    }

    /// Closedness under sums and positive scaling and pointedness, checked
    /// on the generators.
    pub fn verify_axioms(&self) -> bool {
        let g = self.generators::<f64>();
        let sums = g.iter().all(|a| {
            g.iter()
                .all(|b| self.contains(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>()))
        });
        let scaled = g.iter().all(|a| self.contains(&a.iter().map(|x| 2.5 * x).collect::<Vec<_>>()));
        let pointed = g.iter().all(|a| !self.contains(&a.iter().map(|x| -x).collect::<Vec<_>>()));
        sums && scaled && pointed
    }

    /// `diag(s) · A · diag(s)`.
    pub fn conjugate<T: Real>(&self, a: &Matrix<T>) -> Matrix<T> {
        let mut out = a.clone();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                out[(i, j)] = self.s::<T>(i) * self.s::<T>(j) * a[(i, j)];
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KamkeViolation<T: Real> {
    pub point: usize,
    pub row: usize,
    pub col: usize,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KamkeReport<T: Real> {
    pub cone: Vec<i8>,
    pub strict: bool,
    pub points: Vec<Vec<T>>,
    /// Per point, the sign (−1, 0, 1) of each conjugated entry; the
    /// diagonal is reported as 0.
    pub off_diagonal_signs: Vec<Vec<Vec<i8>>>,
    pub violations: Vec<KamkeViolation<T>>,
    /// Smallest conjugated off-diagonal entry seen.
    pub min_off_diagonal: T,
}

impl<T: Real> KamkeReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sign test on the off-diagonal entries of `diag(s)·J·diag(s)`.
pub fn kamke_check<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    points: &[Vec<T>],
    cone: &OrthantCone,
    strict: bool,
) -> Result<KamkeReport<T>> {
    if field.dim() != cone.dim() {
        return Err(Error::Dimension {
            expected: field.dim(),
            got: cone.dim(),
        });
    }
    let n = cone.dim();
    let per: Vec<Result<(Vec<Vec<i8>>, Vec<KamkeViolation<T>>, T)>> = points
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let j = field.jacobian(p);
            if !j.is_finite() {
                return Err(Error::NonFinite("kamke jacobian"));
            }
            let c = cone.conjugate(&j);
            let mut signs = vec![vec![0i8; n]; n];
            let mut viol = Vec::new();
            let mut lo = T::infinity();
            for r in 0..n {
                for col in 0..n {
                    if r == col {
                        continue;
                    }
                    let v = c[(r, col)];
                    lo = lo.min(v);
                    signs[r][col] = if v > T::zero() {
                        1
                    } else if v < T::zero() {
                        -1
                    } else {
                        0
                    };
                    let bad = if strict { !(v > T::zero()) } else { v < T::zero() };
                    if bad {
                        viol.push(KamkeViolation {
                            point: k,
                            row: r,
                            col,
                            value: v,
                        });
                    }
                }
            }
            Ok((signs, viol, lo))
        })
        .collect();
    let mut report = KamkeReport {
        cone: cone.signs().to_vec(),
        strict,
        points: points.to_vec(),
        off_diagonal_signs: Vec::with_capacity(points.len()),
        violations: Vec::new(),
        min_off_diagonal: T::infinity(),
    };
    for r in per {
        let (s, v, lo) = r?;
        report.off_diagonal_signs.push(s);
        report.violations.extend(v);
        report.min_off_diagonal = report.min_off_diagonal.min(lo);
    }
    Ok(report)
}

pub const DEFAULT_T_GRID: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EpdReport<T: Real> {
    pub cone: Vec<i8>,
    pub t_grid: Vec<T>,
    pub samples: Vec<Vec<T>>,
    /// `values[sample][t][i][j] = λ_i(Dφ_t · e_j)` with `e_j` the signed
    /// generators; empty for excluded samples.
    pub values: Vec<Vec<Vec<Vec<T>>>>,
    /// Samples whose trajectory escaped or failed.
    pub excluded: Vec<usize>,
    /// Earliest grid time from which every value is positive.
    pub t0: Option<T>,
    pub achieved: bool,
    /// Smallest value over `t ≥ t0` (over the whole grid when not achieved).
    pub margin: T,
    /// Earliest grid time from which every value is nonnegative.
    pub t0_nonnegative: Option<T>,
}

/// Evaluates `λ_i(Dφ_t(z) e_j)` on a time grid for every sample.
pub fn eventually_positive_derivatives<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    cone: &OrthantCone,
    samples: &[Vec<T>],
    t_grid: &[T],
    cfg: &IntegratorConfig<T>,
    region: Option<&Polytope<T>>,
) -> Result<EpdReport<T>> {
    let mut grid: Vec<T> = t_grid.iter().copied().filter(|&t| t > T::zero()).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::InvalidParameter("time grid needs a positive time".into()));
    }
    let t_end = *grid.last().expect("non-empty");
    let per: Vec<Result<Option<Vec<Vec<Vec<T>>>>>> = samples
        .par_iter()
        .map(|z| {
            let vt = integrate_variational(field, z, t_end, &grid, cfg)?;
            if vt.status != Status::Completed {
                return Ok(None);
            }
            if let Some(r) = region {
                if vt.states.iter().any(|s| r.margin(s) < -cfg.domain_slack) {
                    return Ok(None);
                }
            }
            let mut out = Vec::with_capacity(grid.len());
            for &t in &grid {
                let Some(k) = vt.times.iter().position(|&s| s == t) else {
                    return Ok(None);
                };
                let c = cone.conjugate(&vt.derivatives[k]);
                out.push(c.to_rows());
            }
            Ok(Some(out))
        })
        .collect();
    let mut values = Vec::with_capacity(samples.len());
    let mut excluded = Vec::new();
    for (k, r) in per.into_iter().enumerate() {
        match r? {
            Some(v) => values.push(v),
            None => {
                excluded.push(k);
                values.push(Vec::new());
            }
        }
    }
    // smallest value per grid time over all kept samples
    let mins: Vec<T> = (0..grid.len())
        .map(|ti| {
            values
                .iter()
                .filter(|v| !v.is_empty())
                .flat_map(|v| v[ti].iter().flatten().copied())
                .fold(T::infinity(), T::min)
        })
        .collect();
    let th = T::interior_threshold();
    let start = (0..grid.len()).find(|&i| mins[i..].iter().all(|&m| m > th));
    let kept = values.iter().any(|v| !v.is_empty());
    let start_nonneg = (0..grid.len()).find(|&i| mins[i..].iter().all(|&m| m >= T::zero()));
    let achieved = start.is_some() && kept;
    let margin = match start {
        Some(i) if kept => mins[i..].iter().copied().fold(T::infinity(), T::min),
        _ => mins.iter().copied().fold(T::infinity(), T::min),
    };
    let t0_nonnegative = if kept { start_nonneg.map(|i| grid[i]) } else { None };
    Ok(EpdReport {
        cone: cone.signs().to_vec(),
        t0: if achieved { start.map(|i| grid[i]) } else { None },
        t_grid: grid,
        samples: samples.to_vec(),
        values,
        excluded,
        achieved,
        margin,
        t0_nonnegative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PairOutcome<T: Real> {
    pub pair: usize,
    pub order: Order,
    pub preserved: bool,
    pub final_u: Vec<T>,
    pub final_v: Vec<T>,
}

/// Integrates both members of each ordered pair to time `t` and checks the
/// order of the images (strong order when `strong` is set).
pub fn monotone_order_preservation_test<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    cone: &OrthantCone,
    pairs: &[(Vec<T>, Vec<T>)],
    t: T,
    strong: bool,
    cfg: &IntegratorConfig<T>,
) -> Result<Vec<PairOutcome<T>>> {
    for (k, (u, v)) in pairs.iter().enumerate() {
        if !cone.compare(u, v).is_ordered() {
            return Err(Error::InvalidState(format!("pair {k} is not ordered")));
        }
    }
    pairs
        .par_iter()
        .enumerate()
        .map(|(k, (u, v))| {
            let (fu, fv) = if t > T::zero() {
                let a = integrate(field, u, (T::zero(), t), cfg, None, &Output::Final)?;
                let b = integrate(field, v, (T::zero(), t), cfg, None, &Output::Final)?;
                if a.status != Status::Completed || b.status != Status::Completed {
                    return Err(Error::Integration(format!("pair {k}: {:?}/{:?}", a.status, b.status)));
                }
                (a.last_state().to_vec(), b.last_state().to_vec())
            } else {
                (u.clone(), v.clone())
            };
            let order = cone.compare(&fu, &fv);
            let preserved = if strong && t > T::zero() {
                order == Order::Strong
            } else {
                order.is_ordered()
            };
            Ok(PairOutcome {
                pair: k,
                order,
                preserved,
                final_u: fu,
                final_v: fv,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    fn rotation() -> FnField<f64> {
        FnField::new(2, |z: &[f64], out: &mut [f64]| {
            out[0] = z[1];
            out[1] = -z[0];
        })
    }

    #[test]
    fn order_examples() {
        let pp = OrthantCone::positive(2);
        assert_eq!(pp.compare(&[0.0, 0.0], &[1.0, 1.0]), Order::Strong);
        assert_eq!(pp.compare(&[0.0, 0.0], &[1.0, 0.0]), Order::Strict);
        assert_eq!(pp.compare(&[0.0, 0.0], &[0.0, 0.0]), Order::Leq);
        assert_eq!(pp.compare(&[0.0, 0.0], &[1.0, -1.0]), Order::Unrelated);
        let mp = OrthantCone::parse("(-,+)").unwrap();
        assert_eq!(mp.compare(&[0.0, 0.0], &[-1.0, 1.0]), Order::Strong);
        assert!(mp.verify_axioms() && pp.verify_axioms());
        assert!(OrthantCone::new(vec![1, 0]).is_err());
    }

    #[test]
    fn dual_generators_are_signed_coordinates() {
        let mp = OrthantCone::new(vec![-1, 1]).unwrap();
        let d = mp.dual_generators();
        assert_eq!(d[0].eval(&[2.0, 3.0]), -2.0);
        assert_eq!(d[1].eval(&[2.0, 3.0]), 3.0);
    }

    #[test]
    fn kamke_examples() {
        let decoupled = FnField::new(2, |z: &[f64], out: &mut [f64]| {
            out[0] = -z[0];
            out[1] = -z[1];
        });
        let pts = vec![vec![0.1, 0.2], vec![-0.3, 0.5]];
        let pp = OrthantCone::positive(2);
        assert!(kamke_check(&decoupled, &pts, &pp, false).unwrap().passed());
        assert!(!kamke_check(&decoupled, &pts, &pp, true).unwrap().passed());
        let rep = kamke_check(&rotation(), &pts, &pp, false).unwrap();
        assert_eq!(rep.violations.len(), pts.len());
        assert!(rep.violations.iter().all(|v| v.row == 1 && v.col == 0 && (v.value + 1.0).abs() < 1e-6));
    }

    #[test]
    fn epd_linear_and_rotation() {
        let diag = FnField::linear(Matrix::from_diagonal(&[-1.0, -2.0]));
        let pp = OrthantCone::positive(2);
        let cfg = IntegratorConfig::default();
        let s = vec![vec![0.5, 0.5]];
        let rep = eventually_positive_derivatives(&diag, &pp, &s, &DEFAULT_T_GRID, &cfg, None).unwrap();
        // off-diagonal entries stay exactly zero: positive derivatives need
        // an irreducible coupling
        assert!(!rep.achieved && rep.t0_nonnegative == Some(0.5));
        let coupled = FnField::linear(Matrix::from_rows(&[vec![-1.0, 0.5], vec![0.5, -2.0]]));
        let rep = eventually_positive_derivatives(&coupled, &pp, &s, &DEFAULT_T_GRID, &cfg, None).unwrap();
        assert!(rep.achieved && rep.t0 == Some(0.5));
        let rep = eventually_positive_derivatives(&rotation(), &pp, &s, &DEFAULT_T_GRID, &cfg, None).unwrap();
        assert!(!rep.achieved && rep.t0.is_none());
    }

    #[test]
    fn order_preservation() {
        let pp = OrthantCone::positive(2);
        let cfg = IntegratorConfig::default();
        let pairs = vec![(vec![0.0, 0.0], vec![1.0, 0.0])];
        let r = monotone_order_preservation_test(&rotation(), &pp, &pairs, 0.0, false, &cfg).unwrap();
        assert!(r[0].preserved);
        let r =
            monotone_order_preservation_test(&rotation(), &pp, &pairs, std::f64::consts::FRAC_PI_2, false, &cfg)
                .unwrap();
        assert!(!r[0].preserved);
        assert!(monotone_order_preservation_test(&rotation(), &pp, &[(vec![1.0, 0.0], vec![0.0, 0.0])], 1.0, false, &cfg)
            .is_err());
    }
}
