//! The dual futile cycle
//!
//! ```text
//! S0 + E <-> C1 -> S1 + E <-> C2 -> S2 + E
//! S2 + F <-> C3 -> S1 + F <-> C4 -> S0 + F
//! ```
//!
//! in mass-action form, in the scaled slow–fast form with slow variables
//! `x = ([S0], [S2]) / scale` and fast variables the enzyme complex
//! fractions, and as the planar reduced system on the critical manifold.

use serde::{Deserialize, Serialize};

use crate::domain::{EpsPolytope, Polytope, SlowDomain};
use crate::error::{Error, Result};
use crate::field::FnField;
use crate::linalg::{Eigenvalue, Matrix};
use crate::real::Real;
use crate::system::{ParameterSet, SlowFastSystem, State};

/// Rate constants and totals. `k_m*`/`h_m*` are the unbinding rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct FutileCycleParams<T: Real> {
    pub k1: T,
    pub k_m1: T,
    pub k2: T,
    pub k3: T,
    pub k_m3: T,
    pub k4: T,
    pub h1: T,
    pub h_m1: T,
    pub h2: T,
    pub h3: T,
    pub h_m3: T,
    pub h4: T,
    #[serde(rename = "S_tot")]
    pub s_tot: T,
    #[serde(rename = "E_tot")]
    pub e_tot: T,
    #[serde(rename = "F_tot")]
    pub f_tot: T,
}

pub const PARAM_NAMES: [&str; 15] = [
    "k1", "k_m1", "k2", "k3", "k_m3", "k4", "h1", "h_m1", "h2", "h3", "h_m3", "h4", "S_tot", "E_tot", "F_tot",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DerivedConstants<T: Real> {
    pub eps: T,
    pub c: T,
    pub eps0: T,
    pub km: [T; 4],
    pub sigma0: T,
    pub sigma: T,
    /// Smallest `|max Re λ(B(x))|` over the grid below.
    pub mu: T,
    pub mu_grid: usize,
}

/// The two diagonal blocks of `D_y g0(x, m0(x), 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HurwitzBlocks<T: Real> {
    pub b1: [[T; 2]; 2],
    pub b2: [[T; 2]; 2],
    pub hurwitz: bool,
    /// `(−trace, det)` of each block.
    pub margins: [(T, T); 2],
    pub eigenvalues: Vec<Eigenvalue<T>>,
}

impl<T: Real> HurwitzBlocks<T> {
    /// Verdict from the eigenvalues alone.
    pub fn hurwitz_by_eigenvalues(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.re < T::zero())
    }

    pub fn spectral_abscissa(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(T::neg_infinity(), T::max)
    }
}

fn block_eigs<T: Real>(b: &[[T; 2]; 2]) -> Vec<Eigenvalue<T>> {
    Matrix::from_rows(&[b[0].to_vec(), b[1].to_vec()])
        .eigenvalues()
        .unwrap_or_default()
}

impl<T: Real> FutileCycleParams<T> {
    /// Every rate 1, `S_tot = 1`, `c = 1`, at the given ε.
    pub fn all_ones(eps: T) -> Result<Self> {
        let one = T::one();
        Self {
            k1: one,
            k_m1: one,
            k2: one,
            k3: one,
            k_m3: one,
            k4: one,
            h1: one,
            h_m1: one,
            h2: one,
            h3: one,
            h_m3: one,
            h4: one,
            s_tot: one,
            e_tot: eps,
            f_tot: eps,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.parameter_set()?;
        let eps0 = self.eps0();
        if self.eps() > eps0 {
            return Err(Error::ParameterBound {
                name: "eps".into(),
                value: self.eps().as_f64(),
                bound: eps0.as_f64(),
            });
        }
        Ok(self)
    }

    pub fn parameter_set(&self) -> Result<ParameterSet<T>> {
        ParameterSet::positive(&PARAM_NAMES.iter().copied().zip(self.values()).collect::<Vec<_>>())
    }

    pub fn values(&self) -> [T; 15] {
        [
            self.k1, self.k_m1, self.k2, self.k3, self.k_m3, self.k4, self.h1, self.h_m1, self.h2, self.h3,
            self.h_m3, self.h4, self.s_tot, self.e_tot, self.f_tot,
        ]
    }

    /// Sets one value by name.
    pub fn set(&mut self, name: &str, value: T) -> Result<()> {
        let slot = match name {
            "k1" => &mut self.k1,
            "k_m1" => &mut self.k_m1,
            "k2" => &mut self.k2,
            "k3" => &mut self.k3,
            "k_m3" => &mut self.k_m3,
            "k4" => &mut self.k4,
            "h1" => &mut self.h1,
            "h_m1" => &mut self.h_m1,
            "h2" => &mut self.h2,
            "h3" => &mut self.h3,
            "h_m3" => &mut self.h_m3,
            "h4" => &mut self.h4,
            "S_tot" => &mut self.s_tot,
            "E_tot" => &mut self.e_tot,
            "F_tot" => &mut self.f_tot,
            _ => return Err(Error::InvalidParameter(format!("unknown futile-cycle parameter `{name}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Same ratio `c`, with `E_tot = eps·S_tot`.
    pub fn with_eps(mut self, eps: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::DegenerateTimescale(eps.as_f64()));
        }
        let c = self.c();
        self.e_tot = eps * self.s_tot;
        self.f_tot = c * self.e_tot;
        self.validated()
    }

    pub fn eps(&self) -> T {
        self.e_tot / self.s_tot
    }

    pub fn c(&self) -> T {
        self.f_tot / self.e_tot
    }

    pub fn eps0(&self) -> T {
        T::one() / (T::one() + self.c())
    }

    pub fn michaelis(&self) -> [T; 4] {
        [
            (self.k_m1 + self.k2) / self.k1,
            (self.k_m3 + self.k4) / self.k3,
            (self.h_m1 + self.h2) / self.h1,
            (self.h_m3 + self.h4) / self.h3,
        ]
    }

    pub fn sigma0(&self) -> T {
        let [k1, k2, k3, k4] = self.michaelis();
        let s = self.s_tot;
        (k1 * k2 / (s * (k1 + k2))).min(k3 * k4 / (s * (k3 + k4)))
    }

    pub fn sigma(&self) -> T {
        let s = self.s_tot;
        let (a1, a2) = (self.k_m1 + self.k2, self.k_m3 + self.k4);
        let (b1, b2) = (self.h_m1 + self.h2, self.h_m3 + self.h4);
        [
            self.sigma0(),
            (a1 + a2) / (s * (self.k1 + self.k3)),
            a1 * a2 / (s * (self.k1 * a2 + self.k3 * a1)),
            (b1 + b2) / (s * (self.h1 + self.h3)),
            b1 * b2 / (s * (self.h1 * b2 + self.h3 * b1)),
        ]
        .into_iter()
        .fold(T::infinity(), T::min)
    }

    /// Michaelis constants, σ₀, σ and a grid estimate of μ.
    pub fn derived_constants(&self, mu_grid: usize) -> DerivedConstants<T> {
        let fc = self.scaled();
        let mut mu = T::infinity();
        for x in k0_grid::<T>(mu_grid) {
            if let Ok(hb) = fc.hurwitz_blocks(&x) {
                mu = mu.min(hb.spectral_abscissa().abs());
            }
        }
        DerivedConstants {
            eps: self.eps(),
            c: self.c(),
            eps0: self.eps0(),
            km: self.michaelis(),
            sigma0: self.sigma0(),
            sigma: self.sigma(),
            mu,
            mu_grid,
        }
    }

    /// The scaling `x = [S]/S_tot`, `ε = E_tot/S_tot`.
    pub fn scaled(&self) -> FutileCycle<T> {
        FutileCycle {
            p: *self,
            scale: self.s_tot,
            s: T::one(),
            eps: self.eps(),
        }
    }

    /// The scaling by `A = S_tot + ΣK_m`: `x = [S]/A`, `ε′ = E_tot/A`.
    pub fn alternative_scaling(&self) -> FutileCycle<T> {
        let a = self.s_tot + self.michaelis().into_iter().fold(T::zero(), |s, k| s + k);
        FutileCycle {
            p: *self,
            scale: a,
            s: self.s_tot / a,
            eps: self.e_tot / a,
        }
    }

    pub fn mass_action(&self) -> MassAction<T> {
        MassAction { p: *self }
    }
}

/// Cell-centred `n × n` grid points of `K₀ = {x ≥ 0, x1 + x2 ≤ 1}`.
pub fn k0_grid<T: Real>(n: usize) -> Vec<[T; 2]> {
    let mut pts = Vec::new();
    let h = T::one() / T::of(n as f64);
    for i in 0..n {
        for j in 0..n {
            let x1 = (T::of(i as f64) + T::of(0.5)) * h;
            let x2 = (T::of(j as f64) + T::of(0.5)) * h;
            if x1 + x2 <= T::one() {
                pts.push([x1, x2]);
            }
        }
    }
    pts
}

/// Scaled futile cycle with slow variables `[S0]/scale`, `[S2]/scale` and
/// total substrate fraction `s = S_tot/scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FutileCycle<T: Real> {
    pub p: FutileCycleParams<T>,
    pub scale: T,
    pub s: T,
    pub eps: T,
}

impl<T: Real> FutileCycle<T> {
    fn free_s1(&self, x: &[T], y: &[T], eps: T) -> T {
        self.s - x[0] - x[1] - eps * (y[0] + y[1] + self.p.c() * (y[2] + y[3]))
    }

    pub fn f0(&self, x: &[T], y: &[T], _eps: T, out: &mut [T]) {
        let p = &self.p;
        let (a, c) = (self.scale, p.c());
        let free_e = T::one() - y[0] - y[1];
        let free_f = T::one() - y[2] - y[3];
        out[0] = -p.k1 * a * x[0] * free_e + p.k_m1 * y[0] + p.h4 * c * y[2];
        out[1] = -p.h1 * a * c * x[1] * free_f + p.h_m1 * c * y[3] + p.k4 * y[1];
    }

    pub fn g0(&self, x: &[T], y: &[T], eps: T, out: &mut [T]) {
        let p = &self.p;
        let a = self.scale;
        let s1 = self.free_s1(x, y, eps);
        let free_e = T::one() - y[0] - y[1];
        let free_f = T::one() - y[2] - y[3];
        out[0] = p.k1 * a * x[0] * free_e - (p.k_m1 + p.k2) * y[0];
        out[1] = p.k3 * a * s1 * free_e - (p.k_m3 + p.k4) * y[1];
        out[2] = p.h3 * a * s1 * free_f - (p.h_m3 + p.h4) * y[2];
        out[3] = p.h1 * a * x[1] * free_f - (p.h_m1 + p.h2) * y[3];
    }

    /// Jacobian of `(f0, g0)` in `(x1, x2, y1..y4)`.
    pub fn full_jacobian(&self, x: &[T], y: &[T], eps: T) -> Matrix<T> {
        let p = &self.p;
        let (a, c) = (self.scale, p.c());
        let s1 = self.free_s1(x, y, eps);
        let fe = T::one() - y[0] - y[1];
        let ff = T::one() - y[2] - y[3];
        let z = T::zero();
        let (kk1, kk2) = (p.k_m1 + p.k2, p.k_m3 + p.k4);
        let (hh3, hh4) = (p.h_m3 + p.h4, p.h_m1 + p.h2);
        let k3 = p.k3 * a;
        let h3 = p.h3 * a;
        Matrix::from_rows(&[
            vec![-p.k1 * a * fe, z, p.k1 * a * x[0] + p.k_m1, p.k1 * a * x[0], p.h4 * c, z],
            vec![z, -p.h1 * a * c * ff, z, p.k4, p.h1 * a * c * x[1], p.h1 * a * c * x[1] + p.h_m1 * c],
            vec![p.k1 * a * fe, z, -p.k1 * a * x[0] - kk1, -p.k1 * a * x[0], z, z],
            vec![
                -k3 * fe,
                -k3 * fe,
                k3 * (-eps * fe - s1),
                k3 * (-eps * fe - s1) - kk2,
                -k3 * eps * c * fe,
                -k3 * eps * c * fe,
            ],
            vec![
                -h3 * ff,
                -h3 * ff,
                -h3 * eps * ff,
                -h3 * eps * ff,
                h3 * (-eps * c * ff - s1) - hh3,
                h3 * (-eps * c * ff - s1),
            ],
            vec![z, p.h1 * a * ff, z, z, -p.h1 * a * x[1], -p.h1 * a * x[1] - hh4],
        ])
    }

    fn denominators(&self, x: &[T]) -> Result<(T, T, T)> {
        let [km1, km2, km3, km4] = self.p.michaelis();
        let s1 = self.s - x[0] - x[1];
        let d1 = km1 / self.scale + km1 * s1 / km2 + x[0];
        let d2 = km3 / self.scale + km3 * s1 / km4 + x[1];
        if !(d1 > T::zero() && d2 > T::zero()) {
            return Err(Error::OutsideDomain(format!(
                "m0 undefined at x = ({}, {})",
                x[0], x[1]
            )));
        }
        Ok((s1, d1, d2))
    }

    /// Closed-form critical manifold.
    pub fn m0(&self, x: &[T]) -> Result<[T; 4]> {
        let [km1, km2, km3, km4] = self.p.michaelis();
        let (s1, d1, d2) = self.denominators(x)?;
        Ok([
            x[0] / d1,
            km1 * s1 / km2 / d1,
            km3 * s1 / km4 / d2,
            x[1] / d2,
        ])
    }

    /// `D_x m0` as four rows.
    pub fn m0_jacobian(&self, x: &[T]) -> Result<[[T; 2]; 4]> {
        let [km1, km2, km3, km4] = self.p.michaelis();
        let (s1, d1, d2) = self.denominators(x)?;
        let (r1, r2) = (km1 / km2, km3 / km4);
        let one = T::one();
        // d1 = K1/a + r1 s1 + x1, d2 = K3/a + r2 s1 + x2, s1 = s − x1 − x2
        let dd1 = [one - r1, -r1];
        let dd2 = [-r2, one - r2];
        let quot = |num: T, dnum: [T; 2], d: T, dd: [T; 2]| {
            [
                (dnum[0] * d - num * dd[0]) / (d * d),
                (dnum[1] * d - num * dd[1]) / (d * d),
            ]
        };
        let z = T::zero();
        Ok([
            quot(x[0], [one, z], d1, dd1),
            quot(r1 * s1, [-r1, -r1], d1, dd1),
            quot(r2 * s1, [-r2, -r2], d2, dd2),
            quot(x[1], [z, one], d2, dd2),
        ])
    }

    /// The reduced field `(F1, F2)`.
    pub fn reduced(&self, x: &[T]) -> Result<[T; 2]> {
        let y = self.m0(x)?;
        let p = &self.p;
        let c = p.c();
        Ok([-p.k2 * y[0] + p.h4 * c * y[2], -p.h2 * c * y[3] + p.k4 * y[1]])
    }

    pub fn reduced_jacobian(&self, x: &[T]) -> Result<Matrix<T>> {
        let dy = self.m0_jacobian(x)?;
        let p = &self.p;
        let c = p.c();
        let row = |a: T, i: usize, b: T, j: usize| vec![a * dy[i][0] + b * dy[j][0], a * dy[i][1] + b * dy[j][1]];
        Ok(Matrix::from_rows(&[
            row(-p.k2, 0, p.h4 * c, 2),
            row(-p.h2 * c, 3, p.k4, 1),
        ]))
    }

    /// The reduced system as a planar vector field with analytic Jacobian.
    /// Outside the domain of `m0` the field evaluates to NaN.
    pub fn reduced_field(&self) -> FnField<T> {
        let me = *self;
        let me2 = *self;
        FnField::new(2, move |x: &[T], out: &mut [T]| match me.reduced(x) {
            Ok(f) => out.copy_from_slice(&f),
            Err(_) => out.fill(T::nan()),
        })
        .with_jacobian(move |x: &[T]| {
            me2.reduced_jacobian(x)
                .unwrap_or_else(|_| Matrix::from_rows(&[vec![T::nan(); 2], vec![T::nan(); 2]]))
        })
    }

    pub fn hurwitz_blocks(&self, x: &[T]) -> Result<HurwitzBlocks<T>> {
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(Error::NonFinite("x"));
        }
        let p = &self.p;
        let a = self.scale;
        let s1 = self.s - x[0] - x[1];
        let (kk1, kk2) = (p.k_m1 + p.k2, p.k_m3 + p.k4);
        let (hh1, hh2) = (p.h_m1 + p.h2, p.h_m3 + p.h4);
        let b1 = [
            [-p.k1 * a * x[0] - kk1, -p.k1 * a * x[0]],
            [-p.k3 * a * s1, -p.k3 * a * s1 - kk2],
        ];
        let b2 = [
            [-p.h3 * a * s1 - hh2, -p.h3 * a * s1],
            [-p.h1 * a * x[1], -p.h1 * a * x[1] - hh1],
        ];
        let tr_det = |b: &[[T; 2]; 2]| (-(b[0][0] + b[1][1]), b[0][0] * b[1][1] - b[0][1] * b[1][0]);
        let margins = [tr_det(&b1), tr_det(&b2)];
        let hurwitz = margins.iter().all(|&(t, d)| t > T::zero() && d > T::zero());
        let mut eigenvalues = block_eigs(&b1);
        eigenvalues.extend(block_eigs(&b2));
        Ok(HurwitzBlocks {
            b1,
            b2,
            hurwitz,
            margins,
            eigenvalues,
        })
    }

    /// The slow–fast system with analytic `m0` and Jacobian hooks.
    pub fn system(&self) -> SlowFastSystem<T> {
        let (a, b, m, j, jf) = (*self, *self, *self, *self, *self);
        SlowFastSystem::new(
            2,
            4,
            move |x: &[T], y: &[T], e: T, out: &mut [T]| a.f0(x, y, e, out),
            move |x: &[T], y: &[T], e: T, out: &mut [T]| b.g0(x, y, e, out),
        )
        .with_m0(move |x: &[T]| m.m0(x).map(|y| y.to_vec()))
        .with_fast_jacobian(move |x: &[T], y: &[T], e: T| {
            let full = j.full_jacobian(x, y, e);
            Matrix::from_rows(&(2..6).map(|r| full.row(r)[2..].to_vec()).collect::<Vec<_>>())
        })
        .with_full_jacobian(move |x: &[T], y: &[T], e: T| jf.full_jacobian(x, y, e))
        .with_params(self.p.parameter_set().unwrap_or_default())
    }

    /// `D_ε` in `(x1, x2, y1..y4)`. Each complex fraction is also kept
    /// nonnegative; without that the set is not forward invariant.
    pub fn domain(&self) -> EpsPolytope<T> {
        let (o, z) = (T::one(), T::zero());
        let c = self.p.c();
        let mut rows0 = Vec::new();
        let mut rows1 = Vec::new();
        let mut rhs0 = Vec::new();
        let mut push = |r0: [T; 6], r1: [T; 6], b: T| {
            rows0.push(r0.to_vec());
            rows1.push(r1.to_vec());
            rhs0.push(b);
        };
        let zero = [z; 6];
        push([z, z, -o, -o, z, z], zero, z);
        push([z, z, o, o, z, z], zero, o);
        push([z, z, z, z, -o, -o], zero, z);
        push([z, z, z, z, o, o], zero, o);
        push([-o, z, z, z, z, z], zero, z);
        push([z, -o, z, z, z, z], zero, z);
        push([-o, -o, z, z, z, z], [z, z, -o, -o, -c, -c], z);
        push([o, o, z, z, z, z], [z, z, o, o, c, c], self.s);
        for i in 0..4 {
            let mut r = zero;
            r[2 + i] = -o;
            push(r, zero, z);
        }
        let k = rhs0.len();
        let eps_max = self.p.eps0() * self.s;
        EpsPolytope::new(rows0, rows1, rhs0, vec![z; k], eps_max.max(self.eps))
    }

    /// `U = {x1 > −σ, x2 > −σ, x1 + x2 < s + σ}` with `σ` from the closed
    /// form, and the padded fast box.
    pub fn slow_domain(&self) -> SlowDomain<T> {
        let sigma = self.p.sigma();
        let (o, z) = (T::one(), T::zero());
        let u = Polytope::new(
            vec![vec![-o, z], vec![z, -o], vec![o, o]],
            vec![sigma, sigma, self.s + sigma],
        );
        SlowDomain::new(u, sigma, &self.domain(), 2)
    }

    /// `(x, m0(x))` as a state.
    pub fn on_manifold(&self, x: [T; 2]) -> Result<State<T>> {
        State::new(x.to_vec(), self.m0(&x)?.to_vec())
    }
}

/// Species-level kinetics.
///
/// The reduced state is `([S0], [S2], [C1], [C2], [C4], [C3])`; the full
/// state appends `([S1], [E], [F])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MassAction<T: Real> {
    pub p: FutileCycleParams<T>,
}

impl<T: Real> MassAction<T> {
    /// `([S1], [E], [F])` from the conservation relations.
    pub fn free_species(&self, u: &[T]) -> [T; 3] {
        let p = &self.p;
        [
            p.s_tot - u[0] - u[1] - u[2] - u[3] - u[4] - u[5],
            p.e_tot - u[2] - u[3],
            p.f_tot - u[4] - u[5],
        ]
    }

    /// Rejects states whose recovered species are negative.
    pub fn validate_state(&self, u: &[T]) -> Result<()> {
        if u.len() != 6 {
            return Err(Error::Dimension { expected: 6, got: u.len() });
        }
        let tol = T::of(1e-12) * self.p.s_tot;
        if u.iter().any(|&v| v < -tol) {
            return Err(Error::InvalidState("negative concentration".into()));
        }
        let free = self.free_species(u);
        for (name, v) in ["S1", "E", "F"].iter().zip(free) {
            if v < -tol {
                return Err(Error::InvalidState(format!("totals exceeded: [{name}] = {v}")));
            }
        }
        Ok(())
    }

    fn rates(&self, s0: T, s2: T, c1: T, c2: T, c4: T, c3: T, s1: T, e: T, f: T, out: &mut [T]) {
        let p = &self.p;
        out[0] = p.h4 * c4 - p.k1 * s0 * e + p.k_m1 * c1;
        out[1] = p.k4 * c2 - p.h1 * s2 * f + p.h_m1 * c3;
        out[2] = p.k1 * s0 * e - (p.k_m1 + p.k2) * c1;
        out[3] = p.k3 * s1 * e - (p.k_m3 + p.k4) * c2;
        out[4] = p.h3 * s1 * f - (p.h_m3 + p.h4) * c4;
        out[5] = p.h1 * s2 * f - (p.h_m1 + p.h2) * c3;
    }

    /// The six-state system in time τ.
    pub fn field(&self) -> FnField<T> {
        let me = *self;
        FnField::new(6, move |u: &[T], out: &mut [T]| {
            let [s1, e, f] = me.free_species(u);
            me.rates(u[0], u[1], u[2], u[3], u[4], u[5], s1, e, f, out);
        })
    }

    /// All nine species evolved independently; the totals are then
    /// conserved only by the structure of the network.
    pub fn species_field(&self) -> FnField<T> {
        let me = *self;
        FnField::new(9, move |u: &[T], out: &mut [T]| {
            let p = &me.p;
            me.rates(u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7], u[8], &mut out[..6]);
            let (c1, c2, c4, c3, s1, e, f) = (u[2], u[3], u[4], u[5], u[6], u[7], u[8]);
            out[6] = p.k2 * c1 - p.k3 * s1 * e + p.k_m3 * c2 + p.h2 * c3 - p.h3 * s1 * f + p.h_m3 * c4;
            out[7] = -p.k1 * u[0] * e + (p.k_m1 + p.k2) * c1 - p.k3 * s1 * e + (p.k_m3 + p.k4) * c2;
            out[8] = -p.h1 * u[1] * f + (p.h_m1 + p.h2) * c3 - p.h3 * s1 * f + (p.h_m3 + p.h4) * c4;
        })
    }

    pub fn to_species(&self, u: &[T]) -> Vec<T> {
        let mut v = u.to_vec();
        v.extend(self.free_species(u));
        v
    }

    /// `(S_tot, E_tot, F_tot)` computed from a nine-species state.
    pub fn totals(v: &[T]) -> [T; 3] {
        [
            v[0] + v[1] + v[2] + v[3] + v[4] + v[5] + v[6],
            v[7] + v[2] + v[3],
            v[8] + v[4] + v[5],
        ]
    }

    /// Maps a scaled state at slow time `t` to `(τ, u)` for the given scaling.
    pub fn from_scaled(&self, fc: &FutileCycle<T>, t: T, s: &State<T>) -> (T, [T; 6]) {
        let p = &self.p;
        let (a, e, f) = (fc.scale, p.e_tot, p.f_tot);
        (
            t / fc.eps,
            [s.x[0] * a, s.x[1] * a, s.y[0] * e, s.y[1] * e, s.y[2] * f, s.y[3] * f],
        )
    }

    pub fn to_scaled(&self, fc: &FutileCycle<T>, tau: T, u: &[T]) -> Result<(T, State<T>)> {
        let p = &self.p;
        let (a, e, f) = (fc.scale, p.e_tot, p.f_tot);
        Ok((
            tau * fc.eps,
            State::new(vec![u[0] / a, u[1] / a], vec![u[2] / e, u[3] / e, u[4] / f, u[5] / f])?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;
    use approx::assert_relative_eq;

    fn ones() -> FutileCycle<f64> {
        FutileCycleParams::all_ones(0.1).unwrap().scaled()
    }

    #[test]
    fn eval_at_origin() {
        let sys = ones().system();
        let d = sys.eval_slow_time(&State::new(vec![0.0, 0.0], vec![0.0; 4]).unwrap(), 0.1).unwrap();
        assert_eq!(d.x, vec![0.0, 0.0]);
        for (a, b) in d.y.iter().zip([0.0, 10.0, 10.0, 0.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_values() {
        let fc = ones();
        let y = fc.m0(&[0.0, 0.0]).unwrap();
        for (a, b) in y.iter().zip([0.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let y = fc.m0(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(y[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(y[1], 0.0);
    }

    #[test]
    fn m0_jacobian_matches_differences() {
        let fc = ones();
        let x = [0.3, 0.2];
        let j = fc.m0_jacobian(&x).unwrap();
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let (yp, ym) = (fc.m0(&xp).unwrap(), fc.m0(&xm).unwrap());
            for i in 0..4 {
                assert_relative_eq!(j[i][k], (yp[i] - ym[i]) / 2e-6, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn derived_all_ones() {
        let p = FutileCycleParams::all_ones(1e-3).unwrap();
        assert_eq!(p.michaelis(), [2.0; 4]);
        assert_relative_eq!(p.sigma0(), 1.0);
        assert_relative_eq!(p.sigma(), 1.0);
        assert_relative_eq!(p.eps0(), 0.5);
        let alt = p.alternative_scaling();
        assert_relative_eq!(alt.scale, 9.0);
        assert_relative_eq!(alt.eps, 1e-3 / 9.0);
    }

    #[test]
    fn hurwitz_blocks_at_origin() {
        let hb = ones().hurwitz_blocks(&[0.0, 0.0]).unwrap();
        assert_eq!(hb.b1, [[-2.0, 0.0], [-1.0, -3.0]]);
        assert_eq!(hb.b2, [[-3.0, -1.0], [0.0, -2.0]]);
        assert_eq!(hb.margins, [(5.0, 6.0), (5.0, 6.0)]);
        assert!(hb.hurwitz && hb.hurwitz_by_eigenvalues());
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        let fc = ones();
        let sys = fc.system();
        let (x, y, e) = ([0.3, 0.25], [0.2, 0.3, 0.1, 0.4], 0.05);
        let field = sys.fast_time_field(1.0);
        let z: Vec<f64> = x.iter().chain(&y).copied().collect();
        let fd = crate::field::fd_jacobian(
            |v: &[f64], out: &mut [f64]| {
                fc.f0(&v[..2], &v[2..], e, &mut out[..2]);
                fc.g0(&v[..2], &v[2..], e, &mut out[2..]);
            },
            &z,
            6,
        );
        let an = fc.full_jacobian(&x, &y, e);
        assert!(an.sub(&fd).max_abs() < 1e-8);
        assert_eq!(field.dim(), 6);
        let rj = fc.reduced_jacobian(&x).unwrap();
        let rfd = crate::field::fd_jacobian(
            |v: &[f64], out: &mut [f64]| out.copy_from_slice(&fc.reduced(v).unwrap()),
            &x,
            2,
        );
        assert!(rj.sub(&rfd).max_abs() < 1e-8);
    }

    #[test]
    fn nonpositive_denominator_is_an_error() {
        // all rates 1: D1 = 3 - x2, D2 = 3 - x1
        assert!(ones().m0(&[0.0, 4.0]).is_err());
        assert!(ones().m0(&[3.0, 0.0]).is_err());
        assert!(ones().m0(&[-3.0, 0.0]).is_ok());
    }

    #[test]
    fn mass_action_initial_rates() {
        let p = FutileCycleParams::all_ones(0.1).unwrap();
        let ma = p.mass_action();
        let mut u = [0.0; 6];
        u[0] = p.s_tot;
        let d = ma.field().call(&u);
        assert_relative_eq!(d[0], -p.k1 * p.s_tot * p.e_tot);
        assert_relative_eq!(d[2], p.k1 * p.s_tot * p.e_tot);
        assert!(ma.validate_state(&u).is_ok());
        u[2] = 1.0;
        assert!(ma.validate_state(&u).is_err());
    }

    #[test]
    fn eps_bound_enforced() {
        assert!(FutileCycleParams::all_ones(0.6).is_err());
        let mut p = FutileCycleParams::all_ones(0.1).unwrap();
        p.k1 = -1.0;
        assert!(p.validated().is_err());
    }
}
