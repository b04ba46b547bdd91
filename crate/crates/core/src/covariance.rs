//! Steady-state covariance of (δq, δp, δx, δy).
//!
//! Two independent routes: frequency-domain quadrature of the exact
//! transfer matrix, and an algebraic Lyapunov solve of the augmented
//! five-state system. Both use the symmetrized noise strengths of
//! [`crate::model::NoiseModel`] with a Markov Brownian force.

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Matrix4, SMatrix};

use crate::error::{Error, Result};
use crate::model::{LinearizedSystem, Mat5};
use crate::quadrature::{integrate_half_line, Tolerance};
use crate::response::{position_spectrum_unchecked, ThermalModel};
use crate::stability::{stability_of, Verdict};

type C64 = Complex<f64>;

/// Residual bound for the algebraic solve, relative to ‖D‖.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;
/// Heisenberg bound slack for the smallest symplectic eigenvalue.
pub const UNCERTAINTY_SLACK: f64 = 1e-8;

/// T(ω): noises (ξ, x₁ⁱⁿ, y₁ⁱⁿ, x₂ⁱⁿ, y₂ⁱⁿ) → (δq, δp, δx, δy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub omega: f64,
    pub entries: SMatrix<C64, 4, 5>,
}

pub fn transfer_matrix(lin: &LinearizedSystem, omega: f64) -> Result<TransferMatrix> {
    let iw = C64::new(0.0, omega);
    let one = C64::from(1.0);
    let kernel = one / (one - iw * lin.tau);
    let g = lin.coupling;
    let (s1, s2) = ((2.0 * lin.gamma_1).sqrt(), (2.0 * lin.gamma_2).sqrt());
    let r = |v: f64| C64::from(v);
    let fb = kernel * (2.0 * lin.gamma_2 * lin.kappa * g);
    // (−iω − A) u = B n with the memory eliminated.
    #[rustfmt::skip]
    let m = Matrix4::new(
        -iw,           r(-lin.omega_m),        r(0.0),              r(0.0),
        r(lin.omega_m), -iw + lin.gamma_m,     -(fb + g),           r(0.0),
        r(0.0),        r(0.0),                 -iw + lin.gamma_c,   r(-lin.delta),
        r(-g),         r(0.0),                 r(lin.delta),        -iw + lin.gamma_c,
    );
    let z = r(0.0);
    #[rustfmt::skip]
    let b = SMatrix::<C64, 4, 5>::new(
        z,      z,     z,     z,                                  z,
        one,    z,     z,     -kernel * (lin.kappa * g * s2),     z,
        z,      r(s1), z,     r(s2),                              z,
        z,      z,     r(s1), z,                                  r(s2),
    );
    let lu = m.lu();
    let entries = lu
        .solve(&b)
        .filter(|t| t.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::numeric(format!("transfer matrix singular at ω = {omega}"), 0.0))?;
    Ok(TransferMatrix { omega, entries })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub v: Matrix4<f64>,
}

impl CovarianceMatrix {
    /// (mechanical block, optical block, cross block).
    pub fn blocks(&self) -> (Matrix2<f64>, Matrix2<f64>, Matrix2<f64>) {
        let v = &self.v;
        (
            v.fixed_view::<2, 2>(0, 0).into_owned(),
            v.fixed_view::<2, 2>(2, 2).into_owned(),
            v.fixed_view::<2, 2>(0, 2).into_owned(),
        )
    }

    /// Symplectic eigenvalues (ν₋, ν₊).
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let (a, b, c) = self.blocks();
        let delta = a.determinant() + b.determinant() + 2.0 * c.determinant();
        let disc = (delta * delta - 4.0 * self.v.determinant()).max(0.0).sqrt();
        (
            (0.5 * (delta - disc)).max(0.0).sqrt(),
            (0.5 * (delta + disc)).sqrt(),
        )
    }

    pub fn asymmetry(&self) -> f64 {
        (self.v - self.v.transpose()).abs().max() / self.v.abs().max().max(f64::MIN_POSITIVE)
    }

    /// Symmetric and above the Heisenberg bound.
    pub fn is_physical(&self) -> bool {
        self.asymmetry() < 1e-10 && self.symplectic_eigenvalues().0 >= 0.5 - UNCERTAINTY_SLACK
    }

    /// max_ij |V_ij − W_ij| / √(V_ii V_jj).
    pub fn max_scaled_difference(&self, other: &CovarianceMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let s = (self.v[(i, i)] * self.v[(j, j)]).abs().sqrt().max(f64::MIN_POSITIVE);
                worst = worst.max((self.v[(i, j)] - other.v[(i, j)]).abs() / s);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Quadrature,
    #[default]
    Lyapunov,
}

fn require_stable(lin: &LinearizedSystem) -> Result<()> {
    let r = stability_of(lin);
    match r.verdict {
        Verdict::Stable => Ok(()),
        v => Err(Error::Unstable(format!("{v:?} (margin {:e}); no steady state", r.margin))),
    }
}

pub fn steady_covariance(lin: &LinearizedSystem, method: Method) -> Result<CovarianceMatrix> {
    require_stable(lin)?;
    let s = lin.scaled();
    match method {
        Method::Lyapunov => augmented_lyapunov(&s).map(|v| project(&v)),
        Method::Quadrature => quadrature_covariance(&s, Tolerance::default()),
    }
}

/// Solves A V + V Aᵀ + D = 0 for the augmented system via its Kronecker form.
pub fn augmented_lyapunov(lin: &LinearizedSystem) -> Result<Mat5> {
    let a = lin.drift();
    let d = lin.state_diffusion();
    solve_lyapunov(&a, &d)
}

pub(crate) fn solve_lyapunov(a: &Mat5, d: &Mat5) -> Result<Mat5> {
    let n = 5;
    let mut k = DMatrix::<f64>::zeros(n * n, n * n);
    // Column-major vec: vec(AV) = (I⊗A)vec V, vec(VAᵀ) = (A⊗I)vec V.
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                k[(j * n + i, j * n + l)] += a[(i, l)];
                k[(j * n + i, l * n + i)] += a[(j, l)];
            }
        }
    }
    let rhs = DVector::from_iterator(n * n, d.iter().map(|x| -x));
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::numeric("Lyapunov operator is singular", f64::NAN))?;
    let v = Mat5::from_column_slice(sol.as_slice());
    let v = 0.5 * (v + v.transpose());
    let resid = (a * v + v * a.transpose() + d).norm() / d.norm().max(f64::MIN_POSITIVE);
    if !(resid < LYAPUNOV_RESIDUAL_TOL) {
        return Err(Error::numeric("Lyapunov residual above tolerance", resid));
    }
    Ok(v)
}

fn project(v: &Mat5) -> CovarianceMatrix {
    CovarianceMatrix {
        v: v.fixed_view::<4, 4>(0, 0).into_owned(),
    }
}

/// Breakpoints at the resonances of the drift spectrum and the cut-off
/// beyond which the reciprocal tail map takes over.
fn resonance_breaks(lin: &LinearizedSystem) -> (Vec<f64>, f64) {
    let ev = lin.drift().complex_eigenvalues();
    let mut breaks = Vec::new();
    let mut top = 0.0f64;
    for z in ev.iter() {
        let (c, w) = (z.im.abs(), z.re.abs());
        top = top.max(c + w);
        breaks.push(c);
        for k in [1.0, 10.0, 100.0] {
            breaks.push(c - k * w);
            breaks.push(c + k * w);
        }
    }
    let cut = 10.0 * top.max(lin.fastest_rate());
    breaks.retain(|&b| b > 0.0 && b < cut);
    (breaks, cut)
}

/// V = (1/π) ∫₀^∞ Re[T N T†] dω.
pub fn quadrature_covariance(lin: &LinearizedSystem, tol: Tolerance) -> Result<CovarianceMatrix> {
    let noise = lin.noise_model().diffusion;
    let (breaks, cut) = resonance_breaks(lin);
    let mut failure = None;
    let r = integrate_half_line(
        |w| {
            let mut out = [0.0; 10];
            match transfer_matrix(lin, w) {
                Ok(t) => {
                    let t = t.entries;
                    let mut k = 0;
                    for i in 0..4 {
                        for j in i..4 {
                            let mut acc = 0.0;
                            for n in 0..5 {
                                acc += noise[(n, n)] * (t[(i, n)] * t[(j, n)].conj()).re;
                            }
                            out[k] = acc;
                            k += 1;
                        }
                    }
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
            out
        },
        &breaks,
        cut,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut v = Matrix4::zeros();
    let mut k = 0;
    for i in 0..4 {
        for j in i..4 {
            v[(i, j)] = r.value[k] / std::f64::consts::PI;
            v[(j, i)] = v[(i, j)];
            k += 1;
        }
    }
    Ok(CovarianceMatrix { v })
}

/// (⟨δq²⟩, ⟨δp²⟩) read off the covariance matrix.
pub fn mechanical_variances(v: &CovarianceMatrix) -> (f64, f64) {
    (v.v[(0, 0)], v.v[(1, 1)])
}

/// (⟨δq²⟩, ⟨δp²⟩) as ∫dω/2π S_qq and ∫dω/2π (ω²/ω_m²) S_qq.
pub fn mechanical_variances_from_spectrum(lin: &LinearizedSystem) -> Result<(f64, f64)> {
    require_stable(lin)?;
    let s = lin.scaled();
    let (breaks, cut) = resonance_breaks(&s);
    let r = integrate_half_line(
        |w| {
            let sqq = position_spectrum_unchecked(&s, w, ThermalModel::Markov);
            [sqq, w * w * sqq]
        },
        &breaks,
        cut,
        Tolerance::default(),
    )?;
    let pi = std::f64::consts::PI;
    Ok((r.value[0] / pi, r.value[1] / pi))
}
