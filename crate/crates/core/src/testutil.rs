//! Random parameter strategies shared by the unit tests.

use proptest::prelude::*;

use crate::model::LinearizedSystem;
use crate::stability::stability_of;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Any linearized system in units of ω_m, stable or not.
pub fn scaled_system() -> impl Strategy<Value = LinearizedSystem> {
    (
        log_uniform(1e-6, 1e-3),
        log_uniform(0.02, 20.0),
        0.0f64..1.5,
        -1.0f64..3.0,
        0.0f64..1.5,
        0.0f64..2.0,
        log_uniform(0.05, 20.0),
        0.0f64..1000.0,
    )
        .prop_map(|(gm, g1, ratio, delta, g, kappa, tau, nbar)| {
            let g2 = ratio * g1;
            LinearizedSystem {
                omega_m: 1.0,
                gamma_m: gm,
                gamma_1: g1,
                gamma_2: g2,
                gamma_c: g1 + g2,
                delta,
                coupling: g,
                kappa,
                tau,
                nbar,
                hbar_omega_over_kt: (1.0 + 1.0 / nbar).ln(),
            }
        })
}

/// Stable systems with a Routh margin clear of the marginal band.
pub fn stable_scaled_system() -> impl Strategy<Value = LinearizedSystem> {
    scaled_system().prop_filter("stable", |lin| {
        let r = stability_of(lin);
        r.is_stable() && r.margin > 1e-7
    })
}
