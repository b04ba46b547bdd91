//! Globally adaptive 21-point Gauss–Kronrod integration of vector-valued
//! integrands, with a reciprocal map for semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_712_041_347_630,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], …
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    /// Sum over panels of the largest per-component |Kronrod − Gauss|.
    pub error: f64,
    pub panels: usize,
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> Panel<N> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c);
    for n in 0..N {
        k[n] = WGK[10] * fc[n];
    }
    for j in 0..10 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        for n in 0..N {
            let s = f1[n] + f2[n];
            k[n] += WGK[j] * s;
            if j % 2 == 1 {
                g[n] += WG[j / 2] * s;
            }
        }
    }
    let mut error = 0.0f64;
    for n in 0..N {
        k[n] *= h;
        error = error.max((k[n] - g[n] * h).abs());
    }
    Panel { a, b, value: k, error }
}

/// ∫ f over the union of [breaks[i], breaks[i+1]].
///
/// Converges when the summed error estimate is below
/// max(abs, rel·max_n |I_n|).
pub fn integrate<const N: usize, F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<QuadResult<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("breakpoints must be strictly increasing".into()));
    }
    let mut heap: BinaryHeap<Panel<N>> = breaks.windows(2).map(|w| gk21(&mut f, w[0], w[1])).collect();
    loop {
        let mut value = [0.0; N];
        let mut error = 0.0;
        for p in heap.iter() {
            for n in 0..N {
                value[n] += p.value[n];
            }
            error += p.error;
        }
        let scale = value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if value.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("integrand is not finite", error));
        }
        if error <= tol.abs.max(tol.rel * scale) {
            // Sum in a fixed order so the result does not depend on heap layout.
            let mut panels: Vec<_> = heap.into_vec();
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let mut value = [0.0; N];
            for p in &panels {
                for n in 0..N {
                    value[n] += p.value[n];
                }
            }
            return Ok(QuadResult {
                value,
                error,
                panels: panels.len(),
            });
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::numeric(
                format!("quadrature did not converge in {} panels", heap.len()),
                error,
            ));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::numeric("quadrature panel underflow", error));
        }
        heap.push(gk21(&mut f, worst.a, mid));
        heap.push(gk21(&mut f, mid, worst.b));
    }
}

/// ∫₀^∞ f with explicit breakpoints on [0, cut) and ω = cut/t on the tail.
pub fn integrate_half_line<const N: usize, F>(
    mut f: F,
    breaks: &[f64],
    cut: f64,
    tol: Tolerance,
) -> Result<QuadResult<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    // The tail t ∈ (0, 1] is laid out on s = cut + (1 − t).
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0 && b < cut).collect();
    pts.push(0.0);
    pts.push(cut);
    pts.push(cut + 1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate(
        |s| {
            if s <= cut {
                f(s)
            } else {
                let t = cut + 1.0 - s;
                let w = cut / t;
                let mut v = f(w);
                let jac = cut / (t * t);
                for x in v.iter_mut() {
                    *x *= jac;
                }
                v
            }
        },
        &pts,
        tol,
    )
}
