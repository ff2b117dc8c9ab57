//! Gauss–Legendre rules and adaptive Gauss–Kronrod quadrature.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared 20-point rule.
    pub fn g20() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    /// Shared 16-point rule.
    pub fn g16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, w * h))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

// QUADPACK qk21 abscissae and weights.
#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
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
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One Gauss–Kronrod 21-point panel: (kronrod value, |kronrod - gauss|).
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK21[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let x = h * XGK21[j];
        let pair = f(c - x) + f(c + x);
        kron += WGK21[j] * pair;
        if j % 2 == 1 {
            gauss += WG10[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-300, rel: 1e-12, max_panels: 20_000 }
    }
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Self { rel, ..Self::default() }
    }
}

/// An accepted subinterval from adaptive subdivision.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

struct Queued(Panel);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Adaptive subdivision of [breaks[0], breaks[last]] until the summed
/// Gauss–Kronrod error estimate meets the tolerance. Returns the accepted
/// panels in ascending order of position.
pub fn adaptive_panels<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<Vec<Panel>> {
    assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk21(&mut f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Queued(Panel { a: w[0], b: w[1], value: v, error: e }));
    }
    while err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_panels {
            return Err(Error::Quadrature { value: total, error: err });
        }
        let Queued(worst) = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel at floating-point resolution; keep it as is.
            heap.push(Queued(Panel { error: 0.0, ..worst }));
            err -= worst.error;
            continue;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Queued(Panel { a: worst.a, b: mid, value: v1, error: e1 }));
        heap.push(Queued(Panel { a: mid, b: worst.b, value: v2, error: e2 }));
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|q| q.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(panels)
}

/// Adaptive integral over [a, b] with optional interior breakpoints.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Quadrature> {
    let panels = adaptive_panels(f, breaks, tol)?;
    // Sum in positional order so results do not depend on heap layout.
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Quadrature { value, error })
}
