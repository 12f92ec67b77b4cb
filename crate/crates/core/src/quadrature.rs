//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! Intervals are bisected, worst error first, until the summed error estimate
//! falls below `abs_tol + rel_tol * |I|` in every component or the interval
//! budget runs out.

use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 2_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Vec<f64>,
    /// Componentwise error estimate.
    pub error: Vec<f64>,
    pub intervals: usize,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    worst: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.worst == other.worst
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.worst.total_cmp(&other.worst)
    }
}

fn kronrod<F>(f: &F, dim: usize, a: f64, b: f64, buf: &mut [f64]) -> Segment
where
    F: Fn(f64, &mut [f64]) + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];

    f(center, buf);
    for d in 0..dim {
        k[d] += WGK[7] * buf[d];
        g[d] += WG[3] * buf[d];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        for x in [center - dx, center + dx] {
            f(x, buf);
            for d in 0..dim {
                k[d] += WGK[j] * buf[d];
                if j % 2 == 1 {
                    g[d] += WG[j / 2] * buf[d];
                }
            }
        }
    }
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    let mut worst: f64 = 0.0;
    for d in 0..dim {
        value[d] = k[d] * half;
        error[d] = ((k[d] - g[d]) * half).abs();
        worst = worst.max(error[d]);
    }
    Segment {
        a,
        b,
        value,
        error,
        worst,
    }
}

/// Integrates `f` over `[a, b]`, splitting first at the given interior
/// `breaks` (points where the integrand is known to kink or jump).
pub fn integrate_vec<F>(
    f: &F,
    dim: usize,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult
where
    F: Fn(f64, &mut [f64]) + ?Sized,
{
    let mut buf = vec![0.0; dim];
    if a.is_nan() || b.is_nan() || b <= a {
        return QuadResult {
            value: vec![0.0; dim],
            error: vec![0.0; dim],
            intervals: 0,
            converged: true,
        };
    }
    let mut points: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&p| p > a && p < b))
        .chain(std::iter::once(b))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        heap.push(kronrod(f, dim, w[0], w[1], &mut buf));
    }

    let totals = |heap: &BinaryHeap<Segment>| {
        let mut value = vec![0.0; dim];
        let mut error = vec![0.0; dim];
        for s in heap.iter() {
            for d in 0..dim {
                value[d] += s.value[d];
                error[d] += s.error[d];
            }
        }
        (value, error)
    };

    loop {
        let (value, error) = totals(&heap);
        let done = (0..dim).all(|d| error[d] <= opts.abs_tol.max(opts.rel_tol * value[d].abs()));
        if done || heap.len() >= opts.max_intervals {
            return QuadResult {
                value,
                error,
                intervals: heap.len(),
                converged: done,
            };
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot split further in floating point; keep it and stop refining.
            heap.push(worst);
            let (value, error) = totals(&heap);
            return QuadResult {
                value,
                error,
                intervals: heap.len(),
                converged: false,
            };
        }
        heap.push(kronrod(f, dim, worst.a, mid, &mut buf));
        heap.push(kronrod(f, dim, mid, worst.b, &mut buf));
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult
where
    F: Fn(f64) -> f64,
{
    integrate_vec(&|x: f64, out: &mut [f64]| out[0] = f(x), 1, a, b, &[], opts)
}
