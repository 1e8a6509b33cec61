//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands of one real variable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes plus the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::zero(),
            max_subdivisions: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: Complex<T>,
    pub error: T,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Panel<T> {}

impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Panel<T> {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod<T: Real, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> Panel<T> {
    let center = (a + b) * T::half();
    let half = (b - a) * T::half();
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[7]);
    let mut gauss = f_center * T::lit(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * T::lit(x);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * T::lit(w);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, seeding one panel per
/// consecutive pair of breakpoints. Kinks of the integrand belong in
/// `breaks` so no panel straddles them.
pub fn integrate<T, F>(f: F, breaks: &[T], opts: &QuadratureOptions<T>) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::validation("breakpoints must be non-decreasing with at least two entries"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&f, w[0], w[1]));
            evaluations += 15;
        }
    }
    let mut frozen_value = Complex::new(T::zero(), T::zero());
    let mut frozen_error = T::zero();
    let mut subdivisions = heap.len();

    loop {
        let value = heap.iter().fold(frozen_value, |acc, p| acc + p.value);
        let error = heap.iter().fold(frozen_error, |acc, p| acc + p.error);
        let tol = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= tol {
            return Ok(Integral {
                value,
                error,
                subdivisions,
                evaluations,
            });
        }
        let fail = || Error::QuadratureFailure {
            subdivisions,
            error_estimate: error.to_f64_lossy(),
        };
        if subdivisions >= opts.max_subdivisions || frozen_error > tol {
            return Err(fail());
        }
        let Some(worst) = heap.pop() else {
            return Err(fail());
        };
        let mid = (worst.a + worst.b) * T::half();
        let scale = worst.a.abs().max(worst.b.abs()).max(T::min_positive_value());
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < T::lit(64.0) * T::epsilon() * scale {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<T, F>(f: F, breaks: &[T], opts: &QuadratureOptions<T>) -> Result<(T, T)>
where
    T: Real,
    F: Fn(T) -> T,
{
    let r = integrate(|x| Complex::new(f(x), T::zero()), breaks, opts)?;
    Ok((r.value.re, r.error))
}
