//! Shared numerical helpers: log-domain combinatorics, adaptive quadrature,
//! extrapolated finite differences and dense complex-matrix utilities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::OnceLock;

/// Dense complex matrix used throughout the crate.
pub type CMat = DMatrix<Complex64>;

const LN_FACTORIAL_TABLE_LEN: usize = 256;

fn ln_factorial_table() -> &'static [f64; LN_FACTORIAL_TABLE_LEN] {
    static TABLE: OnceLock<[f64; LN_FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0_f64; LN_FACTORIAL_TABLE_LEN];
        // Kahan-compensated running sum of ln k keeps the table exact to ulp.
        let (mut sum, mut c) = (0.0_f64, 0.0_f64);
        for k in 1..LN_FACTORIAL_TABLE_LEN {
            let y = (k as f64).ln() - c;
            let t2 = sum + y;
            c = (t2 - sum) - y;
            sum = t2;
            t[k] = sum;
        }
        t
    })
}

/// Natural log of `k!`, accurate to machine precision for all `k`.
///
/// Small arguments come from a cumulative table; large arguments use the
/// Stirling series with enough correction terms that the truncation error is
/// below 1e-16 relative for `k >= 256`.
pub fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < LN_FACTORIAL_TABLE_LEN {
        return ln_factorial_table()[k as usize];
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x + 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln(a choose b)` in the log domain.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "binomial with k > n");
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Numerically stable `ln(sum_i exp(v_i))`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Natural log of an arbitrary-precision non-negative integer, exact to
/// f64 precision even when the integer itself overflows `f64`.
pub fn ln_biguint(x: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        return x.to_f64().expect("fits in 53 bits").ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(sinh x)` without overflow for large positive `x`.
pub fn ln_sinh(x: f64) -> f64 {
    assert!(x > 0.0, "ln_sinh needs a positive argument");
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(2.0 * x)).exp().ln_1p()
    } else {
        x.sinh().ln()
    }
}

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
            + adaptive_simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    adaptive_simpson_rec(&mut f, a, fa, b, fb, fm, whole, tol, 48)
}

/// First derivative of `f` at `x` by central differences with two Richardson
/// extrapolation stages; error `O(h0^6)` for smooth integrands.  Used as a
/// finite-difference oracle in tests.
#[cfg(test)]
pub fn richardson_derivative(mut f: impl FnMut(f64) -> f64, x: f64, h0: f64) -> f64 {
    let central = |f: &mut dyn FnMut(f64) -> f64, h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d0 = central(&mut f, h0);
    let d1 = central(&mut f, 0.5 * h0);
    let d2 = central(&mut f, 0.25 * h0);
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r1 - r0) / 15.0
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Von Neumann entropy `-tr(rho ln rho)` of a Hermitian, unit-trace matrix.
/// Eigenvalues below 1e-14 are treated as exact zeros.
pub fn von_neumann_entropy(rho: &CMat) -> f64 {
    hermitian_eigenvalues(rho)
        .into_iter()
        .filter(|&p| p > 1e-14)
        .map(|p| -p * p.ln())
        .sum()
}
