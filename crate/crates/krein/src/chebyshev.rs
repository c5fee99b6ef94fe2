//! Chebyshev-substituted quadrature on a band `[lo, hi]`.
//!
//! Nodes are `t_i = c + h·cos θ_i` at the midpoint angles `θ_i = (i+½)π/n`.
//! Band densities here behave like `√((t-lo)(hi-t))` times a factor analytic
//! in a neighborhood of the band, so in the θ variable the integrand is
//! analytic and the midpoint rule converges geometrically.
//!
//! The same node set supports a closed-form Stieltjes transform: expanding
//! the θ-integrand `f(t(θ))·h·sinθ` in a cosine series and using
//!
//! ```text
//! ∫₀^π cos(kθ)/(cosθ - w) dθ = -π ρ(w)^k / √(w²-1),   ρ(w) = w - √(w²-1),
//! ```
//!
//! with the branch |ρ| < 1. This stays accurate arbitrarily close to the real
//! axis, where direct node-by-node quadrature of `1/(t-z)` breaks down.

use num_complex::Complex64;

/// Midpoint angles `θ_i = (i+½)π/n`, increasing.
pub fn angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (i as f64 + 0.5) * std::f64::consts::PI / n as f64)
        .collect()
}

/// Chebyshev nodes on `[lo, hi]` in increasing order.
pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    // cos θ decreases in θ; reverse for ascending nodes
    angles(n).iter().rev().map(|&th| c + h * th.cos()).collect()
}

/// Quadrature weights paired with [`nodes`]: `h·sin θ_i·π/n`.
pub fn weights(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = 0.5 * (hi - lo);
    angles(n)
        .iter()
        .rev()
        .map(|&th| h * th.sin() * std::f64::consts::PI / n as f64)
        .collect()
}

/// True if `pts` is the canonical node set of `[lo, hi]` to tolerance `tol`.
pub fn is_canonical(lo: f64, hi: f64, pts: &[f64], tol: f64) -> bool {
    let want = nodes(lo, hi, pts.len());
    !pts.is_empty()
        && pts
            .iter()
            .zip(&want)
            .all(|(a, b)| (a - b).abs() <= tol * (1.0 + hi.abs().max(lo.abs())))
}

/// Cosine-series coefficients of the θ-integrand
/// `g(θ) = f(t(θ))·h·sin θ = Σ_{k≥0} d_k cos(kθ)`, from density values `f` at
/// ascending canonical nodes.
///
/// For densities with `|t-edge|^{±1/2}` behavior at either band edge, `g`
/// extends to an analytic even 2π-periodic function of θ (the Jacobian
/// absorbs a diverging edge and flattens a vanishing one), so the
/// coefficients decay geometrically. The `cos(nθ)` mode vanishes on the
/// midpoint grid; k runs to n-1.
pub fn integrand_cosine_coefficients(lo: f64, hi: f64, values_ascending: &[f64]) -> Vec<f64> {
    let n = values_ascending.len();
    let h = 0.5 * (hi - lo);
    let th = angles(n);
    // values at ascending t correspond to descending θ
    let g: Vec<f64> = values_ascending
        .iter()
        .rev()
        .zip(&th)
        .map(|(&f, &t)| f * h * t.sin())
        .collect();
    let mut coef = vec![0.0; n];
    for (k, c) in coef.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..n {
            s += g[i] * (k as f64 * th[i]).cos();
        }
        *c = if k == 0 { s / n as f64 } else { 2.0 * s / n as f64 };
    }
    coef
}

/// `ρ(w) = w - √(w²-1)` on the branch with `|ρ| ≤ 1`.
pub fn joukowski_rho(w: Complex64) -> Complex64 {
    let sq = (w * w - 1.0).sqrt();
    let r1 = w - sq;
    let r2 = w + sq;
    if r1.norm_sqr() <= r2.norm_sqr() {
        r1
    } else {
        r2
    }
}

/// `∫ f(t)/(t-z) dt` over `[lo, hi]` from the cosine coefficients of the
/// θ-integrand, via `∫₀^π cos(kθ)/(cosθ - w) dθ = -π ρ(w)^k / √(w²-1)`
/// on the branch with `√(w²-1) = w - ρ(w)`.
pub fn stieltjes_from_coefficients(lo: f64, hi: f64, coef: &[f64], z: Complex64) -> Complex64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let w = (z - c) / h;
    let rho = joukowski_rho(w);
    let sqrt_branch = w - rho;
    // Horner in rho: Σ_k d_k ρ^k
    let mut acc = Complex64::new(0.0, 0.0);
    for &dk in coef.iter().rev() {
        acc = acc * rho + dk;
    }
    -std::f64::consts::PI / h * acc / sqrt_branch
}
