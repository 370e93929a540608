//! Spectral factorization of the squared low-pass symbol into filter taps.
//!
//! |m₀(ξ)|² is a cosine polynomial that is nonnegative by construction, so it
//! factors as |H(e^{-2πiξ})|² with H a real polynomial of degree K + L − 1.
//! The cosine-power part contributes ((1 + z)/2)ᴷ directly; the residual sum
//! Σ C(K−1+n, n) sin²ⁿ(πξ) is factored by locating its roots in the
//! y = sin²(πξ) plane and mapping each to the reciprocal z-root pair
//! z² − (2 − 4y)z + 1 = 0, keeping the root inside the unit circle.

use crate::error::{Result, ShearletError};
use crate::generators::compact::{binom, CompactSpec};
use crate::scalar::Scalar;
use num_complex::Complex64;

const RESIDUAL_LIMIT: f64 = 1e-8;
const VERIFY_GRID: usize = 4096;

/// Factor the squared low-pass symbol into real taps h with Σ h = 1
/// (min-phase: every non-binomial zero lies strictly inside the unit circle).
/// Large parameter pairs can legitimately fail the residual check; that is
/// reported as a conditioning error, never as silently wrong taps.
pub fn spectral_factorize<T: Scalar>(spec: &CompactSpec<T>) -> Result<Vec<T>> {
    let k = spec.k_order as usize;
    let l = spec.l_terms as usize;
    let q_coeffs: Vec<f64> =
        (0..l).map(|n| binom(k as i64 - 1 + n as i64, n as i64)).collect();

    let y_roots = aberth_roots(&q_coeffs)?;
    for y in &y_roots {
        if y.im.abs() < 1e-9 && y.re > -1e-12 && y.re < 1.0 + 1e-12 {
            return Err(ShearletError::IllConditioned { residual: y.im.abs(), limit: 0.0 });
        }
    }

    let mut z_roots = Vec::with_capacity(y_roots.len());
    for y in &y_roots {
        let b = Complex64::new(2.0, 0.0) - 4.0 * y;
        let disc = (b * b - 4.0).sqrt();
        let cands = [(b + disc) * 0.5, (b - disc) * 0.5];
        let z = if cands[0].norm() < cands[1].norm() { cands[0] } else { cands[1] };
        if (z.norm() - 1.0).abs() < 1e-10 {
            return Err(ShearletError::IllConditioned { residual: (z.norm() - 1.0).abs(), limit: 0.0 });
        }
        z_roots.push(z);
    }

    let mut q_poly = real_poly_from_roots(&z_roots)?;
    let q_at_one: f64 = q_poly.iter().sum();
    if q_at_one.abs() < 1e-12 {
        return Err(ShearletError::IllConditioned { residual: q_at_one.abs(), limit: 1e-12 });
    }
    for c in &mut q_poly {
        *c /= q_at_one;
    }

    let scale = 0.5f64.powi(k as i32);
    let binom_poly: Vec<f64> = (0..=k).map(|t| binom(k as i64, t as i64) * scale).collect();
    let taps = convolve(&q_poly, &binom_poly);
    debug_assert_eq!(taps.len(), k + l);

    let reference = CompactSpec::<f64>::relaxed(spec.k_order, spec.l_terms)?;
    let residual = factorization_residual(&reference, &taps);
    if !(residual < RESIDUAL_LIMIT) {
        return Err(ShearletError::IllConditioned { residual, limit: RESIDUAL_LIMIT });
    }
    Ok(taps.into_iter().map(T::from_f64_lossy).collect())
}

/// Sup over a uniform frequency grid of ||Σ hₜ e^{-2πitξ}|² − |m₀(ξ)|²|.
pub fn factorization_residual(spec: &CompactSpec<f64>, taps: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..VERIFY_GRID {
        let xi = i as f64 / VERIFY_GRID as f64;
        let w = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * xi);
        let mut h = Complex64::new(0.0, 0.0);
        for &t in taps.iter().rev() {
            h = h * w + t;
        }
        worst = worst.max((h.norm_sqr() - spec.lowpass_symbol_sq(xi)).abs());
    }
    worst
}

/// Taps serialized as `index,value` lines with a header.
pub fn taps_to_csv<T: Scalar>(taps: &[T]) -> String {
    let mut out = String::from("index,value\n");
    for (i, t) in taps.iter().enumerate() {
        out.push_str(&format!("{i},{t:e}\n"));
    }
    out
}

/// Aberth–Ehrlich simultaneous root refinement for a real polynomial given by
/// ascending coefficients. Degrees here stay below ~30, well within reach.
fn aberth_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if coeffs[d] == 0.0 {
        return Err(ShearletError::invalid("leading polynomial coefficient vanished".to_string()));
    }
    let radius = (coeffs[0].abs() / coeffs[d].abs()).powf(1.0 / d as f64).max(1e-6);
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * i as f64 / d as f64 + 0.4))
        .collect();

    for _ in 0..400 {
        let mut settled = true;
        for i in 0..d {
            let (p, dp) = horner_with_derivative(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() > 0.0 { p / dp } else { Complex64::new(1e-3, 1e-3) };
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s += (z[i] - zj).inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let delta = if denom.norm() > 1e-280 { w / denom } else { w };
            z[i] -= delta;
            if delta.norm() > 1e-13 * (1.0 + z[i].norm()) {
                settled = false;
            }
        }
        if settled {
            return Ok(z);
        }
    }
    Err(ShearletError::NoConvergence { method: "aberth", residual: f64::NAN, iters: 400 })
}

fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Expand ∏(z − zᵢ) into real ascending coefficients, pairing conjugate
/// roots into quadratics so imaginary residue never leaks into the taps.
fn real_poly_from_roots(roots: &[Complex64]) -> Result<Vec<f64>> {
    let mut poly = vec![1.0f64];
    let mut pending: Vec<Complex64> = Vec::new();
    for &r in roots {
        if r.im.abs() < 1e-9 * (1.0 + r.re.abs()) {
            poly = convolve(&poly, &[-r.re, 1.0]);
        } else {
            pending.push(r);
        }
    }
    while let Some(r) = pending.pop() {
        let Some(pos) = pending
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - r.conj()).norm().total_cmp(&(b.1 - r.conj()).norm()))
            .filter(|(_, s)| (*s - r.conj()).norm() < 1e-6 * (1.0 + r.norm()))
            .map(|(i, _)| i)
        else {
            return Err(ShearletError::IllConditioned { residual: r.im.abs(), limit: 0.0 });
        };
        let s = pending.swap_remove(pos);
        let m = (r + s.conj()) * 0.5;
        poly = convolve(&poly, &[m.norm_sqr(), -2.0 * m.re, 1.0]);
    }
    Ok(poly)
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
