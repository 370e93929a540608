//! Compactly supported generator built from trigonometric filter symbols.
//!
//! The squared low-pass symbol is the classic maximally flat half-band form
//! |m₀(ξ)|² = cos²ᴷ(πξ) Σ_{n<L} C(K−1+n, n) sin²ⁿ(πξ); the band-pass symbol
//! is its half-shift. The scaling profile is the truncated infinite product
//! of dyadically compressed low-pass magnitudes. All profiles here are
//! magnitudes (zero phase), so the induced atoms are real and symmetric.

use crate::error::{Result, ShearletError};
use crate::scalar::Scalar;
use std::marker::PhantomData;

/// Parameters of the compactly supported generator.
///
/// `k_order` (cosine power K) controls flatness at ξ = 0, `l_terms` (sum
/// length L) controls how far the stop-band stays flat. `j_trunc` truncates
/// the scaling-profile product; factors beyond it differ from 1 by O(4^{-j}).
#[derive(Clone, Debug)]
pub struct CompactSpec<T> {
    pub k_order: u32,
    pub l_terms: u32,
    pub j_trunc: u32,
    /// Low-pass filter taps once a spectral factorization has been attached.
    pub taps: Option<Vec<T>>,
    _marker: PhantomData<T>,
}

impl<T: Scalar> CompactSpec<T> {
    /// Strict parameter regime: L ≥ 10 and 3L/2 ≤ K ≤ 3L − 2. In this
    /// regime the directional system is known to have stable frame bounds.
    pub fn strict(k_order: u32, l_terms: u32) -> Result<Self> {
        if l_terms < 10 {
            return Err(ShearletError::invalid(format!(
                "strict compact generator needs L >= 10, got L = {l_terms}"
            )));
        }
        if 2 * k_order < 3 * l_terms || k_order > 3 * l_terms - 2 {
            return Err(ShearletError::invalid(format!(
                "strict compact generator needs 3L/2 <= K <= 3L - 2, got K = {k_order}, L = {l_terms}"
            )));
        }
        Self::relaxed(k_order, l_terms)
    }

    /// Relaxed regime: any K, L ≥ 1 (no frame-bound guarantee implied).
    pub fn relaxed(k_order: u32, l_terms: u32) -> Result<Self> {
        if k_order < 1 || l_terms < 1 {
            return Err(ShearletError::invalid(format!(
                "compact generator needs K, L >= 1, got K = {k_order}, L = {l_terms}"
            )));
        }
        if k_order + l_terms > 64 {
            return Err(ShearletError::invalid(format!(
                "compact generator limited to K + L <= 64, got {}",
                k_order + l_terms
            )));
        }
        Ok(Self { k_order, l_terms, j_trunc: 24, taps: None, _marker: PhantomData })
    }

    /// Squared low-pass symbol |m₀(ξ)|², 1-periodic, equal to 1 at ξ = 0 and
    /// 0 at ξ = 1/2.
    pub fn lowpass_symbol_sq(&self, xi: T) -> T {
        let (s, c) = (xi * T::PI()).sin_cos();
        let y = s * s;
        // Horner over the ascending-degree sum in y = sin²(πξ).
        let mut acc = T::zero();
        for n in (0..self.l_terms as i64).rev() {
            acc = acc * y + T::from_f64_lossy(binom(self.k_order as i64 - 1 + n, n));
        }
        acc * (c * c).powi(self.k_order as i32)
    }

    /// Squared band-pass symbol |m₁(ξ)|² = |m₀(ξ + 1/2)|².
    pub fn bandpass_symbol_sq(&self, xi: T) -> T {
        self.lowpass_symbol_sq(xi + T::from_f64_lossy(0.5))
    }

    pub fn lowpass_abs(&self, xi: T) -> T {
        self.lowpass_symbol_sq(xi).max(T::zero()).sqrt()
    }

    pub fn bandpass_abs(&self, xi: T) -> T {
        self.bandpass_symbol_sq(xi).max(T::zero()).sqrt()
    }

    /// Sup over a uniform grid of ||m₀|² + |m₁|² − 1|. Zero (up to roundoff)
    /// exactly when K = L; recorded but not asserted otherwise.
    pub fn qmf_deviation(&self, samples: usize) -> T {
        let mut worst = T::zero();
        for i in 0..samples {
            let xi = T::from_usize_lossy(i) / T::from_usize_lossy(samples);
            let d = (self.lowpass_symbol_sq(xi) + self.bandpass_symbol_sq(xi) - T::one()).abs();
            worst = worst.max(d);
        }
        worst
    }

    /// Scaling-profile magnitude |φ̂(ξ)| = ∏_{i=0}^{j_trunc} |m₀(2⁻ⁱξ)|.
    /// Vanishes at every nonzero integer (the i with 2⁻ⁱξ half-integer kills
    /// the product), equals 1 at ξ = 0.
    pub fn scaling_hat(&self, xi: T) -> T {
        let mut prod = T::one();
        let mut arg = xi;
        let half = T::from_f64_lossy(0.5);
        for _ in 0..=self.j_trunc {
            prod = prod * self.lowpass_symbol_sq(arg);
            if prod == T::zero() {
                return T::zero();
            }
            arg = arg * half;
        }
        prod.max(T::zero()).sqrt()
    }

    /// Mother shearlet in frequency (magnitude): band-pass along the dominant
    /// axis, compressed scaling profiles across.
    pub fn shearlet_hat(&self, d: usize, w: &[T; 3]) -> T {
        let four = T::from_f64_lossy(4.0);
        let two = T::from_f64_lossy(2.0);
        let mut v = self.bandpass_abs(four * w[0]) * self.scaling_hat(w[0]);
        if v == T::zero() {
            return T::zero();
        }
        v = v * self.scaling_hat(two * w[1]);
        if d == 3 {
            v = v * self.scaling_hat(two * w[2]);
        }
        v
    }

    /// Separable low-pass profile for the coarse tile.
    pub fn lowpass_hat(&self, d: usize, xi: &[T; 3]) -> T {
        let mut v = self.scaling_hat(xi[0]) * self.scaling_hat(xi[1]);
        if d == 3 {
            v = v * self.scaling_hat(xi[2]);
        }
        v
    }
}

/// Exact binomial coefficient as f64 (arguments stay far below u128 range
/// and below 2⁵³ for every admissible K + L ≤ 64).
pub(crate) fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_regimes() {
        assert!(CompactSpec::<f64>::strict(39, 19).is_ok());
        assert!(CompactSpec::<f64>::strict(28, 19).is_err()); // K below 3L/2
        assert!(CompactSpec::<f64>::strict(56, 19).is_err()); // K above 3L-2
        assert!(CompactSpec::<f64>::strict(7, 4).is_err()); // L too small
        assert!(CompactSpec::<f64>::relaxed(7, 4).is_ok());
        assert!(CompactSpec::<f64>::relaxed(0, 1).is_err());
        assert!(CompactSpec::<f64>::relaxed(60, 20).is_err());
    }

    #[test]
    fn lowpass_symbol_frozen_values() {
        let s = CompactSpec::<f64>::relaxed(2, 2).unwrap();
        // cos⁴(π/4)·(1 + 2 sin²(π/4)) = (1/4)·2 = 1/2 exactly.
        assert!((s.lowpass_symbol_sq(0.25) - 0.5).abs() < 1e-15);
        for spec in [CompactSpec::<f64>::relaxed(7, 4).unwrap(), CompactSpec::strict(39, 19).unwrap()] {
            assert!((spec.lowpass_symbol_sq(0.0) - 1.0).abs() < 1e-14);
            assert!(spec.lowpass_symbol_sq(0.5).abs() < 1e-14);
            // 1-periodic.
            assert!((spec.lowpass_symbol_sq(1.3) - spec.lowpass_symbol_sq(0.3)).abs() < 1e-10);
        }
    }

    #[test]
    fn qmf_identity_when_orders_match() {
        for kl in [1u32, 2, 4, 7] {
            let s = CompactSpec::<f64>::relaxed(kl, kl).unwrap();
            assert!(s.qmf_deviation(512) < 1e-11, "K = L = {kl}");
        }
        // Mismatched orders: deviation exists and is merely recorded.
        let s = CompactSpec::<f64>::relaxed(7, 4).unwrap();
        let dev = s.qmf_deviation(512);
        assert!(dev > 1e-6 && dev < 1.0, "deviation {dev}");
    }

    #[test]
    fn haar_scaling_profile_matches_closed_form() {
        // K = L = 1 gives |m₀(ξ)| = |cos(πξ)| whose infinite product is
        // |sin(2πξ)/(2πξ)|: an independent closed form for the whole product.
        let s = CompactSpec::<f64>::relaxed(1, 1).unwrap();
        for &xi in &[0.3, 0.15, 0.71, 1.6, 2.2, -0.45] {
            let x = 2.0 * std::f64::consts::PI * xi;
            let reference = (x.sin() / x).abs();
            assert!(
                (s.scaling_hat(xi) - reference).abs() < 1e-10,
                "xi = {xi}: {} vs {reference}",
                s.scaling_hat(xi)
            );
        }
    }

    #[test]
    fn scaling_profile_basics() {
        for spec in [CompactSpec::<f64>::relaxed(7, 4).unwrap(), CompactSpec::strict(39, 19).unwrap()] {
            assert!((spec.scaling_hat(0.0) - 1.0).abs() < 1e-14);
            for k in 1..=8 {
                assert!(spec.scaling_hat(k as f64) < 1e-50, "integer zero at {k}");
            }
            assert!(spec.scaling_hat(0.5) < 1e-50);
        }
    }

    #[test]
    fn truncation_depth_is_converged() {
        let mut a = CompactSpec::<f64>::relaxed(2, 2).unwrap();
        let mut b = a.clone();
        a.j_trunc = 24;
        b.j_trunc = 32;
        for i in 0..=64 {
            let xi = -4.0 + 8.0 * i as f64 / 64.0;
            assert!((a.scaling_hat(xi) - b.scaling_hat(xi)).abs() < 1e-10, "xi = {xi}");
        }
    }

    #[test]
    fn shearlet_hat_frozen_points() {
        let s = CompactSpec::<f64>::relaxed(7, 4).unwrap();
        assert!(s.shearlet_hat(3, &[0.0, 0.0, 0.0]) < 1e-50);
        // At w₁ = 1/8 the band-pass factor is |m₀(1)| = 1, cross factors 1.
        let v = s.shearlet_hat(3, &[0.125, 0.0, 0.0]);
        assert!((v - s.scaling_hat(0.125)).abs() < 1e-13);
        let v2 = s.shearlet_hat(2, &[0.125, 0.3, 0.0]);
        assert!((v2 - s.scaling_hat(0.125) * s.scaling_hat(0.6)).abs() < 1e-13);
    }
}
