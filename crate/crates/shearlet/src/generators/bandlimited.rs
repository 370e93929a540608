//! Band-limited generator built from polynomial smoothstep blends.
//!
//! The radial profile `psi1_hat` is supported on |u| ∈ [1/2, 2] and satisfies
//! the dyadic partition Σ_{j≥0} psi1_hat(2⁻ʲu)² = 1 for |u| ≥ 1. The angular
//! profile `psi2_hat` is supported on [−1, 1] and satisfies the integer-shift
//! partition Σ_l psi2_hat(u + l)² = 1. Both identities hold pointwise by
//! construction, which is what makes the induced tile sums collapse exactly.

use crate::scalar::Scalar;
use std::marker::PhantomData;

/// Parameters of the band-limited generator.
///
/// `window_order` is the smoothstep order N: the blend t ↦ S_N(t) matches
/// value and N derivatives at t = 0 and t = 1, so the frequency profiles are
/// C^N across band edges.
#[derive(Clone, Debug)]
pub struct BandlimitedSpec<T> {
    pub window_order: u32,
    _marker: PhantomData<T>,
}

impl<T: Scalar> Default for BandlimitedSpec<T> {
    fn default() -> Self {
        Self::new(3)
    }
}

impl<T: Scalar> BandlimitedSpec<T> {
    pub fn new(window_order: u32) -> Self {
        Self { window_order, _marker: PhantomData }
    }

    /// Smoothstep S_N: monotone [0,1] → [0,1] with S_N(1−t) = 1 − S_N(t) and
    /// N vanishing derivatives at both ends. Clamped outside [0, 1].
    pub fn blend(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        if t >= T::one() {
            return T::one();
        }
        let n = self.window_order as i64;
        // S_N(t) = t^{N+1} Σ_{k=0}^{N} C(N+k,k)·C(2N+1,N−k)·(−t)^k, evaluated
        // by Horner in (−t).
        let mut acc = T::zero();
        for k in (0..=n).rev() {
            let c = binom(n + k, k) * binom(2 * n + 1, n - k);
            acc = acc * (-t) + T::from_f64_lossy(c);
        }
        acc * t.powi(n as i32 + 1)
    }

    /// Dominant-axis profile: rising half-wave on [1/2, 1], falling on [1, 2],
    /// even, zero elsewhere. Squares telescope dyadically to 1 on |u| ≥ 1.
    pub fn psi1_hat(&self, u: T) -> T {
        let x = u.abs();
        let half = T::from_f64_lossy(0.5);
        let two = T::from_f64_lossy(2.0);
        let fpi2 = T::PI() * half;
        if x >= half && x <= T::one() {
            (fpi2 * self.blend(two * x - T::one())).sin()
        } else if x > T::one() && x <= two {
            (fpi2 * self.blend(x - T::one())).cos()
        } else {
            T::zero()
        }
    }

    /// Cross-axis profile: even bump on [−1, 1], unit-shift partition of
    /// unity in the square sense.
    pub fn psi2_hat(&self, u: T) -> T {
        let x = u.abs();
        if x >= T::one() {
            T::zero()
        } else {
            (T::PI() * T::from_f64_lossy(0.5) * self.blend(x)).cos()
        }
    }

    /// Mother shearlet in frequency: separable in the cone-adapted sense,
    /// cross arguments are slopes w_i/w_1. Vanishes on the plane w_1 = 0.
    pub fn shearlet_hat(&self, d: usize, w: &[T; 3]) -> T {
        if w[0] == T::zero() {
            return T::zero();
        }
        let mut v = self.psi1_hat(w[0]) * self.psi2_hat(w[1] / w[0]);
        if d == 3 {
            v = v * self.psi2_hat(w[2] / w[0]);
        }
        v
    }
}

fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let mut acc = 1u128;
    for i in 0..k.min(n - k) as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> BandlimitedSpec<f64> {
        BandlimitedSpec::default()
    }

    #[test]
    fn blend_is_order3_smoothstep() {
        let s = spec();
        // S_3(t) = t^4 (35 - 84t + 70t^2 - 20t^3)
        for &t in &[0.1, 0.3, 0.5, 0.77, 0.9] {
            let direct = t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
            assert!((s.blend(t) - direct).abs() < 1e-14);
        }
        assert_eq!(s.blend(-0.2), 0.0);
        assert_eq!(s.blend(1.4), 1.0);
        assert!((s.blend(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn blend_complement_symmetry() {
        for order in 1..=5u32 {
            let s = BandlimitedSpec::<f64>::new(order);
            for i in 0..=40 {
                let t = i as f64 / 40.0;
                assert!(
                    (s.blend(1.0 - t) - (1.0 - s.blend(t))).abs() < 1e-12,
                    "order {order} t {t}"
                );
            }
        }
    }

    #[test]
    fn psi1_support_and_frozen_values() {
        let s = spec();
        assert_eq!(s.psi1_hat(0.0), 0.0);
        assert_eq!(s.psi1_hat(0.49), 0.0);
        assert_eq!(s.psi1_hat(2.01), 0.0);
        assert_eq!(s.psi1_hat(-3.0), 0.0);
        // v(0.5) = 1/2 exactly, so psi1(0.75) = sin(pi/4).
        assert!((s.psi1_hat(0.75) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.psi1_hat(1.0) - 1.0).abs() < 1e-15);
        assert!((s.psi1_hat(1.5) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(s.psi1_hat(2.0).abs() < 1e-15);
        assert!((s.psi1_hat(-0.75) - s.psi1_hat(0.75)).abs() < 1e-16);
    }

    #[test]
    fn psi2_support_and_frozen_values() {
        let s = spec();
        assert!((s.psi2_hat(0.0) - 1.0).abs() < 1e-15);
        assert!((s.psi2_hat(0.5) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.psi2_hat(1.0), 0.0);
        assert_eq!(s.psi2_hat(-1.0), 0.0);
        assert_eq!(s.psi2_hat(1.7), 0.0);
    }

    #[test]
    fn dyadic_partition_of_unity() {
        let s = spec();
        for i in 0..200 {
            let u = 1.0 + i as f64 * (100.0 - 1.0) / 199.0;
            let total: f64 = (0..=9).map(|j| s.psi1_hat(u / 2f64.powi(j)).powi(2)).sum();
            assert!((total - 1.0).abs() < 1e-12, "u = {u}: {total}");
        }
        // Below |u| = 1 the sum drops off: partial coverage only.
        let below: f64 = (0..=9).map(|j| s.psi1_hat(0.6 / 2f64.powi(j)).powi(2)).sum();
        assert!(below < 1.0 - 1e-3);
    }

    #[test]
    fn shift_partition_of_unity() {
        let s = spec();
        for i in 0..=100 {
            let u = -3.0 + 6.0 * i as f64 / 100.0;
            let total: f64 = (-4..=4).map(|l| s.psi2_hat(u + l as f64).powi(2)).sum();
            assert!((total - 1.0).abs() < 1e-12, "u = {u}: {total}");
        }
    }

    #[test]
    fn band_edges_are_smooth() {
        // One-sided difference quotients agree across every band edge: the
        // blend has vanishing derivatives at its ends.
        let s = spec();
        let h = 1e-5;
        for &edge in &[0.5, 1.0, 2.0] {
            let left = (s.psi1_hat(edge) - s.psi1_hat(edge - h)) / h;
            let right = (s.psi1_hat(edge + h) - s.psi1_hat(edge)) / h;
            assert!((left - right).abs() < 1e-3, "edge {edge}: {left} vs {right}");
        }
        let left = (s.psi2_hat(1.0) - s.psi2_hat(1.0 - h)) / h;
        assert!(left.abs() < 1e-3);
    }

    #[test]
    fn shearlet_hat_zeros_and_values() {
        let s = spec();
        assert_eq!(s.shearlet_hat(3, &[0.0, 0.3, 0.1]), 0.0);
        assert_eq!(s.shearlet_hat(3, &[0.25, 0.0, 0.0]), 0.0);
        assert_eq!(s.shearlet_hat(3, &[1.0, 2.0, 0.0]), 0.0);
        let v = s.shearlet_hat(2, &[1.0, 0.5, 0.0]);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let v3 = s.shearlet_hat(3, &[1.0, 0.5, 0.5]);
        assert!((v3 - 0.5) < 1e-15);
    }

    #[test]
    fn f32_path_agrees() {
        let s64 = BandlimitedSpec::<f64>::new(3);
        let s32 = BandlimitedSpec::<f32>::new(3);
        for i in 0..40 {
            let u = -2.5 + 5.0 * i as f64 / 39.0;
            assert!((s32.psi1_hat(u as f32) as f64 - s64.psi1_hat(u)).abs() < 1e-6);
        }
    }
}
