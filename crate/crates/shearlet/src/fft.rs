//! Multi-dimensional FFT plumbing over rustfft, with plan reuse.
//!
//! Spectra use the calibrated convention: `forward` maps samples to
//! coefficients f̂(κ) = h^d Σ_x f(x) e^{−2πiκ·x} (κ in the Nyquist box), which
//! makes Σ_κ |f̂(κ)|² equal the cell-weighted squared L²-norm exactly.
//! `backward_unnormalized` is its exact adjoint-inverse up to the factor N.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::SampledField;
use crate::scalar::Scalar;

/// Complex spectrum / scratch buffer with grid shape.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    pub dims: Vec<usize>,
    pub data: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn zeros(dims: &[usize]) -> Self {
        Spectrum { dims: dims.to_vec(), data: vec![Complex::new(T::zero(), T::zero()); dims.iter().product()] }
    }

    /// Signed frequency of index i along an axis of length n (Nyquist box).
    #[inline]
    pub fn freq(i: usize, n: usize) -> i64 {
        if i < n.div_ceil(2) {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn energy(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// FFT context with cached plans; cheap to clone and share.
#[derive(Clone)]
pub struct FftCtx<T: Scalar> {
    fwd: Arc<Mutex<HashMap<usize, Arc<dyn Fft<T>>>>>,
    inv: Arc<Mutex<HashMap<usize, Arc<dyn Fft<T>>>>>,
}

impl<T: Scalar> Default for FftCtx<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> FftCtx<T> {
    pub fn new() -> Self {
        FftCtx { fwd: Arc::default(), inv: Arc::default() }
    }

    fn plan(&self, n: usize, forward: bool) -> Arc<dyn Fft<T>> {
        let cache = if forward { &self.fwd } else { &self.inv };
        let mut guard = cache.lock().expect("fft plan cache");
        guard
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(n)
                } else {
                    planner.plan_fft_inverse(n)
                }
            })
            .clone()
    }

    /// In-place unnormalized DFT along every axis. `forward` selects the sign.
    pub fn transform_nd(&self, spec: &mut Spectrum<T>, forward: bool) {
        let dims = spec.dims.clone();
        let d = dims.len();
        let total: usize = dims.iter().product();
        for axis in 0..d {
            let n = dims[axis];
            if n == 1 {
                continue;
            }
            let plan = self.plan(n, forward);
            let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
            // stride of consecutive entries along `axis`
            let stride: usize = dims[axis + 1..].iter().product();
            if stride == 1 {
                for row in spec.data.chunks_exact_mut(n) {
                    plan.process_with_scratch(row, &mut scratch);
                }
            } else {
                let lanes = total / n;
                let mut lane = vec![Complex::new(T::zero(), T::zero()); n];
                let block = stride * n;
                for l in 0..lanes {
                    let base = (l / stride) * block + (l % stride);
                    for (t, v) in lane.iter_mut().enumerate() {
                        *v = spec.data[base + t * stride];
                    }
                    plan.process_with_scratch(&mut lane, &mut scratch);
                    for (t, v) in lane.iter().enumerate() {
                        spec.data[base + t * stride] = *v;
                    }
                }
            }
        }
    }

    /// Calibrated forward transform of a real field: f̂(κ) = h^d Σ f(x) e^{−2πiκx}.
    pub fn forward(&self, field: &SampledField<T>) -> Spectrum<T> {
        let mut spec = Spectrum::zeros(field.dims());
        for (c, &v) in spec.data.iter_mut().zip(field.data()) {
            *c = Complex::new(v, T::zero());
        }
        self.transform_nd(&mut spec, true);
        let h = field.cell_volume();
        for c in spec.data.iter_mut() {
            *c = *c * h;
        }
        spec
    }

    /// Inverse of [`FftCtx::forward`]: field(x) = Σ_κ f̂(κ) e^{2πiκx}.
    /// The imaginary part is discarded (inputs are spectra of real fields).
    pub fn backward_real(&self, spec: &Spectrum<T>) -> Result<SampledField<T>> {
        let mut work = spec.clone();
        self.transform_nd(&mut work, false);
        let mut field = SampledField::zeros(&spec.dims)?;
        for (v, c) in field.data_mut().iter_mut().zip(&work.data) {
            *v = c.re;
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_is_unitary_on_grid() {
        let f = SampledField::<f64>::from_fn(&[8, 4], |x| (x[0] * 7.0).sin() + x[1]).unwrap();
        let ctx = FftCtx::new();
        let spec = ctx.forward(&f);
        assert!((spec.energy() - f.norm_sq()).abs() < 1e-13);
        let back = ctx.backward_real(&spec).unwrap();
        assert!(back.dist_sq(&f).unwrap() < 1e-24);
    }

    #[test]
    fn forward_matches_direct_dft() {
        let f = SampledField::<f64>::from_fn(&[4, 4], |x| x[0] + 3.0 * x[1] * x[1]).unwrap();
        let ctx = FftCtx::new();
        let spec = ctx.forward(&f);
        // direct O(N²) evaluation at κ = (1, 2)
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..4 {
            for l in 0..4 {
                let x = [i as f64 / 4.0, l as f64 / 4.0];
                let ph = -2.0 * std::f64::consts::PI * (x[0] + 2.0 * x[1]);
                acc += Complex::new(ph.cos(), ph.sin()) * (x[0] + 3.0 * x[1] * x[1]);
            }
        }
        acc *= 1.0 / 16.0;
        let got = spec.data[1 * 4 + 2];
        assert!((got - acc).norm() < 1e-13);
    }

    #[test]
    fn freq_layout() {
        assert_eq!(Spectrum::<f64>::freq(0, 8), 0);
        assert_eq!(Spectrum::<f64>::freq(3, 8), 3);
        assert_eq!(Spectrum::<f64>::freq(4, 8), -4);
        assert_eq!(Spectrum::<f64>::freq(7, 8), -1);
    }

    #[test]
    fn transform_3d_round_trip() {
        let f = SampledField::<f64>::from_fn(&[4, 8, 2], |x| x[0] * x[1] + x[2]).unwrap();
        let ctx = FftCtx::new();
        let spec = ctx.forward(&f);
        let back = ctx.backward_real(&spec).unwrap();
        assert!(back.dist_sq(&f).unwrap() < 1e-24);
    }
}
