//! Trigonometric baseline: calibrated grid spectra treated as an orthonormal
//! coefficient system, with greedy complex N-term selection.
//!
//! Selection keeps complex coefficients whole. Conjugate pairs tie in
//! modulus, so greedy prefixes may split a pair; error accounting therefore
//! lives in the complex expansion, where the N-term error equals the
//! coefficient tail exactly.

use num_complex::Complex;

use crate::error::Result;
use crate::fft::{FftCtx, Spectrum};
use crate::field::SampledField;
use crate::scalar::Scalar;

/// Frequency coefficients of a real field under the calibrated transform;
/// squared moduli sum to the grid L2 energy.
#[derive(Clone, Debug)]
pub struct FourierCoeffs<T: Scalar> {
    spectrum: Spectrum<T>,
}

/// Calibrated analysis: one coefficient per grid frequency.
pub fn fourier_analyze<T: Scalar>(ctx: &FftCtx<T>, field: &SampledField<T>) -> FourierCoeffs<T> {
    FourierCoeffs { spectrum: ctx.forward(field) }
}

/// Full inverse: reconstructs the field exactly (up to rounding).
pub fn fourier_synthesize<T: Scalar>(
    ctx: &FftCtx<T>,
    coeffs: &FourierCoeffs<T>,
) -> Result<SampledField<T>> {
    ctx.backward_real(&coeffs.spectrum)
}

impl<T: Scalar> FourierCoeffs<T> {
    pub fn dims(&self) -> &[usize] {
        &self.spectrum.dims
    }

    pub fn len(&self) -> usize {
        self.spectrum.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.data.is_empty()
    }

    /// Total squared modulus; equals the analyzed field's grid energy.
    pub fn energy(&self) -> T {
        self.spectrum.energy()
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    /// Coefficient at a signed integer frequency (any representative of the
    /// residue class).
    pub fn at_freq(&self, k: &[i64]) -> Complex<T> {
        self.spectrum.data[self.flat_of_freq(k)]
    }

    /// Flat index of a signed frequency.
    pub fn flat_of_freq(&self, k: &[i64]) -> usize {
        let mut flat = 0usize;
        for (a, &ka) in k.iter().enumerate() {
            let n = self.spectrum.dims[a] as i64;
            flat = flat * n as usize + ka.rem_euclid(n) as usize;
        }
        flat
    }

    /// Flat indices and moduli in decreasing modulus order, ties broken by
    /// flat index so the ordering is deterministic.
    pub fn sorted_view(&self) -> Vec<(usize, T)> {
        let mut order: Vec<(usize, T)> = self
            .spectrum
            .data
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm_sqr().sqrt()))
            .collect();
        order.sort_unstable_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        order
    }

    /// Spectrum keeping only the listed flat indices; the complex N-term
    /// partial sum is its (complex) inverse transform.
    pub fn masked(&self, keep: &[usize]) -> Spectrum<T> {
        let mut out = Spectrum::zeros(&self.spectrum.dims);
        for &i in keep {
            out.data[i] = self.spectrum.data[i];
        }
        out
    }
}
