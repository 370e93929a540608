//! Isotropic orthonormal Haar baseline on dyadic grids: the full square
//! multiresolution decomposition (every axis split at every level), with
//! unitary pair steps and a cell-volume prescale so coefficients are the
//! continuum inner products of the cell-constant interpolant. Squared
//! coefficients therefore sum to the grid L2 energy.

use crate::error::{Result, ShearletError};
use crate::field::SampledField;
use crate::scalar::Scalar;

/// Coefficients of the full Haar decomposition, stored in the standard
/// in-place pyramid layout: the all-low block of side 2^q holds everything
/// coarser than level q.
#[derive(Clone, Debug)]
pub struct HaarCoeffs<T: Scalar> {
    dims: Vec<usize>,
    levels: u32,
    data: Vec<T>,
}

/// Decoded identity of one coefficient slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaarAtom {
    /// Global mean atom (flat index 0).
    Scaling,
    /// Tensor wavelet on a dyadic cube of side 2^-level; `orientation` has
    /// bit a set when axis a carries the oscillation, and `position` indexes
    /// the support cube within the 2^level-per-axis translation grid.
    Detail { level: u32, orientation: u8, position: [usize; 3] },
}

/// Per-level coefficient statistics.
#[derive(Clone, Copy, Debug)]
pub struct ScaleStat<T> {
    pub level: u32,
    pub total: usize,
    pub significant: usize,
    pub max_abs: T,
}

/// Full decomposition; every grid side must equal 2^levels.
pub fn haar_analyze<T: Scalar>(field: &SampledField<T>, levels: u32) -> Result<HaarCoeffs<T>> {
    let dims = field.dims().to_vec();
    if levels == 0 || levels > 30 {
        return Err(ShearletError::invalid("decomposition depth must lie in 1..=30"));
    }
    let side = 1usize << levels;
    if dims.iter().any(|&n| n != side) {
        return Err(ShearletError::invalid(format!(
            "full decomposition needs every grid side equal to 2^levels = {side}, got {dims:?}"
        )));
    }
    let scale = field.cell_volume().sqrt();
    let mut data: Vec<T> = field.data().iter().map(|&v| v * scale).collect();
    let d = dims.len();
    for step in 0..levels {
        let m = side >> step;
        for axis in 0..d {
            axis_pass(&mut data, &dims, m, axis, false);
        }
    }
    Ok(HaarCoeffs { dims, levels, data })
}

/// Exact inverse of [`haar_analyze`].
pub fn haar_synthesize<T: Scalar>(coeffs: &HaarCoeffs<T>) -> Result<SampledField<T>> {
    let mut data = coeffs.data.clone();
    let d = coeffs.dims.len();
    let side = 1usize << coeffs.levels;
    for step in (0..coeffs.levels).rev() {
        let m = side >> step;
        for axis in (0..d).rev() {
            axis_pass(&mut data, &coeffs.dims, m, axis, true);
        }
    }
    let mut field = SampledField::zeros(&coeffs.dims)?;
    let scale = T::one() / field.cell_volume().sqrt();
    for (v, c) in field.data_mut().iter_mut().zip(&data) {
        *v = *c * scale;
    }
    Ok(field)
}

/// One unitary split/merge sweep along `axis` over the block [0, m)^d.
fn axis_pass<T: Scalar>(data: &mut [T], dims: &[usize], m: usize, axis: usize, inverse: bool) {
    let d = dims.len();
    let mut strides = [0usize; 3];
    let mut s = 1;
    for a in (0..d).rev() {
        strides[a] = s;
        s *= dims[a];
    }
    let stride = strides[axis];
    let half = m / 2;
    let c = T::FRAC_1_SQRT_2();
    let mut lane = vec![T::zero(); m];

    let others: Vec<usize> = (0..d).filter(|&a| a != axis).collect();
    let lines = m.pow(others.len() as u32);
    for li in 0..lines {
        let mut rest = li;
        let mut base = 0usize;
        for &a in others.iter().rev() {
            base += (rest % m) * strides[a];
            rest /= m;
        }
        for (t, v) in lane.iter_mut().enumerate() {
            *v = data[base + t * stride];
        }
        if inverse {
            for u in 0..half {
                let s = lane[u];
                let t = lane[half + u];
                data[base + 2 * u * stride] = (s + t) * c;
                data[base + (2 * u + 1) * stride] = (s - t) * c;
            }
        } else {
            for u in 0..half {
                let a = lane[2 * u];
                let b = lane[2 * u + 1];
                data[base + u * stride] = (a + b) * c;
                data[base + (half + u) * stride] = (a - b) * c;
            }
        }
    }
}

impl<T: Scalar> HaarCoeffs<T> {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Sum of squared coefficients; equals the analyzed field's grid energy.
    pub fn energy(&self) -> T {
        self.data.iter().map(|&v| v * v).sum()
    }

    /// Flat indices and moduli in decreasing modulus order, ties broken by
    /// flat index.
    pub fn sorted_view(&self) -> Vec<(usize, T)> {
        let mut order: Vec<(usize, T)> =
            self.data.iter().enumerate().map(|(i, &v)| (i, v.abs())).collect();
        order.sort_unstable_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        order
    }

    /// Decode a flat index into the atom it addresses.
    pub fn atom_of_flat(&self, flat: usize) -> HaarAtom {
        let d = self.dims.len();
        let mut idx = [0usize; 3];
        let mut f = flat;
        for a in (0..d).rev() {
            idx[a] = f % self.dims[a];
            f /= self.dims[a];
        }
        let m = idx[..d].iter().copied().max().unwrap();
        if m == 0 {
            return HaarAtom::Scaling;
        }
        let q = usize::BITS - 1 - m.leading_zeros();
        let low = 1usize << q;
        let mut orientation = 0u8;
        let mut position = [0usize; 3];
        for a in 0..d {
            if idx[a] >= low {
                orientation |= 1 << a;
                position[a] = idx[a] - low;
            } else {
                position[a] = idx[a];
            }
        }
        HaarAtom::Detail { level: q, orientation, position }
    }

    /// Per-level census: totals, counts above `threshold`, and the largest
    /// modulus, for levels 0..levels.
    pub fn scale_profile(&self, threshold: T) -> Vec<ScaleStat<T>> {
        let mut stats: Vec<ScaleStat<T>> = (0..self.levels)
            .map(|q| ScaleStat { level: q, total: 0, significant: 0, max_abs: T::zero() })
            .collect();
        for (flat, &v) in self.data.iter().enumerate() {
            match self.atom_of_flat(flat) {
                HaarAtom::Scaling => {}
                HaarAtom::Detail { level, .. } => {
                    let s = &mut stats[level as usize];
                    s.total += 1;
                    if v.abs() > threshold {
                        s.significant += 1;
                    }
                    s.max_abs = s.max_abs.max(v.abs());
                }
            }
        }
        stats
    }

    /// Field synthesized from the first `n` entries of a sorted view.
    pub fn reconstruct_prefix(&self, order: &[(usize, T)], n: usize) -> Result<SampledField<T>> {
        if n > order.len() {
            return Err(ShearletError::invalid(format!(
                "prefix length {n} exceeds the coefficient count {}",
                order.len()
            )));
        }
        let mut kept = HaarCoeffs {
            dims: self.dims.clone(),
            levels: self.levels,
            data: vec![T::zero(); self.data.len()],
        };
        for &(i, _) in &order[..n] {
            kept.data[i] = self.data[i];
        }
        haar_synthesize(&kept)
    }
}
