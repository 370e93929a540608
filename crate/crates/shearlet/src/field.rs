//! Regularly sampled scalar fields on the unit torus [0,1)^d.
//!
//! Storage is C-order (last axis contiguous); sample i lives at x = i·h with
//! h = 1/n per axis, and integrals/norms are cell-volume weighted so they
//! approximate their continuum counterparts.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShearletError};
use crate::scalar::Scalar;

/// Dense real field over a d-dimensional grid, d ∈ {2,3}.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

/// JSON sidecar stored next to raw field dumps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldMeta {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub descriptor: String,
}

impl<T: Scalar> SampledField<T> {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 || dims.len() > 3 {
            return Err(ShearletError::invalid("field dimension must be 2 or 3"));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(ShearletError::invalid("zero-length axis"));
        }
        let len = dims.iter().product();
        Ok(SampledField { dims: dims.to_vec(), data: vec![T::zero(); len] })
    }

    /// Build by evaluating `f` at every grid point (arguments in [0,1)^d).
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[T]) -> T) -> Result<Self> {
        let mut field = Self::zeros(dims)?;
        let d = dims.len();
        let h: Vec<T> = dims.iter().map(|&n| T::one() / T::from_usize_lossy(n)).collect();
        let mut idx = vec![0usize; d];
        let mut x = vec![T::zero(); d];
        for v in field.data.iter_mut() {
            for a in 0..d {
                x[a] = T::from_usize_lossy(idx[a]) * h[a];
            }
            *v = f(&x);
            // increment C-order counter
            for a in (0..d).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(field)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
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

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> T {
        self.dims
            .iter()
            .map(|&n| T::one() / T::from_usize_lossy(n))
            .fold(T::one(), |a, b| a * b)
    }

    /// Cell-weighted L² inner product ⟨self, other⟩ ≈ ∫ f·g.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        let s: T = self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum();
        Ok(s * self.cell_volume())
    }

    /// Cell-weighted squared L² norm.
    pub fn norm_sq(&self) -> T {
        let s: T = self.data.iter().map(|&a| a * a).sum();
        s * self.cell_volume()
    }

    /// Cell-weighted integral (total mass).
    pub fn mass(&self) -> T {
        let s: T = self.data.iter().copied().sum();
        s * self.cell_volume()
    }

    /// max |f|
    pub fn sup_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// self ← self + scale · other
    pub fn add_scaled(&mut self, other: &Self, scale: T) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
        Ok(())
    }

    /// ‖self − other‖² (cell-weighted)
    pub fn dist_sq(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        let s: T = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum();
        Ok(s * self.cell_volume())
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(ShearletError::GridMismatch {
                expected: self.dims.clone(),
                got: other.dims.clone(),
            });
        }
        Ok(())
    }

    /// Flat index of a multi-index (no bounds check beyond debug).
    #[inline]
    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for (a, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[a]);
            f = f * self.dims[a] + i;
        }
        f
    }

    /// Write raw little-endian f64 samples plus a JSON sidecar.
    pub fn write_raw(&self, raw_path: &Path, descriptor: &str) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.data.len() * 8);
        for &v in &self.data {
            bytes.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
        let mut f = fs::File::create(raw_path)?;
        f.write_all(&bytes)?;
        let meta = FieldMeta {
            dims: self.dims.clone(),
            spacing: self.dims.iter().map(|&n| 1.0 / n as f64).collect(),
            origin: vec![0.0; self.dims.len()],
            descriptor: descriptor.to_string(),
        };
        let side = raw_path.with_extension("json");
        fs::write(side, serde_json::to_string_pretty(&meta).expect("serializable") + "\n")?;
        Ok(())
    }

    /// Read a field written by [`SampledField::write_raw`].
    pub fn read_raw(raw_path: &Path) -> Result<Self> {
        let side = raw_path.with_extension("json");
        let meta: FieldMeta = serde_json::from_str(&fs::read_to_string(&side)?)
            .map_err(|e| ShearletError::Parse(format!("sidecar {}: {e}", side.display())))?;
        let mut bytes = Vec::new();
        fs::File::open(raw_path)?.read_to_end(&mut bytes)?;
        let expect: usize = meta.dims.iter().product();
        if bytes.len() != expect * 8 {
            return Err(ShearletError::Parse(format!(
                "raw size {} does not match dims {:?}",
                bytes.len(),
                meta.dims
            )));
        }
        let mut field = Self::zeros(&meta.dims)?;
        for (i, chunk) in bytes.chunks_exact(8).enumerate() {
            field.data[i] = T::from_f64_lossy(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_weights_by_cell_volume() {
        let f = SampledField::<f64>::from_fn(&[8, 8], |_| 2.0).unwrap();
        assert!((f.norm_sq() - 4.0).abs() < 1e-14);
        assert!((f.mass() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = SampledField::<f64>::zeros(&[4, 4]).unwrap();
        let b = SampledField::<f64>::zeros(&[4, 8]).unwrap();
        assert!(matches!(a.inner(&b), Err(ShearletError::GridMismatch { .. })));
    }

    #[test]
    fn raw_round_trip() {
        let dir = std::env::temp_dir().join("shearlet_field_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.raw");
        let f = SampledField::<f64>::from_fn(&[4, 4, 4], |x| x[0] + 2.0 * x[1] - x[2]).unwrap();
        f.write_raw(&path, "test field").unwrap();
        let g = SampledField::<f64>::read_raw(&path).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn from_fn_c_order() {
        let f = SampledField::<f64>::from_fn(&[2, 4], |x| x[0] * 10.0 + x[1]).unwrap();
        // last axis contiguous
        assert_eq!(f.data()[1], 0.25);
        assert_eq!(f.data()[4], 5.0);
    }
}
