//! Index algebra for pyramid-adapted systems: frequency-region tags, anisotropic
//! scaling and shear matrices, translation lattices, and index enumeration.
//!
//! Conventions (d = 3): the frequency domain splits into three pyramid pairs and
//! a central cube. The first pyramid collects ξ with |ξ₁| ≥ 1 dominant, the second
//! and third are its coordinate rotations. In 2D the analogous split is two cone
//! pairs and a central square; the same tags are reused (`C1`/`C2` alias `P1`/`P2`).
//!
//! Scale matrices are paraboloidal, `diag` with 2^j on the dominant axis and
//! 2^{j/2} elsewhere; shears are unipotent integer matrices acting on the
//! non-dominant axes. Translations live on `M_c ℤ^d` with anisotropic steps
//! (c₁ on the dominant axis, c₂ elsewhere).

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShearletError};
use crate::mat::{IMat, Mat};
use crate::scalar::Scalar;

/// Frequency-region tag. For d = 2 use the `C1`/`C2` aliases for the two cone
/// pairs and `SQUARE` for the low-frequency square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PyramidTag {
    /// Low-frequency cube (3D) / square (2D); holds coarse-scale translates only.
    Cube,
    /// |ξ₁| dominant.
    P1,
    /// |ξ₂| dominant.
    P2,
    /// |ξ₃| dominant (3D only).
    P3,
}

impl PyramidTag {
    /// 2D alias: horizontal cone pair, |ξ₂/ξ₁| ≤ 1.
    pub const C1: PyramidTag = PyramidTag::P1;
    /// 2D alias: vertical cone pair.
    pub const C2: PyramidTag = PyramidTag::P2;
    /// 2D alias for the low-frequency square.
    pub const SQUARE: PyramidTag = PyramidTag::Cube;

    /// Axis whose frequency magnitude dominates on this pyramid.
    pub fn dominant_axis(self) -> Option<usize> {
        match self {
            PyramidTag::Cube => None,
            PyramidTag::P1 => Some(0),
            PyramidTag::P2 => Some(1),
            PyramidTag::P3 => Some(2),
        }
    }

    /// Tags carrying directional atoms in dimension `d`, in enumeration order.
    pub fn directional(d: usize) -> &'static [PyramidTag] {
        match d {
            2 => &[PyramidTag::P1, PyramidTag::P2],
            3 => &[PyramidTag::P1, PyramidTag::P2, PyramidTag::P3],
            _ => panic!("dimension must be 2 or 3"),
        }
    }

    /// Name used in CSV output; dimension-appropriate.
    pub fn label(self, d: usize) -> &'static str {
        match (self, d) {
            (PyramidTag::Cube, 2) => "square",
            (PyramidTag::Cube, _) => "cube",
            (PyramidTag::P1, 2) => "c1",
            (PyramidTag::P2, 2) => "c2",
            (PyramidTag::P1, _) => "p1",
            (PyramidTag::P2, _) => "p2",
            (PyramidTag::P3, _) => "p3",
        }
    }

    pub fn from_label(s: &str) -> Option<PyramidTag> {
        match s {
            "cube" | "square" => Some(PyramidTag::Cube),
            "p1" | "c1" => Some(PyramidTag::P1),
            "p2" | "c2" => Some(PyramidTag::P2),
            "p3" => Some(PyramidTag::P3),
            _ => None,
        }
    }
}

/// Single system index: region, scale, shear (d−1 components used), translation
/// (d components used). Unused trailing components stay 0 so derived ordering and
/// hashing remain well-defined. The derived `Ord` is the canonical enumeration
/// order: (pyramid, j, k lexicographic, m lexicographic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShearletIndex {
    pub pyramid: PyramidTag,
    pub j: u32,
    pub k: [i32; 2],
    pub m: [i32; 3],
}

impl ShearletIndex {
    pub fn coarse(m: [i32; 3]) -> Self {
        ShearletIndex { pyramid: PyramidTag::Cube, j: 0, k: [0, 0], m }
    }
}

/// Anisotropic translation-step pair, 0 < c₂ ≤ c₁.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec<T> {
    pub c1: T,
    pub c2: T,
}

impl<T: Scalar> LatticeSpec<T> {
    pub fn new(c1: T, c2: T) -> Result<Self> {
        if !(c1 > T::zero() && c2 > T::zero()) {
            return Err(ShearletError::invalid("lattice steps must be positive"));
        }
        if c2 > c1 {
            return Err(ShearletError::invalid(format!(
                "lattice constraint violated: c2 ({}) must not exceed c1 ({})",
                c2.to_f64_lossy(),
                c1.to_f64_lossy()
            )));
        }
        Ok(LatticeSpec { c1, c2 })
    }
}

/// ⌈2^{j/2}⌉ on exact integers; the shear range bound at scale j.
pub fn shear_bound(j: u32) -> i64 {
    assert!(j <= 62, "scale too large for exact integer bound");
    if j % 2 == 0 {
        1i64 << (j / 2)
    } else {
        // 2^j is not a perfect square for odd j, so ⌈√(2^j)⌉ = ⌊√(2^j)⌋ + 1.
        isqrt(1u64 << j) as i64 + 1
    }
}

fn isqrt(v: u64) -> u64 {
    if v == 0 {
        return 0;
    }
    let mut x = (v as f64).sqrt() as u64;
    // float seed can be off by one in either direction
    while x.saturating_mul(x) > v {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= v {
        x += 1;
    }
    x
}

/// All shear vectors at scale j in dimension d, lexicographic.
pub fn shear_range(d: usize, j: u32) -> Vec<[i32; 2]> {
    let b = shear_bound(j) as i32;
    let mut out = Vec::new();
    if d == 2 {
        for k in -b..=b {
            out.push([k, 0]);
        }
    } else {
        for k1 in -b..=b {
            for k2 in -b..=b {
                out.push([k1, k2]);
            }
        }
    }
    out
}

/// Paraboloidal scaling matrix for a directional pyramid: 2^j on the dominant
/// axis, 2^{j/2} on the others. Errors on the cube tag, where no anisotropic
/// scaling is defined.
pub fn scaling_matrix<T: Scalar>(d: usize, tag: PyramidTag, j: u32) -> Result<Mat<T>> {
    check_dim(d)?;
    let axis = tag
        .dominant_axis()
        .ok_or(ShearletError::CubeRegion("scaling_matrix"))?;
    if axis >= d {
        return Err(ShearletError::invalid("pyramid tag not valid in this dimension"));
    }
    let full = T::from_f64_lossy((j as f64).exp2());
    let half = T::from_f64_lossy((j as f64 / 2.0).exp2());
    let mut entries = [half; 3];
    entries[axis] = full;
    Ok(Mat::diag(d, &entries[..d]))
}

/// Unipotent integer shear matrix attached to a directional pyramid.
/// Row layout for d = 3, tag P1, k = (k₁,k₂): [(1,k₁,k₂),(0,1,0),(0,0,1)];
/// P2 and P3 place (k₁,1,k₂) / (k₁,k₂,1) in their dominant row.
pub fn shear_matrix(d: usize, tag: PyramidTag, k: [i32; 2]) -> Result<IMat> {
    check_dim(d)?;
    let axis = tag
        .dominant_axis()
        .ok_or(ShearletError::CubeRegion("shear_matrix"))?;
    if axis >= d {
        return Err(ShearletError::invalid("pyramid tag not valid in this dimension"));
    }
    let mut m = IMat::identity(d);
    let others: Vec<usize> = (0..d).filter(|&i| i != axis).collect();
    for (src, &col) in others.iter().enumerate() {
        m.a[axis][col] = k[src] as i64;
    }
    Ok(m)
}

/// Translation lattice generator matrix `M_c`: c₁ on the dominant axis, c₂ on the
/// others; the cube/square region uses c₁·I.
pub fn translation_lattice<T: Scalar>(
    d: usize,
    tag: PyramidTag,
    spec: &LatticeSpec<T>,
) -> Result<Mat<T>> {
    check_dim(d)?;
    match tag.dominant_axis() {
        None => Ok(Mat::diag(d, &vec![spec.c1; d])),
        Some(axis) if axis < d => {
            let mut entries = [spec.c2; 3];
            entries[axis] = spec.c1;
            Ok(Mat::diag(d, &entries[..d]))
        }
        Some(_) => Err(ShearletError::invalid("pyramid tag not valid in this dimension")),
    }
}

/// Classify a frequency point. Points with ‖ξ‖∞ < 1 belong to the cube/square;
/// otherwise the pyramid of the dominant component wins, ties resolved in favor
/// of the lower-numbered pyramid.
pub fn pyramid_of<T: Scalar>(xi: &[T]) -> PyramidTag {
    let d = xi.len();
    assert!(d == 2 || d == 3, "dimension must be 2 or 3");
    let sup = xi.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if sup < T::one() {
        return PyramidTag::Cube;
    }
    for (i, tag) in PyramidTag::directional(d).iter().enumerate() {
        if xi[i].abs() == sup {
            return *tag;
        }
    }
    unreachable!("some component attains the sup norm")
}

/// Parameters controlling nominal-support index enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationSpec<T> {
    pub lattice: LatticeSpec<T>,
    /// Dilation applied to the unit support box [−1,1]^d before intersecting;
    /// 1.0 models compactly supported generators, 4.0 the slow spatial decay of
    /// band-limited ones.
    pub support_radius: T,
    pub j_max: u32,
}

/// Enumerate every index whose nominal support box meets the axis-aligned field
/// extent `[lo, hi]^d`. The support box of (pyramid, j, k, m) is the image of
/// the dilated unit box under A⁻¹S⁻¹ centered at the lattice point A⁻¹S⁻¹M_c m.
/// Output is sorted in canonical order and includes the coarse translates.
pub fn enumerate_indices<T: Scalar>(
    d: usize,
    spec: &EnumerationSpec<T>,
    lo: T,
    hi: T,
) -> Result<Vec<ShearletIndex>> {
    check_dim(d)?;
    if !(hi > lo) {
        return Err(ShearletError::invalid("degenerate field extent"));
    }
    let r = spec.support_radius;
    if r <= T::zero() {
        return Err(ShearletError::invalid("support radius must be positive"));
    }
    let mut out = Vec::new();

    // Coarse translates: support box [−r, r]^d + c1·m.
    {
        let c1 = spec.lattice.c1;
        let (lo_i, hi_i) = int_range((lo - r) / c1, (hi + r) / c1)?;
        let mut m = [0i32; 3];
        enumerate_box(d, lo_i, hi_i, &mut m, 0, &mut |m| {
            out.push(ShearletIndex::coarse(m));
        });
    }

    for &tag in PyramidTag::directional(d) {
        let axis = tag.dominant_axis().unwrap();
        for j in 0..=spec.j_max {
            let half = T::from_f64_lossy((j as f64 / 2.0).exp2());
            let full = T::from_f64_lossy((j as f64).exp2());
            for k in shear_range(d, j) {
                // Half-widths of the sheared support box per axis: the dominant
                // axis mixes in |k| from the shear, the others scale directly.
                let mut width = [T::zero(); 3];
                let mut kk_sum = T::zero();
                for (src, _) in (0..d).filter(|&i| i != axis).enumerate() {
                    kk_sum += T::from_i32(k[src].abs()).unwrap();
                }
                for (i, w) in width.iter_mut().enumerate().take(d) {
                    *w = if i == axis { r * (T::one() + kk_sum) / full } else { r / half };
                }
                // Translation point t(m) componentwise:
                //   t[axis]  = (c1·m[axis] − c2·Σ k·m[other]) / 2^j
                //   t[other] = c2·m[other] / 2^{j/2}
                // Enumerate the non-dominant components first, then solve the
                // dominant range for each combination.
                let c1 = spec.lattice.c1;
                let c2 = spec.lattice.c2;
                let others: Vec<usize> = (0..d).filter(|&i| i != axis).collect();
                let mut ranges = Vec::with_capacity(others.len());
                for &i in &others {
                    ranges.push(int_range((lo - width[i]) * half / c2, (hi + width[i]) * half / c2)?);
                }
                let mut kidx = Vec::new();
                let mut rec = |mo: &[i64]| -> Result<()> {
                    // dominant-axis bounds: lo − w ≤ t[axis] ≤ hi + w
                    let mut shear_term = T::zero();
                    for (src, &mv) in mo.iter().enumerate() {
                        shear_term += T::from_i32(k[src]).unwrap() * T::from_i64(mv).unwrap();
                    }
                    let base_lo = (lo - width[axis]) * full + c2 * shear_term;
                    let base_hi = (hi + width[axis]) * full + c2 * shear_term;
                    let (alo, ahi) = int_range(base_lo / c1, base_hi / c1)?;
                    for ma in alo..=ahi {
                        let mut m = [0i32; 3];
                        m[axis] = ma as i32;
                        for (src, &i) in others.iter().enumerate() {
                            m[i] = mo[src] as i32;
                        }
                        kidx.push(ShearletIndex { pyramid: tag, j, k, m });
                    }
                    Ok(())
                };
                match others.len() {
                    1 => {
                        for m1 in ranges[0].0..=ranges[0].1 {
                            rec(&[m1])?;
                        }
                    }
                    2 => {
                        for m1 in ranges[0].0..=ranges[0].1 {
                            for m2 in ranges[1].0..=ranges[1].1 {
                                rec(&[m1, m2])?;
                            }
                        }
                    }
                    _ => unreachable!(),
                }
                out.extend(kidx);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn int_range<T: Scalar>(lo: T, hi: T) -> Result<(i64, i64)> {
    let lo = lo.ceil().to_f64_lossy();
    let hi = hi.floor().to_f64_lossy();
    if lo.abs() > 1e15 || hi.abs() > 1e15 {
        return Err(ShearletError::invalid("enumeration range overflow"));
    }
    Ok((lo as i64, hi as i64))
}

fn enumerate_box(
    d: usize,
    lo: i64,
    hi: i64,
    m: &mut [i32; 3],
    axis: usize,
    f: &mut impl FnMut([i32; 3]),
) {
    if axis == d {
        f(*m);
        return;
    }
    for v in lo..=hi {
        m[axis] = v as i32;
        enumerate_box(d, lo, hi, m, axis + 1, f);
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(ShearletError::invalid("dimension must be 2 or 3"))
    }
}
