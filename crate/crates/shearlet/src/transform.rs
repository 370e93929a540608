//! Analysis and synthesis for digital shearlet systems.
//!
//! Coefficients are real and stored densely per tile: the translation grid of
//! a tile is regular, so a tile's block is just a C-order array over its
//! translate counters. Analysis folds the field spectrum onto each tile's
//! quotient grid and runs one small inverse transform per tile; synthesis is
//! the exact adjoint (small forward transform, then scatter through the same
//! sweep). A quadrature route through continuum atom profiles provides an
//! independent check on the frequency-domain path.

use crate::error::{Result, ShearletError};
use crate::fft::Spectrum;
use crate::field::SampledField;
use crate::generators::Generator;
use crate::lattice::{PyramidTag, ShearletIndex};
use crate::scalar::Scalar;
use crate::system::{ShearletSystem, TileKind, TileSpec};
use num_complex::Complex;

/// Dense-per-tile coefficient storage aligned with `system.tiles`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable<T> {
    pub blocks: Vec<Vec<T>>,
}

impl<T: Scalar> CoeffTable<T> {
    pub fn zeros(sys: &ShearletSystem<T>) -> Self {
        CoeffTable { blocks: sys.tiles.iter().map(|t| vec![T::zero(); t.block_len()]).collect() }
    }

    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn l2_sq(&self) -> T {
        self.blocks.iter().flatten().map(|&v| v * v).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(ti, b)| b.iter().enumerate().map(move |(fl, &v)| (ti, fl, v)))
    }

    pub fn get(&self, sys: &ShearletSystem<T>, idx: &ShearletIndex) -> Result<T> {
        let (ti, fl) = sys.entry_of(idx)?;
        Ok(self.blocks[ti][fl])
    }

    pub fn set(&mut self, sys: &ShearletSystem<T>, idx: &ShearletIndex, v: T) -> Result<()> {
        let (ti, fl) = sys.entry_of(idx)?;
        self.blocks[ti][fl] = v;
        Ok(())
    }

    pub fn scale(&mut self, s: T) {
        for b in &mut self.blocks {
            for v in b {
                *v *= s;
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: T) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }

    /// All entries ordered by non-increasing modulus; ties broken by the
    /// deterministic enumeration order (tile, then translate).
    pub fn sorted_view(&self) -> Vec<(usize, usize, T)> {
        let mut v: Vec<(usize, usize, T)> = self.iter().collect();
        v.sort_by(|a, b| {
            b.2.abs()
                .partial_cmp(&a.2.abs())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
                .then(a.1.cmp(&b.1))
        });
        v
    }

    pub fn to_csv(&self, sys: &ShearletSystem<T>) -> String {
        let mut out = String::from("pyramid,j,k1,k2,m1,m2,m3,value\n");
        for (ti, fl, v) in self.iter() {
            let idx = sys.index_of(ti, fl);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:e}\n",
                idx.pyramid.label(sys.d),
                idx.j,
                idx.k[0],
                idx.k[1],
                idx.m[0],
                idx.m[1],
                idx.m[2],
                v
            ));
        }
        out
    }

    pub fn from_csv(sys: &ShearletSystem<T>, text: &str) -> Result<Self> {
        let mut table = CoeffTable::zeros(sys);
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(ShearletError::Parse(format!(
                    "line {}: expected 8 columns, got {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let bad = |what: &str| ShearletError::Parse(format!("line {}: bad {what}", lineno + 1));
            let pyramid = PyramidTag::from_label(cols[0]).ok_or_else(|| bad("pyramid"))?;
            let j: u32 = cols[1].trim().parse().map_err(|_| bad("scale"))?;
            let mut k = [0i32; 2];
            let mut m = [0i32; 3];
            for (slot, col) in k.iter_mut().zip(&cols[2..4]) {
                *slot = col.trim().parse().map_err(|_| bad("shear"))?;
            }
            for (slot, col) in m.iter_mut().zip(&cols[4..7]) {
                *slot = col.trim().parse().map_err(|_| bad("translate"))?;
            }
            let v: f64 = cols[7].trim().parse().map_err(|_| bad("value"))?;
            table.set(sys, &ShearletIndex { pyramid, j, k, m }, T::from_f64_lossy(v))?;
        }
        Ok(table)
    }
}

fn check_grid<T: Scalar>(sys: &ShearletSystem<T>, f: &SampledField<T>) -> Result<()> {
    if f.dims() != sys.dims().as_slice() {
        return Err(ShearletError::GridMismatch { expected: sys.dims(), got: f.dims().to_vec() });
    }
    Ok(())
}

/// Build a field by evaluating a function of the integer grid indices.
fn field_by_index<T: Scalar>(
    dims: &[usize],
    mut f: impl FnMut(&[usize]) -> T,
) -> Result<SampledField<T>> {
    let mut field = SampledField::zeros(dims)?;
    let d = dims.len();
    let mut idx = vec![0usize; d];
    for v in field.data_mut() {
        *v = f(&idx);
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

/// Stream per-tile coefficient blocks without materializing the full table.
/// The visitor borrows each block; large 3D systems stay within one block of
/// scratch memory.
pub fn analyze_each<T: Scalar>(
    sys: &ShearletSystem<T>,
    f: &SampledField<T>,
    mut visit: impl FnMut(usize, &TileSpec<T>, &[T]),
) -> Result<()> {
    check_grid(sys, f)?;
    let spec = sys.fft.forward(f);
    let mut coeffs: Vec<T> = Vec::new();
    for (ti, t) in sys.tiles.iter().enumerate() {
        let mut block = Spectrum::zeros(&t.n_t[..sys.d]);
        sys.sweep_tile(t, |g, nu, v| block.data[nu] += spec.data[g] * v);
        sys.fft.transform_nd(&mut block, false);
        coeffs.clear();
        coeffs.extend(block.data.iter().map(|z| z.re * t.weight));
        visit(ti, t, &coeffs);
    }
    Ok(())
}

/// All shearlet coefficients of a field.
pub fn analyze<T: Scalar>(sys: &ShearletSystem<T>, f: &SampledField<T>) -> Result<CoeffTable<T>> {
    let mut blocks = Vec::with_capacity(sys.tiles.len());
    analyze_each(sys, f, |_ti, _t, c| blocks.push(c.to_vec()))?;
    Ok(CoeffTable { blocks })
}

/// Σ_λ c_λ ψ_λ on the grid: the exact adjoint of `analyze`.
pub fn synthesize<T: Scalar>(
    sys: &ShearletSystem<T>,
    table: &CoeffTable<T>,
) -> Result<SampledField<T>> {
    if table.blocks.len() != sys.tiles.len()
        || table.blocks.iter().zip(&sys.tiles).any(|(b, t)| b.len() != t.block_len())
    {
        return Err(ShearletError::UnknownIndex(
            "coefficient table does not match the system's tile layout".to_string(),
        ));
    }
    let mut ghat = Spectrum::zeros(&sys.dims());
    for (t, vals) in sys.tiles.iter().zip(&table.blocks) {
        if vals.iter().all(|v| *v == T::zero()) {
            continue;
        }
        scatter_tile(sys, t, vals, &mut ghat);
    }
    sys.fft.backward_real(&ghat)
}

/// Synthesis restricted to an explicit entry list (n-term reconstructions
/// touch only the tiles that hold selected coefficients).
pub fn synthesize_selected<T: Scalar>(
    sys: &ShearletSystem<T>,
    entries: &[(usize, usize, T)],
) -> Result<SampledField<T>> {
    for &(ti, fl, _) in entries {
        if ti >= sys.tiles.len() || fl >= sys.tiles[ti].block_len() {
            return Err(ShearletError::UnknownIndex(format!(
                "entry (tile {ti}, offset {fl}) outside the system"
            )));
        }
    }
    let mut sorted: Vec<&(usize, usize, T)> = entries.iter().collect();
    sorted.sort_by_key(|e| (e.0, e.1));
    let mut ghat = Spectrum::zeros(&sys.dims());
    let mut vals: Vec<T> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let ti = sorted[i].0;
        let t = &sys.tiles[ti];
        vals.clear();
        vals.resize(t.block_len(), T::zero());
        while i < sorted.len() && sorted[i].0 == ti {
            vals[sorted[i].1] += sorted[i].2;
            i += 1;
        }
        scatter_tile(sys, t, &vals, &mut ghat);
    }
    sys.fft.backward_real(&ghat)
}

fn scatter_tile<T: Scalar>(
    sys: &ShearletSystem<T>,
    t: &TileSpec<T>,
    vals: &[T],
    ghat: &mut Spectrum<T>,
) {
    let mut block = Spectrum::zeros(&t.n_t[..sys.d]);
    for (z, &v) in block.data.iter_mut().zip(vals) {
        *z = Complex::new(v, T::zero());
    }
    sys.fft.transform_nd(&mut block, true);
    sys.sweep_tile(t, |g, nu, v| ghat.data[g] += block.data[nu] * (v * t.weight));
}

/// Spatial atom sampler. Band-limited atoms come straight from their grid
/// spectrum. Compact atoms are sampled through continuum profile tables
/// (computed from the exact generator transform, not the system's digital
/// filter table), giving a route independent of the frequency-domain
/// transforms.
pub struct SpatialSampler<T: Scalar> {
    profiles: Option<Profiles<T>>,
}

struct Profiles<T> {
    step_inv: f64,
    low: Vec<T>,
    band: Vec<T>,
    cross: Vec<T>,
}

impl<T: Scalar> Profiles<T> {
    #[inline]
    fn eval(table: &[T], step_inv: f64, t: f64) -> T {
        let x = t.abs() * step_inv;
        let i = x as usize;
        if i + 1 >= table.len() {
            return T::zero();
        }
        let frac = T::from_f64_lossy(x - i as f64);
        table[i] + frac * (table[i + 1] - table[i])
    }
}

/// Half width of the frequency window used when tabulating atom profiles.
const PROFILE_FREQ_HALF: f64 = 256.0;
/// Frequency sampling density of the profile quadrature.
const PROFILE_FREQ_RES: f64 = 8192.0;
/// Spatial reach of the tabulated profiles; atoms decay polynomially, so the
/// tail beyond this is below the quadrature tolerance for the orders in use.
const PROFILE_TIME_MAX: f64 = 200.0;

impl<T: Scalar> SpatialSampler<T> {
    pub fn new(sys: &ShearletSystem<T>) -> Result<Self> {
        let Generator::Compact(c) = &sys.generator else {
            return Ok(SpatialSampler { profiles: None });
        };
        // g(t) = ∫ F(w) e^{2πiwt} dw discretized at spacing 1/PROFILE_FREQ_RES
        // on |w| < PROFILE_FREQ_HALF: one long transform per profile gives g
        // on a t-grid of spacing 1/(2·PROFILE_FREQ_HALF). Discretization
        // periodizes g at period PROFILE_FREQ_RES, far beyond the kept range.
        let m = (2.0 * PROFILE_FREQ_HALF * PROFILE_FREQ_RES) as usize;
        let kept = (PROFILE_TIME_MAX * 2.0 * PROFILE_FREQ_HALF) as usize;
        let delta = 1.0 / PROFILE_FREQ_RES;
        let run = |f: &dyn Fn(f64) -> T| -> Vec<T> {
            let mut spec = Spectrum::zeros(&[m]);
            for i in 0..m {
                let w = (i as f64 - m as f64 / 2.0) * delta;
                let v = f(w);
                if v != T::zero() {
                    spec.data[i] = Complex::new(v, T::zero());
                }
            }
            sys.fft.transform_nd(&mut spec, false);
            let d = T::from_f64_lossy(delta);
            (0..kept)
                .map(|i| {
                    let sign = if i % 2 == 0 { T::one() } else { -T::one() };
                    spec.data[i].re * d * sign
                })
                .collect()
        };
        let low = run(&|w| c.scaling_hat(T::from_f64_lossy(w)));
        let band = run(&|w| {
            c.bandpass_abs(T::from_f64_lossy(4.0 * w)) * c.scaling_hat(T::from_f64_lossy(w))
        });
        let cross = run(&|w| c.scaling_hat(T::from_f64_lossy(2.0 * w)));
        Ok(SpatialSampler {
            profiles: Some(Profiles { step_inv: 2.0 * PROFILE_FREQ_HALF, low, band, cross }),
        })
    }

    /// Resolution bound: scale j needs the generator band inside the Nyquist
    /// box (and at least four cells across the short support direction).
    pub fn required_grid(sys: &ShearletSystem<T>, j: u32) -> usize {
        4.max(2 * sys.base_freq) << j
    }

    /// Grid samples of one atom.
    pub fn atom(&self, sys: &ShearletSystem<T>, idx: &ShearletIndex) -> Result<SampledField<T>> {
        let (ti, fl) = sys.entry_of(idx)?;
        let t = &sys.tiles[ti];
        let needed = Self::required_grid(sys, t.j);
        if matches!(t.kind, TileKind::Directional) && needed > sys.n {
            return Err(ShearletError::UnderResolved { j: t.j, n: sys.n, needed });
        }
        let Some(p) = &self.profiles else {
            return sys.fft.backward_real(&sys.atom_spectrum(ti, fl));
        };

        let n = sys.n;
        let a = t.counter(fl);
        let pos = t.position(&a, n);
        let beta = sys.base_freq as f64;
        let d = sys.d;
        let wrap = |i: usize, c: usize| -> f64 {
            (((i + n) - c + n / 2) % n) as f64 / n as f64 - 0.5
        };
        let scale = t.weight.to_f64_lossy() * beta.powi(d as i32);

        match t.kind {
            TileKind::CoarseSeparable => field_by_index(&sys.dims(), |coords| {
                let mut val = scale;
                for (axis, &i) in coords.iter().enumerate() {
                    let dx = wrap(i, pos[axis]);
                    val *= Profiles::eval(&p.low, p.step_inv, beta * dx).to_f64_lossy();
                }
                T::from_f64_lossy(val)
            }),
            TileKind::Directional => {
                let sj = 2f64.powi(t.j as i32);
                let sj2 = 2f64.powf(t.j as f64 / 2.0);
                let det_scale = scale * sj.powf((d as f64 + 1.0) / 2.0);
                let cross_axes: Vec<usize> = (0..d).filter(|&ax| ax != t.dom).collect();
                field_by_index(&sys.dims(), |coords| {
                    let mut arg_dom = sj * wrap(coords[t.dom], pos[t.dom]);
                    let mut val = det_scale;
                    for (ci, &ax) in cross_axes.iter().enumerate() {
                        let dx = wrap(coords[ax], pos[ax]);
                        arg_dom += t.k[ci] as f64 * sj2 * dx;
                        val *=
                            Profiles::eval(&p.cross, p.step_inv, beta * sj2 * dx).to_f64_lossy();
                    }
                    val *= Profiles::eval(&p.band, p.step_inv, beta * arg_dom).to_f64_lossy();
                    T::from_f64_lossy(val)
                })
            }
            TileKind::CoarseGrid(_) => unreachable!("grid coarse tiles are band-limited"),
        }
    }
}

/// Grid samples of one atom through the spatial route.
pub fn sample_spatial<T: Scalar>(
    sys: &ShearletSystem<T>,
    idx: &ShearletIndex,
) -> Result<SampledField<T>> {
    SpatialSampler::new(sys)?.atom(sys, idx)
}

/// Quadrature oracle: cell-weighted Riemann sum of f against the spatially
/// sampled atom. Independent of the frequency-domain analysis path.
pub fn direct_inner_product<T: Scalar>(
    sys: &ShearletSystem<T>,
    f: &SampledField<T>,
    idx: &ShearletIndex,
) -> Result<T> {
    check_grid(sys, f)?;
    let atom = sample_spatial(sys, idx)?;
    f.inner(&atom)
}

/// Same oracle with a prebuilt sampler (profile tables are costly to build).
pub fn direct_inner_product_with<T: Scalar>(
    sampler: &SpatialSampler<T>,
    sys: &ShearletSystem<T>,
    f: &SampledField<T>,
    idx: &ShearletIndex,
) -> Result<T> {
    check_grid(sys, f)?;
    let atom = sampler.atom(sys, idx)?;
    f.inner(&atom)
}
