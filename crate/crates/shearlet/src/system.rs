//! Digital shearlet systems on periodic grids.
//!
//! A system is a set of frequency tiles. A directional tile carries a scaled,
//! sheared copy of the generator profile sampled on the integer frequency box
//! together with a matching sheared translation sublattice; the coarse tile
//! carries the low-pass remainder. Atoms are normalized so that the frame
//! operator's diagonal equals the tile potential, which lets analysis,
//! synthesis, and operator application all ride one shared support sweep.
//!
//! Conventions: grid [0,1)^d with n samples per axis, calibrated spectra
//! (forward transform scaled by the cell volume, so the grid inner product
//! equals the plain spectral inner product). The atom of tile t at translate
//! counter a has spectrum w_t · P_t(κ) · e^{-2πi κ·p(a)/n}, with P_t the real
//! tile filter, p(a) the sheared integer lattice position, and
//! w_t = (Π n_t)^{-1/2}. Coefficients of real fields are real.

use crate::error::{Result, ShearletError};
use crate::fft::{FftCtx, Spectrum};
use crate::generators::{BandlimitedSpec, Generator};
use crate::lattice::{shear_range, LatticeSpec, PyramidTag, ShearletIndex};
use crate::scalar::Scalar;
use num_complex::Complex;
use std::collections::BTreeMap;

/// Relative threshold below which compact-profile tails are truncated when
/// scanning tile supports. Dropped spectral mass is quadratically smaller.
const SUPPORT_TOL: f64 = 1e-12;

/// Build parameters for a digital system.
#[derive(Clone, Debug)]
pub struct SystemSpec<T> {
    pub d: usize,
    pub n: usize,
    pub generator: Generator<T>,
    pub lattice: LatticeSpec<T>,
    /// Cap on the scale ladder; defaults to log2(n) − 1, the largest scale
    /// whose band still reaches into the grid.
    pub j_max: Option<u32>,
}

impl<T: Scalar> SystemSpec<T> {
    pub fn new(d: usize, n: usize, generator: Generator<T>, lattice: LatticeSpec<T>) -> Self {
        SystemSpec { d, n, generator, lattice, j_max: None }
    }

    pub fn with_j_max(mut self, j_max: u32) -> Self {
        self.j_max = Some(j_max);
        self
    }
}

/// How a tile's filter values are produced during the sweep.
#[derive(Clone, Debug)]
pub enum TileKind<T> {
    /// Band-pass profile along the dominant axis, cross profiles across.
    Directional,
    /// Separable low-pass product over all axes (compact generator).
    CoarseSeparable,
    /// Explicit sparse grid values (band-limited low-pass complement).
    CoarseGrid(Vec<(u32, T)>),
}

/// Frequency window of one non-dominant axis, linear in the dominant
/// frequency: center = center_rate·κ_dom, half width = hw_abs + hw_rate·|κ_dom|,
/// filter argument u = u_scale·κ_b + u_off_rate·κ_dom.
#[derive(Clone, Debug)]
pub struct CrossWin {
    pub axis: usize,
    pub center_rate: f64,
    pub hw_abs: f64,
    pub hw_rate: f64,
    pub u_scale: f64,
    pub u_off_rate: f64,
    /// Cone membership clip: Some(true) keeps |κ_b| ≤ |κ_dom|, Some(false)
    /// keeps the strict inequality, None disables the clip.
    pub chi_inclusive: Option<bool>,
}

/// One frequency tile with its translation sublattice.
#[derive(Clone, Debug)]
pub struct TileSpec<T> {
    pub pyramid: PyramidTag,
    pub j: u32,
    pub k: [i32; 2],
    pub kind: TileKind<T>,
    /// Dominant grid axis.
    pub dom: usize,
    /// Translate counts per grid axis (power-of-two divisors of n; inactive
    /// axes hold 1).
    pub n_t: [usize; 3],
    /// Cell steps n / n_t.
    pub step: [usize; 3],
    /// Integer skew rates: the dominant position gains skew[b]·(a_b·step b)
    /// per cross axis, keeping translates aligned with the shear.
    pub skew: [i64; 3],
    /// Atom normalization (Π n_t)^{-1/2}.
    pub weight: T,
    /// True when the lattice is the full grid (tile acts diagonally).
    pub full: bool,
    /// Dominant-axis frequencies with non-negligible profile, ascending.
    pub dom_freqs: Vec<i32>,
    pub dom_vals: Vec<T>,
    pub cross: Vec<CrossWin>,
    /// Patch entries (flat grid index, fold bin, value) for support points on
    /// the Nyquist shell, each averaged with its grid mirror; sorted by flat.
    pub shell: Vec<(u32, u32, T)>,
}

impl<T: Scalar> TileSpec<T> {
    pub fn block_len(&self) -> usize {
        self.n_t[0] * self.n_t[1] * self.n_t[2]
    }

    /// Grid position (cells) of translate counter a.
    pub fn position(&self, a: &[usize; 3], n: usize) -> [usize; 3] {
        let mut p = [0usize; 3];
        let mut dom_pos = (a[self.dom] * self.step[self.dom]) as i64;
        for axis in 0..3 {
            if axis != self.dom {
                p[axis] = a[axis] * self.step[axis];
                dom_pos += self.skew[axis] * p[axis] as i64;
            }
        }
        p[self.dom] = dom_pos.rem_euclid(n as i64) as usize;
        p
    }

    /// C-order decode of a flat block offset into the translate counter.
    pub fn counter(&self, mut flat: usize) -> [usize; 3] {
        let mut a = [0usize; 3];
        for axis in (0..3).rev() {
            a[axis] = flat % self.n_t[axis];
            flat /= self.n_t[axis];
        }
        a
    }

    pub fn counter_flat(&self, a: &[usize; 3]) -> usize {
        (a[0] * self.n_t[1] + a[1]) * self.n_t[2] + a[2]
    }
}

/// Lookup table for the compact scaling profile |φ̂|, uniform on [0, R].
/// The table is the definition of the digital filter: every consumer of
/// compact tile values reads it, so all transform paths agree exactly.
#[derive(Clone, Debug)]
struct SymbolTable<T> {
    step_inv: f64,
    vals: Vec<T>,
}

impl<T: Scalar> SymbolTable<T> {
    const PTS_PER_UNIT: usize = 4096;

    fn build(gen: &Generator<T>, range: f64) -> Option<Self> {
        let Generator::Compact(c) = gen else { return None };
        let len = (range * Self::PTS_PER_UNIT as f64).ceil() as usize + 2;
        let vals = (0..len)
            .map(|i| c.scaling_hat(T::from_f64_lossy(i as f64 / Self::PTS_PER_UNIT as f64)))
            .collect();
        Some(SymbolTable { step_inv: Self::PTS_PER_UNIT as f64, vals })
    }

    #[inline]
    fn eval(&self, x: f64) -> T {
        let t = x.abs() * self.step_inv;
        let i = t as usize;
        if i + 1 >= self.vals.len() {
            return T::zero();
        }
        let frac = T::from_f64_lossy(t - i as f64);
        self.vals[i] + frac * (self.vals[i + 1] - self.vals[i])
    }

    /// Largest argument with a value above the relative support threshold.
    fn support_end(&self) -> f64 {
        let tol = T::from_f64_lossy(SUPPORT_TOL);
        let last = self.vals.iter().rposition(|v| v.abs() >= tol).unwrap_or(0);
        (last + 1) as f64 / self.step_inv
    }
}

/// A built digital system: tiles, their shared potential, and the fused
/// diagonal of all fully sampled tiles.
pub struct ShearletSystem<T: Scalar> {
    pub d: usize,
    pub n: usize,
    pub base_freq: usize,
    pub j_eff: u32,
    pub generator: Generator<T>,
    pub lattice: LatticeSpec<T>,
    /// Coarse tile first, then directional tiles in canonical order.
    pub tiles: Vec<TileSpec<T>>,
    tile_by_key: BTreeMap<(PyramidTag, u32, [i32; 2]), usize>,
    /// Σ_t P_t² on the grid: the frame-operator diagonal symbol.
    pub potential_grid: Vec<T>,
    /// Σ over fully sampled tiles of P_t²; those tiles act diagonally and are
    /// applied in one fused pass.
    fused_diag: Vec<T>,
    table: Option<SymbolTable<T>>,
    pub fft: FftCtx<T>,
}

fn pow2round(x: f64) -> usize {
    if x <= 1.0 {
        1
    } else {
        1usize << (x.log2().round() as u32)
    }
}

fn pow2ceil(x: f64) -> usize {
    if x <= 1.0 {
        1
    } else {
        (x.ceil() as usize).next_power_of_two()
    }
}

impl<T: Scalar> ShearletSystem<T> {
    pub fn build(spec: SystemSpec<T>) -> Result<Self> {
        let SystemSpec { d, n, generator, lattice, j_max } = spec;
        if d != 2 && d != 3 {
            return Err(ShearletError::invalid(format!("dimension must be 2 or 3, got {d}")));
        }
        let base_freq = generator.default_base_freq() as usize;
        if !n.is_power_of_two() || n < 2 * base_freq || n < 8 {
            return Err(ShearletError::invalid(format!(
                "grid must be a power of two with n >= max(8, {}), got {n}",
                2 * base_freq
            )));
        }
        let j_cap = n.trailing_zeros() - 1;
        let j_eff = match j_max {
            None => j_cap,
            Some(j) if j <= j_cap => j,
            Some(j) => {
                return Err(ShearletError::UnderResolved { j, n, needed: (2usize << j) * 2 })
            }
        };

        let table = SymbolTable::build(&generator, 2.0 * n as f64 / base_freq as f64 + 2.0);
        let mut sys = ShearletSystem {
            d,
            n,
            base_freq,
            j_eff,
            generator,
            lattice,
            tiles: Vec::new(),
            tile_by_key: BTreeMap::new(),
            potential_grid: Vec::new(),
            fused_diag: Vec::new(),
            table,
            fft: FftCtx::new(),
        };

        let mut tiles = Vec::new();
        for pyr in PyramidTag::directional(d) {
            for j in 0..=j_eff {
                for k in shear_range(d, j) {
                    tiles.push(sys.build_directional_tile(*pyr, j, k)?);
                }
            }
        }

        // Directional potential first: the band-limited coarse tile is its
        // pointwise complement.
        let vol = n.pow(d as u32);
        let mut pot = vec![T::zero(); vol];
        for t in &tiles {
            sys.sweep_tile(t, |flat, _nu, v| pot[flat] += v * v);
        }
        let coarse = match &sys.generator {
            Generator::Compact(_) => sys.build_coarse_separable()?,
            Generator::Bandlimited(_) => sys.build_coarse_complement(&pot)?,
        };
        sys.sweep_tile(&coarse, |flat, _nu, v| pot[flat] += v * v);
        tiles.insert(0, coarse);

        let mut fused = vec![T::zero(); vol];
        for t in &tiles {
            if t.full {
                sys.sweep_tile(t, |flat, _nu, v| fused[flat] += v * v);
            }
        }

        for (i, t) in tiles.iter().enumerate() {
            let key = (t.pyramid, t.j, t.k);
            sys.tile_by_key.insert(key, i);
        }
        sys.tiles = tiles;
        sys.potential_grid = pot;
        sys.fused_diag = fused;
        Ok(sys)
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.n; self.d]
    }

    fn grid_strides(&self) -> [usize; 3] {
        if self.d == 2 {
            [self.n, 1, 1]
        } else {
            [self.n * self.n, self.n, 1]
        }
    }

    fn nu_strides(t: &TileSpec<T>) -> [usize; 3] {
        [t.n_t[1] * t.n_t[2], t.n_t[2], 1]
    }

    fn c1(&self) -> f64 {
        self.lattice.c1.to_f64_lossy()
    }

    /// Largest raw frequency index the separable sweep loops emit. The row
    /// −n/2 is excluded here and carried by the shell patches instead, so
    /// every sweep entry set is even under κ ↦ −κ on the periodized grid.
    fn sweep_freq_cap(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    fn c2(&self) -> f64 {
        self.lattice.c2.to_f64_lossy()
    }

    /// Translate counts with the power-of-two digitization of the continuum
    /// densities; band-limited tiles are floored at their alias-free counts
    /// (their exact band support makes the floor available and keeps every
    /// admissible lattice invertible).
    fn translate_counts(&self, j: u32, dom: usize) -> [usize; 3] {
        let beta = self.base_freq as f64;
        let sj = 2f64.powi(j as i32);
        let sj2 = 2f64.powf(j as f64 / 2.0);
        let bl = matches!(self.generator, Generator::Bandlimited(_));
        let mut n_t = [1usize; 3];
        for axis in 0..self.d {
            let want = if axis == dom { beta * sj / self.c1() } else { beta * sj2 / self.c2() };
            let mut count = pow2round(want);
            if bl {
                let floor = if axis == dom { 4.0 * beta * sj } else { 2.0 * beta * sj2 };
                count = count.max(pow2ceil(floor));
            }
            n_t[axis] = count.min(self.n);
        }
        n_t
    }

    fn finish_tile(
        &self,
        pyramid: PyramidTag,
        j: u32,
        k: [i32; 2],
        kind: TileKind<T>,
        dom: usize,
        n_t: [usize; 3],
        skew: [i64; 3],
        dom_freqs: Vec<i32>,
        dom_vals: Vec<T>,
        cross: Vec<CrossWin>,
    ) -> TileSpec<T> {
        let step = [self.n / n_t[0], self.n / n_t[1], self.n / n_t[2]];
        let active: usize = n_t.iter().take(self.d).product();
        let weight = T::one() / T::from_usize_lossy(active).sqrt();
        let full = n_t.iter().take(self.d).all(|&c| c == self.n);
        let mut t = TileSpec {
            pyramid,
            j,
            k,
            kind,
            dom,
            n_t,
            step,
            skew,
            weight,
            full,
            dom_freqs,
            dom_vals,
            cross,
            shell: Vec::new(),
        };
        self.attach_shell(&mut t);
        t
    }

    /// Windows are separable over one period of raw frequencies, but the row
    /// −n/2 has no mirror on the grid, so a sheared window is not even there
    /// and a real field would analyze to complex coefficients. Every support
    /// point with a Nyquist coordinate is therefore re-emitted as a patch
    /// entry averaged with its grid mirror, which restores evenness under
    /// κ ↦ −κ on the periodized grid while keeping the shell covered.
    fn attach_shell(&self, t: &mut TileSpec<T>) {
        if matches!(t.kind, TileKind::CoarseGrid(_)) {
            // Complement entries come from the already symmetrized potential.
            return;
        }
        let n = self.n as i64;
        let half = n / 2;
        let strides = self.grid_strides();
        let nu_strides = Self::nu_strides(t);
        let two = T::one() + T::one();
        let mut shell = Vec::new();
        let mut kappa = [0i64; 3];
        let mut mirror = [0i64; 3];
        // Enumerate each shell point once via its first Nyquist axis.
        let mut visit = |kappa: &[i64; 3], shell: &mut Vec<(u32, u32, T)>| {
            let v = self.separable_value(t, kappa);
            for axis in 0..self.d {
                mirror[axis] = if kappa[axis] == -half { -half } else { -kappa[axis] };
            }
            // Self-paired points keep their value. Paired combinations are
            // normalized per generator: band-limited windows average (the
            // shell potential must stay at most 1 for the complement tile to
            // restore an exact partition), compact windows fold with the
            // unitary 1/√2 weight so the shell potential keeps its unpaired
            // level and the lower frame bound survives the symmetrization.
            let w = if mirror == *kappa {
                v
            } else {
                let s = v + self.separable_value(t, &mirror);
                match self.generator {
                    Generator::Bandlimited(_) => s / two,
                    Generator::Compact(_) => s / two.sqrt(),
                }
            };
            if w == T::zero() {
                return;
            }
            let mut flat = 0usize;
            let mut nu = 0usize;
            let kd = kappa[t.dom];
            for axis in 0..self.d {
                flat += (kappa[axis].rem_euclid(n) as usize) * strides[axis];
            }
            nu += (kd.rem_euclid(t.n_t[t.dom] as i64) as usize) * nu_strides[t.dom];
            for cw in &t.cross {
                let folded = (kappa[cw.axis] + t.skew[cw.axis] * kd).rem_euclid(t.n_t[cw.axis] as i64);
                nu += folded as usize * nu_strides[cw.axis];
            }
            shell.push((flat as u32, nu as u32, w));
        };
        for a in 0..self.d {
            kappa[a] = -half;
            // Axes before `a` exclude −n/2 (those points belong to an earlier
            // plane); axes after it range over the full period.
            let others: Vec<usize> = (0..self.d).filter(|&ax| ax != a).collect();
            let ranges: Vec<(i64, i64)> = others
                .iter()
                .map(|&ax| if ax < a { (-half + 1, half - 1) } else { (-half, half - 1) })
                .collect();
            match others.len() {
                0 => visit(&kappa, &mut shell),
                1 => {
                    for b in ranges[0].0..=ranges[0].1 {
                        kappa[others[0]] = b;
                        visit(&kappa, &mut shell);
                    }
                }
                _ => {
                    for b in ranges[0].0..=ranges[0].1 {
                        kappa[others[0]] = b;
                        for c in ranges[1].0..=ranges[1].1 {
                            kappa[others[1]] = c;
                            visit(&kappa, &mut shell);
                        }
                    }
                }
            }
            kappa = [0i64; 3];
        }
        shell.sort_unstable_by_key(|e| e.0);
        t.shell = shell;
    }

    fn build_directional_tile(&self, pyramid: PyramidTag, j: u32, k: [i32; 2]) -> Result<TileSpec<T>> {
        let dom = pyramid.dominant_axis().ok_or_else(|| {
            ShearletError::invalid("directional tile needs a directional pyramid".to_string())
        })?;
        let beta = self.base_freq as f64;
        let sj = 2f64.powi(j as i32);
        let sj2 = 2f64.powf(j as f64 / 2.0);
        let n_t = self.translate_counts(j, dom);

        let half = self.n as i64 / 2;
        let (mut dom_freqs, mut dom_vals) = (Vec::new(), Vec::new());
        match &self.generator {
            Generator::Bandlimited(b) => {
                for kd in -half..half {
                    let u = kd as f64 / (beta * sj);
                    if u.abs() >= 0.5 && u.abs() <= 2.0 {
                        dom_freqs.push(kd as i32);
                        dom_vals.push(b.psi1_hat(T::from_f64_lossy(u)));
                    }
                }
            }
            Generator::Compact(c) => {
                let table = self.table.as_ref().expect("compact systems carry a symbol table");
                let vals: Vec<T> = (-half..half)
                    .map(|kd| {
                        let u = kd as f64 / (beta * sj);
                        c.bandpass_abs(T::from_f64_lossy(4.0 * u)) * table.eval(u)
                    })
                    .collect();
                let peak = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                let tol = peak * T::from_f64_lossy(SUPPORT_TOL);
                for (i, &v) in vals.iter().enumerate() {
                    if v.abs() > tol {
                        dom_freqs.push((i as i64 - half) as i32);
                        dom_vals.push(v);
                    }
                }
            }
        }

        let bl = matches!(self.generator, Generator::Bandlimited(_));
        let u2max = self.table.as_ref().map(|t| t.support_end() / 2.0).unwrap_or(0.0);
        let cross_axes: Vec<usize> = (0..self.d).filter(|&a| a != dom).collect();
        let mut cross = Vec::with_capacity(cross_axes.len());
        let mut skew = [0i64; 3];
        for (ci, &axis) in cross_axes.iter().enumerate() {
            let kk = k[ci] as f64;
            skew[axis] = (-kk / sj2).round() as i64;
            let chi = if bl {
                // Cone priority: earlier pyramids win ties.
                Some(pyramid.dominant_axis().unwrap() < axis || pyramid == PyramidTag::P1)
            } else {
                None
            };
            cross.push(CrossWin {
                axis,
                center_rate: kk / sj2,
                hw_abs: if bl { 0.0 } else { beta * sj2 * u2max },
                hw_rate: if bl { 1.0 / sj2 } else { 0.0 },
                u_scale: 1.0 / (sj2 * beta),
                u_off_rate: -kk / (sj * beta),
                chi_inclusive: chi,
            });
        }

        Ok(self.finish_tile(pyramid, j, k, TileKind::Directional, dom, n_t, skew, dom_freqs, dom_vals, cross))
    }

    fn build_coarse_separable(&self) -> Result<TileSpec<T>> {
        let table = self.table.as_ref().expect("compact systems carry a symbol table");
        let beta = self.base_freq as f64;
        let count = pow2round(beta / self.c1()).min(self.n);
        let n_t = {
            let mut c = [1usize; 3];
            c[..self.d].fill(count);
            c
        };
        let half = self.n as i64 / 2;
        let (mut dom_freqs, mut dom_vals) = (Vec::new(), Vec::new());
        let hw = (beta * table.support_end()).min(half as f64);
        for kd in -half..half {
            let v = table.eval(kd as f64 / beta);
            if v.abs() > T::from_f64_lossy(SUPPORT_TOL) {
                dom_freqs.push(kd as i32);
                dom_vals.push(v);
            }
        }
        let cross = (1..self.d)
            .map(|axis| CrossWin {
                axis,
                center_rate: 0.0,
                hw_abs: hw,
                hw_rate: 0.0,
                u_scale: 1.0 / beta,
                u_off_rate: 0.0,
                chi_inclusive: None,
            })
            .collect();
        Ok(self.finish_tile(
            PyramidTag::Cube,
            0,
            [0, 0],
            TileKind::CoarseSeparable,
            0,
            n_t,
            [0; 3],
            dom_freqs,
            dom_vals,
            cross,
        ))
    }

    /// Band-limited coarse tile: pointwise complement of the directional
    /// potential. With the default scale ladder this collapses to the DC bin.
    fn build_coarse_complement(&self, pot: &[T]) -> Result<TileSpec<T>> {
        // Threshold the complement energy, not its amplitude: the directional
        // partition leaves O(eps) float dust whose square root would
        // otherwise pollute the support.
        let tol = T::from_f64_lossy(SUPPORT_TOL);
        let mut entries = Vec::new();
        let mut extent = [0i64; 3];
        let strides = self.grid_strides();
        for (flat, &p) in pot.iter().enumerate() {
            let gap = (T::one() - p).max(T::zero());
            if gap > tol {
                let v = gap.sqrt();
                entries.push((flat as u32, v));
                for axis in 0..self.d {
                    let idx = (flat / strides[axis]) % self.n;
                    extent[axis] = extent[axis].max(Spectrum::<T>::freq(idx, self.n).abs());
                }
            }
        }
        let mut n_t = [1usize; 3];
        for axis in 0..self.d {
            n_t[axis] = pow2ceil((2 * extent[axis] + 1) as f64).min(self.n);
        }
        Ok(self.finish_tile(
            PyramidTag::Cube,
            0,
            [0, 0],
            TileKind::CoarseGrid(entries),
            0,
            n_t,
            [0; 3],
            Vec::new(),
            Vec::new(),
            Vec::new(),
        ))
    }

    /// Visit every grid frequency where the tile filter is non-negligible.
    /// The callback receives the flat grid index, the flat fold-bin index of
    /// the tile's coefficient block, and the filter value. Every transform
    /// path in the crate uses this one sweep, so they agree by construction.
    pub fn sweep_tile(&self, t: &TileSpec<T>, mut f: impl FnMut(usize, usize, T)) {
        let n = self.n as i64;
        let strides = self.grid_strides();
        let nu_strides = Self::nu_strides(t);

        if let TileKind::CoarseGrid(entries) = &t.kind {
            for &(flat, v) in entries {
                let mut nu = 0usize;
                for axis in 0..self.d {
                    let idx = (flat as usize / strides[axis]) % self.n;
                    let kap = Spectrum::<T>::freq(idx, self.n);
                    nu += (kap.rem_euclid(t.n_t[axis] as i64) as usize) * nu_strides[axis];
                }
                f(flat as usize, nu, v);
            }
            return;
        }

        let bl_dir = matches!(
            (&self.generator, &t.kind),
            (Generator::Bandlimited(_), TileKind::Directional)
        );
        let bl_spec: Option<&BandlimitedSpec<T>> = match &self.generator {
            Generator::Bandlimited(b) => Some(b),
            Generator::Compact(_) => None,
        };
        let coarse = matches!(t.kind, TileKind::CoarseSeparable);
        let beta = self.base_freq as f64;
        let sj = 2f64.powi(t.j as i32);
        let cap = self.sweep_freq_cap();

        let dom_stride = strides[t.dom];
        let dom_nu_stride = nu_strides[t.dom];
        let nt_dom = t.n_t[t.dom] as i64;

        for (di, &kd32) in t.dom_freqs.iter().enumerate() {
            let kd = kd32 as i64;
            if kd < -cap {
                // Nyquist row: carried by the shell patches below.
                continue;
            }
            let f1 = t.dom_vals[di];
            let base = (kd.rem_euclid(n) as usize) * dom_stride;
            let nu_base = (kd.rem_euclid(nt_dom) as usize) * dom_nu_stride;
            let w1 = kd as f64 / (beta * sj);

            // Per-axis windows depend only on the dominant frequency.
            let mut wins: [(i64, i64); 2] = [(0, 0); 2];
            for (ci, cw) in t.cross.iter().enumerate() {
                let center = cw.center_rate * kd as f64;
                let hw = cw.hw_abs + cw.hw_rate * kd.abs() as f64;
                let mut lo = (center - hw).ceil() as i64;
                let mut hi = (center + hw).floor() as i64;
                match cw.chi_inclusive {
                    Some(true) => {
                        lo = lo.max(-kd.abs());
                        hi = hi.min(kd.abs());
                    }
                    Some(false) => {
                        lo = lo.max(-kd.abs() + 1);
                        hi = hi.min(kd.abs() - 1);
                    }
                    None => {}
                }
                wins[ci] = (lo.max(-cap), hi.min(cap));
            }

            let eval = |cw: &CrossWin, kb: i64| -> T {
                let u = cw.u_scale * kb as f64 + cw.u_off_rate * kd as f64;
                if bl_dir {
                    bl_spec.unwrap().psi2_hat(T::from_f64_lossy(u / w1))
                } else {
                    let table = self.table.as_ref().unwrap();
                    table.eval(if coarse { u } else { 2.0 * u })
                }
            };

            if self.d == 2 {
                let cw = &t.cross[0];
                let (lo, hi) = wins[0];
                self.cross_run(t, cw, lo, hi, kd, |kb, idx, nu| {
                    let v = f1 * eval(cw, kb);
                    f(base + idx * strides[cw.axis], nu_base + nu * nu_strides[cw.axis], v);
                });
            } else {
                let cw1 = &t.cross[0];
                let cw2 = &t.cross[1];
                let (lo2, hi2) = wins[1];
                self.cross_run(t, cw1, wins[0].0, wins[0].1, kd, |kb1, idx1, nu1| {
                    let f12 = f1 * eval(cw1, kb1);
                    if f12 == T::zero() {
                        return;
                    }
                    let base1 = base + idx1 * strides[cw1.axis];
                    let nu_base1 = nu_base + nu1 * nu_strides[cw1.axis];
                    self.cross_run(t, cw2, lo2, hi2, kd, |kb2, idx2, nu2| {
                        let v = f12 * eval(cw2, kb2);
                        f(base1 + idx2 * strides[cw2.axis], nu_base1 + nu2 * nu_strides[cw2.axis], v);
                    });
                });
            }
        }

        for &(g, nu, v) in &t.shell {
            f(g as usize, nu as usize, v);
        }
    }

    /// Iterate one cross-axis window over raw frequencies, yielding each
    /// frequency together with its periodized grid index and fold bin. Both
    /// indices step modularly, so windows wider than one period simply wrap.
    fn cross_run(
        &self,
        t: &TileSpec<T>,
        cw: &CrossWin,
        lo: i64,
        hi: i64,
        kd: i64,
        mut f: impl FnMut(i64, usize, usize),
    ) {
        if lo > hi {
            return;
        }
        let n = self.n as i64;
        let ntb = t.n_t[cw.axis] as i64;
        let skew = t.skew[cw.axis];
        let mut idx = lo.rem_euclid(n) as usize;
        let mut nu = (lo + skew * kd).rem_euclid(ntb) as usize;
        for kb in lo..=hi {
            f(kb, idx, nu);
            idx += 1;
            if idx == self.n {
                idx = 0;
            }
            nu += 1;
            if nu == ntb as usize {
                nu = 0;
            }
        }
    }

    /// Single-point filter evaluation (slow path for tests and per-atom ops).
    pub fn filter_value(&self, t: &TileSpec<T>, kappa: &[i64; 3]) -> T {
        match &t.kind {
            TileKind::CoarseGrid(entries) => {
                let strides = self.grid_strides();
                let mut flat = 0usize;
                for axis in 0..self.d {
                    flat += (kappa[axis].rem_euclid(self.n as i64) as usize) * strides[axis];
                }
                entries
                    .iter()
                    .find(|(fl, _)| *fl as usize == flat)
                    .map(|&(_, v)| v)
                    .unwrap_or(T::zero())
            }
            _ => {
                let half = self.n as i64 / 2;
                if kappa[..self.d].iter().any(|&k| k == -half) {
                    let strides = self.grid_strides();
                    let mut flat = 0usize;
                    for axis in 0..self.d {
                        flat += (kappa[axis].rem_euclid(self.n as i64) as usize) * strides[axis];
                    }
                    return match t.shell.binary_search_by_key(&(flat as u32), |e| e.0) {
                        Ok(i) => t.shell[i].2,
                        Err(_) => T::zero(),
                    };
                }
                self.separable_value(t, kappa)
            }
        }
    }

    /// Raw separable window value at a grid frequency, before the Nyquist
    /// shell symmetrization. Shared by `filter_value` and the shell builder.
    fn separable_value(&self, t: &TileSpec<T>, kappa: &[i64; 3]) -> T {
        let di = match t.dom_freqs.binary_search(&(kappa[t.dom] as i32)) {
            Ok(i) => i,
            Err(_) => return T::zero(),
        };
        let mut v = t.dom_vals[di];
        let kd = kappa[t.dom];
        let beta = self.base_freq as f64;
        let sj = 2f64.powi(t.j as i32);
        let w1 = kd as f64 / (beta * sj);
        for cw in &t.cross {
            let kb = kappa[cw.axis];
            let center = cw.center_rate * kd as f64;
            let hw = cw.hw_abs + cw.hw_rate * kd.abs() as f64;
            if (kb as f64) < (center - hw).ceil() || (kb as f64) > (center + hw).floor() {
                return T::zero();
            }
            match cw.chi_inclusive {
                Some(true) if kb.abs() > kd.abs() => return T::zero(),
                Some(false) if kb.abs() >= kd.abs() => return T::zero(),
                _ => {}
            }
            let u = cw.u_scale * kb as f64 + cw.u_off_rate * kd as f64;
            v = v * match (&self.generator, &t.kind) {
                (Generator::Bandlimited(b), _) => b.psi2_hat(T::from_f64_lossy(u / w1)),
                (Generator::Compact(_), TileKind::CoarseSeparable) => {
                    self.table.as_ref().unwrap().eval(u)
                }
                (Generator::Compact(_), _) => self.table.as_ref().unwrap().eval(2.0 * u),
            };
        }
        v
    }

    pub fn tile_index(&self, pyramid: PyramidTag, j: u32, k: [i32; 2]) -> Result<usize> {
        self.tile_by_key.get(&(pyramid, j, k)).copied().ok_or_else(|| {
            ShearletError::UnknownIndex(format!("no tile ({pyramid:?}, j={j}, k={k:?})"))
        })
    }

    /// Map a (tile, flat block offset) pair to its public index.
    pub fn index_of(&self, tile_idx: usize, flat: usize) -> ShearletIndex {
        let t = &self.tiles[tile_idx];
        let a = t.counter(flat);
        ShearletIndex {
            pyramid: t.pyramid,
            j: t.j,
            k: t.k,
            m: [a[0] as i32, a[1] as i32, a[2] as i32],
        }
    }

    /// Resolve a public index to (tile, flat block offset).
    pub fn entry_of(&self, idx: &ShearletIndex) -> Result<(usize, usize)> {
        let tile_idx = self.tile_index(idx.pyramid, idx.j, idx.k)?;
        let t = &self.tiles[tile_idx];
        let mut a = [0usize; 3];
        for axis in 0..3 {
            let m = idx.m[axis];
            if m < 0 || m as usize >= t.n_t[axis] {
                return Err(ShearletError::UnknownIndex(format!(
                    "translate counter {m} out of range for axis {axis} (count {})",
                    t.n_t[axis]
                )));
            }
            a[axis] = m as usize;
        }
        Ok((tile_idx, t.counter_flat(&a)))
    }

    /// Full calibrated spectrum of one atom.
    pub fn atom_spectrum(&self, tile_idx: usize, flat: usize) -> Spectrum<T> {
        let t = &self.tiles[tile_idx];
        let a = t.counter(flat);
        let p = t.position(&a, self.n);
        let mut spec = Spectrum::zeros(&self.dims());
        let strides = self.grid_strides();
        let two_pi = T::PI() + T::PI();
        let nf = T::from_usize_lossy(self.n);
        self.sweep_tile(t, |g, _nu, v| {
            let mut phase = T::zero();
            for axis in 0..self.d {
                let idx = (g / strides[axis]) % self.n;
                let kap = Spectrum::<T>::freq(idx, self.n);
                phase += T::from_f64_lossy(kap as f64) * T::from_usize_lossy(p[axis]);
            }
            let ang = -two_pi * phase / nf;
            spec.data[g] += Complex::new(ang.cos(), ang.sin()) * (t.weight * v);
        });
        spec
    }

    /// Frame operator on a calibrated spectrum: one fused diagonal pass for
    /// fully sampled tiles, then fold/unfold for the rest. No transforms are
    /// needed: the forward/inverse block DFTs cancel against the atom
    /// normalization, leaving pure gather/scatter.
    pub fn apply_frame_operator_spectrum(&self, input: &Spectrum<T>) -> Spectrum<T> {
        let mut out = Spectrum::zeros(&input.dims);
        for (o, (i, dgl)) in out.data.iter_mut().zip(input.data.iter().zip(&self.fused_diag)) {
            *o = i * *dgl;
        }
        let mut folded: Vec<Complex<T>> = Vec::new();
        for t in &self.tiles {
            if t.full {
                continue;
            }
            folded.clear();
            folded.resize(t.block_len(), Complex::new(T::zero(), T::zero()));
            self.sweep_tile(t, |g, nu, v| folded[nu] += input.data[g] * v);
            self.sweep_tile(t, |g, nu, v| out.data[g] += folded[nu] * v);
        }
        out
    }

    pub(crate) fn fused_diag(&self) -> &[T] {
        &self.fused_diag
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::CompactSpec;
    use crate::lattice::LatticeSpec;

    fn bl_system(n: usize, c: f64) -> ShearletSystem<f64> {
        let gen = Generator::Bandlimited(BandlimitedSpec::default());
        let lat = LatticeSpec::new(c, c).unwrap();
        ShearletSystem::build(SystemSpec::new(2, n, gen, lat)).unwrap()
    }

    fn compact_system(d: usize, n: usize, c1: f64, c2: f64) -> ShearletSystem<f64> {
        let gen = Generator::Compact(CompactSpec::relaxed(7, 4).unwrap());
        let lat = LatticeSpec::new(c1, c2).unwrap();
        ShearletSystem::build(SystemSpec::new(d, n, gen, lat)).unwrap()
    }

    #[test]
    fn bandlimited_partition_is_exact() {
        let sys = bl_system(32, 0.125);
        for (i, &p) in sys.potential_grid.iter().enumerate() {
            assert!((p - 1.0).abs() < 1e-12, "potential {p} at flat {i}");
        }
    }

    #[test]
    fn bandlimited_tile_census() {
        // Scales 0..=4 on n=32: per scale 2(2⌈2^{j/2}⌉+1) directional tiles.
        let sys = bl_system(32, 0.125);
        assert_eq!(sys.j_eff, 4);
        assert_eq!(sys.tiles.len(), 1 + 2 * (3 + 5 + 5 + 7 + 9));
        // Coarse complement holds the DC bin plus most of the two Nyquist
        // lines: averaging each shell window with its mirror shrinks the
        // directional potential there, except where window and mirror agree
        // (the axis points (−16, 0), (0, −16) and the self-paired corner).
        match &sys.tiles[0].kind {
            TileKind::CoarseGrid(entries) => {
                assert_eq!(entries.len(), 61);
                assert_eq!(entries[0].0, 0);
                assert!((entries[0].1 - 1.0).abs() < 1e-12);
                for &(flat, v) in &entries[1..] {
                    let (r, c) = (flat as usize / 32, flat as usize % 32);
                    assert!(r == 16 || c == 16, "unexpected gap at flat {flat}");
                    assert!(v > 0.0 && v < 1.0);
                    assert!(flat != 16 * 32 && flat != 16 && flat != 16 * 32 + 16);
                }
            }
            other => panic!("unexpected coarse kind: {other:?}"),
        }
    }

    #[test]
    fn translate_counts_frozen_cases() {
        let sys = bl_system(32, 0.125);
        let t = &sys.tiles[sys.tile_index(PyramidTag::P1, 2, [1, 0]).unwrap()];
        assert_eq!(t.n_t[..2], [32, 16]);
        assert_eq!(t.step[..2], [1, 2]);

        let cs = compact_system(2, 64, 0.9, 0.25);
        let t = &cs.tiles[cs.tile_index(PyramidTag::P1, 2, [0, 0]).unwrap()];
        // dom: round(8·4/0.9) → 32, cross: 8·2/0.25 = 64 exactly.
        assert_eq!(t.n_t[..2], [32, 64]);
        let coarse = &cs.tiles[0];
        assert_eq!(coarse.n_t[..2], [8, 8]);
    }

    #[test]
    fn skew_follows_shear() {
        let sys = bl_system(64, 0.125);
        let t = &sys.tiles[sys.tile_index(PyramidTag::P1, 4, [-3, 0]).unwrap()];
        // Rate −k·2^{-j/2} = 3/4 rounds to 1.
        assert_eq!(t.skew[1], 1);
        let t = &sys.tiles[sys.tile_index(PyramidTag::P1, 4, [1, 0]).unwrap()];
        assert_eq!(t.skew[1], 0); // −1/4 rounds to 0
        // Position wraps on the dominant axis.
        let p = t.position(&[0, 3, 0], 64);
        assert_eq!(p[1], 3 * t.step[1]);
    }

    #[test]
    fn sweep_matches_pointwise_filter() {
        for sys in [compact_system(2, 32, 0.9, 0.25), bl_system(32, 0.25)] {
            for t in &sys.tiles {
                let mut seen = std::collections::HashMap::new();
                sys.sweep_tile(t, |g, _nu, v| {
                    *seen.entry(g).or_insert(0.0) += v;
                });
                // Every visited value agrees with the single-point evaluation.
                for (&g, &v) in &seen {
                    let k0 = Spectrum::<f64>::freq(g / sys.n, sys.n);
                    let k1 = Spectrum::<f64>::freq(g % sys.n, sys.n);
                    let pv = sys.filter_value(t, &[k0, k1, 0]);
                    assert!(
                        (pv - v).abs() < 1e-12,
                        "tile ({:?}, {}, {:?}) at ({k0},{k1}): sweep {v} point {pv}",
                        t.pyramid,
                        t.j,
                        t.k
                    );
                }
            }
        }
    }

    #[test]
    fn windows_are_even_on_the_periodized_grid() {
        // Real fields analyze to real coefficients only if every tile window
        // satisfies W(−κ mod n) = W(κ); the shell patches restore this at the
        // unpaired Nyquist row. Also checks each point is visited once.
        let n = 32usize;
        for sys in [compact_system(2, n, 0.9, 0.25), bl_system(n, 0.25)] {
            let mut shell_active = false;
            for t in &sys.tiles {
                shell_active |= !t.shell.is_empty();
                let mut w = vec![f64::NAN; n * n];
                sys.sweep_tile(t, |g, _nu, v| {
                    assert!(w[g].is_nan(), "duplicate sweep visit at {g}");
                    w[g] = v;
                });
                for g in 0..n * n {
                    let (r, c) = (g / n, g % n);
                    let neg = ((n - r) % n) * n + (n - c) % n;
                    let a = if w[g].is_nan() { 0.0 } else { w[g] };
                    let b = if w[neg].is_nan() { 0.0 } else { w[neg] };
                    assert!(
                        (a - b).abs() < 1e-12,
                        "tile ({:?}, j={}, k={:?}): W({g})={a} vs W(-κ)={b}",
                        t.pyramid,
                        t.j,
                        t.k
                    );
                }
            }
            assert!(shell_active, "expected Nyquist shell patches at the top scale");
        }
    }

    #[test]
    fn fold_bins_are_consistent() {
        // ν must equal the componentwise fold of κ through the sheared
        // quotient map.
        let sys = bl_system(64, 0.125);
        for t in &sys.tiles {
            sys.sweep_tile(t, |g, nu, _v| {
                let k0 = Spectrum::<f64>::freq(g / 64, 64);
                let k1 = Spectrum::<f64>::freq(g % 64, 64);
                let kap = [k0, k1];
                let kd = kap[t.dom];
                let mut expect = [0usize; 3];
                if matches!(t.kind, TileKind::CoarseGrid(_)) {
                    for axis in 0..2 {
                        expect[axis] = kap[axis].rem_euclid(t.n_t[axis] as i64) as usize;
                    }
                } else {
                    expect[t.dom] = kd.rem_euclid(t.n_t[t.dom] as i64) as usize;
                    for cw in &t.cross {
                        expect[cw.axis] = (kap[cw.axis] + t.skew[cw.axis] * kd)
                            .rem_euclid(t.n_t[cw.axis] as i64) as usize;
                    }
                }
                let flat = (expect[0] * t.n_t[1] + expect[1]) * t.n_t[2] + expect[2];
                assert_eq!(
                    flat, nu,
                    "tile ({:?}, j={}, k={:?}, {:?}) at kappa ({k0},{k1})",
                    t.pyramid, t.j, t.k, t.kind
                );
            });
        }
    }

    #[test]
    fn full_tiles_act_diagonally() {
        let sys = compact_system(2, 32, 0.9, 0.25);
        assert!(sys.tiles.iter().any(|t| t.full), "expected full tiles at top scales");
        assert!(sys.tiles.iter().any(|t| !t.full), "expected partial tiles at low scales");
        // Potential equals fused diagonal plus partial-tile contributions.
        let mut partial = vec![0.0; 32 * 32];
        for t in sys.tiles.iter().filter(|t| !t.full) {
            sys.sweep_tile(t, |g, _nu, v| partial[g] += v * v);
        }
        for i in 0..partial.len() {
            let total = partial[i] + sys.fused_diag()[i];
            assert!((total - sys.potential_grid[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn compact_potential_has_no_holes() {
        for (d, n) in [(2usize, 64usize), (3, 16)] {
            let sys = compact_system(d, n, 0.9, 0.25);
            let min = sys.potential_grid.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min > 1e-6, "potential minimum {min} in d={d}");
        }
    }

    #[test]
    fn oversized_scale_request_errors() {
        let gen = Generator::Bandlimited(BandlimitedSpec::<f64>::default());
        let lat = LatticeSpec::new(0.125, 0.125).unwrap();
        let spec = SystemSpec::new(2, 32, gen, lat).with_j_max(5);
        match ShearletSystem::build(spec) {
            Err(ShearletError::UnderResolved { j: 5, n: 32, .. }) => {}
            Err(other) => panic!("unexpected error {other:?}"),
            Ok(_) => panic!("expected under-resolved error"),
        }
    }

    #[test]
    fn index_round_trip() {
        let sys = compact_system(2, 32, 0.9, 0.25);
        let tile_idx = sys.tile_index(PyramidTag::P2, 1, [-1, 0]).unwrap();
        let t = &sys.tiles[tile_idx];
        let flat = t.block_len() / 2 + 1;
        let idx = sys.index_of(tile_idx, flat);
        assert_eq!(idx.pyramid, PyramidTag::P2);
        assert_eq!(sys.entry_of(&idx).unwrap(), (tile_idx, flat));
        let bad = ShearletIndex { pyramid: PyramidTag::P1, j: 99, k: [0, 0], m: [0, 0, 0] };
        assert!(matches!(sys.entry_of(&bad), Err(ShearletError::UnknownIndex(_))));
    }
}
