//! Conic sector machinery: decay-exponent profiles of phase-space
//! fields, wave front estimation, conic support and characteristic set
//! scans for symbols, and sector-set comparison.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::gabor::GaborCoefficients;
use crate::tf::STFTMatrix;

/// Partition of the circle into `K` equal angular sectors; sector `i`
/// covers `[2πi/K, 2π(i+1)/K)`. `K` must be even so antipodal pairing
/// is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SectorPartition {
    pub k_sectors: usize,
}

impl SectorPartition {
    pub fn new(k_sectors: usize) -> Result<Self> {
        if k_sectors == 0 || k_sectors % 2 != 0 {
            return Err(GaborError::InvalidGrid(format!(
                "sector count must be a positive even integer, got {k_sectors}"
            )));
        }
        Ok(SectorPartition { k_sectors })
    }

    /// Sector of the direction of (x, ξ). A point whose angle lands
    /// exactly on a sector boundary belongs to the lower-indexed sector.
    pub fn sector_of(&self, x: f64, xi: f64) -> usize {
        let k = self.k_sectors as f64;
        let mut angle = xi.atan2(x);
        if angle < 0.0 {
            angle += 2.0 * PI;
        }
        let t = angle * k / (2.0 * PI);
        let nearest = t.round();
        if (t - nearest).abs() < 1e-9 {
            // Boundary tie: lower-indexed neighbor, clamped at wrap.
            let r = nearest as i64;
            if r <= 0 || r >= self.k_sectors as i64 {
                0
            } else {
                (r - 1) as usize
            }
        } else {
            (t.floor() as usize).min(self.k_sectors - 1)
        }
    }

    /// Center angle of sector `i`, radians in [0, 2π).
    pub fn center(&self, i: usize) -> f64 {
        2.0 * PI * (i as f64 + 0.5) / self.k_sectors as f64
    }

    pub fn antipode(&self, i: usize) -> usize {
        (i + self.k_sectors / 2) % self.k_sectors
    }

    /// Circular distance between sector indices.
    pub fn distance(&self, i: usize, j: usize) -> usize {
        let d = if i > j { i - j } else { j - i };
        d.min(self.k_sectors - d)
    }

    /// Sectors whose closure contains the direction `angle` (radians):
    /// one sector generically, two when `angle` is a boundary.
    pub fn sectors_of_direction(&self, angle: f64) -> BTreeSet<usize> {
        let k = self.k_sectors as f64;
        let mut a = angle % (2.0 * PI);
        if a < 0.0 {
            a += 2.0 * PI;
        }
        let t = a * k / (2.0 * PI);
        let mut out = BTreeSet::new();
        let nearest = t.round();
        if (t - nearest).abs() < 1e-9 {
            let r = nearest as i64;
            let hi = (r.rem_euclid(self.k_sectors as i64)) as usize;
            let lo = ((r - 1).rem_euclid(self.k_sectors as i64)) as usize;
            out.insert(lo);
            out.insert(hi);
        } else {
            out.insert((t.floor() as usize).min(self.k_sectors - 1));
        }
        out
    }
}

/// Geometric radial shells on `[r_min, r_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub n_shells: usize,
}

impl RadialConfig {
    pub fn new(r_min: f64, r_max: f64, n_shells: usize) -> Result<Self> {
        if !(r_min >= 2.0) || !(r_max > r_min) {
            return Err(GaborError::InvalidGrid(format!(
                "radial range must satisfy 2 ≤ r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_shells < 8 {
            return Err(GaborError::InvalidGrid(format!(
                "need at least 8 shells, got {n_shells}"
            )));
        }
        Ok(RadialConfig {
            r_min,
            r_max,
            n_shells,
        })
    }

    /// Defaults for a field of half-extent `half_x` × `half_xi`:
    /// `r_max = 0.8·min(half_x, half_xi)`.
    pub fn for_extent(half_x: f64, half_xi: f64) -> Result<Self> {
        let r_max = 0.8 * half_x.min(half_xi);
        RadialConfig::new(6.0_f64.min(r_max / 3.0).max(2.0), r_max, 12)
    }

    fn ratio(&self) -> f64 {
        (self.r_max / self.r_min).powf(1.0 / self.n_shells as f64)
    }

    /// Shell index of radius `r`, or None outside `[r_min, r_max)`.
    pub fn shell_of(&self, r: f64) -> Option<usize> {
        if r < self.r_min || r >= self.r_max {
            return None;
        }
        let idx = ((r / self.r_min).ln() / self.ratio().ln()).floor() as usize;
        Some(idx.min(self.n_shells - 1))
    }

    /// Geometric midpoint radius of shell `j`, used as the fit abscissa.
    pub fn shell_radius(&self, j: usize) -> f64 {
        self.r_min * self.ratio().powf(j as f64 + 0.5)
    }
}

/// Per-sector decay data: raw shell maxima and the fitted exponent.
#[derive(Debug, Clone, Serialize)]
pub struct SectorProfile {
    pub sector: usize,
    /// (shell index, shell radius, max |F| in the shell), populated only.
    pub shells: Vec<(usize, f64, f64)>,
    /// σ with M(r) ≈ C·r^{−σ}; None if indeterminate or fully floored.
    pub sigma: Option<f64>,
    pub residual: Option<f64>,
    /// Some shell maxima fell below the floor ε = 1e−13·max|F|.
    pub floor_hit: bool,
    /// Fewer than 6 populated shells; excluded from classification.
    pub indeterminate: bool,
    pub n_points: usize,
}

/// Decay profile of a phase-space field over all sectors.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProfile {
    pub partition: SectorPartition,
    pub radial: RadialConfig,
    pub sectors: Vec<SectorProfile>,
    pub eps_floor: f64,
}

/// A phase-space field to profile: full STFT matrix or Gabor
/// coefficients on a lattice.
pub enum PhaseField<'a> {
    Stft(&'a STFTMatrix),
    Gabor(&'a GaborCoefficients),
}

impl PhaseField<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            PhaseField::Stft(_) => "stft",
            PhaseField::Gabor(_) => "gabor",
        }
    }

    fn for_each_point(&self, mut f: impl FnMut(f64, f64, f64)) {
        match self {
            PhaseField::Stft(m) => {
                for (mi, row) in m.values.iter().enumerate() {
                    let x = m.phase_grid.x_axis[mi];
                    for (k, v) in row.iter().enumerate() {
                        f(x, m.phase_grid.xi_axis[k], v.norm());
                    }
                }
            }
            PhaseField::Gabor(c) => {
                for (j, row) in c.values.iter().enumerate() {
                    let x = c.lattice.lambda_x(j);
                    for (k, v) in row.iter().enumerate() {
                        f(x, c.lattice.lambda_xi(k), v.norm());
                    }
                }
            }
        }
    }

    fn abs_max(&self) -> f64 {
        match self {
            PhaseField::Stft(m) => m.abs_max(),
            PhaseField::Gabor(c) => c.abs_max(),
        }
    }

    fn window_label(&self) -> String {
        match self {
            PhaseField::Stft(m) => m.window_label.clone(),
            PhaseField::Gabor(c) => c.window_label.clone(),
        }
    }
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    let slope = sxy / sxx;
    let icpt = ym - slope * tm;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - icpt).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

/// Shell maxima per sector and least-squares decay exponents
/// `M_i(r) ≈ C r^{−σ_i}` over the above-floor shells.
pub fn decay_profile(
    field: &PhaseField,
    part: SectorPartition,
    rad: RadialConfig,
) -> Result<DecayProfile> {
    let k = part.k_sectors;
    let ns = rad.n_shells;
    let mut maxima = vec![vec![f64::NEG_INFINITY; ns]; k];
    let mut counts = vec![0usize; k];
    field.for_each_point(|x, xi, v| {
        let r = (x * x + xi * xi).sqrt();
        if let Some(shell) = rad.shell_of(r) {
            let s = part.sector_of(x, xi);
            counts[s] += 1;
            if v > maxima[s][shell] {
                maxima[s][shell] = v;
            }
        }
    });
    let eps_floor = 1e-13 * field.abs_max();
    let sectors = (0..k)
        .map(|i| {
            let shells: Vec<(usize, f64, f64)> = (0..ns)
                .filter(|&j| maxima[i][j] > f64::NEG_INFINITY)
                .map(|j| (j, rad.shell_radius(j), maxima[i][j]))
                .collect();
            let populated = shells.len();
            if populated < 6 {
                return SectorProfile {
                    sector: i,
                    shells,
                    sigma: None,
                    residual: None,
                    floor_hit: false,
                    indeterminate: true,
                    n_points: counts[i],
                };
            }
            let above: Vec<(f64, f64)> = shells
                .iter()
                .filter(|&&(_, _, m)| m > eps_floor)
                .map(|&(_, r, m)| (r.ln(), m.ln()))
                .collect();
            let floor_hit = above.len() < populated;
            if above.len() < 2 {
                return SectorProfile {
                    sector: i,
                    shells,
                    sigma: None,
                    residual: None,
                    floor_hit: true,
                    indeterminate: false,
                    n_points: counts[i],
                };
            }
            let (slope, residual) = fit_line(&above);
            SectorProfile {
                sector: i,
                shells,
                sigma: Some(-slope),
                residual: Some(residual),
                floor_hit,
                indeterminate: false,
                n_points: counts[i],
            }
        })
        .collect();
    Ok(DecayProfile {
        partition: part,
        radial: rad,
        sectors,
        eps_floor,
    })
}

/// Provenance of a wave front estimate.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub field: String,
    pub window: String,
    pub signal: String,
}

/// Estimated Gabor wave front set as a union of angular sectors.
#[derive(Debug, Clone, Serialize)]
pub struct WaveFrontEstimate {
    pub partition: SectorPartition,
    pub singular: BTreeSet<usize>,
    pub profile: DecayProfile,
    pub n_thr: f64,
    pub provenance: Provenance,
}

/// Classifies sectors: singular iff σ_i < N_thr without hitting the
/// numerical floor; indeterminate sectors are excluded.
pub fn estimate_wavefront(
    profile: DecayProfile,
    n_thr: f64,
    signal_label: impl Into<String>,
    field_kind: &str,
    window_label: impl Into<String>,
) -> WaveFrontEstimate {
    let singular = profile
        .sectors
        .iter()
        .filter(|s| {
            !s.indeterminate
                && !s.floor_hit
                && s.sigma.map(|v| v < n_thr).unwrap_or(false)
        })
        .map(|s| s.sector)
        .collect();
    WaveFrontEstimate {
        partition: profile.partition,
        singular,
        profile,
        n_thr,
        provenance: Provenance {
            field: field_kind.to_string(),
            window: window_label.into(),
            signal: signal_label.into(),
        },
    }
}

/// Convenience: profile a field and classify in one call.
pub fn wavefront_of_field(
    field: &PhaseField,
    part: SectorPartition,
    rad: RadialConfig,
    n_thr: f64,
    signal_label: impl Into<String>,
) -> Result<WaveFrontEstimate> {
    let window = field.window_label();
    let profile = decay_profile(field, part, rad)?;
    Ok(estimate_wavefront(
        profile,
        n_thr,
        signal_label,
        field.kind(),
        window,
    ))
}

/// Complex samples of a symbol a(x, ξ) on a rectangular phase grid,
/// with its declared polynomial order and the zeroth-order bound
/// constant checked on the grid.
#[derive(Debug, Clone)]
pub struct SampledSymbol {
    pub x_axis: Vec<f64>,
    pub xi_axis: Vec<f64>,
    /// Row-major in x: values[p][k] = a(x_p, ξ_k).
    pub values: Vec<Vec<Complex64>>,
    pub order: f64,
    pub label: String,
    /// max over the grid of |a(z)|·⟨z⟩^{−order}.
    pub sup_constant: f64,
}

impl SampledSymbol {
    pub fn new(
        x_axis: Vec<f64>,
        xi_axis: Vec<f64>,
        values: Vec<Vec<Complex64>>,
        order: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != x_axis.len() || values.iter().any(|r| r.len() != xi_axis.len()) {
            return Err(GaborError::InvalidSymbol(
                "value matrix does not match the axes".into(),
            ));
        }
        let mut sup = 0.0f64;
        for (p, row) in values.iter().enumerate() {
            let x = x_axis[p];
            for (k, v) in row.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(GaborError::InvalidSymbol("non-finite sample".into()));
                }
                let xi = xi_axis[k];
                let bracket = (1.0 + x * x + xi * xi).sqrt();
                sup = sup.max(v.norm() * bracket.powf(-order));
            }
        }
        Ok(SampledSymbol {
            x_axis,
            xi_axis,
            values,
            order,
            label: label.into(),
            sup_constant: sup,
        })
    }

    pub fn abs_max(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Sectors where the symbol stays above the floor in the outermost
/// three radial shells: the discrete conic support.
pub fn conesupp_estimate(
    a: &SampledSymbol,
    part: SectorPartition,
    rad: RadialConfig,
) -> BTreeSet<usize> {
    let eps_floor = 1e-13 * a.abs_max();
    let outer_lo = rad.n_shells.saturating_sub(3);
    let mut out = BTreeSet::new();
    for (p, row) in a.values.iter().enumerate() {
        let x = a.x_axis[p];
        for (k, v) in row.iter().enumerate() {
            let xi = a.xi_axis[k];
            let r = (x * x + xi * xi).sqrt();
            match rad.shell_of(r) {
                Some(s) if s >= outer_lo => {
                    if v.norm() > eps_floor {
                        out.insert(part.sector_of(x, xi));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Characteristic sectors: complement of the sectors where
/// `|a(z)|·⟨z⟩^{−m} ≥ eps` holds for every grid point with |z| ≥ r_min.
pub fn char_estimate(
    a: &SampledSymbol,
    part: SectorPartition,
    rad: RadialConfig,
    eps: f64,
) -> BTreeSet<usize> {
    let k = part.k_sectors;
    let mut minima = vec![f64::INFINITY; k];
    for (p, row) in a.values.iter().enumerate() {
        let x = a.x_axis[p];
        for (ki, v) in row.iter().enumerate() {
            let xi = a.xi_axis[ki];
            let r2 = x * x + xi * xi;
            if r2 < rad.r_min * rad.r_min {
                continue;
            }
            let s = part.sector_of(x, xi);
            let scaled = v.norm() * (1.0 + r2).sqrt().powf(-a.order);
            if scaled < minima[s] {
                minima[s] = scaled;
            }
        }
    }
    (0..k).filter(|&i| !(minima[i] >= eps)).collect()
}

/// Outcome of a sector-set comparison with angular dilation margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Subset,
    Equal,
    Neither,
}

fn within_margin(
    part: &SectorPartition,
    from: &BTreeSet<usize>,
    to: &BTreeSet<usize>,
    margin: usize,
) -> bool {
    from.iter()
        .all(|&i| to.iter().any(|&j| part.distance(i, j) <= margin))
}

/// `subset` iff every singular sector of `lhs` lies within `margin`
/// sectors of `rhs`; `equal` iff the dilated containment holds both ways.
pub fn wf_compare(lhs: &WaveFrontEstimate, rhs: &BTreeSet<usize>, margin: usize) -> Verdict {
    let part = &lhs.partition;
    let fwd = within_margin(part, &lhs.singular, rhs, margin);
    let bwd = within_margin(part, rhs, &lhs.singular, margin);
    match (fwd, bwd) {
        (true, true) => Verdict::Equal,
        (true, false) => Verdict::Subset,
        _ => Verdict::Neither,
    }
}

/// Margin-dilated two-set comparison without a full estimate on the left.
pub fn compare_sector_sets(
    part: &SectorPartition,
    lhs: &BTreeSet<usize>,
    rhs: &BTreeSet<usize>,
    margin: usize,
) -> Verdict {
    let fwd = within_margin(part, lhs, rhs, margin);
    let bwd = within_margin(part, rhs, lhs, margin);
    match (fwd, bwd) {
        (true, true) => Verdict::Equal,
        (true, false) => Verdict::Subset,
        _ => Verdict::Neither,
    }
}
