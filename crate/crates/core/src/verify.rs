//! Verification suites behind `gabor-wf verify`: closed-form STFT
//! oracles, reconstruction and frame-bound checks, wave-front
//! classification oracles, microlocality scenarios and invariance
//! properties. The acceptance tests drive the same code.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::config::Config;
use crate::error::{GaborError, Result};
use crate::gabor::{
    dual_window, frame_bounds, frame_operator_apply, gabor_analysis, gabor_synthesis, make_lattice,
};
use crate::grid::{synthesize, Grid, SampledSignal, SignalKind};
use crate::operators::{
    fit_loglog_slope, kernel_cone_profile, kernel_offdiagonal_profile, microlocality_check,
    phase_kernel, MicrolocalConfig, PHASE_KERNEL_ENTRY_CAP,
};
use crate::symbols::{sample_weyl_grid, SymbolKind};
use crate::tf::{convolve_field, metaplectic_apply, stft, stft_adjoint, MetaplecticElement, Window};
use crate::wavefront::{
    compare_sector_sets, decay_profile, wavefront_of_field, wf_compare, PhaseField, RadialConfig,
    SectorPartition, Verdict, WaveFrontEstimate,
};

pub const SUITES: [&str; 5] = ["inversion", "frames", "oracles", "microlocal", "invariance"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check, stable across runs.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out
    }
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

pub fn run_suite(suite: &str, cfg: &Config, alpha_beta: Option<f64>) -> Result<SuiteReport> {
    let checks = match suite {
        "inversion" => suite_inversion(cfg)?,
        "frames" => suite_frames(cfg, alpha_beta)?,
        "oracles" => suite_oracles(cfg)?,
        "microlocal" => suite_microlocal(cfg)?,
        "invariance" => suite_invariance(cfg)?,
        other => {
            return Err(GaborError::Parse(format!(
                "unknown suite {other:?}; expected one of {SUITES:?}"
            )))
        }
    };
    Ok(SuiteReport {
        suite: suite.to_string(),
        checks,
    })
}

pub fn run_all(cfg: &Config) -> Result<Vec<SuiteReport>> {
    SUITES
        .iter()
        .map(|s| run_suite(s, cfg, None))
        .collect()
}

fn gaussian_window(grid: Grid) -> Result<Window> {
    Window::normalized(synthesize(
        &SignalKind::Gaussian { x0: 0.0, xi0: 0.0 },
        grid,
    )?)
}

fn hermite_window(grid: Grid, k: usize) -> Result<Window> {
    Window::normalized(synthesize(&SignalKind::Hermite { k }, grid)?)
}

fn rel_l2(a: &SampledSignal, b: &SampledSignal) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    (num / den).sqrt()
}

fn fmt_set(s: &BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Sectors whose closure meets the line through the origin at `deg`
/// degrees (both directions).
fn line_sectors(part: &SectorPartition, deg: f64) -> BTreeSet<usize> {
    let mut out = part.sectors_of_direction(deg.to_radians());
    out.extend(part.sectors_of_direction(deg.to_radians() + PI));
    out
}

fn wf_stft(
    u: &SampledSignal,
    phi: &Window,
    part: SectorPartition,
    rad: RadialConfig,
    n_thr: f64,
) -> Result<WaveFrontEstimate> {
    let v = stft(u, phi)?;
    wavefront_of_field(&PhaseField::Stft(&v), part, rad, n_thr, u.label.clone())
}

// ---------------------------------------------------------------- inversion

fn suite_inversion(cfg: &Config) -> Result<Vec<Check>> {
    let grid = cfg.grid()?;
    let phi = gaussian_window(grid)?;
    let mut checks = Vec::new();
    for kind in [
        SignalKind::Gaussian { x0: 0.3, xi0: -1.2 },
        SignalKind::Hermite { k: 4 },
    ] {
        let u = synthesize(&kind, grid)?;
        let v = stft(&u, &phi)?;
        let back = stft_adjoint(&v, &phi)?;
        let err = rel_l2(&back, &u);
        checks.push(check(
            format!("stft round-trip [{}]", u.label),
            err <= 1e-10,
            format!("rel l2 error {err:.3e} (tol 1.0e-10)"),
        ));
    }
    let lat = cfg.lattice(grid)?;
    let dual = dual_window(&phi, &lat, cfg.cg_tol)?;
    let u = synthesize(&SignalKind::Hermite { k: 3 }, grid)?;
    let rec = gabor_synthesis(&gabor_analysis(&u, &phi, &lat)?, &dual, &lat)?;
    let err = rel_l2(&rec, &u);
    checks.push(check(
        "gabor reconstruction (analysis window, dual synthesis)",
        err <= 1e-8,
        format!(
            "alpha*beta = {:.6}, rel l2 error {err:.3e} (tol 1.0e-8)",
            lat.density_product()
        ),
    ));
    let rec2 = gabor_synthesis(&gabor_analysis(&u, &dual, &lat)?, &phi, &lat)?;
    let err2 = rel_l2(&rec2, &u);
    checks.push(check(
        "gabor reconstruction (dual analysis, window synthesis)",
        err2 <= 1e-8,
        format!("rel l2 error {err2:.3e} (tol 1.0e-8)"),
    ));
    Ok(checks)
}

// ------------------------------------------------------------------- frames

fn suite_frames(cfg: &Config, alpha_beta: Option<f64>) -> Result<Vec<Check>> {
    let grid = cfg.grid()?;
    let phi = gaussian_window(grid)?;
    if let Some(ab) = alpha_beta {
        // Density at or beyond the critical value: the Gaussian system
        // stops being a frame and the lower bound must collapse.
        let step = ab.sqrt();
        let lat = make_lattice(step, step, grid)?;
        let b = frame_bounds(&phi, &lat)?;
        let collapsed = b.lower <= 1e-3 * b.upper;
        return Ok(vec![check(
            format!("lower frame bound collapses at alpha*beta = {ab}"),
            collapsed,
            format!(
                "A = {:.3e}, B = {:.3e}, A/B = {:.3e} (expected <= 1.0e-3); {}",
                b.lower,
                b.upper,
                b.lower / b.upper,
                b.method
            ),
        )]);
    }
    let lat = cfg.lattice(grid)?;
    let b = frame_bounds(&phi, &lat)?;
    let mut checks = Vec::new();
    checks.push(check(
        "frame bounds positive and ordered",
        b.lower > 0.0 && b.upper.is_finite() && b.lower <= b.upper,
        format!(
            "alpha*beta = {:.6}: A = {:.6e}, B = {:.6e}",
            lat.density_product(),
            b.lower,
            b.upper
        ),
    ));
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for k in 0..4usize {
        let u = synthesize(&SignalKind::Hermite { k }, grid)?;
        let e = gabor_analysis(&u, &phi, &lat)?.energy();
        let nn = u.l2_norm().powi(2);
        ok &= e >= b.lower * nn * (1.0 - 1e-6) && e <= b.upper * nn * (1.0 + 1e-6);
        worst = worst.min((e / nn - b.lower).min(b.upper - e / nn));
    }
    checks.push(check(
        "frame inequality on hermite(0..3)",
        ok,
        format!("min slack to the bounds {worst:.3e}"),
    ));
    // Full-grid lattice: the frame operator is the scalar 2π/(ΔxΔξ).
    let full = make_lattice(grid.dx(), grid.dxi(), grid)?;
    let u = synthesize(&SignalKind::Hermite { k: 2 }, grid)?;
    let su = frame_operator_apply(&u, &phi, &full)?;
    let s = 2.0 * PI / (grid.dx() * grid.dxi());
    let err = rel_l2(&su, &u.scale(s.into()));
    checks.push(check(
        "full-grid frame operator is the tight scalar 2*pi/(dx*dxi)",
        err <= 1e-8,
        format!("scalar {s:.6e}, rel l2 error {err:.3e} (tol 1.0e-8)"),
    ));
    let dual = dual_window(&phi, &lat, cfg.cg_tol)?;
    let sd = frame_operator_apply(&dual.signal, &phi, &lat)?;
    let derr = rel_l2(&sd, &phi.signal);
    checks.push(check(
        "dual window solves S(dual) = window",
        derr <= 1e-8,
        format!("rel l2 residual {derr:.3e} (tol 1.0e-8)"),
    ));
    Ok(checks)
}

// ------------------------------------------------------------------ oracles

fn suite_oracles(cfg: &Config) -> Result<Vec<Check>> {
    let grid = cfg.grid()?;
    let part = cfg.partition()?;
    let rad = cfg.radial(grid)?;
    let phi = gaussian_window(grid)?;
    let n = grid.n();
    let xi_half = grid.freq_max() / 2.0;
    let mut checks = Vec::new();

    // |V_phi delta_0| = |phi(-x)|, independent of xi.
    let u = synthesize(&SignalKind::Delta { x0: 0.0 }, grid)?;
    let v = stft(&u, &phi)?;
    let c0 = PI.powf(-0.25);
    let mut sup = 0.0f64;
    for (m, row) in v.values.iter().enumerate() {
        let x = v.phase_grid.x_axis[m];
        let oracle = c0 * (-x * x / 2.0).exp();
        for val in row {
            sup = sup.max((val.norm() - oracle).abs());
        }
    }
    let rel = sup / c0;
    checks.push(check(
        "stft oracle [delta]: |V| = |phi(-x)|",
        rel <= 1e-10,
        format!("sup rel error {rel:.3e} (tol 1.0e-10)"),
    ));

    // |V_phi 1| = |phihat(-xi)| on the inner frequency band.
    let u = synthesize(&SignalKind::PlaneWave { xi0: 0.0 }, grid)?;
    let v = stft(&u, &phi)?;
    let c1 = (2.0 * PI).sqrt() * PI.powf(-0.25);
    let mut sup = 0.0f64;
    for row in &v.values {
        for (k, val) in row.iter().enumerate() {
            let xi = v.phase_grid.xi_axis[k];
            if xi.abs() > xi_half {
                continue;
            }
            let oracle = c1 * (-xi * xi / 2.0).exp();
            sup = sup.max((val.norm() - oracle).abs());
        }
    }
    let rel = sup / c1;
    checks.push(check(
        "stft oracle [plane wave]: |V| = |phihat(-xi)|",
        rel <= 1e-8,
        format!("sup rel error {rel:.3e} on |xi| <= {xi_half:.2} (tol 1.0e-8)"),
    ));

    // Chirp ridge: |V| = C exp(-(xi - c x)^2 / (2(1+c^2))).
    for c in [1.0, -2.0] {
        let u = synthesize(&SignalKind::Chirp { c }, grid)?;
        let v = stft(&u, &phi)?;
        let big_c = v.values[n / 2][n / 2].norm();
        let mut sup = 0.0f64;
        for (m, row) in v.values.iter().enumerate() {
            let x = v.phase_grid.x_axis[m];
            if x.abs() > grid.length() / 4.0 {
                continue;
            }
            for (k, val) in row.iter().enumerate() {
                let xi = v.phase_grid.xi_axis[k];
                if xi.abs() > xi_half {
                    continue;
                }
                let oracle = big_c * (-(xi - c * x).powi(2) / (2.0 * (1.0 + c * c))).exp();
                sup = sup.max((val.norm() - oracle).abs());
            }
        }
        let rel = sup / big_c;
        checks.push(check(
            format!("stft oracle [chirp c={c}]: gaussian ridge along xi = c*x"),
            rel <= 1e-6,
            format!("C = {big_c:.6e}, sup rel error {rel:.3e} (tol 1.0e-6)"),
        ));
    }

    // Wave front classification oracles.
    let singular_cases = [
        (SignalKind::Delta { x0: 0.0 }, 90.0),
        (SignalKind::PlaneWave { xi0: 0.0 }, 0.0),
        (SignalKind::Chirp { c: 1.0 }, 45.0),
    ];
    for (kind, deg) in singular_cases {
        let u = synthesize(&kind, grid)?;
        let est = wf_stft(&u, &phi, part, rad, cfg.n_thr)?;
        let oracle = line_sectors(&part, deg);
        let verdict = wf_compare(&est, &oracle, cfg.margin);
        checks.push(check(
            format!("wavefront oracle [{}]: line at {deg} deg", u.label),
            verdict == Verdict::Equal,
            format!(
                "singular {} vs oracle {} (margin {})",
                fmt_set(&est.singular),
                fmt_set(&oracle),
                cfg.margin
            ),
        ));
    }
    for kind in [
        SignalKind::Gaussian { x0: 0.0, xi0: 0.0 },
        SignalKind::Hermite { k: 4 },
    ] {
        let u = synthesize(&kind, grid)?;
        let est = wf_stft(&u, &phi, part, rad, cfg.n_thr)?;
        let regular = est
            .profile
            .sectors
            .iter()
            .all(|s| s.floor_hit || s.sigma.map(|v| v > 8.0).unwrap_or(false));
        let min_sigma = est
            .profile
            .sectors
            .iter()
            .filter(|s| !s.floor_hit)
            .filter_map(|s| s.sigma)
            .fold(f64::INFINITY, f64::min);
        checks.push(check(
            format!("wavefront oracle [{}]: empty", u.label),
            est.singular.is_empty() && regular,
            format!(
                "singular {}, min non-floor sigma {min_sigma:.2}",
                fmt_set(&est.singular)
            ),
        ));
    }

    // Lattice/continuum consistency at the configured density.
    let lat = cfg.lattice(grid)?;
    for kind in [
        SignalKind::Delta { x0: 0.0 },
        SignalKind::PlaneWave { xi0: 0.0 },
        SignalKind::Chirp { c: 1.0 },
        SignalKind::Gaussian { x0: 0.0, xi0: 0.0 },
    ] {
        let u = synthesize(&kind, grid)?;
        let stft_est = wf_stft(&u, &phi, part, rad, cfg.n_thr)?;
        let coeffs = gabor_analysis(&u, &phi, &lat)?;
        let gabor_est = wavefront_of_field(
            &PhaseField::Gabor(&coeffs),
            part,
            rad,
            cfg.n_thr,
            u.label.clone(),
        )?;
        // Sectors the lattice cannot populate (too few occupied shells)
        // carry no verdict on either side of the comparison.
        let undecided: BTreeSet<usize> = gabor_est
            .profile
            .sectors
            .iter()
            .filter(|s| s.indeterminate)
            .map(|s| s.sector)
            .collect();
        let stft_set: BTreeSet<usize> = stft_est
            .singular
            .difference(&undecided)
            .copied()
            .collect();
        let verdict = compare_sector_sets(&part, &gabor_est.singular, &stft_set, cfg.margin);
        checks.push(check(
            format!("gabor/stft consistency [{}]", u.label),
            verdict == Verdict::Equal,
            format!(
                "gabor {} vs stft {} (margin {}, {} lattice-indeterminate sectors excluded)",
                fmt_set(&gabor_est.singular),
                fmt_set(&stft_set),
                cfg.margin,
                undecided.len()
            ),
        ));
    }
    Ok(checks)
}

// --------------------------------------------------------------- microlocal

/// Decay fits around an O(1) phase-space spread need a larger inner
/// radius than raw classification: a unit shift subtends > 1 sector
/// below r ≈ 10.
fn wide_radial(cfg: &Config, grid: Grid) -> Result<RadialConfig> {
    let base = cfg.radial(grid)?;
    RadialConfig::new(base.r_min.max(10.0), base.r_max, base.n_shells)
}

fn suite_microlocal(cfg: &Config) -> Result<Vec<Check>> {
    let grid = cfg.grid()?;
    let part = cfg.partition()?;
    let phi = gaussian_window(grid)?;
    let mcfg = MicrolocalConfig {
        partition: part,
        radial: cfg.radial(grid)?,
        n_thr: cfg.n_thr,
        margin: cfg.margin,
    };
    // Cone cutoffs are kept mirror-symmetric about a coordinate axis
    // (and antipodal) so the sampled symbol stays continuous across the
    // periodic seams of the phase grid.
    let symbols = [
        SymbolKind::One,
        SymbolKind::SinCos,
        SymbolKind::GaussianBump,
        SymbolKind::ConeCutoff {
            deg_start: -40.0,
            deg_end: 40.0,
            r_on: 2.0,
            antipodal: true,
        },
        SymbolKind::ConeCutoff {
            deg_start: 70.0,
            deg_end: 110.0,
            r_on: 2.0,
            antipodal: true,
        },
    ];
    let signals = [
        SignalKind::Chirp { c: 1.0 },
        SignalKind::Delta { x0: 0.0 },
        SignalKind::PlaneWave { xi0: 0.0 },
    ];
    let mut checks = Vec::new();
    for kind in &symbols {
        let a = sample_weyl_grid(kind, grid)?;
        for sk in &signals {
            let u = synthesize(sk, grid)?;
            let rep = microlocality_check(&a, &u, &phi, &mcfg)?;
            let rhs: BTreeSet<usize> = rep
                .wf_u
                .iter()
                .filter(|i| rep.conesupp_a.contains(i))
                .copied()
                .collect();
            let lhs: BTreeSet<usize> = rep.lhs.iter().copied().collect();
            let contained = rep.verdict != Verdict::Neither;
            let empty_ok = !rhs.is_empty() || lhs.is_empty();
            checks.push(check(
                format!("microlocality [a = {}, u = {}]", a.label, u.label),
                contained && empty_ok,
                format!(
                    "verdict {:?}, lhs {} vs wf(u) ∩ conesupp(a) {} (margin {})",
                    rep.verdict,
                    fmt_set(&lhs),
                    fmt_set(&rhs),
                    rep.margin
                ),
            ));
        }
    }
    checks.extend(kernel_checks()?);
    checks.push(convolution_check(grid, part, &phi)?);
    Ok(checks)
}

/// Kernel decay probes run on a half-size grid: the coarse kernel is
/// quartic in the probe count and the slopes are scale-free.
fn kernel_checks() -> Result<Vec<Check>> {
    let grid = crate::grid::make_grid(512, 64.0)?;
    let phi = gaussian_window(grid)?;
    let mut checks = Vec::new();

    let a = sample_weyl_grid(&SymbolKind::SinCos, grid)?;
    let k = phase_kernel(&a, &phi, 16, PHASE_KERNEL_ENTRY_CAP)?;
    let r_max = 0.8 * (grid.length() / 2.0).min(grid.freq_max());
    let pts = kernel_offdiagonal_profile(&k, 4.0, r_max, 8);
    let slope = fit_loglog_slope(&pts).unwrap_or(0.0);
    checks.push(check(
        "kernel off-diagonal decay [a = sincos]",
        pts.len() >= 4 && slope <= -6.0,
        format!(
            "fitted slope {slope:.2} over {} offset bins in [4.0, {r_max:.1}] (required <= -6)",
            pts.len()
        ),
    ));

    // Symbol vanishing on the open cone (35,145) ∪ (215,325); targets
    // in the inner cone (80,100) must decay superpolynomially.
    let vanishing = SymbolKind::ConeCutoff {
        deg_start: 325.0,
        deg_end: 35.0,
        r_on: 2.0,
        antipodal: true,
    };
    let a2 = sample_weyl_grid(&vanishing, grid)?;
    let k2 = phase_kernel(&a2, &phi, 16, PHASE_KERNEL_ENTRY_CAP)?;
    let pts2 = kernel_cone_profile(&k2, 80.0, 100.0, true, 6.0, 20.0, 8);
    let slope2 = fit_loglog_slope(&pts2).unwrap_or(0.0);
    checks.push(check(
        "kernel cone decay [a vanishing on (35,145) deg]",
        pts2.len() >= 4 && slope2 <= -6.0,
        format!(
            "fitted slope {slope2:.2} over {} shells in the inner cone (80,100) deg (required <= -6)",
            pts2.len()
        ),
    ));
    Ok(checks)
}

/// Smoothing by a narrow phase-space mollifier must not change fitted
/// decay orders in sectors bounded away from the singular cone.
fn convolution_check(grid: Grid, part: SectorPartition, phi: &Window) -> Result<Check> {
    let u = synthesize(&SignalKind::Delta { x0: 0.0 }, grid)?;
    let f = stft(&u, phi)?;
    let w = 0.15f64;
    let g = convolve_field(&f, |x, xi| {
        (-(x * x + xi * xi) / (2.0 * w * w)).exp() / (2.0 * PI * w * w)
    });
    let rad = RadialConfig::new(2.0, 8.0, 8)?;
    let pf = decay_profile(&PhaseField::Stft(&f), part, rad)?;
    let pg = decay_profile(&PhaseField::Stft(&g), part, rad)?;
    let k = part.k_sectors;
    let mut compared = 0usize;
    let mut worst = 0.0f64;
    for i in 0..k {
        let deg = (i as f64 + 0.5) * 360.0 / k as f64;
        let d_xi = (deg - 90.0).abs().min((deg - 270.0).abs());
        let d_x = deg.min((deg - 180.0).abs()).min(360.0 - deg);
        if d_xi < 25.0 || d_x < 25.0 {
            continue;
        }
        let (a, b) = (&pf.sectors[i], &pg.sectors[i]);
        if a.floor_hit || b.floor_hit || a.indeterminate || b.indeterminate {
            continue;
        }
        if let (Some(sa), Some(sb)) = (a.sigma, b.sigma) {
            compared += 1;
            worst = worst.max((sa - sb).abs());
        }
    }
    Ok(check(
        "convolution preserves fitted decay order",
        compared >= 16 && worst <= 0.5,
        format!(
            "max |sigma(f) - sigma(f*g)| = {worst:.3} over {compared} sectors, mollifier width {w} (tol 0.5)"
        ),
    ))
}

// --------------------------------------------------------------- invariance

fn suite_invariance(cfg: &Config) -> Result<Vec<Check>> {
    let grid = cfg.grid()?;
    let part = cfg.partition()?;
    let rad = wide_radial(cfg, grid)?;
    let phi = gaussian_window(grid)?;
    let h2 = hermite_window(grid, 2)?;
    let mut checks = Vec::new();

    for kind in [SignalKind::Delta { x0: 0.0 }, SignalKind::Chirp { c: 1.0 }] {
        let u = synthesize(&kind, grid)?;
        let a = wf_stft(&u, &phi, part, rad, cfg.n_thr)?;
        let b = wf_stft(&u, &h2, part, rad, cfg.n_thr)?;
        let verdict = compare_sector_sets(&part, &b.singular, &a.singular, cfg.margin);
        checks.push(check(
            format!("window invariance [{}]", u.label),
            verdict == Verdict::Equal,
            format!(
                "gaussian {} vs hermite(2) {} (margin {})",
                fmt_set(&a.singular),
                fmt_set(&b.singular),
                cfg.margin
            ),
        ));
    }

    // Phase-space shift: small and grid-aligned so the shifted cone is
    // still resolved inside the fitting annulus.
    let xi0 = grid.dxi() * (1.0 / grid.dxi()).round();
    let x0 = 1.0;
    for kind in [SignalKind::Delta { x0: 0.0 }, SignalKind::Chirp { c: 1.0 }] {
        let u = synthesize(&kind, grid)?;
        let shifted = synthesize(
            &SignalKind::PhaseShift {
                inner: Box::new(kind),
                x0,
                xi0,
            },
            grid,
        )?;
        let a = wf_stft(&u, &phi, part, rad, cfg.n_thr)?;
        let b = wf_stft(&shifted, &phi, part, rad, cfg.n_thr)?;
        let verdict = compare_sector_sets(&part, &b.singular, &a.singular, cfg.margin);
        checks.push(check(
            format!("phase-shift invariance [{}]", shifted.label),
            verdict == Verdict::Equal,
            format!(
                "shifted {} vs original {} (margin {})",
                fmt_set(&b.singular),
                fmt_set(&a.singular),
                cfg.margin
            ),
        ));
    }

    // Fourier rotates the singular directions by a quarter turn.
    let delta = synthesize(&SignalKind::Delta { x0: 0.0 }, grid)?;
    let fd = metaplectic_apply(&delta, MetaplecticElement::Fourier)?;
    let base = wf_stft(&delta, &phi, part, rad, cfg.n_thr)?;
    let rotated: BTreeSet<usize> = base
        .singular
        .iter()
        .map(|&i| (i + part.k_sectors / 4) % part.k_sectors)
        .collect();
    let est = wf_stft(&fd, &phi, part, rad, cfg.n_thr)?;
    let verdict = compare_sector_sets(&part, &est.singular, &rotated, cfg.margin);
    checks.push(check(
        "symplectic covariance [fourier(delta)]",
        verdict == Verdict::Equal,
        format!(
            "fourier {} vs quarter-rotated {} (margin {})",
            fmt_set(&est.singular),
            fmt_set(&rotated),
            cfg.margin
        ),
    ));

    // Chirp multiplication of the constant signal is the chirp itself.
    let one = synthesize(&SignalKind::PlaneWave { xi0: 0.0 }, grid)?;
    let cu = metaplectic_apply(&one, MetaplecticElement::ChirpMul { c: 1.0 })?;
    let chirp = synthesize(&SignalKind::Chirp { c: 1.0 }, grid)?;
    let a = wf_stft(&cu, &phi, part, rad, cfg.n_thr)?;
    let b = wf_stft(&chirp, &phi, part, rad, cfg.n_thr)?;
    let verdict = compare_sector_sets(&part, &a.singular, &b.singular, cfg.margin);
    checks.push(check(
        "symplectic covariance [chirp_mul(1) of constant]",
        verdict == Verdict::Equal,
        format!(
            "chirp_mul {} vs chirp(1) {} (margin {})",
            fmt_set(&a.singular),
            fmt_set(&b.singular),
            cfg.margin
        ),
    ));
    Ok(checks)
}
