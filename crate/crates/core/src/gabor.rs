//! Gabor analysis and synthesis on separable lattices, the frame
//! operator and its conjugate-gradient inversion, frame-bound estimation
//! and discrete modulation-space norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::grid::{Grid, SampledSignal, Transform};
use crate::tf::{stft_rows, Window};

/// Separable lattice `Λ = αZ × βZ`, with α and β snapped to
/// grid-commensurable values so the lattice tiles the periodic domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub alpha: f64,
    pub beta: f64,
    /// α / Δx; divides n.
    pub step_time: usize,
    /// β / Δξ; divides n.
    pub step_freq: usize,
    pub n_time: usize,
    pub n_freq: usize,
    pub grid: Grid,
}

impl Lattice {
    /// Spatial lattice node `jα - L/2` as a signal-grid index.
    pub fn time_index(&self, j: usize) -> usize {
        j * self.step_time
    }

    pub fn freq_index(&self, k: usize) -> usize {
        k * self.step_freq
    }

    pub fn lambda_x(&self, j: usize) -> f64 {
        self.grid.x(self.time_index(j))
    }

    pub fn lambda_xi(&self, k: usize) -> f64 {
        self.grid.xi(self.freq_index(k))
    }

    pub fn density_product(&self) -> f64 {
        self.alpha * self.beta
    }
}

/// Snaps a requested step to the nearest count that divides `n`, so the
/// lattice translates tile the period.
fn snap_to_divisor(requested: f64, n: usize) -> usize {
    let mut best = 1usize;
    let mut best_err = f64::INFINITY;
    let mut d = 1usize;
    while d <= n {
        if n % d == 0 {
            let err = (d as f64 - requested).abs();
            if err < best_err {
                best_err = err;
                best = d;
            }
        }
        d += 1;
    }
    best
}

/// Builds a lattice from requested α, β; both the requested and the
/// snapped product must satisfy αβ ≤ 2π.
pub fn make_lattice(alpha_req: f64, beta_req: f64, grid: Grid) -> Result<Lattice> {
    if !(alpha_req > 0.0) || !(beta_req > 0.0) {
        return Err(GaborError::InvalidLattice(
            "lattice parameters must be positive".into(),
        ));
    }
    let tol = 2.0 * PI * (1.0 + 1e-9);
    if alpha_req * beta_req > tol {
        return Err(GaborError::InvalidLattice(format!(
            "requested αβ = {} exceeds 2π",
            alpha_req * beta_req
        )));
    }
    let n = grid.n();
    let step_time = snap_to_divisor(alpha_req / grid.dx(), n);
    let step_freq = snap_to_divisor(beta_req / grid.dxi(), n);
    let alpha = step_time as f64 * grid.dx();
    let beta = step_freq as f64 * grid.dxi();
    if alpha * beta > tol {
        return Err(GaborError::InvalidLattice(format!(
            "snapped αβ = {} exceeds 2π",
            alpha * beta
        )));
    }
    Ok(Lattice {
        alpha,
        beta,
        step_time,
        step_freq,
        n_time: n / step_time,
        n_freq: n / step_freq,
        grid,
    })
}

/// Gabor coefficients `c[j][k] = (u, Π(λ_{jk})φ) = V_φu(λ_{jk})`.
#[derive(Debug, Clone)]
pub struct GaborCoefficients {
    pub lattice: Lattice,
    pub values: Vec<Vec<Complex64>>,
    pub window_label: String,
}

impl GaborCoefficients {
    pub fn abs_max(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_λ |c_λ|²`.
    pub fn energy(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v.norm_sqr())
            .sum()
    }
}

/// Exact subsample of the STFT at the lattice points.
pub fn gabor_analysis(
    u: &SampledSignal,
    phi: &Window,
    lat: &Lattice,
) -> Result<GaborCoefficients> {
    if u.grid != lat.grid || phi.grid() != lat.grid {
        return Err(GaborError::GridMismatch(
            "signal, window and lattice must share a grid".into(),
        ));
    }
    let shifts: Vec<usize> = (0..lat.n_time).map(|j| lat.time_index(j)).collect();
    let rows = stft_rows(u, phi, &shifts)?;
    let values = rows
        .into_iter()
        .map(|row| {
            (0..lat.n_freq)
                .map(|k| row[lat.freq_index(k)])
                .collect()
        })
        .collect();
    Ok(GaborCoefficients {
        lattice: *lat,
        values,
        window_label: phi.signal.label.clone(),
    })
}

/// `Σ_λ c_λ Π(λ) w`: modulation sums done with one zero-filled inverse
/// transform per time node.
pub fn gabor_synthesis(
    c: &GaborCoefficients,
    window: &Window,
    lat: &Lattice,
) -> Result<SampledSignal> {
    if c.lattice != *lat || window.grid() != lat.grid {
        return Err(GaborError::DimensionMismatch(
            "coefficients, window and lattice are inconsistent".into(),
        ));
    }
    if c.values.len() != lat.n_time || c.values.iter().any(|r| r.len() != lat.n_freq) {
        return Err(GaborError::DimensionMismatch(
            "coefficient matrix does not match the lattice counts".into(),
        ));
    }
    let grid = lat.grid;
    let n = grid.n();
    let t = Transform::new(grid);
    let mut acc = vec![Complex64::ZERO; n];
    let mut buf = vec![Complex64::ZERO; n];
    for j in 0..lat.n_time {
        buf.iter_mut().for_each(|v| *v = Complex64::ZERO);
        for k in 0..lat.n_freq {
            buf[lat.freq_index(k)] = c.values[j][k];
        }
        // Σ_k c[j][k] e^{i x ξ_{k·step}}
        t.inverse_raw(&mut buf);
        let m = lat.time_index(j);
        for i in 0..n {
            let w = (i + n + n / 2 - m) % n;
            acc[i] += buf[i] * window.signal.values[w];
        }
    }
    SampledSignal::new(grid, acc, "gabor_synthesis")
}

/// Frame operator `S f = Σ_λ (f, Π(λ)φ) Π(λ)φ`.
pub fn frame_operator_apply(
    f: &SampledSignal,
    phi: &Window,
    lat: &Lattice,
) -> Result<SampledSignal> {
    let c = gabor_analysis(f, phi, lat)?;
    gabor_synthesis(&c, phi, lat)
}

/// Two-sided frame bounds, with the method used to obtain them.
#[derive(Debug, Clone, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: String,
}

impl FrameBounds {
    pub fn is_frame(&self) -> bool {
        self.lower > 0.0
    }
}

/// Deterministic pseudo-random start vector for the power iterations.
fn seed_vector(grid: Grid) -> SampledSignal {
    let n = grid.n();
    let values = (0..n)
        .map(|j| {
            let t = j as f64;
            Complex64::new((0.7 * t).sin() + 0.3, (1.3 * t).cos())
        })
        .collect();
    SampledSignal::new(grid, values, "seed").unwrap()
}

fn normalize(mut v: SampledSignal) -> SampledSignal {
    let norm = v.l2_norm();
    if norm > 0.0 {
        let inv = Complex64::new(1.0 / norm, 0.0);
        for x in v.values.iter_mut() {
            *x *= inv;
        }
    }
    v
}

/// Largest eigenvalue of S by power iteration, to relative 1e-6.
fn power_iteration_upper(phi: &Window, lat: &Lattice) -> Result<f64> {
    let mut v = normalize(seed_vector(lat.grid));
    let mut prev = 0.0f64;
    for _ in 0..2000 {
        let sv = frame_operator_apply(&v, phi, lat)?;
        let lambda = sv.inner(&v).re;
        v = normalize(sv);
        if (lambda - prev).abs() <= 1e-6 * lambda.abs().max(1e-300) {
            return Ok(lambda);
        }
        prev = lambda;
    }
    Ok(prev)
}

/// Conjugate gradients for the Hermitian positive-definite frame
/// operator; returns the solution of `S x = b` and the iteration count.
pub fn cg_solve(
    b: &SampledSignal,
    phi: &Window,
    lat: &Lattice,
    tol: f64,
    max_iter: usize,
) -> Result<(SampledSignal, usize)> {
    let grid = lat.grid;
    let b_norm = b.l2_norm();
    if b_norm == 0.0 {
        return Ok((SampledSignal::zero(grid), 0));
    }
    let mut x = SampledSignal::zero(grid);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.inner(&r).re;
    for it in 0..max_iter {
        let res = rr.sqrt() / b_norm;
        if res <= tol {
            return Ok((x, it));
        }
        let sp = frame_operator_apply(&p, phi, lat)?;
        let denom = p.inner(&sp).re;
        if !(denom > 0.0) {
            return Err(GaborError::NonConvergence(format!(
                "frame operator lost positivity at iteration {it} (not a frame?)"
            )));
        }
        let alpha = rr / denom;
        for j in 0..grid.n() {
            x.values[j] += alpha * p.values[j];
            r.values[j] -= alpha * sp.values[j];
        }
        let rr_new = r.inner(&r).re;
        let beta = rr_new / rr;
        for j in 0..grid.n() {
            p.values[j] = r.values[j] + beta * p.values[j];
        }
        rr = rr_new;
    }
    let res = rr.sqrt() / b_norm;
    if res <= tol {
        Ok((x, max_iter))
    } else {
        Err(GaborError::NonConvergence(format!(
            "conjugate gradients stalled at relative residual {res:.3e} after {max_iter} iterations"
        )))
    }
}

/// Canonical dual window `S^{-1}φ` by conjugate gradients on the grid.
pub fn dual_window(phi: &Window, lat: &Lattice, tol: f64) -> Result<Window> {
    let max_iter = 10 * lat.grid.n();
    let (dual, _iters) = cg_solve(&phi.signal, phi, lat, tol, max_iter)?;
    let mut dual = dual;
    dual.label = format!("dual({})", phi.signal.label);
    Window::new(dual)
}

/// Frame bounds by power iteration (B) and inverse power iteration
/// through the CG solver (A); non-convergence is reported as A = 0.
pub fn frame_bounds(phi: &Window, lat: &Lattice) -> Result<FrameBounds> {
    let upper = power_iteration_upper(phi, lat)?;
    let mut v = normalize(seed_vector(lat.grid));
    let mut lower = 0.0f64;
    let mut prev = f64::INFINITY;
    let cg_tol = 1e-10;
    let max_iter = 4 * lat.grid.n();
    let mut converged = false;
    for _ in 0..300 {
        match cg_solve(&v, phi, lat, cg_tol, max_iter) {
            Ok((w, _)) => {
                let mu = w.inner(&v).re; // Rayleigh quotient of S^{-1}
                if mu <= 0.0 {
                    break;
                }
                lower = 1.0 / mu;
                v = normalize(w);
                if (lower - prev).abs() <= 1e-6 * lower.abs() {
                    converged = true;
                    break;
                }
                prev = lower;
            }
            Err(_) => {
                lower = 0.0;
                break;
            }
        }
    }
    let method = if converged {
        "power/inverse-power iteration".to_string()
    } else if lower == 0.0 {
        "inverse iteration diverged; numerically not a frame".to_string()
    } else {
        "power/inverse-power iteration (tolerance not reached)".to_string()
    };
    Ok(FrameBounds {
        lower,
        upper,
        method,
    })
}

/// Mixed-norm exponents for the discrete modulation-space norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedExponent {
    One,
    Two,
    Inf,
}

fn sequence_norm(values: impl Iterator<Item = f64>, p: MixedExponent) -> f64 {
    match p {
        MixedExponent::One => values.sum(),
        MixedExponent::Two => values.map(|v| v * v).sum::<f64>().sqrt(),
        MixedExponent::Inf => values.fold(0.0, f64::max),
    }
}

/// Discrete weighted modulation-space norm of `u`: mixed sequence norm of
/// the Gabor coefficients with weight `⟨λ⟩^s`, inner index over time,
/// outer over frequency.
pub fn modulation_norm(
    u: &SampledSignal,
    phi: &Window,
    lat: &Lattice,
    p: MixedExponent,
    q: MixedExponent,
    s: f64,
) -> Result<f64> {
    let c = gabor_analysis(u, phi, lat)?;
    let per_freq = (0..lat.n_freq).map(|k| {
        let xi = lat.lambda_xi(k);
        sequence_norm(
            (0..lat.n_time).map(|j| {
                let x = lat.lambda_x(j);
                let weight = (1.0 + x * x + xi * xi).powf(s / 2.0);
                c.values[j][k].norm() * weight
            }),
            p,
        )
    });
    Ok(sequence_norm(per_freq, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, synthesize, SignalKind};
    use crate::tf::stft;

    fn grid() -> Grid {
        make_grid(256, 32.0).unwrap()
    }

    fn gaussian_window(g: Grid) -> Window {
        Window::normalized(synthesize(&SignalKind::Gaussian { x0: 0.0, xi0: 0.0 }, g).unwrap())
            .unwrap()
    }

    fn half_density_lattice(g: Grid) -> Lattice {
        let a = (PI / 2.0).sqrt();
        make_lattice(a, a, g).unwrap()
    }

    #[test]
    fn lattice_snapping() {
        let g = make_grid(1024, 64.0).unwrap();
        let lat = make_lattice(1.0, PI, g).unwrap();
        assert_eq!(lat.step_time, 16);
        assert!((lat.alpha - 1.0).abs() < 1e-15);
        assert!((lat.beta - PI).abs() < 1e-12);
        assert!(lat.density_product() <= 2.0 * PI + 1e-9);
    }

    #[test]
    fn lattice_rejects_oversampled_product() {
        let g = grid();
        assert!(make_lattice(4.0, 2.0, g).is_err());
        assert!(make_lattice(-1.0, 1.0, g).is_err());
    }

    #[test]
    fn densest_lattice_is_full_phase_grid() {
        let g = grid();
        let lat = make_lattice(g.dx(), g.dxi(), g).unwrap();
        assert_eq!(lat.step_time, 1);
        assert_eq!(lat.step_freq, 1);
        assert_eq!(lat.n_time, g.n());
        assert_eq!(lat.n_freq, g.n());
    }

    #[test]
    fn analysis_subsamples_stft_exactly() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let u = synthesize(&SignalKind::Chirp { c: 1.0 }, g).unwrap();
        let c = gabor_analysis(&u, &phi, &lat).unwrap();
        let v = stft(&u, &phi).unwrap();
        for j in 0..lat.n_time {
            for k in 0..lat.n_freq {
                let full = v.values[lat.time_index(j)][lat.freq_index(k)];
                assert_eq!(c.values[j][k], full);
            }
        }
    }

    #[test]
    fn analysis_of_zero() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let c = gabor_analysis(&SampledSignal::zero(g), &phi, &lat).unwrap();
        assert_eq!(c.energy(), 0.0);
    }

    #[test]
    fn self_coefficient_at_origin() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let u = phi.signal.clone();
        let c = gabor_analysis(&u, &phi, &lat).unwrap();
        let j0 = (0..lat.n_time).find(|&j| lat.lambda_x(j) == 0.0).unwrap();
        let k0 = (0..lat.n_freq).find(|&k| lat.lambda_xi(k) == 0.0).unwrap();
        assert!((c.values[j0][k0].re - 1.0).abs() < 1e-10);
        assert!(c.values[j0][k0].im.abs() < 1e-12);
    }

    #[test]
    fn frame_operator_self_adjoint_positive() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let f = synthesize(&SignalKind::Hermite { k: 3 }, g).unwrap();
        let h = synthesize(&SignalKind::Gaussian { x0: 2.0, xi0: 1.0 }, g).unwrap();
        let sf = frame_operator_apply(&f, &phi, &lat).unwrap();
        let sh = frame_operator_apply(&h, &phi, &lat).unwrap();
        let lhs = sf.inner(&h);
        let rhs = f.inner(&sh);
        assert!((lhs - rhs).norm() <= 1e-10 * f.l2_norm() * h.l2_norm());
        for k in 0..20 {
            let probe = synthesize(
                &SignalKind::Gaussian {
                    x0: (k as f64 - 10.0) * 0.7,
                    xi0: (k as f64) * 0.3,
                },
                g,
            )
            .unwrap();
            let sp = frame_operator_apply(&probe, &phi, &lat).unwrap();
            assert!(sp.inner(&probe).re >= 0.0);
        }
    }

    #[test]
    fn full_grid_frame_operator_is_scalar() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = make_lattice(g.dx(), g.dxi(), g).unwrap();
        let f = synthesize(&SignalKind::Hermite { k: 2 }, g).unwrap();
        let sf = frame_operator_apply(&f, &phi, &lat).unwrap();
        let s = 2.0 * PI / (g.dx() * g.dxi());
        for j in 0..g.n() {
            if f.values[j].norm() > 1e-6 {
                let ratio = sf.values[j] / f.values[j];
                assert!((ratio.re - s).abs() / s < 1e-8, "j={j}");
                assert!(ratio.im.abs() / s < 1e-8);
            }
        }
    }

    #[test]
    fn dual_window_reconstruction() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let dual = dual_window(&phi, &lat, 1e-12).unwrap();
        let env = synthesize(&SignalKind::Gaussian { x0: 0.0, xi0: 0.0 }, g).unwrap();
        let chirp = synthesize(&SignalKind::Chirp { c: 1.0 }, g).unwrap();
        let u = SampledSignal::new(
            g,
            chirp
                .values
                .iter()
                .zip(&env.values)
                .map(|(a, b)| a * b)
                .collect(),
            "chirp·gaussian",
        )
        .unwrap();
        let c = gabor_analysis(&u, &phi, &lat).unwrap();
        let rec = gabor_synthesis(&c, &dual, &lat).unwrap();
        let err: f64 = rec
            .values
            .iter()
            .zip(&u.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            * g.dx().sqrt()
            / u.l2_norm();
        assert!(err < 1e-8, "err={err}");

        // Duality symmetry: analyze with the dual, synthesize with φ.
        let cd = gabor_analysis(&u, &dual, &lat).unwrap();
        let rec2 = gabor_synthesis(&cd, &phi, &lat).unwrap();
        let err2: f64 = rec2
            .values
            .iter()
            .zip(&u.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            * g.dx().sqrt()
            / u.l2_norm();
        assert!(err2 < 1e-8, "err2={err2}");
    }

    #[test]
    fn full_grid_dual_is_scaled_window() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = make_lattice(g.dx(), g.dxi(), g).unwrap();
        let dual = dual_window(&phi, &lat, 1e-12).unwrap();
        let s = 2.0 * PI / (g.dx() * g.dxi());
        for j in 0..g.n() {
            let expect = phi.signal.values[j] / s;
            assert!((dual.signal.values[j] - expect).norm() <= 1e-12 * phi.signal.values[j].norm().max(1e-3));
        }
    }

    #[test]
    fn synthesis_of_single_coefficient() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let mut c = GaborCoefficients {
            lattice: lat,
            values: vec![vec![Complex64::ZERO; lat.n_freq]; lat.n_time],
            window_label: "test".into(),
        };
        let (j, k) = (3, 5);
        c.values[j][k] = Complex64::ONE;
        let out = gabor_synthesis(&c, &phi, &lat).unwrap();
        let m = lat.time_index(j);
        let kf = lat.freq_index(k);
        let n = g.n();
        for i in 0..n {
            let w = (i + n + n / 2 - m) % n;
            let expect =
                phi.signal.values[w] * Complex64::from_polar(1.0, g.x(i) * g.xi(kf));
            assert!((out.values[i] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_bounds_half_density() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let fb = frame_bounds(&phi, &lat).unwrap();
        assert!(fb.is_frame());
        assert!(fb.upper / fb.lower < 10.0, "B/A = {}", fb.upper / fb.lower);
    }

    #[test]
    fn frame_bounds_tight_on_full_grid() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = make_lattice(g.dx(), g.dxi(), g).unwrap();
        let fb = frame_bounds(&phi, &lat).unwrap();
        assert!((fb.upper - fb.lower).abs() <= 1e-5 * fb.upper);
    }

    #[test]
    fn critical_density_is_flagged() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = make_lattice((2.0 * PI).sqrt(), (2.0 * PI).sqrt(), g).unwrap();
        assert!((lat.density_product() - 2.0 * PI).abs() < 1e-9);
        let fb = frame_bounds(&phi, &lat).unwrap();
        assert!(
            fb.lower / fb.upper <= 1e-3,
            "A/B = {} at critical density",
            fb.lower / fb.upper
        );
    }

    #[test]
    fn frame_inequality_random_signals() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let fb = frame_bounds(&phi, &lat).unwrap();
        for i in 0..20 {
            let f = synthesize(
                &SignalKind::Gaussian {
                    x0: (i as f64 * 0.37).sin() * 4.0,
                    xi0: (i as f64 * 0.61).cos() * 4.0,
                },
                g,
            )
            .unwrap();
            let c = gabor_analysis(&f, &phi, &lat).unwrap();
            let e = c.energy();
            let n2 = f.l2_norm().powi(2);
            assert!(e >= fb.lower * n2 * 0.99, "i={i}");
            assert!(e <= fb.upper * n2 * 1.01, "i={i}");
        }
    }

    #[test]
    fn modulation_norm_examples() {
        let g = grid();
        let phi = gaussian_window(g);
        let lat = half_density_lattice(g);
        let gauss = synthesize(&SignalKind::Gaussian { x0: 0.0, xi0: 0.0 }, g).unwrap();
        for s in [0.0, 2.0, 10.0] {
            let norm = modulation_norm(
                &gauss,
                &phi,
                &lat,
                MixedExponent::Inf,
                MixedExponent::Inf,
                s,
            )
            .unwrap();
            assert!(norm.is_finite() && norm > 0.0);
        }
        let delta = synthesize(&SignalKind::Delta { x0: 0.0 }, g).unwrap();
        let m0 = modulation_norm(
            &delta,
            &phi,
            &lat,
            MixedExponent::Inf,
            MixedExponent::Inf,
            0.0,
        )
        .unwrap();
        // max_λ |c_λ| = max_x |φ(-x)| over the lattice = φ(0).
        let expect = phi.signal.values[g.n() / 2].norm();
        assert!((m0 - expect).abs() < 1e-10);
        // Weight monotonicity.
        for kind in [SignalKind::Chirp { c: 1.0 }, SignalKind::Hermite { k: 4 }] {
            let u = synthesize(&kind, g).unwrap();
            let n0 =
                modulation_norm(&u, &phi, &lat, MixedExponent::Two, MixedExponent::One, 0.0)
                    .unwrap();
            let n2 =
                modulation_norm(&u, &phi, &lat, MixedExponent::Two, MixedExponent::One, 2.0)
                    .unwrap();
            assert!(n2 >= n0);
        }
    }
}
