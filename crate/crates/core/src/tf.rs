//! Short-time Fourier transform, its adjoint, the cross-Wigner
//! distribution, and the metaplectic operators used for covariance tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GaborError, Result};
use crate::grid::{dft, Grid, SampledSignal, Transform};

/// Analysis window φ with cached L² norm.
#[derive(Debug, Clone)]
pub struct Window {
    pub signal: SampledSignal,
    pub l2_norm: f64,
}

impl Window {
    pub fn new(signal: SampledSignal) -> Result<Self> {
        let l2_norm = signal.l2_norm();
        if !(l2_norm > 0.0) {
            return Err(GaborError::InvalidSignal("window has zero norm".into()));
        }
        Ok(Window { signal, l2_norm })
    }

    /// Rescales to unit L² norm.
    pub fn normalized(signal: SampledSignal) -> Result<Self> {
        let norm = signal.l2_norm();
        if !(norm > 0.0) {
            return Err(GaborError::InvalidSignal("window has zero norm".into()));
        }
        let scaled = signal.scale(Complex64::new(1.0 / norm, 0.0));
        Ok(Window {
            signal: scaled,
            l2_norm: 1.0,
        })
    }

    pub fn is_normalized(&self) -> bool {
        (self.l2_norm - 1.0).abs() <= 1e-12
    }

    pub fn grid(&self) -> Grid {
        self.signal.grid
    }
}

/// Phase-space sampling axes: the grid's spatial and frequency points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub x_axis: Vec<f64>,
    pub xi_axis: Vec<f64>,
}

impl PhaseGrid {
    pub fn from_grid(grid: Grid) -> Self {
        PhaseGrid {
            x_axis: grid.x_axis(),
            xi_axis: grid.xi_axis(),
        }
    }
}

/// `V[m][k] = V_φu(x_m, ξ_k)` on the full phase grid, row-major in `m`.
#[derive(Debug, Clone)]
pub struct STFTMatrix {
    pub phase_grid: PhaseGrid,
    pub values: Vec<Vec<Complex64>>,
    pub window_label: String,
    pub grid: Grid,
}

impl STFTMatrix {
    pub fn abs_max(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// `V_φu(x_m, ξ_k) = Δx Σ_j u(x_j) conj(φ(x_j - x_m)) e^{-i x_j ξ_k}`,
/// one fast transform per spatial shift, periodic wrap of the window.
pub fn stft(u: &SampledSignal, phi: &Window) -> Result<STFTMatrix> {
    if u.grid != phi.grid() {
        return Err(GaborError::GridMismatch(
            "signal and window live on different grids".into(),
        ));
    }
    let grid = u.grid;
    let n = grid.n();
    let values: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let t = Transform::new(grid);
            let mut buf = stft_row_input(u, phi, m);
            t.forward(&mut buf);
            buf
        })
        .collect();
    Ok(STFTMatrix {
        phase_grid: PhaseGrid::from_grid(grid),
        values,
        window_label: phi.signal.label.clone(),
        grid,
    })
}

/// `u(x_j)·conj(φ(x_j - x_m))` with periodic wrap; index of `φ` at
/// argument `(j-m)Δx` is `(j - m + n/2) mod n`.
fn stft_row_input(u: &SampledSignal, phi: &Window, m: usize) -> Vec<Complex64> {
    let n = u.grid.n();
    (0..n)
        .map(|j| {
            let w = (j + n + n / 2 - m) % n;
            u.values[j] * phi.signal.values[w].conj()
        })
        .collect()
}

/// Rows of the STFT at a subset of spatial shifts (used by Gabor analysis
/// and the phase-space kernel probe); output is indexed like `shifts`.
pub fn stft_rows(u: &SampledSignal, phi: &Window, shifts: &[usize]) -> Result<Vec<Vec<Complex64>>> {
    if u.grid != phi.grid() {
        return Err(GaborError::GridMismatch(
            "signal and window live on different grids".into(),
        ));
    }
    let grid = u.grid;
    Ok(shifts
        .par_iter()
        .map(|&m| {
            let t = Transform::new(grid);
            let mut buf = stft_row_input(u, phi, m);
            t.forward(&mut buf);
            buf
        })
        .collect())
}

/// Inversion: `(2π)^{-1} ΣΣ F[m][k] Π(x_m,ξ_k)φ ΔxΔξ`. With
/// `F = stft(u, φ)` and ‖φ‖ = 1 this reconstructs `u` exactly on the grid.
pub fn stft_adjoint(f: &STFTMatrix, phi: &Window) -> Result<SampledSignal> {
    if f.grid != phi.grid() {
        return Err(GaborError::GridMismatch(
            "matrix and window live on different grids".into(),
        ));
    }
    if !phi.is_normalized() {
        return Err(GaborError::UnnormalizedWindow { norm: phi.l2_norm });
    }
    let grid = f.grid;
    let n = grid.n();
    let dx = grid.dx();
    let partials: Vec<Vec<Complex64>> = f
        .values
        .par_iter()
        .enumerate()
        .map(|(m, row)| {
            let t = Transform::new(grid);
            let mut buf = row.clone();
            // (2π)^{-1} Δξ Σ_k F[m][k] e^{i x_j ξ_k}
            t.inverse(&mut buf);
            let mut out = vec![Complex64::ZERO; n];
            for j in 0..n {
                let w = (j + n + n / 2 - m) % n;
                out[j] = buf[j] * phi.signal.values[w] * dx;
            }
            out
        })
        .collect();
    let mut acc = vec![Complex64::ZERO; n];
    for part in partials {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    SampledSignal::new(grid, acc, "stft_adjoint")
}

/// Cross-Wigner distribution
/// `W(f,g)(x,ξ) = ∫ f(x+τ/2) conj(g(x-τ/2)) e^{-iτξ} dτ` on the phase
/// grid via the substitution τ = 2t and one FFT per spatial point.
///
/// The discrete values are Ξ-periodic in ξ; for signals concentrated well
/// inside the domain the aliased copies are negligible.
pub fn wigner(f: &SampledSignal, g: &SampledSignal) -> Result<STFTMatrix> {
    if f.grid != g.grid {
        return Err(GaborError::GridMismatch(
            "Wigner arguments live on different grids".into(),
        ));
    }
    let grid = f.grid;
    let n = grid.n();
    let dx = grid.dx();
    let values: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let t = Transform::new(grid);
            let mut h: Vec<Complex64> = (0..n)
                .map(|j| {
                    let a = (m + j) % n;
                    let b = (m + n - j % n) % n;
                    f.values[a] * g.values[b].conj()
                })
                .collect();
            t.fft_raw(&mut h);
            (0..n)
                .map(|k| 2.0 * dx * h[(2 * k) % n])
                .collect()
        })
        .collect();
    Ok(STFTMatrix {
        phase_grid: PhaseGrid::from_grid(grid),
        values,
        window_label: format!("wigner({},{})", f.label, g.label),
        grid,
    })
}

/// Circular 2D convolution of a phase-space field with a kernel given
/// as a function of the offset (Δx·di, Δξ·dk), quadrature-weighted:
/// `(f∗g)(z) = ΣΣ f(z−w) g(w) Δx Δξ`. Offsets wrap periodically.
pub fn convolve_field(f: &STFTMatrix, g: impl Fn(f64, f64) -> f64) -> STFTMatrix {
    let grid = f.grid;
    let n = grid.n();
    let signed = |i: usize| -> f64 {
        if i <= n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        }
    };
    let mut fa: Vec<Vec<Complex64>> = f.values.clone();
    let mut ga: Vec<Vec<Complex64>> = (0..n)
        .map(|di| {
            (0..n)
                .map(|dk| {
                    Complex64::new(g(signed(di) * grid.dx(), signed(dk) * grid.dxi()), 0.0)
                })
                .collect()
        })
        .collect();
    fft2_in_place(&mut fa, grid, true);
    fft2_in_place(&mut ga, grid, true);
    for (fr, gr) in fa.iter_mut().zip(&ga) {
        for (fv, gv) in fr.iter_mut().zip(gr) {
            *fv *= gv;
        }
    }
    fft2_in_place(&mut fa, grid, false);
    let scale = grid.dx() * grid.dxi() / (n as f64 * n as f64);
    for row in fa.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    STFTMatrix {
        phase_grid: f.phase_grid.clone(),
        values: fa,
        window_label: f.window_label.clone(),
        grid,
    }
}

/// In-place 2D FFT over rows then columns, unnormalized.
fn fft2_in_place(a: &mut [Vec<Complex64>], grid: Grid, forward: bool) {
    let n = grid.n();
    let run = |t: &Transform, buf: &mut [Complex64]| {
        if forward {
            t.fft_raw(buf);
        } else {
            t.ifft_raw(buf);
        }
    };
    a.par_iter_mut().for_each_init(
        || Transform::new(grid),
        |t, row| run(t, row),
    );
    // Columns.
    let cols: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map_init(
            || Transform::new(grid),
            |t, k| {
                let mut buf: Vec<Complex64> = (0..n).map(|m| a[m][k]).collect();
                run(t, &mut buf);
                buf
            },
        )
        .collect();
    for m in 0..n {
        for k in 0..n {
            a[m][k] = cols[k][m];
        }
    }
}

/// Generators of the metaplectic representation used for covariance
/// tests; each carries its 2×2 symplectic matrix acting on (x, ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetaplecticElement {
    /// χ: (x, ξ) ↦ (ξ, -x); U = (2π)^{-1/2} F.
    Fourier,
    /// χ: (x, ξ) ↦ (x, ξ + cx); U = multiplication by e^{icx²/2}.
    ChirpMul { c: f64 },
    /// χ: (x, ξ) ↦ (x/s, sξ); U f(x) = √s f(sx), s > 0.
    Dilation { s: f64 },
}

impl MetaplecticElement {
    /// The symplectic matrix [[a, b], [c, d]] mapping (x, ξ).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        match self {
            MetaplecticElement::Fourier => [[0.0, 1.0], [-1.0, 0.0]],
            MetaplecticElement::ChirpMul { c } => [[1.0, 0.0], [*c, 1.0]],
            MetaplecticElement::Dilation { s } => [[1.0 / s, 0.0], [0.0, *s]],
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = self.matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Applies a metaplectic generator to a signal.
pub fn metaplectic_apply(u: &SampledSignal, elem: MetaplecticElement) -> Result<SampledSignal> {
    let grid = u.grid;
    let n = grid.n();
    match elem {
        MetaplecticElement::Fourier => {
            let f = dft(u);
            Ok(f.scale(Complex64::new(1.0 / (2.0 * PI).sqrt(), 0.0)))
        }
        MetaplecticElement::ChirpMul { c } => {
            let values = (0..n)
                .map(|j| {
                    let x = grid.x(j);
                    u.values[j] * Complex64::from_polar(1.0, c * x * x / 2.0)
                })
                .collect();
            SampledSignal::new(grid, values, format!("chirp_mul({c})∘{}", u.label))
        }
        MetaplecticElement::Dilation { s } => {
            if !(s > 0.0) {
                return Err(GaborError::InvalidSignal("dilation requires s > 0".into()));
            }
            let spectrum = dft(u);
            if s > 1.0 {
                // u(sx) stretches the spectrum by s; demand the content
                // above Ξ/s is negligible.
                let cutoff = grid.freq_max() / s;
                let total: f64 = spectrum.values.iter().map(|v| v.norm_sqr()).sum();
                let high: f64 = (0..n)
                    .filter(|&k| grid.xi(k).abs() > cutoff)
                    .map(|k| spectrum.values[k].norm_sqr())
                    .sum();
                if total > 0.0 && high / total > 1e-8 {
                    return Err(GaborError::Aliasing(format!(
                        "dilation({s}): spectral energy fraction {:.3e} above Ξ/s",
                        high / total
                    )));
                }
            }
            // Band-limited evaluation of u at s·x_j from the DFT samples.
            // Points s·x_j outside [-L/2, L/2) are set to zero: the
            // interpolant is L-periodic there and would alias spatially.
            let half = grid.length() / 2.0;
            let scale = grid.dxi() / (2.0 * PI) * s.sqrt();
            let values = (0..n)
                .map(|j| {
                    let y = s * grid.x(j);
                    if y < -half || y >= half {
                        return Complex64::ZERO;
                    }
                    let mut acc = Complex64::ZERO;
                    for k in 0..n {
                        acc += spectrum.values[k] * Complex64::from_polar(1.0, y * grid.xi(k));
                    }
                    acc * scale
                })
                .collect();
            SampledSignal::new(grid, values, format!("dilation({s})∘{}", u.label))
        }
    }
}
