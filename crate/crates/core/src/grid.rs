//! Uniform periodic grids, discretized distributions and the centered
//! discrete Fourier transform in the angular-frequency convention
//! `f̂(ξ) = ∫ f(x) e^{-ixξ} dx`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{GaborError, Result};

/// Uniform periodic grid on `[-L/2, L/2)` with `n` samples.
///
/// Grid points are `x_j = -L/2 + jΔx` and frequency points
/// `ξ_k = (k - n/2)Δξ` with `Δξ = 2π/L`, so `Δx·Δξ·n = 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Spatial sample spacing Δx = L/n.
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Frequency sample spacing Δξ = 2π/L.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest representable frequency Ξ = πn/L.
    pub fn freq_max(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn xi(&self, k: usize) -> f64 {
        (k as f64 - self.n as f64 / 2.0) * self.dxi()
    }

    pub fn x_axis(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn xi_axis(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.xi(k)).collect()
    }
}

/// Builds a grid; `n` must be a power of two, at least 16, and `length > 0`.
pub fn make_grid(n: usize, length: f64) -> Result<Grid> {
    if n < 16 || !n.is_power_of_two() {
        return Err(GaborError::InvalidGrid(format!(
            "sample count must be a power of two ≥ 16, got {n}"
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(GaborError::InvalidGrid(format!(
            "domain length must be positive and finite, got {length}"
        )));
    }
    Ok(Grid { n, length })
}

/// Complex samples of a distribution on a [`Grid`].
#[derive(Debug, Clone)]
pub struct SampledSignal {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub label: String,
}

impl SampledSignal {
    pub fn new(grid: Grid, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(GaborError::InvalidSignal(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GaborError::InvalidSignal("non-finite sample".into()));
        }
        Ok(SampledSignal {
            grid,
            values,
            label: label.into(),
        })
    }

    pub fn zero(grid: Grid) -> Self {
        SampledSignal {
            grid,
            values: vec![Complex64::ZERO; grid.n()],
            label: "zero".into(),
        }
    }

    /// Discrete L² norm `(Σ|v_j|² Δx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.dx()).sqrt()
    }

    /// Quadrature inner product `(f, g) = Σ f_j conj(g_j) Δx`.
    pub fn inner(&self, other: &SampledSignal) -> Complex64 {
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * self.grid.dx()
    }

    pub fn scale(&self, c: Complex64) -> SampledSignal {
        SampledSignal {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            label: self.label.clone(),
        }
    }
}

/// Standard test signals.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    /// Point mass at `x0`; discretized as `1/Δx` at the nearest grid point.
    Delta { x0: f64 },
    /// `e^{i x ξ0}`.
    PlaneWave { xi0: f64 },
    /// `e^{i c x²/2}`, `c ≠ 0`.
    Chirp { c: f64 },
    /// Unit-norm Gaussian centered at the phase-space point `(x0, xi0)`:
    /// `π^{-1/4} e^{i x ξ0} e^{-(x-x0)²/2}`.
    Gaussian { x0: f64, xi0: f64 },
    /// `k`-th L²-normalized Hermite function.
    Hermite { k: usize },
    /// Time-frequency shift `Π(z) = M_ξ T_x` of another kind, with
    /// periodic wrap of the translation.
    PhaseShift {
        inner: Box<SignalKind>,
        x0: f64,
        xi0: f64,
    },
}

impl SignalKind {
    pub fn label(&self) -> String {
        match self {
            SignalKind::Delta { x0 } => format!("delta({x0})"),
            SignalKind::PlaneWave { xi0 } => format!("plane_wave({xi0})"),
            SignalKind::Chirp { c } => format!("chirp({c})"),
            SignalKind::Gaussian { x0, xi0 } => format!("gaussian({x0},{xi0})"),
            SignalKind::Hermite { k } => format!("hermite({k})"),
            SignalKind::PhaseShift { inner, x0, xi0 } => {
                format!("shift({},{})∘{}", x0, xi0, inner.label())
            }
        }
    }
}

/// Synthesizes a standard signal on `grid`.
pub fn synthesize(kind: &SignalKind, grid: Grid) -> Result<SampledSignal> {
    let n = grid.n();
    let dx = grid.dx();
    let label = kind.label();
    let values = match kind {
        SignalKind::Delta { x0 } => {
            if !(*x0 >= -grid.length() / 2.0 && *x0 < grid.length() / 2.0) {
                return Err(GaborError::InvalidSignal(format!(
                    "delta center {x0} outside [-L/2, L/2)"
                )));
            }
            let j = ((x0 + grid.length() / 2.0) / dx).round() as usize % n;
            let mut v = vec![Complex64::ZERO; n];
            v[j] = Complex64::new(1.0 / dx, 0.0);
            v
        }
        SignalKind::PlaneWave { xi0 } => {
            if xi0.abs() >= grid.freq_max() {
                return Err(GaborError::Aliasing(format!(
                    "plane-wave frequency {xi0} outside the representable band (±{})",
                    grid.freq_max()
                )));
            }
            (0..n)
                .map(|j| Complex64::from_polar(1.0, grid.x(j) * xi0))
                .collect()
        }
        SignalKind::Chirp { c } => {
            if *c == 0.0 {
                return Err(GaborError::InvalidSignal(
                    "chirp rate c must be nonzero".into(),
                ));
            }
            (0..n)
                .map(|j| {
                    let x = grid.x(j);
                    Complex64::from_polar(1.0, c * x * x / 2.0)
                })
                .collect()
        }
        SignalKind::Gaussian { x0, xi0 } => {
            let amp = PI.powf(-0.25);
            (0..n)
                .map(|j| {
                    let x = grid.x(j);
                    let env = amp * (-(x - x0) * (x - x0) / 2.0).exp();
                    Complex64::from_polar(env, x * xi0)
                })
                .collect()
        }
        SignalKind::Hermite { k } => hermite_values(grid, *k),
        SignalKind::PhaseShift { inner, x0, xi0 } => {
            let base = synthesize(inner, grid)?;
            let shift = (x0 / dx).round() as i64;
            (0..n)
                .map(|j| {
                    let src = (j as i64 - shift).rem_euclid(n as i64) as usize;
                    base.values[src] * Complex64::from_polar(1.0, grid.x(j) * xi0)
                })
                .collect()
        }
    };
    SampledSignal::new(grid, values, label)
}

/// L²-normalized Hermite functions via the stable recurrence
/// `h_k = x√(2/k) h_{k-1} - √((k-1)/k) h_{k-2}`.
fn hermite_values(grid: Grid, k: usize) -> Vec<Complex64> {
    let n = grid.n();
    let mut prev: Vec<f64> = vec![0.0; n];
    let mut cur: Vec<f64> = (0..n)
        .map(|j| {
            let x = grid.x(j);
            PI.powf(-0.25) * (-x * x / 2.0).exp()
        })
        .collect();
    for order in 1..=k {
        let a = (2.0 / order as f64).sqrt();
        let b = ((order as f64 - 1.0) / order as f64).sqrt();
        let next: Vec<f64> = (0..n)
            .map(|j| a * grid.x(j) * cur[j] - b * prev[j])
            .collect();
        prev = cur;
        cur = next;
    }
    cur.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
}

/// FFT machinery for the centered transform on a grid.
///
/// Forward: `f̂(ξ_k) = Δx Σ_j f(x_j) e^{-i x_j ξ_k}`, computed as a plain
/// FFT with `(-1)^j` / `(-1)^k` centering factors (valid for n a power of
/// two ≥ 16, where n/2 is even).
pub struct Transform {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        Transform {
            grid,
            forward,
            inverse,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn sign(j: usize) -> f64 {
        if j % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// In place: `buf[k] ← Δx Σ_j buf[j] e^{-i x_j ξ_k}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        let dx = self.grid.dx();
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= Self::sign(j);
        }
        self.forward.process(buf);
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= Self::sign(k) * dx;
        }
    }

    /// In place: `buf[j] ← (2π)^{-1} Δξ Σ_k buf[k] e^{+i x_j ξ_k}`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        let scale = self.grid.dxi() / (2.0 * PI);
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= Self::sign(k);
        }
        self.inverse.process(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= Self::sign(j) * scale;
        }
    }

    /// In place: `buf[j] ← Σ_k buf[k] e^{+i x_j ξ_k}` (no quadrature factor).
    pub fn inverse_raw(&self, buf: &mut [Complex64]) {
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= Self::sign(k);
        }
        self.inverse.process(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= Self::sign(j);
        }
    }

    /// Plain length-n FFT `out[k] = Σ_j buf[j] e^{-2πijk/n}`, in place.
    pub fn fft_raw(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Plain unnormalized inverse `out[j] = Σ_k buf[k] e^{+2πijk/n}`, in place.
    pub fn ifft_raw(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

/// Fourier transform sampled at the grid frequencies.
pub fn dft(signal: &SampledSignal) -> SampledSignal {
    let t = Transform::new(signal.grid);
    let mut buf = signal.values.clone();
    t.forward(&mut buf);
    SampledSignal {
        grid: signal.grid,
        values: buf,
        label: format!("dft({})", signal.label),
    }
}

/// Inverse Fourier transform with the `(2π)^{-1}` factor.
pub fn inverse_dft(signal: &SampledSignal) -> SampledSignal {
    let t = Transform::new(signal.grid);
    let mut buf = signal.values.clone();
    t.inverse(&mut buf);
    SampledSignal {
        grid: signal.grid,
        values: buf,
        label: format!("idft({})", signal.label),
    }
}
