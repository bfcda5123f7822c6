//! Shipped symbol suite and samplers onto phase-space grids.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{GaborError, Result};
use crate::grid::Grid;
use crate::wavefront::SampledSymbol;

/// Symbols a(x, ξ) available to the operator module and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// a ≡ 1, order 0.
    One,
    /// a(x, ξ) = x, order 1.
    CoordX,
    /// a(x, ξ) = ξ, order 1.
    CoordXi,
    /// a(x, ξ) = sin x · cos ξ, order 0.
    SinCos,
    /// a(x, ξ) = x² + ξ², order 2 (elliptic).
    Elliptic,
    /// Smooth conic cutoff χ(z) = ψ(|z|)·φ(z/|z|): zero inside radius
    /// `r_on`, one beyond `2·r_on`, angular support [deg_start, deg_end]
    /// degrees (wrapping), optionally symmetrized antipodally. Order 0.
    ConeCutoff {
        deg_start: f64,
        deg_end: f64,
        r_on: f64,
        antipodal: bool,
    },
    /// Compactly concentrated bump e^{−|z|²/2}, order 0.
    GaussianBump,
}

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1, strictly increasing between.
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Angular bump supported on an arc of width `width` starting at
/// `start` (radians), with C^∞ ramps over the first and last quarter.
fn angular_bump(theta: f64, start: f64, width: f64) -> f64 {
    let mut d = (theta - start) % (2.0 * PI);
    if d < 0.0 {
        d += 2.0 * PI;
    }
    if d >= width {
        return 0.0;
    }
    let ramp = 0.25 * width;
    smoothstep(d / ramp) * smoothstep((width - d) / ramp)
}

impl SymbolKind {
    pub fn order(&self) -> f64 {
        match self {
            SymbolKind::One | SymbolKind::SinCos | SymbolKind::GaussianBump => 0.0,
            SymbolKind::ConeCutoff { .. } => 0.0,
            SymbolKind::CoordX | SymbolKind::CoordXi => 1.0,
            SymbolKind::Elliptic => 2.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SymbolKind::One => "one".into(),
            SymbolKind::CoordX => "x".into(),
            SymbolKind::CoordXi => "xi".into(),
            SymbolKind::SinCos => "sincos".into(),
            SymbolKind::Elliptic => "elliptic".into(),
            SymbolKind::ConeCutoff {
                deg_start,
                deg_end,
                r_on,
                antipodal,
            } => format!(
                "cone({deg_start},{deg_end},r_on={r_on}{})",
                if *antipodal { ",antipodal" } else { "" }
            ),
            SymbolKind::GaussianBump => "bump".into(),
        }
    }

    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        match self {
            SymbolKind::One => 1.0,
            SymbolKind::CoordX => x,
            SymbolKind::CoordXi => xi,
            SymbolKind::SinCos => x.sin() * xi.cos(),
            SymbolKind::Elliptic => x * x + xi * xi,
            SymbolKind::ConeCutoff {
                deg_start,
                deg_end,
                r_on,
                antipodal,
            } => {
                let r = (x * x + xi * xi).sqrt();
                let radial = smoothstep(r / r_on - 1.0);
                if radial == 0.0 {
                    return 0.0;
                }
                let theta = xi.atan2(x);
                let start = deg_start.to_radians();
                let mut width = (deg_end - deg_start).to_radians();
                if width <= 0.0 {
                    width += 2.0 * PI;
                }
                let mut ang = angular_bump(theta, start, width);
                if *antipodal {
                    ang = ang.max(angular_bump(theta + PI, start, width));
                }
                radial * ang
            }
            SymbolKind::GaussianBump => (-(x * x + xi * xi) / 2.0).exp(),
        }
    }
}

/// Parses a CLI symbol spec: a plain name or `cone:START,END[,R_ON][,anti]`.
pub fn parse_symbol(spec: &str) -> Result<SymbolKind> {
    match spec {
        "one" => return Ok(SymbolKind::One),
        "x" => return Ok(SymbolKind::CoordX),
        "xi" => return Ok(SymbolKind::CoordXi),
        "sincos" => return Ok(SymbolKind::SinCos),
        "elliptic" => return Ok(SymbolKind::Elliptic),
        "bump" => return Ok(SymbolKind::GaussianBump),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("cone:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() < 2 {
            return Err(GaborError::Parse(format!(
                "cone symbol needs start,end angles: {spec}"
            )));
        }
        let deg_start: f64 = parts[0]
            .parse()
            .map_err(|_| GaborError::Parse(format!("bad angle in {spec}")))?;
        let deg_end: f64 = parts[1]
            .parse()
            .map_err(|_| GaborError::Parse(format!("bad angle in {spec}")))?;
        let mut r_on = 2.0;
        let mut antipodal = false;
        for p in &parts[2..] {
            if *p == "anti" || *p == "antipodal" {
                antipodal = true;
            } else {
                r_on = p
                    .parse()
                    .map_err(|_| GaborError::Parse(format!("bad cone radius in {spec}")))?;
            }
        }
        return Ok(SymbolKind::ConeCutoff {
            deg_start,
            deg_end,
            r_on,
            antipodal,
        });
    }
    Err(GaborError::Parse(format!("unknown symbol: {spec}")))
}

/// Samples a symbol on the signal grid's full phase grid (n × n).
pub fn sample_phase_grid(kind: &SymbolKind, grid: Grid) -> Result<SampledSymbol> {
    let x_axis = grid.x_axis();
    let xi_axis = grid.xi_axis();
    let values = x_axis
        .iter()
        .map(|&x| {
            xi_axis
                .iter()
                .map(|&xi| Complex64::new(kind.eval(x, xi), 0.0))
                .collect()
        })
        .collect();
    SampledSymbol::new(x_axis, xi_axis, values, kind.order(), kind.label())
}

/// Samples a symbol on the refined midpoint grid used by the Weyl
/// quantization: 2n spatial points at spacing Δx/2 (covering all
/// midpoints (x_p + x_q)/2) and the full frequency grid.
pub fn sample_weyl_grid(kind: &SymbolKind, grid: Grid) -> Result<SampledSymbol> {
    let n = grid.n();
    let half_dx = grid.dx() / 2.0;
    let x_axis: Vec<f64> = (0..2 * n)
        .map(|s| -grid.length() / 2.0 + s as f64 * half_dx)
        .collect();
    let xi_axis = grid.xi_axis();
    let values = x_axis
        .iter()
        .map(|&x| {
            xi_axis
                .iter()
                .map(|&xi| Complex64::new(kind.eval(x, xi), 0.0))
                .collect()
        })
        .collect();
    SampledSymbol::new(x_axis, xi_axis, values, kind.order(), kind.label())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn smoothstep_is_a_step() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smoothstep(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn cone_cutoff_support() {
        let kind = SymbolKind::ConeCutoff {
            deg_start: 0.0,
            deg_end: 45.0,
            r_on: 2.0,
            antipodal: false,
        };
        // Zero inside r_on and outside the arc.
        assert_eq!(kind.eval(1.0, 0.5), 0.0);
        assert_eq!(kind.eval(10.0, -1.0), 0.0);
        assert_eq!(kind.eval(-10.0, 5.0), 0.0);
        // One on the plateau beyond 2·r_on.
        let th = 22.5_f64.to_radians();
        let v = kind.eval(10.0 * th.cos(), 10.0 * th.sin());
        assert!((v - 1.0).abs() < 1e-12, "v={v}");
        // Antipodal version mirrors.
        let anti = SymbolKind::ConeCutoff {
            deg_start: 0.0,
            deg_end: 45.0,
            r_on: 2.0,
            antipodal: true,
        };
        let w = anti.eval(-10.0 * th.cos(), -10.0 * th.sin());
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_cutoff_wrapping_arc() {
        // Arc from 350° to 10° crosses zero.
        let kind = SymbolKind::ConeCutoff {
            deg_start: 350.0,
            deg_end: 370.0,
            r_on: 2.0,
            antipodal: false,
        };
        assert!(kind.eval(10.0, 0.0) > 0.99);
        assert_eq!(kind.eval(0.0, 10.0), 0.0);
    }

    #[test]
    fn symbol_orders_and_sup_constants() {
        let g = make_grid(64, 32.0).unwrap();
        let one = sample_phase_grid(&SymbolKind::One, g).unwrap();
        assert!((one.sup_constant - 1.0).abs() < 1e-15);
        let ell = sample_phase_grid(&SymbolKind::Elliptic, g).unwrap();
        // (x²+ξ²)/⟨z⟩² < 1 everywhere.
        assert!(ell.sup_constant < 1.0);
        let x = sample_phase_grid(&SymbolKind::CoordX, g).unwrap();
        assert!(x.sup_constant < 1.0);
    }

    #[test]
    fn weyl_grid_has_refined_axis() {
        let g = make_grid(64, 32.0).unwrap();
        let a = sample_weyl_grid(&SymbolKind::SinCos, g).unwrap();
        assert_eq!(a.x_axis.len(), 128);
        assert_eq!(a.xi_axis.len(), 64);
        assert!((a.x_axis[1] - a.x_axis[0] - g.dx() / 2.0).abs() < 1e-15);
        // Even-index samples coincide with the signal grid.
        assert!((a.x_axis[2] - g.x(1)).abs() < 1e-12);
    }

    #[test]
    fn parse_symbol_specs() {
        assert_eq!(parse_symbol("one").unwrap(), SymbolKind::One);
        assert_eq!(parse_symbol("sincos").unwrap(), SymbolKind::SinCos);
        match parse_symbol("cone:0,45").unwrap() {
            SymbolKind::ConeCutoff {
                deg_start,
                deg_end,
                r_on,
                antipodal,
            } => {
                assert_eq!(deg_start, 0.0);
                assert_eq!(deg_end, 45.0);
                assert_eq!(r_on, 2.0);
                assert!(!antipodal);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_symbol("cone:10,80,4,anti").unwrap(),
            SymbolKind::ConeCutoff {
                r_on,
                antipodal: true,
                ..
            } if r_on == 4.0
        ));
        assert!(parse_symbol("nope").is_err());
        assert!(parse_symbol("cone:5").is_err());
    }
}
