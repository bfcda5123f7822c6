//! File formats: signal CSV, Gabor coefficient CSV, PGM heatmaps with
//! JSON sidecars, wave front and microlocality reports, decay-profile
//! dumps.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GaborError, Result};
use crate::gabor::GaborCoefficients;
use crate::grid::{make_grid, SampledSignal};
use crate::operators::MicrolocalReport;
use crate::tf::STFTMatrix;
use crate::wavefront::{DecayProfile, Provenance, WaveFrontEstimate};

const SIGNAL_MAGIC: &str = "# gabor-wf signal v1";

/// Writes a signal as CSV with a self-describing header; numbers carry
/// 17 significant digits so the round-trip is exact.
pub fn write_signal(path: &Path, s: &SampledSignal) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "{SIGNAL_MAGIC}, n={}, L={:.16e}, label={}\n",
        s.grid.n(),
        s.grid.length(),
        s.label
    ));
    out.push_str("index,re,im\n");
    for (j, v) in s.values.iter().enumerate() {
        out.push_str(&format!("{j},{:.16e},{:.16e}\n", v.re, v.im));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_signal(path: &Path) -> Result<SampledSignal> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| GaborError::Parse("empty signal file".into()))?;
    if !header.starts_with(SIGNAL_MAGIC) {
        return Err(GaborError::Parse(format!(
            "not a signal file (header {header:?})"
        )));
    }
    let mut n: Option<usize> = None;
    let mut length: Option<f64> = None;
    let mut label = String::new();
    for part in header.split(", ").skip(1) {
        if let Some(v) = part.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = part.strip_prefix("L=") {
            length = v.parse().ok();
        } else if let Some(v) = part.strip_prefix("label=") {
            // The label may itself contain ", ", so take the rest.
            let idx = header.find("label=").unwrap();
            label = header[idx + 6..].to_string();
            let _ = v;
            break;
        }
    }
    let n = n.ok_or_else(|| GaborError::Parse("missing n in header".into()))?;
    let length = length.ok_or_else(|| GaborError::Parse("missing L in header".into()))?;
    let grid = make_grid(n, length)?;
    let columns = lines
        .next()
        .ok_or_else(|| GaborError::Parse("missing column row".into()))?;
    if columns.trim() != "index,re,im" {
        return Err(GaborError::Parse(format!("unexpected columns {columns:?}")));
    }
    let mut values = vec![Complex64::ZERO; n];
    let mut seen = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.splitn(3, ',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| GaborError::Parse(format!("short row {line:?}")))?
                .parse()
                .map_err(|_| GaborError::Parse(format!("bad number in {line:?}")))
        };
        let idx = parse(it.next())? as usize;
        let re = parse(it.next())?;
        let im = parse(it.next())?;
        if idx >= n {
            return Err(GaborError::Parse(format!("index {idx} out of range")));
        }
        values[idx] = Complex64::new(re, im);
        seen += 1;
    }
    if seen != n {
        return Err(GaborError::Parse(format!("expected {n} rows, got {seen}")));
    }
    SampledSignal::new(grid, values, label)
}

#[derive(Serialize)]
struct HeatmapSidecar {
    vmin: f64,
    vmax: f64,
    n_x: usize,
    n_xi: usize,
    #[serde(rename = "L")]
    length: f64,
}

/// 16-bit PGM magnitude heatmap (rows: ξ from high to low, columns: x)
/// plus a `<path>.json` sidecar recording the linear scaling.
pub fn write_heatmap_pgm(path: &Path, m: &STFTMatrix) -> Result<()> {
    let n_x = m.phase_grid.x_axis.len();
    let n_xi = m.phase_grid.xi_axis.len();
    let mags: Vec<Vec<f64>> = m
        .values
        .iter()
        .map(|row| row.iter().map(|v| v.norm()).collect())
        .collect();
    let vmax = mags
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let vmin = mags.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };
    let mut data = Vec::with_capacity(2 * n_x * n_xi + 64);
    data.extend_from_slice(format!("P5\n{n_x} {n_xi}\n65535\n").as_bytes());
    for k_rev in (0..n_xi).rev() {
        for row in mags.iter() {
            let t = ((row[k_rev] - vmin) / span * 65535.0).round() as u16;
            data.extend_from_slice(&t.to_be_bytes());
        }
    }
    fs::write(path, data)?;
    let sidecar = HeatmapSidecar {
        vmin,
        vmax,
        n_x,
        n_xi,
        length: m.grid.length(),
    };
    let mut json = serde_json::to_string_pretty(&sidecar).expect("serialize");
    json.push('\n');
    fs::write(path.with_extension("pgm.json"), json)?;
    Ok(())
}

/// Gabor coefficients as CSV `j,k,lambda_x,lambda_xi,re,im`.
pub fn write_gabor_csv(path: &Path, c: &GaborCoefficients) -> Result<()> {
    let mut out = String::from("j,k,lambda_x,lambda_xi,re,im\n");
    for (j, row) in c.values.iter().enumerate() {
        let lx = c.lattice.lambda_x(j);
        for (k, v) in row.iter().enumerate() {
            out.push_str(&format!(
                "{j},{k},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                lx,
                c.lattice.lambda_xi(k),
                v.re,
                v.im
            ));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[derive(Serialize)]
struct SectorEntry {
    i: usize,
    sigma: Option<f64>,
    residual: Option<f64>,
    floor_hit: bool,
    n_points: usize,
}

#[derive(Serialize)]
struct WfReport<'a> {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N_thr")]
    n_thr: f64,
    singular: Vec<usize>,
    sectors: Vec<SectorEntry>,
    indeterminate: Vec<usize>,
    provenance: &'a Provenance,
}

/// Serializes a wave front estimate; the sector list is exhaustive and
/// ordered, so identical inputs give byte-identical output.
pub fn wavefront_report_string(est: &WaveFrontEstimate) -> String {
    let report = WfReport {
        k: est.partition.k_sectors,
        n_thr: est.n_thr,
        singular: est.singular.iter().copied().collect(),
        sectors: est
            .profile
            .sectors
            .iter()
            .map(|s| SectorEntry {
                i: s.sector,
                sigma: s.sigma,
                residual: s.residual,
                floor_hit: s.floor_hit,
                n_points: s.n_points,
            })
            .collect(),
        indeterminate: est
            .profile
            .sectors
            .iter()
            .filter(|s| s.indeterminate)
            .map(|s| s.sector)
            .collect(),
        provenance: &est.provenance,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("serialize");
    json.push('\n');
    json
}

pub fn write_wavefront_json(path: &Path, est: &WaveFrontEstimate) -> Result<()> {
    fs::write(path, wavefront_report_string(est))?;
    Ok(())
}

/// Per-sector ray dump `sector,shell,r,logM`.
pub fn write_rays_csv(path: &Path, profile: &DecayProfile) -> Result<()> {
    let mut out = String::from("sector,shell,r,logM\n");
    for s in &profile.sectors {
        for &(shell, r, m) in &s.shells {
            out.push_str(&format!("{},{shell},{:.16e},{:.16e}\n", s.sector, r, m.ln()));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Kernel decay probe `shell,offset_r,logMaxK`.
pub fn write_kernel_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from("shell,offset_r,logMaxK\n");
    for (shell, &(r, logm)) in points.iter().enumerate() {
        out.push_str(&format!("{shell},{:.16e},{:.16e}\n", r, logm));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn microlocal_report_string(report: &MicrolocalReport) -> String {
    let mut json = serde_json::to_string_pretty(report).expect("serialize");
    json.push('\n');
    json
}

pub fn write_microlocal_json(path: &Path, report: &MicrolocalReport) -> Result<()> {
    fs::write(path, microlocal_report_string(report))?;
    Ok(())
}

/// Writes text atomically enough for our purposes and creates parents.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabor::{gabor_analysis, make_lattice};
    use crate::grid::{synthesize, SignalKind};
    use crate::tf::{stft, Window};

    #[test]
    fn signal_round_trip_is_exact() {
        let g = make_grid(64, 16.0).unwrap();
        let u = synthesize(&SignalKind::Gaussian { x0: 0.3, xi0: -1.7 }, g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        write_signal(&path, &u).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(back.grid, u.grid);
        assert_eq!(back.label, u.label);
        for (a, b) in back.values.iter().zip(&u.values) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn signal_label_with_commas_survives() {
        let g = make_grid(16, 16.0).unwrap();
        let u = synthesize(&SignalKind::Gaussian { x0: 1.0, xi0: 2.0 }, g).unwrap();
        assert!(u.label.contains(','));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        write_signal(&path, &u).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(back.label, u.label);
    }

    #[test]
    fn read_signal_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "nope\n").unwrap();
        assert!(read_signal(&path).is_err());
        fs::write(&path, "# gabor-wf signal v1, n=16, L=1.6e1, label=x\nindex,re,im\n0,1,2\n")
            .unwrap();
        // Too few rows.
        assert!(read_signal(&path).is_err());
    }

    #[test]
    fn heatmap_has_sidecar_and_correct_size() {
        let g = make_grid(32, 16.0).unwrap();
        let phi =
            Window::normalized(synthesize(&SignalKind::Gaussian { x0: 0.0, xi0: 0.0 }, g).unwrap())
                .unwrap();
        let u = synthesize(&SignalKind::Delta { x0: 0.0 }, g).unwrap();
        let v = stft(&u, &phi).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.pgm");
        write_heatmap_pgm(&path, &v).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n32 32\n65535\n"));
        let header_len = b"P5\n32 32\n65535\n".len();
        assert_eq!(bytes.len(), header_len + 2 * 32 * 32);
        let sidecar: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("map.pgm.json")).unwrap())
                .unwrap();
        assert_eq!(sidecar["n_x"], 32);
        assert_eq!(sidecar["L"], 16.0);
        assert!(sidecar["vmax"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn gabor_csv_format() {
        let g = make_grid(64, 16.0).unwrap();
        let phi =
            Window::normalized(synthesize(&SignalKind::Gaussian { x0: 0.0, xi0: 0.0 }, g).unwrap())
                .unwrap();
        let lat = make_lattice(1.0, 1.0, g).unwrap();
        let u = synthesize(&SignalKind::Hermite { k: 1 }, g).unwrap();
        let c = gabor_analysis(&u, &phi, &lat).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("coeffs.csv");
        write_gabor_csv(&path, &c).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "j,k,lambda_x,lambda_xi,re,im");
        assert_eq!(text.lines().count(), 1 + lat.n_time * lat.n_freq);
    }
}
