//! End-to-end checks of the `gabor-wf` binary: exit-code contract, file
//! formats, and a few pipelines, plus property tests of the library
//! invariants the CLI relies on.

use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gabor-wf"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("spawn gabor-wf")
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("no exit code")
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let out = out.to_str().unwrap();

    let r = run(&["no-such-command"]);
    assert_eq!(code(&r), 1);

    let r = run(&["synthesize", "--kind", "chirp", "--c", "0", "-o", out]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("nonzero"));

    let r = run(&["wavefront", "--input", "/nonexistent/u.csv", "-o", out]);
    assert_eq!(code(&r), 1);

    let r = run(&["verify", "no-such-suite"]);
    assert_eq!(code(&r), 1);

    let r = run(&["--help"]);
    assert_eq!(code(&r), 0);
}

#[test]
fn apply_requires_exactly_one_operator() {
    let dir = tempdir().unwrap();
    let sig = dir.path().join("u.csv");
    let sig = sig.to_str().unwrap();
    let out = dir.path().join("o.csv");
    let out = out.to_str().unwrap();
    assert_eq!(code(&run(&["synthesize", "--kind", "delta", "-o", sig])), 0);

    let r = run(&["apply", "--input", sig, "-o", out]);
    assert_eq!(code(&r), 1, "no operator given");
    let r = run(&[
        "apply", "--input", sig, "--weyl", "one", "--localize", "one", "-o", out,
    ]);
    assert_eq!(code(&r), 1, "two operators given");
}

#[test]
fn verification_failure_exits_2() {
    // At the critical density the lower frame bound collapses, so the
    // plain frames suite (no expected-fail flag) must report failure.
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("critical.toml");
    std::fs::write(&cfg, "alpha_beta = 6.283185307179586\n").unwrap();
    let r = run(&["--config", cfg.to_str().unwrap(), "verify", "frames"]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stdout).contains("FAILURES present"));
}

#[test]
fn critical_density_expected_fail_mode_passes() {
    let r = run(&["verify", "frames", "--alpha-beta-product", "6.28"]);
    assert_eq!(code(&r), 0);
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("collapses"), "stdout:\n{text}");
}

#[test]
fn synthesize_writes_documented_header() {
    let dir = tempdir().unwrap();
    let sig = dir.path().join("delta.csv");
    assert_eq!(
        code(&run(&["synthesize", "--kind", "delta", "-o", sig.to_str().unwrap()])),
        0
    );
    let text = std::fs::read_to_string(&sig).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# gabor-wf signal v1"), "header: {first}");
    assert!(first.contains("n=1024"), "header: {first}");
    // And the file round-trips through the reader.
    let back = gabor_wf::io::read_signal(Path::new(&sig)).unwrap();
    assert_eq!(back.grid.n(), 1024);
    assert_eq!(back.label, "delta(0)");
}

#[test]
fn weyl_symbol_one_is_the_identity() {
    let dir = tempdir().unwrap();
    let sig = dir.path().join("u.csv");
    let out = dir.path().join("au.csv");
    assert_eq!(
        code(&run(&["synthesize", "--kind", "gaussian", "-o", sig.to_str().unwrap()])),
        0
    );
    assert_eq!(
        code(&run(&[
            "apply",
            "--input",
            sig.to_str().unwrap(),
            "--weyl",
            "one",
            "-o",
            out.to_str().unwrap(),
        ])),
        0
    );
    let u = gabor_wf::io::read_signal(&sig).unwrap();
    let au = gabor_wf::io::read_signal(&out).unwrap();
    let num: f64 = u
        .values
        .iter()
        .zip(&au.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(num / u.l2_norm() <= 1e-10, "rel error {}", num / u.l2_norm());
}

#[test]
fn gabor_and_stft_wavefronts_agree_on_delta() {
    let dir = tempdir().unwrap();
    let sig = dir.path().join("delta.csv");
    let stft_json = dir.path().join("stft.json");
    let gabor_json = dir.path().join("gabor.json");
    assert_eq!(
        code(&run(&["synthesize", "--kind", "delta", "-o", sig.to_str().unwrap()])),
        0
    );
    assert_eq!(
        code(&run(&[
            "wavefront",
            "--input",
            sig.to_str().unwrap(),
            "-o",
            stft_json.to_str().unwrap(),
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "wavefront",
            "--input",
            sig.to_str().unwrap(),
            "--mode",
            "gabor",
            "-o",
            gabor_json.to_str().unwrap(),
        ])),
        0
    );
    let parse = |p: &Path| -> Vec<usize> {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["singular"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect()
    };
    let s = parse(&stft_json);
    let g = parse(&gabor_json);
    assert!(!s.is_empty() && !g.is_empty());
    // The lattice sees a subset of the continuum singular sectors.
    assert!(g.iter().all(|x| s.contains(x)), "gabor {g:?} vs stft {s:?}");
}

#[test]
fn heatmap_is_rejected_in_gabor_mode() {
    let dir = tempdir().unwrap();
    let sig = dir.path().join("u.csv");
    assert_eq!(
        code(&run(&["synthesize", "--kind", "delta", "-o", sig.to_str().unwrap()])),
        0
    );
    let r = run(&[
        "wavefront",
        "--input",
        sig.to_str().unwrap(),
        "--mode",
        "gabor",
        "--heatmap",
        dir.path().join("h.pgm").to_str().unwrap(),
        "-o",
        dir.path().join("w.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 1);
}

mod properties {
    use num_complex::Complex64;
    use proptest::prelude::*;

    use gabor_wf::grid::{make_grid, synthesize, SampledSignal, SignalKind};
    use gabor_wf::tf::{stft, Window};

    fn window(n: usize, l: f64) -> Window {
        let grid = make_grid(n, l).unwrap();
        Window::normalized(
            synthesize(&SignalKind::Gaussian { x0: 0.0, xi0: 0.0 }, grid).unwrap(),
        )
        .unwrap()
    }

    fn signal(n: usize, l: f64, raw: &[(f64, f64)]) -> SampledSignal {
        let grid = make_grid(n, l).unwrap();
        let values = (0..n)
            .map(|j| {
                let (re, im) = raw[j % raw.len()];
                Complex64::new(re, im)
            })
            .collect();
        SampledSignal::new(grid, values, "random").unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn signal_file_round_trip_is_exact(
            raw in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 128)
        ) {
            let u = signal(128, 16.0, &raw);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("u.csv");
            gabor_wf::io::write_signal(&path, &u).unwrap();
            let back = gabor_wf::io::read_signal(&path).unwrap();
            prop_assert_eq!(u.values, back.values);
        }

        #[test]
        fn stft_is_linear(
            a in proptest::collection::vec((-1f64..1.0, -1f64..1.0), 32),
            b in proptest::collection::vec((-1f64..1.0, -1f64..1.0), 32),
            s in -2f64..2.0,
        ) {
            let n = 128;
            let phi = window(n, 16.0);
            let u = signal(n, 16.0, &a);
            let v = signal(n, 16.0, &b);
            let combo = SampledSignal::new(
                u.grid,
                u.values.iter().zip(&v.values).map(|(x, y)| x + s * y).collect(),
                "combo",
            ).unwrap();
            let vu = stft(&u, &phi).unwrap();
            let vv = stft(&v, &phi).unwrap();
            let vc = stft(&combo, &phi).unwrap();
            let mut err: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for m in 0..n {
                for k in 0..n {
                    let lin = vu.values[m][k] + s * vv.values[m][k];
                    err = err.max((vc.values[m][k] - lin).norm());
                    scale = scale.max(lin.norm());
                }
            }
            prop_assert!(err <= 1e-12 * scale.max(1.0), "err {err:.3e}");
        }

        #[test]
        fn time_shift_rotates_stft_rows(
            raw in proptest::collection::vec((-1f64..1.0, -1f64..1.0), 32),
            shift in 0usize..128,
        ) {
            let n = 128;
            let phi = window(n, 16.0);
            let u = signal(n, 16.0, &raw);
            let shifted = SampledSignal::new(
                u.grid,
                (0..n).map(|j| u.values[(j + n - shift) % n]).collect(),
                "shifted",
            ).unwrap();
            let vu = stft(&u, &phi).unwrap();
            let vs = stft(&shifted, &phi).unwrap();
            let mut err: f64 = 0.0;
            for m in 0..n {
                for k in 0..n {
                    let expect = vu.values[(m + n - shift) % n][k].norm();
                    err = err.max((vs.values[m][k].norm() - expect).abs());
                }
            }
            prop_assert!(err <= 1e-12 * vu.abs_max(), "err {err:.3e}");
        }
    }
}
