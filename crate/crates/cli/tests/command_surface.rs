//! Quick pass over every analysis subcommand on small inputs: artifact
//! layout and report fields, not numerical quality (the acceptance suite
//! owns that).

use std::path::PathBuf;
use std::process::{Command, Output};

use romkit_cli::TensorFile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_romkit"))
        .args(args)
        .output()
        .expect("spawn romkit")
}

fn ok(out: &Output, context: &str) {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{context}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(dir: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

/// Small oscillating tensor with two components.
fn small_tensor_file(path: &std::path::Path) {
    let (c, nx, ny, k) = (2usize, 6usize, 5usize, 60usize);
    let mut data = vec![0.0; c * nx * ny * k];
    let mut idx = 0;
    for comp in 0..c {
        for i in 0..nx {
            for j in 0..ny {
                for kk in 0..k {
                    let t = kk as f64 * 0.1;
                    data[idx] = (comp + 1) as f64
                        * ((0.4 * i as f64).sin() + 0.3 * (0.5 * j as f64).cos())
                        * (0.9 * t).cos()
                        + 0.1 * (comp as f64);
                    idx += 1;
                }
            }
        }
    }
    TensorFile::new(vec![c, nx, ny, k], data, false)
        .unwrap()
        .write(path)
        .unwrap();
}

#[test]
fn every_analysis_command_produces_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let s = |n: &str| p(n).to_string_lossy().into_owned();
    small_tensor_file(&p("t.mft"));

    // decompose svd (+ plots)
    std::fs::write(p("svd.json"), r#"{"tolerance": 1e-6, "dt": 0.1}"#).unwrap();
    ok(
        &run(&[
            "decompose", "svd", "--input", &s("t.mft"), "--config", &s("svd.json"),
            "--output", &s("svd_out"), "--plots",
        ]),
        "decompose svd",
    );
    assert!(p("svd_out/spatial_modes.mft").exists());
    assert!(p("svd_out/mode0.svg").exists());
    assert!(report(&p("svd_out"))["rrmse"].as_f64().unwrap() < 1e-8);

    // decompose hosvd
    ok(
        &run(&[
            "decompose", "hosvd", "--input", &s("t.mft"), "--output", &s("hosvd_out"),
        ]),
        "decompose hosvd",
    );
    let r = report(&p("hosvd_out"));
    assert_eq!(r["ranks"].as_array().unwrap().len(), 4);
    assert!(p("hosvd_out/core.mft").exists());
    assert!(p("hosvd_out/factor_axis3.mft").exists());

    // decompose mdhodmd, iterative
    std::fs::write(
        p("md.json"),
        r#"{"d": 12, "eps_svd": 1e-8, "eps_amp": 1e-6, "iterative": true, "dt": 0.1}"#,
    )
    .unwrap();
    ok(
        &run(&[
            "decompose", "mdhodmd", "--input", &s("t.mft"), "--config", &s("md.json"),
            "--output", &s("md_out"),
        ]),
        "decompose mdhodmd",
    );
    let r = report(&p("md_out"));
    assert!(r["iterations"].as_u64().unwrap() >= 1);
    assert!(p("md_out/spectrum.csv").exists());

    // forecast dmd
    std::fs::write(
        p("fdmd.json"),
        r#"{"d": 12, "eps_svd": 1e-8, "eps_amp": 1e-6, "eps_perm": 1e-3, "horizon": 20, "dt": 0.1}"#,
    )
    .unwrap();
    ok(
        &run(&[
            "forecast", "dmd", "--input", &s("t.mft"), "--config", &s("fdmd.json"),
            "--output", &s("fdmd_out"),
        ]),
        "forecast dmd",
    );
    let fc = TensorFile::read(&p("fdmd_out/forecast.mft")).unwrap();
    assert_eq!(fc.shape, vec![2 * 6 * 5, 20]);

    // forecast nn (tiny training budget)
    std::fs::write(
        p("fnn.json"),
        r#"{"framework": "hybrid_dl", "model": "rnn", "svd_rank": 2, "first_scaling": "none",
            "centering": false, "second_scaling": "mpm", "q": 5, "p": 1, "neurons": 8,
            "hidden_activation": "tanh", "output_activation": "linear", "epochs": 30,
            "batch": 4, "train_fraction": 0.7, "val_fraction": 0.15, "dt": 0.1}"#,
    )
    .unwrap();
    ok(
        &run(&[
            "forecast", "nn", "--input", &s("t.mft"), "--config", &s("fnn.json"),
            "--output", &s("fnn_out"),
        ]),
        "forecast nn",
    );
    let pred = TensorFile::read(&p("fnn_out/prediction.mft")).unwrap();
    assert_eq!(pred.shape, vec![2, 6, 5, 9]); // 15% test block of 60
    assert!(p("fnn_out/model.mfnn").exists());
    let r = report(&p("fnn_out"));
    assert_eq!(r["per_snapshot_rrmse"].as_array().unwrap().len(), 9);

    // forecast nn, fully neural framework on the raw snapshots
    std::fs::write(
        p("fdl.json"),
        r#"{"framework": "fully_dl", "model": "cnn", "q": 5, "p": 2, "neurons": 12,
            "hidden_activation": "elu", "output_activation": "linear", "epochs": 10,
            "batch": 4, "learning_rate": 0.005, "train_fraction": 0.7,
            "val_fraction": 0.15, "dt": 0.1}"#,
    )
    .unwrap();
    ok(
        &run(&[
            "forecast", "nn", "--input", &s("t.mft"), "--config", &s("fdl.json"),
            "--output", &s("fdl_out"),
        ]),
        "forecast nn fully_dl",
    );
    assert!(p("fdl_out/prediction.mft").exists());

    // reconstruct nn (tiny budget)
    std::fs::write(
        p("rec.json"),
        r#"{"strides": [2, 2], "rank": 2, "decoder_layers": 2, "neurons": 10,
            "activation": "linear", "epochs": 30, "batch": 6, "learning_rate": 0.01,
            "train_fraction": 0.6, "val_fraction": 0.2, "dt": 0.1}"#,
    )
    .unwrap();
    ok(
        &run(&[
            "reconstruct", "nn", "--input", &s("t.mft"), "--config", &s("rec.json"),
            "--output", &s("rec_out"),
        ]),
        "reconstruct nn",
    );
    let rec = TensorFile::read(&p("rec_out/reconstructed.mft")).unwrap();
    assert_eq!(rec.shape, vec![2, 6, 5, 60]);
    let ds = TensorFile::read(&p("rec_out/downsampled.mft")).unwrap();
    assert_eq!(ds.shape, vec![2, 3, 3, 60]);
}
