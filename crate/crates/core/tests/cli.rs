use std::path::Path;
use std::process::{Command, Output};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/synthetic.csv");

fn wavereg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavereg"))
        .args(args)
        .env_remove("WAVEREG_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn fit_writes_model_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.toml");
    let o = wavereg(&["fit", "--input", FIXTURE, "--target", "y", "--output", p(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(model.exists());
    let report = stdout(&o);
    let expected = wavereg::model::select_level(400).unwrap();
    assert!(report.contains(&format!("level = {expected}\n")), "{report}");
    for key in ["beta_n = ", "sigma_hat = ", "effective_rank = ", "dropped_rows = 0"] {
        assert!(report.contains(key), "{key} missing");
    }

    let restricted = wavereg(&[
        "fit",
        "--input",
        FIXTURE,
        "--target",
        "y",
        "--output",
        p(&model),
        "--quantile-coverage",
        "0.9",
    ]);
    assert_eq!(restricted.status.code(), Some(0));
    assert!(!stdout(&restricted).contains("dropped_rows = 0\n"));
}

#[test]
fn fit_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.toml");
    let missing = wavereg(&["fit", "--input", "/no/such.csv", "--target", "y", "--output", p(&model)]);
    assert_eq!(missing.status.code(), Some(2));

    let small = dir.path().join("small.csv");
    let mut text = String::from("a,y\n");
    for i in 0..100 {
        text.push_str(&format!("{},{}\n", i as f64 / 7.0, (i % 5) as f64));
    }
    std::fs::write(&small, text).unwrap();
    let big_j = wavereg(&[
        "fit",
        "--input",
        p(&small),
        "--target",
        "y",
        "--output",
        p(&model),
        "--J",
        "12",
    ]);
    assert_eq!(big_j.status.code(), Some(3));
    assert!(
        stderr(&big_j).contains("p*2^J = 4096 exceeds the sample count n = 100"),
        "{}",
        stderr(&big_j)
    );

    let bad_filter = wavereg(&[
        "fit",
        "--input",
        FIXTURE,
        "--target",
        "y",
        "--output",
        p(&model),
        "--filter",
        "sym8",
    ]);
    assert_eq!(bad_filter.status.code(), Some(2));
    let unknown = wavereg(&["fit", "--input", FIXTURE, "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn predict_round_trip_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.toml");
    assert!(
        wavereg(&["fit", "--input", FIXTURE, "--target", "y", "--output", p(&model)])
            .status
            .success()
    );
    let out1 = dir.path().join("p1.csv");
    let out2 = dir.path().join("p2.csv");
    for out in [&out1, &out2] {
        let o = wavereg(&[
            "predict",
            "--model",
            p(&model),
            "--input",
            FIXTURE,
            "--target",
            "y",
            "--output",
            p(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(!stderr(&o).contains("clipped"));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("row_id,prediction\n0,"));
    assert_eq!(text.lines().count(), 401);

    let wide = dir.path().join("wide.csv");
    std::fs::write(&wide, "x1,x2,x3\n100,0,25\n5,0,25\n-3,9,0\n").unwrap();
    let o = wavereg(&["predict", "--model", p(&model), "--input", p(&wide)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("2 input rows were clipped"), "{}", stderr(&o));
    let strict = wavereg(&["predict", "--model", p(&model), "--input", p(&wide), "--strict"]);
    assert_eq!(strict.status.code(), Some(3));

    let text = std::fs::read_to_string(&model).unwrap();
    std::fs::write(&model, text.replace("version = 1", "version = 2")).unwrap();
    let o = wavereg(&["predict", "--model", p(&model), "--input", FIXTURE, "--target", "y"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("version"), "{}", stderr(&o));
}

#[test]
fn simulate_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "simulate".to_string(),
            "--n".into(),
            "256".into(),
            "--replications".into(),
            "3".into(),
            "--filter".into(),
            "haar".into(),
            "--sigma2".into(),
            "0.25,0.75".into(),
            "--seed".into(),
            "17".into(),
            "--threads".into(),
            "2".into(),
            "--output".into(),
            out.to_str().unwrap().into(),
        ]
    };
    for out in [&a, &b] {
        let args = args(out);
        let o = wavereg(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 2 * 10);
    assert!(text.lines().nth(1).unwrap().ends_with(",3,17"));

    let env_seed = Command::new(env!("CARGO_BIN_EXE_wavereg"))
        .args(["simulate", "--n", "256", "--replications", "1", "--filter", "haar"])
        .env("WAVEREG_SEED", "17")
        .output()
        .unwrap();
    assert!(stdout(&env_seed).lines().nth(1).unwrap().ends_with(",1,17"));

    let noiseless = wavereg(&[
        "simulate",
        "--n",
        "256",
        "--replications",
        "1",
        "--sigma2",
        "0",
        "--pretty",
    ]);
    assert_eq!(noiseless.status.code(), Some(0));
    assert!(stdout(&noiseless).contains("aggregate"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let model = dir.path().join("m.toml");
    std::fs::write(
        &cfg,
        format!(
            "input = \"{FIXTURE}\"\ntarget = \"y\"\noutput = \"{}\"\nfilter = \"haar\"\nlevel = 2\n",
            p(&model)
        ),
    )
    .unwrap();
    let o = wavereg(&["fit", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("filter = haar\n"));
    assert!(stdout(&o).contains("level = 2\n"));
    let o = wavereg(&["fit", "--config", p(&cfg), "--level", "3", "--filter", "db4tap"]);
    assert!(stdout(&o).contains("filter = db4tap\n"));
    assert!(stdout(&o).contains("level = 3\n"));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(wavereg(&["fit", "--config", p(&cfg)]).status.code(), Some(2));
}

#[test]
fn evaluate_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let linear = dir.path().join("lin.csv");
    let mut text = String::from("a,b,y\n");
    let mut ys = Vec::new();
    let n = 8192u64;
    for i in 0..n {
        let a = ((i * 7919) % n) as f64 / n as f64;
        let b = ((i * 104_729) % 8191) as f64 / 8191.0;
        let y = 2.0 * a - 3.0 * b + 0.01 * (((i * 37) % 11) as f64 - 5.0);
        ys.push(y);
        text.push_str(&format!("{a},{b},{y}\n"));
    }
    std::fs::write(&linear, text).unwrap();
    let mean = ys.iter().sum::<f64>() / n as f64;
    let sd = (ys.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();

    let o = wavereg(&[
        "evaluate",
        "--input",
        p(&linear),
        "--target",
        "y",
        "--folds",
        "2",
        "--repetitions",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 6 + 1);
    let mean_rmse: f64 = out
        .lines()
        .last()
        .unwrap()
        .trim_start_matches("mean,,")
        .parse()
        .unwrap();
    assert!(mean_rmse < 0.25 * sd, "{mean_rmse} vs sd {sd}");
    let again = wavereg(&[
        "evaluate",
        "--input",
        p(&linear),
        "--target",
        "y",
        "--folds",
        "2",
        "--repetitions",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(stdout(&again), out);

    let split = wavereg(&[
        "evaluate",
        "--input",
        p(&linear),
        "--target",
        "y",
        "--train-fraction",
        "0.85",
        "--repetitions",
        "4",
        "--filter",
        "db4tap",
    ]);
    assert_eq!(split.status.code(), Some(0), "{}", stderr(&split));
    assert_eq!(stdout(&split).lines().count(), 1 + 4 + 1);

    let too_many = wavereg(&["evaluate", "--input", p(&linear), "--target", "y", "--folds", "9000"]);
    assert_eq!(too_many.status.code(), Some(2));
}

#[test]
fn help_lists_every_flag() {
    let top = wavereg(&["--help"]);
    assert_eq!(top.status.code(), Some(0));
    for cmd in ["fit", "predict", "simulate", "evaluate"] {
        assert!(stdout(&top).contains(cmd));
    }
    let sim = stdout(&wavereg(&["simulate", "--help"]));
    for flag in [
        "--design",
        "--filter",
        "--sigma2",
        "--n",
        "--replications",
        "--full",
        "--sigma-method",
        "--seed",
        "--threads",
        "--output",
        "--pretty",
        "--config",
    ] {
        assert!(sim.contains(flag), "{flag}");
    }
    let eval = stdout(&wavereg(&["evaluate", "--help"]));
    for flag in [
        "--folds",
        "--repetitions",
        "--train-fraction",
        "--quantile-coverage",
        "--beta",
        "--level",
    ] {
        assert!(eval.contains(flag), "{flag}");
    }
}
