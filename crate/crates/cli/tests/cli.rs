use std::path::Path;
use std::process::{Command, Output};

fn mindet(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mindet"));
    c.args(args).env_remove("MINDET_OUT");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    mindet(args).arg("--out").arg(out).output().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect::<Vec<_>>();
    let mut cols = vec![Vec::new(); header.len()];
    for line in lines {
        for (c, v) in cols.iter_mut().zip(line.split(',')) {
            c.push(v.parse::<f64>().unwrap());
        }
    }
    (header, cols)
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn momentum_density_opposite_phases() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["momentum-density", "--alpha", "0,pi"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("momentum-density");

    let (header, cols) = read_csv(&dir.join("momentum_density.csv"));
    assert_eq!(header, ["p", "density_alpha_0.000000", "density_alpha_3.141593"]);
    let gap = cols[1].iter().zip(&cols[2]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap > 0.1, "{gap}");

    let (header, cols) = read_csv(&dir.join("momentum_moments.csv"));
    assert_eq!(header[0], "n");
    assert_eq!(cols[0].len(), 7);
    for (n, (&a, &b)) in cols[1].iter().zip(&cols[2]).enumerate() {
        assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "n = {n}: {a} vs {b}");
    }

    let s = summary(&dir);
    assert_eq!(s["experiment"], "momentum-density");
    assert_eq!(s["pass"], true);
    assert_eq!(s["config_hash"].as_str().unwrap().len(), 64);
    for v in s["verdicts"].as_array().unwrap() {
        assert!(v["threshold"].is_number() && v["observed"].is_number() && v["pass"].is_boolean());
    }
}

#[test]
fn multi_five_lobes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["multi", "--N", "5"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(&tmp.path().join("multi"));
    let names: Vec<&str> = s["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["name"].as_str().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.contains("peak ratio")), "{names:?}");
}

#[test]
fn numbers_use_twelve_digit_scientific_notation() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["alpha-expectations"], tmp.path());
    let text = std::fs::read_to_string(tmp.path().join("alpha-expectations/alpha_expectations.csv")).unwrap();
    let row = text.lines().nth(1).unwrap();
    for field in row.split(',') {
        let (mantissa, exp) = field.split_once('e').unwrap();
        assert_eq!(mantissa.trim_start_matches('-').len(), 14, "{field}");
        assert!(exp.starts_with('+') || exp.starts_with('-'), "{field}");
        assert!(exp.len() >= 3, "{field}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "window = \"raised_cosine\"\nalphas = [0, \"pi/2\"]\nL = 3.0\n").unwrap();
    let o = run(&["position-density", "--config", cfg.to_str().unwrap(), "--L", "2.5"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&tmp.path().join("position-density"));
    assert_eq!(s["config"]["scenario"]["shift"], 2.5);
    assert_eq!(s["config"]["scenario"]["window"]["family"], "raised_cosine");
    assert_eq!(s["config"]["scenario"]["alphas"].as_array().unwrap().len(), 2);
}

#[test]
fn json_format_writes_only_the_summary() {
    let tmp = tempfile::tempdir().unwrap();
    run(&["lognormal", "--format", "json"], tmp.path());
    let files: Vec<_> = std::fs::read_dir(tmp.path().join("lognormal")).unwrap().collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mindet(&["lognormal"]).env("MINDET_OUT", tmp.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("lognormal/summary.json").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["momentum-density", "--L", "0.5"], tmp.path()).status.code(), Some(2));
    assert_eq!(run(&["charfun", "--window", "triangle"], tmp.path()).status.code(), Some(2));
    assert_eq!(run(&["dual", "--N", "3"], tmp.path()).status.code(), Some(2));
    assert_eq!(run(&["no-such-experiment"], tmp.path()).status.code(), Some(2));
    let missing = tmp.path().join("missing.toml");
    assert_eq!(
        run(&["moments", "--config", missing.to_str().unwrap()], tmp.path()).status.code(),
        Some(2)
    );
    let file = tmp.path().join("plain-file");
    std::fs::write(&file, "").unwrap();
    assert_eq!(run(&["lognormal"], &file).status.code(), Some(3));
    // Nearly equal phases barely change P(p), so the gap verdict fails.
    let o = run(&["momentum-density", "--alpha", "0,0.001"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
}
