use std::io::Write;
use std::process::{Command, Output};

use degsheffer::exactalg::parse_rational;
use degsheffer::{Families, Poly};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_degsheffer"));
    for key in [
        "N", "ORDER", "FORMAT", "LAMBDA", "X", "P", "A", "B", "M", "L", "SAMPLES", "SEED",
        "PROVIDER", "CONFIG",
    ] {
        cmd.env_remove(format!("DEGSHEF_{key}"));
    }
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

#[test]
fn table_matches_library_values() {
    let (code, out, _) = run(bin().args(["table", "deg-bernoulli", "--n", "5"]));
    assert_eq!(code, 0);
    let fam = Families::new(5);
    for (n, line) in out.lines().enumerate() {
        let (idx, value) = line.split_once(' ').unwrap();
        assert_eq!(idx, n.to_string());
        assert_eq!(
            value.parse::<Poly>().unwrap(),
            fam.bernoulli_deg(n, &Poly::zero()).unwrap()
        );
    }
    assert!(out.contains("4 -19/30*λ^4 + 2/3*λ^2 - 1/30"));
}

#[test]
fn json_table_round_trips_exactly() {
    let (code, out, _) = run(bin().args(["table", "deg-euler", "--n", "6", "--format", "json"]));
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let fam = Families::new(6);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let n = row["n"].as_u64().unwrap() as usize;
        let value: Poly = row["value"].as_str().unwrap().parse().unwrap();
        assert_eq!(value, fam.euler_deg(n, &Poly::zero()).unwrap());
    }
}

#[test]
fn pinned_table_is_rational() {
    let (code, out, _) = run(bin().args([
        "table",
        "deg-bernoulli",
        "--n",
        "3",
        "--lambda",
        "1/2",
        "--format",
        "csv",
    ]));
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,value");
    for line in &lines[1..] {
        let value = line.split_once(',').unwrap().1.trim_matches('"');
        parse_rational(value).unwrap();
    }
}

#[test]
fn symbolic_x_and_orders() {
    let (code, out, _) = run(bin().args(["table", "sheffer-t", "--n", "1", "--x", "x"]));
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "0 1");
    let (code, out, _) =
        run(bin().args(["table", "sheffer-t", "--n", "1", "--a", "1", "--b", "1"]));
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1).unwrap(), "1 1/2*λ - 1");
}

#[test]
fn verify_success_and_schema() {
    let (code, out, _) = run(bin().args(["verify", "thm2.*", "--n", "4", "--format", "json"]));
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["version"], 1);
    for case in doc["cases"].as_array().unwrap() {
        assert_eq!(case["equal"], true);
        assert_eq!(case["maxN"], 4);
        assert!(case["mismatch"].is_null());
        assert!(case["id"].as_str().unwrap().starts_with("thm2."));
    }
}

#[test]
fn verify_reports_symbolic_x() {
    let (code, out, _) = run(bin().args(["verify", "thm3.4"]));
    assert_eq!(code, 0);
    assert!(
        out.contains("PASS thm3.4 (maxN=8, symbolic: λ, x)"),
        "{out}"
    );
}

#[test]
fn verify_unknown_id_fails() {
    let (code, _, err) = run(bin().args(["verify", "no-such-id"]));
    assert_ne!(code, 0);
    assert!(err.contains("unknown identity"));
}

#[test]
fn verify_fault_injection_exits_one() {
    let (code, out, _) = run(bin().args([
        "verify",
        "thm3.4",
        "--inject-fault",
        "thm3.4",
        "--n",
        "3",
        "--format",
        "json",
    ]));
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let case = &doc["cases"][0];
    assert_eq!(case["equal"], false);
    assert_eq!(case["mismatch"]["n"], 1);
    assert_eq!(case["mismatch"]["diff"], "-1");
}

#[test]
fn verify_order_must_exceed_max_n() {
    let (code, _, err) = run(bin().args(["verify", "thm2.4", "--n", "8", "--order", "8"]));
    assert_eq!(code, 2);
    assert!(err.contains("exceeds"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(bin().args(["frobnicate"])).0, 2);
    assert_eq!(run(bin().args(["table", "no-family"])).0, 2);
    assert_eq!(
        run(bin().args(["table", "deg-bernoulli", "--n", "20", "--order", "16"])).0,
        2
    );
    assert_eq!(
        run(bin().args(["table", "deg-bernoulli", "--format", "yaml"])).0,
        2
    );
}

#[test]
fn mc_is_deterministic_and_handles_n0() {
    let args = [
        "mc",
        "thm3.1",
        "--lambda",
        "1/8",
        "--x",
        "1/4",
        "--n",
        "2",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let first = bin().args(args).output().unwrap();
    let second = bin().args(args).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    assert!(first.status.success());
    let (code, out, _) = run(bin().args([
        "mc",
        "thm3.1",
        "--n",
        "0",
        "--format",
        "json",
        "--samples",
        "1000",
    ]));
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["exact"], "1");
    assert_eq!(doc["estimate"], 1.0);
    assert_eq!(doc["std_error"], 0.0);
    assert_eq!(doc["pass"], true);
}

#[test]
fn mc_rejects_symbolic_provider() {
    let (code, _, err) = run(bin().args(["mc", "thm3.1", "--provider", "ber:p", "--n", "2"]));
    assert_eq!(code, 2);
    assert!(
        err.contains("sampled") || err.contains("no assigned value"),
        "{err}"
    );
    let (code, _, _) = run(bin().args([
        "mc",
        "thm3.1",
        "--provider",
        "ber:p",
        "--p",
        "1/3",
        "--n",
        "2",
        "--samples",
        "5000",
    ]));
    assert_eq!(code, 0);
}

#[test]
fn config_precedence() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# defaults\nn = 1\nformat = csv").unwrap();
    let path = file.path().to_str().unwrap().to_string();

    let (_, out, _) = run(bin().args(["table", "deg-bernoulli", "--config", &path]));
    assert_eq!(out.lines().count(), 3);
    assert_eq!(out.lines().next().unwrap(), "n,value");

    let (_, out, _) = run(bin()
        .args(["table", "deg-bernoulli", "--config", &path])
        .env("DEGSHEF_N", "2"));
    assert_eq!(out.lines().count(), 4);

    let (_, out, _) = run(bin()
        .args(["table", "deg-bernoulli", "--config", &path, "--n", "3"])
        .env("DEGSHEF_N", "2"));
    assert_eq!(out.lines().count(), 5);

    let (_, out, _) = run(bin()
        .args(["table", "deg-bernoulli"])
        .env("DEGSHEF_CONFIG", &path));
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn bad_config_is_usage_error() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "colour = blue").unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let (code, _, err) = run(bin().args(["table", "deg-bernoulli", "--config", &path]));
    assert_eq!(code, 2);
    assert!(err.contains("unknown key"));
}
