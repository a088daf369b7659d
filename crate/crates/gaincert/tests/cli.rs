//! CLI surface tests: exit codes, output schemas, determinism.
#![allow(clippy::excessive_precision)] // frozen reference values keep all 17 digits

use gaincert::cli::{run_with_output, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gaincert").chain(args.iter().copied());
    let code = run_with_output(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn parse_json(text: &str) -> serde_json::Value {
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad JSON {text:?}: {e}"))
}

#[test]
fn riccati_reports_the_trivial_solution() {
    let (code, out, _) = run(&["riccati", "--a", "0", "--gamma", "2"]);
    assert_eq!(code, EXIT_OK);
    let v = parse_json(&out);
    assert_eq!(v["P"].as_f64().unwrap(), 4.0);
    assert_eq!(v["X"].as_f64().unwrap(), 7.0);
    assert_eq!(v["feasible_gain"], serde_json::Value::Bool(true));
}

#[test]
fn riccati_flags_infeasible_pairs() {
    let (code, out, _) = run(&["riccati", "--a", "1", "--gamma", "1"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert_eq!(parse_json(&out)["infeasible"], serde_json::Value::Bool(true));
}

#[test]
fn certify_exit_codes_track_the_verdict() {
    let (code, out, _) = run(&["certify", "--a", "1", "--gamma", "4.0"]);
    assert_eq!(code, EXIT_OK);
    let v = parse_json(&out);
    assert_eq!(v["certified"], serde_json::Value::Bool(true));
    assert!((v["P"].as_f64().unwrap() - 9.711_914_478_058_505_6).abs() < 1e-12);

    let (code, out, _) = run(&["certify", "--a", "1", "--gamma", "3.4"]);
    assert_eq!(code, EXIT_NEGATIVE);
    let v = parse_json(&out);
    assert_eq!(v["certified"], serde_json::Value::Bool(false));
    assert_eq!(v["curvature_ok"], serde_json::Value::Bool(true));
    assert_eq!(v["negativity_ok"], serde_json::Value::Bool(false));
}

#[test]
fn gamma_star_reports_bounds() {
    let (code, out, _) = run(&["gamma-star", "--a", "1"]);
    assert_eq!(code, EXIT_OK);
    let v = parse_json(&out);
    let g = v["gamma_star"].as_f64().unwrap();
    assert!(g > 3.4 && g <= 4.0);
    assert!((v["lower_bound"].as_f64().unwrap() - 3.414_213_562_373_095).abs() < 1e-12);
    assert!((v["upper_bound"].as_f64().unwrap() - 4.1).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one_and_document_flags() {
    let (code, _, err) = run(&["certify", "--a", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--gamma"), "missing-flag message names the flag");

    let (code, _, err) = run(&["certify", "--a", "1", "--gamma", "4", "--bogus", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage") || err.contains("usage"));

    let (code, _, err) = run(&["sweep", "--a-min", "0", "--a-max", "1", "--steps", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("steps"));
}

#[test]
fn help_prints_to_stdout_with_success() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("riccati"));
    assert!(out.contains("gamma-star"));
}

#[test]
fn sweep_emits_documented_csv() {
    let (code, out, _) = run(&[
        "sweep", "--a-min", "-1", "--a-max", "1", "--steps", "5",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "a,gamma_star,lower_bound,upper_bound,P,p_feasible,curvature_ok,negativity_ok"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 8);
        for cell in &cells[..5] {
            cell.parse::<f64>().unwrap();
        }
        for cell in &cells[5..] {
            assert!(*cell == "true" || *cell == "false");
        }
    }
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--a-min", "-2", "--a-max", "2", "--steps", "9"];
    let (c1, o1, _) = run(&args);
    let (c2, o2, _) = run(&args);
    assert_eq!(c1, EXIT_OK);
    assert_eq!(c1, c2);
    assert_eq!(o1, o2, "identical argv must give byte-identical output");
}

#[test]
fn simulate_writes_a_valid_reproducible_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let args = [
        "simulate", "--a", "1", "--b-true", "-1", "--gamma", "4", "--horizon", "20",
        "--disturbance", "white", "--seed", "3",
        "--out", path.to_str().unwrap(),
    ];
    let (code, out, _) = run(&args);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty(), "file output leaves stdout quiet");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x,u,y,w,v,xhat_1,xhat_m1,l_1,l_m1,alpha"
    );
    // 0..=T rows plus the trailing partial row.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 22);
    for row in &rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 11);
        for cell in cells {
            if !cell.is_empty() {
                cell.parse::<f64>().unwrap();
            }
        }
    }
    let trailer: Vec<&str> = rows[21].split(',').collect();
    assert!(trailer[2].is_empty() && trailer[10].is_empty());

    let (_, _, _) = run(&args);
    let again = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, again, "seeded simulate is byte-reproducible");
}

#[test]
fn verify_lemma_reports_a_clean_batch() {
    let (code, out, _) = run(&["verify-lemma", "--trials", "32", "--horizon", "4", "--seed", "5"]);
    assert_eq!(code, EXIT_OK);
    let v = parse_json(&out);
    assert_eq!(v["trials"].as_u64().unwrap(), 32);
    assert!(v["max_gap"].as_f64().unwrap() < 1e-8);
    assert!(v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn figure_quadfuns_matches_the_library_values() {
    let (code, out, _) = run(&["figure", "--which", "quadfuns"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "y,l1_next,lm1_next,threshold");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 121);
    let first: Vec<f64> = rows[0].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first[0], 0.3);

    let p = gaincert::certify::certify(1.0, 4.0).p.unwrap();
    let lm1 = -(p / (p - 1.0));
    let expect = gaincert::certify::figure_quadfuns(1.0, 4.0, 1.0, 0.0, lm1, &[0.3]).unwrap();
    assert_eq!(first[1], expect[0].l1_next, "17-digit cells parse bit-exactly");
    assert_eq!(first[2], expect[0].lm1_next);
    assert_eq!(first[3], expect[0].threshold);
}

#[test]
fn figure_gammascaling_covers_the_plot_grid() {
    let (code, out, _) = run(&["figure", "--which", "gammascaling"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 122, "header plus 121 grid points");
    let first: Vec<&str> = lines[1].split(',').collect();
    let last: Vec<&str> = lines[121].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), -6.0);
    assert_eq!(last[0].parse::<f64>().unwrap(), 6.0);
}
