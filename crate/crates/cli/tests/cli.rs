use std::path::Path;
use std::process::{Command, Output};

fn psibound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psibound"))
        .args(args)
        .env_remove("PSIBOUND_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn characteristics_row_matches_worked_example() {
    let out = psibound(&[
        "characteristics",
        "--alpha",
        "ln2",
        "--r",
        "0.5",
        "--n",
        "25",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("eta = 36"), "{text}");
    assert!(text.contains("mu = 2.272727272727273"), "{text}");
    assert!(text.contains("a = 2.82842712474619"), "{text}");
    assert!(text.contains("b = 2.0549401903643987"), "{text}");
    assert!(text.contains("n_min = 21"), "{text}");
}

#[test]
fn characteristics_csv_has_header_and_one_row_per_index() {
    let out = psibound(&["characteristics", "--n", "21..25", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "alpha,r,n,eta,gap,mu,a,b,n_min");
    assert!(
        lines[1].starts_with("6.9314718055994529e-1,5.0000000000000000e-1,21,"),
        "{}",
        lines[1]
    );
}

#[test]
fn hypothesis_violation_is_a_parameter_error() {
    let out = psibound(&["verify-thm1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("hypothesis violated"), "{err}");
    assert!(err.contains("mu(4)"), "{err}");
}

#[test]
fn malformed_index_range_is_a_usage_error() {
    let out = psibound(&["verify-thm1", "--n", "banana"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--n"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_exit_with_usage_code() {
    let out = psibound(&["verify-thm1", "--n", "25", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sup_exponent_is_rejected_for_the_uniform_sandwich() {
    let out = psibound(&["verify-thm1", "--n", "25", "--p", "inf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--p"), "{}", stderr(&out));
}

#[test]
fn verify_thm1_passes_and_emits_stable_csv() {
    let args = [
        "verify-thm1",
        "--n",
        "21,22",
        "--p",
        "1",
        "--beta",
        "0",
        "--format",
        "csv",
    ];
    let out = psibound(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "label,n,beta,exponent,a,b,lower,measured,upper,margin_low,margin_high,passed,notes"
    );
    for row in &lines[1..] {
        assert!(row.starts_with("theorem1,"), "{row}");
        assert!(row.contains(",true,"), "{row}");
    }

    // byte-identical rerun
    let again = psibound(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("chars.csv");
    let piped = psibound(&["characteristics", "--n", "21..30", "--format", "csv"]);
    let filed = psibound(&[
        "characteristics",
        "--n",
        "21..30",
        "--format",
        "csv",
        "--output",
        path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(filed.status.code(), Some(0));
    assert!(stdout(&filed).is_empty());
    let written = std::fs::read(&path).expect("output file written");
    assert_eq!(written, piped.stdout);
}

#[test]
fn unwritable_output_path_reports_the_path() {
    let out = psibound(&[
        "characteristics",
        "--n",
        "25",
        "--output",
        "/nonexistent-dir/chars.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("/nonexistent-dir/chars.csv"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn classify_is_informational_and_exits_zero() {
    let out = psibound(&[
        "classify", "--alpha", "ln2", "--r", "0.5", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("record,holds,detail\n"), "{text}");
    assert!(text.contains("membership,true,"), "{text}");
}

#[test]
fn kernel_norm_emits_truncation_degree() {
    let out = psibound(&["kernel-norm", "--n", "25", "--p", "inf", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "alpha,r,n,beta,index,norm_over_pi,truncation_degree"
    );
    assert_eq!(lines.len(), 2);
    let deg: usize = lines[1]
        .rsplit(',')
        .next()
        .and_then(|d| d.parse().ok())
        .expect("degree column");
    assert!(deg > 25, "{}", lines[1]);
}

#[test]
fn extremal_coefficients_cover_the_staged_degree() {
    let out = psibound(&[
        "extremal",
        "--n",
        "25",
        "--p",
        "1",
        "--samples",
        "0",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();
    // staging 25 -> 36 -> 49 gives degree 48: header plus k = 0..=48
    assert_eq!(lines.len(), 50);
    assert_eq!(lines[0], "alpha,r,n,p,k,cos_coeff,sin_coeff");
}

#[test]
fn jobs_flag_does_not_change_output() {
    let base = psibound(&["verify-lemmas", "--n", "21..24", "--format", "csv"]);
    assert_eq!(base.status.code(), Some(0), "{}", stderr(&base));
    let jobs = psibound(&[
        "verify-lemmas",
        "--n",
        "21..24",
        "--format",
        "csv",
        "--jobs",
        "2",
    ]);
    assert_eq!(jobs.status.code(), Some(0));
    assert_eq!(base.stdout, jobs.stdout);
}

#[test]
fn nonpositive_tolerances_are_usage_errors() {
    let out = psibound(&["verify-lemmas", "--n", "25", "--slack", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--slack"), "{}", stderr(&out));
}

#[test]
fn binary_path_is_exported_for_scripts() {
    // keep the harness honest about where the executable lives
    assert!(Path::new(env!("CARGO_BIN_EXE_psibound")).exists());
}
