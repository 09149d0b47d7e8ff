use std::path::Path;
use std::process::{Command, Output};

const K23: &str = "3 2\n2 3\n2 2 2\n3 3\n1 2\n1 2\n1 2\n1 2 3\n1 2 3\n";

fn vfap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfap")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn census_of_k23() {
    let dir = tempfile::tempdir().unwrap();
    let alist = write(dir.path(), "k23.alist", K23);
    let per_node = dir.path().join("s.csv");
    let out = vfap(&["census", "--alist", &alist, "--per-node", per_node.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("girth=4\n") && text.contains("total=3\n") && text.contains("mu=3\n"), "{text}");
    assert_eq!(std::fs::read_to_string(per_node).unwrap(), "check_index,s_i\n0,3\n1,3\n");
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.alist");
    let gen = vfap(&["generate", "--n", "96", "--m", "48", "--seed", "3", "--out", code.to_str().unwrap()]);
    assert!(gen.status.success());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = [
            "simulate", "--alist", code.to_str().unwrap(), "--decoders", "bp,urw,vfap", "--snr", "2,4,6",
            "--max-iter", "10", "--trials", "200", "--seed", "7", "--out", out.to_str().unwrap(),
        ];
        assert!(vfap(&args).status.success());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("decoder,snr_db,trials,bit_errors,frame_errors,undetected_frames,ber,fer,"));
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",code")));
}

#[test]
fn unknown_flag_is_a_config_error() {
    let out = vfap(&["census", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn bad_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let alist = write(dir.path(), "k23.alist", K23);
    for args in [
        vec!["simulate", "--alist", &alist, "--snr", "1", "--seed", "1", "--rho-v", "1.5"],
        vec!["simulate", "--alist", &alist, "--snr", "1", "--seed", "1", "--max-iter", "0"],
        vec!["simulate", "--alist", &alist, "--snr", "1"],
        vec!["simulate", "--alist", &alist, "--snr", "1", "--seed", "1", "--decoders", "min_sum"],
        vec!["census", "--alist", &alist, "--cap", "7"],
        vec!["decode", "--alist", &alist, "--y", "1,2,3", "--sigma2", "-1"],
    ] {
        let out = vfap(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
    }
}

#[test]
fn runtime_failures_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.alist", "2 2\nnot an alist\n");
    let out_csv = dir.path().join("out.csv");
    let out = vfap(&["simulate", "--alist", &bad, "--snr", "1", "--seed", "1", "--out", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_csv.exists());
    let missing = dir.path().join("missing.alist");
    assert_eq!(vfap(&["census", "--alist", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn decode_a_clean_word() {
    let dir = tempfile::tempdir().unwrap();
    let alist = write(dir.path(), "k23.alist", K23);
    // 110 satisfies both checks of K_{2,3}
    let out = vfap(&["decode", "--alist", &alist, "--y", "0.9,1.1,-1.0", "--sigma2", "0.2", "--variant", "standard_bp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "codeword=110\nconverged=true\niterations=1\n");
}

#[test]
fn generated_code_has_girth_six_or_more() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("irr.alist");
    let lambda = "0,0.29,0.25,0.25,0,0.21";
    let gen = vfap(&["generate", "--n", "500", "--m", "250", "--lambda", lambda, "--seed", "1", "--out", code.to_str().unwrap()]);
    assert!(gen.status.success());
    let out = vfap(&["census", "--alist", code.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let girth: usize = text.lines().next().unwrap().trim_start_matches("girth=").parse().unwrap();
    assert!(girth >= 6, "{text}");
}

#[test]
fn help_lists_defaults() {
    let text = String::from_utf8(vfap(&["simulate", "--help"]).stdout).unwrap();
    for d in ["[default: 60]", "[default: 50]", "[default: 16]", "[default: 100]", "[default: standard_bp,urw_bp,vfap_bp]"] {
        assert!(text.contains(d), "missing {d}");
    }
    assert!(vfap(&["--help"]).status.success());
}
