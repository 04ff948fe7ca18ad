use entloc::report::ReportFile;
use entloc::{run_with, StateSpecFile, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use entloc_core::locus::Ensemble;
use entloc_core::seed::rng;
use entloc_core::tensor::{random_pure_state_with, MixedState, PartySystem};
use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["entloc"];
    full.extend_from_slice(args);
    let code = run_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> (i32, ReportFile) {
    let mut with_json = args.to_vec();
    with_json.push("--json");
    let (code, out, err) = run(&with_json);
    let report = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}"));
    (code, report)
}

#[test]
fn state_file_round_trip() {
    let mut r = rng(5);
    for dims in [vec![2, 2, 2], vec![2, 3], vec![2, 2, 2, 2]] {
        let s = PartySystem::with_default_labels(dims).unwrap();
        let members: Vec<_> = (0..3).map(|i| ([0.5, 0.3, 0.2][i], random_pure_state_with(&s, &mut r))).collect();
        let rho = MixedState::from_mixture(&members).unwrap();
        let text = StateSpecFile::from_state(&rho).to_json();
        let back = StateSpecFile::parse(&text).unwrap().to_state().unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < 1e-12);
        assert_eq!(back.system(), rho.system());

        let e = Ensemble::new(members).unwrap();
        let text = StateSpecFile::from_ensemble(&e).to_json();
        let again = StateSpecFile::parse(&text).unwrap().to_ensemble().unwrap();
        assert!((again.density_matrix() - e.density_matrix()).camax() < 1e-12);
    }
}

#[test]
fn analyze_is_deterministic() {
    let args = ["analyze", &data("generalized_smolin.json"), "--cut", "A:B|CD", "--cut", "BCD|A", "--seed", "9"];
    let (c1, a) = run_json(&args);
    let (c2, b) = run_json(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a.cuts.len(), 2);
    for (x, y) in a.cuts.iter().zip(&b.cuts) {
        assert_eq!(x.verdict, y.verdict);
        for (lx, ly) in x.loci.iter().zip(&y.loci) {
            assert_eq!(lx.tag, ly.tag);
            assert_eq!(lx.witness, ly.witness);
            assert_eq!(lx.samples, ly.samples);
        }
    }
}

#[test]
fn split_cut_lists_four_components() {
    let (code, r) = run_json(&["analyze", &data("generalized_smolin.json"), "--cut", "A:B|CD", "--k", "3", "--seed", "1"]);
    assert_eq!(code, EXIT_OK);
    let cut = &r.cuts[0];
    assert_eq!(cut.verdict, "Entangled");
    assert!(cut.justification.contains("nonlinear degeneracy locus"));
    let locus = &cut.loci[0];
    assert_eq!(locus.tag, "NonlinearWitness");
    assert!(locus.witness.is_some());
    assert_eq!(locus.components.len(), 4);
    assert!(locus.components.iter().all(|c| c.form_rank == Some(2) && c.form.is_some()));
    // The 4 x 4 determinant is the single 4-minor.
    assert_eq!(locus.minors.count, 1);
    assert_eq!(r.convention, "Conjugate");
}

#[test]
fn smolin_split_cut_lists_four_components() {
    let (code, r) = run_json(&["analyze", &data("smolin.json"), "--cut", "A:B|CD", "--k", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.cuts[0].verdict, "Entangled");
    let locus = &r.cuts[0].loci[0];
    assert_eq!(locus.components.len(), 4);
    assert!(locus.components.iter().all(|c| c.kind == "nonlinear" && c.form_rank == Some(2)));
}

#[test]
fn ghz_locus_is_linear() {
    let (code, r) = run_json(&["analyze", &data("ghz.json"), "--cut", "A:B|C", "--k", "0"]);
    assert_eq!(code, EXIT_OK);
    let locus = &r.cuts[0].loci[0];
    assert_eq!(locus.tag, "Linear");
    assert!(!locus.components.is_empty());
    assert!(locus.components.iter().all(|c| c.kind == "linear"));
    assert_eq!(r.cuts[0].verdict, "ConsistentWithSeparable");
    assert!(locus.minors.count > 0);
}

#[test]
fn default_cuts_cover_every_cut() {
    let (code, r) = run_json(&["analyze", &data("ghz.json"), "--seed", "3"]);
    assert_ne!(code, EXIT_USAGE);
    assert_eq!(r.cuts.len(), 9);
    // GHZ is entangled across every bipartition.
    for c in r.cuts.iter().filter(|c| !c.cut.contains(':')) {
        assert_eq!(c.verdict, "Entangled", "{}", c.cut);
    }
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = run(&["analyze", &data("ghz.json"), "--cut", "A::B"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("A::B"));
    assert_eq!(run(&["analyze", &data("ghz.json"), "--cut", "A|B|C"]).0, EXIT_USAGE);
    assert_eq!(run(&["analyze", &data("ghz.json"), "--cut", "A|BC", "--cut", "B|AC", "--k", "1", "--k", "0", "--k", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["analyze", "/nonexistent.json"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["reproduce", "--example", "7"]).0, EXIT_USAGE);
    assert_eq!(run(&["fingerprint", "--eta", "0,0,0", "--lambda", "1,1,1,1"]).0, EXIT_USAGE);
    assert_eq!(run(&["fingerprint", "--lambda", "1,1,1,1"]).0, EXIT_USAGE);
    assert_eq!(run(&["fingerprint", "--eta", "1,2"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn bad_state_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dims": [2], "ensemble": [{"weight": 0.4, "amplitudes": [[1,0],[0,0]]}]}"#).unwrap();
    let (code, _, err) = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("weights"));
}

#[test]
fn fingerprint_commands() {
    let (code, r) = run_json(&["fingerprint", "--eta", "0,0,0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.fingerprints[0].display, "infinity");

    let (_, r) = run_json(&["fingerprint", "--lambda", "1,1,1,2", "--lambda2", "1,1,1,3"]);
    assert_eq!(r.lu_verdict.as_deref(), Some("Inequivalent"));
    let (_, r) = run_json(&["fingerprint", "--lambda", "1,1+2i,-0.5i,3", "--lambda2", "1,1+2i,-0.5i,3"]);
    assert_eq!(r.lu_verdict.as_deref(), Some("Undetermined"));

    let (_, r) = run_json(&["fingerprint", "--eta", "0.3,0.7,1.1", "--eta2", "0.1,0.2,0.4"]);
    assert_eq!(r.lu_verdict.as_deref(), Some("Inequivalent"));
    let (_, r) = run_json(&["fingerprint", "--eta", "0.3,0.7,1.1", "--eta2", "1.1,0.3,0.7"]);
    assert_eq!(r.lu_verdict.as_deref(), Some("Undetermined"));
}

#[test]
fn reproduce_examples_pass() {
    for example in ["1", "2", "thm4", "thm5"] {
        let (code, r) = run_json(&["reproduce", "--example", example, "--seed", "4"]);
        assert_eq!(code, EXIT_OK, "example {example}");
        assert!(!r.checks.is_empty() && r.all_checks_pass(), "example {example}: {:?}", r.checks);
    }
    let (_, r) = run_json(&["reproduce", "--example", "1"]);
    assert_eq!(r.checks.len(), 7);
    assert_eq!(r.cuts.len(), 4);
}

#[test]
fn report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = run(&["fingerprint", "--eta", "0.3,0.7,1.1", "--output", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("fingerprint"));
    let r: ReportFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.command, "fingerprint");
    assert_eq!(r.version, env!("CARGO_PKG_VERSION"));
    assert!(r.timings_ms.contains_key("total"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_entloc");
    let status = Command::new(bin).args(["analyze", &data("ghz.json"), "--cut", "A::B"]).status().unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
    let status = Command::new(bin)
        .env("ENTLOC_THREADS", "2")
        .args(["reproduce", "--example", "thm4"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_OK));
    let status = Command::new(bin)
        .env("ENTLOC_THREADS", "zero")
        .args(["reproduce", "--example", "thm4"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
    assert_ne!(EXIT_INCONCLUSIVE, EXIT_OK);
}
