use crate::report::{cut_entry, CheckEntry, FingerprintEntry, ReportFile};
use crate::spec::StateSpecFile;
use crate::{AnalyzeArgs, CliError, FingerprintArgs, ReproduceArgs};
use entloc_core::analysis::{
    compare_fingerprints, separability_screen_with, theorem5_experiment, AnalysisConfig, LocusOutcome, ScreenVerdict,
};
use entloc_core::locus::{ensemble_from_state, VerdictTag};
use entloc_core::seed::rng;
use entloc_core::states::{
    example2_state, moduli_fingerprint, smolin_lu_obstruction, smolin_state, EtaParams, LuVerdict,
};
use entloc_core::tensor::{partial_trace, ppt_check, Cut};
use entloc_core::Complex64;
use rand::Rng;
use std::str::FromStr;
use std::time::Instant;

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn parse_ks(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad rank `{t}` in --k"))))
        .collect()
}

fn parse_list<T: FromStr>(flag: &str, text: &str, len: usize) -> Result<Vec<T>, CliError> {
    let out = text
        .split(',')
        .map(|t| T::from_str(t.trim()).map_err(|_| CliError::Usage(format!("bad value `{}` in --{flag}", t.trim()))))
        .collect::<Result<Vec<T>, _>>()?;
    if out.len() != len {
        return Err(CliError::Usage(format!("--{flag} needs {len} comma-separated values, got {}", out.len())));
    }
    Ok(out)
}

fn eta_of(flag: &str, text: &str) -> Result<EtaParams, CliError> {
    let v: Vec<f64> = parse_list(flag, text, 3)?;
    Ok(EtaParams::new(v[0], v[1], v[2])?)
}

fn lambda_of(flag: &str, text: &str) -> Result<[Complex64; 4], CliError> {
    let v: Vec<Complex64> = parse_list(flag, text, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn check(report: &mut ReportFile, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
    report.checks.push(CheckEntry {
        name: name.into(),
        passed,
        detail: detail.into(),
    });
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ReportFile, CliError> {
    let start = Instant::now();
    let spec = StateSpecFile::read(&args.state)?;
    let ensemble = spec.to_ensemble()?;
    let rho = ensemble.to_state()?;
    let system = rho.system().clone();
    let cuts = if args.cuts.is_empty() {
        Cut::all(&system)
    } else {
        args.cuts
            .iter()
            .map(|c| Cut::parse(&system, c).map_err(|e| CliError::Usage(format!("bad cut `{c}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let ks: Option<Vec<Vec<usize>>> = match args.ks.len() {
        0 => None,
        1 => Some(vec![parse_ks(&args.ks[0])?; cuts.len()]),
        n if n == cuts.len() => Some(args.ks.iter().map(|k| parse_ks(k)).collect::<Result<_, _>>()?),
        n => return Err(CliError::Usage(format!("{n} --k lists for {} cuts", cuts.len()))),
    };
    let mut config = AnalysisConfig::default();
    if let Some(s) = args.samples {
        config.samples_per_locus = s;
    }
    if let Some(t) = args.tolerance {
        config.tau_rank = t;
    }
    let mut report = ReportFile::new("analyze", args.seed, &config);
    report.timings_ms.insert("load".into(), elapsed_ms(start));
    let start = Instant::now();
    let screen = separability_screen_with(&rho, &cuts, ks.as_deref(), args.seed, &config)?;
    report.timings_ms.insert("screen".into(), elapsed_ms(start));
    let start = Instant::now();
    report.cuts = screen.entries.iter().map(|r| cut_entry(&ensemble, r)).collect();
    report.timings_ms.insert("minors".into(), elapsed_ms(start));
    Ok(report)
}

pub fn reproduce(args: &ReproduceArgs) -> Result<ReportFile, CliError> {
    let config = AnalysisConfig::default();
    let mut report = ReportFile::new(&format!("reproduce --example {}", args.example), args.seed, &config);
    let start = Instant::now();
    match args.example.as_str() {
        "1" => example_one(&mut report, args.seed, &config)?,
        "2" => example_two(&mut report, args.seed)?,
        "thm4" => obstruction_checks(&mut report, args.seed)?,
        "thm5" => {
            let r = theorem5_experiment(2, 20, args.seed)?;
            check(
                &mut report,
                "n = 2: some eigenvector of the two-party marginal has Schmidt rank >= 2",
                r.all_pass && r.non_generic == 0,
                format!("{} trials, histogram {:?}, {} non-generic", r.trials.len(), r.histogram, r.non_generic),
            );
        }
        other => {
            return Err(CliError::Usage(format!("unknown example `{other}` (expected 1, 2, thm4 or thm5)")));
        }
    }
    report.timings_ms.insert("total".into(), elapsed_ms(start));
    Ok(report)
}

fn example_one(report: &mut ReportFile, seed: u64, config: &AnalysisConfig) -> Result<(), CliError> {
    let rho = smolin_state();
    let s = rho.system().clone();
    for c in ["AB|CD", "AC|BD", "AD|BC"] {
        let p = ppt_check(&rho, &Cut::parse(&s, c)?, config.ppt_tolerance)?;
        check(report, format!("{c} partial transpose positive"), p.is_ppt, format!("min eigenvalue {:.3e}", p.min_eigenvalue));
    }
    let cuts: Vec<Cut> = ["BCD|A", "ACD|B", "ABD|C", "ABC|D"]
        .iter()
        .map(|c| Cut::parse(&s, c))
        .collect::<Result<_, _>>()?;
    let ks = vec![vec![1]; cuts.len()];
    let screen = separability_screen_with(&rho, &cuts, Some(&ks), seed, config)?;
    let ensemble = ensemble_from_state(&rho, config.eigen_tolerance);
    for e in &screen.entries {
        let witness = e.loci.iter().any(|l| {
            matches!(&l.outcome, LocusOutcome::Tested(v) if matches!(v.tag, VerdictTag::NonlinearWitness(_)))
        });
        check(
            report,
            format!("{} entangled by a nonlinear k = 1 locus", e.cut),
            e.verdict == ScreenVerdict::Entangled && witness,
            e.justification.clone(),
        );
        report.cuts.push(cut_entry(&ensemble, e));
    }
    Ok(())
}

fn example_two(report: &mut ReportFile, seed: u64) -> Result<(), CliError> {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let eta = EtaParams::new(r.random_range(-3.2..3.2), r.random_range(-3.2..3.2), r.random_range(-3.2..3.2))?;
        let rho = example2_state(&eta).density();
        for traced in [vec!["A"], vec!["B"], vec!["C"], vec!["A", "B"], vec!["A", "C"], vec!["B", "C"]] {
            let spec = partial_trace(&rho, &traced)?.spectrum();
            for l in spec.eigenvalues.into_iter().filter(|&l| l > 1e-6) {
                worst = worst.max((l - 1.0 / 3.0).abs());
            }
        }
    }
    check(
        report,
        "nonzero marginal eigenvalues equal 1/3 for 20 random angle triples",
        worst <= 1e-10,
        format!("largest deviation {worst:.3e}"),
    );
    let a = EtaParams::new(0.3, 0.7, 1.1)?;
    let b = EtaParams::new(0.1, 0.2, 0.4)?;
    let cmp = compare_fingerprints(&a, &b);
    check(
        report,
        "preset triples are local-unitarily inequivalent",
        cmp.verdict == LuVerdict::Inequivalent,
        format!("{} vs {}", cmp.first, cmp.second),
    );
    let undetermined = [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]].iter().all(|p| {
        let q = EtaParams { eta: p.map(|i| a.eta[i]) };
        compare_fingerprints(&a, &q).verdict == LuVerdict::Undetermined
    });
    check(report, "permuted angles are not separated", undetermined, "5 permutations of (0.3, 0.7, 1.1)");
    for e in [a, b] {
        report.fingerprints.push(fingerprint_entry(&e));
    }
    Ok(())
}

fn obstruction_checks(report: &mut ReportFile, seed: u64) -> Result<(), CliError> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let l = [c(1.0), c(1.0), c(1.0), c(2.0)];
    let lp = [c(1.0), c(1.0), c(1.0), c(3.0)];
    let v = smolin_lu_obstruction(&l, &lp, 1e-8, seed)?.verdict;
    check(report, "(1,1,1,2) vs (1,1,1,3) inequivalent", v == LuVerdict::Inequivalent, format!("{v:?}"));
    let v = smolin_lu_obstruction(&l, &l, 1e-8, seed)?.verdict;
    check(report, "(1,1,1,2) vs itself undetermined", v == LuVerdict::Undetermined, format!("{v:?}"));
    let mut r = rng(seed);
    let mut draw = || -> [Complex64; 4] {
        std::array::from_fn(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
    };
    let mut separated = 0;
    for i in 0..10 {
        let (a, b) = (draw(), draw());
        if smolin_lu_obstruction(&a, &b, 1e-8, seed.wrapping_add(i))?.verdict == LuVerdict::Inequivalent {
            separated += 1;
        }
    }
    check(report, "10 random parameter pairs inequivalent", separated == 10, format!("{separated} of 10"));
    Ok(())
}

fn fingerprint_entry(eta: &EtaParams) -> FingerprintEntry {
    let f = moduli_fingerprint(eta);
    FingerprintEntry {
        eta: eta.eta,
        fingerprint: f,
        display: f.to_string(),
    }
}

pub fn fingerprint(args: &FingerprintArgs) -> Result<ReportFile, CliError> {
    let mut report = ReportFile::new("fingerprint", args.seed, &AnalysisConfig::default());
    let start = Instant::now();
    let eta_family = args.eta.is_some() || args.eta2.is_some();
    let lambda_family = args.lambda.is_some() || args.lambda2.is_some();
    match (eta_family, lambda_family) {
        (true, true) => return Err(CliError::Usage("choose either --eta or --lambda, not both".into())),
        (false, false) => return Err(CliError::Usage("one of --eta or --lambda is required".into())),
        (true, false) => {
            let eta = eta_of("eta", args.eta.as_deref().ok_or_else(|| CliError::Usage("--eta2 needs --eta".into()))?)?;
            report.fingerprints.push(fingerprint_entry(&eta));
            if let Some(text) = &args.eta2 {
                let eta2 = eta_of("eta2", text)?;
                report.fingerprints.push(fingerprint_entry(&eta2));
                report.lu_verdict = Some(format!("{:?}", compare_fingerprints(&eta, &eta2).verdict));
            }
        }
        (false, true) => {
            let (Some(l), Some(l2)) = (&args.lambda, &args.lambda2) else {
                return Err(CliError::Usage("--lambda and --lambda2 go together".into()));
            };
            let o = smolin_lu_obstruction(&lambda_of("lambda", l)?, &lambda_of("lambda2", l2)?, 1e-8, args.seed)?;
            report.lu_verdict = Some(format!("{:?}", o.verdict));
            report.obstruction = Some(o);
        }
    }
    report.timings_ms.insert("total".into(), elapsed_ms(start));
    Ok(report)
}
