//! Machine-readable reports.

use entloc_core::analysis::{AnalysisConfig, CutReport, LocusOutcome, LocusResult};
use entloc_core::locus::{
    build_exact_w_matrix, build_w_matrix, minor_polynomials, ComponentKind, Ensemble, PointPP, VerdictTag,
    RESOLVED_CONVENTION,
};
use entloc_core::states::{Fingerprint, ObstructionReport};
use entloc_core::tensor::{Cut, PptReport};
use entloc_core::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Most polynomials written per locus.
pub const MAX_DUMPED_POLYNOMIALS: usize = 16;
/// Minors are not expanded when a locus has more than this many.
pub const MAX_EXPANDED_MINORS: usize = 2_000;

/// A point as one list of `[re, im]` coordinates per measured group.
pub type PointJson = Vec<Vec<Complex64>>;

pub fn point_json(p: &PointPP) -> PointJson {
    p.blocks().iter().map(|b| b.iter().copied().collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tau_rank: f64,
    pub ppt: f64,
    pub eigen: f64,
    pub schmidt: f64,
    pub fingerprint: f64,
    pub samples_per_locus: usize,
}

impl From<&AnalysisConfig> for Tolerances {
    fn from(c: &AnalysisConfig) -> Self {
        Self {
            tau_rank: c.tau_rank,
            ppt: c.ppt_tolerance,
            eigen: c.eigen_tolerance,
            schmidt: c.schmidt_tolerance,
            fingerprint: c.fingerprint_tolerance,
            samples_per_locus: c.samples_per_locus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDump {
    /// Number of `(k+1)`-minors defining the locus.
    pub count: usize,
    /// Nonzero minors in sorted monomial order, at most [`MAX_DUMPED_POLYNOMIALS`].
    pub polynomials: Vec<String>,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub kind: String,
    pub samples: usize,
    /// Fitted bilinear equation, when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub locus_point: PointJson,
    pub span_point: PointJson,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocusEntry {
    pub k: usize,
    /// `Linear`, `NonlinearWitness`, `Inconclusive` or `Empty`.
    pub tag: String,
    pub success_ratio: f64,
    pub components: Vec<ComponentEntry>,
    pub samples: Vec<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
    pub minors: PolynomialDump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutEntry {
    pub cut: String,
    pub verdict: String,
    pub justification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppt: Option<PptReport>,
    pub loci: Vec<LocusEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FingerprintEntry {
    pub eta: [f64; 3],
    /// Projective pair `num : den` of unit norm.
    pub fingerprint: Fingerprint,
    pub display: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub convention: String,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cuts: Vec<CutEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fingerprints: Vec<FingerprintEntry>,
    /// `Inequivalent` or `Undetermined`, for comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lu_verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionReport>,
    /// Wall-clock milliseconds per phase.
    pub timings_ms: BTreeMap<String, f64>,
}

impl ReportFile {
    pub fn new(command: &str, seed: u64, config: &AnalysisConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            convention: format!("{RESOLVED_CONVENTION:?}"),
            tolerances: config.into(),
            cuts: Vec::new(),
            checks: Vec::new(),
            fingerprints: Vec::new(),
            lu_verdict: None,
            obstruction: None,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn has_inconclusive(&self) -> bool {
        self.cuts.iter().any(|c| c.verdict == "Inconclusive")
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Short plain-text summary.
    pub fn summary(&self) -> String {
        let mut out = format!("{} {} {} (seed {})\n", self.tool, self.version, self.command, self.seed);
        for c in &self.cuts {
            out += &format!("{:<12} {:<24} {}\n", c.cut, c.verdict, c.justification);
            for l in &c.loci {
                out += &format!("    k = {}: {} ({} components)\n", l.k, l.tag, l.components.len());
                for comp in l.components.iter().filter(|c| c.form.is_some()) {
                    out += &format!(
                        "        {} component, rank {}: {}\n",
                        comp.kind,
                        comp.form_rank.unwrap_or(0),
                        comp.form.as_deref().unwrap_or("")
                    );
                }
            }
        }
        for c in &self.checks {
            out += &format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        for f in &self.fingerprints {
            out += &format!("fingerprint k(g({:?})) = {}\n", f.eta, f.display);
        }
        if let Some(o) = &self.obstruction {
            let residual = o.best_residual.map_or("none".to_string(), |r| format!("{r:.3e}"));
            out += &format!(
                "obstruction: {:?} after {} matchings (best residual {residual})\n",
                o.verdict, o.matchings_tried
            );
        }
        if let Some(v) = &self.lu_verdict {
            out += &format!("local-unitary verdict: {v}\n");
        }
        out
    }
}

/// Nonzero `(k+1)`-minors of `e`'s W-matrix at `cut`, exact when `e` has
/// exact amplitudes.
pub fn dump_minors(e: &Ensemble, cut: &Cut, k: usize) -> PolynomialDump {
    let exact = e.exact_amplitudes().is_some();
    let result = if exact {
        build_exact_w_matrix(e, cut).and_then(|w| {
            minor_polynomials(&w, k, MAX_EXPANDED_MINORS).map(|m| m.iter().map(|p| p.to_string()).collect::<Vec<_>>())
        })
    } else {
        build_w_matrix(e, cut).and_then(|w| {
            minor_polynomials(&w, k, MAX_EXPANDED_MINORS).map(|m| m.iter().map(|p| p.to_string()).collect::<Vec<_>>())
        })
    };
    match result {
        Ok(all) => {
            let count = all.len();
            let note = (count > MAX_DUMPED_POLYNOMIALS).then(|| format!("first {MAX_DUMPED_POLYNOMIALS} shown"));
            PolynomialDump {
                count,
                polynomials: all.into_iter().take(MAX_DUMPED_POLYNOMIALS).collect(),
                exact,
                note,
            }
        }
        Err(err) => PolynomialDump {
            count: 0,
            polynomials: Vec::new(),
            exact,
            note: Some(err.to_string()),
        },
    }
}

fn locus_entry(e: &Ensemble, cut: &Cut, l: &LocusResult) -> LocusEntry {
    let minors = dump_minors(e, cut, l.k);
    match &l.outcome {
        LocusOutcome::Empty { .. } => LocusEntry {
            k: l.k,
            tag: "Empty".into(),
            success_ratio: l.success_ratio,
            components: Vec::new(),
            samples: Vec::new(),
            witness: None,
            minors,
        },
        LocusOutcome::Tested(v) => LocusEntry {
            k: l.k,
            tag: v.tag.name().into(),
            success_ratio: l.success_ratio,
            components: v
                .components
                .iter()
                .map(|c| ComponentEntry {
                    kind: match c.kind {
                        ComponentKind::Linear => "linear".into(),
                        ComponentKind::Nonlinear => "nonlinear".into(),
                    },
                    samples: c.points.len(),
                    form: c.form.as_ref().map(|f| f.to_string()),
                    form_rank: c.form_rank,
                })
                .collect(),
            samples: v.components.iter().flat_map(|c| c.points.iter().map(point_json)).collect(),
            witness: match &v.tag {
                VerdictTag::NonlinearWitness(w) => Some(WitnessEntry {
                    locus_point: point_json(&w.locus_point),
                    span_point: point_json(&w.span_point),
                    detail: w.detail.clone(),
                }),
                _ => None,
            },
            minors,
        },
    }
}

pub fn cut_entry(e: &Ensemble, r: &CutReport) -> CutEntry {
    CutEntry {
        cut: r.cut.to_string(),
        verdict: r.verdict.to_string(),
        justification: r.justification.clone(),
        ppt: r.ppt.clone(),
        loci: r.loci.iter().map(|l| locus_entry(e, &r.cut, l)).collect(),
    }
}
