use super::AnalysisConfig;
use crate::locus::{
    ensemble_from_state, linearity_test_with, sample_locus, Ensemble, LinearityVerdict, LocusSpec, VerdictTag,
};
use crate::seed::derive_seed;
use crate::tensor::{ppt_check, Cut, MixedState, PartySystem, PptReport};
use crate::{Error, Result};
use rayon::prelude::*;
use std::fmt;

/// Per-cut conclusion. The screen only applies necessary conditions for
/// separability, so there is no "separable" verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScreenVerdict {
    Entangled,
    ConsistentWithSeparable,
    Inconclusive,
}

impl fmt::Display for ScreenVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScreenVerdict::Entangled => "Entangled",
            ScreenVerdict::ConsistentWithSeparable => "ConsistentWithSeparable",
            ScreenVerdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub enum LocusOutcome {
    Tested(LinearityVerdict),
    /// Sampling found no point; the locus may be empty.
    Empty { attempts: usize },
}

#[derive(Clone, Debug)]
pub struct LocusResult {
    pub k: usize,
    pub outcome: LocusOutcome,
    /// Accepted samples over attempted starts.
    pub success_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct CutReport {
    pub cut: Cut,
    pub ppt: Option<PptReport>,
    pub loci: Vec<LocusResult>,
    pub verdict: ScreenVerdict,
    pub justification: String,
}

#[derive(Clone, Debug)]
pub struct ScreenReport {
    pub entries: Vec<CutReport>,
}

impl ScreenReport {
    pub fn verdicts(&self) -> Vec<ScreenVerdict> {
        self.entries.iter().map(|e| e.verdict).collect()
    }
}

/// Default ranks for a cut: the hypersurface locus `k = residual - 1`, plus
/// `k = 1` when a single party is measured against three others.
pub fn default_ks(system: &PartySystem, cut: &Cut) -> Vec<usize> {
    let residual = cut.residual_dim(system);
    let mut ks = vec![residual.saturating_sub(1)];
    let single_vs_three = system.num_parties() == 4
        && cut.num_groups() == 1
        && cut.measured_groups()[0].len() == 1
        && cut.residual().len() == 3;
    if single_vs_three && !ks.contains(&1) {
        ks.push(1);
    }
    ks
}

/// Screens `rho` on every cut. `ks[i]` lists the ranks tested on `cuts[i]`;
/// with `ks = None` the defaults of [`default_ks`] are used.
pub fn separability_screen(
    rho: &MixedState,
    cuts: &[Cut],
    ks: Option<&[Vec<usize>]>,
    seed: u64,
) -> Result<ScreenReport> {
    separability_screen_with(rho, cuts, ks, seed, &AnalysisConfig::default())
}

pub fn separability_screen_with(
    rho: &MixedState,
    cuts: &[Cut],
    ks: Option<&[Vec<usize>]>,
    seed: u64,
    config: &AnalysisConfig,
) -> Result<ScreenReport> {
    if let Some(ks) = ks {
        if ks.len() != cuts.len() {
            return Err(Error::InvalidParams(format!("{} k lists for {} cuts", ks.len(), cuts.len())));
        }
    }
    let ensemble = ensemble_from_state(rho, config.eigen_tolerance);
    let entries = cuts
        .par_iter()
        .enumerate()
        .map(|(i, cut)| {
            let ks = match ks {
                Some(ks) => ks[i].clone(),
                None => default_ks(rho.system(), cut),
            };
            screen_cut(rho, &ensemble, cut, &ks, derive_seed(seed, i as u64), config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScreenReport { entries })
}

fn screen_cut(
    rho: &MixedState,
    ensemble: &Ensemble,
    cut: &Cut,
    ks: &[usize],
    seed: u64,
    config: &AnalysisConfig,
) -> Result<CutReport> {
    cut.check_system(rho.system())?;
    let ppt = if cut.is_two_block() {
        Some(ppt_check(rho, cut, config.ppt_tolerance)?)
    } else {
        None
    };
    let mut loci = Vec::with_capacity(ks.len());
    for (j, &k) in ks.iter().enumerate() {
        let spec = LocusSpec::new(ensemble.clone(), cut.clone(), k, config.tau_rank)?;
        let s = derive_seed(seed, j as u64);
        let result = match sample_locus(&spec, config.samples_per_locus, s) {
            Ok(out) => LocusResult {
                k,
                success_ratio: out.success_ratio(),
                outcome: LocusOutcome::Tested(linearity_test_with(&spec, &out.points, s, &config.linearity)?),
            },
            Err(Error::EmptyOrNotFound { attempts }) => LocusResult {
                k,
                success_ratio: 0.0,
                outcome: LocusOutcome::Empty { attempts },
            },
            Err(e) => return Err(e),
        };
        loci.push(result);
    }
    let (verdict, justification) = decide(ppt.as_ref(), &loci);
    Ok(CutReport {
        cut: cut.clone(),
        ppt,
        loci,
        verdict,
        justification,
    })
}

fn decide(ppt: Option<&PptReport>, loci: &[LocusResult]) -> (ScreenVerdict, String) {
    let mut fired = Vec::new();
    if let Some(p) = ppt.filter(|p| !p.is_ppt) {
        fired.push(format!("partial transpose criterion: minimum eigenvalue {:.3e} < 0", p.min_eigenvalue));
    }
    for l in loci {
        if let LocusOutcome::Tested(v) = &l.outcome {
            if let VerdictTag::NonlinearWitness(w) = &v.tag {
                fired.push(format!(
                    "nonlinear degeneracy locus criterion at k = {}: a separable state has a linear locus; {}",
                    l.k, w.detail
                ));
            }
        }
    }
    if !fired.is_empty() {
        return (ScreenVerdict::Entangled, fired.join("; "));
    }
    let unclear: Vec<usize> = loci
        .iter()
        .filter(|l| matches!(&l.outcome, LocusOutcome::Tested(v) if matches!(v.tag, VerdictTag::Inconclusive)))
        .map(|l| l.k)
        .collect();
    if !unclear.is_empty() {
        return (
            ScreenVerdict::Inconclusive,
            format!("linearity test inconclusive at k = {unclear:?}"),
        );
    }
    let mut parts = Vec::new();
    if ppt.is_some() {
        parts.push("partial transpose is positive".to_string());
    }
    if !loci.is_empty() {
        let ks: Vec<usize> = loci.iter().map(|l| l.k).collect();
        parts.push(format!("degeneracy loci at k = {ks:?} are linear or empty"));
    }
    if parts.is_empty() {
        parts.push("no criterion was applied".to_string());
    }
    (ScreenVerdict::ConsistentWithSeparable, parts.join("; "))
}
