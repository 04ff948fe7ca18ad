use super::AnalysisConfig;
use crate::seed::child_rng;
use crate::tensor::{partial_trace, random_pure_state_with, schmidt_rank, Cut, PartySystem, PureStateVec};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Outcome for one tripartite pure state on `n^2 x n^2 x n^2`.
#[derive(Clone, Debug)]
pub struct Theorem5Trial {
    /// Largest Schmidt rank (across `A|B`) among the eigenvectors of
    /// `tr_C |psi><psi|` with nonzero eigenvalue.
    pub max_schmidt_rank: usize,
    /// Rank of `tr_C |psi><psi|`.
    pub reduced_rank: usize,
    /// Reduced state of rank below `n^2` or with a degenerate spectrum; the
    /// guarantee only covers generic states.
    pub non_generic: bool,
}

impl Theorem5Trial {
    pub fn passes(&self, n: usize) -> bool {
        self.max_schmidt_rank >= n
    }
}

#[derive(Clone, Debug)]
pub struct Theorem5Report {
    pub n: usize,
    pub trials: Vec<Theorem5Trial>,
    /// Minimum over generic trials of the largest Schmidt rank.
    pub min_max_rank: Option<usize>,
    /// Largest Schmidt rank -> number of trials.
    pub histogram: BTreeMap<usize, usize>,
    pub non_generic: usize,
    /// Every generic trial reached Schmidt rank `n`.
    pub all_pass: bool,
}

fn system_for(n: usize) -> Result<PartySystem> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    PartySystem::with_default_labels(vec![n * n; 3])
}

fn check_scale(n: usize, config: &AnalysisConfig) -> Result<()> {
    let total = (n * n).checked_pow(3).unwrap_or(usize::MAX);
    if total > config.max_total_dim {
        return Err(Error::ScaleLimit(format!(
            "n = {n} needs total dimension {total} > {}",
            config.max_total_dim
        )));
    }
    Ok(())
}

/// Eigen-decomposes `tr_C |psi><psi|` and reports the Schmidt ranks of its eigenvectors.
pub fn theorem5_check_state(psi: &PureStateVec, n: usize, config: &AnalysisConfig) -> Result<Theorem5Trial> {
    let system = system_for(n)?;
    check_scale(n, config)?;
    if psi.system().dims() != system.dims() {
        return Err(Error::InvalidDimension(format!(
            "expected dims {:?}, got {:?}",
            system.dims(),
            psi.system().dims()
        )));
    }
    let labels = psi.system().labels().to_vec();
    let reduced = partial_trace(&psi.density(), &[labels[2].as_str()])?;
    let spec = reduced.spectrum();
    let top = spec.eigenvalues.first().copied().unwrap_or(0.0);
    let cutoff = config.eigen_tolerance.max(1e-10 * top);
    let kept: Vec<usize> = (0..spec.eigenvalues.len()).filter(|&i| spec.eigenvalues[i] > cutoff).collect();
    let degenerate = kept
        .windows(2)
        .any(|w| (spec.eigenvalues[w[0]] - spec.eigenvalues[w[1]]).abs() < 1e-8 * top);
    let pair = reduced.system().clone();
    let bip = Cut::parse(&pair, &format!("{}|{}", labels[0], labels[1]))?;
    let mut max_rank = 0;
    for &i in &kept {
        let v = PureStateVec::normalized(pair.clone(), spec.eigenvectors.column(i).into_owned())?;
        max_rank = max_rank.max(schmidt_rank(&v, &bip, config.schmidt_tolerance)?);
    }
    Ok(Theorem5Trial {
        max_schmidt_rank: max_rank,
        reduced_rank: kept.len(),
        non_generic: kept.len() < n * n || degenerate,
    })
}

/// Runs `trials` seeded random pure states on `n^2 x n^2 x n^2`.
pub fn theorem5_experiment(n: usize, trials: usize, seed: u64) -> Result<Theorem5Report> {
    let config = AnalysisConfig::default();
    let system = system_for(n)?;
    check_scale(n, &config)?;
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let psi = random_pure_state_with(&system, &mut child_rng(seed, t as u64));
            theorem5_check_state(&psi, n, &config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(n, results))
}

fn summarize(n: usize, trials: Vec<Theorem5Trial>) -> Theorem5Report {
    let mut histogram = BTreeMap::new();
    for t in &trials {
        *histogram.entry(t.max_schmidt_rank).or_insert(0) += 1;
    }
    let generic: Vec<&Theorem5Trial> = trials.iter().filter(|t| !t.non_generic).collect();
    Theorem5Report {
        n,
        min_max_rank: generic.iter().map(|t| t.max_schmidt_rank).min(),
        all_pass: generic.iter().all(|t| t.passes(n)),
        non_generic: trials.len() - generic.len(),
        histogram,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_one_always_passes() {
        let r = theorem5_experiment(1, 5, 0).unwrap();
        assert!(r.all_pass);
        assert_eq!(r.min_max_rank, Some(1));
    }

    #[test]
    fn n_two_passes() {
        let r = theorem5_experiment(2, 20, 7).unwrap();
        assert!(r.all_pass);
        assert_eq!(r.non_generic, 0);
        assert!(r.min_max_rank.unwrap() >= 2);
        assert_eq!(r.histogram.values().sum::<usize>(), 20);
    }

    #[test]
    fn product_state_is_flagged() {
        let s = PartySystem::with_default_labels(vec![4, 4, 4]).unwrap();
        let psi = PureStateVec::basis(s, &[0, 1, 2]).unwrap();
        let t = theorem5_check_state(&psi, 2, &AnalysisConfig::default()).unwrap();
        assert!(t.non_generic);
        assert_eq!(t.reduced_rank, 1);
        assert_eq!(t.max_schmidt_rank, 1);
    }

    #[test]
    fn scale_guard() {
        assert!(matches!(theorem5_experiment(5, 1, 0), Err(Error::ScaleLimit(_))));
        assert!(theorem5_experiment(0, 1, 0).is_err());
    }
}
