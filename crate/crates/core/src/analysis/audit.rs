use super::AnalysisConfig;
use crate::locus::{
    covariance_point_map_with, ensemble_from_state, group_unitaries, sample_locus, Direction, LocusModel, LocusSpec,
    PointPP, RESOLVED_CONVENTION,
};
use crate::seed::{child_rng, derive_seed};
use crate::tensor::{apply_local_unitaries, haar_unitary, singular_values, Cut, MixedState};
use crate::{CMatrix, Result};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub passed: bool,
    pub trials: usize,
    pub points_checked: usize,
    pub mismatches: usize,
    /// Largest difference of matched singular values of the weighted W,
    /// relative to the largest one.
    pub max_deviation: f64,
}

/// Draws `trials` random local unitaries `T` and checks, at points of the
/// lowest nontrivial rank locus and at random points, that the rank of
/// `rho`'s form at `p` equals that of `T rho` at the transported point.
pub fn lu_covariance_audit(rho: &MixedState, cut: &Cut, trials: usize, seed: u64) -> Result<AuditReport> {
    lu_covariance_audit_with(rho, cut, trials, seed, &AnalysisConfig::default())
}

pub fn lu_covariance_audit_with(
    rho: &MixedState,
    cut: &Cut,
    trials: usize,
    seed: u64,
    config: &AnalysisConfig,
) -> Result<AuditReport> {
    cut.check_system(rho.system())?;
    let ensemble = ensemble_from_state(rho, config.eigen_tolerance);
    let model = LocusModel::new(&ensemble, cut)?;
    let k = model.rows().min(model.cols()).saturating_sub(1);
    let spec = LocusSpec::new(ensemble, cut.clone(), k, config.tau_rank)?;
    let conventions = config
        .audit_conventions
        .clone()
        .unwrap_or_else(|| vec![RESOLVED_CONVENTION; cut.num_groups()]);
    let half = config.audit_points / 2;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(usize, usize, f64)> {
            let mut rng = child_rng(seed, t as u64);
            let units: Vec<CMatrix> = rho.system().dims().iter().map(|&d| haar_unitary(d, &mut rng)).collect();
            let image = apply_local_unitaries(rho, &units)?;
            let image_model = LocusModel::new(&ensemble_from_state(&image, config.eigen_tolerance), cut)?;
            let g = group_unitaries(rho.system(), cut, &units)?;
            let mut points = sample_locus(&spec, half.max(1), derive_seed(seed, t as u64))
                .map(|s| s.points)
                .unwrap_or_default();
            points.truncate(half);
            while points.len() < config.audit_points {
                points.push(PointPP::random(spec.group_dims(), &mut rng));
            }
            let mut mismatches = 0;
            let mut deviation = 0.0f64;
            for p in &points {
                let q = covariance_point_map_with(p, &g, Direction::Forward, &conventions)?;
                if spec.model().rank(p, config.tau_rank) != image_model.rank(&q, config.tau_rank) {
                    mismatches += 1;
                }
                let a = singular_values(&spec.model().eval(p));
                let b = singular_values(&image_model.eval(&q));
                let top = a.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
                for (x, y) in a.iter().zip(&b) {
                    deviation = deviation.max((x - y).abs() / top);
                }
            }
            Ok((points.len(), mismatches, deviation))
        })
        .collect::<Result<Vec<_>>>()?;
    let points_checked = per_trial.iter().map(|r| r.0).sum();
    let mismatches = per_trial.iter().map(|r| r.1).sum();
    let max_deviation = per_trial.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(AuditReport {
        passed: mismatches == 0,
        trials,
        points_checked,
        mismatches,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::Convention;
    use crate::seed::rng;
    use crate::states::smolin_state;
    use crate::tensor::{random_pure_state_with, PartySystem};

    #[test]
    fn smolin_audit_passes() {
        let rho = smolin_state();
        let cut = Cut::parse(rho.system(), "BCD|A").unwrap();
        let r = lu_covariance_audit(&rho, &cut, 3, 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.points_checked, 300);
        assert!(r.max_deviation < 1e-10);
    }

    #[test]
    fn mismatched_convention_fails() {
        let s = PartySystem::qubits(3);
        let mut r = rng(3);
        let members: Vec<_> = (0..3).map(|_| (1.0 / 3.0, random_pure_state_with(&s, &mut r))).collect();
        let rho = MixedState::from_mixture(&members).unwrap();
        let cut = Cut::parse(&s, "A:B|C").unwrap();
        let config = AnalysisConfig {
            audit_conventions: Some(vec![Convention::Plain, Convention::Plain]),
            ..AnalysisConfig::default()
        };
        let bad = lu_covariance_audit_with(&rho, &cut, 3, 2, &config).unwrap();
        assert!(!bad.passed);
        assert!(lu_covariance_audit(&rho, &cut, 3, 2).unwrap().passed);
    }

    #[test]
    fn maximally_mixed_passes() {
        let s = PartySystem::qubits(2);
        let rho = MixedState::maximally_mixed(s.clone());
        let cut = Cut::parse(&s, "A|B").unwrap();
        assert!(lu_covariance_audit(&rho, &cut, 2, 0).unwrap().passed);
    }
}
