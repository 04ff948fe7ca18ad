use super::poly::{Coefficient, GaussianRational};
use crate::tensor::{MixedState, PartySystem, PureStateVec, TAU_NORM};
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Weighted pure states whose span is the range of a mixed state.
///
/// Members may carry exact Gaussian-rational amplitudes. Those are only
/// required to be proportional to the float member, so unnormalised exact
/// vectors are fine: loci do not depend on the scale of a member.
#[derive(Clone, Debug)]
pub struct Ensemble {
    system: PartySystem,
    members: Vec<(f64, PureStateVec)>,
    exact: Option<Vec<Vec<GaussianRational>>>,
}

impl Ensemble {
    /// Members with positive weights summing to 1.
    pub fn new(members: Vec<(f64, PureStateVec)>) -> Result<Self> {
        Self::with_tolerance(members, TAU_NORM)
    }

    fn with_tolerance(members: Vec<(f64, PureStateVec)>, tol: f64) -> Result<Self> {
        let system = members
            .first()
            .map(|(_, m)| m.system().clone())
            .ok_or_else(|| Error::InvalidState("ensemble needs at least one member".into()))?;
        let mut total = 0.0;
        for (w, m) in &members {
            if m.system() != &system {
                return Err(Error::InvalidDimension("ensemble members on different systems".into()));
            }
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidState(format!("weight {w} is not positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(Self {
            system,
            members,
            exact: None,
        })
    }

    /// Ensemble from exact amplitudes; float members are their normalisations.
    pub fn from_exact(system: PartySystem, members: Vec<(f64, Vec<GaussianRational>)>) -> Result<Self> {
        let mut floats = Vec::with_capacity(members.len());
        let mut exact = Vec::with_capacity(members.len());
        for (w, amps) in members {
            let v = CVector::from_iterator(amps.len(), amps.iter().map(|a| a.to_c64()));
            floats.push((w, PureStateVec::normalized(system.clone(), v)?));
            exact.push(amps);
        }
        let mut e = Self::new(floats)?;
        e.exact = Some(exact);
        Ok(e)
    }

    /// Attaches exact amplitudes, checking each is parallel to its float member.
    pub fn with_exact(mut self, exact: Vec<Vec<GaussianRational>>) -> Result<Self> {
        if exact.len() != self.members.len() {
            return Err(Error::InvalidState("one exact vector per member is required".into()));
        }
        for ((_, m), amps) in self.members.iter().zip(&exact) {
            if amps.len() != self.system.total_dim() {
                return Err(Error::InvalidDimension("exact amplitude length".into()));
            }
            let v = CVector::from_iterator(amps.len(), amps.iter().map(|a| a.to_c64()));
            let norm = v.norm();
            if norm == 0.0 {
                return Err(Error::InvalidState("zero exact amplitude vector".into()));
            }
            let overlap = m.amplitudes().dotc(&v).norm() / norm;
            if (overlap - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidState("exact amplitudes are not parallel to the member".into()));
            }
        }
        self.exact = Some(exact);
        Ok(self)
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn members(&self) -> &[(f64, PureStateVec)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|(w, _)| *w).collect()
    }

    pub fn exact_amplitudes(&self) -> Option<&[Vec<GaussianRational>]> {
        self.exact.as_deref()
    }

    /// Same members with new weights (normalised to sum 1).
    pub fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.members.len() {
            return Err(Error::InvalidState("one weight per member is required".into()));
        }
        let total: f64 = weights.iter().sum();
        let members = self
            .members
            .iter()
            .zip(weights)
            .map(|((_, m), &w)| (w / total, m.clone()))
            .collect();
        let mut e = Self::new(members)?;
        e.exact = self.exact.clone();
        Ok(e)
    }

    /// `sum_f w_f |psi_f><psi_f|`.
    pub fn density_matrix(&self) -> CMatrix {
        let n = self.system.total_dim();
        let mut m = CMatrix::zeros(n, n);
        for (w, psi) in &self.members {
            let a = psi.amplitudes();
            m += a * a.adjoint() * Complex64::new(*w, 0.0);
        }
        m
    }

    pub fn to_state(&self) -> Result<MixedState> {
        MixedState::new(self.system.clone(), self.density_matrix())
    }
}

/// Spectral ensemble of `rho`: eigenvectors with eigenvalue above `tau`,
/// weighted by their eigenvalues. Each eigenvector's phase is fixed so that
/// its largest-modulus entry (first one on ties) is real and positive.
pub fn ensemble_from_state(rho: &MixedState, tau: f64) -> Ensemble {
    let spectrum = rho.spectrum();
    let mut members = Vec::new();
    for (j, &l) in spectrum.eigenvalues.iter().enumerate() {
        if l <= tau {
            continue;
        }
        let mut v: CVector = spectrum.eigenvectors.column(j).into_owned();
        fix_phase(&mut v);
        let psi = PureStateVec::normalized(rho.system().clone(), v).expect("eigenvectors are nonzero");
        members.push((l, psi));
    }
    let dropped = spectrum.eigenvalues.len() as f64 * tau.max(0.0);
    Ensemble::with_tolerance(members, TAU_NORM + dropped).expect("spectral ensemble of a valid state")
}

fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
        let phase = z / z.norm();
        *v /= phase;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{random_pure_state, TAU_RECON};

    #[test]
    fn pure_state_single_member() {
        let s = PartySystem::qubits(2);
        let psi = random_pure_state(&s, 4);
        let e = ensemble_from_state(&psi.density(), 1e-12);
        assert_eq!(e.len(), 1);
        assert!((e.weights()[0] - 1.0).abs() < 1e-12);
        let overlap = e.members()[0].1.amplitudes().dotc(psi.amplitudes()).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_four_members() {
        let rho = MixedState::maximally_mixed(PartySystem::qubits(2));
        let e = ensemble_from_state(&rho, 1e-12);
        assert_eq!(e.len(), 4);
        assert!(e.weights().iter().all(|w| (w - 0.25).abs() < 1e-12));
        assert!((e.density_matrix() - rho.matrix()).norm() < TAU_RECON);
    }

    #[test]
    fn reconstruction_of_random_mixture() {
        let s = PartySystem::qubits(3);
        let members: Vec<_> = (0..3).map(|i| (1.0 / 3.0, random_pure_state(&s, 10 + i))).collect();
        let rho = MixedState::from_mixture(&members).unwrap();
        let e = ensemble_from_state(&rho, 1e-12);
        assert_eq!(e.len(), 3);
        assert!((e.density_matrix() - rho.matrix()).norm() < TAU_RECON);
    }

    #[test]
    fn weights_validated() {
        let s = PartySystem::qubits(1);
        let psi = PureStateVec::basis(s, &[0]).unwrap();
        assert!(Ensemble::new(vec![(0.5, psi.clone())]).is_err());
        assert!(Ensemble::new(vec![(-0.5, psi.clone()), (1.5, psi.clone())]).is_err());
        assert!(Ensemble::new(vec![(1.0, psi)]).is_ok());
    }
}
