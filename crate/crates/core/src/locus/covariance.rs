//! Transport of locus points under local unitaries.
//!
//! If `T = U_1 (x) ... (x) U_l (x) U_R` acts on a state, the W-matrix of the
//! image satisfies `W'(r') = U_R W(r)` whenever `r_g = U_g^T r'_g` for every
//! measured group. Ranks therefore agree at matched points, and the forward
//! map sending a point of the original locus to the image locus is
//! `r'_g = conj(U_g) r_g`.

use super::point::PointPP;
use super::sampling::sample_locus;
use super::{ensemble_from_state, LocusSpec};
use crate::seed::{child_rng, derive_seed};
use crate::tensor::{apply_local_unitaries, haar_unitary, random_pure_state_with, Cut, MixedState, PartySystem};
use crate::{CMatrix, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Point of `rho` to point of `T rho`.
    Forward,
    /// Point of `T rho` back to point of `rho`.
    Inverse,
}

/// Which matrix multiplies a group's coordinates in the forward map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `r' = U r`
    Plain,
    /// `r' = conj(U) r`
    Conjugate,
}

/// Forward convention fixed by [`convention_oracle`]: conjugate on every group.
pub const RESOLVED_CONVENTION: Convention = Convention::Conjugate;

/// Maps `p` with one unitary per measured group using the resolved convention.
pub fn covariance_point_map(p: &PointPP, units: &[CMatrix], direction: Direction) -> Result<PointPP> {
    let conv = vec![RESOLVED_CONVENTION; units.len()];
    covariance_point_map_with(p, units, direction, &conv)
}

/// As [`covariance_point_map`] with an explicit convention per group.
/// The inverse direction applies the inverse of each forward matrix.
pub fn covariance_point_map_with(
    p: &PointPP,
    units: &[CMatrix],
    direction: Direction,
    conventions: &[Convention],
) -> Result<PointPP> {
    if units.len() != p.num_groups() || conventions.len() != units.len() {
        return Err(Error::InvalidDimension(format!(
            "{} unitaries and {} conventions for {} groups",
            units.len(),
            conventions.len(),
            p.num_groups()
        )));
    }
    let mut blocks = Vec::with_capacity(units.len());
    for ((u, b), conv) in units.iter().zip(p.blocks()).zip(conventions) {
        if u.nrows() != b.len() || u.ncols() != b.len() {
            return Err(Error::InvalidDimension(format!(
                "{}x{} unitary for a block of size {}",
                u.nrows(),
                u.ncols(),
                b.len()
            )));
        }
        let forward = match conv {
            Convention::Plain => u.clone(),
            Convention::Conjugate => u.conjugate(),
        };
        let m = match direction {
            Direction::Forward => forward,
            Direction::Inverse => forward.adjoint(),
        };
        blocks.push(m * b);
    }
    PointPP::new(blocks)
}

/// Per-group unitaries of a cut, built from one unitary per party.
pub fn group_unitaries(system: &PartySystem, cut: &Cut, party_units: &[CMatrix]) -> Result<Vec<CMatrix>> {
    if party_units.len() != system.num_parties() {
        return Err(Error::InvalidDimension("one unitary per party is required".into()));
    }
    Ok(cut
        .measured_groups()
        .iter()
        .map(|g| {
            g.iter().fold(CMatrix::identity(1, 1), |acc, &p| acc.kronecker(&party_units[p]))
        })
        .collect())
}

/// Agreement counts of the four candidate conventions at `2x2x2`.
#[derive(Clone, Debug)]
pub struct OracleTally {
    pub trials: usize,
    /// `(convention of group A, convention of group B, trials where the
    /// mapped point had the same rank)`.
    pub agreements: Vec<(Convention, Convention, usize)>,
}

impl OracleTally {
    /// Conventions that agreed in every trial.
    pub fn survivors(&self) -> Vec<(Convention, Convention)> {
        self.agreements
            .iter()
            .filter(|(_, _, n)| *n == self.trials)
            .map(|(a, b, _)| (*a, *b))
            .collect()
    }
}

/// Brute-force experiment that fixes the conjugation convention: random
/// rank-2 states on three qubits, cut `A:B|C`, `k = 1`. Each trial samples a
/// point of the curve `V^1(rho)`, maps it under random local unitaries with
/// each candidate, and checks the rank of the image state's form there.
pub fn convention_oracle(trials: usize, seed: u64) -> Result<OracleTally> {
    use Convention::*;
    let candidates = [(Plain, Plain), (Plain, Conjugate), (Conjugate, Plain), (Conjugate, Conjugate)];
    let system = PartySystem::qubits(3);
    let cut = Cut::parse(&system, "A:B|C")?;
    let mut counts = [0usize; 4];
    let mut done = 0;
    let mut attempt = 0u64;
    while done < trials {
        attempt += 1;
        if attempt > 4 * trials as u64 + 16 {
            break;
        }
        let mut rng = child_rng(seed, attempt);
        let a = random_pure_state_with(&system, &mut rng);
        let b = random_pure_state_with(&system, &mut rng);
        let rho = MixedState::from_mixture(&[(0.5, a), (0.5, b)])?;
        let units: Vec<CMatrix> = (0..3).map(|_| haar_unitary(2, &mut rng)).collect();
        let image = apply_local_unitaries(&rho, &units)?;
        let spec = LocusSpec::new(ensemble_from_state(&rho, 1e-12), cut.clone(), 1, super::TAU_RANK)?;
        let spec_image = LocusSpec::new(ensemble_from_state(&image, 1e-12), cut.clone(), 1, super::TAU_RANK)?;
        let Ok(sample) = sample_locus(&spec, 1, derive_seed(seed, attempt)) else {
            continue;
        };
        let p = &sample.points[0];
        let rank = spec.model().rank(p, spec.tau_rank());
        let gunits = group_unitaries(&system, &cut, &units)?;
        for (slot, (ca, cb)) in counts.iter_mut().zip(candidates) {
            let q = covariance_point_map_with(p, &gunits, Direction::Forward, &[ca, cb])?;
            if spec_image.model().rank(&q, spec_image.tau_rank()) == rank {
                *slot += 1;
            }
        }
        done += 1;
    }
    Ok(OracleTally {
        trials: done,
        agreements: candidates
            .iter()
            .zip(counts)
            .map(|(&(a, b), n)| (a, b, n))
            .collect(),
    })
}
