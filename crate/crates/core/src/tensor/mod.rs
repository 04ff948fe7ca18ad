//! Dense multipartite linear algebra.
//!
//! Basis states of a [`PartySystem`] are indexed row-major by their party
//! digits: for dims `(m1, ..., mk)` the ket `|d1 ... dk>` sits at
//! `((d1 * m2 + d2) * m3 + d3) ...`. Digits are 0-based.

mod cut;
mod linalg;
mod ops;
mod random;

pub use cut::Cut;
pub use linalg::{
    default_rank_tolerance, hermitian_spectrum, kron, numerical_rank, singular_values, Spectrum,
};
pub use ops::{
    apply_local_unitaries, partial_trace, partial_transpose, ppt_check, schmidt_rank,
    tensor_product, PptReport,
};
pub(crate) use ops::partial_transpose_indices;
pub use random::{
    haar_unitary, random_complex_vector, random_haar_unitary, random_pure_state,
    random_pure_state_with, random_unit_vector,
};

use crate::{CMatrix, CVector, Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for unit norm and unit trace.
pub const TAU_NORM: f64 = 1e-9;
/// Tolerance for Hermiticity (absolute, on matrices of norm ~1).
pub const TAU_HERM: f64 = 1e-9;
/// Tolerance on negative eigenvalues of a density matrix.
pub const TAU_PSD: f64 = 1e-9;
/// Tolerance on spectral reconstruction.
pub const TAU_RECON: f64 = 1e-9;

/// Local dimensions and labels of a multipartite system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartySystem {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl PartySystem {
    pub fn new(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension("system needs at least one party".into()));
        }
        if dims.len() != labels.len() {
            return Err(Error::InvalidDimension(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDimension(format!("party dimension {d}")));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains([':', '|', ',', ' ']) {
                return Err(Error::InvalidParams(format!("bad party label `{l}`")));
            }
            if labels[..i].contains(l) {
                return Err(Error::InvalidParams(format!("duplicate party label `{l}`")));
            }
        }
        Ok(Self { dims, labels })
    }

    /// Parties labelled `A`, `B`, `C`, ...
    pub fn with_default_labels(dims: Vec<usize>) -> Result<Self> {
        if dims.len() > 26 {
            return Err(Error::InvalidDimension("at most 26 default labels".into()));
        }
        let labels = (0..dims.len())
            .map(|i| char::from(b'A' + i as u8).to_string())
            .collect();
        Self::new(dims, labels)
    }

    pub fn qubits(n: usize) -> Self {
        Self::with_default_labels(vec![2; n]).expect("valid qubit system")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownParty(label.to_string()))
    }

    /// Resolves a list of labels into sorted, deduplicated party indices.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = labels
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// The system restricted to `parties` (kept in the given order).
    pub fn subsystem(&self, parties: &[usize]) -> PartySystem {
        PartySystem {
            dims: parties.iter().map(|&p| self.dims[p]).collect(),
            labels: parties.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }

    pub fn product_dim(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&p| self.dims[p]).product()
    }
}

/// Row-major digits of `index` for local dimensions `dims`.
pub fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits_of`].
pub fn index_of_digits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Reorders the tensor axes of `amplitudes`: new axis `i` is old axis `order[i]`.
pub fn permute_axes(amplitudes: &[Complex64], dims: &[usize], order: &[usize]) -> Vec<Complex64> {
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];
    let mut new_digits = vec![0; dims.len()];
    for (i, &amp) in amplitudes.iter().enumerate() {
        let old = digits_of(i, dims);
        for (slot, &o) in new_digits.iter_mut().zip(order) {
            *slot = old[o];
        }
        out[index_of_digits(&new_digits, &new_dims)] = amp;
    }
    out
}

/// A normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVec {
    system: PartySystem,
    amplitudes: CVector,
}

impl PureStateVec {
    pub fn new(system: PartySystem, amplitudes: CVector) -> Result<Self> {
        check_len(&system, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { system, amplitudes })
    }

    /// Normalises `amplitudes`; fails on the zero vector.
    pub fn normalized(system: PartySystem, amplitudes: CVector) -> Result<Self> {
        check_len(&system, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self {
            system,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// The basis ket with the given party digits.
    pub fn basis(system: PartySystem, digits: &[usize]) -> Result<Self> {
        if digits.len() != system.num_parties() || digits.iter().zip(system.dims()).any(|(x, d)| x >= d)
        {
            return Err(Error::InvalidDimension(format!("digits {digits:?} out of range")));
        }
        let mut v = CVector::zeros(system.total_dim());
        v[index_of_digits(digits, system.dims())] = Complex64::new(1.0, 0.0);
        Ok(Self { system, amplitudes: v })
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn density(&self) -> MixedState {
        MixedState {
            system: self.system.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Same amplitudes reinterpreted under a relabelled but same-shaped system.
    pub fn with_system(self, system: PartySystem) -> Result<Self> {
        if system.dims() != self.system.dims() {
            return Err(Error::InvalidDimension("relabelled system must keep dims".into()));
        }
        Ok(Self { system, amplitudes: self.amplitudes })
    }
}

fn check_len(system: &PartySystem, len: usize) -> Result<()> {
    if len != system.total_dim() {
        return Err(Error::InvalidDimension(format!(
            "vector of length {len} on a system of dimension {}",
            system.total_dim()
        )));
    }
    Ok(())
}

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    system: PartySystem,
    matrix: CMatrix,
}

impl MixedState {
    pub fn new(system: PartySystem, matrix: CMatrix) -> Result<Self> {
        let n = system.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidDimension(format!(
                "{}x{} matrix on a system of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermitian_deviation(&matrix);
        if herm > TAU_HERM {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TAU_NORM || tr.im.abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let spectrum = hermitian_spectrum(&matrix)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -TAU_PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { system, matrix })
    }

    /// Mixture `sum_i w_i |psi_i><psi_i|`; weights must be positive and sum to 1.
    pub fn from_mixture(members: &[(f64, PureStateVec)]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let system = first.1.system().clone();
        let n = system.total_dim();
        let mut matrix = CMatrix::zeros(n, n);
        let mut total = 0.0;
        for (w, psi) in members {
            if psi.system().dims() != system.dims() {
                return Err(Error::InvalidDimension("mixture members on different systems".into()));
            }
            if !(*w > 0.0) {
                return Err(Error::InvalidState(format!("non-positive weight {w}")));
            }
            total += w;
            matrix += psi.density().matrix * Complex64::new(*w, 0.0);
        }
        if (total - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(Self { system, matrix })
    }

    pub fn maximally_mixed(system: PartySystem) -> Self {
        let n = system.total_dim();
        let matrix = CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0);
        Self { system, matrix }
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> Spectrum {
        hermitian_spectrum(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Crate-internal constructor for results of trace/PSD preserving maps.
    pub(crate) fn from_parts_unchecked(system: PartySystem, matrix: CMatrix) -> Self {
        Self { system, matrix }
    }
}

/// Largest entry of `m - m^dagger`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let dims = [2, 3, 4];
        for i in 0..24 {
            assert_eq!(index_of_digits(&digits_of(i, &dims), &dims), i);
        }
        assert_eq!(digits_of(23, &dims), vec![1, 2, 3]);
    }

    #[test]
    fn permute_axes_swaps_parties() {
        let sys = PartySystem::with_default_labels(vec![2, 3]).unwrap();
        let psi = PureStateVec::basis(sys, &[1, 2]).unwrap();
        let out = permute_axes(psi.amplitudes().as_slice(), &[2, 3], &[1, 0]);
        // |1 2> on (2,3) becomes |2 1> on (3,2)
        assert_eq!(out[2 * 2 + 1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn system_validation() {
        assert!(PartySystem::new(vec![2, 0], vec!["A".into(), "B".into()]).is_err());
        assert!(PartySystem::new(vec![2, 2], vec!["A".into(), "A".into()]).is_err());
        assert!(PartySystem::new(vec![2], vec!["A:B".into()]).is_err());
        assert!(PartySystem::new(vec![], vec![]).is_err());
        let s = PartySystem::with_default_labels(vec![2, 3, 4]).unwrap();
        assert_eq!(s.total_dim(), 24);
        assert_eq!(s.index_of("C").unwrap(), 2);
        assert!(matches!(s.index_of("Z"), Err(Error::UnknownParty(_))));
    }

    #[test]
    fn mixed_state_validation() {
        let sys = PartySystem::qubits(1);
        let bad = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        assert!(matches!(MixedState::new(sys.clone(), bad), Err(Error::NotHermitian(_))));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(MixedState::new(sys.clone(), neg).is_err());
        assert!(MixedState::new(sys.clone(), CMatrix::identity(2, 2)).is_err());
        let mm = MixedState::maximally_mixed(sys.clone());
        assert!(MixedState::new(sys, mm.matrix().clone()).is_ok());
    }
}
