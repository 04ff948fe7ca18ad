use super::{
    digits_of, hermitian_spectrum, index_of_digits, numerical_rank, permute_axes, singular_values,
    Cut, MixedState, PartySystem, PureStateVec,
};
use crate::{CMatrix, CVector, Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// Kronecker product of pure states; party lists are concatenated.
pub fn tensor_product(factors: &[PureStateVec]) -> Result<PureStateVec> {
    if factors.is_empty() {
        return Err(Error::InvalidDimension("empty tensor product".into()));
    }
    let mut dims = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut amps = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for f in factors {
        if f.system().total_dim() == 0 {
            return Err(Error::InvalidDimension("zero-dimensional factor".into()));
        }
        for (d, l) in f.system().dims().iter().zip(f.system().labels()) {
            dims.push(*d);
            labels.push(l.clone());
        }
        amps = amps.kronecker(f.amplitudes());
    }
    // Relabel when factors reuse labels (e.g. several single-party states named `A`).
    let unique = labels.iter().enumerate().all(|(i, l)| !labels[..i].contains(l));
    let system = if unique {
        PartySystem::new(dims, labels)?
    } else {
        PartySystem::with_default_labels(dims)?
    };
    PureStateVec::normalized(system, amps)
}

/// Partial trace over the parties named in `traced`.
pub fn partial_trace<S: AsRef<str>>(rho: &MixedState, traced: &[S]) -> Result<MixedState> {
    let system = rho.system();
    let traced = system.indices_of(traced)?;
    if traced.len() == system.num_parties() {
        return Err(Error::InvalidCut("cannot trace out every party".into()));
    }
    let kept: Vec<usize> = (0..system.num_parties()).filter(|p| !traced.contains(p)).collect();
    Ok(partial_trace_indices(rho, &kept, &traced))
}

pub(crate) fn partial_trace_indices(rho: &MixedState, kept: &[usize], traced: &[usize]) -> MixedState {
    let system = rho.system();
    let dims = system.dims();
    let kept_dims: Vec<usize> = kept.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();
    // full index of (kept index, traced index)
    let mut full = vec![0usize; dk * dt];
    let mut digits = vec![0; dims.len()];
    for k in 0..dk {
        let kd = digits_of(k, &kept_dims);
        for t in 0..dt {
            let td = digits_of(t, &traced_dims);
            for (&p, &x) in kept.iter().zip(&kd) {
                digits[p] = x;
            }
            for (&p, &x) in traced.iter().zip(&td) {
                digits[p] = x;
            }
            full[k * dt + t] = index_of_digits(&digits, dims);
        }
    }
    let m = rho.matrix();
    let out = CMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| m[(full[i * dt + t], full[j * dt + t])]).sum()
    });
    MixedState::from_parts_unchecked(system.subsystem(kept), out)
}

/// Transposes the indices of the named parties.
pub fn partial_transpose<S: AsRef<str>>(rho: &MixedState, subset: &[S]) -> Result<CMatrix> {
    let system = rho.system();
    let subset = system.indices_of(subset)?;
    if subset.is_empty() {
        return Err(Error::InvalidCut("partial transpose over an empty subset".into()));
    }
    Ok(partial_transpose_indices(rho.matrix(), system.dims(), &subset))
}

pub(crate) fn partial_transpose_indices(m: &CMatrix, dims: &[usize], subset: &[usize]) -> CMatrix {
    let n = m.nrows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| digits_of(i, dims)).collect();
    let mut out = CMatrix::zeros(n, n);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        for j in 0..n {
            di.copy_from_slice(&digits[i]);
            dj.copy_from_slice(&digits[j]);
            for &p in subset {
                std::mem::swap(&mut di[p], &mut dj[p]);
            }
            out[(index_of_digits(&di, dims), index_of_digits(&dj, dims))] = m[(i, j)];
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
}

/// Positivity of the partial transpose across a two-block cut.
pub fn ppt_check(rho: &MixedState, cut: &Cut, tol: f64) -> Result<PptReport> {
    cut.check_system(rho.system())?;
    if !cut.is_two_block() {
        return Err(Error::InvalidCut(format!("`{cut}` is not a bipartition")));
    }
    let pt = partial_transpose_indices(rho.matrix(), rho.system().dims(), &cut.measured_groups()[0]);
    let spectrum = hermitian_spectrum(&pt)?;
    let min_eigenvalue = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(PptReport {
        min_eigenvalue,
        is_ppt: min_eigenvalue >= -tol,
    })
}

/// Coefficient matrix of `psi` across a bipartition: rows index the measured
/// group, columns the residual.
pub(crate) fn coefficient_matrix(psi: &PureStateVec, cut: &Cut) -> CMatrix {
    let system = psi.system();
    let order = cut.axis_order();
    let permuted = permute_axes(psi.amplitudes().as_slice(), system.dims(), &order);
    let rows = system.product_dim(&cut.measured_parties());
    let cols = cut.residual_dim(system);
    CMatrix::from_row_slice(rows, cols, &permuted)
}

/// Schmidt rank: singular values of the coefficient matrix above `tol * sigma_max`.
pub fn schmidt_rank(psi: &PureStateVec, bipartition: &Cut, tol: f64) -> Result<usize> {
    bipartition.check_system(psi.system())?;
    if !bipartition.is_two_block() {
        return Err(Error::InvalidCut(format!("`{bipartition}` is not a bipartition")));
    }
    let m = coefficient_matrix(psi, bipartition);
    Ok(numerical_rank(&singular_values(&m), tol))
}

/// `rho -> (U_1 x ... x U_k) rho (U_1 x ... x U_k)^dagger`.
pub fn apply_local_unitaries(rho: &MixedState, units: &[CMatrix]) -> Result<MixedState> {
    let u = local_operator(rho.system(), units)?;
    let m = &u * rho.matrix() * u.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(MixedState::from_parts_unchecked(rho.system().clone(), m))
}

pub(crate) fn local_operator(system: &PartySystem, units: &[CMatrix]) -> Result<CMatrix> {
    if units.len() != system.num_parties() {
        return Err(Error::InvalidDimension(format!(
            "{} unitaries for {} parties",
            units.len(),
            system.num_parties()
        )));
    }
    let mut total = CMatrix::identity(1, 1);
    for (u, &d) in units.iter().zip(system.dims()) {
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::InvalidDimension(format!(
                "{}x{} unitary for a party of dimension {d}",
                u.nrows(),
                u.ncols()
            )));
        }
        total = total.kronecker(u);
    }
    Ok(total)
}
