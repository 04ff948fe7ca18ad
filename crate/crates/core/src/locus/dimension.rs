use super::point::PointPP;
use super::wmatrix::{build_w_matrix, minor_polynomials};
use super::LocusSpec;
use crate::tensor::{numerical_rank, singular_values};
use crate::{CMatrix, Result};

/// Relative threshold for the Jacobian rank.
const JACOBIAN_TOL: f64 = 1e-6;
/// Gradients below this are treated as vanishing (singular points).
const JACOBIAN_FLOOR: f64 = 1e-10;

/// Projective dimension of the locus near `p`: the dimension of the ambient
/// product minus the rank of the Jacobian of the `(k+1)`-minors at `p`.
///
/// The estimate is exact at smooth points of a reduced component and an
/// upper bound of the tangent-space kind elsewhere.
pub fn local_dimension_estimate(spec: &LocusSpec, p: &PointPP, minor_limit: usize) -> Result<usize> {
    let dims = spec.group_dims();
    let ambient: usize = dims.iter().sum::<usize>() - dims.len();
    let w = build_w_matrix(spec.ensemble(), spec.cut())?;
    let minors = minor_polynomials(&w, spec.k(), minor_limit)?;
    if minors.is_empty() {
        return Ok(ambient);
    }
    let nvars: usize = dims.iter().sum();
    let mut jac = CMatrix::zeros(minors.len(), nvars);
    for (i, m) in minors.iter().enumerate() {
        for (j, g) in m.gradient(p.blocks()).into_iter().enumerate() {
            jac[(i, j)] = g;
        }
    }
    let s = singular_values(&jac);
    let rank = if s.first().copied().unwrap_or(0.0) < JACOBIAN_FLOOR {
        0
    } else {
        numerical_rank(&s, JACOBIAN_TOL)
    };
    Ok(ambient.saturating_sub(rank))
}
