//! Degeneracy loci of separable measurements.
//!
//! For a cut with measured groups `G1..Gl` and residual `R`, a point
//! `p = (p1, ..., pl)` of `CP^{d1-1} x ... x CP^{dl-1}` induces the Hermitian
//! form `M(p) = sum_f w_f v_f(p) v_f(p)^dagger` on the residual space, where
//! `v_f(p)_b = sum_mu p1[mu1] ... pl[mul] psi_f(mu, b)`. The locus `V^k` is the
//! set where `rank M(p) <= k`; it is cut out by the `(k+1)`-minors of the
//! holomorphic matrix `W(p)` with rows `v_f(p)`.

mod covariance;
mod dimension;
mod ensemble;
mod linearity;
mod point;
pub mod poly;
mod sampling;
mod wmatrix;

pub use covariance::{
    convention_oracle, covariance_point_map, covariance_point_map_with, Convention, Direction,
    group_unitaries, OracleTally, RESOLVED_CONVENTION,
};
pub use dimension::local_dimension_estimate;
pub use ensemble::{ensemble_from_state, Ensemble};
pub use linearity::{
    bilinear_rank_factor_test, linearity_test, linearity_test_with, BilinearFactorization, ComponentKind, ComponentSample,
    LinearityOptions, LinearityVerdict, VerdictTag, Witness,
};
pub use point::PointPP;
pub use poly::{GaussianRational, MultiHomogPoly};
pub use sampling::{project_to_locus, sample_locus, sample_locus_with, SampleOutcome, SamplingOptions};
pub use wmatrix::{
    build_exact_w_matrix, build_w_matrix, minor_polynomials, LocusModel, WMatrix, DEFAULT_MINOR_LIMIT,
};

use crate::tensor::Cut;
use crate::{CMatrix, Error, Result};

/// Default relative rank threshold.
pub const TAU_RANK: f64 = 1e-8;

/// A `(state, cut, k)` query.
#[derive(Clone, Debug)]
pub struct LocusSpec {
    ensemble: Ensemble,
    cut: Cut,
    k: usize,
    tau_rank: f64,
    model: LocusModel,
}

impl LocusSpec {
    pub fn new(ensemble: Ensemble, cut: Cut, k: usize, tau_rank: f64) -> Result<Self> {
        let model = LocusModel::new(&ensemble, &cut)?;
        if k >= model.cols() {
            return Err(Error::InvalidParams(format!(
                "k = {k} must be below the residual dimension {}",
                model.cols()
            )));
        }
        if !(tau_rank > 0.0 && tau_rank < 1.0) {
            return Err(Error::InvalidParams(format!("rank tolerance {tau_rank} outside (0, 1)")));
        }
        Ok(Self {
            ensemble,
            cut,
            k,
            tau_rank,
            model,
        })
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn cut(&self) -> &Cut {
        &self.cut
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau_rank(&self) -> f64 {
        self.tau_rank
    }

    pub fn model(&self) -> &LocusModel {
        &self.model
    }

    pub fn group_dims(&self) -> &[usize] {
        self.model.group_sizes()
    }

    /// Whether every point lies in the locus (`k` reaches the generic rank bound).
    pub fn is_everything(&self) -> bool {
        self.k >= self.model.rows().min(self.model.cols())
    }

    fn check_point(&self, p: &PointPP) -> Result<()> {
        if p.dims() != self.group_dims() {
            return Err(Error::InvalidDimension(format!(
                "point blocks {:?} do not match group dims {:?}",
                p.dims(),
                self.group_dims()
            )));
        }
        Ok(())
    }
}

/// Gram form `M(p)` of `e` for `cut` at `p`.
pub fn gram_form_at(e: &Ensemble, cut: &Cut, p: &PointPP) -> Result<CMatrix> {
    let model = LocusModel::new(e, cut)?;
    check_dims(&model, p)?;
    Ok(model.gram(p))
}

/// Numerical rank of `M(p)`, computed on the weighted W at relative threshold `tau_rank`.
pub fn rank_at(e: &Ensemble, cut: &Cut, p: &PointPP, tau_rank: f64) -> Result<usize> {
    let model = LocusModel::new(e, cut)?;
    check_dims(&model, p)?;
    Ok(model.rank(p, tau_rank))
}

fn check_dims(model: &LocusModel, p: &PointPP) -> Result<()> {
    if p.dims() != model.group_sizes() {
        return Err(Error::InvalidDimension(format!(
            "point blocks {:?} do not match group dims {:?}",
            p.dims(),
            model.group_sizes()
        )));
    }
    Ok(())
}

/// `rank_at <= k` at the spec's threshold.
pub fn membership(spec: &LocusSpec, p: &PointPP) -> Result<bool> {
    spec.check_point(p)?;
    Ok(spec.model.rank(p, spec.tau_rank) <= spec.k)
}

/// Membership at `tau/10`, `tau` and `10 tau`; `None` when they disagree.
pub fn robust_membership(spec: &LocusSpec, p: &PointPP) -> Result<Option<bool>> {
    spec.check_point(p)?;
    let w = spec.model.eval(p);
    let votes: Vec<bool> = [0.1, 1.0, 10.0]
        .iter()
        .map(|f| {
            let tau = spec.tau_rank * f;
            wmatrix::rank_of(&w, tau, spec.model.floor(tau)) <= spec.k
        })
        .collect();
    Ok(if votes.iter().all(|&v| v) {
        Some(true)
    } else if votes.iter().all(|&v| !v) {
        Some(false)
    } else {
        None
    })
}
