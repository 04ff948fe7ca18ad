//! Four-qubit family generalising Smolin's bound entangled state.
//!
//! A `16 x 4` matrix `T` has nonzero rows only at the kets
//! `|0000>, |0011>, |0101>, |0110>, |1001>, |1010>, |1100>, |1111>`, carrying
//! `a1 h1, a2 h2, a3 h3, a4 h4, a5 h3, a6 h4, a7 h1, a8 h2` for orthonormal
//! row vectors `h1..h4` of `C^4`. The state is the uniform mixture of the
//! normalised columns of `T`.

use crate::locus::poly::{Coefficient, GaussianRational};
use crate::locus::{Ensemble, MultiHomogPoly, PointPP};
use crate::tensor::{haar_unitary, partial_transpose_indices, Cut, MixedState, PartySystem, PureStateVec};
use crate::{CMatrix, CVector, Complex64, Error, Result};
use num_traits::Zero;
use rand::Rng;

/// Tolerance on the orthonormality of `h`.
pub const TAU_ORTHO: f64 = 1e-10;

/// `(ket digits ABCD, index of a, index of h)` for the nonzero rows of `T`, 0-based.
pub const T_ROWS: [([usize; 4], usize, usize); 8] = [
    ([0, 0, 0, 0], 0, 0),
    ([0, 0, 1, 1], 1, 1),
    ([0, 1, 0, 1], 2, 2),
    ([0, 1, 1, 0], 3, 3),
    ([1, 0, 0, 1], 4, 2),
    ([1, 0, 1, 0], 5, 3),
    ([1, 1, 0, 0], 6, 0),
    ([1, 1, 1, 1], 7, 1),
];

#[derive(Clone, Debug, PartialEq)]
pub struct SmolinParams {
    h: [[Complex64; 4]; 4],
    a: [Complex64; 8],
}

impl SmolinParams {
    pub fn new(h: [[Complex64; 4]; 4], a: [Complex64; 8]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                let ip: Complex64 = (0..4).map(|c| h[i][c].conj() * h[j][c]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - target).norm() > TAU_ORTHO {
                    return Err(Error::InvalidParams(format!(
                        "h vectors are not orthonormal: <h{}|h{}> = {ip}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Some(i) = a.iter().position(|z| z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams(format!("a{} must be nonzero and finite", i + 1)));
        }
        Ok(Self { h, a })
    }

    /// `h1 = (1,1,0,0)/sqrt2, h2 = (1,-1,0,0)/sqrt2, h3 = (0,0,1,1)/sqrt2,
    /// h4 = (0,0,1,-1)/sqrt2`, all `a = 1`.
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = |v: [f64; 4]| v.map(|x| Complex64::new(x * s, 0.0));
        Self::new(
            [r([1., 1., 0., 0.]), r([1., -1., 0., 0.]), r([0., 0., 1., 1.]), r([0., 0., 1., -1.])],
            [Complex64::new(1.0, 0.0); 8],
        )
        .expect("standard parameters are valid")
    }

    /// Rows of a Haar unitary for `h` and complex Gaussian `a` with modulus
    /// kept away from zero.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = haar_unitary(4, rng);
        let h = std::array::from_fn(|i| std::array::from_fn(|c| u[(i, c)]));
        let a = std::array::from_fn(|_| loop {
            let z = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
            if z.norm() > 0.2 {
                break z;
            }
        });
        Self::new(h, a).expect("Haar rows are orthonormal")
    }

    pub fn h(&self) -> &[[Complex64; 4]; 4] {
        &self.h
    }

    pub fn a(&self) -> &[Complex64; 8] {
        &self.a
    }

    /// `(-a1/a7, -a3/a5, -a4/a6, -a2/a8)`.
    pub fn lambda(&self) -> [Complex64; 4] {
        let a = &self.a;
        [-a[0] / a[6], -a[2] / a[4], -a[3] / a[5], -a[1] / a[7]]
    }

    /// Matrix `T` (16 x 4).
    pub fn t_matrix(&self) -> CMatrix {
        let mut t = CMatrix::zeros(16, 4);
        for (digits, ai, hi) in T_ROWS {
            let row = digits.iter().fold(0, |acc, &d| 2 * acc + d);
            for c in 0..4 {
                t[(row, c)] = self.a[ai] * self.h[hi][c];
            }
        }
        t
    }

    /// The four bilinear forms whose product cuts out `V^3` at `A:B|CD`,
    /// in the order `(a1 x0y0 + a7 x1y1), (a3 x0y1 + a5 x1y0),
    /// (a4 x0y1 + a6 x1y0), (a2 x0y0 + a8 x1y1)`; `x` measures A, `y` measures B.
    pub fn split_cut_factors(&self) -> [MultiHomogPoly<Complex64>; 4] {
        let a = &self.a;
        [
            diagonal_form(a[0], a[6]),
            antidiagonal_form(a[2], a[4]),
            antidiagonal_form(a[3], a[5]),
            diagonal_form(a[1], a[7]),
        ]
    }
}

/// `p x0 y0 + q x1 y1`.
pub fn diagonal_form(p: Complex64, q: Complex64) -> MultiHomogPoly<Complex64> {
    MultiHomogPoly::from_terms(vec![2, 2], vec![(vec![1, 0, 1, 0], p), (vec![0, 1, 0, 1], q)])
        .expect("homogeneous")
}

/// `p x0 y1 + q x1 y0`.
pub fn antidiagonal_form(p: Complex64, q: Complex64) -> MultiHomogPoly<Complex64> {
    MultiHomogPoly::from_terms(vec![2, 2], vec![(vec![1, 0, 0, 1], p), (vec![0, 1, 1, 0], q)])
        .expect("homogeneous")
}

/// Random point of the curve `{q = 0}` of a nondegenerate `(1,1)` form on
/// `CP^1 x CP^1`: a random `x` and the unique `y` with `x^T B y = 0`.
pub fn random_point_on_form<R: Rng + ?Sized>(q: &MultiHomogPoly<Complex64>, rng: &mut R) -> Result<PointPP> {
    let b = q.bilinear_matrix()?;
    let x = crate::tensor::random_unit_vector(2, rng);
    // y orthogonal (bilinearly) to B^T x: y = J B^T x with J = [[0,1],[-1,0]].
    let btx = [b[0][0] * x[0] + b[1][0] * x[1], b[0][1] * x[0] + b[1][1] * x[1]];
    let y = CVector::from_vec(vec![btx[1], -btx[0]]);
    PointPP::new(vec![x, y])
}

/// Generalised Smolin state and its four-member ensemble (normalised columns of `T`).
pub fn generalized_smolin(params: &SmolinParams) -> Result<(MixedState, Ensemble)> {
    let system = PartySystem::qubits(4);
    let t = params.t_matrix();
    let members = (0..4)
        .map(|c| Ok((0.25, PureStateVec::normalized(system.clone(), t.column(c).into_owned())?)))
        .collect::<Result<Vec<_>>>()?;
    let ensemble = Ensemble::new(members)?;
    let rho = MixedState::new(system, ensemble.density_matrix())?;
    Ok((rho, ensemble))
}

/// Exact variant: `h` rows must be pairwise orthogonal with equal squared
/// norms (exactly), so that normalising them is a common scale of `T`.
/// The ensemble keeps the unnormalised columns as exact amplitudes.
pub fn generalized_smolin_exact(
    h: &[[GaussianRational; 4]; 4],
    a: &[GaussianRational; 8],
) -> Result<(MixedState, Ensemble)> {
    let dot = |u: &[GaussianRational; 4], v: &[GaussianRational; 4]| {
        (0..4).fold(GaussianRational::zero(), |acc, c| acc + u[c].conj() * v[c].clone())
    };
    let n0 = dot(&h[0], &h[0]);
    for i in 0..4 {
        for j in 0..4 {
            let ip = dot(&h[i], &h[j]);
            let ok = if i == j { ip == n0 } else { ip.is_zero() };
            if !ok {
                return Err(Error::InvalidParams("exact h rows must be orthogonal with equal norms".into()));
            }
        }
    }
    if n0.is_zero() || a.iter().any(|z| z.is_zero()) {
        return Err(Error::InvalidParams("zero h row or zero a".into()));
    }
    let scale = 1.0 / n0.to_c64().re.sqrt();
    let hf: [[Complex64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|c| h[i][c].to_c64() * scale));
    let af: [Complex64; 8] = std::array::from_fn(|i| a[i].to_c64());
    let params = SmolinParams::new(hf, af)?;
    let (rho, ensemble) = generalized_smolin(&params)?;
    let exact = (0..4)
        .map(|c| {
            let mut col = vec![GaussianRational::zero(); 16];
            for (digits, ai, hi) in T_ROWS {
                let row = digits.iter().fold(0, |acc, &d| 2 * acc + d);
                col[row] = a[ai].clone() * h[hi][c].clone();
            }
            col
        })
        .collect();
    Ok((rho, ensemble.with_exact(exact)?))
}

/// Whether `rho` equals its partial transpose across the given 2:2 cut within `1e-10`.
pub fn block_pt_invariance_check(params: &SmolinParams, cut: &Cut) -> Result<bool> {
    let (rho, _) = generalized_smolin(params)?;
    pt_invariant(&rho, cut)
}

/// As [`block_pt_invariance_check`] for any four-qubit state.
pub fn pt_invariant(rho: &MixedState, cut: &Cut) -> Result<bool> {
    cut.check_system(rho.system())?;
    if rho.system().num_parties() != 4 || !cut.is_two_block() || cut.measured_groups()[0].len() != 2 {
        return Err(Error::InvalidCut(format!("`{cut}` is not a 2:2 cut of four parties")));
    }
    let pt = partial_transpose_indices(rho.matrix(), rho.system().dims(), &cut.measured_groups()[0]);
    let diff = (pt - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(diff <= 1e-10)
}

/// Smolin's state `(1/4) sum_i P(Bell_i (x) Bell_i)` on `AB|CD`, equal to
/// `(I + sum_{s=x,y,z} s(x)s(x)s(x)s) / 16`.
pub fn smolin_state() -> MixedState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell: [[f64; 4]; 4] = [[h, 0., 0., h], [h, 0., 0., -h], [0., h, h, 0.], [0., h, -h, 0.]];
    let system = PartySystem::qubits(4);
    let members: Vec<(f64, PureStateVec)> = bell
        .iter()
        .map(|b| {
            let v = CVector::from_fn(16, |i, _| Complex64::new(b[i / 4] * b[i % 4], 0.0));
            (0.25, PureStateVec::new(system.clone(), v).expect("unit vector"))
        })
        .collect();
    MixedState::from_mixture(&members).expect("valid mixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::poly::{gaussian_rational, rational};
    use crate::seed::rng;
    use crate::tensor::{kron, TAU_RECON};

    fn pauli() -> [CMatrix; 3] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        [
            CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        ]
    }

    #[test]
    fn smolin_state_pauli_form() {
        let mut m = CMatrix::identity(16, 16);
        for s in pauli() {
            m += kron(&kron(&kron(&s, &s), &s), &s);
        }
        m /= Complex64::new(16.0, 0.0);
        assert!((smolin_state().matrix() - m).norm() < 1e-12);
    }

    #[test]
    fn smolin_state_is_pt_invariant_on_all_2_2_cuts() {
        let rho = smolin_state();
        for c in ["AB", "AC", "AD"] {
            let cut = Cut::bipartition(rho.system(), &c.chars().map(|x| x.to_string()).collect::<Vec<_>>()).unwrap();
            assert!(pt_invariant(&rho, &cut).unwrap(), "{c}");
        }
    }

    #[test]
    fn any_params_give_rank_four_state() {
        let mut r = rng(11);
        for _ in 0..5 {
            let p = SmolinParams::random(&mut r);
            let (rho, e) = generalized_smolin(&p).unwrap();
            let tr = rho.matrix().trace();
            assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
            let spec = rho.spectrum();
            assert!(spec.eigenvalues.iter().all(|&l| l > -1e-12));
            assert_eq!(spec.count_above(1e-10), 4);
            assert!((e.density_matrix() - rho.matrix()).norm() < TAU_RECON);
        }
    }

    #[test]
    fn repeated_h_rejected() {
        let mut h = *SmolinParams::standard().h();
        h[1] = h[0];
        assert!(matches!(
            SmolinParams::new(h, [Complex64::new(1.0, 0.0); 8]),
            Err(Error::InvalidParams(_))
        ));
        let mut a = [Complex64::new(1.0, 0.0); 8];
        a[3] = Complex64::new(0.0, 0.0);
        assert!(SmolinParams::new(*SmolinParams::standard().h(), a).is_err());
    }

    #[test]
    fn standard_params_pt_invariance() {
        // Block identity holds for AB|CD at the standard parameters; the
        // other pairings fail for this row layout of T.
        let p = SmolinParams::standard();
        let s = PartySystem::qubits(4);
        assert!(block_pt_invariance_check(&p, &Cut::parse(&s, "AB|CD").unwrap()).unwrap());
        assert!(!block_pt_invariance_check(&p, &Cut::parse(&s, "AC|BD").unwrap()).unwrap());
        assert!(matches!(
            block_pt_invariance_check(&p, &Cut::parse(&s, "A|BCD").unwrap()),
            Err(Error::InvalidCut(_))
        ));
    }

    #[test]
    fn ab_cd_invariance_for_real_equal_weight_params() {
        // Real a with |a1|=|a7|, |a2|=|a8|, |a3|=|a5|, |a4|=|a6| keeps the
        // block identity T_ij T_i'j'^dagger = T_i'j' T_ij^dagger on AB|CD.
        let mut r = rng(5);
        for _ in 0..10 {
            let base = SmolinParams::random(&mut r);
            let s: [f64; 4] = std::array::from_fn(|_| if r.random::<bool>() { 1.0 } else { -1.0 });
            let a = [s[0], s[1], s[2], s[3], s[2], s[3], s[0], s[1]].map(|x| Complex64::new(x, 0.0));
            let p = SmolinParams::new(*base.h(), a).unwrap();
            let cut = Cut::parse(&PartySystem::qubits(4), "AB|CD").unwrap();
            assert!(block_pt_invariance_check(&p, &cut).unwrap());
        }
    }

    #[test]
    fn eq7_forms_vanish_on_their_curves() {
        let mut r = rng(3);
        let p = SmolinParams::random(&mut r);
        for f in p.split_cut_factors() {
            for _ in 0..10 {
                let x = random_point_on_form(&f, &mut r).unwrap();
                assert!(f.eval(x.blocks()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_family_matches_float_family() {
        let q = |n: i64| gaussian_rational(rational(n, 1), rational(0, 1));
        let h = [[q(1), q(1), q(0), q(0)], [q(1), q(-1), q(0), q(0)], [q(0), q(0), q(1), q(1)], [q(0), q(0), q(1), q(-1)]];
        let a: [GaussianRational; 8] = std::array::from_fn(|i| gaussian_rational(rational(i as i64 + 1, 1), rational(1, 2)));
        let (rho, e) = generalized_smolin_exact(&h, &a).unwrap();
        assert!(e.exact_amplitudes().is_some());
        assert_eq!(rho.spectrum().count_above(1e-10), 4);
        let mut bad = h.clone();
        bad[0][0] = q(2);
        assert!(generalized_smolin_exact(&bad, &a).is_err());
    }
}
