//! Local-unitary obstruction for the generalized Smolin family.
//!
//! At the cut `A:B|CD` the rank-3 locus is the union of four curves in
//! `CP^1 x CP^1`: two of type `x0 y0 = l x1 y1` and two of type
//! `x0 y1 = l x1 y0`. Each is the graph of a Moebius map `y = M x`. A local
//! unitary induces a pair of Moebius maps `(T1, T2)` carrying the curves of
//! one state onto those of the other, so `T2 M_i T1^-1 ~ M'_s(i)` for some
//! bijection `s`. Eliminating `T2` leaves linear conditions on `T1`.

use crate::seed::child_rng;
use crate::{Complex64, Error, Result};
use nalgebra::{Matrix2, SMatrix, Vector2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

type M2 = Matrix2<Complex64>;

/// Outcome of a local-unitary test that is sound for `Inequivalent` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LuVerdict {
    Inequivalent,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub verdict: LuVerdict,
    /// First matching `i -> s(i)` (0-based) for which a Moebius pair was found.
    pub matching: Option<[usize; 4]>,
    /// Whether the closed-form parameter relation fails for every
    /// within-type relabelling of the primed curves.
    pub relation_violated: bool,
    pub matchings_tried: usize,
    /// Smallest verification residual over all candidates; `None` when no
    /// matching admits a candidate pair.
    pub best_residual: Option<f64>,
}

/// Which of the four curves are of type `x0 y0 - l x1 y1`.
const DIAGONAL: [bool; 4] = [true, false, false, true];

fn coefficient_matrix(i: usize, l: Complex64) -> M2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if DIAGONAL[i] {
        M2::new(one, zero, zero, -l)
    } else {
        M2::new(zero, one, -l, zero)
    }
}

/// Moebius map whose graph is `{x^T B y = 0}`: `y = J B^T x`.
fn graph_map(b: &M2) -> M2 {
    let j = M2::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    j * b.transpose()
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn check_lambda(l: &[Complex64; 4]) -> Result<()> {
    for (i, z) in l.iter().enumerate() {
        if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidParams(format!("lambda{} = {z} must be nonzero and finite", i + 1)));
        }
    }
    Ok(())
}

/// Relation `l1 l'3 l'4 = l'1 l'2 l4`, tested for each relabelling of the
/// primed curves that swaps curves of the same type.
fn relation_violated(l: &[Complex64; 4], lp: &[Complex64; 4]) -> bool {
    let variants = [[0, 1, 2, 3], [3, 1, 2, 0], [0, 2, 1, 3], [3, 2, 1, 0]];
    variants.iter().all(|v| {
        let q = [lp[v[0]], lp[v[1]], lp[v[2]], lp[v[3]]];
        let lhs = l[0] * q[2] * q[3];
        let rhs = q[0] * q[1] * l[3];
        (lhs - rhs).norm() > 1e-9 * lhs.norm().max(rhs.norm())
    })
}

/// Tries to prove that the states with parameters `lambda` and `lambda2` are
/// not related by local unitaries. Only `Inequivalent` is a certified answer.
pub fn smolin_lu_obstruction(
    lambda: &[Complex64; 4],
    lambda2: &[Complex64; 4],
    tau: f64,
    seed: u64,
) -> Result<ObstructionReport> {
    check_lambda(lambda)?;
    check_lambda(lambda2)?;
    let b: Vec<M2> = (0..4).map(|i| coefficient_matrix(i, lambda[i])).collect();
    let bp: Vec<M2> = (0..4).map(|i| coefficient_matrix(i, lambda2[i])).collect();
    let m: Vec<M2> = b.iter().map(graph_map).collect();
    let mp: Vec<M2> = bp.iter().map(graph_map).collect();
    let perms = permutations();
    let results: Vec<(bool, f64)> = perms
        .par_iter()
        .enumerate()
        .map(|(idx, s)| try_matching(&m, &bp, &mp, s, tau, seed, idx as u64))
        .collect();
    let best_residual = Some(results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)).filter(|r| r.is_finite());
    let matching = results.iter().position(|r| r.0).map(|i| perms[i]);
    let violated = relation_violated(lambda, lambda2);
    let verdict = if matching.is_none() && violated {
        LuVerdict::Inequivalent
    } else {
        LuVerdict::Undetermined
    };
    Ok(ObstructionReport {
        verdict,
        matching,
        relation_violated: violated,
        matchings_tried: perms.len(),
        best_residual,
    })
}

/// Solves `T1 A_i = mu_i A'_i T1` for `i = 2..4` over all sign choices of
/// `mu_i`, then verifies candidate pairs on sample points of every curve.
#[allow(clippy::too_many_arguments)]
fn try_matching(
    m: &[M2],
    bp: &[M2],
    mp: &[M2],
    s: &[usize; 4],
    tau: f64,
    seed: u64,
    index: u64,
) -> (bool, f64) {
    let mut rng = child_rng(seed, index);
    let Some(m1_inv) = m[0].try_inverse() else {
        return (false, f64::INFINITY);
    };
    let Some(mp1_inv) = mp[s[0]].try_inverse() else {
        return (false, f64::INFINITY);
    };
    let a: Vec<M2> = (1..4).map(|i| m1_inv * m[i]).collect();
    let ap: Vec<M2> = (1..4).map(|i| mp1_inv * mp[s[i]]).collect();
    let mu_abs: Vec<Complex64> = a
        .iter()
        .zip(&ap)
        .map(|(x, y)| (x.determinant() / y.determinant()).sqrt())
        .collect();
    let mut best = f64::INFINITY;
    for signs in 0..8u32 {
        let mu: Vec<Complex64> = (0..3)
            .map(|i| if signs & (1 << i) == 0 { mu_abs[i] } else { -mu_abs[i] })
            .collect();
        // Column-major vec: vec(T A) = (A^T (x) I) t, vec(A' T) = (I (x) A') t.
        let mut l = SMatrix::<Complex64, 12, 4>::zeros();
        let id = M2::identity();
        for i in 0..3 {
            let op = a[i].transpose().kronecker(&id) - id.kronecker(&ap[i]) * mu[i];
            for r in 0..4 {
                for c in 0..4 {
                    l[(4 * i + r, c)] = op[(r, c)];
                }
            }
        }
        let svd = l.svd(false, true);
        let vt = svd.v_t.expect("requested v_t");
        let smax = svd.singular_values.max();
        let null: Vec<usize> = (0..4)
            .filter(|&k| svd.singular_values[k] <= 1e-9 * smax.max(1.0))
            .collect();
        if null.is_empty() {
            continue;
        }
        for _ in 0..20 {
            let mut t = [Complex64::new(0.0, 0.0); 4];
            for &k in &null {
                let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                for (slot, v) in t.iter_mut().zip(vt.row(k).iter()) {
                    *slot += c * v.conj();
                }
            }
            let t1 = M2::new(t[0], t[2], t[1], t[3]);
            let scale = t1.norm();
            if t1.determinant().norm() <= 1e-8 * scale * scale {
                continue;
            }
            let t2 = mp[s[0]] * t1 * m1_inv;
            let r = verify(m, bp, s, &t1, &t2, &mut rng);
            best = best.min(r);
            if r < tau {
                return (true, best);
            }
        }
    }
    (false, best)
}

/// Largest normalised value of `q'_s(i)` at images of 3 random points per curve.
fn verify<R: Rng + ?Sized>(m: &[M2], bp: &[M2], s: &[usize; 4], t1: &M2, t2: &M2, rng: &mut R) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for _ in 0..3 {
            let x = Vector2::new(
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            );
            let y = m[i] * x;
            let (xx, yy) = (t1 * x, t2 * y);
            let q = bp[s[i]];
            let val = (xx.transpose() * q * yy)[(0, 0)].norm();
            let denom = q.norm() * xx.norm() * yy.norm();
            worst = worst.max(if denom > 0.0 { val / denom } else { f64::INFINITY });
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_lambda<R: Rng>(r: &mut R) -> [Complex64; 4] {
        std::array::from_fn(|_| Complex64::new(r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0))
    }

    #[test]
    fn graph_map_lies_on_curve() {
        for i in 0..4 {
            let b = coefficient_matrix(i, Complex64::new(0.3, -1.2));
            let g = graph_map(&b);
            let x = Vector2::new(Complex64::new(0.4, 0.1), Complex64::new(-0.7, 0.2));
            let y = g * x;
            assert!((x.transpose() * b * y)[(0, 0)].norm() < 1e-14);
        }
    }

    #[test]
    fn identical_parameters_undetermined() {
        let mut r = rng(2);
        for _ in 0..10 {
            let l = random_lambda(&mut r);
            let rep = smolin_lu_obstruction(&l, &l, 1e-8, 1).unwrap();
            assert_eq!(rep.verdict, LuVerdict::Undetermined);
            assert!(rep.matching.is_some());
        }
    }

    #[test]
    fn preset_pair_inequivalent() {
        let l = [c(1.), c(1.), c(1.), c(2.)];
        let lp = [c(1.), c(1.), c(1.), c(3.)];
        let rep = smolin_lu_obstruction(&l, &lp, 1e-8, 4).unwrap();
        assert!(rep.relation_violated);
        assert_eq!(rep.verdict, LuVerdict::Inequivalent, "{rep:?}");
    }

    #[test]
    fn coordinate_swap_is_found() {
        // Inverting every parameter is the swap 0 <-> 1 on both factors.
        let mut r = rng(9);
        let l = random_lambda(&mut r);
        let inv = l.map(|z| c(1.0) / z);
        let rep = smolin_lu_obstruction(&l, &inv, 1e-8, 3).unwrap();
        assert_eq!(rep.verdict, LuVerdict::Undetermined);
        assert!(rep.matching.is_some());
    }

    #[test]
    fn random_pairs_inequivalent() {
        let mut r = rng(17);
        for _ in 0..10 {
            let (l, lp) = (random_lambda(&mut r), random_lambda(&mut r));
            let rep = smolin_lu_obstruction(&l, &lp, 1e-8, 5).unwrap();
            assert_eq!(rep.verdict, LuVerdict::Inequivalent);
        }
    }

    #[test]
    fn zero_lambda_rejected() {
        let l = [c(1.), c(0.), c(1.), c(2.)];
        assert!(matches!(smolin_lu_obstruction(&l, &l, 1e-8, 0), Err(Error::InvalidParams(_))));
    }
}
