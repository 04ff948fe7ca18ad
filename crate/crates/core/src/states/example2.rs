//! Three-qutrit family with constant marginal spectra, and its
//! elliptic-curve moduli fingerprint.

use crate::tensor::{PartySystem, PureStateVec};
use crate::{CVector, Complex64, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaParams {
    pub eta: [f64; 3],
}

impl EtaParams {
    pub fn new(eta1: f64, eta2: f64, eta3: f64) -> Result<Self> {
        let eta = [eta1, eta2, eta3];
        if eta.iter().any(|x| !x.is_finite()) {
            return Err(crate::Error::InvalidParams(format!("angles must be finite: {eta:?}")));
        }
        Ok(Self { eta })
    }
}

/// `(v1 (x) |0> + v2 (x) |1> + v3 (x) |2>) / sqrt3` on three qutrits `A, B, C` with
/// `v1 = (e^{i eta1}|00> + |11> + |22>)/sqrt3`,
/// `v2 = (e^{i eta2}|01> + |12> + |20>)/sqrt3`,
/// `v3 = (e^{i eta3}|02> + |10> + |21>)/sqrt3`.
pub fn example2_state(params: &EtaParams) -> PureStateVec {
    let system = PartySystem::with_default_labels(vec![3, 3, 3]).expect("three qutrits");
    let mut v = CVector::zeros(27);
    for c in 0..3 {
        for a in 0..3 {
            // v_{c+1} pairs |a, a + c mod 3>; the phase sits on a = 0.
            let b = (a + c) % 3;
            let amp = if a == 0 {
                Complex64::from_polar(1.0 / 3.0, params.eta[c])
            } else {
                Complex64::new(1.0 / 3.0, 0.0)
            };
            v[9 * a + 3 * b + c] = amp;
        }
    }
    PureStateVec::new(system, v).expect("nine amplitudes of modulus 1/3")
}

/// Extended complex number as a projective pair `num : den` of unit norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub num: Complex64,
    pub den: Complex64,
}

/// Default relative tolerance for comparing fingerprints.
pub const FINGERPRINT_TOL: f64 = 1e-9;

impl Fingerprint {
    /// Normalises the pair; `(0, 0)` is not a valid fingerprint.
    pub fn from_pair(num: Complex64, den: Complex64) -> Option<Self> {
        let n = (num.norm_sqr() + den.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Some(Self {
            num: num / n,
            den: den / n,
        })
    }

    /// True at the pole, up to rounding of the unit pair.
    pub fn is_infinite(&self) -> bool {
        self.den.norm() <= 1e-14
    }

    /// Finite value, `None` at the point at infinity.
    pub fn value(&self) -> Option<Complex64> {
        (!self.is_infinite()).then(|| self.num / self.den)
    }

    /// Chordal comparison `|n1 d2 - n2 d1| <= tol` of unit pairs.
    pub fn approx_eq(&self, other: &Fingerprint, tol: f64) -> bool {
        (self.num * other.den - other.num * self.den).norm() <= tol
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "infinity"),
            Some(z) => write!(f, "{:.12e}{:+.12e}i", z.re, z.im),
        }
    }
}

/// `g = (e^{i eta1} + e^{i eta2} + e^{i eta3}) e^{-i (eta1 + eta2 + eta3)/3}`.
pub fn g_value(params: &EtaParams) -> Complex64 {
    let s: Complex64 = params.eta.iter().map(|&e| Complex64::from_polar(1.0, e)).sum();
    s * Complex64::from_polar(1.0, -params.eta.iter().sum::<f64>() / 3.0)
}

/// `k(x) = x^3 (x^3 + 216)^3 / (27 - x^3)^3` as a projective pair.
pub fn moduli_k(x: Complex64) -> Fingerprint {
    let x3 = x * x * x;
    let num = x3 * (x3 + 216.0).powu(3);
    let den = (Complex64::new(27.0, 0.0) - x3).powu(3);
    Fingerprint::from_pair(num, den).unwrap_or(Fingerprint {
        num: Complex64::new(0.0, 0.0),
        den: Complex64::new(1.0, 0.0),
    })
}

/// `k(g(eta))`.
pub fn moduli_fingerprint(params: &EtaParams) -> Fingerprint {
    moduli_k(g_value(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng;
    use crate::tensor::partial_trace;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn zero_angles_give_real_equal_amplitudes() {
        let psi = example2_state(&EtaParams::new(0.0, 0.0, 0.0).unwrap());
        let a = psi.amplitudes();
        let support: Vec<usize> = (0..27).filter(|&i| a[i].norm() > 0.0).collect();
        assert_eq!(support, vec![0, 4, 8, 11, 12, 16, 19, 23, 24]);
        assert!(support.iter().all(|&i| (a[i] - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn marginal_spectra_are_flat() {
        let mut r = rng(8);
        for _ in 0..20 {
            let eta = EtaParams::new(r.random::<f64>() * 6.3, r.random::<f64>() * 6.3, r.random::<f64>() * 6.3).unwrap();
            let rho = example2_state(&eta).density();
            for traced in [&["A"][..], &["B"], &["C"], &["A", "B"], &["A", "C"], &["B", "C"]] {
                let m = partial_trace(&rho, traced).unwrap();
                let spec = m.spectrum();
                for &l in spec.eigenvalues.iter().filter(|&&l| l > 1e-8) {
                    assert!((l - 1.0 / 3.0).abs() < 1e-10, "{traced:?}: {l}");
                }
                assert_eq!(spec.count_above(1e-8), 3);
            }
        }
    }

    #[test]
    fn pole_and_zero() {
        let f = moduli_fingerprint(&EtaParams::new(0.0, 0.0, 0.0).unwrap());
        assert!(f.is_infinite());
        assert_eq!(f.to_string(), "infinity");
        // x = -6 has x^3 = -216.
        let z = moduli_k(Complex64::new(-6.0, 0.0));
        assert_eq!(z.value().unwrap().norm(), 0.0);
    }

    #[test]
    fn preset_triples_differ() {
        let a = moduli_fingerprint(&EtaParams::new(0.3, 0.7, 1.1).unwrap());
        let b = moduli_fingerprint(&EtaParams::new(0.1, 0.2, 0.4).unwrap());
        assert!(a.value().is_some() && b.value().is_some());
        assert!(!a.approx_eq(&b, FINGERPRINT_TOL));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn fingerprint_symmetries(
            e in prop::array::uniform3(-3.2f64..3.2),
            c in -3.2f64..3.2,
            perm in 0usize..6,
        ) {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let p = perms[perm];
            let base = moduli_fingerprint(&EtaParams { eta: e });
            let moved = EtaParams { eta: [e[p[0]] + c, e[p[1]] + c, e[p[2]] + c] };
            prop_assert!(base.approx_eq(&moduli_fingerprint(&moved), FINGERPRINT_TOL));
        }
    }
}
