use crate::states::{moduli_fingerprint, EtaParams, Fingerprint, LuVerdict, FINGERPRINT_TOL};

#[derive(Clone, Debug)]
pub struct FingerprintComparison {
    pub verdict: LuVerdict,
    pub first: Fingerprint,
    pub second: Fingerprint,
}

/// Compares the moduli fingerprints of two members of the three-qutrit
/// family. Different fingerprints certify local-unitary inequivalence; equal
/// ones decide nothing.
pub fn compare_fingerprints(eta: &EtaParams, eta2: &EtaParams) -> FingerprintComparison {
    compare_fingerprints_with(eta, eta2, FINGERPRINT_TOL)
}

pub fn compare_fingerprints_with(eta: &EtaParams, eta2: &EtaParams, tol: f64) -> FingerprintComparison {
    let first = moduli_fingerprint(eta);
    let second = moduli_fingerprint(eta2);
    let verdict = if first.approx_eq(&second, tol) {
        LuVerdict::Undetermined
    } else {
        LuVerdict::Inequivalent
    };
    FingerprintComparison { verdict, first, second }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(a: f64, b: f64, c: f64) -> EtaParams {
        EtaParams::new(a, b, c).unwrap()
    }

    #[test]
    fn same_parameters_undetermined() {
        let e = eta(0.3, 0.7, 1.1);
        assert_eq!(compare_fingerprints(&e, &e).verdict, LuVerdict::Undetermined);
    }

    #[test]
    fn permutations_undetermined() {
        let e = eta(0.3, 0.7, 1.1);
        for p in [eta(0.7, 0.3, 1.1), eta(1.1, 0.7, 0.3), eta(0.7, 1.1, 0.3)] {
            assert_eq!(compare_fingerprints(&e, &p).verdict, LuVerdict::Undetermined);
        }
    }

    #[test]
    fn preset_triples_inequivalent() {
        let c = compare_fingerprints(&eta(0.3, 0.7, 1.1), &eta(0.1, 0.2, 0.4));
        assert_eq!(c.verdict, LuVerdict::Inequivalent);
        assert!(!c.first.is_infinite() && !c.second.is_infinite());
    }
}
