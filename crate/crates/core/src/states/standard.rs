//! Named reference states.

use super::smolin::smolin_state;
use crate::tensor::{MixedState, PartySystem, PureStateVec};
use crate::{CVector, Complex64, Error, Result};

/// Names accepted by [`standard_states`].
pub const STANDARD_NAMES: [&str; 10] = [
    "ghz",
    "cat",
    "w",
    "bell-phi+",
    "bell-phi-",
    "bell-psi+",
    "bell-psi-",
    "product",
    "maximally-mixed",
    "smolin",
];

#[derive(Clone, Debug, PartialEq)]
pub enum StandardState {
    Pure(PureStateVec),
    Mixed(MixedState),
}

impl StandardState {
    pub fn system(&self) -> &PartySystem {
        match self {
            StandardState::Pure(p) => p.system(),
            StandardState::Mixed(m) => m.system(),
        }
    }

    pub fn to_mixed(&self) -> MixedState {
        match self {
            StandardState::Pure(p) => p.density(),
            StandardState::Mixed(m) => m.clone(),
        }
    }
}

/// Builds a named state on `system`.
///
/// - `ghz`: `sum_i |i...i> / sqrt d`, all parties of equal dimension `d`, at least two parties.
/// - `cat`: `(|0...0> + |1...1>) / sqrt2`, any dims at least 2.
/// - `w`: `(|0..01> + |0..10> + ... + |10..0>) / sqrt n` on `n >= 2` qubits.
/// - `bell-phi+/-`: `(|00> +/- |11>) / sqrt2`; `bell-psi+/-`: `(|01> +/- |10>) / sqrt2` on two qubits.
/// - `product`: `|0...0>`.
/// - `maximally-mixed`: `I / D`.
/// - `smolin`: `(1/4) sum_i P(Bell_i (x) Bell_i)` on four qubits, pairing `AB` against `CD`.
pub fn standard_states(name: &str, system: &PartySystem) -> Result<StandardState> {
    let dims = system.dims();
    let n = dims.len();
    let amp = |pairs: &[(Vec<usize>, f64)]| -> Result<StandardState> {
        let mut v = CVector::zeros(system.total_dim());
        for (digits, c) in pairs {
            v[crate::tensor::index_of_digits(digits, dims)] += Complex64::new(*c, 0.0);
        }
        Ok(StandardState::Pure(PureStateVec::normalized(system.clone(), v)?))
    };
    let need = |ok: bool, what: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDimension(format!("`{name}` needs {what}, got dims {dims:?}")))
        }
    };
    match name {
        "ghz" => {
            need(n >= 2 && dims.iter().all(|&d| d == dims[0]), "at least two parties of equal dimension")?;
            amp(&(0..dims[0]).map(|i| (vec![i; n], 1.0)).collect::<Vec<_>>())
        }
        "cat" => {
            need(n >= 2 && dims.iter().all(|&d| d >= 2), "at least two parties of dimension >= 2")?;
            amp(&[(vec![0; n], 1.0), (vec![1; n], 1.0)])
        }
        "w" => {
            need(n >= 2 && dims.iter().all(|&d| d == 2), "at least two qubits")?;
            let terms: Vec<(Vec<usize>, f64)> = (0..n)
                .map(|j| {
                    let mut d = vec![0; n];
                    d[n - 1 - j] = 1;
                    (d, 1.0)
                })
                .collect();
            amp(&terms)
        }
        "bell-phi+" | "bell-phi-" | "bell-psi+" | "bell-psi-" => {
            need(dims == [2, 2], "two qubits")?;
            let sign = if name.ends_with('+') { 1.0 } else { -1.0 };
            if name.starts_with("bell-phi") {
                amp(&[(vec![0, 0], 1.0), (vec![1, 1], sign)])
            } else {
                amp(&[(vec![0, 1], 1.0), (vec![1, 0], sign)])
            }
        }
        "product" => Ok(StandardState::Pure(PureStateVec::basis(system.clone(), &vec![0; n])?)),
        "maximally-mixed" => Ok(StandardState::Mixed(MixedState::maximally_mixed(system.clone()))),
        "smolin" => {
            need(dims == [2, 2, 2, 2], "four qubits")?;
            let rho = smolin_state();
            Ok(StandardState::Mixed(MixedState::new(system.clone(), rho.matrix().clone())?))
        }
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amps(name: &str, dims: Vec<usize>) -> CVector {
        match standard_states(name, &PartySystem::with_default_labels(dims).unwrap()).unwrap() {
            StandardState::Pure(p) => p.amplitudes().clone(),
            StandardState::Mixed(_) => panic!("expected a pure state"),
        }
    }

    fn support(v: &CVector) -> Vec<(usize, f64)> {
        (0..v.len()).filter(|&i| v[i].norm() > 1e-14).map(|i| (i, v[i].re)).collect()
    }

    #[test]
    fn listed_expansions() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = 1.0 / 3f64.sqrt();
        let close = |a: Vec<(usize, f64)>, b: Vec<(usize, f64)>| {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.0, y.0);
                assert!((x.1 - y.1).abs() < 1e-15);
            }
        };
        close(support(&amps("ghz", vec![2, 2, 2])), vec![(0, h), (7, h)]);
        close(support(&amps("bell-phi+", vec![2, 2])), vec![(0, h), (3, h)]);
        close(support(&amps("bell-psi-", vec![2, 2])), vec![(1, h), (2, -h)]);
        close(support(&amps("w", vec![2, 2, 2])), vec![(1, t), (2, t), (4, t)]);
        close(support(&amps("ghz", vec![3, 3])), vec![(0, t), (4, t), (8, t)]);
        close(support(&amps("cat", vec![3, 2])), vec![(0, h), (3, h)]);
        close(support(&amps("product", vec![2, 3])), vec![(0, 1.0)]);
    }

    #[test]
    fn mixed_states() {
        let s = PartySystem::qubits(4);
        let m = standard_states("maximally-mixed", &s).unwrap().to_mixed();
        assert!((m.matrix()[(5, 5)].re - 1.0 / 16.0).abs() < 1e-15);
        let sm = standard_states("smolin", &s).unwrap().to_mixed();
        assert_eq!(sm.spectrum().count_above(1e-10), 4);
    }

    #[test]
    fn errors() {
        let s = PartySystem::qubits(3);
        assert!(matches!(standard_states("nope", &s), Err(Error::UnknownFamily(_))));
        assert!(matches!(standard_states("bell-phi+", &s), Err(Error::InvalidDimension(_))));
        assert!(matches!(standard_states("smolin", &s), Err(Error::InvalidDimension(_))));
        let mixed = PartySystem::with_default_labels(vec![2, 3]).unwrap();
        assert!(matches!(standard_states("ghz", &mixed), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn every_name_builds_somewhere() {
        for name in STANDARD_NAMES {
            let dims = if name.starts_with("bell") { 2 } else { 4 };
            assert!(standard_states(name, &PartySystem::qubits(dims)).is_ok(), "{name}");
        }
    }
}
