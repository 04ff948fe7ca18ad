//! JSON state descriptions.

use crate::CliError;
use entloc_core::locus::{ensemble_from_state, Ensemble, GaussianRational};
use entloc_core::seed::rng;
use entloc_core::states::{
    example2_state, generalized_smolin, standard_states, EtaParams, SmolinParams, StandardState, STANDARD_NAMES,
};
use entloc_core::tensor::{MixedState, PartySystem, PureStateVec};
use entloc_core::{CVector, Complex64};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// An integer written either as a JSON number or, when it does not fit in
/// 64 bits, as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BigIntRepr {
    Small(i64),
    Text(String),
}

impl BigIntRepr {
    fn from_big(n: &BigInt) -> Self {
        i64::try_from(n).map(BigIntRepr::Small).unwrap_or_else(|_| BigIntRepr::Text(n.to_string()))
    }

    fn to_big(&self) -> Result<BigInt, CliError> {
        match self {
            BigIntRepr::Small(n) => Ok(BigInt::from(*n)),
            BigIntRepr::Text(s) => s.trim().parse().map_err(|_| CliError::Spec(format!("`{s}` is not an integer"))),
        }
    }
}

/// `[re, im]` floats, or exact `[[p, q], [r, s]]` meaning `p/q + (r/s) i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Float([f64; 2]),
    Exact([[BigIntRepr; 2]; 2]),
}

impl Amplitude {
    fn exact(&self) -> Result<GaussianRational, CliError> {
        let Amplitude::Exact([[p, q], [r, s]]) = self else {
            return Err(CliError::Spec("exact mode needs [[p,q],[r,s]] amplitudes".into()));
        };
        let ratio = |n: &BigIntRepr, d: &BigIntRepr| -> Result<BigRational, CliError> {
            let d = d.to_big()?;
            if d == BigInt::from(0) {
                return Err(CliError::Spec("zero denominator".into()));
            }
            Ok(BigRational::new(n.to_big()?, d))
        };
        Ok(GaussianRational::new(ratio(p, q)?, ratio(r, s)?))
    }

    fn float(&self) -> Result<Complex64, CliError> {
        match self {
            Amplitude::Float([re, im]) => Ok(Complex64::new(*re, *im)),
            Amplitude::Exact(_) => Ok(entloc_core::locus::poly::Coefficient::to_c64(&self.exact()?)),
        }
    }

    fn from_exact(z: &GaussianRational) -> Self {
        Amplitude::Exact([
            [BigIntRepr::from_big(z.re.numer()), BigIntRepr::from_big(z.re.denom())],
            [BigIntRepr::from_big(z.im.numer()), BigIntRepr::from_big(z.im.denom())],
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberSpec {
    pub weight: f64,
    pub amplitudes: Vec<Amplitude>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
    pub ensemble: Vec<MemberSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
}

/// Contents of a state file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpecFile {
    Ensemble(EnsembleSpec),
    Family(FamilySpec),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SmolinFamilyParams {
    seed: Option<u64>,
    h: Option<[[[f64; 2]; 4]; 4]>,
    a: Option<[[f64; 2]; 8]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EtaFamilyParams {
    eta: [f64; 3],
}

fn system(dims: Vec<usize>, labels: Option<Vec<String>>) -> Result<PartySystem, CliError> {
    Ok(match labels {
        Some(l) => PartySystem::new(dims, l)?,
        None => PartySystem::with_default_labels(dims)?,
    })
}

fn params<T: serde::de::DeserializeOwned>(family: &str, v: &serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Spec(format!("parameters of `{family}`: {e}")))
}

impl StateSpecFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state specs serialize")
    }

    /// Float spec of an ensemble; exact amplitudes are kept when present.
    pub fn from_ensemble(e: &Ensemble) -> Self {
        let s = e.system();
        let ensemble = match e.exact_amplitudes() {
            Some(exact) => e
                .weights()
                .iter()
                .zip(exact)
                .map(|(&weight, amps)| MemberSpec {
                    weight,
                    amplitudes: amps.iter().map(Amplitude::from_exact).collect(),
                })
                .collect(),
            None => e
                .members()
                .iter()
                .map(|(weight, m)| MemberSpec {
                    weight: *weight,
                    amplitudes: m.amplitudes().iter().map(|z| Amplitude::Float([z.re, z.im])).collect(),
                })
                .collect(),
        };
        StateSpecFile::Ensemble(EnsembleSpec {
            dims: s.dims().to_vec(),
            labels: Some(s.labels().to_vec()),
            exact: e.exact_amplitudes().is_some(),
            ensemble,
        })
    }

    /// Spec of a mixed state through its eigen-ensemble.
    pub fn from_state(rho: &MixedState) -> Self {
        Self::from_ensemble(&ensemble_from_state(rho, 1e-14))
    }

    /// The described ensemble. Float amplitudes are normalised; weights must
    /// sum to 1.
    pub fn to_ensemble(&self) -> Result<Ensemble, CliError> {
        match self {
            StateSpecFile::Ensemble(spec) => {
                let s = system(spec.dims.clone(), spec.labels.clone())?;
                for (i, m) in spec.ensemble.iter().enumerate() {
                    if m.amplitudes.len() != s.total_dim() {
                        return Err(CliError::Spec(format!(
                            "member {i} has {} amplitudes, expected {}",
                            m.amplitudes.len(),
                            s.total_dim()
                        )));
                    }
                }
                if spec.exact {
                    let members = spec
                        .ensemble
                        .iter()
                        .map(|m| Ok((m.weight, m.amplitudes.iter().map(Amplitude::exact).collect::<Result<_, _>>()?)))
                        .collect::<Result<Vec<_>, CliError>>()?;
                    return Ok(Ensemble::from_exact(s, members)?);
                }
                let members = spec
                    .ensemble
                    .iter()
                    .map(|m| {
                        let v = m.amplitudes.iter().map(Amplitude::float).collect::<Result<Vec<_>, _>>()?;
                        Ok((m.weight, PureStateVec::normalized(s.clone(), CVector::from_vec(v))?))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(Ensemble::new(members)?)
            }
            StateSpecFile::Family(spec) => family_ensemble(spec),
        }
    }

    pub fn to_state(&self) -> Result<MixedState, CliError> {
        Ok(self.to_ensemble()?.to_state()?)
    }
}

fn family_ensemble(spec: &FamilySpec) -> Result<Ensemble, CliError> {
    let name = spec.family.as_str();
    let with_labels = |default: Vec<usize>| system(spec.dims.clone().unwrap_or(default), spec.labels.clone());
    match name {
        "generalized-smolin" => {
            let p: SmolinFamilyParams = params(name, &spec.params)?;
            let sp = match (p.seed, p.h, p.a) {
                (Some(seed), None, None) => SmolinParams::random(&mut rng(seed)),
                (None, Some(h), Some(a)) => {
                    let c = |z: [f64; 2]| Complex64::new(z[0], z[1]);
                    SmolinParams::new(h.map(|row| row.map(c)), a.map(c))?
                }
                (None, None, None) => SmolinParams::standard(),
                _ => return Err(CliError::Spec("generalized-smolin takes either `seed` or both `h` and `a`".into())),
            };
            let (_, e) = generalized_smolin(&sp)?;
            relabel(e, spec.labels.clone())
        }
        "qutrit-eta" => {
            let p: EtaFamilyParams = params(name, &spec.params)?;
            let psi = example2_state(&EtaParams::new(p.eta[0], p.eta[1], p.eta[2])?);
            let psi = match &spec.labels {
                Some(l) => psi.with_system(PartySystem::new(vec![3, 3, 3], l.clone())?)?,
                None => psi,
            };
            Ok(Ensemble::new(vec![(1.0, psi)])?)
        }
        _ if STANDARD_NAMES.contains(&name) => {
            if !spec.params.is_null() {
                return Err(CliError::Spec(format!("family `{name}` takes no parameters")));
            }
            let default = if name == "smolin" { vec![2; 4] } else { vec![2; 3] };
            let default = if name.starts_with("bell") { vec![2, 2] } else { default };
            match standard_states(name, &with_labels(default)?)? {
                StandardState::Pure(p) => Ok(Ensemble::new(vec![(1.0, p)])?),
                StandardState::Mixed(m) => Ok(ensemble_from_state(&m, 1e-14)),
            }
        }
        _ => Err(entloc_core::Error::UnknownFamily(name.to_string()).into()),
    }
}

fn relabel(e: Ensemble, labels: Option<Vec<String>>) -> Result<Ensemble, CliError> {
    let Some(labels) = labels else { return Ok(e) };
    let s = PartySystem::new(e.system().dims().to_vec(), labels)?;
    let members = e
        .members()
        .iter()
        .map(|(w, m)| Ok((*w, m.clone().with_system(s.clone())?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Ensemble::new(members)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_float_ensemble() {
        let text = r#"{"dims": [2, 2], "ensemble": [{"weight": 1, "amplitudes": [[1,0],[0,0],[0,0],[1,0]]}]}"#;
        let e = StateSpecFile::parse(text).unwrap().to_ensemble().unwrap();
        let a = e.members()[0].1.amplitudes();
        assert!((a[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(e.system().labels(), &["A", "B"]);
    }

    #[test]
    fn parses_exact_ensemble() {
        let text = r#"{"dims": [2], "exact": true, "ensemble": [
            {"weight": 1, "amplitudes": [[[1,2],[0,1]], [[0,1],["-3","4"]]]}]}"#;
        let e = StateSpecFile::parse(text).unwrap().to_ensemble().unwrap();
        let exact = &e.exact_amplitudes().unwrap()[0];
        assert_eq!(exact[1].im, BigRational::new(BigInt::from(-3), BigInt::from(4)));
        let a = e.members()[0].1.amplitudes();
        assert!((a[1] / a[0] - Complex64::new(0.0, -1.5)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_weights_and_sizes() {
        let bad_weight = r#"{"dims": [2], "ensemble": [{"weight": 0.5, "amplitudes": [[1,0],[0,0]]}]}"#;
        assert!(StateSpecFile::parse(bad_weight).unwrap().to_ensemble().is_err());
        let bad_len = r#"{"dims": [2], "ensemble": [{"weight": 1, "amplitudes": [[1,0]]}]}"#;
        assert!(StateSpecFile::parse(bad_len).unwrap().to_ensemble().is_err());
        assert!(StateSpecFile::parse(r#"{"dims": [2]}"#).is_err());
    }

    #[test]
    fn families() {
        for (text, dims) in [
            (r#"{"family": "ghz"}"#, vec![2, 2, 2]),
            (r#"{"family": "ghz", "dims": [3, 3]}"#, vec![3, 3]),
            (r#"{"family": "smolin"}"#, vec![2; 4]),
            (r#"{"family": "generalized-smolin", "params": {"seed": 3}}"#, vec![2; 4]),
            (r#"{"family": "qutrit-eta", "params": {"eta": [0.3, 0.7, 1.1]}}"#, vec![3, 3, 3]),
            (r#"{"family": "bell-psi-"}"#, vec![2, 2]),
        ] {
            let e = StateSpecFile::parse(text).unwrap().to_ensemble().unwrap();
            assert_eq!(e.system().dims(), dims.as_slice(), "{text}");
        }
        let unknown = StateSpecFile::parse(r#"{"family": "nope"}"#).unwrap();
        assert!(unknown.to_ensemble().is_err());
        let stray = StateSpecFile::parse(r#"{"family": "qutrit-eta", "params": {"eta": [0, 0, 0], "x": 1}}"#).unwrap();
        assert!(stray.to_ensemble().is_err());
    }

    #[test]
    fn exact_round_trip() {
        let text = r#"{"dims": [2], "exact": true, "ensemble": [
            {"weight": 1, "amplitudes": [[[1,3],[0,1]], [[0,1],["123456789012345678901234567890","7"]]]}]}"#;
        let spec = StateSpecFile::parse(text).unwrap();
        let e = spec.to_ensemble().unwrap();
        let again = StateSpecFile::parse(&StateSpecFile::from_ensemble(&e).to_json()).unwrap();
        assert_eq!(again.to_ensemble().unwrap().exact_amplitudes(), e.exact_amplitudes());
    }
}
