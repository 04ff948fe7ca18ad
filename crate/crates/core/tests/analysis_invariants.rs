use entloc_core::analysis::{separability_screen, ScreenVerdict};
use entloc_core::seed::rng;
use entloc_core::states::smolin_state;
use entloc_core::tensor::{
    apply_local_unitaries, haar_unitary, random_pure_state_with, random_unit_vector, tensor_product, Cut,
    MixedState, PartySystem, PureStateVec,
};
use rand::Rng;

fn product_mixture<R: Rng>(terms: usize, r: &mut R) -> MixedState {
    let q = PartySystem::qubits(1);
    let mut members = Vec::new();
    for _ in 0..terms {
        let factors: Vec<PureStateVec> =
            (0..3).map(|_| PureStateVec::new(q.clone(), random_unit_vector(2, r)).unwrap()).collect();
        members.push((r.random_range(0.1..1.0), tensor_product(&factors).unwrap()));
    }
    let total: f64 = members.iter().map(|m| m.0).sum();
    for m in &mut members {
        m.0 /= total;
    }
    MixedState::from_mixture(&members).unwrap()
}

fn all_ks(rho: &MixedState, cuts: &[Cut]) -> Vec<Vec<usize>> {
    cuts.iter().map(|c| (0..c.residual_dim(rho.system())).collect()).collect()
}

#[test]
fn product_mixtures_never_entangled() {
    let mut r = rng(2024);
    let cuts = Cut::all(&PartySystem::qubits(3));
    for trial in 0..20 {
        let rho = product_mixture(1 + trial % 3, &mut r);
        let ks = all_ks(&rho, &cuts);
        let report = separability_screen(&rho, &cuts, Some(&ks), trial as u64).unwrap();
        for e in &report.entries {
            assert_ne!(e.verdict, ScreenVerdict::Entangled, "trial {trial}, cut {}: {}", e.cut, e.justification);
        }
    }
}

#[test]
fn verdicts_are_lu_invariant() {
    let mut r = rng(77);
    for trial in 0..10u64 {
        let (rho, cuts) = if trial % 2 == 0 {
            let rho = smolin_state();
            let cuts = ["BCD|A", "AB|CD", "A:B|CD"].map(|c| Cut::parse(rho.system(), c).unwrap()).to_vec();
            (rho, cuts)
        } else {
            let s = PartySystem::qubits(3);
            let members: Vec<_> = (0..2).map(|_| (0.5, random_pure_state_with(&s, &mut r))).collect();
            (MixedState::from_mixture(&members).unwrap(), Cut::all(&s))
        };
        let units: Vec<_> = rho.system().dims().iter().map(|&d| haar_unitary(d, &mut r)).collect();
        let image = apply_local_unitaries(&rho, &units).unwrap();
        let before = separability_screen(&rho, &cuts, None, trial).unwrap().verdicts();
        let after = separability_screen(&image, &cuts, None, trial + 100).unwrap().verdicts();
        assert_eq!(before, after, "trial {trial}");
    }
}
