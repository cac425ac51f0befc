use fracture_core::compact_sets::{CrackSet, LatticeSpec};
use fracture_core::energy::EnergyParams;
use fracture_core::evolution::{
    energy_balance_report, run_discrete_evolution, structural_check, BoundaryProgram,
    CandidatePolicy, Evaluator, PolicyMode, Profile,
};
use fracture_core::geometry::Point;
use fracture_core::scenario::bundled;
use fracture_core::slit_mesh::{DomainSpec, MeshParams};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        Just(Profile::Split),
        Just(Profile::X2),
        Just(Profile::X1),
        (-1.0f64..1.0).prop_map(|c| Profile::Poly {
            terms: vec![[1.0, 0.0, 1.0], [c, 1.0, 1.0]]
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn traces_respect_the_structural_invariants(
        p in profile(),
        slope in 0.2f64..2.5,
        notch in 0u32..3,
        budget in 1usize..3,
        m in 1usize..3,
        steps in 2u32..6,
    ) {
        let domain = DomainSpec::strip();
        let lattice = LatticeSpec::covering(domain.rect, 0.25).unwrap();
        let k0 = if notch == 0 {
            CrackSet::empty(lattice)
        } else {
            CrackSet::from_runs(lattice, &[(Point::new(0.0, 0.0), Point::new(0.25 * notch as f64, 0.0))], 1e-9).unwrap()
        };
        let program = BoundaryProgram::ramp(p, slope, 1.0);
        let evaluator = Evaluator::new(domain, MeshParams::uniform(0.125), EnergyParams::default(), program.profiles());
        let policy = CandidatePolicy { mode: PolicyMode::TipGrowth, budget, max_components: m, pool: None, nucleation: true };
        let trace = run_discrete_evolution(&evaluator, &program, &k0, 1.0 / steps as f64, &policy).unwrap();

        let check = structural_check(&trace, &evaluator, &program).unwrap();
        prop_assert!(check.all(), "{check:?}");
        let balance = energy_balance_report(&trace, 1.0);
        prop_assert!(balance.a_priori_holds);
        prop_assert!(balance.bounds_hold);
        prop_assert!(balance.omega_hat >= 0.0);
        for w in trace.steps.windows(2) {
            prop_assert!(w[0].crack.is_subset(&w[1].crack));
            prop_assert!(w[1].components <= m);
            prop_assert!(w[1].crack.len() - w[0].crack.len() <= budget + m);
        }
    }

    #[test]
    fn configs_round_trip(spacing in 1u32..4, h in 1u32..5, d in proptest::collection::vec(0.01f64..1.0, 1..4)) {
        let mut c = bundled("tip_growth").unwrap();
        c.lattice_spacing = 0.125 * spacing as f64;
        c.mesh.h = 1.0 / (4 * h) as f64;
        let mut d = d;
        d.sort_by(|a, b| b.total_cmp(a));
        d.dedup();
        c.deltas = d;
        let text = c.to_toml().unwrap();
        let back = fracture_core::scenario::ScenarioConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }
}
