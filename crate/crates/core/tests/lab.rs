use hk1lab::lab::{
    candidate_phases, corner_quotient_map, obstruction_experiment, section_diagram_defects, splitting_for_a,
};
use hk1lab::{build_system_a, build_system_b, Error, GridFunction, Space, SystemParams};

#[test]
fn obstruction_zero_phase_picks_stage_three() {
    let b = build_system_b(&SystemParams::default()).unwrap();
    let h = GridFunction::zeros(Space::Circle, 4096);
    let ledger = obstruction_experiment(&b, 1, &h, None).unwrap();
    assert_eq!(ledger.m, 3);
    assert_eq!(ledger.ratio, "16/1");
    assert!((ledger.quotient_norm - 8.0).abs() < 1e-9, "{}", ledger.quotient_norm);
    assert!(ledger.pass(), "{:#?}", ledger.trace);
    assert!(matches!(obstruction_experiment(&b, 1, &h, Some(2)), Err(Error::InadmissibleStage { m: 2 })));
}

#[test]
fn obstruction_budget() {
    let b = build_system_b(&SystemParams::default()).unwrap();
    let h = GridFunction::constant(Space::Circle, 256, 1000.0);
    assert!(matches!(obstruction_experiment(&b, 1, &h, None), Err(Error::StageBudgetExceeded { .. })));
}

#[test]
fn obstruction_candidates_pass() {
    let b = build_system_b(&SystemParams::default()).unwrap();
    for (name, h) in candidate_phases(4096, 1, &[0.5, 10.0]).into_iter().step_by(17) {
        for n in 1..=4 {
            let l = obstruction_experiment(&b, n, &h, None).unwrap();
            assert!(l.pass(), "{name} n={n}: {:#?}", l.trace);
        }
    }
}

#[test]
fn splitting_for_a_commutes_and_b_does_not() {
    let params = SystemParams::default();
    let a = build_system_a(&params).unwrap();
    let b = build_system_b(&params).unwrap();
    let s = splitting_for_a(&a, 1, 1).unwrap();
    assert!(s.pi_s_identity);
    for c in &s.checks {
        assert!(c.windings_equal && c.phase_defect <= 1e-9 && c.interval_determinants_constant, "{c:?}");
    }
    assert!(matches!(splitting_for_a(&b, 1, 1), Err(Error::NotUvd(_))));
    let naive = section_diagram_defects(&b, 1, 1, 4096).unwrap();
    assert!(naive.iter().any(|c| c.phase_defect > 1.0));
}

#[test]
fn row_extraction() {
    let b = build_system_b(&SystemParams::default()).unwrap();
    let rows = corner_quotient_map(&b, 1).unwrap();
    assert_eq!(rows.len(), 5);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r.part(0, 0).unwrap().pattern, b.step(k + 1).part(0, 0).unwrap().pattern);
    }
}
