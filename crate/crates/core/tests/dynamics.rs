mod common;

use sbc_core::dynamics::{best_response_fne1, construct_sne, ffd, ffd_lpt, improve_to_fne3, improve_to_msne, DynamicsError};
use sbc_core::equilibria::{verify_fne1, verify_fne3, verify_msne, verify_ne, verify_sne, EquilibriumKind};
use sbc_core::model::{is_rational, is_reasonable, social_welfare, Partition};
use sbc_core::oracle::{enumerate_equilibria, DEFAULT_CAP};
use sbc_core::potential::{lex_less, potential};

#[test]
fn ffd_is_rational() {
    let mut rng = common::rng(1);
    for _ in 0..500 {
        let inst = common::instance(&mut rng, 60, 100);
        assert!(is_rational(&ffd(&inst), &inst), "{inst:?}");
    }
}

#[test]
fn ffd_lpt_reaches_ne_without_losing_welfare() {
    let mut rng = common::rng(2);
    for _ in 0..1000 {
        let inst = common::instance(&mut rng, 50, 100);
        let start = common::reasonable_start(&inst, &mut rng);
        let (out, _) = ffd_lpt(&start, &inst).unwrap();
        assert!(verify_ne(&out, &inst).unwrap().holds, "{inst:?} {start:?}");
        assert!(social_welfare(&out, &inst) >= social_welfare(&start, &inst));
    }
}

#[test]
fn best_response_bounds() {
    let mut rng = common::rng(3);
    let mut moved = 0;
    for _ in 0..1000 {
        let inst = common::instance(&mut rng, 40, 60);
        let start = common::rational_start(&inst, &mut rng);
        let m = start.num_bins();
        let (out, trace) = best_response_fne1(&start, &inst).unwrap();
        assert!(trace.len() <= inst.len() * (m - 1));
        assert!(trace.per_agent_counts.iter().all(|&c| c < m));
        assert!(verify_fne1(&out, &inst).holds);
        moved += trace.len();

        let mut before = potential(&start, &inst).unwrap();
        for step in &trace.steps {
            assert!(lex_less(&step.potential_after, &before));
            // rank-wise, largest first, covered sizes never grow
            let old = before.values().iter().rev();
            let new = step.potential_after.values().iter().rev();
            assert!(old.zip(new).all(|(x, y)| y <= x));
            before = step.potential_after.clone();
        }
    }
    assert!(moved > 0, "corpus exercises at least one move");
}

#[test]
fn improvement_dynamics_invariants() {
    let mut rng = common::rng(4);
    let (mut fne3_moves, mut msne_moves) = (0, 0);
    for _ in 0..500 {
        let inst = common::instance(&mut rng, 14, 30);
        let start = common::rational_start(&inst, &mut rng);
        let w0 = social_welfare(&start, &inst);
        let p0 = potential(&start, &inst).unwrap();

        let (out, trace) = improve_to_fne3(&start, &inst, None).unwrap();
        assert!(verify_fne3(&out, &inst).holds);
        assert!(social_welfare(&out, &inst) >= w0);
        let mut before = p0.clone();
        for step in &trace.steps {
            assert!(lex_less(&step.potential_after, &before), "{inst:?} {start:?}");
            before = step.potential_after.clone();
        }
        fne3_moves += trace.len();

        let (out, trace) = improve_to_msne(&start, &inst, None).unwrap();
        assert!(verify_msne(&out, &inst).holds);
        assert!(is_rational(&out, &inst));
        assert!(social_welfare(&out, &inst) >= w0);
        let mut before = p0;
        for step in &trace.steps {
            assert!(lex_less(&step.potential_after, &before));
            before = step.potential_after.clone();
        }
        msne_moves += trace.len();
    }
    assert!(fne3_moves > 0 && msne_moves > 0);
}

#[test]
fn iteration_budget() {
    let inst = sbc_core::Instance::new(vec![5, 2, 2, 2], 6).unwrap();
    let start = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
    match improve_to_fne3(&start, &inst, Some(0)) {
        Err(DynamicsError::BudgetExhausted { iterations: 0, best }) => assert_eq!(best, start),
        other => panic!("{other:?}"),
    }
    assert!(improve_to_fne3(&start, &inst, Some(5)).is_ok());
}

#[test]
fn construct_sne_is_strong() {
    let mut rng = common::rng(5);
    for _ in 0..300 {
        let inst = common::instance(&mut rng, 40, 200);
        let p = construct_sne(&inst);
        assert!(is_reasonable(&p, &inst));
        assert!(verify_sne(&p, &inst).unwrap().holds, "{inst:?}");
    }
}

#[test]
fn construct_sne_welfare_within_oracle_range() {
    let mut rng = common::rng(6);
    for _ in 0..150 {
        let inst = common::instance(&mut rng, 7, 12);
        let w = social_welfare(&construct_sne(&inst), &inst);
        let sne = enumerate_equilibria(&inst, EquilibriumKind::Sne, DEFAULT_CAP).unwrap();
        let ws: Vec<_> = sne.iter().map(|p| social_welfare(p, &inst)).collect();
        assert!(!ws.is_empty());
        assert!(*ws.iter().min().unwrap() <= w && w <= *ws.iter().max().unwrap());
    }
}
