mod common;

use num_traits::Zero;

use transtat::braid::{braid_summary, pbw_cubic_check};
use transtat::classify::{classify, Kind};
use transtat::exactla::{Guard, Rational, RationalMatrix};
use transtat::fock::{build_fock, fock_report, ExchangeData};
use transtat::hilbert::{full_series, single_mode_series};
use transtat::koszul::{dual_relations, dual_series, koszul_product};
use transtat::statmodel::{assemble_pgen, preset, StatModel};

use common::{binomial, ideal_sum_dims};

fn guard() -> Guard {
    Guard::default()
}

fn full(model: &StatModel, n: usize) -> Vec<usize> {
    let rs = assemble_pgen(model).unwrap();
    full_series(model, &rs, n, &guard()).unwrap().coeffs
}

#[test]
fn boson_series_counts_monomials() {
    for d in 1..=3u64 {
        let model = preset("boson", d as usize).unwrap();
        let expected: Vec<usize> = (0..=5).map(|n| binomial(n + d - 1, n)).collect();
        assert_eq!(full(&model, 5), expected, "d = {d}");
    }
}

#[test]
fn fermion_series_counts_subsets() {
    for d in 1..=3u64 {
        let model = preset("fermion", d as usize).unwrap();
        let expected: Vec<usize> = (0..=5).map(|n| binomial(d, n)).collect();
        assert_eq!(full(&model, 5), expected, "d = {d}");
    }
}

#[test]
fn series_agree_with_spanning_the_ideal() {
    for (name, d) in [("boson", 2), ("fermion", 2), ("example_sec5", 1), ("example_sec5", 2)] {
        let model = preset(name, d).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        let n = if model.gen_dim() > 3 { 3 } else { 4 };
        assert_eq!(full(&model, n), ideal_sum_dims(rs.r_gen(), model.gen_dim(), n), "{name} d={d}");
    }
}

#[test]
fn two_mode_example_single_series_terminates() {
    let model = preset("example_sec5", 2).unwrap();
    let g = single_mode_series(&model, 5, &guard()).unwrap();
    assert_eq!(g.coeffs, vec![1, 3, 1, 0, 0, 0]);
    assert_eq!(g.terminated_at, Some(3));
}

#[test]
fn boson_and_fermion_are_koszul_dual() {
    for d in 1..=3 {
        let boson = preset("boson", d).unwrap();
        let rs = assemble_pgen(&boson).unwrap();
        let dd = dual_relations(rs.r_gen(), &boson.pair_gram()).unwrap();
        let dual = dual_series(&dd, boson.gen_dim(), 4, &guard()).unwrap();
        let fermion = preset("fermion", d).unwrap();
        assert_eq!(dual.coeffs, full(&fermion, 4), "d = {d}");

        let g = full_series(&boson, &rs, 4, &guard()).unwrap();
        let prod = koszul_product(&g, &dual, 4);
        assert_eq!(prod, vec![1, 0, 0, 0, 0]);
    }
}

#[test]
fn one_mode_classifications() {
    let g = single_mode_series(&preset("boson", 1).unwrap(), 8, &guard()).unwrap();
    let c = classify(&g, 4).unwrap();
    assert_eq!(c.kind, Kind::Transbosonic);
    assert_eq!(c.signature_text, "[1,-1]_+");
    assert!(c.replay());

    let g = single_mode_series(&preset("fermion", 1).unwrap(), 8, &guard()).unwrap();
    let c = classify(&g, 4).unwrap();
    assert_eq!(c.kind, Kind::Transfermionic);
    assert_eq!(c.signature_text, "[1,1]_-");
    assert!(c.replay());
}

#[test]
fn fock_levels_match_series_and_two_point_is_the_form() {
    for (name, d) in [("boson", 2), ("fermion", 3), ("example_sec5", 1)] {
        let model = preset(name, d).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        let fock = build_fock(&model, &rs, 3, &guard()).unwrap();
        assert_eq!(fock.dims(), full(&model, 3), "{name} d={d}");

        let k = model.k_dim();
        let expected = RationalMatrix::from_fn(d * k, d * k, |a, b| {
            if a / k == b / k {
                model.g()[(a % k, b % k)].clone()
            } else {
                Rational::zero()
            }
        });
        assert_eq!(fock.two_point_matrix().unwrap(), expected, "{name} d={d}");
    }
}

#[test]
fn canonical_exchange_data_satisfies_every_identity() {
    for d in 1..=3 {
        for (name, ex) in [("boson", ExchangeData::bosonic(1)), ("fermion", ExchangeData::fermionic(1))] {
            let model = preset(name, d).unwrap();
            let rs = assemble_pgen(&model).unwrap();
            let fock = build_fock(&model, &rs, 3, &guard()).unwrap();
            let report = fock_report(&fock, Some(&ex)).unwrap();
            for c in &report.checks {
                assert!(c.passed, "{name} d={d}: {} — {}", c.name, c.details);
            }
            assert!(report.skipped.is_empty(), "{name} d={d}: {:?}", report.skipped);
        }
    }
}

#[test]
fn one_mode_braids_hold() {
    for name in ["boson", "fermion"] {
        let model = preset(name, 1).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        let summary = braid_summary(&model, &rs, &guard()).unwrap();
        for c in summary.checks() {
            assert!(c.passed, "{name}: {} — {}", c.name, c.details);
        }
    }
}

#[test]
fn two_mode_example_fails_the_cubic_criterion_with_a_word() {
    let model = preset("example_sec5", 2).unwrap();
    let rs = assemble_pgen(&model).unwrap();
    let pbw = pbw_cubic_check(&model, &rs, &guard()).unwrap();
    assert!(!pbw.passed());
    assert!(pbw.checks().iter().any(|c| !c.passed && c.witness.is_some()));
}
