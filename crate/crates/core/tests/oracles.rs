//! Operation examples checked against independent brute-force oracles.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use beamlab::codebook::{
    design_agnostic, design_grip_aware, design_semi_aware, greedy_design, matched_codeword, Codebook, Codeword,
    Provenance, WeightedField,
};
use beamlab::coverage::{coverage_profile, gain};
use beamlab::field::ResponseField;
use beamlab::grid::make_direction_grid;
use beamlab::grip::{builtin_activities, compose_grip, find_activity, GripId};
use common::*;
use num_complex::Complex64;
use num_rational::Ratio;

#[test]
fn fibonacci_cells_are_near_equal_area() {
    let grid = make_direction_grid(1000, 180.0).unwrap();
    let u = grid.units();
    // exhaustive nearest-neighbour scan; cap solid angle 2*pi*(1 - cos d)
    let caps: Vec<f64> = (0..u.len())
        .map(|i| {
            let best_dot = (0..u.len())
                .filter(|&j| j != i)
                .map(|j| u[i][0] * u[j][0] + u[i][1] * u[j][1] + u[i][2] * u[j][2])
                .fold(f64::NEG_INFINITY, f64::max);
            2.0 * PI * (1.0 - best_dot)
        })
        .collect();
    let n = caps.len() as f64;
    let mean = caps.iter().sum::<f64>() / n;
    let std = (caps.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(std / mean < 0.1, "relative spread {}", std / mean);
}

#[test]
fn gain_matches_scalar_loop() {
    let mut rng = rng(7);
    for _ in 0..200 {
        let m: Vec<Complex64> = (0..24).map(|_| random_complex(&mut rng)).collect();
        let w: Vec<Complex64> = (0..24).map(|_| random_complex(&mut rng) * 0.14).collect();
        let (g, s) = (gain(&m, &w).unwrap(), scalar_gain(&m, &w));
        assert!((g - s).abs() <= 1e-10 * s.abs(), "{g} vs {s}");
    }
}

#[test]
fn gain_examples() {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::i();
    assert_eq!(gain(&[one, zero], &[one, zero]).unwrap(), 1.0);
    let s = 0.5f64.sqrt();
    let g = gain(&[one, i], &[one * s, -i * s]).unwrap();
    assert!((g - 2.0).abs() < 1e-12);
}

#[test]
fn coverage_is_pointwise_max_by_enumeration() {
    let grid = make_direction_grid(3, 180.0).unwrap();
    let module_of = vec![1, 1];
    let rows = [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]];
    let responses = rows
        .iter()
        .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
        .collect();
    let field = ResponseField::new(grid.spec(), module_of.clone(), responses, "hand").unwrap();
    let books = [
        Codeword::new(1, 2, 2, vec![0, 1], vec![0, 0]).unwrap(),
        Codeword::new(1, 2, 2, vec![0, 1], vec![0, 2]).unwrap(),
    ];
    let report = coverage_profile(&field, &books, &grid, false).unwrap();
    for i in 0..3 {
        let mut want = 0.0f64;
        for w in &books {
            want = want.max(scalar_gain(field.row(i), &w.weights()));
        }
        assert_eq!(report.per_point_gain[i], want);
    }
    // hand values: in-phase pair gives 0.5 on the axes and 0.98 on (0.6, 0.8)
    assert!((report.per_point_gain[0] - 0.5).abs() < 1e-12);
    assert!((report.per_point_gain[2] - 0.98).abs() < 1e-12);
}

#[test]
fn two_element_quantization_matches_phase_grid_search() {
    let mut rng = rng(11);
    let floor = (PI / 16.0).cos().powi(2);
    for _ in 0..200 {
        let m = [random_complex(&mut rng), random_complex(&mut rng)];
        let w = matched_codeword(&m, 1, vec![0, 1], 2, 4).unwrap();
        let q = w.gain_on(&m);
        let mut best = 0.0f64;
        for a in 0..16u32 {
            for b in 0..16u32 {
                let c = Codeword::new(1, 4, 2, vec![0, 1], vec![a, b]).unwrap();
                best = best.max(scalar_gain(&m, &c.weights()));
            }
        }
        // unquantized constant-modulus matched filter
        let egc = (m[0].norm() + m[1].norm()).powi(2) / 2.0;
        assert!((q - best).abs() <= 1e-12 * best, "{q} vs exhaustive {best}");
        assert!(q >= egc * floor - 1e-12);
    }
}

fn toy(seed: u64, n_cand: usize) -> (ResponseField, beamlab::DirectionGrid, beamlab::codebook::CandidateSet) {
    let mut rng = rng(seed);
    let module_of = [1, 1, 1, 1, 2, 2, 3];
    let (field, grid) = random_field(&mut rng, 50, &module_of);
    let cands = random_candidates(&mut rng, &module_of, n_cand, 4);
    (field, grid, cands)
}

#[test]
fn single_codeword_greedy_is_exhaustive_best() {
    for seed in 0..10 {
        let (field, grid, cands) = toy(seed, 12);
        let book = design_agnostic(&cands, &field, &grid, 1).unwrap();
        let (best, value) = brute_force_best(&[(&field, 1.0)], &grid, &cands, 1);
        assert_eq!(book.candidate_indices, best);
        assert_eq!(book.objective[0], value);
    }
}

#[test]
fn greedy_pair_within_submodular_bound() {
    for seed in 20..30 {
        let (field, grid, cands) = toy(seed, 6);
        let book = design_agnostic(&cands, &field, &grid, 2).unwrap();
        let (_, opt) = brute_force_best(&[(&field, 1.0)], &grid, &cands, 2);
        assert!(book.objective[1] >= (1.0 - (-1.0f64).exp()) * opt);
        assert!(book.objective[1] <= opt + 1e-12);
        let direct = coverage_profile(&field, &book.codewords, &grid, true).unwrap().mean_linear;
        assert_eq!(direct, book.objective[1]);
    }
}

#[test]
fn duplicated_field_gives_identical_codebook() {
    let (field, grid, cands) = toy(40, 15);
    let once = greedy_design(&cands, &[WeightedField::sole(&field)], &grid, 4, Provenance::agnostic()).unwrap();
    let half = Ratio::new(1, 2);
    let twice = greedy_design(
        &cands,
        &[WeightedField::new(&field, half), WeightedField::new(&field, half)],
        &grid,
        4,
        Provenance::agnostic(),
    )
    .unwrap();
    assert!(once.same_codewords(&twice));
}

#[test]
fn semi_aware_against_exhaustive_weighted_optimum() {
    // toy Voice Call: three grips mixed 1/4, 1/2, 1/4
    let mut rng = rng(50);
    let module_of = [1, 1, 2, 2, 3, 3];
    let (free, grid) = random_field(&mut rng, 50, &module_of);
    let elementary: Vec<ResponseField> = (0..3)
        .map(|_| {
            let responses = free.responses().iter().map(|z| z * 0.3 * (random_complex(&mut rng) + 1.0)).collect();
            ResponseField::new(grid.spec(), module_of.to_vec(), responses, "elem").unwrap()
        })
        .collect();
    let grips: [(GripId, &[u8]); 3] = [(3, &[3]), (4, &[1, 3]), (5, &[2])];
    let mut fields = BTreeMap::new();
    for (id, blocked) in grips {
        let b = blocked.iter().copied().collect();
        fields.insert(id, compose_grip(&free, &elementary, &b).unwrap());
    }
    let activities = builtin_activities();
    let call = find_activity(&activities, "Voice Call").unwrap();
    let cands = random_candidates(&mut rng, &module_of, 8, 3);
    let semi = design_semi_aware(&cands, call, &fields, &grid, 2).unwrap();

    let weighted: Vec<(&ResponseField, f64)> = call
        .grips
        .iter()
        .enumerate()
        .map(|(i, g)| (&fields[g], call.probability_f64(i)))
        .collect();
    let (_, opt) = brute_force_best(&weighted, &grid, &cands, 2);
    let semi_value = weighted_mean(&weighted, &grid, &semi.codewords);
    assert!((semi_value - semi.objective[1]).abs() < 1e-12);
    assert!(semi_value >= (1.0 - (-1.0f64).exp()) * opt);
    for g in &call.grips {
        let aware = design_grip_aware(&cands, *g, &fields[g], &grid, 2).unwrap();
        let aware_value = weighted_mean(&weighted, &grid, &aware.codewords);
        assert!(aware_value <= opt + 1e-12);
        assert!(semi_value >= (1.0 - (-1.0f64).exp()) * aware_value);
    }
}

#[test]
fn unblocked_grip_matches_agnostic() {
    let (field, grid, cands) = toy(60, 15);
    let grip1 = compose_grip(&field, &[], &Default::default()).unwrap();
    let aware = design_grip_aware(&cands, 1, &grip1, &grid, 5).unwrap();
    let agnostic = design_agnostic(&cands, &field, &grid, 5).unwrap();
    assert!(aware.same_codewords(&agnostic));
    assert_eq!(aware.objective, agnostic.objective);
}

#[test]
fn codebook_json_round_trip() {
    let (field, grid, cands) = toy(70, 15);
    let book = design_grip_aware(&cands, 7, &field, &grid, 4).unwrap();
    let back = Codebook::from_json(&book.to_json(), "mem").unwrap();
    assert_eq!(back, book);
}
