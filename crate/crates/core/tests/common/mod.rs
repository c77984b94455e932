#![allow(dead_code)]

use std::collections::HashSet;

use beamlab::codebook::{CandidateSet, Codeword};
use beamlab::coverage::coverage_profile;
use beamlab::field::{ModuleId, ResponseField};
use beamlab::grid::{make_direction_grid, DirectionGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random field over a full-sphere grid with the given element map.
pub fn random_field(rng: &mut ChaCha8Rng, n_points: usize, module_of: &[ModuleId]) -> (ResponseField, DirectionGrid) {
    let grid = make_direction_grid(n_points, 180.0).unwrap();
    let responses = (0..n_points * module_of.len()).map(|_| random_complex(rng)).collect();
    let field = ResponseField::new(grid.spec(), module_of.to_vec(), responses, "toy").unwrap();
    (field, grid)
}

/// `n` distinct random codewords on random modules.
pub fn random_candidates(rng: &mut ChaCha8Rng, module_of: &[ModuleId], n: usize, n_bits: u8) -> CandidateSet {
    let mut modules: Vec<ModuleId> = module_of.to_vec();
    modules.sort_unstable();
    modules.dedup();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let m = modules[rng.gen_range(0..modules.len())];
        let support: Vec<usize> = (0..module_of.len()).filter(|&k| module_of[k] == m).collect();
        let phases: Vec<u32> = support.iter().map(|_| rng.gen_range(0..(1u32 << n_bits))).collect();
        let w = Codeword::new(m, n_bits, module_of.len(), support, phases).unwrap();
        if seen.insert(w.spec()) {
            out.push(w);
        }
    }
    CandidateSet::from_codewords(out, module_of.to_vec()).unwrap()
}

/// Weighted mean coverage of an explicit codeword subset, evaluated through
/// the coverage report rather than the greedy bookkeeping.
pub fn weighted_mean(fields: &[(&ResponseField, f64)], grid: &DirectionGrid, book: &[Codeword]) -> f64 {
    fields
        .iter()
        .map(|(f, p)| p * coverage_profile(f, book, grid, true).unwrap().mean_linear)
        .sum()
}

/// Exhaustive best subset of size `k` (lexicographically first on ties).
pub fn brute_force_best(
    fields: &[(&ResponseField, f64)],
    grid: &DirectionGrid,
    candidates: &CandidateSet,
    k: usize,
) -> (Vec<usize>, f64) {
    fn rec(
        start: usize,
        k: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
        n: usize,
    ) {
        if current.len() == k {
            visit(current);
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, k, current, visit, n);
            current.pop();
        }
    }
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    let n = candidates.len();
    let mut visit = |subset: &[usize]| {
        let book: Vec<Codeword> = subset.iter().map(|&i| candidates.codewords[i].clone()).collect();
        let v = weighted_mean(fields, grid, &book);
        if v > best.1 {
            best = (subset.to_vec(), v);
        }
    };
    rec(0, k, &mut Vec::new(), &mut visit, n);
    best
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &t in &idx[i..=j] {
                r[t] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// `w^H (M^H M) w` built from the explicit outer-product matrix.
pub fn quadratic_form(m: &[Complex64], w: &[Complex64]) -> f64 {
    let n = m.len();
    let mut total = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let mhm = m[a].conj() * m[b];
            total += w[a].conj() * mhm * w[b];
        }
    }
    total.re
}

/// `|sum_k M_k w_k|^2` with plain scalar accumulation.
pub fn scalar_gain(m: &[Complex64], w: &[Complex64]) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for k in 0..m.len() {
        re += m[k].re * w[k].re - m[k].im * w[k].im;
        im += m[k].re * w[k].im + m[k].im * w[k].re;
    }
    re * re + im * im
}
