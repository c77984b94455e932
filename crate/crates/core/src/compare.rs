//! Scheme comparison: weighted percentiles per activity and gains relative
//! to the grip-agnostic codebook.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, Scheme};
use crate::coverage::{coverage_profile, to_db, CoverageReport, REPORT_PERCENTILES};
use crate::error::{Error, Result};
use crate::field::ResponseField;
use crate::grid::DirectionGrid;
use crate::grip::{ActivityProfile, GripId};

/// Codebooks available to the comparison.
#[derive(Debug, Clone, Default)]
pub struct SchemeCodebooks {
    pub agnostic: Option<Codebook>,
    /// Keyed by activity name.
    pub semi: BTreeMap<String, Codebook>,
    pub aware: BTreeMap<GripId, Codebook>,
}

impl SchemeCodebooks {
    /// Codebook a scheme uses while the user performs `activity` with `grip`.
    pub fn codebook_for(&self, scheme: Scheme, activity: &ActivityProfile, grip: GripId) -> Result<&Codebook> {
        let found = match scheme {
            Scheme::Agnostic => self.agnostic.as_ref(),
            Scheme::Semi => self.semi.get(&activity.name),
            Scheme::Aware => self.aware.get(&grip),
        };
        found.ok_or_else(|| {
            Error::Config(match scheme {
                Scheme::Agnostic => "no grip-agnostic codebook".to_string(),
                Scheme::Semi => format!("no semi-aware codebook for activity {:?}", activity.name),
                Scheme::Aware => format!("no grip-aware codebook for grip {grip}"),
            })
        })
    }
}

/// One row of the comparison: an activity evaluated under one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub activity: String,
    pub short: String,
    pub scheme: Scheme,
    /// Probability-weighted mean of per-grip percentiles, in dB.
    pub percentiles: BTreeMap<u32, f64>,
    pub percentiles_linear: BTreeMap<u32, f64>,
    /// Percent gain over the agnostic scheme (linear ratio minus one).
    pub relative_gain: BTreeMap<u32, f64>,
    /// The same gain as a dB difference.
    pub delta_db: BTreeMap<u32, f64>,
    /// Probability-weighted mean spherical coverage, in dB.
    pub mean_coverage_db: f64,
}

/// Weighted statistics of one scheme over an activity's grips.
#[derive(Debug, Clone)]
pub struct ActivityCoverage {
    pub reports: Vec<(GripId, f64, CoverageReport)>,
    pub percentiles_linear: BTreeMap<u32, f64>,
    pub mean_linear: f64,
}

/// Coverage of each of the activity's grips under the scheme's codebook,
/// on the grid's evaluation region.
pub fn activity_coverage(
    activity: &ActivityProfile,
    scheme: Scheme,
    codebooks: &SchemeCodebooks,
    grip_fields: &BTreeMap<GripId, ResponseField>,
    grid: &DirectionGrid,
) -> Result<ActivityCoverage> {
    let mut reports = Vec::with_capacity(activity.grips.len());
    for (idx, &g) in activity.grips.iter().enumerate() {
        let book = codebooks.codebook_for(scheme, activity, g)?;
        let field = grip_fields
            .get(&g)
            .ok_or_else(|| Error::Config(format!("no response field for grip {g}")))?;
        let report = coverage_profile(field, &book.codewords, grid, true)?;
        reports.push((g, activity.probability_f64(idx), report));
    }
    let percentiles_linear = REPORT_PERCENTILES
        .iter()
        .map(|&p| {
            let v = reports
                .iter()
                .map(|(_, w, r)| w * r.percentile_linear(p as f64))
                .sum();
            (p, v)
        })
        .collect();
    let mean_linear = reports.iter().map(|(_, w, r)| w * r.mean_linear).sum();
    Ok(ActivityCoverage {
        reports,
        percentiles_linear,
        mean_linear,
    })
}

/// Weighted percentiles of `scheme` for `activity`, with gains relative to
/// the agnostic codebook on the same grips.
pub fn evaluate_activity(
    activity: &ActivityProfile,
    scheme: Scheme,
    codebooks: &SchemeCodebooks,
    grip_fields: &BTreeMap<GripId, ResponseField>,
    grid: &DirectionGrid,
) -> Result<SchemeResult> {
    let own = activity_coverage(activity, scheme, codebooks, grip_fields, grid)?;
    let base = if scheme == Scheme::Agnostic {
        own.clone()
    } else {
        activity_coverage(activity, Scheme::Agnostic, codebooks, grip_fields, grid)?
    };
    let mut result = SchemeResult {
        activity: activity.name.clone(),
        short: activity.short.clone(),
        scheme,
        percentiles: BTreeMap::new(),
        percentiles_linear: own.percentiles_linear.clone(),
        relative_gain: BTreeMap::new(),
        delta_db: BTreeMap::new(),
        mean_coverage_db: to_db(own.mean_linear),
    };
    for (&p, &v) in &own.percentiles_linear {
        let b = base.percentiles_linear[&p];
        result.percentiles.insert(p, to_db(v));
        result.relative_gain.insert(p, (v / b - 1.0) * 100.0);
        result.delta_db.insert(p, to_db(v) - to_db(b));
    }
    Ok(result)
}

/// Probability-weighted mixture CDF of the activity's per-grip coverage, as
/// `(gain_db, cdf)` steps in ascending gain order.
pub fn activity_cdf(coverage: &ActivityCoverage) -> Vec<(f64, f64)> {
    let mut samples: Vec<(f64, f64)> = coverage
        .reports
        .iter()
        .flat_map(|(_, w, r)| {
            let n = r.sorted_gains().len() as f64;
            r.sorted_gains().iter().map(move |&g| (to_db(g), w / n))
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
    for (g, w) in samples {
        acc += w;
        match out.last_mut() {
            Some(last) if last.0 == g => last.1 = acc,
            _ => out.push((g, acc)),
        }
    }
    if let Some(last) = out.last_mut() {
        last.1 = last.1.min(1.0);
    }
    out
}

pub fn cdf_csv(cdf: &[(f64, f64)]) -> String {
    let mut out = String::from("gain_db,cdf\n");
    for (g, c) in cdf {
        let _ = writeln!(out, "{g:.6},{c:.6}");
    }
    out
}

/// Table layout: one row per activity, semi/aware gains in percent for the
/// 20th, 50th and 80th percentiles.
pub fn comparison_csv(results: &[SchemeResult]) -> String {
    let mut out = String::from("activity");
    for p in REPORT_PERCENTILES {
        let _ = write!(out, ",semi_p{p}_pct,aware_p{p}_pct");
    }
    out.push('\n');
    let mut activities: Vec<&str> = Vec::new();
    for r in results {
        if !activities.contains(&r.activity.as_str()) {
            activities.push(&r.activity);
        }
    }
    for name in activities {
        let find = |s: Scheme| results.iter().find(|r| r.activity == name && r.scheme == s);
        let short = results.iter().find(|r| r.activity == name).map(|r| r.short.as_str()).unwrap_or(name);
        out.push_str(short);
        for p in REPORT_PERCENTILES {
            for s in [Scheme::Semi, Scheme::Aware] {
                match find(s) {
                    Some(r) => {
                        let _ = write!(out, ",{:.2}", r.relative_gain[&p]);
                    }
                    None => out.push(','),
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Human-readable table of relative gains.
pub fn render_table(results: &[SchemeResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "activity", "semi p20", "aware p20", "semi p50", "aware p50", "semi p80", "aware p80"
    );
    let csv = comparison_csv(results);
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let _ = write!(out, "{:<12}", cells[0]);
        for c in &cells[1..] {
            let _ = write!(out, " {:>8}%", c);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{Codeword, Provenance};
    use crate::grid::make_direction_grid;
    use crate::grip::builtin_activities;
    use num_complex::Complex64;

    fn single_element_book(scheme: Scheme) -> Codebook {
        Codebook {
            codewords: vec![Codeword::new(1, 4, 1, vec![0], vec![0]).unwrap()],
            candidate_indices: vec![0],
            provenance: Provenance { scheme, target: None },
            n_bits: 4,
            module_of: vec![1],
            objective: vec![],
        }
    }

    fn field_with_gains(grid: &DirectionGrid, gains: &[f64]) -> ResponseField {
        let resp = gains.iter().map(|g| Complex64::new(g.sqrt(), 0.0)).collect();
        ResponseField::new(grid.spec(), vec![1], resp, "hand").unwrap()
    }

    #[test]
    fn voice_call_weighted_percentile() {
        let grid = make_direction_grid(3, 180.0).unwrap();
        let call = builtin_activities().into_iter().find(|a| a.name == "Voice Call").unwrap();
        let profiles = [(3, [1.0, 4.0, 2.0]), (4, [8.0, 0.5, 3.0]), (5, [6.0, 7.0, 5.0])];
        let grip_fields: BTreeMap<_, _> = profiles
            .iter()
            .map(|(g, v)| (*g, field_with_gains(&grid, v)))
            .collect();
        let books = SchemeCodebooks {
            agnostic: Some(single_element_book(Scheme::Agnostic)),
            ..Default::default()
        };
        let r = evaluate_activity(&call, Scheme::Agnostic, &books, &grip_fields, &grid).unwrap();
        // nearest-rank median of three values is the 2nd smallest
        let expected = 0.25 * 2.0 + 0.5 * 3.0 + 0.25 * 6.0;
        assert!((r.percentiles_linear[&50] - expected).abs() < 1e-12);
        // 20th: rank ceil(0.6) = 1, the minimum
        let expected20 = 0.25 * 1.0 + 0.5 * 0.5 + 0.25 * 5.0;
        assert!((r.percentiles_linear[&20] - expected20).abs() < 1e-12);
        assert!(r.relative_gain.values().all(|&g| g == 0.0));
        let mean = 0.25 * 7.0 / 3.0 + 0.5 * 11.5 / 3.0 + 0.25 * 6.0;
        assert!((r.mean_coverage_db - to_db(mean)).abs() < 1e-12);
    }

    #[test]
    fn missing_codebook_is_a_config_error() {
        let grid = make_direction_grid(3, 180.0).unwrap();
        let pocket = builtin_activities().into_iter().find(|a| a.name == "Pocket").unwrap();
        let fields = BTreeMap::from([(14, field_with_gains(&grid, &[1.0, 2.0, 3.0]))]);
        let books = SchemeCodebooks::default();
        assert!(matches!(
            evaluate_activity(&pocket, Scheme::Aware, &books, &fields, &grid),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cdf_reaches_one() {
        let grid = make_direction_grid(4, 180.0).unwrap();
        let act = ActivityProfile::new("a", "a", &[1, 2], &[(1, 4), (3, 4)]).unwrap();
        let fields = BTreeMap::from([
            (1, field_with_gains(&grid, &[1.0, 2.0, 3.0, 4.0])),
            (2, field_with_gains(&grid, &[2.0, 2.0, 5.0, 5.0])),
        ]);
        let books = SchemeCodebooks {
            agnostic: Some(single_element_book(Scheme::Agnostic)),
            ..Default::default()
        };
        let cov = activity_coverage(&act, Scheme::Agnostic, &books, &fields, &grid).unwrap();
        let cdf = activity_cdf(&cov);
        assert_eq!(cdf.len(), 5);
        assert!((cdf.last().unwrap().1 - 1.0).abs() < 1e-12);
        assert!(cdf.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        // P(gain <= 2) = 1/4 * 2/4 + 3/4 * 2/4
        assert!((cdf[1].1 - 0.5).abs() < 1e-12);
        assert!(cdf_csv(&cdf).starts_with("gain_db,cdf\n0.000000,0.062500\n"));
    }
}
