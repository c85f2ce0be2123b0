//! Home/away split comparison as a tampering indicator.
//!
//! The observed home-vs-away qq Pearson alone is hard to interpret, so it is
//! calibrated against a permutation null: the pooled values are repeatedly
//! relabeled into same-size halves and the observed r is ranked among the
//! permuted ones.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fip::FipSeries;
use crate::qq::{pearson, qq_pairs};
use crate::sample::{ks_statistic, OrderedSample};
use crate::{Error, Result};

/// Outcome of a home/away split check for one team-season.
#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub team: String,
    pub n_home: usize,
    pub n_away: usize,
    pub pearson_r: f64,
    pub ks: f64,
    pub permutations: usize,
    /// Mean rank of the observed r among the permuted splits, in [0, 100].
    /// Low values mean the observed split is less linear than random
    /// relabelings. 100.0 when no permutations were requested.
    pub null_percentile: f64,
    pub flagged: bool,
    pub seed: u64,
}

/// Partition a team's opponent-FIP series by the home flag.
pub fn split_home_away(series: &FipSeries) -> Result<(OrderedSample, OrderedSample)> {
    let home: Vec<f64> = series.games.iter().filter(|g| g.is_home).map(|g| g.value).collect();
    let away: Vec<f64> = series.games.iter().filter(|g| !g.is_home).map(|g| g.value).collect();
    if home.is_empty() {
        return Err(Error::OneSidedSeason("home"));
    }
    if away.is_empty() {
        return Err(Error::OneSidedSeason("away"));
    }
    Ok((OrderedSample::new(home)?, OrderedSample::new(away)?))
}

fn split_pearson(pool: &[f64], n_home: usize) -> Result<f64> {
    let home = OrderedSample::new(pool[..n_home].to_vec())?;
    let away = OrderedSample::new(pool[n_home..].to_vec())?;
    pearson(&qq_pairs(&home, &away)?)
}

/// Compare the two sides and calibrate the observed Pearson against random
/// relabelings of the pooled values. `flagged` fires when the observed r is
/// below `threshold` or below the null's 5th percentile.
pub fn tamper_check(
    team: &str,
    home: &OrderedSample,
    away: &OrderedSample,
    permutations: usize,
    threshold: f64,
    seed: u64,
) -> Result<SplitReport> {
    let observed = pearson(&qq_pairs(home, away)?)?;
    let ks = ks_statistic(home, away);

    let null_percentile = if permutations > 0 {
        let mut pool: Vec<f64> =
            home.values().iter().chain(away.values()).copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut below, mut equal) = (0usize, 0usize);
        for _ in 0..permutations {
            pool.shuffle(&mut rng);
            let r = split_pearson(&pool, home.len())?;
            if r < observed {
                below += 1;
            } else if r == observed {
                equal += 1;
            }
        }
        100.0 * (below as f64 + 0.5 * equal as f64) / permutations as f64
    } else {
        100.0
    };

    Ok(SplitReport {
        team: team.to_string(),
        n_home: home.len(),
        n_away: away.len(),
        pearson_r: observed,
        ks,
        permutations,
        null_percentile,
        flagged: observed < threshold || (permutations > 0 && null_percentile < 5.0),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fip::GameFip;
    use chrono::NaiveDate;

    fn s(v: &[f64]) -> OrderedSample {
        OrderedSample::new(v.to_vec()).unwrap()
    }

    fn series(flags_values: &[(bool, f64)]) -> FipSeries {
        let games: Vec<GameFip> = flags_values
            .iter()
            .enumerate()
            .map(|(i, &(is_home, value))| GameFip {
                date: NaiveDate::from_ymd_opt(2019, 4, 1).unwrap() + chrono::Days::new(i as u64),
                opponent_id: "NYY".into(),
                is_home,
                value,
            })
            .collect();
        FipSeries {
            team_id: "HOU".into(),
            season: 2019,
            sample: OrderedSample::new(games.iter().map(|g| g.value).collect()).unwrap(),
            games,
            skipped: vec![],
        }
    }

    #[test]
    fn split_partitions_by_flag() {
        let fs = series(&[(true, 1.0), (false, 2.0), (true, 3.0), (false, 4.0)]);
        let (home, away) = split_home_away(&fs).unwrap();
        assert_eq!(home.values(), &[1.0, 3.0]);
        assert_eq!(away.values(), &[2.0, 4.0]);
    }

    #[test]
    fn split_rejects_one_sided() {
        let fs = series(&[(true, 1.0), (true, 2.0)]);
        assert!(matches!(split_home_away(&fs), Err(Error::OneSidedSeason("away"))));
    }

    #[test]
    fn identical_sides_not_flagged() {
        let home = s(&[1.0, 2.0, 3.0, 4.0]);
        let report = tamper_check("HOU", &home, &home, 0, 0.98, 7).unwrap();
        assert!((report.pearson_r - 1.0).abs() < 1e-12);
        assert!(!report.flagged);
    }

    #[test]
    fn affine_sides_not_flagged() {
        let home = s(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let away =
            OrderedSample::new(home.values().iter().map(|v| 1.1 * v + 0.2).collect()).unwrap();
        let report = tamper_check("HOU", &home, &away, 0, 0.98, 7).unwrap();
        assert!((report.pearson_r - 1.0).abs() < 1e-12);
        assert!(!report.flagged);
    }

    #[test]
    fn symmetry_under_side_swap() {
        let a = s(&[1.0, 2.5, 3.0, 4.5, 8.0]);
        let b = s(&[0.5, 2.0, 2.2, 5.0, 6.0, 7.5]);
        let r1 = tamper_check("HOU", &a, &b, 0, 0.98, 7).unwrap();
        let r2 = tamper_check("HOU", &b, &a, 0, 0.98, 7).unwrap();
        assert!((r1.pearson_r.abs() - r2.pearson_r.abs()).abs() < 1e-12);
        assert_eq!(r1.ks, r2.ks);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = s(&[1.0, 2.5, 3.0, 4.5, 8.0, 2.2]);
        let b = s(&[0.5, 2.0, 2.2, 5.0, 6.0, 7.5]);
        let r1 = tamper_check("HOU", &a, &b, 50, 0.98, 42).unwrap();
        let r2 = tamper_check("HOU", &a, &b, 50, 0.98, 42).unwrap();
        assert_eq!(r1.null_percentile, r2.null_percentile);
    }
}
