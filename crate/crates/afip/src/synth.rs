//! Synthetic seasons with a known shared shape and per-team affine
//! transforms. NONE mode is the exact oracle (team samples are affine images
//! of the base quantiles at shared plotting positions); IID_RESAMPLE adds
//! sampling noise by drawing independently from each transformed
//! distribution.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Gamma};
use std::collections::BTreeMap;

use crate::gamelog::{DatasetRow, MatchedGame};
use crate::qq::{linear_fit, qq_pairs};
use crate::sample::OrderedSample;
use crate::{Error, Result};

/// The shared base distribution, given by its quantile function.
#[derive(Debug, Clone)]
pub enum BaseShape {
    /// Quantiles interpolated from an explicit sorted value list.
    Empirical(OrderedSample),
    /// location + scale · Gamma(shape) — right-skewed with a long upper tail.
    RightSkewed { location: f64, scale: f64, shape: f64 },
}

impl BaseShape {
    /// A desk-scale shape resembling per-game opponent FIP data: right-skewed,
    /// mean near 5.8, standard deviation near 2.5, tail reaching past 15.
    pub fn fip_like() -> Self {
        // Gamma(4) has mean 4 and sd 2; scaled to sd 2.52 and recentered.
        BaseShape::RightSkewed { location: 0.74, scale: 1.26, shape: 4.0 }
    }

    /// Quantile at probability `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            BaseShape::Empirical(sample) => sample.value_at_percentile(p * 100.0),
            BaseShape::RightSkewed { location, scale, shape } => {
                let g = Gamma::new(*shape, 1.0).map_err(|_| Error::InvalidTransform(*shape))?;
                Ok(location + scale * g.inverse_cdf(p))
            }
        }
    }
}

/// A team's signature: its stretch and shift relative to the base shape.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamTransform {
    pub team_id: String,
    pub scale: f64,
    pub shift: f64,
}

impl TeamTransform {
    pub fn new(team_id: impl Into<String>, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidTransform(scale));
        }
        Ok(TeamTransform { team_id: team_id.into(), scale, shift })
    }

    pub fn apply(&self, v: f64) -> f64 {
        self.scale * v + self.shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Deterministic: α·base_quantiles + β at shared plotting positions.
    None,
    /// Each game drawn independently from the transformed base distribution.
    IidResample,
}

/// One generated season: per-team game values in game order.
#[derive(Debug, Clone)]
pub struct SynthSeason {
    pub games_per_team: usize,
    /// team -> values in game order (not sorted).
    pub values: BTreeMap<String, Vec<f64>>,
}

impl SynthSeason {
    /// Sorted per-team samples.
    pub fn samples(&self) -> Result<BTreeMap<String, OrderedSample>> {
        self.values
            .iter()
            .map(|(team, vals)| Ok((team.clone(), OrderedSample::new(vals.clone())?)))
            .collect()
    }
}

pub fn generate_season(
    base: &BaseShape,
    transforms: &[TeamTransform],
    games_per_team: usize,
    noise: NoiseMode,
    seed: u64,
) -> Result<SynthSeason> {
    if games_per_team == 0 || transforms.is_empty() {
        return Err(Error::EmptySample);
    }
    for t in transforms {
        if !(t.scale > 0.0) {
            return Err(Error::InvalidTransform(t.scale));
        }
    }

    let mut values = BTreeMap::new();
    match noise {
        NoiseMode::None => {
            let n = games_per_team as f64;
            let quantiles: Vec<f64> = (1..=games_per_team)
                .map(|i| base.quantile((i as f64 - 0.5) / n))
                .collect::<Result<_>>()?;
            for t in transforms {
                values.insert(t.team_id.clone(), quantiles.iter().map(|&q| t.apply(q)).collect());
            }
        }
        NoiseMode::IidResample => {
            for (stream, t) in transforms.iter().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream as u64 + 1);
                let mut vals = Vec::with_capacity(games_per_team);
                for _ in 0..games_per_team {
                    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                    vals.push(t.apply(base.quantile(u)?));
                }
                values.insert(t.team_id.clone(), vals);
            }
        }
    }
    Ok(SynthSeason { games_per_team, values })
}

/// Estimate the affine map league → team from the qq-plot fit (team on x,
/// league on y): slope maps team to league, so it is inverted.
pub fn recover_transform(
    team_id: &str,
    team: &OrderedSample,
    league: &OrderedSample,
) -> Result<TeamTransform> {
    let fit = linear_fit(&qq_pairs(team, league)?)?;
    if fit.slope == 0.0 {
        return Err(Error::DegenerateCorrelation);
    }
    Ok(TeamTransform {
        team_id: team_id.to_string(),
        scale: 1.0 / fit.slope,
        shift: -fit.intercept / fit.slope,
    })
}

/// Evenly spaced transforms across the given ranges, scale and shift paired
/// in the same order. Team ids are T01, T02, ...
pub fn spread_transforms(
    n_teams: usize,
    scale_range: (f64, f64),
    shift_range: (f64, f64),
) -> Result<Vec<TeamTransform>> {
    (0..n_teams)
        .map(|i| {
            let f = if n_teams == 1 { 0.5 } else { i as f64 / (n_teams - 1) as f64 };
            TeamTransform::new(
                format!("T{:02}", i + 1),
                scale_range.0 + f * (scale_range.1 - scale_range.0),
                shift_range.0 + f * (shift_range.1 - shift_range.0),
            )
        })
        .collect()
}

/// Render a generated season in the dataset CSV schema so the CLI pipeline
/// is format-identical for real and synthetic data. The counting-stat
/// columns are zeroed; downstream stages read the opponent_fip column.
pub fn season_to_dataset(season: &SynthSeason, year: u16) -> Result<Vec<DatasetRow>> {
    let teams: Vec<&String> = season.values.keys().collect();
    let n_teams = teams.len();
    let opening_day = NaiveDate::from_ymd_opt(year as i32, 3, 28).ok_or(Error::EmptySample)?;

    let mut rows = Vec::new();
    for (ti, team) in teams.iter().enumerate() {
        let vals = &season.values[*team];
        for (gi, &value) in vals.iter().enumerate() {
            // deterministic opponent rotation that never selects the team itself
            let opp = teams[(ti + 1 + gi % (n_teams - 1).max(1)) % n_teams];
            rows.push(DatasetRow {
                game: MatchedGame {
                    team_id: (*team).clone(),
                    opponent_id: (*opp).clone(),
                    season: year,
                    game_index: gi as u32 + 1,
                    date: opening_day + Days::new(gi as u64),
                    is_home: gi % 2 == 0,
                    hr: 0,
                    bb_hbp: 0,
                    so: 0,
                    opp_outs: 27,
                },
                opponent_fip: Some(value),
            });
        }
    }
    Ok(rows)
}
