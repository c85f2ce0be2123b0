//! Schedule adjustment: renormalize per-game pitcher FIP against the
//! league-average sample with the equipercentile and slope-intercept
//! methods, then aggregate to season aFIP.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::fip::{fip_value, FipConstant, PitcherGameLine};
use crate::qq::{linear_fit, qq_pairs, LinearFit};
use crate::sample::OrderedSample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Equipercentile,
    SlopeIntercept,
}

/// One start with both per-game adjustments computed.
#[derive(Debug, Clone, PartialEq)]
pub struct AfipGame {
    pub pitcher_id: String,
    pub date: NaiveDate,
    pub opponent_id: String,
    pub raw_fip: f64,
    pub afip_eqp: f64,
    pub afip_si: f64,
    pub outs: u32,
}

/// Per-pitcher season row, Table-shaped: season FIP from pooled counting
/// stats plus both season aFIP values and their differences.
#[derive(Debug, Clone, PartialEq)]
pub struct AfipRecord {
    pub pitcher_id: String,
    pub season: u16,
    pub fip: f64,
    pub afip_si: f64,
    pub afip_eqp: f64,
    pub si_diff: f64,
    pub eqp_diff: f64,
    pub eqp_minus_si: f64,
}

/// Aggregate agreement statistics between the two methods.
#[derive(Debug, Clone, PartialEq)]
pub struct AfipSummary {
    pub pitchers: usize,
    pub mean_abs_eqp_minus_si: f64,
    pub max_abs_eqp_minus_si: f64,
    pub count_above_015: usize,
    pub count_above_020: usize,
}

#[derive(Debug, Clone)]
pub struct AfipTable {
    pub records: Vec<AfipRecord>,
    pub summary: AfipSummary,
    /// Pitcher lines skipped because no outs were recorded.
    pub skipped_lines: usize,
}

/// Equipercentile adjustment: map `raw_fip` to the league value sharing its
/// percentile in the opponent's sample. Monotone nondecreasing in `raw_fip`.
pub fn afip_game_eqp(raw_fip: f64, team: &OrderedSample, league: &OrderedSample) -> Result<f64> {
    league.value_at_percentile(team.percentile_of(raw_fip))
}

/// Slope-intercept adjustment: push `raw_fip` through the least-squares line
/// of the team-vs-league qq-plot (team on x).
pub fn afip_game_si(raw_fip: f64, fit: &LinearFit) -> f64 {
    fit.apply(raw_fip)
}

/// Season aggregation: outs-weighted mean of the chosen per-game values.
pub fn season_afip(games: &[AfipGame], method: Method) -> Result<f64> {
    if games.is_empty() {
        return Err(Error::EmptySample);
    }
    let total_outs: u32 = games.iter().map(|g| g.outs).sum();
    if total_outs == 0 {
        return Err(Error::UndefinedFip);
    }
    let weighted: f64 = games
        .iter()
        .map(|g| {
            let v = match method {
                Method::Equipercentile => g.afip_eqp,
                Method::SlopeIntercept => g.afip_si,
            };
            v * g.outs as f64
        })
        .sum();
    Ok(weighted / total_outs as f64)
}

/// Build the full per-pitcher report.
///
/// Season FIP comes from pooled counting stats; per-game aFIP values are
/// aggregated by outs-weighted mean. Records are sorted by season FIP
/// ascending. Lines with zero outs are skipped (FIP undefined for them).
pub fn afip_table(
    pitcher_lines: &[(String, u16, PitcherGameLine)],
    team_samples: &BTreeMap<String, OrderedSample>,
    league: &OrderedSample,
    c: FipConstant,
) -> Result<AfipTable> {
    // team -> slope-intercept fit against the league, computed once
    let mut fits: BTreeMap<&str, LinearFit> = BTreeMap::new();
    for (team, sample) in team_samples {
        fits.insert(team.as_str(), linear_fit(&qq_pairs(sample, league)?)?);
    }

    // preserve first-seen pitcher order for grouping; output re-sorts by FIP
    let mut by_pitcher: BTreeMap<(String, u16), Vec<&PitcherGameLine>> = BTreeMap::new();
    for (_, season, line) in pitcher_lines {
        by_pitcher.entry((line.pitcher_id.clone(), *season)).or_default().push(line);
    }

    let mut skipped_lines = 0usize;
    let mut records = Vec::new();
    for ((pitcher_id, season), lines) in by_pitcher {
        let mut games = Vec::new();
        let (mut hr, mut bb_hbp, mut so, mut outs) = (0u32, 0u32, 0u32, 0u32);
        for line in lines {
            if line.outs == 0 {
                skipped_lines += 1;
                continue;
            }
            let team = team_samples.get(&line.opponent_id).ok_or_else(|| {
                Error::UnknownOpponent {
                    pitcher: pitcher_id.clone(),
                    date: line.date,
                    opponent: line.opponent_id.clone(),
                }
            })?;
            let fit = &fits[line.opponent_id.as_str()];
            let raw_fip = fip_value(line.hr, line.bb_hbp, line.so, line.outs, c)?;
            games.push(AfipGame {
                pitcher_id: pitcher_id.clone(),
                date: line.date,
                opponent_id: line.opponent_id.clone(),
                raw_fip,
                afip_eqp: afip_game_eqp(raw_fip, team, league)?,
                afip_si: afip_game_si(raw_fip, fit),
                outs: line.outs,
            });
            hr += line.hr;
            bb_hbp += line.bb_hbp;
            so += line.so;
            outs += line.outs;
        }
        if games.is_empty() {
            continue;
        }
        let fip = fip_value(hr, bb_hbp, so, outs, c)?;
        let afip_si = season_afip(&games, Method::SlopeIntercept)?;
        let afip_eqp = season_afip(&games, Method::Equipercentile)?;
        records.push(AfipRecord {
            pitcher_id,
            season,
            fip,
            afip_si,
            afip_eqp,
            si_diff: afip_si - fip,
            eqp_diff: afip_eqp - fip,
            eqp_minus_si: afip_eqp - afip_si,
        });
    }
    records.sort_by(|a, b| a.fip.partial_cmp(&b.fip).unwrap());

    let diffs: Vec<f64> = records.iter().map(|r| r.eqp_minus_si.abs()).collect();
    let summary = AfipSummary {
        pitchers: records.len(),
        mean_abs_eqp_minus_si: if diffs.is_empty() {
            0.0
        } else {
            diffs.iter().sum::<f64>() / diffs.len() as f64
        },
        max_abs_eqp_minus_si: diffs.iter().cloned().fold(0.0, f64::max),
        count_above_015: diffs.iter().filter(|d| **d > 0.15).count(),
        count_above_020: diffs.iter().filter(|d| **d > 0.20).count(),
    };
    Ok(AfipTable { records, summary, skipped_lines })
}
