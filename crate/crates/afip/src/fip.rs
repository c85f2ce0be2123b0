//! FIP arithmetic: (13·HR + 3·(BB+HBP) − 2·SO) / IP + constant.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use crate::gamelog::MatchedGame;
use crate::sample::OrderedSample;
use crate::{Error, Result};

/// Season-specific additive constant placing FIP on the ERA scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FipConstant {
    pub season: u16,
    pub value: f64,
}

impl FipConstant {
    /// Sanity window for real seasons. Values outside it are suspicious but
    /// not rejected; callers decide whether to warn.
    pub fn is_plausible(&self) -> bool {
        (2.5..=4.0).contains(&self.value)
    }
}

/// Load a `season,fip_constant` CSV.
pub fn load_fip_constants(path: &Path) -> Result<Vec<FipConstant>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::SchemaError(name.to_string()))
    };
    let (c_season, c_value) = (find("season")?, find("fip_constant")?);

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let season = record
            .get(c_season)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::ParseError { line, msg: "bad season".into() })?;
        let value = record
            .get(c_value)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::ParseError { line, msg: "bad fip_constant".into() })?;
        out.push(FipConstant { season, value });
    }
    Ok(out)
}

pub fn constant_for(constants: &[FipConstant], season: u16) -> Result<FipConstant> {
    constants.iter().find(|c| c.season == season).copied().ok_or_else(|| Error::ParseError {
        line: 0,
        msg: format!("no FIP constant for season {season}"),
    })
}

/// One pitcher's line in one game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitcherGameLine {
    pub pitcher_id: String,
    pub date: NaiveDate,
    pub opponent_id: String,
    pub hr: u32,
    pub bb_hbp: u32,
    pub so: u32,
    pub outs: u32,
}

/// FIP from counting stats. Negative results are valid (high-strikeout
/// shutout innings push the numerator below zero).
pub fn fip_value(hr: u32, bb_hbp: u32, so: u32, outs: u32, c: FipConstant) -> Result<f64> {
    if outs == 0 {
        return Err(Error::UndefinedFip);
    }
    let numerator = 13.0 * hr as f64 + 3.0 * bb_hbp as f64 - 2.0 * so as f64;
    Ok(numerator * 3.0 / outs as f64 + c.value)
}

/// One game's opponent FIP with the metadata downstream consumers need.
#[derive(Debug, Clone, PartialEq)]
pub struct GameFip {
    pub date: NaiveDate,
    pub opponent_id: String,
    pub is_home: bool,
    pub value: f64,
}

/// A game skipped because FIP was undefined (zero opponent outs).
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedGame {
    pub date: NaiveDate,
    pub opponent_id: String,
}

/// One team-season's opponent FIP values: the sorted sample plus a side
/// table preserving per-game metadata, plus the skip report.
#[derive(Debug, Clone)]
pub struct FipSeries {
    pub team_id: String,
    pub season: u16,
    pub sample: OrderedSample,
    pub games: Vec<GameFip>,
    pub skipped: Vec<SkippedGame>,
}

/// Compute the per-game opponent FIP series for one team-season.
///
/// Games with zero opponent outs are excluded from the sample and recorded
/// in the skip report rather than imputed.
pub fn opponent_fip_series(games: &[MatchedGame], c: FipConstant) -> Result<FipSeries> {
    let first = games.first().ok_or(Error::EmptySample)?;
    if games.iter().any(|g| g.team_id != first.team_id || g.season != first.season) {
        return Err(Error::MixedSeries(format!(
            "expected all games for {} {}",
            first.team_id, first.season
        )));
    }

    let mut per_game = Vec::with_capacity(games.len());
    let mut skipped = Vec::new();
    for g in games {
        match fip_value(g.hr, g.bb_hbp, g.so, g.opp_outs, c) {
            Ok(value) => per_game.push(GameFip {
                date: g.date,
                opponent_id: g.opponent_id.clone(),
                is_home: g.is_home,
                value,
            }),
            Err(Error::UndefinedFip) => {
                skipped.push(SkippedGame { date: g.date, opponent_id: g.opponent_id.clone() })
            }
            Err(e) => return Err(e),
        }
    }
    let sample = OrderedSample::new(per_game.iter().map(|g| g.value).collect())?;
    Ok(FipSeries {
        team_id: first.team_id.clone(),
        season: first.season,
        sample,
        games: per_game,
        skipped,
    })
}

/// Group dataset rows by team and build one sorted sample per team from the
/// precomputed opponent_fip column.
pub fn team_samples_from_dataset(
    rows: &[crate::gamelog::DatasetRow],
) -> Result<BTreeMap<String, OrderedSample>> {
    let mut by_team: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for row in rows {
        let fip = row.opponent_fip.ok_or_else(|| Error::ParseError {
            line: 0,
            msg: "dataset has no opponent_fip column; run `ingest` first".into(),
        })?;
        by_team.entry(row.game.team_id.clone()).or_default().push(fip);
    }
    by_team.into_iter().map(|(team, vals)| Ok((team, OrderedSample::new(vals)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> FipConstant {
        FipConstant { season: 2019, value: v }
    }

    #[test]
    fn zero_numerator_leaves_the_constant() {
        assert_eq!(fip_value(0, 0, 0, 27, c(3.2)).unwrap(), 3.2);
    }

    #[test]
    fn hand_evaluation() {
        let v = fip_value(2, 3, 7, 18, c(3.214)).unwrap();
        assert!((v - 6.714).abs() < 1e-12);
    }

    #[test]
    fn sub_constant_values_are_valid() {
        assert_eq!(fip_value(0, 0, 9, 27, c(3.0)).unwrap(), 1.0);
    }

    #[test]
    fn zero_outs_is_undefined() {
        assert!(matches!(fip_value(1, 1, 1, 0, c(3.0)), Err(Error::UndefinedFip)));
    }

    #[test]
    fn linear_in_the_constant() {
        let base = fip_value(3, 5, 8, 20, c(3.0)).unwrap();
        let shifted = fip_value(3, 5, 8, 20, c(3.25)).unwrap();
        assert!((shifted - base - 0.25).abs() < 1e-12);
    }

    #[test]
    fn scale_invariance() {
        let a = fip_value(2, 3, 7, 18, c(3.1)).unwrap();
        let b = fip_value(6, 9, 21, 54, c(3.1)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    fn game(hr: u32, bb_hbp: u32, so: u32, opp_outs: u32) -> MatchedGame {
        MatchedGame {
            team_id: "BOS".into(),
            opponent_id: "NYY".into(),
            season: 2019,
            game_index: 1,
            date: chrono::NaiveDate::from_ymd_opt(2019, 4, 1).unwrap(),
            is_home: true,
            hr,
            bb_hbp,
            so,
            opp_outs,
        }
    }

    #[test]
    fn series_hand_values_sorted() {
        let games = vec![game(1, 2, 5, 27), game(0, 4, 3, 24)];
        let series = opponent_fip_series(&games, c(3.2)).unwrap();
        let vals = series.sample.values();
        assert!((vals[0] - 3.95).abs() < 1e-12);
        assert!((vals[1] - 4.2).abs() < 1e-12);
        assert_eq!(series.games.len(), 2);
    }

    #[test]
    fn series_skips_zero_out_games() {
        let games = vec![game(1, 2, 5, 27), game(0, 0, 0, 0)];
        let series = opponent_fip_series(&games, c(3.2)).unwrap();
        assert_eq!(series.sample.len(), 1);
        assert_eq!(series.skipped.len(), 1);
    }

    #[test]
    fn series_rejects_mixed_teams() {
        let mut g2 = game(0, 0, 0, 27);
        g2.team_id = "NYM".into();
        g2.opponent_id = "ATL".into();
        let games = vec![game(1, 2, 5, 27), g2];
        assert!(matches!(opponent_fip_series(&games, c(3.2)), Err(Error::MixedSeries(_))));
    }

    #[test]
    fn constant_plausibility_window() {
        assert!(c(3.214).is_plausible());
        assert!(!c(1.0).is_plausible());
        assert!(!c(4.5).is_plausible());
    }
}
