//! Game log parsing and matching.
//!
//! Input CSVs are UTF-8, comma-delimited, with a header row. Innings are in
//! baseball thirds notation ("5.2" = 5⅔ innings = 17 outs). Batting log
//! columns: `team,season,game_index,date,opponent,home,hr,bb,hbp,so`.
//! Pitching log columns: `team,season,game_index,date,opponent,pitcher,ip`.
//! Pitcher game lines add `hr,bb_hbp,so` after `ip`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use chrono::NaiveDate;

use crate::{Error, Result};

/// One line of a team batting game log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BattingGameRow {
    pub team_id: String,
    pub season: u16,
    pub game_index: u32,
    pub date: NaiveDate,
    pub opponent_id: String,
    pub is_home: bool,
    pub hr: u32,
    pub bb: u32,
    pub hbp: u32,
    pub so: u32,
}

/// One pitcher's line from a team pitching game log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitchingGameRow {
    pub team_id: String,
    pub season: u16,
    pub game_index: u32,
    pub date: NaiveDate,
    pub opponent_id: String,
    pub pitcher_id: String,
    pub outs: u32,
}

/// A pitcher game line with the counting stats needed for per-game FIP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitcherLineRow {
    pub team_id: String,
    pub season: u16,
    pub game_index: u32,
    pub date: NaiveDate,
    pub opponent_id: String,
    pub pitcher_id: String,
    pub outs: u32,
    pub hr: u32,
    pub bb_hbp: u32,
    pub so: u32,
}

/// One team-game with the opponent's pitching totals joined in.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedGame {
    pub team_id: String,
    pub opponent_id: String,
    pub season: u16,
    pub game_index: u32,
    pub date: NaiveDate,
    pub is_home: bool,
    pub hr: u32,
    pub bb_hbp: u32,
    pub so: u32,
    pub opp_outs: u32,
}

/// A dataset line: a matched game plus its computed opponent FIP, when the
/// producing pipeline stage has appended one.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub game: MatchedGame,
    pub opponent_fip: Option<f64>,
}

/// Convert thirds notation to outs: "5.2" → 17, "9.0" → 27, "7" → 21.
pub fn parse_innings(text: &str) -> Result<u32> {
    let bad = || Error::MalformedInnings(text.to_string());
    let t = text.trim();
    match t.split_once('.') {
        None => {
            let whole: u32 = t.parse().map_err(|_| bad())?;
            Ok(whole * 3)
        }
        Some((whole, frac)) => {
            let whole: u32 = whole.parse().map_err(|_| bad())?;
            let thirds = match frac {
                "0" => 0,
                "1" => 1,
                "2" => 2,
                _ => return Err(bad()),
            };
            Ok(whole * 3 + thirds)
        }
    }
}

/// Outs back to thirds notation: 17 → "5.2".
pub fn format_innings(outs: u32) -> String {
    format!("{}.{}", outs / 3, outs % 3)
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn from_reader(rdr: &mut csv::Reader<std::fs::File>, path: &Path) -> Result<Self> {
        let headers = rdr.headers().map_err(|e| Error::csv(path, e))?;
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        Ok(Columns { index })
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::SchemaError(name.to_string()))
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn field<'a>(record: &'a csv::StringRecord, idx: usize, name: &str) -> Result<&'a str> {
    record.get(idx).ok_or_else(|| Error::ParseError {
        line: record_line(record),
        msg: format!("row too short, no value for column {name:?}"),
    })
}

fn parse_count(record: &csv::StringRecord, idx: usize, name: &str) -> Result<u32> {
    let raw = field(record, idx, name)?;
    raw.trim().parse().map_err(|_| Error::ParseError {
        line: record_line(record),
        msg: format!("column {name:?}: {raw:?} is not a non-negative count"),
    })
}

fn parse_season(record: &csv::StringRecord, idx: usize) -> Result<u16> {
    let raw = field(record, idx, "season")?;
    raw.trim().parse().map_err(|_| Error::ParseError {
        line: record_line(record),
        msg: format!("column \"season\": {raw:?} is not a year"),
    })
}

fn parse_date(record: &csv::StringRecord, idx: usize) -> Result<NaiveDate> {
    let raw = field(record, idx, "date")?;
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d").map_err(|_| Error::ParseError {
        line: record_line(record),
        msg: format!("column \"date\": {raw:?} is not an ISO date"),
    })
}

fn parse_home(record: &csv::StringRecord, idx: usize) -> Result<bool> {
    let raw = field(record, idx, "home")?;
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "h" => Ok(true),
        "0" | "false" | "a" => Ok(false),
        _ => Err(Error::ParseError {
            line: record_line(record),
            msg: format!("column \"home\": {raw:?} is not a home/away flag"),
        }),
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file))
}

/// Read every row of a batting game log, validating per-team ordering.
pub fn read_batting_log(path: &Path) -> Result<Vec<BattingGameRow>> {
    let mut rdr = open_reader(path)?;
    let cols = Columns::from_reader(&mut rdr, path)?;
    let (c_team, c_season, c_index, c_date, c_opp, c_home) = (
        cols.require("team")?,
        cols.require("season")?,
        cols.require("game_index")?,
        cols.require("date")?,
        cols.require("opponent")?,
        cols.require("home")?,
    );
    let (c_hr, c_bb, c_hbp, c_so) = (
        cols.require("hr")?,
        cols.require("bb")?,
        cols.require("hbp")?,
        cols.require("so")?,
    );

    let mut rows = Vec::new();
    let mut last_index: HashMap<(String, u16), u32> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record_line(&record);
        let row = BattingGameRow {
            team_id: field(&record, c_team, "team")?.trim().to_string(),
            season: parse_season(&record, c_season)?,
            game_index: parse_count(&record, c_index, "game_index")?,
            date: parse_date(&record, c_date)?,
            opponent_id: field(&record, c_opp, "opponent")?.trim().to_string(),
            is_home: parse_home(&record, c_home)?,
            hr: parse_count(&record, c_hr, "hr")?,
            bb: parse_count(&record, c_bb, "bb")?,
            hbp: parse_count(&record, c_hbp, "hbp")?,
            so: parse_count(&record, c_so, "so")?,
        };
        if row.team_id == row.opponent_id {
            return Err(Error::ParseError {
                line,
                msg: format!("team {:?} listed as its own opponent", row.team_id),
            });
        }
        let key = (row.team_id.clone(), row.season);
        if let Some(&prev) = last_index.get(&key) {
            if row.game_index <= prev {
                return Err(Error::ParseError {
                    line,
                    msg: format!(
                        "game_index {} not strictly increasing for {} (previous {})",
                        row.game_index, row.team_id, prev
                    ),
                });
            }
        }
        last_index.insert(key, row.game_index);
        rows.push(row);
    }
    Ok(rows)
}

/// Batting rows for one (season, team), in game order.
pub fn parse_batting_log(path: &Path, season: u16, team_id: &str) -> Result<Vec<BattingGameRow>> {
    Ok(read_batting_log(path)?
        .into_iter()
        .filter(|r| r.season == season && r.team_id == team_id)
        .collect())
}

/// Read every row of a pitching game log. Multiple rows per game_index are
/// expected (one per pitcher).
pub fn read_pitching_log(path: &Path) -> Result<Vec<PitchingGameRow>> {
    let mut rdr = open_reader(path)?;
    let cols = Columns::from_reader(&mut rdr, path)?;
    let (c_team, c_season, c_index, c_date, c_opp, c_pitcher, c_ip) = (
        cols.require("team")?,
        cols.require("season")?,
        cols.require("game_index")?,
        cols.require("date")?,
        cols.require("opponent")?,
        cols.require("pitcher")?,
        cols.require("ip")?,
    );

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let ip_raw = field(&record, c_ip, "ip")?;
        let outs = parse_innings(ip_raw).map_err(|e| Error::ParseError {
            line: record_line(&record),
            msg: e.to_string(),
        })?;
        rows.push(PitchingGameRow {
            team_id: field(&record, c_team, "team")?.trim().to_string(),
            season: parse_season(&record, c_season)?,
            game_index: parse_count(&record, c_index, "game_index")?,
            date: parse_date(&record, c_date)?,
            opponent_id: field(&record, c_opp, "opponent")?.trim().to_string(),
            pitcher_id: field(&record, c_pitcher, "pitcher")?.trim().to_string(),
            outs,
        });
    }
    Ok(rows)
}

/// Pitching rows for one (season, team), in file order.
pub fn parse_pitching_log(path: &Path, season: u16, team_id: &str) -> Result<Vec<PitchingGameRow>> {
    Ok(read_pitching_log(path)?
        .into_iter()
        .filter(|r| r.season == season && r.team_id == team_id)
        .collect())
}

/// Read pitcher game lines (pitching log schema plus hr, bb_hbp, so).
pub fn read_pitcher_lines(path: &Path) -> Result<Vec<PitcherLineRow>> {
    let mut rdr = open_reader(path)?;
    let cols = Columns::from_reader(&mut rdr, path)?;
    let (c_team, c_season, c_index, c_date, c_opp, c_pitcher, c_ip) = (
        cols.require("team")?,
        cols.require("season")?,
        cols.require("game_index")?,
        cols.require("date")?,
        cols.require("opponent")?,
        cols.require("pitcher")?,
        cols.require("ip")?,
    );
    let (c_hr, c_bbhbp, c_so) =
        (cols.require("hr")?, cols.require("bb_hbp")?, cols.require("so")?);

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let outs = parse_innings(field(&record, c_ip, "ip")?).map_err(|e| Error::ParseError {
            line: record_line(&record),
            msg: e.to_string(),
        })?;
        rows.push(PitcherLineRow {
            team_id: field(&record, c_team, "team")?.trim().to_string(),
            season: parse_season(&record, c_season)?,
            game_index: parse_count(&record, c_index, "game_index")?,
            date: parse_date(&record, c_date)?,
            opponent_id: field(&record, c_opp, "opponent")?.trim().to_string(),
            pitcher_id: field(&record, c_pitcher, "pitcher")?.trim().to_string(),
            outs,
            hr: parse_count(&record, c_hr, "hr")?,
            bb_hbp: parse_count(&record, c_bbhbp, "bb_hbp")?,
            so: parse_count(&record, c_so, "so")?,
        });
    }
    Ok(rows)
}

/// Join one team's batting rows with the opposing pitching logs.
///
/// Doubleheaders (two games with the same date and opponent) are paired by
/// within-date ordinal on both sides: the batting game with the lower
/// game_index pairs with the opponent pitching game with the lower
/// game_index. `opp_outs` is the sum of the paired game's pitcher outs, so
/// walk-offs, skipped bottom halves, and extra innings fall out naturally.
pub fn match_games(
    batting: &[BattingGameRow],
    pitching: &[PitchingGameRow],
) -> Result<Vec<MatchedGame>> {
    // (pitching team, date, batting team) -> outs per game_index
    let mut outs_by_game: HashMap<(&str, NaiveDate, &str), BTreeMap<u32, u32>> = HashMap::new();
    for p in pitching {
        *outs_by_game
            .entry((p.team_id.as_str(), p.date, p.opponent_id.as_str()))
            .or_default()
            .entry(p.game_index)
            .or_insert(0) += p.outs;
    }

    // Within-date ordinal of each batting row, keyed by (date, opponent).
    let mut seen: HashMap<(NaiveDate, &str), usize> = HashMap::new();
    let mut matched = Vec::with_capacity(batting.len());
    for b in batting {
        let ordinal = {
            let slot = seen.entry((b.date, b.opponent_id.as_str())).or_insert(0);
            let cur = *slot;
            *slot += 1;
            cur
        };
        let games = outs_by_game
            .get(&(b.opponent_id.as_str(), b.date, b.team_id.as_str()))
            .ok_or_else(|| Error::UnmatchedGame { date: b.date, opponent: b.opponent_id.clone() })?;
        let batting_count = batting
            .iter()
            .filter(|x| x.date == b.date && x.opponent_id == b.opponent_id)
            .count();
        if games.len() != batting_count {
            return Err(Error::AmbiguousMatch {
                date: b.date,
                opponent: b.opponent_id.clone(),
                batting: batting_count,
                pitching: games.len(),
            });
        }
        let (_, &opp_outs) = games.iter().nth(ordinal).unwrap();
        matched.push(MatchedGame {
            team_id: b.team_id.clone(),
            opponent_id: b.opponent_id.clone(),
            season: b.season,
            game_index: b.game_index,
            date: b.date,
            is_home: b.is_home,
            hr: b.hr,
            bb_hbp: b.bb + b.hbp,
            so: b.so,
            opp_outs,
        });
    }
    Ok(matched)
}

const DATASET_HEADER: [&str; 10] =
    ["team", "season", "game_index", "date", "opponent", "home", "hr", "bb_hbp", "so", "opp_outs"];

/// Write matched games as a dataset CSV. The `opponent_fip` column is
/// appended when any row carries one.
pub fn write_dataset(rows: &[DatasetRow], path: &Path) -> Result<()> {
    let with_fip = rows.iter().any(|r| r.opponent_fip.is_some());
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(file);
    let mut header: Vec<&str> = DATASET_HEADER.to_vec();
    if with_fip {
        header.push("opponent_fip");
    }
    wtr.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        let g = &row.game;
        let mut record = vec![
            g.team_id.clone(),
            g.season.to_string(),
            g.game_index.to_string(),
            g.date.format("%Y-%m-%d").to_string(),
            g.opponent_id.clone(),
            if g.is_home { "1" } else { "0" }.to_string(),
            g.hr.to_string(),
            g.bb_hbp.to_string(),
            g.so.to_string(),
            g.opp_outs.to_string(),
        ];
        if with_fip {
            record.push(row.opponent_fip.map(|v| v.to_string()).unwrap_or_default());
        }
        wtr.write_record(&record).map_err(|e| Error::csv(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a dataset CSV back into matched games (+ opponent_fip when present).
pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRow>> {
    let mut rdr = open_reader(path)?;
    let cols = Columns::from_reader(&mut rdr, path)?;
    let idx: Vec<usize> =
        DATASET_HEADER.iter().map(|name| cols.require(name)).collect::<Result<_>>()?;
    let c_fip = cols.index.get("opponent_fip").copied();

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let game = MatchedGame {
            team_id: field(&record, idx[0], "team")?.trim().to_string(),
            season: parse_season(&record, idx[1])?,
            game_index: parse_count(&record, idx[2], "game_index")?,
            date: parse_date(&record, idx[3])?,
            opponent_id: field(&record, idx[4], "opponent")?.trim().to_string(),
            is_home: parse_home(&record, idx[5])?,
            hr: parse_count(&record, idx[6], "hr")?,
            bb_hbp: parse_count(&record, idx[7], "bb_hbp")?,
            so: parse_count(&record, idx[8], "so")?,
            opp_outs: parse_count(&record, idx[9], "opp_outs")?,
        };
        let opponent_fip = match c_fip {
            Some(i) => {
                let raw = field(&record, i, "opponent_fip")?.trim();
                if raw.is_empty() {
                    None
                } else {
                    Some(raw.parse().map_err(|_| Error::ParseError {
                        line: record_line(&record),
                        msg: format!("column \"opponent_fip\": {raw:?} is not a number"),
                    })?)
                }
            }
            None => None,
        };
        rows.push(DatasetRow { game, opponent_fip });
    }
    Ok(rows)
}
