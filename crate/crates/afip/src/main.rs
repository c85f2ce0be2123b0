use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use afip::equate;
use afip::fip::{self, FipConstant, PitcherGameLine};
use afip::gamelog::{self, DatasetRow};
use afip::qq::{linear_fit, pearson, qq_pairs};
use afip::report;
use afip::sample::{histogram, league_average, OrderedSample};
use afip::synth::{generate_season, season_to_dataset, spread_transforms, BaseShape, NoiseMode};
use afip::tamper;

#[derive(Parser)]
#[command(
    name = "afip",
    version,
    about = "Opponent-FIP distributions and schedule-adjusted FIP (aFIP) from game logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse batting + pitching logs, match games, and write the dataset CSV
    /// with opponent FIP appended.
    Ingest {
        /// Batting game log CSV (may contain all teams)
        #[arg(long)]
        batting: PathBuf,
        /// Pitching game log CSV (may contain all teams)
        #[arg(long)]
        pitching: PathBuf,
        #[arg(long)]
        season: u16,
        /// season,fip_constant CSV; defaults to $AFIP_CONFIG_DIR/fip_constants.csv
        #[arg(long)]
        fip_constants: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Histogram of one team's opponent FIP values.
    TeamDist {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        team: String,
        #[arg(long, default_value_t = 0.5)]
        width: f64,
        #[arg(long, default_value_t = 0.0)]
        origin: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Build the hypothetical league-average sample.
    LeagueAvg {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 162)]
        target_len: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// qq-plot of one team against the league average.
    Qq {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        team: String,
        #[arg(long, default_value_t = 162)]
        target_len: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Pearson constants of every team's qq-plot against the league average.
    PearsonTable {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 162)]
        target_len: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-pitcher aFIP report.
    Afip {
        #[arg(long)]
        dataset: PathBuf,
        /// Pitcher game lines CSV (pitching schema plus hr,bb_hbp,so)
        #[arg(long)]
        pitchers: PathBuf,
        #[arg(long)]
        season: u16,
        #[arg(long)]
        fip_constants: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = 162)]
        target_len: usize,
        /// Disable display rounding to hundredths
        #[arg(long)]
        full_precision: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Home/away split check with a permutation null.
    TamperCheck {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        team: String,
        #[arg(long, default_value_t = 1000)]
        permutations: usize,
        #[arg(long, default_value_t = 0.98)]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic season dataset.
    Synth {
        #[arg(long, default_value_t = 30)]
        teams: usize,
        #[arg(long, default_value_t = 162)]
        games: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::None)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2019)]
        season: u16,
        #[arg(long, default_value_t = 0.8)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.25)]
        alpha_max: f64,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        beta_min: f64,
        #[arg(long, default_value_t = 0.5)]
        beta_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Si,
    Eqp,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    None,
    Iid,
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits 2 with usage on bad arguments
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn resolve_constants(flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Ok(dir) = std::env::var("AFIP_CONFIG_DIR") {
        let p = Path::new(&dir).join("fip_constants.csv");
        if p.exists() {
            return Ok(p);
        }
    }
    bail!("no --fip-constants given and $AFIP_CONFIG_DIR/fip_constants.csv not found")
}

fn load_constant(flag: Option<PathBuf>, season: u16) -> anyhow::Result<FipConstant> {
    let path = resolve_constants(flag)?;
    let constants = fip::load_fip_constants(&path)?;
    let c = fip::constant_for(&constants, season)?;
    if !c.is_plausible() {
        eprintln!(
            "warning: FIP constant {} for {} is outside the usual [2.5, 4.0] window",
            c.value, c.season
        );
    }
    Ok(c)
}

fn load_samples(dataset: &Path) -> anyhow::Result<(Vec<DatasetRow>, BTreeMap<String, OrderedSample>)> {
    let rows = gamelog::read_dataset(dataset)
        .with_context(|| format!("reading dataset {}", dataset.display()))?;
    let samples = fip::team_samples_from_dataset(&rows)?;
    Ok((rows, samples))
}

fn league_of(samples: &BTreeMap<String, OrderedSample>, target_len: usize) -> anyhow::Result<OrderedSample> {
    let teams: Vec<OrderedSample> = samples.values().cloned().collect();
    Ok(league_average(&teams, target_len)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { batting, pitching, season, fip_constants, out } => {
            let c = load_constant(fip_constants, season)?;
            let batting_rows: Vec<_> = gamelog::read_batting_log(&batting)?
                .into_iter()
                .filter(|r| r.season == season)
                .collect();
            let pitching_rows: Vec<_> = gamelog::read_pitching_log(&pitching)?
                .into_iter()
                .filter(|r| r.season == season)
                .collect();
            if batting_rows.is_empty() {
                bail!("no batting rows for season {season} in {}", batting.display());
            }

            let mut teams: Vec<String> =
                batting_rows.iter().map(|r| r.team_id.clone()).collect();
            teams.sort();
            teams.dedup();

            let mut dataset = Vec::new();
            let mut skipped = 0usize;
            for team in &teams {
                let team_batting: Vec<_> =
                    batting_rows.iter().filter(|r| &r.team_id == team).cloned().collect();
                let matched = gamelog::match_games(&team_batting, &pitching_rows)?;
                for game in matched {
                    match fip::fip_value(game.hr, game.bb_hbp, game.so, game.opp_outs, c) {
                        Ok(v) => dataset.push(DatasetRow { game, opponent_fip: Some(v) }),
                        Err(afip::Error::UndefinedFip) => {
                            skipped += 1;
                            eprintln!(
                                "warning: skipping {} {} vs {}: zero opponent outs",
                                game.team_id, game.date, game.opponent_id
                            );
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            gamelog::write_dataset(&dataset, &out)?;
            println!(
                "ingested {} games for {} team(s), {} skipped -> {}",
                dataset.len(),
                teams.len(),
                skipped,
                out.display()
            );
        }

        Command::TeamDist { dataset, team, width, origin, out, svg } => {
            let (_, samples) = load_samples(&dataset)?;
            let sample = samples
                .get(&team)
                .with_context(|| format!("team {team} not present in dataset"))?;
            let h = histogram(sample, width, origin)?;
            report::write_histogram_csv(&h, &out)?;
            if let Some(svg_path) = svg {
                report::render_histogram_svg(&h, &svg_path)?;
            }
            println!(
                "{team}: n={} mean={:.4} sd={:.4} -> {}",
                sample.len(),
                sample.mean(),
                sample.std_dev(),
                out.display()
            );
        }

        Command::LeagueAvg { dataset, target_len, out } => {
            let (_, samples) = load_samples(&dataset)?;
            let league = league_of(&samples, target_len)?;
            let mut text = String::from("rank,value\n");
            for (i, v) in league.values().iter().enumerate() {
                text.push_str(&format!("{},{v}\n", i + 1));
            }
            std::fs::write(&out, text)?;
            println!("league average sample of {} values -> {}", league.len(), out.display());
        }

        Command::Qq { dataset, team, target_len, out, svg } => {
            let (_, samples) = load_samples(&dataset)?;
            let sample = samples
                .get(&team)
                .with_context(|| format!("team {team} not present in dataset"))?;
            let league = league_of(&samples, target_len)?;
            let q = qq_pairs(sample, &league)?;
            let fit = linear_fit(&q)?;
            report::write_qq_csv(&q, &out)?;
            if let Some(svg_path) = svg {
                report::render_qq_svg(&q, &fit, &svg_path)?;
            }
            println!(
                "{team}: r={:.6} slope={:.6} intercept={:.6} -> {}",
                fit.pearson_r,
                fit.slope,
                fit.intercept,
                out.display()
            );
        }

        Command::PearsonTable { dataset, target_len, out } => {
            let (_, samples) = load_samples(&dataset)?;
            let league = league_of(&samples, target_len)?;
            let mut results = BTreeMap::new();
            for (team, sample) in &samples {
                results.insert(team.clone(), pearson(&qq_pairs(sample, &league)?)?);
            }
            report::render_pearson_table(&results, &out)?;
            let avg = results.values().sum::<f64>() / results.len() as f64;
            println!("{} teams, average pearson {:.4} -> {}", results.len(), avg, out.display());
        }

        Command::Afip {
            dataset,
            pitchers,
            season,
            fip_constants,
            method,
            target_len,
            full_precision,
            out,
        } => {
            let c = load_constant(fip_constants, season)?;
            let (_, samples) = load_samples(&dataset)?;
            let league = league_of(&samples, target_len)?;
            let lines: Vec<(String, u16, PitcherGameLine)> = gamelog::read_pitcher_lines(&pitchers)?
                .into_iter()
                .filter(|r| r.season == season)
                .map(|r| {
                    (
                        r.team_id,
                        r.season,
                        PitcherGameLine {
                            pitcher_id: r.pitcher_id,
                            date: r.date,
                            opponent_id: r.opponent_id,
                            hr: r.hr,
                            bb_hbp: r.bb_hbp,
                            so: r.so,
                            outs: r.outs,
                        },
                    )
                })
                .collect();
            let table = equate::afip_table(&lines, &samples, &league, c)?;
            match method {
                MethodArg::Both => report::write_afip_csv(&table, full_precision, &out)?,
                MethodArg::Si | MethodArg::Eqp => {
                    write_single_method_csv(&table, method, full_precision, &out)?
                }
            }
            if table.skipped_lines > 0 {
                eprintln!("warning: {} pitcher line(s) with zero outs skipped", table.skipped_lines);
            }
            let s = &table.summary;
            println!(
                "{} pitchers; mean |EQP-SI| {:.3}, max {:.3}, >0.15: {}, >0.20: {} -> {}",
                s.pitchers,
                s.mean_abs_eqp_minus_si,
                s.max_abs_eqp_minus_si,
                s.count_above_015,
                s.count_above_020,
                out.display()
            );
        }

        Command::TamperCheck { dataset, team, permutations, threshold, seed, out } => {
            let rows = gamelog::read_dataset(&dataset)?;
            let mut home = Vec::new();
            let mut away = Vec::new();
            for row in rows.iter().filter(|r| r.game.team_id == team) {
                let v = row.opponent_fip.context("dataset has no opponent_fip column")?;
                if row.game.is_home {
                    home.push(v);
                } else {
                    away.push(v);
                }
            }
            if home.is_empty() {
                return Err(afip::Error::OneSidedSeason("home").into());
            }
            if away.is_empty() {
                return Err(afip::Error::OneSidedSeason("away").into());
            }
            let report = tamper::tamper_check(
                &team,
                &OrderedSample::new(home)?,
                &OrderedSample::new(away)?,
                permutations,
                threshold,
                seed,
            )?;
            std::fs::write(&out, serde_json::to_string_pretty(&report)? + "\n")?;
            println!(
                "{team}: r={:.4} ks={:.4} null_percentile={:.1} flagged={} -> {}",
                report.pearson_r,
                report.ks,
                report.null_percentile,
                report.flagged,
                out.display()
            );
        }

        Command::Synth {
            teams,
            games,
            mode,
            seed,
            season,
            alpha_min,
            alpha_max,
            beta_min,
            beta_max,
            out,
        } => {
            let transforms = spread_transforms(teams, (alpha_min, alpha_max), (beta_min, beta_max))?;
            let noise = match mode {
                ModeArg::None => NoiseMode::None,
                ModeArg::Iid => NoiseMode::IidResample,
            };
            let synth = generate_season(&BaseShape::fip_like(), &transforms, games, noise, seed)?;
            let rows = season_to_dataset(&synth, season)?;
            gamelog::write_dataset(&rows, &out)?;
            println!("{} synthetic games ({} teams x {}) -> {}", rows.len(), teams, games, out.display());
        }
    }
    Ok(())
}

fn write_single_method_csv(
    table: &equate::AfipTable,
    method: MethodArg,
    full_precision: bool,
    out: &Path,
) -> anyhow::Result<()> {
    let fmt = |v: f64| if full_precision { format!("{v}") } else { format!("{v:.2}") };
    let (name, pick, diff): (&str, fn(&equate::AfipRecord) -> f64, fn(&equate::AfipRecord) -> f64) =
        match method {
            MethodArg::Si => ("slopeIntercept", |r| r.afip_si, |r| r.si_diff),
            MethodArg::Eqp => ("equipercentile", |r| r.afip_eqp, |r| r.eqp_diff),
            MethodArg::Both => unreachable!(),
        };
    let mut text = format!("player,{name},FIP,{name} difference\n");
    for r in &table.records {
        text.push_str(&format!(
            "{},{},{},{}\n",
            r.pitcher_id,
            fmt(pick(r)),
            fmt(r.fip),
            fmt(diff(r))
        ));
    }
    std::fs::write(out, text)?;
    Ok(())
}
