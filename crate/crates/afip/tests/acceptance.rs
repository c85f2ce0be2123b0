//! Acceptance gate. Runs as a plain binary (no test harness) so every
//! criterion executes and prints its `ACCEPTANCE <n> (<name>): PASS|FAIL`
//! line even when an earlier one fails; the process exits nonzero if any
//! criterion fails.
//!
//! Criterion 8 needs real 2019 game logs, which are not bundled. Point
//! `AFIP_DATA_2019` at a directory with `batting.csv`, `pitching.csv`,
//! `fip_constants.csv`, and `pitcher_lines.csv` in the documented schemas to
//! enable it; otherwise it reports SKIP and passes vacuously.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use afip::equate::{afip_game_eqp, afip_game_si, afip_table};
use afip::fip::{fip_value, FipConstant, PitcherGameLine};
use afip::gamelog;
use afip::qq::{linear_fit, pearson, qq_pairs};
use afip::sample::{league_average, OrderedSample};
use afip::synth::{
    generate_season, recover_transform, spread_transforms, BaseShape, NoiseMode, TeamTransform,
};
use afip::tamper::tamper_check;

fn verdict(n: u32, name: &str, ok: bool, detail: &str) -> bool {
    println!("ACCEPTANCE {n} ({name}): {} [{detail}]", if ok { "PASS" } else { "FAIL" });
    ok
}

fn standard_transforms() -> Vec<TeamTransform> {
    spread_transforms(30, (0.8, 1.25), (-0.5, 0.5)).unwrap()
}

fn base_at_plotting_positions(base: &BaseShape, n: usize) -> OrderedSample {
    let vals: Vec<f64> =
        (1..=n).map(|i| base.quantile((i as f64 - 0.5) / n as f64).unwrap()).collect();
    OrderedSample::new(vals).unwrap()
}

fn criterion_1_affine_pipeline_exactness() -> bool {
    let base = BaseShape::fip_like();
    let transforms = standard_transforms();
    let season = generate_season(&base, &transforms, 162, NoiseMode::None, 0).unwrap();
    let samples = season.samples().unwrap();
    let league =
        league_average(&samples.values().cloned().collect::<Vec<_>>(), 162).unwrap();

    // the league's own affine coordinates relative to the base shape
    let base_sample = base_at_plotting_positions(&base, 162);
    let league_fit = linear_fit(&qq_pairs(&base_sample, &league).unwrap()).unwrap();

    let (mut worst_r_gap, mut worst_gap, mut worst_comp) = (0.0f64, 0.0f64, 0.0f64);
    for t in &transforms {
        let sample = &samples[&t.team_id];
        let fit = linear_fit(&qq_pairs(sample, &league).unwrap()).unwrap();
        worst_r_gap = worst_r_gap.max(1.0 - fit.pearson_r);

        for &x in sample.values() {
            let eqp = afip_game_eqp(x, sample, &league).unwrap();
            let si = afip_game_si(x, &fit);
            worst_gap = worst_gap.max((eqp - si).abs());
        }

        let rec = recover_transform(&t.team_id, sample, &league).unwrap();
        let comp_scale = rec.scale * league_fit.slope;
        let comp_shift = rec.scale * league_fit.intercept + rec.shift;
        worst_comp = worst_comp
            .max((comp_scale - t.scale).abs())
            .max((comp_shift - t.shift).abs());
    }

    let a = verdict(
        1,
        "affine exactness: qq pearson",
        worst_r_gap <= 1e-9,
        &format!("max 1-r = {worst_r_gap:.3e}, tolerance 1e-9"),
    );
    let b = verdict(
        1,
        "affine exactness: |EQP - SI| at plotting positions",
        worst_gap <= 1e-6,
        &format!("max gap = {worst_gap:.3e}, tolerance 1e-6"),
    );
    let c = verdict(
        1,
        "affine exactness: transform recovery composes",
        worst_comp <= 1e-6,
        &format!("max error = {worst_comp:.3e}, tolerance 1e-6"),
    );
    a && b && c
}

fn criterion_2_noisy_universality_range() -> bool {
    let base = BaseShape::fip_like();
    let transforms = standard_transforms();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for seed in 0..50u64 {
        let season =
            generate_season(&base, &transforms, 162, NoiseMode::IidResample, seed).unwrap();
        let samples = season.samples().unwrap();
        let league =
            league_average(&samples.values().cloned().collect::<Vec<_>>(), 162).unwrap();
        let mean_r = samples
            .values()
            .map(|s| pearson(&qq_pairs(s, &league).unwrap()).unwrap())
            .sum::<f64>()
            / samples.len() as f64;
        lo = lo.min(mean_r);
        hi = hi.max(mean_r);
    }
    let ok = lo >= 0.975 && hi <= 0.999;
    let detail = format!("mean pearson over 50 seeds in [{lo:.4}, {hi:.4}], bound [0.975, 0.999]");
    verdict(2, "noisy universality range", ok, &detail)
}

fn criterion_3_equating_identity() -> bool {
    let base = BaseShape::fip_like();
    let season =
        generate_season(&base, &standard_transforms(), 162, NoiseMode::None, 0).unwrap();
    let mut worst = 0.0f64;
    for sample in season.samples().unwrap().values() {
        for &v in sample.values() {
            worst = worst.max((afip_game_eqp(v, sample, sample).unwrap() - v).abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=200);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..15.0)).collect();
        let s = OrderedSample::new(values).unwrap();
        for &v in s.values() {
            worst = worst.max((afip_game_eqp(v, &s, &s).unwrap() - v).abs());
        }
    }
    let ok = worst <= 1e-9;
    verdict(3, "equating identity", ok, &format!("max |out - in| = {worst:.3e}"))
}

fn criterion_4_eqp_monotonicity() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=200);
        let m = rng.gen_range(1..=200);
        let team =
            OrderedSample::new((0..n).map(|_| rng.gen_range(-5.0..15.0)).collect()).unwrap();
        let league =
            OrderedSample::new((0..m).map(|_| rng.gen_range(-5.0..15.0)).collect()).unwrap();
        let mut probes: Vec<f64> = (0..50).map(|_| rng.gen_range(-10.0..20.0)).collect();
        probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for p in probes {
            let v = afip_game_eqp(p, &team, &league).unwrap();
            if v < prev {
                violations += 1;
            }
            prev = v;
        }
    }
    verdict(4, "eqp monotonicity", violations == 0, &format!("{violations} violations"))
}

fn criterion_5_oracle_equivalence() -> bool {
    // counting oracle for percentile_of
    fn percentile_oracle(values: &[f64], v: f64) -> f64 {
        let lt = values.iter().filter(|x| **x < v).count() as f64;
        let eq = values.iter().filter(|x| **x == v).count() as f64;
        100.0 * (lt + 0.5 * eq) / values.len() as f64
    }
    // full-pool sort + rank indexing oracle for league_average
    fn league_oracle(teams: &[Vec<f64>], target: usize) -> Vec<f64> {
        let mut pool: Vec<f64> = teams.iter().flatten().copied().collect();
        pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let g = pool.len() / target;
        (0..target).map(|i| pool[g * i + (g + 1) / 2 - 1]).collect()
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=50);
        // duplicates on purpose: quantized values collide often
        let values: Vec<f64> =
            (0..n).map(|_| (rng.gen_range(-20.0..20.0f64) * 4.0).round() / 4.0).collect();
        let s = OrderedSample::new(values.clone()).unwrap();

        for _ in 0..10 {
            let probe = (rng.gen_range(-25.0..25.0f64) * 4.0).round() / 4.0;
            if s.percentile_of(probe) != percentile_oracle(&values, probe) {
                mismatches += 1;
            }
        }
        // rank indexing: the inverse must return each order statistic exactly
        for i in 1..=s.len() {
            if s.value_at_percentile(s.plotting_position(i)).unwrap() != s.values()[i - 1] {
                mismatches += 1;
            }
        }

        let m = rng.gen_range(2..=6);
        let teams: Vec<Vec<f64>> =
            (0..m).map(|_| (0..n).map(|_| rng.gen_range(-20.0..20.0)).collect()).collect();
        let samples: Vec<OrderedSample> =
            teams.iter().map(|t| OrderedSample::new(t.clone()).unwrap()).collect();
        let league = league_average(&samples, n).unwrap();
        if league.values() != league_oracle(&teams, n) {
            mismatches += 1;
        }
    }
    verdict(5, "oracle equivalence", mismatches == 0, &format!("{mismatches} mismatches"))
}

fn criterion_6_si_eqp_agreement() -> bool {
    let base = BaseShape::fip_like();
    let transforms = standard_transforms();
    let season =
        generate_season(&base, &transforms, 162, NoiseMode::IidResample, 6).unwrap();
    let samples = season.samples().unwrap();
    let league =
        league_average(&samples.values().cloned().collect::<Vec<_>>(), 162).unwrap();

    let team_ids: Vec<&String> = samples.keys().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let mut lines = Vec::new();
    for p in 0..20 {
        let pitcher_id = format!("P{p:02}");
        for start in 0..30 {
            let opponent = team_ids[(p * 7 + start * 3) % team_ids.len()].clone();
            lines.push((
                "XXX".to_string(),
                2019u16,
                PitcherGameLine {
                    pitcher_id: pitcher_id.clone(),
                    date: NaiveDate::from_ymd_opt(2019, 4, 1).unwrap()
                        + chrono::Days::new(start as u64),
                    opponent_id: opponent,
                    hr: rng.gen_range(0..=2),
                    bb_hbp: rng.gen_range(0..=4),
                    so: rng.gen_range(0..=9),
                    outs: 18,
                },
            ));
        }
    }
    let c = FipConstant { season: 2019, value: 3.2 };
    let table = afip_table(&lines, &samples, &league, c).unwrap();
    let mean = table.summary.mean_abs_eqp_minus_si;
    let ok = mean <= 0.10;
    verdict(
        6,
        "si-eqp agreement",
        ok,
        &format!("mean |EQP - SI| = {mean:.4} over {} pitchers, bound 0.10", table.summary.pitchers),
    )
}

fn criterion_7_tamper_scan_calibration() -> bool {
    let base = BaseShape::fip_like();
    let draw = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        (0..n).map(|_| base.quantile(rng.gen_range(f64::EPSILON..1.0)).unwrap()).collect()
    };

    // untampered: null_percentile's lower tail should be calibrated
    let mut below_10 = 0usize;
    for trial in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let home = OrderedSample::new(draw(&mut rng, 81)).unwrap();
        let away = OrderedSample::new(draw(&mut rng, 81)).unwrap();
        let report = tamper_check("T", &home, &away, 199, 0.98, trial).unwrap();
        if report.null_percentile < 10.0 {
            below_10 += 1;
        }
    }
    let frac = below_10 as f64 / 200.0;
    let calibrated = (0.05..=0.15).contains(&frac);

    // tampered: +2.0 shift applied to the upper half of the away sample.
    // The asymptotic qq pearson of this tampering is ~0.982, right at the
    // 0.98 threshold, so detection rests on the permutation percentile;
    // 500 draws per side give it the resolution to separate the two.
    let mut flagged = 0usize;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + trial);
        let home = OrderedSample::new(draw(&mut rng, 500)).unwrap();
        let mut away_vals = draw(&mut rng, 500);
        away_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let half = away_vals.len() / 2;
        for v in &mut away_vals[half..] {
            *v += 2.0;
        }
        let away = OrderedSample::new(away_vals).unwrap();
        if tamper_check("T", &home, &away, 199, 0.98, trial).unwrap().flagged {
            flagged += 1;
        }
    }

    let a = verdict(
        7,
        "tamper scan: null calibration",
        calibrated,
        &format!("P(null_percentile < 10) = {frac:.3}, bound 0.10 +/- 0.05"),
    );
    let b = verdict(
        7,
        "tamper scan: injected shift detected",
        flagged >= 95,
        &format!("flagged {flagged}/100 seeds, bound >= 95"),
    );
    a && b
}

const EXPECTED_PEARSON_2019: [(&str, f64); 30] = [
    ("ARI", 0.9887),
    ("ATL", 0.9889),
    ("BAL", 0.9884),
    ("BOS", 0.9889),
    ("CHC", 0.9914),
    ("CHW", 0.9915),
    ("CIN", 0.9857),
    ("CLE", 0.9889),
    ("COL", 0.9895),
    ("DET", 0.9836),
    ("HOU", 0.9915),
    ("KCR", 0.9903),
    ("LAA", 0.9885),
    ("LAD", 0.9877),
    ("MIA", 0.9914),
    ("MIL", 0.9878),
    ("MIN", 0.9924),
    ("NYM", 0.9895),
    ("NYY", 0.9927),
    ("OAK", 0.9908),
    ("PHI", 0.9818),
    ("PIT", 0.9893),
    ("SDP", 0.9894),
    ("SEA", 0.9896),
    ("SFG", 0.9908),
    ("STL", 0.9878),
    ("TBR", 0.9900),
    ("TEX", 0.9920),
    ("TOR", 0.9844),
    ("WSN", 0.9843),
];

fn criterion_8_real_data_reproduction() -> bool {
    let dir = match std::env::var("AFIP_DATA_2019") {
        Ok(d) => std::path::PathBuf::from(d),
        Err(_) => {
            println!(
                "ACCEPTANCE 8 (real-data reproduction): SKIP [AFIP_DATA_2019 not set; \
                 supply 2019 logs to enable]"
            );
            return true;
        }
    };

    let constants = afip::fip::load_fip_constants(&dir.join("fip_constants.csv")).unwrap();
    let c = afip::fip::constant_for(&constants, 2019).unwrap();
    println!("real-data run uses FIP constant {} for 2019", c.value);

    let batting: Vec<_> = gamelog::read_batting_log(&dir.join("batting.csv"))
        .unwrap()
        .into_iter()
        .filter(|r| r.season == 2019)
        .collect();
    let pitching: Vec<_> = gamelog::read_pitching_log(&dir.join("pitching.csv"))
        .unwrap()
        .into_iter()
        .filter(|r| r.season == 2019)
        .collect();

    let mut team_ids: Vec<String> = batting.iter().map(|r| r.team_id.clone()).collect();
    team_ids.sort();
    team_ids.dedup();

    let mut samples: BTreeMap<String, OrderedSample> = BTreeMap::new();
    let mut home_away: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for team in &team_ids {
        let rows: Vec<_> = batting.iter().filter(|r| &r.team_id == team).cloned().collect();
        let matched = gamelog::match_games(&rows, &pitching).unwrap();
        let mut vals = Vec::new();
        for g in &matched {
            let v = fip_value(g.hr, g.bb_hbp, g.so, g.opp_outs, c).unwrap();
            vals.push(v);
            let sides = home_away.entry(team.clone()).or_default();
            if g.is_home {
                sides.0.push(v);
            } else {
                sides.1.push(v);
            }
        }
        samples.insert(team.clone(), OrderedSample::new(vals).unwrap());
    }
    let league =
        league_average(&samples.values().cloned().collect::<Vec<_>>(), 162).unwrap();

    let mut ok = true;
    let mut sum = 0.0;
    for (team, expected) in EXPECTED_PEARSON_2019 {
        let r = pearson(&qq_pairs(&samples[team], &league).unwrap()).unwrap();
        sum += r;
        if (r - expected).abs() > 0.005 {
            println!("  {team}: pearson {r:.4}, expected {expected:.4} +/- 0.005");
            ok = false;
        }
    }
    let avg = sum / 30.0;
    if (avg - 0.9889).abs() > 0.002 {
        println!("  average pearson {avg:.4}, expected 0.9889 +/- 0.002");
        ok = false;
    }

    let hou = &samples["HOU"];
    if (hou.mean() - 5.78).abs() > 0.02 || (hou.std_dev() - 2.52).abs() > 0.02 {
        println!("  HOU mean/sd {:.4}/{:.4}, expected 5.78/2.52 +/- 0.02", hou.mean(), hou.std_dev());
        ok = false;
    }
    let (h, a) = &home_away["HOU"];
    let split_r = tamper_check(
        "HOU",
        &OrderedSample::new(h.clone()).unwrap(),
        &OrderedSample::new(a.clone()).unwrap(),
        0,
        0.98,
        0,
    )
    .unwrap()
    .pearson_r;
    if (split_r - 0.9906).abs() > 0.005 {
        println!("  HOU home/away pearson {split_r:.4}, expected 0.9906 +/- 0.005");
        ok = false;
    }

    let lines: Vec<(String, u16, PitcherGameLine)> =
        gamelog::read_pitcher_lines(&dir.join("pitcher_lines.csv"))
            .unwrap()
            .into_iter()
            .filter(|r| r.season == 2019)
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
    let table = afip_table(&lines, &samples, &league, c).unwrap();
    match table.records.iter().find(|r| r.pitcher_id.contains("Cole")) {
        Some(cole) => {
            if (cole.fip - 2.64).abs() > 0.03
                || (cole.afip_si - 2.65).abs() > 0.03
                || (cole.afip_eqp - 2.73).abs() > 0.03
            {
                println!(
                    "  Cole FIP/SI/EQP {:.3}/{:.3}/{:.3}, expected 2.64/2.65/2.73 +/- 0.03",
                    cole.fip, cole.afip_si, cole.afip_eqp
                );
                ok = false;
            }
        }
        None => {
            println!("  no pitcher matching \"Cole\" in pitcher_lines.csv");
            ok = false;
        }
    }

    verdict(8, "real-data reproduction", ok, "2019 logs")
}

fn criterion_9_ingest_round_trip() -> bool {
    let date = |s: &str| NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap();
    let brow = |idx: u32, d: &str| gamelog::BattingGameRow {
        team_id: "BOS".into(),
        season: 2019,
        game_index: idx,
        date: date(d),
        opponent_id: "NYY".into(),
        is_home: idx % 2 == 1,
        hr: idx,
        bb: 2,
        hbp: 1,
        so: 7,
    };
    let prow = |idx: u32, d: &str, pitcher: &str, ip: &str| gamelog::PitchingGameRow {
        team_id: "NYY".into(),
        season: 2019,
        game_index: idx,
        date: date(d),
        opponent_id: "BOS".into(),
        pitcher_id: pitcher.into(),
        outs: gamelog::parse_innings(ip).unwrap(),
    };

    let batting = vec![
        brow(1, "2019-04-01"), // home win, no bottom ninth
        brow(2, "2019-04-02"), // walk-off
        brow(3, "2019-04-03"), // extra innings
        brow(4, "2019-06-01"), // doubleheader game 1
        brow(5, "2019-06-01"), // doubleheader game 2
    ];
    let pitching = vec![
        prow(1, "2019-04-01", "p1", "8.0"),
        prow(2, "2019-04-02", "p1", "5.2"),
        prow(2, "2019-04-02", "p2", "2.1"),
        prow(2, "2019-04-02", "p3", "0.2"),
        prow(3, "2019-04-03", "p1", "6.0"),
        prow(3, "2019-04-03", "p2", "4.2"),
        prow(39, "2019-06-01", "p4", "9.0"),
        prow(40, "2019-06-01", "p5", "8.0"),
    ];

    let matched = gamelog::match_games(&batting, &pitching).unwrap();
    let outs: Vec<u32> = matched.iter().map(|g| g.opp_outs).collect();
    let outs_ok = outs == vec![24, 26, 32, 27, 24];

    let c = FipConstant { season: 2019, value: 3.2 };
    let rows: Vec<gamelog::DatasetRow> = matched
        .into_iter()
        .map(|game| {
            let v = fip_value(game.hr, game.bb_hbp, game.so, game.opp_outs, c).unwrap();
            gamelog::DatasetRow { game, opponent_fip: Some(v) }
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dataset.csv");
    gamelog::write_dataset(&rows, &path).unwrap();
    let back = gamelog::read_dataset(&path).unwrap();
    let round_trip_ok = back == rows;

    verdict(
        9,
        "ingest round trip",
        outs_ok && round_trip_ok,
        &format!("outs {outs:?}, csv round-trip exact: {round_trip_ok}"),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> bool); 9] = [
        (1, "affine pipeline exactness", criterion_1_affine_pipeline_exactness),
        (2, "noisy universality range", criterion_2_noisy_universality_range),
        (3, "equating identity", criterion_3_equating_identity),
        (4, "eqp monotonicity", criterion_4_eqp_monotonicity),
        (5, "oracle equivalence", criterion_5_oracle_equivalence),
        (6, "si-eqp agreement", criterion_6_si_eqp_agreement),
        (7, "tamper scan calibration", criterion_7_tamper_scan_calibration),
        (8, "real-data reproduction", criterion_8_real_data_reproduction),
        (9, "ingest round trip", criterion_9_ingest_round_trip),
    ];
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        let ok = std::panic::catch_unwind(run).unwrap_or_else(|_| {
            println!("ACCEPTANCE {n} ({name}): FAIL [panicked]");
            false
        });
        if !ok {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
    } else {
        println!("acceptance: criteria {failed:?} failed");
        std::process::exit(1);
    }
}
