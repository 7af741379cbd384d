//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fail.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use arcadia_core::engine::{select_level_seed, Env, EnvConfig, Mode, MEMORY_PATCH_RADIUS, MEMORY_VIEW_TILES};
use arcadia_core::games::{Difficulty, GameId, Level, NOOP, NUM_ACTIONS};
use arcadia_core::grid::Tile;
use arcadia_core::harness::{bench, genstats, normalized_return};
use arcadia_core::levelgen::{kruskal_maze, remove_dead_ends, Verdict, Witness};
use arcadia_core::params::Params;
use arcadia_core::render::{MASK_COLOR, OBS_BYTES, OBS_W};
use arcadia_core::rng::{derive_stream, labels, RngStream};
use arcadia_core::vec_env::VecEnv;

use common::{golden_cases, hex, load_goldens, run_hashes};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, pass: String, fail: String) -> Outcome {
    if cond {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn determinism() -> Outcome {
    let recorded = load_goldens();
    let mut problems = Vec::new();
    for (name, config, script) in golden_cases() {
        let a = run_hashes(&config, &script, 1, 1)[0];
        let b = run_hashes(&config, &script, 1, 1)[0];
        if a != b {
            problems.push(format!("{name}: two runs differ"));
        }
        let serial = run_hashes(&config, &script, 8, 1);
        let parallel = run_hashes(&config, &script, 8, 8);
        if serial != parallel {
            problems.push(format!("{name}: 1 vs 8 threads differ"));
        }
        match recorded.get(&name) {
            Some((first, last)) => {
                if *first != hex(common::first_frame_hash(&config)) || *last != hex(a) {
                    problems.push(format!("{name}: differs from the recorded hash"));
                }
            }
            None => problems.push(format!("{name}: no recorded hash")),
        }
    }
    check(
        problems.is_empty(),
        format!("{} cases: repeat runs, 1 vs 8 threads and recorded hashes all equal", recorded.len()),
        problems.join("; "),
    )
}

fn solvability() -> Outcome {
    let params = Params::builtin(Difficulty::Hard);
    let mut lines = Vec::new();
    let mut ok = true;
    for g in GameId::ALL {
        let s = genstats(g, params, 0..10_000, false, 1).map_err(|e| e.to_string())?;
        let pass = s.solvable_rate >= 0.99 && s.unknown_rate <= 0.01 && s.generation_errors == 0 && s.reproducible;
        ok &= pass;
        lines.push(format!("{g} {:.2}%/{:.2}%", 100.0 * s.solvable_rate, 100.0 * s.unknown_rate));
    }
    let msg = format!("solvable/unknown over 10000 hard seeds: {}", lines.join(", "));
    check(ok, msg.clone(), msg)
}

fn maze_structure() -> Outcome {
    let mut rng = RngStream::from_key(0x3A2E);
    for i in 0..1000u32 {
        let (w, h) = (rng.range(3, 25) as u32, rng.range(3, 25) as u32);
        let maze = kruskal_maze(&mut rng, w, h).map_err(|e| e.to_string())?;
        let cells = (w * h) as usize;
        let passages = maze.count(Tile::Open) - cells;
        // A connected graph with V - 1 edges is a tree.
        if maze.components(Tile::Open) != 1 || passages != cells - 1 {
            return Err(format!("maze {i} ({w}x{h}): {passages} passages for {cells} cells"));
        }
        let opened = remove_dead_ends(&maze, &mut rng);
        if opened.components(Tile::Open) != 1 {
            return Err(format!("maze {i}: dead-end removal disconnected the maze"));
        }
        if let Some((x, y)) =
            opened.positions(Tile::Open).into_iter().find(|&(x, y)| opened.degree(x, y, Tile::Open) < 2)
        {
            return Err(format!("maze {i}: open tile ({x},{y}) has degree < 2"));
        }
    }
    let params = Params::builtin(Difficulty::Hard);
    for seed in 0..1000 {
        let level = Level::generate(GameId::Chaser, params, seed, false).map_err(|e| e.to_string())?;
        let g = level.layout();
        if let Some((x, y)) = g.positions(Tile::Open).into_iter().find(|&(x, y)| g.degree(x, y, Tile::Open) < 2) {
            return Err(format!("chaser seed {seed}: open tile ({x},{y}) has degree < 2"));
        }
    }
    Ok("1000 spanning trees with cells-1 passages; dead-end removal and 1000 chaser levels have min degree >= 2".into())
}

/// Reference (game, [R_min, R_max] easy, [R_min, R_max] hard) rows, kept separate
/// from the shipped parameter file.
const NORM_ROWS: [(&str, [f64; 2], [f64; 2]); 16] = [
    ("coinrun", [5.0, 10.0], [5.0, 10.0]),
    ("starpilot", [2.5, 64.0], [1.5, 35.0]),
    ("caveflyer", [3.5, 12.0], [2.0, 13.4]),
    ("dodgeball", [1.5, 19.0], [1.5, 19.0]),
    ("fruitbot", [-1.5, 32.4], [-0.5, 27.2]),
    ("chaser", [0.5, 13.0], [0.5, 14.2]),
    ("miner", [1.5, 13.0], [1.5, 20.0]),
    ("jumper", [3.0, 10.0], [1.0, 10.0]),
    ("leaper", [3.0, 10.0], [1.5, 10.0]),
    ("maze", [5.0, 10.0], [4.0, 10.0]),
    ("bigfish", [1.0, 40.0], [0.0, 40.0]),
    ("heist", [3.5, 10.0], [2.0, 10.0]),
    ("climber", [2.0, 12.6], [1.0, 12.6]),
    ("plunder", [4.5, 30.0], [3.0, 30.0]),
    ("ninja", [3.5, 10.0], [2.0, 10.0]),
    ("bossfight", [0.5, 13.0], [0.5, 13.0]),
];

fn random_returns(game: GameId, episodes: usize) -> Vec<f64> {
    let slots = 16;
    let mut env = VecEnv::new(&EnvConfig::new(game), slots, Some(1)).expect("config");
    env.set_render(false);
    let mut rng = RngStream::from_key(0xB0D5 ^ game as u64);
    let mut actions = vec![0u8; slots];
    let mut out = Vec::with_capacity(episodes);
    while out.len() < episodes {
        actions.iter_mut().for_each(|a| *a = rng.below(u32::from(NUM_ACTIONS)) as u8);
        env.step(&actions).expect("step");
        out.extend(env.infos().iter().filter_map(|i| i.episode_return));
    }
    out.truncate(episodes);
    out
}

fn reward_bounds() -> Outcome {
    let mut problems = Vec::new();
    let mut maxima = Vec::new();
    let hard = Params::builtin(Difficulty::Hard);
    for g in GameId::ALL {
        let r_max = NORM_ROWS.iter().find(|r| r.0 == g.name()).expect("row").2[1];
        let best = random_returns(g, 1000).into_iter().fold(f64::NEG_INFINITY, f64::max);
        maxima.push(format!("{g} {best:.2}"));
        let bound = if g.trivially_bounded() { r_max } else { r_max * 1.05 };
        if best > bound + 1e-9 {
            problems.push(format!("{g}: random return {best} exceeds {bound}"));
        }
    }
    // Designed maxima for the two games without a trivial bound.
    let chaser = f64::from(hard.chaser.max_return_raw) / 256.0;
    let cave = hard.caveflyer.max_return().to_f64();
    for (g, designed) in [("chaser", chaser), ("caveflyer", cave)] {
        let r_max = NORM_ROWS.iter().find(|r| r.0 == g).expect("row").2[1];
        if designed > r_max * 1.05 {
            problems.push(format!("{g}: designed maximum {designed} over R_max + 5%"));
        }
    }
    for (name, easy, hard) in NORM_ROWS {
        for (d, (lo, hi)) in [(Difficulty::Easy, (easy[0], easy[1])), (Difficulty::Hard, (hard[0], hard[1]))] {
            for r in [lo, hi, 0.5 * (lo + hi), 7.25, -3.0] {
                let expected = (r - lo) / (hi - lo);
                let got = normalized_return(r, name, d).map_err(|e| e.to_string())?;
                if (got - expected).abs() > 1e-9 {
                    problems.push(format!("{name}/{}: R={r} gives {got}, expected {expected}", d.name()));
                }
            }
        }
    }
    check(
        problems.is_empty(),
        format!("max of 1000 random episodes: {}; 16 normalization rows within 1e-9", maxima.join(", ")),
        problems.join("; "),
    )
}

fn throughput() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut rows = Vec::new();
    for g in GameId::ALL {
        let r = bench(&EnvConfig::new(g), 16, 1, Duration::from_millis(400), true).map_err(|e| e.to_string())?;
        worst = worst.min(r.steps_per_sec);
        rows.push(format!("{g} {:.0}", r.steps_per_sec));
    }
    let msg = format!("single-thread steps/s with rendering: {} (min {worst:.0}, floor 1000)", rows.join(", "));
    check(worst >= 1000.0, msg.clone(), msg)
}

fn witness_script(game: GameId, params: &Params, seed: u32) -> Option<Vec<u8>> {
    match Level::generate(game, params, seed, false).ok()?.verified_verdict(params) {
        Verdict::Solvable(Witness::Actions(s)) => Some(s),
        _ => None,
    }
}

fn sequential() -> Outcome {
    let params = Params::builtin(Difficulty::Hard);
    let start = 40;
    let mut c = EnvConfig::new(GameId::Maze);
    c.mode = Mode::Sequential;
    c.start_level = start;
    let mut env = Env::new(&c).map_err(|e| e.to_string())?;
    let mut obs = vec![0u8; OBS_BYTES];
    env.reset(&mut obs).map_err(|e| e.to_string())?;
    for k in 0..3u32 {
        if env.level_seed() != start + k {
            return Err(format!("level {k} has seed {}, expected {}", env.level_seed(), start + k));
        }
        let script = witness_script(GameId::Maze, params, start + k).ok_or("maze witness missing")?;
        for (i, &a) in script.iter().enumerate() {
            let r = env.step(a, &mut obs).map_err(|e| e.to_string())?;
            let last = i + 1 == script.len();
            if r.done || r.info.level_complete != last {
                return Err(format!("level {k} step {i}: done={} complete={}", r.done, r.info.level_complete));
            }
            if last && (r.reward != 10.0 || r.info.levels_completed != k + 1) {
                return Err(format!("level {k}: reward {} after {} levels", r.reward, r.info.levels_completed));
            }
        }
    }
    if env.level_seed() != start + 3 || env.step_count() != 0 {
        return Err("fourth level was not loaded fresh".into());
    }

    // Failure after a completed level ends the episode.
    let mut c = EnvConfig::new(GameId::Leaper);
    c.mode = Mode::Sequential;
    for s in 0..200 {
        let Some(script) = witness_script(GameId::Leaper, params, s) else { continue };
        c.start_level = s;
        let mut env = Env::new(&c).map_err(|e| e.to_string())?;
        env.reset(&mut obs).map_err(|e| e.to_string())?;
        for &a in &script {
            env.step(a, &mut obs).map_err(|e| e.to_string())?;
        }
        let up = arcadia_core::games::move_action(0, 1);
        let mut last = None;
        while !env.is_done() {
            last = Some(env.step(up, &mut obs).map_err(|e| e.to_string())?);
        }
        let r = last.ok_or("no step taken on the second level")?;
        if r.info.timeout || r.info.level_complete || r.info.levels_completed != 1 {
            continue;
        }
        if env.step(NOOP, &mut obs).is_ok() {
            return Err("stepping after a failure was accepted".into());
        }
        env.reset(&mut obs).map_err(|e| e.to_string())?;
        if env.level_seed() != s {
            return Err("reset after failure did not return to start_level".into());
        }
        return Ok(format!(
            "3 maze levels chained from seed {start} by oracle scripts; leaper seed {} failure ends the episode",
            s + 1
        ));
    }
    Err("no leaper level where moving straight up fails after one completion".into())
}

/// Upper 0.1% point of chi-square with `df` degrees of freedom, Wilson-Hilferty.
fn chi_square_critical_999(df: f64) -> f64 {
    let z = 3.090_232_306;
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

fn level_window() -> Outcome {
    let (start, n, draws) = (1000u32, 500u32, 100_000usize);
    let mut c = EnvConfig::new(GameId::Maze);
    c.num_levels = n;
    c.start_level = start;
    c.rand_seed = 9;
    let mut counts = vec![0u64; n as usize];
    let mut rng = derive_stream(c.rand_seed, 0, labels::EPISODE);
    for _ in 0..draws {
        let s = select_level_seed(&c, &mut rng, 0);
        if !(start..start + n).contains(&s) {
            return Err(format!("seed {s} outside [{start}, {})", start + n));
        }
        counts[(s - start) as usize] += 1;
    }
    // The engine draws from the same stream: its first episodes agree.
    let mut env = Env::new(&c).map_err(|e| e.to_string())?;
    env.set_render(false);
    let mut obs = vec![0u8; OBS_BYTES];
    let mut check_rng = derive_stream(c.rand_seed, 0, labels::EPISODE);
    for _ in 0..200 {
        if env.level_seed() != select_level_seed(&c, &mut check_rng, 0) {
            return Err("environment resets disagree with the seed sequence".into());
        }
        env.reset(&mut obs).map_err(|e| e.to_string())?;
    }
    let expected = draws as f64 / f64::from(n);
    let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = chi_square_critical_999(f64::from(n - 1));
    let msg = format!("{draws} draws in window, chi-square {chi2:.1} vs critical {critical:.1}");
    check(chi2 < critical, msg.clone(), msg)
}

fn mode_flags() -> Outcome {
    let hard = Params::builtin(Difficulty::Hard);
    let mut obs = vec![0u8; OBS_BYTES];
    for g in GameId::ALL.into_iter().filter(|g| g.supports_exploration()) {
        let mut c = EnvConfig::new(g);
        c.mode = Mode::Exploration;
        c.rand_seed = 77;
        let mut env = Env::new(&c).map_err(|e| e.to_string())?;
        env.set_render(false);
        let mut seeds = BTreeSet::new();
        for _ in 0..100 {
            env.reset(&mut obs).map_err(|e| e.to_string())?;
            seeds.insert(env.level_seed());
        }
        if seeds.len() != 1 || seeds.first() != hard.exploration.get(&g) {
            return Err(format!("{g}: exploration visited {seeds:?}"));
        }
    }

    // Patch bounds in pixels: the agent tile is centred in a MEMORY_VIEW_TILES window.
    let px_per_tile = OBS_W as i32 / MEMORY_VIEW_TILES;
    let half = (2 * MEMORY_PATCH_RADIUS + 1) * px_per_tile / 2;
    let (lo, hi) = (OBS_W as i32 / 2 - half, OBS_W as i32 / 2 + half);
    for g in GameId::ALL.into_iter().filter(|g| g.memory_masks_view()) {
        let mut c = EnvConfig::new(g);
        c.mode = Mode::Memory;
        let mut env = Env::new(&c).map_err(|e| e.to_string())?;
        env.reset(&mut obs).map_err(|e| e.to_string())?;
        let mut rng = RngStream::from_key(5);
        for t in 0..300 {
            env.step_into(rng.below(u32::from(NUM_ACTIONS)) as u8, &mut obs, true).map_err(|e| e.to_string())?;
            let mut inside_unmasked = 0;
            for y in 0..OBS_W as i32 {
                for x in 0..OBS_W as i32 {
                    let i = ((y * OBS_W as i32 + x) * 3) as usize;
                    let masked = obs[i..i + 3] == MASK_COLOR;
                    let inside = (lo..hi).contains(&x) && (lo..hi).contains(&y);
                    if !inside && !masked {
                        return Err(format!("{g} step {t}: pixel ({x},{y}) outside the patch is visible"));
                    }
                    inside_unmasked += usize::from(inside && !masked);
                }
            }
            if inside_unmasked == 0 {
                return Err(format!("{g} step {t}: patch is fully masked"));
            }
        }
    }

    // World enlargement: memory levels are at least the largest standard level
    // and larger than the typical one.
    for g in GameId::ALL.into_iter().filter(|g| g.supports_memory()) {
        let area = |memory: bool| -> Result<(u32, f64), String> {
            let mut max = 0;
            let mut sum = 0.0;
            for seed in 0..200 {
                let l = Level::generate(g, hard, seed, memory).map_err(|e| e.to_string())?.layout().clone();
                let a = l.width() * l.height();
                max = max.max(a);
                sum += f64::from(a);
            }
            Ok((max, sum / 200.0))
        };
        let ((std_max, std_mean), (_, mem_mean)) = (area(false)?, area(true)?);
        if mem_mean <= std_mean || (g.memory_masks_view() && mem_mean < f64::from(std_max)) {
            return Err(format!("{g}: memory area {mem_mean:.0} vs standard mean {std_mean:.0}, max {std_max}"));
        }
    }
    Ok("exploration pins one seed over 100 episodes; memory frames show only the 7x7 patch; memory worlds are larger"
        .into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("determinism", determinism),
        ("solvability", solvability),
        ("maze structure", maze_structure),
        ("reward bounds", reward_bounds),
        ("throughput", throughput),
        ("sequential levels", sequential),
        ("level window", level_window),
        ("mode flags", mode_flags),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {name} ({:.1}s): {detail}", t.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
