use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use arcadia_core::engine::{Env, EnvConfig, Mode, StreamHash};
use arcadia_core::error::{Error, Result};
use arcadia_core::ffi::config_from_pairs;
use arcadia_core::games::{move_action, Difficulty, GameId, Level, NOOP};
use arcadia_core::harness::rollout::{hash_hex, read_log};
use arcadia_core::harness::{bench, genstats, rollout, score, Policy, RolloutSummary};
use arcadia_core::levelgen::Verdict;
use arcadia_core::params::Params;
use arcadia_core::render::{frame_to_ascii, OBS_BYTES};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arcadia", version, about = "Run, score, benchmark and inspect arcadia environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Environment flags; names match the foreign-interface config keys.
#[derive(Args, Clone)]
struct EnvArgs {
    #[arg(long = "env_name", visible_alias = "env-name")]
    env_name: String,
    #[arg(long = "num_levels", visible_alias = "num-levels", default_value_t = 0)]
    num_levels: u32,
    #[arg(long = "start_level", visible_alias = "start-level", default_value_t = 0)]
    start_level: u32,
    #[arg(long = "rand_seed", visible_alias = "rand-seed", default_value_t = 0)]
    rand_seed: u32,
    /// easy, hard, memory or exploration
    #[arg(long = "distribution_mode", visible_alias = "distribution-mode", default_value = "hard")]
    distribution_mode: String,
    #[arg(long = "use_sequential_levels", visible_alias = "use-sequential-levels")]
    use_sequential_levels: bool,
    #[arg(long = "num_threads", visible_alias = "num-threads")]
    num_threads: Option<usize>,
    #[arg(long = "max_episode_steps", visible_alias = "max-episode-steps")]
    max_episode_steps: Option<u32>,
}

impl EnvArgs {
    fn config(&self) -> Result<(EnvConfig, Option<usize>)> {
        let mut pairs = vec![
            ("env_name", self.env_name.clone()),
            ("num_levels", self.num_levels.to_string()),
            ("start_level", self.start_level.to_string()),
            ("rand_seed", self.rand_seed.to_string()),
            ("distribution_mode", self.distribution_mode.clone()),
            ("use_sequential_levels", self.use_sequential_levels.to_string()),
        ];
        if let Some(t) = self.num_threads {
            pairs.push(("num_threads", t.to_string()));
        }
        if let Some(m) = self.max_episode_steps {
            pairs.push(("max_episode_steps", m.to_string()));
        }
        config_from_pairs(&pairs)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run episodes under a policy; log every step and report scores.
    Rollout {
        #[command(flatten)]
        env: EnvArgs,
        /// random, script or replay
        #[arg(long, default_value = "random")]
        policy: String,
        #[arg(long, default_value_t = 10)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        policy_seed: u64,
        /// Action list (whitespace or comma separated) for the script policy.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Episode log to re-execute and verify for the replay policy.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// JSONL step log output.
        #[arg(long)]
        log: Option<PathBuf>,
        /// JSON summary output; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure vectorized stepping throughput.
    Bench {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, default_value_t = 64)]
        num_envs: usize,
        #[arg(long, default_value_t = 2.0)]
        seconds: f64,
        /// Also measure with rendering disabled.
        #[arg(long)]
        compare_render: bool,
    },
    /// Generation and solvability statistics over a seed range.
    Genstats {
        #[arg(long = "env_name", visible_alias = "env-name")]
        env_name: String,
        /// easy, hard or memory
        #[arg(long = "distribution_mode", visible_alias = "distribution-mode", default_value = "hard")]
        distribution_mode: String,
        #[arg(long, default_value_t = 1000)]
        seeds: u32,
        #[arg(long, default_value_t = 0)]
        first_seed: u32,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Write ASCII and PNG dumps of the first levels here.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        dump_count: u32,
    },
    /// Normalized-return report from rollout summaries.
    Score {
        /// Summary JSON files written by `rollout --report`.
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
    },
    /// Step an environment from the keyboard or a key file.
    Play {
        #[command(flatten)]
        env: EnvArgs,
        /// Key file to read instead of stdin.
        #[arg(long)]
        keys: Option<PathBuf>,
        #[arg(long)]
        log: Option<PathBuf>,
        /// Save every frame as a PNG in this directory.
        #[arg(long)]
        png_dir: Option<PathBuf>,
        /// Do not draw frames in the terminal.
        #[arg(long)]
        quiet: bool,
    },
    /// Print one level's layout, statistics and oracle verdict.
    DumpLevel {
        #[arg(long = "env_name", visible_alias = "env-name")]
        env_name: String,
        #[arg(long = "distribution_mode", visible_alias = "distribution-mode", default_value = "hard")]
        distribution_mode: String,
        #[arg(long)]
        seed: u32,
        /// Write the level's first frame here.
        #[arg(long)]
        png: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        scale: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arcadia: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}

fn io<T>(r: std::result::Result<T, impl std::fmt::Display>) -> Result<T> {
    r.map_err(|e| Error::Io(e.to_string()))
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> Result<()> {
    let text = io(serde_json::to_string_pretty(value))?;
    match path {
        Some(p) => io(fs::write(p, text + "\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn save_png(frame: &[u8], path: &Path, scale: u32) -> Result<()> {
    let img = image::RgbImage::from_raw(64, 64, frame.to_vec()).expect("frame is 64x64 RGB");
    let img = if scale > 1 {
        image::imageops::resize(&img, 64 * scale, 64 * scale, image::imageops::FilterType::Nearest)
    } else {
        img
    };
    io(img.save(path))
}

fn parse_actions(text: &str) -> Result<Vec<u8>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u8>().map_err(|_| Error::Config(format!("bad action `{s}` in script"))))
        .collect()
}

fn table_and_memory(mode: &str) -> Result<(Difficulty, bool)> {
    match mode {
        "easy" => Ok((Difficulty::Easy, false)),
        "hard" => Ok((Difficulty::Hard, false)),
        "memory" => Ok((Difficulty::Hard, true)),
        other => Err(Error::Config(format!("`distribution_mode` = `{other}`: expected easy, hard or memory"))),
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Rollout { env, policy, episodes, policy_seed, script, replay, log, report } => {
            let (config, _) = env.config()?;
            let policy = match policy.as_str() {
                "random" => Policy::Random { seed: policy_seed },
                "script" => {
                    let p = script.ok_or_else(|| Error::Config("script policy needs --script".into()))?;
                    Policy::Script(parse_actions(&io(fs::read_to_string(p))?)?)
                }
                "replay" => {
                    let p = replay.ok_or_else(|| Error::Config("replay policy needs --replay".into()))?;
                    Policy::Replay(read_log(&io(fs::read_to_string(p))?)?)
                }
                other => return Err(Error::Config(format!("unknown policy `{other}`"))),
            };
            let mut writer = match &log {
                Some(p) => Some(BufWriter::new(io(fs::File::create(p))?)),
                None => None,
            };
            let summary = rollout(&config, policy, episodes, writer.as_mut().map(|w| w as &mut dyn Write))?;
            if let Some(mut w) = writer {
                io(w.flush())?;
            }
            write_json(report.as_deref(), &summary)
        }
        Command::Bench { env, num_envs, seconds, compare_render } => {
            let (config, threads) = env.config()?;
            let threads = threads.unwrap_or(1);
            let d = Duration::from_secs_f64(seconds);
            let mut results = vec![bench(&config, num_envs, threads, d, true)?];
            if compare_render {
                results.push(bench(&config, num_envs, threads, d, false)?);
            }
            write_json(None, &results)
        }
        Command::Genstats { env_name, distribution_mode, seeds, first_seed, threads, dump, dump_count } => {
            let game = GameId::from_name(&env_name)?;
            let (table, memory) = table_and_memory(&distribution_mode)?;
            if memory && !game.supports_memory() {
                return Err(Error::Config(format!("{game} has no memory mode")));
            }
            let params = Params::builtin(table);
            let end = first_seed.checked_add(seeds).ok_or_else(|| Error::Config("seed range overflows".into()))?;
            if let Some(dir) = dump {
                io(fs::create_dir_all(&dir))?;
                for seed in first_seed..end.min(first_seed.saturating_add(dump_count)) {
                    let level =
                        Level::generate(game, params, seed, memory).map_err(|e| Error::Generation(e.to_string()))?;
                    io(fs::write(dir.join(format!("{game}_{seed}.txt")), level.layout().to_ascii()))?;
                    let frame = first_frame(game, &distribution_mode, seed)?;
                    save_png(&frame, &dir.join(format!("{game}_{seed}.png")), 4)?;
                }
            }
            let stats = genstats(game, params, first_seed..end, memory, threads)?;
            write_json(None, &stats)
        }
        Command::Score { summaries } => {
            let mut eps = Vec::new();
            for p in summaries {
                let s: RolloutSummary = io(serde_json::from_str(&io(fs::read_to_string(&p))?))
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                eps.extend(s.returns.iter().map(|&r| (s.config.game.name().to_string(), s.config.table(), r)));
            }
            write_json(None, &score(&eps)?)
        }
        Command::Play { env, keys, log, png_dir, quiet } => {
            let (config, _) = env.config()?;
            play(&config, keys.as_deref(), log.as_deref(), png_dir.as_deref(), quiet)
        }
        Command::DumpLevel { env_name, distribution_mode, seed, png, scale } => {
            let game = GameId::from_name(&env_name)?;
            let (table, memory) = table_and_memory(&distribution_mode)?;
            let params = Params::builtin(table);
            let level = Level::generate(game, params, seed, memory).map_err(|e| Error::Generation(e.to_string()))?;
            print!("{}", level.layout().to_ascii());
            let verdict = match level.verified_verdict(params) {
                Verdict::Solvable(w) => format!("solvable ({} witness steps)", w.len()),
                Verdict::Unsolvable => "unsolvable".into(),
                Verdict::Unknown => "unknown".into(),
            };
            println!("{}", io(serde_json::to_string(&level.stats()))?);
            println!("verdict: {verdict}");
            if let Some(p) = png {
                save_png(&first_frame(game, &distribution_mode, seed)?, &p, scale)?;
            }
            Ok(())
        }
    }
}

fn first_frame(game: GameId, distribution_mode: &str, seed: u32) -> Result<Vec<u8>> {
    let (config, _) = config_from_pairs(&[
        ("env_name", game.name().to_string()),
        ("distribution_mode", distribution_mode.to_string()),
        ("num_levels", "1".into()),
        ("start_level", seed.to_string()),
    ])?;
    let mut frame = vec![0; OBS_BYTES];
    Env::new(&config)?.observe(&mut frame);
    Ok(frame)
}

/// Keys: w a s d move, f and g are the first two specials, `.` waits,
/// q quits. A line holding a number is taken as a raw action index.
fn keys_to_actions(line: &str) -> (Vec<u8>, bool) {
    let line = line.trim();
    if let Ok(a) = line.parse::<u8>() {
        return (vec![a], false);
    }
    let mut out = Vec::new();
    for c in line.chars() {
        let a = match c {
            'w' => move_action(0, 1),
            's' => move_action(0, -1),
            'a' => move_action(-1, 0),
            'd' => move_action(1, 0),
            'f' => 9,
            'g' => 10,
            '.' => NOOP,
            'q' => return (out, true),
            _ => continue,
        };
        out.push(a);
    }
    (out, false)
}

fn play(
    config: &EnvConfig,
    keys: Option<&Path>,
    log: Option<&Path>,
    png_dir: Option<&Path>,
    quiet: bool,
) -> Result<()> {
    let mut env = Env::new(config)?;
    let mut hash = StreamHash::new(env.params());
    let mut frame = vec![0; OBS_BYTES];
    env.observe(&mut frame);
    let mut log = match log {
        Some(p) => Some(BufWriter::new(io(fs::File::create(p))?)),
        None => None,
    };
    if let Some(d) = png_dir {
        io(fs::create_dir_all(d))?;
    }
    let input: Box<dyn BufRead> = match keys {
        Some(p) => Box::new(std::io::BufReader::new(io(fs::File::open(p))?)),
        None => Box::new(std::io::stdin().lock()),
    };
    if !quiet {
        println!("{}", frame_to_ascii(&frame));
        if config.mode == Mode::Sequential {
            println!("sequential: level {}", env.level_seed());
        }
    }
    let mut t = 0u64;
    'outer: for line in input.lines() {
        let (actions, quit) = keys_to_actions(&io(line)?);
        for a in actions {
            let r = env.step_into(a, &mut frame, true)?;
            let h = hash.absorb(&frame, r.reward, r.done);
            if let Some(w) = log.as_mut() {
                let rec = serde_json::json!({
                    "t": t, "action": a, "reward": r.reward, "done": r.done,
                    "level_seed": r.info.level_seed, "state_hash": hash_hex(h),
                });
                io(writeln!(w, "{rec}"))?;
            }
            if let Some(d) = png_dir {
                save_png(&frame, &d.join(format!("{t:06}.png")), 4)?;
            }
            if !quiet {
                println!("{}", frame_to_ascii(&frame));
                println!("t={t} action={a} reward={} done={}", r.reward, r.done);
                if let Some(ret) = r.info.episode_return {
                    println!("episode return {ret}");
                }
            }
            t += 1;
        }
        if quit {
            break 'outer;
        }
    }
    if let Some(mut w) = log {
        io(w.flush())?;
    }
    Ok(())
}
