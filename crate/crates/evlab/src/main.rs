use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evlab_core::dynamics::{sample_stationary, Orbit, OrbitConfig};
use evlab_core::rng::stream_id;
use serde_json::json;

use evlab::config::{emit_config, parse_config, parse_config_str, ExperimentConfig};
use evlab::experiments::{ei_sweep, fit_series, run_ensemble};
use evlab::figures::{figure_dataset, FigureName, Scale};
use evlab::lemma::{lemma_csv, verify_lemma, violations};
use evlab::output::{fit_json, format_float, sha256_hex, to_json_text, OutputDir, RunManifest};
use evlab::selftest::{run_selftest, DEFAULT_SELFTEST_SEED};
use evlab::{Error, Result};

#[derive(Parser)]
#[command(name = "evlab", version, about = "Extreme value laws of randomly perturbed dynamical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump one noisy orbit as CSV.
    Simulate {
        /// Map name (`ternary`, `henon`, ...) or a JSON map object.
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = evlab::config::DEFAULT_BURN_IN)]
        burn_in: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the GEV ensemble described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "evlab-out")]
        out: PathBuf,
    },
    /// Print a config with every default resolved.
    Config {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit a GEV to a series file (one number per line).
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Treat the input as a raw series and take maxima over blocks of this
        /// length; without it the input already holds block maxima.
        #[arg(long)]
        block: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extremal index sweep at the periodic target of a config file.
    Ei {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "evlab-out")]
        out: PathBuf,
    },
    /// Produce the dataset behind a figure (rot, ber, ei, PM, lor, cat, henon).
    Figure {
        name: String,
        #[arg(long, default_value = "desk")]
        scale: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the correlation bound of the noisy rotation on a grid of lags.
    VerifyLemma {
        #[arg(long, num_args = 1.., default_values_t = [0.3])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        jmin: usize,
        #[arg(long, default_value_t = 200)]
        jmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks and write their result files.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SELFTEST_SEED)]
        seed: u64,
        #[arg(long, default_value = "selftest-out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// `Ok(false)` when the command finished but something was aborted or
/// failed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Simulate { map, eps, length, seed, burn_in, out } => simulate(&map, eps, length, seed, burn_in, out),
        Command::Run { config, out } => {
            let cfg = parse_config(&config)?;
            let report = run_ensemble(&cfg)?;
            let mut dir = config_dir(&out, &cfg)?;
            dir.write_rows("results", &report.rows(), serde_json::to_value(&report).expect("report serializes"))?;
            dir.finish()?;
            report_aborts(report.any_aborted())
        }
        Command::Config { config } => {
            print!("{}", emit_config(&parse_config(&config)?));
            Ok(true)
        }
        Command::Fit { input, block, out } => fit(&input, block, out),
        Command::Ei { config, out } => {
            let cfg = parse_config(&config)?;
            let report = ei_sweep(&cfg)?;
            let mut dir = config_dir(&out, &cfg)?;
            dir.write_rows("ei", &report.rows(), serde_json::to_value(&report).expect("report serializes"))?;
            dir.finish()?;
            report_aborts(report.any_aborted())
        }
        Command::Figure { name, scale, seed, out } => {
            let name: FigureName = name.parse()?;
            let scale: Scale = scale.parse()?;
            let data = figure_dataset(name, scale, seed)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("figure-{name}")));
            let key = format!("figure={name} scale={} seed={seed}", serde_json::to_string(&scale).expect("scale"));
            let mut dir = OutputDir::create(&out, RunManifest::new(sha256_hex(key.as_bytes()), seed))?;
            for t in &data.tables {
                dir.write_rows(&format!("{name}_{}", t.label), &t.rows, t.details.clone())?;
            }
            dir.finish()?;
            eprintln!("wrote {} table(s) to {}", data.tables.len(), out.display());
            report_aborts(data.any_aborted())
        }
        Command::VerifyLemma { eps, jmin, jmax, out } => {
            let rows = verify_lemma(&eps, jmin, jmax)?;
            let csv = lemma_csv(&rows);
            match out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?,
                None => print!("{csv}"),
            }
            let bad = violations(&rows);
            eprintln!("{} rows, {} valid, {bad} violation(s)", rows.len(), rows.iter().filter(|r| r.valid).count());
            Ok(bad == 0)
        }
        Command::Selftest { seed, out } => {
            let outcomes = run_selftest(seed, &out, |o| {
                println!("criterion {:>2} {}: {} ({})", o.id, if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail)
            })?;
            Ok(outcomes.iter().all(|o| o.pass))
        }
    }
}

fn config_dir(out: &Path, cfg: &ExperimentConfig) -> Result<OutputDir> {
    let mut dir = OutputDir::create(out, RunManifest::new(cfg.digest(), cfg.seed))?;
    dir.write("config.json", emit_config(cfg).as_bytes())?;
    Ok(dir)
}

fn report_aborts(aborted: bool) -> Result<bool> {
    if aborted {
        eprintln!("at least one noise level was aborted (more than half of its realizations failed)");
    }
    Ok(!aborted)
}

fn simulate(map: &str, eps: f64, length: usize, seed: u64, burn_in: usize, out: Option<PathBuf>) -> Result<bool> {
    let map_value: serde_json::Value = if map.trim_start().starts_with('{') {
        serde_json::from_str(map).map_err(|e| Error::Input(format!("--map: {e}")))?
    } else {
        json!(map)
    };
    let text = json!({ "map": map_value, "eps": [eps], "m": 30, "n": 1, "seed": seed, "burn_in": burn_in }).to_string();
    let cfg = parse_config_str(&text)?;
    let spec = cfg.map.spec()?;
    let noise = cfg.map.noise(eps)?;
    let start = sample_stationary(&spec, &noise, burn_in, 1, seed, stream_id(&[eps.to_bits(), 0]))?;
    let x0 = start.states.first().copied().ok_or(Error::Core(evlab_core::Error::EscapedState))?;
    let orbit = Orbit::new(spec, noise, x0, &OrbitConfig { length, burn_in: 0, seed, stream: stream_id(&[eps.to_bits(), 1]) })?;
    let two_d = cfg.map.space().dim() == 2;
    let mut csv = String::from(if two_d { "t,x,y,alive\n" } else { "t,x,alive\n" });
    for (t, s) in orbit.enumerate() {
        let [x, y] = s.coords.as_array();
        let _ = if two_d {
            writeln!(csv, "{t},{},{},{}", format_float(x), format_float(y), s.is_alive())
        } else {
            writeln!(csv, "{t},{},{}", format_float(x), s.is_alive())
        };
        if !s.is_alive() {
            break;
        }
    }
    match out {
        Some(path) => std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?,
        None => print!("{csv}"),
    }
    Ok(true)
}

fn fit(input: &Path, block: Option<usize>, out: Option<PathBuf>) -> Result<bool> {
    let text = std::fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        // first field of each line; a non-numeric first line is a header
        let field = line.split([',', ';', '\t', ' ']).find(|f| !f.is_empty()).unwrap_or("");
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Input(format!("{}:{}: `{field}` is not a number", input.display(), i + 1))),
        }
    }
    let fit = fit_series(&values, block.unwrap_or(1))?;
    let doc = json!({ "input": input.display().to_string(), "block_length": block.unwrap_or(1), "fit": fit_json(&fit) });
    let text = to_json_text(&doc);
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?,
        None => print!("{text}"),
    }
    Ok(true)
}
