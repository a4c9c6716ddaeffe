//! `ftqs`: configuration-driven front end over the simulation crates.

mod decode;
mod estimate;
mod io;
mod msd_cmd;
mod pipeline_cmd;
mod route;
mod sample;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pipeline::PipelineConfig;
use serde_json::{json, Map, Value};

use io::{keys_help, load_config, Failure, Outcome};

#[derive(Parser)]
#[command(name = "ftqs", version, about = "Fault-tolerant sampling experiments: sampler, decoder, distillation, routing, bounds, pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "ftqs_out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and sampled outcome distribution of a brickwork pattern.
    #[command(after_help = keys_help(sample::KEYS))]
    Sample {
        #[command(flatten)]
        common: Common,
    },
    /// Surface-code logical error rates over distances and flip rates.
    #[command(after_help = keys_help(decode::KEYS))]
    DecodeBench {
        #[command(flatten)]
        common: Common,
    },
    /// Layer count and copy budget of a parallel distillation plan.
    #[command(after_help = keys_help(msd_cmd::PLAN_KEYS))]
    MsdPlan {
        #[command(flatten)]
        common: Common,
    },
    /// Simulated distillation sweep checked against the density-matrix oracle.
    #[command(after_help = keys_help(msd_cmd::SIM_KEYS))]
    MsdSim {
        #[command(flatten)]
        common: Common,
    },
    /// Vertex-disjoint routing plan with its measurement pattern.
    #[command(after_help = keys_help(route::KEYS))]
    Route {
        #[command(flatten)]
        common: Common,
        /// Sets `p`.
        #[arg(long)]
        p: Option<usize>,
        /// Sets `m`.
        #[arg(long)]
        m: Option<usize>,
        /// Sets `flags`.
        #[arg(long)]
        flags: Option<String>,
    },
    /// Resource report with its formula strings.
    #[command(after_help = keys_help(estimate::KEYS))]
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Sets `mode` (4d or 3d).
        #[arg(long)]
        mode: Option<String>,
        /// Sets `n`.
        #[arg(long)]
        n: Option<f64>,
    },
    /// End-to-end run: distillation, routing, pattern, readout and audits.
    #[command(after_help = keys_help(pipeline_cmd::KEYS))]
    Pipeline {
        #[command(flatten)]
        common: Common,
        /// Sets `mode` (exact_small or error_model).
        #[arg(long)]
        mode: Option<String>,
        /// Sets `distance`.
        #[arg(long)]
        distance: Option<usize>,
        /// Sets `shots`.
        #[arg(long)]
        shots: Option<u64>,
        /// Zeroes every noise source: `noise`, `eps_t`, `eps_y`, `eps_out` and `p_f`.
        #[arg(long)]
        noiseless: bool,
    },
}

fn put<T: Into<Value>>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        map.insert(key.into(), v.into());
    }
}

fn pipeline_config(common: &Common, mut flags: Map<String, Value>, noiseless: bool) -> Outcome<PipelineConfig> {
    let mut object = match &common.config {
        Some(p) => load_config::<Value>(Some(p), Map::new(), None)?,
        None => json!({}),
    };
    let map = object.as_object_mut().expect("config is an object");
    map.append(&mut flags);
    map.entry("n").or_insert(json!(1));
    map.entry("k").or_insert(json!(2));
    if noiseless {
        for key in ["eps_t", "eps_y", "eps_out", "p_f"] {
            map.insert(key.into(), json!(0.0));
        }
        map.insert("noise".into(), Value::Null);
        map.remove("calibration");
    }
    let map = std::mem::take(map);
    load_config(None, map, common.seed)
}

fn run(command: Command) -> Outcome<()> {
    let common = match &command {
        Command::Sample { common }
        | Command::DecodeBench { common }
        | Command::MsdPlan { common }
        | Command::MsdSim { common }
        | Command::Route { common, .. }
        | Command::Estimate { common, .. }
        | Command::Pipeline { common, .. } => common.clone(),
    };
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(Failure::runtime)?;
    }
    let path = common.config.as_deref();
    let out: &Path = &common.out;
    match command {
        Command::Sample { .. } => sample::run(&load_config(path, Map::new(), common.seed)?, out),
        Command::DecodeBench { .. } => decode::run(&load_config(path, Map::new(), common.seed)?, out),
        Command::MsdPlan { .. } => msd_cmd::run_plan(&load_config(path, Map::new(), common.seed)?, out),
        Command::MsdSim { .. } => msd_cmd::run_sim(&load_config(path, Map::new(), common.seed)?, out),
        Command::Route { p, m, flags, .. } => {
            let mut o = Map::new();
            put(&mut o, "p", p);
            put(&mut o, "m", m);
            put(&mut o, "flags", flags);
            route::run(&load_config(path, o, common.seed)?, out)
        }
        Command::Estimate { mode, n, .. } => {
            let mut o = Map::new();
            put(&mut o, "mode", mode);
            put(&mut o, "n", n);
            estimate::run(&load_config(path, o, common.seed)?, out)
        }
        Command::Pipeline { mode, distance, shots, noiseless, .. } => {
            let mut o = Map::new();
            put(&mut o, "mode", mode);
            put(&mut o, "distance", distance);
            put(&mut o, "shots", shots);
            pipeline_cmd::run(&pipeline_config(&common, o, noiseless)?, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ftqs: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use serde::Serialize;

    fn keys_of<T: Serialize>(value: &T) -> Vec<String> {
        let mut keys: Vec<String> = serde_json::to_value(value).unwrap().as_object().unwrap().keys().cloned().collect();
        keys.sort();
        keys
    }

    fn listed(keys: &[(&str, &str)]) -> Vec<String> {
        let mut v: Vec<String> = keys.iter().map(|(k, _)| k.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn help_tables_match_config_schemas() {
        let s: sample::SampleConfig = load_config(None, json!({"n": 2, "k": 2}).as_object().unwrap().clone(), None).unwrap();
        assert_eq!(keys_of(&s), listed(sample::KEYS));
        let d: decode::DecodeBenchConfig = load_config(None, Map::new(), None).unwrap();
        assert_eq!(keys_of(&d), listed(decode::KEYS));
        let p: msd_cmd::MsdPlanConfig = load_config(None, Map::new(), None).unwrap();
        assert_eq!(keys_of(&p), listed(msd_cmd::PLAN_KEYS));
        let m: msd_cmd::MsdSimConfig = load_config(None, Map::new(), None).unwrap();
        assert_eq!(keys_of(&m), listed(msd_cmd::SIM_KEYS));
        let r: route::RouteConfig = load_config(None, json!({"p": 3, "m": 1}).as_object().unwrap().clone(), None).unwrap();
        assert_eq!(keys_of(&r), listed(route::KEYS));
        let e: estimate::EstimateConfig = load_config(None, Map::new(), None).unwrap();
        assert_eq!(keys_of(&e), listed(estimate::KEYS));
        let mut pk: Vec<String> = pipeline::PIPELINE_KEYS.iter().map(|s| s.to_string()).collect();
        pk.sort();
        assert_eq!(pk, listed(pipeline_cmd::KEYS));
    }

    #[test]
    fn every_subcommand_help_lists_its_keys() {
        let mut cmd = Cli::command();
        let tables: [(&str, &[(&str, &str)]); 7] = [
            ("sample", sample::KEYS),
            ("decode-bench", decode::KEYS),
            ("msd-plan", msd_cmd::PLAN_KEYS),
            ("msd-sim", msd_cmd::SIM_KEYS),
            ("route", route::KEYS),
            ("estimate", estimate::KEYS),
            ("pipeline", pipeline_cmd::KEYS),
        ];
        for (name, keys) in tables {
            let help = cmd.find_subcommand_mut(name).unwrap().render_long_help().to_string();
            for (k, _) in keys {
                assert!(help.contains(&format!("  {k} ")), "{name} help misses {k}");
            }
        }
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let bad = json!({"distances": [3], "bogus": 1}).as_object().unwrap().clone();
        let r: Outcome<decode::DecodeBenchConfig> = load_config(None, bad, None);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn flag_strings_parse_strictly() {
        assert_eq!(route::parse_flags("0100100").unwrap(), vec![false, true, false, false, true, false, false]);
        assert!(route::parse_flags("01x").is_err());
    }
}
