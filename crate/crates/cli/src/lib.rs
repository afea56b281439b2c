//! Command-line front end: `heislab <command> [--config FILE] [--key value]...`.
//!
//! Every key may be set in a flat `key = value` config file or as a flag;
//! flags win. Unknown keys are errors. Exit codes: 2 invalid configuration,
//! 3 numerical failure, 4 under-resolved cloud, 5 failed battery.

pub mod certify;
pub mod commands;
pub mod config;
pub mod error;
pub mod source;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Arg, ArgAction, Command};
use serde::Serialize;

use commands::{keys_for, Outputs, COMMON_KEYS};
use config::{parse_file, Config, Key};
use error::{CliError, CliResult};

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "HEISLAB_THREADS";

const COMMANDS: [(&str, &str); 4] = [
    (
        "analyze",
        "per-node contact residual, wedge and rank over a sampled map",
    ),
    (
        "blowup",
        "blow-up errors and the wedge from circle integrals at a point",
    ),
    (
        "measure",
        "box counts, dimension fits and contents of an image",
    ),
    (
        "certify",
        "randomised batteries for the pairing identity and the rank bound",
    ),
];

fn is_boolean(k: &Key) -> bool {
    matches!(k.default, Some("true") | Some("false"))
}

fn cli() -> Command {
    let mut cmd = Command::new("heislab")
        .about("Heisenberg group experiments with reproducible outputs")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .subcommand(Command::new("gallery").about("list the gallery map ids"));
    for (name, about) in COMMANDS {
        let mut sub = Command::new(name).about(about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("flat key = value file; flags override it"),
        );
        for k in COMMON_KEYS.iter().chain(keys_for(name).expect("listed")) {
            let mut arg = Arg::new(k.name)
                .long(k.name)
                .help(k.help)
                .action(ArgAction::Set);
            if let Some(d) = k.default {
                arg = arg.help(format!("{} [default: {d}]", k.help));
            }
            if is_boolean(k) {
                arg = arg.num_args(0..=1).default_missing_value("true");
            }
            sub = sub.arg(arg);
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Configures the global pool from the environment.
pub fn init_threads() -> CliResult<usize> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "{THREADS_VAR} must be a positive integer, got `{v}`"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    // A pool may already exist when called twice in one process.
    let _ = builder.build_global();
    Ok(rayon::current_num_threads())
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a BTreeMap<String, String>,
    threads: usize,
    wall_seconds: f64,
    outputs: &'a [String],
}

/// Parses arguments, runs the command and writes its manifest.
pub fn run<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(CliError::Config(
                e.render().to_string().trim_end().to_string(),
            ))
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    if name == "gallery" {
        for (id, _) in heislab::jets::GalleryMap::catalogue() {
            println!("{id}");
        }
        println!("linear:a11,a12,...;a21,a22,...;...");
        return Ok(());
    }
    let keys: Vec<&Key> = COMMON_KEYS
        .iter()
        .chain(keys_for(name).expect("listed"))
        .collect();
    let owned: Vec<Key> = keys
        .iter()
        .map(|k| config::key(k.name, k.default, k.help))
        .collect();
    let file = match sub.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
            parse_file(&text, &owned)?
        }
        None => BTreeMap::new(),
    };
    let flags: BTreeMap<String, String> = keys
        .iter()
        .filter_map(|k| {
            sub.get_one::<String>(k.name)
                .map(|v| (k.name.to_string(), v.clone()))
        })
        .collect();
    let config = Config::resolve(&owned, file, flags);

    let threads = init_threads()?;
    let start = Instant::now();
    let mut out = Outputs::new(&config)?;
    let mut failure = None;
    match name {
        "analyze" => commands::analyze(&config, &mut out)?,
        "blowup" => commands::blowup(&config, &mut out)?,
        "measure" => commands::measure(&config, &mut out)?,
        "certify" => {
            let report = commands::certify_cmd(&config, &mut out)?;
            for b in &report.batteries {
                eprintln!(
                    "{:<20} {:>6} passed {:>6} failed",
                    b.name, b.passed, b.failed
                );
            }
            if !report.all_passed {
                failure = Some(CliError::BatteryFailed(
                    "certification battery failed".into(),
                ));
            }
        }
        _ => unreachable!("clap rejects unknown commands"),
    }
    let manifest = Manifest {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        config: config.values(),
        threads,
        wall_seconds: start.elapsed().as_secs_f64(),
        outputs: &out.files,
    };
    std::fs::write(
        out.dir().join("manifest.json"),
        heislab::io::to_json_string(&manifest)?,
    )?;
    for f in &out.files {
        eprintln!("wrote {}", out.dir().join(f).display());
    }
    failure.map_or(Ok(()), Err)
}
