pub mod ekey;
pub mod keyfile;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chaoscrack::attack::{probe_count, run_attack_traced};
use chaoscrack::imageio::{read_ppm, write_ppm};
use chaoscrack::{break_ciphertext, decrypt, encrypt, ColourImage, DifferenceParams, Error, KeyedOracle, SecretKey};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use report::{AmbiguityEvent, AttackReport, Difference, Stages, Status, TimingsMs};

/// Retry pair used once when the requested difference leaves a step ambiguous.
pub const FALLBACK: (u8, u8) = (63, 0);

#[derive(Debug, Parser)]
#[command(name = "chaoscrack", version, about = "Logistic-map colour image cipher and its chosen-plaintext break")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random secret key.
    Keygen {
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Encrypt(CipherArgs),
    Decrypt(CipherArgs),
    /// Recover an equivalent key by querying an in-process oracle holding `--key`.
    Attack {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long, default_value_t = 127)]
        d1: u8,
        #[arg(long, default_value_t = 0)]
        d2: u8,
        /// JSON report path; stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Directory receiving the equivalent key files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt with an equivalent key directory.
    Break {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct CipherArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    let (m, n) = (parse(m)?, parse(n)?);
    if m == 0 || n == 0 {
        return Err(format!("dimensions must be nonzero, got {m}x{n}"));
    }
    Ok((m, n))
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .with_context(|| format!("{} has no file name", path.display()))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn load_key(path: &Path) -> Result<SecretKey> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    keyfile::parse_key(&text).with_context(|| format!("key file {}", path.display()))
}

pub fn load_image(path: &Path) -> Result<ColourImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_ppm(&bytes).with_context(|| format!("image {}", path.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen { seed, out } => {
            let mut rng = match seed {
                Some(s) => ChaCha8Rng::seed_from_u64(s),
                None => ChaCha8Rng::from_entropy(),
            };
            let text = keyfile::format_key(&keyfile::generate_key(&mut rng));
            match out {
                Some(path) => write_atomic(&path, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Encrypt(a) => {
            let c = encrypt(&load_image(&a.input)?, &load_key(&a.key)?)?;
            write_atomic(&a.out, &write_ppm(&c))
        }
        Command::Decrypt(a) => {
            let p = decrypt(&load_image(&a.input)?, &load_key(&a.key)?)?;
            write_atomic(&a.out, &write_ppm(&p))
        }
        Command::Attack { key, dims, d1, d2, report, out } => {
            cmd_attack(&load_key(&key)?, dims, (d1, d2), report.as_deref(), &out)
        }
        Command::Break { key, input, out } => {
            let ek = ekey::load(&key).with_context(|| format!("equivalent key {}", key.display()))?;
            let plain = break_ciphertext(&load_image(&input)?, &ek)?;
            write_atomic(&out, &write_ppm(&plain))
        }
    }
}

fn stages_for(err: &Error) -> Stages {
    use Status::*;
    match err {
        Error::AmbiguousChannel { .. } => Stages { selector: Ambiguous, keystream: Skipped, posmap: Skipped },
        Error::NotABijection(_) => Stages { selector: Ok, keystream: Ok, posmap: Failed },
        _ => Stages { selector: Failed, keystream: Skipped, posmap: Skipped },
    }
}

fn difference(p: &DifferenceParams) -> Difference {
    Difference { d1: p.d1(), d2: p.d2(), d: p.difference(), period: p.period() }
}

pub fn cmd_attack(
    key: &SecretKey,
    (rows, cols): (usize, usize),
    (d1, d2): (u8, u8),
    report_path: Option<&Path>,
    out_dir: &Path,
) -> Result<()> {
    if rows > u16::MAX as usize || cols > u16::MAX as usize {
        bail!("dimensions {rows}x{cols} exceed the equivalent key header range");
    }
    let mut oracle = KeyedOracle::new(key, rows, cols)?;
    let mut params = DifferenceParams::new(d1, d2)?;
    let mut report = AttackReport {
        dims: [rows, cols],
        queries: 0,
        oracle_queries: 0,
        expected_queries: 2 + probe_count(3 * rows * cols),
        difference: difference(&params),
        stages: Stages { selector: Status::Skipped, keystream: Status::Skipped, posmap: Status::Skipped },
        ambiguity: Vec::new(),
        outputs: Vec::new(),
        timings_ms: TimingsMs::default(),
        error: None,
    };

    let mut retried = false;
    let outcome = loop {
        report.difference = difference(&params);
        match run_attack_traced(&mut oracle, &params) {
            Ok(trace) => break Ok(trace),
            Err(err) => {
                report.stages = stages_for(&err);
                if let Error::AmbiguousChannel { step, candidates } = &err {
                    report.ambiguity.push(AmbiguityEvent {
                        d1: params.d1(),
                        d2: params.d2(),
                        step: *step,
                        candidates: candidates.clone(),
                    });
                    if !retried && (params.d1(), params.d2()) != FALLBACK {
                        retried = true;
                        params = DifferenceParams::new(FALLBACK.0, FALLBACK.1)?;
                        continue;
                    }
                }
                break Err(err);
            }
        }
    };
    report.oracle_queries = oracle.queries();

    let result = match outcome {
        Ok(trace) => {
            report.queries = trace.queries;
            report.stages = Stages { selector: Status::Ok, keystream: Status::Ok, posmap: Status::Ok };
            let t = &trace.timings;
            report.timings_ms = TimingsMs::from_stages(t.selector, t.keystream, t.posmap);
            ekey::save(out_dir, &trace.key).map(|paths| {
                report.outputs = paths.iter().map(|p| p.display().to_string()).collect();
            })
        }
        Err(err) => {
            let steps: Vec<usize> = report.ambiguity.iter().map(|a| a.step).collect();
            if steps.is_empty() {
                Err(anyhow::Error::new(err))
            } else {
                Err(anyhow::anyhow!("selector recovery ambiguous at l = {steps:?}"))
            }
        }
    };
    if let Err(e) = &result {
        report.error = Some(format!("{e:#}"));
    }

    let json = serde_json::to_string_pretty(&report)? + "\n";
    match report_path {
        Some(path) => {
            if let Err(e) = write_atomic(path, json.as_bytes()) {
                return result.and(Err(e));
            }
        }
        None => print!("{json}"),
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        assert_eq!(parse_dims("512x512"), Ok((512, 512)));
        assert_eq!(parse_dims("3X7"), Ok((3, 7)));
        assert!(parse_dims("0x4").is_err());
        assert!(parse_dims("4").is_err());
        assert!(parse_dims("ax4").is_err());
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
