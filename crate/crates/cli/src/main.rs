//! `qmac`: verification pipelines for classical simulability of quantum
//! multiple access channels.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! usage or input errors.

mod pipelines;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qmac_core::families::{build_pbr_mac, build_polygon_mac, build_shift_mac, build_shift_mac_compact};
use qmac_core::mac::{validate_mac, Mac};
use qmac_core::witness::{classical_bound, polygon_witness, shift_witness, witness_value, Witness};

use pipelines::Options;
use report::{Section, VerificationReport};

#[derive(Parser, Debug)]
#[command(name = "qmac", version, about = "Verify classical simulability results for quantum multiple access channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance for comparisons against closed-form values.
    #[arg(long, global = true, default_value_t = pipelines::CLOSED_FORM_TOL)]
    tolerance: f64,

    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Print the JSON report on stdout instead of text.
    #[arg(long, global = true)]
    json_stdout: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-sender PBR channel: realization, compatible strategies, no-go analysis.
    Pbr {
        /// Also solve membership over all 65 536 deterministic strategies.
        #[arg(long)]
        full_columns: bool,
        /// Write the 48 compatible strategies, one per line.
        #[arg(long, value_name = "PATH")]
        export: Option<PathBuf>,
    },
    /// Polygon channels: witness bounds and quantum violations.
    Polygon {
        /// Number of polygon vertices (5..=9); all five when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(5..=9))]
        m: Option<u8>,
    },
    /// Three-sender SHIFT channel: cross-construction and witness separation.
    Shift {
        /// Also scan all 16^3 encoding tuples.
        #[arg(long)]
        full_encodings: bool,
    },
    /// Entanglement-assisted simulation by remote state preparation.
    Ea,
    /// Run every pipeline.
    VerifyAll {
        #[arg(long)]
        full_columns: bool,
        #[arg(long)]
        full_encodings: bool,
        /// Seed for the sampling demo.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append seeded shot-by-shot traces (not part of pass/fail).
        #[arg(long)]
        demo_sampling: bool,
    },
    /// Write a channel table to a file.
    ExportMac {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..))]
        m: Option<u8>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Read and validate a channel file.
    CheckMac {
        path: PathBuf,
    },
    /// Write a witness to a file.
    ExportWitness {
        #[arg(value_enum)]
        family: WitnessFamily,
        #[arg(long, value_parser = clap::value_parser!(u8).range(5..=9))]
        m: Option<u8>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Classical bound of a witness file, optionally compared with a channel file.
    Bound {
        witness: PathBuf,
        #[arg(long, value_name = "PATH")]
        mac: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Pbr,
    Polygon,
    Shift,
    ShiftCompact,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WitnessFamily {
    Polygon,
    Shift,
}

fn timed(report: &mut VerificationReport, f: impl FnOnce() -> qmac_core::Result<Section>) -> qmac_core::Result<()> {
    let start = Instant::now();
    let section = f()?;
    report.add(section, start.elapsed().as_millis());
    Ok(())
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn run(cli: &Cli) -> qmac_core::Result<VerificationReport> {
    let mut opts = Options { tolerance: cli.tolerance, ..Options::default() };
    let tol = ("tolerance", format!("{:e}", cli.tolerance));
    let report = match &cli.command {
        Command::Pbr { full_columns, export } => {
            opts.full_columns = *full_columns;
            opts.export = export.clone();
            let mut r = VerificationReport::new("pbr", params(&[tol, ("full_columns", full_columns.to_string())]));
            timed(&mut r, || pipelines::pbr(&opts))?;
            r
        }
        Command::Polygon { m } => {
            let ms: Vec<usize> = match m {
                Some(m) => vec![*m as usize],
                None => (5..=9).collect(),
            };
            let mut r = VerificationReport::new("polygon", params(&[tol, ("m", format!("{ms:?}"))]));
            timed(&mut r, || pipelines::polygon(&ms, &opts))?;
            r
        }
        Command::Shift { full_encodings } => {
            opts.full_encodings = *full_encodings;
            let mut r = VerificationReport::new("shift", params(&[tol, ("full_encodings", full_encodings.to_string())]));
            timed(&mut r, || pipelines::shift(&opts))?;
            r
        }
        Command::Ea => {
            let mut r = VerificationReport::new("ea", params(&[tol]));
            timed(&mut r, pipelines::ea)?;
            r
        }
        Command::VerifyAll { full_columns, full_encodings, seed, demo_sampling } => {
            opts.full_columns = *full_columns;
            opts.full_encodings = *full_encodings;
            let mut p = vec![
                tol,
                ("full_columns", full_columns.to_string()),
                ("full_encodings", full_encodings.to_string()),
            ];
            if *demo_sampling {
                p.push(("seed", seed.to_string()));
            }
            let mut r = VerificationReport::new("verify-all", params(&p));
            timed(&mut r, || pipelines::pbr(&opts))?;
            let all: Vec<usize> = (5..=9).collect();
            timed(&mut r, || pipelines::polygon(&all, &opts))?;
            timed(&mut r, || pipelines::shift(&opts))?;
            timed(&mut r, pipelines::ea)?;
            if *demo_sampling {
                r.demo = Some(pipelines::sampling_demo(*seed, 10_000)?);
            }
            r
        }
        Command::ExportMac { family, m, out } => {
            let mac = match family {
                Family::Pbr => build_pbr_mac(),
                Family::Polygon => build_polygon_mac(m.unwrap_or(5) as usize)?,
                Family::Shift => build_shift_mac(),
                Family::ShiftCompact => build_shift_mac_compact(),
            };
            std::fs::write(out, mac.to_file_string()?)?;
            let mut r = VerificationReport::new("export-mac", params(&[("out", out.display().to_string())]));
            let mut s = Section::new("export");
            s.push(report::Check::holds("written channel validates", validate_mac(&mac).is_valid(), report::Provenance::Computed));
            r.add(s, 0);
            r
        }
        Command::CheckMac { path } => {
            let text = std::fs::read_to_string(path)?;
            let mac = Mac::from_file_str(&text)?;
            let v = validate_mac(&mac);
            let mut r = VerificationReport::new("check-mac", params(&[("path", path.display().to_string())]));
            let mut s = Section::new("validation");
            s.push(report::Check::holds("channel is valid", v.is_valid(), report::Provenance::Computed));
            s.note(v.summary());
            r.add(s, 0);
            r
        }
        Command::ExportWitness { family, m, out } => {
            let w = match family {
                WitnessFamily::Polygon => polygon_witness(m.unwrap_or(5) as usize)?,
                WitnessFamily::Shift => shift_witness(),
            };
            std::fs::write(out, w.to_file_string()?)?;
            let mut r = VerificationReport::new("export-witness", params(&[("out", out.display().to_string())]));
            let mut s = Section::new("export");
            s.note(format!("witness {} written", w.id()));
            r.add(s, 0);
            r
        }
        Command::Bound { witness, mac } => {
            let w = Witness::from_file_str(&std::fs::read_to_string(witness)?)?;
            let mut r = VerificationReport::new("bound", params(&[("witness", w.id().to_string())]));
            let start = Instant::now();
            let mut s = Section::new("bound");
            let (bound, arg) = classical_bound(&w)?;
            s.certificate("classical_bound", serde_json::json!(bound.to_string()));
            s.certificate("maximizer", serde_json::json!(arg.to_string()));
            if let Some(path) = mac {
                let channel = Mac::from_file_str(&std::fs::read_to_string(path)?)?;
                let value = witness_value(&w, &channel)?;
                s.certificate("channel_value", serde_json::json!(value));
                let bound_f = num_traits::ToPrimitive::to_f64(&bound).unwrap_or(f64::NAN);
                s.note(if value > bound_f + qmac_core::witness::VIOLATION_MARGIN {
                    "the channel violates the classical bound"
                } else {
                    "the channel respects the classical bound"
                });
            }
            r.add(s, start.elapsed().as_millis());
            r
        }
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.json_stdout {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
