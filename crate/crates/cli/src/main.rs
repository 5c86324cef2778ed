// SPDX-License-Identifier: Apache-2.0

//! `rnl`: build, measure, simulate and verify reversible flip-flops and counters.

use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use revcounter::generators::{
    build_clocked_t_ff, build_counter, build_ms_t_ff, build_t_ff, ClockedVariant,
};
use revcounter::report::{render_tables, scaling, scaling_csv};
use revcounter::sequential::{flatten, run_traced};
use revcounter::verify::{check_decompositions, check_reversible_named, check_theorems};
use revcounter::{
    parse, serialize, CostReport, CounterMode, CounterSpec, Design, SequentialCircuit,
    VerificationReport,
};

#[derive(Parser)]
#[command(
    name = "rnl",
    version,
    about = "Reversible flip-flop and counter toolkit"
)]
#[command(after_help = "Set RNL_COLOR=0 to disable colored output.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a design, print its cost and optionally write it to a file.
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Counter width; only for --kind counter.
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        bits: Option<u16>,
        /// Counter clocking; only for --kind counter.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print gate count, quantum cost, delay, garbage and constants of a file.
    Cost {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = CostFormat::Text)]
        format: CostFormat,
    },
    /// Apply clock pulses and print the state after each one.
    ///
    /// Each line is the pulse index followed by the state in binary, most
    /// significant stage on the left. Line 0 is the initial state.
    Sim {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        pulses: u64,
        /// Also list the stages that fired during each pulse.
        #[arg(long)]
        trace: bool,
    },
    /// Run exhaustive checks; exits 1 if any check fails.
    Verify {
        /// Compare every counter up to --max-bits with the closed-form costs.
        #[arg(long, requires = "max_bits", conflicts_with_all = ["exhaustive", "gates", "path"])]
        theorems: bool,
        #[arg(long, requires = "theorems")]
        max_bits: Option<usize>,
        /// Check that the file's core is injective over all free inputs.
        #[arg(long, requires = "path", conflicts_with = "gates")]
        exhaustive: bool,
        path: Option<PathBuf>,
        /// Check every builtin gate and its quantum decomposition.
        #[arg(long)]
        gates: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Print the comparison tables or the counter scaling sweep.
    Report {
        #[arg(long, conflicts_with = "scaling", required_unless_present = "scaling")]
        tables: bool,
        #[arg(long, requires = "max_bits")]
        scaling: bool,
        #[arg(long, requires = "scaling")]
        max_bits: Option<usize>,
        /// Restrict the scaling sweep to one mode.
        #[arg(long, value_enum, requires = "scaling")]
        mode: Option<Mode>,
        #[arg(long, value_enum, default_value_t = ScalingFormat::Csv, requires = "scaling")]
        format: ScalingFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tff,
    CtffA,
    CtffB,
    Mstff,
    Counter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Async,
    Sync,
}

impl From<Mode> for CounterMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Async => CounterMode::Async,
            Mode::Sync => CounterMode::Sync,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CostFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingFormat {
    Csv,
    Json,
}

fn color_enabled() -> bool {
    std::env::var("RNL_COLOR").map_or(true, |v| v != "0") && io::stdout().is_terminal()
}

fn load(path: &Path) -> Result<Design> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))
}

fn synth(kind: Kind, bits: Option<u16>, mode: Option<Mode>, out: Option<&Path>) -> Result<String> {
    let circuit: SequentialCircuit = match kind {
        Kind::Tff => build_t_ff(),
        Kind::CtffA => build_clocked_t_ff(ClockedVariant::A),
        Kind::CtffB => build_clocked_t_ff(ClockedVariant::B),
        Kind::Mstff => build_ms_t_ff(),
        Kind::Counter => {
            let (bits, mode) = (bits.expect("checked"), mode.expect("checked"));
            build_counter(CounterSpec::new(bits.into(), mode.into())?)?
        }
    };
    let report = CostReport::of(circuit.core());
    if let Some(path) = out {
        let text = serialize(&Design::Sequential(circuit));
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(format!("{report}\n"))
}

fn cost(path: &Path, format: CostFormat) -> Result<String> {
    let design = load(path)?;
    let report = CostReport::of(design.netlist());
    Ok(match format {
        CostFormat::Text => format!("{report}\n"),
        CostFormat::Csv => format!("{}\n{}\n", CostReport::CSV_HEADER, report.csv_row()),
        CostFormat::Json => format!("{}\n", serde_json::to_string(&report)?),
    })
}

fn sim(path: &Path, pulses: u64, trace: bool) -> Result<String> {
    let Design::Sequential(circuit) = load(path)? else {
        anyhow::bail!(
            "{} is not sequential: it has no .stage directives",
            path.display()
        );
    };
    let (states, traces) = run_traced(&circuit, pulses);
    let mut out = String::new();
    for (i, state) in states.iter().enumerate() {
        out.push_str(&format!("{i} {}", state.to_msb_string()));
        if trace && i > 0 {
            let fired: Vec<String> = traces[i - 1]
                .fired
                .iter()
                .enumerate()
                .filter(|(_, f)| **f)
                .map(|(s, _)| s.to_string())
                .collect();
            let fired = if fired.is_empty() {
                "-".to_string()
            } else {
                fired.join(",")
            };
            out.push_str(&format!(" fired={fired}"));
        }
        out.push('\n');
    }
    Ok(out)
}

fn render(report: &VerificationReport, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => format!("{}\n", serde_json::to_string_pretty(report)?),
        ReportFormat::Text if color_enabled() => {
            let text = report.to_string();
            let text = text
                .replace("  PASS ", "  \x1b[32mPASS\x1b[0m ")
                .replace("  FAIL ", "  \x1b[31mFAIL\x1b[0m ");
            format!("{text}\n")
        }
        ReportFormat::Text => format!("{report}\n"),
    })
}

fn usage_error(kind: clap::error::ErrorKind, msg: &str) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut passed = true;
    let result = match cli.command {
        Command::Synth {
            kind,
            bits,
            mode,
            out,
        } => {
            let counter = matches!(kind, Kind::Counter);
            if counter && (bits.is_none() || mode.is_none()) {
                usage_error(
                    clap::error::ErrorKind::MissingRequiredArgument,
                    "--kind counter requires --bits and --mode",
                );
            }
            if !counter && (bits.is_some() || mode.is_some()) {
                usage_error(
                    clap::error::ErrorKind::ArgumentConflict,
                    "--bits and --mode only apply to --kind counter",
                );
            }
            synth(kind, bits, mode, out.as_deref())
        }
        Command::Cost { path, format } => cost(&path, format),
        Command::Sim {
            path,
            pulses,
            trace,
        } => sim(&path, pulses, trace),
        Command::Verify {
            theorems,
            max_bits,
            exhaustive,
            path,
            gates,
            format,
        } => {
            let report = if theorems {
                check_theorems(max_bits.expect("required by clap")).map_err(anyhow::Error::from)
            } else if gates {
                Ok(check_decompositions())
            } else if exhaustive {
                let path = path.expect("required by clap");
                load(&path).and_then(|d| {
                    let core = match &d {
                        Design::Sequential(c) => flatten(c),
                        Design::Combinational(n) => n.clone(),
                    };
                    Ok(check_reversible_named(&core, &path.display().to_string())?)
                })
            } else {
                usage_error(
                    clap::error::ErrorKind::MissingRequiredArgument,
                    "choose one of --theorems, --exhaustive or --gates",
                );
            };
            report.and_then(|r| {
                passed = r.all_passed();
                render(&r, format)
            })
        }
        Command::Report {
            tables,
            scaling: _,
            max_bits,
            mode,
            format,
        } => {
            if tables {
                Ok(render_tables())
            } else {
                let rows = scaling(max_bits.expect("required by clap"), mode.map(Into::into));
                match format {
                    ScalingFormat::Csv => Ok(scaling_csv(&rows)),
                    ScalingFormat::Json => serde_json::to_string_pretty(&rows)
                        .map(|s| s + "\n")
                        .map_err(Into::into),
                }
            }
        }
    };
    match result {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
