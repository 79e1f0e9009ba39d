use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mbqc::graph::{emit_diagram, DiagramFormat};
use mbqc::owqc::{self, MeasurementPattern, Variant};
use mbqc::tqc::{self, CzStyle, SingleStyle};
use mbqc::verify::{self, Scheme, VerificationReport};
use mbqc::{Circuit, CycleForm};

#[derive(Parser)]
#[command(name = "mbqc", version, about = "Compile circuits to measurement-only schedules and verify them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the compiled schedule or pattern.
    Compile(CompileArgs),
    /// Check compiled schemes against direct circuit evolution.
    Verify(VerifyArgs),
    /// Draw the substrate graph of a one-way scheme.
    Diagram(DiagramArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Ascii,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SingleArg {
    Z,
    X,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CzArg {
    OneAncilla,
    TwoAncilla,
}

#[derive(Args)]
struct Common {
    /// tqc-full, tqc-pseudo, tg, remote1, remote2, cancel, route or all.
    #[arg(long, default_value = "all")]
    scheme: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    common: Common,
    /// Teleportation style of single-qubit gates in full TQC.
    #[arg(long, value_enum, default_value = "z")]
    single: SingleArg,
    /// CZ style in full TQC.
    #[arg(long, value_enum, default_value = "one-ancilla")]
    cz: CzArg,
    /// Also emit the cluster lattice and deletion set (remote1, remote2).
    #[arg(long)]
    emit_cluster: bool,
    circuit: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Enumerate every branch of a fragment, e.g. `primitive:xtcz4`.
    #[arg(long)]
    branches: Option<String>,
    /// Tabulate resource counts against their closed forms.
    #[arg(long)]
    resources: bool,
    #[arg(long, requires = "resources")]
    n: Option<usize>,
    #[arg(long, requires = "resources")]
    m: Option<usize>,
    circuit: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramArgs {
    #[command(flatten)]
    common: Common,
    circuit: PathBuf,
}

/// Failure class, mapped to the exit status.
enum Failure {
    Verification,
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn read_circuit(path: &PathBuf) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Circuit::parse(&text).map_err(|e| anyhow!("{}:{}: {}", path.display(), e.line, e.message))
}

fn write_out(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn schemes(s: &str) -> Result<Vec<Scheme>> {
    Ok(Scheme::select(s)?)
}

fn pattern_for(c: &Circuit, v: Variant) -> Result<MeasurementPattern> {
    Ok(owqc::compile_pattern(&CycleForm::from_circuit(c), v)?)
}

fn diagram_text(p: &MeasurementPattern, format: Format) -> Result<String> {
    let d = owqc::diagram(p);
    match format {
        Format::Dot | Format::Text => Ok(emit_diagram(&d, DiagramFormat::Dot)),
        Format::Ascii => Ok(emit_diagram(&d, DiagramFormat::Ascii)),
        Format::Json => {
            let vertices: Vec<_> = d
                .labels
                .iter()
                .map(|(v, l)| serde_json::json!({ "vertex": v.to_string(), "label": l, "note": d.notes.get(v) }))
                .collect();
            let edges: Vec<_> = d.edges.iter().map(|(a, b, s)| serde_json::json!([a.to_string(), b.to_string(), s])).collect();
            let deps: Vec<_> = d.deps.iter().map(|(a, b)| serde_json::json!([a.to_string(), b.to_string()])).collect();
            let doc = serde_json::json!({ "vertices": vertices, "edges": edges, "deps": deps });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}

fn cluster_text(c: &Circuit, v: Variant) -> Result<String> {
    let (scheme, _) = owqc::compile_universal(&CycleForm::from_circuit(c), v)?;
    let e = owqc::embed_in_cluster(&scheme)?;
    let mut out = format!(
        "# cluster {} rows_per_wire={} cols_per_cycle={} qubits_per_wire_per_cycle={}\n",
        v.name(),
        scheme.rows_per_wire,
        scheme.cols_per_cycle,
        scheme.cost_per_wire_per_cycle()
    );
    out += &format!("lattice vertices={} edges={}\n", e.lattice.num_vertices(), e.lattice.num_edges());
    for d in &e.deletions {
        out += &format!("delete {d}\n");
    }
    Ok(out)
}

fn cmd_compile(a: &CompileArgs) -> Result<String> {
    let c = read_circuit(&a.circuit)?;
    let single = match a.single {
        SingleArg::Z => SingleStyle::ZTeleport,
        SingleArg::X => SingleStyle::XTeleport,
    };
    let cz = match a.cz {
        CzArg::OneAncilla => CzStyle::OneAncilla,
        CzArg::TwoAncilla => CzStyle::TwoAncilla,
    };
    let mut out = String::new();
    for scheme in schemes(&a.common.scheme)? {
        match scheme {
            Scheme::TqcFull | Scheme::TqcPseudo => {
                let s = if scheme == Scheme::TqcFull { tqc::compile_full(&c, single, cz)? } else { tqc::compile_pseudo(&c)? };
                match a.common.format {
                    Format::Text => out += &tqc::dump(&s),
                    Format::Json => out += &(serde_json::to_string_pretty(&s.resources)? + "\n"),
                    Format::Dot | Format::Ascii => bail!("{scheme} has no diagram; use text or json"),
                }
            }
            Scheme::OneWay(v) => {
                let p = pattern_for(&c, v)?;
                match a.common.format {
                    Format::Text => {
                        out += &owqc::dump(&p);
                        out += &diagram_text(&p, Format::Dot)?;
                    }
                    Format::Json => out += &(serde_json::to_string_pretty(&p)? + "\n"),
                    f => out += &diagram_text(&p, f)?,
                }
                if a.emit_cluster {
                    if !matches!(v, Variant::RemoteI | Variant::RemoteII) {
                        bail!("--emit-cluster applies to remote1 and remote2 only");
                    }
                    out += &cluster_text(&c, v)?;
                }
            }
        }
    }
    Ok(out)
}

fn render(reports: &[VerificationReport], format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(reports.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n")),
        Format::Json => Ok(serde_json::to_string_pretty(reports)? + "\n"),
        Format::Dot | Format::Ascii => bail!("verification reports are text or json"),
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<(String, bool)> {
    let mut reports = Vec::new();
    if a.resources {
        let rows = match (a.n, a.m) {
            (Some(n), Some(m)) => {
                if n == 0 || (n == 1 && m > 0) {
                    bail!("need n >= 2 for m > 0 CZ gates");
                }
                let mut rows = verify::schedule_resources(n, m)?;
                rows.extend(verify::fixed_resources()?);
                rows
            }
            (None, None) => verify::assert_resources(4, 5)?,
            _ => bail!("--n and --m go together"),
        };
        reports.push(verify::resource_report(rows));
    }
    if let Some(spec) = &a.branches {
        let name = spec.strip_prefix("primitive:").ok_or_else(|| anyhow!("--branches expects primitive:NAME"))?;
        reports.push(verify::verify_primitive(name, 20, a.seed)?);
    }
    if let Some(path) = &a.circuit {
        let c = read_circuit(path)?;
        for scheme in schemes(&a.common.scheme)? {
            reports.push(verify::verify_random(&c, scheme, a.trials as usize, a.seed)?);
        }
    }
    if reports.is_empty() {
        bail!("nothing to verify: give a circuit, --branches or --resources");
    }
    let ok = reports.iter().all(|r| r.passed);
    Ok((render(&reports, a.common.format)?, ok))
}

fn cmd_diagram(a: &DiagramArgs) -> Result<String> {
    let c = read_circuit(&a.circuit)?;
    let format = if a.common.format == Format::Text { Format::Ascii } else { a.common.format };
    let mut out = String::new();
    for scheme in schemes(&a.common.scheme)? {
        match scheme {
            Scheme::OneWay(v) => out += &diagram_text(&pattern_for(&c, v)?, format)?,
            _ if a.common.scheme == "all" => continue,
            s => bail!("{s} has no substrate graph"),
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let result = match &cli.command {
        Command::Compile(a) => cmd_compile(a).and_then(|t| write_out(&a.common.output, &t)),
        Command::Diagram(a) => cmd_diagram(a).and_then(|t| write_out(&a.common.output, &t)),
        Command::Verify(a) => {
            let (text, ok) = cmd_verify(a)?;
            write_out(&a.common.output, &text)?;
            eprintln!("wall time {:.3?}", started.elapsed());
            if !ok {
                return Err(Failure::Verification);
            }
            Ok(())
        }
    };
    Ok(result?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
