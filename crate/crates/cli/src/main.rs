use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cohtaylor::analytic::{fun_apply, Vector};
use cohtaylor::lang::{AnyMorphism, Session};
use cohtaylor::laws::{run_suite, tally, CheckReport, Params, Suite};
use cohtaylor::{Bounds, Error, ModelKind, Semiring, SemiringId};

#[derive(Parser)]
#[command(name = "cohtaylor", version, about = "Exact Taylor expansion in quantitative models of linear logic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// rel, wrel-bool, wrel-nat, wrel-rat, wcs, coh, nucs or pcoh
    #[arg(long, global = true, env = "COHTAYLOR_DEFAULT_MODEL", default_value = "rel")]
    model: String,

    /// Scalar semiring for weighted relations: bool, nat or rat
    #[arg(long, global = true)]
    semiring: Option<String>,

    /// Largest multiset size d in exponential webs
    #[arg(long, global = true)]
    bang_degree: Option<usize>,

    /// Largest degree index D in summability webs
    #[arg(long, global = true)]
    s_degree: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Seed for law checks (default: seeds 0..25)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Skip the model validity check on results
    #[arg(long, global = true)]
    no_validate: bool,

    /// Report elapsed time per check
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a source file and print its last value
    Eval { file: PathBuf },
    /// Taylor expansion T(s) of the file's last value s : !X → Y
    Taylor { file: PathBuf },
    /// Degree-n homogeneous component of the file's last value
    Homog { file: PathBuf, n: usize },
    /// Evaluate the power series of the file's last value at a vector (JSON text or file)
    Fun { file: PathBuf, vector: String },
    /// Run law suites on a grid of models, webs, bounds and seeds
    Lawcheck {
        /// Suite name; repeatable (default: all)
        #[arg(long)]
        suite: Vec<String>,
        /// Base web size; repeatable (default: 1, 2, 3)
        #[arg(long)]
        web_size: Vec<usize>,
        /// Re-run each diagram with one more padding step
        #[arg(long)]
        audit: bool,
    },
    /// List the available models
    Models,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NotSummable(_) | Error::Invalid(_) | Error::BoundViolation(_)) => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let mut out = io::stdout().lock();
    match run(&cli, &matches, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn from_command_line(m: &ArgMatches, id: &str) -> bool {
    m.value_source(id) == Some(ValueSource::CommandLine)
}

fn model_of(cli: &Cli) -> anyhow::Result<ModelKind> {
    let model: ModelKind = cli.model.parse()?;
    let Some(sr) = &cli.semiring else { return Ok(model) };
    let sr: SemiringId = sr.parse()?;
    match model {
        ModelKind::Rel if sr == SemiringId::Bool => Ok(ModelKind::Rel),
        ModelKind::Rel | ModelKind::Wrel(_) => Ok(ModelKind::Wrel(sr)),
        m if m.semiring() == sr => Ok(m),
        m => Err(Error::ModelMismatch(format!("{m} uses {} scalars, not {sr}", m.semiring())).into()),
    }
}

fn session(cli: &Cli, m: &ArgMatches) -> anyhow::Result<Session> {
    let mut b = Bounds::default();
    if let Some(d) = cli.bang_degree {
        b = Bounds::new(d, b.s);
    }
    if let Some(s) = cli.s_degree {
        b.s = s;
    }
    if b.bang == 0 || b.s == 0 {
        bail!(Error::Type("degrees must be at least 1".into()));
    }
    let mut s = Session::new(model_of(cli)?, b);
    s.validate = !cli.no_validate;
    s.pins.model = from_command_line(m, "model") || cli.semiring.is_some();
    s.pins.bang_degree = cli.bang_degree.is_some();
    s.pins.s_degree = cli.s_degree.is_some();
    Ok(s)
}

/// Runs the file and binds its last value to `it`.
fn load(cli: &Cli, m: &ArgMatches, file: &Path) -> anyhow::Result<(Session, AnyMorphism)> {
    let src = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut s = session(cli, m)?;
    let value = s.run(&src)?.ok_or_else(|| Error::Type(format!("{} defines no morphism", file.display())))?;
    s.bind("it", value.clone());
    Ok((s, value))
}

fn run(cli: &Cli, m: &ArgMatches, out: &mut impl Write) -> anyhow::Result<u8> {
    match &cli.cmd {
        Cmd::Eval { file } => {
            let (_, v) = load(cli, m, file)?;
            print_morphism(out, cli.format, &v)?;
        }
        Cmd::Taylor { file } => {
            let (s, _) = load(cli, m, file)?;
            let t = s.eval_str("(taylor it)")?;
            print_morphism(out, cli.format, &t)?;
            if !s.taylor_agrees("it")? {
                eprintln!("error: the closed Taylor formula disagrees with the distributive-law composite");
                return Ok(4);
            }
        }
        Cmd::Homog { file, n } => {
            let (s, _) = load(cli, m, file)?;
            print_morphism(out, cli.format, &s.eval_str(&format!("(homog it {n})"))?)?;
        }
        Cmd::Fun { file, vector } => {
            let (_, v) = load(cli, m, file)?;
            let t = v.as_ratpos().ok_or_else(|| Error::Type("fun needs rational scalars (wrel-rat or pcoh)".into()))?;
            let x = t
                .dom()
                .bang_inner()
                .ok_or_else(|| Error::Type(format!("fun needs a power series !X → Y, found {} → {}", t.dom(), t.cod())))?;
            let text = if Path::new(vector).is_file() { std::fs::read_to_string(vector)? } else { vector.clone() };
            let json: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("vector: {e}")))?;
            let y = fun_apply(t, &Vector::from_json(x, &json)?)?;
            print_vector(out, cli.format, &y)?;
        }
        Cmd::Lawcheck { suite, web_size, audit } => return lawcheck(cli, m, suite, web_size, *audit, out),
        Cmd::Models => print_models(out, cli.format)?,
    }
    Ok(0)
}

fn lawcheck(
    cli: &Cli,
    m: &ArgMatches,
    suites: &[String],
    web_sizes: &[usize],
    audit: bool,
    out: &mut impl Write,
) -> anyhow::Result<u8> {
    let mut p = Params::default();
    if from_command_line(m, "model") || cli.semiring.is_some() {
        p.models = vec![model_of(cli)?];
    }
    if !web_sizes.is_empty() {
        p.web_sizes = web_sizes.to_vec();
    }
    if let Some(d) = cli.bang_degree {
        p.bang_degrees = vec![d];
    }
    if let Some(s) = cli.s_degree {
        p.s_degrees = vec![s];
    }
    if let Some(seed) = cli.seed {
        p.seeds = vec![seed];
    }
    p.audit = audit;
    p.timings = cli.timings;
    let suites: Vec<Suite> = if suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        suites.iter().map(|s| s.parse().map_err(|e: Error| anyhow!(e))).collect::<anyhow::Result<_>>()?
    };
    let mut reports = Vec::new();
    for s in suites {
        reports.extend(run_suite(s, &p));
    }
    print_reports(out, cli.format, &reports)?;
    let (_, failed) = tally(&reports);
    Ok(if failed > 0 { 4 } else { 0 })
}

// ------------------------------------------------------------ output

fn table(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |out: &mut dyn Write, cells: &mut dyn Iterator<Item = &str>| -> io::Result<()> {
        let mut s = String::new();
        for (i, c) in cells.enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            s.extend(std::iter::repeat_n(' ', widths[i].saturating_sub(c.chars().count())));
        }
        writeln!(out, "{}", s.trim_end())
    };
    line(out, &mut header.iter().copied())?;
    for r in rows {
        line(out, &mut r.iter().map(String::as_str))?;
    }
    Ok(())
}

fn csv_out(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn print_morphism(out: &mut impl Write, format: Format, m: &AnyMorphism) -> anyhow::Result<()> {
    let rows: Vec<Vec<String>> = m.entries_text().into_iter().map(|(p, q, c)| vec![p, q, c]).collect();
    let header = ["source", "target", "scalar"];
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&m.to_json())?)?,
        Format::Csv => csv_out(out, &header, &rows)?,
        Format::Table => {
            writeln!(out, "{} → {}  ({} entries)", m.dom(), m.cod(), m.len())?;
            table(out, &header, &rows)?;
        }
    }
    Ok(())
}

fn print_vector(out: &mut impl Write, format: Format, v: &Vector) -> anyhow::Result<()> {
    let rows: Vec<Vec<String>> = v.coords.iter().map(|(p, c)| vec![p.to_string(), c.encode()]).collect();
    let header = ["point", "scalar"];
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&v.to_json())?)?,
        Format::Csv => csv_out(out, &header, &rows)?,
        Format::Table => {
            writeln!(out, "vector on {}", v.web)?;
            table(out, &header, &rows)?;
        }
    }
    Ok(())
}

fn print_reports(out: &mut impl Write, format: Format, reports: &[CheckReport]) -> anyhow::Result<()> {
    let (passed, failed) = tally(reports);
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let detail = match (&r.counterexample, &r.note) {
                (Some(c), note) => format!(
                    "{} → {}: {} = {} but {} = {}{}",
                    c.source,
                    c.target,
                    c.lhs_path,
                    c.lhs,
                    c.rhs_path,
                    c.rhs,
                    note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
                ),
                (None, Some(n)) => n.clone(),
                (None, None) => String::new(),
            };
            let mut row = vec![
                if r.passed() { "PASS" } else { "FAIL" }.to_string(),
                r.suite.to_string(),
                r.check.clone(),
                r.config.to_string(),
                detail,
            ];
            if let Some(ms) = r.elapsed_ms {
                row.push(ms.to_string());
            }
            row
        })
        .collect();
    let mut header = vec!["status", "suite", "check", "config", "detail"];
    if reports.iter().any(|r| r.elapsed_ms.is_some()) {
        header.push("ms");
    }
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json!({"passed": passed, "failed": failed, "reports": reports}))?
        )?,
        Format::Csv => csv_out(out, &header, &rows)?,
        Format::Table => {
            table(out, &header, &rows)?;
            writeln!(out, "{passed} passed, {failed} failed")?;
        }
    }
    Ok(())
}

fn print_models(out: &mut impl Write, format: Format) -> anyhow::Result<()> {
    let rows: Vec<Vec<String>> = ModelKind::ALL
        .iter()
        .map(|m| vec![m.name().to_string(), m.semiring().name().to_string(), m.describe().to_string()])
        .collect();
    let header = ["model", "semiring", "description"];
    match format {
        Format::Json => {
            let v: Vec<Value> =
                rows.iter().map(|r| json!({"model": r[0], "semiring": r[1], "description": r[2]})).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => csv_out(out, &header, &rows)?,
        Format::Table => table(out, &header, &rows)?,
    }
    Ok(())
}
