use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtrace::eisenstein::{FRoute, Family, Perturbation, RankRoute, SeriesFamily};
use qtrace::partitions::{crank_counts_gf, rank_counts_table};
use qtrace::relations::{default_generators, find_relations, Generator};
use qtrace::verify::{run_checks, CheckParams, CheckReport, CATALOG};
use qtrace::QSeries;

#[derive(Parser)]
#[command(name = "qtrace", version, about = "Exact q-series for rank and crank moments and Eisenstein-type series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficients of one series.
    Coeffs(CoeffsArgs),
    /// Run identity checks.
    Verify(VerifyArgs),
    /// Search for polynomial relations of one weight.
    Relations(RelationsArgs),
    /// Print several members of a family side by side, or N(m,n)/M(m,n) counts.
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Object {
    F,
    #[value(name = "g")]
    SmallG,
    #[value(name = "g_general")]
    GGeneral,
    #[value(name = "G")]
    BigG,
    #[value(name = "R")]
    Rank,
    #[value(name = "C")]
    Crank,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableObject {
    F,
    #[value(name = "g")]
    SmallG,
    #[value(name = "G")]
    BigG,
    #[value(name = "R")]
    Rank,
    #[value(name = "C")]
    Crank,
    /// Rank counts N(m,n).
    #[value(name = "N")]
    RankCounts,
    /// Crank counts M(m,n), generating-function convention.
    #[value(name = "M")]
    CrankCounts,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FRouteArg {
    Log,
    Recursion1,
    Recursion2,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankRouteArg {
    Auto,
    Brute,
    Formula,
}

#[derive(Args)]
struct SeriesOptions {
    /// Truncation order: coefficients of q^e for e < ORDER are exact.
    #[arg(long, env = "QTRACE_ORDER", default_value_t = 20)]
    order: i64,
    /// Construction of f_k.
    #[arg(long, value_enum, default_value = "log")]
    f_route: FRouteArg,
    /// Construction of R_k.
    #[arg(long, value_enum, default_value = "auto")]
    rank_route: RankRouteArg,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long, value_enum)]
    object: Object,
    /// Index (weight) of the series.
    #[arg(long)]
    k: u32,
    /// First parameter of g_general.
    #[arg(long)]
    a: Option<u32>,
    /// Second parameter of g_general.
    #[arg(long)]
    b: Option<u32>,
    #[command(flatten)]
    series: SeriesOptions,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check to run; repeat for several.
    #[arg(long = "check", value_name = "NAME")]
    checks: Vec<String>,
    /// Run the whole catalog.
    #[arg(long)]
    all: bool,
    /// List the catalog and exit.
    #[arg(long)]
    list: bool,
    /// Override every selected check's q-order.
    #[arg(long, env = "QTRACE_VERIFY_ORDER")]
    order: Option<i64>,
    /// Override every selected check's weight bound.
    #[arg(long, env = "QTRACE_MAX_WEIGHT")]
    max_weight: Option<usize>,
    /// Seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Fault injection: add DELTA to the q^EXP coefficient of a series
    /// before checking, given as FAMILY:INDEX:EXP:DELTA with FAMILY one of
    /// f, g, G, R, C (for example G:4:5:1).
    #[arg(long, value_name = "SPEC", value_parser = parse_perturbation)]
    perturb: Vec<Perturbation>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RelationsArgs {
    /// Even weight of the monomials.
    #[arg(long)]
    weight: u32,
    #[arg(long, env = "QTRACE_ORDER")]
    order: i64,
    /// Comma-separated generators such as f_2,f_4,G_4. Defaults to
    /// f_2..f_{max-f} with G_2, G_4, G_6.
    #[arg(long, value_delimiter = ',')]
    generators: Vec<String>,
    /// Largest f index in the default generator set.
    #[arg(long, default_value_t = 12)]
    max_f: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    object: TableObject,
    /// Largest index to include.
    #[arg(long, default_value_t = 8)]
    max_k: u32,
    #[command(flatten)]
    series: SeriesOptions,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coeffs(a) => coeffs(a),
        Command::Verify(a) => verify(a),
        Command::Relations(a) => relations(a),
        Command::Table(a) => table(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn sink(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn f_route(r: FRouteArg) -> FRoute {
    match r {
        FRouteArg::Log => FRoute::Log,
        FRouteArg::Recursion1 => FRoute::Recursion1,
        FRouteArg::Recursion2 => FRoute::Recursion2,
    }
}

fn rank_route(r: RankRouteArg) -> RankRoute {
    match r {
        RankRouteArg::Auto => RankRoute::Auto,
        RankRouteArg::Brute => RankRoute::Brute,
        RankRouteArg::Formula => RankRoute::Formula,
    }
}

fn family(object: Object, a: Option<u32>, b: Option<u32>) -> Result<Family, Failure> {
    if !matches!(object, Object::GGeneral) && (a.is_some() || b.is_some()) {
        return Err(usage("--a/--b only apply to g_general"));
    }
    Ok(match object {
        Object::F => Family::F,
        Object::SmallG => Family::SmallG,
        Object::GGeneral => match (a, b) {
            (Some(a), Some(b)) => Family::GGeneral { a, b },
            _ => return Err(usage("g_general needs --a and --b")),
        },
        Object::BigG => Family::G,
        Object::Rank => Family::RankMoment,
        Object::Crank => Family::CrankMoment,
    })
}

fn compute(fam: Family, k: u32, opts: &SeriesOptions) -> Result<QSeries, Failure> {
    if opts.order < 1 {
        return Err(usage(format!("--order must be at least 1, got {}", opts.order)));
    }
    SeriesFamily::compute(fam, k, opts.order, rank_route(opts.rank_route), f_route(opts.f_route))
        .map(|s| s.value)
        .map_err(usage)
}

fn coeffs(args: CoeffsArgs) -> Result<bool, Failure> {
    let fam = family(args.object, args.a, args.b)?;
    let s = compute(fam, args.k, &args.series)?;
    let odd_zero = args.k % 2 == 1
        && matches!(
            fam,
            Family::F | Family::G | Family::SmallG | Family::RankMoment | Family::CrankMoment
        );
    if odd_zero {
        eprintln!("note: {fam}_{} is identically zero (odd index)", args.k);
    }
    let mut out = sink(&args.output)?;
    match args.format {
        Format::Json => writeln!(out, "{}", s.to_json_string())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["exponent", "coefficient"])?;
            for (e, c) in s.terms() {
                let exp = qtrace::Exponent::new(e, s.lattice());
                w.write_record([exp.to_string(), c.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            let rows: Vec<(String, String)> = s
                .terms()
                .map(|(e, c)| (qtrace::Exponent::new(e, s.lattice()).to_string(), c.to_string()))
                .collect();
            write_columns(&mut out, &["exponent", "coefficient"], rows.iter().map(|(a, b)| vec![a.clone(), b.clone()]))?;
            writeln!(out, "order {}", s.order())?;
        }
    }
    Ok(true)
}

fn write_columns(
    out: &mut dyn Write,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> io::Result<()> {
    let rows: Vec<Vec<String>> = rows.collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.iter().map(|s| s.to_string()).collect()))?;
    for r in rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<bool, Failure> {
    let mut out = sink(&args.output)?;
    if args.list {
        for c in CATALOG {
            let gate = if c.gating { "" } else { " (non-gating)" };
            writeln!(out, "{:<20} {}{gate}", c.name, c.summary)?;
        }
        return Ok(true);
    }
    if args.format == Format::Csv {
        return Err(usage("verify supports --format json or text"));
    }
    let names: Vec<&str> = if args.all {
        if !args.checks.is_empty() {
            return Err(usage("--all and --check are exclusive"));
        }
        CATALOG.iter().map(|c| c.name).collect()
    } else if args.checks.is_empty() {
        return Err(usage("give --check NAME or --all"));
    } else {
        args.checks.iter().map(String::as_str).collect()
    };
    let params = CheckParams {
        max_weight: args.max_weight,
        order: args.order,
        seed: args.seed,
        perturbations: args.perturb,
    };
    let mut reports = Vec::new();
    for r in run_checks(&names, &params) {
        reports.push(r.map_err(usage)?);
    }
    // with --all only gating checks decide the exit code
    let ok = reports.iter().all(|r| r.passed || (args.all && !r.gating));
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports).expect("serializable"))?,
        _ => write_reports(&mut out, &reports)?,
    }
    Ok(ok)
}

fn parse_perturbation(spec: &str) -> Result<Perturbation, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [fam, index, exp, delta] = parts[..] else {
        return Err(format!("expected FAMILY:INDEX:EXP:DELTA, got {spec:?}"));
    };
    let family = match fam {
        "f" => Family::F,
        "g" => Family::SmallG,
        "G" => Family::G,
        "R" => Family::RankMoment,
        "C" => Family::CrankMoment,
        _ => return Err(format!("unknown family {fam:?}")),
    };
    Ok(Perturbation {
        family,
        index: index.parse().map_err(|_| format!("bad index {index:?}"))?,
        exponent: exp.parse().map_err(|_| format!("bad exponent {exp:?}"))?,
        delta: delta.parse().map_err(|_| format!("bad rational {delta:?}"))?,
    })
}

fn write_reports(out: &mut dyn Write, reports: &[CheckReport]) -> io::Result<()> {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in reports {
        let verdict = match (r.passed, r.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-gating)",
        };
        let mut extent = Vec::new();
        if let Some(d) = r.verified_to.w_degree {
            extent.push(format!("w-degree {d}"));
        }
        if let Some(o) = &r.verified_to.q_order {
            extent.push(format!("q-order {o}"));
        }
        let c = r.verified_to.comparisons;
        extent.push(format!("{c} comparison{}", if c == 1 { "" } else { "s" }));
        writeln!(
            out,
            "{verdict:<4} {:<width$}  {}  [{:.0} ms]",
            r.name,
            extent.join(", "),
            r.elapsed_ms
        )?;
        if let Some(m) = &r.mismatch {
            let at = match m.w_degree {
                Some(d) => format!("w^{d} q^{}", m.exponent),
                None => m.exponent.clone(),
            };
            writeln!(out, "     {}: first mismatch at {at}: {} vs {}", m.comparison, m.left, m.right)?;
        }
        for n in &r.notes {
            writeln!(out, "     note: {n}")?;
        }
    }
    Ok(())
}

fn relations(args: RelationsArgs) -> Result<bool, Failure> {
    let gens: Vec<Generator> = if args.generators.is_empty() {
        default_generators(args.max_f)
    } else {
        args.generators
            .iter()
            .map(|s| s.parse().map_err(usage))
            .collect::<Result<_, _>>()?
    };
    let report = find_relations(args.weight, args.order, &gens).map_err(usage)?;
    let mut out = sink(&args.output)?;
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?,
        Format::Text => {
            writeln!(
                out,
                "weight {}, q-order {}, {} monomials in {}",
                report.weight,
                report.order,
                report.monomial_count(),
                report.generators.join(", ")
            )?;
            if report.nullspace.is_empty() {
                writeln!(out, "no relation visible to q-order {}", report.order)?;
            }
            for (i, v) in report.nullspace.iter().enumerate() {
                let terms: Vec<String> = v
                    .iter()
                    .zip(&report.monomials)
                    .filter(|(c, _)| c.as_str() != "0")
                    .map(|(c, m)| format!("({c})*{m}"))
                    .collect();
                writeln!(out, "relation {}: {} = 0", i + 1, terms.join(" + "))?;
            }
        }
        Format::Csv => return Err(usage("relations supports --format json or text")),
    }
    Ok(true)
}

fn table(args: TableArgs) -> Result<bool, Failure> {
    let order = args.series.order;
    if order < 1 {
        return Err(usage(format!("--order must be at least 1, got {order}")));
    }
    let mut out = sink(&args.output)?;
    let counts = match args.object {
        TableObject::RankCounts => Some(rank_counts_table(order as usize).map_err(usage)?),
        TableObject::CrankCounts => Some(crank_counts_gf(order as usize)),
        _ => None,
    };
    if let Some(lq) = counts {
        let mut rows = Vec::new();
        for n in 0..order as usize {
            for (m, c) in lq.counts(n) {
                rows.push(vec![n.to_string(), m.to_string(), c.to_string()]);
            }
        }
        return emit_rows(&mut out, args.format, &["n", "m", "count"], rows).map(|_| true);
    }
    let fam = match args.object {
        TableObject::F => Family::F,
        TableObject::SmallG => Family::SmallG,
        TableObject::BigG => Family::G,
        TableObject::Rank => Family::RankMoment,
        TableObject::Crank => Family::CrankMoment,
        _ => unreachable!(),
    };
    let first = if fam == Family::G { 1 } else { 0 };
    let ks: Vec<u32> = (first..=args.max_k).filter(|k| k % 2 == 0).collect();
    let series: Vec<QSeries> = ks
        .iter()
        .map(|&k| compute(fam, k, &args.series))
        .collect::<Result<_, _>>()?;
    let mut header = vec!["exponent".to_string()];
    header.extend(ks.iter().map(|k| format!("{fam}_{k}")));
    let rows: Vec<Vec<String>> = (0..order)
        .map(|e| {
            let mut r = vec![e.to_string()];
            r.extend(series.iter().map(|s| s.coeff(e).to_string()));
            r
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    emit_rows(&mut out, args.format, &header, rows)?;
    Ok(true)
}

fn emit_rows(out: &mut dyn Write, format: Format, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), Failure> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for r in rows {
                w.write_record(&r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .into_iter()
                .map(|r| {
                    serde_json::Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| (h.to_string(), serde_json::Value::String(c)))
                            .collect(),
                    )
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&objs).expect("serializable"))?;
        }
        Format::Text => write_columns(out, header, rows.into_iter())?,
    }
    Ok(())
}
