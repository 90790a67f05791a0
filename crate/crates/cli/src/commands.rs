use std::fmt;
use std::io::Write;
use std::path::Path;

use heatwit_core::analytic::{katsura_heat_capacity, xx_internal_energy, xx_low_t_energy};
use heatwit_core::diag::spectrum;
use heatwit_core::eigencheck::{eigencheck_ising, EigencheckOptions, EigencheckReport, DEFAULT_SEED};
use heatwit_core::sepbound::{minimize_energy, minimize_variance};
use heatwit_core::spin_model::build_hamiltonian;
use heatwit_core::thermo::{default_grid, geometric_grid, thermo_from_spectrum};
use heatwit_core::witness::{
    critical_temperature_curve, evaluate_witness, witness_from_measurements, CurveSource, HeatCapacityCurve,
    Measurement, ValidityWindow, WitnessBound, WitnessReport,
};
use heatwit_core::{Error, ModelKind, ModelSpec, Spin};
use serde::Serialize;

use crate::output::{format_number, Envelope, Sink, Table, Units, SCHEMA_VERSION};
use crate::{BoundArg, Cli, Command, Figure, Format, GlobalArgs, GridArgs, ModelArgs, Which, WitnessArgs};

pub const THREADS_ENV: &str = "HEATWIT_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "invalid_arguments",
            CliError::Io(_) => "io",
            CliError::Core(e) => match e {
                Error::InvalidModel(_) => "invalid_model",
                Error::DimensionOverflow { .. } => "dimension_overflow",
                Error::EmptySpectrum => "empty_spectrum",
                Error::NonPositiveTemperature(_) => "nonpositive_temperature",
                Error::InvalidArgument(_) => "invalid_argument",
                Error::Quadrature { .. } => "quadrature",
                Error::Eigensolver => "eigensolver",
                Error::NotAProjector { .. } => "not_a_projector",
                Error::InvalidBound { .. } => "invalid_bound",
                Error::WeightNormalization { .. } => "weight_normalization",
            },
        }
    }

    /// One JSON object on stderr.
    pub fn report(&self) {
        let body = serde_json::json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        });
        eprintln!("{body}");
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

/// Sizes the global thread pool from `HEATWIT_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    if threads == 0 {
        return usage(format!("{THREADS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

struct Ctx<'a> {
    global: &'a GlobalArgs,
    units: Units,
}

impl Ctx<'_> {
    fn sink(&self) -> Sink<'_> {
        match &self.global.output {
            Some(p) => Sink::File(p),
            None => Sink::Stdout,
        }
    }

    fn seed(&self) -> u64 {
        self.global.seed.unwrap_or(0)
    }

    fn envelope<T: Serialize>(&self, kind: &str, data: T) -> Envelope<T> {
        Envelope {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            seed: self.seed(),
            units: self.units,
            data,
        }
    }

    fn write_json<T: Serialize>(&self, kind: &str, data: T, sink: Sink<'_>) -> Result<()> {
        let mut out = sink.open()?;
        serde_json::to_writer_pretty(&mut out, &self.envelope(kind, data))?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    fn write_table(&self, table: &Table) -> Result<()> {
        match self.global.format.unwrap_or(Format::Csv) {
            Format::Csv => {
                let mut out = self.sink().open()?;
                table.write_csv(&mut out)?;
                out.flush()?;
                Ok(())
            }
            Format::Json => self.write_json("table", table, self.sink()),
        }
    }

    fn k(&self) -> f64 {
        self.units.k
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let k = cli.global.boltzmann;
    if !(k > 0.0 && k.is_finite()) {
        return usage(format!("--k must be positive, got {k}"));
    }
    let coupling = match &cli.command {
        Command::Thermo { model, .. } | Command::Matrix { model } => model.coupling,
        Command::Witness(w) => w.model.coupling,
        Command::Sepbound { coupling, .. } | Command::Analytic { coupling, .. } | Command::Region { coupling, .. } => {
            *coupling
        }
        _ => 1.0,
    };
    let ctx = Ctx {
        global: &cli.global,
        units: Units { j: coupling, k },
    };
    match &cli.command {
        Command::Thermo { model, grid } => thermo(&ctx, model, grid),
        Command::Sepbound {
            model,
            field,
            field_range,
            field_points,
            coupling,
            period,
            restarts,
            spin,
        } => {
            let fields = sepbound_fields(field.as_deref(), field_range.as_deref(), *field_points)?;
            sepbound(&ctx, *model, &fields, *coupling, *period, *restarts, spin)
        }
        Command::Analytic {
            which,
            field,
            coupling,
            grid,
        } => analytic(&ctx, *which, *field, *coupling, grid),
        Command::Witness(args) => witness(&ctx, args),
        Command::Region {
            fields,
            coupling,
            tmin,
            tmax,
            points,
        } => {
            let fields = parse_range(fields)?;
            let grid = geometric_grid(*tmin * k / coupling.abs(), *tmax * k / coupling.abs(), *points)?;
            let table = region_table(&fields, *coupling, k, &grid)?;
            ctx.write_table(&table)
        }
        Command::Eigencheck {
            n,
            field,
            restarts,
            degeneracy_tol,
        } => eigencheck(&ctx, *n, *field, *restarts, *degeneracy_tol),
        Command::Repro { figure } => repro(&ctx, *figure),
        Command::Matrix { model } => matrix(&ctx, model),
        Command::Validate { input } => validate(input),
    }
}

fn model_spec(args: &ModelArgs) -> Result<ModelSpec> {
    let spin: Spin = args.spin.parse()?;
    let spec = match args.model {
        ModelKind::TransverseIsing => ModelSpec::ising(args.n, args.coupling, args.field),
        ModelKind::HeisenbergXxx => ModelSpec::xxx(args.n, args.coupling, spin),
        ModelKind::Xx => ModelSpec::xx(args.n, args.coupling),
    };
    spec.validate()?;
    Ok(spec)
}

/// Temperature grid in computation units (`k·T`).
fn core_grid(grid: &GridArgs, k: f64) -> Result<Vec<f64>> {
    let (lo, hi) = (grid.tmin * k, grid.tmax * k);
    Ok(match grid.points {
        Some(p) => geometric_grid(lo, hi, p)?,
        None => default_grid(lo, hi)?,
    })
}

/// `start:stop:count` (inclusive, evenly spaced) or a single value.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| -> Result<f64> {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Usage(format!("not a number: '{p}'")))
    };
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad point count in '{s}'")))?;
            linspace(a, b, n)
        }
        _ => usage(format!("expected VALUE or START:STOP:COUNT, got '{s}'")),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => usage("point count must be positive"),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

fn sepbound_fields(field: Option<&str>, range: Option<&str>, points: usize) -> Result<Vec<f64>> {
    match (field, range) {
        (Some(_), Some(_)) => usage("use either --B or --B-range"),
        (Some(f), None) => parse_range(f),
        (None, Some(r)) => {
            let parts: Vec<&str> = r.split(':').collect();
            if parts.len() != 2 {
                return usage(format!("--B-range expects START:STOP, got '{r}'"));
            }
            let ends = parse_range(parts[0])?[0];
            let stop = parse_range(parts[1])?[0];
            linspace(ends, stop, points)
        }
        (None, None) => Ok(vec![0.0]),
    }
}

fn thermo(ctx: &Ctx, model: &ModelArgs, grid: &GridArgs) -> Result<()> {
    let spec = model_spec(model)?;
    let k = ctx.k();
    let curve = thermo_from_spectrum(&spectrum(&spec)?, &core_grid(grid, k)?)?;
    let mut table = Table::new(&["T", "U_per_site", "C_per_site", "logZ_per_site"]);
    for p in curve.points() {
        table.push(&[p.temperature / k, p.u_per_site, p.c_per_site * k, p.log_z_per_site]);
    }
    ctx.write_table(&table)
}

fn variance_rows(fields: &[f64], coupling: f64, period: usize, restarts: usize) -> Result<Table> {
    let mut columns = vec!["B".to_string(), "min_variance_per_site".to_string()];
    columns.extend((1..=period.max(2)).map(|i| format!("theta{i}")));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&cols);
    for &b in fields {
        let spec = ModelSpec::ising(4, coupling, b);
        let bound = minimize_variance(&spec, period, restarts)?;
        let mut row = vec![b, bound.value_per_site];
        let thetas = bound.ansatz.tile(period.max(2));
        row.extend(thetas.iter().take(period.max(2)).map(|a| a.theta));
        table.push(&row);
    }
    Ok(table)
}

fn sepbound(
    ctx: &Ctx,
    model: ModelKind,
    fields: &[f64],
    coupling: f64,
    period: usize,
    restarts: usize,
    spin: &str,
) -> Result<()> {
    let table = match model {
        ModelKind::TransverseIsing => variance_rows(fields, coupling, period, restarts)?,
        ModelKind::HeisenbergXxx | ModelKind::Xx => {
            let spin: Spin = spin.parse()?;
            let spec = if model == ModelKind::Xx {
                ModelSpec::xx(4, coupling)
            } else {
                ModelSpec::xxx(4, coupling, spin)
            };
            let bound = minimize_energy(&spec, restarts)?;
            let s = if model == ModelKind::Xx { 0.5 } else { spin.magnitude() };
            let mut table = Table::new(&["s", "min_energy_per_site"]);
            table.push(&[s, bound.value_per_site]);
            table
        }
    };
    ctx.write_table(&table)
}

fn analytic(ctx: &Ctx, which: Which, field: f64, coupling: f64, grid: &GridArgs) -> Result<()> {
    if coupling == 0.0 {
        return usage("--J must be nonzero");
    }
    let k = ctx.k();
    let j = coupling.abs();
    let mut table = Table::new(&["T", "value"]);
    for t in core_grid(grid, k)? {
        let value = match which {
            Which::Katsura => katsura_heat_capacity(field / j, t / j)? * k,
            Which::Xx => j * xx_internal_energy(t / j)?,
            Which::XxLowT => j * xx_low_t_energy(t / j).value,
        };
        table.push(&[t / k, value]);
    }
    ctx.write_table(&table)
}

/// Infinite Ising ring at coupling `j`.
struct ScaledKatsura {
    field: f64,
    j: f64,
}

impl HeatCapacityCurve for ScaledKatsura {
    fn heat_capacity(&self, t: f64) -> heatwit_core::Result<f64> {
        katsura_heat_capacity(self.field / self.j, t / self.j)
    }

    fn source(&self) -> CurveSource {
        CurveSource::Katsura
    }
}

fn read_measurements(path: &Path, k: f64) -> Result<Vec<Measurement>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(t_col), Some(c_col)) = (col("T"), col("C")) else {
        return usage(format!("{} needs columns T and C", path.display()));
    };
    let sigma_col = col("sigma_C");
    let mut data = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| CliError::Usage(format!("row {}: column {} is not a number", line + 2, i + 1)))
        };
        let sigma = match sigma_col {
            Some(i) => field(i)?,
            None => 0.0,
        };
        data.push(Measurement {
            temperature: field(t_col)? * k,
            heat_capacity: field(c_col)? / k,
            sigma: sigma / k,
        });
    }
    data.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
    data.dedup_by(|a, b| a.temperature == b.temperature);
    Ok(data)
}

fn witness_bound(args: &WitnessArgs) -> Result<WitnessBound> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Usage(format!("--{name} is required for this bound")));
    Ok(match args.bound {
        BoundArg::Variance => match args.constant {
            Some(c) => WitnessBound::variance(c)?,
            None => {
                let spec = ModelSpec::ising(4, args.model.coupling, args.model.field);
                WitnessBound::variance(minimize_variance(&spec, 2, 8)?.value_per_site)?
            }
        },
        BoundArg::Gapless => WitnessBound::gapless(need(args.e0, "e0")?, need(args.eb, "eb")?, args.gamma)?,
        BoundArg::Gapped => WitnessBound::gapped(need(args.e0, "e0")?, need(args.eb, "eb")?, need(args.gap, "gap")?)?,
    })
}

/// Converts temperatures and heat capacities of a report from computation
/// units to the caller's `k`.
fn to_user_units(report: &mut WitnessReport, k: f64) {
    report.critical_temperature = report.critical_temperature.map(|t| t / k);
    for t in &mut report.crossings {
        *t /= k;
    }
    if let Some(w) = &mut report.validity {
        w.t_max /= k;
    }
    for s in &mut report.samples {
        s.temperature /= k;
        s.heat_capacity *= k;
        s.bound *= k;
        s.margin *= k;
    }
}

fn witness(ctx: &Ctx, args: &WitnessArgs) -> Result<()> {
    let k = ctx.k();
    let bound = witness_bound(args)?;
    let validity = match (args.validity, args.bound) {
        (Some(t), _) => Some(ValidityWindow { t_max: t * k }),
        (None, BoundArg::Variance) => None,
        (None, _) => Some(ValidityWindow::default()),
    };
    let mut report = if let Some(path) = args.curve.strip_prefix("file=") {
        let data = read_measurements(Path::new(path), k)?;
        witness_from_measurements(&data, &bound, validity)?
    } else {
        let grid = core_grid(&args.grid, k)?;
        match args.curve.as_str() {
            "ed" => {
                let s = spectrum(&model_spec(&args.model)?)?;
                evaluate_witness(&bound, &s, &grid, validity)?
            }
            "katsura" => {
                if args.model.coupling == 0.0 {
                    return usage("--J must be nonzero");
                }
                let curve = ScaledKatsura {
                    field: args.model.field,
                    j: args.model.coupling.abs(),
                };
                evaluate_witness(&bound, &curve, &grid, validity)?
            }
            other => return usage(format!("--curve must be ed, katsura or file=PATH, got '{other}'")),
        }
    };
    to_user_units(&mut report, k);
    if let Some(path) = &args.margins {
        let table = margins_table(&report);
        let mut out = Sink::File(path).open()?;
        table.write_csv(&mut out)?;
        out.flush()?;
    }
    match ctx.global.format.unwrap_or(Format::Json) {
        Format::Json => ctx.write_json("witness_report", &report, ctx.sink()),
        Format::Csv => {
            ctx.write_table(&margins_table(&report))
        }
    }
}

fn margins_table(report: &WitnessReport) -> Table {
    let flag = |b: bool| f64::from(u8::from(b));
    let mut table = Table::new(&["T", "C", "bound", "margin", "entangled", "within_validity"]);
    for s in &report.samples {
        table.push(&[
            s.temperature,
            s.heat_capacity,
            s.bound,
            s.margin,
            flag(s.entangled),
            flag(s.within_validity),
        ]);
    }
    table
}

fn region_table(fields: &[f64], coupling: f64, k: f64, grid: &[f64]) -> Result<Table> {
    if coupling == 0.0 {
        return usage("--J must be nonzero");
    }
    let j = coupling.abs();
    let scaled: Vec<f64> = fields.iter().map(|b| b / j).collect();
    let curve = critical_temperature_curve(&scaled, grid)?;
    let mut table = Table::new(&["B", "T_c"]);
    for (b, p) in fields.iter().zip(curve) {
        table.push(&[*b, p.critical_temperature.map_or(f64::NAN, |t| t * j / k)]);
    }
    Ok(table)
}

fn eigencheck(ctx: &Ctx, n: usize, field: f64, restarts: usize, tol: Option<f64>) -> Result<()> {
    let opts = EigencheckOptions {
        degeneracy_tol: tol,
        restarts,
        seed: ctx.global.seed.unwrap_or(DEFAULT_SEED),
    };
    let report = eigencheck_ising(n, field, &opts)?;
    match ctx.global.format.unwrap_or(Format::Json) {
        Format::Json => ctx.write_json("eigencheck_report", &report, ctx.sink()),
        Format::Csv => {
            let mut table = Table::new(&["energy", "degeneracy", "max_product_overlap"]);
            for l in &report.levels {
                table.push(&[l.energy, l.degeneracy as f64, l.max_product_overlap]);
            }
            ctx.write_table(&table)
        }
    }
}

fn repro(ctx: &Ctx, figure: Figure) -> Result<()> {
    let k = ctx.k();
    let table = match figure {
        Figure::Fig1 => variance_rows(&linspace(0.0, 5.0, 101)?, 1.0, 2, 8)?,
        Figure::Fig2 => {
            let grid = geometric_grid(0.01, 20.0, 400)?;
            region_table(&linspace(0.1, 3.0, 30)?, 1.0, k, &grid)?
        }
        Figure::Fig3 => {
            let bound = minimize_variance(&ModelSpec::ising(4, 1.0, 2.0), 2, 8)?.value_per_site;
            let mut table = Table::new(&["T", "C_per_site", "bound"]);
            for t in geometric_grid(0.05, 5.0, 200)? {
                table.push(&[t / k, katsura_heat_capacity(2.0, t)? * k, bound / (t * t) * k]);
            }
            table
        }
    };
    ctx.write_table(&table)
}

fn matrix(ctx: &Ctx, model: &ModelArgs) -> Result<()> {
    let h = build_hamiltonian(&model_spec(model)?)?;
    let mut out = ctx.sink().open()?;
    let mut w = csv::Writer::from_writer(&mut out);
    for i in 0..h.dim() {
        w.write_record(h.row(i).iter().map(|&x| format_number(x)))?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("not JSON: {e}")))?;
    let version = value.get("schema_version").and_then(|v| v.as_u64());
    if version != Some(u64::from(SCHEMA_VERSION)) {
        return usage(format!("unsupported schema_version {version:?}"));
    }
    let kind = value
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::Usage("missing kind".into()))?
        .to_string();
    let bad = |e: serde_json::Error| CliError::Usage(format!("{kind} does not match its schema: {e}"));
    match kind.as_str() {
        "table" => {
            let env: Envelope<Table> = serde_json::from_value(value).map_err(bad)?;
            if env.data.rows.iter().any(|r| r.len() != env.data.columns.len()) {
                return usage("table rows do not match the column count");
            }
        }
        "witness_report" => {
            serde_json::from_value::<Envelope<WitnessReport>>(value).map_err(bad)?;
        }
        "eigencheck_report" => {
            let env: Envelope<EigencheckReport> = serde_json::from_value(value).map_err(bad)?;
            if env.data.levels.iter().any(|l| !(0.0..=1.0 + 1e-12).contains(&l.max_product_overlap)) {
                return usage("overlap outside [0, 1]");
            }
        }
        other => return usage(format!("unknown kind '{other}'")),
    }
    println!("{}", serde_json::json!({ "valid": true, "kind": kind }));
    Ok(())
}
