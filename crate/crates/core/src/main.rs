use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qkd_rate::optimize::{pdc_optimal_bound, wcp_optimal_bound, DEFAULT_MU_BRACKET};
use qkd_rate::pns::{self, Polarization};
use qkd_rate::report::{self, Cell, Table, BOUND_COLUMNS, PNS_COLUMNS, RATE_COLUMNS, SWEEP_COLUMNS};
use qkd_rate::scenario::{Scenario, SourceKind};
use qkd_rate::{optimize_operating_point, rate_point, sweep, EcModel, RateError, Source, SweepConfig};

/// Secure key rate per time slot for BB84 with realistic sources and detectors.
#[derive(Parser)]
#[command(name = "qkd-rate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gain at one distance, for a given or optimised photon number.
    Rate(RateArgs),
    /// Optimised gain over a range of distances.
    Sweep(SweepArgs),
    /// Analytic bounds 1-3 with their optimal photon numbers.
    Bounds(BoundsArgs),
    /// Check the photon-number-splitting unitary in the Fock space.
    PnsVerify(PnsArgs),
    /// List the built-in scenarios.
    Scenarios(FormatArg),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EcChoice {
    Shannon,
    Table,
}

#[derive(Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct Common {
    /// Preset name (BT8, BT13, G13, KTH15) or path to a scenario file.
    #[arg(long, default_value = "KTH15")]
    scenario: String,
    #[arg(long, value_parser = parse_kind)]
    source: Option<SourceKind>,
    /// Mean photon number (sinh²χ for downconversion).
    #[arg(long)]
    mu: Option<f64>,
    /// Squeezing parameter of the downconversion source.
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    eta_a: Option<f64>,
    #[arg(long)]
    dark_a: Option<f64>,
    #[arg(long)]
    eta_c: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    ec: EcChoice,
    #[arg(long, default_value_t = DEFAULT_MU_BRACKET.0)]
    mu_min: f64,
    #[arg(long, default_value_t = DEFAULT_MU_BRACKET.1)]
    mu_max: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    common: Common,
    /// Fiber length in km.
    #[arg(long, default_value_t = 0.0)]
    distance: f64,
    /// Choose the photon number that maximises the gain.
    #[arg(long)]
    optimize: bool,
}

#[derive(Args)]
struct Range {
    #[arg(long, default_value_t = 0.0)]
    l_min: f64,
    #[arg(long)]
    l_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    steps: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    range: Range,
    /// Add bounds 1-3 to every row.
    #[arg(long)]
    bounds: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    range: Range,
}

#[derive(Args)]
struct PnsArgs {
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn parse_kind(s: &str) -> Result<SourceKind, String> {
    s.parse().map_err(|e: RateError| e.to_string())
}

/// Failure of a command together with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<RateError> for Failure {
    fn from(e: RateError) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

impl Common {
    fn scenario(&self) -> Result<Scenario, RateError> {
        let mut s = Scenario::load(&self.scenario)?;
        if let Some(kind) = self.source {
            s.source.kind = kind;
        }
        if self.mu.is_some() {
            s.source.mu = self.mu;
            s.source.chi = None;
        }
        if self.chi.is_some() {
            s.source.chi = self.chi;
        }
        s.source.eta_a = self.eta_a.unwrap_or(s.source.eta_a);
        s.source.dark_a = self.dark_a.unwrap_or(s.source.dark_a);
        s.source.eta_c = self.eta_c.unwrap_or(s.source.eta_c);
        Ok(s)
    }

    fn ec(&self) -> EcModel {
        match self.ec {
            EcChoice::Shannon => EcModel::ShannonIdeal,
            EcChoice::Table => EcModel::brassard_salvail(),
        }
    }
}

impl Range {
    fn lengths(&self) -> Result<Vec<f64>, RateError> {
        let l_max = self.l_max.unwrap_or(self.l_min);
        if !(self.l_min >= 0.0 && l_max >= self.l_min && l_max.is_finite()) {
            return Err(RateError::Config(format!("need 0 <= l_min <= l_max, got {} and {l_max}", self.l_min)));
        }
        if self.steps == 0 || (self.steps > 1 && l_max == self.l_min) {
            return Err(RateError::Config("steps must be >= 1, and 1 when l_min = l_max".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.l_min]);
        }
        let step = (l_max - self.l_min) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.l_min + step * i as f64).collect())
    }
}

fn emit(table: &Table, format: Format) {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => format!("{}\n", table.to_json()),
    };
    // A closed pipe (`| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn cmd_rate(args: &RateArgs) -> Result<(), Failure> {
    let scenario = args.common.scenario()?;
    let source = scenario.source.build()?;
    let link = scenario.link(args.distance);
    let ec = args.common.ec();
    let (mu, point) = if args.optimize {
        let op = optimize_operating_point(&source, &link, (args.common.mu_min, args.common.mu_max), &ec)?;
        (op.mu, op.point)
    } else {
        (source.mean_photon_number(), rate_point(&source, &link, &ec)?)
    };
    let mut table = Table::new(&RATE_COLUMNS);
    table.push(report::rate_row(args.distance, mu, &point));
    emit(&table, args.common.format);
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let scenario = args.common.scenario()?;
    let config = SweepConfig {
        source: scenario.source.build()?,
        link: scenario.link(0.0),
        lengths: args.range.lengths()?,
        mu_search: (args.common.mu_min, args.common.mu_max),
        ec: args.common.ec(),
        with_bounds: args.bounds,
    };
    let result = sweep(&config)?;
    let mut table = Table::new(&SWEEP_COLUMNS);
    for row in &result.rows {
        if let Err(e) = &row.outcome {
            eprintln!("warning: {} km: {e}", row.distance);
        }
        table.push(report::sweep_row(row));
    }
    emit(&table, args.common.format);
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let scenario = args.common.scenario()?;
    let source = scenario.source.build()?;
    let mut table = Table::new(&BOUND_COLUMNS);
    for length in args.range.lengths()? {
        let link = scenario.link(length);
        link.validate()?;
        let etas = [
            10f64.powf(-scenario.alpha * length / 10.0),
            10f64.powf(-(scenario.alpha * length + scenario.receiver_loss) / 10.0),
            link.end_to_end_efficiency(),
        ];
        let mut row = vec![Cell::Num(length)];
        for eta in etas {
            let (mu, bound) = match source {
                Source::Wcp(_) => wcp_optimal_bound(eta)?,
                Source::Pdc(_) => pdc_optimal_bound(eta)?,
                Source::Single(_) => (f64::NAN, 0.5 * eta),
            };
            row.push(Cell::Num(eta));
            row.push(if mu.is_nan() { Cell::Empty } else { Cell::Num(mu) });
            row.push(Cell::Num(bound));
        }
        table.push(row);
    }
    emit(&table, args.common.format);
    Ok(())
}

fn cmd_pns_verify(args: &PnsArgs) -> Result<(), Failure> {
    if args.n_max == 0 || args.n_max > pns::MAX_PHOTONS {
        return Err(Failure { code: 2, message: format!("--n-max must be in 1..={}", pns::MAX_PHOTONS) });
    }
    let checks = pns::verify(args.n_max, &Polarization::BB84)
        .map_err(|e| Failure { code: 3, message: e.to_string() })?;
    let mut table = Table::new(&PNS_COLUMNS);
    for c in &checks {
        table.push(report::pns_row(c));
    }
    emit(&table, args.format);
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(Failure { code: 1, message: format!("{failed} of {} checks failed", checks.len()) });
    }
    Ok(())
}

fn cmd_scenarios(args: &FormatArg) -> Result<(), Failure> {
    let mut table = Table::new(&["name", "wavelength_nm", "alpha", "receiver_loss", "c_align", "dark_b", "eta_b"]);
    for s in Scenario::presets() {
        table.push(vec![
            Cell::Text(s.name),
            Cell::Num(s.wavelength_nm),
            Cell::Num(s.alpha),
            Cell::Num(s.receiver_loss),
            Cell::Num(s.c_align),
            Cell::Num(s.dark_b),
            Cell::Num(s.eta_b),
        ]);
    }
    emit(&table, args.format);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rate(a) => cmd_rate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::PnsVerify(a) => cmd_pns_verify(a),
        Command::Scenarios(a) => cmd_scenarios(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
