//! Command-line frontend: one subcommand per quantity, machine-readable
//! JSON (default) or CSV output, deterministic given the full flag set.
//!
//! Exit statuses: 0 success, 1 computation/domain error, 2 usage error.
//! Every physical quantity carries its unit in the JSON field name; values
//! computed by different routes are tagged `discrete`, `closed_form`, or
//! `tf_quadrature`.

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use heatchan::channel::{ChannelParams, Grid};
use heatchan::simulate::{
    self, run_simulation, MeasurementMode, SimulationConfig,
};
use heatchan::tfplane::{
    szego_check, szego_symbol_integral_quadrature, tf_capacity_quadrature,
    tf_distortion_quadrature, tf_input_energy_quadrature, tf_rate_quadrature,
    tf_reverse_waterfill, tf_waterfill, SzegoTestFn,
};
use heatchan::waterfill::{
    capacity_closed_form, energy_balance, rd_closed_form, solve_reverse_waterfill,
    solve_waterfill,
};
use heatchan::{bits_to_nats, nats_to_bits};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(
    name = "heatchan",
    version,
    about = "Capacity, rate-distortion, and estimation analysis of a Gaussian \
             time-frequency localization channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete water-filling capacity alongside its closed asymptotic form.
    Capacity(CapacityArgs),
    /// Reverse water-filling rate-distortion alongside its closed form.
    Rd(RdArgs),
    /// Phase-plane water-filling: radial closed form vs 2-D quadrature.
    Tf(TfArgs),
    /// Spectral-efficiency and estimation curves over an SNR grid.
    Compare(CompareArgs),
    /// Seeded Monte-Carlo simulation of the measurement model.
    Simulate(SimulateArgs),
    /// Eigenvalue-sum vs symbol-integral checks over a bandwidth sweep.
    Szego(SzegoArgs),
}

// ---------------------------------------------------------------------------
// Shared flag groups
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ChannelFlags {
    /// Time-localization scale alpha (s).
    #[arg(long)]
    alpha: f64,
    /// Frequency-localization scale beta (Hz).
    #[arg(long)]
    beta: f64,
    /// Noise level theta^2 = N0/2 (W/Hz).
    #[arg(long)]
    theta2: f64,
}

impl ChannelFlags {
    fn params(&self) -> heatchan::Result<ChannelParams> {
        ChannelParams::new(self.alpha, self.beta, self.theta2)
    }
}

#[derive(Args)]
struct OutputFlags {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this path instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
#[command(group(ArgGroup::new("unit").args(["bits", "nats"])))]
struct UnitFlags {
    /// Report capacities/rates in bits (default).
    #[arg(long)]
    bits: bool,
    /// Report capacities/rates in nats.
    #[arg(long)]
    nats: bool,
}

impl UnitFlags {
    fn use_nats(&self) -> bool {
        self.nats
    }

    /// Field-name suffix and converter from nats for the chosen unit.
    fn rate_unit(&self) -> (&'static str, fn(f64) -> f64) {
        if self.use_nats() {
            ("nats_per_transmission", std::convert::identity)
        } else {
            ("bits_per_transmission", nats_to_bits)
        }
    }
}

// ---------------------------------------------------------------------------
// Error plumbing: usage errors exit 2, computation errors exit 1
// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Computation(heatchan::Error),
    Io(std::io::Error),
}

impl From<heatchan::Error> for CliError {
    fn from(e: heatchan::Error) -> Self {
        CliError::Computation(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Computation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("output error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (report, output) = match cli.command {
        Command::Capacity(a) => (cmd_capacity(&a)?, a.output),
        Command::Rd(a) => (cmd_rd(&a)?, a.output),
        Command::Tf(a) => (cmd_tf(&a)?, a.output),
        Command::Compare(a) => (cmd_compare(&a)?, a.output),
        Command::Simulate(a) => (cmd_simulate(&a)?, a.output),
        Command::Szego(a) => (cmd_szego(&a)?, a.output),
    };
    emit(&report, &output)
}

// ---------------------------------------------------------------------------
// Report container and serialization
// ---------------------------------------------------------------------------

/// JSON value plus the fixed-order CSV rendering of the same run.
struct Report {
    json: Value,
    csv_header: Vec<&'static str>,
    csv_rows: Vec<Vec<String>>,
}

fn emit(report: &Report, output: &OutputFlags) -> Result<(), CliError> {
    assert_finite(&report.json)?;
    let text = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)
                .expect("report serialization cannot fail");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = csv_row(&report.csv_header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
            for row in &report.csv_rows {
                s.push_str(&csv_row(row));
            }
            s
        }
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Reject any report containing a non-finite number.  `serde_json` maps
/// non-finite floats to `null`, and no report uses `null` legitimately
/// (absent optionals are omitted), so a `null` anywhere means a NaN or
/// infinity escaped a computation.
fn assert_finite(v: &Value) -> Result<(), CliError> {
    match v {
        Value::Null => Err(CliError::Computation(heatchan::Error::Domain {
            name: "output",
            value: f64::NAN,
            requirement: "all emitted numbers finite",
        })),
        Value::Array(items) => items.iter().try_for_each(assert_finite),
        Value::Object(map) => map.values().try_for_each(assert_finite),
        _ => Ok(()),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_row(fields: &[String]) -> String {
    let mut line = fields
        .iter()
        .map(|f| csv_escape(f))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

fn fnum(x: f64) -> String {
    format!("{x}")
}

fn join_numbers(xs: &[f64]) -> String {
    xs.iter().map(|&x| fnum(x)).collect::<Vec<_>>().join(",")
}

/// `{ "route": ..., "<field>": value }` — the tagged dual-route entries.
fn route_entry(route: &str, field: &str, value: f64) -> Value {
    let mut m = Map::new();
    m.insert("route".into(), json!(route));
    m.insert(field.into(), json!(value));
    Value::Object(m)
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    /// Total input energy S per transmission (Ws).
    #[arg(long = "S")]
    s_total: f64,
    #[command(flatten)]
    units: UnitFlags,
    #[command(flatten)]
    output: OutputFlags,
}

fn cmd_capacity(args: &CapacityArgs) -> Result<Report, CliError> {
    let p = args.channel.params()?;
    let sol = solve_waterfill(&p, args.s_total)?;
    let closed_nats = bits_to_nats(capacity_closed_form(&p, args.s_total)?);
    let bal = energy_balance(&sol, &p);
    let (unit, conv) = args.units.rate_unit();
    let field = format!("capacity_{unit}");
    let discrete = conv(sol.capacity_nats());
    let closed = conv(closed_nats);

    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": "capacity",
        "alpha_s": p.alpha(),
        "beta_hz": p.beta(),
        "theta2_watts_per_hz": p.theta2(),
        "s_total_ws": args.s_total,
        "active_count": sol.active_count(),
        "water_level_ws": sol.water_level(),
        "allocation_ws": sol.allocation(),
        "capacity_routes": [
            route_entry("discrete", &field, discrete),
            route_entry("closed_form", &field, closed),
        ],
        "energy_balance_ws": {
            "e_in": bal.e_in,
            "e_out": bal.e_out,
            "e_err": bal.e_err,
            "e_out_hat": bal.e_out_hat,
        },
    });
    let csv_header = vec![
        "alpha_s",
        "beta_hz",
        "theta2_watts_per_hz",
        "s_total_ws",
        "active_count",
        "water_level_ws",
        "capacity_discrete",
        "capacity_closed_form",
        "capacity_unit",
        "e_in_ws",
        "e_out_ws",
        "e_err_ws",
        "e_out_hat_ws",
        "allocation_ws",
    ];
    let row = vec![
        fnum(p.alpha()),
        fnum(p.beta()),
        fnum(p.theta2()),
        fnum(args.s_total),
        sol.active_count().to_string(),
        fnum(sol.water_level()),
        fnum(discrete),
        fnum(closed),
        unit.to_string(),
        fnum(bal.e_in),
        fnum(bal.e_out),
        fnum(bal.e_err),
        fnum(bal.e_out_hat),
        join_numbers(sol.allocation()),
    ];
    Ok(Report {
        json,
        csv_header,
        csv_rows: vec![row],
    })
}

// ---------------------------------------------------------------------------
// rd
// ---------------------------------------------------------------------------

#[derive(Args)]
struct RdArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    /// Target mean-square distortion D (Ws).
    #[arg(long = "D")]
    d_target: f64,
    /// Source coefficient scale sigma^2 (W).
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[command(flatten)]
    units: UnitFlags,
    #[command(flatten)]
    output: OutputFlags,
}

fn cmd_rd(args: &RdArgs) -> Result<Report, CliError> {
    let p = args.channel.params()?;
    let sol = solve_reverse_waterfill(&p, args.d_target, args.sigma2)?;
    let closed_nats = rd_closed_form(&p, args.d_target, args.sigma2)?;
    let (unit, conv) = args.units.rate_unit();
    let field = format!("rate_{unit}");
    let discrete = conv(sol.rate_nats());
    let closed = conv(closed_nats);

    let mut top = Map::new();
    top.insert("schema_version".into(), json!(SCHEMA_VERSION));
    top.insert("subcommand".into(), json!("rd"));
    top.insert("alpha_s".into(), json!(p.alpha()));
    top.insert("beta_hz".into(), json!(p.beta()));
    top.insert("theta2_watts_per_hz".into(), json!(p.theta2()));
    top.insert("d_target_ws".into(), json!(args.d_target));
    top.insert("source_sigma2_ws".into(), json!(args.sigma2));
    top.insert("source_energy_ws".into(), json!(sol.source_energy()));
    top.insert("coded_count".into(), json!(sol.coded_count()));
    if let Some(table) = sol.water_table() {
        top.insert("water_table_ws".into(), json!(table));
    }
    top.insert(
        "rate_routes".into(),
        json!([
            route_entry("discrete", &field, discrete),
            route_entry("closed_form", &field, closed),
        ]),
    );

    let csv_header = vec![
        "alpha_s",
        "beta_hz",
        "theta2_watts_per_hz",
        "d_target_ws",
        "source_sigma2_ws",
        "source_energy_ws",
        "coded_count",
        "water_table_ws",
        "rate_discrete",
        "rate_closed_form",
        "rate_unit",
    ];
    let row = vec![
        fnum(p.alpha()),
        fnum(p.beta()),
        fnum(p.theta2()),
        fnum(args.d_target),
        fnum(args.sigma2),
        fnum(sol.source_energy()),
        sol.coded_count().to_string(),
        sol.water_table().map(fnum).unwrap_or_default(),
        fnum(discrete),
        fnum(closed),
        unit.to_string(),
    ];
    Ok(Report {
        json: Value::Object(top),
        csv_header,
        csv_rows: vec![row],
    })
}

// ---------------------------------------------------------------------------
// tf
// ---------------------------------------------------------------------------

#[derive(Args)]
#[command(group(ArgGroup::new("quantity").required(true).args(["s_total", "lambda"])))]
struct TfArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    /// Forward mode: total input energy S per transmission (Ws).
    #[arg(long = "S")]
    s_total: Option<f64>,
    /// Reverse mode: slice level lambda on the phase-plane density (Ws/rad).
    #[arg(long)]
    lambda: Option<f64>,
    /// Source coefficient scale sigma^2 for reverse mode (W).
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[command(flatten)]
    units: UnitFlags,
    #[command(flatten)]
    output: OutputFlags,
}

fn cmd_tf(args: &TfArgs) -> Result<Report, CliError> {
    let p = args.channel.params()?;
    let (unit, conv) = args.units.rate_unit();

    if let Some(s_total) = args.s_total {
        let sol = tf_waterfill(&p, s_total)?;
        let nu = sol.water_level_nu();
        let cap_quad = tf_capacity_quadrature(&p, nu)?;
        let energy_quad = tf_input_energy_quadrature(&p, nu)?;
        let field = format!("capacity_{unit}");
        let json = json!({
            "schema_version": SCHEMA_VERSION,
            "subcommand": "tf",
            "mode": "capacity",
            "alpha_s": p.alpha(),
            "beta_hz": p.beta(),
            "theta2_watts_per_hz": p.theta2(),
            "s_total_ws": s_total,
            "fill_radius": sol.fill_radius(),
            "water_level_nu_ws_per_rad": nu,
            "capacity_routes": [
                route_entry("closed_form", &field, conv(sol.capacity_nats())),
                route_entry("tf_quadrature", &field, conv(cap_quad)),
            ],
            "input_energy_routes": [
                route_entry("closed_form", "input_energy_ws", sol.input_energy()),
                route_entry("tf_quadrature", "input_energy_ws", energy_quad),
            ],
        });
        let csv_header = vec![
            "alpha_s",
            "beta_hz",
            "theta2_watts_per_hz",
            "mode",
            "s_total_ws",
            "fill_radius",
            "water_level_nu_ws_per_rad",
            "capacity_closed_form",
            "capacity_tf_quadrature",
            "capacity_unit",
            "input_energy_closed_form_ws",
            "input_energy_tf_quadrature_ws",
        ];
        let row = vec![
            fnum(p.alpha()),
            fnum(p.beta()),
            fnum(p.theta2()),
            "capacity".to_string(),
            fnum(s_total),
            fnum(sol.fill_radius()),
            fnum(nu),
            fnum(conv(sol.capacity_nats())),
            fnum(conv(cap_quad)),
            unit.to_string(),
            fnum(sol.input_energy()),
            fnum(energy_quad),
        ];
        return Ok(Report {
            json,
            csv_header,
            csv_rows: vec![row],
        });
    }

    let lambda = args.lambda.expect("clap guarantees one of --S/--lambda");
    let point = tf_reverse_waterfill(&p, lambda, args.sigma2)?;
    let rate_quad = tf_rate_quadrature(&p, lambda, args.sigma2)?;
    let dist_quad = tf_distortion_quadrature(&p, lambda, args.sigma2)?;
    let field = format!("rate_{unit}");
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": "tf",
        "mode": "rate_distortion",
        "alpha_s": p.alpha(),
        "beta_hz": p.beta(),
        "theta2_watts_per_hz": p.theta2(),
        "lambda_ws_per_rad": lambda,
        "source_sigma2_ws": args.sigma2,
        "slice_depth": point.slice_depth,
        "rate_routes": [
            route_entry("closed_form", &field, conv(point.rate_nats)),
            route_entry("tf_quadrature", &field, conv(rate_quad)),
        ],
        "distortion_routes": [
            route_entry("closed_form", "distortion_ws", point.distortion),
            route_entry("tf_quadrature", "distortion_ws", dist_quad),
        ],
    });
    let csv_header = vec![
        "alpha_s",
        "beta_hz",
        "theta2_watts_per_hz",
        "mode",
        "lambda_ws_per_rad",
        "source_sigma2_ws",
        "slice_depth",
        "rate_closed_form",
        "rate_tf_quadrature",
        "rate_unit",
        "distortion_closed_form_ws",
        "distortion_tf_quadrature_ws",
    ];
    let row = vec![
        fnum(p.alpha()),
        fnum(p.beta()),
        fnum(p.theta2()),
        "rate_distortion".to_string(),
        fnum(lambda),
        fnum(args.sigma2),
        fnum(point.slice_depth),
        fnum(conv(point.rate_nats)),
        fnum(conv(rate_quad)),
        unit.to_string(),
        fnum(point.distortion),
        fnum(dist_quad),
    ];
    Ok(Report {
        json,
        csv_header,
        csv_rows: vec![row],
    })
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CompareArgs {
    /// Lowest SNR of the geometric grid.
    #[arg(long)]
    snr_min: f64,
    /// Highest SNR of the geometric grid.
    #[arg(long)]
    snr_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u32).range(2..))]
    points: u32,
    /// With --beta and --theta2: add per-channel estimation columns
    /// (capacity vs its quadratic approximation, error measures).
    #[arg(long, requires = "beta", requires = "theta2")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long, requires = "alpha")]
    theta2: Option<f64>,
    #[command(flatten)]
    output: OutputFlags,
}

fn cmd_compare(args: &CompareArgs) -> Result<Report, CliError> {
    // Negated comparisons on purpose: they also reject NaN inputs.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(args.snr_min > 0.0) || !(args.snr_max > args.snr_min) {
        return Err(usage(format!(
            "need 0 < --snr-min < --snr-max (got {} and {})",
            args.snr_min, args.snr_max
        )));
    }
    let n = args.points as usize;
    let ratio = args.snr_max / args.snr_min;
    let grid: Vec<f64> = (0..n)
        .map(|i| args.snr_min * ratio.powf(i as f64 / (n - 1) as f64))
        .collect();
    let curves = heatchan::gallager::compare_curves(&grid)?;

    let params = match (args.alpha, args.beta, args.theta2) {
        (Some(a), Some(b), Some(t)) => Some(ChannelParams::new(a, b, t)?),
        (None, None, None) => None,
        _ => {
            return Err(usage(
                "--alpha, --beta, and --theta2 must be given together",
            ))
        }
    };
    let est_rows = match &params {
        Some(p) => Some(simulate::c_llse_check(p, &grid)?),
        None => None,
    };

    let mut rows = Vec::with_capacity(n);
    let mut csv_rows = Vec::with_capacity(n);
    for (i, c) in curves.iter().enumerate() {
        let mut row = Map::new();
        row.insert("snr".into(), json!(c.snr));
        row.insert("se_heat_bits_per_s_per_hz".into(), json!(c.se_heat));
        row.insert("se_shannon_bits_per_s_per_hz".into(), json!(c.se_shannon));
        row.insert("se_gallager_bits_per_s_per_hz".into(), json!(c.se_gallager));
        row.insert("ebn0_heat_db".into(), json!(c.ebn0_db_heat));
        row.insert("ebn0_shannon_db".into(), json!(c.ebn0_db_shannon));
        row.insert("ebn0_gallager_db".into(), json!(c.ebn0_db_gallager));
        let mut csv = vec![
            fnum(c.snr),
            fnum(c.se_heat),
            fnum(c.se_shannon),
            fnum(c.se_gallager),
            fnum(c.ebn0_db_heat),
            fnum(c.ebn0_db_shannon),
            fnum(c.ebn0_db_gallager),
        ];
        if let (Some(p), Some(est)) = (&params, &est_rows) {
            let e = &est[i];
            let c_exact = simulate::capacity_exact_at_snr(p, c.snr)?;
            let c0 = simulate::capacity_c0(p, c.snr)?;
            row.insert("active_count".into(), json!(e.active_count));
            row.insert("capacity_exact_nats_per_transmission".into(), json!(c_exact));
            row.insert("capacity_c0_nats_per_transmission".into(), json!(c0));
            row.insert("dc0_dsnr_analytic_nats".into(), json!(e.dc0_analytic));
            row.insert("dc0_dsnr_fd_nats".into(), json!(e.dc0_fd));
            row.insert("half_llse_exact_ws".into(), json!(e.half_llse_exact));
            row.insert(
                "half_llse_asymptotic_ws".into(),
                json!(e.half_llse_asymptotic),
            );
            row.insert("half_mmse_corrected_ws".into(), json!(e.half_mmse_corrected));
            csv.extend([
                e.active_count.to_string(),
                fnum(c_exact),
                fnum(c0),
                fnum(e.dc0_analytic),
                fnum(e.dc0_fd),
                fnum(e.half_llse_exact),
                fnum(e.half_llse_asymptotic),
                fnum(e.half_mmse_corrected),
            ]);
        }
        rows.push(Value::Object(row));
        csv_rows.push(csv);
    }

    let mut top = Map::new();
    top.insert("schema_version".into(), json!(SCHEMA_VERSION));
    top.insert("subcommand".into(), json!("compare"));
    top.insert("snr_min".into(), json!(args.snr_min));
    top.insert("snr_max".into(), json!(args.snr_max));
    top.insert("points".into(), json!(n));
    let mut csv_header = vec![
        "snr",
        "se_heat_bits_per_s_per_hz",
        "se_shannon_bits_per_s_per_hz",
        "se_gallager_bits_per_s_per_hz",
        "ebn0_heat_db",
        "ebn0_shannon_db",
        "ebn0_gallager_db",
    ];
    if let Some(p) = &params {
        top.insert("alpha_s".into(), json!(p.alpha()));
        top.insert("beta_hz".into(), json!(p.beta()));
        top.insert("theta2_watts_per_hz".into(), json!(p.theta2()));
        top.insert(
            "kink_snrs".into(),
            json!(simulate::kink_snrs(p, args.snr_max)),
        );
        csv_header.extend([
            "active_count",
            "capacity_exact_nats_per_transmission",
            "capacity_c0_nats_per_transmission",
            "dc0_dsnr_analytic_nats",
            "dc0_dsnr_fd_nats",
            "half_llse_exact_ws",
            "half_llse_asymptotic_ws",
            "half_mmse_corrected_ws",
        ]);
    }
    top.insert("rows".into(), Value::Array(rows));
    Ok(Report {
        json: Value::Object(top),
        csv_header,
        csv_rows,
    })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeFlag {
    Coefficient,
    Waveform,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    /// Total input energy S per transmission (Ws).
    #[arg(long = "S")]
    s_total: f64,
    /// Number of Monte-Carlo trials.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Base seed for the deterministic stream RNG.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where the noise is injected: on coefficients or on waveform samples.
    #[arg(long, value_enum, default_value_t = ModeFlag::Coefficient)]
    mode: ModeFlag,
    /// Waveform mode: half-width of the symmetric sample grid (s).
    #[arg(long, required_if_eq("mode", "waveform"))]
    grid_half_width: Option<f64>,
    /// Waveform mode: sample spacing (s).
    #[arg(long, required_if_eq("mode", "waveform"))]
    grid_step: Option<f64>,
    #[command(flatten)]
    output: OutputFlags,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Report, CliError> {
    let p = args.channel.params()?;
    let (mode, mode_name, grid) = match args.mode {
        ModeFlag::Coefficient => (MeasurementMode::Coefficient, "coefficient", None),
        ModeFlag::Waveform => {
            let half = args.grid_half_width.expect("clap enforces the flag");
            let step = args.grid_step.expect("clap enforces the flag");
            (
                MeasurementMode::Waveform,
                "waveform",
                Some(Grid::symmetric(half, step)?),
            )
        }
    };
    let rep = run_simulation(&SimulationConfig {
        params: p,
        input_energy: args.s_total,
        trials: args.trials as usize,
        seed: args.seed,
        mode,
        grid,
    })?;

    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": "simulate",
        "alpha_s": p.alpha(),
        "beta_hz": p.beta(),
        "theta2_watts_per_hz": p.theta2(),
        "s_total_ws": args.s_total,
        "trials": rep.trials,
        "seed": args.seed,
        "mode": mode_name,
        "active_count": rep.active_count,
        "noise_variance_ws": rep.noise_var,
        "estimate_error_variance_ws": rep.estimate_err_var,
        "max_cross_correlation": rep.max_cross_corr,
        "mean_e_in_ws": rep.mean_e_in,
        "mean_e_out_ws": rep.mean_e_out,
        "mean_e_err_ws": rep.mean_e_err,
        "mean_e_out_hat_ws": rep.mean_e_out_hat,
        "std_e_out_hat_ws": rep.std_e_out_hat,
        "expected_e_out_hat_ws": rep.expected_e_out_hat,
        "capacity_reference_bits_per_transmission": rep.capacity_reference_bits,
    });
    let csv_header = vec![
        "alpha_s",
        "beta_hz",
        "theta2_watts_per_hz",
        "s_total_ws",
        "trials",
        "seed",
        "mode",
        "active_count",
        "max_cross_correlation",
        "mean_e_in_ws",
        "mean_e_out_ws",
        "mean_e_err_ws",
        "mean_e_out_hat_ws",
        "std_e_out_hat_ws",
        "expected_e_out_hat_ws",
        "capacity_reference_bits_per_transmission",
        "noise_variance_ws",
        "estimate_error_variance_ws",
    ];
    let row = vec![
        fnum(p.alpha()),
        fnum(p.beta()),
        fnum(p.theta2()),
        fnum(args.s_total),
        rep.trials.to_string(),
        args.seed.to_string(),
        mode_name.to_string(),
        rep.active_count.to_string(),
        fnum(rep.max_cross_corr),
        fnum(rep.mean_e_in),
        fnum(rep.mean_e_out),
        fnum(rep.mean_e_err),
        fnum(rep.mean_e_out_hat),
        fnum(rep.std_e_out_hat),
        fnum(rep.expected_e_out_hat),
        fnum(rep.capacity_reference_bits),
        join_numbers(&rep.noise_var),
        join_numbers(&rep.estimate_err_var),
    ];
    Ok(Report {
        json,
        csv_header,
        csv_rows: vec![row],
    })
}

// ---------------------------------------------------------------------------
// szego
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TestFnFlag {
    /// g(x) = x^n (exact for n = 1, 2).
    Monomial,
    /// g(x) = (1/2) max(0, ln(b x)) — the capacity integrand.
    LogPlus,
    /// g(x) = a (1 - 1/(b x))^+ — the input-energy integrand.
    ClippedInverse,
    /// g(x) = min(1, b x) — the distortion integrand.
    MinOne,
}

#[derive(Args)]
struct SzegoArgs {
    /// Test function applied to eigenvalues and symbol alike.
    #[arg(long, value_enum)]
    test_fn: TestFnFlag,
    /// Degree n for the monomial test function.
    #[arg(long)]
    degree: Option<u32>,
    /// Coefficient a for clipped-inverse.
    #[arg(long = "a")]
    coeff_a: Option<f64>,
    /// Scale b for log-plus, clipped-inverse, and min-one.
    #[arg(long = "b")]
    scale_b: Option<f64>,
    /// Time-bandwidth products to sweep (comma-separated, each > 1).
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    products: Vec<f64>,
    /// Noise level theta^2 (enters the channel, not the identity itself).
    #[arg(long, default_value_t = 1.0)]
    theta2: f64,
    #[command(flatten)]
    output: OutputFlags,
}

impl SzegoArgs {
    fn test_fn(&self) -> Result<SzegoTestFn, CliError> {
        let reject_unused = |flag: &str, set: bool| {
            if set {
                Err(usage(format!(
                    "--{flag} does not apply to this --test-fn"
                )))
            } else {
                Ok(())
            }
        };
        match self.test_fn {
            TestFnFlag::Monomial => {
                reject_unused("a", self.coeff_a.is_some())?;
                reject_unused("b", self.scale_b.is_some())?;
                let degree = self
                    .degree
                    .ok_or_else(|| usage("--test-fn monomial requires --degree"))?;
                Ok(SzegoTestFn::Monomial { degree })
            }
            TestFnFlag::LogPlus => {
                reject_unused("degree", self.degree.is_some())?;
                reject_unused("a", self.coeff_a.is_some())?;
                let scale_b = self
                    .scale_b
                    .ok_or_else(|| usage("--test-fn log-plus requires --b"))?;
                Ok(SzegoTestFn::LogPlus { scale_b })
            }
            TestFnFlag::ClippedInverse => {
                reject_unused("degree", self.degree.is_some())?;
                let coeff_a = self
                    .coeff_a
                    .ok_or_else(|| usage("--test-fn clipped-inverse requires --a"))?;
                let scale_b = self
                    .scale_b
                    .ok_or_else(|| usage("--test-fn clipped-inverse requires --b"))?;
                Ok(SzegoTestFn::ClippedInverse { coeff_a, scale_b })
            }
            TestFnFlag::MinOne => {
                reject_unused("degree", self.degree.is_some())?;
                reject_unused("a", self.coeff_a.is_some())?;
                let scale_b = self
                    .scale_b
                    .ok_or_else(|| usage("--test-fn min-one requires --b"))?;
                Ok(SzegoTestFn::MinOne { scale_b })
            }
        }
    }
}

fn test_fn_json(f: SzegoTestFn) -> Value {
    match f {
        SzegoTestFn::Monomial { degree } => json!({"name": "monomial", "degree": degree}),
        SzegoTestFn::LogPlus { scale_b } => json!({"name": "log_plus", "b": scale_b}),
        SzegoTestFn::ClippedInverse { coeff_a, scale_b } => {
            json!({"name": "clipped_inverse", "a": coeff_a, "b": scale_b})
        }
        SzegoTestFn::MinOne { scale_b } => json!({"name": "min_one", "b": scale_b}),
    }
}

fn cmd_szego(args: &SzegoArgs) -> Result<Report, CliError> {
    let test_fn = args.test_fn()?;
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for &product in &args.products {
        let p = ChannelParams::new(1.0, product, args.theta2)?;
        let rep = szego_check(&p, test_fn)?;
        let quad = szego_symbol_integral_quadrature(&p, test_fn)?;
        rows.push(json!({
            "alphabeta": product,
            "eigenvalue_sum": rep.eigenvalue_sum,
            "symbol_integral_closed_form": rep.symbol_integral,
            "symbol_integral_tf_quadrature": quad,
            "normalized_gap": rep.normalized_gap,
        }));
        csv_rows.push(vec![
            fnum(product),
            fnum(rep.eigenvalue_sum),
            fnum(rep.symbol_integral),
            fnum(quad),
            fnum(rep.normalized_gap),
        ]);
    }
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": "szego",
        "test_function": test_fn_json(test_fn),
        "theta2_watts_per_hz": args.theta2,
        "rows": rows,
    });
    Ok(Report {
        json,
        csv_header: vec![
            "alphabeta",
            "eigenvalue_sum",
            "symbol_integral_closed_form",
            "symbol_integral_tf_quadrature",
            "normalized_gap",
        ],
        csv_rows,
    })
}
