//! Command-line front end: parameter parsing, subcommand dispatch, and
//! table / JSON / CSV rendering.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical degeneracy,
//! 4 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{ModelParam, NetworkParams};
use crate::{calibrate, equilibrium, parity, sim, welfare};

/// Environment variable naming the default output directory for sweep CSVs.
pub const OUT_DIR_ENV: &str = "REFERRAL_MARKET_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "referral-market",
    version,
    about = "Referral-hiring labor market equilibria and network-discrimination statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// The six model parameters as optional flags, overriding `--config`.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// JSON file with parameter values (e.g. the output of `calibrate`)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Majority share of the labor force
    #[arg(long)]
    pub delta: Option<f64>,
    /// Ability in-group bias
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Majority network density
    #[arg(long)]
    pub tau_maj: Option<f64>,
    /// Minority network density
    #[arg(long)]
    pub tau_min: Option<f64>,
    /// Majority type in-group bias
    #[arg(long)]
    pub psi_maj: Option<f64>,
    /// Minority type in-group bias
    #[arg(long)]
    pub psi_min: Option<f64>,
}

/// On-disk parameter file.  Accepts exactly the keys that `calibrate`
/// emits; anything else is rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    delta: Option<f64>,
    alpha: Option<f64>,
    tau_maj: Option<f64>,
    tau_min: Option<f64>,
    psi_maj: Option<f64>,
    psi_min: Option<f64>,
    #[allow(dead_code)]
    counts: Option<serde_json::Value>,
    #[allow(dead_code)]
    out_of_model: Option<Vec<String>>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<NetworkParams> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| {
                    Error::MalformedInput { line: 0, message: format!("{}: {e}", path.display()) }
                })?;
                Some(cfg)
            }
            None => None,
        };
        let pick = |flag: Option<f64>,
                    from_file: fn(&ConfigFile) -> Option<f64>,
                    field: &'static str|
         -> Result<f64> {
            flag.or_else(|| file.as_ref().and_then(from_file))
                .ok_or(Error::InvalidParameter {
                    field,
                    value: f64::NAN,
                    expected: "a value via flag or --config",
                })
        };
        NetworkParams::new(
            pick(self.delta, |c| c.delta, "delta")?,
            pick(self.alpha, |c| c.alpha, "alpha")?,
            pick(self.tau_maj, |c| c.tau_maj, "tau_maj")?,
            pick(self.tau_min, |c| c.tau_min, "tau_min")?,
            pick(self.psi_maj, |c| c.psi_maj, "psi_maj")?,
            pick(self.psi_min, |c| c.psi_min, "psi_min")?,
        )
    }

    /// Like [`resolve`](Self::resolve) but falls back to `defaults` for
    /// parameters given neither as a flag nor in the config file.
    pub fn resolve_or(&self, defaults: &NetworkParams) -> Result<NetworkParams> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| {
                    Error::MalformedInput { line: 0, message: format!("{}: {e}", path.display()) }
                })?;
                Some(cfg)
            }
            None => None,
        };
        let pick = |flag: Option<f64>, from_file: fn(&ConfigFile) -> Option<f64>, dflt: f64| {
            flag.or_else(|| file.as_ref().and_then(from_file)).unwrap_or(dflt)
        };
        NetworkParams::new(
            pick(self.delta, |c| c.delta, defaults.delta()),
            pick(self.alpha, |c| c.alpha, defaults.alpha()),
            pick(self.tau_maj, |c| c.tau_maj, defaults.tau_maj()),
            pick(self.tau_min, |c| c.tau_min, defaults.tau_min()),
            pick(self.psi_maj, |c| c.psi_maj, defaults.psi_maj()),
            pick(self.psi_min, |c| c.psi_min, defaults.psi_min()),
        )
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the period-2 equilibrium (wages, profit constant, schedule)
    Equilibrium {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Number of sampled schedule quantiles
        #[arg(long, default_value_t = equilibrium::DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Compensating minority network parameters for offer-share parity
    Parity {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Expected wages per group and the welfare gap
    WelfareGap {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Estimate model parameters from friendship-nomination CSVs
    Calibrate {
        /// People CSV: ego_id,group,alters (semicolon-separated)
        #[arg(long)]
        people: PathBuf,
        /// Directed-edge CSV: src,dst
        #[arg(long)]
        edges: PathBuf,
        /// Write the JSON result here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Finite-population Monte Carlo check of the analytic limits
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10_000)]
        n_firms: usize,
        #[arg(long, default_value_t = 20)]
        replications: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Emit figure data series as CSV
    Sweep {
        /// Which figure to emit: 2 (parity), 3 (welfare gap), 4 (homophily)
        #[arg(long)]
        figure: u8,
        /// Parameter to vary (figures 2 and 3)
        #[arg(long, default_value = "delta")]
        vary: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 44)]
        steps: usize,
        /// Population share for figure 4
        #[arg(long, default_value_t = 0.8)]
        w: f64,
        /// Output file; defaults to stdout, or `figureN.csv` under
        /// $REFERRAL_MARKET_OUT_DIR when that is set
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
}

fn print_value(v: f64) -> String {
    // Shortest round-trip representation: '.' decimal, no separators.
    format!("{v}")
}

fn render<T: serde::Serialize>(value: &T, format: Format, table: String) -> Result<String> {
    Ok(match format {
        Format::Table => table,
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Csv => {
            let json = serde_json::to_value(value)?;
            let mut out = String::from("key,value\n");
            flatten_json("", &json, &mut out);
            out
        }
    })
}

fn flatten_json(prefix: &str, value: &serde_json::Value, out: &mut String) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_json(&key, v, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}[{i}]"), v, out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push(',');
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
}

fn default_range(param: ModelParam) -> (f64, f64) {
    match param {
        ModelParam::Delta => (0.52, 0.95),
        ModelParam::Alpha => (0.55, 1.0),
        ModelParam::TauMaj | ModelParam::TauMin => (0.1, 1.0),
        ModelParam::PsiMaj | ModelParam::PsiMin => (0.52, 0.95),
    }
}

fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    let n = steps.max(2);
    (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect()
}

fn sweep_output(out: Option<PathBuf>, figure: u8, content: &str) -> Result<Option<PathBuf>> {
    let path = match out {
        Some(p) => Some(p),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(|dir| Path::new(&dir).join(format!("figure{figure}.csv"))),
    };
    match path {
        Some(p) => {
            fs::write(&p, content)?;
            Ok(Some(p))
        }
        None => {
            print!("{content}");
            Ok(None)
        }
    }
}

fn provenance(figure: u8, detail: &str) -> String {
    format!(
        "# referral-market {} figure={figure} {detail}\n",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Equilibrium { params, format, resolution } => {
            let p = params.resolve()?;
            let eq = equilibrium::solve_with_resolution(&p, resolution)?;
            let table = format!(
                "w_m2     = {}\nc        = {}\nw_m1     = {}\nw_r_max  = {}\n\
                 schedule = {} quantiles on [{}, {}]\n",
                print_value(eq.w_m2),
                print_value(eq.c),
                print_value(eq.w_m1),
                print_value(eq.w_r_max),
                eq.schedule.len(),
                print_value(eq.schedule[0].1),
                print_value(eq.schedule.last().unwrap().1),
            );
            println!("{}", render(&eq, format, table)?.trim_end());
        }
        Command::Parity { params, format } => {
            let p = params.resolve()?;
            let solution = parity::parity_solution(&p)?;
            let show = |c: &parity::Compensation| match c {
                parity::Compensation::Feasible { value, .. } => print_value(*value),
                parity::Compensation::Infeasible { unclamped } => {
                    format!("infeasible (unclamped {})", print_value(*unclamped))
                }
            };
            let table = format!(
                "tau_min_eq = {}\npsi_min_eq = {}\n",
                show(&solution.tau_min_eq),
                show(&solution.psi_min_eq)
            );
            println!("{}", render(&solution, format, table)?.trim_end());
        }
        Command::WelfareGap { params, format } => {
            let p = params.resolve()?;
            let report = welfare::welfare_report(&p)?;
            let table = format!(
                "gamma_maj = {}\nq_maj     = {}\nq_min     = {}\new_r_maj  = {}\n\
                 ew_r_min  = {}\new_maj    = {}\new_min    = {}\nwelfare gap = {:.2}%\n",
                print_value(report.gamma_maj),
                print_value(report.q_maj),
                print_value(report.q_min),
                print_value(report.ew_r_maj),
                print_value(report.ew_r_min),
                print_value(report.ew_maj),
                print_value(report.ew_min),
                report.gap * 100.0
            );
            println!("{}", render(&report, format, table)?.trim_end());
        }
        Command::Calibrate { people, edges, output } => {
            let result = calibrate::calibrate_from_files(&people, &edges)?;
            let json = serde_json::to_string_pretty(&result)?;
            match output {
                Some(path) => fs::write(path, json)?,
                None => println!("{json}"),
            }
        }
        Command::Simulate { params, n_firms, replications, seed, format } => {
            let p = params.resolve()?;
            let schedule = equilibrium::wage_schedule(&p)?;
            let config = sim::SimConfig::new(p, n_firms, replications, seed, schedule)?;
            let report = sim::simulate(&config)?;
            let mut table = String::new();
            for (cell, stat) in crate::model::WorkerCell::ALL
                .iter()
                .zip(&report.offer_receipt_rate)
            {
                table += &format!(
                    "offer receipt {} = {} (se {})\n",
                    cell.label(),
                    print_value(stat.mean),
                    print_value(stat.se)
                );
            }
            table += &format!(
                "minority offer share = {} (se {})\ngap_hat = {} (se {})\n",
                print_value(report.minority_offer_share.mean),
                print_value(report.minority_offer_share.se),
                print_value(report.gap_hat.mean),
                print_value(report.gap_hat.se)
            );
            println!("{}", render(&report, format, table)?.trim_end());
        }
        Command::Sweep { figure, vary, from, to, steps, w, out, params } => {
            let content = match figure {
                2 | 3 => {
                    let param = ModelParam::parse(&vary).ok_or(Error::InvalidParameter {
                        field: "vary",
                        value: f64::NAN,
                        expected: "one of delta, alpha, tau_maj, tau_min, psi_maj, psi_min",
                    })?;
                    let (lo, hi) = default_range(param);
                    let grid = grid(from.unwrap_or(lo), to.unwrap_or(hi), steps);
                    // Figure default: every parameter not being varied is 0.8.
                    let figure_base = NetworkParams::equal_magnitude(0.8, 0.8, 0.8, 0.8).unwrap();
                    let base = params.resolve_or(&figure_base)?;
                    if figure == 2 {
                        figure2_csv(param, &grid, &base)?
                    } else {
                        figure3_csv(param, &grid, &base)?
                    }
                }
                4 => figure4_csv(w, steps)?,
                other => {
                    return Err(Error::InvalidParameter {
                        field: "figure",
                        value: other as f64,
                        expected: "2, 3, or 4",
                    })
                }
            };
            if let Some(path) = sweep_output(out, figure, &content)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn figure2_csv(param: ModelParam, grid: &[f64], base: &NetworkParams) -> Result<String> {
    let rows = parity::parity_sweep(param, grid, base)?;
    let mut out = provenance(
        2,
        &format!(
            "vary={} base=({},{},{},{},{},{})",
            param.name(),
            base.delta(),
            base.alpha(),
            base.tau_maj(),
            base.tau_min(),
            base.psi_maj(),
            base.psi_min()
        ),
    );
    out += &format!("{},tau_min_eq,tau_min_feasible,psi_min_eq,psi_min_feasible\n", param.name());
    for row in rows {
        let cell = |c: &parity::Compensation| {
            c.value().map(print_value).unwrap_or_default()
        };
        out += &format!(
            "{},{},{},{},{}\n",
            print_value(row.value),
            cell(&row.tau_min_eq),
            row.tau_min_eq.is_feasible(),
            cell(&row.psi_min_eq),
            row.psi_min_eq.is_feasible()
        );
    }
    Ok(out)
}

fn figure3_csv(param: ModelParam, grid: &[f64], base: &NetworkParams) -> Result<String> {
    let rows = welfare::welfare_sweep(param, grid, base)?;
    let mut out = provenance(
        3,
        &format!(
            "vary={} base=({},{},{},{},{},{})",
            param.name(),
            base.delta(),
            base.alpha(),
            base.tau_maj(),
            base.tau_min(),
            base.psi_maj(),
            base.psi_min()
        ),
    );
    out += &format!("{},welfare_gap\n", param.name());
    for (value, gap) in rows {
        out += &format!("{},{}\n", print_value(value), print_value(gap));
    }
    Ok(out)
}

fn figure4_csv(w: f64, steps: usize) -> Result<String> {
    let mut out = provenance(4, &format!("w={w}"));
    out += "psi,phi,linear\n";
    for psi in grid(0.5, 0.9999, steps.max(2)) {
        let phi = crate::model::homophily_share(w, psi)?;
        let linear = w + (1.0 - w) * (psi - 0.5) / 0.5;
        out += &format!("{},{},{}\n", print_value(psi), print_value(phi), print_value(linear));
    }
    Ok(out)
}
