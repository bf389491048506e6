//! Subcommand bodies.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use geomconc::asymptotics::{
    dense_constant, regime_experiment, sparse_constant, strong_law_experiment, thermo_constant, AsymptoticsReport,
    ConstantKind,
};
use geomconc::components::{census, count_f_mode};
use geomconc::concentration::{condition_check, empirical_tails, lemma_sweep, TailOptions};
use geomconc::intensity::ThinningSampler;
use geomconc::seed::derive_seed;
use geomconc::simulate::replicate_graphs;
use geomconc::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{Echo, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sample,
    GraphStats,
    Tails,
    ConditionCheck,
    Constants,
    Regime,
    StrongLaw,
    LemmaCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::GraphStats => "graph-stats",
            Command::Tails => "tails",
            Command::ConditionCheck => "condition-check",
            Command::Constants => "constants",
            Command::Regime => "regime",
            Command::StrongLaw => "strong-law",
            Command::LemmaCheck => "lemma-check",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Validation(ConfigError),
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("output: {e}"))
    }
}

/// Config section a library error points back to.
fn error_path(cmd: Command, e: &Error) -> &'static str {
    match e {
        Error::PackingUnknown(_) => "c_s_override",
        Error::UseSimulationEstimate(_) | Error::UEnumerationInfeasible { .. } => "selector",
        Error::NotIntegrable(_) | Error::HypothesisViolation(_) | Error::WindowMassNotFinite => "model",
        Error::ConfigTooLarge(_) => "window",
        Error::HardFailure(_) => match cmd {
            Command::Tails => "r_grid",
            _ => "model",
        },
        _ => match cmd {
            Command::Constants => "constant",
            Command::Regime | Command::StrongLaw => "t_grid",
            Command::LemmaCheck => "sweep",
            _ => "model",
        },
    }
}

fn runtime(cmd: Command) -> impl Fn(Error) -> CliError {
    move |e| CliError::Runtime(format!("{}: {e}", error_path(cmd, &e)))
}

/// Validates everything the subcommand needs, runs it, writes result files
/// into `out` and returns the stdout summary.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let seed = cfg.master_seed()?;
    let rt = runtime(cmd);
    let echo = Echo::new(cmd.name(), cfg, seed);
    let name = cmd.name();
    match cmd {
        Command::Sample => {
            let (model, window) = cfg.model_on_window()?;
            let sampler = ThinningSampler::new(&model, &window).map_err(&rt)?;
            let config = sampler.sample(seed).map_err(&rt)?;
            let d = window.dim();
            let mut body = (0..d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
            body.push('\n');
            for p in config.points() {
                let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                body.push_str(&row.join(","));
                body.push('\n');
            }
            let w = Writer::new(out, echo)?;
            let path = w.csv(&format!("{name}.csv"), &body)?;
            Ok(format!("points: {}\nwrote {}", config.len(), path.display()))
        }
        Command::GraphStats => {
            let (model, window) = cfg.model_on_window()?;
            let shape = cfg.shape()?;
            let selector = cfg.selector.as_ref().map(|_| cfg.selector()).transpose()?;
            let n = cfg.n_replications.map_or(Ok(1), |_| cfg.n_replications(1))?;
            let depth = cfg.census_depth()?;
            let mode = cfg.boundary();
            let rows = replicate_graphs(&model, &window, &shape, n, seed, |g| {
                let f = selector.as_ref().map(|s| count_f_mode(g, s, mode));
                Ok((g.vertex_count(), g.edge_count(), f, census(g, depth, mode)))
            })
            .map_err(&rt)?;
            let mut stats = String::from("replication,points,edges,components,f\n");
            let mut cen = String::from("replication,kind,key,count\n");
            for (i, (v, e, f, c)) in rows.iter().enumerate() {
                let f = f.map_or(String::new(), |f| f.to_string());
                let _ = writeln!(stats, "{i},{v},{e},{},{f}", c.total_components);
                for (size, count) in &c.counts_by_size {
                    let _ = writeln!(cen, "{i},size,{size},{count}");
                }
                for (code, count) in &c.counts_by_isoclass {
                    let _ = writeln!(cen, "{i},isoclass,{}:{:x},{count}", code.k, code.code);
                }
            }
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &stats)?;
            let p2 = w.csv("census.csv", &cen)?;
            Ok(format!("replications: {n}\nwrote {}\nwrote {}", p1.display(), p2.display()))
        }
        Command::Tails => {
            let (model, window) = cfg.model_on_window()?;
            let shape = cfg.shape()?;
            let selector = cfg.selector()?;
            let grid = cfg.r_grid()?;
            let n = cfg.n_replications(geomconc::concentration::MIN_TAIL_REPLICATIONS)?;
            let opts = TailOptions {
                mode: cfg.boundary(),
                c_s_override: cfg.c_s_override,
                theoretical_mean: cfg.theoretical_mean()?,
            };
            let report = empirical_tails(&model, &window, &shape, &selector, &grid, n, seed, &opts).map_err(&rt)?;
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &report.to_csv())?;
            let p2 = w.json(&format!("{name}.json"), &report)?;
            Ok(format!(
                "mean: {}\nvariance: {} (bound {})\ndominated: {}\nwrote {}\nwrote {}",
                report.sample_mean,
                report.sample_variance,
                report.variance_bound,
                report.all_dominated(),
                p1.display(),
                p2.display()
            ))
        }
        Command::ConditionCheck => {
            let (model, window) = cfg.model_on_window()?;
            let shape = cfg.shape()?;
            let selector = cfg.selector()?;
            let n = cfg.n_replications(1)?;
            let mc = cfg.mc_points()?;
            let sampler = ThinningSampler::new(&model, &window).map_err(&rt)?;
            let mut body = String::from(
                "replication,points,f,sum_term,integral_estimate,integral_se,a,a_f,satisfied,sum_within_kf,\
                 negative_mass,negative_mass_se,negative_mass_bound,negative_mass_ok,c_s_certified\n",
            );
            let mut records = Vec::with_capacity(n);
            for i in 0..n as u64 {
                let config = sampler.sample_replication(seed, i).map_err(&rt)?;
                let mc_seed = derive_seed(derive_seed(seed, i), 1);
                let r =
                    condition_check(&config, &shape, &selector, &model, mc, mc_seed, cfg.c_s_override).map_err(&rt)?;
                let _ = writeln!(
                    body,
                    "{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    config.len(),
                    r.f,
                    r.sum_term,
                    r.integral_estimate,
                    r.integral_se,
                    r.a,
                    r.a_f,
                    r.satisfied,
                    r.sum_within_kf,
                    r.negative_mass,
                    r.negative_mass_se,
                    r.negative_mass_bound,
                    r.negative_mass_ok,
                    r.c_s_certified
                );
                records.push(r);
            }
            let ok = records.iter().filter(|r| r.satisfied && r.sum_within_kf).count();
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &body)?;
            let p2 = w.json(&format!("{name}.json"), &records)?;
            Ok(format!("satisfied: {ok}/{n}\nwrote {}\nwrote {}", p1.display(), p2.display()))
        }
        Command::Constants => {
            let model = cfg.model()?;
            let shape = cfg.shape()?;
            let selector = cfg.selector()?;
            let (kind, c) = cfg.constant_kind()?;
            let opts = cfg.constant_options()?;
            let report = match kind {
                ConstantKind::Sparse => sparse_constant(&shape, &selector, &model, &opts),
                ConstantKind::Thermodynamic => thermo_constant(&shape, &selector, &model, c.expect("checked"), &opts),
                ConstantKind::Dense => dense_constant(&shape, &selector, &model, &opts),
            }
            .map_err(&rt)?;
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &constant_csv(&report))?;
            let p2 = w.json(&format!("{name}.json"), &report)?;
            Ok(format!(
                "value: {} (se {})\nwrote {}\nwrote {}",
                report.value,
                report.std_error,
                p1.display(),
                p2.display()
            ))
        }
        Command::Regime => {
            let model = cfg.model()?;
            let shape = cfg.shape()?;
            let selector = cfg.selector()?;
            let spec = cfg.regime_spec()?;
            let n = cfg.n_replications(1)?;
            let opts = cfg.regime_options()?;
            let table = regime_experiment(&spec, &shape, &selector, &model, n, seed, &opts).map_err(&rt)?;
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &table.to_csv())?;
            let p2 = w.json(&format!("{name}.json"), &table)?;
            Ok(format!(
                "regime: {:?}\nconstant: {}\nfinal_gap: {}\nwrote {}\nwrote {}",
                table.regime,
                table.constant.value,
                table.final_gap(),
                p1.display(),
                p2.display()
            ))
        }
        Command::StrongLaw => {
            let model = cfg.model()?;
            let shape = cfg.shape()?;
            let selector = cfg.selector()?;
            let spec = cfg.regime_spec()?;
            let opts = cfg.regime_options()?;
            let table = strong_law_experiment(&spec, &shape, &selector, &model, seed, &opts).map_err(&rt)?;
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &table.to_csv())?;
            let p2 = w.json(&format!("{name}.json"), &table)?;
            Ok(format!(
                "regime: {:?}\ngrowth_ok: {}\nbottom_quartile_max: {}\ntop_quartile_max: {}\ntrend_ok: {}\nwrote {}\nwrote {}",
                table.regime,
                table.growth_ok,
                table.bottom_quartile_max,
                table.top_quartile_max,
                table.trend_ok(),
                p1.display(),
                p2.display()
            ))
        }
        Command::LemmaCheck => {
            let (n, a, z) = cfg.sweep()?;
            let s = lemma_sweep(n, a, z);
            let body = format!(
                "points,lemma_violations,rearrangement_violations,max_lemma_ratio,a_max,z_max\n{},{},{},{},{},{}\n",
                s.points, s.lemma_violations, s.rearrangement_violations, s.max_lemma_ratio, s.a_max, s.z_max
            );
            let w = Writer::new(out, echo)?;
            let p1 = w.csv(&format!("{name}.csv"), &body)?;
            let p2 = w.json(&format!("{name}.json"), &s)?;
            Ok(format!(
                "points: {}\nviolations: {}\nwrote {}\nwrote {}",
                s.points,
                s.lemma_violations + s.rearrangement_violations,
                p1.display(),
                p2.display()
            ))
        }
    }
}

fn constant_csv(r: &AsymptoticsReport) -> String {
    let kind = serde_json::to_value(r.constant).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let x1 = serde_json::to_value(r.x1_method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let vol = serde_json::to_value(r.volume_method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    format!(
        "constant,value,std_error,integrand_evals,x1_method,volume_method\n{kind},{},{},{},{x1},{vol}\n",
        r.value, r.std_error, r.integrand_evals
    )
}
