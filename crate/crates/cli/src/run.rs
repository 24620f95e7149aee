//! Command implementations and output writers.

use std::fmt::Write as _;

use rand::RngCore;
use serde::Serialize;
use serde_json::{json, Value};

use qclock::clock::{self, ClockSpec, PriceParams, SimSettings};
use qclock::ggc::{double_cftp, sample_m1, DirichletMeanLaw, GgcSampler, RejectionSampler, SamplerPath};
use qclock::levy::{clock_psi, psi_eval, GgcSpec};
use qclock::mc::{mean_se, par_draws};
use qclock::pricing::{self, McOptions, PriceRecord, PricingInput};
use qclock::suite::{self, CriterionReport};
use qclock::Law;

use crate::config::{Command, ConfigError, Format, RunConfig, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numeric(#[from] qclock::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{failed} of {total} criteria failed")]
    Verification { failed: usize, total: usize },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) | RunError::Io { .. } => 3,
            RunError::Verification { .. } => 4,
        }
    }
}

/// Text produced by a command, plus lines for the terminal.
pub struct Outcome {
    pub body: String,
    pub console: Vec<String>,
    pub failure: Option<RunError>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, RunError> {
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::Sample => sample(cfg),
        Command::Design => design(cfg),
        Command::Price => price(cfg),
        Command::Verify => Ok(verify(cfg)),
    }
}

fn envelope(cfg: &RunConfig, result: Value) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "config_digest": cfg.digest,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json values always serialize");
    s.push('\n');
    s
}

fn csv_header(cfg: &RunConfig, columns: &str) -> String {
    format!("# qclock schema {SCHEMA_VERSION} {} seed {} config {}\n{columns}\n", cfg.command.name(), cfg.seed, cfg.digest)
}

fn done(body: String) -> Result<Outcome, RunError> {
    Ok(Outcome { body, console: vec![], failure: None })
}

#[derive(Serialize)]
struct PathOut {
    times: Vec<f64>,
    values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_prices: Option<Vec<f64>>,
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = cfg.simulate_cfg();
    let horizon = s.horizon.unwrap_or(1.0);
    let points = s.points.unwrap_or(100);
    let settings = SimSettings::with_trunc(s.truncation.unwrap_or(1e-6));
    let driver = cfg.driver()?;
    let kernel = match s.short_memory_eps {
        Some(_) => None,
        None => Some(cfg.kernel()?),
    };
    let grid: Vec<f64> = (1..=points).map(|i| horizon * i as f64 / points as f64).collect();
    let price = s.sigma.map(|sigma| PriceParams { s0: s.s0.unwrap_or(1.0), r: s.r.unwrap_or(0.0), mu: s.mu.unwrap_or(0.0), sigma });
    let paths = par_draws(cfg.seed, cfg.n, |rng| {
        let skel = clock::sample_jumps(&driver, horizon, &settings, rng)?;
        let path = match (&kernel, s.short_memory_eps) {
            (Some(q), _) => clock::clock_path(q, &skel, &grid)?,
            (None, Some(eps)) => {
                let mut values = vec![0.0];
                for &t in &grid {
                    values.push(clock::short_memory_value(eps, &skel, t)?);
                }
                clock::ClockPath { times: std::iter::once(0.0).chain(grid.iter().copied()).collect(), values }
            }
            (None, None) => unreachable!("kernel is built unless short memory is requested"),
        };
        let log_prices = match &price {
            Some(p) => Some(clock::log_price_path(&path, p, rng)?.log_prices),
            None => None,
        };
        Ok(PathOut { times: path.times, values: path.values, log_prices })
    })?;
    match cfg.output.format() {
        Format::Json => {
            let terminal: Vec<f64> = paths.iter().map(|p| *p.values.last().expect("paths start at the origin")).collect();
            let (mean, se) = mean_se(&terminal);
            let variance = se.map(|s| s * s * terminal.len() as f64);
            let summary = json!({ "horizon": horizon, "terminal": terminal, "mean": mean, "variance": variance });
            done(envelope(cfg, json!({ "driver": driver.name(), "summary": summary, "paths": paths })))
        }
        Format::Csv => {
            let cols = if price.is_some() { "path,time,value,log_price" } else { "path,time,value" };
            let mut out = csv_header(cfg, cols);
            for (i, p) in paths.iter().enumerate() {
                for j in 0..p.times.len() {
                    let _ = write!(out, "{i},{},{}", p.times[j], p.values[j]);
                    if let Some(lp) = &p.log_prices {
                        let _ = write!(out, ",{}", lp[j]);
                    }
                    out.push('\n');
                }
            }
            done(out)
        }
    }
}

fn sample(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = cfg.sample_cfg()?;
    let t = s.t.unwrap_or(1.0);
    let (label, xs) = match s.law.as_str() {
        "clock" => {
            let mut spec = ClockSpec::new(cfg.kernel()?, cfg.driver()?);
            spec.settings = SimSettings::with_trunc(s.truncation.unwrap_or(1e-6));
            ("clock".to_string(), par_draws(cfg.seed, cfg.n, |rng| spec.sample_value(t, rng))?)
        }
        "ggc" => {
            let theta = s.theta.ok_or_else(|| ConfigError::Invalid("missing `sample.theta`".into()))?;
            let g = GgcSpec::new(theta, Law::Quantile(cfg.kernel()?))?;
            let sampler = GgcSampler::new(&g, t, cfg.sampler_path()?)?;
            let label = format!("ggc via {:?}", sampler.path()).to_lowercase();
            (label, par_draws(cfg.seed, cfg.n, |rng| sampler.sample(rng))?)
        }
        "dirichlet_mean" => {
            let p = s.p.ok_or_else(|| ConfigError::Invalid("missing `sample.p`".into()))?;
            let law = DirichletMeanLaw::new(p, Law::Quantile(cfg.kernel()?))?;
            let xs = match cfg.sampler_path()? {
                SamplerPath::Cftp => par_draws(cfg.seed, cfg.n, |rng| double_cftp(&law, rng))?,
                SamplerPath::Rejection => {
                    let r = RejectionSampler::new(law)?;
                    par_draws(cfg.seed, cfg.n, |rng| r.sample(rng))?
                }
                SamplerPath::Series => return Err(ConfigError::Invalid("sample.path: series applies to law = \"ggc\" only".into()).into()),
                SamplerPath::Auto => par_draws(cfg.seed, cfg.n, |rng| sample_m1(&law, rng))?,
            };
            ("dirichlet_mean".to_string(), xs)
        }
        other => return Err(ConfigError::Invalid(format!("sample.law: unknown law `{other}`")).into()),
    };
    match cfg.output.format() {
        Format::Json => done(envelope(cfg, json!({ "law": label, "t": t, "samples": xs }))),
        Format::Csv => {
            let mut out = csv_header(cfg, "sample");
            for x in xs {
                let _ = writeln!(out, "{x}");
            }
            done(out)
        }
    }
}

const DESIGN_OMEGAS: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];
const DESIGN_WARN: f64 = 1e-3;

fn design(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let d = cfg.design()?;
    let q = cfg.kernel()?;
    let target = cfg.design_target()?;
    let mut rows = vec![];
    let mut worst: Option<f64> = None;
    for w in DESIGN_OMEGAS {
        let psi_l = psi_eval(&d.l_spec, w)?;
        let clock = clock_psi(&q, &d.l_spec, 1.0, w)?;
        let tgt = match &target {
            Some(t) => Some(t.psi(w)?),
            None => None,
        };
        if let Some(v) = tgt {
            let e = (clock - v).abs() / v.abs().max(f64::MIN_POSITIVE);
            worst = Some(worst.map_or(e, |x: f64| x.max(e)));
        }
        rows.push((w, psi_l, clock, tgt));
    }
    let mut warnings = d.warnings.clone();
    if let Some(e) = worst.filter(|&e| e > DESIGN_WARN) {
        warnings.push(format!("the designed clock misses the target exponent by {e:.3e} (relative)"));
    }
    let console: Vec<String> = warnings.iter().map(|w| format!("warning: {w}")).collect();
    let body = match cfg.output.format() {
        Format::Json => {
            let table: Vec<Value> = rows.iter().map(|r| json!({ "omega": r.0, "psi_l": r.1, "clock_psi": r.2, "target_psi": r.3 })).collect();
            envelope(
                cfg,
                json!({
                    "construction": d.construction,
                    "driver": d.l_spec.name(),
                    "delta": d.delta,
                    "warnings": warnings,
                    "exponents": table,
                    "max_rel_err": worst,
                }),
            )
        }
        Format::Csv => {
            let mut out = csv_header(cfg, "omega,psi_l,clock_psi,target_psi");
            for (w, a, b, c) in rows {
                let _ = writeln!(out, "{w},{a},{b},{}", c.map(|x| x.to_string()).unwrap_or_default());
            }
            out
        }
    };
    Ok(Outcome { body, console, failure: None })
}

fn price(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let p = cfg.price_cfg()?;
    let mut input = PricingInput::new(p.s0, p.k, p.r, p.sigma, p.tau)?;
    let opts = McOptions { antithetic: p.antithetic.unwrap_or(false) };
    let params = json!({ "s0": p.s0, "k": p.k, "r": p.r, "sigma": p.sigma, "tau": p.tau, "theta": p.theta });
    let rec = match p.method.as_str() {
        "black_scholes" => PriceRecord { price: pricing::black_scholes(&input), se: None, n: 0, seed: cfg.seed, model: "black_scholes".into(), params },
        "weighted_bs" => {
            let mut clock = ClockSpec::new(cfg.kernel()?, cfg.driver()?);
            clock.settings = SimSettings::with_trunc(p.truncation.unwrap_or(1e-6));
            let t = match p.theta {
                Some(theta) => {
                    input = input.with_theta(theta)?;
                    input.tau_star()?
                }
                None => p.tau,
            };
            let draw = |r: &mut dyn RngCore| clock.sample_value(t, r);
            let m = pricing::weighted_bs_price(&draw, &input, cfg.n, cfg.seed, opts)?;
            PriceRecord { price: m.price, se: Some(m.se), n: m.n, seed: cfg.seed, model: format!("weighted_bs {}", clock.driver.name()), params }
        }
        "de" => {
            let theta = p.theta.ok_or_else(|| ConfigError::Invalid("missing `price.theta`".into()))?;
            input = input.with_theta(theta)?;
            let law = DirichletMeanLaw::new(input.p(), Law::Quantile(cfg.kernel()?))?;
            let draw = |r: &mut dyn RngCore| double_cftp(&law, r);
            let m = pricing::de_price(&draw, &input, cfg.n, cfg.seed, opts)?;
            PriceRecord { price: m.price, se: Some(m.se), n: m.n, seed: cfg.seed, model: "double_exponential".into(), params }
        }
        other => return Err(ConfigError::Invalid(format!("price.method: unknown method `{other}`")).into()),
    };
    match cfg.output.format() {
        Format::Json => done(envelope(cfg, serde_json::to_value(&rec).expect("price records serialize"))),
        Format::Csv => {
            let mut out = csv_header(cfg, "price,se,n");
            let _ = writeln!(out, "{},{},{}", rec.price, rec.se.map(|x| x.to_string()).unwrap_or_default(), rec.n);
            done(out)
        }
    }
}

fn verify(cfg: &RunConfig) -> Outcome {
    let reports: Vec<CriterionReport> = cfg.criteria().into_iter().map(|id| suite::run(id, cfg.seed)).collect();
    let console: Vec<String> = reports.iter().map(|r| r.line()).collect();
    let failed = reports.iter().filter(|r| !r.pass).count();
    let body = match cfg.output.format() {
        Format::Json => envelope(cfg, json!({ "criteria": reports, "passed": reports.len() - failed, "failed": failed })),
        Format::Csv => {
            let mut out = csv_header(cfg, "id,pass,seconds,detail");
            for r in &reports {
                let _ = writeln!(out, "{},{},{:.3},\"{}\"", r.id, r.pass, r.seconds, r.detail.replace('"', "'"));
            }
            out
        }
    };
    let failure = (failed > 0).then_some(RunError::Verification { failed, total: reports.len() });
    Outcome { body, console, failure }
}
