//! Run configuration: a TOML file with a few fixed sections.
//!
//! ```toml
//! seed = 7
//! n = 1000
//!
//! [output]
//! path = "paths.csv"
//! format = "csv"
//!
//! [kernel]
//! family = "arcsine"
//!
//! [driver]
//! family = "gamma"
//! theta = 1.0
//! ```
//!
//! Unknown keys anywhere are rejected, all of them in one message.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use qclock::bdlp::{self, CgmyParams, CgmyVariant, DesignOutput, Preset, TargetLaw};
use qclock::ggc::SamplerPath;
use qclock::levy::{psi_from_rho, FnExponent, LaplaceExponent, SubordinatorSpec};
use qclock::{Law, QuantileFamily, QuantileFunction, SpecialVariable};

pub const SCHEMA_VERSION: u32 = 1;

/// Smallest draw count accepted for a Monte Carlo price.
pub const MIN_MC_DRAWS: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("{0}")]
    Invalid(String),
    #[error("{key}: {source}")]
    Model { key: &'static str, source: qclock::Error },
}

type CResult<T> = std::result::Result<T, ConfigError>;

fn invalid<T>(msg: impl Into<String>) -> CResult<T> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Sample,
    Design,
    Price,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sample => "sample",
            Command::Design => "design",
            Command::Price => "price",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    pub path: Option<String>,
    pub format: Option<Format>,
}

impl OutputCfg {
    /// Explicit format, else inferred from a `.csv` extension, else JSON.
    pub fn format(&self) -> Format {
        match (self.format, &self.path) {
            (Some(f), _) => f,
            (None, Some(p)) if p.ends_with(".csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCfg {
    pub family: String,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub b: Option<f64>,
    pub p: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverCfg {
    pub family: String,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub b: Option<f64>,
    pub rate: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignCfg {
    pub preset: String,
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub g: Option<f64>,
    pub m: Option<f64>,
    pub scale: Option<f64>,
    /// `paper` (default) or `tilt-consistent`.
    pub cgmy_v_variant: Option<String>,
    /// Target family for `preset = "target"` and `"short_memory"`.
    pub target: Option<String>,
    pub c: Option<f64>,
    pub b: Option<f64>,
    pub y: Option<String>,
    pub y_a: Option<f64>,
    pub y_b: Option<f64>,
    pub y_power: Option<f64>,
    pub y_p: Option<f64>,
    pub y_lambda: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateCfg {
    pub horizon: Option<f64>,
    pub points: Option<usize>,
    pub truncation: Option<f64>,
    /// Use the short-memory kernel `min(1, (t - s)/eps)` instead of the quantile kernel.
    pub short_memory_eps: Option<f64>,
    pub s0: Option<f64>,
    pub r: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleCfg {
    /// `clock` (simulated `T(t)`), `ggc` (`GGC(theta t, R)`) or `dirichlet_mean` (`M_1` with `D = R xi_p`).
    pub law: String,
    pub t: Option<f64>,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub path: Option<String>,
    pub truncation: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceCfg {
    /// `black_scholes`, `weighted_bs` or `de`.
    pub method: String,
    pub s0: f64,
    pub k: f64,
    pub r: f64,
    pub sigma: f64,
    pub tau: f64,
    pub theta: Option<f64>,
    pub antithetic: Option<bool>,
    pub truncation: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCfg {
    pub criteria: Option<Vec<u8>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub n: Option<i64>,
    pub output: Option<OutputCfg>,
    pub kernel: Option<KernelCfg>,
    pub driver: Option<DriverCfg>,
    pub design: Option<DesignCfg>,
    pub simulate: Option<SimulateCfg>,
    pub sample: Option<SampleCfg>,
    pub price: Option<PriceCfg>,
    pub verify: Option<VerifyCfg>,
}

/// Validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub n: usize,
    pub output: OutputCfg,
    pub raw: RawConfig,
    /// SHA-256 of the config text.
    pub digest: String,
}

const TOP: &[&str] = &["command", "seed", "n", "output", "kernel", "driver", "design", "simulate", "sample", "price", "verify"];
const SECTIONS: &[(&str, &[&str])] = &[
    ("output", &["path", "format"]),
    ("kernel", &["family", "delta", "alpha", "b", "p", "c"]),
    ("driver", &["family", "theta", "alpha", "c", "b", "rate"]),
    (
        "design",
        &[
            "preset", "delta", "theta", "alpha", "g", "m", "scale", "cgmy_v_variant", "target", "c", "b", "y", "y_a", "y_b", "y_power", "y_p",
            "y_lambda",
        ],
    ),
    ("simulate", &["horizon", "points", "truncation", "short_memory_eps", "s0", "r", "mu", "sigma"]),
    ("sample", &["law", "t", "theta", "p", "path", "truncation"]),
    ("price", &["method", "s0", "k", "r", "sigma", "tau", "theta", "antithetic", "truncation"]),
    ("verify", &["criteria"]),
];

fn unknown_keys(table: &toml::Table) -> Vec<String> {
    let mut bad = vec![];
    for (k, v) in table {
        if !TOP.contains(&k.as_str()) {
            bad.push(k.clone());
            continue;
        }
        if let Some((_, keys)) = SECTIONS.iter().find(|s| s.0 == k) {
            match v.as_table() {
                Some(t) => bad.extend(t.keys().filter(|x| !keys.contains(&x.as_str())).map(|x| format!("{k}.{x}"))),
                None => bad.push(format!("{k} (expected a section)")),
            }
        }
    }
    bad
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses and validates a config. `command` comes from the command line;
/// a `command` key in the file must agree with it. `seed` overrides the file.
pub fn parse_config(text: &str, command: Command, seed: Option<u64>) -> CResult<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let bad = unknown_keys(&table);
    if !bad.is_empty() {
        return Err(ConfigError::UnknownKeys(bad));
    }
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if let Some(c) = raw.command {
        if c != command {
            return invalid(format!("config is for `{}` but `{}` was requested", c.name(), command.name()));
        }
    }
    let seed = match seed.or(raw.seed) {
        Some(s) => s,
        None => return invalid("seed is required (set `seed` or pass --seed)"),
    };
    let n = match raw.n {
        Some(n) if n <= 0 => return invalid(format!("n = {n} must be positive")),
        Some(n) => n as usize,
        None => 1000,
    };
    let cfg = RunConfig { command, seed, n, output: raw.output.clone().unwrap_or_default(), raw, digest: digest(text) };
    cfg.check_sections()?;
    Ok(cfg)
}

fn need(v: Option<f64>, key: &str) -> CResult<f64> {
    match v {
        Some(x) => Ok(x),
        None => invalid(format!("missing `{key}`")),
    }
}

fn model<T>(key: &'static str, r: qclock::Result<T>) -> CResult<T> {
    r.map_err(|source| ConfigError::Model { key, source })
}

impl RunConfig {
    /// Builds every model the command needs, so bad names and parameters surface as config errors.
    fn check_sections(&self) -> CResult<()> {
        match self.command {
            Command::Simulate => {
                let s = self.simulate_cfg();
                let pos = |v: Option<f64>, key: &str| match v {
                    Some(x) if !(x > 0.0 && x.is_finite()) => invalid(format!("{key} = {x} must be positive")),
                    _ => Ok(()),
                };
                pos(s.horizon, "simulate.horizon")?;
                pos(s.truncation, "simulate.truncation")?;
                pos(s.short_memory_eps, "simulate.short_memory_eps")?;
                pos(s.s0, "simulate.s0")?;
                if s.points == Some(0) {
                    return invalid("simulate.points must be positive");
                }
                if s.short_memory_eps.is_none() {
                    self.kernel()?;
                }
                self.driver()?;
            }
            Command::Sample => {
                let s = self.sample_cfg()?;
                self.kernel()?;
                match s.law.as_str() {
                    "clock" => {
                        self.driver()?;
                    }
                    "ggc" | "dirichlet_mean" => {
                        self.sampler_path()?;
                    }
                    other => return invalid(format!("sample.law: unknown law `{other}` (expected clock, ggc or dirichlet_mean)")),
                }
            }
            Command::Design => {
                self.kernel()?;
                self.design()?;
            }
            Command::Price => {
                let p = self.price_cfg()?;
                match p.method.as_str() {
                    "black_scholes" => {}
                    "weighted_bs" => {
                        self.kernel()?;
                        self.driver()?;
                    }
                    "de" => {
                        self.kernel()?;
                        need(p.theta, "price.theta")?;
                    }
                    other => return invalid(format!("price.method: unknown method `{other}` (expected black_scholes, weighted_bs or de)")),
                }
                if p.method != "black_scholes" && self.n < MIN_MC_DRAWS {
                    return invalid(format!("price.method = {}: n = {} is below the Monte Carlo minimum of {MIN_MC_DRAWS}", p.method, self.n));
                }
                model("price", qclock::pricing::PricingInput::new(p.s0, p.k, p.r, p.sigma, p.tau))?;
            }
            Command::Verify => {
                for &id in self.criteria().iter() {
                    if !(1..=12).contains(&id) {
                        return invalid(format!("verify.criteria: no criterion {id}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn kernel(&self) -> CResult<QuantileFunction> {
        let Some(k) = &self.raw.kernel else { return invalid("missing [kernel] section") };
        let fam = match k.family.as_str() {
            "uniform" => QuantileFamily::Power { delta: 1.0 },
            "power" => QuantileFamily::Power { delta: need(k.delta, "kernel.delta")? },
            "arcsine" => QuantileFamily::Arcsine,
            "arcsine_power" => QuantileFamily::ArcsinePower { b: need(k.b, "kernel.b")? },
            "kumaraswamy" => QuantileFamily::Kumaraswamy { alpha: need(k.alpha, "kernel.alpha")?, b: need(k.b, "kernel.b")? },
            "stable_ratio" => QuantileFamily::StableRatio { alpha: need(k.alpha, "kernel.alpha")? },
            "occupation" => QuantileFamily::Occupation { alpha: need(k.alpha, "kernel.alpha")? },
            "affine_uniform" => QuantileFamily::AffineUniform { p: need(k.p, "kernel.p")? },
            "constant" => QuantileFamily::Constant(need(k.c, "kernel.c")?),
            other => return invalid(format!("kernel.family: unknown family `{other}`")),
        };
        model("kernel", QuantileFunction::new(fam))
    }

    /// The driving subordinator, either named directly or designed.
    pub fn driver(&self) -> CResult<SubordinatorSpec> {
        let Some(d) = &self.raw.driver else { return invalid("missing [driver] section") };
        let spec = match d.family.as_str() {
            "gamma" => SubordinatorSpec::gamma(need(d.theta, "driver.theta")?),
            "stable" => SubordinatorSpec::stable(need(d.alpha, "driver.alpha")?),
            "tilted_stable" => SubordinatorSpec::tilted_stable(need(d.alpha, "driver.alpha")?),
            "generalized_gamma" => SubordinatorSpec::GeneralizedGamma {
                c: need(d.c, "driver.c")?,
                alpha: need(d.alpha, "driver.alpha")?,
                b: need(d.b, "driver.b")?,
            },
            "compound_poisson_exp" => SubordinatorSpec::CompoundPoisson { rate: need(d.rate, "driver.rate")?, jump: Law::exp1() },
            "design" => return Ok(self.design()?.l_spec),
            other => return invalid(format!("driver.family: unknown family `{other}`")),
        };
        model("driver", spec.validate().map(|_| spec.clone()))
    }

    fn y_law(d: &DesignCfg) -> CResult<Law> {
        let law = match d.y.as_deref().unwrap_or("one") {
            "one" => Law::Point(1.0),
            "beta" => Law::Beta { a: need(d.y_a, "design.y_a")?, b: need(d.y_b, "design.y_b")? },
            "beta_power" => Law::power(Law::Beta { a: need(d.y_a, "design.y_a")?, b: need(d.y_b, "design.y_b")? }, need(d.y_power, "design.y_power")?),
            "geometric_exp" => Law::Special(SpecialVariable::GeometricExp { p: need(d.y_p, "design.y_p")?, lambda: need(d.y_lambda, "design.y_lambda")? }),
            other => return invalid(format!("design.y: unknown law `{other}`")),
        };
        model("design.y", law.validate().map(|_| law.clone()))
    }

    fn target(d: &DesignCfg) -> CResult<TargetLaw> {
        match d.target.as_deref() {
            Some("gamma") => model("design.target", TargetLaw::gamma(need(d.theta, "design.theta")?)),
            Some("tilted_stable") => model("design.target", TargetLaw::tilted_stable(need(d.alpha, "design.alpha")?)),
            Some("generalized_gamma") => model(
                "design.target",
                TargetLaw::generalized_gamma(need(d.c, "design.c")?, need(d.alpha, "design.alpha")?, need(d.b, "design.b")?),
            ),
            Some(other) => invalid(format!("design.target: unknown target `{other}`")),
            None => invalid("missing `design.target`"),
        }
    }

    fn cgmy_preset(d: &DesignCfg) -> CResult<Preset> {
        let variant = match d.cgmy_v_variant.as_deref().unwrap_or("paper") {
            "paper" => CgmyVariant::Paper,
            "tilt-consistent" => CgmyVariant::TiltConsistent,
            other => return invalid(format!("design.cgmy_v_variant: unknown variant `{other}` (expected paper or tilt-consistent)")),
        };
        Ok(Preset::Cgmy(CgmyParams {
            alpha: need(d.alpha, "design.alpha")?,
            g: need(d.g, "design.g")?,
            m: need(d.m, "design.m")?,
            scale: d.scale.unwrap_or(1.0),
            variant,
        }))
    }

    pub fn design(&self) -> CResult<DesignOutput> {
        let Some(d) = &self.raw.design else { return invalid("missing [design] section") };
        let delta = d.delta.unwrap_or(1.0);
        let y = Self::y_law(d)?;
        let preset = match d.preset.as_str() {
            "vg" => Preset::Vg { theta: need(d.theta, "design.theta")? },
            "nig" => Preset::Nig { alpha: need(d.alpha, "design.alpha")? },
            "cgmy" => Self::cgmy_preset(d)?,
            "short_memory" => Preset::ShortMemory(Self::target(d)?),
            "target" => return model("design", bdlp::driving_l(&Self::target(d)?, delta, &y)),
            other => return invalid(format!("design.preset: unknown preset `{other}`")),
        };
        model("design", bdlp::preset_l(&preset, delta, &y))
    }

    /// Exponent the designed clock should reproduce at `t = 1`, when known.
    /// For CGMY it is the tilted stable density, whichever mixing variant built the driver.
    pub fn design_target(&self) -> CResult<Option<Box<dyn LaplaceExponent>>> {
        let Some(d) = &self.raw.design else { return Ok(None) };
        Ok(match d.preset.as_str() {
            "vg" => Some(Box::new(model("design", TargetLaw::gamma(need(d.theta, "design.theta")?))?)),
            "nig" => Some(Box::new(model("design", TargetLaw::tilted_stable(need(d.alpha, "design.alpha")?))?)),
            "target" | "short_memory" => Some(Box::new(Self::target(d)?)),
            "cgmy" => {
                let Preset::Cgmy(params) = Self::cgmy_preset(d)? else { unreachable!() };
                Some(Box::new(FnExponent(move |w| psi_from_rho(&|s| params.tilted_rho(s), w))))
            }
            _ => None,
        })
    }

    pub fn sample_cfg(&self) -> CResult<&SampleCfg> {
        match &self.raw.sample {
            Some(s) => Ok(s),
            None => invalid("missing [sample] section"),
        }
    }

    pub fn sampler_path(&self) -> CResult<SamplerPath> {
        Ok(match self.raw.sample.as_ref().and_then(|s| s.path.as_deref()).unwrap_or("auto") {
            "auto" => SamplerPath::Auto,
            "cftp" => SamplerPath::Cftp,
            "rejection" => SamplerPath::Rejection,
            "series" => SamplerPath::Series,
            other => return invalid(format!("sample.path: unknown path `{other}`")),
        })
    }

    pub fn price_cfg(&self) -> CResult<&PriceCfg> {
        match &self.raw.price {
            Some(p) => Ok(p),
            None => invalid("missing [price] section"),
        }
    }

    pub fn simulate_cfg(&self) -> SimulateCfg {
        self.raw.simulate.clone().unwrap_or_default()
    }

    pub fn criteria(&self) -> Vec<u8> {
        self.raw.verify.as_ref().and_then(|v| v.criteria.clone()).unwrap_or_else(|| (1..=12).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 3
n = 10
[kernel]
family = "arcsine"
[driver]
family = "gamma"
theta = 1.0
"#;

    #[test]
    fn minimal_simulate_config() {
        let c = parse_config(MINIMAL, Command::Simulate, None).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.n, 10);
        assert_eq!(c.output.format(), Format::Json);
        assert!((c.kernel().unwrap().eval(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_all_named() {
        let text = format!("foo = 1\n{MINIMAL}baz = 3\n[output]\nbar = 2\n");
        let Err(ConfigError::UnknownKeys(keys)) = parse_config(&text, Command::Simulate, None) else { panic!() };
        assert!(keys.contains(&"foo".to_string()));
        assert!(keys.contains(&"output.bar".to_string()));
        assert!(keys.contains(&"driver.baz".to_string()));
        let msg = parse_config("seed = 1\nfoo = 2\n", Command::Verify, None).unwrap_err().to_string();
        assert!(msg.contains("foo"));
    }

    #[test]
    fn seed_and_n_rules() {
        let text = MINIMAL.replace("seed = 3\n", "");
        assert!(parse_config(&text, Command::Simulate, None).unwrap_err().to_string().contains("seed"));
        assert_eq!(parse_config(&text, Command::Simulate, Some(9)).unwrap().seed, 9);
        assert_eq!(parse_config(MINIMAL, Command::Simulate, Some(9)).unwrap().seed, 9);
        let text = MINIMAL.replace("n = 10", "n = 0");
        assert!(parse_config(&text, Command::Simulate, None).is_err());
    }

    #[test]
    fn bad_names_and_parameters() {
        let text = MINIMAL.replace("\"arcsine\"", "\"nope\"");
        assert!(matches!(parse_config(&text, Command::Simulate, None), Err(ConfigError::Invalid(_))));
        let text = MINIMAL.replace("theta = 1.0", "theta = -1.0");
        assert!(matches!(parse_config(&text, Command::Simulate, None), Err(ConfigError::Model { .. })));
        let text = MINIMAL.replace("seed = 3", "seed = 3\ncommand = \"price\"");
        assert!(parse_config(&text, Command::Simulate, None).is_err());
    }

    #[test]
    fn cgmy_variant_switch_selects_design_route() {
        let text = r#"
seed = 1
[kernel]
family = "uniform"
[design]
preset = "cgmy"
alpha = 0.3
g = 1.5
m = 2.5
cgmy_v_variant = "paper"
"#;
        let c = parse_config(text, Command::Design, None).unwrap();
        let d = c.design().unwrap();
        assert_eq!(d.construction, "cgmy");
        let bad = text.replace("\"paper\"", "\"other\"");
        assert!(parse_config(&bad, Command::Design, None).is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
