//! Inverse design: choose the driving subordinator `L` so that a quantile
//! clock has a prescribed marginal law.
//!
//! For a pairing `R Y = U^(1/delta)` and a target `zeta` in the `U_delta`
//! class, `psi_L(w) = E psi_Z(w Y)` with `psi_Z = psi_zeta + w psi_zeta' / delta`.
//! Catalog targets get an exact simulable `L`; everything else is returned
//! as an analytic exponent.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma as GammaDist, Poisson};
use serde::{Deserialize, Serialize};

use crate::clock::{sample_jumps, SimSettings};
use crate::error::{Error, Result, Trap};
use crate::extended::ExtendedReal;
use crate::ggc::{GgcSampler, SamplerPath};
use crate::law::Law;
use crate::levy::{psi_eval, psi_from_rho, GgcSpec, LaplaceExponent, RhoFn, SharedExponent, SharedRho, SubordinatorSpec};
use crate::numeric;

/// Which structural class a target belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    UDelta,
    SelfDecomposable,
    GgcNu,
    GgcPlus,
}

#[derive(Clone)]
pub enum TargetKind {
    /// `psi = theta log(1 + w)`.
    Gamma { theta: f64 },
    /// Levy density `c x^(-alpha-1) e^(-b x)`, `b > 0`.
    GeneralizedGamma { c: f64, alpha: f64, b: f64 },
    /// GGC with a discrete Thorin measure: atoms `(y, weight)`.
    GgcNu { atoms: Vec<(f64, f64)> },
    GgcPlus(GgcSpec),
    /// Anything else. `rho_deriv` enables the self-decomposable route.
    Analytic { name: String, class: TargetClass, psi: SharedExponent, rho: Option<SharedRho>, rho_deriv: Option<SharedRho> },
}

impl fmt::Debug for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::Gamma { theta } => write!(f, "Gamma {{ theta: {theta} }}"),
            TargetKind::GeneralizedGamma { c, alpha, b } => write!(f, "GeneralizedGamma {{ c: {c}, alpha: {alpha}, b: {b} }}"),
            TargetKind::GgcNu { atoms } => write!(f, "GgcNu {{ atoms: {atoms:?} }}"),
            TargetKind::GgcPlus(g) => write!(f, "GgcPlus({g:?})"),
            TargetKind::Analytic { name, class, .. } => write!(f, "Analytic {{ name: {name}, class: {class:?} }}"),
        }
    }
}

/// Target marginal law `zeta(1)` of the clock.
#[derive(Clone, Debug)]
pub struct TargetLaw {
    pub kind: TargetKind,
}

const OP_TARGET: &str = "TargetLaw";

impl TargetLaw {
    pub fn gamma(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(OP_TARGET, format!("theta = {theta} must be > 0")));
        }
        Ok(TargetLaw { kind: TargetKind::Gamma { theta } })
    }

    pub fn generalized_gamma(c: f64, alpha: f64, b: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && (0.0..1.0).contains(&alpha) && b > 0.0 && b.is_finite()) {
            return Err(Error::domain(OP_TARGET, format!("generalized gamma ({c}, {alpha}, {b}) needs c > 0, 0 <= alpha < 1, b > 0")));
        }
        if alpha == 0.0 {
            return Err(Error::domain(OP_TARGET, "use the gamma target when alpha = 0"));
        }
        Ok(TargetLaw { kind: TargetKind::GeneralizedGamma { c, alpha, b } })
    }

    /// `psi = (1 + w)^alpha - 1`.
    pub fn tilted_stable(alpha: f64) -> Result<Self> {
        Self::generalized_gamma(alpha / numeric::gamma(1.0 - alpha), alpha, 1.0)
    }

    pub fn ggc_nu(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|&(y, w)| !(y > 0.0 && y.is_finite() && w > 0.0 && w.is_finite())) {
            return Err(Error::domain(OP_TARGET, "Thorin atoms need positive locations and weights"));
        }
        Ok(TargetLaw { kind: TargetKind::GgcNu { atoms } })
    }

    pub fn ggc_plus(g: GgcSpec) -> Self {
        TargetLaw { kind: TargetKind::GgcPlus(g) }
    }

    pub fn analytic(name: &str, class: TargetClass, psi: Arc<dyn LaplaceExponent>, rho: Option<RhoFn>, rho_deriv: Option<RhoFn>) -> Self {
        TargetLaw {
            kind: TargetKind::Analytic { name: name.to_string(), class, psi: SharedExponent(psi), rho: rho.map(SharedRho), rho_deriv: rho_deriv.map(SharedRho) },
        }
    }

    pub fn class(&self) -> TargetClass {
        match &self.kind {
            TargetKind::Gamma { .. } | TargetKind::GgcPlus(_) => TargetClass::GgcPlus,
            TargetKind::GeneralizedGamma { .. } => TargetClass::SelfDecomposable,
            TargetKind::GgcNu { .. } => TargetClass::GgcNu,
            TargetKind::Analytic { class, .. } => *class,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            TargetKind::Gamma { theta } => format!("gamma({theta})"),
            TargetKind::GeneralizedGamma { c, alpha, b } => format!("generalized_gamma({c}, {alpha}, {b})"),
            TargetKind::GgcNu { atoms } => format!("ggc_nu({} atoms)", atoms.len()),
            TargetKind::GgcPlus(g) => format!("ggc({}, {:?})", g.theta, g.r),
            TargetKind::Analytic { name, .. } => name.clone(),
        }
    }

    /// The target itself as a subordinator, when it has a simulable form.
    pub fn subordinator(&self) -> Option<SubordinatorSpec> {
        match &self.kind {
            TargetKind::Gamma { theta } => Some(SubordinatorSpec::gamma(*theta)),
            TargetKind::GeneralizedGamma { c, alpha, b } => Some(SubordinatorSpec::GeneralizedGamma { c: *c, alpha: *alpha, b: *b }),
            TargetKind::GgcNu { atoms } => {
                let (theta, v) = nu_as_ggc(atoms);
                Some(SubordinatorSpec::Ggc(GgcSpec { theta, r: v }))
            }
            TargetKind::GgcPlus(g) => Some(SubordinatorSpec::Ggc(g.clone())),
            TargetKind::Analytic { .. } => None,
        }
    }

    pub fn rho(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("rho", format!("x = {x} must be > 0")));
        }
        match &self.kind {
            TargetKind::Gamma { theta } => Ok(theta * (-x).exp() / x),
            TargetKind::GeneralizedGamma { c, alpha, b } => Ok(c * x.powf(-alpha - 1.0) * (-b * x).exp()),
            TargetKind::GgcNu { atoms } => Ok(atoms.iter().map(|&(y, w)| w * (-x * y).exp()).sum::<f64>() / x),
            TargetKind::GgcPlus(g) => Ok(g.theta * g.r.expect(&|v| if v <= 0.0 { 0.0 } else { (-x / v).exp() })? / x),
            TargetKind::Analytic { rho, .. } => match rho {
                Some(r) => (r.0)(x),
                None => Err(Error::unsupported("rho", "target has no Levy density")),
            },
        }
    }

    pub fn rho_deriv(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("rho_deriv", format!("x = {x} must be > 0")));
        }
        match &self.kind {
            TargetKind::Gamma { theta } => Ok(-theta * (-x).exp() * (1.0 / x + 1.0 / (x * x))),
            TargetKind::GeneralizedGamma { c, alpha, b } => Ok(-c * x.powf(-alpha - 2.0) * (-b * x).exp() * (alpha + 1.0 + b * x)),
            TargetKind::GgcNu { atoms } => Ok(-atoms.iter().map(|&(y, w)| w * (-x * y).exp() * (1.0 / (x * x) + y / x)).sum::<f64>()),
            TargetKind::GgcPlus(g) => {
                let e = g.r.expect(&|v| if v <= 0.0 { 0.0 } else { (-x / v).exp() * (1.0 / (x * x) + 1.0 / (x * v)) })?;
                Ok(-g.theta * e)
            }
            TargetKind::Analytic { rho_deriv, .. } => match rho_deriv {
                Some(r) => (r.0)(x),
                None => Err(Error::unsupported("rho_deriv", "target has no Levy density derivative")),
            },
        }
    }

    /// Checks `rho'` against a central difference and, for self-decomposable
    /// classes, that `x rho(x)` is nonincreasing on a log grid.
    pub fn check_invariants(&self) -> Result<()> {
        let grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(-3.0 + 5.0 * i as f64 / 120.0)).collect();
        for &x in grid.iter().step_by(10) {
            let h = 1e-5 * x;
            let fd = (self.rho(x + h)? - self.rho(x - h)?) / (2.0 * h);
            let an = self.rho_deriv(x)?;
            if (fd - an).abs() > 1e-5 * an.abs().max(1e-300) {
                return Err(Error::invalid(OP_TARGET, format!("rho' = {an} disagrees with the finite difference {fd} at x = {x}")));
            }
        }
        if self.class() != TargetClass::UDelta {
            let mut prev = f64::INFINITY;
            for &x in &grid {
                let h = x * self.rho(x)?;
                if h > prev * (1.0 + 1e-10) {
                    return Err(Error::NotSelfDecomposable { op: OP_TARGET, msg: format!("x rho(x) increases near x = {x}") });
                }
                prev = h;
            }
        }
        Ok(())
    }
}

impl LaplaceExponent for TargetLaw {
    fn psi(&self, w: f64) -> Result<f64> {
        match &self.kind {
            TargetKind::GgcNu { atoms } => Ok(atoms.iter().map(|&(y, m)| m * (w / y).ln_1p()).sum()),
            TargetKind::Analytic { psi, .. } => psi.0.psi(w),
            _ => self.subordinator().expect("catalog target").psi(w),
        }
    }

    fn psi_deriv(&self, w: f64) -> Result<f64> {
        match &self.kind {
            TargetKind::GgcNu { atoms } => Ok(atoms.iter().map(|&(y, m)| m / (y + w)).sum()),
            TargetKind::Analytic { psi, .. } => psi.0.psi_deriv(w),
            _ => self.subordinator().expect("catalog target").psi_deriv(w),
        }
    }
}

/// `nu = sum w_i delta_(y_i)` is `GGC(theta, V)` with `theta = sum w_i` and `V = 1/y_i` w.p. `w_i / theta`.
fn nu_as_ggc(atoms: &[(f64, f64)]) -> (f64, Law) {
    let theta: f64 = atoms.iter().map(|a| a.1).sum();
    (theta, Law::Discrete(atoms.iter().map(|&(y, w)| (1.0 / y, w / theta)).collect()))
}

/// Exponent of the `U_delta` driver: `psi_Z(w) = psi(w) + w psi'(w) / delta`.
#[derive(Clone)]
pub struct UDeltaExponent {
    pub target: TargetLaw,
    pub delta: f64,
}

impl LaplaceExponent for UDeltaExponent {
    fn psi(&self, w: f64) -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(self.target.psi(w)? + w * self.target.psi_deriv(w)? / self.delta)
    }
}

fn check_delta(op: &'static str, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain(op, format!("delta = {delta} must be > 0")));
    }
    Ok(())
}

pub fn u_delta_z(target: &TargetLaw, delta: f64) -> Result<UDeltaExponent> {
    check_delta("u_delta_Z", delta)?;
    Ok(UDeltaExponent { target: target.clone(), delta })
}

/// `psi_Z` of a GGC target read off its Thorin atoms:
/// `sum w [log(1 + w/y) + (1/delta) w / (y + w)]`.
pub fn ggc_nu_psi_z(atoms: &[(f64, f64)], delta: f64, omega: f64) -> f64 {
    atoms.iter().map(|&(y, m)| m * ((omega / y).ln_1p() + omega / (delta * (y + omega)))).sum()
}

/// Levy densities of the OU driver `vartheta` and of the `U_delta` driver `Z`
/// of a self-decomposable target.
#[derive(Clone, Debug)]
pub struct SdBdlp {
    pub target: TargetLaw,
    pub delta: f64,
}

impl SdBdlp {
    /// `rho_vartheta(x) = -rho(x) - x rho'(x)`.
    pub fn rho_vartheta(&self, x: f64) -> Result<f64> {
        Ok(-self.target.rho(x)? - x * self.target.rho_deriv(x)?)
    }

    /// `rho_Z(x) = rho(x) + rho_vartheta(x) / delta`.
    pub fn rho_z(&self, x: f64) -> Result<f64> {
        Ok((1.0 - 1.0 / self.delta) * self.target.rho(x)? - x * self.target.rho_deriv(x)? / self.delta)
    }
}

pub fn sd_bdlp(target: &TargetLaw, delta: f64) -> Result<SdBdlp> {
    const OP: &str = "sd_bdlp";
    check_delta(OP, delta)?;
    let out = SdBdlp { target: target.clone(), delta };
    for i in 0..=200 {
        let x = 10f64.powf(-4.0 + 6.0 * i as f64 / 200.0);
        let v = out.rho_vartheta(x)?;
        let scale = target.rho(x)?.abs();
        if v < -1e-9 * scale {
            return Err(Error::NotSelfDecomposable { op: OP, msg: format!("rho_vartheta({x}) = {v} < 0") });
        }
    }
    Ok(out)
}

/// Result of a design: the driving subordinator and how it was obtained.
#[derive(Clone, Debug, Serialize)]
pub struct DesignOutput {
    #[serde(skip)]
    pub l_spec: SubordinatorSpec,
    pub construction: String,
    pub delta: f64,
    pub warnings: Vec<String>,
    /// `GGC(theta, W)` part plus `sum_(N(rate t)) gamma_1 W` part, when the design has that shape.
    #[serde(skip)]
    pub gplus: Option<(GgcSpec, f64)>,
}

impl DesignOutput {
    /// Compares `psi` of the design with the integral of its Levy density at three frequencies.
    pub fn check_consistency(&self, rel: f64) -> Result<()> {
        for w in [0.5, 1.0, 2.0] {
            let a = psi_eval(&self.l_spec, w)?;
            let spec = &self.l_spec;
            let b = psi_from_rho(&|s| spec.rho(s), w)?;
            if (a - b).abs() > rel * a.abs() {
                return Err(Error::invalid("DesignOutput", format!("psi({w}) = {a} but the Levy density integrates to {b}")));
            }
        }
        Ok(())
    }

    /// One draw of `L(t)`. The `GGC + compound Poisson` shape uses the exact
    /// GGC sampler for its first part; other designs use the jump skeleton.
    pub fn sample_l<G: Rng + ?Sized>(&self, t: f64, rng: &mut G) -> Result<f64> {
        if let Some((g, rate)) = &self.gplus {
            let mut x = GgcSampler::new(g, t, SamplerPath::Auto)?.sample(rng)?;
            let mean = rate * t;
            let n = if mean > 0.0 { Poisson::new(mean).map_err(|e| Error::invalid("sample_l", e.to_string()))?.sample(rng) as u64 } else { 0 };
            for _ in 0..n {
                let e: f64 = Exp1.sample(rng);
                x += e * g.r.sample(rng)?;
            }
            return Ok(x);
        }
        Ok(sample_jumps(&self.l_spec, t, &SimSettings::default(), rng)?.level(t))
    }
}

fn require_bounded_y(op: &'static str, y: &Law) -> Result<()> {
    y.validate()?;
    if y.upper_bound().is_none() {
        return Err(Error::precondition(op, "Y must be bounded"));
    }
    if y.lower_bound() < 0.0 {
        return Err(Error::precondition(op, "Y must be nonnegative"));
    }
    Ok(())
}

fn times_y(v: Law, y: &Law) -> Law {
    match y.as_point() {
        Some(c) if c == 1.0 => v,
        Some(c) => Law::scaled(v, c),
        None => Law::product(v, y.clone()),
    }
}

/// `L = GGC(theta, V Y) + sum_(N(s theta / delta)) gamma_1 V Y`.
pub fn gplus_l(theta: f64, v: Law, y: Law, delta: f64) -> Result<DesignOutput> {
    const OP: &str = "gplus_L";
    check_delta(OP, delta)?;
    v.validate()?;
    y.validate()?;
    if v.lower_bound() < 0.0 || y.lower_bound() < 0.0 {
        return Err(Error::domain(OP, "V and Y must be nonnegative"));
    }
    let w = times_y(v, &y);
    let g = GgcSpec::new(theta, w.clone())?;
    let cp = SubordinatorSpec::CompoundPoisson { rate: theta / delta, jump: Law::exp1() };
    let l_spec = SubordinatorSpec::Sum(vec![SubordinatorSpec::Ggc(g.clone()), SubordinatorSpec::marked(cp, w)]);
    Ok(DesignOutput { l_spec, construction: "ggc_plus".into(), delta, warnings: vec![], gplus: Some((g, theta / delta)) })
}

/// `rho_L(s) = (1 + alpha/delta) c_a C s^(-alpha-1) E e^(-s W) + (c_a C / delta) s^(-alpha) E[W e^(-s W)]`
/// with `W = V / Y_alpha`, `c_a = E Y^alpha` and `Y_alpha` the law of `Y` size-biased by `y^alpha`.
pub fn rate_mixture_l(c: f64, alpha: f64, v: Law, y: &Law, delta: f64) -> Result<DesignOutput> {
    const OP: &str = "rate_mixture_L";
    check_delta(OP, delta)?;
    require_bounded_y(OP, y)?;
    if !(c > 0.0 && (0.0..1.0).contains(&alpha) && alpha > 0.0) {
        return Err(Error::domain(OP, format!("need c > 0 and 0 < alpha < 1, got ({c}, {alpha})")));
    }
    let (c_a, w) = match y.as_point() {
        Some(y0) => (y0.powf(alpha), Law::scaled(v, 1.0 / y0)),
        None => {
            let c_a = y.expect(&|x| x.powf(alpha))?;
            let ya = Law::SizeBiased { base: Box::new(y.clone()), power: alpha };
            (c_a, Law::product(v, Law::power(ya, -1.0)))
        }
    };
    let l_spec = SubordinatorSpec::Sum(vec![
        SubordinatorSpec::RateMixture { c: (1.0 + alpha / delta) * c_a * c, alpha, rate: w.clone(), weighted: false },
        SubordinatorSpec::RateMixture { c: c_a * c / delta, alpha, rate: w, weighted: true },
    ]);
    Ok(DesignOutput { l_spec, construction: "rate_mixture".into(), delta, warnings: vec![], gplus: None })
}

/// Driver `L` for `target` under a pairing `R Y = U^(1/delta)`.
pub fn driving_l(target: &TargetLaw, delta: f64, y: &Law) -> Result<DesignOutput> {
    const OP: &str = "driving_L";
    check_delta(OP, delta)?;
    require_bounded_y(OP, y)?;
    match &target.kind {
        TargetKind::Gamma { theta } => gplus_l(*theta, Law::Point(1.0), y.clone(), delta),
        TargetKind::GgcPlus(g) => gplus_l(g.theta, g.r.clone(), y.clone(), delta),
        TargetKind::GgcNu { atoms } => {
            let (theta, v) = nu_as_ggc(atoms);
            gplus_l(theta, v, y.clone(), delta)
        }
        TargetKind::GeneralizedGamma { c, alpha, b } => rate_mixture_l(*c, *alpha, Law::Point(*b), y, delta),
        TargetKind::Analytic { name, .. } => {
            let z = UDeltaExponent { target: target.clone(), delta };
            let yl = y.clone();
            let psi = crate::levy::FnExponent(move |w: f64| {
                let trap = Trap::new();
                let v = yl.expect(&|x| trap.catch(z.psi(w * x)));
                trap.finish(v)
            });
            let rho = if target.rho(1.0).is_ok() && target.rho_deriv(1.0).is_ok() {
                let sd = SdBdlp { target: target.clone(), delta };
                let yl = y.clone();
                let f: RhoFn = Arc::new(move |s: f64| {
                    let trap = Trap::new();
                    let v = yl.expect(&|x| if x <= 0.0 { 0.0 } else { trap.catch(sd.rho_z(s / x)) / x });
                    trap.finish(v)
                });
                Some(SharedRho(f))
            } else {
                None
            };
            let l_spec = SubordinatorSpec::Analytic { name: format!("driver of {name}"), psi: SharedExponent(Arc::new(psi)), rho };
            Ok(DesignOutput { l_spec, construction: "u_delta".into(), delta, warnings: vec![], gplus: None })
        }
    }
}

/// Decomposition `gamma_theta = Sigma_theta(V) + GGC(theta, V)`.
#[derive(Clone, Debug)]
pub struct GammaSplit {
    /// `E[-log V]`; infinite when `V` has enough mass near zero.
    pub rate: ExtendedReal,
    /// `Sigma(V)`: compound Poisson with rate `rate` when finite, infinite activity otherwise.
    pub sigma: SubordinatorSpec,
    pub ggc: GgcSpec,
}

impl GammaSplit {
    /// Jump density of the compound Poisson part, `rho_Sigma(s) / rate`.
    pub fn jump_density(&self, s: f64) -> Result<f64> {
        match self.rate {
            ExtendedReal::Finite(r) => Ok(self.sigma.rho(s)? / r),
            ExtendedReal::PosInfinity => Err(Error::unsupported("jump_density", "Sigma(V) has infinite activity")),
        }
    }

    pub fn sample_sigma<G: Rng + ?Sized>(&self, t: f64, rng: &mut G) -> Result<f64> {
        Ok(sample_jumps(&self.sigma, t, &SimSettings::default(), rng)?.level(t))
    }
}

pub fn gamma_split(v: Law, theta: f64) -> Result<GammaSplit> {
    const OP: &str = "gamma_split";
    v.validate()?;
    if v.lower_bound() < 0.0 || v.upper_bound().is_none_or(|u| u > 1.0 + 1e-12) {
        return Err(Error::domain(OP, "V must be supported in [0, 1]"));
    }
    let rate = v.neg_log_mean()?;
    if rate == ExtendedReal::Finite(0.0) || v.as_point() == Some(1.0) {
        return Err(Error::DegenerateSplit { op: OP, msg: "E[-log V] = 0: V is identically one".into() });
    }
    let ggc = GgcSpec::new(theta, v.clone())?;
    Ok(GammaSplit { rate, sigma: SubordinatorSpec::Straddle { v }, ggc })
}

/// Which printed mixture to use for `V` in the CGMY subordinator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CgmyVariant {
    /// `V = (4 M G + B^2 gamma_alpha / gamma_(1/2)) / 2`.
    Paper,
    /// `V = (G M + B^2 gamma_alpha / gamma_(1/2)) / 2`, matching the tilt `e^(-G M s / 2)`.
    TiltConsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgmyParams {
    /// `alpha = Y / 2` of the CGMY log-price model, in `(0, 1)`.
    pub alpha: f64,
    pub g: f64,
    pub m: f64,
    /// Overall multiplier of the Levy density.
    pub scale: f64,
    pub variant: CgmyVariant,
}

impl CgmyParams {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0 && self.g > 0.0 && self.m > 0.0 && self.scale > 0.0) {
            return Err(Error::domain("cgmy", format!("invalid parameters {self:?}")));
        }
        Ok(())
    }

    fn k(&self) -> f64 {
        let a = self.alpha;
        self.scale * 2f64.powf(a) * numeric::gamma(a) / numeric::gamma(2.0 * a)
    }

    /// `B^2 / 2`.
    fn half_b2(&self) -> f64 {
        let b = 0.5 * (self.g + self.m);
        0.5 * b * b
    }

    /// The mixing variable `V` of the selected variant.
    pub fn v_law(&self) -> Law {
        let shift = match self.variant {
            CgmyVariant::Paper => 2.0 * self.m * self.g,
            CgmyVariant::TiltConsistent => 0.5 * self.m * self.g,
        };
        Law::Affine { base: Box::new(Law::BetaPrime { a: self.alpha, b: 0.5 }), scale: self.half_b2(), shift }
    }

    /// Subordinator `K s^(-alpha-1) E e^(-s V)` built from the selected `V`.
    pub fn subordinator(&self) -> SubordinatorSpec {
        SubordinatorSpec::RateMixture { c: self.k(), alpha: self.alpha, rate: self.v_law(), weighted: false }
    }

    /// The tilted form `K e^((A^2 - B^2) s / 2) s^(-alpha-1) E exp(-s (B^2/2) gamma_alpha / gamma_(1/2))`,
    /// which does not depend on the variant.
    pub fn tilted_rho(&self, s: f64) -> Result<f64> {
        let a = 0.5 * (self.g - self.m);
        let b = 0.5 * (self.g + self.m);
        let ratio = Law::BetaPrime { a: self.alpha, b: 0.5 };
        let hb = self.half_b2();
        let e = ratio.expect(&|w| (-s * hb * w).exp())?;
        Ok(self.k() * ((a * a - b * b) * s / 2.0).exp() * s.powf(-self.alpha - 1.0) * e)
    }
}

#[derive(Clone, Debug)]
pub enum Preset {
    /// Variance gamma: gamma(theta) marginals.
    Vg { theta: f64 },
    Cgmy(CgmyParams),
    /// Tilted-stable marginals `(1 + w)^alpha - 1`; NIG for `alpha = 1/2`.
    Nig { alpha: f64 },
    /// Driver `Z` with `rho_Z = -x rho'` for the short-memory kernel.
    ShortMemory(TargetLaw),
}

pub fn preset_l(preset: &Preset, delta: f64, y: &Law) -> Result<DesignOutput> {
    const OP: &str = "preset_L";
    check_delta(OP, delta)?;
    require_bounded_y(OP, y)?;
    let mut out = match preset {
        Preset::Vg { theta } => gplus_l(*theta, Law::Point(1.0), y.clone(), delta)?,
        Preset::Cgmy(p) => {
            p.validate()?;
            let mut out = rate_mixture_l(p.k(), p.alpha, p.v_law(), y, delta)?;
            if p.alpha >= 0.5 {
                out.warnings.push(format!(
                    "alpha = {} >= 1/2: E[V^alpha] is infinite, so the s^(-alpha) E[W e^(-sW)] term has infinite mass and is not compound Poisson",
                    p.alpha
                ));
            }
            out
        }
        Preset::Nig { alpha } => {
            let a = *alpha;
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::domain(OP, format!("alpha = {a} must lie in (0, 1)")));
            }
            match y.as_point() {
                Some(y0) if y0 == 1.0 => {
                    let spec = SubordinatorSpec::Sum(vec![
                        SubordinatorSpec::time_scaled(SubordinatorSpec::tilted_stable(a), 1.0 + a / delta),
                        SubordinatorSpec::CompoundPoisson { rate: a / delta, jump: Law::Gamma { shape: 1.0 - a, scale: 1.0 } },
                    ]);
                    DesignOutput { l_spec: spec, construction: "nig".into(), delta, warnings: vec![], gplus: None }
                }
                _ => rate_mixture_l(a / numeric::gamma(1.0 - a), a, Law::Point(1.0), y, delta)?,
            }
        }
        Preset::ShortMemory(target) => {
            if delta != 1.0 || y.as_point() != Some(1.0) {
                return Err(Error::precondition(OP, "the short-memory driver is defined for delta = 1 and Y = 1"));
            }
            match &target.kind {
                TargetKind::GeneralizedGamma { c, alpha, b } => {
                    // -x rho'(x) = (1 + alpha) rho(x) + c b x^(-alpha) e^(-b x)
                    let (c, a, b) = (*c, *alpha, *b);
                    let spec = SubordinatorSpec::Sum(vec![
                        SubordinatorSpec::GeneralizedGamma { c: (1.0 + a) * c, alpha: a, b },
                        SubordinatorSpec::CompoundPoisson {
                            rate: c * b * numeric::gamma(1.0 - a) / b.powf(1.0 - a),
                            jump: Law::Gamma { shape: 1.0 - a, scale: 1.0 / b },
                        },
                    ]);
                    DesignOutput { l_spec: spec, construction: "short_memory".into(), delta, warnings: vec![], gplus: None }
                }
                _ => {
                    sd_bdlp(target, 1.0)?;
                    driving_l(target, 1.0, y)?
                }
            }
        }
    };
    out.construction = match preset {
        Preset::Vg { .. } => "vg",
        Preset::Cgmy(_) => "cgmy",
        Preset::Nig { .. } => "nig",
        Preset::ShortMemory(_) => "short_memory",
    }
    .into();
    Ok(out)
}

/// Draw of `gamma_shape`, used by identity checks.
pub fn gamma_draw<G: Rng + ?Sized>(shape: f64, rng: &mut G) -> Result<f64> {
    Ok(GammaDist::new(shape, 1.0).map_err(|e| Error::invalid("gamma_draw", e.to_string()))?.sample(rng))
}
