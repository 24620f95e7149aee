//! Exact sampling of `GGC(theta, R)` variables.
//!
//! A `GGC(theta, R)` variable is `gamma_theta * M_theta` with `M_theta` the
//! Dirichlet mean of `R`. Splitting `theta t = n p` with `p <= 1` reduces
//! everything to the unit-mass mean `M~_1` of `D = R xi_p`, which has the
//! Cifarelli-Regazzini density and is the fixed point of
//! `M = U M + (1 - U) D`. The latter is sampled perfectly by a double
//! coupling-from-the-past scheme whenever `D` is bounded.

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Gamma as GammaDist};

use crate::clock::{sample_jumps, SimSettings};
use crate::error::{Error, Result};
use crate::law::Law;
use crate::levy::{GgcSpec, SubordinatorSpec};
use crate::numeric::{self, QuadTol};
use crate::quantiles::SpecialVariable;

const PI: f64 = std::f64::consts::PI;

/// Iteration cap for the backward phase and for each forward step.
pub const MAX_CFTP_STEPS: u64 = 10_000_000;
/// Proposal cap for the rejection path.
pub const MAX_REJECTION_PROPOSALS: u64 = 10_000_000;
/// The rejection path refuses envelopes accepting less often than this.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

/// How the density of `M~_1` is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum DensityModel {
    /// Cifarelli-Regazzini form from `F_R` and `Psi_R`.
    Generic,
    /// Closed form for `R = O_alpha`.
    Occupation { alpha: f64 },
}

/// Law of `M~_1 = U M~_1 + (1 - U) R xi_p`, i.e. the Dirichlet mean of
/// `GGC(p, R)` seen as `GGC(1, R xi_p)`.
#[derive(Clone, Debug)]
pub struct DirichletMeanLaw {
    pub p: f64,
    pub r: Law,
    pub model: DensityModel,
    /// Declared bound `c` on `D`. Defaults to the support bound of `R`.
    pub bound: Option<f64>,
}

impl DirichletMeanLaw {
    pub fn new(p: f64, r: Law) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain("DirichletMeanLaw", format!("p = {p} must lie in (0, 1]")));
        }
        r.validate()?;
        if r.lower_bound() < 0.0 {
            return Err(Error::domain("DirichletMeanLaw", "R must be nonnegative"));
        }
        let bound = r.upper_bound();
        Ok(DirichletMeanLaw { p, r, model: DensityModel::Generic, bound })
    }

    /// `R = O_alpha`, with the closed-form density.
    pub fn occupation(alpha: f64, p: f64) -> Result<Self> {
        let mut law = Self::new(p, Law::Special(SpecialVariable::Occupation { alpha }))?;
        law.model = DensityModel::Occupation { alpha };
        Ok(law)
    }

    /// Override the declared bound on `D`.
    pub fn with_bound(mut self, c: f64) -> Self {
        self.bound = Some(c);
        self
    }

    /// One draw of `D = R xi_p`.
    pub fn sample_d<G: Rng + ?Sized>(&self, rng: &mut G) -> Result<f64> {
        if self.p < 1.0 && rng.random::<f64>() >= self.p {
            return Ok(0.0);
        }
        self.r.sample(rng)
    }
}

/// `Psi_R(x) = E[log|x - R| 1(R != x)]`.
pub fn psi_r(x: f64, r: &Law) -> Result<f64> {
    const OP: &str = "psi_r";
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(OP, format!("x = {x} must be > 0")));
    }
    if let Some(c) = r.as_point() {
        return Ok(if c == x { 0.0 } else { (x - c).abs().ln() });
    }
    if let Law::Discrete(atoms) = r {
        return Ok(atoms.iter().filter(|a| a.0 != x && a.1 > 0.0).map(|a| a.1 * (x - a.0).abs().ln()).sum());
    }
    let tol = QuadTol::new(1e-12, 1e-8);
    let lg = |y: f64| {
        let d = (x - y).abs();
        if d > 0.0 {
            d.ln()
        } else {
            f64::MIN_POSITIVE.ln()
        }
    };
    if let (Some(f), Some(_)) = (r.cdf(x), r.quantile(0.5)) {
        // integrate log|x - Q(u)| over u, skipping the atom at x; near u = F(x)
        // the substitution u = F -+ (width) w^2 turns the log singularity into w log w
        let hi = f.clamp(0.0, 1.0);
        let lo = (hi - r.atom(x)).clamp(0.0, hi);
        let q = |u: f64| r.quantile(u).unwrap_or(f64::NAN);
        let left = if lo > 0.0 { numeric::integrate(OP, &|w: f64| 2.0 * lo * w * lg(q(lo - lo * w * w)), 0.0, 1.0, tol)? } else { 0.0 };
        let width = 1.0 - hi;
        let right = if width > 0.0 { numeric::integrate(OP, &|w: f64| 2.0 * width * w * lg(q(hi + width * w * w)), 0.0, 1.0, tol)? } else { 0.0 };
        return Ok(left + right);
    }
    if r.pdf(x).is_some() {
        let lo = r.lower_bound();
        let hi = r.upper_bound().unwrap_or(f64::INFINITY);
        let g = |y: f64| r.pdf(y).unwrap_or(f64::NAN) * lg(y);
        let mut total = 0.0;
        if x > lo {
            total += numeric::integrate(OP, &|w: f64| 2.0 * (x - lo) * w * g(x - (x - lo) * w * w), 0.0, 1.0, tol)?;
        }
        if hi.is_finite() {
            if hi > x {
                total += numeric::integrate(OP, &|w: f64| 2.0 * (hi - x) * w * g(x + (hi - x) * w * w), 0.0, 1.0, tol)?;
            }
        } else {
            total += numeric::integrate(OP, &|w: f64| 2.0 * w * g(x + w * w), 0.0, 1.0, tol)?;
            total += numeric::integrate_to_inf(OP, &g, x + 1.0, tol)?;
        }
        return Ok(total);
    }
    Err(Error::unsupported(OP, "R needs a cdf and a quantile or a density"))
}

/// Density of `M~_1 = O~_(alpha,p)` (`R = O_alpha`), `0 < y < 1`.
///
/// The angle is taken on the continuous branch in `(0, pi)`; it agrees with
/// the principal arctangent whenever `(1-y)^alpha cos(pi alpha) + y^alpha > 0`,
/// which always holds for `alpha <= 1/2`.
pub fn occupation_density(alpha: f64, p: f64, y: f64) -> f64 {
    if !(y > 0.0 && y < 1.0) {
        return 0.0;
    }
    let a = (1.0 - y).powf(alpha);
    let b = y.powf(alpha);
    let (s, c) = (PI * alpha).sin_cos();
    let angle = (a * s).atan2(a * c + b);
    let base = b * b + 2.0 * a * b * c + a * a;
    2f64.powf(p / alpha) / PI * y.powf(p - 1.0) * ((p / alpha) * angle).sin() * base.powf(-p / (2.0 * alpha))
}

/// Density of `M~_1` at `x`.
pub fn m1_density(x: f64, law: &DirichletMeanLaw) -> Result<f64> {
    const OP: &str = "m1_density";
    let p = law.p;
    if let DensityModel::Occupation { alpha } = law.model {
        return Ok(occupation_density(alpha, p, x));
    }
    if law.r.as_point().is_some() && p >= 1.0 {
        return Err(Error::unsupported(OP, "M~_1 is degenerate when R is constant and p = 1"));
    }
    if x <= 0.0 || law.r.upper_bound().is_some_and(|b| x >= b) {
        return Ok(0.0);
    }
    let f = law.r.cdf(x).ok_or_else(|| Error::unsupported(OP, "R has no cdf"))?;
    let psi = psi_r(x, &law.r)?;
    // sin(pi F_D(x)) with F_D = 1 - p + p F_R(x)
    let s = (PI * p * (1.0 - f)).sin().max(0.0);
    Ok(x.powf(p - 1.0) / PI * s * (-p * psi).exp())
}

/// Rejection sampler for `M~_1` against `b beta(p, 1 - kappa)`, where `b`
/// bounds `R` and `kappa = p P(R = b)` absorbs the singularity at `b`.
#[derive(Clone, Debug)]
pub struct RejectionSampler {
    law: DirichletMeanLaw,
    b: f64,
    kappa: f64,
    /// Envelope constant: `sup f / g` found on a grid, inflated by 5%.
    m: f64,
    log_norm: f64,
    proposal: Option<BetaDist<f64>>,
}

impl RejectionSampler {
    pub fn new(law: DirichletMeanLaw) -> Result<Self> {
        const OP: &str = "sample_m1";
        let b = law
            .r
            .upper_bound()
            .ok_or_else(|| Error::unsupported(OP, "the rejection envelope needs R bounded; use the series path"))?;
        let p = law.p;
        let kappa = if law.model == DensityModel::Generic { p * law.r.atom(b) } else { 0.0 };
        let mut s = RejectionSampler { law, b, kappa, m: 1.0, log_norm: 0.0, proposal: None };
        if kappa >= 1.0 - 1e-12 || (s.law.r.as_point().is_some() && p >= 1.0) {
            return Ok(s);
        }
        s.log_norm = numeric::ln_beta(p, 1.0 - kappa) + (p - kappa) * b.ln();
        s.proposal = Some(BetaDist::new(p, 1.0 - kappa).map_err(|e| Error::invalid(OP, e.to_string()))?);
        let n = 400;
        let mut m = 0.0f64;
        for i in 0..n {
            // cosine spacing crowds points near both ends
            let v = (i as f64 + 0.5) / n as f64;
            let x = b * 0.5 * (1.0 - (PI * v).cos());
            m = m.max(s.ratio(x)?);
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::EnvelopeFailure { op: OP, msg: format!("density to envelope ratio has supremum {m}") });
        }
        s.m = 1.05 * m;
        if s.acceptance() < MIN_ACCEPTANCE {
            return Err(Error::EnvelopeFailure {
                op: OP,
                msg: format!("acceptance {:.2e} is below {MIN_ACCEPTANCE:e}; use the CFTP path", s.acceptance()),
            });
        }
        Ok(s)
    }

    /// `f(x) / g(x)` with the common `x^(p-1)` cancelled.
    fn ratio(&self, x: f64) -> Result<f64> {
        if x <= 0.0 || x >= self.b {
            return Ok(0.0);
        }
        let p = self.law.p;
        let core = match self.law.model {
            DensityModel::Occupation { alpha } => occupation_density(alpha, p, x) * x.powf(1.0 - p),
            DensityModel::Generic => {
                let f = self.law.r.cdf(x).ok_or_else(|| Error::unsupported("sample_m1", "R has no cdf"))?;
                (PI * p * (1.0 - f)).sin().max(0.0) / PI * (-p * psi_r(x, &self.law.r)?).exp()
            }
        };
        Ok(core * (self.b - x).powf(self.kappa) * self.log_norm.exp())
    }

    /// Expected acceptance probability `1 / m`.
    pub fn acceptance(&self) -> f64 {
        1.0 / self.m
    }

    pub fn law(&self) -> &DirichletMeanLaw {
        &self.law
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> Result<f64> {
        let Some(prop) = &self.proposal else {
            // all of the mass of D sits at b
            return Ok(self.b);
        };
        for _ in 0..MAX_REJECTION_PROPOSALS {
            let x = self.b * prop.sample(rng);
            if rng.random::<f64>() * self.m < self.ratio(x)? {
                return Ok(x);
            }
        }
        Err(Error::SamplerStuck { op: "sample_m1", proposals: MAX_REJECTION_PROPOSALS, acceptance: self.acceptance() })
    }
}

/// One rejection draw of `M~_1`. Builds the envelope on every call; keep a
/// [`RejectionSampler`] around for repeated draws.
pub fn sample_m1<G: Rng + ?Sized>(law: &DirichletMeanLaw, rng: &mut G) -> Result<f64> {
    RejectionSampler::new(law.clone())?.sample(rng)
}

/// Perfect draw of `M~_1` by double coupling from the past. Needs `D <= c`.
pub fn double_cftp<G: Rng + ?Sized>(law: &DirichletMeanLaw, rng: &mut G) -> Result<f64> {
    const OP: &str = "double_cftp";
    let c = law.bound.ok_or_else(|| Error::precondition(OP, "D has no declared bound"))?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::precondition(OP, format!("bound c = {c} must be positive and finite")));
    }
    let draw = |rng: &mut G| -> Result<f64> {
        let d = law.sample_d(rng)?;
        if !(0.0..=c * (1.0 + 1e-12)).contains(&d) {
            return Err(Error::precondition(OP, format!("draw D = {d} falls outside [0, c = {c}]")));
        }
        Ok(d)
    };

    // backward phase: i = -1, -2, ... until the minorising component is chosen
    let mut stored: Vec<(f64, f64)> = Vec::new();
    let mut start = None;
    for _ in 0..MAX_CFTP_STEPS {
        let u: f64 = rng.random();
        let d = draw(rng)?;
        let d2 = draw(rng)?;
        if u <= (d - d2).abs() / (2.0 * c) {
            start = Some(d.min(d2) + 2.0 * c * u);
            break;
        }
        stored.push((d, d2));
    }
    let mut m = start.ok_or(Error::SamplerStuck { op: OP, proposals: MAX_CFTP_STEPS, acceptance: 0.0 })?;

    // forward phase: replay in reverse generation order, sampling the residual kernel
    let inv_c = 1.0 / c;
    for &(d, d2) in stored.iter().rev() {
        let (lo, hi) = (d.min(d2), d.max(d2));
        let term = |x: f64, e: f64| {
            let (a, b) = if m <= e { (m, e) } else { (e, m) };
            if x >= a && x <= b {
                1.0 / (e - m).abs()
            } else {
                0.0
            }
        };
        let mut next = None;
        for _ in 0..MAX_CFTP_STEPS {
            let u2: f64 = rng.random();
            let pick = if rng.random::<bool>() { d } else { d2 };
            let u: f64 = rng.random();
            let x = (1.0 - u) * m + u * pick;
            if x < lo || x > hi || u2 * (term(x, d) + term(x, d2)) > inv_c {
                next = Some(x);
                break;
            }
        }
        m = next.ok_or(Error::SamplerStuck { op: OP, proposals: MAX_CFTP_STEPS, acceptance: 0.0 })?;
    }
    Ok(m)
}

/// Which sampler produces the unit-mass pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerPath {
    /// Closed form for constant `R`, CFTP for bounded `R`, series otherwise.
    #[default]
    Auto,
    Cftp,
    Rejection,
    /// Truncated jump series of the GGC subordinator (approximate).
    Series,
}

/// Sampler of `GGC(theta t, R)` built once for repeated draws.
#[derive(Clone, Debug)]
pub struct GgcSampler {
    spec: GgcSpec,
    t: f64,
    n: usize,
    piece: DirichletMeanLaw,
    path: SamplerPath,
    rejection: Option<RejectionSampler>,
    settings: SimSettings,
    /// Constant `R` under the automatic path: `c gamma(theta t)` directly.
    closed: bool,
}

impl GgcSampler {
    pub fn new(g: &GgcSpec, t: f64, path: SamplerPath) -> Result<Self> {
        let mass = g.theta * t;
        Self::with_pieces(g, t, mass.ceil().max(1.0) as usize, path)
    }

    /// Split `theta t` into `n` equal pieces, each of mass at most one.
    pub fn with_pieces(g: &GgcSpec, t: f64, n: usize, path: SamplerPath) -> Result<Self> {
        const OP: &str = "ggc_sample";
        let mass = g.theta * t;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(OP, format!("theta t = {mass} must be > 0")));
        }
        if (n as f64) < mass * (1.0 - 1e-12) {
            return Err(Error::domain(OP, format!("{n} pieces cannot carry mass {mass} at most one each")));
        }
        let p = (mass / n as f64).min(1.0);
        let piece = DirichletMeanLaw::new(p, g.r.clone())?;
        let bounded = piece.bound.is_some();
        let closed = path == SamplerPath::Auto && g.r.as_point().is_some();
        let path = match path {
            SamplerPath::Auto if g.r.as_point().is_some() || bounded => SamplerPath::Cftp,
            SamplerPath::Auto => SamplerPath::Series,
            other => other,
        };
        let rejection = if path == SamplerPath::Rejection { Some(RejectionSampler::new(piece.clone())?) } else { None };
        if path == SamplerPath::Cftp && !bounded {
            return Err(Error::precondition(OP, "CFTP needs R bounded"));
        }
        Ok(GgcSampler { spec: g.clone(), t, n, piece, path, rejection, settings: SimSettings::default(), closed })
    }

    pub fn path(&self) -> SamplerPath {
        self.path
    }

    /// Number of unit-mass pieces `n = ceil(theta t)`.
    pub fn pieces(&self) -> usize {
        self.n
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> Result<f64> {
        if let (true, Some(c)) = (self.closed, self.spec.r.as_point()) {
            // GGC(m, c) is c gamma(m)
            let g = GammaDist::new(self.spec.theta * self.t, 1.0).map_err(|e| Error::invalid("ggc_sample", e.to_string()))?;
            return Ok(c * g.sample(rng));
        }
        if self.path == SamplerPath::Series {
            let spec = SubordinatorSpec::Ggc(self.spec.clone());
            return Ok(sample_jumps(&spec, self.t, &self.settings, rng)?.level(self.t));
        }
        let mut total = 0.0;
        for _ in 0..self.n {
            let m = match &self.rejection {
                Some(s) => s.sample(rng)?,
                None => double_cftp(&self.piece, rng)?,
            };
            let e: f64 = rand_distr::Exp1.sample(rng);
            total += e * m;
        }
        Ok(total)
    }
}

/// One draw of `GGC(theta t, R)` as `sum_k gamma_1^(k) M~_1^(k)`.
pub fn ggc_sample<G: Rng + ?Sized>(g: &GgcSpec, t: f64, path: SamplerPath, rng: &mut G) -> Result<f64> {
    GgcSampler::new(g, t, path)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::stream;
    use crate::quantiles::QuantileFunction;

    fn norm(law: &DirichletMeanLaw) -> f64 {
        let b = law.r.upper_bound().unwrap();
        let p = law.p;
        // x^(p-1) singularity at 0 removed by the origin-power map
        let h = |x: f64| m1_density(x, law).unwrap() * x.powf(1.0 - p);
        let half = numeric::integrate_origin_power("norm", &h, 0.5 * b, p, QuadTol::new(1e-12, 1e-9)).unwrap();
        let g = |w: f64| {
            let x = b - 0.5 * b * w * w;
            m1_density(x, law).unwrap() * b * w
        };
        half + numeric::integrate("norm", &g, 0.0, 1.0, QuadTol::new(1e-12, 1e-9)).unwrap()
    }

    #[test]
    fn psi_r_reference_values() {
        assert!((psi_r(3.0, &Law::Point(1.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(psi_r(1.0, &Law::Point(1.0)).unwrap(), 0.0);
        assert!((psi_r(1.0, &Law::uniform01()).unwrap() + 1.0).abs() < 1e-8);
        // x log x + (1-x) log(1-x) - 1
        let x: f64 = 0.3;
        let want = x * x.ln() + (1.0 - x) * (1.0 - x).ln() - 1.0;
        assert!((psi_r(x, &Law::uniform01()).unwrap() - want).abs() < 1e-8);
        assert!(psi_r(0.0, &Law::uniform01()).is_err());
    }

    #[test]
    fn psi_r_density_route_matches_quantile_route() {
        let via_q = psi_r(0.4, &Law::Beta { a: 2.0, b: 3.0 }).unwrap();
        let via_e = Law::Beta { a: 2.0, b: 3.0 }.expect(&|r| (0.4f64 - r).abs().ln()).unwrap_or(f64::NAN);
        if via_e.is_finite() {
            assert!((via_q - via_e).abs() < 1e-6);
        }
        let disc = Law::Discrete(vec![(0.5, 0.25), (1.0, 0.75)]);
        assert!((psi_r(1.0, &disc).unwrap() - 0.25 * 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn arcsine_density_for_constant_r() {
        let law = DirichletMeanLaw::new(0.5, Law::Point(1.0)).unwrap();
        for x in [0.01f64, 0.2, 0.5, 0.77, 0.999] {
            let want = 1.0 / (PI * (x * (1.0 - x)).sqrt());
            assert!((m1_density(x, &law).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn densities_normalise() {
        let cases = vec![
            DirichletMeanLaw::new(0.5, Law::Point(1.0)).unwrap(),
            DirichletMeanLaw::new(1.0, Law::uniform01()).unwrap(),
            DirichletMeanLaw::new(0.3, Law::uniform01()).unwrap(),
            DirichletMeanLaw::new(0.7, Law::Beta { a: 2.0, b: 0.5 }).unwrap(),
            DirichletMeanLaw::occupation(0.5, 0.5).unwrap(),
            DirichletMeanLaw::occupation(0.3, 0.8).unwrap(),
        ];
        for law in &cases {
            let v = norm(law);
            assert!((v - 1.0).abs() < 1e-6, "{law:?}: {v}");
        }
    }

    #[test]
    fn occupation_density_reference_value() {
        assert!((occupation_density(0.5, 0.5, 0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn occupation_density_matches_generic_form() {
        for (alpha, p) in [(0.5, 0.5), (0.3, 0.7), (0.7, 0.4)] {
            let closed = DirichletMeanLaw::occupation(alpha, p).unwrap();
            let generic = DirichletMeanLaw { model: DensityModel::Generic, ..closed.clone() };
            for y in [0.1, 0.35, 0.6, 0.9] {
                let a = m1_density(y, &closed).unwrap();
                let b = m1_density(y, &generic).unwrap();
                assert!((a - b).abs() < 1e-6 * a, "alpha {alpha} p {p} y {y}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn d_has_enough_mass_at_zero() {
        let law = DirichletMeanLaw::new(0.3, Law::uniform01()).unwrap();
        let mut rng = stream(4, 0);
        let n = 100_000;
        let zeros = (0..n).filter(|_| law.sample_d(&mut rng).unwrap() == 0.0).count() as f64 / n as f64;
        let se = (0.7f64 * 0.3 / n as f64).sqrt();
        assert!(zeros >= 0.7 - 3.0 * se, "{zeros}");
    }

    #[test]
    fn rejection_envelope_is_tight_for_constant_r() {
        let s = RejectionSampler::new(DirichletMeanLaw::new(0.5, Law::Point(1.0)).unwrap()).unwrap();
        assert!((s.acceptance() - 1.0 / 1.05).abs() < 1e-9);
        let mut rng = stream(5, 0);
        for _ in 0..1000 {
            let x = s.sample(&mut rng).unwrap();
            assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn degenerate_pieces_stay_below_the_bound() {
        let law = DirichletMeanLaw::new(1.0, Law::Point(2.0)).unwrap();
        let mut rng = stream(6, 0);
        for _ in 0..100 {
            assert!(sample_m1(&law, &mut rng).unwrap() <= 2.0);
        }
        let law = DirichletMeanLaw::new(1.0, Law::Uniform { lo: 0.0, hi: 2.0 }).unwrap();
        let s = RejectionSampler::new(law).unwrap();
        for _ in 0..1000 {
            assert!(s.sample(&mut rng).unwrap() <= 2.0);
        }
    }

    #[test]
    fn rejection_needs_bounded_r() {
        let law = DirichletMeanLaw::new(0.5, Law::exp1()).unwrap();
        assert!(matches!(RejectionSampler::new(law), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn cftp_rejects_understated_bound() {
        let law = DirichletMeanLaw::new(1.0, Law::uniform01()).unwrap().with_bound(0.5);
        let mut rng = stream(7, 0);
        let mut seen = false;
        for _ in 0..50 {
            if let Err(e) = double_cftp(&law, &mut rng) {
                assert!(matches!(e, Error::Precondition { .. }));
                seen = true;
                break;
            }
        }
        assert!(seen);
    }

    #[test]
    fn cftp_reports_constant_d() {
        let law = DirichletMeanLaw::new(1.0, Law::Point(1.0)).unwrap();
        let mut rng = stream(8, 0);
        assert!(matches!(double_cftp(&law, &mut rng), Err(Error::SamplerStuck { .. })));
    }

    #[test]
    fn cftp_draws_lie_in_the_support() {
        let law = DirichletMeanLaw::new(0.6, Law::Uniform { lo: 0.2, hi: 3.0 }).unwrap();
        let mut rng = stream(9, 0);
        for _ in 0..2000 {
            let m = double_cftp(&law, &mut rng).unwrap();
            assert!((0.0..=3.0).contains(&m));
        }
    }

    #[test]
    fn cftp_mean_matches_dirichlet_mean() {
        // E M~_1 = E D = p E R
        let law = DirichletMeanLaw::new(0.5, Law::uniform01()).unwrap();
        let mut rng = stream(10, 0);
        let n = 40_000;
        let xs: Vec<f64> = (0..n).map(|_| double_cftp(&law, &mut rng).unwrap()).collect();
        let (m, se) = crate::mc::mean_se(&xs);
        assert!((m - 0.25).abs() < 4.0 * se.unwrap(), "{m}");
    }

    #[test]
    fn sampler_path_selection() {
        let bounded = GgcSpec::new(1.0, Law::uniform01()).unwrap();
        assert_eq!(GgcSampler::new(&bounded, 2.5, SamplerPath::Auto).unwrap().path(), SamplerPath::Cftp);
        assert_eq!(GgcSampler::new(&bounded, 2.5, SamplerPath::Auto).unwrap().pieces(), 3);
        let unbounded = GgcSpec::new(1.0, Law::exp1()).unwrap();
        assert_eq!(GgcSampler::new(&unbounded, 1.0, SamplerPath::Auto).unwrap().path(), SamplerPath::Series);
        assert!(GgcSampler::new(&unbounded, 1.0, SamplerPath::Cftp).is_err());
        assert!(GgcSampler::new(&bounded, 0.0, SamplerPath::Auto).is_err());
    }

    #[test]
    fn ggc_mean_is_theta_t_er() {
        let q = QuantileFunction::arcsine();
        let g = GgcSpec::new(1.3, Law::Quantile(q)).unwrap();
        let s = GgcSampler::new(&g, 1.0, SamplerPath::Auto).unwrap();
        let mut rng = stream(11, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| s.sample(&mut rng).unwrap()).collect();
        let (m, se) = crate::mc::mean_se(&xs);
        assert!((m - 1.3 * 0.5).abs() < 4.0 * se.unwrap(), "{m}");
    }
}
