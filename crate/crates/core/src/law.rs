//! Laws of nonnegative random variables that can be sampled and, where
//! possible, integrated against by quadrature.

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Gamma as GammaDist};

use crate::error::{Error, Result, Trap};
use crate::extended::ExtendedReal;
use crate::numeric::{self, integrate, integrate_origin_power, integrate_to_inf, QuadTol};
use crate::quantiles::{invert_cdf, QuantileFunction, SpecialVariable};

#[derive(Clone, Debug)]
pub enum Law {
    Point(f64),
    Uniform { lo: f64, hi: f64 },
    Beta { a: f64, b: f64 },
    Gamma { shape: f64, scale: f64 },
    /// `gamma_a / gamma_b`, independent.
    BetaPrime { a: f64, b: f64 },
    /// `Q(U)`.
    Quantile(QuantileFunction),
    Special(SpecialVariable),
    /// `X^exponent`, `exponent > 0`.
    Power { base: Box<Law>, exponent: f64 },
    /// `scale * X + shift`, `scale > 0`.
    Affine { base: Box<Law>, scale: f64, shift: f64 },
    /// Product of independent variables.
    Product(Box<Law>, Box<Law>),
    /// `X * xi_p` with `xi_p` Bernoulli(p) independent of `X`.
    Thinned { base: Box<Law>, p: f64 },
    /// Law proportional to `x^power F(dx)`.
    SizeBiased { base: Box<Law>, power: f64 },
    /// Finitely many atoms `(value, probability)`.
    Discrete(Vec<(f64, f64)>),
}

const MAX_SIZE_BIAS_PROPOSALS: u64 = 10_000_000;

impl Law {
    pub fn exp1() -> Law {
        Law::Gamma { shape: 1.0, scale: 1.0 }
    }
    pub fn uniform01() -> Law {
        Law::Uniform { lo: 0.0, hi: 1.0 }
    }
    pub fn product(a: Law, b: Law) -> Law {
        Law::Product(Box::new(a), Box::new(b))
    }
    pub fn thinned(base: Law, p: f64) -> Law {
        Law::Thinned { base: Box::new(base), p }
    }
    pub fn power(base: Law, exponent: f64) -> Law {
        Law::Power { base: Box::new(base), exponent }
    }
    pub fn scaled(base: Law, scale: f64) -> Law {
        Law::Affine { base: Box::new(base), scale, shift: 0.0 }
    }

    /// Parameter checks; every public operation taking a `Law` calls this.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid("Law", m));
        match self {
            Law::Point(c) if !(c.is_finite() && *c >= 0.0) => bad(format!("point mass at {c} must be finite and >= 0")),
            Law::Uniform { lo, hi } if !(*lo >= 0.0 && hi > lo && hi.is_finite()) => bad(format!("uniform on [{lo}, {hi}] is invalid")),
            Law::Beta { a, b } | Law::BetaPrime { a, b } if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) => {
                bad(format!("shape parameters ({a}, {b}) must be > 0"))
            }
            Law::Gamma { shape, scale } if !(*shape > 0.0 && *scale > 0.0 && shape.is_finite() && scale.is_finite()) => {
                bad(format!("gamma(shape {shape}, scale {scale}) is invalid"))
            }
            Law::Special(s) => s.validate(),
            Law::Power { base, exponent } => {
                if !(*exponent != 0.0 && exponent.is_finite()) {
                    return bad(format!("exponent {exponent} must be finite and nonzero"));
                }
                base.validate()
            }
            Law::Affine { base, scale, shift } => {
                if !(*scale > 0.0 && scale.is_finite() && shift.is_finite()) {
                    return bad(format!("affine map ({scale}, {shift}) is invalid"));
                }
                base.validate()
            }
            Law::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            Law::Thinned { base, p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return bad(format!("thinning probability {p} must lie in (0, 1]"));
                }
                base.validate()
            }
            Law::SizeBiased { base, power } => {
                if !(power.is_finite() && *power >= 0.0) {
                    return bad(format!("size-bias power {power} must be >= 0"));
                }
                base.validate()
            }
            Law::Discrete(atoms) => {
                if atoms.is_empty() {
                    return bad("discrete law needs at least one atom".into());
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if atoms.iter().any(|&(x, w)| !(x >= 0.0 && x.is_finite() && w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return bad("discrete atoms must be finite, nonnegative and sum to one".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(match self {
            Law::Point(c) => *c,
            Law::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Law::Beta { a, b } => BetaDist::new(*a, *b).map_err(|e| Error::invalid("sample", e.to_string()))?.sample(rng),
            Law::Gamma { shape, scale } => GammaDist::new(*shape, *scale).map_err(|e| Error::invalid("sample", e.to_string()))?.sample(rng),
            Law::BetaPrime { a, b } => {
                let x: f64 = GammaDist::new(*a, 1.0).map_err(|e| Error::invalid("sample", e.to_string()))?.sample(rng);
                let y: f64 = GammaDist::new(*b, 1.0).map_err(|e| Error::invalid("sample", e.to_string()))?.sample(rng);
                x / y
            }
            Law::Quantile(q) => q.eval(rng.random()),
            Law::Special(s) => s.sample(rng)?,
            Law::Power { base, exponent } => base.sample(rng)?.powf(*exponent),
            Law::Affine { base, scale, shift } => scale * base.sample(rng)? + shift,
            Law::Product(a, b) => a.sample(rng)? * b.sample(rng)?,
            Law::Thinned { base, p } => {
                if *p >= 1.0 || rng.random::<f64>() < *p {
                    base.sample(rng)?
                } else {
                    0.0
                }
            }
            Law::SizeBiased { base, power } => {
                let ub = base
                    .upper_bound()
                    .ok_or_else(|| Error::unsupported("sample", "size biasing needs a bounded base law"))?;
                if *power == 0.0 {
                    return base.sample(rng);
                }
                for _ in 0..MAX_SIZE_BIAS_PROPOSALS {
                    let x = base.sample(rng)?;
                    if rng.random::<f64>() < (x / ub).powf(*power) {
                        return Ok(x);
                    }
                }
                return Err(Error::SamplerStuck { op: "sample", proposals: MAX_SIZE_BIAS_PROPOSALS, acceptance: 0.0 });
            }
            Law::Discrete(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(x, w) in atoms {
                    acc += w;
                    if u < acc {
                        return Ok(x);
                    }
                }
                atoms.last().unwrap().0
            }
        })
    }

    pub fn lower_bound(&self) -> f64 {
        match self {
            Law::Point(c) => *c,
            Law::Uniform { lo, .. } => *lo,
            Law::Quantile(q) => q.lower(),
            Law::Special(s) => s.lower_bound(),
            Law::Power { base, exponent } => {
                if *exponent >= 0.0 {
                    base.lower_bound().powf(*exponent)
                } else {
                    base.upper_bound().map_or(0.0, |u| u.powf(*exponent))
                }
            }
            Law::Affine { base, scale, shift } => scale * base.lower_bound() + shift,
            Law::Product(a, b) => a.lower_bound() * b.lower_bound(),
            Law::Thinned { base, p } => {
                if *p >= 1.0 {
                    base.lower_bound()
                } else {
                    0.0
                }
            }
            Law::SizeBiased { base, .. } => base.lower_bound(),
            Law::Discrete(atoms) => atoms.iter().filter(|a| a.1 > 0.0).map(|a| a.0).fold(f64::INFINITY, f64::min),
            _ => 0.0,
        }
    }

    /// Essential supremum, `None` if unbounded.
    pub fn upper_bound(&self) -> Option<f64> {
        match self {
            Law::Point(c) => Some(*c),
            Law::Uniform { hi, .. } => Some(*hi),
            Law::Beta { .. } => Some(1.0),
            Law::Gamma { .. } | Law::BetaPrime { .. } => None,
            Law::Quantile(q) => q.upper().finite(),
            Law::Special(s) => s.upper_bound(),
            Law::Power { base, exponent } => {
                if *exponent >= 0.0 {
                    base.upper_bound().map(|b| b.powf(*exponent))
                } else {
                    let lo = base.lower_bound();
                    (lo > 0.0).then(|| lo.powf(*exponent))
                }
            }
            Law::Affine { base, scale, shift } => base.upper_bound().map(|b| scale * b + shift),
            Law::Product(a, b) => match (a.upper_bound(), b.upper_bound()) {
                (Some(x), Some(y)) => Some(x * y),
                _ => None,
            },
            Law::Thinned { base, .. } | Law::SizeBiased { base, .. } => base.upper_bound(),
            Law::Discrete(atoms) => Some(atoms.iter().filter(|a| a.1 > 0.0).map(|a| a.0).fold(0.0, f64::max)),
        }
    }

    /// Point value if the law is degenerate.
    pub fn as_point(&self) -> Option<f64> {
        match self {
            Law::Point(c) => Some(*c),
            Law::Quantile(q) => match q.upper() {
                ExtendedReal::Finite(u) if u == q.lower() => Some(u),
                _ => None,
            },
            Law::Power { base, exponent } => base.as_point().map(|c| c.powf(*exponent)),
            Law::Affine { base, scale, shift } => base.as_point().map(|c| scale * c + shift),
            Law::Product(a, b) => match (a.as_point(), b.as_point()) {
                (Some(x), Some(y)) => Some(x * y),
                (Some(x), _) | (_, Some(x)) if x == 0.0 => Some(0.0),
                _ => None,
            },
            Law::Thinned { base, p } if *p >= 1.0 => base.as_point(),
            Law::SizeBiased { base, .. } => base.as_point(),
            Law::Discrete(atoms) => {
                let live: Vec<_> = atoms.iter().filter(|a| a.1 > 0.0).collect();
                if live.iter().all(|a| a.0 == live[0].0) {
                    Some(live[0].0)
                } else {
                    None
                }
            }
            Law::Special(SpecialVariable::GeometricExp { p, .. }) if *p >= 1.0 => Some(1.0),
            _ => None,
        }
    }

    /// Probability of the atom at `x`.
    pub fn atom(&self, x: f64) -> f64 {
        match self {
            Law::Point(c) => {
                if *c == x {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Special(s) => s.atom(x),
            Law::Quantile(q) => {
                // flat stretches of Q are atoms of Q(U)
                let lo = q.cdf(x * (1.0 - 1e-12) - 1e-300);
                let hi = q.cdf(x);
                if x < q.lower() {
                    0.0
                } else if (hi - lo) > 1e-9 {
                    hi - lo
                } else {
                    0.0
                }
            }
            Law::Power { base, exponent } => base.atom(x.powf(1.0 / exponent)),
            Law::Affine { base, scale, shift } => base.atom((x - shift) / scale),
            Law::Thinned { base, p } => {
                let a = p * base.atom(x);
                if x == 0.0 {
                    a + (1.0 - p)
                } else {
                    a
                }
            }
            Law::Product(a, b) => match (a.as_point(), b.as_point()) {
                (Some(c), _) if c > 0.0 => b.atom(x / c),
                (_, Some(c)) if c > 0.0 => a.atom(x / c),
                _ => {
                    if x == 0.0 {
                        let (pa, pb) = (a.atom(0.0), b.atom(0.0));
                        pa + pb - pa * pb
                    } else {
                        0.0
                    }
                }
            },
            Law::Discrete(atoms) => atoms.iter().filter(|a| a.0 == x).map(|a| a.1).sum(),
            _ => 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        Some(match self {
            Law::Point(c) => {
                if x >= *c {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Law::Beta { a, b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    numeric::beta_reg(*a, *b, x)
                }
            }
            Law::Gamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    numeric::gamma_lr(*shape, x / scale)
                }
            }
            Law::BetaPrime { a, b } => {
                if x <= 0.0 {
                    0.0
                } else {
                    numeric::beta_reg(*a, *b, x / (1.0 + x))
                }
            }
            Law::Quantile(q) => q.cdf(x),
            Law::Special(s) => s.cdf(x)?,
            Law::Power { base, exponent } => {
                if x < 0.0 {
                    0.0
                } else if *exponent > 0.0 {
                    base.cdf(x.powf(1.0 / exponent))?
                } else {
                    let y = x.powf(1.0 / exponent);
                    (1.0 - base.cdf(y)? + base.atom(y)).clamp(0.0, 1.0)
                }
            }
            Law::Affine { base, scale, shift } => base.cdf((x - shift) / scale)?,
            Law::Thinned { base, p } => {
                if x < 0.0 {
                    0.0
                } else {
                    (1.0 - p) + p * base.cdf(x)?
                }
            }
            Law::Product(a, b) => {
                if let Some(c) = a.as_point() {
                    return if c > 0.0 { b.cdf(x / c) } else { Some(if x >= 0.0 { 1.0 } else { 0.0 }) };
                }
                if let Some(c) = b.as_point() {
                    return if c > 0.0 { a.cdf(x / c) } else { Some(if x >= 0.0 { 1.0 } else { 0.0 }) };
                }
                if x < 0.0 {
                    return Some(0.0);
                }
                a.cdf(1.0)?;
                let trap = Trap::new();
                let v = b.expect(&|y: f64| {
                    if y <= 0.0 {
                        1.0
                    } else {
                        trap.catch(a.cdf(x / y).ok_or_else(|| Error::unsupported("cdf", "factor without cdf")))
                    }
                });
                trap.finish(v).ok()?
            }
            Law::Discrete(atoms) => atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum(),
            Law::SizeBiased { base, power } => {
                let norm = base.expect(&|y| y.powf(*power)).ok()?;
                base.expect(&|y| if y <= x { y.powf(*power) } else { 0.0 }).ok()? / norm
            }
        })
    }

    /// Density with respect to Lebesgue measure, where available.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        Some(match self {
            Law::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Law::Beta { a, b } => {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - numeric::ln_beta(*a, *b)).exp()
                }
            }
            Law::Gamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let y = x / scale;
                    ((shape - 1.0) * y.ln() - y - numeric::ln_gamma(*shape)).exp() / scale
                }
            }
            Law::BetaPrime { a, b } => {
                if x <= 0.0 {
                    0.0
                } else {
                    ((a - 1.0) * x.ln() - (a + b) * x.ln_1p() - numeric::ln_beta(*a, *b)).exp()
                }
            }
            Law::Special(s) => s.pdf(x)?,
            Law::Affine { base, scale, shift } => base.pdf((x - shift) / scale)? / scale,
            Law::Power { base, exponent } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let inv = 1.0 / exponent;
                    base.pdf(x.powf(inv))? * inv.abs() * x.powf(inv - 1.0)
                }
            }
            Law::Product(a, b) => {
                let (dens, other) = if a.pdf(1.0).is_some() { (a, b) } else { (b, a) };
                dens.pdf(1.0)?;
                if let Some(c) = other.as_point() {
                    return dens.pdf(x / c).map(|d| d / c);
                }
                if other.atom(0.0) > 0.0 {
                    return None;
                }
                other.expect(&|y| if y <= 0.0 { 0.0 } else { dens.pdf(x / y).unwrap_or(f64::NAN) / y }).ok()?
            }
            _ => return None,
        })
    }

    /// Closed-form or numerical quantile.
    pub fn quantile(&self, u: f64) -> Option<f64> {
        let u = u.clamp(0.0, 1.0);
        match self {
            Law::Point(c) => Some(*c),
            Law::Uniform { lo, hi } => Some(lo + (hi - lo) * u),
            Law::Quantile(q) => Some(q.eval(u)),
            Law::Special(s) => s.quantile(u),
            Law::Power { base, exponent } => {
                let v = if *exponent > 0.0 { u } else { 1.0 - u };
                base.quantile(v).map(|x| x.powf(*exponent))
            }
            Law::Affine { base, scale, shift } => base.quantile(u).map(|x| scale * x + shift),
            Law::Thinned { base, p } => {
                if u <= 1.0 - p {
                    Some(0.0)
                } else {
                    base.quantile((u - (1.0 - p)) / p)
                }
            }
            Law::Discrete(atoms) => {
                let mut sorted = atoms.clone();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut acc = 0.0;
                for &(x, w) in &sorted {
                    acc += w;
                    if u <= acc + 1e-15 && w > 0.0 {
                        return Some(x);
                    }
                }
                sorted.last().map(|a| a.0)
            }
            Law::Beta { .. } | Law::Gamma { .. } | Law::BetaPrime { .. } => {
                if u >= 1.0 {
                    return self.upper_bound().or(Some(f64::INFINITY));
                }
                let f = |x: f64| self.cdf(x).unwrap();
                invert_cdf(&f, u, 1e-13).ok()
            }
            _ => None,
        }
    }

    /// `E g(X)` at the inner-layer tolerance.
    pub fn expect(&self, g: &dyn Fn(f64) -> f64) -> Result<f64> {
        self.expect_tol(g, QuadTol::INNER)
    }

    pub fn expect_tol(&self, g: &dyn Fn(f64) -> f64, tol: QuadTol) -> Result<f64> {
        const OP: &str = "expect";
        match self {
            Law::Point(c) => Ok(g(*c)),
            Law::Uniform { lo, hi } => Ok(integrate(OP, &|x: f64| g(x), *lo, *hi, tol)? / (hi - lo)),
            Law::Beta { a, b } => beta_expect(*a, *b, g, tol),
            Law::Gamma { shape, scale } => gamma_expect(*shape, *scale, g, tol),
            Law::BetaPrime { a, b } => beta_expect_split(
                *a,
                *b,
                &|x: f64| g(x / (1.0 - x)),
                // the complement is passed exactly so that huge ratios keep full precision
                &|t: f64| if t <= 0.0 { g(f64::INFINITY) } else { g((1.0 - t) / t) },
                tol,
            ),
            Law::Quantile(q) => integrate(OP, &|u: f64| g(q.eval(u)), 0.0, 1.0, tol),
            Law::Special(s) => s.expect(g, tol),
            Law::Power { base, exponent } => base.expect_tol(&|x: f64| g(x.powf(*exponent)), tol),
            Law::Affine { base, scale, shift } => base.expect_tol(&|x: f64| g(scale * x + shift), tol),
            Law::Thinned { base, p } => {
                let on = base.expect_tol(g, tol)?;
                Ok((1.0 - p) * g(0.0) + p * on)
            }
            Law::Product(a, b) => {
                if let Some(c) = a.as_point() {
                    return b.expect_tol(&|y| g(c * y), tol);
                }
                if let Some(c) = b.as_point() {
                    return a.expect_tol(&|x| g(x * c), tol);
                }
                let trap = Trap::new();
                let inner = QuadTol { abs: tol.abs * 0.1, rel: tol.rel * 0.1, ..tol };
                let v = a.expect_tol(&|x: f64| trap.catch(b.expect_tol(&|y: f64| g(x * y), inner)), tol);
                trap.finish(v)
            }
            Law::SizeBiased { base, power } => {
                let k = *power;
                let norm = base.expect_tol(&|x| x.powf(k), tol)?;
                Ok(base.expect_tol(&|x| x.powf(k) * g(x), tol)? / norm)
            }
            Law::Discrete(atoms) => Ok(atoms.iter().map(|&(x, w)| w * g(x)).sum()),
        }
    }

    /// `E exp(-omega X)`.
    pub fn laplace(&self, omega: f64) -> Result<f64> {
        match self {
            Law::Point(c) => Ok((-omega * c).exp()),
            Law::Gamma { shape, scale } => Ok((1.0 + omega * scale).powf(-shape)),
            Law::Thinned { base, p } => Ok(1.0 - p + p * base.laplace(omega)?),
            Law::Affine { base, scale, shift } => Ok((-omega * shift).exp() * base.laplace(omega * scale)?),
            Law::Product(a, b) => match (a.as_ref(), b.as_ref()) {
                (Law::Gamma { shape, scale }, other) | (other, Law::Gamma { shape, scale }) => {
                    other.expect(&|y| (1.0 + omega * scale * y).powf(-shape))
                }
                _ => self.expect(&|x| (-omega * x).exp()),
            },
            _ => self.expect(&|x| (-omega * x).exp()),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            Law::Point(c) => Ok(*c),
            Law::Uniform { lo, hi } => Ok(0.5 * (lo + hi)),
            Law::Beta { a, b } => Ok(a / (a + b)),
            Law::Gamma { shape, scale } => Ok(shape * scale),
            Law::BetaPrime { a, b } => {
                if *b > 1.0 {
                    Ok(a / (b - 1.0))
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Law::Quantile(q) => Ok(q.mean()),
            Law::Affine { base, scale, shift } => Ok(scale * base.mean()? + shift),
            Law::Product(a, b) => Ok(a.mean()? * b.mean()?),
            Law::Thinned { base, p } => Ok(p * base.mean()?),
            Law::Special(SpecialVariable::PositiveStable { .. }) | Law::Special(SpecialVariable::StableRatio { .. }) => {
                Ok(f64::INFINITY)
            }
            Law::Special(SpecialVariable::Straddle { alpha }) => {
                // int x^{-alpha} (e^-x - e^-2x) dx * norm
                let a = *alpha;
                let num = numeric::gamma(1.0 - a) * (1.0 - 2f64.powf(a - 1.0));
                let norm = if a == 0.0 { 1.0 / std::f64::consts::LN_2 } else { a / ((2f64.powf(a) - 1.0) * numeric::gamma(1.0 - a)) };
                Ok(num * norm)
            }
            _ => self.expect(&|x| x),
        }
    }

    /// `E[-log X]` for a law on `[0, 1]`; infinite if there is an atom at zero
    /// or the integral diverges.
    pub fn neg_log_mean(&self) -> Result<ExtendedReal> {
        if self.atom(0.0) > 0.0 {
            return Ok(ExtendedReal::PosInfinity);
        }
        if let Law::Special(SpecialVariable::G { alpha }) = self {
            if *alpha == 0.0 {
                // -log G_0 behaves like pi * eta for large Cauchy eta
                return Ok(ExtendedReal::PosInfinity);
            }
        }
        match self {
            Law::Product(a, b) => {
                let (x, y) = (a.neg_log_mean()?, b.neg_log_mean()?);
                return Ok(match (x, y) {
                    (ExtendedReal::Finite(u), ExtendedReal::Finite(v)) => ExtendedReal::Finite(u + v),
                    _ => ExtendedReal::PosInfinity,
                });
            }
            Law::Beta { a, b } => {
                // E[-log B] = digamma(a+b) - digamma(a)
                return Ok(ExtendedReal::Finite(digamma(a + b) - digamma(*a)));
            }
            _ => {}
        }
        match self.expect(&|x| if x <= 0.0 { f64::INFINITY } else { -x.ln() }) {
            Ok(v) => Ok(ExtendedReal::Finite(v)),
            Err(Error::Quadrature { .. }) => Ok(ExtendedReal::PosInfinity),
            Err(e) => Err(e),
        }
    }
}

/// Digamma via recurrence and the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let f = 1.0 / (x * x);
    acc + x.ln() - 0.5 / x - f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 - f * (1.0 / 240.0 - f / 132.0))))
}

fn beta_expect(a: f64, b: f64, g: &dyn Fn(f64) -> f64, tol: QuadTol) -> Result<f64> {
    beta_expect_split(a, b, g, &|t| g(1.0 - t), tol)
}

/// `E g(B)` for `B ~ beta(a, b)`, with `g_left(x) = g(x)` used on `[0, 1/2]`
/// and `g_right(t) = g(1 - t)` on the mirrored half.
fn beta_expect_split(a: f64, b: f64, g_left: &dyn Fn(f64) -> f64, g_right: &dyn Fn(f64) -> f64, tol: QuadTol) -> Result<f64> {
    const OP: &str = "expect";
    // Both endpoint singularities removed by power substitutions on each half.
    let left = integrate_origin_power(OP, &|x: f64| g_left(x) * (1.0 - x).powf(b - 1.0), 0.5, a, tol)?;
    let right = integrate_origin_power(OP, &|t: f64| g_right(t) * (1.0 - t).powf(a - 1.0), 0.5, b, tol)?;
    Ok((left + right) / numeric::ln_beta(a, b).exp())
}

fn gamma_expect(k: f64, scale: f64, g: &dyn Fn(f64) -> f64, tol: QuadTol) -> Result<f64> {
    const OP: &str = "expect";
    let lg = numeric::ln_gamma(k);
    let head = integrate_origin_power(OP, &|y: f64| g(scale * y) * (-y).exp(), 1.0, k, tol)?;
    let dens = |y: f64| g(scale * y) * ((k - 1.0) * y.ln() - y - lg).exp();
    let mut tail = 0.0;
    let mut start = 1.0;
    if k > 2.0 {
        tail += integrate(OP, &dens, 1.0, k, tol)?;
        start = k;
    }
    tail += integrate_to_inf(OP, &dens, start, tol)?;
    Ok(head / lg.exp() + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantiles::QuantileFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn beta_moments() {
        let l = Law::Beta { a: 0.3, b: 2.5 };
        close(l.expect(&|x| x).unwrap(), 0.3 / 2.8, 1e-9);
        close(l.expect(&|_| 1.0).unwrap(), 1.0, 1e-9);
        let l = Law::Beta { a: 1.5, b: 0.2 };
        close(l.expect(&|x| x * x).unwrap(), 1.5 * 2.5 / (1.7 * 2.7), 1e-9);
    }

    #[test]
    fn gamma_moments_and_laplace() {
        for &(k, s) in &[(0.2, 1.0), (1.0, 2.0), (7.5, 0.3)] {
            let l = Law::Gamma { shape: k, scale: s };
            close(l.expect(&|x| x).unwrap(), k * s, 1e-9);
            close(l.expect(&|x| (-0.7 * x).exp()).unwrap(), (1.0 + 0.7 * s).powf(-k), 1e-9);
        }
    }

    #[test]
    fn beta_prime_mean() {
        let l = Law::BetaPrime { a: 0.5, b: 2.5 };
        close(l.expect(&|x| x).unwrap(), 0.5 / 1.5, 1e-8);
    }

    #[test]
    fn product_with_gamma_uses_closed_form() {
        let l = Law::product(Law::exp1(), Law::uniform01());
        // E[1/(1+wU)] = log(1+w)/w
        close(l.laplace(2.0).unwrap(), 3f64.ln() / 2.0, 1e-10);
        close(l.expect(&|x| (-2.0 * x).exp()).unwrap(), 3f64.ln() / 2.0, 1e-8);
    }

    #[test]
    fn thinned_and_atoms() {
        let l = Law::thinned(Law::uniform01(), 0.3);
        close(l.mean().unwrap(), 0.15, 1e-14);
        close(l.atom(0.0), 0.7, 1e-14);
        close(l.cdf(0.5).unwrap(), 0.85, 1e-14);
        assert_eq!(l.neg_log_mean().unwrap(), ExtendedReal::PosInfinity);
    }

    #[test]
    fn neg_log_mean_beta_and_g0() {
        let b = Law::Beta { a: 2.0, b: 1.0 };
        close(b.neg_log_mean().unwrap().finite().unwrap(), 0.5, 1e-12);
        let u = Law::Quantile(QuantileFunction::uniform());
        close(u.neg_log_mean().unwrap().finite().unwrap(), 1.0, 1e-8);
        assert!(Law::Special(SpecialVariable::G { alpha: 0.0 }).neg_log_mean().unwrap().is_infinite());
    }

    #[test]
    fn quantile_law_cdf() {
        let l = Law::Quantile(QuantileFunction::new(QuantileFamily::Power { delta: 2.0 }).unwrap());
        close(l.cdf(0.5).unwrap(), 0.25, 1e-12);
    }

    #[test]
    fn numeric_beta_quantile() {
        let l = Law::Beta { a: 2.0, b: 2.0 };
        close(l.quantile(0.5).unwrap(), 0.5, 1e-10);
    }

    #[test]
    fn size_biased_sampling_mean() {
        let l = Law::SizeBiased { base: Box::new(Law::uniform01()), power: 1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let m: f64 = (0..n).map(|_| l.sample(&mut rng).unwrap()).sum::<f64>() / n as f64;
        // size-biased uniform is beta(2,1) with mean 2/3
        assert!((m - 2.0 / 3.0).abs() < 5e-3);
        close(l.mean().unwrap(), 2.0 / 3.0, 1e-9);
    }

    #[test]
    fn product_pdf_mixture() {
        // gamma(1) * 2 has density e^{-x/2}/2
        let l = Law::product(Law::exp1(), Law::Point(2.0));
        close(l.pdf(1.0).unwrap(), (-0.5f64).exp() / 2.0, 1e-12);
    }

    #[test]
    fn digamma_values() {
        close(digamma(1.0), -0.577_215_664_901_532_9, 1e-12);
        close(digamma(0.5), -1.963_510_026_021_423_5, 1e-12);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Law::Beta { a: -1.0, b: 1.0 }.validate().is_err());
        assert!(Law::thinned(Law::uniform01(), 1.5).validate().is_err());
        assert!(Law::Discrete(vec![(1.0, 0.5)]).validate().is_err());
    }

    #[test]
    fn reciprocal_power_law() {
        let l = Law::power(Law::Uniform { lo: 1.0, hi: 2.0 }, -1.0);
        l.validate().unwrap();
        close(l.cdf(0.6).unwrap(), 1.0 - (1.0 / 0.6 - 1.0), 1e-12);
        close(l.lower_bound(), 0.5, 0.0);
        close(l.upper_bound().unwrap(), 1.0, 0.0);
        close(l.quantile(0.25).unwrap(), 1.0 / 1.75, 1e-12);
        close(l.pdf(0.8).unwrap(), 1.0 / 0.64, 1e-12);
        close(l.mean().unwrap(), 2f64.ln(), 1e-10);
    }
}
