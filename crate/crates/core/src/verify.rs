//! Statistical checks used to turn distributional identities into pass/fail
//! tests: empirical Laplace transforms, two-sample Kolmogorov-Smirnov and a
//! chi-square goodness of fit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy::LaplaceExponent;
use crate::mc::mean_se;
use crate::numeric::gamma_ur;

/// Default frequency grid for transform comparisons.
pub const DEFAULT_OMEGAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Empirical `E exp(-w X)` at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LtValue {
    pub omega: f64,
    pub value: f64,
    /// `None` when fewer than two samples were given.
    pub se: Option<f64>,
}

pub fn empirical_lt(samples: &[f64], omegas: &[f64]) -> Result<Vec<LtValue>> {
    const OP: &str = "empirical_lt";
    if samples.is_empty() {
        return Err(Error::invalid(OP, "no samples"));
    }
    if let Some(x) = samples.iter().find(|x| !(**x >= 0.0) || x.is_infinite()) {
        return Err(Error::invalid(OP, format!("sample {x} is not a finite nonnegative number")));
    }
    Ok(omegas
        .iter()
        .map(|&omega| {
            let v: Vec<f64> = samples.iter().map(|x| (-omega * x).exp()).collect();
            let (value, se) = mean_se(&v);
            LtValue { omega, value, se }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct LtReport {
    pub omegas: Vec<f64>,
    pub empirical: Vec<f64>,
    pub se: Vec<f64>,
    pub analytic: Vec<f64>,
    pub max_rel_err: f64,
    /// Largest `|empirical - analytic| / se`.
    pub max_z: f64,
    pub tol: f64,
    /// Relative error below `tol` and every deviation within four standard errors.
    pub pass: bool,
}

/// Compare samples of a variable at time `t` with `exp(-t psi(w))`.
pub fn lt_match(samples: &[f64], psi: &dyn LaplaceExponent, t: f64, omegas: &[f64], tol: f64) -> Result<LtReport> {
    const OP: &str = "lt_match";
    if samples.len() < 1000 {
        return Err(Error::precondition(OP, format!("need at least 1000 samples, got {}", samples.len())));
    }
    let emp = empirical_lt(samples, omegas)?;
    let mut analytic = Vec::with_capacity(omegas.len());
    for &w in omegas {
        analytic.push((-t * psi.psi(w)?).exp());
    }
    Ok(report(omegas, &emp, analytic, tol))
}

/// Same as [`lt_match`] with the transform values given directly.
pub fn lt_match_values(samples: &[f64], analytic: &[f64], omegas: &[f64], tol: f64) -> Result<LtReport> {
    if analytic.len() != omegas.len() {
        return Err(Error::invalid("lt_match", "one analytic value per frequency is required"));
    }
    if samples.len() < 1000 {
        return Err(Error::precondition("lt_match", format!("need at least 1000 samples, got {}", samples.len())));
    }
    let emp = empirical_lt(samples, omegas)?;
    Ok(report(omegas, &emp, analytic.to_vec(), tol))
}

fn report(omegas: &[f64], emp: &[LtValue], analytic: Vec<f64>, tol: f64) -> LtReport {
    let mut max_rel_err = 0.0f64;
    let mut max_z = 0.0f64;
    for (e, a) in emp.iter().zip(&analytic) {
        let d = (e.value - a).abs();
        max_rel_err = max_rel_err.max(d / a.abs());
        let se = e.se.unwrap_or(0.0);
        let z = if se > 0.0 {
            d / se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
    }
    LtReport {
        omegas: omegas.to_vec(),
        empirical: emp.iter().map(|e| e.value).collect(),
        se: emp.iter().map(|e| e.se.unwrap_or(0.0)).collect(),
        analytic,
        max_rel_err,
        max_z,
        tol,
        pass: max_rel_err < tol && max_z <= 4.0,
    }
}

/// Kolmogorov tail `Q(l) = P(sup |B| > l) = 2 sum (-1)^(k-1) exp(-2 k^2 l^2)`.
/// Small arguments use the Jacobi-transformed series, which converges fast there.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.0 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=40 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * c).exp();
            s += term;
            if term < 1e-300 {
                break;
            }
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub d: f64,
    pub p: f64,
    /// More than half of the pooled values are repeats; the asymptotic p-value is conservative then.
    pub ties_warning: bool,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
pub fn ks2(a: &[f64], b: &[f64]) -> Result<KsResult> {
    const OP: &str = "ks2";
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::precondition(OP, format!("both samples need at least 100 values, got {} and {}", a.len(), b.len())));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::invalid(OP, "NaN in sample"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_unstable_by(f64::total_cmp);
    y.sort_unstable_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    let mut repeats = 0usize;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        let (i0, j0) = (i, j);
        while i < n && x[i] == v {
            i += 1;
        }
        while j < m && y[j] == v {
            j += 1;
        }
        repeats += (i - i0) + (j - j0) - 1;
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    for w in x[i..].windows(2).chain(y[j..].windows(2)) {
        if w[0] == w[1] {
            repeats += 1;
        }
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let p = kolmogorov_q(ne.sqrt() * d);
    Ok(KsResult { d, p, ties_warning: repeats * 2 > n + m })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub stat: f64,
    pub df: usize,
    pub p: f64,
}

/// Pearson goodness of fit of bin `counts` against bin probabilities `probs`
/// (which should sum to one). `fitted` parameters reduce the degrees of freedom.
pub fn chi_square_gof(counts: &[u64], probs: &[f64], fitted: usize) -> Result<ChiSquareResult> {
    const OP: &str = "chi_square_gof";
    if counts.len() != probs.len() || counts.len() < 2 + fitted {
        return Err(Error::invalid(OP, "counts and probabilities must match and leave a positive df"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid(OP, "no observations"));
    }
    let mut stat = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        if !(p > 0.0) {
            return Err(Error::invalid(OP, format!("bin probability {p} must be > 0")));
        }
        let e = p * total as f64;
        stat += (c as f64 - e).powi(2) / e;
    }
    let df = counts.len() - 1 - fitted;
    Ok(ChiSquareResult { stat, df, p: gamma_ur(df as f64 / 2.0, stat / 2.0) })
}
