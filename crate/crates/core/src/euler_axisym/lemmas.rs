//! Height cascade with power 5/4, the recursion lemmas behind the lower
//! bound on `∫x_k` and the closing inequality of the bootstrap.

use serde::{Deserialize, Serialize};

use super::{c_dz, AxisymConfig};
use crate::ode_cascade::{fixed_point_a, integrate_cascade, CascadeParams, CoeffSpec};
use crate::profiles::{build_phi3d, build_rho_z, holder_seminorm_fn, kink_profile};
use crate::quad;
use crate::singular_integrals::{FnSmooth, SmoothFunction};
use crate::{Error, Result};

/// Outcome of [`cascade_5_4`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cascade54Report {
    pub c: f64,
    /// `(2 + 3c)/(2 - 3c)`.
    pub b: f64,
    /// Lower edge `(5/4)(1 - 3c/2)` of the rescaled coefficients.
    pub kappa: f64,
    /// `a(d, Z, A)`.
    pub a: f64,
    /// `4(2 - 3c)(A - 1)/(2 - 15c)`.
    pub a_bound: f64,
    /// Largest relative mismatch of `d ln X_k/dt` against `(5/4)Σ a_j X_j`.
    pub log_derivative_residual: f64,
    /// Smallest `x_{k+1}/(A e^{-2a} x_k) - 1` on `[-a, 0]`.
    pub ratio_margin: f64,
    /// Largest `∫_{-a}^0 X_k / a`.
    pub integral_ratio: f64,
    pub pass: bool,
}

/// Integrates `x_k'/x_k = Σ_{j<k} a_j x_j^{5/4}/A^{j/4}` with `a_j` drawn
/// from `[1 - 3c/2, 1 + 3c/2]` and checks the level-ratio bound on `[-a, 0]`.
pub fn cascade_5_4(cfg: &AxisymConfig, n_levels: usize, seed: u64, depth: u32) -> Result<Cascade54Report> {
    cfg.validate()?;
    let c = c_dz(cfg.d, cfg.z);
    if !(c < 2.0 / 15.0) {
        return Err(Error::NoFixedPoint(format!(
            "c(d, Z) = {c} is not below 2/15, so b = (2+3c)/(2-3c) reaches 3/2"
        )));
    }
    let a_ratio = cfg.ratio;
    let b = (2.0 + 3.0 * c) / (2.0 - 3.0 * c);
    let kappa = 0.625 * (2.0 - 3.0 * c);
    let a = fixed_point_a(a_ratio, b)? / kappa;
    let a_bound = 4.0 * (2.0 - 3.0 * c) * (a_ratio - 1.0) / (2.0 - 15.0 * c);
    let (lo, hi) = (1.0 - 1.5 * c, 1.0 + 1.5 * c);
    let mut params = CascadeParams::new(a_ratio, n_levels, -a, CoeffSpec::Random { lo, hi, seed, depth, shared: true });
    params.power = 1.25;
    params.tol = 1e-12;
    let traj = integrate_cascade(&params)?;
    let ln_a = a_ratio.ln();
    let big_x = |k: usize, t: f64| -> Result<f64> { Ok((1.25 * traj.y_at(k, t)? - 0.25 * k as f64 * ln_a).exp()) };

    let breaks = traj.coeffs.breakpoints();
    let h = 1e-6 * a;
    let mut residual = 0.0f64;
    let mut margin = f64::INFINITY;
    let samples = 200;
    for i in 1..samples {
        let t = -a * i as f64 / samples as f64;
        let clean = breaks.iter().all(|&b| (b - t).abs() > 4.0 * h);
        for k in 0..n_levels {
            if clean {
                let fd = (big_x(k, t + h)?.ln() - big_x(k, t - h)?.ln()) / (2.0 * h);
                let mut rhs = 0.0;
                for j in 0..k {
                    rhs += 1.25 * traj.coeffs.eval(0, j, t) * big_x(j, t)?;
                }
                if rhs > 0.0 {
                    residual = residual.max((fd - rhs).abs() / rhs);
                }
            }
            if k + 1 < n_levels {
                let q = (traj.y_at(k + 1, t)? - traj.y_at(k, t)? - ln_a + 2.0 * a).exp() - 1.0;
                margin = margin.min(q);
            }
        }
    }
    let mut integral_ratio = 0.0f64;
    for k in 0..n_levels {
        let e = quad::adaptive_pieces(
            |t| big_x(k, t).unwrap_or(f64::NAN),
            &std::iter::once(-a).chain(breaks.iter().cloned().rev()).chain(std::iter::once(0.0)).collect::<Vec<_>>(),
            1e-12 * a,
        );
        integral_ratio = integral_ratio.max(e.value / a);
    }
    let pass = residual < 1e-5 && margin >= -1e-9 && a <= a_bound * (1.0 + 1e-12) && integral_ratio <= 1.0 + 1e-9;
    Ok(Cascade54Report {
        c,
        b,
        kappa,
        a,
        a_bound,
        log_derivative_residual: residual,
        ratio_margin: margin,
        integral_ratio,
        pass,
    })
}

/// Outcome of [`recursion_int_ge2`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntGe2Report {
    pub alpha: f64,
    pub c: f64,
    /// `A' = e^{(3-2α)c/4}`.
    pub a_prime: f64,
    pub n: usize,
    pub i0: f64,
    /// `c A'^{-n} e^{2/(1-2α)}`.
    pub threshold: f64,
    pub i_n: f64,
    pub premise: bool,
    /// The implication premise ⇒ `I_n ≥ c`.
    pub holds: bool,
}

/// Iterates `I_{k+1} = A'(1 - e^{-I_k})` from `I_0 = i0`.
pub fn recursion_int_ge2(alpha: f64, c: f64, n: usize, i0: f64) -> Result<IntGe2Report> {
    if !(alpha > 0.0 && alpha < 0.5) || !(c > 0.0) || !(i0 >= 0.0) {
        return Err(Error::param(format!("need α ∈ (0, 1/2), c > 0, I_0 ≥ 0; got {alpha}, {c}, {i0}")));
    }
    let a_prime = ((3.0 - 2.0 * alpha) * c / 4.0).exp();
    let threshold = c * (-(n as f64) * a_prime.ln() + 2.0 / (1.0 - 2.0 * alpha)).exp();
    let mut i = i0;
    for _ in 0..n {
        i = -a_prime * (-i).exp_m1();
    }
    let premise = i0 >= threshold;
    Ok(IntGe2Report { alpha, c, a_prime, n, i0, threshold, i_n: i, premise, holds: !premise || i >= c })
}

/// Solution of `c A'^{-n} e^{2/(1-2α)} = t` with `A' = A e^{-βt}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TLeReport {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    /// `|c A'^{-n} e^{2/(1-2α)} - t|/t` at the returned root.
    pub residual: f64,
    pub in_bracket: bool,
}

fn t_le_bounds(alpha: f64, ln_a: f64, n: usize) -> (f64, f64) {
    let e2 = 2.0 / (1.0 - 2.0 * alpha);
    let base = (e2 - n as f64 * ln_a).exp() * ln_a;
    (16.0 * base / (12.0 + 3.0 * std::f64::consts::E), 8.0 * base / (3.0 - 2.0 * alpha))
}

fn beta_max_t_le(alpha: f64) -> f64 {
    (3.0 - 2.0 * alpha) * (-(1.0 + 2.0 * alpha) / (1.0 - 2.0 * alpha)).exp() / 16.0
}

/// Bisection for the time scale `t_n`; `ln_a = ln A`.
pub fn solve_t_le(alpha: f64, beta: f64, ln_a: f64, n: usize) -> Result<TLeReport> {
    if !(alpha > 0.0 && alpha < 0.5) || !(ln_a > 0.0) {
        return Err(Error::param(format!("need α ∈ (0, 1/2) and A > 1; got α = {alpha}, ln A = {ln_a}")));
    }
    let beta_max = beta_max_t_le(alpha);
    if !(0.0..=beta_max).contains(&beta) {
        return Err(Error::Precondition(format!("β = {beta} outside [0, {beta_max:e}]")));
    }
    let e2 = 2.0 / (1.0 - 2.0 * alpha);
    let g = |t: f64| {
        let ln_ap = ln_a - beta * t;
        let c = 4.0 * ln_ap / (3.0 - 2.0 * alpha);
        c * (e2 - n as f64 * ln_ap).exp() - t
    };
    let (lower, upper) = t_le_bounds(alpha, ln_a, n);
    if !(g(upper) <= 0.0) {
        return Err(Error::NoFixedPoint(format!("no sign change of the t-equation below {upper:e}")));
    }
    let t = crate::ode_cascade::bisect(&g, 0.0, upper);
    let residual = (g(t) / t).abs();
    Ok(TLeReport { t, lower, upper, residual, in_bracket: t > lower && t <= upper })
}

/// `c(α, β) = 4(3 - 2α - 8e^{2/(1-2α)}β)/(3 - 2α)²`.
pub fn c_alpha_beta(alpha: f64, beta: f64) -> f64 {
    let s = 3.0 - 2.0 * alpha;
    4.0 * (s - 8.0 * (2.0 / (1.0 - 2.0 * alpha)).exp() * beta) / (s * s)
}

/// Outcome of [`verify_int_le2`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntLe2Report {
    pub n: usize,
    /// Nominal upper limit `16e^{2/(1-2α)} ln A/(12 + 3e)`.
    pub upper_limit: f64,
    pub integral: f64,
    /// Bound on the integrand beyond the quadrature cutoff.
    pub tail: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `I_0 = t`, `I_{k+1} = A e^{-βt}(1 - e^{-I_k})`; returns `x_n(t)^{1-α}A^{αn}`.
fn int_le2_integrand(alpha: f64, beta: f64, ln_a: f64, n: usize, t: f64) -> f64 {
    let a = (ln_a - beta * t).exp();
    let mut i = t;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += i;
        i = -a * (-i).exp_m1();
    }
    ((1.0 - alpha) * (n as f64 * ln_a - sum) + alpha * n as f64 * ln_a).exp()
}

/// `∫ x_n^{1-α} A^{αn}` from 0 to `upper` for the lower-envelope recursion,
/// integrated on a geometric grid and cut where the integrand is negligible.
fn int_le2_quadrature(alpha: f64, beta: f64, ln_a: f64, n: usize, upper: f64) -> (f64, f64) {
    // x_n ≤ A^n e^{-t}, so past `cut` the integrand is below e^{-(1-α)t} A^n
    let cut = upper.min(n as f64 * ln_a / (1.0 - alpha) + 800.0);
    let tail = if upper > cut {
        (n as f64 * ln_a - (1.0 - alpha) * cut).exp() / (1.0 - alpha)
    } else {
        0.0
    };
    let scale = (n as f64 * ln_a).exp();
    let mut pts = vec![0.0];
    let mut t = (cut * 1e-12).max(1e-300);
    while t < cut {
        pts.push(t);
        t *= 2.0;
    }
    pts.push(cut);
    let e = quad::adaptive_pieces(|t| int_le2_integrand(alpha, beta, ln_a, n, t), &pts, 1e-12 * scale * cut.min(1e3));
    (e.value, tail + e.error)
}

/// Checks the integral bound for one `n`.
pub fn verify_int_le2(alpha: f64, beta: f64, ln_a: f64, n: usize) -> Result<IntLe2Report> {
    if !(alpha > 0.0 && alpha < 0.5) || !(ln_a > 0.0) {
        return Err(Error::param(format!("need α ∈ (0, 1/2) and A > 1; got α = {alpha}, ln A = {ln_a}")));
    }
    let e2 = 2.0 / (1.0 - 2.0 * alpha);
    let beta_max = (3.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha) * (-e2).exp() / (32.0 - 32.0 * alpha);
    if !(0.0..beta_max).contains(&beta) {
        return Err(Error::Precondition(format!("β = {beta} outside [0, {beta_max:e})")));
    }
    let upper_limit = 16.0 * e2.exp() * ln_a / (12.0 + 3.0 * std::f64::consts::E);
    let (integral, tail) = int_le2_quadrature(alpha, beta, ln_a, n, upper_limit);
    let bound = int_le2_bound(alpha, beta, ln_a);
    Ok(IntLe2Report { n, upper_limit, integral, tail, bound, holds: integral + tail < bound })
}

/// `A(1 + (A-1)/(1 - A^{1-(1-α)c(α,β)})) 8e^{2/(1-2α)} ln A/(3 - 2α)`.
fn int_le2_bound(alpha: f64, beta: f64, ln_a: f64) -> f64 {
    let cab = c_alpha_beta(alpha, beta);
    let am1 = ln_a.exp_m1();
    let geom = am1 / -((1.0 - (1.0 - alpha) * cab) * ln_a).exp_m1();
    ln_a.exp() * (1.0 + geom) * 8.0 * (2.0 / (1.0 - 2.0 * alpha)).exp() * ln_a / (3.0 - 2.0 * alpha)
}

/// Constants of the closing inequality at one `A`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureReport {
    pub d: f64,
    pub z: f64,
    /// `A - 1`.
    pub ratio_minus_one: f64,
    pub c: f64,
    pub beta: f64,
    pub beta_max: f64,
    /// `a(d, Z, A)`, absent when the level-ratio lemma has no fixed point.
    pub a: Option<f64>,
    pub t_window: Option<f64>,
    /// `C(d, Z)` from the sampled Hölder seminorms.
    pub c_dz_holder: f64,
    pub c_minus: Option<f64>,
    pub c_plus: Option<f64>,
    pub c_plus_0: Option<f64>,
    /// `C(d, Z, A)`.
    pub c_total: Option<f64>,
    /// Analytic bound on `∫_{-T}^0 x_k^{2/3}A^{k/3}`.
    pub j_bound: Option<f64>,
    /// The same integral evaluated on the lower-envelope recursion.
    pub j_quad: Option<f64>,
    /// `C(d, Z, A)·J_bound - (1 + d)`; negative when the bootstrap closes.
    pub margin_bound: Option<f64>,
    pub margin_quad: Option<f64>,
    /// Every hypothesis met and `margin_bound < 0`.
    pub closes: bool,
    /// `margin_quad < 0`, whatever the state of the hypotheses.
    pub closes_measured: bool,
    pub notes: Vec<String>,
}

/// `C(d, Z) = 2^{1/12}(1+d)²([φρ|z|^{1/12}sgn z/r]_{1/12} + (2Z)^{1/12}(1+d)^{11/6} max|φ/r|)`,
/// with the seminorm of the product bounded by `[g] max|h| + max|g| [h]`.
pub fn holder_constant(d: f64, z: f64) -> Result<(f64, f64)> {
    let phi = build_phi3d(d)?;
    let kink = kink_profile(&build_rho_z(z)?)?;
    let g = FnSmooth { f: |r: f64, _: usize| phi.value(r) / r, support: phi.support() };
    let s = 1.0 / 12.0;
    let sem_g = holder_seminorm_fn(&g, s, 4000)?.value;
    let sem_h = holder_seminorm_fn(&kink, s, 4000)?.value.max(1.0);
    let max_of = |f: &dyn SmoothFunction| {
        f.support()
            .iter()
            .flat_map(|&(a, b)| (0..=4000).map(move |i| a + (b - a) * i as f64 / 4000.0))
            .map(|x| f.value(x).abs())
            .fold(0.0, f64::max)
    };
    let max_g = max_of(&g);
    let max_h = max_of(&kink).max((2.0 * z).powf(s));
    let seminorm = sem_g * max_h + max_g * sem_h;
    let c = 2f64.powf(s) * (1.0 + d).powi(2) * (seminorm + (2.0 * z).powf(s) * (1.0 + d).powf(11.0 / 6.0) * max_g);
    Ok((c, max_g))
}

/// Evaluates every constant of the closing inequality at `A = 1 + δ`.
pub fn closure_check(cfg: &AxisymConfig, delta: f64) -> Result<ClosureReport> {
    cfg.validate()?;
    if !(delta > 0.0) {
        return Err(Error::param("A - 1 must be positive"));
    }
    let (d, z) = (cfg.d, cfg.z);
    let ln_a = delta.ln_1p();
    let ratio = 1.0 + delta;
    let c = c_dz(d, z);
    let beta = 6.0 * c / (2.0 + 3.0 * c);
    let alpha = 7.0 / 15.0;
    let beta_max = 31.0 * (-30.0f64).exp() / 960.0;
    let mut notes = Vec::new();
    let (cdz, max_g) = holder_constant(d, z)?;
    let p = 1.0 - 3.0 * d - d * d - d * d * d;
    let s12 = (2.0 * z).powf(1.0 / 12.0);
    let c_plus_0 = {
        let q = d * d * ratio;
        (q < 1.0).then(|| 4.0 * (3.0 * d + d.powi(3)) * s12 * q * max_g / (3.0 * p * p * (1.0 - q)))
    };
    let b = (2.0 + 3.0 * c) / (2.0 - 3.0 * c);
    let a = if c < 2.0 / 15.0 {
        fixed_point_a(ratio, b).ok().map(|a| a / (0.625 * (2.0 - 3.0 * c)))
    } else {
        notes.push(format!("c(d, Z) = {c:.4} ≥ 2/15: the level-ratio lemma has no fixed point"));
        None
    };
    let t_window = a.map(|a| {
        a.min(128.0 * 30f64.exp() * ln_a / ((60.0 + 15.0 * std::f64::consts::E) * (2.0 + 3.0 * c)))
    });
    let d12 = d.powf(1.0 / 12.0);
    let c_minus = a.and_then(|a| {
        let q = d12 * (2.0 * a).exp();
        (q < 1.0).then(|| 4.0 * cdz * q / (1.0 - q) * ((1.0 + d).powi(3) / p).ln())
    });
    let c_plus = a.and_then(|a| {
        let q = d.powf(23.0 / 12.0) * ratio * (a / 3.0).exp();
        (q < 1.0).then(|| 2.0 * cdz * (1.0 + d).powi(6) * q / (p * p * (1.0 - q)))
    });
    let c_total = match (c_minus, c_plus, c_plus_0) {
        (Some(m), Some(pl), Some(p0)) => Some(
            (3.0 * cfg.operator_constant * cdz + m + pl) * ((1.0 + d).powf(1.0 / 6.0) + s12) + 1.0 + 1.5 * c + p0,
        ),
        _ => None,
    };
    let cab = c_alpha_beta(alpha, beta);
    if !(beta < beta_max) {
        notes.push(format!("β = {beta:.4e} is not below {beta_max:.4e}"));
    }
    if !(cab > 15.0 / 8.0) {
        notes.push(format!("c(7/15, β) = {cab:.4} is not above 15/8"));
    }
    let j_bound = (cab > 15.0 / 8.0).then(|| {
        let geom = delta / -((1.0 - 8.0 * cab / 15.0) * ln_a).exp_m1();
        (1.0 + geom) * 192.0 * ratio * 30f64.exp() * ln_a / (31.0 * (2.0 + 3.0 * c))
    });
    let j_quad = t_window.map(|t| {
        let kp = 0.625 * (2.0 + 3.0 * c);
        (0..=cfg.levels)
            .map(|k| int_le2_quadrature(alpha, beta, ln_a, k, kp * t).0 / kp)
            .fold(0.0, f64::max)
    });
    let margin_bound = c_total.zip(j_bound).map(|(ct, j)| ct * j - (1.0 + d));
    let margin_quad = c_total.zip(j_quad).map(|(ct, j)| ct * j - (1.0 + d));
    let closes = notes.is_empty() && margin_bound.is_some_and(|m| m < 0.0);
    let closes_measured = margin_quad.is_some_and(|m| m < 0.0);
    Ok(ClosureReport {
        d,
        z,
        ratio_minus_one: delta,
        c,
        beta,
        beta_max,
        a,
        t_window,
        c_dz_holder: cdz,
        c_minus,
        c_plus,
        c_plus_0,
        c_total,
        j_bound,
        j_quad,
        margin_bound,
        margin_quad,
        closes,
        closes_measured,
        notes,
    })
}

/// Closure constants along a path of `(d, Z, A - 1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureTrend {
    pub rows: Vec<ClosureReport>,
    /// `c(d, Z)` and `β` decrease along the path.
    pub c_decreasing: bool,
    /// `margin_quad` decreases along the path where it is defined.
    pub margin_decreasing: bool,
    /// Number of rows with a defined `margin_quad`.
    pub defined: usize,
    /// The last defined `margin_quad` is negative.
    pub ends_closed: bool,
}

impl ClosureTrend {
    /// Monotone improvement ending in a closed measured inequality.
    pub fn improves(&self) -> bool {
        self.c_decreasing && self.margin_decreasing && self.defined >= 2 && self.ends_closed
    }
}

/// Evaluates [`closure_check`] along `path`, which should move towards
/// smaller `d`, larger `Z` and smaller `A`.
pub fn closure_trend(base: &AxisymConfig, path: &[(f64, f64, f64)]) -> Result<ClosureTrend> {
    let rows = path
        .iter()
        .map(|&(d, z, delta)| closure_check(&AxisymConfig { d, z, ..base.clone() }, delta))
        .collect::<Result<Vec<_>>>()?;
    let c_decreasing = rows.windows(2).all(|w| w[1].c < w[0].c && w[1].beta < w[0].beta);
    let margins: Vec<f64> = rows.iter().filter_map(|r| r.margin_quad).collect();
    let margin_decreasing = margins.windows(2).all(|w| w[1] < w[0]);
    let ends_closed = margins.last().is_some_and(|&m| m < 0.0);
    Ok(ClosureTrend { rows, c_decreasing, margin_decreasing, defined: margins.len(), ends_closed })
}

/// Log-bisection on `A - 1 ∈ [lo, hi]` for the largest value at which the
/// closing inequality holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibleSearch {
    /// `(A - 1, margin_bound, margin_quad)` at every probe.
    pub probes: Vec<(f64, Option<f64>, Option<f64>)>,
    /// Largest probed `A - 1` with a negative analytic margin.
    pub by_bound: Option<f64>,
    /// Largest probed `A - 1` with a negative measured margin.
    pub by_quadrature: Option<f64>,
}

pub fn admissible_search(cfg: &AxisymConfig, lo: f64, hi: f64, steps: usize) -> Result<AdmissibleSearch> {
    if !(0.0 < lo && lo < hi) {
        return Err(Error::param(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let mut probes = Vec::new();
    let mut search = |pick: fn(&ClosureReport) -> Option<f64>| -> Result<Option<f64>> {
        let mut probe = |delta: f64| -> Result<bool> {
            let r = closure_check(cfg, delta)?;
            probes.push((delta, r.margin_bound, r.margin_quad));
            Ok(pick(&r).is_some_and(|m| m < 0.0))
        };
        if probe(hi)? {
            return Ok(Some(hi));
        }
        if !probe(lo)? {
            return Ok(None);
        }
        let (mut good, mut bad) = (lo.ln(), hi.ln());
        for _ in 0..steps {
            let mid = 0.5 * (good + bad);
            if probe(mid.exp())? {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(Some(good.exp()))
    };
    let by_bound = search(|r| r.margin_bound)?;
    let by_quadrature = search(|r| r.margin_quad)?;
    Ok(AdmissibleSearch { probes, by_bound, by_quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn int_ge2_implication_on_random_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let alpha = rng.random_range(0.05..0.45);
            let c = rng.random_range(1e-3..2.0);
            let n = rng.random_range(0..60);
            let probe = recursion_int_ge2(alpha, c, n, 0.0).unwrap().threshold;
            let i0 = probe * rng.random_range(1.0..3.0);
            let rep = recursion_int_ge2(alpha, c, n, i0).unwrap();
            assert!(rep.premise && rep.holds, "{rep:?}");
        }
    }

    #[test]
    fn int_ge2_fixed_point_above_c() {
        let rep = recursion_int_ge2(0.3, 0.5, 200, 1e-9).unwrap();
        let x = rep.i_n;
        assert!(x > 0.5);
        assert!((x - rep.a_prime * (1.0 - (-x).exp())).abs() < 1e-12);
    }

    #[test]
    fn t_le_closed_form_without_damping() {
        // β = 0 gives t = 4 ln A e^{2/(1-2α)} A^{-n}/(3 - 2α) exactly
        let (alpha, ln_a) = (0.2, 0.05);
        for n in [0, 3, 17, 80] {
            let rep = solve_t_le(alpha, 0.0, ln_a, n).unwrap();
            let exact = 4.0 * ln_a * (2.0 / (1.0 - 2.0 * alpha) - n as f64 * ln_a).exp() / (3.0 - 2.0 * alpha);
            assert!((rep.t / exact - 1.0).abs() < 1e-12, "{rep:?} vs {exact}");
            assert!(rep.in_bracket);
        }
    }

    #[test]
    fn t_le_with_damping_stays_in_bracket() {
        let alpha = 0.25;
        let beta = 0.9 * beta_max_t_le(alpha);
        for n in 0..40 {
            let rep = solve_t_le(alpha, beta, 0.1, n).unwrap();
            assert!(rep.in_bracket && rep.residual < 1e-10, "n = {n}: {rep:?}");
        }
        assert!(solve_t_le(alpha, 2.0 * beta_max_t_le(alpha), 0.1, 3).is_err());
    }

    #[test]
    fn int_le2_bound_holds() {
        for (alpha, ln_a) in [(0.25, 0.05), (0.1, 0.2), (7.0 / 15.0, 1e-3)] {
            for n in [0, 1, 5, 20] {
                let rep = verify_int_le2(alpha, 0.0, ln_a, n).unwrap();
                assert!(rep.holds, "{rep:?}");
            }
        }
    }

    #[test]
    fn cascade_levels_separate() {
        let cfg = AxisymConfig { d: 0.005, z: 2000.0, ratio: 1.02, ..Default::default() };
        let rep = cascade_5_4(&cfg, 8, 4, 3).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn closure_margins_improve_along_the_limit() {
        let path = [(0.05, 50.0, 1e-2), (0.01, 200.0, 1e-4), (0.005, 400.0, 1e-6), (0.002, 1000.0, 1e-9)];
        let trend = closure_trend(&AxisymConfig::default(), &path).unwrap();
        assert!(trend.improves(), "{trend:?}");
        assert!(trend.rows.iter().all(|r| !r.closes));
    }

    #[test]
    fn closure_reports_large_c_honestly() {
        let rep = closure_check(&AxisymConfig::default(), 0.01).unwrap();
        assert!(!rep.closes);
        assert!(rep.c > 0.5 && rep.beta > rep.beta_max);
        assert!(!rep.notes.is_empty());
    }
}
