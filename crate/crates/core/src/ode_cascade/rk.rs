//! Dormand–Prince 5(4) with the standard quartic continuous extension.

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and step limits.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Tolerance { rtol: tol, atol: tol, h_min: 1e-14 }
    }
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseStep {
    t0: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }

    fn contains(&self, t: f64) -> bool {
        let (a, b) = if self.h > 0.0 { (self.t0, self.t0 + self.h) } else { (self.t0 + self.h, self.t0) };
        t >= a - 1e-15 * a.abs().max(1.0) && t <= b + 1e-15 * b.abs().max(1.0)
    }
}

/// Piecewise-polynomial continuous solution assembled from accepted steps.
#[derive(Debug, Clone, Default)]
pub struct DenseSolution {
    steps: Vec<DenseStep>,
    dim: usize,
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Covered interval as (lower, upper).
    pub fn span(&self) -> Option<(f64, f64)> {
        let first = self.steps.first()?;
        let last = self.steps.last()?;
        let a = first.t0.min(first.t0 + first.h).min(last.t0.min(last.t0 + last.h));
        let b = first.t0.max(first.t0 + first.h).max(last.t0.max(last.t0 + last.h));
        Some((a, b))
    }

    pub fn eval(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let step = self.locate(t)?;
        step.eval(t, out);
        Ok(())
    }

    pub fn eval_component(&self, t: f64, i: usize) -> Result<f64> {
        let step = self.locate(t)?;
        let theta = (t - step.t0) / step.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &step.rcont;
        Ok(r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i]))))
    }

    fn locate(&self, t: f64) -> Result<&DenseStep> {
        if self.steps.is_empty() {
            return Err(Error::Precondition("empty dense solution".into()));
        }
        // steps are ordered along the direction of integration; every
        // segment run appends in the same direction
        let forward = self.steps[0].h > 0.0;
        let idx = self.steps.partition_point(|s| {
            if forward {
                s.t0 + s.h < t
            } else {
                s.t0 + s.h > t
            }
        });
        let idx = idx.min(self.steps.len() - 1);
        let step = &self.steps[idx];
        if step.contains(t) {
            return Ok(step);
        }
        Err(Error::Precondition(format!("time {t} outside the integrated span")))
    }

    fn append(&mut self, other: DenseSolution) {
        if self.dim == 0 {
            self.dim = other.dim;
        }
        self.steps.extend(other.steps);
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// Returns the end state and the dense solution over the interval.
pub fn dopri5<F>(f: F, t0: f64, t1: f64, y0: &[f64], tol: Tolerance) -> Result<(Vec<f64>, DenseSolution)>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut dense = DenseSolution { steps: Vec::new(), dim };
    let mut y = y0.to_vec();
    if t0 == t1 {
        return Ok((y, dense));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut ys = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];
    f(t, &y, &mut k1);

    // initial step from the derivative scale
    let scale = |y: &[f64], i: usize| tol.atol + tol.rtol * y[i].abs();
    let d0 = rms(&y, |i| scale(&y, i));
    let d1 = rms(&k1, |i| scale(&y, i));
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span).max(tol.h_min.min(span));
    let mut last_reject = false;

    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-15 * span.max(1.0) {
            break;
        }
        if h >= remaining {
            h = remaining;
        }
        let hs = dir * h;
        for i in 0..dim {
            ys[i] = y[i] + hs * A21 * k1[i];
        }
        f(t + C2 * hs, &ys, &mut k2);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hs, &ys, &mut k3);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hs, &ys, &mut k4);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hs, &ys, &mut k5);
        for i in 0..dim {
            ys[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if h == remaining { t1 } else { t + hs };
        f(t_new, &ys, &mut k6);
        for i in 0..dim {
            ynew[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &ynew, &mut k7);
        let mut err = 0.0;
        for i in 0..dim {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            if h < tol.h_min {
                return Err(Error::StepUnderflow { t_last: t });
            }
            last_reject = true;
            continue;
        }
        if err <= 1.0 {
            let mut rcont: [Vec<f64>; 5] = Default::default();
            rcont[0] = y.clone();
            rcont[1] = (0..dim).map(|i| ynew[i] - y[i]).collect();
            rcont[2] = (0..dim).map(|i| hs * k1[i] - rcont[1][i]).collect();
            rcont[3] = (0..dim).map(|i| rcont[1][i] - hs * k7[i] - rcont[2][i]).collect();
            rcont[4] = (0..dim)
                .map(|i| hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            dense.steps.push(DenseStep { t0: t, h: t_new - t, rcont });
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            if last_reject {
                fac = fac.min(1.0);
            }
            h *= fac.clamp(0.2, 5.0);
            last_reject = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.1);
            last_reject = true;
            if h < tol.h_min {
                return Err(Error::StepUnderflow { t_last: t });
            }
        }
    }
    Ok((y, dense))
}

/// Integrates across `breaks` (monotone, starting at the initial time),
/// restarting the method at every break so that piecewise-smooth right-hand
/// sides are handled exactly. `f` receives the index of the active piece.
pub fn dopri5_piecewise<F>(f: F, breaks: &[f64], y0: &[f64], tol: Tolerance) -> Result<(Vec<f64>, DenseSolution)>
where
    F: Fn(usize, f64, &[f64], &mut [f64]),
{
    let mut y = y0.to_vec();
    let mut dense = DenseSolution { steps: Vec::new(), dim: y0.len() };
    for (piece, w) in breaks.windows(2).enumerate() {
        let (y1, d) = dopri5(|t, y, dy| f(piece, t, y, dy), w[0], w[1], &y, tol)?;
        y = y1;
        dense.append(d);
    }
    Ok((y, dense))
}

fn rms(v: &[f64], sc: impl Fn(usize) -> f64) -> f64 {
    let s: f64 = v.iter().enumerate().map(|(i, x)| (x / sc(i)).powi(2)).sum();
    (s / v.len().max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_with_dense_output() {
        let (y, dense) = dopri5(|_, y, dy| dy[0] = -y[0], 0.0, 2.0, &[1.0], Tolerance::uniform(1e-12)).unwrap();
        assert!((y[0] - (-2f64).exp()).abs() < 1e-11);
        for i in 0..=40 {
            let t = 0.05 * i as f64;
            let v = dense.eval_component(t, 0).unwrap();
            assert!((v - (-t).exp()).abs() < 1e-10, "t={t} v={v}");
        }
    }

    #[test]
    fn backward_integration() {
        let (y, dense) =
            dopri5(|t, _, dy| dy[0] = t.cos(), 0.0, -3.0, &[0.0], Tolerance::uniform(1e-12)).unwrap();
        assert!((y[0] - (-3f64).sin()).abs() < 1e-11);
        let v = dense.eval_component(-1.234, 0).unwrap();
        assert!((v - (-1.234f64).sin()).abs() < 1e-10);
        assert!(dense.eval_component(0.5, 0).is_err());
    }

    #[test]
    fn piecewise_restarts_at_breaks() {
        // y' = 1 on [0,1], y' = -1 on [1,2]
        let (y, dense) = dopri5_piecewise(
            |piece, _, _, dy| dy[0] = if piece == 0 { 1.0 } else { -1.0 },
            &[0.0, 1.0, 2.0],
            &[0.0],
            Tolerance::uniform(1e-12),
        )
        .unwrap();
        assert!(y[0].abs() < 1e-12);
        assert!((dense.eval_component(1.5, 0).unwrap() - 0.5).abs() < 1e-12);
    }
}
