//! Truncated Taylor series arithmetic, enough to differentiate the bump
//! shapes exactly.

pub(crate) const ORDER: usize = 7;

/// `c[k] = f^{(k)}(x)/k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet(pub [f64; ORDER]);

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = v;
        Jet(c)
    }

    pub fn var(x: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = x;
        c[1] = 1.0;
        Jet(c)
    }

    pub fn zero() -> Self {
        Jet([0.0; ORDER])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn derivative(&self, order: usize) -> f64 {
        if order >= ORDER {
            return f64::NAN;
        }
        let fact: f64 = (1..=order).map(|k| k as f64).product();
        self.0[order] * fact
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.0.iter_mut().for_each(|c| *c *= s);
        self
    }

    pub fn add(mut self, o: Jet) -> Self {
        self.0.iter_mut().zip(o.0).for_each(|(a, b)| *a += b);
        self
    }

    pub fn shift(mut self, v: f64) -> Self {
        self.0[0] += v;
        self
    }

    pub fn mul(&self, o: &Jet) -> Self {
        let mut c = [0.0; ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }

    pub fn recip(&self) -> Self {
        let a = &self.0;
        let mut b = [0.0; ORDER];
        b[0] = 1.0 / a[0];
        for k in 1..ORDER {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s / a[0];
        }
        Jet(b)
    }

    pub fn exp(&self) -> Self {
        let a = &self.0;
        let mut e = [0.0; ORDER];
        e[0] = a[0].exp();
        for k in 1..ORDER {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    /// `a^p` for `a_0 > 0`.
    pub fn powf(&self, p: f64) -> Self {
        let a = &self.0;
        let mut b = [0.0; ORDER];
        b[0] = a[0].powf(p);
        for k in 1..ORDER {
            let s: f64 = (1..=k).map(|j| (p * j as f64 - (k - j) as f64) * a[j] * b[k - j]).sum();
            b[k] = s / (k as f64 * a[0]);
        }
        Jet(b)
    }
}

/// `exp(-1/(1-u²))` on `|u| < 1`, zero elsewhere.
pub(crate) fn mollifier(u: Jet) -> Jet {
    let p = u.mul(&u).scale(-1.0).shift(1.0);
    if p.value() <= 1.0 / 700.0 {
        return Jet::zero();
    }
    p.recip().scale(-1.0).exp()
}

/// `exp(-1/t)` for `t > 0`, zero elsewhere.
pub(crate) fn half_mollifier(t: Jet) -> Jet {
    if t.value() <= 1.0 / 700.0 {
        return Jet::zero();
    }
    t.recip().scale(-1.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_derivatives() {
        let x = Jet::var(0.7);
        let e = x.exp();
        for k in 0..ORDER {
            assert!((e.derivative(k) - 0.7f64.exp()).abs() < 1e-13);
        }
        let r = x.recip();
        assert!((r.derivative(3) + 6.0 / 0.7f64.powi(4)).abs() < 1e-10);
        let p = x.powf(1.0 / 12.0);
        let d2 = (1.0 / 12.0) * (1.0 / 12.0 - 1.0) * 0.7f64.powf(1.0 / 12.0 - 2.0);
        assert!((p.derivative(2) - d2).abs() < 1e-13);
    }

    #[test]
    fn mollifier_matches_finite_differences() {
        let h = 1e-4;
        let f = |u: f64| mollifier(Jet::var(u)).value();
        for &u in &[-0.6, 0.1, 0.8] {
            let j = mollifier(Jet::var(u));
            let fd1 = (f(u + h) - f(u - h)) / (2.0 * h);
            let fd2 = (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
            assert!((j.derivative(1) - fd1).abs() < 1e-7 * (1.0 + fd1.abs()));
            assert!((j.derivative(2) - fd2).abs() < 1e-4 * (1.0 + fd2.abs()));
        }
        assert_eq!(mollifier(Jet::var(1.0)).value(), 0.0);
    }
}
