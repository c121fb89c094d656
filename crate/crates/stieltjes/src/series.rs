//! Truncated Taylor series arithmetic (internal).
//!
//! A `Series` holds the coefficients a_i = f^(i)(x0)/i! of an expansion
//! around some fixed point; the point itself travels separately because the
//! recurrences never need it. The public jet type converts to and from
//! derivative form at the module boundary.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug)]
pub(crate) struct Series<R> {
    pub c: Vec<R>,
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain { msg: msg.into() }
}

impl<R: Real> Series<R> {
    pub fn constant(v: R, order: usize) -> Self {
        let mut c = vec![R::zero(); order + 1];
        c[0] = v;
        Series { c }
    }

    pub fn variable(x0: R, order: usize) -> Self {
        let mut c = vec![R::zero(); order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = R::one();
        }
        Series { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| a.clone() + b)
            .collect();
        Series { c }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| a.clone() - b)
            .collect();
        Series { c }
    }

    pub fn neg(&self) -> Self {
        Series {
            c: self.c.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut c = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = R::zero();
            for k in 0..=i {
                acc += self.c[k].clone() * &rhs.c[i - k];
            }
            c.push(acc);
        }
        Series { c }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.c[0] == R::zero() {
            return Err(domain("division by a function vanishing at the base point"));
        }
        let n = self.order().min(rhs.order());
        let mut q: Vec<R> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = self.c[i].clone();
            for k in 0..i {
                acc -= q[k].clone() * &rhs.c[i - k];
            }
            q.push(acc / &rhs.c[0]);
        }
        Ok(Series { c: q })
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e: Vec<R> = Vec::with_capacity(n + 1);
        e.push(Real::exp(&self.c[0]));
        for i in 1..=n {
            let mut acc = R::zero();
            for k in 1..=i {
                acc += R::from_usize(k) * &self.c[k] * &e[i - k];
            }
            e.push(acc / R::from_usize(i));
        }
        Series { c: e }
    }

    pub fn ln(&self) -> Result<Self> {
        if !(self.c[0] > R::zero()) {
            return Err(domain("log of a nonpositive value"));
        }
        let n = self.order();
        let mut l: Vec<R> = Vec::with_capacity(n + 1);
        l.push(Real::ln(&self.c[0]));
        for i in 1..=n {
            let mut acc = R::zero();
            for k in 1..i {
                acc += R::from_usize(k) * &l[k] * &self.c[i - k];
            }
            let v = (self.c[i].clone() - acc / R::from_usize(i)) / &self.c[0];
            l.push(v);
        }
        Ok(Series { c: l })
    }

    pub fn sqrt(&self) -> Result<Self> {
        if !(self.c[0] > R::zero()) {
            return Err(domain("sqrt of a nonpositive value"));
        }
        let n = self.order();
        let mut s: Vec<R> = Vec::with_capacity(n + 1);
        s.push(Real::sqrt(&self.c[0]));
        let two_s0 = s[0].clone() + &s[0];
        for i in 1..=n {
            let mut acc = self.c[i].clone();
            for k in 1..i {
                acc -= s[k].clone() * &s[i - k];
            }
            s.push(acc / &two_s0);
        }
        Ok(Series { c: s })
    }

    /// Real power with a non-integer exponent, by the recurrence that follows
    /// from g·(g^α)′ = α·g′·g^α. Requires a strictly positive base value.
    pub fn powf(&self, alpha: &R) -> Result<Self> {
        if !(self.c[0] > R::zero()) {
            return Err(domain("real power of a nonpositive value"));
        }
        let n = self.order();
        let mut p: Vec<R> = Vec::with_capacity(n + 1);
        p.push(Real::powf(&self.c[0], alpha));
        for i in 1..=n {
            let mut acc = R::zero();
            for k in 1..=i {
                let w = (alpha.clone() + R::one()) * R::from_usize(k) - R::from_usize(i);
                acc += w * &self.c[k] * &p[i - k];
            }
            p.push(acc / (R::from_usize(i) * &self.c[0]));
        }
        Ok(Series { c: p })
    }

    /// Integer power by repeated squaring; tolerates a vanishing base value
    /// for nonnegative exponents.
    pub fn powi(&self, m: i64) -> Result<Self> {
        let order = self.order();
        if m == 0 {
            return Ok(Series::constant(R::one(), order));
        }
        let mut base = self.clone();
        let mut e = m.unsigned_abs();
        let mut acc = Series::constant(R::one(), order);
        loop {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        if m < 0 {
            Series::constant(R::one(), order).div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Series of x ↦ x^alpha around x0 > 0, by the binomial-coefficient
    /// ratio a_i/a_{i−1} = (alpha − i + 1)/(i·x0). Exactly truncates to a
    /// polynomial when alpha is a nonnegative integer.
    pub fn power_of_x(alpha: &R, x0: &R, order: usize) -> Self {
        let mut c = Vec::with_capacity(order + 1);
        c.push(Real::powf(x0, alpha));
        for i in 1..=order {
            let num = alpha.clone() - R::from_usize(i - 1);
            let den = R::from_usize(i) * x0;
            let next = c[i - 1].clone() * num / den;
            c.push(next);
        }
        Series { c }
    }
}
