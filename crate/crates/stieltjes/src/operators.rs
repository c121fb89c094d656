//! The derivative-inequality families F^[λ]_{n,k} computed by every formula
//! variant, the sequence difference operator Δ^k, and the measure-backed
//! closed form that serves as the independent oracle.
//!
//! For λ > 0 and a smooth f on (0, ∞),
//!
//! ```text
//! F[λ]_{n,k}(x) = (−1)^n Σ_{j=0}^k C(k,j) · Γ(n+k+λ)/Γ(n+j+λ) · x^j · f^(n+j)(x)
//!              = (−1)^n x^{−(n+λ−1)} D^k [ x^{n+k+λ−1} D^n f(x) ].
//! ```
//!
//! Nonnegativity of all of them characterizes generalized Stieltjes functions
//! of order λ. The alternating sum cancels catastrophically, so every value
//! is paired with its cancellation scale Σ_j |term_j|: "nonnegative" always
//! means `value ≥ −ε·scale`.

use crate::error::{Error, Result};
use crate::expr::{FunctionSpec, Jet};
use crate::measure::{check_lambda, check_positive_x, power_primitive, MeasureSpec};
use crate::real::{binomial, factorial, rising, Real};
use crate::series::Series;

/// A computed F value together with the cancellation scale of the sum that
/// produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct FValue<R: Real> {
    pub value: R,
    pub scale: R,
}

/// Γ(n+k+λ)/Γ(n+j+λ) as the rising product ∏_{i=j}^{k−1}(n+λ+i).
pub fn gamma_ratio<R: Real>(n: usize, j: usize, k: usize, lambda: f64) -> Result<R> {
    if j > k {
        return Err(Error::BadIndices { j, k });
    }
    check_lambda(lambda)?;
    let mut acc = R::one();
    for i in j..k {
        acc = acc * (R::from_usize(n + i) + R::from_f64(lambda));
    }
    Ok(acc)
}

/// The binomial-sum formula, evaluated from a jet of derivatives at x > 0.
///
/// Multiplication-only arithmetic throughout (binomials, rising products,
/// powers of x built incrementally), so rational inputs stay exact in
/// extended precision.
pub fn f_nk_sum<R: Real>(jet: &Jet<R>, lambda: f64, n: usize, k: usize) -> Result<FValue<R>> {
    check_lambda(lambda)?;
    if jet.order() < n + k {
        return Err(Error::InsufficientOrder {
            needed: n + k,
            available: jet.order(),
        });
    }
    let x = jet.x0();
    // gamma_ratio(n, j, k) for j = 0..=k by the backward recurrence
    // gr_j = gr_{j+1} · (n+λ+j), starting from gr_k = 1
    let mut gr = vec![R::one(); k + 1];
    for j in (0..k).rev() {
        gr[j] = gr[j + 1].clone() * (R::from_usize(n + j) + R::from_f64(lambda));
    }
    let mut x_pow = R::one();
    let mut sum = R::zero();
    let mut scale = R::zero();
    for j in 0..=k {
        if j > 0 {
            x_pow = x_pow * x;
        }
        let term = binomial::<R>(k, j) * &gr[j] * &x_pow * jet.deriv(n + j)?;
        scale += term.clone().abs();
        sum += term;
    }
    let value = if n % 2 == 0 { sum } else { -sum };
    Ok(FValue { value, scale })
}

/// The D-operator formula: (−1)^n x^{−(n+λ−1)} D^k [x^{n+k+λ−1} D^n f](x),
/// evaluated by truncated-series composition.
pub fn f_nk_operator<R: Real>(
    fn_spec: &FunctionSpec,
    lambda: f64,
    n: usize,
    k: usize,
    x: &R,
) -> Result<R> {
    check_lambda(lambda)?;
    check_positive_x(x)?;
    let jet = fn_spec.jet(x, n + k)?;
    f_nk_operator_from_jet(&jet, lambda, n, k)
}

/// Same as [`f_nk_operator`] but reusing an existing jet (order ≥ n+k).
pub fn f_nk_operator_from_jet<R: Real>(
    jet: &Jet<R>,
    lambda: f64,
    n: usize,
    k: usize,
) -> Result<R> {
    check_lambda(lambda)?;
    if jet.order() < n + k {
        return Err(Error::InsufficientOrder {
            needed: n + k,
            available: jet.order(),
        });
    }
    let x = jet.x0();
    // Taylor coefficients of D^n f around x, up to degree k
    let mut dnf = Vec::with_capacity(k + 1);
    let mut fact = R::one();
    for i in 0..=k {
        if i > 0 {
            fact = fact * R::from_usize(i);
        }
        dnf.push(jet.deriv(n + i)?.clone() / &fact);
    }
    let dnf = Series { c: dnf };
    let alpha = R::from_usize(n + k) + R::from_f64(lambda) - R::one();
    let xpow = Series::power_of_x(&alpha, x, k);
    let prod = dnf.mul(&xpow);
    let kth = prod.c[k].clone() * factorial::<R>(k);
    let pre_exp = -(R::from_usize(n) + R::from_f64(lambda) - R::one());
    let pre = Real::powf(x, &pre_exp);
    let v = kth * pre;
    Ok(if n % 2 == 0 { v } else { -v })
}

/// The three equivalent λ = 1 formulas of the classical (Widder) family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidderVariant {
    /// The binomial sum with λ = 1.
    Sum,
    /// (−1)^n x^{−n} D^k [x^{n+k} D^n f](x).
    Deriv1,
    /// (−1)^n D^{n+k} [x^k f(x)].
    Deriv2,
}

/// F_{n,k}(x) at λ = 1 by the chosen formula.
pub fn f_nk_widder<R: Real>(
    fn_spec: &FunctionSpec,
    n: usize,
    k: usize,
    x: &R,
    variant: WidderVariant,
) -> Result<R> {
    check_positive_x(x)?;
    match variant {
        WidderVariant::Sum => {
            let jet = fn_spec.jet(x, n + k)?;
            Ok(f_nk_sum(&jet, 1.0, n, k)?.value)
        }
        WidderVariant::Deriv1 => f_nk_operator(fn_spec, 1.0, n, k, x),
        WidderVariant::Deriv2 => {
            let jet = fn_spec.jet(x, n + k)?;
            let f_series = jet.to_series();
            let xk = Series::power_of_x(&R::from_usize(k), x, n + k);
            let prod = f_series.mul(&xk);
            let v = prod.c[n + k].clone() * factorial::<R>(n + k);
            Ok(if n % 2 == 0 { v } else { -v })
        }
    }
}

/// The closed-form oracle for measure-backed functions:
///
/// ```text
/// F[λ]_{n,k}(x) = Γ(n+k+λ)/Γ(λ) · [ C·δ_{n,0} + ∫ t^k/(x+t)^{n+k+λ} dρ(t) ],
/// ```
///
/// with piece integrals expanded through t^k = ((x+t) − x)^k.
pub fn f_nk_measure_oracle<R: Real>(
    m: &MeasureSpec,
    lambda: f64,
    n: usize,
    k: usize,
    x: &R,
) -> Result<R> {
    check_lambda(lambda)?;
    check_positive_x(x)?;
    let lam = R::from_f64(lambda);
    let mut inner = if n == 0 {
        R::from_f64(m.c())
    } else {
        R::zero()
    };
    let expo = -(R::from_usize(n + k) + &lam);
    for &(t, w) in m.atoms() {
        let t_r = R::from_f64(t);
        let base = x.clone() + &t_r;
        let mut tk = R::one();
        for _ in 0..k {
            tk = tk * &t_r;
        }
        inner += R::from_f64(w) * tk * Real::powf(&base, &expo);
    }
    for &(a, b, h) in m.pieces() {
        // ∫_a^b t^k (x+t)^{−(n+k+λ)} dt with the binomial expansion of t^k
        let mut piece = R::zero();
        let mut neg_x_pow = vec![R::one(); k + 1];
        for p in 1..=k {
            neg_x_pow[p] = neg_x_pow[p - 1].clone() * &-x.clone();
        }
        for j in 0..=k {
            let s_f64 = (n + k) as f64 + lambda - (j as f64) - 1.0;
            let s = R::from_usize(n + k) + &lam - R::from_usize(j) - R::one();
            let pp = power_primitive(x, a, b, s_f64, &s);
            piece += binomial::<R>(k, j) * &neg_x_pow[k - j] * pp;
        }
        inner += R::from_f64(h) * piece;
    }
    Ok(rising(&lam, n + k) * inner)
}

/// Σ_{j=0}^k (−1)^j C(k,j) c_{n+j}, i.e. (−1)^k (Δ^k c)_n, via the Pascal
/// recurrence v_i ← v_i − v_{i+1}. Differences of equal entries are exact
/// zeros in any binary precision.
pub fn delta_k<R: Real>(c: &[R], n: usize, k: usize) -> Result<R> {
    Ok(delta_k_scaled(c, n, k)?.0)
}

/// [`delta_k`] together with the cancellation scale Σ_j C(k,j)·|c_{n+j}|.
pub fn delta_k_scaled<R: Real>(c: &[R], n: usize, k: usize) -> Result<(R, R)> {
    if n + k >= c.len() {
        return Err(Error::OutOfRange {
            index: n + k,
            len: c.len(),
        });
    }
    let mut v: Vec<R> = c[n..=n + k].to_vec();
    let mut s: Vec<R> = v.iter().map(|e| e.clone().abs()).collect();
    for step in 0..k {
        for i in 0..k - step {
            v[i] = v[i].clone() - &v[i + 1];
            s[i] = s[i].clone() + &s[i + 1];
        }
    }
    Ok((v[0].clone(), s[0].clone()))
}

/// The matrix F[λ]_{n,k}(x) for 0 ≤ n ≤ n_max, 0 ≤ k ≤ k_max, with per-entry
/// cancellation scales.
#[derive(Clone, Debug)]
pub struct FTable<R: Real> {
    pub x: R,
    pub lambda: f64,
    pub values: Vec<Vec<R>>,
    pub scales: Vec<Vec<R>>,
}

impl<R: Real> FTable<R> {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn k_max(&self) -> usize {
        self.values[0].len() - 1
    }

    fn csv_of(rows: &[Vec<R>]) -> String {
        let k_max = rows[0].len() - 1;
        let mut out = String::new();
        for k in 0..=k_max {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!("k={k}"));
        }
        out.push('\n');
        for row in rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&v.fmt_sci());
            }
            out.push('\n');
        }
        out
    }

    /// Values only: header `k=0..k_max`, one row per n.
    pub fn to_csv(&self) -> String {
        Self::csv_of(&self.values)
    }

    /// The companion cancellation-scale table in the same layout.
    pub fn scales_csv(&self) -> String {
        Self::csv_of(&self.scales)
    }
}

/// Builds the full table from one jet, cross-checking the sum formula
/// against the D-operator formula on a deterministic sample of entries.
pub fn f_table<R: Real>(
    fn_spec: &FunctionSpec,
    lambda: f64,
    x: &R,
    n_max: usize,
    k_max: usize,
) -> Result<FTable<R>> {
    check_lambda(lambda)?;
    check_positive_x(x)?;
    let jet = fn_spec.jet(x, n_max + k_max)?;
    // past this total order the f64 operator route is itself noise, so the
    // cross-check would only compare roundoff with roundoff
    let check_cap = if R::rel_tol_f64() < 1e-20 { 25 } else { 10 };
    let mut values = Vec::with_capacity(n_max + 1);
    let mut scales = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut vrow = Vec::with_capacity(k_max + 1);
        let mut srow = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let fv = f_nk_sum(&jet, lambda, n, k)?;
            let sampled = (3 * n + 5 * k) % 4 == 0 || n + k <= 2;
            if sampled && n + k <= check_cap {
                let op = f_nk_operator_from_jet(&jet, lambda, n, k)?;
                let tol = R::rel_tol()
                    * (R::from_f64(100.0) * (fv.scale.clone() + op.clone().abs())
                        + R::one());
                if (fv.value.clone() - &op).abs() > tol {
                    return Err(Error::FormulaMismatch {
                        n,
                        k,
                        detail: format!(
                            "sum {} vs operator {}",
                            fv.value.fmt_sci(),
                            op.fmt_sci()
                        ),
                    });
                }
            }
            vrow.push(fv.value);
            srow.push(fv.scale);
        }
        values.push(vrow);
        scales.push(srow);
    }
    Ok(FTable {
        x: x.clone(),
        lambda,
        values,
        scales,
    })
}
