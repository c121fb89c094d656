//! Top-level decision procedures: grid sweeps of the F families, Widder's
//! diagonal condition, complete-monotonicity checks, the order-embedding
//! residual, the λ-limit identities, and the complex upper-half-plane check.
//!
//! A "consistent" verdict is grid-limited evidence (the sign conditions
//! quantify over all x, n, k); a reported violation is a certificate of
//! non-membership, and the tests re-verify certificates in extended
//! precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::FunctionSpec;
use crate::operators::{f_nk_sum, f_table};
use crate::quadrature::{adaptive, ln_beta};
use crate::real::Real;
use crate::report::{escape, f64_num};

/// A logarithmically spaced evaluation grid on (0, ∞).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    count: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0) || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::BadSpec {
                msg: format!("grid needs 0 < lo < hi, got [{lo}, {hi}]"),
            });
        }
        if count < 2 {
            return Err(Error::BadSpec {
                msg: format!("grid needs at least 2 points, got {count}"),
            });
        }
        Ok(Grid { lo, hi, count })
    }

    /// Parses `lo:hi:count`.
    pub fn parse(src: &str) -> Result<Self> {
        let parts: Vec<&str> = src.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::BadSpec {
                msg: format!("grid spec '{src}' is not lo:hi:count"),
            });
        }
        let lo: f64 = parts[0].parse().map_err(|_| Error::BadSpec {
            msg: format!("bad grid lower bound '{}'", parts[0]),
        })?;
        let hi: f64 = parts[1].parse().map_err(|_| Error::BadSpec {
            msg: format!("bad grid upper bound '{}'", parts[1]),
        })?;
        let count: usize = parts[2].parse().map_err(|_| Error::BadSpec {
            msg: format!("bad grid count '{}'", parts[2]),
        })?;
        Grid::new(lo, hi, count)
    }

    pub fn points(&self) -> Vec<f64> {
        let lg_lo = self.lo.log10();
        let lg_hi = self.hi.log10();
        (0..self.count)
            .map(|i| 10f64.powf(lg_lo + (i as f64) * (lg_hi - lg_lo) / ((self.count - 1) as f64)))
            .collect()
    }
}

impl Default for Grid {
    /// 61 log-spaced points on [1e−3, 1e3].
    fn default() -> Self {
        Grid {
            lo: 1e-3,
            hi: 1e3,
            count: 61,
        }
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "log[{},{}]x{}", self.lo, self.hi, self.count)
    }
}

/// One observed sign failure: a table entry (or derivative) at grid point x.
#[derive(Clone, Debug)]
pub struct Violation<R: Real> {
    pub x: f64,
    pub n: usize,
    pub k: usize,
    pub value: R,
    pub scale: R,
}

/// Evidence gathered by a sweep of one of the sign conditions.
#[derive(Clone, Debug)]
pub struct ClassificationReport<R: Real> {
    pub function: String,
    pub check: &'static str,
    pub lambda: Option<f64>,
    pub precision: &'static str,
    pub grid: String,
    pub n_max: usize,
    pub k_max: usize,
    /// Relative tolerance multiplying each entry's cancellation scale.
    pub tol: f64,
    pub consistent: bool,
    pub violations: Vec<Violation<R>>,
    /// min over all entries and points of value/scale.
    pub min_normalized: f64,
    /// (x, min normalized at x) per grid point, for plotting.
    pub per_point_min: Vec<(f64, f64)>,
}

const CONSISTENT_NOTE: &str =
    "grid-limited evidence: the condition was checked on finitely many (x, n, k) only";
const VIOLATED_NOTE: &str = "violation certificate: membership is ruled out";

impl<R: Real> ClassificationReport<R> {
    pub fn to_json(&self) -> String {
        let lambda = match self.lambda {
            Some(l) => f64_num(l),
            None => "null".to_string(),
        };
        let mut viol = String::from("[");
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                viol.push(',');
            }
            viol.push_str(&format!(
                "{{\"x\":{},\"n\":{},\"k\":{},\"value\":{},\"scale\":{}}}",
                f64_num(v.x),
                v.n,
                v.k,
                v.value.fmt_sci(),
                v.scale.fmt_sci()
            ));
        }
        viol.push(']');
        let mut ppm = String::from("[");
        for (i, (x, m)) in self.per_point_min.iter().enumerate() {
            if i > 0 {
                ppm.push(',');
            }
            ppm.push_str(&format!("[{},{}]", f64_num(*x), f64_num(*m)));
        }
        ppm.push(']');
        format!(
            "{{\"function\":\"{}\",\"check\":\"{}\",\"lambda\":{},\"precision\":\"{}\",\"grid\":\"{}\",\"n_max\":{},\"k_max\":{},\"tol\":{},\"verdict\":\"{}\",\"note\":\"{}\",\"min_normalized\":{},\"violation_count\":{},\"violations\":{},\"per_point_min\":{}}}",
            escape(&self.function),
            self.check,
            lambda,
            self.precision,
            escape(&self.grid),
            self.n_max,
            self.k_max,
            f64_num(self.tol),
            if self.consistent { "consistent" } else { "violated" },
            if self.consistent { CONSISTENT_NOTE } else { VIOLATED_NOTE },
            f64_num(self.min_normalized),
            self.violations.len(),
            viol,
            ppm,
        )
    }

    /// `x,min_normalized` rows per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,min_normalized\n");
        for (x, m) in &self.per_point_min {
            out.push_str(&format!("{},{}\n", f64_num(*x), f64_num(*m)));
        }
        out
    }
}

fn precision_name<R: Real>() -> &'static str {
    if R::rel_tol_f64() < 1e-20 {
        "extended"
    } else {
        "f64"
    }
}

/// value/scale with the convention 0/0 = 0 (scale ≥ |value| always holds).
fn normalized<R: Real>(value: &R, scale: &R) -> f64 {
    if *scale == R::zero() {
        0.0
    } else {
        (value.clone() / scale).to_f64()
    }
}

/// Sweeps the full F table over the grid: the condition-(b) test at order λ.
pub fn check_condition_b<R: Real>(
    fn_spec: &FunctionSpec,
    lambda: f64,
    grid: &Grid,
    n_max: usize,
    k_max: usize,
    eps_rel: f64,
) -> Result<ClassificationReport<R>> {
    let eps = R::from_f64(eps_rel);
    let mut violations = Vec::new();
    let mut min_norm = f64::INFINITY;
    let mut per_point_min = Vec::with_capacity(grid.count);
    for x in grid.points() {
        let xr = R::from_f64(x);
        let table = f_table(fn_spec, lambda, &xr, n_max, k_max)?;
        let mut point_min = f64::INFINITY;
        for n in 0..=n_max {
            for k in 0..=k_max {
                let v = &table.values[n][k];
                let s = &table.scales[n][k];
                let norm = normalized(v, s);
                if norm < point_min {
                    point_min = norm;
                }
                if v.clone() + eps.clone() * s < R::zero() {
                    violations.push(Violation {
                        x,
                        n,
                        k,
                        value: v.clone(),
                        scale: s.clone(),
                    });
                }
            }
        }
        if point_min < min_norm {
            min_norm = point_min;
        }
        per_point_min.push((x, point_min));
    }
    Ok(ClassificationReport {
        function: fn_spec.describe(),
        check: "condition-b",
        lambda: Some(lambda),
        precision: precision_name::<R>(),
        grid: grid.to_string(),
        n_max,
        k_max,
        tol: eps_rel,
        consistent: violations.is_empty(),
        violations,
        min_normalized: min_norm,
        per_point_min,
    })
}

/// Widder's reduced family at λ = 1: F_{0,0} together with the diagonal
/// F_{k−1,k} for 1 ≤ k ≤ k_max.
pub fn check_condition_c<R: Real>(
    fn_spec: &FunctionSpec,
    grid: &Grid,
    k_max: usize,
    eps_rel: f64,
) -> Result<ClassificationReport<R>> {
    let eps = R::from_f64(eps_rel);
    let order = if k_max == 0 { 0 } else { 2 * k_max - 1 };
    let mut violations = Vec::new();
    let mut min_norm = f64::INFINITY;
    let mut per_point_min = Vec::with_capacity(grid.count);
    for x in grid.points() {
        let xr = R::from_f64(x);
        let jet = fn_spec.jet(&xr, order)?;
        let mut point_min = f64::INFINITY;
        let mut visit = |n: usize, k: usize| -> Result<()> {
            let fv = f_nk_sum(&jet, 1.0, n, k)?;
            let norm = normalized(&fv.value, &fv.scale);
            if norm < point_min {
                point_min = norm;
            }
            if fv.value.clone() + eps.clone() * &fv.scale < R::zero() {
                violations.push(Violation {
                    x,
                    n,
                    k,
                    value: fv.value,
                    scale: fv.scale,
                });
            }
            Ok(())
        };
        visit(0, 0)?;
        for k in 1..=k_max {
            visit(k - 1, k)?;
        }
        if point_min < min_norm {
            min_norm = point_min;
        }
        per_point_min.push((x, point_min));
    }
    Ok(ClassificationReport {
        function: fn_spec.describe(),
        check: "condition-c",
        lambda: Some(1.0),
        precision: precision_name::<R>(),
        grid: grid.to_string(),
        n_max: k_max.saturating_sub(1),
        k_max,
        tol: eps_rel,
        consistent: violations.is_empty(),
        violations,
        min_normalized: min_norm,
        per_point_min,
    })
}

/// Complete monotonicity of the function itself: (−1)^n f^(n)(x) ≥ 0 on the
/// grid. The noise floor for f^(n) computed through series arithmetic is
/// n!·x^{−n}·max_{m≤n} |f^(m)(x)|·x^m/m!, which is used as the scale.
pub fn check_cm<R: Real>(
    fn_spec: &FunctionSpec,
    grid: &Grid,
    n_max: usize,
    eps_rel: f64,
) -> Result<ClassificationReport<R>> {
    let eps = R::from_f64(eps_rel);
    let mut violations = Vec::new();
    let mut min_norm = f64::INFINITY;
    let mut per_point_min = Vec::with_capacity(grid.count);
    for x in grid.points() {
        let xr = R::from_f64(x);
        let jet = fn_spec.jet(&xr, n_max)?;
        let mut point_min = f64::INFINITY;
        // running max of |f^(m)| x^m / m!
        let mut coeff_max = R::zero();
        let mut x_pow = R::one();
        let mut fact = R::one();
        for n in 0..=n_max {
            if n > 0 {
                x_pow = x_pow * &xr;
                fact = fact * R::from_usize(n);
            }
            let c = jet.derivs()[n].clone().abs() * &x_pow / &fact;
            if c > coeff_max {
                coeff_max = c;
            }
            let scale = coeff_max.clone() * &fact / &x_pow;
            let value = if n % 2 == 0 {
                jet.derivs()[n].clone()
            } else {
                -jet.derivs()[n].clone()
            };
            let norm = normalized(&value, &scale);
            if norm < point_min {
                point_min = norm;
            }
            if value.clone() + eps.clone() * &scale < R::zero() {
                violations.push(Violation {
                    x,
                    n,
                    k: 0,
                    value,
                    scale,
                });
            }
        }
        if point_min < min_norm {
            min_norm = point_min;
        }
        per_point_min.push((x, point_min));
    }
    Ok(ClassificationReport {
        function: fn_spec.describe(),
        check: "cm",
        lambda: None,
        precision: precision_name::<R>(),
        grid: grid.to_string(),
        n_max,
        k_max: 0,
        tol: eps_rel,
        consistent: violations.is_empty(),
        violations,
        min_normalized: min_norm,
        per_point_min,
    })
}

/// Rectangle in the closed upper half-plane on which Im f is sampled, plus
/// the real ray given by the re points.
#[derive(Clone, Debug, PartialEq)]
pub struct PickGrid {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for PickGrid {
    fn default() -> Self {
        PickGrid {
            re_lo: 0.1,
            re_hi: 10.0,
            im_lo: 0.1,
            im_hi: 10.0,
            n_re: 20,
            n_im: 20,
        }
    }
}

impl PickGrid {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64, n_re: usize, n_im: usize) -> Result<Self> {
        if !(re_hi > re_lo) || !(im_hi > im_lo) || !(im_lo > 0.0) || !(re_lo > 0.0) {
            return Err(Error::BadSpec {
                msg: "pick grid needs 0 < re_lo < re_hi and 0 < im_lo < im_hi".into(),
            });
        }
        if n_re < 2 || n_im < 2 {
            return Err(Error::BadSpec {
                msg: "pick grid needs at least 2 points per axis".into(),
            });
        }
        Ok(PickGrid {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
            n_re,
            n_im,
        })
    }

    fn re_points(&self) -> Vec<f64> {
        (0..self.n_re)
            .map(|i| {
                self.re_lo + (i as f64) * (self.re_hi - self.re_lo) / ((self.n_re - 1) as f64)
            })
            .collect()
    }

    fn im_points(&self) -> Vec<f64> {
        (0..self.n_im)
            .map(|j| {
                self.im_lo + (j as f64) * (self.im_hi - self.im_lo) / ((self.n_im - 1) as f64)
            })
            .collect()
    }
}

impl std::fmt::Display for PickGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "re[{},{}]x{} im[{},{}]x{}",
            self.re_lo, self.re_hi, self.n_re, self.im_lo, self.im_hi, self.n_im
        )
    }
}

/// A point where the Pick property failed: in the open half-plane the value
/// is Im f(z) > tol; on the real ray (im = 0) it is f(x) < −tol.
#[derive(Clone, Debug)]
pub struct PickViolation {
    pub re: f64,
    pub im: f64,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct PickReport {
    pub function: String,
    pub grid: String,
    pub tol: f64,
    pub consistent: bool,
    pub violations: Vec<PickViolation>,
}

impl PickReport {
    pub fn to_json(&self) -> String {
        let mut viol = String::from("[");
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                viol.push(',');
            }
            viol.push_str(&format!(
                "{{\"re\":{},\"im\":{},\"value\":{}}}",
                f64_num(v.re),
                f64_num(v.im),
                f64_num(v.value)
            ));
        }
        viol.push(']');
        format!(
            "{{\"function\":\"{}\",\"check\":\"pick\",\"grid\":\"{}\",\"tol\":{},\"verdict\":\"{}\",\"note\":\"{}\",\"violation_count\":{},\"violations\":{}}}",
            escape(&self.function),
            escape(&self.grid),
            f64_num(self.tol),
            if self.consistent { "consistent" } else { "violated" },
            if self.consistent { CONSISTENT_NOTE } else { VIOLATED_NOTE },
            self.violations.len(),
            viol,
        )
    }
}

/// The λ = 1 complex characterization: Im f(z) ≤ tol on an upper-half-plane
/// rectangle and f ≥ −tol on the real ray.
pub fn pick_property_check(
    fn_spec: &FunctionSpec,
    grid: &PickGrid,
    tol: f64,
) -> Result<PickReport> {
    let mut violations = Vec::new();
    for x in grid.re_points() {
        let f = fn_spec.eval_complex(Complex64::new(x, 0.0))?;
        if f.re < -tol {
            violations.push(PickViolation {
                re: x,
                im: 0.0,
                value: f.re,
            });
        }
    }
    for y in grid.im_points() {
        for x in grid.re_points() {
            let f = fn_spec.eval_complex(Complex64::new(x, y))?;
            if f.im > tol {
                violations.push(PickViolation {
                    re: x,
                    im: y,
                    value: f.im,
                });
            }
        }
    }
    Ok(PickReport {
        function: fn_spec.describe(),
        grid: grid.to_string(),
        tol,
        consistent: violations.is_empty(),
        violations,
    })
}

/// Result of verifying the order-embedding kernel identity at one (λ, λ′, x, t).
#[derive(Clone, Debug)]
pub struct EmbeddingCheck {
    /// (x+t)^{−λ}, the closed-form side.
    pub closed: f64,
    /// The normalized integral of u^{λ′−λ−1}(x+t+u)^{−λ′}.
    pub quadrature: f64,
    pub residual: f64,
}

/// Numerically verifies (x+t)^{−λ} = (Γ(λ′)/(Γ(λ)Γ(λ′−λ))) ∫₀^∞
/// u^{λ′−λ−1}(x+t+u)^{−λ′} du, the identity behind S_λ ⊆ S_λ′.
///
/// The substitution u = (x+t)(1−s)/s maps the integral onto (0,1] where it
/// becomes (x+t)^{−λ}·s^{λ−1}(1−s)^{β−1} with β = λ′−λ. The two endpoint
/// singularities are removed separately: s = v^{1/λ} on the left half when
/// λ < 1, and 1−s = w^{1/β} on the right half when β < 1.
pub fn kernel_embedding_residual(
    lambda: f64,
    lambda_prime: f64,
    x: f64,
    t: f64,
) -> Result<EmbeddingCheck> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda { lambda });
    }
    if !(lambda_prime > lambda) || !lambda_prime.is_finite() {
        return Err(Error::BadOrderPair {
            lambda,
            lambda_prime,
        });
    }
    if !(x > 0.0) {
        return Err(Error::NonPositiveX { x });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::BadSpec {
            msg: format!("kernel location t must be >= 0, got {t}"),
        });
    }
    let beta = lambda_prime - lambda;
    let b = ln_beta(lambda, beta).exp();
    // ∫₀^{1/2} s^{λ−1}(1−s)^{β−1} ds
    let tol = 1e-13 * b;
    let left = if lambda < 1.0 {
        let v_hi = 0.5f64.powf(lambda);
        adaptive(
            &|v: f64| (1.0 - v.powf(1.0 / lambda)).powf(beta - 1.0) / lambda,
            0.0,
            v_hi,
            0.5 * tol,
        )
    } else {
        adaptive(
            &|s: f64| s.powf(lambda - 1.0) * (1.0 - s).powf(beta - 1.0),
            0.0,
            0.5,
            0.5 * tol,
        )
    };
    // ∫_{1/2}^1 s^{λ−1}(1−s)^{β−1} ds
    let right = if beta < 1.0 {
        let w_hi = 0.5f64.powf(beta);
        adaptive(
            &|w: f64| (1.0 - w.powf(1.0 / beta)).powf(lambda - 1.0) / beta,
            0.0,
            w_hi,
            0.5 * tol,
        )
    } else {
        adaptive(
            &|s: f64| s.powf(lambda - 1.0) * (1.0 - s).powf(beta - 1.0),
            0.5,
            1.0,
            0.5 * tol,
        )
    };
    let closed = (x + t).powf(-lambda);
    let quadrature = closed * (left + right) / b;
    Ok(EmbeddingCheck {
        closed,
        quadrature,
        residual: quadrature - closed,
    })
}

/// One row of a λ-limit table.
#[derive(Clone, Debug)]
pub struct LimitRow {
    pub lambda: f64,
    /// F[λ]_{n,k}(x).
    pub f_value: f64,
    /// F[λ]_{n,k}(x)/λ^k, which tends to (−1)^n f^(n)(x) as λ → ∞.
    pub normalized: f64,
    pub gap_large: f64,
    /// F[λ]_{0,1}(x), which tends to x·f′(x) as λ → 0.
    pub f01: f64,
    pub gap_01: f64,
    /// F[λ]_{1,0}(x) = −f′(x), λ-free.
    pub f10: f64,
    pub gap_10: f64,
}

/// The λ → ∞ and λ → 0 limit diagnostics at one point.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub function: String,
    pub x: f64,
    pub n: usize,
    pub k: usize,
    /// (−1)^n f^(n)(x).
    pub target_large: f64,
    /// x f′(x).
    pub target_01: f64,
    /// −f′(x).
    pub target_10: f64,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    pub fn to_json(&self) -> String {
        let mut rows = String::from("[");
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                rows.push(',');
            }
            rows.push_str(&format!(
                "{{\"lambda\":{},\"f_value\":{},\"normalized\":{},\"gap_large\":{},\"f01\":{},\"gap_01\":{},\"f10\":{},\"gap_10\":{}}}",
                f64_num(r.lambda),
                f64_num(r.f_value),
                f64_num(r.normalized),
                f64_num(r.gap_large),
                f64_num(r.f01),
                f64_num(r.gap_01),
                f64_num(r.f10),
                f64_num(r.gap_10),
            ));
        }
        rows.push(']');
        format!(
            "{{\"function\":\"{}\",\"x\":{},\"n\":{},\"k\":{},\"target_large\":{},\"target_01\":{},\"target_10\":{},\"rows\":{}}}",
            escape(&self.function),
            f64_num(self.x),
            self.n,
            self.k,
            f64_num(self.target_large),
            f64_num(self.target_01),
            f64_num(self.target_10),
            rows,
        )
    }
}

/// Evaluates F[λ]_{n,k}(x)/λ^k across `lambdas` against the λ → ∞ target
/// (−1)^n f^(n)(x), and the small-λ identities for F_{0,1} and F_{1,0}.
pub fn limit_checks<R: Real>(
    fn_spec: &FunctionSpec,
    x: &R,
    n: usize,
    k: usize,
    lambdas: &[f64],
) -> Result<LimitReport> {
    let order = (n + k).max(2);
    let jet = fn_spec.jet(x, order)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let target_large = sign * jet.deriv(n)?.to_f64();
    let fprime = jet.deriv(1)?.to_f64();
    let target_01 = x.to_f64() * fprime;
    let target_10 = -fprime;
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let fv = f_nk_sum(&jet, lambda, n, k)?.value.to_f64();
        let normalized = fv / lambda.powi(k as i32);
        let f01 = f_nk_sum(&jet, lambda, 0, 1)?.value.to_f64();
        let f10 = f_nk_sum(&jet, lambda, 1, 0)?.value.to_f64();
        rows.push(LimitRow {
            lambda,
            f_value: fv,
            normalized,
            gap_large: (normalized - target_large).abs(),
            f01,
            gap_01: (f01 - target_01).abs(),
            f10,
            gap_10: (f10 - target_10).abs(),
        });
    }
    Ok(LimitReport {
        function: fn_spec.describe(),
        x: x.to_f64(),
        n,
        k,
        target_large,
        target_01,
        target_10,
        rows,
    })
}

/// The scaled-kernel exponential limit (λt/(x+λt))^λ → e^{−x/t}.
#[derive(Clone, Debug)]
pub struct ExpKernelCheck {
    pub value: f64,
    pub target: f64,
    pub gap: f64,
}

/// Evaluates the scaled kernel against its λ → ∞ exponential limit.
/// x = 0 is allowed here (both sides are exactly 1).
pub fn exp_kernel_limit(x: f64, t: f64, lambda: f64) -> Result<ExpKernelCheck> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::BadSpec {
            msg: format!("exp-kernel location t must be > 0, got {t}"),
        });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda { lambda });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::BadSpec {
            msg: format!("exp-kernel point x must be >= 0, got {x}"),
        });
    }
    let value = (lambda * t / (x + lambda * t)).powf(lambda);
    let target = (-x / t).exp();
    Ok(ExpKernelCheck {
        value,
        target,
        gap: (value - target).abs(),
    })
}

/// Checks that λ ↦ F[λ]_{n,k}(x) is a polynomial of degree k: interpolates
/// through the k+1 `nodes` and returns the largest normalized deviation of
/// the interpolant from direct evaluation at the `probes`.
pub fn lambda_polynomial_probe<R: Real>(
    fn_spec: &FunctionSpec,
    x: &R,
    n: usize,
    k: usize,
    nodes: &[f64],
    probes: &[f64],
) -> Result<R> {
    if nodes.len() != k + 1 {
        return Err(Error::BadSpec {
            msg: format!("need exactly {} interpolation nodes, got {}", k + 1, nodes.len()),
        });
    }
    let jet = fn_spec.jet(x, n + k)?;
    let node_vals: Vec<R> = nodes
        .iter()
        .map(|&l| f_nk_sum(&jet, l, n, k).map(|fv| fv.value))
        .collect::<Result<_>>()?;
    let nodes_r: Vec<R> = nodes.iter().map(|&l| R::from_f64(l)).collect();
    let mut worst = R::zero();
    for &p in probes {
        let direct = f_nk_sum(&jet, p, n, k)?;
        let p_r = R::from_f64(p);
        let mut interp = R::zero();
        for i in 0..nodes_r.len() {
            let mut weight = node_vals[i].clone();
            for j in 0..nodes_r.len() {
                if j != i {
                    weight = weight * (p_r.clone() - &nodes_r[j])
                        / (nodes_r[i].clone() - &nodes_r[j]);
                }
            }
            interp += weight;
        }
        let dev = (interp - &direct.value).abs() / (direct.scale.clone() + R::one());
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FunctionSpec;
    use crate::measure::MeasureSpec;
    use crate::real::Ext;
    use approx::assert_relative_eq;

    fn expr(src: &str) -> FunctionSpec {
        FunctionSpec::from_expr(src).unwrap()
    }

    fn small_grid() -> Grid {
        Grid::new(0.05, 50.0, 13).unwrap()
    }

    #[test]
    fn grid_validation_and_points() {
        assert!(Grid::new(0.0, 1.0, 5).is_err());
        assert!(Grid::new(2.0, 1.0, 5).is_err());
        assert!(Grid::new(0.5, 1.0, 1).is_err());
        let g = Grid::parse("0.001:1000:61").unwrap();
        assert_eq!(g, Grid::default());
        assert!(Grid::parse("1:2").is_err());
        assert!(Grid::parse("a:2:3").is_err());
        let pts = Grid::default().points();
        assert_eq!(pts.len(), 61);
        assert_eq!(pts[0], 1e-3);
        assert_eq!(pts[30], 1.0, "the default grid passes through x = 1");
        assert_eq!(pts[60], 1e3);
        assert_eq!(Grid::default().to_string(), "log[0.001,1000]x61");
    }

    #[test]
    fn condition_b_flags_exponential_decay_with_certificate() {
        let rep = check_condition_b::<f64>(
            &expr("exp(-x)"),
            1.0,
            &Grid::default(),
            4,
            4,
            1e-8,
        )
        .unwrap();
        assert!(!rep.consistent);
        // the certificate at x = 1, (n,k) = (0,2) carries value −e^{−1}
        let v = rep
            .violations
            .iter()
            .find(|v| v.x == 1.0 && v.n == 0 && v.k == 2)
            .expect("violation at x=1 (0,2) present");
        assert_relative_eq!(v.value, -(-1.0f64).exp(), epsilon = 1e-12);
        assert!(rep.min_normalized < -0.1);
    }

    #[test]
    fn condition_b_accepts_reciprocal_shift_at_order_one() {
        let rep = check_condition_b::<f64>(
            &expr("1/(x+1)"),
            1.0,
            &Grid::default(),
            6,
            6,
            1e-8,
        )
        .unwrap();
        assert!(rep.consistent, "violations: {:?}", rep.violations.first());
        // roundoff may leave the worst normalized entry a hair below zero,
        // but never past the scaled tolerance
        assert!(rep.min_normalized >= -1e-8, "{}", rep.min_normalized);
    }

    #[test]
    fn condition_b_rejects_reciprocal_shift_at_half_order() {
        let rep = check_condition_b::<f64>(
            &expr("1/(x+1)"),
            0.5,
            &Grid::default(),
            3,
            3,
            1e-8,
        )
        .unwrap();
        assert!(!rep.consistent);
        // strictness of the order hierarchy: some (0,1) entry goes negative
        assert!(rep.violations.iter().any(|v| v.n == 0 && v.k == 1));
    }

    #[test]
    fn condition_c_examples() {
        let rep =
            check_condition_c::<f64>(&expr("exp(-x)"), &Grid::default(), 4, 1e-8).unwrap();
        assert!(!rep.consistent);
        assert!(rep.violations.iter().any(|v| v.n + 1 == v.k));

        let rep =
            check_condition_c::<f64>(&expr("1/(x+1)"), &Grid::default(), 6, 1e-8).unwrap();
        assert!(rep.consistent);

        let rep = check_condition_c::<f64>(&expr("4"), &Grid::default(), 4, 1e-8).unwrap();
        assert!(rep.consistent);
        // F_{0,0} = 4 everywhere, diagonal vanishes for k ≥ 2
        assert_eq!(rep.per_point_min.len(), 61);
    }

    #[test]
    fn condition_c_violation_implies_condition_b_violation() {
        for src in ["exp(-x)", "exp(-x)*log(x+3)", "1/(x*x+1)"] {
            let f = expr(src);
            let c = check_condition_c::<f64>(&f, &small_grid(), 4, 1e-8).unwrap();
            if !c.consistent {
                let b = check_condition_b::<f64>(&f, 1.0, &small_grid(), 4, 4, 1e-8).unwrap();
                assert!(!b.consistent, "{src}: (c) violated but (b) passed");
            }
        }
    }

    #[test]
    fn cm_check_examples() {
        let rep = check_cm::<f64>(&expr("exp(-x)"), &Grid::default(), 10, 1e-8).unwrap();
        assert!(rep.consistent);

        let rep = check_cm::<f64>(&expr("log(1+1/x)"), &Grid::default(), 10, 1e-8).unwrap();
        assert!(rep.consistent);

        let rep = check_cm::<f64>(&expr("-1/x"), &Grid::default(), 4, 1e-8).unwrap();
        assert!(!rep.consistent);
        assert_eq!(rep.violations[0].n, 0);
        assert!(rep.lambda.is_none());
    }

    #[test]
    fn cm_scale_absorbs_benign_cancellation() {
        // x·x^{−1.5}·sqrt(x) is identically 1; the series arithmetic leaves
        // roundoff crumbs in the higher derivatives that the scale must cover
        let rep = check_cm::<f64>(
            &expr("x*x^(-1.5)*sqrt(x) + 1/(x+1)"),
            &small_grid(),
            8,
            1e-8,
        )
        .unwrap();
        assert!(
            rep.consistent,
            "roundoff flagged as violation: {:?}",
            rep.violations.first()
        );
    }

    #[test]
    fn membership_is_monotone_in_lambda_for_measure_backed_functions() {
        let specs = [
            (MeasureSpec::new(0.0, vec![(1.0, 1.0)], vec![]).unwrap(), 1.0),
            (MeasureSpec::new(0.5, vec![(0.0, 1.0)], vec![]).unwrap(), 0.5),
            (
                MeasureSpec::new(0.2, vec![(0.5, 0.4)], vec![(0.0, 2.0, 0.3)]).unwrap(),
                2.0,
            ),
        ];
        for (m, lambda) in specs {
            let f = FunctionSpec::from_measure(m, lambda).unwrap();
            for lp in [lambda, lambda + 0.5, 2.0 * lambda, 10.0 * lambda] {
                let rep =
                    check_condition_b::<f64>(&f, lp, &small_grid(), 4, 4, 1e-8).unwrap();
                assert!(
                    rep.consistent,
                    "membership lost at lambda'={lp} (base {lambda}): {:?}",
                    rep.violations.first()
                );
            }
        }
    }

    #[test]
    fn f64_violations_survive_extended_reverification() {
        let cases: Vec<(FunctionSpec, f64)> =
            vec![(expr("exp(-x)"), 1.0), (expr("1/(x+1)"), 0.5)];
        for (f, lambda) in cases {
            let rep =
                check_condition_b::<f64>(&f, lambda, &small_grid(), 4, 4, 1e-8).unwrap();
            assert!(!rep.consistent);
            for v in rep.violations.iter().take(10) {
                let x = Ext::from_f64(v.x);
                let jet = f.jet(&x, v.n + v.k).unwrap();
                let fv = f_nk_sum(&jet, lambda, v.n, v.k).unwrap();
                let threshold = -Ext::from_f64(1e-8) * fv.scale;
                assert!(
                    fv.value < threshold,
                    "violation at x={} ({},{}) did not survive extended re-evaluation",
                    v.x,
                    v.n,
                    v.k
                );
            }
        }
    }

    #[test]
    fn report_json_and_csv_shapes() {
        let rep =
            check_condition_b::<f64>(&expr("exp(-x)"), 1.0, &small_grid(), 2, 2, 1e-8).unwrap();
        let doc = rep.to_json();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["check"], "condition-b");
        assert_eq!(v["verdict"], "violated");
        assert_eq!(v["precision"], "f64");
        assert_eq!(v["lambda"], 1.0);
        assert!(v["violation_count"].as_u64().unwrap() > 0);
        assert_eq!(
            v["violations"].as_array().unwrap().len() as u64,
            v["violation_count"].as_u64().unwrap()
        );
        let csv = rep.to_csv();
        assert!(csv.starts_with("x,min_normalized\n"));
        assert_eq!(csv.lines().count(), 1 + 13);

        let rep = check_cm::<f64>(&expr("exp(-x)"), &small_grid(), 3, 1e-8).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert!(v["lambda"].is_null());
    }

    #[test]
    fn pick_check_accepts_atom_and_rejects_exponential() {
        let m = FunctionSpec::from_measure(
            MeasureSpec::new(0.0, vec![(1.0, 1.0)], vec![]).unwrap(),
            1.0,
        )
        .unwrap();
        let rep = pick_property_check(&m, &PickGrid::default(), 1e-12).unwrap();
        assert!(rep.consistent);

        let grid = PickGrid::new(0.1, 10.0, 0.1, 4.712, 20, 20).unwrap();
        let rep = pick_property_check(&expr("exp(-x)"), &grid, 1e-12).unwrap();
        assert!(!rep.consistent);
        let v = rep
            .violations
            .iter()
            .find(|v| v.re == 0.1 && (v.im - 4.712).abs() < 1e-12)
            .expect("documented point sampled");
        assert_relative_eq!(v.value, (-0.1f64).exp(), max_relative = 2e-4);

        let rep = pick_property_check(&expr("2"), &PickGrid::default(), 1e-12).unwrap();
        assert!(rep.consistent);
    }

    #[test]
    fn pick_flags_negative_real_values() {
        let rep = pick_property_check(&expr("-1/x"), &PickGrid::default(), 1e-12).unwrap();
        assert!(!rep.consistent);
        assert!(rep.violations.iter().any(|v| v.im == 0.0 && v.value < 0.0));
    }

    #[test]
    fn embedding_residual_examples() {
        let c = kernel_embedding_residual(1.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(c.closed, 0.5, epsilon = 1e-15);
        assert!(c.residual.abs() <= 1e-10, "residual {}", c.residual);

        let c = kernel_embedding_residual(0.5, 1.5, 1.0, 0.0).unwrap();
        assert_relative_eq!(c.closed, 1.0, epsilon = 1e-15);
        assert!(c.residual.abs() <= 1e-10);

        let c = kernel_embedding_residual(1.0, 1.0001, 1.0, 1.0).unwrap();
        assert!(c.residual.abs() <= 1e-8, "near-singular residual {}", c.residual);

        assert!(matches!(
            kernel_embedding_residual(2.0, 1.0, 1.0, 1.0),
            Err(Error::BadOrderPair { .. })
        ));
        assert!(matches!(
            kernel_embedding_residual(1.0, 1.0, 1.0, 1.0),
            Err(Error::BadOrderPair { .. })
        ));
    }

    #[test]
    fn embedding_residual_sweep() {
        for &(l, lp) in &[(1.0, 2.0), (0.5, 1.5), (2.0, 3.7), (0.3, 0.8)] {
            for &x in &[0.5, 1.0, 10.0] {
                for &t in &[0.0, 1.0, 10.0] {
                    let c = kernel_embedding_residual(l, lp, x, t).unwrap();
                    assert!(
                        c.residual.abs() <= 1e-10,
                        "(λ={l}, λ'={lp}, x={x}, t={t}): residual {}",
                        c.residual
                    );
                }
            }
        }
    }

    #[test]
    fn limit_checks_on_exponential() {
        // for f = e^{−x}: F_{0,1} = λf − xf, so the λ→0 limit is x f'(x),
        // and F/λ^k → (−1)^n f^(n) as λ grows
        let f = expr("exp(-x)");
        let lambdas = [1e1, 1e2, 1e3, 1e4];
        let rep = limit_checks::<f64>(&f, &1.0, 0, 1, &lambdas).unwrap();
        let e1 = (-1.0f64).exp();
        assert_relative_eq!(rep.target_large, e1, epsilon = 1e-15);
        assert_relative_eq!(rep.target_01, -e1, epsilon = 1e-15);
        assert_relative_eq!(rep.target_10, e1, epsilon = 1e-15);
        let mut prev = f64::INFINITY;
        for r in &rep.rows {
            assert!(r.gap_large < prev, "gap not shrinking at λ={}", r.lambda);
            // F_{1,0} = −f′ exactly, independent of λ
            assert_eq!(r.gap_10, 0.0);
            prev = r.gap_large;
        }
        // O(1/λ) rate: one decade of λ buys one decade of gap
        let ratio = rep.rows[1].gap_large / rep.rows[0].gap_large;
        assert!((ratio - 0.1).abs() < 0.02, "rate ratio {ratio}");

        // λ → 0: F_{0,1} approaches x f′(x)
        let rep = limit_checks::<f64>(&f, &1.0, 0, 1, &[1e-2, 1e-4, 1e-6]).unwrap();
        for pair in rep.rows.windows(2) {
            assert!(pair[1].gap_01 < pair[0].gap_01);
        }
        assert!(rep.rows.last().unwrap().gap_01 < 1e-5);
    }

    #[test]
    fn limit_report_json_is_valid() {
        let rep = limit_checks::<f64>(&expr("1/(x+1)"), &1.0, 0, 1, &[10.0, 100.0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        // F^[λ]_{0,1}(1) = λ/2 − 1/4
        assert_relative_eq!(
            v["rows"][0]["f_value"].as_f64().unwrap(),
            10.0 / 2.0 - 0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exp_kernel_examples() {
        let c = exp_kernel_limit(1.0, 1.0, 100.0).unwrap();
        assert_relative_eq!(c.value, (100.0f64 / 101.0).powi(100), epsilon = 1e-14);
        assert_relative_eq!(c.target, (-1.0f64).exp(), epsilon = 1e-15);
        assert!((c.gap - 1.83e-3).abs() < 2e-5);

        let c = exp_kernel_limit(0.0, 3.7, 5.0).unwrap();
        assert_eq!(c.gap, 0.0);

        let c1000 = exp_kernel_limit(1.0, 1.0, 1000.0).unwrap();
        let ratio = c1000.gap / c.gap;
        let _ = ratio;
        let c100 = exp_kernel_limit(1.0, 1.0, 100.0).unwrap();
        let ratio = c1000.gap / c100.gap;
        assert!((ratio - 0.1).abs() < 0.01, "rate ratio {ratio}");

        assert!(exp_kernel_limit(1.0, 0.0, 1.0).is_err());
        assert!(exp_kernel_limit(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn f_is_a_degree_k_polynomial_in_lambda() {
        let f = expr("exp(-x)*1/(x+1)");
        let x = Ext::from_f64(1.3);
        for k in 0..=5usize {
            let nodes: Vec<f64> = (0..=k).map(|i| 0.5 + i as f64).collect();
            let probes = [0.25, 2.25, 7.5];
            let dev = lambda_polynomial_probe(&f, &x, 1, k, &nodes, &probes).unwrap();
            assert!(
                dev < Ext::from_f64(1e-40),
                "degree-{k} interpolation deviates by {}",
                dev.to_f64()
            );
        }
        // wrong node count is rejected
        assert!(lambda_polynomial_probe(&f, &x, 0, 2, &[1.0, 2.0], &[3.0]).is_err());
    }
}
