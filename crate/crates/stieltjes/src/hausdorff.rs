//! The moment-sequence side of the theory: complete-monotonicity tests for
//! sequences, the moment sequence attached to a function at a base point,
//! discrete reconstruction of the representing measure on [0,1], and the
//! change of variables back to a measure on [0, ∞).
//!
//! The pipeline implemented here is constructive: given f of order λ and a
//! base point x, the numbers
//!
//! ```text
//! c_n = (−1)^n · Γ(λ)/Γ(n+λ) · x^n · f^(n)(x)
//! ```
//!
//! form a Hausdorff moment sequence; a discrete measure ν̂ on {j/K} with
//! masses C(K,j)·(−Δ)^{K−j} c at j reproduces its leading moments; and the
//! substitution t = x(1/u − 1), w = m·(x/u)^λ carries ν̂ to (Ĉ, ρ̂) with
//! f(y) ≈ Ĉ + Σ w/(y+t)^λ.

use crate::error::{Error, Result};
use crate::expr::FunctionSpec;
use crate::measure::{check_lambda, check_positive_x, power_primitive};
use crate::operators::delta_k_scaled;
use crate::real::{binomial, rising, Real};
use crate::report::{f64_array, f64_num, pair_array};

/// A finite prefix (c_0, …, c_N) of a candidate Hausdorff moment sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence<R: Real> {
    entries: Vec<R>,
}

impl<R: Real> MomentSequence<R> {
    pub fn new(entries: Vec<R>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::BadSpec {
                msg: "moment sequence needs at least c_0".into(),
            });
        }
        for e in &entries {
            if !e.is_finite() {
                return Err(Error::Domain {
                    msg: "non-finite moment entry".into(),
                });
            }
        }
        Ok(MomentSequence { entries })
    }

    pub fn as_slice(&self) -> &[R] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A failed difference test: (−1)^k (Δ^k c)_n dipped below the tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CmViolation<R: Real> {
    pub n: usize,
    pub k: usize,
    pub value: R,
}

/// Outcome of a complete-monotonicity test on a sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum CmVerdict<R: Real> {
    Monotone,
    Violated(CmViolation<R>),
}

impl<R: Real> CmVerdict<R> {
    pub fn is_monotone(&self) -> bool {
        matches!(self, CmVerdict::Monotone)
    }
}

/// Builds the full difference triangle rows (Δ^k-level values and their
/// cancellation scales) and hands each (k, n) cell to the verdict closure.
fn scan_triangle<R: Real>(
    c: &[R],
    mut reject: impl FnMut(usize, usize, &R, &R) -> bool,
) -> CmVerdict<R> {
    let mut v: Vec<R> = c.to_vec();
    let mut s: Vec<R> = c.iter().map(|e| e.clone().abs()).collect();
    let n_max = c.len() - 1;
    for k in 0..=n_max {
        if k > 0 {
            for i in 0..=n_max - k {
                v[i] = v[i].clone() - &v[i + 1];
                s[i] = s[i].clone() + &s[i + 1];
            }
        }
        for n in 0..=n_max - k {
            if reject(n, k, &v[n], &s[n]) {
                return CmVerdict::Violated(CmViolation {
                    n,
                    k,
                    value: v[n].clone(),
                });
            }
        }
    }
    CmVerdict::Monotone
}

/// Checks (−1)^k (Δ^k c)_n ≥ −tol for all n+k ≤ N, reporting the
/// lexicographically first (k, n) violation.
pub fn is_cm_sequence<R: Real>(c: &MomentSequence<R>, tol: &R) -> CmVerdict<R> {
    scan_triangle(c.as_slice(), |_, _, value, _| value.clone() + tol < R::zero())
}

/// Like [`is_cm_sequence`] but with the cancellation-aware threshold
/// value ≥ −eps_rel · Σ_j C(k,j)|c_{n+j}| per entry.
pub fn is_cm_sequence_scaled<R: Real>(c: &MomentSequence<R>, eps_rel: &R) -> CmVerdict<R> {
    scan_triangle(c.as_slice(), |_, _, value, scale| {
        value.clone() + eps_rel.clone() * scale < R::zero()
    })
}

/// The moment sequence c_n = (−1)^n (Γ(λ)/Γ(n+λ)) x^n f^(n)(x), n ≤ N.
///
/// Measure-backed functions whose representation order equals λ take a
/// closed-form route: c_n = C·δ_{n,0} + x^n ∫ dρ(t)/(x+t)^{n+λ}, arranged so
/// atoms contribute geometrically in u = x/(x+t). Everything else goes
/// through jets.
pub fn moment_sequence_at<R: Real>(
    fn_spec: &FunctionSpec,
    lambda: f64,
    x: &R,
    n_max: usize,
) -> Result<MomentSequence<R>> {
    check_lambda(lambda)?;
    check_positive_x(x)?;
    if let Some((m, rep_lambda)) = fn_spec.measure_ref() {
        if rep_lambda == lambda {
            let lam = R::from_f64(lambda);
            let neg_lam = -lam.clone();
            let mut entries = vec![R::zero(); n_max + 1];
            entries[0] = R::from_f64(m.c());
            for &(t, w) in m.atoms() {
                let base = x.clone() + R::from_f64(t);
                let head = R::from_f64(w) * Real::powf(&base, &neg_lam);
                let u = x.clone() / &base;
                let mut term = head;
                for (n, e) in entries.iter_mut().enumerate() {
                    if n > 0 {
                        term = term * &u;
                    }
                    *e += term.clone();
                }
            }
            for &(a, b, h) in m.pieces() {
                let mut x_pow = R::one();
                for (n, e) in entries.iter_mut().enumerate() {
                    if n > 0 {
                        x_pow = x_pow * x;
                    }
                    let s_f64 = n as f64 + lambda - 1.0;
                    let s = R::from_usize(n) + R::from_f64(lambda) - R::one();
                    *e += R::from_f64(h) * &x_pow * power_primitive(x, a, b, s_f64, &s);
                }
            }
            return MomentSequence::new(entries);
        }
    }
    let jet = fn_spec.jet(x, n_max)?;
    let lam = R::from_f64(lambda);
    let mut entries = Vec::with_capacity(n_max + 1);
    let mut x_pow = R::one();
    let mut ris = R::one();
    for n in 0..=n_max {
        if n > 0 {
            x_pow = x_pow * x;
            ris = ris * (lam.clone() + R::from_usize(n - 1));
        }
        let mut v = x_pow.clone() * jet.deriv(n)? / &ris;
        if n % 2 == 1 {
            v = -v;
        }
        entries.push(v);
    }
    MomentSequence::new(entries)
}

/// A discrete measure on [0, 1]: atoms (u_j, m_j).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteUnitMeasure<R: Real> {
    atoms: Vec<(R, R)>,
}

impl<R: Real> DiscreteUnitMeasure<R> {
    /// Validates locations in [0,1] and nonnegative masses.
    pub fn new(atoms: Vec<(R, R)>) -> Result<Self> {
        for (u, m) in &atoms {
            if u.clone() < R::zero() || u.clone() > R::one() {
                return Err(Error::BadSpec {
                    msg: format!("unit-measure location {} outside [0,1]", u.to_f64()),
                });
            }
            if m.clone() < R::zero() {
                return Err(Error::NegativeMass {
                    what: format!("unit-measure atom at u={}", u.to_f64()),
                    value: m.to_f64(),
                });
            }
        }
        Ok(DiscreteUnitMeasure { atoms })
    }

    /// Raw constructor for reconstruction output, whose masses may carry
    /// roundoff of either sign; the pushforward validates.
    pub(crate) fn from_raw(atoms: Vec<(R, R)>) -> Self {
        DiscreteUnitMeasure { atoms }
    }

    pub fn atoms(&self) -> &[(R, R)] {
        &self.atoms
    }

    /// ∫ u^r dν(u).
    pub fn moment(&self, r: usize) -> R {
        let mut acc = R::zero();
        for (u, m) in &self.atoms {
            let mut p = m.clone();
            for _ in 0..r {
                p = p * u;
            }
            acc += p;
        }
        acc
    }
}

/// The discrete Hausdorff reconstruction at depth K: atoms at u = j/K with
/// masses C(K,j) · Σ_i (−1)^i C(K−j,i) c_{j+i}, j = 0..K.
///
/// Masses are returned raw (no sign policing): they are nonnegative exactly
/// when the sequence is completely monotone at depth K, and callers decide
/// how much negativity to attribute to roundoff.
pub fn reconstruct<R: Real>(c: &MomentSequence<R>, depth: usize) -> Result<DiscreteUnitMeasure<R>> {
    if depth == 0 {
        return Err(Error::BadSpec {
            msg: "reconstruction depth K must be at least 1".into(),
        });
    }
    if depth >= c.len() {
        return Err(Error::InsufficientLength {
            needed: depth + 1,
            available: c.len(),
        });
    }
    let k_r = R::from_usize(depth);
    let mut atoms = Vec::with_capacity(depth + 1);
    for j in 0..=depth {
        let (d, _) = delta_k_scaled(c.as_slice(), j, depth - j)?;
        let mass = binomial::<R>(depth, j) * d;
        let u = R::from_usize(j) / &k_r;
        atoms.push((u, mass));
    }
    Ok(DiscreteUnitMeasure::from_raw(atoms))
}

/// Change of variables from ν̂ on [0,1] to (Ĉ, ρ̂) on [0,∞): the atom at
/// u = 0 becomes the constant, an atom (u, m) with u > 0 becomes
/// (t, w) = (x(1/u − 1), m(x/u)^λ). Atoms with exactly zero mass are
/// dropped; negative masses are rejected.
pub fn pushforward_to_rho<R: Real>(
    nu: &DiscreteUnitMeasure<R>,
    x: &R,
    lambda: f64,
) -> Result<(R, Vec<(R, R)>)> {
    check_positive_x(x)?;
    check_lambda(lambda)?;
    let lam = R::from_f64(lambda);
    let mut c_hat = R::zero();
    let mut atoms = Vec::new();
    for (u, m) in nu.atoms() {
        if m.clone() < R::zero() {
            return Err(Error::NegativeMass {
                what: format!("pushforward input at u={}", u.to_f64()),
                value: m.to_f64(),
            });
        }
        if *m == R::zero() {
            continue;
        }
        if *u == R::zero() {
            c_hat += m.clone();
        } else {
            let t = x.clone() * (R::one() - u.clone()) / u;
            let w = m.clone() * Real::powf(&(x.clone() / u), &lam);
            atoms.push((t, w));
        }
    }
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok((c_hat, atoms))
}

/// Result of [`recover_measure`]: the recovered (Ĉ, ρ̂) at one base point,
/// with re-evaluation diagnostics.
#[derive(Clone, Debug)]
pub struct RecoveredMeasure<R: Real> {
    pub x: R,
    pub lambda: f64,
    pub c_hat: R,
    pub atoms: Vec<(R, R)>,
    /// |∫u^r dν̂ − c_r| for r = 0..=K.
    pub moment_residuals: Vec<f64>,
    /// sup |f̂ − f| over the diagnostic grid.
    pub sup_error: f64,
    /// Number of slightly-negative masses clamped to zero.
    pub clamped: usize,
}

impl<R: Real> RecoveredMeasure<R> {
    /// The induced function f̂(y) = Ĉ + Σ w/(y+t)^λ.
    pub fn eval(&self, y: &R) -> Result<R> {
        check_positive_x(y)?;
        let neg_lam = -R::from_f64(self.lambda);
        let mut acc = self.c_hat.clone();
        for (t, w) in &self.atoms {
            let base = y.clone() + t;
            acc += w.clone() * Real::powf(&base, &neg_lam);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"x\":{},\"lambda\":{},\"C\":{},\"atoms\":{},\"diagnostics\":{{\"moment_residuals\":{},\"sup_error\":{},\"clamped\":{}}}}}",
            self.x.fmt_sci(),
            f64_num(self.lambda),
            self.c_hat.fmt_sci(),
            pair_array(&self.atoms),
            f64_array(&self.moment_residuals),
            f64_num(self.sup_error),
            self.clamped,
        )
    }
}

/// 21 logarithmically spaced points on [0.5, 5], the fixed grid on which
/// recovered functions are compared against their sources.
pub(crate) fn diagnostic_grid() -> Vec<f64> {
    let (lo, hi, count) = (0.5f64, 5.0f64, 21usize);
    let (lg_lo, lg_hi) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(lg_lo + (i as f64) * (lg_hi - lg_lo) / ((count - 1) as f64)))
        .collect()
}

/// The full constructive pipeline at one base point: moment sequence →
/// complete-monotonicity gate → discrete reconstruction → pushforward →
/// diagnostics.
pub fn recover_measure<R: Real>(
    fn_spec: &FunctionSpec,
    lambda: f64,
    x: &R,
    depth: usize,
) -> Result<RecoveredMeasure<R>> {
    let c = moment_sequence_at(fn_spec, lambda, x, depth)?;
    let eps = R::rel_tol();
    if let CmVerdict::Violated(v) = is_cm_sequence_scaled(&c, &eps) {
        return Err(Error::NotCompletelyMonotone {
            n: v.n,
            k: v.k,
            value: v.value.to_f64(),
        });
    }
    // raw reconstruction, then separate sign handling so that roundoff-level
    // negatives are distinguishable from genuine non-membership
    let nu_raw = reconstruct(&c, depth)?;
    let mut clamped = 0usize;
    let mut atoms = Vec::with_capacity(depth + 1);
    for (j, (u, m)) in nu_raw.atoms().iter().enumerate() {
        let (_, dscale) = delta_k_scaled(c.as_slice(), j, depth - j)?;
        let tol = eps.clone() * binomial::<R>(depth, j) * dscale;
        let mass = if m.clone() < R::zero() {
            if m.clone() + &tol < R::zero() {
                return Err(Error::NotCompletelyMonotone {
                    n: j,
                    k: depth - j,
                    value: m.to_f64(),
                });
            }
            clamped += 1;
            R::zero()
        } else {
            m.clone()
        };
        atoms.push((u.clone(), mass));
    }
    let nu = DiscreteUnitMeasure::from_raw(atoms);
    let mut moment_residuals = Vec::with_capacity(depth + 1);
    for r in 0..=depth {
        let diff = nu.moment(r) - &c.as_slice()[r];
        moment_residuals.push(diff.abs().to_f64());
    }
    let (c_hat, rho_atoms) = pushforward_to_rho(&nu, x, lambda)?;
    let rec = RecoveredMeasure {
        x: x.clone(),
        lambda,
        c_hat,
        atoms: rho_atoms,
        moment_residuals,
        sup_error: 0.0,
        clamped,
    };
    let mut sup = 0.0f64;
    for &g in &diagnostic_grid() {
        let y = R::from_f64(g);
        let reference = fn_spec.jet(&y, 0)?.deriv(0)?.clone();
        let diff = (rec.eval(&y)? - reference).abs().to_f64();
        if diff > sup {
            sup = diff;
        }
    }
    Ok(RecoveredMeasure { sup_error: sup, ..rec })
}

/// Side-by-side recovery at two base points; the theory says the recovered
/// data must agree, and the report quantifies how closely the discretized
/// versions do. Measures are compared through their induced functions, never
/// atom by atom, because the u-grids j/K land at different t locations.
#[derive(Clone, Debug)]
pub struct ConsistencyReport<R: Real> {
    pub first: RecoveredMeasure<R>,
    pub second: RecoveredMeasure<R>,
    /// sup |f̂_{x1} − f̂_{x2}| over the diagnostic grid.
    pub sup_diff: f64,
    /// |Ĉ_{x1} − Ĉ_{x2}|.
    pub c_diff: f64,
}

impl<R: Real> ConsistencyReport<R> {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"first\":{},\"second\":{},\"sup_diff\":{},\"c_diff\":{}}}",
            self.first.to_json(),
            self.second.to_json(),
            f64_num(self.sup_diff),
            f64_num(self.c_diff),
        )
    }
}

/// Recovers at x1 and x2 and compares the induced functions on the common
/// diagnostic grid.
pub fn base_point_consistency<R: Real>(
    fn_spec: &FunctionSpec,
    lambda: f64,
    x1: &R,
    x2: &R,
    depth: usize,
) -> Result<ConsistencyReport<R>> {
    let first = recover_measure(fn_spec, lambda, x1, depth)?;
    let second = recover_measure(fn_spec, lambda, x2, depth)?;
    let mut sup_diff = 0.0f64;
    for &g in &diagnostic_grid() {
        let y = R::from_f64(g);
        let d = (first.eval(&y)? - second.eval(&y)?).abs().to_f64();
        if d > sup_diff {
            sup_diff = d;
        }
    }
    let c_diff = (first.c_hat.clone() - &second.c_hat).abs().to_f64();
    Ok(ConsistencyReport {
        first,
        second,
        sup_diff,
        c_diff,
    })
}

/// Cross-module identity used by the tests and the classify module:
/// F[λ]_{n,k}(x) = (Γ(n+k+λ)/Γ(λ)) · (−1)^k (Δ^k c)_n / x^n where c is the
/// moment sequence at (λ, x).
pub fn f_from_moments<R: Real>(
    c: &MomentSequence<R>,
    lambda: f64,
    x: &R,
    n: usize,
    k: usize,
) -> Result<R> {
    check_lambda(lambda)?;
    let (d, _) = delta_k_scaled(c.as_slice(), n, k)?;
    let lam = R::from_f64(lambda);
    let mut x_pow_neg = R::one();
    for _ in 0..n {
        x_pow_neg = x_pow_neg / x;
    }
    Ok(rising(&lam, n + k) * d * x_pow_neg)
}
