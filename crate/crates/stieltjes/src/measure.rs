//! Measure-backed functions: a constant C ≥ 0 plus a nonnegative measure ρ on
//! [0, ∞) made of point masses and a piecewise-constant density, representing
//!
//! ```text
//! f(x) = C + ∫₀^∞ dρ(t) / (x + t)^λ.
//! ```
//!
//! Everything about such f is available in closed form: the kernel integrals
//! ∫ dρ/(x+t)^{n+λ}, all derivatives, and the analytic continuation off the
//! cut (−∞, 0].

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Validated representation data (C, ρ).
///
/// Atoms are sorted by location and pieces by left endpoint; pieces may touch
/// but not overlap. Densities richer than piecewise-constant can be
/// approximated by refining the partition.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    c: f64,
    atoms: Vec<(f64, f64)>,
    pieces: Vec<(f64, f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    #[serde(rename = "C", default)]
    c: f64,
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pieces: Vec<(f64, f64, f64)>,
}

impl MeasureSpec {
    /// Checks signs, interval ordering and disjointness, then sorts.
    pub fn new(c: f64, atoms: Vec<(f64, f64)>, pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::NegativeMass {
                what: "constant C".into(),
                value: c,
            });
        }
        for &(t, w) in &atoms {
            if !t.is_finite() || !w.is_finite() || t < 0.0 {
                return Err(Error::BadSpec {
                    msg: format!("atom location must be finite and >= 0, got ({t}, {w})"),
                });
            }
            if w < 0.0 {
                return Err(Error::NegativeMass {
                    what: format!("atom at t={t}"),
                    value: w,
                });
            }
        }
        for &(a, b, h) in &pieces {
            if !a.is_finite() || !b.is_finite() || !h.is_finite() || a < 0.0 {
                return Err(Error::BadSpec {
                    msg: format!("piece must have finite data with a >= 0, got ({a}, {b}, {h})"),
                });
            }
            if a >= b {
                return Err(Error::BadInterval { a, b });
            }
            if h < 0.0 {
                return Err(Error::NegativeMass {
                    what: format!("piece [{a}, {b})"),
                    value: h,
                });
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut pieces = pieces;
        pieces.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for pair in pieces.windows(2) {
            let (a1, b1, _) = pair[0];
            let (a2, b2, _) = pair[1];
            if b1 > a2 {
                return Err(Error::OverlappingPieces { a1, b1, a2, b2 });
            }
        }
        Ok(MeasureSpec { c, atoms, pieces })
    }

    /// Parses the JSON form `{"C": number, "atoms": [[t,w],…], "pieces":
    /// [[a,b,h],…]}`; every field is optional.
    pub fn from_json(src: &str) -> Result<Self> {
        let raw: RawMeasure = serde_json::from_str(src).map_err(|e| Error::BadSpec {
            msg: format!("measure JSON: {e}"),
        })?;
        MeasureSpec::new(raw.c, raw.atoms, raw.pieces)
    }

    /// Same as `from_json` but starting from an already-parsed JSON value
    /// (used when the measure is nested inside a function spec).
    pub(crate) fn from_value(v: serde_json::Value) -> Result<Self> {
        let raw: RawMeasure = serde_json::from_value(v).map_err(|e| Error::BadSpec {
            msg: format!("measure JSON: {e}"),
        })?;
        MeasureSpec::new(raw.c, raw.atoms, raw.pieces)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[(f64, f64, f64)] {
        &self.pieces
    }

    /// True when ρ carries no mass at all (f is the constant C).
    pub fn is_constant(&self) -> bool {
        self.atoms.iter().all(|&(_, w)| w == 0.0)
            && self.pieces.iter().all(|&(_, _, h)| h == 0.0)
    }

    /// ∫ dρ(t) / (x+t)^{n+λ} in closed form.
    ///
    /// Atoms contribute w·(x+t)^{−(n+λ)}; a piece (a, b, h) contributes
    /// h·[(x+a)^{−s} − (x+b)^{−s}]/s with s = n+λ−1, switching to the
    /// logarithmic primitive h·ln((x+b)/(x+a)) when |s| < 1e−9.
    pub fn kernel_integral<R: Real>(&self, x: &R, lambda: f64, n: usize) -> Result<R> {
        check_positive_x(x)?;
        check_lambda(lambda)?;
        let expo = -(R::from_usize(n) + R::from_f64(lambda));
        let mut acc = R::zero();
        for &(t, w) in &self.atoms {
            let base = x.clone() + R::from_f64(t);
            acc += R::from_f64(w) * Real::powf(&base, &expo);
        }
        let s_f64 = n as f64 + lambda - 1.0;
        let s = R::from_usize(n) + R::from_f64(lambda) - R::one();
        for &(a, b, h) in &self.pieces {
            acc += R::from_f64(h) * power_primitive(x, a, b, s_f64, &s);
        }
        Ok(acc)
    }

    /// The derivatives f(x), f′(x), …, f^(N)(x), using
    /// f^(n)(x) = C·δ_{n,0} + (−1)^n · [∏_{i<n}(λ+i)] · ∫ dρ/(x+t)^{n+λ}.
    pub fn eval_derivs<R: Real>(&self, lambda: f64, x: &R, n_max: usize) -> Result<Vec<R>> {
        check_positive_x(x)?;
        check_lambda(lambda)?;
        let lam = R::from_f64(lambda);
        let mut out = Vec::with_capacity(n_max + 1);
        let mut ris = R::one();
        let mut sign_negative = false;
        for n in 0..=n_max {
            if n > 0 {
                ris = ris * (lam.clone() + R::from_usize(n - 1));
                sign_negative = !sign_negative;
            }
            let mut v = ris.clone() * self.kernel_integral(x, lambda, n)?;
            if sign_negative {
                v = -v;
            }
            if n == 0 {
                v += R::from_f64(self.c);
            }
            out.push(v);
        }
        Ok(out)
    }

    /// f(z) off the cut (−∞, 0], with the principal branch of (z+t)^λ.
    pub fn eval_complex(&self, lambda: f64, z: Complex64) -> Result<Complex64> {
        check_lambda(lambda)?;
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::OnCut { re: z.re, im: z.im });
        }
        let mut f = Complex64::new(self.c, 0.0);
        for &(t, w) in &self.atoms {
            f += w * (z + t).powf(-lambda);
        }
        for &(a, b, h) in &self.pieces {
            if (lambda - 1.0).abs() < 1e-9 {
                f += h * ((z + b) / (z + a)).ln();
            } else {
                let e = 1.0 - lambda;
                f += h / (lambda - 1.0) * ((z + a).powf(e) - (z + b).powf(e));
            }
        }
        Ok(f)
    }

    /// Compact deterministic description for report headers.
    pub fn describe(&self) -> String {
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|(t, w)| format!("({t},{w})"))
            .collect();
        let pieces: Vec<String> = self
            .pieces
            .iter()
            .map(|(a, b, h)| format!("({a},{b},{h})"))
            .collect();
        format!(
            "C={} atoms=[{}] pieces=[{}]",
            self.c,
            atoms.join(","),
            pieces.join(",")
        )
    }
}

/// ∫_a^b (x+t)^{−(s+1)} dt with the logarithmic branch at |s| < 1e−9.
///
/// `s_f64` drives the branch choice so both precisions take the same path.
pub(crate) fn power_primitive<R: Real>(x: &R, a: f64, b: f64, s_f64: f64, s: &R) -> R {
    let xa = x.clone() + R::from_f64(a);
    let xb = x.clone() + R::from_f64(b);
    if s_f64.abs() < 1e-9 {
        Real::ln(&(xb / xa))
    } else {
        let e = -s.clone();
        (Real::powf(&xa, &e) - Real::powf(&xb, &e)) / s
    }
}

pub(crate) fn check_positive_x<R: Real>(x: &R) -> Result<()> {
    if !(x.clone() > R::zero()) || !x.is_finite() {
        return Err(Error::NonPositiveX { x: x.to_f64() });
    }
    Ok(())
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda { lambda });
    }
    Ok(())
}
