//! Numerical toolkit for generalized Stieltjes functions.
//!
//! A function f on (0, ∞) is a generalized Stieltjes function of order λ > 0
//! (class S_λ) if it can be written
//!
//! ```text
//! f(x) = C + ∫₀^∞ dρ(t) / (x + t)^λ,      C ≥ 0,  ρ ≥ 0.
//! ```
//!
//! Membership in S_λ is equivalent to the nonnegativity of the derivative
//! family
//!
//! ```text
//! F_{n,k}(x) = (−1)^n Σ_{j=0}^k C(k,j) · [Γ(n+k+λ)/Γ(n+j+λ)] · x^j f^{(n+j)}(x)
//! ```
//!
//! for all n, k ≥ 0 and all x > 0, and those quantities double as the moments
//! of a Hausdorff problem whose solution recovers (C, ρ) constructively.
//!
//! The crate provides:
//!
//! * [`measure`]: measures (C, ρ) as atoms plus piecewise-constant density,
//!   with closed-form kernel integrals, derivatives, and complex evaluation;
//! * [`expr`]: a small expression language evaluated by Taylor jets, plus
//!   [`expr::FunctionSpec`] tying both function sources together;
//! * [`operators`]: every formula for F_{n,k} (binomial sum, differential
//!   operator form, the order-1 variants, the measure-backed closed form),
//!   the finite-difference operator Δ^k, and the table builder;
//! * [`hausdorff`]: completely monotone sequence tests, moment sequences,
//!   discrete measure reconstruction, and the change of variables back to
//!   (C, ρ);
//! * [`classify`]: grid sweeps of the sign conditions, the order-embedding
//!   quadrature check, asymptotic limit checks, and the upper-half-plane
//!   (Pick) test;
//! * [`report`]: deterministic JSON/CSV serialization of the report types.
//!
//! All numerical kernels are generic over [`real::Real`], instantiated at
//! hardware `f64` and at a 256-bit multiple-precision float ([`real::Ext`]).

pub mod classify;
mod error;
pub mod expr;
pub mod hausdorff;
pub mod measure;
pub mod operators;
pub(crate) mod quadrature;
pub mod real;
pub mod report;
pub(crate) mod series;

pub use error::{Error, Result};
