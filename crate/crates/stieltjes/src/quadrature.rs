//! Adaptive Gauss–Kronrod quadrature on finite intervals, plus the log-Gamma
//! and log-Beta functions needed for kernel normalization constants.
//!
//! Only the embedding-residual check integrates numerically; everything else
//! in the crate is closed form. Hence f64 is enough here.

/// 15-point Kronrod abscissae (positive half, descending).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights for the odd-index abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7–K15 panel: returns (Kronrod value, |Kronrod − Gauss|).
fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Integrates `f` over [a, b] by bisecting panels until the local error
/// estimate fits inside the absolute tolerance budget.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn go<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = panel(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, 0.5 * tol, depth - 1) + go(f, m, b, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    // the tolerance handed down is a budget; halving per split keeps the sum
    // of accepted panel errors below it
    go(f, a, b, abs_tol.max(f64::MIN_POSITIVE), 52)
}

/// ln Γ(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    const HALF_LN_TWO_PI: f64 = 0.918938533204672741780329736406;
    if x < 0.5 {
        // reflection keeps the approximation in its accurate range
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + 7.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b), for a, b > 0.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_integrate_exactly() {
        let v = adaptive(&|x| x * x, 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-14);
        let v = adaptive(&|x| x.powi(11) - 3.0 * x, -1.0, 2.0, 1e-12);
        assert_relative_eq!(v, (4096.0 - 1.0) / 12.0 - 4.5, epsilon = 1e-10);
    }

    #[test]
    fn smooth_integrands_hit_tight_tolerance() {
        let v = adaptive(&|x| x.exp(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, 1.0f64.exp() - 1.0, epsilon = 1e-13);
    }

    #[test]
    fn peaked_integrand_forces_subdivision() {
        // ∫₀¹ dx/(0.01 + x²) = 10·atan(10)
        let v = adaptive(&|x| 1.0 / (0.01 + x * x), 0.0, 1.0, 1e-11);
        assert_relative_eq!(v, 10.0 * 10.0f64.atan(), epsilon = 1e-10);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        assert_eq!(adaptive(&|x| x, 2.0, 2.0, 1e-10), 0.0);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(5.0), 24.0f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(
            ln_gamma(0.5),
            0.5 * std::f64::consts::PI.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn ln_gamma_recurrence_holds_across_the_reflection_seam() {
        for i in 0..60 {
            let x = 1e-3 * 10f64.powf(i as f64 / 10.0);
            let lhs = ln_gamma(x + 1.0);
            let rhs = ln_gamma(x) + x.ln();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn ln_beta_matches_integral() {
        // B(2,3) = 1/12; also check against direct quadrature of t(1−t)²
        assert_relative_eq!(ln_beta(2.0, 3.0), (1.0f64 / 12.0).ln(), epsilon = 1e-13);
        let direct = adaptive(&|t| t * (1.0 - t) * (1.0 - t), 0.0, 1.0, 1e-13);
        assert_relative_eq!(ln_beta(2.0, 3.0), direct.ln(), epsilon = 1e-12);
    }
}
