//! Closed-form Fourier symbols of the semi-discrete schemes on uniform 1D meshes.
//!
//! A harmonic `a_k(t) = e^(omega t) e^(i k h p)` is an exact eigenvector of every
//! circulant scheme, so each scheme is characterised by one complex growth rate:
//! `exact_symbol` for the PDE itself, `lumped_symbol`, `consistent_symbol` and
//! `corrected_symbol(n, ..)` for the discrete schemes. The `*_deviation`
//! functions return `omega - omega_exact` without cancellation; table-grade
//! error norms are built from those.

use num_complex::Complex64;

use crate::series::{SymbolSeries, RADIUS};
use crate::{Error, Result};

/// Correction terms beyond this count underflow for |ph| <= pi (the term ratio
/// is at most 2/3); the sums are returned capped.
pub const MAX_CORRECTIONS: usize = 64;

/// Physical and discretization parameters of one harmonic configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParams {
    /// Convection speed.
    pub lambda: f64,
    /// Diffusion coefficient, >= 0.
    pub kappa: f64,
    /// Mesh size, > 0.
    pub h: f64,
    /// Wave number of the harmonic.
    pub p: f64,
}

impl SchemeParams {
    pub fn new(lambda: f64, kappa: f64, h: f64, p: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::InvalidParams(format!("kappa = {kappa} must be >= 0")));
        }
        if kappa + lambda.abs() <= 0.0 {
            return Err(Error::InvalidParams("kappa + |lambda| must be positive".into()));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidParams(format!("h = {h} must be positive")));
        }
        if !(lambda.is_finite() && p.is_finite()) {
            return Err(Error::InvalidParams("lambda and p must be finite".into()));
        }
        Ok(SchemeParams { lambda, kappa, h, p })
    }

    /// Nondimensional wave number z = p h.
    pub fn z(&self) -> f64 {
        self.p * self.h
    }

    /// mu = lambda / (kappa p); defined only for kappa > 0 and p != 0.
    pub fn mu(&self) -> Option<f64> {
        (self.kappa > 0.0 && self.p != 0.0).then(|| self.lambda / (self.kappa * self.p))
    }

    /// Peclet number |lambda| / kappa; defined only for kappa > 0.
    pub fn peclet(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| self.lambda.abs() / self.kappa)
    }
}

/// A complex Fourier symbol: the real part is the dissipation rate, the
/// imaginary part minus the phase frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolValue {
    pub re: f64,
    pub im: f64,
}

impl SymbolValue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn abs_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl std::ops::Sub for SymbolValue {
    type Output = SymbolValue;
    fn sub(self, rhs: SymbolValue) -> SymbolValue {
        SymbolValue { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

/// Symbol of the continuous problem: -kappa p^2 - i lambda p.
pub fn exact_symbol(params: &SchemeParams) -> SymbolValue {
    SymbolValue {
        re: -params.kappa * params.p * params.p,
        im: -params.lambda * params.p,
    }
}

/// Symbol of the lumped scheme; identical arithmetic path to `corrected_symbol(0, ..)`.
pub fn lumped_symbol(params: &SchemeParams) -> SymbolValue {
    corrected_symbol(0, params)
}

/// Symbol of the consistent Galerkin scheme: the lumped symbol divided by
/// 1 - (2/3) sin^2(ph/2).
pub fn consistent_symbol(params: &SchemeParams) -> SymbolValue {
    let s = half_angle_sin_sq(params.z());
    let denom = 1.0 - 2.0 / 3.0 * s;
    let base = lumped_symbol(params);
    SymbolValue { re: base.re / denom, im: base.im / denom }
}

/// Symbol of the n-th corrected scheme: the n+1 leading terms of the Neumann
/// expansion of the consistent symbol. Term m multiplies the previous one by
/// (2/3) sin^2(ph/2), so the sums are accumulated multiplicatively.
pub fn corrected_symbol(n: usize, params: &SchemeParams) -> SymbolValue {
    let z = params.z();
    let s = half_angle_sin_sq(z);
    let h = params.h;
    let ratio = 2.0 / 3.0 * s;
    let mut re_term = -4.0 * params.kappa / (h * h) * s;
    let mut im_term = -params.lambda / h * z.sin();
    let mut re = re_term;
    let mut im = im_term;
    for _ in 1..=n.min(MAX_CORRECTIONS) {
        re_term *= ratio;
        im_term *= ratio;
        re += re_term;
        im += im_term;
    }
    SymbolValue { re, im }
}

/// The m-th correction increments (A_m, B_m), m >= 1:
/// A_m = (2^(m+2) kappa / (3^m h^2)) sin^(2m+2)(ph/2),
/// B_m = (2^m lambda / (3^m h)) sin(ph) sin^(2m)(ph/2),
/// so that omega_m = omega_(m-1) - A_m - i B_m.
pub fn correction_term(m: usize, params: &SchemeParams) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::Domain("correction_term requires m >= 1".into()));
    }
    let z = params.z();
    let s = half_angle_sin_sq(z);
    let h = params.h;
    let ratio = 2.0 / 3.0 * s;
    let mut a = 4.0 * params.kappa / (h * h) * s;
    let mut b = params.lambda / h * z.sin();
    for _ in 0..m {
        a *= ratio;
        b *= ratio;
    }
    Ok((a, b))
}

/// |e^((omega_num - omega_exact) t) - 1|: the exact relative sup-norm error of a
/// single-harmonic periodic 1D run.
pub fn harmonic_rel_error(omega_num: SymbolValue, omega_exact: SymbolValue, t: f64) -> f64 {
    rel_error_from_deviation(omega_num - omega_exact, t)
}

/// Same quantity given the deviation omega_num - omega_exact directly.
pub fn rel_error_from_deviation(deviation: SymbolValue, t: f64) -> f64 {
    complex_expm1(Complex64::new(deviation.re * t, deviation.im * t)).norm()
}

/// e^w - 1 without cancellation for small w.
pub fn complex_expm1(w: Complex64) -> Complex64 {
    let half_sin = (0.5 * w.im).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * half_sin * half_sin,
        w.re.exp() * w.im.sin(),
    )
}

/// omega_n - omega_exact, computed to full relative precision.
///
/// Written as kappa p^2 (1 - c S) + i lambda p (1 - sigma S) with
/// c = sinc^2(z/2), sigma = sinc(z) and S the n+1-term geometric sum of
/// q = (2/3) sin^2(z/2); the parenthesised deviations are evaluated by series
/// for small z, where forming omega_n and subtracting would lose every digit.
pub fn corrected_deviation(n: usize, params: &SchemeParams) -> SymbolValue {
    let terms = n.min(MAX_CORRECTIONS) + 1;
    let z = params.z();
    let (dev_diff, dev_conv) = if z.abs() <= RADIUS {
        let series = SymbolSeries::new();
        let z2 = z * z;
        (
            series.diffusive_deviation(terms, z2),
            series.convective_deviation(terms, z2),
        )
    } else {
        let s = half_angle_sin_sq(z);
        let geom = partial_geometric(2.0 / 3.0 * s, terms);
        let c = 4.0 * s / (z * z);
        let sigma = z.sin() / z;
        (1.0 - c * geom, 1.0 - sigma * geom)
    };
    SymbolValue {
        re: params.kappa * params.p * params.p * dev_diff,
        im: params.lambda * params.p * dev_conv,
    }
}

/// omega_L - omega_exact.
pub fn lumped_deviation(params: &SchemeParams) -> SymbolValue {
    corrected_deviation(0, params)
}

/// omega_G - omega_exact.
pub fn consistent_deviation(params: &SchemeParams) -> SymbolValue {
    let z = params.z();
    let (dev_diff, dev_conv) = if z.abs() <= RADIUS {
        let series = SymbolSeries::new();
        let z2 = z * z;
        (
            series.diffusive_deviation_consistent(z2),
            series.convective_deviation_consistent(z2),
        )
    } else {
        let s = half_angle_sin_sq(z);
        let geom = 1.0 / (1.0 - 2.0 / 3.0 * s);
        let c = 4.0 * s / (z * z);
        let sigma = z.sin() / z;
        (1.0 - c * geom, 1.0 - sigma * geom)
    };
    SymbolValue {
        re: params.kappa * params.p * params.p * dev_diff,
        im: params.lambda * params.p * dev_conv,
    }
}

pub(crate) fn half_angle_sin_sq(z: f64) -> f64 {
    let s = (0.5 * z).sin();
    s * s
}

pub(crate) fn partial_geometric(q: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    let mut term = 1.0;
    for j in 0..terms {
        if j > 0 {
            term *= q;
        }
        acc += term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1(h: f64) -> SchemeParams {
        SchemeParams::new(1.0, 1e-2, h, 3.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn exact_symbol_example1() {
        let w = exact_symbol(&example1(0.02));
        assert!((w.re - -0.8882643960980423).abs() < 1e-15);
        assert!((w.im - -9.42477796076938).abs() < 1e-13);
    }

    #[test]
    fn exact_symbol_trivial_cases() {
        let p0 = SchemeParams::new(2.5, 0.7, 0.1, 0.0).unwrap();
        let w = exact_symbol(&p0);
        assert_eq!(w.re, 0.0);
        assert_eq!(w.im, 0.0);
        let heat = SchemeParams::new(0.0, 1.0, 0.1, 1.0).unwrap();
        let w = exact_symbol(&heat);
        assert_eq!(w.re, -1.0);
        assert_eq!(w.im, 0.0);
    }

    #[test]
    fn lumped_symbol_example1() {
        let w = lumped_symbol(&example1(0.02));
        assert!((w.re - -0.885637463565566).abs() < 1e-14);
        assert!((w.im - -9.369065729286232).abs() < 1e-13);
    }

    #[test]
    fn lumped_symbol_nyquist_transport() {
        // ph = pi with kappa = 0: sin(pi) = 0 kills both parts
        let p = SchemeParams::new(1.0, 0.0, 0.5, 2.0 * std::f64::consts::PI).unwrap();
        let w = lumped_symbol(&p);
        assert!(w.re.abs() < 1e-15);
        assert!(w.im.abs() < 1e-14);
    }

    #[test]
    fn consistent_symbol_example1() {
        let w = consistent_symbol(&example1(0.02));
        assert!((w.re - -0.8908975451803012).abs() < 1e-13);
        assert!((w.im - -9.424711580345258).abs() < 1e-12);
    }

    #[test]
    fn consistent_is_limit_of_corrections() {
        // |ph| <= 3 keeps the geometric ratio below 2/3 sin^2 < 2/3
        for &(lambda, kappa, h, p) in
            &[(1.0, 1e-2, 0.02, 9.0), (0.3, 0.5, 0.1, 2.0), (-2.0, 1.0, 0.05, 25.0)]
        {
            let params = SchemeParams::new(lambda, kappa, h, p).unwrap();
            let g = consistent_symbol(&params);
            let w50 = corrected_symbol(50, &params);
            let diff = (g - w50).abs();
            assert!(diff <= 1e-12 * g.abs(), "diff {diff:e} vs |omega_G| {:e}", g.abs());
        }
    }

    #[test]
    fn corrected_symbol_example1_first_correction() {
        let w = corrected_symbol(1, &example1(0.02));
        assert!((w.re - -0.890866488344705).abs() < 1e-13);
        assert!((w.im - -9.424383033342659).abs() < 1e-12);
    }

    #[test]
    fn corrected_zero_is_lumped_bitwise() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let params = SchemeParams::new(
                4.0 * next() - 2.0,
                2.0 * next(),
                0.001 + next(),
                20.0 * next() - 10.0,
            )
            .unwrap();
            let a = corrected_symbol(0, &params);
            let b = lumped_symbol(&params);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_wave_number_kills_every_symbol() {
        let params = SchemeParams::new(1.3, 0.2, 0.05, 0.0).unwrap();
        for w in [
            exact_symbol(&params),
            lumped_symbol(&params),
            consistent_symbol(&params),
            corrected_symbol(7, &params),
        ] {
            assert_eq!(w.re, 0.0);
            assert_eq!(w.im, 0.0);
        }
    }

    #[test]
    fn real_part_nonincreasing_in_n() {
        let params = example1(0.05);
        let mut prev = f64::INFINITY;
        for n in 0..12 {
            let re = corrected_symbol(n, &params).re;
            assert!(re <= prev);
            prev = re;
        }
    }

    #[test]
    fn correction_terms_telescope() {
        let params = example1(0.04);
        let w0 = lumped_symbol(&params);
        let w3 = corrected_symbol(3, &params);
        let mut re = w0.re;
        let mut im = w0.im;
        for m in 1..=3 {
            let (a, b) = correction_term(m, &params).unwrap();
            re -= a;
            im -= b;
        }
        assert!((re - w3.re).abs() <= 1e-14 * w3.re.abs());
        assert!((im - w3.im).abs() <= 1e-14 * w3.im.abs());
    }

    #[test]
    fn correction_term_vanishing_cases() {
        let pure = SchemeParams::new(1.0, 0.0, 0.1, 3.0).unwrap();
        for m in 1..6 {
            let (a, _) = correction_term(m, &pure).unwrap();
            assert_eq!(a, 0.0);
        }
        // ph = pi: sin(ph) = 0 so B_m = 0
        let nyq = SchemeParams::new(1.0, 0.5, 0.1, std::f64::consts::PI / 0.1).unwrap();
        let (_, b) = correction_term(2, &nyq).unwrap();
        assert!(b.abs() < 1e-15);
    }

    #[test]
    fn rel_error_table2_values() {
        // Table-2 cells at N = 501 (h = 0.02), t = 0.1
        let params = example1(0.02);
        let exact = exact_symbol(&params);
        let lumped = harmonic_rel_error(lumped_symbol(&params), exact, 0.1);
        assert!((lumped - 5.5781e-3).abs() < 1e-7, "{lumped:e}");
        let first = harmonic_rel_error(corrected_symbol(1, &params), exact, 0.1);
        assert!((first - 2.6315e-4).abs() < 1e-8, "{first:e}");
        assert_eq!(harmonic_rel_error(exact, exact, 0.1), 0.0);
    }

    #[test]
    fn deviations_match_direct_subtraction_at_moderate_z() {
        let params = example1(0.05);
        for n in [0usize, 1, 3] {
            let dev = corrected_deviation(n, &params);
            let direct = corrected_symbol(n, &params) - exact_symbol(&params);
            assert!((dev.re - direct.re).abs() <= 1e-10 * direct.re.abs().max(1e-12));
            assert!((dev.im - direct.im).abs() <= 1e-10 * direct.im.abs().max(1e-12));
        }
        let dev = consistent_deviation(&params);
        let direct = consistent_symbol(&params) - exact_symbol(&params);
        assert!((dev.re - direct.re).abs() <= 1e-10 * direct.re.abs());
        assert!((dev.im - direct.im).abs() <= 1e-10 * direct.im.abs());
    }

    #[test]
    fn deviations_continuous_across_series_radius() {
        // params straddling |z| = RADIUS
        for &z in &[0.699, 0.701] {
            let params = SchemeParams::new(1.0, 0.3, z / 5.0, 5.0).unwrap();
            let dev = corrected_deviation(2, &params);
            let direct = corrected_symbol(2, &params) - exact_symbol(&params);
            assert!((dev.re - direct.re).abs() <= 1e-11 * direct.re.abs());
            assert!((dev.im - direct.im).abs() <= 1e-11 * direct.im.abs());
        }
    }

    #[test]
    fn symbols_tend_to_exact_as_h_shrinks() {
        let p = 3.0 * std::f64::consts::PI;
        let exactw =
            exact_symbol(&SchemeParams::new(1.0, 1e-2, 1.0, p).unwrap());
        let dist = |h: f64, which: usize| {
            let params = SchemeParams::new(1.0, 1e-2, h, p).unwrap();
            let w = match which {
                0 => lumped_symbol(&params),
                1 => corrected_symbol(1, &params),
                2 => corrected_symbol(3, &params),
                _ => consistent_symbol(&params),
            };
            (w - exactw).abs()
        };
        let h0 = 0.01 / p;
        for which in 0..4 {
            assert!(dist(h0 / 2.0, which) <= 0.3 * dist(h0, which));
        }
    }

    #[test]
    fn complex_expm1_small_argument() {
        let w = Complex64::new(1e-9, -2e-9);
        let direct = complex_expm1(w);
        // |e^w - 1| ~ |w| with relative correction |w|/2
        assert!((direct.norm() - w.norm()).abs() < 1e-17);
    }

    #[test]
    fn params_validation() {
        assert!(SchemeParams::new(1.0, -0.1, 0.1, 1.0).is_err());
        assert!(SchemeParams::new(0.0, 0.0, 0.1, 1.0).is_err());
        assert!(SchemeParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(SchemeParams::new(1.0, 1.0, 0.1, 1.0).is_ok());
    }

    #[test]
    fn mu_and_peclet_definedness() {
        let p = SchemeParams::new(1.0, 0.0, 0.1, 2.0).unwrap();
        assert!(p.mu().is_none());
        assert!(p.peclet().is_none());
        let q = SchemeParams::new(1.0, 1e-2, 0.02, 3.0 * std::f64::consts::PI).unwrap();
        assert!((q.mu().unwrap() - 10.61032953945969).abs() < 1e-12);
        assert_eq!(q.peclet().unwrap(), 100.0);
    }
}
