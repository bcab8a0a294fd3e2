use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::SpectralField;
use crate::error::{Error, Result};

/// `|ξ|^p` evaluated as `exp(p·ln|ξ|)`, with the value at the origin taken as 0.
pub fn fractional_power(xi: f64, p: f64) -> f64 {
    if xi == 0.0 {
        0.0
    } else {
        (p * xi.abs().ln()).exp()
    }
}

type SymbolFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A Fourier multiplier `ξ ↦ m(ξ)`, evaluated lazily on whatever lattice it is applied to.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    symbol: Arc<SymbolFn>,
}

impl MultiplierSymbol {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), symbol: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Self::new("identity", |_| Complex64::new(1.0, 0.0))
    }

    /// `(iξ)^order`, the symbol of `∂_x^order`.
    pub fn derivative(order: u32) -> Self {
        Self::new(format!("derivative {order}"), move |xi| Complex64::new(0.0, xi).powu(order))
    }

    /// `|ξ|^σ`, the symbol of `Λ^σ = |∂_x|^σ`.
    pub fn fractional_derivative(sigma: f64) -> Self {
        Self::new(format!("fractional-derivative {sigma}"), move |xi| {
            Complex64::new(fractional_power(xi, sigma), 0.0)
        })
    }

    /// `exp(iξ³t)`.
    pub fn airy(t: f64) -> Self {
        Self::new(format!("airy t={t}"), move |xi| Complex64::from_polar(1.0, xi * xi * xi * t))
    }

    /// `exp(-ε|ξ|^{2α}|t| + iξ³t)`. Negative `t` uses the `|t|` extension.
    pub fn dissipative(t: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        check_dissipation(epsilon, alpha)?;
        Ok(Self::new(format!("dissipative t={t} eps={epsilon} alpha={alpha}"), move |xi| {
            let damping = -epsilon * fractional_power(xi, 2.0 * alpha) * t.abs();
            Complex64::from_polar(damping.exp(), xi * xi * xi * t)
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        (self.symbol)(xi)
    }
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol").field("name", &self.name).finish()
    }
}

pub(crate) fn check_dissipation(epsilon: f64, alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::param(format!("ε must lie in [0, 1], got {epsilon}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("α must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Coefficientwise product. The unpaired Nyquist coefficient is zeroed afterwards.
pub fn apply_multiplier(s: &SpectralField, m: &MultiplierSymbol) -> Result<SpectralField> {
    let grid = s.grid();
    let mut coeffs = Vec::with_capacity(grid.points());
    for (i, c) in s.coeffs().iter().enumerate() {
        let v = m.eval(grid.wavenumber(i));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::data(format!(
                "symbol '{}' is not finite at ξ = {}",
                m.name(),
                grid.wavenumber(i)
            )));
        }
        coeffs.push(v * c);
    }
    coeffs[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
    Ok(SpectralField::from_parts_unchecked(grid.clone(), coeffs))
}

/// `W₀(t)`: multiply by `exp(iξ³t)`.
pub fn airy_evolve(s: &SpectralField, t: f64) -> SpectralField {
    apply_multiplier(s, &MultiplierSymbol::airy(t)).expect("unimodular symbol is finite")
}

/// `W_ε^α(t)`: multiply by `exp(-ε|ξ|^{2α}|t| + iξ³t)`.
pub fn dissipative_evolve(s: &SpectralField, t: f64, epsilon: f64, alpha: f64) -> Result<SpectralField> {
    let m = MultiplierSymbol::dissipative(t, epsilon, alpha)?;
    apply_multiplier(s, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, inverse_transform, sobolev_norm, PeriodicGrid, RealField};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn field(n: usize, f: impl Fn(f64) -> f64) -> SpectralField {
        let grid = PeriodicGrid::new(2.0 * PI, n).unwrap();
        forward_transform(&RealField::from_fn(grid, f).unwrap())
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn smooth(x: f64) -> f64 {
        (x.sin()).exp() + 0.3 * (2.0 * x).cos()
    }

    #[test]
    fn identity_multiplier() {
        let s = field(32, smooth);
        let out = apply_multiplier(&s, &MultiplierSymbol::identity()).unwrap();
        // Only the Nyquist coefficient may differ.
        assert!(max_diff(&s, &out) <= s.coeffs()[16].norm() + 1e-15);
    }

    #[test]
    fn derivative_of_cosine() {
        let s = field(16, f64::cos);
        let d = inverse_transform(&apply_multiplier(&s, &MultiplierSymbol::derivative(1)).unwrap()).unwrap();
        for (x, v) in d.grid().xs().iter().zip(d.samples()) {
            assert!((v + x.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn half_derivative_of_cos2x() {
        let s = field(16, |x| (2.0 * x).cos());
        let d = inverse_transform(&apply_multiplier(&s, &MultiplierSymbol::fractional_derivative(0.5)).unwrap())
            .unwrap();
        for (x, v) in d.grid().xs().iter().zip(d.samples()) {
            assert!((v - 2f64.sqrt() * (2.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_symbol_is_a_data_error() {
        let s = field(16, f64::cos);
        let bad = MultiplierSymbol::new("bad", |xi| Complex64::new(1.0 / xi, 0.0));
        assert!(matches!(apply_multiplier(&s, &bad), Err(Error::Data(_))));
    }

    #[test]
    fn airy_identities() {
        let s = field(64, smooth);
        assert!(max_diff(&airy_evolve(&s, 0.0), &s) < 1e-15);
        let t = 0.37;
        let out = airy_evolve(&s, t);
        for sigma in [-2.0, 0.0, 1.0, 2.5, 4.0] {
            let a = sobolev_norm(&s, sigma).unwrap();
            let b = sobolev_norm(&out, sigma).unwrap();
            assert!(((a - b) / a).abs() < 1e-12);
        }
        let two = airy_evolve(&airy_evolve(&s, 0.21), -0.55);
        let one = airy_evolve(&s, 0.21 - 0.55);
        assert!(max_diff(&two, &one) < 1e-12);
    }

    #[test]
    fn dissipative_reduces_to_airy() {
        let s = field(64, smooth);
        for t in [-1.0, 0.0, 0.5, 3.0] {
            let a = dissipative_evolve(&s, t, 0.0, 0.7).unwrap();
            assert!(max_diff(&a, &airy_evolve(&s, t)) < 1e-15);
        }
    }

    #[test]
    fn heat_damping_of_cos2x() {
        let s = field(16, |x| (2.0 * x).cos());
        let out = dissipative_evolve(&s, 1.0, 1.0, 1.0).unwrap();
        let expect = (-4.0_f64).exp();
        assert!((out.mode(2).norm() / s.mode(2).norm() - expect).abs() < 1e-14);
        assert!((out.mode(-2).norm() / s.mode(-2).norm() - expect).abs() < 1e-14);
    }

    #[test]
    fn dissipative_semigroup_and_mean() {
        let s = field(64, smooth);
        let (eps, alpha) = (0.3, 0.6);
        let two = dissipative_evolve(&dissipative_evolve(&s, 0.4, eps, alpha).unwrap(), 0.9, eps, alpha).unwrap();
        let one = dissipative_evolve(&s, 1.3, eps, alpha).unwrap();
        assert!(max_diff(&two, &one) < 1e-12);
        let m = MultiplierSymbol::dissipative(5.0, 1.0, 0.3).unwrap();
        assert_eq!(m.eval(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn dissipative_range_errors() {
        let s = field(16, f64::cos);
        assert!(matches!(dissipative_evolve(&s, 1.0, 1.5, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(dissipative_evolve(&s, 1.0, -0.1, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(dissipative_evolve(&s, 1.0, 0.5, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(dissipative_evolve(&s, 1.0, 0.5, 1.2), Err(Error::Parameter(_))));
    }

    proptest! {
        #[test]
        fn propagator_symbol_is_contractive(xi in -200.0f64..200.0, t in 0.0f64..10.0,
                                            eps in 0.0f64..=1.0, alpha in 0.01f64..=1.0) {
            let m = MultiplierSymbol::dissipative(t, eps, alpha).unwrap();
            prop_assert!(m.eval(xi).norm() <= 1.0 + 1e-15);
        }

        #[test]
        fn dissipation_contracts_sobolev_norms(t in 0.0f64..2.0, eps in 0.0f64..=1.0,
                                               alpha in 0.05f64..=1.0, sigma in -2.0f64..=4.0) {
            let s = field(32, smooth);
            let out = dissipative_evolve(&s, t, eps, alpha).unwrap();
            prop_assert!(sobolev_norm(&out, sigma).unwrap() <= sobolev_norm(&s, sigma).unwrap() + 1e-12);
        }

        #[test]
        fn multiplier_is_linear(a in -3.0f64..3.0, sigma in 0.0f64..3.0) {
            let s1 = field(32, smooth);
            let s2 = field(32, |x| (3.0 * x).sin());
            let m = MultiplierSymbol::fractional_derivative(sigma);
            let combo = s1.axpy(Complex64::new(a, 0.0), &s2).unwrap();
            let lhs = apply_multiplier(&combo, &m).unwrap();
            let rhs = apply_multiplier(&s1, &m).unwrap()
                .axpy(Complex64::new(a, 0.0), &apply_multiplier(&s2, &m).unwrap()).unwrap();
            prop_assert!(max_diff(&lhs, &rhs) < 1e-12 * (1.0 + a.abs()) * 50.0);
        }
    }
}
