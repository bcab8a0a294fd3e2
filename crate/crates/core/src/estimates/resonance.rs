//! The cubic resonance function and the critical regularity index.

use serde::Serialize;

use crate::error::{Error, Result};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let a = Self::quick(s.hi, s.lo + t.hi);
        Self::quick(a.hi, a.lo + t.lo)
    }

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Self::quick(p, err + (self.hi * o.lo + self.lo * o.hi))
    }

    fn cube(self) -> Self {
        self.mul(self).mul(self)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Both evaluations of `Ω(ξ₁,ξ₂,ξ₃) = ξ₁³ + ξ₂³ + ξ₃³ - (ξ₁+ξ₂+ξ₃)³`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resonance {
    /// The defining sum, carried in double-double so the cancellation is harmless.
    pub direct: f64,
    /// `3(ξ₁+ξ₂)(ξ₁+ξ₃)(ξ₁+ξ₄)` with `ξ₄ = -(ξ₁+ξ₂+ξ₃)`.
    pub factored: f64,
}

pub fn resonance(x1: f64, x2: f64, x3: f64) -> Resonance {
    let (a, b, c) = (DoubleDouble::from(x1), DoubleDouble::from(x2), DoubleDouble::from(x3));
    let sum = a.add(b).add(c);
    let direct = a.cube().add(b.cube()).add(c.cube()).add(sum.cube().neg()).value();

    let x4 = sum.neg();
    let f1 = DoubleDouble::two_sum(x1, x2).value();
    let f2 = DoubleDouble::two_sum(x1, x3).value();
    let f3 = a.add(x4).value();
    Resonance { direct, factored: 3.0 * f1 * f2 * f3 }
}

/// `Ω` by the factored form alone; the cheap path used inside quadratures.
pub(crate) fn omega(x1: f64, x2: f64, x3: f64) -> f64 {
    -3.0 * (x1 + x2) * (x1 + x3) * (x2 + x3)
}

/// Critical index `s_α`: `-3/4` for `α ≤ 1/2`, `-3/(5-2α)` above.
pub fn critical_regularity(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("α must lie in (0, 1], got {alpha}")));
    }
    Ok(if alpha <= 0.5 { -0.75 } else { -3.0 / (5.0 - 2.0 * alpha) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact(x: [f64; 3]) -> f64 {
        let q: Vec<BigRational> = x.iter().map(|v| BigRational::from_float(*v).unwrap()).collect();
        let s = &q[0] + &q[1] + &q[2];
        let cube = |v: &BigRational| v * v * v;
        let omega = cube(&q[0]) + cube(&q[1]) + cube(&q[2]) - cube(&s);
        let (n, d) = (omega.numer().clone(), omega.denom().clone());
        // Scale down to f64 range without overflowing the conversion.
        let shift = n.bits().saturating_sub(60) as i64 - d.bits().saturating_sub(60) as i64;
        let (nb, db) = (n.bits(), d.bits());
        let n = if nb > 60 { n >> (nb - 60) } else { n };
        let d = if db > 60 { d >> (db - 60) } else { d };
        let to_f = |b: &BigInt| b.to_string().parse::<f64>().unwrap();
        to_f(&n) / to_f(&d) * 2f64.powi(shift as i32)
    }

    #[test]
    fn small_integer_values() {
        assert_eq!(resonance(1.0, 1.0, 1.0), Resonance { direct: -24.0, factored: -24.0 });
        assert_eq!(resonance(1.0, 2.0, 3.0), Resonance { direct: -180.0, factored: -180.0 });
        for x3 in [-5.0, 0.3, 1e6] {
            let r = resonance(1.0, -1.0, x3);
            assert_eq!(r.direct, 0.0);
            assert_eq!(r.factored, 0.0);
        }
    }

    #[test]
    fn agrees_with_rational_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let scale = 10f64.powi(rng.gen_range(-3..5));
            let x = [
                rng.gen_range(-1.0..1.0) * scale,
                rng.gen_range(-1.0..1.0) * scale * 10f64.powi(rng.gen_range(-2..3)),
                rng.gen_range(-1.0..1.0) * scale,
            ];
            let truth = exact(x);
            let r = resonance(x[0], x[1], x[2]);
            if truth == 0.0 {
                continue;
            }
            assert!((r.direct - truth).abs() <= 1e-13 * truth.abs(), "{x:?}");
            assert!((r.factored - truth).abs() <= 1e-13 * truth.abs(), "{x:?}");
            assert!((omega(x[0], x[1], x[2]) - truth).abs() <= 1e-12 * truth.abs(), "{x:?}");
        }
    }

    #[test]
    fn near_resonant_triples_keep_relative_accuracy() {
        // ξ₂ + ξ₃ tiny compared with ξ₁: the naive ξ₁ + ξ₄ loses digits.
        let x = [1000.0, 0.1234567, -0.1234566];
        let truth = exact(x);
        let r = resonance(x[0], x[1], x[2]);
        assert!((r.factored - truth).abs() <= 1e-13 * truth.abs());
        assert!((r.direct - truth).abs() <= 1e-13 * truth.abs());
    }

    #[test]
    fn critical_index_table() {
        assert_eq!(critical_regularity(0.25).unwrap(), -0.75);
        assert_eq!(critical_regularity(0.5).unwrap(), -0.75);
        assert_eq!(critical_regularity(1.0).unwrap(), -1.0);
        assert!((critical_regularity(0.5 + 1e-12).unwrap() + 0.75).abs() < 1e-11);
        let mut prev = critical_regularity(0.5).unwrap();
        for i in 1..=50 {
            let s = critical_regularity(0.5 + i as f64 / 100.0).unwrap();
            assert!(s < prev);
            prev = s;
        }
        for a in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(critical_regularity(a).is_err());
        }
    }
}
