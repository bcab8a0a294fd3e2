//! Smooth dyadic cutoffs and Littlewood–Paley projectors.

use crate::spectral::SpectralField;

/// Inner edge of the plateau of `η₀`.
pub const PLATEAU: f64 = 1.25;
/// Outer edge of the support of `η₀`.
pub const SUPPORT: f64 = 1.6;

fn bump_tail(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `C^∞` step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn smooth_step(x: f64) -> f64 {
    let a = bump_tail(x);
    let b = bump_tail(1.0 - x);
    a / (a + b)
}

/// Even, `≡ 1` on `[-5/4, 5/4]`, supported in `[-8/5, 8/5]`.
pub fn eta0(xi: f64) -> f64 {
    smooth_step((SUPPORT - xi.abs()) / (SUPPORT - PLATEAU))
}

/// `χ_k(ξ) = η₀(ξ/2^k) - η₀(ξ/2^{k-1})`, any `k ∈ ℤ`. Supported where
/// `|ξ| ∈ [2^{k-1}, 2^{k+1}]`.
pub fn chi(k: i32, xi: f64) -> f64 {
    eta0(xi / 2f64.powi(k)) - eta0(xi / 2f64.powi(k - 1))
}

/// `η₀` for `k = 0`, `χ_k` for `k ≥ 1`.
pub fn eta(k: u32, xi: f64) -> f64 {
    if k == 0 {
        eta0(xi)
    } else {
        chi(k as i32, xi)
    }
}

/// Window in time: `≡ 1` on `[-1, 1]`, supported in `[-2, 2]`.
pub fn time_window(t: f64) -> f64 {
    smooth_step(2.0 - t.abs())
}

/// `I_k = {2^{k-1} ≤ |ξ| ≤ 2^{k+1}}`.
pub fn in_dyadic_shell(k: i32, xi: f64) -> bool {
    let a = xi.abs();
    a >= 2f64.powi(k - 1) && a <= 2f64.powi(k + 1)
}

/// Modulation shell: `[-2, 2]` for `j = 0`, `I_j` otherwise.
pub fn in_modulation_shell(j: u32, theta: f64) -> bool {
    if j == 0 {
        theta.abs() <= 2.0
    } else {
        in_dyadic_shell(j as i32, theta)
    }
}

/// `P_k`: multiply coefficients by `η_k(ξ)`.
pub fn project_pk(s: &SpectralField, k: u32) -> SpectralField {
    let grid = s.grid();
    let coeffs = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * eta(k, grid.wavenumber(i)))
        .collect();
    SpectralField::from_parts_unchecked(grid.clone(), coeffs)
}

/// Smallest `K` with `η₀(ξ/2^K) = 1` on the whole lattice, so that
/// `Σ_{k ≤ K} P_k` is the identity there.
pub fn top_shell(s: &SpectralField) -> u32 {
    let max = s.grid().fundamental() * (s.grid().points() / 2) as f64;
    let mut k = 0;
    while 2f64.powi(k as i32) * PLATEAU < max {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, PeriodicGrid, RealField};
    use std::f64::consts::PI;

    #[test]
    fn golden_profile() {
        // Frozen values of the chosen η₀.
        let table = [
            (0.0, 1.0),
            (1.25, 1.0),
            (1.3, 0.9970802502076078),
            (1.35, 0.8909031788043871),
            (1.425, 0.5000000000000002),
            (1.5, 0.10909682119561329),
            (1.55, 0.0029197497923921993),
            (1.6, 0.0),
            (3.0, 0.0),
        ];
        for (x, v) in table {
            assert!((eta0(x) - v).abs() < 1e-15, "η₀({x})");
            assert_eq!(eta0(-x), eta0(x));
        }
    }

    #[test]
    fn partition_of_unity() {
        for kk in 1..12u32 {
            let limit = 2f64.powi(kk as i32 - 1);
            for i in 0..=2000 {
                let xi = -limit + 2.0 * limit * i as f64 / 2000.0;
                let sum: f64 = (0..=kk).map(|k| eta(k, xi)).sum();
                assert!((sum - 1.0).abs() < 1e-12, "K={kk} ξ={xi}");
            }
        }
    }

    #[test]
    fn shells_contain_supports() {
        for k in -3..10 {
            for i in 0..4000 {
                let xi = 2f64.powi(k + 2) * (i as f64 / 4000.0);
                let v = chi(k, xi);
                assert!((0.0..=1.0).contains(&v));
                if !in_dyadic_shell(k, xi) {
                    assert_eq!(v, 0.0, "k={k} ξ={xi}");
                }
            }
        }
    }

    #[test]
    fn window_profile() {
        assert_eq!(time_window(0.0), 1.0);
        assert_eq!(time_window(-1.0), 1.0);
        assert_eq!(time_window(2.0), 0.0);
        assert_eq!(time_window(-2.5), 0.0);
        assert!((time_window(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_projections() {
        let grid = PeriodicGrid::new(2.0 * PI, 64).unwrap();
        let u = forward_transform(&RealField::from_fn(grid, f64::cos).unwrap());
        let p0 = project_pk(&u, 0);
        let p1 = project_pk(&u, 1);
        for (i, c) in u.coeffs().iter().enumerate() {
            assert!((p0.coeffs()[i] - c).norm() < 1e-14);
            assert!(p1.coeffs()[i].norm() < 1e-14);
        }
        for k in 2..6 {
            assert!(project_pk(&u, k).coeffs().iter().all(|c| c.norm() < 1e-14));
        }
    }

    #[test]
    fn projections_resum_and_nearly_orthogonal() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        use crate::spectral::sobolev_norm;
        let grid = PeriodicGrid::new(20.0, 256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let samples: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = forward_transform(&RealField::new(grid.clone(), samples).unwrap());
            let top = top_shell(&u);
            let mut total = vec![num_complex::Complex64::new(0.0, 0.0); 256];
            let mut energy = 0.0;
            for k in 0..=top {
                let p = project_pk(&u, k);
                energy += sobolev_norm(&p, 0.0).unwrap().powi(2);
                for (t, c) in total.iter_mut().zip(p.coeffs()) {
                    *t += c;
                }
                for k2 in (k + 2)..=top {
                    let q = project_pk(&p, k2);
                    assert!(q.coeffs().iter().all(|c| c.norm() == 0.0));
                }
            }
            let max = u.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.norm()));
            for (t, c) in total.iter().zip(u.coeffs()) {
                assert!((t - c).norm() < 1e-10 * max);
            }
            let full = sobolev_norm(&u, 0.0).unwrap().powi(2);
            assert!(energy >= 0.5 * full && energy <= 2.0 * full);
        }
    }
}
