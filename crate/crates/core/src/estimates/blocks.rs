//! Block functions on `I_k × Ĩ_j` and the quadrilinear form
//! `J(f,g,h,u) = ∫ f(ξ₁,μ₁)g(ξ₂,μ₂)h(ξ₃,μ₃) u(ξ₁+ξ₂+ξ₃, μ₁+μ₂+μ₃+Ω) dξ dμ`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::resonance::omega;
use crate::error::{Error, Result};

/// Default number of interior nodes per axis.
pub const DEFAULT_NODES: usize = 8;
/// Default cap on direct-sum evaluations.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn contains_interval(&self, o: &Interval) -> bool {
        o.lo >= self.lo && o.hi <= self.hi
    }

    fn intersects(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }
}

/// One sign component of `I_k = {2^{k-1} ≤ |ξ| ≤ 2^{k+1}}`.
pub fn frequency_component(k: i32, positive: bool) -> Interval {
    let (a, b) = (2f64.powi(k - 1), 2f64.powi(k + 1));
    if positive {
        Interval::new(a, b)
    } else {
        Interval::new(-b, -a)
    }
}

/// `[-2, 2]` for `j = 0`, one sign component of `I_j` otherwise.
pub fn modulation_component(j: u32, positive: bool) -> Interval {
    if j == 0 {
        Interval::new(-2.0, 2.0)
    } else {
        let (a, b) = (2f64.powi(j as i32 - 1), 2f64.powi(j as i32 + 1));
        if positive {
            Interval::new(a, b)
        } else {
            Interval::new(-b, -a)
        }
    }
}

/// Nonnegative node values on a tensor grid inside `I_k × Ĩ_j`, read as the
/// bilinear interpolant that vanishes on the rectangle's boundary. Nodes sit at
/// `lo + (i+1)h`, `h = len/(n+1)`, so the quadrature weight of every node is `h_ξ h_μ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockFunction {
    k: i32,
    j: u32,
    xi: Interval,
    mu: Interval,
    nx: usize,
    nm: usize,
    values: Vec<f64>,
}

impl BlockFunction {
    /// `values` has `nx·nm` entries, `ξ`-major.
    pub fn new(k: i32, j: u32, xi: Interval, mu: Interval, nx: usize, nm: usize, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || nm == 0 || values.len() != nx * nm {
            return Err(Error::param(format!("block grid {nx}×{nm} does not match {} values", values.len())));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::data("block values must be finite and nonnegative"));
        }
        if !(xi.len() > 0.0 && mu.len() > 0.0) {
            return Err(Error::param("block rectangle is empty"));
        }
        let fits_xi = [true, false].iter().any(|&p| frequency_component(k, p).contains_interval(&xi));
        let fits_mu = [true, false].iter().any(|&p| modulation_component(j, p).contains_interval(&mu));
        if !(fits_xi && fits_mu) {
            return Err(Error::param(format!("rectangle {xi:?} × {mu:?} is not inside block (k={k}, j={j})")));
        }
        Ok(Self { k, j, xi, mu, nx, nm, values })
    }

    pub fn indicator(k: i32, j: u32, xi: Interval, mu: Interval, nx: usize, nm: usize) -> Result<Self> {
        Self::new(k, j, xi, mu, nx, nm, vec![1.0; nx * nm])
    }

    pub fn zero(k: i32, j: u32, xi: Interval, mu: Interval, nx: usize, nm: usize) -> Result<Self> {
        Self::new(k, j, xi, mu, nx, nm, vec![0.0; nx * nm])
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn xi_range(&self) -> Interval {
        self.xi
    }

    pub fn mu_range(&self) -> Interval {
        self.mu
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn hx(&self) -> f64 {
        self.xi.len() / (self.nx + 1) as f64
    }

    fn hm(&self) -> f64 {
        self.mu.len() / (self.nm + 1) as f64
    }

    fn xi_node(&self, a: usize) -> f64 {
        self.xi.lo + (a + 1) as f64 * self.hx()
    }

    fn mu_node(&self, b: usize) -> f64 {
        self.mu.lo + (b + 1) as f64 * self.hm()
    }

    fn weight(&self) -> f64 {
        self.hx() * self.hm()
    }

    fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.nm + b]
    }

    /// Discrete `L²` norm `(Σ h_ξ h_μ f²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.weight() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Bilinear interpolant; zero on and outside the rectangle boundary.
    pub fn eval(&self, xi: f64, mu: f64) -> f64 {
        let (Some((a0, ta)), Some((b0, tb))) = (
            locate(xi, self.xi.lo, self.hx(), self.nx),
            locate(mu, self.mu.lo, self.hm(), self.nm),
        ) else {
            return 0.0;
        };
        let node = |a: isize, b: isize| -> f64 {
            if a < 0 || b < 0 || a >= self.nx as isize || b >= self.nm as isize {
                0.0
            } else {
                self.value(a as usize, b as usize)
            }
        };
        (1.0 - ta) * ((1.0 - tb) * node(a0, b0) + tb * node(a0, b0 + 1))
            + ta * ((1.0 - tb) * node(a0 + 1, b0) + tb * node(a0 + 1, b0 + 1))
    }

    /// `f(-ξ, -μ)`.
    pub fn reflected(&self) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for a in 0..self.nx {
            for b in 0..self.nm {
                values[(self.nx - 1 - a) * self.nm + (self.nm - 1 - b)] = self.value(a, b);
            }
        }
        Self {
            xi: Interval::new(-self.xi.hi, -self.xi.lo),
            mu: Interval::new(-self.mu.hi, -self.mu.lo),
            values,
            ..self.clone()
        }
    }
}

/// Cell index (node `-1` is the left boundary) and offset in `[0, 1)`.
fn locate(x: f64, lo: f64, h: f64, n: usize) -> Option<(isize, f64)> {
    let s = (x - lo) / h;
    if !(s > 0.0 && s < (n + 1) as f64) {
        return None;
    }
    let cell = s.floor();
    Some((cell as isize - 1, s - cell))
}

fn check_budget(f: [&BlockFunction; 4], budget: u64) -> Result<()> {
    let count = f[..3].iter().fold(1u64, |acc, b| acc.saturating_mul((b.nx * b.nm) as u64));
    if count > budget {
        return Err(Error::param(format!("J quadrature needs {count} evaluations, above the budget {budget}")));
    }
    Ok(())
}

/// Direct weighted sum over all node triples of slots 1–3.
pub fn brute_force_j(f: [&BlockFunction; 4], budget: u64) -> Result<f64> {
    check_budget(f, budget)?;
    let [f1, f2, f3, f4] = f;
    let w = f1.weight() * f2.weight() * f3.weight();
    let mut total = 0.0;
    for a1 in 0..f1.nx {
        let x1 = f1.xi_node(a1);
        for a2 in 0..f2.nx {
            let x2 = f2.xi_node(a2);
            for a3 in 0..f3.nx {
                let x3 = f3.xi_node(a3);
                let x4 = x1 + x2 + x3;
                if !(x4 > f4.xi.lo && x4 < f4.xi.hi) {
                    continue;
                }
                let om = omega(x1, x2, x3);
                for b1 in 0..f1.nm {
                    let v1 = f1.value(a1, b1);
                    if v1 == 0.0 {
                        continue;
                    }
                    let m1 = f1.mu_node(b1);
                    for b2 in 0..f2.nm {
                        let v12 = v1 * f2.value(a2, b2);
                        if v12 == 0.0 {
                            continue;
                        }
                        let m12 = m1 + f2.mu_node(b2);
                        for b3 in 0..f3.nm {
                            let v = v12 * f3.value(a3, b3);
                            if v != 0.0 {
                                total += v * f4.eval(x4, m12 + f3.mu_node(b3) + om);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(total * w)
}

/// Second evaluation order: with `τ = μ + ξ³` the form is the pairing of
/// `f₁♯ * f₂♯ * f₃♯` with `f₄♯`, `f♯(ξ,τ) = f(ξ, τ - ξ³)`. For each `ξ`-triple
/// the three `μ`-profiles are convolved by FFT on their common lattice, and
/// `f₄♯` is read at `τ₁+τ₂+τ₃`.
pub fn convolution_j(f: [&BlockFunction; 4], budget: u64) -> Result<f64> {
    check_budget(f, budget)?;
    let [f1, f2, f3, f4] = f;
    let d = f1.hm();
    if [f2.hm(), f3.hm()].iter().any(|h| ((h - d) / d).abs() > 1e-12) {
        return Err(Error::param("slots 1–3 must share one μ-spacing for the convolution path"));
    }
    let len = f1.nm + f2.nm + f3.nm - 2;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let spectrum = |b: &BlockFunction, a: usize| -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for (m, slot) in buf.iter_mut().enumerate().take(b.nm) {
            *slot = Complex64::new(b.value(a, m), 0.0);
        }
        fwd.process(&mut buf);
        buf
    };
    let s1: Vec<Vec<Complex64>> = (0..f1.nx).map(|a| spectrum(f1, a)).collect();
    let s2: Vec<Vec<Complex64>> = (0..f2.nx).map(|a| spectrum(f2, a)).collect();
    let s3: Vec<Vec<Complex64>> = (0..f3.nx).map(|a| spectrum(f3, a)).collect();
    // μ₁+μ₂+μ₃ at lattice index n of the convolution.
    let origin = f1.mu.lo + f2.mu.lo + f3.mu.lo + 3.0 * d;
    let mut total = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for a1 in 0..f1.nx {
        let x1 = f1.xi_node(a1);
        for a2 in 0..f2.nx {
            let x2 = f2.xi_node(a2);
            for a3 in 0..f3.nx {
                let x3 = f3.xi_node(a3);
                let x4 = x1 + x2 + x3;
                if !(x4 > f4.xi.lo && x4 < f4.xi.hi) {
                    continue;
                }
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = s1[a1][i] * s2[a2][i] * s3[a3][i];
                }
                inv.process(&mut buf);
                let shift = x1.powi(3) + x2.powi(3) + x3.powi(3);
                let x4c = x4.powi(3);
                for (n, c) in buf.iter().enumerate().take(len) {
                    let g = c.re / size as f64;
                    if g.abs() < 1e-300 {
                        continue;
                    }
                    let tau = origin + n as f64 * d + shift;
                    total += g * f4.eval(x4, tau - x4c);
                }
            }
        }
    }
    Ok(total * f1.weight() * f2.weight() * f3.weight())
}

/// Hypothesis family of the four-block estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundCase {
    A,
    B,
    C,
    D,
}

impl BoundCase {
    pub const ALL: [BoundCase; 4] = [BoundCase::A, BoundCase::B, BoundCase::C, BoundCase::D];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundCase::A => "a",
            BoundCase::B => "b",
            BoundCase::C => "c",
            BoundCase::D => "d",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

impl std::str::FromStr for BoundCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(BoundCase::A),
            "b" => Ok(BoundCase::B),
            "c" => Ok(BoundCase::C),
            "d" => Ok(BoundCase::D),
            other => Err(Error::param(format!("unknown bound case {other:?}"))),
        }
    }
}

/// Block indices `(k_i, j_i)` for slots 1–4. Slot 4 is the argument shifted by `Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockIndices {
    pub k: [i32; 4],
    pub j: [u32; 4],
}

impl BlockIndices {
    pub fn new(k: [i32; 4], j: [u32; 4]) -> Self {
        Self { k, j }
    }

    fn sorted_k(&self) -> [i32; 4] {
        let mut k = self.k;
        k.sort();
        k
    }

    fn sorted_j(&self) -> [u32; 4] {
        let mut j = self.j;
        j.sort();
        j
    }

    /// Check the hypotheses of `case`.
    pub fn check(&self, case: BoundCase) -> Result<()> {
        let k = self.sorted_k();
        match case {
            BoundCase::A => Ok(()),
            BoundCase::B if k[1] <= k[2] - 5 => Ok(()),
            BoundCase::B => Err(Error::param(format!("case (b) needs k₂ ≤ k₃ - 5, got sorted k = {k:?}"))),
            BoundCase::C if k[0] >= 1 => Ok(()),
            BoundCase::C => Err(Error::param(format!("case (c) needs every k ≥ 1, got {k:?}"))),
            BoundCase::D if k[0] <= k[3] - 10 => Ok(()),
            BoundCase::D => Err(Error::param(format!("case (d) needs k_min ≤ k_max - 10, got {k:?}"))),
        }
    }

    /// Right-hand side of the estimate with constant 1, without the norms.
    pub fn bound(&self, case: BoundCase) -> f64 {
        let k = self.sorted_k().map(f64::from);
        let j = self.sorted_j().map(f64::from);
        let (kmin, kthd, kmax) = (k[0], k[1], k[3]);
        let (jmin, jthd, jmax) = (j[0], j[1], j[3]);
        let jsum: f64 = j.iter().sum();
        let p = |e: f64| 2f64.powf(e);
        match case {
            BoundCase::A => p((jmin + jthd) / 2.0) * p((kmin + kthd) / 2.0),
            BoundCase::B => {
                // j of the block carrying the second smallest k.
                let mut order: Vec<usize> = (0..4).collect();
                order.sort_by_key(|&i| self.k[i]);
                let j2 = f64::from(self.j[order[1]]);
                let low = if j2 != jmax { kmin } else { kthd };
                p(jsum / 2.0) * p(-jmax / 2.0) * p(-kmax) * p(low / 2.0)
            }
            BoundCase::C => {
                let s = self.sorted_k();
                p(jsum / 2.0) * p(-jmax / 2.0) * p(-f64::from(s[0] + s[1] + s[2]) / 6.0)
            }
            BoundCase::D => p(jsum / 2.0) * p(-1.5 * kmax),
        }
    }
}

/// Deterministic stream seed for one trial.
fn trial_seed(seed: u64, case: BoundCase, blocks: &BlockIndices, trial: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        h ^= x;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    feed(seed);
    feed(case.index());
    for i in 0..4 {
        feed(blocks.k[i] as i64 as u64);
        feed(blocks.j[i] as u64);
    }
    feed(trial);
    h
}

fn shrink(iv: Interval, factor: f64) -> Interval {
    let m = 0.5 * (iv.lo + iv.hi);
    let r = 0.5 * iv.len() * factor;
    Interval::new(m - r, m + r)
}

/// Random nonnegative block functions for one trial, or `None` when no
/// compatible sign pattern turned up. Slots 1–3 share a `μ`-spacing;
/// their `μ`-rectangles are random windows of the shells.
pub fn random_blocks(blocks: &BlockIndices, nodes: usize, rng: &mut ChaCha8Rng) -> Result<Option<[BlockFunction; 4]>> {
    if nodes == 0 {
        return Err(Error::param("need at least one node per axis"));
    }
    for _ in 0..32 {
        let signs: Vec<bool> = (0..3).map(|_| rng.gen()).collect();
        let xis: Vec<Interval> =
            (0..3).map(|i| shrink(frequency_component(blocks.k[i], signs[i]), 0.999)).collect();
        let sum = Interval::new(xis.iter().map(|iv| iv.lo).sum(), xis.iter().map(|iv| iv.hi).sum());
        let options: Vec<Interval> = [true, false]
            .iter()
            .map(|&p| shrink(frequency_component(blocks.k[3], p), 0.999))
            .filter(|iv| iv.intersects(&sum))
            .collect();
        if options.is_empty() {
            continue;
        }
        let xi4 = options[rng.gen_range(0..options.len())];

        let mu_shells: Vec<Interval> =
            (0..3).map(|i| shrink(modulation_component(blocks.j[i], rng.gen()), 0.999)).collect();
        let spacing = mu_shells.iter().map(|iv| iv.len()).fold(f64::INFINITY, f64::min) / (nodes + 1) as f64;
        let width = spacing * (nodes + 1) as f64;
        let mus: Vec<Interval> = mu_shells
            .iter()
            .map(|iv| {
                let lo = iv.lo + rng.gen::<f64>() * (iv.len() - width).max(0.0);
                Interval::new(lo, lo + width)
            })
            .collect();

        let make = |rng: &mut ChaCha8Rng, k: i32, j: u32, xi: Interval, mu: Interval| {
            let values = (0..nodes * nodes).map(|_| rng.gen::<f64>()).collect();
            BlockFunction::new(k, j, xi, mu, nodes, nodes, values)
        };
        let f1 = make(rng, blocks.k[0], blocks.j[0], xis[0], mus[0])?;
        let f2 = make(rng, blocks.k[1], blocks.j[1], xis[1], mus[1])?;
        let f3 = make(rng, blocks.k[2], blocks.j[2], xis[2], mus[2])?;

        // Pick the μ-sign of slot 4 that can catch μ₁+μ₂+μ₃+Ω.
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for a1 in 0..nodes {
            for a2 in 0..nodes {
                for a3 in 0..nodes {
                    let (x1, x2, x3) = (f1.xi_node(a1), f2.xi_node(a2), f3.xi_node(a3));
                    let om = omega(x1, x2, x3);
                    lo = lo.min(om);
                    hi = hi.max(om);
                }
            }
        }
        let reach = Interval::new(lo + mus.iter().map(|m| m.lo).sum::<f64>(), hi + mus.iter().map(|m| m.hi).sum::<f64>());
        let mu_options: Vec<Interval> = [true, false]
            .iter()
            .map(|&p| shrink(modulation_component(blocks.j[3], p), 0.999))
            .filter(|iv| iv.intersects(&reach))
            .collect();
        let mu4 = if mu_options.is_empty() {
            shrink(modulation_component(blocks.j[3], rng.gen()), 0.999)
        } else {
            mu_options[rng.gen_range(0..mu_options.len())]
        };
        let f4 = make(rng, blocks.k[3], blocks.j[3], xi4, mu4)?;
        return Ok(Some([f1, f2, f3, f4]));
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub case: BoundCase,
    pub blocks: BlockIndices,
    pub trials: usize,
    /// `bound(case)` with constant 1.
    pub bound: f64,
    /// `J / (bound · Π‖f_i‖)` per trial.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Largest relative gap between the direct and convolution evaluations.
    pub max_path_gap: f64,
}

impl BoundReport {
    pub fn is_finite(&self) -> bool {
        self.max_ratio.is_finite()
    }
}

/// Random-trial stress test of one case on one block tuple. Trial `t` draws its
/// blocks from a generator keyed by `(seed, case, blocks, t)`.
pub fn check_j_bound(case: BoundCase, blocks: BlockIndices, trials: usize, nodes: usize, seed: u64) -> Result<BoundReport> {
    blocks.check(case)?;
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let bound = blocks.bound(case);
    let results: Vec<Result<(f64, f64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, case, &blocks, t));
            let Some(f) = random_blocks(&blocks, nodes, &mut rng)? else {
                return Ok((0.0, 0.0));
            };
            let refs = [&f[0], &f[1], &f[2], &f[3]];
            let direct = brute_force_j(refs, DEFAULT_BUDGET)?;
            let conv = convolution_j(refs, DEFAULT_BUDGET)?;
            let gap = if direct == 0.0 && conv.abs() < 1e-300 { 0.0 } else { (direct - conv).abs() / direct.abs().max(conv.abs()) };
            let norms: f64 = f.iter().map(BlockFunction::l2_norm).product();
            let ratio = if norms == 0.0 { 0.0 } else { direct.abs() / (bound * norms) };
            Ok((ratio, gap))
        })
        .collect();
    let mut ratios = Vec::with_capacity(trials);
    let mut max_path_gap = 0.0_f64;
    for r in results {
        let (ratio, gap) = r?;
        ratios.push(ratio);
        max_path_gap = max_path_gap.max(gap);
    }
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(BoundReport { case, blocks, trials, bound, ratios, max_ratio, max_path_gap })
}

/// `j` for slot 4 matching the median `|Ω|` over configurations with
/// `ξ_i ∈ I_{k_i}` (any signs) and `ξ₁+ξ₂+ξ₃ ∈ I_{k₄}`, so that random trials
/// put mass where slot 4 can see it.
pub fn resonance_matched_j(k: [i32; 4]) -> u32 {
    const SAMPLES: usize = 12;
    let shell = |k: i32| -> Vec<f64> {
        let (lo, hi) = (2f64.powi(k - 1), 2f64.powi(k + 1));
        (0..SAMPLES)
            .flat_map(|i| {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / SAMPLES as f64;
                [x, -x]
            })
            .collect()
    };
    let (s1, s2, s3) = (shell(k[0]), shell(k[1]), shell(k[2]));
    let mut logs = Vec::new();
    for &x1 in &s1 {
        for &x2 in &s2 {
            for &x3 in &s3 {
                let x4 = x1 + x2 + x3;
                let om = omega(x1, x2, x3).abs();
                if super::cutoffs::in_dyadic_shell(k[3], x4) && om > 0.0 {
                    logs.push(om.log2());
                }
            }
        }
    }
    if logs.is_empty() {
        return 0;
    }
    logs.sort_by(f64::total_cmp);
    let median = logs[logs.len() / 2];
    if median <= 1.0 {
        0
    } else {
        median.round() as u32
    }
}

/// Reports for several block tuples under one case, with the spread of their
/// (nonzero) maximal ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSweep {
    pub case: BoundCase,
    pub reports: Vec<BoundReport>,
    /// `max/min` over tuples with a nonzero ratio; `None` if fewer than two.
    pub spread: Option<f64>,
}

pub const BOUND_SPREAD_LIMIT: f64 = 50.0;

impl BoundSweep {
    pub fn is_stable(&self) -> bool {
        self.reports.iter().all(BoundReport::is_finite) && self.spread.is_some_and(|s| s < BOUND_SPREAD_LIMIT)
    }
}

pub fn sweep_j_bound(case: BoundCase, tuples: &[BlockIndices], trials: usize, nodes: usize, seed: u64) -> Result<BoundSweep> {
    let reports = tuples
        .iter()
        .map(|b| check_j_bound(case, *b, trials, nodes, seed))
        .collect::<Result<Vec<_>>>()?;
    let nonzero: Vec<f64> = reports.iter().map(|r| r.max_ratio).filter(|&r| r > 0.0).collect();
    let spread = if nonzero.len() < 2 {
        None
    } else {
        let max = nonzero.iter().cloned().fold(f64::MIN, f64::max);
        let min = nonzero.iter().cloned().fold(f64::MAX, f64::min);
        Some(max / min)
    };
    Ok(BoundSweep { case, reports, spread })
}
