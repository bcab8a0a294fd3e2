use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans_for(points: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(points)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(points),
                inverse: planner.plan_fft_inverse(points),
            })
        })
        .clone()
}

/// Uniform grid on `[-L/2, L/2)` with periodic identification.
///
/// The frequency lattice is `ξ_m = 2πm/L` for `m ∈ {-N/2, …, N/2-1}`.
#[derive(Clone)]
pub struct PeriodicGrid {
    length: f64,
    points: usize,
    plans: Arc<Plans>,
}

impl PeriodicGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::param(format!("grid length must be positive, got {length}")));
        }
        if points < Self::MIN_POINTS || !points.is_multiple_of(2) {
            return Err(Error::param(format!(
                "grid points must be even and at least {}, got {points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { length, points, plans: plans_for(points) })
    }

    /// Same box, different resolution.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.length, points)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn x(&self, n: usize) -> f64 {
        -0.5 * self.length + n as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|n| self.x(n)).collect()
    }

    /// Integer mode number stored at FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT index holding integer mode `m`, if it is on the lattice.
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let n = self.points as i64;
        if m < -n / 2 || m >= n / 2 {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + n) as usize)
        }
    }

    pub fn nyquist_index(&self) -> usize {
        self.points / 2
    }

    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// `ξ` at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.fundamental() * self.mode(i) as f64
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.wavenumber(i)).collect()
    }

    /// Wavenumbers in increasing order, `-N/2 … N/2-1`.
    pub fn lattice(&self) -> Vec<f64> {
        let half = (self.points / 2) as i64;
        (-half..half).map(|m| self.fundamental() * m as f64).collect()
    }

    /// Largest representable `|ξ|` among the paired modes.
    pub fn max_wavenumber(&self) -> f64 {
        self.fundamental() * (self.points / 2 - 1) as f64
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.plans.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.plans.inverse.process(buf);
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.points == other.points
    }
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

impl Serialize for PeriodicGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("PeriodicGrid", 2)?;
        s.serialize_field("length", &self.length)?;
        s.serialize_field("points", &self.points)?;
        s.end()
    }
}
