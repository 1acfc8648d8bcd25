//! Uniform radial grid with exact finite-volume weights.

use serde::{Deserialize, Serialize};

use super::PdeError;

/// Nodes `r_i = i·h`, i = 0..=M, on `[0, R_max]`. Cell i is
/// `[r_{i−1/2}, r_{i+1/2}] ∩ [0, R_max]`; volumes and face areas omit the
/// constant `|S^{N−1}|`, which is restored by [`RadialGrid::sphere_area`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    #[serde(rename = "N")]
    pub n: u32,
    pub r_max: f64,
    pub h: f64,
    /// Index of the last node (M).
    pub cells: usize,
}

impl RadialGrid {
    pub fn new(n: u32, r_max: f64, cells: usize) -> Result<Self, PdeError> {
        if n == 0 {
            return Err(PdeError::Config("N must be >= 1".into()));
        }
        if !(r_max.is_finite() && r_max > 0.0) || cells < 4 {
            return Err(PdeError::Config(format!("need R_max > 0 and at least 4 cells (R_max = {r_max}, cells = {cells})")));
        }
        Ok(RadialGrid { n, r_max, h: r_max / cells as f64, cells })
    }

    /// Grid with spacing close to `h` on `[0, R_max]`.
    pub fn with_spacing(n: u32, r_max: f64, h: f64) -> Result<Self, PdeError> {
        Self::new(n, r_max, (r_max / h).round().max(4.0) as usize)
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.node(i)).collect()
    }

    fn ball(&self, r: f64) -> f64 {
        r.powi(self.n as i32) / self.n as f64
    }

    fn lower_face(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            (i as f64 - 0.5) * self.h
        }
    }

    fn upper_face(&self, i: usize) -> f64 {
        if i == self.cells {
            self.r_max
        } else {
            (i as f64 + 0.5) * self.h
        }
    }

    /// Cell volumes `(r_{i+1/2}^N − r_{i−1/2}^N)/N`.
    pub fn volumes(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.ball(self.upper_face(i)) - self.ball(self.lower_face(i))).collect()
    }

    /// Face areas `r_{i+1/2}^{N−1}` for i = 0..M−1.
    pub fn face_areas(&self) -> Vec<f64> {
        (0..self.cells).map(|i| ((i as f64 + 0.5) * self.h).powi(self.n as i32 - 1)).collect()
    }

    /// Exact volume fraction of each cell inside the closed ball `B_L`.
    pub fn ball_fractions(&self, l: f64) -> Vec<f64> {
        (0..=self.cells)
            .map(|i| {
                let (lo, hi) = (self.lower_face(i), self.upper_face(i));
                if hi <= l {
                    1.0
                } else if lo >= l {
                    0.0
                } else {
                    (self.ball(l) - self.ball(lo)) / (self.ball(hi) - self.ball(lo))
                }
            })
            .collect()
    }

    /// `|S^{N−1}| = 2π^{N/2}/Γ(N/2)`.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.n)
    }

    /// Linear interpolation of nodal values at radius r (clamped to the grid).
    pub fn interpolate(&self, u: &[f64], r: f64) -> f64 {
        let x = (r / self.h).clamp(0.0, self.cells as f64);
        let i = (x.floor() as usize).min(self.cells - 1);
        let s = x - i as f64;
        u[i] * (1.0 - s) + u[i + 1] * s
    }
}

pub fn sphere_area(n: u32) -> f64 {
    // Γ(N/2) by the half-integer recursion
    let mut gamma_half = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut k = if n % 2 == 0 { 1.0 } else { 0.5 };
    while k < n as f64 / 2.0 - 1e-12 {
        gamma_half *= k;
        k += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half
}
