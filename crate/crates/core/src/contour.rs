//! Annular domain with trapezoidal quadrature on its two boundary circles.
//!
//! The outer circle `C1` (radius `R`) runs anticlockwise, the inner circle
//! `C2` (radius `1/R`) clockwise. Inner node `k` is the reciprocal of outer
//! node `k`, so `z -> 1/z` and `z -> conj(z)` are exact index permutations.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::hardy::GridFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("lambda0 must be at least 2 (got {0})")]
    Lambda0(f64),
    #[error("outer radius {radius} must exceed ell = {ell}")]
    RadiusTooSmall { radius: f64, ell: f64 },
    #[error("grid_points must be even and at least 8 (got {0})")]
    GridPoints(usize),
    #[error("truncation must be at least 1 (got {0})")]
    Truncation(usize),
    #[error("grid_points {m} < 4 * truncation {n}")]
    Aliasing { m: usize, n: usize },
}

/// Parameters of the annulus `1/R < |z| < R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusDomain {
    pub lambda0: f64,
    pub ell: f64,
    pub radius: f64,
    /// Nodes per circle.
    pub m: usize,
    /// Laurent truncation order.
    pub n: usize,
}

impl AnnulusDomain {
    pub const DEFAULT_LAMBDA0: f64 = 2.5;
    pub const DEFAULT_RADIUS: f64 = 3.0;
    pub const DEFAULT_M: usize = 256;
    pub const DEFAULT_N: usize = 64;

    pub fn new(lambda0: f64, radius: f64, m: usize, n: usize) -> Result<Self, DomainError> {
        if !(lambda0 >= 2.0) || !lambda0.is_finite() {
            return Err(DomainError::Lambda0(lambda0));
        }
        let ell = ell_of(lambda0);
        if !(radius > ell) || !radius.is_finite() {
            return Err(DomainError::RadiusTooSmall { radius, ell });
        }
        if !m.is_multiple_of(2) || m < 8 {
            return Err(DomainError::GridPoints(m));
        }
        if n < 1 {
            return Err(DomainError::Truncation(n));
        }
        if m < 4 * n {
            return Err(DomainError::Aliasing { m, n });
        }
        Ok(Self { lambda0, ell, radius, m, n })
    }

    pub fn inner_radius(&self) -> f64 {
        1.0 / self.radius
    }

    /// One node spacing on the larger circle.
    pub fn dist_min(&self) -> f64 {
        2.0 * PI * self.radius.max(1.0) / self.m as f64
    }

    /// Whether `z` lies on the spectral set `{|z|=1} ∪ ±[1/ell, ell]`.
    pub fn on_sigma(&self, z: C64, tol: f64) -> bool {
        if (z.norm() - 1.0).abs() <= tol {
            return true;
        }
        let x = z.re.abs();
        z.im.abs() <= tol && x >= 1.0 / self.ell - tol && x <= self.ell + tol
    }

    pub fn region(&self, z: C64) -> Region {
        let r = z.norm();
        let d = self.dist_to_contour(z);
        if d < self.dist_min() {
            Region::NearContour
        } else if r > self.radius {
            Region::OuterMinus
        } else if r < self.inner_radius() {
            Region::InnerMinus
        } else {
            Region::Plus
        }
    }

    pub fn dist_to_contour(&self, z: C64) -> f64 {
        let r = z.norm();
        (r - self.radius).abs().min((r - self.inner_radius()).abs())
    }
}

impl Default for AnnulusDomain {
    fn default() -> Self {
        Self::new(Self::DEFAULT_LAMBDA0, Self::DEFAULT_RADIUS, Self::DEFAULT_M, Self::DEFAULT_N)
            .expect("default domain is valid")
    }
}

/// `(λ0 + sqrt(λ0² − 4)) / 2`.
pub fn ell_of(lambda0: f64) -> f64 {
    (lambda0 + (lambda0 * lambda0 - 4.0).max(0.0).sqrt()) / 2.0
}

/// Position of a point relative to the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `|z| > R`, the component containing infinity.
    OuterMinus,
    /// `|z| < 1/R`, the component containing the origin.
    InnerMinus,
    /// Inside the annulus.
    Plus,
    /// Within one node spacing of either circle.
    NearContour,
}

/// Nodes and weights on `C = C1 ∪ C2`.
///
/// Index `0..M` is the outer circle, `M..2M` the inner circle.
#[derive(Clone)]
pub struct ContourGrid {
    domain: AnnulusDomain,
    nodes: Vec<C64>,
    weights: Vec<C64>,
    /// `ω^k` for `k` in `0..M`.
    roots: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for ContourGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContourGrid").field("domain", &self.domain).finish_non_exhaustive()
    }
}

pub fn build_domain(lambda0: f64, radius: f64, m: usize, n: usize) -> Result<ContourGrid, DomainError> {
    Ok(ContourGrid::new(AnnulusDomain::new(lambda0, radius, m, n)?))
}

impl ContourGrid {
    pub fn new(domain: AnnulusDomain) -> Self {
        let m = domain.m;
        let r = domain.radius;
        let roots: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
        let mut nodes = Vec::with_capacity(2 * m);
        let mut weights = Vec::with_capacity(2 * m);
        let h = C64::new(0.0, 2.0 * PI / m as f64);
        for w in &roots {
            let z = w * r;
            nodes.push(z);
            weights.push(z * h);
        }
        for k in 0..m {
            let z = roots[(m - k) % m] / r;
            nodes.push(z);
            weights.push(-z * h);
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        Self { domain, nodes, weights, roots, fwd, inv }
    }

    pub fn default_grid() -> Self {
        Self::new(AnnulusDomain::default())
    }

    pub fn domain(&self) -> &AnnulusDomain {
        &self.domain
    }

    pub fn radius(&self) -> f64 {
        self.domain.radius
    }

    /// Nodes per circle.
    pub fn m(&self) -> usize {
        self.domain.m
    }

    /// Laurent truncation order.
    pub fn n(&self) -> usize {
        self.domain.n
    }

    pub fn len(&self) -> usize {
        2 * self.domain.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn nodes_outer(&self) -> &[C64] {
        &self.nodes[..self.domain.m]
    }

    pub fn nodes_inner(&self) -> &[C64] {
        &self.nodes[self.domain.m..]
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    /// `ω^(k mod M)`.
    pub fn root(&self, k: i64) -> C64 {
        self.roots[k.rem_euclid(self.domain.m as i64) as usize]
    }

    /// Index of `1/λ_i`.
    pub fn reciprocal_index(&self, i: usize) -> usize {
        let m = self.domain.m;
        if i < m {
            i + m
        } else {
            i - m
        }
    }

    /// Index of `conj(λ_i)`.
    pub fn conjugate_index(&self, i: usize) -> usize {
        let m = self.domain.m;
        if i < m {
            (m - i) % m
        } else {
            m + (m - (i - m)) % m
        }
    }

    pub fn dist_min(&self) -> f64 {
        self.domain.dist_min()
    }

    /// `Σ f(λ_j) w_j`.
    pub fn contour_integral(&self, f: &GridFunction) -> C64 {
        f.values().iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Integral over the anticlockwise outer circle only.
    pub fn contour_integral_outer(&self, f: &GridFunction) -> C64 {
        let m = self.domain.m;
        f.values()[..m].iter().zip(&self.weights[..m]).map(|(v, w)| v * w).sum()
    }

    /// Samples `f` at every node.
    pub fn sample<F: FnMut(C64) -> C64>(&self, mut f: F) -> GridFunction {
        GridFunction::from_values(self.nodes.iter().map(|&z| f(z)).collect())
    }

    /// Unnormalized forward DFT: `X_k = Σ x_j ω^{-jk}`.
    pub(crate) fn fft_forward(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
    }

    /// Unnormalized inverse DFT: `x_j = Σ X_k ω^{jk}`.
    pub(crate) fn fft_inverse(&self, buf: &mut [C64]) {
        self.inv.process(buf);
    }
}
