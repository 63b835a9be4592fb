//! Finite operator sections built from a symbol, and the functions `φ_𝐚^(n)`.
//!
//! Matrices act on scaled coefficients (see [`crate::hardy`]). The output
//! window of `T(𝐚)` is `[-N, N]`; the input window is `[-s-N, -s+N]` where
//! `s` is the symbol's index shift, so that the section stays invertible
//! when `𝐚` winds.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::contour::ContourGrid;
use crate::hardy::{
    self, project_minus, scaled_monomial, synthesize_scaled_window, GridFunction, HardyError, LaurentVector, Spectrum,
};
use crate::symbol::{GroupElement, SymbolError, VectorSymbol};

pub const COND_MAX: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToeplitzError {
    #[error("Toeplitz section not invertible (condition estimate {cond:.3e})")]
    NotInvertible { cond: f64 },
    #[error("index {n} outside the truncation window")]
    OutOfWindow { n: i64 },
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    T,
    S,
    H,
    Composite,
}

/// Dense operator section on scaled coefficients.
///
/// For `S` the rows are grid nodes; for `H` the columns are grid nodes.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub entries: DMatrix<C64>,
    pub role: Role,
    pub in_lo: i64,
    pub out_lo: i64,
    /// Largest edge-to-peak ratio of the symbol's scaled coefficients.
    pub edge_ratio: f64,
    pub cond: Option<f64>,
}

fn symbol_edge_ratio(grid: &ContourGrid, a: &VectorSymbol) -> f64 {
    let n = grid.n() as i64;
    [&a.a1, &a.a2]
        .iter()
        .map(|f| {
            let s = Spectrum::of(grid, f);
            let peak = s.peak();
            if peak == 0.0 {
                0.0
            } else {
                s.scaled(n).norm().max(s.scaled(-n).norm()) / peak
            }
        })
        .fold(0.0, f64::max)
}

/// `T(𝐚)`: column `k` holds the scaled coefficients of `𝔭+(𝐚 ẑ_k)`.
pub fn build_t(grid: &ContourGrid, a: &VectorSymbol) -> OperatorMatrix {
    let n = grid.n() as i64;
    let in_lo = -a.shift - n;
    let dim = (2 * n + 1) as usize;
    let mut t = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let k = in_lo + c as i64;
        let f = a.apply(grid, &scaled_monomial(grid, k));
        let spec = Spectrum::of(grid, &f);
        for r in 0..dim {
            t[(r, c)] = spec.scaled(-n + r as i64);
        }
    }
    OperatorMatrix { entries: t, role: Role::T, in_lo, out_lo: -n, edge_ratio: symbol_edge_ratio(grid, a), cond: None }
}

/// As [`build_t`], failing when the symbol is not resolved by the truncation.
pub fn build_t_checked(grid: &ContourGrid, a: &VectorSymbol) -> Result<OperatorMatrix, ToeplitzError> {
    let t = build_t(grid, a);
    if t.edge_ratio > 1e-8 {
        return Err(HardyError::Truncation { ratio: t.edge_ratio }.into());
    }
    Ok(t)
}

/// `S_𝐚 u = 𝔭-(𝐚u)`, from scaled input coefficients to grid values.
pub fn build_s(grid: &ContourGrid, a: &VectorSymbol) -> OperatorMatrix {
    let n = grid.n() as i64;
    let in_lo = -a.shift - n;
    let dim = (2 * n + 1) as usize;
    let mut s = DMatrix::zeros(grid.len(), dim);
    for c in 0..dim {
        let f = project_minus(grid, &a.apply(grid, &scaled_monomial(grid, in_lo + c as i64)));
        s.set_column(c, &DVector::from_column_slice(f.values()));
    }
    OperatorMatrix { entries: s, role: Role::S, in_lo, out_lo: 0, edge_ratio: symbol_edge_ratio(grid, a), cond: None }
}

/// `H_g v = 𝔭+(gv)` on `H-` grid data through the smooth kernel
/// `(g(λ) − g(z))/(λ − z)`, with `g'(λ)` on the diagonal.
pub fn build_h(grid: &ContourGrid, g: &GroupElement) -> Result<OperatorMatrix, ToeplitzError> {
    let dmin = grid.dist_min();
    for &p in &g.poles {
        if grid.domain().dist_to_contour(p) < dmin {
            return Err(SymbolError::PoleHit { point: p }.into());
        }
    }
    let nodes = grid.nodes();
    let len = grid.len();
    let gv = g.sample(grid)?;
    let gd: Result<Vec<C64>, _> = nodes.iter().map(|&z| g.derivative(z)).collect();
    let gd = gd?;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let n = grid.n() as i64;
    let dim = (2 * n + 1) as usize;
    let mut h = DMatrix::zeros(dim, len);
    let mut col = GridFunction::zeros(len);
    for j in 0..len {
        let wj = grid.weights()[j] / two_pi_i;
        for i in 0..len {
            let k = if i == j { gd[j] } else { (gv.values()[j] - gv.values()[i]) / (nodes[j] - nodes[i]) };
            col.values_mut()[i] = k * wj;
        }
        let spec = Spectrum::of(grid, &col);
        for r in 0..dim {
            h[(r, j)] = spec.scaled(-n + r as i64);
        }
    }
    Ok(OperatorMatrix { entries: h, role: Role::H, in_lo: 0, out_lo: -n, edge_ratio: 0.0, cond: None })
}

/// Truncated multiplication by `g` on `[-N, N]`.
pub fn build_multiplication(grid: &ContourGrid, g: &GridFunction) -> OperatorMatrix {
    let n = grid.n() as i64;
    let dim = (2 * n + 1) as usize;
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let f = g * &scaled_monomial(grid, -n + c as i64);
        let spec = Spectrum::of(grid, &f);
        for r in 0..dim {
            m[(r, c)] = spec.scaled(-n + r as i64);
        }
    }
    OperatorMatrix { entries: m, role: Role::Composite, in_lo: -n, out_lo: -n, edge_ratio: 0.0, cond: None }
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// LU factorization of a `T` section with its 1-norm condition number.
#[derive(Debug, Clone)]
pub struct ToeplitzSolver {
    lu: LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    inverse: DMatrix<C64>,
    pub cond: f64,
    pub in_lo: i64,
    pub out_lo: i64,
}

impl ToeplitzSolver {
    pub fn new(t: &OperatorMatrix) -> Result<Self, ToeplitzError> {
        let lu = t.entries.clone().lu();
        let inverse = lu.try_inverse().ok_or(ToeplitzError::NotInvertible { cond: f64::INFINITY })?;
        let cond = norm1(&t.entries) * norm1(&inverse);
        if !(cond <= COND_MAX) {
            return Err(ToeplitzError::NotInvertible { cond });
        }
        Ok(Self { lu, inverse, cond, in_lo: t.in_lo, out_lo: t.out_lo })
    }

    pub fn dim(&self) -> usize {
        self.inverse.nrows()
    }

    pub fn solve_scaled(&self, rhs: &DVector<C64>) -> DVector<C64> {
        self.lu.solve(rhs).expect("factorization checked at construction")
    }

    /// Column `j` of `T⁻¹`.
    pub fn inverse_column(&self, j: usize) -> DVector<C64> {
        self.inverse.column(j).into_owned()
    }
}

/// `T u = rhs` on raw coefficients; returns `u` on the input window and the condition estimate.
pub fn solve_t(grid: &ContourGrid, t: &OperatorMatrix, rhs: &LaurentVector) -> Result<(LaurentVector, f64), ToeplitzError> {
    let solver = ToeplitzSolver::new(t)?;
    let r = grid.radius();
    let dim = solver.dim();
    let b = DVector::from_iterator(dim, (0..dim).map(|i| {
        let k = t.out_lo + i as i64;
        rhs.get(k) * r.powi(k.abs() as i32)
    }));
    let u = solver.solve_scaled(&b);
    Ok((LaurentVector::from_scaled(t.in_lo, u.as_slice(), r), solver.cond))
}

/// `φ_𝐚^(n) = 𝔭-(𝐚 T(𝐚)⁻¹ z^n)` held as grid data of an `H-` function.
#[derive(Debug, Clone)]
pub struct Phi {
    pub n: i64,
    pub values: GridFunction,
    pub cond: f64,
}

impl Phi {
    pub fn eval(&self, grid: &ContourGrid, zeta: C64) -> Result<C64, HardyError> {
        hardy::eval_hminus(grid, &self.values, zeta)
    }

    pub fn derivative(&self, grid: &ContourGrid, zeta: C64) -> Result<C64, HardyError> {
        hardy::eval_hminus_derivative(grid, &self.values, zeta)
    }

    pub fn at_zero(&self, grid: &ContourGrid) -> C64 {
        hardy::eval_hminus(grid, &self.values, C64::new(0.0, 0.0)).expect("origin lies in D-")
    }

    /// `lim_{z→∞} z φ(z)`, the `z⁻¹` coefficient of the outer data.
    pub fn limit_at_infinity(&self, grid: &ContourGrid) -> C64 {
        hardy::hminus_limit_at_infinity(grid, &self.values)
    }
}

/// A symbol together with the factorization of its section.
#[derive(Debug, Clone)]
pub struct SymbolSolver<'g> {
    pub grid: &'g ContourGrid,
    pub symbol: VectorSymbol,
    pub solver: ToeplitzSolver,
}

impl<'g> SymbolSolver<'g> {
    pub fn new(grid: &'g ContourGrid, symbol: &VectorSymbol) -> Result<Self, ToeplitzError> {
        let t = build_t(grid, symbol);
        let solver = ToeplitzSolver::new(&t)?;
        Ok(Self { grid, symbol: symbol.clone(), solver })
    }

    pub fn cond(&self) -> f64 {
        self.solver.cond
    }

    /// `𝐚 T(𝐚)⁻¹ z^n` on the grid, before projection.
    pub fn image_of_monomial(&self, n: i64) -> Result<GridFunction, ToeplitzError> {
        let nn = self.grid.n() as i64;
        if n.abs() > nn {
            return Err(ToeplitzError::OutOfWindow { n });
        }
        let dim = self.solver.dim();
        let mut rhs = DVector::zeros(dim);
        rhs[(n - self.solver.out_lo) as usize] = C64::new(self.grid.radius().powi(n.abs() as i32), 0.0);
        let u = self.solver.solve_scaled(&rhs);
        let ug = synthesize_scaled_window(self.grid, self.solver.in_lo, u.as_slice());
        Ok(self.symbol.apply(self.grid, &ug))
    }

    pub fn phi(&self, n: i64) -> Result<Phi, ToeplitzError> {
        let f = self.image_of_monomial(n)?;
        Ok(Phi { n, values: project_minus(self.grid, &f), cond: self.solver.cond })
    }
}

/// `φ_𝐚^(n)`.
pub fn phi_n(grid: &ContourGrid, a: &VectorSymbol, n: i64) -> Result<Phi, ToeplitzError> {
    SymbolSolver::new(grid, a)?.phi(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{m_from_q, JacobiCoefficients, Tail};
    use crate::symbol::msymbol_from_m;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn msym(grid: &ContourGrid) -> VectorSymbol {
        let q = JacobiCoefficients::from_fn(-1, 1, |n| (1.0 + 0.15 * n as f64, 0.2 - 0.1 * n as f64), Tail::default());
        msymbol_from_m(grid, &m_from_q(&q).unwrap()).unwrap().0
    }

    #[test]
    fn identity_symbol_gives_identity() {
        let g = ContourGrid::default_grid();
        let t = build_t(&g, &VectorSymbol::identity(&g));
        let id = DMatrix::<C64>::identity(t.entries.nrows(), t.entries.ncols());
        assert!((t.entries - id).camax() < 1e-13);
        let phi = phi_n(&g, &VectorSymbol::identity(&g), 2).unwrap();
        assert!(phi.values.max_abs() < 1e-12);
    }

    #[test]
    fn m_symbol_fixes_one_and_inverse_z() {
        let g = ContourGrid::default_grid();
        let t = build_t(&g, &msym(&g));
        let n = g.n() as i64;
        for k in [0, -1] {
            let col = t.entries.column((k + n) as usize);
            for (r, v) in col.iter().enumerate() {
                let want = if r as i64 - n == k { 1.0 } else { 0.0 };
                assert!((v - want).norm() < 1e-12, "k = {k}, row {r}");
            }
        }
        let (u, cond) = solve_t(&g, &t, &LaurentVector::monomial(-n, n, 0)).unwrap();
        assert!(cond < 1e6);
        assert!((u.get(0) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn solve_residual() {
        let g = ContourGrid::default_grid();
        let a = msym(&g).mul_group(&g, &GroupElement::exp_monomial(1, 0.3)).unwrap();
        let t = build_t(&g, &a);
        let n = g.n() as i64;
        let mut rhs = LaurentVector::zeros(-n, n);
        for k in -5..=5 {
            rhs.set(k, c(0.1 * k as f64, 1.0) / g.radius().powi(k.abs() as i32));
        }
        let (u, _) = solve_t(&g, &t, &rhs).unwrap();
        let r = g.radius();
        let us = DVector::from_vec(u.to_scaled(r));
        let bs = DVector::from_vec(rhs.to_scaled(r));
        let res = &t.entries * us - &bs;
        assert!(res.norm() <= 1e-9 * bs.norm());
    }

    #[test]
    fn singular_section_rejected() {
        let g = ContourGrid::default_grid();
        let zero = VectorSymbol::new(GridFunction::zeros(g.len()), GridFunction::zeros(g.len()), true);
        assert!(matches!(ToeplitzSolver::new(&build_t(&g, &zero)), Err(ToeplitzError::NotInvertible { .. })));
    }

    #[test]
    fn symmetric_multiplier_commutes() {
        let g = ContourGrid::default_grid();
        let mult = g.sample(|z| (0.3 * (z + 1.0 / z)).exp());
        let a = msym(&g);
        let ga = a.scale_by(&mult, 0, true);
        let lhs = build_t(&g, &ga).entries;
        let rhs = &build_t(&g, &a).entries * &build_multiplication(&g, &mult).entries;
        let n = g.n();
        let band = 20;
        let mut worst: f64 = 0.0;
        for r in n - band..=n + band {
            for col in n - band..=n + band {
                worst = worst.max((lhs[(r, col)] - rhs[(r, col)]).norm());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn m_symbol_phi_identities() {
        let g = ContourGrid::default_grid();
        let m = msym(&g);
        let p0 = phi_n(&g, &m, 0).unwrap();
        let pm1 = phi_n(&g, &m, -1).unwrap();
        for z in [c(4.0, 1.0), c(-5.0, -0.3), c(0.1, 0.2)] {
            let (m1, m2) = m.eval(z).unwrap();
            assert!((1.0 + p0.eval(&g, z).unwrap() - (m1 + m2 / z)).norm() < 1e-10);
            assert!((1.0 / z + pm1.eval(&g, z).unwrap() - (m1 / z + m2)).norm() < 1e-10);
        }
    }

    #[test]
    fn h_of_constant_is_zero() {
        let g = build_domain_small();
        let mut k = GroupElement::identity();
        k.scale = c(2.5, 0.0);
        let h = build_h(&g, &k).unwrap();
        assert!(h.entries.camax() < 1e-13);
    }

    fn build_domain_small() -> ContourGrid {
        crate::contour::build_domain(2.5, 3.0, 64, 16).unwrap()
    }

    #[test]
    fn h_of_q_zeta_evaluates_at_zeta() {
        let g = build_domain_small();
        let zeta = c(6.0, 1.0);
        let q = GroupElement::q_zeta(zeta);
        let h = build_h(&g, &q).unwrap();
        let w = c(0.7, 0.4);
        let v = g.sample(|z| 1.0 / (z - w));
        let hv = &h.entries * DVector::from_column_slice(v.values());
        let vz = 1.0 / (zeta - w);
        let n = g.n() as i64;
        // q_ζ⁻¹ H v = v(ζ), i.e. H v = v(ζ) q_ζ
        let want = hardy::analyze(&g, &g.sample(|z| vz * q.eval(z).unwrap()));
        for k in -n..=n {
            let got = hv[(k + n) as usize] / g.radius().powi(k.abs() as i32);
            assert!((got - want.get(k)).norm() < 1e-10, "k = {k} err {}", (got - want.get(k)).norm());
        }
        let sv = nalgebra::linalg::SVD::new(h.entries.clone(), false, false).singular_values;
        assert!(sv[1] < 1e-10 * sv[0]);
    }
}
