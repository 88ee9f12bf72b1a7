//! Discrete Dirichlet problems: damped Newton minimization of convex cell
//! energies and a 5-point solver for linear equations in coefficient-field
//! form, both backed by a symmetric band Cholesky factorization.
//!
//! Lexicographic node ordering keeps the bandwidth near one lattice row, so
//! a dense band factorization is the right sparse-direct tool here. A
//! nonpositive pivot surfaces as `NonConvexDetected` (nonlinear path) or
//! `SingularSystem` (linear path).

use std::sync::Arc;
use std::time::Instant;

use crate::grid::{CoefficientField, Grid, ScalarField, CELL_GAUSS};
use crate::integrand::Integrand;
use crate::vec2::{SymMat2, Vec2};
use crate::{Error, Result};

/// Symmetric positive definite band matrix, lower band stored row-major.
pub struct BandMatrix {
    n: usize,
    bw: usize,
    /// `data[i*(bw+1) + (j - i + bw)]` holds `A[i][j]` for `i-bw <= j <= i`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, bw: usize) -> Self {
        BandMatrix { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(j <= i && i - j <= self.bw);
        &mut self.data[i * (self.bw + 1) + (j + self.bw - i)]
    }

    /// Accumulate a symmetric entry (callers pass each unordered pair once).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        *self.at(i, j) += v;
    }

    /// In-place Cholesky; returns the offending dof on a nonpositive pivot.
    pub fn cholesky(&mut self) -> std::result::Result<(), usize> {
        let w = self.bw + 1;
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(self.bw));
                let mut sum = self.data[i * w + (j + self.bw - i)];
                for k in k0..j {
                    sum -= self.data[i * w + (k + self.bw - i)] * self.data[j * w + (k + self.bw - j)];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(i);
                    }
                    self.data[i * w + self.bw] = sum.sqrt();
                } else {
                    self.data[i * w + (j + self.bw - i)] = sum / self.data[j * w + self.bw];
                }
            }
        }
        Ok(())
    }

    /// Solve `L L^T x = b` after [`BandMatrix::cholesky`].
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let w = self.bw + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let mut sum = x[i];
            for j in j0..i {
                sum -= self.data[i * w + (j + self.bw - i)] * x[j];
            }
            x[i] = sum / self.data[i * w + self.bw];
        }
        for i in (0..self.n).rev() {
            let mut sum = x[i];
            let jmax = (i + self.bw).min(self.n - 1);
            for j in i + 1..=jmax {
                sum -= self.data[j * w + (i + self.bw - j)] * x[j];
            }
            x[i] = sum / self.data[i * w + self.bw];
        }
        x
    }
}

/// Newton iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    /// Stop when the Newton decrement falls below `tol_decrement * (1 + |E|)`.
    pub tol_decrement: f64,
    /// Stop only once the weak-form residual max-norm is below this.
    pub tol_residual: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub max_halvings: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings { tol_decrement: 1e-10, tol_residual: 1e-8, max_iter: 100, armijo: 1e-4, max_halvings: 60 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    /// One identity-coefficient linear solve with the same boundary data.
    HarmonicExtension,
    /// Boundary data on the boundary, zero inside.
    ZeroExtension,
}

/// A Dirichlet problem: either nonlinear (integrand) or linear (coefficient field).
pub struct DirichletProblem {
    pub grid: Arc<Grid>,
    pub op: ProblemOp,
    /// Full-length nodal vector; only boundary entries are read.
    pub boundary_values: Vec<f64>,
}

pub enum ProblemOp {
    Minimize(Integrand),
    Linear(CoefficientField),
}

impl DirichletProblem {
    pub fn nonlinear(grid: &Arc<Grid>, f: Integrand, data: &ScalarField) -> Result<Self> {
        Self::check_data(grid, data)?;
        Ok(DirichletProblem { grid: grid.clone(), op: ProblemOp::Minimize(f), boundary_values: data.values.clone() })
    }

    pub fn linear(grid: &Arc<Grid>, a: CoefficientField, data: &ScalarField) -> Result<Self> {
        Self::check_data(grid, data)?;
        a.validate()?;
        Ok(DirichletProblem { grid: grid.clone(), op: ProblemOp::Linear(a), boundary_values: data.values.clone() })
    }

    fn check_data(grid: &Arc<Grid>, data: &ScalarField) -> Result<()> {
        if data.values.len() != grid.node_count() {
            return Err(Error::PreconditionViolated(format!(
                "boundary data field has {} nodes, grid has {}",
                data.values.len(),
                grid.node_count()
            )));
        }
        if data.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::PreconditionViolated("boundary data must be finite".into()));
        }
        Ok(())
    }
}

/// Outcome record of a solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_energy: f64,
    pub residual_norm: f64,
    pub decrement_history: Vec<f64>,
    pub wall_seconds: f64,
    /// `max(interior max - boundary max, boundary min - interior min)`,
    /// recorded by the linear solver (negative means the maximum principle held).
    pub max_principle_margin: Option<f64>,
}

struct Dofs {
    /// node id -> dof index (interior nodes only)
    of_node: Vec<Option<u32>>,
    nodes: Vec<u32>,
    bandwidth: usize,
}

fn number_dofs(grid: &Grid) -> Dofs {
    let mut of_node = vec![None; grid.node_count()];
    let mut nodes = Vec::new();
    for i in grid.interior_nodes() {
        of_node[i] = Some(nodes.len() as u32);
        nodes.push(i as u32);
    }
    let mut bandwidth = 0usize;
    for cell in &grid.cells {
        let dofs: Vec<u32> = cell.iter().filter_map(|&nid| of_node[nid as usize]).collect();
        for a in &dofs {
            for b in &dofs {
                bandwidth = bandwidth.max((*a as i64 - *b as i64).unsigned_abs() as usize);
            }
        }
    }
    for (i, nb) in grid.neighbors.iter().enumerate() {
        if let Some(di) = of_node[i] {
            for j in nb.iter().flatten() {
                if let Some(dj) = of_node[*j as usize] {
                    bandwidth = bandwidth.max((di as i64 - dj as i64).unsigned_abs() as usize);
                }
            }
        }
    }
    Dofs { of_node, nodes, bandwidth }
}

fn shape_grads(h: f64, fx: f64, fy: f64) -> [Vec2; 4] {
    [
        Vec2::new(-(1.0 - fy) / h, -(1.0 - fx) / h), // sw
        Vec2::new((1.0 - fy) / h, -fx / h),          // se
        Vec2::new(-fy / h, (1.0 - fx) / h),          // nw
        Vec2::new(fy / h, fx / h),                   // ne
    ]
}

/// Discrete energy `sum_cells sum_gp w F(grad u)` over the whole cell union.
pub fn discrete_energy(u: &ScalarField, f: &Integrand) -> Result<f64> {
    let w = u.grid.h * u.grid.h / 4.0;
    let mut acc = 0.0;
    for c in 0..u.grid.cells.len() as u32 {
        for &(fx, fy) in CELL_GAUSS.iter() {
            acc += w * f.value(u.gradient_at(c, fx, fy))?;
        }
    }
    Ok(acc)
}

/// Weak-form residual vector (energy gradient) of `u`; full nodal length,
/// boundary entries zeroed.
fn weak_residual(u: &ScalarField, f: &Integrand) -> Result<Vec<f64>> {
    let grid = &u.grid;
    let w = grid.h * grid.h / 4.0;
    let mut g = vec![0.0; grid.node_count()];
    for (ci, cell) in grid.cells.iter().enumerate() {
        for &(fx, fy) in CELL_GAUSS.iter() {
            let grad = u.gradient_at(ci as u32, fx, fy);
            let df = f.evaluate(grad)?.gradient;
            let phi = shape_grads(grid.h, fx, fy);
            for (k, &nid) in cell.iter().enumerate() {
                g[nid as usize] += w * phi[k].dot(df);
            }
        }
    }
    for (i, gi) in g.iter_mut().enumerate() {
        if grid.boundary[i] {
            *gi = 0.0;
        }
    }
    Ok(g)
}

/// Max over interior nodes of the weak-form residual of `div(dF(grad u)) = 0`.
pub fn el_residual(u: &ScalarField, f: &Integrand) -> Result<f64> {
    let g = weak_residual(u, f)?;
    Ok(g.iter().fold(0.0_f64, |m, &v| m.max(v.abs())))
}

/// Weak residual of the differentiated equation
/// `div(d2F(grad u) grad(d_s u)) = 0` with frozen coefficients, the nodal
/// `d_s u` recovered by cell averaging. Reported, not asserted.
pub fn differentiated_el_check(u: &ScalarField, f: &Integrand, s: usize) -> Result<f64> {
    if s > 1 {
        return Err(Error::PreconditionViolated(format!("direction index must be 0 or 1, got {s}")));
    }
    let grid = &u.grid;
    let grad = u.gradient();
    let (nodal, _) = grad.to_nodal();
    let ws = ScalarField {
        grid: grid.clone(),
        values: nodal.iter().map(|v| if s == 0 { v.x } else { v.y }).collect(),
    };
    let w = grid.h * grid.h / 4.0;
    let mut r = vec![0.0; grid.node_count()];
    for (ci, cell) in grid.cells.iter().enumerate() {
        for &(fx, fy) in CELL_GAUSS.iter() {
            let a = f.evaluate(u.gradient_at(ci as u32, fx, fy))?.hessian;
            let gw = ws.gradient_at(ci as u32, fx, fy);
            let flux = a.apply(gw);
            let phi = shape_grads(grid.h, fx, fy);
            for (k, &nid) in cell.iter().enumerate() {
                r[nid as usize] += w * phi[k].dot(flux);
            }
        }
    }
    let mut worst = 0.0_f64;
    for i in grid.interior_nodes() {
        worst = worst.max(r[i].abs());
    }
    Ok(worst)
}

/// Minimize the discrete energy by damped Newton with Armijo backtracking.
///
/// The returned field matches the boundary data exactly on boundary nodes;
/// on success the Newton decrement and weak residual are below tolerance.
pub fn minimize(problem: &DirichletProblem, settings: &NewtonSettings, guess: InitialGuess) -> Result<(ScalarField, SolveReport)> {
    let start = Instant::now();
    let f = match &problem.op {
        ProblemOp::Minimize(f) => f,
        ProblemOp::Linear(_) => {
            return Err(Error::PreconditionViolated("minimize called on a linear problem".into()))
        }
    };
    if !f.params().regularized_mode() {
        return Err(Error::PreconditionViolated(
            "minimize requires a q-growth ellipticity floor (nu_tilde > 0); regularize the integrand first".into(),
        ));
    }
    let grid = &problem.grid;
    let dofs = number_dofs(grid);
    let ndof = dofs.nodes.len();
    if ndof == 0 {
        return Err(Error::PreconditionViolated("no interior nodes".into()));
    }

    let mut u = match guess {
        InitialGuess::ZeroExtension => {
            let mut vals = vec![0.0; grid.node_count()];
            for (i, v) in vals.iter_mut().enumerate() {
                if grid.boundary[i] {
                    *v = problem.boundary_values[i];
                }
            }
            ScalarField { grid: grid.clone(), values: vals }
        }
        InitialGuess::HarmonicExtension => {
            let id = CoefficientField::constant(grid, SymMat2::identity(), 1.0, 1.0)?;
            let data = ScalarField { grid: grid.clone(), values: problem.boundary_values.clone() };
            let lin = DirichletProblem::linear(grid, id, &data)?;
            solve_linear(&lin)?.0
        }
    };

    let w = grid.h * grid.h / 4.0;
    let mut decrements = Vec::new();
    let mut energy = discrete_energy(&u, f)?;
    for iter in 0..settings.max_iter {
        // assemble gradient and Hessian at u
        let mut g = vec![0.0; ndof];
        let mut k = BandMatrix::new(ndof, dofs.bandwidth);
        for (ci, cell) in grid.cells.iter().enumerate() {
            for &(fx, fy) in CELL_GAUSS.iter() {
                let e = f.evaluate(u.gradient_at(ci as u32, fx, fy))?;
                let phi = shape_grads(grid.h, fx, fy);
                for (a, &na) in cell.iter().enumerate() {
                    if let Some(da) = dofs.of_node[na as usize] {
                        g[da as usize] += w * phi[a].dot(e.gradient);
                        for (b, &nb) in cell.iter().enumerate() {
                            if let Some(db) = dofs.of_node[nb as usize] {
                                if db <= da {
                                    k.add(da as usize, db as usize, w * phi[a].dot(e.hessian.apply(phi[b])));
                                }
                            }
                        }
                    }
                }
            }
        }
        let residual = g.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        k.cholesky().map_err(|dof| Error::NonConvexDetected { dof })?;
        let neg_d = k.solve(&g); // direction is -neg_d
        let decrement: f64 = g.iter().zip(&neg_d).map(|(a, b)| a * b).sum();
        decrements.push(decrement);

        if residual <= settings.tol_residual && decrement.abs() / 2.0 <= settings.tol_decrement * (1.0 + energy.abs()) {
            return Ok((
                u,
                SolveReport {
                    iterations: iter,
                    final_energy: energy,
                    residual_norm: residual,
                    decrement_history: decrements,
                    wall_seconds: start.elapsed().as_secs_f64(),
                    max_principle_margin: None,
                },
            ));
        }

        // Once the predicted decrease drops below the rounding floor of the
        // energy, the sufficient-decrease test is unmeasurable in f64; the
        // full Newton step still contracts the residual quadratically, so
        // take it unguarded. Otherwise Armijo backtracking.
        let floor = 64.0 * f64::EPSILON * (1.0 + energy.abs());
        if decrement.abs() <= floor {
            for (di, &nid) in dofs.nodes.iter().enumerate() {
                u.values[nid as usize] -= neg_d[di];
            }
            energy = discrete_energy(&u, f)?;
        } else {
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=settings.max_halvings {
                let mut trial = u.clone();
                for (di, &nid) in dofs.nodes.iter().enumerate() {
                    trial.values[nid as usize] -= t * neg_d[di];
                }
                let e_trial = discrete_energy(&trial, f)?;
                if e_trial <= energy - settings.armijo * t * decrement {
                    u = trial;
                    energy = e_trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(Error::MaxIterations { iters: iter, residual });
            }
        }
    }
    let residual = el_residual(&u, f)?;
    Err(Error::MaxIterations { iters: settings.max_iter, residual })
}

/// Solve the linear Dirichlet problem.
///
/// Diagonal coefficient fields use the 5-point stencil with harmonic-mean
/// edge coefficients (an M-matrix, so the discrete maximum principle holds);
/// full-matrix fields fall back to the bilinear-cell weak form and the
/// maximum-principle margin is reported without a guarantee.
pub fn solve_linear(problem: &DirichletProblem) -> Result<(ScalarField, SolveReport)> {
    let start = Instant::now();
    let a = match &problem.op {
        ProblemOp::Linear(a) => a,
        ProblemOp::Minimize(_) => {
            return Err(Error::PreconditionViolated("solve_linear called on a nonlinear problem".into()))
        }
    };
    let grid = &problem.grid;
    let dofs = number_dofs(grid);
    let ndof = dofs.nodes.len();
    if ndof == 0 {
        return Err(Error::PreconditionViolated("no interior nodes".into()));
    }
    let mut k = BandMatrix::new(ndof, dofs.bandwidth);
    let mut rhs = vec![0.0; ndof];

    if a.is_diagonal() {
        // 5-point stencil, one equation per interior node
        let bval = &problem.boundary_values;
        let hm = |x: f64, y: f64| 2.0 * x * y / (x + y);
        for (di, &nid) in dofs.nodes.iter().enumerate() {
            let i = nid as usize;
            for (dir, &nb) in grid.neighbors[i].iter().enumerate() {
                let j = nb.ok_or(Error::SingularSystem { dof: di })? as usize;
                let coef = if dir < 2 {
                    hm(a.mats[i].a11, a.mats[j].a11)
                } else {
                    hm(a.mats[i].a22, a.mats[j].a22)
                };
                k.add(di, di, coef);
                match dofs.of_node[j] {
                    Some(dj) => {
                        if dj as usize <= di {
                            k.add(di, dj as usize, -coef);
                        }
                    }
                    None => rhs[di] += coef * bval[j],
                }
            }
        }
    } else {
        // bilinear-cell weak form with coefficients interpolated at Gauss points
        let w = grid.h * grid.h / 4.0;
        for (ci, cell) in grid.cells.iter().enumerate() {
            for &(fx, fy) in CELL_GAUSS.iter() {
                let m = interp_mat(a, ci as u32, fx, fy);
                let phi = shape_grads(grid.h, fx, fy);
                for (p, &np) in cell.iter().enumerate() {
                    let Some(dp) = dofs.of_node[np as usize] else { continue };
                    for (qn, &nq) in cell.iter().enumerate() {
                        let kv = w * phi[p].dot(m.apply(phi[qn]));
                        match dofs.of_node[nq as usize] {
                            Some(dq) => {
                                if dq <= dp {
                                    k.add(dp as usize, dq as usize, kv);
                                }
                            }
                            None => rhs[dp as usize] -= kv * problem.boundary_values[nq as usize],
                        }
                    }
                }
            }
        }
    }

    k.cholesky().map_err(|dof| Error::SingularSystem { dof })?;
    let x = k.solve(&rhs);

    let mut values = problem.boundary_values.clone();
    for (i, v) in values.iter_mut().enumerate() {
        if !grid.boundary[i] {
            *v = 0.0;
        }
    }
    for (di, &nid) in dofs.nodes.iter().enumerate() {
        values[nid as usize] = x[di];
    }
    let u = ScalarField { grid: grid.clone(), values };

    let (mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut imin, mut imax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &v) in u.values.iter().enumerate() {
        if grid.boundary[i] {
            bmin = bmin.min(v);
            bmax = bmax.max(v);
        } else {
            imin = imin.min(v);
            imax = imax.max(v);
        }
    }
    let margin = (imax - bmax).max(bmin - imin);

    Ok((
        u,
        SolveReport {
            iterations: 1,
            final_energy: 0.0,
            residual_norm: 0.0,
            decrement_history: Vec::new(),
            wall_seconds: start.elapsed().as_secs_f64(),
            max_principle_margin: Some(margin),
        },
    ))
}

fn interp_mat(a: &CoefficientField, cell: u32, fx: f64, fy: f64) -> SymMat2 {
    let [sw, se, nw, ne] = a.grid.cells[cell as usize];
    let m = &a.mats;
    m[sw as usize] * ((1.0 - fx) * (1.0 - fy))
        + m[se as usize] * (fx * (1.0 - fy))
        + m[nw as usize] * ((1.0 - fx) * fy)
        + m[ne as usize] * (fx * fy)
}

/// Frozen-coefficient field `d2F(grad u)` at nodes (gradients recovered by
/// cell averaging), with the per-node ellipticity interval implied by the
/// integrand's declared constants.
pub fn frozen_coefficients(u: &ScalarField, f: &Integrand) -> Result<CoefficientField> {
    let (nodal, _) = u.gradient().to_nodal();
    let gp = f.params();
    let mut mats = Vec::with_capacity(u.grid.node_count());
    let mut nu = f64::INFINITY;
    let mut lam: f64 = 0.0;
    for g in &nodal {
        let e = f.evaluate(*g)?;
        let (lo, hi) = e.hessian.eigenvalues();
        nu = nu.min(lo);
        lam = lam.max(hi);
        mats.push(e.hessian);
    }
    CoefficientField { grid: u.grid.clone(), mats, nu: nu.min(gp.nu), lambda_up: lam.max(gp.lambda_up) }.validate_ok()
}

impl CoefficientField {
    fn validate_ok(self) -> Result<CoefficientField> {
        self.validate()?;
        Ok(self)
    }
}
