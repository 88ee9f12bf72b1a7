//! Every inequality of interest as a measurable check: the 1-D
//! interpolation estimate, circle-slice picking, the hole-filling iteration
//! lemma with its explicit constant, the L-infinity/L2 contrast estimate and
//! its sharpness scan, Caccioppoli, and the Lipschitz bound with exponent
//! `2/(3p-q)`.
//!
//! Implied constants are measured, not derived; budgets are frozen at 10x
//! the maximum observed on the reference suite (see [`budgets`]).

use std::sync::Arc;

use crate::grid::{CoefficientField, DomainSpec, Grid, ScalarField, Subdomain};
use crate::integrand::{e_mu_scalar, Integrand};
use crate::params::GrowthParams;
use crate::solver::{solve_linear, DirichletProblem};
use crate::vec2::{SymMat2, Vec2};
use crate::{Error, Result};

/// Frozen constant budgets for the measured implied constants.
///
/// Each budget is 10x the maximum observed on the reference suite (random
/// band-limited fields, the bundled minimizers, and the linear sweeps run at
/// the shipped seeds and resolutions). A check that lands above its budget
/// signals a regression, not a sharper theorem.
pub mod budgets {
    /// 1-D interpolation carries the explicit constant sqrt(2).
    pub const INTERPOLATION_1D: f64 = std::f64::consts::SQRT_2;
    /// Slice pick: max observed 0.66 (constant fields and the random-field
    /// suite at n = 64..128, seeds 0..50).
    pub const SLICE_PICK: f64 = 6.6;
    /// Contrast ratio / Lambda^{1/4}: max observed 1.48 over 200 random
    /// diagonal solves, Lambda up to 1e3, n = 64..128.
    pub const PROP2_RATIO: f64 = 14.8;
    /// Caccioppoli: max observed 0.66 on the reference minimizer (n = 128..256).
    pub const CACCIOPPOLI: f64 = 6.6;
    /// Lipschitz estimate: max observed 1.23 over the bundled amplitude
    /// sweep (p = 2, q in 3..5) at n = 64.
    pub const THEOREM1: f64 = 12.3;
}

/// Measured left/right sides of an inequality plus the implied constant and
/// a verdict against the configured budget.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs divided by the constant-free right-hand side.
    pub implied_constant: f64,
    pub budget: f64,
    pub pass: bool,
    /// Parameter echo (name, value).
    pub params: Vec<(String, f64)>,
    /// Where every input field came from.
    pub provenance: String,
}

impl EstimateReport {
    fn finite(&self) -> bool {
        self.lhs.is_finite() && self.rhs.is_finite() && self.implied_constant.is_finite()
    }

    pub fn assert_invariants(&self) {
        assert!(self.finite(), "estimate report has non-finite entries: {self:?}");
        assert!(self.lhs >= 0.0 && self.rhs >= 0.0);
        assert_eq!(self.pass, self.implied_constant <= self.budget);
    }
}

/// Least-squares slope of log(value) against log(scale).
#[derive(Debug, Clone)]
pub struct ExponentFit {
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Two standard errors of the slope.
    pub half_width: f64,
}

pub fn exponent_fit(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    if pairs.len() < 3 {
        return Err(Error::TooFewSamples { got: pairs.len(), need: 3 });
    }
    if pairs.iter().any(|&(s, v)| !(s > 0.0) || !(v > 0.0)) {
        return Err(Error::PreconditionViolated("exponent fit needs positive scales and values".into()));
    }
    let logs: Vec<(f64, f64)> = pairs.iter().map(|&(s, v)| (s.ln(), v.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx < 1e-24 {
        return Err(Error::DegenerateAbscissa);
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let residual = if logs.len() > 2 { (ss_res / (n - 2.0)).sqrt() } else { 0.0 };
    let half_width = 2.0 * residual / sxx.sqrt();
    Ok(ExponentFit { pairs: pairs.to_vec(), slope, intercept, residual, half_width })
}

/// 1-D interpolation estimate on uniformly spaced samples: the sup distance
/// to the mean against sqrt(2) times the geometric mean of the L2 distance
/// and the L2 norm of the difference-quotient derivative.
pub fn check_interpolation_1d(samples: &[f64], h: f64) -> Result<EstimateReport> {
    if samples.len() < 8 {
        return Err(Error::TooFewSamples { got: samples.len(), need: 8 });
    }
    if !(h > 0.0) {
        return Err(Error::PreconditionViolated(format!("sample spacing must be positive, got {h}")));
    }
    let n = samples.len();
    let length = (n - 1) as f64 * h;
    let trapz: f64 = h * (samples.iter().sum::<f64>() - (samples[0] + samples[n - 1]) / 2.0);
    let mean = trapz / length;
    let sup = samples.iter().fold(0.0_f64, |m, &v| m.max((v - mean).abs()));
    let l2_sq = h * {
        let sq: Vec<f64> = samples.iter().map(|&v| (v - mean) * (v - mean)).collect();
        sq.iter().sum::<f64>() - (sq[0] + sq[n - 1]) / 2.0
    };
    let d2_sq: f64 = h * samples.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2)).sum::<f64>();
    let denom = l2_sq.max(0.0).sqrt().sqrt() * d2_sq.sqrt().sqrt();
    let allowance = 1e-8;
    let rhs = budgets::INTERPOLATION_1D * denom + allowance;
    let implied = ratio0(sup, denom);
    Ok(EstimateReport {
        name: "interpolation-1d".into(),
        lhs: sup,
        rhs,
        implied_constant: implied,
        budget: budgets::INTERPOLATION_1D * (1.0 + 1e-9) + allowance,
        pass: sup <= rhs,
        params: vec![("h".into(), h), ("samples".into(), n as f64)],
        provenance: "uniform samples; trapezoid norms, forward differences".into(),
    })
}

/// Slice pick: the smallest circle sup over radii in (rho, sigma) against
/// the annulus L2 norms, constant normalized by (sigma - rho)^{-1/2}.
pub fn check_slice_pick(u: &ScalarField, rho: f64, sigma: f64) -> Result<EstimateReport> {
    let r_grid = u.grid.domain.radius();
    if !(rho >= 0.25 * r_grid && rho < sigma && sigma < r_grid) {
        return Err(Error::PreconditionViolated(format!(
            "slice pick needs R/4 <= rho < sigma < R, got ({rho}, {sigma}) with R = {r_grid}"
        )));
    }
    let (_, lhs) = u.min_circle_sup(rho, sigma, 64)?;
    let ann = Subdomain::Annulus { center: u.grid.domain.center(), inner: rho, outer: sigma };
    let l2 = u.lp_norm(2.0, &ann)?;
    let grad_l2 = u.gradient().integral_of(&ann, |v| v.norm_sq())?.sqrt();
    let denom = (l2 + (l2 * grad_l2).sqrt()) / (sigma - rho).sqrt();
    let implied = ratio0(lhs, denom);
    Ok(EstimateReport {
        name: "slice-pick".into(),
        lhs,
        rhs: denom,
        implied_constant: implied,
        budget: budgets::SLICE_PICK,
        pass: implied <= budgets::SLICE_PICK,
        params: vec![("rho".into(), rho), ("sigma".into(), sigma)],
        provenance: "radius scan of 64 midpoints; annulus norms by sub-sampled quadrature".into(),
    })
}

/// Explicit constant of the hole-filling iteration lemma, with optional
/// verification against a concrete `Z`.
///
/// Uses `lambda = theta^{1/(2 alpha)}`, so `theta lambda^{-alpha} = sqrt(theta)`
/// and `c = (1 - lambda)^{-alpha} / (1 - sqrt(theta))`. With a `Z` supplied,
/// the hypothesis is sampled along the geometric radius chain and the
/// conclusion `Z(rho) <= c((sigma-rho)^{-alpha} A + B)` is checked directly.
pub fn hole_filling(
    theta: f64,
    alpha: f64,
    a_coef: f64,
    b_coef: f64,
    rho: f64,
    sigma: f64,
    z: Option<&dyn Fn(f64) -> f64>,
) -> Result<(f64, bool)> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidTheta { theta });
    }
    if !(alpha > 0.0) || a_coef < 0.0 || b_coef < 0.0 || !(rho < sigma) {
        return Err(Error::PreconditionViolated(format!(
            "hole filling needs alpha > 0, A, B >= 0, rho < sigma (got alpha={alpha}, A={a_coef}, B={b_coef}, [{rho}, {sigma}])"
        )));
    }
    let c = if theta == 0.0 {
        1.0
    } else {
        let lambda = theta.powf(1.0 / (2.0 * alpha));
        (1.0 - lambda).powf(-alpha) / (1.0 - theta.sqrt())
    };
    let verified = match z {
        None => true,
        Some(zf) => {
            let lambda = if theta == 0.0 { 0.5 } else { theta.powf(1.0 / (2.0 * alpha)) };
            let gap = sigma - rho;
            let mut hypothesis_ok = true;
            let mut t = rho;
            for i in 0..50 {
                let d = (1.0 - lambda) * lambda.powi(i) * gap;
                let t_next = (t + d).min(sigma);
                let bound = theta * zf(t_next) + d.powf(-alpha) * a_coef + b_coef;
                if zf(t) > bound * (1.0 + 1e-9) + 1e-12 {
                    hypothesis_ok = false;
                    break;
                }
                t = t_next;
            }
            let conclusion = zf(rho) <= c * (gap.powf(-alpha) * a_coef + b_coef) * (1.0 + 1e-9) + 1e-12;
            hypothesis_ok && conclusion
        }
    };
    Ok((c, verified))
}

/// `sup_{B_{R/2}} v` divided by the mean-square norm of the positive part
/// over the full disc.
pub fn linfty_l2_ratio(v: &ScalarField) -> Result<f64> {
    let center = v.grid.domain.center();
    let radius = v.grid.domain.radius();
    let sup = v.sup_on(&Subdomain::Disc { center, radius: radius / 2.0 })?;
    let quad = crate::grid::subdomain_quad(&v.grid, &Subdomain::All)?;
    let int_pos_sq = v.integral_of(&Subdomain::All, |t| {
        let p = t.max(0.0);
        p * p
    })?;
    let mean = int_pos_sq / quad.area;
    if mean <= 0.0 {
        return Err(Error::ZeroPositivePart);
    }
    Ok(sup / mean.sqrt())
}

/// One row of the sharpness scan.
#[derive(Debug, Clone)]
pub struct Prop2Row {
    pub lambda: f64,
    /// Ratio from the quadratic reconstruction (continuum-faithful).
    pub ratio: f64,
    /// Ratio straight from the nodal field (bilinear sub-sampled quadrature).
    pub field_ratio: f64,
    /// Max-norm error of the solved field against the exact quadratic.
    pub reproduction_err: f64,
    /// Max-norm residual of the quadratic reconstruction.
    pub fit_residual: f64,
}

/// Sharpness scan: for each contrast `Lambda`, solve the linear problem with
/// coefficients diag(1, Lambda) and boundary data `1 + y^2 - Lambda x^2`,
/// measure the L-infinity/L2 ratio, and fit the log-log slope (the estimate
/// of the contrast exponent, sharp value 1/4).
///
/// The 5-point stencil is exact for this data, so the solved nodal field
/// determines the quadratic globally; the ratio is evaluated on the
/// reconstructed quadratic by per-angle root-split quadrature, which removes
/// the positive-part resolution bias that a fixed bilinear quadrature has
/// once the strip width `~Lambda^{-1/2}` falls under the cell size. The raw
/// field ratio is recorded alongside.
pub fn prop2_scan(lambdas: &[f64], resolution: usize) -> Result<(ExponentFit, Vec<Prop2Row>)> {
    if lambdas.len() < 3 {
        return Err(Error::TooFewSamples { got: lambdas.len(), need: 3 });
    }
    if lambdas.iter().any(|&l| l < 1.0) {
        return Err(Error::PreconditionViolated("contrast scan needs Lambda >= 1".into()));
    }
    let grid = Grid::build(DomainSpec::unit_disc(), resolution)?;
    let mut rows = Vec::new();
    for &lambda in lambdas {
        rows.push(prop2_instance(&grid, lambda)?);
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda, r.ratio)).collect();
    let fit = exponent_fit(&pairs)?;
    Ok((fit, rows))
}

/// Solve one contrast instance and measure both ratios.
pub fn prop2_instance(grid: &Arc<Grid>, lambda: f64) -> Result<Prop2Row> {
    let exact = |p: Vec2| 1.0 + p.y * p.y - lambda * p.x * p.x;
    let data = ScalarField::from_fn(grid, exact);
    let a = CoefficientField::constant(grid, SymMat2::diag(1.0, lambda), 1.0, lambda)?;
    let prob = DirichletProblem::linear(grid, a, &data)?;
    let (u, _) = solve_linear(&prob)?;
    let scale = 1.0 + lambda;
    let reproduction_err = u
        .values
        .iter()
        .zip(&grid.nodes)
        .fold(0.0_f64, |m, (v, n)| m.max((v - exact(n.pos)).abs()));
    if reproduction_err > 1e-8 * scale {
        return Err(Error::PreconditionViolated(format!(
            "stencil exactness lost at Lambda = {lambda}: reproduction error {reproduction_err}"
        )));
    }
    let (coef, fit_residual) = fit_quadratic(&u)?;
    let sup = quadratic_sup_on_disc(&coef, Vec2::ZERO, 0.5);
    let mean_pos_sq = quadratic_pos_sq_mean(&coef, 1.0);
    if mean_pos_sq <= 0.0 {
        return Err(Error::ZeroPositivePart);
    }
    let ratio = sup / mean_pos_sq.sqrt();
    let field_ratio = linfty_l2_ratio(&u)?;
    Ok(Prop2Row { lambda, ratio, field_ratio, reproduction_err, fit_residual })
}

/// Least-squares quadratic `c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2`
/// through the nodal values; returns coefficients and max nodal residual.
pub fn fit_quadratic(u: &ScalarField) -> Result<([f64; 6], f64)> {
    let mut a = [[0.0_f64; 6]; 6];
    let mut b = [0.0_f64; 6];
    let basis = |p: Vec2| [1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y];
    for (n, &v) in u.grid.nodes.iter().zip(&u.values) {
        let phi = basis(n.pos);
        for i in 0..6 {
            for j in 0..6 {
                a[i][j] += phi[i] * phi[j];
            }
            b[i] += phi[i] * v;
        }
    }
    let coef = solve6(a, b).ok_or(Error::SingularSystem { dof: 0 })?;
    let res = u
        .grid
        .nodes
        .iter()
        .zip(&u.values)
        .fold(0.0_f64, |m, (n, &v)| {
            let phi = basis(n.pos);
            let q: f64 = (0..6).map(|i| coef[i] * phi[i]).sum();
            m.max((q - v).abs())
        });
    Ok((coef, res))
}

fn solve6(mut a: [[f64; 6]; 6], mut b: [f64; 6]) -> Option<[f64; 6]> {
    for col in 0..6 {
        let piv = (col..6).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..6 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 6];
    for row in (0..6).rev() {
        let mut s = b[row];
        for k in row + 1..6 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

pub fn quadratic_eval(c: &[f64; 6], p: Vec2) -> f64 {
    c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y
}

/// Supremum of a quadratic over a closed disc: interior critical point plus
/// a refined angular scan of the boundary circle.
fn quadratic_sup_on_disc(c: &[f64; 6], center: Vec2, r: f64) -> f64 {
    let mut sup = quadratic_eval(c, center);
    // critical point of the quadratic
    let det = 4.0 * c[3] * c[5] - c[4] * c[4];
    if det.abs() > 1e-300 {
        let x = (-c[1] * 2.0 * c[5] + c[2] * c[4]) / det;
        let y = (-c[2] * 2.0 * c[3] + c[1] * c[4]) / det;
        let p = Vec2::new(x, y);
        if (p - center).norm() <= r {
            sup = sup.max(quadratic_eval(c, p));
        }
    }
    let g = |th: f64| quadratic_eval(c, center + Vec2::new(r * th.cos(), r * th.sin()));
    let n = 2048;
    let mut best_th = 0.0;
    for k in 0..n {
        let th = std::f64::consts::TAU * k as f64 / n as f64;
        let v = g(th);
        if v > sup {
            sup = v;
            best_th = th;
        }
    }
    // golden-section refinement around the best angle
    let (mut lo, mut hi) = (best_th - std::f64::consts::TAU / n as f64, best_th + std::f64::consts::TAU / n as f64);
    let phi = 0.618_033_988_749_894_9;
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if g(m1) > g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    sup.max(g((lo + hi) / 2.0))
}

/// Mean over the disc of radius `r` (centered at the origin) of the squared
/// positive part of a quadratic, by per-angle analytic root splitting and
/// Gauss quadrature exact for the radial quintic.
fn quadratic_pos_sq_mean(c: &[f64; 6], r: f64) -> f64 {
    let n_theta = 4096;
    let (gx, gw) = crate::quad::gauss_legendre(6);
    let mut total = 0.0;
    for k in 0..n_theta {
        let th = std::f64::consts::TAU * (k as f64 + 0.5) / n_theta as f64;
        let (ct, st) = (th.cos(), th.sin());
        // q(t) = c0 + a t + b t^2 along the ray
        let a = c[1] * ct + c[2] * st;
        let b = c[3] * ct * ct + c[4] * ct * st + c[5] * st * st;
        let mut cuts = vec![0.0, r];
        for root in real_roots(c[0], a, b) {
            if root > 0.0 && root < r {
                cuts.push(root);
            }
        }
        cuts.sort_by(f64::total_cmp);
        for seg in cuts.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            if hi - lo < 1e-15 {
                continue;
            }
            let mid = (lo + hi) / 2.0;
            if c[0] + a * mid + b * mid * mid <= 0.0 {
                continue;
            }
            // integrate (c0 + a t + b t^2)^2 * t dt exactly
            let half = (hi - lo) / 2.0;
            let centre = (hi + lo) / 2.0;
            let mut seg_acc = 0.0;
            for (&x, &w) in gx.iter().zip(&gw) {
                let t = centre + half * x;
                let q = c[0] + a * t + b * t * t;
                seg_acc += w * q * q * t;
            }
            total += half * seg_acc;
        }
    }
    let integral = total * std::f64::consts::TAU / n_theta as f64;
    integral / (std::f64::consts::PI * r * r)
}

fn real_roots(c0: f64, a: f64, b: f64) -> Vec<f64> {
    if b.abs() < 1e-14 * (c0.abs() + a.abs() + 1.0) {
        if a.abs() < 1e-300 {
            return Vec::new();
        }
        return vec![-c0 / a];
    }
    let disc = a * a - 4.0 * b * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    // numerically stable pair
    let q = -0.5 * (a + a.signum() * s);
    let mut roots = vec![q / b];
    if q.abs() > 1e-300 {
        roots.push(c0 / q);
    }
    roots
}

/// Caccioppoli: the gradient of `E_mu(grad u)` on the half ball against the
/// gradient-sup-weighted mean square of `E_mu(grad u)` on the full ball.
pub fn check_caccioppoli(u: &ScalarField, f: &Integrand, center: Vec2, radius: f64) -> Result<EstimateReport> {
    let gp = *f.params();
    let ball = Subdomain::Disc { center, radius };
    let half = Subdomain::Disc { center, radius: radius / 2.0 };
    let grad = u.gradient();
    let (nodal, _) = grad.to_nodal();
    let e_field = ScalarField {
        grid: u.grid.clone(),
        values: nodal.iter().map(|g| e_mu_scalar(g.norm(), gp.mu, gp.p)).collect(),
    };
    let lhs = e_field.gradient().integral_of(&half, |v| v.norm_sq())?;
    let grad_sup = grad.linf(&ball)?;
    let quad = crate::grid::subdomain_quad(&u.grid, &ball)?;
    let e_sq = e_field.integral_of(&ball, |t| t * t)?;
    let rhs = (1.0 + grad_sup.powf(gp.q - gp.p)) * e_sq / quad.area;
    let implied = ratio0(lhs, rhs);
    Ok(EstimateReport {
        name: "caccioppoli".into(),
        lhs,
        rhs,
        implied_constant: implied,
        budget: budgets::CACCIOPPOLI,
        pass: implied <= budgets::CACCIOPPOLI,
        params: vec![
            ("p".into(), gp.p),
            ("q".into(), gp.q),
            ("mu".into(), gp.mu),
            ("radius".into(), radius),
        ],
        provenance: "E_mu of cell-averaged gradients; outer gradient by nodal differences".into(),
    })
}

/// The Lipschitz estimate: `sup |grad u|` on the half ball against
/// `(mean F(grad u))^{1/p} + (mean F(grad u))^{2/(3p-q)}` on the ball.
/// Both right-hand terms are recorded separately in the parameter echo.
pub fn check_theorem1(
    u: &ScalarField,
    f: &Integrand,
    params: &GrowthParams,
    center: Vec2,
    radius: f64,
) -> Result<EstimateReport> {
    let expo = params.lipschitz_second_exponent()?;
    let ball = Subdomain::Disc { center, radius };
    let half = Subdomain::Disc { center, radius: radius / 2.0 };
    let grad = u.gradient();
    let lhs = grad.linf(&half)?;
    let quad = crate::grid::subdomain_quad(&u.grid, &ball)?;
    let mut acc = 0.0;
    let mut seen = vec![false; u.grid.cells.len()];
    let mut cell_value = vec![0.0; u.grid.cells.len()];
    for &(c, _, _) in &quad.samples {
        if !seen[c as usize] {
            seen[c as usize] = true;
            cell_value[c as usize] = f.value(grad.vecs[c as usize])?;
        }
        acc += cell_value[c as usize] * quad.weight;
    }
    let mean_f = acc / quad.area;
    let term_p = mean_f.powf(1.0 / params.p);
    let term_q = mean_f.powf(expo);
    let rhs = term_p + term_q;
    let implied = ratio0(lhs, rhs);
    Ok(EstimateReport {
        name: "lipschitz-estimate".into(),
        lhs,
        rhs,
        implied_constant: implied,
        budget: budgets::THEOREM1,
        pass: implied <= budgets::THEOREM1,
        params: vec![
            ("p".into(), params.p),
            ("q".into(), params.q),
            ("mean_F".into(), mean_f),
            ("term_p".into(), term_p),
            ("term_q".into(), term_q),
            ("radius".into(), radius),
        ],
        provenance: "cell gradients; mean energy by sub-sampled quadrature".into(),
    })
}

fn ratio0(lhs: f64, rhs: f64) -> f64 {
    if lhs <= 0.0 {
        0.0
    } else if rhs <= 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}
