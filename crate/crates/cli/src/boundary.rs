//! Shipped boundary-data families.

use pqlab::grid::{Grid, ScalarField};
use pqlab::vec2::Vec2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::config::BoundarySection;

/// Analytic data function for a family. `amplitude` and `lambda` override the
/// section's values when given (the sweep axes). All families are entire
/// functions, so they can be evaluated on enlarged grids for mollification.
pub fn closure(
    section: &BoundarySection,
    amplitude: Option<f64>,
    lambda: Option<f64>,
) -> anyhow::Result<Box<dyn Fn(Vec2) -> f64 + Send + Sync>> {
    let a = amplitude.unwrap_or(section.amplitude);
    let lam = lambda.unwrap_or(section.lambda);
    Ok(match section.family.as_str() {
        "affine" => {
            let xi = if section.xi.len() == 2 { Vec2::new(section.xi[0], section.xi[1]) } else { Vec2::new(1.0, 0.0) };
            Box::new(move |p| a * xi.dot(p))
        }
        "quadratic-harmonic" => Box::new(move |p| a * (p.x * p.x - p.y * p.y)),
        "counterexample" => Box::new(move |p| 1.0 + p.y * p.y - lam * p.x * p.x),
        "smooth-bump" => {
            // off-center so the Dirichlet trace on a circle genuinely varies
            let s = if section.scale > 0.0 { section.scale } else { 0.1 };
            let c = Vec2::new(0.4, 0.25);
            Box::new(move |p| a * s * (-2.0 * (p - c).norm_sq()).exp())
        }
        "random-bandlimited" => {
            let mut rng = ChaCha8Rng::seed_from_u64(section.seed);
            let kmax = section.kmax.max(1);
            let mut modes = Vec::new();
            let mut norm = 0.0;
            for _ in 0..12 {
                let kx = rng.gen_range(-(kmax as i32)..=kmax as i32) as f64;
                let ky = rng.gen_range(-(kmax as i32)..=kmax as i32) as f64;
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let c: f64 = rng.gen_range(-1.0..1.0);
                norm += c * c;
                modes.push((kx, ky, phase, c));
            }
            let scale = a / norm.sqrt().max(1e-12);
            Box::new(move |p| {
                modes.iter().map(|&(kx, ky, ph, c)| c * (kx * p.x + ky * p.y + ph).cos()).sum::<f64>() * scale
            })
        }
        other => anyhow::bail!("unknown boundary family '{other}'"),
    })
}

/// Evaluate a boundary family on a grid.
pub fn sample(
    section: &BoundarySection,
    grid: &Arc<Grid>,
    amplitude: Option<f64>,
    lambda: Option<f64>,
) -> anyhow::Result<ScalarField> {
    let f = closure(section, amplitude, lambda)?;
    Ok(ScalarField::from_fn(grid, |p| f(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pqlab::grid::DomainSpec;

    #[test]
    fn families_evaluate() {
        let g = Grid::build(DomainSpec::unit_disc(), 16).unwrap();
        for family in crate::config::BOUNDARY_FAMILIES {
            let mut sec = BoundarySection::default();
            sec.family = (*family).into();
            let f = sample(&sec, &g, Some(2.0), Some(10.0)).unwrap();
            assert!(f.values.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn counterexample_matches_formula() {
        let g = Grid::build(DomainSpec::unit_disc(), 16).unwrap();
        let mut sec = BoundarySection::default();
        sec.family = "counterexample".into();
        let f = sample(&sec, &g, None, Some(50.0)).unwrap();
        for (n, v) in g.nodes.iter().zip(&f.values) {
            assert_eq!(*v, 1.0 + n.pos.y * n.pos.y - 50.0 * n.pos.x * n.pos.x);
        }
    }

    #[test]
    fn bandlimited_closure_is_seed_deterministic() {
        let mut sec = BoundarySection::default();
        sec.family = "random-bandlimited".into();
        sec.seed = 9;
        let f1 = closure(&sec, None, None).unwrap();
        let f2 = closure(&sec, None, None).unwrap();
        let p = Vec2::new(0.3, -0.4);
        assert_eq!(f1(p), f2(p));
    }
}
