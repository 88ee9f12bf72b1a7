//! Property suites: derivative consistency, convexity, comparability of the
//! degeneracy bookkeeping quantities, norm quadrature behavior under
//! refinement, and randomized inequality sweeps.

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pqlab::grid::{DomainSpec, Grid, ScalarField, Subdomain};
use pqlab::integrand::{e_mu_scalar, h_mu, regularize, sigma_eps, verify_growth_bounds, Integrand, Mollifier};
use pqlab::vec2::Vec2;

fn random_points(seed: u64, n: usize, radius: f64, min_r: f64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let r = radius * rng.gen::<f64>().sqrt();
        if r < min_r {
            continue;
        }
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push(Vec2::new(r * th.cos(), r * th.sin()));
    }
    out
}

fn fd_check(f: &Integrand, z: Vec2) {
    let e = f.evaluate(z).unwrap();
    let s = 1e-5;
    let v = |z: Vec2| f.value(z).unwrap();
    let gx = (v(z + Vec2::new(s, 0.0)) - v(z - Vec2::new(s, 0.0))) / (2.0 * s);
    let gy = (v(z + Vec2::new(0.0, s)) - v(z - Vec2::new(0.0, s))) / (2.0 * s);
    let scale = 1.0 + e.gradient.norm();
    assert!(
        ((gx - e.gradient.x).abs() + (gy - e.gradient.y).abs()) / scale < 1e-6,
        "gradient mismatch at {z:?}: fd ({gx}, {gy}) vs {:?}",
        e.gradient
    );
    // Hessian against central differences of the exact gradient (second
    // differences of the value sit at the f64 cancellation floor)
    let gr = |z: Vec2| f.evaluate(z).unwrap().gradient;
    let dx = (gr(z + Vec2::new(s, 0.0)) - gr(z - Vec2::new(s, 0.0))) * (1.0 / (2.0 * s));
    let dy = (gr(z + Vec2::new(0.0, s)) - gr(z - Vec2::new(0.0, s))) * (1.0 / (2.0 * s));
    let hscale = 1.0 + e.hessian.op_norm();
    assert!((dx.x - e.hessian.a11).abs() / hscale < 1e-6, "hxx at {z:?}");
    assert!((dy.y - e.hessian.a22).abs() / hscale < 1e-6, "hyy at {z:?}");
    assert!((dx.y - e.hessian.a12).abs() / hscale < 1e-6, "hxy(1) at {z:?}");
    assert!((dy.x - e.hessian.a12).abs() / hscale < 1e-6, "hxy(2) at {z:?}");
}

#[test]
fn derivatives_match_finite_differences_per_family() {
    let model = Integrand::model_pq(2.0, 4.0, 1.0, 1.0, 1.0).unwrap();
    let degenerate = Integrand::model_pq(1.6, 2.5, 0.0, 1.0, 0.0).unwrap();
    let mollified = model.mollify(0.1).unwrap();
    let smooth = Integrand::model_pq(2.0, 4.0, 1.0, 1.0, 0.0).unwrap();
    let regularized = regularize(&smooth.mollify(0.1).unwrap(), 0.1, 0.1, sigma_eps(0.1, 1.0), 1.0, 4.0).unwrap();
    for (k, f) in [model, degenerate, mollified, regularized].iter().enumerate() {
        for z in random_points(40 + k as u64, 100, 5.0, 1e-2) {
            fd_check(f, z);
        }
    }
}

#[test]
fn hessian_floor_matches_declared_ellipticity() {
    // smallest Hessian eigenvalue >= nu H^{(p-2)/2} - 1e-9 at random samples
    for (p, q, mu, nut) in [(2.0, 4.0, 1.0, 1.0), (1.5, 3.0, 0.5, 0.0), (3.0, 3.5, 0.0, 0.0), (2.0, 5.0, 1.0, 0.3)] {
        let f = Integrand::model_pq(p, q, mu, 1.0, nut).unwrap();
        let gp = *f.params();
        for z in random_points(7, 200, 10.0, if mu == 0.0 { 1e-3 } else { 0.0 }) {
            let e = f.evaluate(z).unwrap();
            let floor = gp.nu * h_mu(z, gp.mu).powf((gp.p - 2.0) / 2.0);
            assert!(
                e.hessian.min_eigenvalue() >= floor - 1e-9,
                "ellipticity floor violated for (p,q,mu)=({p},{q},{mu}) at {z:?}"
            );
        }
    }
}

#[test]
fn e_mu_h_mu_comparability() {
    // |t|^p <= H_mu(t)^{p/2} <= p (E_mu(t) + mu^p) on 1000 samples
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(0.0..20.0);
        let mu: f64 = rng.gen_range(0.0..2.0);
        let p: f64 = rng.gen_range(1.001..6.0);
        let h = (mu * mu + t * t).powf(p / 2.0);
        assert!(t.powf(p) <= h * (1.0 + 1e-12));
        assert!(h <= p * (e_mu_scalar(t, mu, p) + mu.powf(p)) * (1.0 + 1e-12) + 1e-12);
    }
}

#[test]
fn growth_bounds_hold_for_fitted_families_on_random_samples() {
    let xis: Vec<Vec2> = (0..8)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / 8.0;
            Vec2::new(th.cos(), th.sin())
        })
        .collect();
    let base = Integrand::model_pq(2.0, 4.0, 1.0, 1.0, 0.0).unwrap();
    let fd = base.mollify(0.05).unwrap();
    let fr = regularize(&fd, 0.1, 0.05, sigma_eps(0.1, 2.0), 1.0, 4.0).unwrap();
    for (tag, f) in [("mollified", &fd), ("regularized", &fr)] {
        let rep = verify_growth_bounds(f, &random_points(19, 150, 10.0, 0.0), &xis).unwrap();
        assert!(rep.pass, "{tag} bounds failed: {}", rep.provenance);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_eps_monotone_in_eps(e1 in 1e-6f64..0.999, e2 in 1e-6f64..0.999, norm in 0.0f64..100.0) {
        prop_assume!(e1 < e2);
        prop_assert!(sigma_eps(e1, norm) < sigma_eps(e2, norm));
    }

    #[test]
    fn sigma_eps_monotone_in_norm(eps in 1e-3f64..0.999, n1 in 0.0f64..100.0, n2 in 0.0f64..100.0) {
        prop_assume!(n1 < n2);
        prop_assert!(sigma_eps(eps, n1) > sigma_eps(eps, n2));
    }

    #[test]
    fn h_mu_scaling(x in -5.0f64..5.0, y in -5.0f64..5.0, mu in 0.0f64..2.0) {
        let z = Vec2::new(x, y);
        prop_assert!(h_mu(z, mu) >= z.norm_sq());
        prop_assert!(h_mu(z, mu) >= mu * mu);
    }
}

#[test]
fn mollify_field_commutes_with_affine_addition() {
    let h = 2.0 / 48.0;
    let outer = Grid::with_spacing(DomainSpec::Disc { center: Vec2::ZERO, radius: 1.15 }, h).unwrap();
    let inner = Grid::with_spacing(DomainSpec::unit_disc(), h).unwrap();
    let m = Mollifier::standard_bump(0.1, 32).unwrap();
    let base = ScalarField::bandlimited(&outer, 3, 3, 1.0);
    let affine = |p: Vec2| 0.7 * p.x - 1.3 * p.y + 0.2;
    let shifted = ScalarField {
        grid: outer.clone(),
        values: outer.nodes.iter().zip(&base.values).map(|(n, v)| v + affine(n.pos)).collect(),
    };
    let m1 = shifted.mollify(&m, &inner).unwrap();
    let m2 = base.mollify(&m, &inner).unwrap();
    for ((n, a), b) in inner.nodes.iter().zip(&m1.values).zip(&m2.values) {
        assert!((a - (b + affine(n.pos))).abs() < 1e-12);
    }
}

#[test]
fn norm_quadrature_second_order_on_square() {
    // closed-form integral: ||sin(pi x) sin(pi y)||_2^2 = 1/4 on the unit square
    let mut errors = Vec::new();
    for n in [32usize, 64, 128] {
        let g = Grid::build(DomainSpec::Square { origin: Vec2::ZERO, side: 1.0 }, n).unwrap();
        let u = ScalarField::from_fn(&g, |p| (std::f64::consts::PI * p.x).sin() * (std::f64::consts::PI * p.y).sin());
        let n2 = u.lp_norm(2.0, &Subdomain::All).unwrap();
        errors.push((n2 * n2 - 0.25).abs());
    }
    for w in errors.windows(2) {
        assert!(w[1] < w[0] / 3.0, "quadrature not second order: {errors:?}");
    }
}

#[test]
fn circle_sup_agrees_with_annulus_linf() {
    let g = Grid::build(DomainSpec::unit_disc(), 64).unwrap();
    let u = ScalarField::bandlimited(&g, 21, 4, 1.0);
    let r = 0.6;
    let sup_circle = u.circle_sup(r).unwrap();
    let band = Subdomain::Annulus { center: Vec2::ZERO, inner: r - 2.0 * g.h, outer: r + 2.0 * g.h };
    let linf = u.linf_norm(&band).unwrap();
    // the circle is inside the band; the gap is bounded by the field's
    // modulus of continuity across a few h
    let grad_max = u.gradient().linf(&Subdomain::All).unwrap();
    assert!(sup_circle <= linf + 1e-12);
    assert!(linf - sup_circle <= 4.0 * g.h * grad_max, "gap {} too large", linf - sup_circle);
}

#[test]
fn slice_pick_constant_stable_under_refinement() {
    let mut per_res = Vec::new();
    for n in [48usize, 96] {
        let g = Grid::build(DomainSpec::unit_disc(), n).unwrap();
        let mut worst = 0.0_f64;
        for seed in 0..40u64 {
            let u = ScalarField::bandlimited(&g, seed, 4, 1.0);
            let rep = pqlab::estimates::check_slice_pick(&u, 0.3, 0.7).unwrap();
            rep.assert_invariants();
            worst = worst.max(rep.implied_constant);
        }
        per_res.push(worst);
    }
    let ratio = per_res[0].max(per_res[1]) / per_res[0].min(per_res[1]);
    assert!(ratio < 1.5, "slice-pick constants not resolution stable: {per_res:?}");
    assert!(per_res.iter().all(|&c| c <= pqlab::estimates::budgets::SLICE_PICK));
}

#[test]
fn jensen_inequality_for_mollified_data_energy() {
    // int_{B_1} F(grad u_eps) <= int_{B_{1+eps}} F(grad u) for convex F
    let h = 2.0 / 48.0;
    let eps = 0.1;
    let outer = Grid::with_spacing(DomainSpec::Disc { center: Vec2::ZERO, radius: 1.0 + eps + 3.0 * h }, h).unwrap();
    let inner = Grid::with_spacing(DomainSpec::unit_disc(), h).unwrap();
    let f = Integrand::model_pq(2.0, 4.0, 1.0, 1.0, 1.0).unwrap();
    let u = ScalarField::from_fn(&outer, |p| p.x * p.x * p.x);
    let m = Mollifier::standard_bump(eps, 32).unwrap();
    let ue = u.mollify(&m, &inner).unwrap();
    let lhs = ue
        .gradient()
        .integral_of(&Subdomain::All, |z| f.value(z).unwrap())
        .unwrap();
    let rhs = u
        .gradient()
        .integral_of(&Subdomain::Disc { center: Vec2::ZERO, radius: 1.0 + eps }, |z| f.value(z).unwrap())
        .unwrap();
    assert!(lhs <= rhs + 1e-6, "Jensen violated: {lhs} vs {rhs}");
}

#[test]
fn hole_filling_sweep_on_synthetic_hypotheses() {
    // Z(t) = M(K + (t - rho + w)^{-alpha}) satisfies the hypothesis for all
    // pairs with B = M(1-theta)K and A = M sup_{s<t} [(s-rho+w)^{-alpha}
    // - theta (t-rho+w)^{-alpha}] (t-s)^alpha, measured on a fine pair grid
    // and inflated 10%
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for trial in 0..100 {
        let theta: f64 = rng.gen_range(0.0..0.95);
        let alpha: f64 = rng.gen_range(0.25..3.0);
        let m_scale: f64 = rng.gen_range(0.1..10.0);
        let k_off: f64 = rng.gen_range(0.0..5.0);
        let w: f64 = rng.gen_range(0.02..0.5);
        let (rho, sigma) = (0.25, 0.75);
        let zf = move |t: f64| m_scale * (k_off + (t - rho + w).powf(-alpha));
        let mut sup = 0.0_f64;
        let grid_n = 400;
        for i in 0..grid_n {
            for j in i + 1..=grid_n {
                let s = rho + (sigma - rho) * i as f64 / grid_n as f64;
                let t = rho + (sigma - rho) * j as f64 / grid_n as f64;
                let bracket = (s - rho + w).powf(-alpha) - theta * (t - rho + w).powf(-alpha);
                sup = sup.max(bracket * (t - s).powf(alpha));
            }
        }
        let a = 1.1 * m_scale * sup;
        let b = m_scale * (1.0 - theta) * k_off;
        let (c, ok) = pqlab::estimates::hole_filling(theta, alpha, a, b, rho, sigma, Some(&zf)).unwrap();
        assert!(
            ok,
            "trial {trial} failed: theta={theta}, alpha={alpha}, w={w}, A={a}, B={b}, c={c}, Z(rho)={}",
            zf(rho)
        );
    }
}
