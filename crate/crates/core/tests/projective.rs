mod common;

use affine_qe::catalog::{random_type_a, random_type_b, Family, Model, Sign};
use affine_qe::expr::{integer, parse_scalar, rational, EvalPoint, Expr, Rational};
use affine_qe::geometry::AffineManifold;
use affine_qe::par::Execution;
use affine_qe::projective::{
    deform, geodesic_straightness, grid_around, liouville_check, numeric_gauge_residual, ricci_transform_residual,
    strong_flatness_test, FlatChart, ProjectiveChange,
};
use affine_qe::qe_solver::{distinguished_eigenvalue, solution_dimension};
use affine_qe::verdict::Verdict;
use common::{random_constant_manifold, random_manifold, random_poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn origin(m: usize) -> EvalPoint {
    EvalPoint::Exact(vec![integer(0); m])
}

#[test]
fn conjugation_by_the_potential() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..6 {
        let m = rng.gen_range(2..=3);
        let man = random_manifold(&mut rng, m);
        let g = random_poly(&mut rng, m, 2, 3);
        let f = random_poly(&mut rng, m, 2, 3);
        let mu = distinguished_eigenvalue(m);
        let tilde = deform(&man, &ProjectiveChange::from_potential(&g, m)).unwrap();
        let lhs = man.apply_qe_operator(&mu, &f);
        let rhs = tilde.apply_qe_operator(&mu, &Expr::exp(&g).mul(&f)).scale(&Expr::exp(&g.neg()));
        let diff = lhs.sub(&rhs);
        for _ in 0..20 {
            let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let scale = lhs.max_abs_at(&x).unwrap().max(1.0);
            let d = diff.max_abs_at(&x).unwrap();
            assert!(d < 1e-9 * scale, "defect {d} at {x:?}");
        }
    }
}

#[test]
fn strong_deformation_preserves_distinguished_dimension_and_alternating_ricci() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for k in 0..30 {
        let m = if k % 3 == 2 { 3 } else { 2 };
        let man = if k % 2 == 0 { random_constant_manifold(&mut rng, m) } else { random_manifold(&mut rng, m) };
        let g = random_poly(&mut rng, m, 2, 3);
        let tilde = deform(&man, &ProjectiveChange::from_potential(&g, m)).unwrap();
        let mu = distinguished_eigenvalue(m);
        let a = solution_dimension(&man, &mu, &origin(m)).unwrap().dim;
        let b = solution_dimension(&tilde, &mu, &origin(m)).unwrap().dim;
        assert_eq!(a, b);
        assert_eq!(man.ricci().alt.sub(&tilde.ricci().alt).is_zero(), Verdict::Holds);
    }
}

#[test]
fn ricci_transformation_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..10 {
        let m = rng.gen_range(2..=3);
        let man = random_manifold(&mut rng, m);
        let g = random_poly(&mut rng, m, 2, 3);
        assert_eq!(ricci_transform_residual(&man, &g).unwrap().is_zero(), Verdict::Holds);
        assert!(liouville_check(&man, &g).unwrap().consistent());
    }
}

#[test]
fn liouville_examples() {
    let xs = common::coords(2);
    let ea2 = Family::ExampleEA2.build(&[integer(1), integer(-2), rational(1, 2)]).unwrap().manifold();
    let g = parse_scalar("-log(1 + exp(x1))", &xs).unwrap();
    let r = liouville_check(&ea2, &g).unwrap();
    assert_eq!((r.ricci_preserved, r.hessian_condition), (Verdict::HoldsNumerically, Verdict::HoldsNumerically));

    let ea3 = Family::ExampleEA3.build(&[integer(1), integer(-2), rational(1, 2)]).unwrap().manifold();
    let r = liouville_check(&ea3, &parse_scalar("-log(x1)", &xs).unwrap()).unwrap();
    assert!(r.ricci_preserved.holds() && r.hessian_condition.holds());

    let r = liouville_check(&AffineManifold::flat(2), &Expr::coord(0)).unwrap();
    assert_eq!((r.ricci_preserved, r.hessian_condition), (Verdict::Fails, Verdict::Fails));
}

fn zero_ricci(man: &AffineManifold) -> bool {
    man.ricci().rho.is_zero() == Verdict::Holds
}

#[test]
fn maximal_dimension_away_from_distinguished_eigenvalue_forces_ricci_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut models: Vec<Model> = (0..15).map(|_| random_type_a(&mut rng)).collect();
    models.extend((0..15).map(|_| random_type_b(&mut rng)));
    models.push(Family::TypeA.build(&vec![integer(0); 6]).unwrap());
    models.push(Model::ExampleB1);
    for model in &models {
        let man = model.manifold();
        let m = man.dim();
        for mu in [integer(0), rational(1, 2), integer(2), rational(-3, 5)] {
            let d = solution_dimension(&man, &mu, &model.default_basepoint()).unwrap().dim;
            if d == m + 1 {
                assert!(zero_ricci(&man), "{model:?} mu={mu}");
            }
        }
    }
}

#[test]
fn flatness_criteria_agree_on_surfaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let mut models: Vec<Model> = (0..10).map(|_| random_type_a(&mut rng)).collect();
    models.extend((0..30).map(|_| random_type_b(&mut rng)));
    models.push(Family::Tc2OneA.build(&[integer(0), integer(0), integer(0), integer(1)]).unwrap());
    models.push(Family::Tc2TwoB(Sign::Plus).build(&[integer(1)]).unwrap());
    for model in &models {
        let r = strong_flatness_test(&model.manifold(), &model.default_basepoint()).unwrap();
        assert!(r.criteria_agree(), "{model:?}");
    }
    let one_a = Family::Tc2OneA.build(&[integer(0), integer(0), integer(0), integer(1)]).unwrap();
    let r = strong_flatness_test(&one_a.manifold(), &one_a.default_basepoint()).unwrap();
    assert!(!r.strongly_flat);
    assert_eq!(r.space.dim, 1);
}

fn check_chart(man: &AffineManifold, p: &[Rational], seed: u64) {
    let pf: Vec<f64> = EvalPoint::Exact(p.to_vec()).to_f64();
    let chart = FlatChart::new(man, &EvalPoint::Exact(p.to_vec()), &grid_around(&pf, 0.2, 3)).unwrap();
    let (z, dz) = chart.eval(&pf).unwrap();
    assert!(z.iter().all(|v| v.abs() < 1e-9));
    for (i, row) in dz.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dev = geodesic_straightness(man, &chart, 10, &mut rng, Execution::default()).unwrap();
    assert!(dev < 1e-6, "deviation {dev}");
}

#[test]
fn flat_charts_straighten_geodesics() {
    let two_b = Family::Tc2TwoB(Sign::Plus).build(&[integer(1)]).unwrap();
    check_chart(&two_b.manifold(), &[integer(1), integer(0)], 36);
    let xs = common::coords(2);
    let deformed =
        deform(&AffineManifold::flat(2), &ProjectiveChange::from_potential(&parse_scalar("x1*x2", &xs).unwrap(), 2))
            .unwrap();
    check_chart(&deformed, &[integer(0), integer(0)], 37);
}

#[test]
fn chart_requires_strong_flatness() {
    let one_a = Family::Tc2OneA.build(&[integer(0), integer(0), integer(0), integer(1)]).unwrap();
    let err = FlatChart::new(&one_a.manifold(), &one_a.default_basepoint(), &grid_around(&[1.0, 0.0], 0.1, 2));
    assert!(err.is_err());
}

#[test]
fn gauge_removes_symmetric_ricci() {
    let two_b = Family::Tc2TwoB(Sign::Plus).build(&[integer(1)]).unwrap();
    let man = two_b.manifold();
    let p = two_b.default_basepoint();
    let pts = grid_around(&[1.0, 0.0], 0.15, 5);
    let r = numeric_gauge_residual(&man, &p, &[1.0, 0.0, 0.0], &pts[..20]).unwrap();
    assert!(r < 1e-7, "{r}");
}
