//! Frozen reference values, checked end to end through the public API.

use gelfand_orbit::fock::{eigen_poly, eigenvalue_type1, rho_op, FockModel};
use gelfand_orbit::moment::{is_well_adapted, moment_residual, solve_spherical_point, DEFAULT_SEED};
use gelfand_orbit::pairs::{build_ja, builtin_heisenberg_un, builtin_u2su2, coadjoint_action};
use gelfand_orbit::polyalg::{MultiPoly, Scalar, VarSet, WeylOp};
use gelfand_orbit::spectrum::{
    convergence_experiment, make_sequence, phi_embed, psi_orbit, SequenceKind, SphericalParam, Verdict,
};
use num::complex::Complex64;
use num::rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn determinant_square_has_three_integer_terms() {
    let vs = VarSet::phase(4, 0);
    let v = |i| MultiPoly::var(vs, vs.v(i));
    let det = &(&v(0) * &v(3)) - &(&v(1) * &v(2));
    let sq = det.pow(2);
    assert_eq!(sq.len(), 3);
    assert!(sq.terms().all(|(_, c)| c.is_real() && c.re.is_integer()));
}

#[test]
fn determinant_operator_on_det_squared() {
    let pair = builtin_u2su2();
    let op = WeylOp::quantize(&pair.restrict_to_a(&pair.invariants[2].poly).unwrap()).unwrap();
    let det = &pair.hw_generators[2];
    let det2 = det.pow(2);
    assert_eq!(op.apply(&det2).unwrap(), det2.scale(&Scalar::from_int(6)));
}

#[test]
fn degree_operator_and_its_scaled_form() {
    let pair = builtin_heisenberg_un(3).unwrap();
    let op = WeylOp::quantize(&pair.restrict_to_a(&pair.invariants[1].poly).unwrap()).unwrap();
    let mut count = 0;
    for ((mult, deriv), coeff) in op.terms() {
        assert_eq!(mult, deriv);
        assert_eq!(mult.iter().sum::<u32>(), 1);
        assert_eq!(*coeff, Scalar::from_int(1));
        count += 1;
    }
    assert_eq!(count, 3);
    let scaled = rho_op(&pair, 1, &q(3, 1)).unwrap();
    assert!(scaled.terms().all(|(_, c)| *c == Scalar::from_int(-6)));
}

#[test]
fn determinant_norm_at_diagonal_point() {
    let pair = builtin_u2su2();
    let v = [c(2f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    assert!((pair.invariants[2].poly.evaluate(&v, &[0.0; 3]) - c(2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn mixed_invariant_restricts_to_signed_row_norms() {
    let pair = builtin_u2su2();
    let restricted = pair.restrict_to_a(&pair.invariants[3].poly).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let v: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let rows = v[0].norm_sqr() + v[1].norm_sqr() - v[2].norm_sqr() - v[3].norm_sqr();
        let got = restricted.evaluate(&v, &[0.0; 3]);
        assert!(got.im.abs() < 1e-12 && (got.re.abs() - rows.abs()).abs() < 1e-12, "{got} vs {rows}");
    }
}

#[test]
fn type_ii_values() {
    let pair = builtin_u2su2();
    let b = [c(1.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    assert!((pair.invariants[1].poly.formal_i_eval(&b) - c(-5.0, 0.0)).norm() < 1e-12);
    let identity = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    assert!((pair.invariants[2].poly.formal_i_eval(&identity) - c(1.0, 0.0)).norm() < 1e-12);
    for b in [b, identity] {
        assert_eq!(pair.invariants[0].poly.formal_i_eval(&b), c(0.0, 0.0));
        assert_eq!(pair.invariants[3].poly.formal_i_eval(&b), c(0.0, 0.0));
    }
}

#[test]
fn eigenvalue_polynomials() {
    let u1 = builtin_heisenberg_un(1).unwrap();
    let lat = VarSet::lattice(1);
    let m = MultiPoly::var(lat, 0);
    assert_eq!(eigen_poly(&u1, 1).unwrap().poly, m.scale(&Scalar::from_int(-2)));
    assert_eq!(eigenvalue_type1(&u1, 1, &q(3, 1), &[2]).unwrap(), Scalar::from_int(-12));

    let pair = builtin_u2su2();
    let lat3 = VarSet::lattice(3);
    let mv = |i| MultiPoly::var(lat3, i);
    let p2 = eigen_poly(&pair, 2).unwrap().poly;
    let one = MultiPoly::one(lat3);
    let expected = (&mv(2) * &(&(&(&one + &mv(0)) + &mv(1)) + &mv(2))).scale(&Scalar::from_int(4));
    assert_eq!(p2, expected);
    assert_eq!(p2.homogeneous_component(2), (&mv(2) * &(&(&mv(0) + &mv(1)) + &mv(2))).scale(&Scalar::from_int(4)));
    let p3 = eigen_poly(&pair, 3).unwrap().poly;
    assert_eq!(p3, (&mv(0) - &mv(1)).scale(&Scalar::gaussian(0, 2)));

    let at_two = eigenvalue_type1(&pair, 2, &q(2, 1), &[1, 2, 1]).unwrap();
    let at_one = eigenvalue_type1(&pair, 2, &q(1, 1), &[1, 2, 1]).unwrap();
    assert_eq!(at_two, &at_one * &Scalar::from_int(4));
    assert_eq!(eigenvalue_type1(&pair, 0, &q(1, 2), &[0, 0, 0]).unwrap(), Scalar::real(q(-1, 4)));
}

#[test]
fn orbit_sweep_keeps_the_central_value() {
    let pair = builtin_u2su2();
    let ja = build_ja(&pair).unwrap();
    assert!(ja.is_single_block());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
        let pt = coadjoint_action(&pair, &ja, &x, 1.0).unwrap();
        assert!((pair.evaluate_invariants(&pt)[0] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn closed_form_spherical_points() {
    let pair = builtin_u2su2();
    let s = 2f64.sqrt();
    let identity = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
    assert!(moment_residual(&pair, &[0.0, 0.0, 1.0], &identity) < 1e-12);

    let (a, cc) = (c(0.6, 0.8), c(0.0, -1.0));
    let column = [a * s, c(0.0, 0.0), cc * s, c(0.0, 0.0)];
    assert!(moment_residual(&pair, &[1.0, 1.0, 0.0], &column) < 1e-12);

    let u1 = builtin_heisenberg_un(1).unwrap();
    let sp = solve_spherical_point(&u1, &[3], DEFAULT_SEED).unwrap();
    assert!((sp.v[0].norm_sqr() - 6.0).abs() < 1e-9 && sp.residual < 1e-9);
    let (ok, _) = is_well_adapted(&u1, &[2], &[c(2.0, 0.0)]).unwrap();
    assert!(ok);
}

#[test]
fn embeddings_at_simple_parameters() {
    let pair = builtin_u2su2();
    let model = FockModel::new(&pair);
    let phi = phi_embed(&model, &SphericalParam::TypeI { lambda: 1.0, m: vec![0, 0, 0] }).unwrap();
    assert_eq!(phi.values, vec![1.0, 0.0, 0.0, 0.0]);

    let u1 = builtin_heisenberg_un(1).unwrap();
    let m1 = FockModel::new(&u1);
    let phi = phi_embed(&m1, &SphericalParam::TypeI { lambda: 0.5, m: vec![4] }).unwrap();
    assert_eq!(phi.values, vec![0.25, -4.0]);

    let sp = psi_orbit(&pair, &SphericalParam::TypeI { lambda: 4.0, m: vec![1, 0, 1] }, DEFAULT_SEED).unwrap();
    let norm: f64 = sp.v.iter().map(|x| x.norm_sqr()).sum();
    assert!((norm - 4.0 * 2.0 * 3.0).abs() < 1e-8);
}

#[test]
fn u1_type_i_to_type_ii_limit() {
    let u1 = builtin_heisenberg_un(1).unwrap();
    let kind = SequenceKind::TypeIToTypeII { direction: vec![1.0], offset: vec![0], growth: 1.0 };
    let seq = make_sequence(&u1, &kind, 10_000, DEFAULT_SEED).unwrap();
    let SphericalParam::TypeII { b } = &seq.limit else { panic!("type II limit expected") };
    assert!((b[0].norm_sqr() - 2.0).abs() < 1e-9);
    let report = convergence_experiment(&FockModel::new(&u1), &seq, 1e-2, DEFAULT_SEED).unwrap();
    assert_eq!(report.verdict, Verdict::CoConvergent);
}
