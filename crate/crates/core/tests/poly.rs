mod common;

use common::{c, example_1_1, random_pepv};
use contrace::poly::{assemble_pepv, make_shifts, monomials, PolyError};
use contrace::{PolyMatrixT, ShiftStyle, ShiftVector, SquareSystem, XPoly, XTerm, ZPoly, C64};
use proptest::prelude::*;

fn cx() -> impl Strategy<Value = C64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(re, im)| C64::new(re, im))
}

fn point(n: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec(cx(), n)
}

/// `Σ_terms c(z)·Π x_k^{e_k}` term by term with `powu`.
fn naive_eval(p: &XPoly, x: &[C64], z: C64) -> C64 {
    p.terms()
        .iter()
        .map(|t| {
            let zc: C64 = t
                .coeff
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, a)| a * z.powu(k as u32))
                .sum();
            t.exponent.iter().zip(x).fold(zc, |acc, (&e, &xi)| acc * xi.powu(e))
        })
        .sum()
}

fn shifted(t: &PolyMatrixT, seed: u64) -> SquareSystem {
    let a = make_shifts(t, ShiftStyle::Dense, seed).unwrap().remove(0);
    assemble_pepv(t, &a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn row_expansion_matches_matrix_vector_product(seed in 0u64..1000, x in point(3), z in cx()) {
        let t = random_pepv(3, 2, 2, seed);
        let lhs = t.eval_matrix(&x, z).matvec(&x);
        let rows = t.row_polys();
        for (i, f) in rows.iter().enumerate() {
            prop_assert!((f.eval(&x, z) - lhs[i]).norm() <= 1e-12 * (1.0 + lhs[i].norm()));
        }
        let applied = t.apply(&x, z);
        for i in 0..3 {
            prop_assert!((applied[i] - lhs[i]).norm() <= 1e-12 * (1.0 + lhs[i].norm()));
        }
    }

    #[test]
    fn horner_evaluation_matches_naive_sum(seed in 0u64..1000, x in point(2), z in cx()) {
        let t = random_pepv(2, 3, 3, seed);
        for f in t.row_polys() {
            let want = naive_eval(&f, &x, z);
            prop_assert!((f.eval(&x, z) - want).norm() <= 1e-11 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn jacobian_matches_central_differences(seed in 0u64..1000, x in point(3), z in cx()) {
        let s = shifted(&random_pepv(3, 1, 2, seed), seed);
        let jac = s.jacobian_x(&x, z);
        let h = 1e-5;
        for k in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (fp, fm) = (s.evaluate(&xp, z), s.evaluate(&xm, z));
            for i in 0..3 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                prop_assert!((jac[(i, k)] - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
            }
        }
        let fz = s.derivative_z(&x, z);
        let (fp, fm) = (s.evaluate(&x, z + h), s.evaluate(&x, z - h));
        for i in 0..3 {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            prop_assert!((fz[i] - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
        }
    }

    #[test]
    fn fused_evaluation_agrees_with_separate_calls(seed in 0u64..1000, x in point(3), z in cx()) {
        let s = shifted(&random_pepv(3, 2, 1, seed), seed);
        let fused = s.eval_fused(&x, z);
        let (f, jac, fz) = (s.evaluate(&x, z), s.jacobian_x(&x, z), s.derivative_z(&x, z));
        for i in 0..3 {
            prop_assert!((fused.f[i] - f[i]).norm() <= 1e-12 * (1.0 + f[i].norm()));
            prop_assert!((fused.fz[i] - fz[i]).norm() <= 1e-12 * (1.0 + fz[i].norm()));
            for k in 0..3 {
                prop_assert!((fused.jac[(i, k)] - jac[(i, k)]).norm() <= 1e-12 * (1.0 + jac[(i, k)].norm()));
            }
        }
    }

    /// Homogeneous rows of degree `D` satisfy `Σ_k x_k ∂f/∂x_k = D·f`.
    #[test]
    fn euler_identity_for_homogeneous_rows(seed in 0u64..1000, d in 0u32..3, x in point(3), z in cx()) {
        let t = random_pepv(3, d, 2, seed);
        let s = assemble_pepv(&t, &ShiftVector::zero(&t)).unwrap();
        let f = s.evaluate(&x, z);
        let jac = s.jacobian_x(&x, z);
        for i in 0..3 {
            let euler: C64 = (0..3).map(|k| x[k] * jac[(i, k)]).sum();
            let want = f[i] * (d + 1) as f64;
            prop_assert!((euler - want).norm() <= 1e-11 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn shifts_are_deterministic_unit_modulus(seed in any::<u64>()) {
        let t = random_pepv(3, 2, 1, 5);
        let a = make_shifts(&t, ShiftStyle::Dense, seed).unwrap();
        prop_assert_eq!(&a, &make_shifts(&t, ShiftStyle::Dense, seed).unwrap());
        prop_assert_eq!(a.len(), 3);
        for col in &a {
            for p in &col.polys {
                prop_assert_eq!(p.terms().len(), monomials(3, 2).len());
                prop_assert_eq!(p.homogeneous_degree(), Some(2));
                for term in p.terms() {
                    prop_assert!((term.coeff.coeffs()[0].norm() - 1.0).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn monomial_counts_are_binomial() {
    for (n, d, want) in [(1, 4, 1), (3, 1, 3), (3, 2, 6), (4, 3, 20), (10, 1, 10)] {
        let m = monomials(n, d);
        assert_eq!(m.len(), want);
        assert!(m.iter().all(|e| e.iter().sum::<u32>() == d));
        assert!(m.windows(2).all(|w| w[0] > w[1]), "lexicographically decreasing");
    }
}

#[test]
fn monomial_shifts_share_one_exponent() {
    let t = random_pepv(3, 2, 1, 9);
    for col in make_shifts(&t, ShiftStyle::Monomial, 11).unwrap() {
        let betas: Vec<&Vec<u32>> = col.polys.iter().map(|p| &p.terms()[0].exponent).collect();
        assert!(col.polys.iter().all(|p| p.terms().len() == 1));
        assert!(betas.iter().all(|b| *b == betas[0] && b.iter().sum::<u32>() == 2));
    }
}

#[test]
fn monomial_shifts_reject_mixed_degrees() {
    let rows = vec![
        vec![XPoly::var(2, 0), XPoly::zero(2)],
        vec![XPoly::zero(2), XPoly::monomial(vec![0, 2], c(1.0))],
    ];
    let t = PolyMatrixT::new(rows).unwrap();
    assert_eq!(t.row_degrees(), &[1, 2]);
    assert_eq!(make_shifts(&t, ShiftStyle::Monomial, 1), Err(PolyError::MixedDegrees));
    assert!(make_shifts(&t, ShiftStyle::Dense, 1).is_ok());
}

#[test]
fn inhomogeneous_second_row_is_reported() {
    let rows = vec![
        vec![XPoly::var(2, 0), XPoly::var(2, 1)],
        vec![XPoly::var(2, 0), XPoly::monomial(vec![2, 0], c(1.0))],
    ];
    assert_eq!(PolyMatrixT::new(rows).unwrap_err(), PolyError::InhomogeneousRow(2));
    let mixed = XPoly::var(2, 0).add(&XPoly::monomial(vec![1, 1], c(1.0)));
    let rows = vec![vec![mixed, XPoly::zero(2)], vec![XPoly::zero(2), XPoly::var(2, 1)]];
    assert_eq!(PolyMatrixT::new(rows).unwrap_err(), PolyError::InhomogeneousRow(1));
}

#[test]
fn declared_degrees_and_z_degree_are_enforced() {
    let t = || vec![vec![XPoly::var(1, 0)]];
    assert!(PolyMatrixT::with_degrees(t(), &[1], 0).is_ok());
    assert_eq!(
        PolyMatrixT::with_degrees(t(), &[2], 0).unwrap_err(),
        PolyError::InhomogeneousRow(1)
    );
    let zt = vec![vec![XPoly::new(
        1,
        vec![XTerm::new(vec![1], ZPoly::new(vec![c(1.0), c(0.0), c(2.0)]))],
    )
    .unwrap()]];
    assert_eq!(
        PolyMatrixT::with_degrees(zt, &[1], 1).unwrap_err(),
        PolyError::ZDegreeExceeded(1)
    );
}

#[test]
fn shift_of_wrong_degree_is_rejected() {
    let t = example_1_1();
    let mut a = make_shifts(&t, ShiftStyle::Dense, 3).unwrap().remove(0);
    a.polys[1] = XPoly::monomial(vec![2, 0, 0], c(1.0));
    assert_eq!(assemble_pepv(&t, &a).unwrap_err(), PolyError::DegreeMismatch(2));
}

#[test]
fn example_system_has_quadratic_rows() {
    let t = example_1_1();
    assert_eq!((t.n(), t.z_degree(), t.row_degrees()), (3, 2, &[1u32, 1, 1][..]));
    let s = shifted(&t, 1);
    assert_eq!(s.row_degrees(), &[2, 2, 2]);
    assert_eq!(s.bezout_number(), 8);
    // Every shifted system vanishes at the origin.
    let zero = vec![C64::new(0.0, 0.0); 3];
    assert!(s.evaluate(&zero, c(0.7)).iter().all(|v| v.norm() == 0.0));
}
