mod common;

use common::c;
use contrace::contour::{make_grid, ContourError};
use contrace::trace::{moments, scaled_moments, USamples};
use contrace::{CMatrix, Contour, C64};
use proptest::prelude::*;

fn unit(n: usize) -> contrace::NodeGrid {
    make_grid(&Contour::circle(c(0.0), 1.0).unwrap(), n).unwrap()
}

fn diag_poles(poles: &[C64]) -> impl Fn(C64) -> CMatrix + '_ {
    move |z| CMatrix::from_diag(&poles.iter().map(|p| (z - p).inv()).collect::<Vec<_>>())
}

#[test]
fn grid_layout() {
    let ell = Contour::ellipse(C64::new(0.6, 0.1), 0.4, 0.3, 0.5).unwrap();
    let g = make_grid(&ell, 16).unwrap();
    assert_eq!(g.len(), 16);
    assert_eq!(g.t(0), 0.0);
    assert!((g.t(16) - std::f64::consts::TAU).abs() < 1e-15);
    for nd in &g.nodes {
        assert!((nd.z - ell.phi(nd.t)).norm() < 1e-15);
        assert!((nd.dz - ell.dphi(nd.t)).norm() < 1e-15);
    }
    assert_eq!(make_grid(&ell, 3).unwrap_err(), ContourError::TooFewNodes(3));
    assert_eq!(Contour::circle(c(0.0), 0.0).unwrap_err(), ContourError::BadRadius);
    assert_eq!(
        Contour::ellipse(c(0.0), 1.0, f64::NAN, 0.0).unwrap_err(),
        ContourError::BadRadius
    );
}

#[test]
fn derivative_matches_finite_differences() {
    let ell = Contour::ellipse(C64::new(-1.0, 2.0), 2.0, 0.5, 1.1).unwrap();
    let h = 1e-6;
    for k in 0..12 {
        let t = 0.5 * k as f64;
        let fd = (ell.phi(t + h) - ell.phi(t - h)) / (2.0 * h);
        assert!((ell.dphi(t) - fd).norm() < 1e-8);
    }
}

proptest! {
    #[test]
    fn membership_is_star_shaped_about_the_center(
        cx in -2.0f64..2.0, cy in -2.0f64..2.0, rx in 0.1f64..3.0, ry in 0.1f64..3.0,
        rot in -3.0f64..3.0, t in 0.0f64..6.3, lam in 0.0f64..2.0,
    ) {
        let ell = Contour::ellipse(C64::new(cx, cy), rx, ry, rot).unwrap();
        let z = ell.center + (ell.phi(t) - ell.center) * lam;
        if lam < 0.999_999 {
            prop_assert!(ell.contains(z));
        } else if lam > 1.000_001 {
            prop_assert!(!ell.contains(z));
        }
        prop_assert!(ell.contains(ell.center));
    }
}

#[test]
fn holomorphic_integrand_has_vanishing_moments() {
    let g = unit(64);
    let u = USamples::from_fn(&g, |_| CMatrix::identity(3));
    let m = moments(&u, &g, 3).unwrap();
    assert!(m.matrices.iter().all(|a| a.norm_max() <= 1e-14));
    let poly = USamples::from_fn(&g, |z| CMatrix::identity(2).scale(z * z * z + c(2.0) * z));
    assert!(moments(&poly, &g, 3)
        .unwrap()
        .matrices
        .iter()
        .all(|a| a.norm_max() <= 1e-14));
}

#[test]
fn residues_of_simple_poles() {
    let g = unit(64);
    let u = USamples::from_fn(&g, |z| CMatrix::identity(2).scale(z.inv()));
    let m = moments(&u, &g, 2).unwrap();
    assert!(m.matrices[0].sub(&CMatrix::identity(2)).norm_max() <= 1e-14);

    let poles = [c(0.2), c(-0.3)];
    let u = USamples::from_fn(&g, diag_poles(&poles));
    let m = moments(&u, &g, 2).unwrap();
    for (k, a) in m.matrices.iter().enumerate() {
        let want = CMatrix::from_diag(&poles.iter().map(|p| p.powu(k as u32)).collect::<Vec<_>>());
        assert!(a.sub(&want).norm_max() <= 1e-12, "moment {k}");
    }
}

#[test]
fn outside_poles_decay_geometrically_with_nodes() {
    // The trapezoidal error for a pole at |p| = 2 is about 2^{-N}.
    let pole = [c(2.0)];
    let err = |n: usize| {
        let g = unit(n);
        moments(&USamples::from_fn(&g, diag_poles(&pole)), &g, 1)
            .unwrap()
            .matrices[0]
            .norm_max()
    };
    let (e16, e32) = (err(16), err(32));
    assert!((e16 * 65536.0 - 1.0).abs() < 0.01, "{e16}");
    assert!((e32 * 4294967296.0 - 1.0).abs() < 0.01, "{e32}");
    assert!(err(64) < 1e-15);
}

#[test]
fn scaled_moments_map_back_to_the_poles() {
    let ell = Contour::ellipse(C64::new(3.0, -1.0), 2.0, 1.0, 0.3).unwrap();
    let g = make_grid(&ell, 128).unwrap();
    let p = C64::new(3.5, -0.8);
    let u = USamples::from_fn(&g, move |z| CMatrix::identity(1).scale((z - p).inv()));
    let m = scaled_moments(&u, &g, 1).unwrap();
    assert!((m.matrices[0][(0, 0)] - c(1.0)).norm() < 1e-12);
    let w = m.matrices[1][(0, 0)] / m.matrices[0][(0, 0)];
    assert!((m.unscale(w) - p).norm() < 1e-12);
    assert!((m.scale, m.center) == (2.0, C64::new(3.0, -1.0)));
}
