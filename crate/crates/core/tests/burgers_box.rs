//! Pure convection with q = 2 (Burgers) from box data has a closed-form
//! entropy solution: a rarefaction fan off the left edge and a shock off
//! the right edge, which merge at t = 4/h into a triangle.

use fracconv_core::initial::box_data;
use fracconv_core::operators::FluxScheme;
use fracconv_core::solver::{convection_step, convection_step_with, Reconstruction};
use fracconv_core::{make_grid, Field, GridSpec};

const H: f64 = 0.5; // box height on [-1, 1]: mass 1

fn exact(t: f64, x: f64) -> f64 {
    let y = x + 1.0;
    if y <= 0.0 {
        return 0.0;
    }
    if t <= 4.0 / H {
        let fan_end = H * t;
        let shock = 2.0 + 0.5 * H * t;
        if y < fan_end {
            y / t
        } else if y < shock {
            H
        } else {
            0.0
        }
    } else if y < (2.0 * 2.0 * H * t).sqrt() {
        y / t
    } else {
        0.0
    }
}

/// L1 distance to the exact solution, integrated exactly per cell by
/// fine midpoint sampling.
fn l1_error(u: &Field, t: f64) -> f64 {
    let g = u.grid();
    let dx = g.dx();
    let sub = 64;
    let mut err = 0.0;
    for (i, &v) in u.samples().iter().enumerate() {
        let x0 = g.x(i) - 0.5 * dx;
        for k in 0..sub {
            let x = x0 + (k as f64 + 0.5) * dx / sub as f64;
            err += (v - exact(t, x)).abs() * dx / sub as f64;
        }
    }
    err
}

fn evolve(g: &GridSpec, t: f64, recon: Reconstruction) -> Field {
    let u0 = box_data(g, 1.0, 1.0).unwrap();
    convection_step_with(&u0, 2.0, t, 1.0, 0.5, FluxScheme::Godunov, recon).unwrap()
}

#[test]
fn first_order_converges_before_interaction() {
    let mut errs = Vec::new();
    for n in [512, 1024, 2048, 4096] {
        let g = make_grid(16.0, n).unwrap();
        let u = evolve(&g, 2.0, Reconstruction::FirstOrder);
        assert!((u.mass() - 1.0).abs() < 1e-13);
        errs.push((g.dx(), l1_error(&u, 2.0)));
    }
    for w in errs.windows(2) {
        let order = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        assert!(order > 0.5, "observed order {order}: {errs:?}");
    }
    assert!(errs[3].1 < 0.015, "{errs:?}");
}

#[test]
fn triangle_after_interaction() {
    let g = make_grid(16.0, 4096).unwrap();
    let t = 12.0;
    for recon in [Reconstruction::FirstOrder, Reconstruction::Muscl] {
        let u = evolve(&g, t, recon);
        let e = l1_error(&u, t);
        assert!(e < 0.015, "{recon:?}: {e}");
        // the plateau is gone: the maximum sits at the shock, sqrt(2M/t)
        assert!((u.max() - (2.0 / t).sqrt()).abs() < 0.02, "{}", u.max());
    }
}

#[test]
fn muscl_beats_first_order() {
    let g = make_grid(16.0, 1024).unwrap();
    let e1 = l1_error(&evolve(&g, 2.0, Reconstruction::FirstOrder), 2.0);
    let e2 = l1_error(&evolve(&g, 2.0, Reconstruction::Muscl), 2.0);
    assert!(e2 < 0.6 * e1, "first order {e1}, muscl {e2}");
}

#[test]
fn rusanov_is_also_consistent() {
    let g = make_grid(16.0, 4096).unwrap();
    let u0 = box_data(&g, 1.0, 1.0).unwrap();
    let u = convection_step(&u0, 2.0, 2.0, 1.0, 0.5, FluxScheme::Rusanov).unwrap();
    assert!(l1_error(&u, 2.0) < 0.02);
}
