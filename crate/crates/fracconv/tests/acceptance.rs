//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `FRACCONV_ACCEPT=4,6`
//! to run a subset, `FRACCONV_SKIP_CONTROL=1` to skip the supercritical
//! control run, and `FRACCONV_ACCEPT_STRICT=1` to exit nonzero when any
//! criterion fails (by default failures are reported, not fatal, so the
//! workspace test run stays usable while a known failure stands).

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use fracconv_core::asymptotics::{rescale, scaled_error, study_from_snapshots};
use fracconv_core::diagnostics::{diagnose, lp_bound};
use fracconv_core::initial::box_data;
use fracconv_core::kernel::{fit_decay_exponent, kernel_lp_norm, kernel_value, KernelOrder};
use fracconv_core::nwave::{nwave_field, nwave_lp_norm, nwave_oleinik_product};
use fracconv_core::operators::{frac_laplacian_spectral, SingularLaplacian};
use fracconv_core::solver::{duhamel_solve, epsilon_shift_test, split_solve, Scheme, SolverConfig};
use fracconv_core::{make_grid, Field, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn l1_distance(a: &Field, b: &Field) -> f64 {
    a.sub(b).map(|d| d.lp_norm(1.0)).unwrap_or(f64::INFINITY)
}

fn reference_params() -> ModelParams {
    ModelParams::subcritical(1.5, 1.2, 1.0).expect("valid parameters")
}

fn c1_cauchy_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = rng.random_range(0.1..10.0);
        let x = rng.random_range(-20.0..20.0);
        let got = kernel_value(1.0, t, x).map_err(|e| e.to_string())?;
        worst = worst.max((got - t / (PI * (x * x + t * t))).abs());
    }
    Ok((worst <= 1e-8, format!("max abs error {worst:.2e} over 200 points (limit 1e-8)")))
}

fn c2_kernel_norms() -> Outcome {
    let times = [0.5, 1.0, 2.0, 4.0];
    let mut worst_mass: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for alpha in [1.1, 1.5, 1.9] {
        let mass = kernel_lp_norm(alpha, 0.0, 1.0, 1.0, false).map_err(|e| e.to_string())?;
        worst_mass = worst_mass.max((mass - 1.0).abs());
        for s in [0.0, 0.5] {
            for deriv in [false, true] {
                let order = KernelOrder::new(alpha, s, deriv).map_err(|e| e.to_string())?;
                for p in [1.0, 2.0, f64::INFINITY] {
                    let fitted = fit_decay_exponent(alpha, s, p, deriv, &times).map_err(|e| e.to_string())?;
                    let expect = order.decay_exponent(p);
                    // the mass exponent is exactly 0: compare absolutely there
                    worst_rel = worst_rel.max((fitted - expect).abs() / expect.abs().max(1.0));
                }
            }
        }
    }
    Ok((
        worst_mass <= 1e-6 && worst_rel <= 0.01,
        format!("max |mass - 1| {worst_mass:.2e} (limit 1e-6); max exponent error (relative, absolute where the exponent is 0) {worst_rel:.2e} over 36 fits (limit 1e-2)"),
    ))
}

fn c3_operator_cross_check() -> Outcome {
    let alpha = 1.5;
    let l = PI;
    let field = |n: usize| {
        let g = make_grid(l, n).expect("grid");
        Field::from_fn(g, 0.0, |x| {
            (1..=6)
                .map(|k| {
                    let k = k as f64;
                    (k * x + 0.3 * k).cos() / (1.0 + k * k)
                })
                .sum()
        })
        .expect("finite")
    };
    let mut errs = Vec::new();
    for n in [1024, 4096] {
        let u = field(n);
        let spectral = frac_laplacian_spectral(&u, alpha).map_err(|e| e.to_string())?;
        let op = SingularLaplacian::with_default_radius(*u.grid(), alpha).map_err(|e| e.to_string())?;
        let singular = op.apply(&u).map_err(|e| e.to_string())?;
        let diff = singular.sub(&spectral).map_err(|e| e.to_string())?;
        errs.push(diff.sup_norm() / spectral.sup_norm());
    }
    Ok((
        errs[0] <= 1e-3 && errs[1] < errs[0],
        format!("relative max-norm gap {:.2e} at N=1024 (limit 1e-3), {:.2e} at N=4096", errs[0], errs[1]),
    ))
}

struct Shared {
    params: ModelParams,
    u0: Field,
    long_run: Option<Vec<Field>>,
    t1_runs: Vec<Field>,
}

fn acceptance_grid_data() -> Result<(ModelParams, Field), String> {
    let params = reference_params();
    let g = make_grid(200.0, 8192).map_err(|e| e.to_string())?;
    let u0 = box_data(&g, 1.0, params.mass).map_err(|e| e.to_string())?;
    Ok((params, u0))
}

fn c4_scheme_agreement(shared: &mut Shared) -> Outcome {
    let p = shared.params;
    let run = |delta: f64, scheme: Scheme| -> Result<Field, String> {
        let cfg = SolverConfig::new(scheme, delta, 1.0, vec![1.0]).map_err(|e| e.to_string())?;
        let out = match scheme {
            Scheme::Splitting => split_solve(&shared.u0, &p, &cfg),
            Scheme::Duhamel => duhamel_solve(&shared.u0, &p, &cfg),
        };
        out.map(|mut v| v.remove(0)).map_err(|e| e.to_string())
    };
    let s1 = run(1e-3, Scheme::Splitting)?;
    let s2 = run(5e-4, Scheme::Splitting)?;
    let s4 = run(2.5e-4, Scheme::Splitting)?;
    let d = run(1e-3, Scheme::Duhamel)?;
    let cross = l1_distance(&s1, &d);
    let ratio = l1_distance(&s1, &s2) / l1_distance(&s2, &s4);
    let sup_gap = s1.sub(&d).map_err(|e| e.to_string())?.sup_norm() / shared.u0.sup_norm();
    shared.t1_runs = vec![s1, s2, s4, d];
    Ok((
        cross <= 1e-2 * p.mass && (1.7..=2.3).contains(&ratio),
        format!(
            "L1(split - duhamel) = {cross:.2e} (limit 1e-2); sup gap / ||u0|| = {sup_gap:.2e}; self-convergence ratio {ratio:.3} (range [1.7, 2.3])"
        ),
    ))
}

const LONG_TIMES: [f64; 5] = [1.0, 3.0, 10.0, 30.0, 100.0];

fn long_run(shared: &mut Shared) -> Result<&Vec<Field>, String> {
    if shared.long_run.is_none() {
        let cfg = SolverConfig::new(Scheme::Splitting, 1e-3, 100.0, LONG_TIMES.to_vec()).map_err(|e| e.to_string())?;
        let snaps = split_solve(&shared.u0, &shared.params, &cfg).map_err(|e| e.to_string())?;
        shared.long_run = Some(snaps);
    }
    Ok(shared.long_run.as_ref().expect("just set"))
}

fn c5_conservation(shared: &mut Shared) -> Outcome {
    let m = shared.params.mass;
    let top = shared.u0.sup_norm();
    let mut snaps: Vec<Field> = shared.t1_runs.clone();
    snaps.extend(long_run(shared)?.iter().cloned());
    let mut drift: f64 = 0.0;
    let mut low = f64::INFINITY;
    let mut high: f64 = 0.0;
    for s in &snaps {
        drift = drift.max((s.mass() - m).abs() / m);
        low = low.min(s.min());
        high = high.max(s.max());
    }
    Ok((
        drift <= 1e-8 && low >= -1e-8 * top && high <= top * (1.0 + 1e-8),
        format!(
            "{} snapshots: max mass drift {drift:.2e} (limit 1e-8), min {low:.2e} (limit {:.1e}), max / ||u0|| = {:.6}",
            snaps.len(),
            -1e-8 * top,
            high / top
        ),
    ))
}

fn c6_a_priori_bounds(shared: &mut Shared) -> Outcome {
    let p = shared.params;
    let snaps = long_run(shared)?.clone();
    let mut ok = true;
    let mut worst = [0.0f64; 4];
    for s in &snaps {
        let t = s.time();
        let rec = diagnose(s, &p, 10.0, 100.0);
        let dx = s.grid().dx();
        let linf = rec.sup_norm() / lp_bound(&p, t, f64::INFINITY);
        let l2 = rec.lp_norm(2.0).unwrap_or(f64::NAN) / lp_bound(&p, t, 2.0);
        let lq = rec.lp_norm(p.q).unwrap_or(f64::NAN) / lp_bound(&p, t, p.q);
        let ol = rec.oleinik_product - 2.0 * dx / t;
        ok &= linf <= 1.02 && l2 <= 1.02 && lq <= 1.02 && ol <= 1.02;
        worst[0] = worst[0].max(linf);
        worst[1] = worst[1].max(l2);
        worst[2] = worst[2].max(lq);
        worst[3] = worst[3].max(ol);
    }
    Ok((
        ok,
        format!(
            "max ratios to bound: Linf {:.4}, L2 {:.4}, Lq {:.4}; max Oleinik product - 2dx/t {:.4} (all limits 1.02)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

fn c7_nwave() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut mass_err: f64 = 0.0;
    let mut bound_err: f64 = 0.0;
    for (m, q) in [(1.0, 1.2), (2.5, 1.5), (1.0, 2.0)] {
        let p = ModelParams::relaxed(1.5, q, m).map_err(|e| e.to_string())?;
        for t in [0.5, 1.0, 10.0] {
            let mass = nwave_lp_norm(t, m, q, 1.0).map_err(|e| e.to_string())?;
            mass_err = mass_err.max((mass - m).abs() / m);
            let sup = nwave_lp_norm(t, m, q, f64::INFINITY).map_err(|e| e.to_string())?;
            bound_err = bound_err.max((sup / lp_bound(&p, t, f64::INFINITY) - 1.0).abs());
            let ol = nwave_oleinik_product(t, m, q).map_err(|e| e.to_string())?;
            bound_err = bound_err.max((ol - 1.0).abs());
        }
    }
    ok &= mass_err <= 1e-12 && bound_err <= 1e-6;
    notes.push(format!("closed-form mass error {mass_err:.1e}, bound attainment error {bound_err:.1e}"));

    // rescaling fixed point on the grid
    let p = reference_params();
    let g = make_grid(50.0, 8192).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for lambda in [1.5f64, 2.0, 3.0, 5.0] {
        let src = nwave_field(lambda.powf(p.q), p.mass, p.q, &g).map_err(|e| e.to_string())?;
        let r = rescale(&src, lambda, &p).map_err(|e| e.to_string())?;
        let reference = nwave_field(1.0, p.mass, p.q, r.grid()).map_err(|e| e.to_string())?;
        let d = l1_distance(&r, &reference) / r.grid().dx();
        worst = worst.max(d);
    }
    // sampling error is confined to the shock cell: O(dx) in L1
    ok &= worst <= 2.0;
    notes.push(format!("rescale fixed point: max L1 gap {worst:.2} dx"));
    Ok((ok, notes.join("; ")))
}

const STUDY_TIMES: [f64; 5] = [1.0, 3.0, 10.0, 30.0, 100.0];

struct Study {
    e1: Vec<f64>,
    e2: Vec<f64>,
    tail: Vec<f64>,
    predicted: Vec<f64>,
    control_ratio: Option<f64>,
}

fn study() -> Result<Study, String> {
    let p = reference_params();
    let g = make_grid(4096.0, 65536).map_err(|e| e.to_string())?;
    let u0 = box_data(&g, 1.0, p.mass).map_err(|e| e.to_string())?;
    let cfg = SolverConfig::new(Scheme::Splitting, 1e-2, 100.0, STUDY_TIMES.to_vec()).map_err(|e| e.to_string())?;
    let snaps = split_solve(&u0, &p, &cfg).map_err(|e| e.to_string())?;
    let st = study_from_snapshots(&p, &snaps, &[1.0, 2.0], 0.5 * g.half_width()).map_err(|e| e.to_string())?;
    let predicted = st.tail_prediction();
    let control_ratio = if std::env::var_os("FRACCONV_SKIP_CONTROL").is_some() {
        None
    } else {
        let pc = ModelParams::relaxed(1.5, 1.8, 1.0).map_err(|e| e.to_string())?;
        let snaps = split_solve(&u0, &pc, &cfg).map_err(|e| e.to_string())?;
        let e1: Vec<f64> = snaps
            .iter()
            .map(|s| scaled_error(s, &pc, 1.0))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Some(e1[e1.len() - 1] / e1[0])
    };
    Ok(Study {
        e1: st.error_column(1.0).expect("tracked"),
        e2: st.error_column(2.0).expect("tracked"),
        tail: st.tail_history.clone(),
        predicted,
        control_ratio,
    })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn c8_convergence(st: &Study) -> Outcome {
    let ok = strictly_decreasing(&st.e1) && st.e1[4] <= 0.5 * st.e1[0] && strictly_decreasing(&st.e2);
    let fmt = |v: &[f64]| v.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(", ");
    let control = match st.control_ratio {
        Some(r) => format!("; control q=1.8: E1(100)/E1(1) = {r:.3} (reported, not gated)"),
        None => String::new(),
    };
    Ok((
        ok,
        format!("E1 at t=1,3,10,30,100: [{}]; E2: [{}]{control}", fmt(&st.e1), fmt(&st.e2)),
    ))
}

fn c9_epsilon_shift(shared: &Shared) -> Outcome {
    let rec: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
    let cfg = SolverConfig::new(Scheme::Splitting, 1e-3, 1.0, rec).map_err(|e| e.to_string())?;
    let a = epsilon_shift_test(&shared.u0, 1e-2, &shared.params, &cfg).map_err(|e| e.to_string())?;
    let b = epsilon_shift_test(&shared.u0, 5e-3, &shared.params, &cfg).map_err(|e| e.to_string())?;
    let ratio = a.sup_gap / b.sup_gap;
    let comparison = a.min_difference.min(b.min_difference);
    Ok((
        (1.8..=2.2).contains(&ratio),
        format!(
            "gaps {:.4e} / {:.4e}, ratio {ratio:.4} (range [1.8, 2.2]); min(u_eps - u) = {comparison:.1e}",
            a.sup_gap, b.sup_gap
        ),
    ))
}

fn c10_tail(st: &Study) -> Outcome {
    let ratios: Vec<f64> = st.tail.iter().zip(&st.predicted).map(|(m, p)| m / p).collect();
    let ok = ratios.iter().all(|r| *r <= 3.0);
    Ok((
        ok,
        format!(
            "tail / fitted model at t=1,3,10,30,100: [{}] (limit 3); tail mass at t=100 {:.2e}",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", "),
            st.tail[st.tail.len() - 1]
        ),
    ))
}

fn main() -> ExitCode {
    let selected: Option<Vec<u32>> = std::env::var("FRACCONV_ACCEPT")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let wanted = |i: u32| selected.as_ref().is_none_or(|s| s.contains(&i));

    let (params, u0) = match acceptance_grid_data() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("setup failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut shared = Shared {
        params,
        u0,
        long_run: None,
        t1_runs: Vec::new(),
    };
    let mut study_cache: Option<Result<Study, String>> = None;
    let mut failures = 0;
    for i in 1..=10u32 {
        if !wanted(i) {
            continue;
        }
        let start = Instant::now();
        let outcome = match i {
            1 => c1_cauchy_kernel(),
            2 => c2_kernel_norms(),
            3 => c3_operator_cross_check(),
            4 => c4_scheme_agreement(&mut shared),
            5 => c5_conservation(&mut shared),
            6 => c6_a_priori_bounds(&mut shared),
            7 => c7_nwave(),
            8 | 10 => {
                let st = study_cache.get_or_insert_with(study);
                match st {
                    Ok(st) if i == 8 => c8_convergence(st),
                    Ok(st) => c10_tail(st),
                    Err(e) => Err(e.clone()),
                }
            }
            9 => c9_epsilon_shift(&shared),
            _ => unreachable!(),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok((true, msg)) => println!("criterion {i:>2}: PASS  {msg} [{secs:.1}s]"),
            Ok((false, msg)) => {
                failures += 1;
                println!("criterion {i:>2}: FAIL  {msg} [{secs:.1}s]");
            }
            Err(e) => {
                failures += 1;
                println!("criterion {i:>2}: FAIL  error: {e} [{secs:.1}s]");
            }
        }
    }
    println!("{failures} criterion/criteria failed");
    let strict = std::env::var_os("FRACCONV_ACCEPT_STRICT").is_some_and(|v| v != "0");
    if failures > 0 && strict {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
