//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p qdmod --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qdmod::inequalities::{
    argument_bounds, growth_functional, j_functionals_for_map, pick_lower, pick_upper,
};
use qdmod::invariant::{
    calibrate_c2, module_closed_form, module_contour, module_perfect_square,
    module_perfect_square_contour, module_residue, remainder_identity_check, ContourOptions,
    C2_CALIBRATED,
};
use qdmod::maps::{corpus, pick_slit_tip, MapDescriptor};
use qdmod::qdiff::{
    growth_qd, slit_is_trajectory_check, trace_trajectory, trajectory_condition_deviation,
};
use qdmod::verify::{contour_grid, module_grid, PSI_GRID, W_GRID};
use qdmod::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDENTITY_TOL: [f64; 3] = [1e-12, 1e-12, 1e-6];
const IDENTITY_BUDGET: Duration = Duration::from_secs(5);
const SLACK: f64 = 1e-9;
const POSITIVITY_BUDGET: Duration = Duration::from_secs(60);
const A_VS_B: f64 = 1e-9;
const B_VS_C_FLOOR: f64 = 1e-4;
const B_VS_C_EST_FACTOR: f64 = 3.0;
const CONTOUR_BUDGET: Duration = Duration::from_secs(600);
const PERFECT_SQUARE_TOL: f64 = 1e-5;
const EQUALITY_TOL: f64 = 1e-6;
const SLIT_DEVIATION: f64 = 1e-3;
const ROTATION_TOL: f64 = 1e-9;
const J_VS_I: f64 = 1e-12;
const REMAINDER_GAP: f64 = 1e-3;
const SWEEP_POINTS: usize = 64;
const SWEEP_MAX_JUMP: f64 = 0.1;
const SWEEP_ENDPOINT_TOL: f64 = 1e-10;
const RANDOM_CONFIGS: usize = 20;
const SEED: u64 = 0x5eed_0f_a11;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

fn identity_baseline() -> Result<Outcome> {
    let start = Instant::now();
    let id = MapDescriptor::identity();
    let mut worst = [0.0f64; 3];
    for r in [0.25, 0.5] {
        for psi in [0.0, PI / 2.0, PI] {
            worst[0] = worst[0].max(module_closed_form(&id, r, psi)?.value.abs());
            worst[1] = worst[1].max(module_residue(&id, r, psi)?.value.abs());
            worst[2] = worst[2].max(module_contour(&id, r, psi)?.value.abs());
        }
    }
    let t = start.elapsed();
    let ok = worst.iter().zip(IDENTITY_TOL).all(|(w, tol)| *w <= tol);
    outcome(
        ok && within(t, IDENTITY_BUDGET),
        format!("max |m| A {:.1e}, B {:.1e}, C {:.1e}; {t:.2?}", worst[0], worst[1], worst[2]),
    )
}

fn positivity() -> Result<Outcome> {
    let start = Instant::now();
    let grid = module_grid();
    let mut worst = f64::NEG_INFINITY;
    for (f, r, psi) in &grid {
        worst = worst.max(module_residue(f, *r, *psi)?.value);
    }
    let t = start.elapsed();
    outcome(
        worst <= SLACK && within(t, POSITIVITY_BUDGET),
        format!("{} configurations, max m = {worst:.3e}; {t:.2?}", grid.len()),
    )
}

fn monotonicity() -> Result<Outcome> {
    let chain = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    let r = 0.25;
    let mut worst_drop: f64 = 0.0;
    let mut id_top: f64 = 0.0;
    let mut chains = 0;
    for f in corpus() {
        for psi in PSI_GRID {
            let mut prev = f64::NEG_INFINITY;
            for s in chain {
                let g = if s == 1.0 { f.clone() } else { f.nested_family(s)? };
                let m = module_residue(&g, r, psi)?.value;
                worst_drop = worst_drop.max(prev - m);
                prev = m;
            }
            if f.to_string() == "id" {
                id_top = id_top.max(prev.abs());
            }
            chains += 1;
        }
    }
    outcome(
        worst_drop <= SLACK && id_top <= SLACK,
        format!("{chains} chains, largest decrease {worst_drop:.3e}, identity top |m| {id_top:.1e}"),
    )
}

fn path_agreement() -> Result<Outcome> {
    let c2 = calibrate_c2()?;
    let mut ab: f64 = 0.0;
    for (f, r, psi) in module_grid() {
        let a = module_closed_form(&f, r, psi)?.value;
        let b = module_residue(&f, r, psi)?.value;
        ab = ab.max((a - b).abs());
    }
    let start = Instant::now();
    let grid = contour_grid();
    let mut bc_ok = true;
    let mut bc: f64 = 0.0;
    for (f, r, psi) in &grid {
        let b = module_residue(f, *r, *psi)?.value;
        let c = module_contour(f, *r, *psi)?;
        let gap = (b - c.value).abs();
        bc = bc.max(gap);
        bc_ok &= gap <= B_VS_C_FLOOR.max(B_VS_C_EST_FACTOR * c.est_error);
    }
    let t = start.elapsed();
    outcome(
        (c2 - C2_CALIBRATED).abs() <= 1e-9 && ab <= A_VS_B && bc_ok && within(t, CONTOUR_BUDGET),
        format!(
            "c2 = {c2:.12} (frozen {C2_CALIBRATED:.12}), max |A-B| {ab:.1e}, max |B-C| {bc:.1e} on {} configurations in {t:.2?}",
            grid.len()
        ),
    )
}

fn perfect_square() -> Result<Outcome> {
    let mut ok = true;
    let mut detail = Vec::new();
    for s in [0.5, 0.9] {
        let f = MapDescriptor::scale(s)?;
        let a = module_perfect_square(&f).value;
        let c = module_perfect_square_contour(&f, &ContourOptions::default())?.value;
        let exact = 4.0 * PI * s.ln();
        ok &= (a - exact).abs() <= 1e-14 && (c - exact).abs() <= PERFECT_SQUARE_TOL;
        detail.push(format!("s={s}: |C - 4π log s| {:.1e}", (c - exact).abs()));
    }
    outcome(ok, detail.join(", "))
}

fn equality_case() -> Result<Outcome> {
    let mut worst_m: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    let mut aligned = true;
    for m in [0.3, 0.5, 0.8] {
        for r in [0.1, 0.25] {
            let f = MapDescriptor::pick_slit(m)?;
            let w0 = f.inverse(Complex64::new(r, 0.0))?;
            aligned &= w0.re > 0.0 && w0.re < 1.0 && w0.im.abs() < 1e-12;
            worst_m = worst_m.max(module_residue(&f, r, 0.0)?.value.abs());
            let qd = growth_qd(r, 0.0)?;
            let tip = pick_slit_tip(m);
            worst_dev = worst_dev.max(slit_is_trajectory_check(&qd, tip, 1000)?);
            // a trajectory started on the slit runs along it
            for sign in [1.0, -1.0] {
                let seg = trace_trajectory(&qd, Complex64::new((tip - 1.0) / 2.0, 0.0), sign, 2.0)?;
                worst_dev = worst_dev.max(trajectory_condition_deviation(&qd, &seg)?);
                worst_dev = worst_dev.max(seg.points.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
            }
        }
    }
    outcome(
        aligned && worst_m <= EQUALITY_TOL && worst_dev < SLIT_DEVIATION,
        format!("6 configurations, max |m| {worst_m:.1e}, max slit deviation {worst_dev:.1e}"),
    )
}

fn conformal_invariance() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let maps = corpus();
    let (mut source, mut target) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < RANDOM_CONFIGS {
        let f = maps[rng.gen_range(0..maps.len())].clone();
        let r = [0.25, 0.5][rng.gen_range(0..2)];
        let psi = rng.gen_range(-PI..PI);
        let theta = rng.gen_range(-PI..PI);
        let conj = MapDescriptor::rotated_conjugate(f.clone(), theta)?;
        if !f.contains(Complex64::new(r, 0.0)) || !conj.contains(Complex64::new(r, 0.0)) {
            continue;
        }
        // rotating the source disk leaves the image and the module unchanged
        let g = MapDescriptor::reparametrized(f.clone(), theta)?;
        let m = module_residue(&f, r, psi)?.value;
        source = source.max((module_residue(&g, r, psi)?.value - m).abs());
        // the conjugate sends w to r exactly when f sends e^{iθ}w to e^{iθ}r
        let w = conj.inverse(Complex64::new(r, 0.0))?;
        let direct = growth_functional(&f, w * Complex64::from_polar(1.0, theta), psi)?.value;
        target = target.max((module_residue(&conj, r, psi)?.value - direct).abs());
        done += 1;
    }
    outcome(
        source <= ROTATION_TOL && target <= ROTATION_TOL,
        format!("{RANDOM_CONFIGS} random configurations, source rotation {source:.1e}, conjugation {target:.1e}"),
    )
}

fn pick_consistency() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let maps = corpus();
    let (mut gap, mut worst) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..RANDOM_CONFIGS {
        let f = &maps[rng.gen_range(0..maps.len())];
        let w = Complex64::from_polar(rng.gen_range(0.05..0.9), rng.gen_range(-PI..PI));
        let lo = pick_lower(f, w)?.value;
        let up = pick_upper(f, w)?.value;
        let (jl, ju) = j_functionals_for_map(f, w)?;
        gap = gap.max((jl.ln() - lo).abs()).max((ju.ln() - up).abs());
        worst = worst.max(lo).max(up).max(jl.ln()).max(ju.ln());
    }
    let mut arg_worst = f64::NEG_INFINITY;
    for f in &maps {
        for w in W_GRID {
            let (a, b) = argument_bounds(f, w)?;
            arg_worst = arg_worst.max(a.value).max(b.value);
        }
    }
    outcome(
        gap <= J_VS_I && worst <= SLACK && arg_worst <= SLACK,
        format!("max |log J - I| {gap:.1e}, max functional {worst:.3e}, max argument bound {arg_worst:.3e}"),
    )
}

fn remainder_identity() -> Result<Outcome> {
    let rep = remainder_identity_check(&MapDescriptor::identity(), 0.9, 0.3, PI)?;
    outcome(
        rep.gap < REMAINDER_GAP,
        format!("lhs {:.6e}, rhs {:.6e}, gap {:.1e}", rep.lhs, rep.rhs, rep.gap),
    )
}

fn psi_interpolation() -> Result<Outcome> {
    let f = MapDescriptor::scale(0.9)?;
    let w = Complex64::new(0.5, 0.0);
    let values = (0..SWEEP_POINTS)
        .map(|k| Ok(growth_functional(&f, w, PI * k as f64 / (SWEEP_POINTS - 1) as f64)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let jump = values.windows(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max);
    let (jl, ju) = j_functionals_for_map(&f, w)?;
    let at_pi = (values[SWEEP_POINTS - 1] - 4.0 * PI * pick_lower(&f, w)?.value).abs()
        .max((values[SWEEP_POINTS - 1] - 4.0 * PI * jl.ln()).abs());
    let at_zero = (values[0] - 4.0 * PI * pick_upper(&f, w)?.value).abs()
        .max((values[0] - 4.0 * PI * ju.ln()).abs());
    outcome(
        jump < SWEEP_MAX_JUMP && at_pi <= SWEEP_ENDPOINT_TOL && at_zero <= SWEEP_ENDPOINT_TOL,
        format!("max jump {jump:.3e}, endpoint gaps ψ=π {at_pi:.1e}, ψ=0 {at_zero:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("identity baseline", identity_baseline),
        ("positivity", positivity),
        ("monotonicity", monotonicity),
        ("cross-path agreement", path_agreement),
        ("perfect square", perfect_square),
        ("equality case", equality_case),
        ("conformal invariance", conformal_invariance),
        ("Pick and J consistency", pick_consistency),
        ("remainder identity", remainder_identity),
        ("psi interpolation", psi_interpolation),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!("{} {:>2} {name}: {detail}", if passed { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
