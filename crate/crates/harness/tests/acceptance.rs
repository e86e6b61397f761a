//! Acceptance suite: ten criteria, one PASS/FAIL line each. Runs as a plain
//! binary so the lines are always printed.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geodesic_harness::random::{self, rng};
use geodesic_harness::run::{fd_check, run_fig1, run_fig2, run_jacobi, RunOutcome};
use geodesic_harness::{Experiment, ExperimentSpec, Method, Outcome};
use geodesic_opt::brockett::{brockett_third_component, BrockettProblem};
use geodesic_opt::convergence::{estimate_order, fit_order_pairs, pre_stagnation_window, IterationTrace};
use geodesic_opt::eigen::{cg_extreme_eigen, newton_rayleigh, rqi, EigenConfig};
use geodesic_opt::manifold::{Manifold, Sense};
use geodesic_opt::rayleigh::{RayleighObjective, RayleighProblem};
use geodesic_opt::rotation::{so_geodesic, so_transport, Rotation, SkewMatrix, SpecialOrthogonal};
use geodesic_opt::solvers::{conjugate_gradient, SolverConfig};
use geodesic_opt::sphere::{line_angle, sphere_exp, sphere_transport, Sphere, SpherePoint};
use nalgebra::{DMatrix, DVector};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn spec(experiment: Experiment, method: Method, seed: u64) -> ExperimentSpec {
    ExperimentSpec::new(experiment, method, seed)
}

fn trace(o: &RunOutcome) -> &IterationTrace<f64> {
    &o.trace.as_ref().expect("trace").0
}

fn detail<'a>(o: &'a RunOutcome, key: &str) -> &'a str {
    o.report
        .details
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or("")
}

fn descending(n: usize) -> Vec<f64> {
    (0..n).map(|i| (n - i) as f64).collect()
}

fn derivative_correctness() -> Verdict {
    let families = fd_check(&spec(Experiment::FdCheck, Method::Newton, 0)).unwrap();
    let ok = families.iter().all(|f| f.passed());
    let summary: Vec<String> = families
        .iter()
        .map(|f| format!("{} n={} grad {:.1e} hess {:.1e}", f.name, f.n, f.max_gradient, f.max_hessian))
        .collect();
    verdict(ok, summary.join("; "))
}

/// RK4 for `ẇ = −⟨γ̇, w⟩γ` along `γ(t) = x cos t + h sin t`.
fn sphere_transport_ode(x: &DVector<f64>, h: &DVector<f64>, t: f64, w: &DVector<f64>) -> DVector<f64> {
    let steps = 2000;
    let dt = t / steps as f64;
    let rhs = |s: f64, w: &DVector<f64>| {
        let g = x * s.cos() + h * s.sin();
        let gd = h * s.cos() - x * s.sin();
        -g * gd.dot(w)
    };
    let mut w = w.clone();
    for k in 0..steps {
        let s = k as f64 * dt;
        let k1 = rhs(s, &w);
        let k2 = rhs(s + dt / 2.0, &(&w + &k1 * (dt / 2.0)));
        let k3 = rhs(s + dt / 2.0, &(&w + &k2 * (dt / 2.0)));
        let k4 = rhs(s + dt, &(&w + &k3 * dt));
        w += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    w
}

/// RK4 for `Ẏ = −½[X, Y]`, the transport equation in algebra coordinates.
fn so_transport_ode(x: &DMatrix<f64>, t: f64, y: &DMatrix<f64>) -> DMatrix<f64> {
    let steps = 2000;
    let dt = t / steps as f64;
    let rhs = |y: &DMatrix<f64>| (x * y - y * x) * -0.5;
    let mut y = y.clone();
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&(&y + &k1 * (dt / 2.0)));
        let k3 = rhs(&(&y + &k2 * (dt / 2.0)));
        let k4 = rhs(&(&y + &k3 * dt));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    y
}

fn geometry_invariants() -> Verdict {
    let mut r = rng(2);
    let (mut on, mut inner, mut ode) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..20 {
        let n = 3 + k % 8;
        let sphere = Sphere::<f64>::new(n);
        let x = random::sphere_point(&mut r, n);
        let h = random::unit_tangent(&mut r, &x);
        let t = 0.3 + 2.0 * k as f64;
        let y = sphere_exp(&x, &h, t).unwrap();
        on = on.max((y.as_vector().norm() - 1.0).abs());
        let u = random::unit_tangent(&mut r, &x) * 1.7;
        let v = random::unit_tangent(&mut r, &x) * 0.6;
        let tu = sphere_transport(&x, &h, t, &u).unwrap();
        let tv = sphere_transport(&x, &h, t, &v).unwrap();
        inner = inner.max((tu.dot(&tv) - u.dot(&v)).abs());
        inner = inner.max((sphere.transport(&x, &h, t, &u).dot(&sphere.transport(&x, &h, t, &v)) - u.dot(&v)).abs());
        let s = 0.3 + 0.1 * k as f64;
        let exact = sphere_transport(&x, &h, s, &u).unwrap();
        ode = ode.max((exact - sphere_transport_ode(x.as_vector(), &h, s, &u)).norm());

        let m = 2 + k % 7;
        let group = SpecialOrthogonal::<f64>::new(m);
        let theta = random::rotation(&mut r, m);
        let dir = random::unit_skew(&mut r, m);
        let big = &dir * (1.0 + k as f64);
        let moved = group.exp(&theta, &big, 1.0);
        on = on.max(moved.orthogonality_defect());
        let a = &random::unit_skew(&mut r, m) * 2.0;
        let b = random::unit_skew(&mut r, m);
        let ta = so_transport(&a, &big, 0.7);
        let tb = so_transport(&b, &big, 0.7);
        inner = inner.max((ta.inner(&tb) - a.inner(&b)).abs());
        let exact = so_transport(&a, &dir, s);
        ode = ode.max((exact.matrix() - so_transport_ode(dir.matrix(), s, a.matrix())).norm());
    }
    verdict(
        on <= 1e-10 && inner <= 1e-12 && ode <= 1e-8,
        format!("manifold residual {on:.1e}, inner-product drift {inner:.1e}, ODE gap {ode:.1e}"),
    )
}

fn figure1() -> Verdict {
    let seed = 11;
    let sd = run_fig1(&spec(Experiment::Fig1, Method::Sd, seed)).unwrap();
    let cg = run_fig1(&spec(Experiment::Fig1, Method::Cg, seed)).unwrap();
    let nr = run_fig1(&spec(Experiment::Fig1, Method::NewtonRq, seed)).unwrap();
    let sd_fit = sd.report.order.clone().unwrap().unwrap();
    let nr_fit = nr.report.order.clone().unwrap().unwrap();
    let sd_hit = trace(&sd).first_below(1e-10);
    let cg_hit = trace(&cg).first_below(1e-10);
    let rho_ok = [&sd, &cg, &nr].iter().all(|o| {
        let rho: f64 = detail(o, "final_rho").parse().unwrap();
        o.report.outcome == Outcome::Converged && (rho - 21.0).abs() <= 1e-10
    });
    let ok = (sd_fit.order - 1.0).abs() <= 0.2
        && sd_fit.rate < 1.0
        && matches!((cg_hit, sd_hit), (Some(c), Some(s)) if c < s)
        && nr_fit.order >= 2.5
        && rho_ok;
    verdict(
        ok,
        format!(
            "sd order {:.3} rate {:.3}; 1e-10 reached at cg {:?} vs sd {:?}; newton-rq order {:.3}; rho within 1e-10: {rho_ok}",
            sd_fit.order, sd_fit.rate, cg_hit, sd_hit, nr_fit.order
        ),
    )
}

fn near_top(n: usize, angle: f64, seed: u64) -> SpherePoint<f64> {
    let e1 = SpherePoint::basis(n, 0);
    let h = random::unit_tangent(&mut rng(seed), &e1);
    sphere_exp(&e1, &h, angle).unwrap()
}

fn rqi_agreement() -> Verdict {
    let n = 21;
    let problem = RayleighProblem::diagonal(&descending(n));
    let e1 = SpherePoint::<f64>::basis(n, 0).into_vector();
    let one = EigenConfig {
        max_iter: 1,
        residual_tol: 0.0,
        ..EigenConfig::default()
    };
    let x0 = near_top(n, 1e-2, 40);
    let a = newton_rayleigh(&problem, x0.clone(), &one).unwrap().x;
    let b = rqi(&problem, x0, &one).unwrap().x;
    let gap = line_angle(a.as_vector(), b.as_vector());

    // One step from several starting angles: the next error against the
    // current one has slope ≈ 3 in log-log.
    let mut orders = Vec::new();
    for method in [newton_rayleigh::<f64>, rqi::<f64>] {
        let pairs: Vec<(f64, f64)> = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
            .iter()
            .map(|&psi| {
                let x0 = near_top(n, psi, 41);
                let x1 = method(&problem, x0.clone(), &one).unwrap().x;
                (line_angle(&e1, x0.as_vector()), line_angle(&e1, x1.as_vector()))
            })
            .collect();
        orders.push(fit_order_pairs(&pairs).unwrap().order);
        let config = EigenConfig {
            target: Some(e1.clone()),
            ..EigenConfig::default()
        };
        let run = method(&problem, near_top(n, 1e-1, 42), &config).unwrap();
        let errors = run.trace.errors();
        orders.push(estimate_order(&errors, pre_stagnation_window(&errors)).unwrap().order);
    }
    let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        gap <= 1e-3 && min >= 2.5,
        format!("next-iterate gap {gap:.2e}; orders (pairs, sequence) newton-rq {:.2} {:.2}, rqi {:.2} {:.2}", orders[0], orders[1], orders[2], orders[3]),
    )
}

fn figure2() -> Verdict {
    let seed = 5;
    let newton = run_fig2(&spec(Experiment::Fig2, Method::Newton, seed)).unwrap();
    let sd = run_fig2(&spec(Experiment::Fig2, Method::Sd, seed)).unwrap();
    let cg = run_fig2(&spec(Experiment::Fig2, Method::Cg, seed)).unwrap();
    let newton_hit = trace(&newton).first_below(1e-9);
    let sd_hit = trace(&sd).first_below(1e-9);
    let cg_hit = trace(&cg).first_below(1e-9);
    let monotone = detail(&sd, "f_nondecreasing") == "true";
    let drift = [&newton, &sd, &cg]
        .iter()
        .map(|o| detail(o, "max_isospectral_drift").parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    let ok = matches!(newton_hit, Some(i) if i <= 3)
        && monotone
        && matches!((cg_hit, sd_hit), (Some(c), Some(s)) if c < s)
        && drift <= 1e-10;
    verdict(
        ok,
        format!("newton below 1e-9 at {newton_hit:?}; sd monotone {monotone}; 1e-9 reached at cg {cg_hit:?} vs sd {sd_hit:?}; drift {drift:.1e}"),
    )
}

fn step_estimate_validity() -> Verdict {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for k in 0..50 {
        let n = 2 + k % 7;
        let q = random::symmetric(&mut r, n);
        let p = BrockettProblem::new(q, DVector::from_vec(descending(n))).unwrap();
        let theta = random::rotation(&mut r, n);
        let omega = p.gradient(&theta);
        let t_est = match p.step_estimate(&theta, &omega) {
            Ok(t) => t,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let mut prev = p.value(&theta);
        for i in 1..=1000 {
            let t = t_est * i as f64 / 1000.0;
            let f = p.value(&so_geodesic(&theta, &omega, t));
            worst = worst.max(prev - f);
            prev = f;
        }
    }
    verdict(
        failures == 0 && worst <= 1e-12,
        format!("largest decrease {worst:.1e} over 50 instances, {failures} without an estimate"),
    )
}

fn jacobi_cubic() -> Verdict {
    let o = run_jacobi(&spec(Experiment::Jacobi, Method::Newton, 7)).unwrap();
    let fit = o.report.order.clone().unwrap();
    let order = fit.as_ref().map(|f| f.order).unwrap_or(f64::NAN);
    let last = o.report.final_error.unwrap();
    let monotone = detail(&o, "off_diagonal_decreasing") == "true";
    verdict(
        order >= 2.5 && monotone && last < 1e-11,
        format!("n = 5, order {order:.3}, strictly decreasing {monotone}, final off-diagonal {last:.1e}"),
    )
}

/// `d³/dt³ f(e^{tY})` at the identity, six-point stencil.
fn third_derivative(p: &BrockettProblem<f64>, y: &SkewMatrix<f64>, t: f64) -> f64 {
    let id = Rotation::identity(p.n());
    let g = |s: f64| p.value(&so_geodesic(&id, y, s));
    (-g(3.0 * t) + 8.0 * g(2.0 * t) - 13.0 * g(t) + 13.0 * g(-t) - 8.0 * g(-2.0 * t) + g(-3.0 * t))
        / (8.0 * t * t * t)
}

fn third_component() -> Verdict {
    let mut r = rng(8);
    let mut zero = 0.0f64;
    for k in 0..100 {
        let n = 3 + k % 6;
        let nu: Vec<f64> = random::normal_vector(&mut r, n).iter().copied().collect();
        let alpha = random::normal_vector(&mut r, 1)[0];
        let h: Vec<f64> = nu.iter().map(|v| alpha * v).collect();
        let x = random::unit_skew(&mut r, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    zero = zero.max(brockett_third_component(&h, &nu, &x, i, j).abs());
                }
            }
        }
    }
    let mut rel = 0.0f64;
    for k in 0..10 {
        let n = 3 + k % 4;
        let h: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 + 0.3 * ((i + k) as f64).cos()).collect();
        let nu = descending(n);
        let q = DMatrix::from_diagonal(&DVector::from_row_slice(&h));
        let p = BrockettProblem::new(q, DVector::from_vec(nu.clone())).unwrap();
        let x = random::unit_skew(&mut r, n);
        let (i, j) = (k % n, (k + 1) % n);
        let e = SkewMatrix::basis(n, i.min(j), i.max(j));
        let formula = brockett_third_component(&h, &nu, &x, i.min(j), i.max(j));
        let sigma = 1e-2;
        let plus = third_derivative(&p, &(&x + &(&e * sigma)), 1e-2);
        let minus = third_derivative(&p, &(&x - &(&e * sigma)), 1e-2);
        let fd = (plus - minus) / (2.0 * sigma) / 3.0;
        rel = rel.max((fd - formula).abs() / formula.abs().max(1.0));
    }
    verdict(
        zero <= 1e-14 && rel <= 1e-4,
        format!("max |component| with h = αν: {zero:.1e}; finite-difference relative gap {rel:.1e}"),
    )
}

fn cg_mechanics() -> Verdict {
    // Exact line searches leave the new gradient orthogonal to the
    // translated direction.
    let n = 21;
    let mut target = DVector::zeros(n);
    target[0] = 1.0;
    let objective = RayleighObjective::new(RayleighProblem::diagonal(&descending(n)), Sense::Maximize)
        .with_target(target);
    let mut orth = 0.0f64;
    for seed in 0..5 {
        let x0 = random::sphere_point(&mut rng(90 + seed), n);
        let run = conjugate_gradient(&objective, x0, &SolverConfig::default()).unwrap();
        orth = run.orthogonality.iter().copied().fold(orth, f64::max);
    }

    // Closed-form great-circle maximizer against a scan of ρ.
    let mut r = rng(9);
    let mut gap = 0.0f64;
    for k in 0..20 {
        let m = 3 + k % 8;
        let p = RayleighProblem::new(random::symmetric(&mut r, m)).unwrap();
        let x = random::sphere_point(&mut r, m);
        let h = random::unit_tangent(&mut r, &x);
        let t_closed = p.line_max(&x, &h).unwrap().arc();
        let (qx, qh) = (p.matrix() * x.as_vector(), p.matrix() * &h);
        let steps = 400_000;
        let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..steps {
            let t = PI * i as f64 / steps as f64;
            let (c, s) = (t.cos(), t.sin());
            let y = x.as_vector() * c + &h * s;
            let rho = y.dot(&(&qx * c + &qh * s));
            if rho > best {
                best = rho;
                best_t = t;
            }
        }
        let d = (t_closed - best_t).abs();
        gap = gap.max(d.min(PI - d));
    }

    // Synthetic sequences e_{i+1} = θ e_i^p.
    let mut fit_gap = 0.0f64;
    for (p, theta, e0) in [(1.0, 0.5, 0.5), (2.0, 0.9, 0.5), (3.0, 1.1, 0.5)] {
        let mut errors = vec![e0];
        while errors.len() < 40 {
            let next: f64 = theta * f64::powf(*errors.last().unwrap(), p);
            if next < 1e-300 {
                break;
            }
            errors.push(next);
        }
        let fit = estimate_order(&errors, pre_stagnation_window(&errors)).unwrap();
        fit_gap = fit_gap.max((fit.order - p).abs());
    }
    verdict(
        orth <= 1e-8 && gap <= 1e-5 && fit_gap <= 0.05,
        format!("max |<G', tH>|/(|G'||H|) {orth:.1e}; closed form vs scan {gap:.1e}; order recovery gap {fit_gap:.1e}"),
    )
}

fn oracle_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    let mut r = rng(10);
    for n in [4, 10] {
        let q = random::symmetric(&mut r, n);
        let eig = q.clone().symmetric_eigen();
        let (top, _) = eig.eigenvalues.argmax();
        let lambda = eig.eigenvalues[top];
        let v = eig.eigenvectors.column(top).into_owned();
        let p = RayleighProblem::new(q).unwrap();
        let cg = cg_extreme_eigen(&p, random::sphere_point(&mut r, n), &EigenConfig::default()).unwrap();
        let vp = SpherePoint::normalize(v.clone()).unwrap();
        let start = sphere_exp(&vp, &random::unit_tangent(&mut r, &vp), 1e-2).unwrap();
        let nr = newton_rayleigh(&p, start, &EigenConfig::default()).unwrap();
        for res in [&cg, &nr] {
            worst = worst.max((res.rho - lambda).abs());
            worst = worst.max(line_angle(&v, res.x.as_vector()));
        }
    }
    verdict(worst <= 1e-8, format!("largest eigenvalue/angle gap against the dense solve {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Option<Duration>); 10] = [
        ("derivative correctness", derivative_correctness, Some(Duration::from_secs(10))),
        ("geometry invariants", geometry_invariants, None),
        ("figure 1 reproduction", figure1, Some(Duration::from_secs(5))),
        ("cubic RQI agreement", rqi_agreement, None),
        ("figure 2 reproduction", figure2, Some(Duration::from_secs(30))),
        ("step estimate validity", step_estimate_validity, None),
        ("Jacobi cubic convergence", jacobi_cubic, None),
        ("third covariant component", third_component, None),
        ("CG mechanics", cg_mechanics, None),
        ("oracle equivalence", oracle_equivalence, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let passed = v.passed && in_time;
        if !passed {
            failed += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(" (budget {b:?})"));
        println!(
            "criterion {:>2} {}: {} [{:.2?}{budget_note}] {}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            name,
            elapsed,
            v.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
