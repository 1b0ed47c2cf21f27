//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success).
//!
//! Run: `cargo test --test acceptance -- --test-threads=1 --nocapture`

mod common;

use common::{assert_rel, conjugate_grid_oracle};
use std::time::Instant;
use ultradiff::analysis::{
    default_ladder, empirical_recursion_constant, fit_roumieu, iterate_norms, membership_report,
    npm_seminorm, BoxDomain, DeltaGrid, QuadratureGrid,
};
use ultradiff::metivier::{
    counterexample_report, directional_derivative_u, eval_u, CounterexampleConfig,
    MetivierParams,
};
use ultradiff::pdo::{ellipticity_check, parse_operator, EllipticityVerdict, LinearPDO};
use ultradiff::symbolic::{parse, Expr, MultiIndex};
use ultradiff::weights::{
    bound_shift, check_prop21, check_scaling_inequality, gevrey_conjugate_closed_form, Weight,
};

struct Criterion {
    name: &'static str,
    budget_s: f64,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str, budget_s: f64) -> Self {
        Self { name, budget_s, start: Instant::now(), failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.failures.push(detail);
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        if elapsed > self.budget_s {
            self.failures.push(format!(
                "runtime {elapsed:.1}s exceeded the {:.0}s budget",
                self.budget_s
            ));
        }
        if self.failures.is_empty() {
            println!("{}: PASS ({elapsed:.1}s)", self.name);
        } else {
            println!("{}: FAIL ({elapsed:.1}s)", self.name);
            for f in &self.failures {
                println!("    - {f}");
            }
            panic!("{}: {} sub-check(s) failed: {:?}", self.name, self.failures.len(), self.failures);
        }
    }
}

const Y_SET: [f64; 8] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

#[test]
fn criterion_1_young_conjugate_oracle() {
    let mut c = Criterion::new("criterion 1 (young-conjugate oracle)", 10.0);
    for w in Weight::catalog_defaults() {
        let conj = w.conjugate();
        for &y in &Y_SET {
            let got = conj.eval(y).expect("catalog conjugates converge");
            let oracle = conjugate_grid_oracle(&w, y);
            let rel = (got - oracle).abs() / (1.0 + oracle.abs());
            c.check(
                rel <= 1e-8,
                format!("{} y={y}: ternary {got} vs oracle {oracle} (rel {rel:.2e})", w.label()),
            );
        }
    }
    // the Gevrey closed form from the stationary point t* = s·log(sy),
    // which lies in the domain t ≥ 0 only for y ≥ 1/s
    let conj = Weight::gevrey(2.0).unwrap().conjugate();
    for &y in &Y_SET {
        let got = conj.eval(y).unwrap();
        let closed = gevrey_conjugate_closed_form(2.0, y);
        c.check(
            (got - closed).abs() <= 1e-6 * (1.0 + closed.abs()),
            format!("gevrey closed form at y={y}: {got} vs {closed}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_2_prop21_suite() {
    let mut c = Criterion::new("criterion 2 (associated-sequence suite)", 60.0);
    let ladder: Vec<f64> = (-2..=2).map(|k| 2f64.powi(k)).collect();
    for w in Weight::catalog_defaults() {
        let conj = w.conjugate();
        let rep = check_prop21(&conj, 60, &ladder, 1e-9).unwrap();
        c.check(
            rep.violations.is_empty(),
            format!(
                "{}: {} violations of properties (1)-(8), first: {:?}",
                w.label(),
                rep.violations.len(),
                rep.violations.first()
            ),
        );
        let scaling = check_scaling_inequality(&conj, 120, &ladder, 3.0, 1e-9).unwrap();
        c.check(
            scaling.is_empty(),
            format!("{}: {} scaling-inequality violations", w.label(), scaling.len()),
        );
        for &rho in &[2.0, 10.0] {
            for &lam in &ladder {
                let b = bound_shift(&conj, rho, lam, 3.0, 60, 1e-9).unwrap();
                c.check(
                    b.verified,
                    format!("{} shift bound ρ={rho} λ={lam}: witness {:?}", w.label(), b.witness),
                );
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_3_operator_algebra() {
    let mut c = Criterion::new("criterion 3 (operator algebra)", 30.0);
    let x_d = LinearPDO::from_partial_coeffs(
        1,
        [(MultiIndex(vec![1]), parse("x1", 1).unwrap())],
    )
    .unwrap();
    let sq = x_d.iterate(2).unwrap();
    let want_sq = LinearPDO::from_partial_coeffs(
        1,
        [
            (MultiIndex(vec![2]), parse("x1^2", 1).unwrap()),
            (MultiIndex(vec![1]), parse("x1", 1).unwrap()),
        ],
    )
    .unwrap();
    c.check(sq == want_sq, "x∂ squared != x²∂² + x∂".into());
    let cubed = x_d.iterate(3).unwrap();
    let want_cubed = LinearPDO::from_partial_coeffs(
        1,
        [
            (MultiIndex(vec![3]), parse("x1^3", 1).unwrap()),
            (MultiIndex(vec![2]), parse("3*x1^2", 1).unwrap()),
            (MultiIndex(vec![1]), parse("x1", 1).unwrap()),
        ],
    )
    .unwrap();
    c.check(cubed == want_cubed, "x∂ cubed != x³∂³ + 3x²∂² + x∂".into());
    // ∂∘x − x∘∂ = 1
    let dx = LinearPDO::from_partial_coeffs(1, [(MultiIndex(vec![1]), Expr::one())]).unwrap();
    let mult_x =
        LinearPDO::from_partial_coeffs(1, [(MultiIndex(vec![0]), parse("x1", 1).unwrap())])
            .unwrap();
    let comm = dx.compose(&mult_x).unwrap().sub(&mult_x.compose(&dx).unwrap()).unwrap();
    c.check(comm == LinearPDO::identity(1), format!("commutator != identity"));

    // 100 fuzzed compositions: apply(compose(P,Q), f) == apply(P, apply(Q, f))
    let mut rng_state = 0x12345678u64;
    let mut next = move || {
        rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((rng_state >> 33) as f64) / (u32::MAX as f64 / 2.0) - 1.0
    };
    let coeff_pool =
        ["1", "x1", "x2", "x1*x2", "x1^2", "x2^2 - 1", "2", "x1 + x2", "0.5*x1^2*x2"];
    for trial in 0..100 {
        let pick = |t: usize, k: usize| coeff_pool[(t * 7 + k * 3 + trial) % coeff_pool.len()];
        let mk = |t: usize| {
            LinearPDO::from_partial_coeffs(
                2,
                [
                    (MultiIndex(vec![((t + 1) % 3) as u32, (t % 2) as u32]),
                     parse(pick(t, 0), 2).unwrap()),
                    (MultiIndex(vec![(t % 2) as u32, ((t + 2) % 3) as u32]),
                     parse(pick(t, 1), 2).unwrap()),
                ],
            )
            .unwrap()
        };
        let p = mk(trial);
        let q = mk(trial + 13);
        let pq = p.compose(&q).unwrap();
        let f = parse(pick(trial, 2), 2).unwrap();
        let lhs = pq.apply(&f).unwrap();
        let rhs = p.apply(&q.apply(&f).unwrap()).unwrap();
        for _ in 0..4 {
            let x = [next(), next()];
            let a = lhs.eval_real_point(&x).unwrap();
            let b = rhs.eval_real_point(&x).unwrap();
            c.check(
                (a - b).norm() <= 1e-12 * (1.0 + a.norm()),
                format!("apply-twice mismatch, trial {trial} at {x:?}: {a} vs {b}"),
            );
        }
    }

    let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
    match ellipticity_check(&lap, &[(-1.0, 1.0), (-1.0, 1.0)], 5, 64, 1e-9, 0).unwrap() {
        EllipticityVerdict::Elliptic { c_min, .. } => c.check(
            (c_min - 1.0).abs() < 1e-12,
            format!("laplacian c_min = {c_min}, expected 1"),
        ),
        other => c.check(false, format!("laplacian judged non-elliptic: {other:?}")),
    }
    let heat = parse_operator("1*D[2,0] + 1*D[0,1]", 2).unwrap();
    match ellipticity_check(&heat, &[(-1.0, 1.0), (-1.0, 1.0)], 5, 64, 1e-9, 0).unwrap() {
        EllipticityVerdict::NonElliptic { witness_xi, symbol_abs, .. } => {
            // the symbol ξ₁² vanishes at ξ = (0, ±1)
            let dist = witness_xi[0].abs().min(
                ((witness_xi[0]).powi(2) + (witness_xi[1].abs() - 1.0).powi(2)).sqrt(),
            );
            c.check(
                dist < 1e-6 && symbol_abs < 1e-9,
                format!("witness ξ* = {witness_xi:?} |P_m| = {symbol_abs:.2e}"),
            );
        }
        other => c.check(false, format!("heat-type operator judged elliptic: {other:?}")),
    }
    c.finish();
}

#[test]
fn criterion_4_eigenfunction_law_and_fit_recovery() {
    let mut c = Criterion::new("criterion 4 (eigenfunction law, synthetic fits)", 30.0);
    let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
    let u = parse("sin(pi*x1)*sin(pi*x2)", 2).unwrap();
    let domain = BoxDomain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let grid = QuadratureGrid::uniform(2, 257).unwrap();
    let table = iterate_norms(&lap, &u, &domain, 6, &grid).unwrap();
    let mu = 2.0 * std::f64::consts::PI.powi(2);
    for (j, v) in table.values.iter().enumerate() {
        let want = mu.powi(j as i32) * 0.5;
        c.check(
            (v - want).abs() <= 1e-8 * want,
            format!("row {j}: {v} vs (2π²)^{j}/2 = {want}"),
        );
    }
    let conj = Weight::gevrey(2.0).unwrap().conjugate();
    for &k in &[1.0, 2.0, 4.0] {
        let c_true = 2.25f64;
        let rows: Vec<f64> = (0..=16u32)
            .map(|j| c_true * conj.scaled((j * 2) as f64, 1.0 / k).unwrap().exp())
            .collect();
        let fit = fit_roumieu(&rows, &conj, 2, &default_ladder()).unwrap();
        c.check(
            fit.k_star == k && (fit.c_star - c_true).abs() <= 1e-9 * c_true,
            format!("synthetic k={k}: recovered (k*, c*) = ({}, {})", fit.k_star, fit.c_star),
        );
    }
    c.finish();
}

#[test]
fn criterion_5_kotake_narasimhan_desk_check() {
    let mut c = Criterion::new("criterion 5 (elliptic growth comparison)", 300.0);
    let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
    let u = parse("exp(-x1^2-x2^2)", 2).unwrap();
    let domain = BoxDomain::new(vec![(-2.0, 2.0), (-2.0, 2.0)]).unwrap();
    let grid = QuadratureGrid::uniform(2, 257).unwrap();
    let conj = Weight::gevrey(2.0).unwrap().conjugate();
    let rep = membership_report(&u, &lap, &domain, &conj, 12, 24, &grid, 33).unwrap();
    c.check(
        rep.slope_rel_diff < 0.10,
        format!(
            "slopes differ by {:.2}%: iterate {:.4}, derivative {:.4}",
            rep.slope_rel_diff * 100.0,
            rep.iterate.slope_k1,
            rep.derivative.slope_k1
        ),
    );
    for side in [&rep.iterate, &rep.derivative] {
        for f in &side.beurling {
            c.check(
                f.log_c_full.is_finite() && f.stable,
                format!("{} beurling k={}: log c = {}, stable = {}", side.side, f.k, f.log_c_full, f.stable),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_6_metivier_quadrature_vs_gamma_oracle() {
    let mut c = Criterion::new("criterion 6 (quadrature vs incomplete gamma)", 300.0);
    let params = MetivierParams::default_bundle().unwrap();
    c.check(
        (params.eta - 0.475).abs() < 1e-14,
        format!("η computed as {}", params.eta),
    );
    for alpha in 0..=10u32 {
        let d = directional_derivative_u(&params, alpha, 1e-8).unwrap();
        let rel = (d.quadrature_re - d.closed_form).abs() / d.closed_form.abs();
        c.check(
            rel <= 1e-6 && d.quadrature_im.abs() <= 1e-6 * d.closed_form.abs(),
            format!(
                "α={alpha}: quadrature {} vs (1/η)Γ_upper((α+1)/η, 1) = {} (rel {rel:.2e})",
                d.quadrature_re, d.closed_form
            ),
        );
    }
    // u vanishes outside B(x₀, 2δ) = B(0, 1)
    let mut state = 0xabcdef12u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as f64) / (u32::MAX as f64 / 2.0) - 1.0
    };
    for _ in 0..20 {
        let dir = [next(), next()];
        let norm = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt().max(1e-6);
        let r = 1.0 + next().abs() * 3.0;
        let x = [dir[0] / norm * r, dir[1] / norm * r];
        let v = eval_u(&params, &x, 1e-10).unwrap();
        c.check(v.norm() < 1e-10, format!("u({x:?}) = {v} outside the support ball"));
    }
    c.finish();
}

#[test]
fn criterion_7_necessity_of_ellipticity() {
    let mut c = Criterion::new("criterion 7 (necessity of ellipticity)", 600.0);
    let params = MetivierParams::default_bundle().unwrap();
    let conj = Weight::gevrey(params.s).unwrap().conjugate();
    let cfg = CounterexampleConfig::default_for(&params);
    let sigma_target = 0.5 * (params.s + 1.0 / params.eta);
    let rep = counterexample_report(&params, &conj, sigma_target, &cfg).unwrap();
    let inv_eta = 1.0 / params.eta;
    let der = rep.derivative.fit.exponent;
    c.check(
        (der - inv_eta).abs() <= 0.05 * inv_eta,
        format!("derivative exponent {der:.4} vs 1/η = {inv_eta:.4} ({:.2}% off)",
            (der - inv_eta).abs() / inv_eta * 100.0),
    );
    let it = rep.iterate.fit.exponent;
    c.check(
        it <= params.s + 0.05,
        format!("iterate exponent {it:.4} > s + 0.05 = {}", params.s + 0.05),
    );
    c.check(rep.gap > 0.05, format!("gap {:.4} ≤ 0.05", rep.gap));
    c.check(rep.has_gap, format!("verdict: {}", rep.verdict));

    // control run: elliptic operator, same function
    let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
    let control = params.control_with(lap).unwrap();
    let crep = counterexample_report(&control, &conj, sigma_target, &cfg).unwrap();
    let diff = (crep.derivative.fit.exponent - crep.iterate.fit.exponent).abs();
    c.check(
        diff < 0.05,
        format!(
            "control gap {diff:.4} ≥ 0.05 (derivative {:.4}, iterate {:.4})",
            crep.derivative.fit.exponent, crep.iterate.fit.exponent
        ),
    );
    println!(
        "    [counterexample: derivative {der:.4}, iterate {it:.4}; control iterate {:.4}]",
        crep.iterate.fit.exponent
    );
    c.finish();
}

#[test]
fn criterion_8_parameter_gates() {
    let mut c = Criterion::new("criterion 8 (parameter gates)", 1.0);
    let op = parse_operator("1*D[2,0]", 2).unwrap();
    // ε must satisfy 0 < ε < m(s−σ)/(2ms−σ) ≈ 0.1538 at defaults
    let e = MetivierParams::new(2.0, 1.5, 0.2, 0.5, vec![0.0, 0.0], vec![0.0, 1.0], op.clone());
    c.check(e.is_err(), "ε = 0.2 accepted".into());
    if let Err(err) = e {
        c.check(
            err.to_string().contains("0.153846"),
            format!("rejection message lacks the bound: {err}"),
        );
    }
    let e = MetivierParams::new(2.0, 1.5, 0.1, 0.5, vec![0.0, 0.0], vec![0.3, 1.0], op);
    c.check(e.is_err(), "non-unit ξ₀ accepted".into());
    c.finish();
}

#[test]
fn criterion_9_seminorm_machinery() {
    let mut c = Criterion::new("criterion 9 (seminorm machinery)", 60.0);
    // N^{1·1}(x1) on [0,1]: δ√(1−2δ) maximized at δ = 1/3
    let u = parse("x1", 1).unwrap();
    let domain = BoxDomain::new(vec![(0.0, 1.0)]).unwrap();
    let dg = DeltaGrid::geometric(1e-3, 1024).unwrap();
    let grid = QuadratureGrid::uniform(1, 129).unwrap();
    let v = npm_seminorm(&u, 1, 1, &domain, &dg, &grid).unwrap();
    assert_rel(v, 0.19245008972987523, 1e-4, "npm analytic maximizer");
    c.check(
        (v - 0.19245008972987523).abs() <= 1e-4,
        format!("npm value {v}"),
    );
    // recursion constants for the Laplacian eigenfunction
    let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
    let f = parse("sin(pi*x1)*sin(pi*x2)", 2).unwrap();
    let sq = BoxDomain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let conj = Weight::gevrey(2.0).unwrap().conjugate();
    let rows = empirical_recursion_constant(
        &f,
        &lap,
        4,
        1.0,
        &conj,
        &sq,
        &DeltaGrid::geometric(1e-2, 16).unwrap(),
        &QuadratureGrid::uniform(2, 33).unwrap(),
    )
    .unwrap();
    for row in &rows {
        let ok = row.c0.map(|v| v.is_finite() && v > 0.0).unwrap_or(false);
        c.check(ok, format!("p={}: C₀ = {:?}", row.p, row.c0));
    }
    c.finish();
}
