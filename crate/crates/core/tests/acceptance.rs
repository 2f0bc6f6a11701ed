//! Acceptance criteria 1–10. Each test prints one `criterion N: PASS|FAIL` line.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mht_core::atlas::{bracket_and_solve_homoclinic, region_classify, solve_ch, solve_csn, Panel, RegionOptions};
use mht_core::basins::{compute_basin, scan_b, separatrix_agreement, BasinModel, BasinOptions};
use mht_core::dynamics::{
    find_limit_cycle, verify_invariant_region, winding_number, CycleOptions, TimeDirection,
};
use mht_core::equilibria::{
    boundary_equilibria, cusp_coefficients, discriminant, equilibrium_jacobian, positive_equilibria,
    saddle_and_focus, sotomayor_quantities, trace_function_f, Classification, EquilibriumKind,
};
use mht_core::integrator::{integrate, Event, IntegrateOptions, Termination};
use mht_core::manifolds::BranchOptions;
use mht_core::model::{field_nondim, jacobian_nondim, DimParams, GrowthLaw, NondimParams, State};
use mht_core::sampling::{random_bistable_params, random_params};

fn report(n: u32, pass: bool, detail: &str, elapsed: Duration) {
    println!(
        "criterion {n}: {} ({detail}; {:.1} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
}

fn fig4() -> NondimParams {
    NondimParams::new(0.05, 0.05, 0.5, 0.175, 0.8).unwrap()
}

fn fig5(s: f64) -> NondimParams {
    NondimParams::new(0.07, 0.0645, 0.32, s, 0.736).unwrap()
}

fn fig7() -> NondimParams {
    NondimParams::new(0.05, 0.05, 0.58951256, 0.125, 0.60821818).unwrap()
}

fn slice(c: f64) -> NondimParams {
    NondimParams::new(0.05, 0.1, c, 0.071080895, 0.75).unwrap()
}

#[test]
fn criterion_01_boundary_equilibria() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        for e in boundary_equilibria(&p) {
            let ok = match e.kind {
                EquilibriumKind::Origin | EquilibriumKind::Carrying => e.classification == Classification::Saddle,
                EquilibriumKind::AlleeThreshold => e.classification.is_repeller(),
                EquilibriumKind::PredatorOnly => e.classification.is_attractor(),
                _ => false,
            };
            if !ok {
                failures += 1;
                eprintln!("{p:?}: {} is {}", e.kind.name(), e.classification.name());
            }
        }
    }
    let pass = failures == 0 && t.elapsed() < Duration::from_secs(10);
    report(1, pass, &format!("{failures} misclassified of 4000"), t.elapsed());
    assert!(pass);
}

#[test]
fn criterion_02_interior_equilibria() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for _ in 0..1000 {
        let p = random_bistable_params(&mut rng);
        let d = discriminant(&p);
        let (u1, u2) = (d.u1.unwrap(), d.u2.unwrap());
        let (p1, p2) = saddle_and_focus(&p).unwrap();
        let det1 = jacobian_nondim(&p, p1.xy()).det();
        let tr2 = jacobian_nondim(&p, p2.xy()).trace();
        let g = trace_function_f(&p, u2).unwrap() - p.c;
        let ok = d.value > 0.0
            && det1 < 0.0
            && tr2.signum() == g.signum()
            && p.m < u1
            && u1 < 1.0
            && p.m < u2
            && u2 < 1.0;
        if !ok {
            failures += 1;
            eprintln!("{p:?}: det1 {det1:e} tr2 {tr2:e} f-C {g:e} u1 {u1} u2 {u2}");
        }
    }
    report(2, failures == 0, &format!("{failures} failures of 1000"), t.elapsed());
    assert_eq!(failures, 0);
}

#[test]
fn criterion_03_caption_pins() {
    let t = Instant::now();
    let mut notes = Vec::new();

    // Fig. 4: Δ < 0 and 100 random starts reach (0, 0.5)
    let p = fig4();
    let d4 = discriminant(&p).value;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ball = [Event::ball(0, [0.0, p.c], 1e-3)];
    let opts = IntegrateOptions {
        t_max: 1e6,
        record: false,
        ..IntegrateOptions::default()
    };
    let mut converged = 0;
    for _ in 0..100 {
        let s0 = [rng.gen_range(0.0..3.0), rng.gen_range(1e-3..3.0 * (1.0 + p.c))];
        let traj = integrate(&p, s0, &opts, &ball);
        let end = traj.last();
        if traj.termination == Termination::EnteredAttractor(0) && end[0].hypot(end[1] - 0.5) <= 1e-3 * (1.0 + 1e-9) {
            converged += 1;
        }
    }
    let fig4_ok = d4 < 0.0 && converged == 100;
    notes.push(format!("Fig. 4: Δ = {d4:.4}, {converged}/100 reached (0,0.5)"));

    // Fig. 7: cusp at P3
    let p = fig7();
    let d = discriminant(&p);
    let u3 = d.u3.unwrap();
    let j = equilibrium_jacobian(&p, [u3, u3 + p.c], EquilibriumKind::P3);
    let j_full = jacobian_nondim(&p, [u3, u3 + p.c]);
    let cusp = cusp_coefficients(&p).unwrap();
    let fig7_ok = d.value.abs() < 1e-4
        && j.det().abs() < 1e-4
        && j.trace().abs() < 1e-4
        && j_full.det().abs() < 1e-4
        && j_full.trace().abs() < 1e-4
        && cusp.l20 > 0.0
        && cusp.l11.abs() > 0.0;
    notes.push(format!(
        "Fig. 7: Δ = {:.1e}, det = {:.1e}, tr = {:.1e}, L20 = {:.6}, L11 = {:.6}",
        d.value,
        j.det(),
        j.trace(),
        cusp.l20,
        cusp.l11
    ));

    // Fig. 5: S = 0.15 attracts, S = 0.05 repels
    let a = saddle_and_focus(&fig5(0.15)).unwrap().1.classification;
    let b = saddle_and_focus(&fig5(0.05)).unwrap().1.classification;
    let fig5_ok = a.is_attractor() && b.is_repeller();
    notes.push(format!("Fig. 5: P2 {} / {}", a.name(), b.name()));

    let pass = fig4_ok && fig7_ok && fig5_ok && t.elapsed() < Duration::from_secs(120);
    report(3, pass, &notes.join("; "), t.elapsed());
    assert!(pass);
}

#[test]
fn criterion_04_sotomayor_signs() {
    let t = Instant::now();
    let p = fig7();
    let s = sotomayor_quantities(&p).unwrap();
    let p3 = [s.u3, s.u3 + p.c];
    // central difference in Q with the state held at P3
    let h = 1e-6;
    let fp = field_nondim(&p.with_q(p.q + h), p3);
    let fm = field_nondim(&p.with_q(p.q - h), p3);
    let fd_fq = [(fp[0] - fm[0]) / (2.0 * h), (fp[1] - fm[1]) / (2.0 * h)];
    let wfq_fd = s.w[0] * fd_fq[0] + s.w[1] * fd_fq[1];
    // second difference along U = (1, 1)
    let h = 1e-4;
    let f0 = field_nondim(&p, p3);
    let fp = field_nondim(&p, [p3[0] + h, p3[1] + h]);
    let fm = field_nondim(&p, [p3[0] - h, p3[1] - h]);
    let d2 = [(fp[0] - 2.0 * f0[0] + fm[0]) / (h * h), (fp[1] - 2.0 * f0[1] + fm[1]) / (h * h)];
    let wd2f_fd = s.w[0] * d2[0] + s.w[1] * d2[1];
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let oracle_ok = rel(s.wfq, wfq_fd) < 1e-4 && rel(s.wd2f, wd2f_fd) < 1e-4;
    let signs_ok = s.wfq < 0.0 && s.wd2f > 0.0;
    let detail = format!(
        "W·F_Q = {:.7} (fd {:.7}), W·D²F(U,U) = {:.5} (fd {:.5}); oracle {}, signs {}",
        s.wfq,
        wfq_fd,
        s.wd2f,
        wd2f_fd,
        if oracle_ok { "agree" } else { "disagree" },
        if signs_ok { "as required" } else { "not as required" }
    );
    report(4, oracle_ok && signs_ok, &detail, t.elapsed());
    assert!(oracle_ok, "finite-difference oracle disagrees");
    assert!(signs_ok, "W·F_Q < 0 and W·D²F(U,U) > 0 required");
}

#[test]
fn criterion_05_slice_ordering() {
    let t = Instant::now();
    let base = slice(0.3);
    let c_sn = solve_csn(&base).unwrap();
    let c_h = solve_ch(&base).unwrap()[0].c;
    let bo = BranchOptions::default();
    let c_hom = bracket_and_solve_homoclinic(&base, c_h, 1e-3, 24, 1e-9, &bo).unwrap().c_hom;
    let ordered = c_hom < c_h && c_h < c_sn;
    let cs = [
        0.01,
        0.2,
        0.305,
        c_hom,
        0.5 * (c_hom + c_h),
        0.5 * (c_h + c_sn),
        c_sn,
        c_sn + 0.05,
    ];
    let ro = RegionOptions::default();
    let panels: Vec<Option<Panel>> = cs.iter().map(|&c| region_classify(&slice(c), &ro).ok().map(|r| r.panel)).collect();
    let expected = [
        Panel::I,
        Panel::II,
        Panel::III,
        Panel::IV,
        Panel::V,
        Panel::VI,
        Panel::VII,
        Panel::VIII,
    ];
    let seq_ok = panels.iter().zip(&expected).all(|(a, b)| *a == Some(*b));
    let names: Vec<&str> = panels.iter().map(|p| p.map_or("undecided", |p| p.roman())).collect();
    let pass = ordered && seq_ok && t.elapsed() < Duration::from_secs(300);
    report(
        5,
        pass,
        &format!("C_HOM = {c_hom:.7} < C_H = {c_h:.7} < C_SN = {c_sn:.7}; panels {}", names.join(",")),
        t.elapsed(),
    );
    assert!(pass);
}

#[test]
fn criterion_06_jacobian_vs_differences() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let s = [rng.gen_range(0.0..1.2), rng.gen_range(0.0..1.2 * (1.0 + p.c))];
        let j = jacobian_nondim(&p, s);
        // fourth-order central differences
        let mut fd = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-3 * (1.0 + s[k].abs());
            let at = |d: f64| {
                let mut x = s;
                x[k] += d;
                field_nondim(&p, x)
            };
            let (a, b, c, d) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
            for i in 0..2 {
                fd[i][k] = (-a[i] + 8.0 * b[i] - 8.0 * c[i] + d[i]) / (12.0 * h);
            }
        }
        let norm = |m: [[f64; 2]; 2]| m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let diff = [
            [j.0[0][0] - fd[0][0], j.0[0][1] - fd[0][1]],
            [j.0[1][0] - fd[1][0], j.0[1][1] - fd[1][1]],
        ];
        let scale = norm(j.0).max(1e-12);
        worst = worst.max(norm(diff) / scale);
    }
    report(6, worst < 1e-6, &format!("worst relative error {worst:.2e}"), t.elapsed());
    assert!(worst < 1e-6);
}

#[test]
fn criterion_07_invariant_region() {
    let t = Instant::now();
    let sets = [fig4(), fig5(0.15), fig5(0.05), fig7(), slice(0.31)];
    let opts = IntegrateOptions {
        t_max: 2e3,
        ..IntegrateOptions::default()
    };
    let (mut n, mut passed) = (0, 0);
    for (k, p) in sets.iter().enumerate() {
        let r = verify_invariant_region(p, 100, 70 + k as u64, &opts);
        n += r.samples;
        passed += r.passed;
        for w in &r.witnesses {
            eprintln!("{p:?}: {w:?}");
        }
    }
    report(7, passed == n, &format!("{passed}/{n} starts entered and stayed in Φ"), t.elapsed());
    assert_eq!(passed, n);
}

#[test]
fn criterion_08_separatrix_agreement() {
    let t = Instant::now();
    let m = BasinModel::Nondim(fig5(0.15));
    let g = compute_basin(&m, m.default_window(), 512, 512, &BasinOptions::default()).unwrap();
    let s = separatrix_agreement(&g, &BranchOptions::default()).unwrap();
    report(
        8,
        s.agreement >= 0.97,
        &format!(
            "{} of {} cells agree ({:.3}%)",
            (s.agreement * g.labels.len() as f64).round(),
            g.labels.len(),
            100.0 * s.agreement
        ),
        t.elapsed(),
    );
    assert!(s.agreement >= 0.97);
}

#[test]
fn criterion_09_fig10_crossing() {
    let t = Instant::now();
    let template = DimParams {
        r: 14.0,
        k: 150.0,
        m: 15.0,
        q: 1.08,
        s: 1.25,
        n: 0.05,
        b: 1.0,
        c: 0.75,
        variant: GrowthLaw::MultipleAllee,
    };
    let bs: Vec<f64> = std::iter::once(1.0).chain((1..=18).map(|k| 5.0 * k as f64)).collect();
    let bo = BasinOptions::default();
    let r = scan_b(&template, &bs, 256, 256, &bo).unwrap();
    // the strong-law area recomputed at the other end of the b range
    let strong_far = BasinModel::Dim(template.with_b(90.0).with_variant(GrowthLaw::StrongAllee));
    let far = compute_basin(&strong_far, strong_far.default_window(), 256, 256, &bo).unwrap();
    let far_area = mht_core::basins::basin_area(&far, mht_core::basins::BasinLabel::ToP2);
    let invariance = (far_area - r.strong.area_p2).abs() / r.strong.area_p2;
    let areas: Vec<String> = r.multiple.iter().map(|(b, a)| format!("{b}:{:.1}", a.area_p2)).collect();
    for line in &areas {
        eprintln!("b:area {line}");
    }
    let pass = r.b_cr.is_some() && invariance < 5e-3 && t.elapsed() < Duration::from_secs(900);
    report(
        9,
        pass,
        &format!(
            "strong area {:.1} (b-variation {:.2e}); multiple area {:.1} at b=1 to {:.1} at b=90; b_cr {}",
            r.strong.area_p2,
            invariance,
            r.multiple[0].1.area_p2,
            r.multiple.last().unwrap().1.area_p2,
            r.b_cr.map_or("none".to_string(), |b| format!("{b:.2}"))
        ),
        t.elapsed(),
    );
    assert!(invariance < 5e-3);
    assert!(r.b_cr.is_some(), "multiple-allee area never crosses the strong-allee level");
}

#[test]
fn criterion_10_unstable_cycle() {
    let t = Instant::now();
    let base = slice(0.3);
    let c_h = solve_ch(&base).unwrap()[0].c;
    let c_hom = bracket_and_solve_homoclinic(&base, c_h, 1e-3, 24, 1e-9, &BranchOptions::default())
        .unwrap()
        .c_hom;
    let copts = CycleOptions::default();
    let mut periods = Vec::new();
    let mut ok = true;
    for frac in [0.5, 0.25] {
        let c = c_hom + frac * (c_h - c_hom);
        let p = slice(c);
        let p2 = positive_equilibria(&p).into_iter().find(|e| e.kind == EquilibriumKind::P2).unwrap();
        let seed = State::nondim(p2.xy()[0] + 1e-5, p2.xy()[1]);
        match find_limit_cycle(&p, seed, TimeDirection::Reversed, &copts) {
            Ok(Some(cyc)) => {
                let poly: Vec<[f64; 2]> = cyc.points.iter().map(State::xy).collect();
                let encloses = winding_number(&poly, p2.xy()) != 0;
                ok &= encloses && cyc.residual < 1e-6;
                periods.push((c, cyc.period, cyc.residual));
            }
            _ => {
                ok = false;
                periods.push((c, f64::NAN, f64::NAN));
            }
        }
    }
    let grows = periods[1].1 > periods[0].1;
    let detail: Vec<String> = periods
        .iter()
        .map(|(c, per, res)| format!("C = {c:.6}: period {per:.1}, residual {res:.1e}"))
        .collect();
    report(10, ok && grows, &detail.join("; "), t.elapsed());
    assert!(ok && grows);
}
