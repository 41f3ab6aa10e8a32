//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line with its pinned tolerance(s).

use elliptic_pade::pade::{self, PadeParams};
use elliptic_pade::painleve::{self, AnchorRole, CurveAnchor, SurfacePoint};
use elliptic_pade::sampling::{draw_annulus, draw_bases, draw_gauge, draw_solved};
use elliptic_pade::special::{self, Bases};
use elliptic_pade::{determinants, lax, weyl, Scalar};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn rel(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / (a.norm().max(b.norm())).max(f64::MIN_POSITIVE)
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_special_function_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = C::from_polar(rng.gen_range(0.02..0.3), rng.gen_range(-3.0..3.0));
        let q = C::from_polar(rng.gen_range(0.02..0.3), rng.gen_range(-3.0..3.0));
        let b = Bases::new(p, q).unwrap();
        let x = draw_annulus(&mut rng, 0.5, 2.0);
        // theta quasi-periodicity
        let th = special::theta(x, &b).unwrap();
        worst = worst.max(rel(special::theta(p * x, &b).unwrap(), -th / x));
        worst = worst.max(rel(special::theta(1.0 / x, &b).unwrap(), -th / x));
        // Gamma shift
        let ga = special::ell_gamma(x, &b).unwrap();
        worst = worst.max(rel(special::ell_gamma(q * x, &b).unwrap(), th * ga));
        // Pochhammer-Gamma consistency: theta(x)_s = Gamma(q^s x)/Gamma(x)
        let s = 3usize;
        worst = worst.max(rel(
            special::theta_pochhammer(x, s, &b).unwrap(),
            special::ell_gamma(q.powu(s as u32) * x, &b).unwrap() / ga,
        ));
        // p = 0 reduction
        let b0 = Bases::new(C::new(0.0, 0.0), q).unwrap();
        worst = worst.max(rel(special::theta(x, &b0).unwrap(), C::new(1.0, 0.0) - x));
    }
    let dt = start.elapsed().as_secs_f64();
    report(
        "1 special-function identities",
        worst <= 1e-12 && dt < 1.0,
        &format!("max residual {worst:.3e} <= 1e-12 over 200 draws, {dt:.2}s < 1s"),
    );
}

#[test]
fn criterion_2_interpolation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut worst_grid: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    for m in 0..=4usize {
        for n in 0..=(4 - m) {
            for _ in 0..20 {
                let (pp, b, ip) = draw_solved(&mut rng, m, n);
                worst_grid = worst_grid.max(ip.residual_norm);
                for _ in 0..2 {
                    let x = draw_annulus(&mut rng, 0.8, 1.25);
                    let xr = pp.k / (b.q * x);
                    worst_sym = worst_sym.max(rel(
                        pade::eval_u(&ip, xr, &pp, &b).unwrap(),
                        pade::eval_u(&ip, x, &pp, &b).unwrap(),
                    ));
                    worst_sym = worst_sym.max(rel(
                        pade::eval_v(&ip, xr, &pp, &b).unwrap(),
                        pade::eval_v(&ip, x, &pp, &b).unwrap(),
                    ));
                }
            }
        }
    }
    let dt = start.elapsed().as_secs_f64();
    report(
        "2 interpolation",
        worst_grid <= 1e-8 && worst_sym <= 1e-8 && dt < 5.0,
        &format!("grid {worst_grid:.3e} <= 1e-8, symmetry {worst_sym:.3e} <= 1e-8, {dt:.2}s < 5s"),
    );
}

fn lax_fixture(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (lax::LaxData, Bases) {
    for _ in 0..16 {
        let (pp, b, ip) = draw_solved(rng, m, n);
        let c = draw_gauge(rng);
        if let Ok(d) = lax::LaxData::new(&pp, c, &ip, &b) {
            return (d, b);
        }
    }
    panic!("no generic lax draw at ({m},{n})");
}

#[test]
fn criterion_3_contiguity_lax() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    // retry until the draw is generic enough for a well-conditioned fit
    let (d, b, fit) = loop {
        let (d, b) = lax_fixture(&mut rng, 2, 2);
        let fit = lax::fit_lax(&d, &b, &mut rng).unwrap();
        if fit.fit_residual < 1e-10 {
            break (d, b, fit);
        }
    };
    let mut l23: f64 = 0.0;
    let mut l11p: f64 = 0.0;
    for _ in 0..10 {
        let x = lax::sample_point(&mut rng, &d, &b);
        for kind in [lax::YKind::V, lax::YKind::YU] {
            l23 = l23.max(lax::l_residual(lax::Lrel::L2, kind, x, &fit, &d, &b).unwrap());
            l23 = l23.max(lax::l_residual(lax::Lrel::L3, kind, x, &fit, &d, &b).unwrap());
            l11p = l11p.max(lax::l_residual(lax::Lrel::L1, kind, x, &fit, &d, &b).unwrap());
            l11p = l11p.max(lax::l_residual(lax::Lrel::L1p, kind, x, &fit, &d, &b).unwrap());
        }
    }
    // Casorati closed forms at fresh points
    let mut dform: f64 = 0.0;
    for which in 1..=4u8 {
        for _ in 0..3 {
            let x = lax::sample_point(&mut rng, &d, &b);
            dform = dform.max(rel(
                lax::casorati(which, x, &d, &b).unwrap(),
                lax::d_form(which, x, &fit, &d, &b).unwrap(),
            ));
        }
    }
    // D2(x) = D1(qx) and the D3/D4 reflection
    let mut refl: f64 = 0.0;
    let pp = &d.base.pp;
    for _ in 0..3 {
        let x = lax::sample_point(&mut rng, &d, &b);
        refl = refl.max(rel(
            lax::casorati(2, x, &d, &b).unwrap(),
            lax::casorati(1, b.q * x, &d, &b).unwrap(),
        ));
        let xr = pp.k / (b.q * x);
        let lhs = lax::casorati(3, xr, &d, &b).unwrap() / pade::y_func(xr, pp, &b).unwrap();
        let rhs = lax::helper_g(x, pp, &b).unwrap() * lax::casorati(4, b.q * x, &d, &b).unwrap()
            / pade::y_func(b.q * x, pp, &b).unwrap();
        refl = refl.max(rel(lhs, rhs));
    }
    let dt = start.elapsed().as_secs_f64();
    report(
        "3 contiguity/Lax",
        l23 <= 1e-8 && l11p <= 1e-7 && dform <= 1e-7 && refl <= 1e-8 && dt < 10.0,
        &format!(
            "L2/L3 {l23:.3e} <= 1e-8, L1/L1' {l11p:.3e} <= 1e-7, D-forms {dform:.3e} <= 1e-7, shift/reflection {refl:.3e} <= 1e-8, {dt:.2}s < 10s"
        ),
    );
}

#[test]
fn criterion_4_extraction_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let (d, b) = lax_fixture(&mut rng, 1, 1);
    let (pp, pp_sh) = (&d.base.pp, &d.shifted.pp);
    let mut pts = Vec::new();
    for i in 3..=6usize {
        for j in i + 1..=6 {
            pts.push(
                painleve::extract_fg_with(&d.base.ip, &d.shifted.ip, pp, pp_sh, &d.base.s, &b, i, j)
                    .unwrap(),
            );
        }
    }
    let mut spread: f64 = 0.0;
    for pt in &pts[1..] {
        spread = spread.max(rel(pt.f, pts[0].f)).max(rel(pt.g, pts[0].g));
    }
    let fit = lax::fit_lax(&d, &b, &mut rng).unwrap();
    let fit_dev = rel(fit.f, pts[0].f).max(rel(fit.g, pts[0].g));
    report(
        "4 extraction consistency",
        spread <= 1e-6 && fit_dev <= 1e-6,
        &format!("pair spread {spread:.3e} <= 1e-6 (6 pairs), lax fit vs extraction {fit_dev:.3e} <= 1e-6"),
    );
}

#[test]
fn criterion_5_evolution_flagship() {
    let mut worst_step: f64 = 0.0;
    let mut worst_anchor: f64 = 0.0;
    let mut worst_back: f64 = 0.0;
    let mut worst_dt: f64 = 0.0;
    for (case, &(m, n)) in [(1usize, 2usize), (2, 2), (1, 3)].iter().enumerate() {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(1005 + case as u64);
        let (pp, b, ip) = draw_solved(&mut rng, m, n);
        let c = draw_gauge(&mut rng);
        let s = painleve::surface_from_pade(&pp, c, &b).unwrap();
        let pt = painleve::extract_fg(&ip, &pp, &s, &b, 3, 4).unwrap();
        let (pt_bar, s_bar) = painleve::step(&pt, &s, &b).unwrap();

        // extracted point at the shifted Pade parameters
        let pp_sh = pp.t_shift(&b).unwrap();
        let ip_sh = pade::solve_interpolation(&pp_sh, &b).unwrap();
        let pt_sh = painleve::extract_fg(&ip_sh, &pp_sh, &s_bar, &b, 3, 4).unwrap();
        worst_step = worst_step.max(rel(pt_bar.f, pt_sh.f)).max(rel(pt_bar.g, pt_sh.g));

        // anchor root-pair independence: the reflected roots give the same step
        let ag = painleve::anchor_from_g(pt.g, &s, &b).unwrap();
        let ag_reflected = CurveAnchor { x: s.kappa2 / ag.x, role: AnchorRole::G };
        let f1 = painleve::step_f(pt.f, &ag, &s, &b).unwrap();
        let f2 = painleve::step_f(pt.f, &ag_reflected, &s, &b).unwrap();
        worst_anchor = worst_anchor.max(rel(f1, f2));
        let af = painleve::anchor_from_fbar(pt_bar.f, &s_bar, &b).unwrap();
        let af_reflected = CurveAnchor {
            x: s_bar.kappa1 / (b.q * b.q * af.x),
            role: AnchorRole::FBar,
        };
        let g1 = painleve::step_g(pt.g, &af, &s, &b).unwrap();
        let g2 = painleve::step_g(pt.g, &af_reflected, &s, &b).unwrap();
        worst_anchor = worst_anchor.max(rel(g1, g2));

        // back-substitution into the evolution equations
        worst_back = worst_back
            .max(painleve::fev_residual(pt.f, pt_bar.f, ag.x, &s, &b).unwrap())
            .max(painleve::gev_residual(pt.g, pt_bar.g, af.x, &s, &b).unwrap());
        worst_dt = worst_dt.max(start.elapsed().as_secs_f64());
    }
    report(
        "5 evolution (flagship)",
        worst_step <= 1e-6 && worst_anchor <= 1e-8 && worst_back <= 1e-8 && worst_dt < 20.0,
        &format!(
            "step vs shifted extraction {worst_step:.3e} <= 1e-6, anchor independence {worst_anchor:.3e} <= 1e-8, back-substitution {worst_back:.3e} <= 1e-8, worst case {worst_dt:.2}s < 20s"
        ),
    );
}

#[test]
fn criterion_6_determinant_formulae() {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    // det/eval proportionality for (m,n) <= (2,2)
    let mut spread: f64 = 0.0;
    for &(m, n) in &[(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
        let (pp, b, ip) = draw_solved(&mut rng, m, n);
        let mut ru0 = None;
        let mut rv0 = None;
        for _ in 0..6 {
            let x = draw_annulus(&mut rng, 0.8, 1.25);
            let ru = determinants::det_u(x, &pp, &b).unwrap()
                / pade::eval_u(&ip, x, &pp, &b).unwrap();
            let rv = determinants::det_v(x, &pp, &b).unwrap()
                / pade::eval_v(&ip, x, &pp, &b).unwrap();
            match ru0 {
                None => ru0 = Some(ru),
                Some(r0) => spread = spread.max(rel(ru, r0)),
            }
            match rv0 {
                None => rv0 = Some(rv),
                Some(r0) => spread = spread.max(rel(rv, r0)),
            }
        }
    }
    // Frenkel-Turaev over 20 balanced draws, n <= 5
    let mut ft: f64 = 0.0;
    for t in 0..20 {
        let b = draw_bases(&mut rng);
        let n = 1 + (t % 5) as i32;
        let u0 = draw_annulus(&mut rng, 0.7, 1.4);
        let u1 = draw_annulus(&mut rng, 0.7, 1.4);
        let u2 = draw_annulus(&mut rng, 0.7, 1.4);
        let u3 = draw_annulus(&mut rng, 0.7, 1.4);
        let u5 = b.q.powi(-n);
        let u4 = b.q * u0 * u0 / (u1 * u2 * u3 * u5);
        ft = ft.max(
            determinants::frenkel_turaev_check(u0, &[u1, u2, u3, u4, u5], &b)
                .unwrap()
                .residual,
        );
    }
    // tau-shift at (1,1)
    let (pp, b, _ip) = draw_solved(&mut rng, 1, 1);
    let tau = determinants::tau_shift_check(&pp, &b).unwrap().max_residual();
    // raw (N+2)x(N+2) oracle vs bordered determinant
    let mut gen_spread: f64 = 0.0;
    let mut rg0 = None;
    for _ in 0..5 {
        let x = draw_annulus(&mut rng, 0.8, 1.25);
        let rg = determinants::general_det_u(x, &pp, &b).unwrap()
            / determinants::det_u(x, &pp, &b).unwrap();
        match rg0 {
            None => rg0 = Some(rg),
            Some(r0) => gen_spread = gen_spread.max(rel(rg, r0)),
        }
    }
    report(
        "6 determinant formulae",
        spread <= 1e-6 && ft <= 1e-8 && tau <= 1e-6 && gen_spread <= 1e-6,
        &format!(
            "det/eval constancy {spread:.3e} <= 1e-6, Frenkel-Turaev {ft:.3e} <= 1e-8, tau-shift {tau:.3e} <= 1e-6, raw oracle {gen_spread:.3e} <= 1e-6"
        ),
    );
}

#[test]
fn criterion_7_weyl_engine() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let b = draw_bases(&mut rng);
    let w = weyl::draw_weyl(&mut rng, &b);
    let st = weyl::WeylState {
        w,
        f: draw_annulus(&mut rng, 0.5, 2.0),
        g: draw_annulus(&mut rng, 0.5, 2.0),
    };
    let cox = weyl::coxeter_check(&st, &b).unwrap();

    // r and T parameter formulas
    let (q, v) = (w.q(), w.v());
    let rw = weyl::act_word_param(&weyl::r_word(), &w).unwrap();
    let mut rt_dev = rel(rw.h1, v * w.h2).max(rel(rw.h2, w.h2));
    for t in 0..8 {
        rt_dev = rt_dev.max(rel(rw.u[t], w.h2 / w.u[t]));
    }
    let tw = weyl::act_word_param(&weyl::t_word(), &w).unwrap();
    rt_dev = rt_dev
        .max(rel(tw.h1, q * w.h2 * w.h2 / w.h1))
        .max(rel(tw.h2, q.powu(3) * w.h2.powu(3) / (w.h1 * w.h1)));
    for t in 0..8 {
        rt_dev = rt_dev.max(rel(tw.u[t], v * w.u[t]));
    }

    // bridge equivalence: weyl-T == painleve-step, in the lambda = 1 gauge
    let (pp, bb, ip) = loop {
        let bb = draw_bases(&mut rng);
        let pp = loop {
            let k = draw_annulus(&mut rng, 0.8, 1.2);
            let mut a = [C::new(0.0, 0.0); 6];
            a[0] = 1.0 / k;
            for ai in a.iter_mut().take(5).skip(1) {
                *ai = draw_annulus(&mut rng, 0.7, 1.4);
            }
            let prod5: C = a.iter().take(5).product();
            a[5] = k * k * k / prod5;
            if a[5].norm() < 0.3 || a[5].norm() > 3.0 {
                continue;
            }
            if let Ok(pp) = PadeParams::new(k, a, 1, 2) {
                break pp;
            }
        };
        if let Ok(ip) = pade::solve_interpolation(&pp, &bb) {
            break (pp, bb, ip);
        }
    };
    let gg = draw_gauge(&mut rng);
    let c = [gg[0], gg[1], gg[0], gg[1]];
    let s = painleve::surface_from_pade(&pp, c, &bb).unwrap();
    let pt = painleve::extract_fg(&ip, &pp, &s, &bb, 3, 4).unwrap();
    let (pt_bar, _) = painleve::step(&SurfacePoint { f: pt.f, g: pt.g }, &s, &bb).unwrap();
    let wb = weyl::WeylParams::new(s.kappa1, s.kappa2, s.xi, c[0], c[1]).unwrap();
    let stb = weyl::WeylState { w: wb, f: pt.f, g: pt.g };
    let out = weyl::act_word(&weyl::t_word(), &stb, &bb).unwrap();
    let qb = bb.q;
    let lam_bar = s.kappa2 / s.kappa1;
    let c_bar = [c[0] / lam_bar, c[1] / lam_bar];
    let z = [draw_annulus(&mut rng, 0.8, 1.25), draw_annulus(&mut rng, 0.8, 1.25)];
    let mat_f = weyl::gauge_change(c_bar, [c[0], c[1]], qb * s.kappa1, z, &bb).unwrap();
    let mat_g = weyl::gauge_change(c_bar, [c[0], c[1]], qb.powu(3) * s.kappa2, z, &bb).unwrap();
    let bridge = rel(weyl::mobius_apply(&mat_f, out.f).unwrap(), pt_bar.f)
        .max(rel(weyl::mobius_apply(&mat_g, out.g).unwrap(), pt_bar.g));
    let dt = start.elapsed().as_secs_f64();
    report(
        "7 Weyl engine",
        cox.max_param_dev <= 1e-8
            && cox.max_point_dev <= 1e-6
            && rt_dev <= 1e-12
            && bridge <= 1e-6
            && dt < 10.0,
        &format!(
            "Coxeter params {:.3e} <= 1e-8, points {:.3e} <= 1e-6, r/T formulas {rt_dev:.3e} <= 1e-12, bridge {bridge:.3e} <= 1e-6, {dt:.2}s < 10s",
            cox.max_param_dev, cox.max_point_dev
        ),
    );
}

#[test]
fn criterion_8_cli() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_elpade");
    let start = Instant::now();

    // determinism: identical bytes for identical seed
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let o1 = run(&["verify", "--suite", "all", "--seed", "42"]);
    let o2 = run(&["verify", "--suite", "all", "--seed", "42"]);
    let deterministic = o1.stdout == o2.stdout && o1.status.code() == Some(0);
    let dt = start.elapsed().as_secs_f64();

    // negative test 1: invalid input -> exit 2
    let neg1 = run(&["theta", "--x", "nonsense", "--p", "0.1"]).status.code() == Some(2);

    // negative test 2: orbit steps beyond the precondition -> exit 2
    let dir = std::env::temp_dir();
    let cfg_ok = dir.join("elpade_acceptance_ok.json");
    std::fs::write(
        &cfg_ok,
        r#"{"p":[0.10,0.02],"q":[0.13,-0.03],"k":[1.05,0.10],
            "a":[[0.9,0.1],[1.1,-0.2],[0.8,0.15],[1.2,0.05],[0.95,-0.1]],
            "m":1,"n":2,
            "gauge":[[1.1,0.0],[0.9,0.2],[1.05,-0.15],[0.85,0.1]]}"#,
    )
    .unwrap();
    let neg2 = run(&["orbit", "--config", cfg_ok.to_str().unwrap(), "--steps", "5"])
        .status
        .code()
        == Some(2);

    // negative test 3: numerical failure -> exit 3. With a4 = a2/q^2 the
    // basis columns phi_0 and phi_2 coincide on the whole grid, so the
    // interpolation matrix is singular.
    let q = C::new(0.13, -0.03);
    let a2 = C::new(1.1, -0.2);
    let a4 = a2 / (q * q);
    let cfg_bad = dir.join("elpade_acceptance_singular.json");
    std::fs::write(
        &cfg_bad,
        format!(
            r#"{{"p":[0.10,0.02],"q":[0.13,-0.03],"k":[1.05,0.10],
                "a":[[0.9,0.1],[{},{}],[0.8,0.15],[{},{}],[0.95,-0.1]],
                "m":1,"n":2,
                "gauge":[[1.1,0.0],[0.9,0.2],[1.05,-0.15],[0.85,0.1]]}}"#,
            a2.re, a2.im, a4.re, a4.im
        ),
    )
    .unwrap();
    let neg3 = run(&["pade-solve", "--config", cfg_bad.to_str().unwrap()])
        .status
        .code()
        == Some(3);

    report(
        "8 CLI",
        deterministic && neg1 && neg2 && neg3 && dt < 120.0,
        &format!(
            "deterministic={deterministic}, exit-2 bad input={neg1}, exit-2 precondition={neg2}, exit-3 singular={neg3}, verify all {dt:.2}s < 120s"
        ),
    );
}
