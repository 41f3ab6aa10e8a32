//! elpade: command-line front end for the elliptic Pade / Painleve library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 numerical failure.

use clap::{Parser, Subcommand};
use elliptic_pade::pade::{self, PadeParams};
use elliptic_pade::painleve::{self, SurfacePoint};
use elliptic_pade::scalar::Precision;
use elliptic_pade::special::{self, Bases};
use elliptic_pade::{determinants, lax, sampling, weyl, Error, Scalar};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "elpade", version, about = "Elliptic Pade interpolation and the elliptic Painleve equation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate theta(x; p), or the Pochhammer theta(x)_s when --s is given.
    Theta {
        #[arg(long)]
        x: String,
        #[arg(long)]
        p: String,
        /// second base, required for --s
        #[arg(long)]
        q: Option<String>,
        /// Pochhammer length
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the elliptic Gamma function Gamma(x; p, q).
    Gamma {
        #[arg(long)]
        x: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the terminating very-well-poised series V(u0; u1..; z).
    Vseries {
        #[arg(long)]
        u0: String,
        /// repeatable: one flag per series parameter
        #[arg(long = "u")]
        us: Vec<String>,
        #[arg(long)]
        z: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the interpolation problem from a JSON config; report
    /// coefficients, grid residuals and the extracted (f, g).
    PadeSolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        precision_bits: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the Painleve T-step from the extracted point; emit CSV.
    Orbit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        precision_bits: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a module verification suite; JSON report, exit 0 iff all pass.
    Verify {
        /// special | pade | painleve | lax | det | weyl | all
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        precision_bits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn invalid(msg: impl Into<String>) -> CliError {
        CliError { code: 2, msg: msg.into() }
    }
    fn numerical(msg: impl Into<String>) -> CliError {
        CliError { code: 3, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Domain(m) => CliError { code: 2, msg: m },
            Error::Numerical(m) => CliError { code: 3, msg: m },
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || CliError::invalid(format!("cannot parse complex number from '{s}' (use RE or RE,IM)"));
    match parts.len() {
        1 => Ok(Complex64::new(parts[0].trim().parse().map_err(|_| bad())?, 0.0)),
        2 => Ok(Complex64::new(
            parts[0].trim().parse().map_err(|_| bad())?,
            parts[1].trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn cj(z: Scalar) -> Value {
    json!([z.re, z.im])
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawConfig {
    p: [f64; 2],
    q: [f64; 2],
    k: [f64; 2],
    /// a1..a5; a6 is always recomputed from the constraint. A sixth entry,
    /// if present, must agree with the derived value.
    a: Vec<[f64; 2]>,
    m: usize,
    n: usize,
    gauge: [[f64; 2]; 4],
    #[serde(default)]
    precision_bits: Option<u32>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
}

struct Resolved {
    b: Bases,
    pp: PadeParams,
    gauge: [Scalar; 4],
    tol: f64,
    seed: u64,
    precision_bits: u32,
}

impl Resolved {
    fn config_json(&self) -> Value {
        let s = painleve::surface_from_pade(&self.pp, self.gauge, &self.b).ok();
        json!({
            "p": cj(self.b.p),
            "q": cj(self.b.q),
            "k": cj(self.pp.k),
            "a": self.pp.a.iter().map(|&z| cj(z)).collect::<Vec<_>>(),
            "m": self.pp.m,
            "n": self.pp.n,
            "gauge": self.gauge.iter().map(|&z| cj(z)).collect::<Vec<_>>(),
            "kappa1": s.as_ref().map(|s| cj(s.kappa1)),
            "kappa2": s.as_ref().map(|s| cj(s.kappa2)),
            "xi": s.as_ref().map(|s| s.xi.iter().map(|&z| cj(z)).collect::<Vec<_>>()),
            "precision_bits": self.precision_bits,
            "precision": match Precision::from_bits(self.precision_bits) {
                Precision::Double => "double",
                Precision::Extended => "extended",
            },
            "tol": self.tol,
            "seed": self.seed,
        })
    }
}

fn env_precision_bits() -> Option<u32> {
    std::env::var("EPL_PRECISION_BITS").ok().and_then(|v| v.parse().ok())
}

fn load_config(
    path: &PathBuf,
    cli_tol: Option<f64>,
    cli_bits: Option<u32>,
    cli_seed: Option<u64>,
) -> Result<Resolved, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("config parse error: {e}")))?;
    let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
    let b = Bases::new(c(raw.p), c(raw.q))?;
    if raw.a.len() != 5 && raw.a.len() != 6 {
        return Err(CliError::invalid("config: field 'a' must list a1..a5 (a6 is derived)"));
    }
    let k = c(raw.k);
    let mut a = [Complex64::new(0.0, 0.0); 6];
    for (i, v) in raw.a.iter().take(5).enumerate() {
        a[i] = c(*v);
    }
    let prod5: Scalar = a.iter().take(5).product();
    if prod5.norm() == 0.0 {
        return Err(CliError::invalid("config: a1..a5 must be nonzero"));
    }
    a[5] = k * k * k / prod5;
    if raw.a.len() == 6 {
        let given = c(raw.a[5]);
        if (given - a[5]).norm() > 1e-8 * a[5].norm().max(1e-300) {
            return Err(CliError::invalid(format!(
                "config: explicit a6 = {given} violates the constraint (derived a6 = {})",
                a[5]
            )));
        }
    }
    let pp = PadeParams::new(k, a, raw.m, raw.n)?;
    let gauge = [c(raw.gauge[0]), c(raw.gauge[1]), c(raw.gauge[2]), c(raw.gauge[3])];
    Ok(Resolved {
        b,
        pp,
        gauge,
        tol: cli_tol.or(raw.tol).unwrap_or(1e-8),
        seed: cli_seed.or(raw.seed).unwrap_or(0),
        precision_bits: cli_bits.or(raw.precision_bits).or_else(env_precision_bits).unwrap_or(53),
    })
}

// ---------------------------------------------------------------------------
// Simple evaluator commands
// ---------------------------------------------------------------------------

fn cmd_theta(
    x: &str,
    p: &str,
    q: Option<&str>,
    s: Option<usize>,
    out: &Option<PathBuf>,
) -> Result<i32, CliError> {
    let x = parse_complex(x)?;
    let p = parse_complex(p)?;
    let q = q.map(parse_complex).transpose()?.unwrap_or(Complex64::new(0.0, 0.0));
    let b = Bases::new(p, q)?;
    let report = match s {
        None => {
            let (v, terms) = special::theta_with_terms(x, &b)?;
            json!({"re": v.re, "im": v.im, "terms_used": terms})
        }
        Some(s) => {
            if q.norm() == 0.0 {
                return Err(CliError::invalid("theta --s requires --q"));
            }
            let v = special::theta_pochhammer(x, s, &b)?;
            json!({"re": v.re, "im": v.im, "terms_used": s})
        }
    };
    emit(out, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(0)
}

fn cmd_gamma(x: &str, p: &str, q: &str, out: &Option<PathBuf>) -> Result<i32, CliError> {
    let b = Bases::new(parse_complex(p)?, parse_complex(q)?)?;
    let v = special::ell_gamma(parse_complex(x)?, &b)?;
    emit(out, &serde_json::to_string_pretty(&json!({"re": v.re, "im": v.im})).unwrap())?;
    Ok(0)
}

fn cmd_vseries(
    u0: &str,
    us: &[String],
    z: &str,
    p: &str,
    q: &str,
    out: &Option<PathBuf>,
) -> Result<i32, CliError> {
    if us.is_empty() {
        return Err(CliError::invalid("vseries requires at least one --u parameter"));
    }
    let b = Bases::new(parse_complex(p)?, parse_complex(q)?)?;
    let u0 = parse_complex(u0)?;
    let us: Vec<Scalar> = us.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?;
    let v = special::v_series(u0, &us, parse_complex(z)?, &b)?;
    emit(out, &serde_json::to_string_pretty(&json!({"re": v.re, "im": v.im})).unwrap())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// pade-solve
// ---------------------------------------------------------------------------

fn grid_residuals(ip: &pade::InterpolantPair, pp: &PadeParams, b: &Bases) -> Result<Vec<f64>, CliError> {
    let q = b.q;
    let mut rows = Vec::with_capacity(pp.big_n() + 1);
    for s in 0..=pp.big_n() {
        let x = q.powi(-(s as i32));
        let u = pade::eval_u(ip, x, pp, b)?;
        let v = pade::eval_v(ip, x, pp, b)?;
        let yu = pade::y_value(s, pp, b)? * u;
        let scale = v.norm().max(yu.norm()).max(f64::MIN_POSITIVE);
        rows.push((v - yu).norm() / scale);
    }
    Ok(rows)
}

fn cmd_pade_solve(cfg: &Resolved, out: &Option<PathBuf>) -> Result<i32, CliError> {
    let (pp, b) = (&cfg.pp, &cfg.b);
    let ip = pade::solve_interpolation(pp, b).map_err(|e| CliError::numerical(format!("{e}")))?;
    let residuals = grid_residuals(&ip, pp, b)?;
    let max_residual = residuals.iter().cloned().fold(0.0f64, f64::max);

    // extraction needs the shifted problem, hence n >= 1
    let point = if pp.n >= 1 {
        let s = painleve::surface_from_pade(pp, cfg.gauge, b)?;
        let pt = painleve::extract_fg(&ip, pp, &s, b, 3, 4)
            .map_err(|e| CliError::numerical(format!("extraction failed: {e}")))?;
        json!({"f": cj(pt.f), "g": cj(pt.g)})
    } else {
        Value::Null
    };

    let passed = max_residual <= cfg.tol;
    let report = json!({
        "config": cfg.config_json(),
        "u": ip.u.iter().map(|&z| cj(z)).collect::<Vec<_>>(),
        "v": ip.v.iter().map(|&z| cj(z)).collect::<Vec<_>>(),
        "grid_residuals": residuals,
        "max_residual": max_residual,
        "point": point,
        "passed": passed,
    });
    emit(out, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(if passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// orbit
// ---------------------------------------------------------------------------

fn fmt_c(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_orbit(cfg: &Resolved, steps: usize, out: &Option<PathBuf>) -> Result<i32, CliError> {
    let (pp, b) = (&cfg.pp, &cfg.b);
    if pp.n == 0 {
        return Err(CliError::invalid("orbit: requires n >= 1 (extraction needs one T-shift)"));
    }
    if steps > pp.n {
        return Err(CliError::invalid(format!(
            "orbit: steps = {steps} exceeds n = {} (each T-step decrements n)",
            pp.n
        )));
    }

    // interpolation data along the shift chain, for the cross-checks
    let mut chain: Vec<(PadeParams, Option<pade::InterpolantPair>)> = Vec::new();
    let mut cur = *pp;
    for t in 0..=pp.n {
        let ip = pade::solve_interpolation(&cur, b).ok();
        chain.push((cur, ip));
        if t < pp.n {
            cur = cur.t_shift(b).map_err(|e| CliError::numerical(format!("{e}")))?;
        }
    }

    let ip0 = chain[0]
        .1
        .clone()
        .ok_or_else(|| CliError::numerical("orbit: base interpolation solve failed"))?;
    let s0 = painleve::surface_from_pade(pp, cfg.gauge, b)?;
    let pt0 = painleve::extract_fg(&ip0, pp, &s0, b, 3, 4)
        .map_err(|e| CliError::numerical(format!("orbit step 0: extraction failed: {e}")))?;

    let mut rows = String::from("step,re_f,im_f,re_g,im_g,fev_residual,gev_residual,pade_crosscheck_residual\n");
    let mut s_cur = s0.clone();
    let mut pt_cur = SurfacePoint { f: pt0.f, g: pt0.g };
    for t in 0..=steps {
        // cross-check against a fresh extraction at T^t(P); needs the next
        // link of the chain for the shifted interpolant
        let crosscheck = if t + 1 < chain.len() {
            match (&chain[t].1, &chain[t + 1].1) {
                (Some(ip_t), Some(ip_t1)) => painleve::extract_fg_with(
                    ip_t,
                    ip_t1,
                    &chain[t].0,
                    &chain[t + 1].0,
                    &s_cur,
                    b,
                    3,
                    4,
                )
                .ok()
                .map(|pt| {
                    let df = (pt.f - pt_cur.f).norm() / pt.f.norm().max(pt_cur.f.norm()).max(f64::MIN_POSITIVE);
                    let dg = (pt.g - pt_cur.g).norm() / pt.g.norm().max(pt_cur.g.norm()).max(f64::MIN_POSITIVE);
                    df.max(dg)
                }),
                _ => None,
            }
        } else {
            None
        };

        let (fev, gev, next) = if t < steps {
            let (pt_next, s_next) = painleve::step(&pt_cur, &s_cur, b)
                .map_err(|e| CliError::numerical(format!("orbit step {}: {e}", t + 1)))?;
            let ag = painleve::anchor_from_g(pt_cur.g, &s_cur, b)
                .map_err(|e| CliError::numerical(format!("orbit step {}: {e}", t + 1)))?;
            let fev = painleve::fev_residual(pt_cur.f, pt_next.f, ag.x, &s_cur, b)?;
            let af = painleve::anchor_from_fbar(pt_next.f, &s_next, b)
                .map_err(|e| CliError::numerical(format!("orbit step {}: {e}", t + 1)))?;
            let gev = painleve::gev_residual(pt_cur.g, pt_next.g, af.x, &s_cur, b)?;
            (Some(fev), Some(gev), Some((pt_next, s_next)))
        } else {
            (None, None, None)
        };

        rows.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t,
            fmt_c(pt_cur.f.re),
            fmt_c(pt_cur.f.im),
            fmt_c(pt_cur.g.re),
            fmt_c(pt_cur.g.im),
            fev.map(fmt_c).unwrap_or_default(),
            gev.map(fmt_c).unwrap_or_default(),
            crosscheck.map(fmt_c).unwrap_or_default(),
        ));
        if let Some((pt_next, s_next)) = next {
            pt_cur = pt_next;
            s_cur = s_next;
        }
    }
    emit(out, rows.trim_end())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.pass(),
        })
    }
}

fn rel(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / (a.norm().max(b.norm())).max(f64::MIN_POSITIVE)
}

fn suite_special(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, Error> {
    let mut quasi: f64 = 0.0;
    let mut invers: f64 = 0.0;
    let mut gshift: f64 = 0.0;
    let mut pshift: f64 = 0.0;
    let mut refl: f64 = 0.0;
    let mut poch: f64 = 0.0;
    for _ in 0..40 {
        let p = Complex64::from_polar(
            0.05 + 0.25 * rand::Rng::gen::<f64>(rng),
            rand::Rng::gen_range(rng, -3.0..3.0),
        );
        let q = Complex64::from_polar(
            0.05 + 0.25 * rand::Rng::gen::<f64>(rng),
            rand::Rng::gen_range(rng, -3.0..3.0),
        );
        let b = Bases::new(p, q)?;
        let bswap = Bases::new(q, p)?;
        let x = sampling::draw_annulus(rng, 0.5, 2.0);
        let th = special::theta(x, &b)?;
        quasi = quasi.max(rel(special::theta(p * x, &b)?, -th / x));
        invers = invers.max(rel(special::theta(1.0 / x, &b)?, -th / x));
        let ga = special::ell_gamma(x, &b)?;
        gshift = gshift.max(rel(special::ell_gamma(q * x, &b)?, th * ga));
        pshift = pshift.max(rel(special::ell_gamma(p * x, &b)?, special::theta(x, &bswap)? * ga));
        refl = refl.max(rel(ga * special::ell_gamma(p * q / x, &b)?, Complex64::new(1.0, 0.0)));
        let s = 3usize;
        poch = poch.max(rel(
            special::theta_pochhammer(x, s + 1, &b)?,
            special::theta_pochhammer(x, s, &b)? * special::theta(q.powu(s as u32) * x, &b)?,
        ));
    }
    Ok(vec![
        Check { name: "theta_quasi_periodicity", residual: quasi, tolerance: 1e-12 },
        Check { name: "theta_inversion", residual: invers, tolerance: 1e-12 },
        Check { name: "gamma_q_shift", residual: gshift, tolerance: 1e-12 },
        Check { name: "gamma_p_shift", residual: pshift, tolerance: 1e-12 },
        Check { name: "gamma_reflection", residual: refl, tolerance: 1e-12 },
        Check { name: "pochhammer_recurrence", residual: poch, tolerance: 1e-12 },
    ])
}

fn suite_pade(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Result<Vec<Check>, Error> {
    let mut grid: f64 = 0.0;
    let mut sym_u: f64 = 0.0;
    let mut sym_v: f64 = 0.0;
    for _ in 0..5 {
        let (pp, b, ip) = sampling::draw_solved(rng, m, n);
        grid = grid.max(ip.residual_norm);
        for _ in 0..3 {
            let x = sampling::draw_annulus(rng, 0.8, 1.25);
            let xr = pp.k / (b.q * x);
            sym_u = sym_u.max(rel(pade::eval_u(&ip, xr, &pp, &b)?, pade::eval_u(&ip, x, &pp, &b)?));
            sym_v = sym_v.max(rel(pade::eval_v(&ip, xr, &pp, &b)?, pade::eval_v(&ip, x, &pp, &b)?));
        }
    }
    Ok(vec![
        Check { name: "pade_grid_residual", residual: grid, tolerance: 1e-8 },
        Check { name: "pade_u_reflection_symmetry", residual: sym_u, tolerance: 1e-8 },
        Check { name: "pade_v_reflection_symmetry", residual: sym_v, tolerance: 1e-8 },
    ])
}

fn lax_fixture(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Result<(lax::LaxData, Bases), Error> {
    for _ in 0..16 {
        let (pp, b, ip) = sampling::draw_solved(rng, m, n);
        let c = sampling::draw_gauge(rng);
        if let Ok(d) = lax::LaxData::new(&pp, c, &ip, &b) {
            return Ok((d, b));
        }
    }
    Err(Error::Numerical("lax fixture: no generic draw found".into()))
}

fn suite_lax(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, Error> {
    let (d, b) = lax_fixture(rng, 1, 1)?;
    let fit = lax::fit_lax(&d, &b, rng)?;
    let mut l2: f64 = 0.0;
    let mut l3: f64 = 0.0;
    let mut l1: f64 = 0.0;
    let mut l1p: f64 = 0.0;
    let mut casorati_shift: f64 = 0.0;
    for _ in 0..4 {
        let x = lax::sample_point(rng, &d, &b);
        for kind in [lax::YKind::V, lax::YKind::YU] {
            l2 = l2.max(lax::l_residual(lax::Lrel::L2, kind, x, &fit, &d, &b)?);
            l3 = l3.max(lax::l_residual(lax::Lrel::L3, kind, x, &fit, &d, &b)?);
            l1 = l1.max(lax::l_residual(lax::Lrel::L1, kind, x, &fit, &d, &b)?);
            l1p = l1p.max(lax::l_residual(lax::Lrel::L1p, kind, x, &fit, &d, &b)?);
        }
        let d1q = lax::casorati(1, b.q * x, &d, &b)?;
        let d2 = lax::casorati(2, x, &d, &b)?;
        casorati_shift = casorati_shift.max(rel(d2, d1q));
    }
    let c0c1 = lax::c0c1_residual(&fit, &d, &b)?;
    Ok(vec![
        Check { name: "lax_dform_fit_residual", residual: fit.fit_residual, tolerance: 1e-7 },
        Check { name: "lax_l2_residual", residual: l2, tolerance: 1e-8 },
        Check { name: "lax_l3_residual", residual: l3, tolerance: 1e-8 },
        Check { name: "lax_l1_residual", residual: l1, tolerance: 1e-7 },
        Check { name: "lax_l1bar_residual", residual: l1p, tolerance: 1e-7 },
        Check { name: "lax_casorati_d2_is_shifted_d1", residual: casorati_shift, tolerance: 1e-8 },
        Check { name: "lax_c0c1_constraint", residual: c0c1, tolerance: 1e-8 },
    ])
}

fn suite_det(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, Error> {
    // det/eval proportionality at (1,1)
    let (pp, b, ip) = sampling::draw_solved(rng, 1, 1);
    let mut spread_u: f64 = 0.0;
    let mut spread_v: f64 = 0.0;
    let mut spread_gen: f64 = 0.0;
    let mut ref_u = None;
    let mut ref_v = None;
    let mut ref_gen = None;
    for _ in 0..6 {
        let x = sampling::draw_annulus(rng, 0.8, 1.25);
        let ru = determinants::det_u(x, &pp, &b)? / pade::eval_u(&ip, x, &pp, &b)?;
        let rv = determinants::det_v(x, &pp, &b)? / pade::eval_v(&ip, x, &pp, &b)?;
        let rg = determinants::general_det_u(x, &pp, &b)? / determinants::det_u(x, &pp, &b)?;
        match ref_u {
            None => ref_u = Some(ru),
            Some(r0) => spread_u = spread_u.max(rel(ru, r0)),
        }
        match ref_v {
            None => ref_v = Some(rv),
            Some(r0) => spread_v = spread_v.max(rel(rv, r0)),
        }
        match ref_gen {
            None => ref_gen = Some(rg),
            Some(r0) => spread_gen = spread_gen.max(rel(rg, r0)),
        }
    }
    // Frenkel-Turaev, 20 balanced draws with n <= 5
    let mut ft: f64 = 0.0;
    for t in 0..20 {
        let b = sampling::draw_bases(rng);
        let n = 1 + (t % 5) as i32;
        let u0 = sampling::draw_annulus(rng, 0.7, 1.4);
        let u1 = sampling::draw_annulus(rng, 0.7, 1.4);
        let u2 = sampling::draw_annulus(rng, 0.7, 1.4);
        let u3 = sampling::draw_annulus(rng, 0.7, 1.4);
        let u5 = b.q.powi(-n);
        let u4 = b.q * u0 * u0 / (u1 * u2 * u3 * u5);
        ft = ft.max(determinants::frenkel_turaev_check(u0, &[u1, u2, u3, u4, u5], &b)?.residual);
    }
    let tau = determinants::tau_shift_check(&pp, &b)?;
    Ok(vec![
        Check { name: "det_u_vs_eval_u_constancy", residual: spread_u, tolerance: 1e-6 },
        Check { name: "det_v_vs_eval_v_constancy", residual: spread_v, tolerance: 1e-6 },
        Check { name: "general_det_vs_bordered_det", residual: spread_gen, tolerance: 1e-6 },
        Check { name: "frenkel_turaev_summation", residual: ft, tolerance: 1e-8 },
        Check { name: "tau_shift_ratios", residual: tau.max_residual(), tolerance: 1e-6 },
    ])
}

fn suite_weyl(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, Error> {
    let b = sampling::draw_bases(rng);
    let w = weyl::draw_weyl(rng, &b);
    let st = weyl::WeylState {
        w,
        f: sampling::draw_annulus(rng, 0.5, 2.0),
        g: sampling::draw_annulus(rng, 0.5, 2.0),
    };
    let cox = weyl::coxeter_check(&st, &b)?;

    let rw = weyl::act_word_param(&weyl::r_word(), &w)?;
    let mut r_dev = rel(rw.h1, w.v() * w.h2).max(rel(rw.h2, w.h2));
    for t in 0..8 {
        r_dev = r_dev.max(rel(rw.u[t], w.h2 / w.u[t]));
    }
    let tw = weyl::act_word_param(&weyl::t_word(), &w)?;
    let q = w.q();
    let mut t_dev = rel(tw.h1, q * w.h2 * w.h2 / w.h1)
        .max(rel(tw.h2, q.powu(3) * w.h2.powu(3) / (w.h1 * w.h1)));
    for t in 0..8 {
        t_dev = t_dev.max(rel(tw.u[t], w.v() * w.u[t]));
    }

    // bridge chart identity calF_f(z) = F_f(z/lambda)
    let (s, lambda) = weyl::rescale_bridge(&w, &b)?;
    let mut bridge: f64 = 0.0;
    for _ in 0..5 {
        let z = sampling::draw_annulus(rng, 0.8, 1.25);
        let f = sampling::draw_annulus(rng, 0.5, 2.0);
        let cal_f = special::theta_multi(&[w.d1 / z, w.h1 / (w.d1 * z)], &b)? * f
            - special::theta_multi(&[w.d2 / z, w.h1 / (w.d2 * z)], &b)?;
        bridge = bridge.max(rel(cal_f, painleve::big_f(f, z / lambda, &s, &b)?));
    }
    Ok(vec![
        Check { name: "weyl_coxeter_params", residual: cox.max_param_dev, tolerance: 1e-8 },
        Check { name: "weyl_coxeter_points", residual: cox.max_point_dev, tolerance: 1e-6 },
        Check { name: "weyl_r_parameter_formulas", residual: r_dev, tolerance: 1e-12 },
        Check { name: "weyl_t_parameter_formulas", residual: t_dev, tolerance: 1e-12 },
        Check { name: "weyl_bridge_chart_identity", residual: bridge, tolerance: 1e-12 },
    ])
}

fn suite_painleve(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, Error> {
    let (pp, b, ip) = sampling::draw_solved(rng, 1, 2);
    let c = sampling::draw_gauge(rng);
    let s = painleve::surface_from_pade(&pp, c, &b)?;
    let pt34 = painleve::extract_fg(&ip, &pp, &s, &b, 3, 4)?;
    let pt56 = painleve::extract_fg(&ip, &pp, &s, &b, 5, 6)?;
    let pair_spread = rel(pt34.f, pt56.f).max(rel(pt34.g, pt56.g));

    let (pt_bar, s_bar) = painleve::step(&pt34, &s, &b)?;
    // compare against a fresh extraction at the shifted parameters
    let pp_sh = pp.t_shift(&b)?;
    let ip_sh = pade::solve_interpolation(&pp_sh, &b)?;
    let pt_sh = painleve::extract_fg(&ip_sh, &pp_sh, &s_bar, &b, 3, 4)?;
    let step_dev = rel(pt_bar.f, pt_sh.f).max(rel(pt_bar.g, pt_sh.g));

    let ag = painleve::anchor_from_g(pt34.g, &s, &b)?;
    let fev = painleve::fev_residual(pt34.f, pt_bar.f, ag.x, &s, &b)?;
    let af = painleve::anchor_from_fbar(pt_bar.f, &s_bar, &b)?;
    let gev = painleve::gev_residual(pt34.g, pt_bar.g, af.x, &s, &b)?;
    Ok(vec![
        Check { name: "painleve_extraction_pair_spread", residual: pair_spread, tolerance: 1e-6 },
        Check { name: "painleve_step_vs_shifted_extraction", residual: step_dev, tolerance: 1e-6 },
        Check { name: "painleve_fev_residual", residual: fev, tolerance: 1e-8 },
        Check { name: "painleve_gev_residual", residual: gev, tolerance: 1e-8 },
    ])
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    cfg: Option<&Resolved>,
    out: &Option<PathBuf>,
) -> Result<i32, CliError> {
    let suites: Vec<&str> = match suite {
        "all" => vec!["special", "pade", "painleve", "lax", "det", "weyl"],
        "special" | "pade" | "painleve" | "lax" | "det" | "weyl" => vec![suite],
        _ => {
            return Err(CliError::invalid(format!(
                "unknown suite '{suite}' (expected special|pade|painleve|lax|det|weyl|all)"
            )))
        }
    };
    let (m, n) = cfg.map(|c| (c.pp.m, c.pp.n)).unwrap_or((1, 2));
    let mut checks = Vec::new();
    for name in &suites {
        // one stream per suite, so suites are individually reproducible
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cs = match *name {
            "special" => suite_special(&mut rng),
            "pade" => suite_pade(&mut rng, m, n),
            "painleve" => suite_painleve(&mut rng),
            "lax" => suite_lax(&mut rng),
            "det" => suite_det(&mut rng),
            "weyl" => suite_weyl(&mut rng),
            _ => unreachable!(),
        }
        .map_err(CliError::from)?;
        checks.append(&mut cs);
    }
    let passed = checks.iter().all(|c| c.pass());
    let report = json!({
        "suite": suite,
        "seed": seed,
        "config": cfg.map(|c| c.config_json()),
        "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        "passed": passed,
    });
    emit(out, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(if passed { 0 } else { 1 })
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Theta { x, p, q, s, out } => cmd_theta(x, p, q.as_deref(), *s, out),
        Cmd::Gamma { x, p, q, out } => cmd_gamma(x, p, q, out),
        Cmd::Vseries { u0, us, z, p, q, out } => cmd_vseries(u0, us, z, p, q, out),
        Cmd::PadeSolve { config, tol, precision_bits, seed, out } => {
            let cfg = load_config(config, *tol, *precision_bits, *seed)?;
            cmd_pade_solve(&cfg, out)
        }
        Cmd::Orbit { config, steps, tol, precision_bits, seed, out } => {
            let cfg = load_config(config, *tol, *precision_bits, *seed)?;
            cmd_orbit(&cfg, *steps, out)
        }
        Cmd::Verify { suite, seed, config, precision_bits, out } => {
            let cfg = config
                .as_ref()
                .map(|p| load_config(p, None, *precision_bits, *seed))
                .transpose()?;
            let seed = seed.or_else(|| cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            cmd_verify(suite, seed, cfg.as_ref(), out)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            std::process::exit(e.code);
        }
    }
}
