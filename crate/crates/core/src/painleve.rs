//! Geometric data of the elliptic Painleve equation: the surface parameters
//! (kappa1, kappa2, xi1..xi8), the degree-(2,2) curve parametrization
//! (f_*, g_*), the pencils F_f, G_g, extraction of a point (f, g) from a
//! solved interpolation problem, and the time evolution step along T.

use crate::lax::cal_n;
use crate::pade::{self, InterpolantPair, PadeParams};
use crate::special::{theta, theta_log_deriv, theta_multi, Bases};
use crate::{Error, Result, Scalar};

/// Newton convergence tolerance for curve anchors.
pub const NEWTON_TOL: f64 = 1e-12;
const NEWTON_STARTS: usize = 12;
const NEWTON_ITERS: usize = 50;

/// Surface parameters (kappa1, kappa2, xi1..xi8) plus the gauge constants
/// c1..c4 of the parametrization, subject to kappa1^2 kappa2^2 = q xi1..xi8.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceParams {
    pub kappa1: Scalar,
    pub kappa2: Scalar,
    pub xi: [Scalar; 8],
    pub c: [Scalar; 4],
}

impl SurfaceParams {
    pub fn new(kappa1: Scalar, kappa2: Scalar, xi: [Scalar; 8], c: [Scalar; 4], b: &Bases) -> Result<SurfaceParams> {
        if kappa1.norm() == 0.0
            || kappa2.norm() == 0.0
            || xi.iter().any(|z| z.norm() == 0.0)
            || c.iter().any(|z| z.norm() == 0.0)
        {
            return Err(Error::Domain("surface params: all entries must be nonzero".into()));
        }
        let lhs = kappa1 * kappa1 * kappa2 * kappa2;
        let rhs = b.q * xi.iter().product::<Scalar>();
        if (lhs - rhs).norm() > 1e-8 * lhs.norm() {
            return Err(Error::Domain(format!(
                "surface params: kappa1^2 kappa2^2 = q xi1..xi8 violated (rel err {})",
                (lhs - rhs).norm() / lhs.norm()
            )));
        }
        Ok(SurfaceParams { kappa1, kappa2, xi, c })
    }

    /// The induced action of the special direction T:
    /// (kappa1, kappa2, xi_i) -> (q kappa1, q^3 kappa2, q xi_i), c fixed.
    pub fn t_shift(&self, b: &Bases) -> SurfaceParams {
        let q = b.q;
        SurfaceParams {
            kappa1: q * self.kappa1,
            kappa2: q * q * q * self.kappa2,
            xi: self.xi.map(|x| q * x),
            c: self.c,
        }
    }
}

/// A point (f, g) on (or off) the surface.
#[derive(Clone, Copy, Debug)]
pub struct SurfacePoint {
    pub f: Scalar,
    pub g: Scalar,
}

/// Which side condition a curve parameter certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorRole {
    /// g = g_*(x)
    G,
    /// fbar = fbar_*(q x)
    FBar,
}

/// A curve parameter x together with the identity it certifies.
#[derive(Clone, Copy, Debug)]
pub struct CurveAnchor {
    pub x: Scalar,
    pub role: AnchorRole,
}

/// Map interpolation parameters to the surface:
/// kappa1 = k, kappa2 = k^2/a1,
/// xi = (k/q, k q^{m+n}, k/(a1 q^m), a2/q^n, a3, a4, a5, a6).
pub fn surface_from_pade(pp: &PadeParams, c: [Scalar; 4], b: &Bases) -> Result<SurfaceParams> {
    let (k, q) = (pp.k, b.q);
    let a = pp.a;
    let xi = [
        k / q,
        k * q.powu((pp.m + pp.n) as u32),
        k / (a[0] * q.powu(pp.m as u32)),
        a[1] / q.powu(pp.n as u32),
        a[2],
        a[3],
        a[4],
        a[5],
    ];
    SurfaceParams::new(k, k * k / a[0], xi, c, b)
}

/// theta(c/x, kappa/(c x)): the order-2 theta building block of the pencils.
pub(crate) fn theta_pair(x: Scalar, c: Scalar, kappa: Scalar, b: &Bases) -> Result<Scalar> {
    theta_multi(&[c / x, kappa / (c * x)], b)
}

/// d/dx log theta(c/x, kappa/(c x)).
fn theta_pair_dlog(x: Scalar, c: Scalar, kappa: Scalar, b: &Bases) -> Result<Scalar> {
    let x2 = x * x;
    Ok(theta_log_deriv(c / x, b)? * (-c / x2) + theta_log_deriv(kappa / (c * x), b)? * (-kappa / (c * x2)))
}

/// f_*(x) = theta(c2/x, kappa1/(c2 x)) / theta(c1/x, kappa1/(c1 x)).
pub fn f_star(x: Scalar, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    let den = theta_pair(x, s.c[0], s.kappa1, b)?;
    if den.norm() == 0.0 {
        return Err(Error::Domain("f_star: point at infinity in the f-chart".into()));
    }
    Ok(theta_pair(x, s.c[1], s.kappa1, b)? / den)
}

/// g_*(x) = theta(c4/x, kappa2/(c4 x)) / theta(c3/x, kappa2/(c3 x)).
pub fn g_star(x: Scalar, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    let den = theta_pair(x, s.c[2], s.kappa2, b)?;
    if den.norm() == 0.0 {
        return Err(Error::Domain("g_star: point at infinity in the g-chart".into()));
    }
    Ok(theta_pair(x, s.c[3], s.kappa2, b)? / den)
}

/// F_f(x) = theta(c1/x, kappa1/(c1 x)) f - theta(c2/x, kappa1/(c2 x)).
/// Vanishes exactly on the curve f = f_*(x).
pub fn big_f(f: Scalar, x: Scalar, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    Ok(theta_pair(x, s.c[0], s.kappa1, b)? * f - theta_pair(x, s.c[1], s.kappa1, b)?)
}

/// G_g(x) = theta(c3/x, kappa2/(c3 x)) g - theta(c4/x, kappa2/(c4 x)).
pub fn big_g(g: Scalar, x: Scalar, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    Ok(theta_pair(x, s.c[2], s.kappa2, b)? * g - theta_pair(x, s.c[3], s.kappa2, b)?)
}

/// alpha(x) of the extraction corollary.
fn alpha(x: Scalar, pp: &PadeParams, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    let (k, q) = (pp.k, b.q);
    let a1 = pp.a[0];
    let num = cal_n(x, pp, b)? * theta_multi(&[k / (x * x), q / x, a1 / x], b)?;
    let mut den = x * theta_multi(&[k / (q * x), k / (x * a1)], b)?;
    for xi in s.xi {
        den *= theta(k / (x * xi), b)?;
    }
    if den.norm() == 0.0 {
        return Err(Error::Numerical("alpha: vanishing denominator".into()));
    }
    Ok(num / den)
}

/// beta(x) of the extraction corollary.
fn beta(x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let (k, q) = (pp.k, b.q);
    let a1 = pp.a[0];
    let den = theta_multi(&[k / (q * x), k / (x * a1), k * q / (x * a1), a1 / (q * x)], b)?;
    if den.norm() == 0.0 {
        return Err(Error::Numerical("beta: vanishing denominator".into()));
    }
    Ok(cal_n(x, pp, b)? / den)
}

/// Solve w_i (A_i t - B_i) = w_j (A_j t - B_j) for t, with a scale-aware
/// degeneracy guard on the linear coefficient.
fn linear_pencil_solve(wi: Scalar, ai: Scalar, bi: Scalar, wj: Scalar, aj: Scalar, bj: Scalar) -> Result<Scalar> {
    let coef = wi * ai - wj * aj;
    let rhs = wi * bi - wj * bj;
    let scale = (wi * ai).norm().max((wj * aj).norm());
    if coef.norm() <= 1e-10 * scale.max(1e-300) {
        return Err(Error::Numerical("extraction: degenerate linear equation (non-generic draw)".into()));
    }
    Ok(rhs / coef)
}

/// Extract (f, g) from solved interpolants via the corollary ratios, using a
/// precomputed solve at the shifted parameters T(P) for the Vbar data.
pub fn extract_fg_with(
    ip: &InterpolantPair,
    ip_sh: &InterpolantPair,
    pp: &PadeParams,
    pp_sh: &PadeParams,
    s: &SurfaceParams,
    b: &Bases,
    i: usize,
    j: usize,
) -> Result<SurfacePoint> {
    if !(3..=6).contains(&i) || !(3..=6).contains(&j) || i == j {
        return Err(Error::Domain("extract_fg: pair indices must be distinct, in 3..=6".into()));
    }
    let (ai, aj) = (pp.a[i - 1], pp.a[j - 1]);
    let q = b.q;

    // f-equation: alpha(a_i) F_f(a_i) / [alpha(a_j) F_f(a_j)] = U(a_i)V(a_i/q) / [U(a_j)V(a_j/q)]
    let uv = |x: Scalar| -> Result<Scalar> {
        Ok(pade::eval_u(ip, x, pp, b)? * pade::eval_v(ip, x / q, pp, b)?)
    };
    let wi = alpha(ai, pp, s, b)? * uv(aj)?;
    let wj = alpha(aj, pp, s, b)? * uv(ai)?;
    let f = linear_pencil_solve(
        wi,
        theta_pair(ai, s.c[0], s.kappa1, b)?,
        theta_pair(ai, s.c[1], s.kappa1, b)?,
        wj,
        theta_pair(aj, s.c[0], s.kappa1, b)?,
        theta_pair(aj, s.c[1], s.kappa1, b)?,
    )?;

    // g-equation: beta(a_i) G_g(a_i) / [beta(a_j) G_g(a_j)] = U(a_i)Vbar(a_i) / [U(a_j)Vbar(a_j)]
    let uvbar = |x: Scalar| -> Result<Scalar> {
        Ok(pade::eval_u(ip, x, pp, b)? * pade::eval_v(ip_sh, x, pp_sh, b)?)
    };
    let wi = beta(ai, pp, b)? * uvbar(aj)?;
    let wj = beta(aj, pp, b)? * uvbar(ai)?;
    let g = linear_pencil_solve(
        wi,
        theta_pair(ai, s.c[2], s.kappa2, b)?,
        theta_pair(ai, s.c[3], s.kappa2, b)?,
        wj,
        theta_pair(aj, s.c[2], s.kappa2, b)?,
        theta_pair(aj, s.c[3], s.kappa2, b)?,
    )?;

    crate::ensure_finite(f, "extracted f")?;
    crate::ensure_finite(g, "extracted g")?;
    Ok(SurfacePoint { f, g })
}

/// Extract (f, g), solving the shifted problem T(P) internally.
pub fn extract_fg(
    ip: &InterpolantPair,
    pp: &PadeParams,
    s: &SurfaceParams,
    b: &Bases,
    i: usize,
    j: usize,
) -> Result<SurfacePoint> {
    let pp_sh = pp.t_shift(b)?;
    let ip_sh = pade::solve_interpolation(&pp_sh, b)?;
    extract_fg_with(ip, &ip_sh, pp, &pp_sh, s, b, i, j)
}

/// Newton iteration on A(x) t - B(x) = 0, where A, B are the theta pairs with
/// constants (ca, cb) and multiplier kappa. Multi-start on |x| = |kappa|^{1/2}.
fn anchor_newton(t: Scalar, ca: Scalar, cb: Scalar, kappa: Scalar, b: &Bases) -> Result<Scalar> {
    if !(t.re.is_finite() && t.im.is_finite()) {
        return Err(Error::Numerical("anchor: non-finite target value".into()));
    }
    let r = kappa.norm().sqrt();
    for start in 0..NEWTON_STARTS {
        let phase = std::f64::consts::TAU * (start as f64 + 0.5) / NEWTON_STARTS as f64;
        let mut x = Scalar::from_polar(r, phase);
        for _ in 0..NEWTON_ITERS {
            if !(x.re.is_finite() && x.im.is_finite()) || x.norm() < 1e-6 * r || x.norm() > 1e6 * r {
                break;
            }
            let a = theta_pair(x, ca, kappa, b)?;
            let bb = theta_pair(x, cb, kappa, b)?;
            let h = a * t - bb;
            let hp = a * t * theta_pair_dlog(x, ca, kappa, b)? - bb * theta_pair_dlog(x, cb, kappa, b)?;
            if hp.norm() == 0.0 {
                break;
            }
            let dx = h / hp;
            x -= dx;
            if dx.norm() <= NEWTON_TOL * x.norm() {
                // certify: the parametrized value reproduces t
                let a = theta_pair(x, ca, kappa, b)?;
                if a.norm() == 0.0 {
                    break;
                }
                let val = theta_pair(x, cb, kappa, b)? / a;
                if (val - t).norm() <= 1e-10 * (1.0 + t.norm()) {
                    return Ok(x);
                }
                break;
            }
        }
    }
    Err(Error::Numerical("anchor: Newton failed to converge from all starts".into()))
}

/// Find x with g = g_*(x) by Newton on G_g(x) = 0.
pub fn anchor_from_g(g: Scalar, s: &SurfaceParams, b: &Bases) -> Result<CurveAnchor> {
    let x = anchor_newton(g, s.c[2], s.c[3], s.kappa2, b)?;
    Ok(CurveAnchor { x, role: AnchorRole::G })
}

/// Find x with fbar = fbar_*(q x) by Newton on Fbar_fbar(q x) = 0.
/// `s_shifted` must be the T-shifted surface parameters.
pub fn anchor_from_fbar(fbar: Scalar, s_shifted: &SurfaceParams, b: &Bases) -> Result<CurveAnchor> {
    let y = anchor_newton(fbar, s_shifted.c[0], s_shifted.c[1], s_shifted.kappa1, b)?;
    Ok(CurveAnchor { x: y / b.q, role: AnchorRole::FBar })
}

/// The f-evolution: given g = g_*(x) (the anchor) and f, solve
///   F_f(x) prod theta(kappa2/(x xi_i)) Fbar(q x)
///     = F_f(kappa1 x / kappa2) prod theta(xi_i/x) Fbar(kappa1 x / kappa2)
/// for fbar (affine through Fbar). The reflected Fbar argument carries the
/// T-shift of the parameters it is built from, hence no q^2 factor.
pub fn step_f(f: Scalar, anchor: &CurveAnchor, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    if anchor.role != AnchorRole::G {
        return Err(Error::Domain("step_f: anchor must certify g = g_*(x)".into()));
    }
    let x = anchor.x;
    let q = b.q;
    let s_sh = s.t_shift(b);
    let mut p = big_f(f, x, s, b)?;
    let mut r = big_f(f, s.kappa1 * x / s.kappa2, s, b)?;
    for xi in s.xi {
        p *= theta(s.kappa2 / (x * xi), b)?;
        r *= theta(xi / x, b)?;
    }
    let y1 = q * x;
    let y2 = s.kappa1 * x / s.kappa2;
    let coef = p * theta_pair(y1, s_sh.c[0], s_sh.kappa1, b)? - r * theta_pair(y2, s_sh.c[0], s_sh.kappa1, b)?;
    let rhs = p * theta_pair(y1, s_sh.c[1], s_sh.kappa1, b)? - r * theta_pair(y2, s_sh.c[1], s_sh.kappa1, b)?;
    if coef.norm() <= 1e-12 * p.norm().max(r.norm()).max(1e-300) {
        return Err(Error::Numerical("step_f: vanishing linear coefficient".into()));
    }
    crate::ensure_finite(rhs / coef, "stepped f")
}

/// The g-evolution: given fbar = fbar_*(q x) (the anchor) and g, solve
///   G_g(x) prod theta(kappa1/(q x xi_i)) Gbar(q x)
///     = G_g(q kappa2 x / kappa1) prod theta(xi_i/x) Gbar(q^3 kappa2 x / kappa1)
/// for gbar (affine through Gbar). As in step_f, the reflected Gbar argument
/// carries the T-shift of its parameters.
pub fn step_g(g: Scalar, anchor: &CurveAnchor, s: &SurfaceParams, b: &Bases) -> Result<Scalar> {
    if anchor.role != AnchorRole::FBar {
        return Err(Error::Domain("step_g: anchor must certify fbar = fbar_*(qx)".into()));
    }
    let x = anchor.x;
    let q = b.q;
    let s_sh = s.t_shift(b);
    let mut p = big_g(g, x, s, b)?;
    let mut r = big_g(g, q * s.kappa2 * x / s.kappa1, s, b)?;
    for xi in s.xi {
        p *= theta(s.kappa1 / (q * x * xi), b)?;
        r *= theta(xi / x, b)?;
    }
    let y1 = q * x;
    let y2 = q * q * q * s.kappa2 * x / s.kappa1;
    let coef = p * theta_pair(y1, s_sh.c[2], s_sh.kappa2, b)? - r * theta_pair(y2, s_sh.c[2], s_sh.kappa2, b)?;
    let rhs = p * theta_pair(y1, s_sh.c[3], s_sh.kappa2, b)? - r * theta_pair(y2, s_sh.c[3], s_sh.kappa2, b)?;
    if coef.norm() <= 1e-12 * p.norm().max(r.norm()).max(1e-300) {
        return Err(Error::Numerical("step_g: vanishing linear coefficient".into()));
    }
    crate::ensure_finite(rhs / coef, "stepped g")
}

/// One full T-step: anchor on g, evolve f, anchor on fbar, evolve g.
/// Returns ((fbar, gbar), T(S)).
pub fn step(point: &SurfacePoint, s: &SurfaceParams, b: &Bases) -> Result<(SurfacePoint, SurfaceParams)> {
    let ag = anchor_from_g(point.g, s, b)?;
    let fbar = step_f(point.f, &ag, s, b)?;
    let s_sh = s.t_shift(b);
    let af = anchor_from_fbar(fbar, &s_sh, b)?;
    let gbar = step_g(point.g, &af, s, b)?;
    Ok((SurfacePoint { f: fbar, g: gbar }, s_sh))
}

/// Relative residual of Eq. (fev) at the given data, normalized by the larger
/// side. Zero when fbar solves the evolution at g = g_*(x).
pub fn fev_residual(f: Scalar, fbar: Scalar, x: Scalar, s: &SurfaceParams, b: &Bases) -> Result<f64> {
    let q = b.q;
    let s_sh = s.t_shift(b);
    let mut lhs = big_f(f, x, s, b)? * big_f(fbar, q * x, &s_sh, b)?;
    let mut rhs = big_f(f, s.kappa1 * x / s.kappa2, s, b)?
        * big_f(fbar, s.kappa1 * x / s.kappa2, &s_sh, b)?;
    for xi in s.xi {
        lhs *= theta(s.kappa2 / (x * xi), b)?;
        rhs *= theta(xi / x, b)?;
    }
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).norm() / scale)
}

/// Relative residual of Eq. (gev), normalized by the larger side.
pub fn gev_residual(g: Scalar, gbar: Scalar, x: Scalar, s: &SurfaceParams, b: &Bases) -> Result<f64> {
    let q = b.q;
    let s_sh = s.t_shift(b);
    let mut lhs = big_g(g, x, s, b)? * big_g(gbar, q * x, &s_sh, b)?;
    let mut rhs = big_g(g, q * s.kappa2 * x / s.kappa1, s, b)?
        * big_g(gbar, q * q * q * s.kappa2 * x / s.kappa1, &s_sh, b)?;
    for xi in s.xi {
        lhs *= theta(s.kappa1 / (q * x * xi), b)?;
        rhs *= theta(xi / x, b)?;
    }
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).norm() / scale)
}
