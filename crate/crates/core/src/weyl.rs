//! The affine Weyl group of type E8(1): multiplicative action on the
//! parameters (h1, h2, u1..u8), the birational extension to (f, g), the
//! composite words r and T, Coxeter-relation verification, and the rescaling
//! bridge to the surface picture (kappa, xi, c).

use crate::linalg;
use crate::painleve::{theta_pair, SurfaceParams};
use crate::sampling::draw_annulus;
use crate::special::Bases;
use crate::{Error, Result, Scalar};
use rand::Rng;

/// Parameters of the appendix picture: multipliers h1, h2, the eight u_i,
/// and the shared gauge pair (d1, d2) of the curve charts.
#[derive(Clone, Copy, Debug)]
pub struct WeylParams {
    pub h1: Scalar,
    pub h2: Scalar,
    pub u: [Scalar; 8],
    pub d1: Scalar,
    pub d2: Scalar,
}

impl WeylParams {
    pub fn new(h1: Scalar, h2: Scalar, u: [Scalar; 8], d1: Scalar, d2: Scalar) -> Result<WeylParams> {
        if h1.norm() == 0.0
            || h2.norm() == 0.0
            || d1.norm() == 0.0
            || d2.norm() == 0.0
            || u.iter().any(|ui| ui.norm() == 0.0)
        {
            return Err(Error::Domain("weyl params: all entries must be nonzero".into()));
        }
        Ok(WeylParams { h1, h2, u, d1, d2 })
    }

    /// q = h1^2 h2^2 / (u1 .. u8), invariant under the whole group.
    pub fn q(&self) -> Scalar {
        let prod: Scalar = self.u.iter().product();
        self.h1 * self.h1 * self.h2 * self.h2 / prod
    }

    /// v = q h2 / h1.
    pub fn v(&self) -> Scalar {
        self.q() * self.h2 / self.h1
    }
}

/// Generators of the action; indices are one-based, 1 <= i != j <= 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    S(usize, usize),
    C,
    Mu(usize, usize),
    Nu(usize, usize),
}

fn check_pair(i: usize, j: usize) -> Result<()> {
    if i == j || !(1..=8).contains(&i) || !(1..=8).contains(&j) {
        return Err(Error::Domain("weyl generator: indices must be distinct, in 1..=8".into()));
    }
    Ok(())
}

/// Multiplicative action of a generator on the parameters; the gauge pair
/// (d1, d2) is untouched.
pub fn act_param(gen: Gen, w: &WeylParams) -> Result<WeylParams> {
    let mut out = *w;
    match gen {
        Gen::S(i, j) => {
            check_pair(i, j)?;
            out.u.swap(i - 1, j - 1);
        }
        Gen::C => {
            std::mem::swap(&mut out.h1, &mut out.h2);
        }
        Gen::Mu(i, j) => {
            check_pair(i, j)?;
            out.h1 = w.h1 * w.h2 / (w.u[i - 1] * w.u[j - 1]);
            out.u[i - 1] = w.h2 / w.u[j - 1];
            out.u[j - 1] = w.h2 / w.u[i - 1];
        }
        Gen::Nu(i, j) => {
            check_pair(i, j)?;
            out.h2 = w.h1 * w.h2 / (w.u[i - 1] * w.u[j - 1]);
            out.u[i - 1] = w.h1 / w.u[j - 1];
            out.u[j - 1] = w.h1 / w.u[i - 1];
        }
    }
    Ok(out)
}

/// f_star(z) = theta(d2/z, h1/(d2 z)) / theta(d1/z, h1/(d1 z)).
pub fn f_star_w(z: Scalar, w: &WeylParams, b: &Bases) -> Result<Scalar> {
    let den = theta_pair(z, w.d1, w.h1, b)?;
    if den.norm() == 0.0 {
        return Err(Error::Domain("f_star_w: point at infinity in the f-chart".into()));
    }
    Ok(theta_pair(z, w.d2, w.h1, b)? / den)
}

/// g_star(z) = theta(d2/z, h2/(d2 z)) / theta(d1/z, h2/(d1 z)).
pub fn g_star_w(z: Scalar, w: &WeylParams, b: &Bases) -> Result<Scalar> {
    let den = theta_pair(z, w.d1, w.h2, b)?;
    if den.norm() == 0.0 {
        return Err(Error::Domain("g_star_w: point at infinity in the g-chart".into()));
    }
    Ok(theta_pair(z, w.d2, w.h2, b)? / den)
}

/// Parameters together with a point (f, g) of the Painleve phase space.
#[derive(Clone, Copy, Debug)]
pub struct WeylState {
    pub w: WeylParams,
    pub f: Scalar,
    pub g: Scalar,
}

/// Solve (t - pi)/(t - pj) = r for t, with degeneracy guards.
fn cross_ratio_solve(pi: Scalar, pj: Scalar, r: Scalar) -> Result<Scalar> {
    let den = Scalar::new(1.0, 0.0) - r;
    if den.norm() <= 1e-12 * (1.0 + r.norm()) {
        return Err(Error::Numerical("weyl point action: degenerate cross-ratio".into()));
    }
    Ok((pi - r * pj) / den)
}

/// Birational action of a generator on the full state (parameters and point).
pub fn act_point(gen: Gen, st: &WeylState, b: &Bases) -> Result<WeylState> {
    let w = &st.w;
    let wp = act_param(gen, w)?;
    let (f, g) = (st.f, st.g);
    let (fp, gp) = match gen {
        Gen::S(_, _) => (f, g),
        Gen::C => (g, f),
        Gen::Mu(i, j) | Gen::Nu(i, j) => {
            let (ui, uj) = (w.u[i - 1], w.u[j - 1]);
            let (fi, gi) = (f_star_w(ui, w, b)?, g_star_w(ui, w, b)?);
            let (fj, gj) = (f_star_w(uj, w, b)?, g_star_w(uj, w, b)?);
            let near = |a: Scalar, bb: Scalar| (a - bb).norm() <= 1e-10 * (1.0 + a.norm().max(bb.norm()));
            if (near(f, fi) && near(g, gi)) || (near(f, fj) && near(g, gj)) {
                return Err(Error::Domain(
                    "weyl point action: input at an indeterminacy point".into(),
                ));
            }
            match gen {
                Gen::Mu(_, _) => {
                    let den = (f - fj) * (g - gi);
                    if den.norm() == 0.0 {
                        return Err(Error::Numerical("weyl mu: vanishing cross-ratio denominator".into()));
                    }
                    let r = (f - fi) * (g - gj) / den;
                    // images of the base points: f_star at the transformed
                    // parameters, evaluated at the transformed u_i, u_j
                    let mfi = f_star_w(wp.u[i - 1], &wp, b)?;
                    let mfj = f_star_w(wp.u[j - 1], &wp, b)?;
                    (cross_ratio_solve(mfi, mfj, r)?, g)
                }
                _ => {
                    let den = (g - gj) * (f - fi);
                    if den.norm() == 0.0 {
                        return Err(Error::Numerical("weyl nu: vanishing cross-ratio denominator".into()));
                    }
                    let r = (g - gi) * (f - fj) / den;
                    let ngi = g_star_w(wp.u[i - 1], &wp, b)?;
                    let ngj = g_star_w(wp.u[j - 1], &wp, b)?;
                    (f, cross_ratio_solve(ngi, ngj, r)?)
                }
            }
        }
    };
    crate::ensure_finite(fp, "weyl point f")?;
    crate::ensure_finite(gp, "weyl point g")?;
    Ok(WeylState { w: wp, f: fp, g: gp })
}

/// Apply a word of generators left to right (first element acts first).
pub fn act_word(word: &[Gen], st: &WeylState, b: &Bases) -> Result<WeylState> {
    let mut cur = *st;
    for &gen in word {
        cur = act_point(gen, &cur, b)?;
    }
    Ok(cur)
}

/// Apply a word to parameters only.
pub fn act_word_param(word: &[Gen], w: &WeylParams) -> Result<WeylParams> {
    let mut cur = *w;
    for &gen in word {
        cur = act_param(gen, &cur)?;
    }
    Ok(cur)
}

/// The half-translation r = s12 mu12 s34 mu34 s56 mu56 s78 mu78:
/// r(h1) = v h2, r(h2) = h2, r(u_i) = h2/u_i.
pub fn r_word() -> Vec<Gen> {
    vec![
        Gen::Mu(1, 2),
        Gen::S(1, 2),
        Gen::Mu(3, 4),
        Gen::S(3, 4),
        Gen::Mu(5, 6),
        Gen::S(5, 6),
        Gen::Mu(7, 8),
        Gen::S(7, 8),
    ]
}

/// The translation T = r c r c (applied left to right):
/// T(h1) = q h2^2/h1, T(h2) = q^3 h2^3/h1^2, T(u_i) = v u_i.
pub fn t_word() -> Vec<Gen> {
    let mut word = r_word();
    word.push(Gen::C);
    word.extend(r_word());
    word.push(Gen::C);
    word
}

fn rel(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / (a.norm().max(b.norm())).max(f64::MIN_POSITIVE)
}

fn param_dev(a: &WeylParams, b: &WeylParams) -> f64 {
    let mut d = rel(a.h1, b.h1).max(rel(a.h2, b.h2));
    for t in 0..8 {
        d = d.max(rel(a.u[t], b.u[t]));
    }
    d
}

fn point_dev(a: &WeylState, b: &WeylState) -> f64 {
    rel(a.f, b.f).max(rel(a.g, b.g))
}

/// Result of the Coxeter-relation verification.
#[derive(Clone, Copy, Debug)]
pub struct CoxeterReport {
    /// max deviation over all relation checks, on parameters
    pub max_param_dev: f64,
    /// max deviation over all relation checks, on the point (f, g)
    pub max_point_dev: f64,
}

/// The nine simple reflections of the E8(1) diagram:
/// c - mu12 - s23 - s34 - s45 - s56 - s67 - s78, with s12 attached to s23.
pub fn simple_reflections() -> [Gen; 9] {
    [
        Gen::C,
        Gen::Mu(1, 2),
        Gen::S(2, 3),
        Gen::S(3, 4),
        Gen::S(4, 5),
        Gen::S(5, 6),
        Gen::S(6, 7),
        Gen::S(7, 8),
        Gen::S(1, 2),
    ]
}

fn diagram_adjacent(i: usize, j: usize) -> bool {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 8)];
    edges.contains(&(i.min(j), i.max(j)))
}

/// Verify, at the given generic state, that each simple reflection squares to
/// the identity and that every pair satisfies its diagram relation (braid if
/// adjacent, commutation otherwise), on parameters and on the point.
pub fn coxeter_check(st: &WeylState, b: &Bases) -> Result<CoxeterReport> {
    let nodes = simple_reflections();
    let mut max_param: f64 = 0.0;
    let mut max_point: f64 = 0.0;
    let record = |lhs: &WeylState, rhs: &WeylState, mp: &mut f64, mq: &mut f64| {
        *mp = mp.max(param_dev(&lhs.w, &rhs.w));
        *mq = mq.max(point_dev(lhs, rhs));
    };
    for (idx, &s) in nodes.iter().enumerate() {
        let sq = act_word(&[s, s], st, b)?;
        record(&sq, st, &mut max_param, &mut max_point);
        for (jdx, &t) in nodes.iter().enumerate().skip(idx + 1) {
            let (lhs, rhs) = if diagram_adjacent(idx, jdx) {
                (
                    act_word(&[s, t, s], st, b)?,
                    act_word(&[t, s, t], st, b)?,
                )
            } else {
                (
                    act_word(&[s, t], st, b)?,
                    act_word(&[t, s], st, b)?,
                )
            };
            record(&lhs, &rhs, &mut max_param, &mut max_point);
        }
    }
    Ok(CoxeterReport { max_param_dev: max_param, max_point_dev: max_point })
}

/// Rescale (h_i, u_i, d_i) = (kappa_i lambda^2, xi_i lambda, c_i lambda) with
/// lambda = (h1^3/h2)^(1/4) (principal branch) and return the surface-picture
/// parameters together with lambda. The shared gauge pair maps to both curve
/// charts: c = (d1, d2, d1, d2)/lambda.
pub fn rescale_bridge(w: &WeylParams, b: &Bases) -> Result<(SurfaceParams, Scalar)> {
    let lambda = (w.h1 * w.h1 * w.h1 / w.h2).powf(0.25);
    let l2 = lambda * lambda;
    let mut xi = [Scalar::new(0.0, 0.0); 8];
    for t in 0..8 {
        xi[t] = w.u[t] / lambda;
    }
    let c = [w.d1 / lambda, w.d2 / lambda, w.d1 / lambda, w.d2 / lambda];
    let s = SurfaceParams::new(w.h1 / l2, w.h2 / l2, xi, c, b)?;
    Ok((s, lambda))
}

/// Change-of-chart matrix between two theta-pair bases with the same
/// multiplier kappa: returns (A11, A12, A21, A22) such that the new-chart
/// coordinate is f_new = (A21 + A22 f_old)/(A11 + A12 f_old). The bases span
/// the same two-dimensional space of order-2 theta functions, so the matrix
/// is exact; it is solved numerically at the two sample points z1, z2.
pub fn gauge_change(
    c_old: [Scalar; 2],
    c_new: [Scalar; 2],
    kappa: Scalar,
    z: [Scalar; 2],
    b: &Bases,
) -> Result<[Scalar; 4]> {
    let e_old = |i: usize, zz: Scalar| theta_pair(zz, c_old[i], kappa, b);
    let e_new = |i: usize, zz: Scalar| theta_pair(zz, c_new[i], kappa, b);
    let mat = vec![
        vec![e_old(0, z[0])?, e_old(1, z[0])?],
        vec![e_old(0, z[1])?, e_old(1, z[1])?],
    ];
    let (row1, _) = linalg::solve(&mat, &[e_new(0, z[0])?, e_new(0, z[1])?])?;
    let (row2, _) = linalg::solve(&mat, &[e_new(1, z[0])?, e_new(1, z[1])?])?;
    Ok([row1[0], row1[1], row2[0], row2[1]])
}

/// Apply the fractional-linear chart change from [`gauge_change`].
pub fn mobius_apply(mat: &[Scalar; 4], f: Scalar) -> Result<Scalar> {
    let den = mat[0] + mat[1] * f;
    if den.norm() == 0.0 {
        return Err(Error::Numerical("mobius_apply: image at infinity".into()));
    }
    Ok((mat[2] + mat[3] * f) / den)
}

/// Draw generic Weyl parameters with the derived q equal to the given base q.
/// h1, h2, u1..u7 and the gauge pair are free; u8 closes the q-constraint.
pub fn draw_weyl<R: Rng>(rng: &mut R, b: &Bases) -> WeylParams {
    loop {
        let h1 = draw_annulus(rng, 0.8, 1.25);
        let h2 = draw_annulus(rng, 0.8, 1.25);
        let mut u = [Scalar::new(0.0, 0.0); 8];
        for ut in u.iter_mut().take(7) {
            *ut = draw_annulus(rng, 0.8, 1.25);
        }
        let prod7: Scalar = u.iter().take(7).product();
        u[7] = h1 * h1 * h2 * h2 / (b.q * prod7);
        if u[7].norm() < 0.5 || u[7].norm() > 2.0 {
            continue;
        }
        let d1 = draw_annulus(rng, 0.8, 1.25);
        let d2 = draw_annulus(rng, 0.8, 1.25);
        return WeylParams { h1, h2, u, d1, d2 };
    }
}
