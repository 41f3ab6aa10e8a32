//! The interpolation problem: data Y_s, the theta-quotient bases phi_i, chi_i,
//! the linear solve for the interpolant coefficients, and evaluation of the
//! interpolating functions U(x), V(x).

use crate::linalg;
use crate::scalar::{CScalar, Cdd};
use crate::special::{ell_gamma, theta_pochhammer, Bases};
use crate::{Error, Result, Scalar};

/// Condition-number ceiling for the interpolation solve; beyond this the
/// parameter draw is treated as non-generic.
pub const COND_LIMIT: f64 = 1e12;

/// Grid-residual ceiling for an accepted solve. Larger residuals mean the
/// normalization u0 = 1 is nearly singular for the draw (the true solution
/// has u0 close to 0), which we report as non-generic parameters.
pub const SOLVE_TOL: f64 = 1e-9;

/// Parameters (k, a1..a6, m, n) of the interpolation problem, subject to
/// a1 a2 a3 a4 a5 a6 = k^3.
#[derive(Clone, Copy, Debug)]
pub struct PadeParams {
    pub k: Scalar,
    pub a: [Scalar; 6],
    pub m: usize,
    pub n: usize,
}

impl PadeParams {
    pub fn new(k: Scalar, a: [Scalar; 6], m: usize, n: usize) -> Result<PadeParams> {
        if k.norm() == 0.0 || a.iter().any(|ai| ai.norm() == 0.0) {
            return Err(Error::Domain("pade params: k and all a_i must be nonzero".into()));
        }
        let prod: Scalar = a.iter().product();
        let k3 = k * k * k;
        if (prod - k3).norm() > 1e-8 * k3.norm() {
            return Err(Error::Domain(format!(
                "pade params: constraint a1..a6 = k^3 violated (|prod - k^3|/|k^3| = {})",
                (prod - k3).norm() / k3.norm()
            )));
        }
        Ok(PadeParams { k, a, m, n })
    }

    /// N = m + n, the number of interpolation conditions minus one.
    pub fn big_n(&self) -> usize {
        self.m + self.n
    }

    /// The special deformation direction:
    /// (k, a1, .., a6, m, n) -> (kq, a1/q, a2, a3 q, .., a6 q, m+1, n-1).
    pub fn t_shift(&self, b: &Bases) -> Result<PadeParams> {
        if self.n == 0 {
            return Err(Error::Domain("t_shift: requires n >= 1".into()));
        }
        let q = b.q;
        PadeParams::new(
            self.k * q,
            [
                self.a[0] / q,
                self.a[1],
                self.a[2] * q,
                self.a[3] * q,
                self.a[4] * q,
                self.a[5] * q,
            ],
            self.m + 1,
            self.n - 1,
        )
    }

    /// Multiply a single a_i by a power of q (tau-function parameter shifts).
    /// The caller is responsible for keeping the constraint balanced.
    pub(crate) fn shifted_a(&self, idx: usize, qpow: i32, b: &Bases) -> PadeParams {
        let mut a = self.a;
        a[idx] *= b.q.powi(qpow);
        PadeParams { k: self.k, a, m: self.m, n: self.n }
    }
}

/// Solved interpolant coefficients, normalized with u0 = 1.
#[derive(Clone, Debug)]
pub struct InterpolantPair {
    pub u: Vec<Scalar>,
    pub v: Vec<Scalar>,
    pub residual_norm: f64,
}

/// Y_s = prod_i theta(a_i)_s / theta(k/a_i)_s.
pub fn y_value(s: usize, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let mut val = Scalar::new(1.0, 0.0);
    for &ai in &pp.a {
        let num = theta_pochhammer(ai, s, b)?;
        let den = theta_pochhammer(pp.k / ai, s, b)?;
        if den.norm() == 0.0 {
            return Err(Error::Numerical("y_value: vanishing denominator Pochhammer".into()));
        }
        val *= num / den;
    }
    Ok(val)
}

/// The Gamma-quotient interpolant of Y_s:
/// Y(x) = prod_i Gamma(a_i/x) Gamma(k/a_i) / (Gamma(k/(a_i x)) Gamma(a_i)).
pub fn y_func(x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let mut val = Scalar::new(1.0, 0.0);
    for &ai in &pp.a {
        val *= ell_gamma(ai / x, b)? * ell_gamma(pp.k / ai, b)?
            / (ell_gamma(pp.k / (ai * x), b)? * ell_gamma(ai, b)?);
    }
    Ok(val)
}

fn poch_ratio(nums: &[Scalar], dens: &[Scalar], s: usize, b: &Bases) -> Result<Scalar> {
    let mut val = Scalar::new(1.0, 0.0);
    for &u in nums {
        val *= theta_pochhammer(u, s, b)?;
    }
    for &u in dens {
        let d = theta_pochhammer(u, s, b)?;
        if d.norm() == 0.0 {
            return Err(Error::Numerical("basis: vanishing denominator Pochhammer".into()));
        }
        val /= d;
    }
    Ok(val)
}

/// Basis function phi_i(x) of the U-interpolant.
pub fn phi(i: usize, x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let (k, q) = (pp.k, b.q);
    let (a2, a4) = (pp.a[1], pp.a[3]);
    let qi = q.powu(i as u32);
    poch_ratio(
        &[a4 / x, k / (qi * a4 * x), a2 / qi, k / a2],
        &[a2 / (qi * x), k / (a2 * x), a4, k / (qi * a4)],
        i,
        b,
    )
}

/// Basis function chi_i(x) of the V-interpolant.
pub fn chi(i: usize, x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let (k, q) = (pp.k, b.q);
    let (a1, a3) = (pp.a[0], pp.a[2]);
    let qi = q.powu(i as u32);
    poch_ratio(
        &[a3 / (qi * x), k / (a3 * x), a1, k / (qi * a1)],
        &[a1 / x, k / (qi * a1 * x), a3 / qi, k / a3],
        i,
        b,
    )
}

/// Closed grid form of phi_i(q^{-s}).
pub fn phi_grid(i: usize, s: usize, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let (k, q) = (pp.k, b.q);
    let (a2, a4) = (pp.a[1], pp.a[3]);
    let qi = q.powu(i as u32);
    poch_ratio(
        &[k / a2, k / a4, a2 / qi, qi * a4],
        &[a2, a4, qi * k / a2, k / (qi * a4)],
        s,
        b,
    )
}

/// Closed grid form of chi_i(q^{-s}).
pub fn chi_grid(i: usize, s: usize, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let (k, q) = (pp.k, b.q);
    let (a1, a3) = (pp.a[0], pp.a[2]);
    let qi = q.powu(i as u32);
    poch_ratio(
        &[a1, a3, k / (qi * a1), qi * k / a3],
        &[k / a1, k / a3, qi * a1, a3 / qi],
        s,
        b,
    )
}

/// Prescribed-zero denominator U_den(x) = theta(a2/(q^n x), k/(a2 x))_n.
pub fn u_den(x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let qn = b.q.powu(pp.n as u32);
    Ok(theta_pochhammer(pp.a[1] / (qn * x), pp.n, b)?
        * theta_pochhammer(pp.k / (pp.a[1] * x), pp.n, b)?)
}

/// Prescribed-pole denominator V_den(x) = theta(a1/x, k/(q^m a1 x))_m.
pub fn v_den(x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let qm = b.q.powu(pp.m as u32);
    Ok(theta_pochhammer(pp.a[0] / x, pp.m, b)?
        * theta_pochhammer(pp.k / (qm * pp.a[0] * x), pp.m, b)?)
}

/// Solve the interpolation conditions V(q^{-s}) = Y_s U(q^{-s}), s = 0..N,
/// with u0 = 1, as an (N+1) x (N+1) linear system in (u1..un, v0..vm).
pub fn solve_interpolation(pp: &PadeParams, b: &Bases) -> Result<InterpolantPair> {
    let (m, n) = (pp.m, pp.n);
    let nn = pp.big_n() + 1;
    let mut mat = vec![vec![Scalar::new(0.0, 0.0); nn]; nn];
    let mut rhs = vec![Scalar::new(0.0, 0.0); nn];
    for s in 0..nn {
        let xs = b.q.powi(-(s as i32));
        let ys = y_value(s, pp, b)?;
        for i in 1..=n {
            mat[s][i - 1] = -ys * phi(i, xs, pp, b)?;
        }
        for i in 0..=m {
            mat[s][n + i] = chi(i, xs, pp, b)?;
        }
        rhs[s] = ys; // Y_s * phi_0 with phi_0 = 1
    }
    // Solve in double-double: the grid system can reach pivot ratios around
    // 1e9 on admissible draws, which would leave f64 residuals above 1e-8.
    let mat_dd: Vec<Vec<Cdd>> = mat
        .iter()
        .map(|row| row.iter().map(|&z| Cdd::from_c64(z)).collect())
        .collect();
    let rhs_dd: Vec<Cdd> = rhs.iter().map(|&z| Cdd::from_c64(z)).collect();
    let (sol_dd, cond) = linalg::solve(&mat_dd, &rhs_dd)?;
    let sol: Vec<Scalar> = sol_dd.iter().map(|z| z.to_c64()).collect();
    if cond > COND_LIMIT {
        return Err(Error::Numerical(format!(
            "solve_interpolation: ill-conditioned system (pivot ratio {cond:.3e}); non-generic parameters"
        )));
    }
    let mut u = Vec::with_capacity(n + 1);
    u.push(Scalar::new(1.0, 0.0));
    u.extend_from_slice(&sol[..n]);
    let v = sol[n..].to_vec();
    let ip = InterpolantPair { u, v, residual_norm: 0.0 };
    let mut res: f64 = 0.0;
    for s in 0..nn {
        let xs = b.q.powi(-(s as i32));
        let ys = y_value(s, pp, b)?;
        let uu = eval_u(&ip, xs, pp, b)?;
        let vv = eval_v(&ip, xs, pp, b)?;
        let denom = vv.norm() + (ys * uu).norm();
        if denom > 0.0 {
            res = res.max((vv - ys * uu).norm() / denom);
        }
    }
    if res > SOLVE_TOL {
        return Err(Error::Numerical(format!(
            "solve_interpolation: grid residual {res:.3e} exceeds {SOLVE_TOL:.0e}; \
             non-generic parameters (u0-normalization nearly singular)"
        )));
    }
    Ok(InterpolantPair { residual_norm: res, ..ip })
}

/// U(x) = sum_i u_i phi_i(x).
pub fn eval_u(ip: &InterpolantPair, x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let mut acc = Scalar::new(0.0, 0.0);
    for (i, &ui) in ip.u.iter().enumerate() {
        acc += ui * phi(i, x, pp, b)?;
    }
    Ok(acc)
}

/// V(x) = sum_i v_i chi_i(x).
pub fn eval_v(ip: &InterpolantPair, x: Scalar, pp: &PadeParams, b: &Bases) -> Result<Scalar> {
    let mut acc = Scalar::new(0.0, 0.0);
    for (i, &vi) in ip.v.iter().enumerate() {
        acc += vi * chi(i, x, pp, b)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{draw_bases, draw_pade};
    use crate::special::theta;
    use num_complex::Complex64 as C;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture(m: usize, n: usize, seed: u64) -> (PadeParams, Bases) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = draw_bases(&mut rng);
        let pp = draw_pade(&mut rng, m, n);
        (pp, b)
    }

    #[test]
    fn constraint_enforced() {
        let k = C::new(1.1, 0.2);
        let bad = [C::new(1.0, 0.0); 6];
        assert!(PadeParams::new(k, bad, 1, 1).is_err());
    }

    #[test]
    fn y_value_basics() {
        let (pp, b) = fixture(1, 1, 7);
        assert_eq!(y_value(0, &pp, &b).unwrap(), C::new(1.0, 0.0));
        // direct oracle for s = 1
        let mut oracle = C::new(1.0, 0.0);
        for &ai in &pp.a {
            oracle *= theta(ai, &b).unwrap() / theta(pp.k / ai, &b).unwrap();
        }
        let y1 = y_value(1, &pp, &b).unwrap();
        assert!((y1 - oracle).norm() < 1e-13 * oracle.norm());
    }

    #[test]
    fn y_func_matches_grid_values() {
        let (pp, b) = fixture(1, 1, 11);
        assert!((y_func(C::new(1.0, 0.0), &pp, &b).unwrap() - 1.0).norm() < 1e-11);
        for s in 0..=pp.big_n() {
            let x = b.q.powi(-(s as i32));
            let lhs = y_func(x, &pp, &b).unwrap();
            let rhs = y_value(s, &pp, &b).unwrap();
            assert!(
                (lhs - rhs).norm() < 1e-10 * rhs.norm(),
                "s={s}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn phi_chi_basics() {
        let (pp, b) = fixture(2, 2, 13);
        let x = C::new(0.9, 0.3);
        assert_eq!(phi(0, x, &pp, &b).unwrap(), C::new(1.0, 0.0));
        assert_eq!(chi(0, x, &pp, &b).unwrap(), C::new(1.0, 0.0));
        // phi_i(a4) = delta_{i,0}
        for i in 1..=2 {
            let v = phi(i, pp.a[3], &pp, &b).unwrap();
            assert!(v.norm() < 1e-12, "phi_{i}(a4) = {v}");
        }
        // direct product oracle for phi_2 at a sample point
        let i = 2usize;
        let qi = b.q.powu(i as u32);
        let (k, a2, a4) = (pp.k, pp.a[1], pp.a[3]);
        let pc = |u: C| theta_pochhammer(u, i, &b).unwrap();
        let oracle = pc(a4 / x) * pc(k / (qi * a4 * x)) * pc(a2 / qi) * pc(k / a2)
            / (pc(a2 / (qi * x)) * pc(k / (a2 * x)) * pc(a4) * pc(k / (qi * a4)));
        let v = phi(i, x, &pp, &b).unwrap();
        assert!((v - oracle).norm() < 1e-13 * oracle.norm());
    }

    #[test]
    fn grid_closed_forms_match() {
        let (pp, b) = fixture(2, 2, 17);
        for s in 0..=pp.big_n() {
            let xs = b.q.powi(-(s as i32));
            for i in 0..=2usize {
                let lhs = phi(i, xs, &pp, &b).unwrap();
                let rhs = phi_grid(i, s, &pp, &b).unwrap();
                assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1e-12), "phi i={i} s={s}");
                let lhs = chi(i, xs, &pp, &b).unwrap();
                let rhs = chi_grid(i, s, &pp, &b).unwrap();
                assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1e-12), "chi i={i} s={s}");
            }
        }
    }

    #[test]
    fn trivial_interpolation() {
        let (pp, b) = fixture(0, 0, 19);
        let ip = solve_interpolation(&pp, &b).unwrap();
        assert_eq!(ip.u, vec![C::new(1.0, 0.0)]);
        assert!((ip.v[0] - 1.0).norm() < 1e-14);
        let x = C::new(1.3, -0.4);
        assert_eq!(eval_u(&ip, x, &pp, &b).unwrap(), C::new(1.0, 0.0));
    }

    #[test]
    fn small_solve_residuals() {
        let (pp, b) = fixture(0, 1, 23);
        let ip = solve_interpolation(&pp, &b).unwrap();
        assert!(ip.residual_norm < 1e-10, "residual {}", ip.residual_norm);
        assert_eq!(ip.u.len(), 2);
        assert_eq!(ip.v.len(), 1);
    }

    #[test]
    fn solve_residuals_all_shapes() {
        let mut draw = 0u64;
        for m in 0..=4usize {
            for n in 0..=(4 - m) {
                draw += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(100 + draw);
                let (pp, _b, ip) = crate::sampling::draw_solved(&mut rng, m, n);
                let _ = pp;
                assert!(
                    ip.residual_norm <= 1e-8,
                    "(m,n)=({m},{n}) residual {}",
                    ip.residual_norm
                );
            }
        }
    }

    #[test]
    fn symmetry_under_x_to_k_over_qx() {
        let (pp, b) = fixture(2, 1, 29);
        let ip = solve_interpolation(&pp, &b).unwrap();
        for t in 0..5 {
            let x = C::from_polar(0.8 + 0.1 * t as f64, 0.7 * t as f64);
            let xr = pp.k / (b.q * x);
            let u1 = eval_u(&ip, x, &pp, &b).unwrap();
            let u2 = eval_u(&ip, xr, &pp, &b).unwrap();
            assert!((u1 - u2).norm() < 1e-9 * u1.norm().max(1e-12), "U sym at {x}");
            let v1 = eval_v(&ip, x, &pp, &b).unwrap();
            let v2 = eval_v(&ip, xr, &pp, &b).unwrap();
            assert!((v1 - v2).norm() < 1e-9 * v1.norm().max(1e-12), "V sym at {x}");
        }
        // V(1)/U(1) = 1
        let one = C::new(1.0, 0.0);
        let r = eval_v(&ip, one, &pp, &b).unwrap() / eval_u(&ip, one, &pp, &b).unwrap();
        assert!((r - one).norm() < 1e-9);
    }

    #[test]
    fn u_den_v_den_edges() {
        let (pp0, b) = fixture(0, 0, 31);
        let x = C::new(1.2, 0.1);
        assert_eq!(u_den(x, &pp0, &b).unwrap(), C::new(1.0, 0.0));
        assert_eq!(v_den(x, &pp0, &b).unwrap(), C::new(1.0, 0.0));
        let (pp, b2) = fixture(1, 2, 37);
        let qn = b2.q.powu(2);
        let oracle = theta_pochhammer(pp.a[1] / (qn * x), 2, &b2).unwrap()
            * theta_pochhammer(pp.k / (pp.a[1] * x), 2, &b2).unwrap();
        let v = u_den(x, &pp, &b2).unwrap();
        assert!((v - oracle).norm() < 1e-13 * oracle.norm());
    }

    #[test]
    fn t_shift_preserves_constraint() {
        let (pp, b) = fixture(1, 2, 41);
        let sh = pp.t_shift(&b).unwrap();
        assert_eq!((sh.m, sh.n), (2, 1));
        let prod: C = sh.a.iter().product();
        let k3 = sh.k * sh.k * sh.k;
        assert!((prod - k3).norm() < 1e-10 * k3.norm());
    }
}

