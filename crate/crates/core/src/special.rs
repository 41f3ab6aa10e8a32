//! Elliptic special functions: Jacobi theta (base p), elliptic Gamma,
//! theta-Pochhammer symbols and the terminating very-well-poised balanced
//! elliptic hypergeometric series.
//!
//! The kernels are generic over [`CScalar`] so the determinant layer can
//! re-run them in double-double precision; the public API works on
//! `Complex64`.

use crate::scalar::CScalar;
use crate::{Error, Result, Scalar};
use num_complex::Complex64;

/// Elliptic/difference bases together with the truncation policy for the
/// infinite products. Requires |p| < 1 and |q| < 1.
#[derive(Clone, Copy, Debug)]
pub struct Bases {
    pub p: Scalar,
    pub q: Scalar,
    /// Products are truncated once the remaining factors deviate from 1 by
    /// less than this.
    pub truncation_tol: f64,
    /// Hard cap on product factors; reaching it before the tolerance is a
    /// numerical failure.
    pub max_terms: usize,
}

impl Bases {
    pub fn new(p: Scalar, q: Scalar) -> Result<Bases> {
        if p.norm() >= 1.0 || q.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "bases must satisfy |p|,|q| < 1 (got |p|={}, |q|={})",
                p.norm(),
                q.norm()
            )));
        }
        Ok(Bases {
            p,
            q,
            truncation_tol: 1e-17,
            max_terms: 400,
        })
    }

    pub fn with_tol(mut self, tol: f64, max_terms: usize) -> Result<Bases> {
        if tol <= 0.0 || max_terms == 0 {
            return Err(Error::Domain("truncation_tol > 0 and max_terms >= 1 required".into()));
        }
        self.truncation_tol = tol;
        self.max_terms = max_terms;
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Generic kernels
// ---------------------------------------------------------------------------

/// theta(x; p) = prod_{i>=0} (1 - x p^i)(1 - x^{-1} p^{i+1}), truncated when
/// |p|^M max(|x|, 1/|x|) drops below `tol`. Returns the value and the number
/// of product factors consumed.
pub fn theta_kernel<S: CScalar>(x: S, p: S, tol: f64, max_terms: usize) -> Result<(S, usize)> {
    let xm = x.mag();
    if xm == 0.0 {
        return Err(Error::Domain("theta(x): x = 0".into()));
    }
    let scale = xm.max(1.0 / xm);
    let pmag = p.mag();
    let mut prod = S::one();
    let mut pi = S::one(); // p^i
    for i in 0..max_terms {
        let f1 = S::one() - x * pi;
        let f2 = S::one() - pi * p / x;
        prod = prod * f1 * f2;
        pi = pi * p;
        if pmag.powi(i as i32 + 1) * scale < tol {
            if !prod.is_finite_val() {
                return Err(Error::Numerical("theta(x): non-finite product".into()));
            }
            return Ok((prod, i + 1));
        }
    }
    Err(Error::Numerical(format!(
        "theta(x): truncation cap {max_terms} reached before tolerance {tol}"
    )))
}

/// theta(x)_s = prod_{i=0}^{s-1} theta(q^i x).
pub fn theta_pochhammer_kernel<S: CScalar>(
    x: S,
    s: usize,
    p: S,
    q: S,
    tol: f64,
    max_terms: usize,
) -> Result<S> {
    let mut prod = S::one();
    let mut arg = x;
    for _ in 0..s {
        prod = prod * theta_kernel(arg, p, tol, max_terms)?.0;
        arg = arg * q;
    }
    Ok(prod)
}

/// The terminating very-well-poised balanced elliptic hypergeometric series
/// {n+5}V{n+4}(u0; u1..un; z) = sum_s [theta(u0 q^{2s})/theta(u0)]
///   prod_{j=0}^{n} [theta(u_j)_s / theta(q u0/u_j)_s] z^s,
/// where the j = 0 factor contributes theta(u0)_s / theta(q)_s.
///
/// Termination requires some u_j = q^{-Nt}; the sum then runs to the smallest
/// such Nt.
pub fn v_series_kernel<S: CScalar>(
    u0: S,
    us: &[S],
    z: S,
    p: S,
    q: S,
    tol: f64,
    max_terms: usize,
) -> Result<S> {
    let qc = q.to_c64();
    let mut nt: Option<usize> = None;
    for &u in us {
        let mut w = u.to_c64();
        for t in 0..=64usize {
            if (w - Complex64::new(1.0, 0.0)).norm() < 1e-10 {
                nt = Some(nt.map_or(t, |cur| cur.min(t)));
                break;
            }
            w *= qc;
        }
    }
    let nt = nt.ok_or_else(|| {
        Error::Domain("v_series: no terminating argument u_j = q^{-N} found".into())
    })?;

    let th = |y: S| -> Result<S> { Ok(theta_kernel(y, p, tol, max_terms)?.0) };
    let poch = |y: S, s: usize| theta_pochhammer_kernel(y, s, p, q, tol, max_terms);

    let th_u0 = th(u0)?;
    let mut sum = S::zero();
    let mut zs = S::one();
    let mut q2s = S::one(); // q^{2s}
    for s in 0..=nt {
        let mut term = th(u0 * q2s)? / th_u0;
        // j = 0 factor
        let den0 = poch(q, s)?;
        if den0.mag() == 0.0 {
            return Err(Error::Numerical("v_series: zero denominator Pochhammer".into()));
        }
        term = term * poch(u0, s)? / den0;
        for &u in us {
            let den = poch(q * u0 / u, s)?;
            if den.mag() == 0.0 {
                return Err(Error::Numerical("v_series: zero denominator Pochhammer".into()));
            }
            term = term * poch(u, s)? / den;
        }
        sum = sum + term * zs;
        zs = zs * z;
        q2s = q2s * q * q;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Public double-precision API
// ---------------------------------------------------------------------------

/// Jacobi theta function with base p.
pub fn theta(x: Scalar, b: &Bases) -> Result<Scalar> {
    Ok(theta_kernel(x, b.p, b.truncation_tol, b.max_terms)?.0)
}

/// theta plus the number of product factors used (CLI reporting).
pub fn theta_with_terms(x: Scalar, b: &Bases) -> Result<(Scalar, usize)> {
    theta_kernel(x, b.p, b.truncation_tol, b.max_terms)
}

/// theta(x1,...,xl) = theta(x1) ... theta(xl).
pub fn theta_multi(xs: &[Scalar], b: &Bases) -> Result<Scalar> {
    let mut prod = Scalar::new(1.0, 0.0);
    for &x in xs {
        prod *= theta(x, b)?;
    }
    Ok(prod)
}

/// Logarithmic derivative theta'(x)/theta(x) of the truncated product.
/// Valid away from zeros of the individual factors.
pub fn theta_log_deriv(x: Scalar, b: &Bases) -> Result<Scalar> {
    let xm = x.norm();
    if xm == 0.0 {
        return Err(Error::Domain("theta'(x): x = 0".into()));
    }
    let scale = xm.max(1.0 / xm);
    let pmag = b.p.norm();
    let one = Scalar::new(1.0, 0.0);
    let mut sum = Scalar::new(0.0, 0.0);
    let mut pi = one; // p^i
    for i in 0..b.max_terms {
        let f1 = one - x * pi;
        let f2 = one - pi * b.p / x;
        if f1.norm() < 1e-300 || f2.norm() < 1e-300 {
            return Err(Error::Numerical("theta'(x)/theta(x): pole of log-derivative".into()));
        }
        sum += -pi / f1 + (pi * b.p / (x * x)) / f2;
        pi *= b.p;
        if pmag.powi(i as i32 + 1) * scale < b.truncation_tol {
            return Ok(sum);
        }
    }
    Err(Error::Numerical("theta'(x): truncation cap reached".into()))
}

/// Elliptic Gamma function
/// Gamma(x; p, q) = prod_{i,j>=0} (1 - x^{-1} p^{i+1} q^{j+1}) / (1 - x p^i q^j).
pub fn ell_gamma(x: Scalar, b: &Bases) -> Result<Scalar> {
    let xm = x.norm();
    if xm == 0.0 {
        return Err(Error::Domain("ell_gamma(x): x = 0".into()));
    }
    let scale = xm.max(1.0 / xm);
    let tol = b.truncation_tol;
    let one = Scalar::new(1.0, 0.0);
    let pmag = b.p.norm();
    let qmag = b.q.norm();
    let mut prod = one;
    let mut pi = one; // p^i
    for i in 0..b.max_terms {
        let mut qj = one; // q^j
        let mut row_done = false;
        for _j in 0..b.max_terms {
            let den_arg = x * pi * qj;
            let den = one - den_arg;
            if den.norm() < 1e-10 {
                return Err(Error::Domain(format!(
                    "ell_gamma: pole, factor 1 - x p^i q^j vanishes near (i,j) with x p^i q^j = {den_arg}"
                )));
            }
            let num = one - pi * b.p * qj * b.q / x;
            prod *= num / den;
            let rem = den_arg.norm().max((pi * b.p * qj * b.q / x).norm());
            qj *= b.q;
            if rem * qmag < tol {
                row_done = true;
                break;
            }
        }
        if !row_done {
            return Err(Error::Numerical("ell_gamma: inner truncation cap reached".into()));
        }
        pi *= b.p;
        if pmag.powi(i as i32 + 1) * scale / (1.0 - qmag) < tol {
            return crate::ensure_finite(prod, "ell_gamma");
        }
    }
    Err(Error::Numerical("ell_gamma: outer truncation cap reached".into()))
}

/// theta(x)_s = prod_{i=0}^{s-1} theta(q^i x); the empty product is 1.
pub fn theta_pochhammer(x: Scalar, s: usize, b: &Bases) -> Result<Scalar> {
    theta_pochhammer_kernel(x, s, b.p, b.q, b.truncation_tol, b.max_terms)
}

/// theta(x)_s for non-integer shifts, served through the Gamma quotient
/// Gamma(q^s x)/Gamma(x). `qs` is the precomputed value of q^s.
pub fn theta_pochhammer_gamma(x: Scalar, qs: Scalar, b: &Bases) -> Result<Scalar> {
    Ok(ell_gamma(qs * x, b)? / ell_gamma(x, b)?)
}

/// Generalized Pochhammer (x, v)_n = prod_{i=0}^{n-1} theta(x v^i).
pub fn gen_pochhammer(x: Scalar, v: Scalar, n: usize, b: &Bases) -> Result<Scalar> {
    if n >= 1 && v.norm() == 0.0 {
        return Err(Error::Domain("gen_pochhammer: v = 0 with n >= 1".into()));
    }
    let mut prod = Scalar::new(1.0, 0.0);
    let mut arg = x;
    for _ in 0..n {
        prod *= theta(arg, b)?;
        arg *= v;
    }
    Ok(prod)
}

/// Terminating {n+5}V{n+4}(u0; u1..un; z); see [`v_series_kernel`].
pub fn v_series(u0: Scalar, us: &[Scalar], z: Scalar, b: &Bases) -> Result<Scalar> {
    v_series_kernel(u0, us, z, b.p, b.q, b.truncation_tol, b.max_terms)
}
