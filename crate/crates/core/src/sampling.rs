//! Seeded parameter draws used by the verification suites and the CLI.
//!
//! All draws go through a caller-supplied RNG (the CLI uses ChaCha8 with a
//! 64-bit seed) so reports are reproducible across platforms.

use crate::pade::PadeParams;
use crate::special::Bases;
use crate::Scalar;
use num_complex::Complex64;
use rand::Rng;

/// Uniform point on the annulus rmin <= |z| <= rmax with random phase.
pub fn draw_annulus<R: Rng>(rng: &mut R, rmin: f64, rmax: f64) -> Scalar {
    let r = rng.gen_range(rmin..rmax);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phi)
}

/// Bases with moduli kept small enough for well-conditioned products:
/// |p| in [0.05, 0.2], |q| in [0.10, 0.18], mild phases.
pub fn draw_bases<R: Rng>(rng: &mut R) -> Bases {
    let p = Complex64::from_polar(rng.gen_range(0.05..0.2), rng.gen_range(-0.5..0.5));
    let q = Complex64::from_polar(rng.gen_range(0.10..0.18), rng.gen_range(-0.4..0.4));
    Bases::new(p, q).expect("moduli < 1 by construction")
}

/// Draw k, a1..a5 with moduli in [0.7, 1.4] and generic phases, then set
/// a6 = k^3 / (a1 .. a5) so the constraint holds exactly.
pub fn draw_pade<R: Rng>(rng: &mut R, m: usize, n: usize) -> PadeParams {
    loop {
        let k = draw_annulus(rng, 0.7, 1.4);
        let mut a = [Complex64::new(0.0, 0.0); 6];
        for ai in a.iter_mut().take(5) {
            *ai = draw_annulus(rng, 0.7, 1.4);
        }
        let prod5: Scalar = a.iter().take(5).product();
        a[5] = k * k * k / prod5;
        // keep a6 in a sane modulus band so thetas stay O(1)
        if a[5].norm() < 0.3 || a[5].norm() > 3.0 {
            continue;
        }
        if let Ok(pp) = PadeParams::new(k, a, m, n) {
            return pp;
        }
    }
}

/// Draw parameters until the interpolation problem solves cleanly. Rejected
/// draws (ill-conditioned or nearly u0-singular systems) are non-generic;
/// a fresh draw from the same stream keeps reports reproducible.
pub fn draw_solved<R: Rng>(
    rng: &mut R,
    m: usize,
    n: usize,
) -> (PadeParams, Bases, crate::pade::InterpolantPair) {
    for _ in 0..64 {
        let b = draw_bases(rng);
        let pp = draw_pade(rng, m, n);
        if let Ok(ip) = crate::pade::solve_interpolation(&pp, &b) {
            return (pp, b, ip);
        }
    }
    panic!("draw_solved: no generic draw found in 64 attempts at (m,n)=({m},{n})");
}

/// Gauge constants c1..c4 of the curve parametrization.
pub fn draw_gauge<R: Rng>(rng: &mut R) -> [Scalar; 4] {
    [
        draw_annulus(rng, 0.7, 1.4),
        draw_annulus(rng, 0.7, 1.4),
        draw_annulus(rng, 0.7, 1.4),
        draw_annulus(rng, 0.7, 1.4),
    ]
}
