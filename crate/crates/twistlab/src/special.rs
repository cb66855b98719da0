//! Special functions used by the archimedean layer: complex log-gamma,
//! integer-order Bessel J, Gauss–Legendre nodes, real zeta.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Principal branch of log Γ(z) (Lanczos, reflection for Re z < 0.5).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // log Γ(z) = log(π / sin(πz)) − log Γ(1−z)
        let s = (PI * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut x = Complex64::new(LANCZOS_C[0], 0.0);
    for (i, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        x += c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + x.ln()
}

/// log Γ_R(s) = log(π^{−s/2} Γ(s/2)).
pub fn ln_gamma_r(s: Complex64) -> Complex64 {
    ln_gamma(s / 2.0) - s / 2.0 * PI.ln()
}

/// J_n(x) for integer n ≥ 0 by the cosine integral representation,
/// composite Simpson on [0, π].  Accurate to ~1e-12 for the x-range the
/// Voronoi transforms need (x up to a few hundred).
pub fn bessel_j(order: u32, x: f64) -> f64 {
    // enough panels for oscillation count ~ (x + n)/2π
    let waves = (x.abs() + order as f64) / (2.0 * PI) + 2.0;
    let panels = ((waves * 24.0).ceil() as usize).max(64);
    let n2 = 2 * panels;
    let h = PI / n2 as f64;
    let f = |theta: f64| (order as f64 * theta - x * theta.sin()).cos();
    let mut acc = f(0.0) + f(PI);
    for k in 1..n2 {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0 / PI
}

/// Gauss–Legendre nodes/weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and derivative by recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// ζ(s) for real s > 1 by Euler–Maclaurin.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0);
    let n = 32usize;
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 1..n {
        sum += (k as f64).powf(-s);
    }
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // B_{2j}/(2j)! · s(s+1)···(s+2j−2) · n^{−s−2j+1}
    let b2 = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut rising = 1.0; // s(s+1)···(s+2j−2), built incrementally
    let mut fact = 1.0; // (2j)!
    for (j, bj) in b2.iter().enumerate() {
        let two_j = 2 * (j + 1);
        fact *= ((two_j - 1) * two_j) as f64;
        if j == 0 {
            rising = s;
        } else {
            rising *= (s + two_j as f64 - 3.0) * (s + two_j as f64 - 2.0);
        }
        sum += bj / fact * rising * nf.powf(-s - two_j as f64 + 1.0);
    }
    sum
}

/// CDF of the semicircle (Sato–Tate for SU(2)) density √(4−t²)/(2π) on [−2,2].
pub fn semicircle_cdf(t: f64) -> f64 {
    if t <= -2.0 {
        return 0.0;
    }
    if t >= 2.0 {
        return 1.0;
    }
    0.5 + t * (4.0 - t * t).sqrt() / (4.0 * PI) + (t / 2.0).asin() / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        // Γ(5) = 24
        let g5 = ln_gamma(Complex64::new(5.0, 0.0)).exp();
        assert!((g5.re - 24.0).abs() < 1e-10 && g5.im.abs() < 1e-12);
        // Γ(1/2) = √π
        let gh = ln_gamma(Complex64::new(0.5, 0.0)).exp();
        assert!((gh.re - PI.sqrt()).abs() < 1e-12);
        // |Γ(1/2 + it)|² = π / cosh(πt)
        let t = 1.7;
        let g = ln_gamma(Complex64::new(0.5, t)).exp();
        assert!((g.norm_sqr() - PI / (PI * t).cosh()).abs() < 1e-12);
        // recurrence Γ(z+1) = zΓ(z) off the axis
        let z = Complex64::new(2.3, -1.1);
        let lhs = ln_gamma(z + 1.0).exp();
        let rhs = z * ln_gamma(z).exp();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn bessel_known_values() {
        // Abramowitz–Stegun: J_0(1) = 0.7651976865579666, J_1(1) = 0.4400505857449335
        assert!((bessel_j(0, 1.0) - 0.7651976865579666).abs() < 1e-11);
        assert!((bessel_j(1, 1.0) - 0.4400505857449335).abs() < 1e-11);
        // J_1(20) = 0.0668331241757...
        assert!((bessel_j(1, 20.0) - 0.06683312417585004).abs() < 1e-10);
        // recurrence J_{n-1}(x) + J_{n+1}(x) = (2n/x) J_n(x)
        let x = 13.7;
        let lhs = bessel_j(10, x) + bessel_j(12, x);
        let rhs = 22.0 / x * bessel_j(11, x);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (xs, ws) = gauss_legendre(12);
        // ∫_{-1}^{1} x^8 dx = 2/9
        let v: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(8)).sum();
        assert!((v - 2.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-12);
        // ζ(3/2) = 2.612375348685488...
        assert!((zeta(1.5) - 2.612375348685488).abs() < 1e-9);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn semicircle_cdf_endpoints() {
        assert_eq!(semicircle_cdf(-2.5), 0.0);
        assert_eq!(semicircle_cdf(2.5), 1.0);
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
        // integral of density over [-1.3, 0.7] by Simpson (interior interval,
        // away from the square-root endpoints)
        let n = 20000;
        let h = 2.0 / n as f64;
        let dens = |t: f64| (4.0 - t * t).max(0.0).sqrt() / (2.0 * PI);
        let mut acc = dens(-1.3) + dens(0.7);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * dens(-1.3 + k as f64 * h);
        }
        let expect = semicircle_cdf(0.7) - semicircle_cdf(-1.3);
        assert!((acc * h / 3.0 - expect).abs() < 1e-10);
    }
}
