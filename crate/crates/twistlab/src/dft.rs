//! Arbitrary-length DFTs via Bluestein's chirp-z reduction to a
//! power-of-two FFT.
//!
//! Family batching works in discrete-log order, so every transform here has
//! length q−1 for a prime q — never smooth, hence Bluestein rather than
//! mixed-radix.  Conventions: `Sign::Plus` computes
//! `X[j] = Σ_t x[t] e(+jt/n)`, matching `χ_j(g^t) = ω^{jt}` with
//! `ω = e(1/(q−1))`.  No normalisation factor is applied.

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// In-place iterative radix-2 FFT with sign `s` in `e(s·jk/n)`.
/// Twiddles are computed from reduced arguments, not by recurrence.
fn fft_pow2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    // bit reversal
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let base = sign * 2.0 * PI / len as f64;
        // one table per stage, each entry from its own sin/cos
        let tw: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, base * k as f64))
            .collect();
        let mut i = 0;
        while i < n {
            for k in 0..half {
                let u = buf[i + k];
                let v = buf[i + k + half] * tw[k];
                buf[i + k] = u + v;
                buf[i + k + half] = u - v;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// A reusable plan for length-n DFTs of one sign.
pub struct DftPlan {
    n: usize,
    sign: Sign,
    /// chirp[m] = e(sign · m²/(2n)), m² reduced mod 2n before the sine.
    chirp: Vec<Complex64>,
    /// FFT of the zero-padded reciprocal chirp.
    bhat: Vec<Complex64>,
    m: usize,
}

impl DftPlan {
    pub fn new(n: usize, sign: Sign) -> Self {
        assert!(n >= 1);
        let s = sign.as_f64();
        let two_n = 2 * n as u64;
        let chirp: Vec<Complex64> = (0..n as u64)
            .map(|t| {
                let r = (t * t) % two_n; // exact residue keeps the phase accurate for large n
                Complex64::from_polar(1.0, s * PI * r as f64 / n as f64)
            })
            .collect();
        let m = (2 * n - 1).next_power_of_two();
        let mut b = vec![Complex64::new(0.0, 0.0); m];
        for t in 0..n {
            let c = chirp[t].conj();
            b[t] = c;
            if t != 0 {
                b[m - t] = c;
            }
        }
        fft_pow2(&mut b, -1.0);
        DftPlan {
            n,
            sign,
            chirp,
            bhat: b,
            m,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// X[j] = Σ_t x[t] e(sign · jt / n).
    pub fn run(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        if n == 1 {
            return vec![x[0]];
        }
        let mut a = vec![Complex64::new(0.0, 0.0); self.m];
        for t in 0..n {
            a[t] = x[t] * self.chirp[t];
        }
        fft_pow2(&mut a, -1.0);
        for (ai, bi) in a.iter_mut().zip(self.bhat.iter()) {
            *ai *= *bi;
        }
        fft_pow2(&mut a, 1.0);
        let scale = 1.0 / self.m as f64;
        (0..n).map(|j| a[j] * self.chirp[j] * scale).collect()
    }
}

/// One-shot transform; prefer a `DftPlan` in loops.
pub fn dft(x: &[Complex64], sign: Sign) -> Vec<Complex64> {
    DftPlan::new(x.len(), sign).run(x)
}

/// Direct O(n²) reference transform. The exponential-sum tests use this as
/// the independent route against the chirp-z path.
pub fn dft_direct(x: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = x.len();
    let s = sign.as_f64();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &xt) in x.iter().enumerate() {
                let r = (j as u64 * t as u64) % n as u64;
                acc += xt * Complex64::from_polar(1.0, s * 2.0 * PI * r as f64 / n as f64);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_direct_awkward_lengths() {
        // q−1 for small primes: never a power of two.
        for n in [4usize, 6, 10, 12, 100, 148, 498] {
            let x: Vec<Complex64> = (0..n)
                .map(|t| Complex64::new((t as f64 * 0.7).sin(), (t as f64 * 1.3).cos()))
                .collect();
            for sign in [Sign::Plus, Sign::Minus] {
                let fast = dft(&x, sign);
                let slow = dft_direct(&x, sign);
                assert!(max_err(&fast, &slow) < 1e-9, "n={n} sign={sign:?}");
            }
        }
    }

    #[test]
    fn delta_input_gives_characters() {
        let n = 16;
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[3] = Complex64::new(1.0, 0.0);
        let y = dft(&x, Sign::Plus);
        for (j, v) in y.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, 2.0 * PI * (3 * j % n) as f64 / n as f64);
            assert!((v - expect).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip(re in proptest::collection::vec(-1.0f64..1.0, 2..60)) {
            let n = re.len();
            let x: Vec<Complex64> = re.iter().map(|&r| Complex64::new(r, -0.4 * r)).collect();
            let fwd = dft(&x, Sign::Plus);
            let back = dft(&fwd, Sign::Minus);
            for (t, xt) in x.iter().enumerate() {
                let rec = back[t] / n as f64;
                prop_assert!((rec - xt).norm() < 1e-10);
            }
        }
    }
}
