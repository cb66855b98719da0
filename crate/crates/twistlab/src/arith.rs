//! Small number-theoretic helpers: primality, modular arithmetic, sieves.

/// Deterministic Miller–Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Sinclair's 7-base set is deterministic below 3.3e24.
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Inverse of a mod m (m not necessarily prime), when it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    let mut t = t % m as i128;
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

/// Representative of a mod q in [1, q] (the paper's `(a)_q` convention).
pub fn rep_in_1_q(a: i64, q: u64) -> u64 {
    let r = a.rem_euclid(q as i64) as u64;
    if r == 0 {
        q
    } else {
        r
    }
}

/// Least primitive root mod prime q.
pub fn least_primitive_root(q: u64) -> u64 {
    let phi = q - 1;
    let mut fac = Vec::new();
    let mut m = phi;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            fac.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        fac.push(m);
    }
    'cand: for g in 2..q {
        for &p in &fac {
            if mod_pow(g, phi / p, q) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("prime modulus always has a primitive root")
}

/// Smallest-prime-factor sieve for 1..=n. spf[1] = 1.
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    if n >= 1 {
        spf[1] = 1;
    }
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    spf
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

pub fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Divisor count via trial division (small arguments only).
pub fn divisor_count(mut n: u64) -> u64 {
    let mut d = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            d *= e + 1;
        }
        p += 1;
    }
    if n > 1 {
        d *= 2;
    }
    d
}

/// Compensated (Kahan) accumulator; the spec's batch folds require it.
#[derive(Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                83, 89, 97]
        );
        assert!(is_prime(10007));
        assert!(!is_prime(10005));
    }

    #[test]
    fn primitive_roots() {
        // Brute-force oracle for the two spec examples.
        assert_eq!(least_primitive_root(5), 2);
        assert_eq!(least_primitive_root(7), 3);
        for q in [11u64, 101, 499] {
            let g = least_primitive_root(q);
            let mut seen = vec![false; q as usize];
            let mut x = 1u64;
            for _ in 0..q - 1 {
                x = mul_mod(x, g, q);
                seen[x as usize] = true;
            }
            assert_eq!(seen[1..].iter().filter(|&&b| b).count() as u64, q - 1);
        }
    }

    #[test]
    fn spf_factors() {
        let spf = spf_sieve(1000);
        assert_eq!(spf[997], 997);
        assert_eq!(spf[999], 3);
        assert_eq!(spf[1000], 2);
    }

    #[test]
    fn inverse_and_rep() {
        assert_eq!(mod_inverse(2, 101), Some(51));
        assert_eq!(rep_in_1_q(-1, 7), 6);
        assert_eq!(rep_in_1_q(7, 7), 7);
    }
}
