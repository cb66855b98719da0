//! Exact weight-2 modular symbols on Γ₀(N): Manin symbols over P¹(Z/N),
//! the 2- and 3-term relations, Hecke matrices, rational eigen dual vectors,
//! numeric periods, and the tables {⟨a/q⟩_f}.
//!
//! Everything up to the final period multiplication is exact arithmetic over
//! rationals with big integers; the only floats are the two period scalars
//! Ω± obtained from Fourier-expansion integrals.

use crate::arith::{self, gcd_i64};
use crate::cache::CacheDir;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;

type Rat = BigRational;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// P¹(Z/N) and the Manin relation quotient
// ---------------------------------------------------------------------------

pub struct ManinSymbolSpace {
    pub level: u64,
    /// canonical representatives (c : d)
    p1: Vec<(u64, u64)>,
    /// canon[c*N + d] = index into p1, or usize::MAX when gcd(c,d,N) > 1
    canon: Vec<usize>,
    /// expression of each P¹ symbol in the quotient basis (#p1 × dim)
    pi: Vec<Vec<Rat>>,
    /// indices (into p1) of the free generators
    basis: Vec<usize>,
}

fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|&u| arith::gcd(u, n) == 1).collect()
}

impl ManinSymbolSpace {
    pub fn build(level: u64) -> Result<ManinSymbolSpace> {
        if level == 0 || level > 200 {
            return Err(Error::Unsupported(format!("level {level} out of range")));
        }
        if !arith::is_squarefree(level) {
            return Err(Error::Unsupported(format!("level {level} not squarefree")));
        }
        let n = level;
        let us = units(n);
        let nn = (n * n) as usize;
        let mut canon = vec![usize::MAX; nn];
        let mut p1: Vec<(u64, u64)> = Vec::new();
        for c in 0..n {
            for d in 0..n {
                if arith::gcd(arith::gcd(c, d), n) != 1 {
                    continue;
                }
                if canon[(c * n + d) as usize] != usize::MAX {
                    continue;
                }
                // orbit of (c,d) under unit scaling; canonical = lexicographic min
                let orbit: Vec<(u64, u64)> = us
                    .iter()
                    .map(|&u| (arith::mul_mod(u, c, n), arith::mul_mod(u, d, n)))
                    .collect();
                let min = *orbit.iter().min().unwrap();
                if min != (c, d) {
                    // canonical member not reached yet in iteration order: defer
                    continue;
                }
                let idx = p1.len();
                p1.push((c, d));
                for &(uc, ud) in &orbit {
                    canon[(uc * n + ud) as usize] = idx;
                }
            }
        }
        // relation rows over the free module on p1
        let npts = p1.len();
        let sigma = |i: usize| -> usize {
            let (c, d) = p1[i];
            canon[(d * n + (n - c % n) % n) as usize]
        };
        let tau = |i: usize| -> usize {
            let (c, d) = p1[i];
            canon[(d * n + (2 * n - c - d) % n) as usize]
        };
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for i in 0..npts {
            let mut row = vec![Rat::zero(); npts];
            row[i] += Rat::one();
            row[sigma(i)] += Rat::one();
            rows.push(row);
            let mut row = vec![Rat::zero(); npts];
            row[i] += Rat::one();
            row[tau(i)] += Rat::one();
            row[tau(tau(i))] += Rat::one();
            rows.push(row);
        }
        let (pivots, rref) = rref_in_place(rows, npts);
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let basis: Vec<usize> = (0..npts).filter(|c| !pivot_cols.contains(c)).collect();
        let dim = basis.len();
        let col_of_basis: BTreeMap<usize, usize> =
            basis.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut pi = vec![vec![Rat::zero(); dim]; npts];
        for (k, &c) in basis.iter().enumerate() {
            pi[c][k] = Rat::one();
        }
        for &(r, c) in &pivots {
            // e_c = −Σ_{free f} M[r][f] e_f
            for (&f, &k) in &col_of_basis {
                let v = &rref[r][f];
                if !v.is_zero() {
                    pi[c][k] = -v.clone();
                }
            }
        }
        Ok(ManinSymbolSpace {
            level,
            p1,
            canon,
            pi,
            basis,
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.p1.len()
    }

    pub fn symbol_index(&self, c: i64, d: i64) -> usize {
        let n = self.level as i64;
        let c = c.rem_euclid(n) as u64;
        let d = d.rem_euclid(n) as u64;
        let idx = self.canon[(c * self.level + d) as usize];
        debug_assert!(idx != usize::MAX, "({c}:{d}) not in P¹(Z/{})", self.level);
        idx
    }

    /// Number of symbols not fixed by the 2-term involution (always even).
    pub fn free_sigma_orbit_size(&self) -> usize {
        let n = self.level;
        (0..self.p1.len())
            .filter(|&i| {
                let (c, d) = self.p1[i];
                self.canon[(d * n + (n - c % n) % n) as usize] != i
            })
            .count()
    }

    /// π(e_{(c:d)}) in quotient coordinates.
    fn project(&self, c: i64, d: i64) -> &[Rat] {
        &self.pi[self.symbol_index(c, d)]
    }

    /// Accumulate π of a path {α → β} (as signed Manin symbols) into `out`.
    fn add_path(&self, alpha: (i128, i128), beta: (i128, i128), sign: i64, out: &mut [Rat]) {
        for &(c, d, s) in path_symbols(alpha, beta).iter() {
            let v = self.project(c as i64, d as i64);
            let coeff = rat(s * sign);
            for (o, vi) in out.iter_mut().zip(v) {
                *o += vi * &coeff;
            }
        }
    }

    /// Matrix of T_p (p ∤ N) on the quotient basis, exact.
    pub fn hecke_matrix(&self, p: u64) -> Result<Vec<Vec<Rat>>> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if self.level % p == 0 {
            return Err(Error::Unsupported(format!(
                "T_p for p | N not implemented (p={p})"
            )));
        }
        Ok(self.hecke_like_matrix(p, true))
    }

    /// Matrix of U_p (p | N) on the quotient basis.
    pub fn atkin_lehner_u(&self, p: u64) -> Result<Vec<Vec<Rat>>> {
        if self.level % p != 0 {
            return Err(Error::BadArgument(format!("U_p needs p | N (p={p})")));
        }
        Ok(self.hecke_like_matrix(p, false))
    }

    fn hecke_like_matrix(&self, p: u64, with_scaling_term: bool) -> Vec<Vec<Rat>> {
        let dim = self.dimension();
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for &b in &self.basis {
            let (alpha, beta) = self.base_path(b);
            let mut acc = vec![Rat::zero(); dim];
            for j in 0..p {
                let aj = shift_scale(alpha, j as i128, p as i128);
                let bj = shift_scale(beta, j as i128, p as i128);
                self.add_path(aj, bj, 1, &mut acc);
            }
            if with_scaling_term {
                let ap = scale_by(alpha, p as i128);
                let bp = scale_by(beta, p as i128);
                self.add_path(ap, bp, 1, &mut acc);
            }
            cols.push(acc);
        }
        // transpose columns into row-major M[i][j]
        (0..dim)
            .map(|i| (0..dim).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Matrix of the star involution (c:d) → (−c:d).
    pub fn involution_matrix(&self) -> Vec<Vec<Rat>> {
        let dim = self.dimension();
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for &b in &self.basis {
            let (c, d) = self.p1[b];
            cols.push(self.project(-(c as i64), d as i64).to_vec());
        }
        (0..dim)
            .map(|i| (0..dim).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Unimodular path {g·0 → g·∞} attached to a P¹ symbol, from an SL₂ lift.
    fn base_path(&self, idx: usize) -> ((i128, i128), (i128, i128)) {
        let (c, d) = self.p1[idx];
        let n = self.level as i64;
        let (mut c0, mut d0) = (c as i64, d as i64);
        // lift to a coprime integer pair
        let mut tries = 0;
        while gcd_i64(c0, d0).abs() != 1 {
            d0 += n;
            tries += 1;
            if tries > 64 {
                // (c, d+kN) hits a coprime pair quickly for squarefree N; if
                // not, shift c as well
                c0 += n;
                d0 = d as i64;
                tries = 0;
            }
        }
        let (x, y) = bezout(c0, d0); // x·d0 − y·c0 = 1
        ((y as i128, d0 as i128), (x as i128, c0 as i128))
    }
}

/// x·d − y·c = 1 for coprime (c, d).
fn bezout(c: i64, d: i64) -> (i64, i64) {
    // extended gcd on (d, c)
    let (mut r0, mut r1) = (d as i128, c as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    // r0 = ±1 = s0·d + t0·c
    let (s0, t0) = if r0 < 0 { (-s0, -t0) } else { (s0, t0) };
    debug_assert_eq!(s0 * d as i128 + t0 * c as i128, 1);
    (s0 as i64, -(t0 as i64))
}

/// (α + j)/p on Q ∪ {∞}, as a reduced fraction.
fn shift_scale(x: (i128, i128), j: i128, p: i128) -> (i128, i128) {
    let (num, den) = x;
    if den == 0 {
        return (1, 0);
    }
    reduce((num + j * den, den * p))
}

/// p·α on Q ∪ {∞}.
fn scale_by(x: (i128, i128), p: i128) -> (i128, i128) {
    let (num, den) = x;
    if den == 0 {
        return (1, 0);
    }
    reduce((num * p, den))
}

fn reduce((mut n, mut d): (i128, i128)) -> (i128, i128) {
    if d == 0 {
        return (1, 0);
    }
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = gcd_i128(n.abs(), d);
    (n / g, d / g)
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Manin symbols of the modular path {∞ → a/b} via continued-fraction
/// convergents: bottom rows (q_k, (−1)^{k−1} q_{k−1}) with sign +1 each.
fn cf_symbols(mut a: i128, mut b: i128) -> Vec<(i128, i128)> {
    debug_assert!(b > 0);
    let g = gcd_i128(a.abs(), b);
    a /= g;
    b /= g;
    let mut digits = Vec::new();
    loop {
        let q = a.div_euclid(b);
        digits.push(q);
        let r = a - q * b;
        a = b;
        b = r;
        if b == 0 {
            break;
        }
    }
    let mut syms = Vec::with_capacity(digits.len());
    let (mut p_prev, mut q_prev) = (1i128, 0i128); // k = −1
    let (mut p_cur, mut q_cur) = (digits[0], 1i128); // k = 0
    let mut sign = -1i128; // (−1)^{k−1} at k = 0
    syms.push((q_cur, sign * q_prev));
    for &d in &digits[1..] {
        let p_next = d * p_cur + p_prev;
        let q_next = d * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        sign = -sign;
        syms.push((q_cur, sign * q_prev));
    }
    let _ = p_prev;
    let _ = p_cur;
    syms
}

/// Signed Manin symbols of a path {α → β} = {∞→β} − {∞→α}.
fn path_symbols(alpha: (i128, i128), beta: (i128, i128)) -> Vec<(i128, i128, i64)> {
    let mut out = Vec::new();
    if beta.1 != 0 {
        for (c, d) in cf_symbols(beta.0, beta.1) {
            out.push((c, d, 1i64));
        }
    }
    if alpha.1 != 0 {
        for (c, d) in cf_symbols(alpha.0, alpha.1) {
            out.push((c, d, -1i64));
        }
    }
    out
}

/// Row-reduce in place; returns (pivots as (row, col), matrix in RREF).
fn rref_in_place(mut rows: Vec<Vec<Rat>>, ncols: usize) -> (Vec<(usize, usize)>, Vec<Vec<Rat>>) {
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v /= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for cc in 0..ncols {
                    let sub = &rows[r][cc] * &f;
                    rows[i][cc] -= sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    (pivots, rows)
}

/// Kernel basis of a stacked matrix (rows × dim), exact.
fn kernel(rows: Vec<Vec<Rat>>, dim: usize) -> Vec<Vec<Rat>> {
    let (pivots, rref) = rref_in_place(rows, dim);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..dim).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); dim];
            v[f] = Rat::one();
            for &(r, c) in &pivots {
                v[c] = -rref[r][f].clone();
            }
            v
        })
        .collect()
}

fn mat_transpose(m: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
}

#[cfg(test)]
fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Rat::zero();
                    for k in 0..n {
                        acc += &a[i][k] * &b[k][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Exact determinant (for the characteristic-polynomial oracle in tests).
pub fn det(m: &[Vec<Rat>]) -> Rat {
    let mut m: Vec<Vec<Rat>> = m.to_vec();
    let n = m.len();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if pr != c {
            m.swap(c, pr);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].clone();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &inv;
            for j in c..n {
                let sub = &m[c][j] * &f;
                m[i][j] -= sub;
            }
        }
    }
    d
}

// ---------------------------------------------------------------------------
// Rational eigen systems and their dual vectors
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct EigenSystem {
    pub level: u64,
    /// (p, a_p) for p ≤ 19, p ∤ N — the identification fingerprint.
    pub fingerprint: Vec<(u64, i64)>,
    /// ψ± = Φ±∘π over all P¹ symbols, scaled to integers.
    psi_plus: Vec<i128>,
    psi_minus: Vec<i128>,
    /// denominators of the scaling (ψ = num / den)
    den_plus: i128,
    den_minus: i128,
}

/// Rational one-dimensional (up to ±) Hecke eigen systems on the quotient.
pub fn rational_eigen_systems(space: &ManinSymbolSpace) -> Result<Vec<EigenSystem>> {
    let dim = space.dimension();
    let fingerprint_primes: Vec<u64> = [2u64, 3, 5, 7, 11, 13, 17, 19]
        .into_iter()
        .filter(|&p| space.level % p != 0)
        .collect();
    let t_mats: Vec<(u64, Vec<Vec<Rat>>)> = fingerprint_primes
        .iter()
        .map(|&p| Ok((p, mat_transpose(&space.hecke_matrix(p)?))))
        .collect::<Result<_>>()?;

    // explore joint kernels prime by prime, branching over |a_p| ≤ 2√p
    struct Branch {
        fingerprint: Vec<(u64, i64)>,
        stacked: Vec<Vec<Rat>>,
    }
    let mut branches = vec![Branch {
        fingerprint: Vec::new(),
        stacked: Vec::new(),
    }];
    for (p, tp) in &t_mats {
        let bound = (2.0 * (*p as f64).sqrt()).floor() as i64;
        let mut next = Vec::new();
        for br in branches {
            for ap in -bound..=bound {
                let mut stacked = br.stacked.clone();
                for i in 0..dim {
                    let mut row = tp[i].clone();
                    row[i] -= rat(ap);
                    stacked.push(row);
                }
                let ker = kernel(stacked.clone(), dim);
                if !ker.is_empty() {
                    let mut fp = br.fingerprint.clone();
                    fp.push((*p, ap));
                    next.push(Branch {
                        fingerprint: fp,
                        stacked,
                    });
                }
            }
        }
        branches = next;
    }

    let iota_t = mat_transpose(&space.involution_matrix());
    let mut systems = Vec::new();
    for br in branches {
        let ker = kernel(br.stacked, dim);
        if ker.len() != 2 {
            // rational newform systems split into a ± pair; anything else is
            // not a simple rational system
            continue;
        }
        // split under the involution transpose
        let apply = |m: &[Vec<Rat>], v: &[Rat]| -> Vec<Rat> {
            (0..dim)
                .map(|i| {
                    let mut acc = Rat::zero();
                    for k in 0..dim {
                        acc += &m[i][k] * &v[k];
                    }
                    acc
                })
                .collect()
        };
        let mut phi_plus: Option<Vec<Rat>> = None;
        let mut phi_minus: Option<Vec<Rat>> = None;
        for v in &ker {
            let iv = apply(&iota_t, v);
            let plus: Vec<Rat> = v.iter().zip(&iv).map(|(a, b)| a + b).collect();
            let minus: Vec<Rat> = v.iter().zip(&iv).map(|(a, b)| a - b).collect();
            if phi_plus.is_none() && plus.iter().any(|x| !x.is_zero()) {
                phi_plus = Some(plus);
            }
            if phi_minus.is_none() && minus.iter().any(|x| !x.is_zero()) {
                phi_minus = Some(minus);
            }
        }
        let (Some(phi_plus), Some(phi_minus)) = (phi_plus, phi_minus) else {
            continue;
        };
        let (psi_plus, den_plus) = scaled_dual(space, &phi_plus);
        let (psi_minus, den_minus) = scaled_dual(space, &phi_minus);
        systems.push(EigenSystem {
            level: space.level,
            fingerprint: br.fingerprint,
            psi_plus,
            psi_minus,
            den_plus,
            den_minus,
        });
    }
    systems.sort_by_key(|s| s.fingerprint.clone());
    Ok(systems)
}

/// ψ[s] = Φ(π(e_s)) over all P¹ symbols, scaled to a primitive integer vector.
fn scaled_dual(space: &ManinSymbolSpace, phi: &[Rat]) -> (Vec<i128>, i128) {
    let vals: Vec<Rat> = (0..space.num_symbols())
        .map(|s| {
            let mut acc = Rat::zero();
            for (p, f) in space.pi[s].iter().zip(phi) {
                acc += p * f;
            }
            acc
        })
        .collect();
    let mut den = BigInt::one();
    for v in &vals {
        den = num_integer::lcm(den, v.denom().clone());
    }
    let scaled: Vec<BigInt> = vals.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    let mut g = BigInt::zero();
    for s in &scaled {
        g = num_integer::gcd(g, s.abs());
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    let out: Vec<i128> = scaled
        .iter()
        .map(|s| (s / &g).to_i128().expect("dual vector exceeds i128"))
        .collect();
    let den = (&den / &g).to_i128().map(|d| d.max(1)).unwrap_or(1);
    (out, den)
}

impl EigenSystem {
    pub fn a2(&self) -> i64 {
        self.fingerprint
            .iter()
            .find(|&&(p, _)| p == 2)
            .map(|&(_, a)| a)
            .unwrap_or(0)
    }

    /// Φ⁺ applied to the path {∞ → a/b}, exact, as (numerator, denominator).
    fn pairing_plus(&self, space: &ManinSymbolSpace, a: i128, b: i128) -> (i128, i128) {
        (self.pair(space, &self.psi_plus, a, b), self.den_plus)
    }

    fn pairing_minus(&self, space: &ManinSymbolSpace, a: i128, b: i128) -> (i128, i128) {
        (self.pair(space, &self.psi_minus, a, b), self.den_minus)
    }

    fn pair(&self, space: &ManinSymbolSpace, psi: &[i128], a: i128, b: i128) -> i128 {
        let mut acc = 0i128;
        for (c, d) in cf_symbols(a, b) {
            acc += psi[space.symbol_index(c as i64, d as i64)];
        }
        acc
    }

    /// a_p = ψ(T_p e_s0) / ψ(e_s0) for any symbol with ψ(e_s0) ≠ 0.
    pub fn eigenvalue(&self, space: &ManinSymbolSpace, p: u64) -> i64 {
        let psi = if self.psi_plus.iter().any(|&v| v != 0) {
            &self.psi_plus
        } else {
            &self.psi_minus
        };
        let s0 = (0..psi.len())
            .max_by_key(|&s| psi[s].abs())
            .expect("nonzero dual vector");
        let (alpha, beta) = space.base_path(s0);
        let mut acc = 0i128;
        let mut add_path = |al: (i128, i128), be: (i128, i128)| {
            for (c, d, s) in path_symbols(al, be) {
                acc += s as i128 * psi[space.symbol_index(c as i64, d as i64)];
            }
        };
        for j in 0..p {
            add_path(
                shift_scale(alpha, j as i128, p as i128),
                shift_scale(beta, j as i128, p as i128),
            );
        }
        if space.level % p != 0 {
            add_path(scale_by(alpha, p as i128), scale_by(beta, p as i128));
        }
        debug_assert_eq!(acc % psi[s0], 0, "non-integral eigenvalue at p={p}");
        (acc / psi[s0]) as i64
    }

    /// (p, a_p) for all primes p ≤ depth (including p | N via U_p).
    pub fn prime_eigenvalues(&self, space: &ManinSymbolSpace, depth: u64) -> Vec<(u64, i64)> {
        arith::primes_up_to(depth as usize)
            .into_iter()
            .map(|p| (p, self.eigenvalue(space, p)))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Periods and the numeric symbol map
// ---------------------------------------------------------------------------

/// An eigen system equipped with its period pair: the full numeric symbol map
/// ⟨a/q⟩ = Ω⁺·Φ⁺({∞→a/q}) + Ω⁻·Φ⁻({∞→a/q}).
pub struct EigenSymbol {
    pub label: String,
    pub level: u64,
    pub system: EigenSystem,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    /// residual of the third-γ cross check (relative)
    pub period_residual: f64,
}

/// −Σ a(n)/n · e(n z), i.e. 2πi ∫_z^{i∞} f.
fn u_integral(coeffs: &[i128], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &a) in coeffs.iter().enumerate() {
        let n = (i + 1) as f64;
        let e = (Complex64::new(0.0, 2.0 * PI) * n * z).exp();
        acc -= a as f64 / n * e;
        if e.norm() * (coeffs.len() as f64) < 1e-18 && i > 32 {
            break;
        }
    }
    acc
}

/// Build the numeric symbol map for one eigen system.  The periods are fixed
/// by closed γ-paths in Γ₀(N) integrated through the Fourier expansion, with
/// a third path as cross-check.
pub fn eigen_symbol(
    space: &ManinSymbolSpace,
    system: &EigenSystem,
    label: &str,
) -> Result<EigenSymbol> {
    let n = space.level;
    // unnormalized coefficients to comfortable depth for height-1/N sums
    let depth = (40.0 * n as f64).max(400.0) as u64;
    let ap = system.prime_eigenvalues(space, depth);
    let coeffs = crate::hecke::multiplicative_fill(&ap, 2, n, depth);

    // candidate γ = [[a, b], [N, d]], γ∞ = a/N
    let mut cands: Vec<(i64, (i128, i128), Complex64)> = Vec::new();
    for d in 1..40i64 {
        if arith::gcd(d as u64 % n, n) != 1 {
            continue;
        }
        let a = arith::mod_inverse(d as u64 % n, n).unwrap() as i64;
        let b = (a * d - 1) / n as i64;
        debug_assert_eq!(a * d - b * n as i64, 1);
        // period over {z0 → γz0}, both endpoints at height 1/N
        let z0 = Complex64::new(-(d as f64) / n as f64, 1.0 / n as f64);
        let z1 = Complex64::new(a as f64 / n as f64, 1.0 / n as f64);
        let period = u_integral(&coeffs, z0) - u_integral(&coeffs, z1);
        let xp = system.pairing_plus(space, a as i128, n as i128);
        let xm = system.pairing_minus(space, a as i128, n as i128);
        cands.push((d, (xp.0, xm.0), period));
        if cands.len() >= 8 {
            break;
        }
    }
    // pick the pair of candidates with the best-conditioned 2×2 system
    let coord = |c: &(i64, (i128, i128), Complex64)| {
        (
            c.1 .0 as f64 / system.den_plus as f64,
            c.1 .1 as f64 / system.den_minus as f64,
        )
    };
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            let (a1, b1) = coord(&cands[i]);
            let (a2, b2) = coord(&cands[j]);
            let det = (a1 * b2 - a2 * b1).abs();
            let scale = (a1.hypot(b1) * a2.hypot(b2)).max(1e-30);
            let c = det / scale;
            if best.map(|(_, _, bc)| c > bc).unwrap_or(true) {
                best = Some((i, j, c));
            }
        }
    }
    let (i, j, cond) = best.ok_or_else(|| Error::Unsupported("no γ candidates".into()))?;
    if cond < 1e-6 {
        return Err(Error::Quadrature(
            "period integral below conditioning threshold".into(),
        ));
    }
    let solve = |ci: &(i64, (i128, i128), Complex64), cj: &(i64, (i128, i128), Complex64)| {
        let (a1, b1) = coord(ci);
        let (a2, b2) = coord(cj);
        let det = a1 * b2 - a2 * b1;
        let op = (ci.2 * b2 - cj.2 * b1) / det;
        let om = (a1 * cj.2 - a2 * ci.2) / det;
        (op, om)
    };
    let (omega_plus, omega_minus) = solve(&cands[i], &cands[j]);
    // third-γ cross check: re-solve with another pair and compare
    let mut residual = 0.0f64;
    if let Some(k) = (0..cands.len()).find(|&k| k != i && k != j) {
        let (a3, b3) = coord(&cands[k]);
        if (a3 * coord(&cands[i]).1 - coord(&cands[i]).0 * b3).abs() > 1e-9 {
            let (op2, om2) = solve(&cands[k], &cands[i]);
            let scale = omega_plus.norm() + omega_minus.norm();
            residual = ((op2 - omega_plus).norm() + (om2 - omega_minus).norm()) / scale.max(1e-30);
        }
    }
    Ok(EigenSymbol {
        label: label.to_string(),
        level: n,
        system: system.clone(),
        omega_plus,
        omega_minus,
        period_residual: residual,
    })
}

impl EigenSymbol {
    /// ⟨a/q⟩: exact rational path pairing times the periods.
    pub fn symbol(&self, space: &ManinSymbolSpace, a: i64, q: u64) -> Result<Complex64> {
        if !arith::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if self.level % q == 0 {
            return Err(Error::ModulusDividesLevel { q, level: self.level });
        }
        if a.rem_euclid(q as i64) == 0 {
            return Err(Error::BadArgument("a ≡ 0 mod q".into()));
        }
        Ok(self.symbol_unchecked(space, a, q))
    }

    pub fn symbol_unchecked(&self, space: &ManinSymbolSpace, a: i64, q: u64) -> Complex64 {
        let (xp, dp) = self.system.pairing_plus(space, a as i128, q as i128);
        let (xm, dm) = self.system.pairing_minus(space, a as i128, q as i128);
        self.omega_plus * (xp as f64 / dp as f64) + self.omega_minus * (xm as f64 / dm as f64)
    }

    /// ⟨{∞→0}⟩, the L(f,1)-type period.
    pub fn symbol_at_zero(&self, space: &ManinSymbolSpace) -> Complex64 {
        let (xp, dp) = self.system.pairing_plus(space, 0, 1);
        let (xm, dm) = self.system.pairing_minus(space, 0, 1);
        self.omega_plus * (xp as f64 / dp as f64) + self.omega_minus * (xm as f64 / dm as f64)
    }
}

/// The table {⟨a/q⟩_f} with mean and variance.
pub struct ModularSymbolTable {
    pub label: String,
    pub q: u64,
    /// values[a−1] = ⟨a/q⟩ for a = 1..q−1
    pub values: Vec<Complex64>,
    pub mean: Complex64,
    pub variance: f64,
}

pub fn table(space: &ManinSymbolSpace, eig: &EigenSymbol, q: u64) -> Result<ModularSymbolTable> {
    if !arith::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if eig.level % q == 0 {
        return Err(Error::ModulusDividesLevel { q, level: eig.level });
    }
    let values: Vec<Complex64> = (1..q)
        .map(|a| eig.symbol_unchecked(space, a as i64, q))
        .collect();
    let mean = values.iter().sum::<Complex64>() / (q - 1) as f64;
    let variance = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (q - 1) as f64;
    Ok(ModularSymbolTable {
        label: eig.label.clone(),
        q,
        values,
        mean,
        variance,
    })
}

impl ModularSymbolTable {
    pub fn value(&self, a: i64) -> Complex64 {
        let r = a.rem_euclid(self.q as i64) as usize;
        debug_assert!(r != 0);
        self.values[r - 1]
    }

    /// Even/odd parts (⟨a⟩ ± ⟨−a⟩)/2.
    pub fn even_odd(&self, a: i64) -> (Complex64, Complex64) {
        let v = self.value(a);
        let w = self.value(-a);
        ((v + w) / 2.0, (v - w) / 2.0)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("a,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{:.15e},{:.15e}\n", i + 1, v.re, v.im));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// The level-37 pair wired into the hecke module
// ---------------------------------------------------------------------------

/// Default exact depth for the level-37 forms (covers the q ≤ 101 families
/// with refinement headroom).
const LEVEL37_DEPTH: u64 = 26_000;

/// Prime eigenvalues of the idx-th rational system at the level (sorted by
/// fingerprint); used by `hecke` when the coefficient cache is cold.
pub fn level37_prime_eigenvalues(
    level: u64,
    system_index: usize,
    depth: u64,
    _cache: &CacheDir,
) -> Result<Vec<(u64, i64)>> {
    let space = ManinSymbolSpace::build(level)?;
    let systems = rational_eigen_systems(&space)?;
    let sys = systems
        .get(system_index)
        .ok_or_else(|| Error::UnknownForm(format!("level {level} system {system_index}")))?;
    Ok(sys.prime_eigenvalues(&space, depth))
}

/// The two weight-2 level-37 forms; "37a" is the rank-one system (vanishing
/// ⟨{∞→0}⟩), "37b" the other.
pub fn level37_pair(cache: &CacheDir) -> Result<(crate::hecke::Newform, crate::hecke::Newform)> {
    let space = ManinSymbolSpace::build(37)?;
    let systems = rational_eigen_systems(&space)?;
    if systems.len() != 2 {
        return Err(Error::Unsupported(format!(
            "expected two rational systems at level 37, found {}",
            systems.len()
        )));
    }
    let mut ranked: Vec<(usize, f64)> = systems
        .iter()
        .enumerate()
        .map(|(i, sys)| {
            let eig = eigen_symbol(&space, sys, "tmp")?;
            Ok((i, eig.symbol_at_zero(&space).norm()))
        })
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let rank_one_idx = ranked[0].0;
    let other_idx = ranked[1].0;
    let mk = |label: &str, idx: usize| -> Result<crate::hecke::Newform> {
        // the coefficient cache makes the deep extraction a one-time cost
        let _guard = crate::hecke::generation_lock(label);
        if let Some(cached) = cache.read_coeffs(label)? {
            if cached.len() as u64 >= LEVEL37_DEPTH {
                return Ok(crate::hecke::Newform::from_cached(label, 2, 37, idx, cached, cache));
            }
        }
        let ap = systems[idx].prime_eigenvalues(&space, LEVEL37_DEPTH);
        let f = crate::hecke::Newform::from_prime_eigenvalues(
            label,
            2,
            37,
            idx,
            &ap,
            LEVEL37_DEPTH,
            cache,
        );
        cache.write_coeffs(label, f.coeffs())?;
        Ok(f)
    };
    Ok((mk("37a", rank_one_idx)?, mk("37b", other_idx)?))
}

/// Eigen symbol machinery for a built-in label ("11a", "37a", "37b").
pub fn eigen_symbol_for_label(label: &str) -> Result<(ManinSymbolSpace, EigenSymbol)> {
    let (level, want_rank_one) = match label {
        "11a" => (11u64, false),
        "37a" => (37, true),
        "37b" => (37, false),
        _ => return Err(Error::UnknownForm(label.to_string())),
    };
    let space = ManinSymbolSpace::build(level)?;
    let systems = rational_eigen_systems(&space)?;
    if level == 11 {
        let eig = eigen_symbol(&space, &systems[0], label)?;
        return Ok((space, eig));
    }
    let mut ranked: Vec<(usize, f64)> = systems
        .iter()
        .enumerate()
        .map(|(i, sys)| {
            let eig = eigen_symbol(&space, sys, "tmp")?;
            Ok((i, eig.symbol_at_zero(&space).norm()))
        })
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let idx = if want_rank_one { ranked[0].0 } else { ranked[1].0 };
    let eig = eigen_symbol(&space, &systems[idx], label)?;
    Ok((space, eig))
}
