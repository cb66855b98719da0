//! Approximate-functional-equation engine.
//!
//! The weight functions V and W are contour integrals of Γ_R-quotients
//! against G(u) = cos(πu/4A)^{−16A} on Re u = 2, evaluated by trapezoid
//! quadrature; with A = 4 the integrand decays like e^{−4π|Im u|}, so height
//! T = 8 leaves ~1e−40 tails.  The y-dependence enters only through
//! y^{−u}, so the quadrature samples are computed once and each V(y) is a
//! short Fourier sum; values used in the long folds come from a geometric
//! grid with cubic interpolation.
//!
//! Central values over all χ mod q at once: fold the m-sums into q−1
//! discrete-log buckets (compensated accumulation) and take two
//! arbitrary-length DFTs.

use crate::arith::{self, Kahan};
use crate::chargroup::CharacterGroup;
use crate::dft::{DftPlan, Sign};
use crate::error::{Error, Result};
use crate::hecke::Newform;
use crate::special::{bessel_j, gauss_legendre, ln_gamma_r};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct AfeParams {
    /// parameter A of G (paper requires A > 2)
    pub a: u32,
    /// quadrature height T
    pub height: f64,
    /// quadrature step h
    pub step: f64,
}

impl Default for AfeParams {
    /// A = 64 keeps the poles of G far out so the weights decay to 1e−14
    /// within y ≲ 25 (weight 2); T = 16 covers G's pre-asymptotic regime.
    fn default() -> Self {
        AfeParams {
            a: 64,
            height: 16.0,
            step: 1.0 / 64.0,
        }
    }
}

/// Archimedean factor L_∞(s) = Γ_R(s − μ1) Γ_R(s − μ2).
#[derive(Clone, Copy, Debug)]
pub struct ArchFactor {
    pub mu1: f64,
    pub mu2: f64,
}

impl ArchFactor {
    /// Γ_C(s + (k−1)/2) = Γ_R(s + (k−1)/2) Γ_R(s + (k+1)/2) by duplication.
    pub fn holomorphic(weight: u32) -> ArchFactor {
        ArchFactor {
            mu1: -((weight as f64 - 1.0) / 2.0),
            mu2: -((weight as f64 + 1.0) / 2.0),
        }
    }

    pub fn ln_l_inf(&self, s: Complex64) -> Complex64 {
        ln_gamma_r(s - self.mu1) + ln_gamma_r(s - self.mu2)
    }
}

/// ln G(u) for G(u) = cos(πu/(4A))^{−16A}.
fn ln_g(u: Complex64, a: u32) -> Complex64 {
    let z = u * (PI / (4.0 * a as f64));
    -(16.0 * a as f64) * z.cos().ln()
}

/// One weight function y ↦ (1/2πi)∫ Q(u) G(u) y^{−u} du/u, where Q is a
/// product of archimedean quotients L_∞(s_i + u)/L_∞(s_i).
///
/// Two quadrature contours are kept: Re u = 2 for y ≥ 1, and (residue 1
/// plus) Re u = −1/2 for y < 1.  The left contour keeps the small-y branch
/// conditioned: on Re u = 2 the value is y^{−2}·(oscillatory sum), which at
/// y = 1e−6 would magnify rounding by 1e12.
pub struct WeightFn {
    /// (t_k, Φ_k) on Re u = 2 with Φ_k = Q G / u · h/2π
    right: Vec<(f64, Complex64)>,
    /// (t_k, Φ_k) on Re u = −1/2
    left: Vec<(f64, Complex64)>,
    /// geometric grid of the weight values themselves
    grid: Vec<Complex64>,
    ln_y0: f64,
    dln: f64,
    pub y_cut: f64,
}

const SIGMA_LEFT: f64 = -0.5;
const SIGMA_RIGHT: f64 = 2.0;

impl WeightFn {
    pub fn build(factors: &[(ArchFactor, Complex64)], params: &AfeParams) -> WeightFn {
        let contour = |sigma: f64| -> Vec<(f64, Complex64)> {
            let h = params.step;
            let n_steps = (params.height / h).ceil() as i64;
            let denominators: Vec<Complex64> =
                factors.iter().map(|(af, s)| af.ln_l_inf(*s)).collect();
            (-n_steps..=n_steps)
                .map(|k| {
                    let t = k as f64 * h;
                    let u = Complex64::new(sigma, t);
                    let mut ln_q = ln_g(u, params.a);
                    for ((af, s), d) in factors.iter().zip(&denominators) {
                        ln_q += af.ln_l_inf(s + u) - d;
                    }
                    (t, ln_q.exp() / u * (h / (2.0 * PI)))
                })
                .collect()
        };
        let mut w = WeightFn {
            right: contour(SIGMA_RIGHT),
            left: contour(SIGMA_LEFT),
            grid: Vec::new(),
            ln_y0: 0.0,
            dln: 1.0,
            y_cut: 1.0,
        };
        // locate the decay cut, then lay the interpolation grid
        let mut y_cut = 1.0f64;
        let mut consecutive = 0;
        while y_cut < 1e4 {
            if w.eval_direct(y_cut).norm() < 1e-14 {
                consecutive += 1;
                if consecutive >= 3 {
                    break;
                }
            } else {
                consecutive = 0;
            }
            y_cut *= 1.15;
        }
        w.y_cut = y_cut;
        let y_min = 1e-8f64;
        let n_grid = 4096usize;
        w.ln_y0 = y_min.ln();
        w.dln = (y_cut.ln() - w.ln_y0) / (n_grid - 1) as f64;
        w.grid = (0..n_grid)
            .map(|i| w.eval_direct((w.ln_y0 + i as f64 * w.dln).exp()))
            .collect();
        w
    }

    fn fourier_sum(samples: &[(f64, Complex64)], x: f64) -> Complex64 {
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for &(t, phi) in samples {
            let e = Complex64::from_polar(1.0, -t * x);
            let v = phi * e;
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// Direct quadrature evaluation (reference path, no interpolation).
    pub fn eval_direct(&self, y: f64) -> Complex64 {
        debug_assert!(y > 0.0);
        let x = y.ln();
        if y < 1.0 {
            // residue at u = 0 plus the left contour
            Complex64::new(1.0, 0.0)
                + Self::fourier_sum(&self.left, x) * (-SIGMA_LEFT * x).exp()
        } else {
            Self::fourier_sum(&self.right, x) * (-SIGMA_RIGHT * x).exp()
        }
    }

    /// Interpolated evaluation; falls back to direct quadrature outside the
    /// grid.
    pub fn eval(&self, y: f64) -> Complex64 {
        debug_assert!(y > 0.0);
        let x = y.ln();
        let ix = (x - self.ln_y0) / self.dln;
        if !(1.0..=(self.grid.len() as f64 - 3.0)).contains(&ix) {
            if y >= self.y_cut {
                return Complex64::new(0.0, 0.0);
            }
            return self.eval_direct(y);
        }
        let i = ix.floor() as usize;
        let f = ix - i as f64;
        // 4-point Lagrange in ln y
        let c0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let c1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        let c2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        let c3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        let g = &self.grid;
        g[i - 1] * c0 + g[i] * c1 + g[i + 1] * c2 + g[i + 2] * c3
    }
}

/// Per-(form, s) context: V at s and at 1−s, archimedean data, root number.
pub struct AfeContext {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub s: Complex64,
    pub eps: i8,
    pub params: AfeParams,
    pub arch: ArchFactor,
    v_s: WeightFn,
    v_1ms: WeightFn,
    /// (q²N)^{1/2−s} · L_∞(1−s)/L_∞(s) is q-dependent; the q-free part:
    ln_arch_ratio: Complex64,
}

impl AfeContext {
    pub fn new(form: &mut Newform, s: Complex64) -> Result<AfeContext> {
        Self::with_params(form, s, AfeParams::default())
    }

    pub fn with_params(form: &mut Newform, s: Complex64, params: AfeParams) -> Result<AfeContext> {
        if (s.re - 0.5).abs() > 0.1 + 1e-12 || s.im.abs() > 10.0 {
            return Err(Error::BadArgument(
                "s must satisfy |Re s − 1/2| ≤ 0.1, |Im s| ≤ 10".into(),
            ));
        }
        let arch = ArchFactor::holomorphic(form.weight);
        let one_minus_s = Complex64::new(1.0, 0.0) - s;
        let v_s = WeightFn::build(&[(arch, s)], &params);
        let v_1ms = if (s - one_minus_s).norm() < 1e-15 {
            WeightFn::build(&[(arch, s)], &params)
        } else {
            WeightFn::build(&[(arch, one_minus_s)], &params)
        };
        let eps = form.root_number()?;
        let ln_arch_ratio = arch.ln_l_inf(one_minus_s) - arch.ln_l_inf(s);
        Ok(AfeContext {
            label: form.label.clone(),
            level: form.level,
            weight: form.weight,
            s,
            eps,
            params,
            arch,
            v_s,
            v_1ms,
            ln_arch_ratio,
        })
    }

    pub fn v_weight(&self) -> &WeightFn {
        &self.v_s
    }

    /// Truncation index for modulus q: m_max = ⌈c·q√N·max(1,|s|)⌉ with the
    /// constant clipped at the decay cut of the weight functions.
    pub fn m_max(&self, q: u64) -> u64 {
        self.m_max_scaled(q, 1.0)
    }

    pub fn m_max_scaled(&self, q: u64, scale: f64) -> u64 {
        let cut = self.v_s.y_cut.max(self.v_1ms.y_cut);
        let c = (30.0 * self.s.norm().max(1.0)).min(cut) * scale;
        (c * q as f64 * (self.level as f64).sqrt()).ceil() as u64
    }
}

/// The weight V_{f,±,s}(y) by direct contour quadrature.  The parity slot is
/// kept for signature compatibility; for holomorphic forms L_∞ does not
/// depend on it.
pub fn weight_v(form: &Newform, parity: i8, s: Complex64, y: f64) -> Result<Complex64> {
    assert!(parity == 1 || parity == -1);
    if y <= 0.0 {
        return Err(Error::BadArgument("weight_v needs y > 0".into()));
    }
    let params = AfeParams::default();
    let arch = ArchFactor::holomorphic(form.weight);
    let w = WeightFn::build(&[(arch, s)], &params);
    Ok(w.eval_direct(y))
}

// ---------------------------------------------------------------------------
// Central value families
// ---------------------------------------------------------------------------

pub struct CentralValueFamily {
    pub label: String,
    pub q: u64,
    pub s: Complex64,
    /// values[j] = L(f ⊗ χ_j, s) for j = 1..q−2; values[0] is unused (trivial χ)
    pub values: Vec<Complex64>,
    /// θ_j ∈ [0, π)
    pub angles: Vec<f64>,
    pub parity: Vec<i8>,
    pub m_max: u64,
}

impl CentralValueFamily {
    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (1..self.values.len()).map(move |j| (j, self.values[j]))
    }

    pub fn phi_star(&self) -> f64 {
        (self.q - 2) as f64
    }

    /// Family dump rows `j,re,im,theta,parity`.
    pub fn csv(&self) -> String {
        let mut out = String::from("j,re,im,theta,parity\n");
        for (j, v) in self.nontrivial() {
            out.push_str(&format!(
                "{},{:.15e},{:.15e},{:.15e},{}\n",
                j, v.re, v.im, self.angles[j], self.parity[j]
            ));
        }
        out
    }
}

/// ε(f,±,s)·χ(N)-free part: ε(f) (q²N)^{1/2−s} L_∞(1−s)/L_∞(s).
fn eps_scalar(ctx: &AfeContext, q: u64) -> Complex64 {
    let half_minus_s = Complex64::new(0.5, 0.0) - ctx.s;
    let ln_qq = (q as f64 * q as f64 * ctx.level as f64).ln();
    (half_minus_s * ln_qq + ctx.ln_arch_ratio).exp() * ctx.eps as f64
}

/// All central values L(f⊗χ_j, s) for one (f, q, s) by two length-(q−1)
/// DFTs over the discrete-log folds.
pub fn central_values_batch(
    ctx: &AfeContext,
    form: &mut Newform,
    group: &CharacterGroup,
    gauss: &[Complex64],
) -> Result<CentralValueFamily> {
    let q = group.q();
    if arith::gcd(q, ctx.level) != 1 {
        return Err(Error::ModulusDividesLevel { q, level: ctx.level });
    }
    let m_max = ctx.m_max(q);
    form.ensure_lambda(m_max)?;
    let fam = batch_inner(ctx, form, group, gauss, m_max)?;

    // performance path vs reference path, every run, seeded
    let mut rng = ChaCha8Rng::seed_from_u64(q ^ 0x7157_1ab5);
    for _ in 0..3 {
        let j = rng.gen_range(1..=(q - 2)) as usize;
        let direct = direct_value(ctx, form, group, gauss, j, m_max)?;
        let batch = fam.values[j];
        let tol = 1e-10 * batch.norm().max(1.0);
        if (direct - batch).norm() > tol {
            return Err(Error::Quadrature(format!(
                "batch/direct mismatch at j={j}: {batch} vs {direct}"
            )));
        }
    }
    Ok(fam)
}

fn batch_inner(
    ctx: &AfeContext,
    form: &Newform,
    group: &CharacterGroup,
    gauss: &[Complex64],
    m_max: u64,
) -> Result<CentralValueFamily> {
    let q = group.q();
    let n = (q - 1) as usize;
    let lam = form.lambda_slice();
    if (lam.len() as u64) < m_max {
        return Err(Error::CacheDepth {
            need: m_max,
            have: lam.len() as u64,
        });
    }
    let qn = q as f64 * (ctx.level as f64).sqrt();
    let s = ctx.s;
    let one_minus_s = Complex64::new(1.0, 0.0) - s;
    let same = (s - one_minus_s).norm() < 1e-15;

    let mut fold1 = vec![(Kahan::default(), Kahan::default()); n];
    let mut fold2 = if same {
        Vec::new()
    } else {
        vec![(Kahan::default(), Kahan::default()); n]
    };
    for m in 1..=m_max {
        if m % q == 0 {
            continue;
        }
        let l = lam[m as usize - 1];
        if l == 0.0 {
            continue;
        }
        let y = m as f64 / qn;
        let t = group.dlog(m % q) as usize;
        let ln_m = (m as f64).ln();
        let v1 = ctx.v_s.eval(y);
        let c1 = (-(s * ln_m)).exp() * v1 * l;
        fold1[t].0.add(c1.re);
        fold1[t].1.add(c1.im);
        if !same {
            let v2 = ctx.v_1ms.eval(y);
            let c2 = (-(one_minus_s * ln_m)).exp() * v2 * l;
            fold2[t].0.add(c2.re);
            fold2[t].1.add(c2.im);
        }
    }
    let buf1: Vec<Complex64> = fold1
        .iter()
        .map(|(re, im)| Complex64::new(re.value(), im.value()))
        .collect();
    let plan = DftPlan::new(n, Sign::Plus);
    let s1 = plan.run(&buf1);
    let s2 = if same {
        s1.clone()
    } else {
        let buf2: Vec<Complex64> = fold2
            .iter()
            .map(|(re, im)| Complex64::new(re.value(), im.value()))
            .collect();
        plan.run(&buf2)
    };

    let eps0 = eps_scalar(ctx, q);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let mut angles = vec![0.0f64; n];
    let mut parity = vec![0i8; n];
    for j in 1..n {
        let chi_r = group.chi(j, ctx.level % q);
        let eps_fac = eps0 * chi_r * gauss[j] * gauss[j];
        // χ̄_j-sum is the χ-sum DFT at the conjugate index
        let v = s1[j] + eps_fac * s2[(n - j) % n];
        values[j] = v;
        angles[j] = v.arg().rem_euclid(PI);
        parity[j] = group.parity(j);
    }
    Ok(CentralValueFamily {
        label: ctx.label.clone(),
        q,
        s,
        values,
        angles,
        parity,
        m_max,
    })
}

/// Reference path: one character, direct m-sum with the same interpolants.
pub fn direct_value(
    ctx: &AfeContext,
    form: &Newform,
    group: &CharacterGroup,
    gauss: &[Complex64],
    j: usize,
    m_max: u64,
) -> Result<Complex64> {
    let q = group.q();
    let lam = form.lambda_slice();
    let qn = q as f64 * (ctx.level as f64).sqrt();
    let s = ctx.s;
    let one_minus_s = Complex64::new(1.0, 0.0) - s;
    let mut a1 = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    for m in 1..=m_max {
        if m % q == 0 {
            continue;
        }
        let l = lam[m as usize - 1];
        if l == 0.0 {
            continue;
        }
        let y = m as f64 / qn;
        let ln_m = (m as f64).ln();
        let chi = group.chi(j, m % q);
        a1 += chi * (-(s * ln_m)).exp() * ctx.v_s.eval(y) * l;
        a2 += chi.conj() * (-(one_minus_s * ln_m)).exp() * ctx.v_1ms.eval(y) * l;
    }
    let chi_r = group.chi(j, ctx.level % q);
    Ok(a1 + eps_scalar(ctx, q) * chi_r * gauss[j] * gauss[j] * a2)
}

/// Family refinement check: rebuild with 1.3·m_max and report the largest
/// relative change.
pub fn truncation_refinement(
    ctx: &AfeContext,
    form: &mut Newform,
    group: &CharacterGroup,
    gauss: &[Complex64],
) -> Result<f64> {
    let m1 = ctx.m_max(group.q());
    let m2 = ctx.m_max_scaled(group.q(), 1.3);
    form.ensure_lambda(m2)?;
    let f1 = batch_inner(ctx, form, group, gauss, m1)?;
    let f2 = batch_inner(ctx, form, group, gauss, m2)?;
    let mut worst = 0.0f64;
    for (j, v) in f1.nontrivial() {
        let d = (v - f2.values[j]).norm() / v.norm().max(1.0);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Pointwise L(f⊗χ,s)·conj(L(g⊗χ,s)) in character order.
pub fn pair_products(
    fam_f: &CentralValueFamily,
    fam_g: &CentralValueFamily,
) -> Result<Vec<Complex64>> {
    if fam_f.q != fam_g.q {
        return Err(Error::BadArgument("pair_products: mismatched q".into()));
    }
    if (fam_f.s - fam_g.s).norm() > 1e-14 {
        return Err(Error::BadArgument("pair_products: mismatched s".into()));
    }
    Ok(fam_f
        .values
        .iter()
        .zip(&fam_g.values)
        .map(|(a, b)| a * b.conj())
        .collect())
}

// ---------------------------------------------------------------------------
// Voronoi identity check
// ---------------------------------------------------------------------------

/// Smooth bump supported on [1/2, 2].
pub fn bump(x: f64) -> f64 {
    if x <= 0.5 || x >= 2.0 {
        0.0
    } else {
        (-1.0 / ((x - 0.5) * (2.0 - x))).exp()
    }
}

struct BesselGrid {
    order: u32,
    h: f64,
    vals: Vec<f64>,
}

impl BesselGrid {
    fn build(order: u32, x_max: f64) -> BesselGrid {
        let h = 0.01;
        let n = (x_max / h).ceil() as usize + 4;
        let vals = (0..n)
            .into_par_iter()
            .map(|i| bessel_j(order, i as f64 * h))
            .collect();
        BesselGrid { order, h, vals }
    }

    fn eval(&self, x: f64) -> f64 {
        let ix = x / self.h;
        let i = ix.floor() as usize;
        if i + 2 >= self.vals.len() || i == 0 {
            return bessel_j(self.order, x);
        }
        let f = ix - i as f64;
        let g = &self.vals;
        let c0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let c1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        let c2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        let c3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        g[i - 1] * c0 + g[i] * c1 + g[i + 1] * c2 + g[i + 2] * c3
    }
}

/// Both sides of the a-congruence Voronoi identity with a bump of amplitude
/// `amp` at scale `n_scale`; returns (lhs, rhs, |lhs − rhs|).
pub fn voronoi_check(
    form: &mut Newform,
    a: u64,
    q: u64,
    n_scale: f64,
    amp: f64,
) -> Result<(f64, f64, f64)> {
    if !arith::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if a % q == 0 {
        return Err(Error::BadArgument("a ≡ 0 mod q".into()));
    }
    if arith::gcd(q, form.level) != 1 {
        return Err(Error::ModulusDividesLevel { q, level: form.level });
    }
    if amp == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let r = form.level;
    let k = form.weight;
    // With the analytic root number ε(f), the holomorphic Bessel kernel
    // enters as ε(f)·2π·J_{k−1}; the i^{k} of the Maass-uniform statement is
    // already absorbed there (verified on both parities of k/2 mod 2).
    let eps = form.root_number()? as f64;
    let i_pow_k = 1.0;

    let lhs_cut = (2.0 * n_scale).ceil() as u64;
    // dual side: the q | n stratum contributes without sign oscillation, so
    // the window must run until W̃₊ itself is small
    let y_budget = 2000.0f64;
    let dual_cut = ((y_budget * q as f64 * q as f64 * r as f64) / n_scale).ceil() as u64;
    form.ensure_lambda(lhs_cut.max(dual_cut).max(64))?;
    let lam = form.lambda_slice();

    let sqrt_q = (q as f64).sqrt();
    let mut lhs = Kahan::default();
    let mut plain = Kahan::default();
    for n in 1..=lhs_cut {
        let w = amp * bump(n as f64 / n_scale);
        if w == 0.0 {
            continue;
        }
        plain.add(lam[n as usize - 1] * w);
        if n % q == a % q {
            lhs.add(lam[n as usize - 1] * w * sqrt_q);
        }
    }

    // Kl₂ table and the Bessel transform
    let group = CharacterGroup::build(q)?;
    let gauss = group.gauss_all();
    let kl2 = group.kloosterman_table(&gauss, 2)?;
    let r_inv = arith::mod_inverse(r % q, q).expect("(r, q) = 1");
    let a_rbar = arith::mul_mod(a % q, r_inv, q);

    let x_max = 4.0 * PI * (2.0 * y_budget).sqrt() + 8.0;
    let jgrid = BesselGrid::build(k - 1, x_max);
    // composite Gauss–Legendre on [1/2, 2]: the bump is flat-to-all-orders at
    // the endpoints but has large interior derivatives, and the Bessel kernel
    // oscillates ~√y times across the support
    let (nodes, weights) = gauss_legendre(24);
    let segments = 24usize;
    let w_tilde = |y: f64| -> f64 {
        let mut acc = 0.0;
        let seg_w = 1.5 / segments as f64;
        for seg in 0..segments {
            let lo = 0.5 + seg as f64 * seg_w;
            let mid = lo + seg_w / 2.0;
            for (x, w) in nodes.iter().zip(&weights) {
                let u = mid + seg_w / 2.0 * x;
                acc += w * seg_w / 2.0 * amp * bump(u) * jgrid.eval(4.0 * PI * (u * y).sqrt());
            }
        }
        acc * 2.0 * PI * i_pow_k
    };

    let mut dual = Kahan::default();
    for n in 1..=dual_cut {
        let y = n as f64 * n_scale / (q as f64 * q as f64 * r as f64);
        let wt = w_tilde(y);
        let idx = arith::mul_mod(a_rbar, n % q, q);
        // at q | n the sum degenerates to the Ramanujan value −1/√q
        let kl = if idx == 0 {
            -1.0 / sqrt_q
        } else {
            kl2[idx as usize].re
        };
        dual.add(lam[n as usize - 1] * wt * kl);
    }
    let rhs = plain.value() / sqrt_q
        + eps * (n_scale / (q as f64 * (r as f64).sqrt())) * dual.value();
    let lhs = lhs.value();
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

// ---------------------------------------------------------------------------
// Root number estimation
// ---------------------------------------------------------------------------

/// F(y) = Σ a(n) e^{−2πny/√N} = f(iy/√N) up to the Fourier normalization.
fn f_on_ray(form: &Newform, y: f64) -> f64 {
    let sqrt_n = (form.level as f64).sqrt();
    let ex = form.weight as f64 / 2.0 - 0.5;
    let lam = form.lambda_slice();
    let mut acc = Kahan::default();
    for (i, &l) in lam.iter().enumerate() {
        let n = (i + 1) as f64;
        // |λ(n)| ≤ d(n): break on the envelope, not the (possibly zero) term
        let envelope = (n + 1.0) * n.powf(ex) * (-2.0 * PI * n * y / sqrt_n).exp();
        if n > 8.0 && envelope < 1e-19 * (1.0 + acc.value().abs()) {
            break;
        }
        acc.add(l * n.powf(ex) * (-2.0 * PI * n * y / sqrt_n).exp());
    }
    acc.value()
}

/// ∫_{y0}^{∞} F(y) y^{s−1} dy by composite Gauss–Legendre.
fn smoothed_tail(form: &Newform, s: f64, y0: f64) -> f64 {
    let sqrt_n = (form.level as f64).sqrt();
    // decay e^{−2πy/√N}: integrate to where the integrand is ~1e−20
    let y_end = y0 + 9.0 * sqrt_n;
    let (nodes, weights) = gauss_legendre(32);
    let segments = 40;
    let hseg = (y_end - y0) / segments as f64;
    let mut acc = Kahan::default();
    for seg in 0..segments {
        let a = y0 + seg as f64 * hseg;
        let mid = a + hseg / 2.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let y = mid + hseg / 2.0 * x;
            acc.add(w * hseg / 2.0 * f_on_ray(form, y) * y.powf(s - 1.0));
        }
    }
    acc.value()
}

/// Estimate ε(f) by computing the completed value via smoothed sums split at
/// y₀ and 1/y₀ (the head transformed through the functional equation with
/// sign ε) and picking the sign for which the two splits agree.
pub fn root_number_estimate(form: &mut Newform) -> Result<(i8, f64)> {
    form.ensure_lambda(600)?;
    let k = form.weight as f64;
    let y0 = 1.15f64;
    let mut best: Option<(i8, f64)> = None;
    for eps in [1i8, -1] {
        let mut resid = 0.0f64;
        let mut scale = 0.0f64;
        for ds in [0.3, 0.7] {
            let s0 = k / 2.0 + ds;
            let lam_a = smoothed_tail(form, s0, y0) + eps as f64 * smoothed_tail(form, k - s0, 1.0 / y0);
            let lam_b = smoothed_tail(form, s0, 1.0 / y0) + eps as f64 * smoothed_tail(form, k - s0, y0);
            resid += (lam_a - lam_b).abs();
            scale += lam_a.abs().max(lam_b.abs());
        }
        let rel = resid / scale.max(1e-300);
        if best.map(|(_, r)| rel < r).unwrap_or(true) {
            best = Some((eps, rel));
        }
    }
    let (eps, resid) = best.unwrap();
    if resid > 1e-6 {
        return Err(Error::Quadrature(format!(
            "root number ambiguous: residual {resid:.3e} for both signs"
        )));
    }
    Ok((eps, resid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::CacheDir;

    fn test_cache() -> CacheDir {
        let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("../../target/twistlab-cache");
        CacheDir::new(dir)
    }

    fn half() -> Complex64 {
        Complex64::new(0.5, 0.0)
    }

    #[test]
    fn weight_v_asymptotics() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        f.ensure_lambda(64).unwrap();
        let near_zero = weight_v(&f, 1, half(), 1e-6).unwrap();
        assert!(
            (near_zero - Complex64::new(1.0, 0.0)).norm() < 2e-3,
            "V(1e-6) = {near_zero}"
        );
        let far = weight_v(&f, 1, half(), 200.0).unwrap();
        assert!(far.norm() < 1e-10, "V(200) = {far}");
    }

    #[test]
    fn weight_v_quadrature_refinement() {
        let cache = test_cache();
        let f = Newform::builtin("11a", &cache).unwrap();
        let arch = ArchFactor::holomorphic(f.weight);
        let base = AfeParams::default();
        let fine = AfeParams {
            height: 32.0,
            step: 1.0 / 128.0,
            ..base
        };
        let w1 = WeightFn::build(&[(arch, half())], &base);
        let w2 = WeightFn::build(&[(arch, half())], &fine);
        for y in [1e-6, 1e-3, 0.1, 1.0, 3.0, 10.0] {
            let d = (w1.eval_direct(y) - w2.eval_direct(y)).norm();
            assert!(d < 1e-10, "refinement at y={y}: {d}");
        }
    }

    #[test]
    fn batch_matches_direct_and_conjugation() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let ctx = AfeContext::new(&mut f, half()).unwrap();
        let group = CharacterGroup::build(101).unwrap();
        let gauss = group.gauss_all();
        let fam = central_values_batch(&ctx, &mut f, &group, &gauss).unwrap();
        // 5 random characters against the reference path
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let j = rng.gen_range(1..=99usize);
            let direct = direct_value(&ctx, &f, &group, &gauss, j, fam.m_max).unwrap();
            assert!((direct - fam.values[j]).norm() < 1e-10 * fam.values[j].norm().max(1.0));
        }
        // conj(L(χ)) = L(χ̄) at s = 1/2
        for j in 1..=99usize {
            let w = fam.values[(100 - j) % 100];
            assert!(
                (fam.values[j].conj() - w).norm() <= 1e-9 * fam.values[j].norm().max(1.0),
                "conjugation at j={j}"
            );
        }
    }

    #[test]
    fn phase_formula_family_wide() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let ctx = AfeContext::new(&mut f, half()).unwrap();
        let group = CharacterGroup::build(101).unwrap();
        let gauss = group.gauss_all();
        let fam = central_values_batch(&ctx, &mut f, &group, &gauss).unwrap();
        let eps = f.root_number().unwrap() as f64;
        for (j, v) in fam.nontrivial() {
            if v.norm() <= 1e-6 {
                continue;
            }
            let lhs = v / v.conj(); // e^{2iθ}
            let rhs = group.chi(j, 11) * gauss[j] * gauss[j] * eps;
            assert!((lhs - rhs).norm() < 1e-8, "phase at j={j}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn truncation_refinement_small() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let ctx = AfeContext::new(&mut f, half()).unwrap();
        let group = CharacterGroup::build(101).unwrap();
        let gauss = group.gauss_all();
        let worst = truncation_refinement(&ctx, &mut f, &group, &gauss).unwrap();
        assert!(worst < 1e-9, "refinement moved values by {worst}");
    }

    #[test]
    fn voronoi_identities() {
        let cache = test_cache();
        let mut delta = Newform::builtin("delta", &cache).unwrap();
        let (lhs, rhs, diff) = voronoi_check(&mut delta, 3, 7, 50.0, 1.0).unwrap();
        assert!(diff < 1e-6, "delta: {lhs} vs {rhs} (diff {diff})");
        let mut f11 = Newform::builtin("11a", &cache).unwrap();
        let (lhs, rhs, diff) = voronoi_check(&mut f11, 5, 13, 100.0, 1.0).unwrap();
        assert!(diff < 1e-6, "11a: {lhs} vs {rhs} (diff {diff})");
        // zero bump
        assert_eq!(voronoi_check(&mut f11, 5, 13, 100.0, 0.0).unwrap(), (0.0, 0.0, 0.0));
        assert!(voronoi_check(&mut f11, 13, 13, 100.0, 1.0).is_err());
    }

    #[test]
    fn root_numbers() {
        let cache = test_cache();
        let mut delta = Newform::builtin("delta", &cache).unwrap();
        let (eps, resid) = root_number_estimate(&mut delta).unwrap();
        assert_eq!(eps, 1);
        assert!(resid < 1e-8, "delta residual {resid}");
        let mut f11 = Newform::builtin("11a", &cache).unwrap();
        let (eps, resid) = root_number_estimate(&mut f11).unwrap();
        assert_eq!(eps, 1);
        assert!(resid < 1e-8, "11a residual {resid}");
    }

    #[test]
    fn pair_products_basics() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let ctx = AfeContext::new(&mut f, half()).unwrap();
        let group = CharacterGroup::build(101).unwrap();
        let gauss = group.gauss_all();
        let fam = central_values_batch(&ctx, &mut f, &group, &gauss).unwrap();
        let prods = pair_products(&fam, &fam).unwrap();
        for (j, v) in fam.nontrivial() {
            assert!(prods[j].re >= 0.0);
            assert!((prods[j] - v * v.conj()).norm() < 1e-15);
        }
    }
}
