//! Family averages: twisted first and second moments with their predicted
//! main terms, the exact Mazur–Rubin mean/correlation identities, the
//! variance asymptotic fit, and the Birch–Stevens residual check.
//!
//! All family averages sum conjugate character pairs together so that the
//! structurally-forced cancellations survive rounding.

use crate::afe::{AfeContext, ArchFactor, CentralValueFamily, WeightFn};
use crate::arith::{self, Kahan};
use crate::chargroup::CharacterGroup;
use crate::dft::{DftPlan, Sign};
use crate::error::{Error, Result};
use crate::hecke::Newform;
use crate::modsym::{EigenSymbol, ManinSymbolSpace, ModularSymbolTable};
use crate::special::zeta;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub kind: String,
    pub q: u64,
    pub params: String,
    pub computed_re: f64,
    pub computed_im: f64,
    pub predicted_re: Option<f64>,
    pub predicted_im: Option<f64>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub notes: String,
}

impl MomentReport {
    pub fn new(
        kind: &str,
        q: u64,
        params: String,
        computed: Complex64,
        predicted: Option<Complex64>,
        notes: String,
    ) -> MomentReport {
        let (abs_err, rel_err) = match predicted {
            Some(p) => {
                let abs = (computed - p).norm();
                (Some(abs), Some(abs / p.norm().max(1.0)))
            }
            None => (None, None),
        };
        MomentReport {
            kind: kind.into(),
            q,
            params,
            computed_re: computed.re,
            computed_im: computed.im,
            predicted_re: predicted.map(|p| p.re),
            predicted_im: predicted.map(|p| p.im),
            abs_err,
            rel_err,
            notes,
        }
    }

    pub fn computed(&self) -> Complex64 {
        Complex64::new(self.computed_re, self.computed_im)
    }

    pub fn predicted(&self) -> Option<Complex64> {
        self.predicted_re
            .map(|re| Complex64::new(re, self.predicted_im.unwrap_or(0.0)))
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.15e},{:.15e},{},{},{}\n",
            self.kind,
            self.q,
            self.params.replace(',', ";"),
            self.computed_re,
            self.computed_im,
            self.predicted_re.map(|v| format!("{v:.15e}")).unwrap_or_default(),
            self.predicted_im.map(|v| format!("{v:.15e}")).unwrap_or_default(),
            self.rel_err.map(|v| format!("{v:.6e}")).unwrap_or_default(),
        )
    }
}

/// Σ over nontrivial χ in conjugate-pair order, normalized by φ*(q).
pub fn primitive_average<F>(q: u64, mut term: F) -> Complex64
where
    F: FnMut(usize) -> Complex64,
{
    let n = (q - 1) as usize;
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    let mut add = |v: Complex64| {
        re.add(v.re);
        im.add(v.im);
    };
    for j in 1..n {
        let jc = n - j;
        if j < jc {
            let v = term(j) + term(jc);
            add(v);
        } else if j == jc {
            add(term(j));
        }
    }
    Complex64::new(re.value(), im.value()) / (q - 2) as f64
}

/// First twisted moment (1/φ*)Σ* L(f⊗χ,1/2) ε_χ^k χ(ℓ), with the predicted
/// δ_{k=0} / δ_{k=−2} main terms.
pub fn first_moment(
    fam: &CentralValueFamily,
    group: &CharacterGroup,
    gauss: &[Complex64],
    form: &mut Newform,
    ell: u64,
    k: i32,
) -> Result<MomentReport> {
    let q = group.q();
    if ell % q == 0 {
        return Err(Error::BadArgument("q | ℓ".into()));
    }
    if k.unsigned_abs() > 6 {
        return Err(Error::BadArgument("first_moment needs |k| ≤ 6".into()));
    }
    let computed = primitive_average(q, |j| fam.values[j] * gauss[j].powi(k) * group.chi(j, ell));
    let predicted = match k {
        0 => {
            let linv = arith::mod_inverse(ell % q, q).unwrap();
            let lq = arith::rep_in_1_q(linv as i64, q);
            Some(Complex64::new(form.lambda(lq)? / (lq as f64).sqrt(), 0.0))
        }
        -2 => {
            let lr = arith::mul_mod(ell % q, form.level % q, q);
            let lrq = arith::rep_in_1_q(lr as i64, q);
            let eps = form.root_number()? as f64;
            Some(Complex64::new(
                eps * form.lambda(lrq)? / (lrq as f64).sqrt(),
                0.0,
            ))
        }
        _ => Some(Complex64::new(0.0, 0.0)),
    };
    Ok(MomentReport::new(
        "first_moment",
        q,
        format!("form={} ell={} k={}", fam.label, ell, k),
        computed,
        predicted,
        String::new(),
    ))
}

/// Twisted second moment (1/φ*)Σ* L(f⊗χ,s) conj(L(g⊗χ,s)) χ(ℓ)χ̄(ℓ′).
pub fn second_moment(
    fam_f: &CentralValueFamily,
    fam_g: &CentralValueFamily,
    group: &CharacterGroup,
    ell: u64,
    ell2: u64,
) -> Result<MomentReport> {
    if fam_f.q != fam_g.q || (fam_f.s - fam_g.s).norm() > 1e-14 {
        return Err(Error::BadArgument("second_moment: mismatched families".into()));
    }
    let q = group.q();
    if ell % q == 0 || ell2 % q == 0 {
        return Err(Error::BadArgument("q | ℓℓ′".into()));
    }
    let computed = primitive_average(q, |j| {
        fam_f.values[j] * fam_g.values[j].conj() * group.chi(j, ell) * group.chi(j, ell2).conj()
    });
    Ok(MomentReport::new(
        "second_moment",
        q,
        format!(
            "f={} g={} ell={} ell2={} s={}",
            fam_f.label, fam_g.label, ell, ell2, fam_f.s
        ),
        computed,
        None,
        String::new(),
    ))
}

/// The paper-predicted main term MT(f,g,s;ℓ,ℓ′) = (MT⁺+MT⁻)/2, evaluated by
/// the two n-sums against W_{f,g,±,s}.  For holomorphic f, g the two
/// parities coincide.
pub fn main_term_mt(
    f: &mut Newform,
    g: &mut Newform,
    s: Complex64,
    ell: u64,
    ell2: u64,
    q: u64,
) -> Result<Complex64> {
    let r = f.level;
    let rp = g.level;
    let delta = arith::gcd(r, rp);
    let rho = r / delta;
    let rho_p = rp / delta;
    let arch_f = ArchFactor::holomorphic(f.weight);
    let arch_g = ArchFactor::holomorphic(g.weight);
    let sbar = s.conj();
    let one = Complex64::new(1.0, 0.0);
    let params = crate::afe::AfeParams::default();
    let w_s = WeightFn::build(&[(arch_f, s), (arch_g, sbar)], &params);
    let w_1ms = WeightFn::build(&[(arch_f, one - s), (arch_g, one - sbar)], &params);
    let sigma = s.re;

    // ε(f,g,±,s) = ε(f)ε(g) (q²r)^{1/2−s} (q²r')^{1/2−s̄} ratio of L_∞'s
    let epsf = f.root_number()? as f64;
    let epsg = g.root_number()? as f64;
    let eps_fg = {
        let a = (Complex64::new(0.5, 0.0) - s) * ((q * q) as f64 * r as f64).ln();
        let b = (Complex64::new(0.5, 0.0) - sbar) * ((q * q) as f64 * rp as f64).ln();
        let ratio = arch_f.ln_l_inf(one - s) - arch_f.ln_l_inf(s) + arch_g.ln_l_inf(one - sbar)
            - arch_g.ln_l_inf(sbar);
        (a + b + ratio).exp() * epsf * epsg
    };

    // first n-sum: λ_f(ℓ′n) λ_g(ℓn) / (ℓ′^s ℓ^{s̄} n^{2σ}) W_s(ℓℓ′n²/(q²√(rr′)))
    // — the product has conductor q⁴rr′, so the AFE length scale is its root
    let qq_rr = (q * q) as f64 * ((r * rp) as f64).sqrt();
    let n1_max = ((qq_rr * w_s.y_cut / (ell * ell2) as f64).sqrt()).ceil() as u64 + 1;
    f.ensure_lambda(ell2 * n1_max)?;
    g.ensure_lambda(ell * n1_max)?;
    let lf = f.lambda_slice();
    let lg = g.lambda_slice();
    let mut sum1 = Complex64::new(0.0, 0.0);
    for n in 1..=n1_max {
        let y = (ell * ell2) as f64 * (n * n) as f64 / qq_rr;
        let w = w_s.eval(y);
        if w.norm() == 0.0 {
            continue;
        }
        let c = lf[(ell2 * n) as usize - 1] * lg[(ell * n) as usize - 1]
            / (n as f64).powf(2.0 * sigma);
        sum1 += w * c;
    }
    sum1 *= (-(s * (ell2 as f64).ln() + sbar * (ell as f64).ln())).exp();

    // second n-sum: λ_f(ℓn) λ_g(ℓ′n) / (ℓ^{1−s} ℓ′^{1−s̄} n^{2−2σ}) at the
    // argument mn/(q²√(rr′)) with m = ρℓk, n = ρ′ℓ′k, i.e. ℓℓ′√(rr′)k²/(q²δ²)
    let qq_dd = (q * q) as f64 * (delta * delta) as f64 / ((r * rp) as f64).sqrt();
    let n2_max = ((qq_dd * w_1ms.y_cut / (ell * ell2) as f64).sqrt()).ceil() as u64 + 1;
    f.ensure_lambda(ell * n2_max)?;
    g.ensure_lambda(ell2 * n2_max)?;
    let lf = f.lambda_slice();
    let lg = g.lambda_slice();
    let mut sum2 = Complex64::new(0.0, 0.0);
    for n in 1..=n2_max {
        let y = (ell * ell2) as f64 * (n * n) as f64 / qq_dd;
        let w = w_1ms.eval(y);
        if w.norm() == 0.0 {
            continue;
        }
        let c = lf[(ell * n) as usize - 1] * lg[(ell2 * n) as usize - 1]
            / (n as f64).powf(2.0 - 2.0 * sigma);
        sum2 += w * c;
    }
    sum2 *= (-((one - s) * (ell as f64).ln() + (one - sbar) * (ell2 as f64).ln())).exp();
    let lam_rho = if rho == 1 { 1.0 } else { f.lambda(rho)? };
    let lam_rho_p = if rho_p == 1 { 1.0 } else { g.lambda(rho_p)? };
    let rho_fac = (-((one - s) * (rho as f64).ln() + (one - sbar) * (rho_p as f64).ln())).exp();
    // MT⁺ = MT⁻ for holomorphic pairs, and each diagonal stratum enters with
    // weight one (the ± congruence classes are disjoint)
    Ok(sum1 + eps_fg * lam_rho * lam_rho_p * rho_fac * sum2)
}

/// L(f, 1/2) by the two-term smoothed series with the root number.
pub fn central_value_untwisted(form: &mut Newform) -> Result<f64> {
    let arch = ArchFactor::holomorphic(form.weight);
    let params = crate::afe::AfeParams::default();
    let w = WeightFn::build(&[(arch, Complex64::new(0.5, 0.0))], &params);
    let sqrt_n = (form.level as f64).sqrt();
    let cutoff = (sqrt_n * w.y_cut.min(30.0)).ceil() as u64 + 1;
    form.ensure_lambda(cutoff)?;
    let lam = form.lambda_slice();
    let mut acc = Kahan::default();
    for n in 1..=cutoff {
        let v = w.eval(n as f64 / sqrt_n).re;
        acc.add(lam[n as usize - 1] / (n as f64).sqrt() * v);
    }
    let eps = form.root_number()? as f64;
    Ok((1.0 + eps) * acc.value())
}

/// L_q(f_q, 1/2) = Σ_α λ(q^{α+1}) q^{−α/2}.
pub fn local_factor_lq(form: &mut Newform, q: u64) -> Result<f64> {
    let lam_q = form.lambda(q)?;
    let chi = form.chi_level(q);
    let mut prev = 1.0f64;
    let mut cur = lam_q;
    let mut acc = 0.0;
    let rt = (q as f64).sqrt();
    let mut scale = 1.0;
    for _ in 0..400 {
        acc += cur * scale;
        let next = lam_q * cur - chi * prev;
        prev = cur;
        cur = next;
        scale /= rt;
        if scale < 1e-19 {
            break;
        }
    }
    Ok(acc)
}

/// Mean formula check: M_f(q) against the exact closed form.
pub fn mean_identity_check(
    space: &ManinSymbolSpace,
    eig: &EigenSymbol,
    form: &mut Newform,
    q: u64,
) -> Result<MomentReport> {
    let tbl = crate::modsym::table(space, eig, q)?;
    let computed = tbl.mean;
    let lq_new = local_factor_lq(form, q)?;
    let lam_q = form.lambda(q)?;
    let chi = form.chi_level(q);
    let lq_local = 1.0 / (1.0 - lam_q / (q as f64).sqrt() + chi / q as f64);
    let l_half = central_value_untwisted(form)?;
    let qf = q as f64;
    let predicted = (qf.sqrt() / (qf - 1.0) * lq_new / lq_local - 1.0 / (qf - 1.0)) * l_half;
    Ok(MomentReport::new(
        "mean_identity",
        q,
        format!("form={}", form.label),
        computed,
        Some(Complex64::new(predicted, 0.0)),
        format!("L(f,1/2)={l_half:.12e}"),
    ))
}

/// Correlation identity: C_{f,g}(u,v;q) from modular symbols (LHS) against
/// the AFE-family average (RHS) — two independent data paths.
pub fn correlation_identity_check(
    tbl_f: &ModularSymbolTable,
    tbl_g: &ModularSymbolTable,
    fam_f: &CentralValueFamily,
    fam_g: &CentralValueFamily,
    group: &CharacterGroup,
    u: u64,
    v: u64,
) -> Result<MomentReport> {
    let q = group.q();
    if tbl_f.q != q || fam_f.q != q || tbl_g.q != q || fam_g.q != q {
        return Err(Error::BadArgument("correlation: mismatched q".into()));
    }
    if u % q == 0 || v % q == 0 {
        return Err(Error::BadArgument("(uv, q) must be 1".into()));
    }
    let phi = (q - 1) as f64;
    let mf = tbl_f.mean;
    let mg = tbl_g.mean;
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for b in 1..q {
        let x = tbl_f.value((u * b % q) as i64) - mf;
        let y = tbl_g.value((v * b % q) as i64) - mg;
        let t = x * y.conj();
        re.add(t.re);
        im.add(t.im);
    }
    let lhs = Complex64::new(re.value(), im.value()) / phi;
    let avg = primitive_average(q, |j| {
        fam_f.values[j] * fam_g.values[j].conj() * group.chi(j, u) * group.chi(j, v).conj()
    });
    let rhs = q as f64 / (phi * phi) * avg * (q - 2) as f64;
    Ok(MomentReport::new(
        "correlation_identity",
        q,
        format!("f={} g={} u={} v={}", tbl_f.label, tbl_g.label, u, v),
        lhs,
        Some(rhs),
        String::new(),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceFit {
    pub label: String,
    pub qs: Vec<u64>,
    pub variances: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub predicted_slope: f64,
    pub rel_dev: f64,
    /// intercept range under dropping one grid point
    pub jackknife_spread: f64,
}

fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Affine fit of V_f(q) against log q over a prime grid, compared with the
/// predicted slope 2 ∏_{p|r}(1+p^{−1})^{−1} L*(Sym²f,1)/ζ(2).
pub fn variance_asymptotic(
    space: &ManinSymbolSpace,
    eig: &EigenSymbol,
    form: &mut Newform,
    q_grid: &[u64],
) -> Result<VarianceFit> {
    if q_grid.len() < 5 {
        return Err(Error::BadArgument("variance grid needs ≥ 5 primes".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &q in q_grid {
        let tbl = crate::modsym::table(space, eig, q)?;
        xs.push((q as f64).ln());
        ys.push(tbl.variance);
    }
    let (slope, intercept) = affine_fit(&xs, &ys);
    let sym2 = form.sym2_value()?;
    let mut level_factor = 1.0;
    let mut n = form.level;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            level_factor /= 1.0 + 1.0 / p as f64;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        level_factor /= 1.0 + 1.0 / n as f64;
    }
    let predicted_slope = 2.0 * level_factor * sym2.value / zeta(2.0);
    let rel_dev = (slope - predicted_slope).abs() / predicted_slope.abs();
    // jackknife: refit dropping one point at a time
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for drop in 0..xs.len() {
        let xs2: Vec<f64> = xs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, &x)| x)
            .collect();
        let ys2: Vec<f64> = ys
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, &y)| y)
            .collect();
        let (_, b) = affine_fit(&xs2, &ys2);
        lo = lo.min(b);
        hi = hi.max(b);
    }
    let jackknife_spread = (hi - lo).abs() / intercept.abs().max(1e-12);
    Ok(VarianceFit {
        label: form.label.clone(),
        qs: q_grid.to_vec(),
        variances: ys,
        slope,
        intercept,
        predicted_slope,
        rel_dev,
        jackknife_spread,
    })
}

/// Max over primitive χ of |L(f⊗χ,1/2) − (ε_χ/√q) Σ_a χ(−ā)⟨a/q⟩|, the
/// character sums batched by one DFT in discrete-log order.
pub fn birch_stevens_check(
    tbl: &ModularSymbolTable,
    fam: &CentralValueFamily,
    group: &CharacterGroup,
    gauss: &[Complex64],
) -> Result<f64> {
    let q = group.q();
    if tbl.q != q || fam.q != q {
        return Err(Error::BadArgument("birch-stevens: mismatched q".into()));
    }
    let n = (q - 1) as usize;
    // y[t] = ⟨(−g^{−t}) / q⟩ so that DFT⁺[j] = Σ_a χ_j(−ā) ⟨a/q⟩
    let y: Vec<Complex64> = (0..n)
        .map(|t| {
            let ginv = group.pow_g(n - t);
            tbl.value(-(ginv as i64))
        })
        .collect();
    let plan = DftPlan::new(n, Sign::Plus);
    let b = plan.run(&y);
    let scale = 1.0 / (q as f64).sqrt();
    let mut worst = 0.0f64;
    for (j, v) in fam.nontrivial() {
        let resid = (v - gauss[j] * scale * b[j]).norm();
        worst = worst.max(resid);
    }
    Ok(worst)
}

/// Birch–Stevens at q = 3 (below the character-table modulus floor): brute
/// force over the single primitive character.
pub fn birch_stevens_q3(
    space: &ManinSymbolSpace,
    eig: &EigenSymbol,
    form: &mut Newform,
) -> Result<f64> {
    let q = 3u64;
    // χ = quadratic character mod 3: χ(1)=1, χ(2)=−1
    let chi = |m: u64| -> f64 {
        match m % 3 {
            1 => 1.0,
            2 => -1.0,
            _ => 0.0,
        }
    };
    let eps_chi = {
        // (1/√3)(e(1/3) − e(2/3)) = i
        let e1 = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let e2 = Complex64::from_polar(1.0, 4.0 * PI / 3.0);
        (e1 - e2) / 3f64.sqrt()
    };
    let arch = ArchFactor::holomorphic(form.weight);
    let params = crate::afe::AfeParams::default();
    let w = WeightFn::build(&[(arch, Complex64::new(0.5, 0.0))], &params);
    let qn = q as f64 * (form.level as f64).sqrt();
    let m_max = (qn * w.y_cut).ceil() as u64 + 1;
    form.ensure_lambda(m_max)?;
    let lam = form.lambda_slice();
    let mut s1 = Kahan::default();
    for m in 1..=m_max {
        let c = chi(m);
        if c == 0.0 {
            continue;
        }
        s1.add(lam[m as usize - 1] / (m as f64).sqrt() * w.eval(m as f64 / qn).re * c);
    }
    // χ real: the two AFE sums coincide
    let eps_f = form.root_number()? as f64;
    let l_val = Complex64::new(s1.value(), 0.0)
        + eps_f * chi(form.level) * eps_chi * eps_chi * s1.value();
    // modular symbol side
    let m1 = eig.symbol(space, 1, 3)?;
    let m2 = eig.symbol(space, 2, 3)?;
    // Σ_a χ(−ā)⟨a/q⟩: ā = a for q = 3
    let sum = chi(2) * m1 + chi(1) * m2; // −1̄ = 2, −2̄ = 1
    let rhs = eps_chi / 3f64.sqrt() * sum;
    Ok((l_val - rhs).norm())
}

/// Convenience: family and tables for one (form, q) at s = 1/2.
pub struct FamilyBundle {
    pub group: CharacterGroup,
    pub gauss: Vec<Complex64>,
    pub family: CentralValueFamily,
}

pub fn family_at_half(form: &mut Newform, q: u64) -> Result<FamilyBundle> {
    let ctx = AfeContext::new(form, Complex64::new(0.5, 0.0))?;
    let group = CharacterGroup::build(q)?;
    let gauss = group.gauss_all();
    let family = crate::afe::central_values_batch(&ctx, form, &group, &gauss)?;
    Ok(FamilyBundle {
        group,
        gauss,
        family,
    })
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

    #[test]
    fn first_moment_examples() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let b = family_at_half(&mut f, 101).unwrap();
        // ℓ=2, k=0: 2̄ mod 101 = 51, so predicted λ(51)/√51
        let rep = first_moment(&b.family, &b.group, &b.gauss, &mut f, 2, 0).unwrap();
        let expect = f.lambda(51).unwrap() / 51f64.sqrt();
        assert!((rep.predicted().unwrap().re - expect).abs() < 1e-15);
        assert!(rep.rel_err.unwrap() < 0.5, "noise level {}", rep.rel_err.unwrap());
        // ℓ=1, k=1: predicted zero
        let rep = first_moment(&b.family, &b.group, &b.gauss, &mut f, 1, 1).unwrap();
        assert_eq!(rep.predicted().unwrap(), Complex64::new(0.0, 0.0));
        assert!(first_moment(&b.family, &b.group, &b.gauss, &mut f, 101, 0).is_err());
    }

    #[test]
    fn second_moment_gcd_invariance_and_positivity() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let b = family_at_half(&mut f, 101).unwrap();
        let r1 = second_moment(&b.family, &b.family, &b.group, 1, 3).unwrap();
        let r2 = second_moment(&b.family, &b.family, &b.group, 2, 6).unwrap();
        assert!((r1.computed() - r2.computed()).norm() < 1e-12);
        let diag = second_moment(&b.family, &b.family, &b.group, 1, 1).unwrap();
        assert!(diag.computed_re >= 0.0);
        assert!(diag.computed_im.abs() < 1e-10);
    }

    #[test]
    fn mean_identity_small() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let (space, eig) = crate::modsym::eigen_symbol_for_label("11a").unwrap();
        let rep = mean_identity_check(&space, &eig, &mut f, 101).unwrap();
        assert!(
            rep.rel_err.unwrap() < 1e-8,
            "mean identity rel err {}",
            rep.rel_err.unwrap()
        );
        // local factor sanity: L_q(f_q, 1/2) = λ(q) + O(q^{-1/2})
        let lq = local_factor_lq(&mut f, 101).unwrap();
        let lam_q = f.lambda(101).unwrap();
        assert!((lq - lam_q).abs() < 5.0 / (101f64).sqrt());
    }

    #[test]
    fn correlation_is_hermitian_for_f_eq_g() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let b = family_at_half(&mut f, 101).unwrap();
        let (space, eig) = crate::modsym::eigen_symbol_for_label("11a").unwrap();
        let tbl = crate::modsym::table(&space, &eig, 101).unwrap();
        let rep =
            correlation_identity_check(&tbl, &tbl, &b.family, &b.family, &b.group, 5, 5).unwrap();
        assert!(rep.computed_im.abs() < 1e-9, "u=v gives a real form");
        assert!(rep.rel_err.unwrap() < 1e-6);
    }

    #[test]
    fn birch_stevens_small_q() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let (space, eig) = crate::modsym::eigen_symbol_for_label("11a").unwrap();
        let resid = birch_stevens_q3(&space, &eig, &mut f).unwrap();
        assert!(resid < 1e-10, "q=3 residual {resid}");
        let b = family_at_half(&mut f, 7).unwrap();
        let tbl = crate::modsym::table(&space, &eig, 7).unwrap();
        let worst = birch_stevens_check(&tbl, &b.family, &b.group, &b.gauss).unwrap();
        assert!(worst < 1e-8, "q=7 residual {worst}");
    }

    #[test]
    fn main_term_swap_symmetry() {
        let cache = test_cache();
        let mut f = Newform::builtin("11a", &cache).unwrap();
        let mut f2 = Newform::builtin("11a", &cache).unwrap();
        let s = Complex64::new(0.5, 0.0);
        let a = main_term_mt(&mut f, &mut f2, s, 2, 3, 101).unwrap();
        let b = main_term_mt(&mut f, &mut f2, s, 3, 2, 101).unwrap();
        assert!((a - b.conj()).norm() < 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn main_term_degenerates_for_opposite_root_numbers() {
        // ρ = ρ′ = 1 and ε(f)ε(g) = −1: the two n-sums cancel exactly
        let cache = test_cache();
        let mut fa = Newform::builtin("37a", &cache).unwrap();
        let mut fb = Newform::builtin("37b", &cache).unwrap();
        let mt = main_term_mt(&mut fa, &mut fb, Complex64::new(0.5, 0.0), 1, 1, 101).unwrap();
        assert!(mt.norm() < 1e-12, "MT(37a,37b;1,1) = {mt}");
    }
}
