//! Command-line front end: flat key=value config files overridden by flags,
//! deterministic outputs, exit codes {0 ok, 1 failed assertion, 2 usage}.

use crate::afe;
use crate::analysis;
use crate::arith;
use crate::cache::CacheDir;
use crate::chargroup::CharacterGroup;
use crate::error::{Error, Result};
use crate::hecke::Newform;
use crate::modsym;
use crate::moments;
use crate::report::Emitter;
use crate::verify;
use num_complex::Complex64;
use std::collections::BTreeMap;

pub const COMMANDS: [&str; 15] = [
    "eigenvalues",
    "gauss",
    "kloosterman",
    "evans",
    "lvalues",
    "voronoi-check",
    "modsym",
    "birch-stevens",
    "moments",
    "variance",
    "mollify",
    "resonator",
    "rank",
    "trace-correlation",
    "verify-all",
];

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: String,
    pub form: String,
    pub form2: String,
    pub q: u64,
    pub q_grid: Vec<u64>,
    pub s: Complex64,
    pub n_depth: u64,
    pub k: i32,
    pub ell: u64,
    pub ell2: u64,
    pub u: u64,
    pub v: u64,
    pub a: u64,
    pub n_scale: f64,
    pub lambda_exp: f64,
    pub l_param: f64,
    pub interval: (f64, f64),
    pub xi_ratio: f64,
    pub threshold: Option<f64>,
    pub kind: String,
    pub cache_dir: Option<String>,
    pub out: Option<String>,
    pub format: String,
    pub seed: u64,
    pub jobs: usize,
    pub assert_mode: bool,
    pub quick: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            form: "11a".into(),
            form2: String::new(),
            q: 101,
            q_grid: vec![101, 211, 499, 1009, 2003, 3001],
            s: Complex64::new(0.5, 0.0),
            n_depth: 100,
            k: 0,
            ell: 1,
            ell2: 1,
            u: 1,
            v: 1,
            a: 1,
            n_scale: 50.0,
            lambda_exp: 0.1,
            l_param: 8.0,
            interval: (0.0, std::f64::consts::PI),
            xi_ratio: 3.0,
            threshold: None,
            kind: "first".into(),
            cache_dir: None,
            out: None,
            format: "csv".into(),
            seed: 1,
            jobs: 0,
            assert_mode: false,
            quick: false,
        }
    }
}

impl RunConfig {
    fn echo(&self) -> String {
        format!(
            "command={} form={} form2={} q={} q_grid={} s={},{} k={} ell={} ell2={} u={} v={} a={} n_scale={} lambda={} l_param={} interval={},{} xi_ratio={} kind={} format={} seed={}",
            self.command,
            self.form,
            self.form2,
            self.q,
            self.q_grid.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(";"),
            self.s.re,
            self.s.im,
            self.k,
            self.ell,
            self.ell2,
            self.u,
            self.v,
            self.a,
            self.n_scale,
            self.lambda_exp,
            self.l_param,
            self.interval.0,
            self.interval.1,
            self.xi_ratio,
            self.kind,
            self.format,
            self.seed,
        )
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |k: &str, v: &str| Error::Usage(format!("bad value for --{k}: {v}"));
        match key {
            "form" => self.form = value.into(),
            "form2" => self.form2 = value.into(),
            "q" => self.q = value.parse().map_err(|_| bad(key, value))?,
            "q-grid" | "q_grid" => {
                self.q_grid = value
                    .split([',', ';'])
                    .map(|t| t.trim().parse().map_err(|_| bad(key, value)))
                    .collect::<Result<_>>()?;
            }
            "s" => {
                let mut it = value.split(',');
                let re: f64 = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad(key, value))?;
                let im: f64 = it.next().map(|t| t.parse().unwrap_or(0.0)).unwrap_or(0.0);
                self.s = Complex64::new(re, im);
            }
            "n" | "n-depth" => self.n_depth = value.parse().map_err(|_| bad(key, value))?,
            "k" => self.k = value.parse().map_err(|_| bad(key, value))?,
            "ell" => self.ell = value.parse().map_err(|_| bad(key, value))?,
            "ell2" => self.ell2 = value.parse().map_err(|_| bad(key, value))?,
            "u" => self.u = value.parse().map_err(|_| bad(key, value))?,
            "v" => self.v = value.parse().map_err(|_| bad(key, value))?,
            "a" => self.a = value.parse().map_err(|_| bad(key, value))?,
            "n-scale" => self.n_scale = value.parse().map_err(|_| bad(key, value))?,
            "lambda" => self.lambda_exp = value.parse().map_err(|_| bad(key, value))?,
            "l-param" => self.l_param = value.parse().map_err(|_| bad(key, value))?,
            "interval" => {
                let mut it = value.split(',');
                let lo = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad(key, value))?;
                let hi = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad(key, value))?;
                self.interval = (lo, hi);
            }
            "xi-ratio" => self.xi_ratio = value.parse().map_err(|_| bad(key, value))?,
            "threshold" => self.threshold = Some(value.parse().map_err(|_| bad(key, value))?),
            "kind" => self.kind = value.into(),
            "cache" => self.cache_dir = Some(value.into()),
            "out" => self.out = Some(value.into()),
            "format" => {
                if value != "csv" && value != "json" {
                    return Err(bad(key, value));
                }
                self.format = value.into();
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "jobs" => self.jobs = value.parse().map_err(|_| bad(key, value))?,
            other => return Err(Error::Usage(format!("unknown flag --{other}"))),
        }
        Ok(())
    }
}

fn parse_args(args: &[String]) -> Result<RunConfig> {
    if args.is_empty() {
        return Err(Error::Usage(format!(
            "usage: twistlab <command> [--flag value]...; commands: {}",
            COMMANDS.join(", ")
        )));
    }
    let mut cfg = RunConfig {
        command: args[0].clone(),
        ..RunConfig::default()
    };
    if !COMMANDS.contains(&cfg.command.as_str()) {
        return Err(Error::Usage(format!(
            "unknown command {}; commands: {}",
            cfg.command,
            COMMANDS.join(", ")
        )));
    }
    // first pass: --config file (flat key=value lines), then flags override
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut i = 1;
    while i < args.len() {
        let arg = &args[i];
        if arg == "--assert" {
            cfg.assert_mode = true;
            i += 1;
            continue;
        }
        if arg == "--quick" {
            cfg.quick = true;
            i += 1;
            continue;
        }
        let Some(stripped) = arg.strip_prefix("--") else {
            return Err(Error::Usage(format!("unexpected argument {arg}")));
        };
        let (key, value) = if let Some((k, v)) = stripped.split_once('=') {
            (k.to_string(), v.to_string())
        } else {
            i += 1;
            let v = args
                .get(i)
                .ok_or_else(|| Error::Usage(format!("--{stripped} needs a value")))?;
            (stripped.to_string(), v.clone())
        };
        if key == "config" {
            let text = std::fs::read_to_string(&value)
                .map_err(|e| Error::Usage(format!("cannot read config {value}: {e}")))?;
            let mut file_pairs = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(Error::Usage(format!("bad config line: {line}")));
                };
                file_pairs.push((k.trim().to_string(), v.trim().to_string()));
            }
            // config file settings apply before any flags
            file_pairs.extend(pairs);
            pairs = file_pairs;
        } else {
            pairs.push((key, value));
        }
        i += 1;
    }
    for (k, v) in pairs {
        cfg.apply(&k, &v)?;
    }
    Ok(cfg)
}

fn require_prime(q: u64) -> Result<()> {
    if !arith::is_prime(q) {
        return Err(Error::Usage(format!("q not prime: {q}")));
    }
    Ok(())
}

fn complex_rows<'a>(
    it: impl Iterator<Item = (String, Complex64)> + 'a,
) -> (Vec<String>, serde_json::Value) {
    let mut rows = Vec::new();
    let mut recs = Vec::new();
    for (k, v) in it {
        rows.push(format!("{k},{:.15e},{:.15e}", v.re, v.im));
        recs.push(serde_json::json!({"key": k, "re": v.re, "im": v.im}));
    }
    (rows, serde_json::Value::Array(recs))
}

/// Execute a parsed command; returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    match run_inner(args) {
        Ok(code) => code,
        Err(Error::Usage(msg)) => {
            eprintln!("{msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run_inner(args: Vec<String>) -> Result<i32> {
    let cfg = parse_args(&args)?;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .ok();
    }
    let cache = match &cfg.cache_dir {
        Some(d) => CacheDir::new(d),
        None => CacheDir::from_env(),
    };
    let emitter = Emitter {
        config_echo: cfg.echo(),
        format: cfg.format.clone(),
        out: cfg.out.clone(),
    };
    match cfg.command.as_str() {
        "eigenvalues" => {
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            form.ensure_coeffs(cfg.n_depth)?;
            cache.write_coeffs(&form.label, form.coeffs())?;
            let rows: Vec<String> = (1..=cfg.n_depth)
                .map(|n| format!("{n},{}", form.coeff(n).unwrap()))
                .collect();
            let recs: Vec<serde_json::Value> = (1..=cfg.n_depth)
                .map(|n| serde_json::json!({"n": n, "a_n": form.coeff(n).unwrap().to_string()}))
                .collect();
            emitter.emit("n,a_n", &rows, serde_json::Value::Array(recs))?;
            Ok(0)
        }
        "gauss" => {
            require_prime(cfg.q)?;
            let group = CharacterGroup::build(cfg.q)?;
            let gauss = group.gauss_all();
            let (rows, recs) = complex_rows(
                gauss
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (j.to_string(), *v)),
            );
            emitter.emit("j,re,im", &rows, recs)?;
            Ok(0)
        }
        "kloosterman" => {
            require_prime(cfg.q)?;
            let group = CharacterGroup::build(cfg.q)?;
            let gauss = group.gauss_all();
            let tbl = group.kloosterman_table(&gauss, cfg.k)?;
            let mut text = String::from("m,re,im\n");
            for (m, v) in tbl.iter().enumerate().skip(1).take(cfg.q as usize - 1) {
                text.push_str(&format!("{m},{:.15e},{:.15e}\n", v.re, v.im));
            }
            cache.write_atomic(&cache.sums_path(cfg.q, cfg.k), &text)?;
            let (rows, recs) = complex_rows(
                tbl.iter()
                    .enumerate()
                    .skip(1)
                    .take(cfg.q as usize - 1)
                    .map(|(m, v)| (m.to_string(), *v)),
            );
            emitter.emit("m,re,im", &rows, recs)?;
            Ok(0)
        }
        "evans" => {
            require_prime(cfg.q)?;
            let group = CharacterGroup::build(cfg.q)?;
            let evans = group.evans_all();
            let ks = analysis::evans_ks_distance(&evans);
            eprintln!("KS distance to semicircle: {ks:.5}");
            let (rows, recs) = complex_rows(
                evans
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (j.to_string(), *v)),
            );
            emitter.emit("j,re,im", &rows, recs)?;
            Ok(0)
        }
        "lvalues" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            if form.level % cfg.q == 0 {
                return Err(Error::Usage(format!("q={} divides the level", cfg.q)));
            }
            let ctx = afe::AfeContext::new(&mut form, cfg.s)?;
            let group = CharacterGroup::build(cfg.q)?;
            let gauss = group.gauss_all();
            let fam = afe::central_values_batch(&ctx, &mut form, &group, &gauss)?;
            cache.write_atomic(&cache.lvalues_path(&form.label, cfg.q, cfg.s), &fam.csv())?;
            let rows: Vec<String> = fam
                .nontrivial()
                .map(|(j, v)| {
                    format!(
                        "{j},{:.15e},{:.15e},{:.15e},{}",
                        v.re, v.im, fam.angles[j], fam.parity[j]
                    )
                })
                .collect();
            let recs: Vec<serde_json::Value> = fam
                .nontrivial()
                .map(|(j, v)| {
                    serde_json::json!({"j": j, "re": v.re, "im": v.im,
                        "theta": fam.angles[j], "parity": fam.parity[j]})
                })
                .collect();
            emitter.emit(
                "j,re,im,theta,parity",
                &rows,
                serde_json::Value::Array(recs),
            )?;
            Ok(0)
        }
        "voronoi-check" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let (lhs, rhs, diff) = afe::voronoi_check(&mut form, cfg.a, cfg.q, cfg.n_scale, 1.0)?;
            let rows = vec![format!("{:.15e},{:.15e},{:.3e}", lhs, rhs, diff)];
            emitter.emit(
                "lhs,rhs,abs_diff",
                &rows,
                serde_json::json!([{"lhs": lhs, "rhs": rhs, "abs_diff": diff}]),
            )?;
            Ok(0)
        }
        "modsym" => {
            require_prime(cfg.q)?;
            let (space, eig) = modsym::eigen_symbol_for_label(&cfg.form)?;
            let tbl = modsym::table(&space, &eig, cfg.q)?;
            cache.write_atomic(&cache.modsym_path(&cfg.form, cfg.q), &tbl.csv())?;
            let rows: Vec<String> = tbl
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{},{:.15e},{:.15e}", i + 1, v.re, v.im))
                .collect();
            let recs: Vec<serde_json::Value> = tbl
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| serde_json::json!({"a": i + 1, "re": v.re, "im": v.im}))
                .collect();
            emitter.emit("a,re,im", &rows, serde_json::Value::Array(recs))?;
            eprintln!(
                "mean {:.6e}{:+.6e}i  variance {:.6e}",
                tbl.mean.re, tbl.mean.im, tbl.variance
            );
            Ok(0)
        }
        "birch-stevens" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let (space, eig) = modsym::eigen_symbol_for_label(&cfg.form)?;
            let resid = if cfg.q == 3 {
                moments::birch_stevens_q3(&space, &eig, &mut form)?
            } else {
                let b = moments::family_at_half(&mut form, cfg.q)?;
                let tbl = modsym::table(&space, &eig, cfg.q)?;
                moments::birch_stevens_check(&tbl, &b.family, &b.group, &b.gauss)?
            };
            let rows = vec![format!("{},{:.3e}", cfg.q, resid)];
            emitter.emit(
                "q,max_residual",
                &rows,
                serde_json::json!([{"q": cfg.q, "max_residual": resid}]),
            )?;
            Ok(0)
        }
        "moments" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let rep = match cfg.kind.as_str() {
                "first" => {
                    let b = moments::family_at_half(&mut form, cfg.q)?;
                    moments::first_moment(&b.family, &b.group, &b.gauss, &mut form, cfg.ell, cfg.k)?
                }
                "second" => {
                    let label2 = if cfg.form2.is_empty() {
                        cfg.form.clone()
                    } else {
                        cfg.form2.clone()
                    };
                    let b = moments::family_at_half(&mut form, cfg.q)?;
                    let fam2 = if label2 == cfg.form {
                        None
                    } else {
                        let mut g = Newform::builtin(&label2, &cache)?;
                        Some(moments::family_at_half(&mut g, cfg.q)?.family)
                    };
                    moments::second_moment(
                        &b.family,
                        fam2.as_ref().unwrap_or(&b.family),
                        &b.group,
                        cfg.ell,
                        cfg.ell2,
                    )?
                }
                "mean" => {
                    let (space, eig) = modsym::eigen_symbol_for_label(&cfg.form)?;
                    moments::mean_identity_check(&space, &eig, &mut form, cfg.q)?
                }
                "correlation" => {
                    let (space, eig) = modsym::eigen_symbol_for_label(&cfg.form)?;
                    let b = moments::family_at_half(&mut form, cfg.q)?;
                    let tbl = modsym::table(&space, &eig, cfg.q)?;
                    moments::correlation_identity_check(
                        &tbl, &tbl, &b.family, &b.family, &b.group, cfg.u, cfg.v,
                    )?
                }
                other => return Err(Error::Usage(format!("unknown moments kind {other}"))),
            };
            emitter.emit(
                "kind,q,params,computed_re,computed_im,predicted_re,predicted_im,rel_err",
                &[rep.csv_row()],
                serde_json::to_value(vec![&rep]).unwrap(),
            )?;
            Ok(0)
        }
        "variance" => {
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let (space, eig) = modsym::eigen_symbol_for_label(&cfg.form)?;
            for &q in &cfg.q_grid {
                require_prime(q)?;
            }
            let fit = moments::variance_asymptotic(&space, &eig, &mut form, &cfg.q_grid)?;
            let rows: Vec<String> = fit
                .qs
                .iter()
                .zip(&fit.variances)
                .map(|(q, v)| format!("{q},{v:.12e}"))
                .collect();
            emitter.emit("q,variance", &rows, serde_json::to_value(&fit).unwrap())?;
            eprintln!(
                "slope {:.5} predicted {:.5} rel_dev {:.2}% intercept {:.4}",
                fit.slope,
                fit.predicted_slope,
                100.0 * fit.rel_dev,
                fit.intercept
            );
            Ok(0)
        }
        "mollify" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let b = moments::family_at_half(&mut form, cfg.q)?;
            let spec = analysis::mollifier_coeffs(&mut form, cfg.lambda_exp, cfg.q, &[0.0, 1.0])?;
            let (first, second) =
                analysis::mollified_moments(&b.family, &b.group, &spec, &mut form)?;
            let report = analysis::nonvanishing_report(
                &b.family,
                &b.group,
                &b.gauss,
                &spec,
                &mut form,
                cfg.interval,
                cfg.threshold,
            )?;
            emitter.emit(
                "kind,q,params,computed_re,computed_im,predicted_re,predicted_im,rel_err",
                &[first.csv_row(), second.csv_row()],
                serde_json::json!({
                    "first": first, "second": second, "nonvanishing": report,
                }),
            )?;
            Ok(0)
        }
        "resonator" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let b = moments::family_at_half(&mut form, cfg.q)?;
            let spec = analysis::resonator_spec(
                &mut form,
                analysis::ResonatorVariant::Extreme {
                    l_param: cfg.l_param,
                },
                cfg.q,
            )?;
            if spec.degraded_to_trivial {
                eprintln!("warning: resonator window empty, running the trivial resonator");
            }
            let rep = analysis::resonator_run(&b.family, &b.group, &spec)?;
            let rows = vec![format!(
                "{},{:.9e},{:.9e},{:.9e},{:.9e},{},{:.6e},{:.6e}",
                rep.q,
                rep.q1,
                rep.q1_predicted,
                rep.q2,
                rep.q2_predicted,
                rep.argmax_j,
                rep.argmax_l_abs,
                rep.median_l_abs
            )];
            emitter.emit(
                "q,q1,q1_predicted,q2,q2_predicted,argmax_j,argmax_l_abs,median_l_abs",
                &rows,
                serde_json::to_value(&rep).unwrap(),
            )?;
            Ok(0)
        }
        "rank" => {
            require_prime(cfg.q)?;
            let mut form = Newform::builtin(&cfg.form, &cache)?;
            let b = moments::family_at_half(&mut form, cfg.q)?;
            let xi = (cfg.q as f64).ln() / cfg.xi_ratio;
            let rep = analysis::rank_bound(&b.family, &b.group, &mut form, xi)?;
            let rows: Vec<String> = rep
                .bounds
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, v)| format!("{j},{v:.9e}"))
                .collect();
            emitter.emit("j,rank_bound", &rows, serde_json::to_value(&rep).unwrap())?;
            eprintln!("mean {:.4}  exp-moment {:.4}", rep.mean, rep.exp_moment);
            Ok(0)
        }
        "trace-correlation" => {
            let (space, eig) = modsym::eigen_symbol_for_label(&cfg.form)?;
            let mut rows = Vec::new();
            let mut recs = Vec::new();
            for &q in &cfg.q_grid {
                require_prime(q)?;
                let tbl = modsym::table(&space, &eig, q)?;
                let c = analysis::modsym_trace_correlation(&tbl, false);
                rows.push(format!("{q},{:.12e}", c.norm()));
                recs.push(serde_json::json!({"q": q, "value": c.norm()}));
            }
            emitter.emit("q,value", &rows, serde_json::Value::Array(recs))?;
            Ok(0)
        }
        "verify-all" => {
            let results = verify::run_all(cfg.quick, &cache);
            let mut all_pass = true;
            let mut rows = Vec::new();
            let mut recs = Vec::new();
            for r in &results {
                println!("{}", r.line());
                all_pass &= r.pass;
                rows.push(format!(
                    "{},{},{},{}",
                    r.id,
                    if r.pass { "pass" } else { "fail" },
                    r.millis,
                    r.detail.replace(',', ";")
                ));
                recs.push(serde_json::json!({
                    "id": r.id, "pass": r.pass, "millis": r.millis, "detail": r.detail,
                }));
            }
            if cfg.out.is_some() {
                emitter.emit("id,pass,millis,detail", &rows, serde_json::Value::Array(recs))?;
            }
            println!(
                "{}",
                if all_pass {
                    "all criteria passed"
                } else {
                    "SOME CRITERIA FAILED"
                }
            );
            if cfg.assert_mode && !all_pass {
                return Ok(1);
            }
            Ok(0)
        }
        _ => unreachable!("validated above"),
    }
}

/// Flat key=value config text for the current defaults (documentation aid).
pub fn default_config_text() -> String {
    let cfg = RunConfig::default();
    let mut map = BTreeMap::new();
    map.insert("form", cfg.form.clone());
    map.insert("q", cfg.q.to_string());
    map.insert("format", cfg.format.clone());
    map.insert("lambda", cfg.lambda_exp.to_string());
    map.insert("seed", cfg.seed.to_string());
    map.iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect::<String>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_defaults() {
        let cfg = parse_args(&[
            "lvalues".into(),
            "--form".into(),
            "11a".into(),
            "--q".into(),
            "101".into(),
            "--s".into(),
            "0.5".into(),
        ])
        .unwrap();
        assert_eq!(cfg.command, "lvalues");
        assert_eq!(cfg.q, 101);
        assert_eq!(cfg.s, Complex64::new(0.5, 0.0));
        assert!(parse_args(&["nonsense".into()]).is_err());
        assert!(parse_args(&["moments".into(), "--zzz".into(), "1".into()]).is_err());
    }

    #[test]
    fn config_file_overridden_by_flags() {
        let dir = std::env::temp_dir().join(format!("twistlab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "q=7\nform=delta\n").unwrap();
        let cfg = parse_args(&[
            "gauss".into(),
            "--config".into(),
            path.to_str().unwrap().into(),
            "--q".into(),
            "13".into(),
        ])
        .unwrap();
        assert_eq!(cfg.q, 13, "flag wins");
        assert_eq!(cfg.form, "delta", "config file applies");
        std::fs::remove_dir_all(&dir).ok();
    }
}
