//! On-disk cache: coefficient tables, sum-table dumps, L-value family dumps,
//! modular symbol tables.  Layout:
//!
//! ```text
//! <root>/coeffs/<label>.csv           header n,a_n
//! <root>/coeffs/<label>.lambda.csv    header n,lambda   (deep float extension)
//! <root>/sums/<q>_k<k>.csv            header m,re,im
//! <root>/lvalues/<label>_q<q>_s<re>_<im>.csv   header j,re,im,theta,parity
//! <root>/modsym/<label>_q<q>.csv      header a,re,im
//! ```
//!
//! Writes go through a temp file and rename, so concurrent test binaries can
//! share one cache root. The root comes from `TWISTLAB_CACHE` unless given
//! explicitly.

use crate::error::Result;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct CacheDir {
    root: PathBuf,
}

impl CacheDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CacheDir { root: root.into() }
    }

    /// `TWISTLAB_CACHE` if set, else `./cache`.
    pub fn from_env() -> Self {
        match std::env::var_os("TWISTLAB_CACHE") {
            Some(p) => CacheDir::new(p),
            None => CacheDir::new("cache"),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn coeff_path(&self, label: &str) -> PathBuf {
        self.root.join("coeffs").join(format!("{label}.csv"))
    }

    pub fn lambda_path(&self, label: &str) -> PathBuf {
        self.root.join("coeffs").join(format!("{label}.lambda.csv"))
    }

    pub fn sums_path(&self, q: u64, k: i32) -> PathBuf {
        self.root.join("sums").join(format!("{q}_k{k}.csv"))
    }

    pub fn lvalues_path(&self, label: &str, q: u64, s: num_complex::Complex64) -> PathBuf {
        self.root
            .join("lvalues")
            .join(format!("{label}_q{q}_s{}_{}", fmt_s(s.re), fmt_s(s.im)) + ".csv")
    }

    pub fn modsym_path(&self, label: &str, q: u64) -> PathBuf {
        self.root.join("modsym").join(format!("{label}_q{q}.csv"))
    }

    pub fn write_atomic(&self, path: &Path, contents: &str) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        fs::write(&tmp, contents)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Versioned coefficient CSV: `n,a_n` with exact decimal integers.
    pub fn write_coeffs(&self, label: &str, coeffs: &[i128]) -> Result<()> {
        let mut out = String::with_capacity(coeffs.len() * 8 + 16);
        out.push_str("n,a_n\n");
        for (i, a) in coeffs.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, a));
        }
        self.write_atomic(&self.coeff_path(label), &out)
    }

    /// Returns the 1-indexed coefficients if a cache file exists.
    pub fn read_coeffs(&self, label: &str) -> Result<Option<Vec<i128>>> {
        let path = self.coeff_path(label);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path)?;
        let mut coeffs = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 {
                continue; // header
            }
            let Some((_, a)) = line.split_once(',') else {
                continue;
            };
            match a.parse::<i128>() {
                Ok(v) => coeffs.push(v),
                Err(_) => return Ok(None), // stale/corrupt cache: regenerate
            }
        }
        Ok(Some(coeffs))
    }

    pub fn write_lambda(&self, label: &str, lam: &[f64]) -> Result<()> {
        let mut out = String::with_capacity(lam.len() * 16 + 16);
        out.push_str("n,lambda\n");
        for (i, v) in lam.iter().enumerate() {
            out.push_str(&format!("{},{:.17e}\n", i + 1, v));
        }
        self.write_atomic(&self.lambda_path(label), &out)
    }

    pub fn read_lambda(&self, label: &str) -> Result<Option<Vec<f64>>> {
        let path = self.lambda_path(label);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path)?;
        let mut lam = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 {
                continue;
            }
            let Some((_, v)) = line.split_once(',') else {
                continue;
            };
            match v.parse::<f64>() {
                Ok(x) => lam.push(x),
                Err(_) => return Ok(None),
            }
        }
        Ok(Some(lam))
    }
}

fn fmt_s(x: f64) -> String {
    // file-name safe: 0.5 -> "0.5", -0.25 -> "m0.25"
    let s = format!("{x}");
    s.replace('-', "m")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coeff_round_trip() {
        let dir = std::env::temp_dir().join(format!("twistlab-cache-test-{}", std::process::id()));
        let cache = CacheDir::new(&dir);
        let coeffs = vec![1i128, -24, 252, -1472];
        cache.write_coeffs("testform", &coeffs).unwrap();
        assert_eq!(cache.read_coeffs("testform").unwrap().unwrap(), coeffs);
        let lam = vec![1.0, -0.53, 0.25];
        cache.write_lambda("testform", &lam).unwrap();
        assert_eq!(cache.read_lambda("testform").unwrap().unwrap(), lam);
        std::fs::remove_dir_all(&dir).ok();
    }
}
