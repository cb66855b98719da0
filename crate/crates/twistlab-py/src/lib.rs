//! Python bindings: the main types and operations of the laboratory.
//!
//! Build with `cargo build -p twistlab-py --release`, then rename
//! `libtwistlab_py.so` to `twistlab_py.so` somewhere on `PYTHONPATH`
//! (see `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;
use std::sync::Mutex;

use twistlab::cache::CacheDir;
use twistlab::{afe, analysis, chargroup, hecke, modsym, moments, verify};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(format!("{e}"))
}

fn cache_from(opt: Option<String>) -> CacheDir {
    match opt {
        Some(d) => CacheDir::new(d),
        None => CacheDir::from_env(),
    }
}

/// A built-in holomorphic newform with its coefficient cache.
#[pyclass(name = "Newform")]
struct PyNewform {
    inner: Mutex<hecke::Newform>,
}

#[pymethods]
impl PyNewform {
    #[new]
    #[pyo3(signature = (label, cache_dir=None))]
    fn new(label: &str, cache_dir: Option<String>) -> PyResult<Self> {
        let cache = cache_from(cache_dir);
        let form = hecke::Newform::builtin(label, &cache).map_err(err)?;
        Ok(PyNewform {
            inner: Mutex::new(form),
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.lock().unwrap().label.clone()
    }

    #[getter]
    fn weight(&self) -> u32 {
        self.inner.lock().unwrap().weight
    }

    #[getter]
    fn level(&self) -> u64 {
        self.inner.lock().unwrap().level
    }

    /// Normalized Hecke eigenvalue λ(n) = a(n)/n^{(k−1)/2}.
    fn lam(&self, n: u64) -> PyResult<f64> {
        self.inner.lock().unwrap().lambda(n).map_err(err)
    }

    /// Exact integer coefficient a(n) as a decimal string.
    fn coeff(&self, n: u64) -> PyResult<String> {
        let mut f = self.inner.lock().unwrap();
        f.ensure_coeffs(n).map_err(err)?;
        Ok(f.coeff(n).map_err(err)?.to_string())
    }

    fn root_number(&self) -> PyResult<i8> {
        self.inner.lock().unwrap().root_number().map_err(err)
    }

    /// (L*(Sym²f,1), error estimate)
    fn sym2_value(&self) -> PyResult<(f64, f64)> {
        let v = self.inner.lock().unwrap().sym2_value().map_err(err)?;
        Ok((v.value, v.error_estimate))
    }

    fn pnt_check(&self, x: u64) -> PyResult<f64> {
        self.inner.lock().unwrap().pnt_check(x).map_err(err)
    }

    fn __repr__(&self) -> String {
        let f = self.inner.lock().unwrap();
        format!("Newform({}, weight {}, level {})", f.label, f.weight, f.level)
    }
}

/// Character group mod a prime q with its exponential sum tables.
#[pyclass(name = "CharacterGroup")]
struct PyCharacterGroup {
    inner: chargroup::CharacterGroup,
}

#[pymethods]
impl PyCharacterGroup {
    #[new]
    fn new(q: u64) -> PyResult<Self> {
        Ok(PyCharacterGroup {
            inner: chargroup::CharacterGroup::build(q).map_err(err)?,
        })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn generator(&self) -> u64 {
        self.inner.generator()
    }

    fn dlog(&self, a: u64) -> u32 {
        self.inner.dlog(a)
    }

    fn chi(&self, j: usize, a: u64) -> Complex64 {
        self.inner.chi(j, a)
    }

    /// Normalized Gauss sums ε_{χ_j} for all j.
    fn gauss(&self) -> Vec<Complex64> {
        self.inner.gauss_all()
    }

    /// Kl_k(m;q) for m = 1..q−1.
    fn kloosterman(&self, k: i32) -> PyResult<Vec<Complex64>> {
        let gauss = self.inner.gauss_all();
        let t = self.inner.kloosterman_table(&gauss, k).map_err(err)?;
        Ok(t[1..].to_vec())
    }

    /// Evans sums t̃_e(χ_j) for all j.
    fn evans(&self) -> Vec<Complex64> {
        self.inner.evans_all()
    }

    /// Kolmogorov–Smirnov distance of the Evans values to the semicircle.
    fn evans_ks_distance(&self) -> f64 {
        analysis::evans_ks_distance(&self.inner.evans_all())
    }
}

/// All central values L(f⊗χ, s) for one (form, q, s).
#[pyclass(name = "CentralValueFamily")]
struct PyFamily {
    q: u64,
    label: String,
    values: Vec<Complex64>,
    angles: Vec<f64>,
}

#[pymethods]
impl PyFamily {
    #[getter]
    fn q(&self) -> u64 {
        self.q
    }

    #[getter]
    fn label(&self) -> String {
        self.label.clone()
    }

    /// L-values for j = 1..q−2 in character order.
    fn values(&self) -> Vec<Complex64> {
        self.values[1..].to_vec()
    }

    /// Angles θ_j ∈ [0, π).
    fn angles(&self) -> Vec<f64> {
        self.angles[1..].to_vec()
    }
}

/// Batched central values at s (default 1/2) over all characters mod q.
#[pyfunction]
#[pyo3(signature = (form, q, s_re=0.5, s_im=0.0))]
fn central_values(form: &PyNewform, q: u64, s_re: f64, s_im: f64) -> PyResult<PyFamily> {
    let mut f = form.inner.lock().unwrap();
    let ctx = afe::AfeContext::new(&mut f, Complex64::new(s_re, s_im)).map_err(err)?;
    let group = chargroup::CharacterGroup::build(q).map_err(err)?;
    let gauss = group.gauss_all();
    let fam = afe::central_values_batch(&ctx, &mut f, &group, &gauss).map_err(err)?;
    Ok(PyFamily {
        q,
        label: fam.label.clone(),
        values: fam.values,
        angles: fam.angles,
    })
}

/// Exact eta-product q-expansion coefficients a(1..n) as decimal strings.
#[pyfunction]
fn eta_expansion(exponents: BTreeMap<u64, i32>, n_max: u64) -> PyResult<Vec<String>> {
    let v = hecke::eta_expansion(&exponents, n_max).map_err(err)?;
    Ok(v.iter().map(|a| a.to_string()).collect())
}

/// Modular symbol table {⟨a/q⟩_f}: (values, mean, variance).
#[pyfunction]
fn modular_symbols(label: &str, q: u64) -> PyResult<(Vec<Complex64>, Complex64, f64)> {
    let (space, eig) = modsym::eigen_symbol_for_label(label).map_err(err)?;
    let tbl = modsym::table(&space, &eig, q).map_err(err)?;
    Ok((tbl.values.clone(), tbl.mean, tbl.variance))
}

/// Twisted first moment: returns (computed, predicted).
#[pyfunction]
#[pyo3(signature = (form, q, ell=1, k=0))]
fn first_moment(form: &PyNewform, q: u64, ell: u64, k: i32) -> PyResult<(Complex64, Complex64)> {
    let mut f = form.inner.lock().unwrap();
    let b = moments::family_at_half(&mut f, q).map_err(err)?;
    let rep = moments::first_moment(&b.family, &b.group, &b.gauss, &mut f, ell, k).map_err(err)?;
    Ok((rep.computed(), rep.predicted().unwrap_or_default()))
}

/// Twisted second moment Q(f,f,1/2;ℓ,ℓ′).
#[pyfunction]
#[pyo3(signature = (form, q, ell=1, ell2=1))]
fn second_moment(form: &PyNewform, q: u64, ell: u64, ell2: u64) -> PyResult<Complex64> {
    let mut f = form.inner.lock().unwrap();
    let b = moments::family_at_half(&mut f, q).map_err(err)?;
    let rep = moments::second_moment(&b.family, &b.family, &b.group, ell, ell2).map_err(err)?;
    Ok(rep.computed())
}

/// Max Birch–Stevens residual over primitive characters mod q.
#[pyfunction]
#[pyo3(signature = (label, q, cache_dir=None))]
fn birch_stevens_residual(label: &str, q: u64, cache_dir: Option<String>) -> PyResult<f64> {
    let cache = cache_from(cache_dir);
    let mut form = hecke::Newform::builtin(label, &cache).map_err(err)?;
    let (space, eig) = modsym::eigen_symbol_for_label(label).map_err(err)?;
    if q == 3 {
        return moments::birch_stevens_q3(&space, &eig, &mut form).map_err(err);
    }
    let b = moments::family_at_half(&mut form, q).map_err(err)?;
    let tbl = modsym::table(&space, &eig, q).map_err(err)?;
    moments::birch_stevens_check(&tbl, &b.family, &b.group, &b.gauss).map_err(err)
}

/// Both sides of the Voronoi identity and their difference.
#[pyfunction]
#[pyo3(signature = (label, a, q, n_scale, cache_dir=None))]
fn voronoi_check(
    label: &str,
    a: u64,
    q: u64,
    n_scale: f64,
    cache_dir: Option<String>,
) -> PyResult<(f64, f64, f64)> {
    let cache = cache_from(cache_dir);
    let mut form = hecke::Newform::builtin(label, &cache).map_err(err)?;
    afe::voronoi_check(&mut form, a, q, n_scale, 1.0).map_err(err)
}

/// Run acceptance criteria by id ("A1".."A15"); returns (id, pass, detail).
#[pyfunction]
#[pyo3(signature = (ids, cache_dir=None))]
fn run_acceptance(ids: Vec<String>, cache_dir: Option<String>) -> Vec<(String, bool, String)> {
    let cache = cache_from(cache_dir);
    let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
    verify::run(&refs, &cache)
        .into_iter()
        .map(|r| (r.id, r.pass, r.detail))
        .collect()
}

#[pymodule]
fn twistlab_py(m: &Bound<PyModule>) -> PyResult<()> {
    m.add_class::<PyNewform>()?;
    m.add_class::<PyCharacterGroup>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(central_values, m)?)?;
    m.add_function(wrap_pyfunction!(eta_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(modular_symbols, m)?)?;
    m.add_function(wrap_pyfunction!(first_moment, m)?)?;
    m.add_function(wrap_pyfunction!(second_moment, m)?)?;
    m.add_function(wrap_pyfunction!(birch_stevens_residual, m)?)?;
    m.add_function(wrap_pyfunction!(voronoi_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
