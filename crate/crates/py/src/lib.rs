//! Python bindings. Scalar queries return native values; structured
//! reports come back as JSON strings (exact rationals stay `p/q`
//! strings), so the Python side decodes them with `json.loads` and
//! never sees a float.
//!
//! Build the importable module with
//! `cargo build -p dp5-py --release --features extension-module`
//! and rename `libdp5py.so` to `dp5py.so` somewhere on `sys.path`;
//! `python/smoke_test.py` automates exactly that.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dp5_core::birational::contract;
use dp5_core::hjsing;
use dp5_core::pairs::{self, PairReport, StratumSpec};
use dp5_core::picard::{DivisorClass, SurfaceModel};
use dp5_core::reduction;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json(value: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string(value).map_err(err)
}

/// Expands r/a into the chain of self-intersection magnitudes.
#[pyfunction]
fn hj_expand(r: u64, a: u64) -> PyResult<Vec<u64>> {
    hjsing::hj_expand(r, a).map_err(err)
}

/// Contracts a chain of magnitudes back to the pair (r, a).
#[pyfunction]
fn hj_contract(chain: Vec<u64>) -> PyResult<(u64, u64)> {
    hjsing::hj_contract(&chain).map_err(err)
}

/// Classifies 1/r(1,a); returns a JSON object tagged by "result".
#[pyfunction]
fn classify(r: u64, a: u64) -> PyResult<String> {
    to_json(&hjsing::classify_class_t(r, a).map_err(err)?)
}

/// The Gorenstein index of 1/r(1,a).
#[pyfunction]
fn gorenstein_index(r: u64, a: u64) -> PyResult<u64> {
    hjsing::gorenstein_index(r, a).map_err(err)
}

/// Log canonical threshold of the cusp y^p = x^q as an exact "p/q" string.
#[pyfunction]
fn lct(p: u64, q: u64) -> PyResult<String> {
    Ok(hjsing::lct_cusp(p, q).map_err(err)?.to_string())
}

/// Builds the stable pair over one stratum key; returns the report JSON.
#[pyfunction]
fn build_pair(stratum: &str) -> PyResult<String> {
    let spec: StratumSpec = stratum.parse().map_err(err)?;
    to_json(&pairs::build_pair(&spec).map_err(err)?.report)
}

/// Builds every stratum; returns a JSON array of reports sorted by
/// stratum key.
#[pyfunction]
fn atlas() -> PyResult<String> {
    let mut reports: Vec<PairReport> =
        pairs::atlas().map_err(err)?.into_iter().map(|b| b.report).collect();
    reports.sort_by(|x, y| x.stratum.cmp(&y.stratum));
    to_json(&reports)
}

/// The available reduction scenario names.
#[pyfunction]
fn scenarios() -> Vec<String> {
    reduction::scenario_names().into_iter().map(str::to_string).collect()
}

/// Runs one reduction scenario; returns the full outcome as JSON.
#[pyfunction]
fn run_scenario(name: &str) -> PyResult<String> {
    to_json(&reduction::run_scenario(name).map_err(err)?)
}

/// A rational surface with a tracked intersection lattice: start from
/// the plane, a quadric, or a Hirzebruch surface, blow up points, and
/// read off exact intersection data. Classes are coefficient vectors
/// in the current basis (ambient generators then exceptional curves).
#[pyclass(name = "Surface")]
struct PySurface {
    inner: SurfaceModel,
}

impl PySurface {
    fn class(&self, coeffs: Vec<i64>) -> PyResult<DivisorClass> {
        if coeffs.len() != self.inner.basis.len() {
            return Err(PyValueError::new_err(format!(
                "expected {} coefficients, got {}",
                self.inner.basis.len(),
                coeffs.len()
            )));
        }
        Ok(DivisorClass(coeffs))
    }
}

#[pymethods]
impl PySurface {
    #[staticmethod]
    fn projective_plane() -> Self {
        PySurface { inner: SurfaceModel::projective_plane() }
    }

    #[staticmethod]
    fn quadric() -> Self {
        PySurface { inner: SurfaceModel::quadric() }
    }

    #[staticmethod]
    fn hirzebruch(n: u32) -> Self {
        PySurface { inner: SurfaceModel::hirzebruch(n) }
    }

    /// The current basis labels.
    fn basis(&self) -> Vec<String> {
        self.inner.basis.clone()
    }

    /// Starts tracking a curve class under `name`.
    fn track(&mut self, name: &str, coeffs: Vec<i64>) -> PyResult<()> {
        let class = self.class(coeffs)?;
        self.inner.track(name, class).map_err(err)
    }

    /// Blows up a point; `centers` maps tracked names to multiplicities.
    fn blow_up(&mut self, label: &str, centers: BTreeMap<String, i64>) -> PyResult<()> {
        self.inner.blow_up(label, &centers).map_err(err)
    }

    /// The coefficients of a tracked class in the current basis.
    fn tracked(&self, name: &str) -> PyResult<Vec<i64>> {
        Ok(self.inner.tracked_class(name).map_err(err)?.0.clone())
    }

    /// The canonical class in the current basis.
    fn canonical(&self) -> Vec<i64> {
        self.inner.canonical().0.clone()
    }

    /// Intersection number of two coefficient vectors.
    fn intersect(&self, a: Vec<i64>, b: Vec<i64>) -> PyResult<i64> {
        Ok(self.inner.intersect(&self.class(a)?, &self.class(b)?))
    }

    fn k_squared(&self) -> i64 {
        self.inner.k_squared()
    }

    fn det_gram(&self) -> i64 {
        self.inner.det_gram()
    }

    /// Arithmetic genus by adjunction, as an exact rational string.
    fn adjunction_genus(&self, coeffs: Vec<i64>) -> PyResult<String> {
        Ok(self.inner.adjunction_genus(&self.class(coeffs)?).to_string())
    }

    /// Contracts chains of tracked curves (a list of lists of names) and
    /// returns the contraction report as JSON: the quotient points, the
    /// canonical degree and rank downstairs, per-chain discrepancies,
    /// and the canonical pullback.
    fn contract(&self, plan: Vec<Vec<String>>) -> PyResult<String> {
        let cs = contract(&self.inner, &plan).map_err(err)?;
        to_json(&serde_json::json!({
            "k_squared_down": cs.k_squared_down,
            "rank_down": cs.rank_down,
            "singularities": cs.singularities(),
            "components": cs.components,
            "pullback_canonical": cs.pullback_canonical(),
        }))
    }

    /// The full surface state (base, gram matrix, tracked classes) as JSON.
    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface(rank={}, K^2={}, tracked=[{}])",
            self.inner.basis.len(),
            self.inner.k_squared(),
            self.inner.tracked.keys().cloned().collect::<Vec<_>>().join(", ")
        )
    }
}

#[pymodule]
fn dp5py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hj_expand, m)?)?;
    m.add_function(wrap_pyfunction!(hj_contract, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(gorenstein_index, m)?)?;
    m.add_function(wrap_pyfunction!(lct, m)?)?;
    m.add_function(wrap_pyfunction!(build_pair, m)?)?;
    m.add_function(wrap_pyfunction!(atlas, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_class::<PySurface>()?;
    Ok(())
}
