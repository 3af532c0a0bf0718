//! Python bindings for the clusterbus core crate.

use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use clusterbus::cli::{run_oracle, Common, Format, OracleArgs, OracleLevel};
use clusterbus::converse::{converse_mc, pr_appropriate_bernoulli, pr_appropriate_exact, ConverseParams};
use clusterbus::geometry::{self, LatticeParams, Site};
use clusterbus::protocols::run_trials;
use clusterbus::resilience::closed_form_bounds;
use clusterbus::{Context, Decoder, NoiseModel, PauliError};

fn err(e: clusterbus::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Coord = (i32, i32, i32);

fn coords(sites: impl IntoIterator<Item = Site>) -> Vec<Coord> {
    sites.into_iter().map(|s| (s.u1, s.u2, s.u3)).collect()
}

fn sites(cs: &[Coord]) -> BTreeSet<Site> {
    cs.iter().map(|&(a, b, c)| Site::new(a, b, c)).collect()
}

#[pyfunction]
fn surface_qubits(d: usize) -> PyResult<Vec<Coord>> {
    let params = LatticeParams::surface(d).map_err(err)?;
    Ok(coords(geometry::surface_qubits(&params).map_err(err)?))
}

#[pyfunction]
#[pyo3(name = "cluster_qubits", signature = (d, r))]
fn cluster_qubits(d: usize, r: usize) -> PyResult<Vec<Coord>> {
    let params = LatticeParams::cluster(d, r).map_err(err)?;
    Ok(coords(geometry::cluster_qubits(&params).map_err(err)?))
}

/// A protocol instance: the surface decoder (`R` is None) or the cluster bus.
#[pyclass(frozen)]
struct Protocol {
    ctx: Context,
}

#[pymethods]
impl Protocol {
    #[staticmethod]
    fn surface(d: usize) -> PyResult<Self> {
        Ok(Protocol { ctx: Context::surface(d).map_err(err)? })
    }

    #[staticmethod]
    fn cluster(d: usize, r: usize) -> PyResult<Self> {
        Ok(Protocol { ctx: Context::cluster(d, r).map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> String {
        self.ctx.kind().to_string()
    }

    #[getter]
    fn d(&self) -> usize {
        self.ctx.params().d
    }

    #[getter(R)]
    fn r(&self) -> Option<usize> {
        self.ctx.params().r
    }

    fn qubits(&self) -> Vec<Coord> {
        coords(self.ctx.lattice.qubits.iter().copied())
    }

    fn measured_qubits(&self) -> Vec<Coord> {
        coords(self.ctx.measured_qubits())
    }

    /// Bell label `(alpha, beta)` for the Pauli error with the given X and Z supports.
    #[pyo3(signature = (x = Vec::new(), z = Vec::new()))]
    fn outcome(&self, x: Vec<Coord>, z: Vec<Coord>) -> PyResult<(u8, u8)> {
        let e = PauliError { xsupp: sites(&x), zsupp: sites(&z) };
        let o = Decoder::new(&self.ctx).outcome(&e).map_err(err)?;
        Ok((o.alpha as u8, o.beta as u8))
    }

    /// Corrections `(c_x, c_z)` from outcomes in `measured_qubits()` order.
    fn decode(&self, outcomes: Vec<bool>) -> PyResult<(bool, bool)> {
        Decoder::new(&self.ctx).decode_from_outcomes(&outcomes).map_err(err)
    }

    /// Monte Carlo counts; `noise` uses the CLI syntax, e.g. `depolarizing:0.001`.
    #[pyo3(signature = (noise, trials, seed = 0, threads = 0))]
    fn run_trials<'py>(&self, py: Python<'py>, noise: &str, trials: u64, seed: u64, threads: usize) -> PyResult<Bound<'py, PyDict>> {
        let model: NoiseModel = noise.parse().map_err(err)?;
        let st = py.detach(|| run_trials(&self.ctx, &model, trials, seed, threads)).map_err(err)?;
        let (lo, hi) = st.nu00_interval();
        let out = PyDict::new(py);
        out.set_item("counts", st.counts.to_vec())?;
        out.set_item("trials", st.trials)?;
        out.set_item("nu00_hat", st.nu00_hat())?;
        out.set_item("ci", (lo, hi))?;
        Ok(out)
    }

    /// Text dump of the primal and dual decoding graphs.
    fn dump(&self) -> (String, String) {
        (self.ctx.dec.dump(), self.ctx.dec_dual.dump())
    }

    fn __repr__(&self) -> String {
        match self.ctx.params().r {
            Some(r) => format!("Protocol.cluster(d={}, R={r})", self.ctx.params().d),
            None => format!("Protocol.surface(d={})", self.ctx.params().d),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (name, d, p, r = None))]
fn closed_form_bound(name: &str, d: usize, p: f64, r: Option<usize>) -> PyResult<f64> {
    let params = match r {
        Some(r) => LatticeParams::cluster(d, r),
        None => LatticeParams::surface(d),
    }
    .map_err(err)?;
    closed_form_bounds(name, &params, p).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (d, r, p, trials, seed = 0, threads = 0))]
fn converse<'py>(py: Python<'py>, d: usize, r: usize, p: f64, trials: u64, seed: u64, threads: usize) -> PyResult<Bound<'py, PyDict>> {
    let cp = ConverseParams::new(d, r, p).map_err(err)?;
    let st = py.detach(|| converse_mc(&cp, trials, seed, threads)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("pr_appr", st.pr_appr.p_hat())?;
    out.set_item("pr_e1_and_appr", st.pr_e1_and_appr.p_hat())?;
    out.set_item("pr_bz1", st.pr_bz1.p_hat())?;
    out.set_item("pr_appr_exact", pr_appropriate_bernoulli(&cp))?;
    out.set_item("pr_appr_2p", pr_appropriate_exact(&cp))?;
    Ok(out)
}

/// Runs an oracle-check suite and returns whether every case agreed.
#[pyfunction]
#[pyo3(signature = (level = "exhaustive-d2", trials = 1000))]
fn oracle_check(py: Python<'_>, level: &str, trials: u64) -> PyResult<bool> {
    let level = match level {
        "exhaustive-d2" => OracleLevel::ExhaustiveD2,
        "cluster-d2" => OracleLevel::ClusterD2,
        "surface-d3" => OracleLevel::SurfaceD3,
        "identities" => OracleLevel::Identities,
        "all" => OracleLevel::All,
        _ => return Err(PyValueError::new_err(format!("unknown oracle level `{level}`"))),
    };
    let common = Common { seed: "0".into(), threads: 0, out: None, format: Format::Csv };
    let args = OracleArgs { level, trials, common };
    let rep = py.detach(|| run_oracle(&args)).map_err(err)?;
    Ok(!rep.failed)
}

#[pymodule]
fn clusterbus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Protocol>()?;
    m.add_function(wrap_pyfunction!(surface_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_bound, m)?)?;
    m.add_function(wrap_pyfunction!(converse, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    Ok(())
}
