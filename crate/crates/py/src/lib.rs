//! Python bindings exposing the main design constructions, the
//! structural verifier, the decoding-cost search, diversity checks, and
//! the Monte-Carlo simulator.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::str::FromStr;

use stbc_core::design::{detect_groups, verify_design, Rational};
use stbc_core::diversity::{DiffMode, PamSpec, ScalingPool, DEFAULT_DIVERSITY_BUDGET};
use stbc_core::fd::{construct_for_rate, dast_base, default_rotation, select_base_profile};
use stbc_core::fgd::{build_fgd as core_build_fgd, puncture_fgd};
use stbc_core::multigroup::{build_ag as core_build_ag, rate_ag as core_rate_ag, stack_phi};
use stbc_core::sim::{ber_curve, DecoderKind, SimConfig};
use stbc_core::Tolerance;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rate(text: &str) -> PyResult<Rational> {
    Rational::from_str(text.trim()).map_err(err)
}

/// A linear-dispersion design with T uses, N antennas and K real
/// symbols.
#[pyclass(name = "Design", skip_from_py_object)]
#[derive(Clone)]
struct PyDesign {
    inner: stbc_core::Design,
}

#[pymethods]
impl PyDesign {
    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// Rate K/(2T) as an exact (numerator, denominator) pair.
    #[getter]
    fn rate(&self) -> (i64, i64) {
        let r = self.inner.rate();
        (*r.numer(), *r.denom())
    }

    /// Weight matrices as nested lists of Python complex numbers.
    #[getter]
    fn weights(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner
            .weights()
            .iter()
            .map(|w| {
                (0..w.rows())
                    .map(|r| (0..w.cols()).map(|c| w[(r, c)]).collect())
                    .collect()
            })
            .collect()
    }

    /// Decoding groups as lists of 0-based symbol indices.
    #[getter]
    fn groups(&self) -> Vec<Vec<usize>> {
        self.inner.groups().partition.clone()
    }

    /// Structural verification report as a dict.
    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = verify_design(&self.inner, &Tolerance::default());
        let d = PyDict::new(py);
        d.set_item("ok", report.all_ok())?;
        d.set_item("independent", report.independent())?;
        d.set_item("rank", report.independence_rank)?;
        d.set_item("k", report.k)?;
        d.set_item(
            "cross_group_violations",
            report.cross_group_violations.clone(),
        )?;
        d.set_item(
            "conditional_violations",
            report.conditional_violations.clone(),
        )?;
        d.set_item(
            "rank_deficient_weights",
            report.rank_deficient_weights.clone(),
        )?;
        Ok(d)
    }

    /// Finest flat partition compatible with the weights.
    fn detect_groups(&self) -> Vec<Vec<usize>> {
        detect_groups(&self.inner, &Tolerance::default()).partition
    }

    /// Writes the design file.
    fn save(&self, path: &str) -> PyResult<()> {
        stbc_core::design::save(&self.inner, path).map_err(err)
    }

    /// Exhaustive full-diversity check at unit PAM distances.
    #[pyo3(signature = (q, budget = DEFAULT_DIVERSITY_BUDGET))]
    fn is_fully_diverse<'py>(
        &self,
        py: Python<'py>,
        q: usize,
        budget: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let pam = PamSpec::uniform(q, self.inner.k()).map_err(err)?;
        let summary = stbc_core::diversity::is_fully_diverse(
            &self.inner,
            &pam,
            DiffMode::Exhaustive,
            budget,
            &Tolerance::default(),
        )
        .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("verified", summary.verified)?;
        d.set_item("total_diffs", summary.total_diffs)?;
        d.set_item("min_abs_det", summary.min_abs_det)?;
        Ok(d)
    }

    /// Searches full-diversity PAM scalings; returns the per-symbol
    /// distances (pool="integers") or complex scalings
    /// (pool="unit_circle").
    #[pyo3(signature = (q, pool = "integers", budget = DEFAULT_DIVERSITY_BUDGET))]
    fn find_scalings(
        &self,
        py: Python<'_>,
        q: usize,
        pool: &str,
        budget: u64,
    ) -> PyResult<Py<PyAny>> {
        let pool = match pool {
            "integers" => ScalingPool::PositiveIntegers,
            "unit_circle" => ScalingPool::UnitCircle,
            other => return Err(PyValueError::new_err(format!("unknown pool '{other}'"))),
        };
        let spec = stbc_core::diversity::find_scalings(
            &self.inner,
            q,
            pool,
            budget,
            &Tolerance::default(),
        )
        .map_err(err)?;
        match spec.scaling {
            stbc_core::diversity::PamScaling::Distances(d) => {
                Ok(d.into_pyobject(py)?.into_any().unbind())
            }
            stbc_core::diversity::PamScaling::UnitCircle(a) => {
                Ok(a.into_pyobject(py)?.into_any().unbind())
            }
        }
    }

    /// Monte-Carlo BER curve; returns (snr_db, ber, bits) tuples.
    #[pyo3(signature = (q, n_rx, snr_db_grid, trials_per_point, seed = 1, decoder = "exhaustive"))]
    #[allow(clippy::too_many_arguments)]
    fn ber_curve(
        &self,
        q: usize,
        n_rx: usize,
        snr_db_grid: Vec<f64>,
        trials_per_point: u64,
        seed: u64,
        decoder: &str,
    ) -> PyResult<Vec<(f64, f64, u64)>> {
        let decoder = match decoder {
            "exhaustive" => DecoderKind::Exhaustive,
            "structured" => DecoderKind::Structured,
            other => return Err(PyValueError::new_err(format!("unknown decoder '{other}'"))),
        };
        let cfg = SimConfig {
            q,
            distances: None,
            n_rx,
            snr_db_grid,
            trials_per_point,
            seed,
            decoder,
        };
        let points = ber_curve(&self.inner, &cfg).map_err(err)?;
        Ok(points
            .into_iter()
            .map(|p| (p.snr_db, p.ber, p.bits))
            .collect())
    }

    fn __repr__(&self) -> String {
        let r = self.inner.rate();
        format!(
            "Design(name='{}', T={}, N={}, K={}, rate={}/{})",
            self.inner.name(),
            self.inner.t(),
            self.inner.n(),
            self.inner.k(),
            r.numer(),
            r.denom()
        )
    }
}

/// Named preset designs: alamouti, ciod2, srinath_rajan_2x2.
#[pyfunction]
fn preset(name: &str) -> PyResult<PyDesign> {
    Ok(PyDesign {
        inner: stbc_core::catalog::preset(name).map_err(err)?,
    })
}

/// Delay-optimal g-group decodable design for N antennas.
#[pyfunction]
fn build_ag(g: usize, n: usize) -> PyResult<PyDesign> {
    Ok(PyDesign {
        inner: core_build_ag(g, n).map_err(err)?,
    })
}

/// Rate-5/4 fast-group-decodable design for even N, optionally
/// punctured to a lower rate given as "num/den".
#[pyfunction]
#[pyo3(signature = (n, rate = None))]
fn build_fgd(n: usize, rate: Option<&str>) -> PyResult<PyDesign> {
    let full = core_build_fgd(n).map_err(err)?;
    match rate {
        None => Ok(PyDesign { inner: full }),
        Some(text) => {
            let r = parse_rate(text)?;
            if r == full.rate() {
                Ok(PyDesign { inner: full })
            } else {
                Ok(PyDesign {
                    inner: puncture_fgd(&full, r).map_err(err)?,
                })
            }
        }
    }
}

/// Rate-1 diagonal algebraic design over the default rotation.
#[pyfunction]
fn build_dast(n: usize) -> PyResult<PyDesign> {
    Ok(PyDesign {
        inner: dast_base(n, &default_rotation(n)).map_err(err)?,
    })
}

/// Stacks the g diagonal blocks of a block-diagonal design vertically.
#[pyfunction]
fn stack(design: &PyDesign, g: usize) -> PyResult<PyDesign> {
    Ok(PyDesign {
        inner: stack_phi(&design.inner, g).map_err(err)?,
    })
}

/// Minimum-decoding-complexity design at (N, rate "num/den").
#[pyfunction]
fn construct(n: usize, rate: &str) -> PyResult<PyDesign> {
    let r = parse_rate(rate)?;
    Ok(PyDesign {
        inner: construct_for_rate(n, r).map_err(err)?.0,
    })
}

/// Loads a design file.
#[pyfunction]
fn load(path: &str) -> PyResult<PyDesign> {
    Ok(PyDesign {
        inner: stbc_core::design::load(path).map_err(err)?,
    })
}

/// Exact rate of the delay-optimal g-group family at N antennas.
#[pyfunction]
fn rate_ag(g: usize, n: usize) -> PyResult<(i64, i64)> {
    let r = core_rate_ag(g, n).map_err(err)?;
    Ok((*r.numer(), *r.denom()))
}

/// Decoding-cost exponent search at (N, rate "num/den"); returns
/// (exponent, family label, mode, K, K_b).
#[pyfunction]
fn analyze(n: usize, rate: &str) -> PyResult<(f64, String, String, usize, usize)> {
    let r = parse_rate(rate)?;
    let (family, profile) = select_base_profile(n, r).map_err(err)?;
    Ok((
        profile.exponent,
        family.to_string(),
        profile.mode.to_string(),
        profile.k,
        profile.k_b,
    ))
}

#[pymodule]
fn stbc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDesign>()?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(build_ag, m)?)?;
    m.add_function(wrap_pyfunction!(build_fgd, m)?)?;
    m.add_function(wrap_pyfunction!(build_dast, m)?)?;
    m.add_function(wrap_pyfunction!(stack, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(rate_ag, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
