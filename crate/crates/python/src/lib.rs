//! Python bindings for the dispatch simulator.
//!
//! Exposes the per-slot building blocks (generation, virtual cost, the
//! closed-form setpoints) plus whole-day entry points that mirror the CLI:
//! `run_day`, `compare`, and `verify`. Build the module with
//! `cargo build -p sfc-py --release`; `python/smoke_test.py` does that and
//! imports the result.

use std::path::Path;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use sfc_core::baselines::{baseline_day, BaselineKind};
use sfc_core::oracle::verify_closed_forms;
use sfc_core::scenario::{ScenarioConfig, RNG_ALGORITHM};
use sfc_core::vc::{VcParams, VcState};
use sfc_core::{policy, CaseLabel};

fn err(e: sfc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Battery parameters: capacity, floor, efficiency, rate limit, cycle cost.
#[pyclass(name = "EsdParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEsdParams(sfc_core::EsdParams);

#[pymethods]
impl PyEsdParams {
    #[new]
    fn new(
        capacity_kwh: f64,
        floor_kwh: f64,
        efficiency: f64,
        rate_limit_kwh: f64,
        cycle_cost_cents: f64,
    ) -> PyResult<Self> {
        sfc_core::EsdParams::new(
            capacity_kwh,
            floor_kwh,
            efficiency,
            rate_limit_kwh,
            cycle_cost_cents,
        )
        .map(PyEsdParams)
        .map_err(err)
    }

    #[getter]
    fn capacity_kwh(&self) -> f64 {
        self.0.capacity_kwh()
    }

    #[getter]
    fn floor_kwh(&self) -> f64 {
        self.0.floor_kwh()
    }

    #[getter]
    fn efficiency(&self) -> f64 {
        self.0.efficiency()
    }

    #[getter]
    fn rate_limit_kwh(&self) -> f64 {
        self.0.rate_limit_kwh()
    }

    #[getter]
    fn cycle_cost_cents(&self) -> f64 {
        self.0.cycle_cost_cents()
    }

    fn __repr__(&self) -> String {
        format!(
            "EsdParams(capacity_kwh={}, floor_kwh={}, efficiency={}, rate_limit_kwh={}, cycle_cost_cents={})",
            self.0.capacity_kwh(),
            self.0.floor_kwh(),
            self.0.efficiency(),
            self.0.rate_limit_kwh(),
            self.0.cycle_cost_cents()
        )
    }
}

/// PV energy harvested over one slot, in kWh.
#[pyfunction]
fn solar_generation(
    irradiance_w_m2: f64,
    panel_count: u32,
    panel_area_m2: f64,
    efficiency: f64,
    slot_hours: f64,
) -> PyResult<f64> {
    let array =
        sfc_core::SolarArrayParams::new(panel_count, panel_area_m2, efficiency).map_err(err)?;
    sfc_core::solar_generation(irradiance_w_m2, &array, slot_hours).map_err(err)
}

/// Virtual cost `a / soc_end` in cents.
#[pyfunction]
fn virtual_cost(a: f64, soc_end_kwh: f64) -> PyResult<f64> {
    sfc_core::virtual_cost(a, soc_end_kwh).map_err(err)
}

/// Next coefficient from the purchase trend, floored at `a_floor`.
#[pyfunction]
#[pyo3(signature = (a, prev_purchase_kwh, prev_prev_purchase_kwh, step=1.0, a_floor=1.0))]
fn update_coefficient(
    a: f64,
    prev_purchase_kwh: f64,
    prev_prev_purchase_kwh: f64,
    step: f64,
    a_floor: f64,
) -> PyResult<f64> {
    let params = VcParams::new(a_floor, step, a_floor).map_err(err)?;
    let state = VcState {
        a,
        prev_purchase_kwh,
        prev_prev_purchase_kwh,
    };
    Ok(sfc_core::update_coefficient(&state, &params))
}

/// Case label ("case1", "case2", or "case3") for a slot's inputs.
#[pyfunction]
fn classify_case(
    generation_kwh: f64,
    sfc_demand_kwh: f64,
    household_demand_kwh: f64,
) -> &'static str {
    policy::classify_case(generation_kwh, sfc_demand_kwh, household_demand_kwh).as_str()
}

/// Case-1 discharge setpoint as `(raw, clamped)` kWh.
#[pyfunction]
fn optimal_discharge_case1(
    soc_prev_kwh: f64,
    a: f64,
    grid_sell_price: f64,
    esd: &PyEsdParams,
) -> PyResult<(f64, f64)> {
    policy::optimal_discharge_case1(soc_prev_kwh, a, grid_sell_price, &esd.0)
        .map(|sp| (sp.raw_kwh, sp.clamped_kwh))
        .map_err(err)
}

/// Case-2 charge setpoint as `(raw, clamped)` kWh.
#[pyfunction]
fn optimal_charge_case2(
    soc_prev_kwh: f64,
    a: f64,
    sfc_sell_price: f64,
    surplus_kwh: f64,
    esd: &PyEsdParams,
) -> (f64, f64) {
    let sp = policy::optimal_charge_case2(soc_prev_kwh, a, sfc_sell_price, surplus_kwh, &esd.0);
    (sp.raw_kwh, sp.clamped_kwh)
}

/// Case-3 charge setpoint as `(raw, clamped)` kWh.
#[pyfunction]
fn optimal_charge_case3(
    soc_prev_kwh: f64,
    a: f64,
    grid_buy_price: f64,
    surplus_after_users_kwh: f64,
    esd: &PyEsdParams,
) -> (f64, f64) {
    let sp =
        policy::optimal_charge_case3(soc_prev_kwh, a, grid_buy_price, surplus_after_users_kwh, &esd.0);
    (sp.raw_kwh, sp.clamped_kwh)
}

/// New state of charge after a slot.
#[pyfunction]
fn soc_update(soc_prev_kwh: f64, charge_kwh: f64, discharge_kwh: f64, efficiency: f64) -> f64 {
    sfc_core::soc_update(soc_prev_kwh, charge_kwh, discharge_kwh, efficiency)
}

/// `(baseline - proposed) / baseline * 100`.
#[pyfunction]
fn percent_savings(baseline_cents: f64, proposed_cents: f64) -> PyResult<f64> {
    sfc_core::percent_savings(baseline_cents, proposed_cents).map_err(err)
}

fn scenario(config_path: Option<&str>, seed: Option<u64>) -> PyResult<ScenarioConfig> {
    let mut cfg = match config_path {
        Some(p) => sfc_core::load_config(Path::new(p)).map_err(err)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = seed {
        cfg.rng_seed = s;
    }
    Ok(cfg)
}

/// Simulates one day and returns totals plus per-slot records.
#[pyfunction]
#[pyo3(signature = (config_path=None, seed=None))]
fn run_day<'py>(
    py: Python<'py>,
    config_path: Option<&str>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let resolved = scenario(config_path, seed)?.resolve().map_err(err)?;
    let trace = sfc_core::run_day(&resolved).map_err(err)?;

    let out = PyDict::new(py);
    out.set_item("total_cents", trace.total_cost_cents)?;
    out.set_item("cash_cents", trace.cash_cost_cents())?;
    out.set_item("average_cents", trace.average_cost_cents)?;
    out.set_item("rng_algorithm", RNG_ALGORITHM)?;
    out.set_item("rng_seed", resolved.rng_seed)?;
    let records = PyList::empty(py);
    for r in &trace.records {
        let rec = PyDict::new(py);
        rec.set_item("slot", r.input.index)?;
        rec.set_item("case", r.cost.case.as_str())?;
        rec.set_item("generation_kwh", r.generation_kwh)?;
        rec.set_item("sfc_demand_kwh", r.input.sfc_demand_kwh)?;
        rec.set_item("household_demand_kwh", r.input.household_demand_kwh)?;
        rec.set_item("discharge_kwh", r.decision.discharge_kwh)?;
        rec.set_item("charge_kwh", r.decision.charge_kwh)?;
        rec.set_item("buy_grid_kwh", r.decision.buy_grid_kwh)?;
        rec.set_item("sell_grid_kwh", r.decision.sell_grid_kwh)?;
        rec.set_item("sell_users_kwh", r.decision.sell_users_kwh)?;
        rec.set_item("soc_after_kwh", r.soc_after_kwh)?;
        rec.set_item("a_after", r.a_after)?;
        rec.set_item("cost_buy_cents", r.cost.buy)?;
        rec.set_item("cost_sell_users_cents", r.cost.sell_users)?;
        rec.set_item("cost_sell_grid_cents", r.cost.sell_grid)?;
        rec.set_item("cost_storage_cents", r.cost.storage_cycle)?;
        rec.set_item("cost_virtual_cents", r.cost.virtual_cost)?;
        rec.set_item("cost_total_cents", r.cost.total)?;
        records.append(rec)?;
    }
    out.set_item("records", records)?;
    Ok(out)
}

/// Runs the scheme and the three storage-free baselines on the same day.
#[pyfunction]
#[pyo3(signature = (config_path=None, seed=None))]
fn compare<'py>(
    py: Python<'py>,
    config_path: Option<&str>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let resolved = scenario(config_path, seed)?.resolve().map_err(err)?;
    let trace = sfc_core::run_day(&resolved).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("proposed_cash_cents", trace.cash_cost_cents())?;
    out.set_item("proposed_with_vc_cents", trace.total_cost_cents)?;
    for kind in BaselineKind::ALL {
        let total = baseline_day(kind, &resolved.slots, &resolved.array, resolved.slot_hours)
            .map_err(err)?
            .total_cost_cents;
        out.set_item(format!("{kind}_cents"), total)?;
    }
    Ok(out)
}

/// Checks the closed forms against the brute-force grid search.
#[pyfunction]
#[pyo3(signature = (instances=200, resolution=1e-3, tolerance=1e-3, seed=42))]
fn verify<'py>(
    py: Python<'py>,
    instances: usize,
    resolution: f64,
    tolerance: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = verify_closed_forms(instances, resolution, tolerance, seed).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("failures", report.failures())?;
    out.set_item("max_cost_gap_cents", report.max_cost_gap_cents())?;
    out.set_item("passed", report.passed())?;
    let per_case = PyDict::new(py);
    for case in &report.per_case {
        let entry = PyDict::new(py);
        entry.set_item("instances", case.instances)?;
        entry.set_item("failures", case.failures)?;
        entry.set_item("max_cost_gap_cents", case.max_cost_gap_cents)?;
        per_case.set_item(case.case.as_str(), entry)?;
    }
    out.set_item("per_case", per_case)?;
    Ok(out)
}

/// Case labels as exposed constants, mainly for readable assertions.
#[pyfunction]
fn case_labels() -> Vec<&'static str> {
    [CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3]
        .iter()
        .map(|c| c.as_str())
        .collect()
}

#[pymodule]
fn sfc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEsdParams>()?;
    m.add_function(wrap_pyfunction!(solar_generation, m)?)?;
    m.add_function(wrap_pyfunction!(virtual_cost, m)?)?;
    m.add_function(wrap_pyfunction!(update_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(classify_case, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_discharge_case1, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_charge_case2, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_charge_case3, m)?)?;
    m.add_function(wrap_pyfunction!(soc_update, m)?)?;
    m.add_function(wrap_pyfunction!(percent_savings, m)?)?;
    m.add_function(wrap_pyfunction!(run_day, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(case_labels, m)?)?;
    Ok(())
}
