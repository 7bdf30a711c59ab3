//! Deterministic dispatch simulator and decision library for a shared
//! facility controller (SFC) that routes rooftop PV energy between its own
//! load, a battery, household buyers, and the grid.
//!
//! Each slot is classified by how generation compares with demand, the
//! closed-form optimal charge or discharge is computed and clamped to the
//! battery limits, trades are settled through the energy balance, and a
//! virtual cost (an estimate of the next slot's cost, driven by the state of
//! charge) keeps the decisions forward-looking without any actual forecast.
//! Storage-free baselines and a brute-force oracle for the closed forms are
//! included for benchmarking and verification.

pub mod baselines;
pub mod config;
pub mod domain;
pub mod error;
pub mod io;
pub mod oracle;
pub mod policy;
pub mod scenario;
pub mod scheduler;
pub mod vc;

pub use baselines::{baseline_day, baseline_slot, percent_savings, BaselineKind};
pub use config::load_config;
pub use domain::{
    solar_generation, validate_cycle_cost, CostBreakdown, EsdParams, EsdState, PriceTriple,
    SlotDecision, SlotInput, SolarArrayParams,
};
pub use error::{Error, Result};
pub use policy::{classify_case, CaseLabel, Setpoint};
pub use scenario::{
    sweep_panels, DemandProfileSpec, IrradianceSpec, ResolvedScenario, ScenarioConfig,
    SweepPoint, RNG_ALGORITHM,
};
pub use scheduler::{run_day, soc_update, DayTrace, SlotEngine, SlotRecord};
pub use vc::{record_purchase, update_coefficient, virtual_cost, VcParams, VcState};
