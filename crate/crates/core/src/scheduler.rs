//! Day-level driver: runs the per-slot policy over a horizon, threading the
//! battery state and the virtual-cost state from slot to slot.

use crate::domain::{solar_generation, EsdParams, EsdState, SlotDecision, SlotInput,
    SolarArrayParams, validate_cycle_cost, CostBreakdown};
use crate::error::{Error, Result};
use crate::policy::{classify_case, cost_case1, cost_case2, cost_case3, optimal_charge_case2,
    optimal_charge_case3, optimal_discharge_case1, settle_trades, CaseLabel};
use crate::scenario::ResolvedScenario;
use crate::vc::{record_purchase, update_coefficient, VcParams, VcState};

// Tolerance for the post-step state-of-charge range check; the clamps keep
// the trajectory strictly inside, so anything beyond this is an upstream bug.
const SOC_EPS_KWH: f64 = 1e-9;

/// Everything recorded about one simulated slot.
#[derive(Debug, Clone)]
pub struct SlotRecord {
    pub input: SlotInput,
    /// PV energy harvested this slot, kWh.
    pub generation_kwh: f64,
    /// Stationary point of the active decision variable before any clamping;
    /// kept so clamp activations can be read off the trace.
    pub raw_setpoint_kwh: f64,
    pub decision: SlotDecision,
    pub cost: CostBreakdown,
    /// State of charge at the end of the slot, kWh.
    pub soc_after_kwh: f64,
    /// Coefficient a(t) used in this slot's virtual cost.
    pub a_after: f64,
}

/// Full-day simulation output.
#[derive(Debug, Clone)]
pub struct DayTrace {
    pub records: Vec<SlotRecord>,
    pub total_cost_cents: f64,
    pub average_cost_cents: f64,
}

impl DayTrace {
    /// Money actually moved over the day: the total without the per-slot
    /// virtual-cost terms, which are estimates rather than payments.
    pub fn cash_cost_cents(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.cost.total - r.cost.virtual_cost)
            .sum()
    }
}

/// New state of charge: `soc + efficiency * (charge - discharge)`.
pub fn soc_update(soc_prev_kwh: f64, charge_kwh: f64, discharge_kwh: f64, efficiency: f64) -> f64 {
    soc_prev_kwh + efficiency * (charge_kwh - discharge_kwh)
}

/// Per-slot decision engine bound to one set of physical parameters.
pub struct SlotEngine<'a> {
    array: &'a SolarArrayParams,
    esd: &'a EsdParams,
    vc: &'a VcParams,
    slot_hours: f64,
}

impl<'a> SlotEngine<'a> {
    pub fn new(
        array: &'a SolarArrayParams,
        esd: &'a EsdParams,
        vc: &'a VcParams,
        slot_hours: f64,
    ) -> Result<Self> {
        if !slot_hours.is_finite() || slot_hours <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "slot_hours must be positive, got {slot_hours}"
            )));
        }
        Ok(Self {
            array,
            esd,
            vc,
            slot_hours,
        })
    }

    /// Runs one slot: update the coefficient, compute generation, classify,
    /// take the clamped optimal setpoint, evaluate that case's cost, settle
    /// the trades, advance the battery, and shift the purchase history.
    ///
    /// Slots 1 and 2 keep the coefficient at its current value; the update
    /// needs two slots of purchase history, which only exists from slot 3 on.
    pub fn step(
        &self,
        soc: &EsdState,
        vc_state: &VcState,
        input: &SlotInput,
    ) -> Result<(SlotRecord, EsdState, VcState)> {
        input.validate()?;
        let a = if input.index >= 3 {
            update_coefficient(vc_state, self.vc)
        } else {
            vc_state.a
        };
        let generation = solar_generation(input.irradiance_w_m2, self.array, self.slot_hours)?;
        let case = classify_case(generation, input.sfc_demand_kwh, input.household_demand_kwh);
        let soc_prev = soc.soc_kwh;

        let (raw_setpoint, decision, cost) = match case {
            CaseLabel::Case1 => {
                let sp =
                    optimal_discharge_case1(soc_prev, a, input.prices.grid_sell(), self.esd)?;
                // Discharging past the shortfall would be thrown away (case 1
                // sells nothing), so cap at the deficit as well.
                let deficit = input.sfc_demand_kwh - generation;
                let discharge = sp.clamped_kwh.min(deficit);
                let cost = cost_case1(input, generation, discharge, a, soc_prev, self.esd)?;
                let decision = settle_trades(case, input, generation, 0.0, discharge)?;
                (sp.raw_kwh, decision, cost)
            }
            CaseLabel::Case2 => {
                let surplus = generation - input.sfc_demand_kwh;
                let sp =
                    optimal_charge_case2(soc_prev, a, input.prices.sfc_sell(), surplus, self.esd);
                let cost = cost_case2(input, generation, sp.clamped_kwh, a, soc_prev, self.esd)?;
                let decision = settle_trades(case, input, generation, sp.clamped_kwh, 0.0)?;
                (sp.raw_kwh, decision, cost)
            }
            CaseLabel::Case3 => {
                let surplus_after_users =
                    generation - input.sfc_demand_kwh - input.household_demand_kwh;
                let sp = optimal_charge_case3(
                    soc_prev,
                    a,
                    input.prices.grid_buy(),
                    surplus_after_users,
                    self.esd,
                );
                let cost = cost_case3(input, generation, sp.clamped_kwh, a, soc_prev, self.esd)?;
                let decision = settle_trades(case, input, generation, sp.clamped_kwh, 0.0)?;
                (sp.raw_kwh, decision, cost)
            }
        };

        let soc_after = soc_update(
            soc_prev,
            decision.charge_kwh,
            decision.discharge_kwh,
            self.esd.efficiency(),
        );
        if soc_after < self.esd.floor_kwh() - SOC_EPS_KWH
            || soc_after > self.esd.capacity_kwh() + SOC_EPS_KWH
        {
            return Err(Error::Invariant(format!(
                "slot {}: state of charge {soc_after} kWh left [{}, {}]",
                input.index,
                self.esd.floor_kwh(),
                self.esd.capacity_kwh()
            )));
        }

        let next_vc = record_purchase(
            &VcState {
                a,
                prev_purchase_kwh: vc_state.prev_purchase_kwh,
                prev_prev_purchase_kwh: vc_state.prev_prev_purchase_kwh,
            },
            decision.buy_grid_kwh,
        )?;

        let record = SlotRecord {
            input: input.clone(),
            generation_kwh: generation,
            raw_setpoint_kwh: raw_setpoint,
            decision,
            cost,
            soc_after_kwh: soc_after,
            a_after: a,
        };
        Ok((record, EsdState { soc_kwh: soc_after }, next_vc))
    }
}

/// Runs the whole horizon of a resolved scenario.
///
/// Deterministic: the scenario's slot inputs are fully materialized before
/// the first step, so identical configs and seeds give identical traces.
pub fn run_day(scenario: &ResolvedScenario) -> Result<DayTrace> {
    if scenario.slots.len() < 3 {
        return Err(Error::Config(format!(
            "a day needs at least 3 slots, got {}",
            scenario.slots.len()
        )));
    }
    let esd = &scenario.esd;
    if scenario.initial_soc_kwh < esd.floor_kwh() || scenario.initial_soc_kwh > esd.capacity_kwh()
    {
        return Err(Error::Config(format!(
            "initial state of charge {} kWh outside [{}, {}]",
            scenario.initial_soc_kwh,
            esd.floor_kwh(),
            esd.capacity_kwh()
        )));
    }
    let prices: Vec<_> = scenario.slots.iter().map(|s| s.prices).collect();
    validate_cycle_cost(esd, &prices)?;

    let engine = SlotEngine::new(&scenario.array, esd, &scenario.vc, scenario.slot_hours)?;
    let mut soc = EsdState {
        soc_kwh: scenario.initial_soc_kwh,
    };
    let mut vc_state = VcState::initial(&scenario.vc);
    let mut records = Vec::with_capacity(scenario.slots.len());
    for input in &scenario.slots {
        let (record, next_soc, next_vc) = engine.step(&soc, &vc_state, input)?;
        records.push(record);
        soc = next_soc;
        vc_state = next_vc;
    }
    let total_cost_cents: f64 = records.iter().map(|r| r.cost.total).sum();
    let average_cost_cents = total_cost_cents / records.len() as f64;
    Ok(DayTrace {
        records,
        total_cost_cents,
        average_cost_cents,
    })
}
