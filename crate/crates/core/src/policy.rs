//! Per-slot decision policy: case classification, closed-form charge and
//! discharge setpoints with their clamps, per-case cost evaluation, and trade
//! settlement through the energy balance.
//!
//! Every slot has exactly one free decision variable. In a deficit slot
//! (case 1) it is the discharge; in a surplus slot (case 2 or 3) it is the
//! charge. The cost in that variable is strictly convex on the feasible
//! interval, so the stationary point, clamped to the interval, is optimal.

use crate::domain::{CostBreakdown, EsdParams, SlotDecision, SlotInput};
use crate::error::{Error, Result};
use crate::vc::virtual_cost;

/// Slot category from comparing generation with the two demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// Generation below facility demand: buy and/or discharge, sell nothing.
    Case1,
    /// Surplus no larger than household demand: sell to households, may charge.
    Case2,
    /// Surplus beyond household demand: also sell the remainder to the grid.
    Case3,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Case1 => "case1",
            CaseLabel::Case2 => "case2",
            CaseLabel::Case3 => "case3",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A closed-form setpoint before and after clamping to the feasible interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoint {
    /// Stationary point of the per-case cost, possibly infeasible.
    pub raw_kwh: f64,
    /// Raw value clamped to the feasible interval.
    pub clamped_kwh: f64,
}

/// Partitions the input space into the three cases.
///
/// Boundaries: generation equal to facility demand is case 2 (zero trade
/// either way), and surplus exactly equal to household demand is still
/// case 2 (nothing left for the grid).
pub fn classify_case(
    generation_kwh: f64,
    sfc_demand_kwh: f64,
    household_demand_kwh: f64,
) -> CaseLabel {
    if generation_kwh < sfc_demand_kwh {
        CaseLabel::Case1
    } else if generation_kwh <= sfc_demand_kwh + household_demand_kwh {
        CaseLabel::Case2
    } else {
        CaseLabel::Case3
    }
}

fn clamp_to(raw: f64, upper: f64) -> Setpoint {
    Setpoint {
        raw_kwh: raw,
        clamped_kwh: raw.clamp(0.0, upper.max(0.0)),
    }
}

/// Case-1 discharge: `(soc - sqrt(nu a / (grid_sell - cycle_cost))) / nu`,
/// clamped to `[0, min(rate_limit, soc - floor)]`.
///
/// Requires `grid_sell > cycle_cost`; the cycle-cost validation guarantees it
/// for any admissible price series.
pub fn optimal_discharge_case1(
    soc_prev_kwh: f64,
    a: f64,
    grid_sell_price: f64,
    esd: &EsdParams,
) -> Result<Setpoint> {
    let margin = grid_sell_price - esd.cycle_cost_cents();
    if margin <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "grid_sell {grid_sell_price} must exceed cycle cost {}",
            esd.cycle_cost_cents()
        )));
    }
    let nu = esd.efficiency();
    let raw = (soc_prev_kwh - (nu * a / margin).sqrt()) / nu;
    let upper = esd.rate_limit_kwh().min(soc_prev_kwh - esd.floor_kwh());
    Ok(clamp_to(raw, upper))
}

/// Case-2 charge: `(sqrt(nu a / (cycle_cost + sfc_sell)) - soc) / nu`,
/// clamped to `[0, min(rate_limit, capacity - soc, surplus)]`.
///
/// The surplus bound is what keeps the settlement feasible: the battery only
/// takes energy that the slot actually has left over.
pub fn optimal_charge_case2(
    soc_prev_kwh: f64,
    a: f64,
    sfc_sell_price: f64,
    surplus_kwh: f64,
    esd: &EsdParams,
) -> Setpoint {
    let nu = esd.efficiency();
    let raw = ((nu * a / (esd.cycle_cost_cents() + sfc_sell_price)).sqrt() - soc_prev_kwh) / nu;
    let upper = esd
        .rate_limit_kwh()
        .min(esd.capacity_kwh() - soc_prev_kwh)
        .min(surplus_kwh);
    clamp_to(raw, upper)
}

/// Case-3 charge: as case 2 but against the grid feed-in price, and bounded
/// by the surplus left after serving the households in full.
pub fn optimal_charge_case3(
    soc_prev_kwh: f64,
    a: f64,
    grid_buy_price: f64,
    surplus_after_users_kwh: f64,
    esd: &EsdParams,
) -> Setpoint {
    let nu = esd.efficiency();
    let raw = ((nu * a / (esd.cycle_cost_cents() + grid_buy_price)).sqrt() - soc_prev_kwh) / nu;
    let upper = esd
        .rate_limit_kwh()
        .min(esd.capacity_kwh() - soc_prev_kwh)
        .min(surplus_after_users_kwh);
    clamp_to(raw, upper)
}

/// Case-1 cost: grid purchase for the residual shortfall, cycle cost on the
/// discharge, and the virtual cost at the end-of-slot state of charge.
pub fn cost_case1(
    input: &SlotInput,
    generation_kwh: f64,
    discharge_kwh: f64,
    a: f64,
    soc_prev_kwh: f64,
    esd: &EsdParams,
) -> Result<CostBreakdown> {
    let shortfall = (input.sfc_demand_kwh - (generation_kwh + discharge_kwh)).max(0.0);
    let buy = input.prices.grid_sell() * shortfall;
    let storage = esd.cycle_cost_cents() * discharge_kwh;
    let soc_end = soc_prev_kwh - esd.efficiency() * discharge_kwh;
    let vc = virtual_cost(a, soc_end)?;
    Ok(CostBreakdown::new(buy, 0.0, 0.0, storage, vc, CaseLabel::Case1))
}

/// Case-2 cost: household revenue on the surplus not charged, cycle cost on
/// the charge, virtual cost at the end-of-slot state of charge.
pub fn cost_case2(
    input: &SlotInput,
    generation_kwh: f64,
    charge_kwh: f64,
    a: f64,
    soc_prev_kwh: f64,
    esd: &EsdParams,
) -> Result<CostBreakdown> {
    let sold_users = generation_kwh - input.sfc_demand_kwh - charge_kwh;
    let sell_users = -input.prices.sfc_sell() * sold_users;
    let storage = esd.cycle_cost_cents() * charge_kwh;
    let soc_end = soc_prev_kwh + esd.efficiency() * charge_kwh;
    let vc = virtual_cost(a, soc_end)?;
    Ok(CostBreakdown::new(0.0, sell_users, 0.0, storage, vc, CaseLabel::Case2))
}

/// Case-3 cost: full household revenue, grid revenue on whatever surplus is
/// not charged, cycle cost on the charge, virtual cost at the end-of-slot
/// state of charge.
pub fn cost_case3(
    input: &SlotInput,
    generation_kwh: f64,
    charge_kwh: f64,
    a: f64,
    soc_prev_kwh: f64,
    esd: &EsdParams,
) -> Result<CostBreakdown> {
    let sell_users = -input.prices.sfc_sell() * input.household_demand_kwh;
    let sold_grid =
        generation_kwh - input.sfc_demand_kwh - input.household_demand_kwh - charge_kwh;
    let sell_grid = -input.prices.grid_buy() * sold_grid;
    let storage = esd.cycle_cost_cents() * charge_kwh;
    let soc_end = soc_prev_kwh + esd.efficiency() * charge_kwh;
    let vc = virtual_cost(a, soc_end)?;
    Ok(CostBreakdown::new(0.0, sell_users, sell_grid, storage, vc, CaseLabel::Case3))
}

// Settled flows can pick up float dust of order 1e-16 kWh from the balance
// arithmetic; anything more negative than this is treated as a real bug.
const SETTLE_EPS_KWH: f64 = 1e-9;

fn nonnegative_flow(name: &str, slot: usize, value: f64) -> Result<f64> {
    if value < -SETTLE_EPS_KWH {
        return Err(Error::Invariant(format!(
            "slot {slot}: settled {name} is negative ({value} kWh)"
        )));
    }
    Ok(value.max(0.0))
}

/// Settles all five flows for a slot from the already-clamped setpoint.
///
/// The balance `generation + discharge + buy = sfc_demand + delivered +
/// charge + grid_sale` holds exactly, with `delivered` being the energy the
/// households actually receive from the facility (their remainder comes from
/// the grid outside these books).
pub fn settle_trades(
    case: CaseLabel,
    input: &SlotInput,
    generation_kwh: f64,
    charge_kwh: f64,
    discharge_kwh: f64,
) -> Result<SlotDecision> {
    if charge_kwh > 0.0 && discharge_kwh > 0.0 {
        return Err(Error::Invariant(format!(
            "slot {}: charge ({charge_kwh}) and discharge ({discharge_kwh}) both positive",
            input.index
        )));
    }
    let slot = input.index;
    match case {
        CaseLabel::Case1 => {
            let buy = nonnegative_flow(
                "grid purchase",
                slot,
                input.sfc_demand_kwh - generation_kwh - discharge_kwh,
            )?;
            Ok(SlotDecision {
                discharge_kwh,
                charge_kwh: 0.0,
                buy_grid_kwh: buy,
                sell_grid_kwh: 0.0,
                sell_users_kwh: 0.0,
            })
        }
        CaseLabel::Case2 => {
            let sold = nonnegative_flow(
                "household delivery",
                slot,
                generation_kwh - input.sfc_demand_kwh - charge_kwh,
            )?;
            Ok(SlotDecision {
                discharge_kwh: 0.0,
                charge_kwh,
                buy_grid_kwh: 0.0,
                sell_grid_kwh: 0.0,
                sell_users_kwh: sold,
            })
        }
        CaseLabel::Case3 => {
            let to_grid = nonnegative_flow(
                "grid sale",
                slot,
                generation_kwh
                    - input.sfc_demand_kwh
                    - input.household_demand_kwh
                    - charge_kwh,
            )?;
            Ok(SlotDecision {
                discharge_kwh: 0.0,
                charge_kwh,
                buy_grid_kwh: 0.0,
                sell_grid_kwh: to_grid,
                sell_users_kwh: input.household_demand_kwh,
            })
        }
    }
}
