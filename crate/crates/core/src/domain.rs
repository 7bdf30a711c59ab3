//! Validated value types for the dispatch model and the PV generation rule.
//!
//! Everything here is an immutable value object: constructors check the
//! invariants once and accessors hand the numbers back out. All energies are
//! kWh per slot, all prices and costs are cents (revenue is negative cost).

use crate::error::{Error, Result};
use crate::policy::CaseLabel;

/// Rooftop PV array owned by the facility controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarArrayParams {
    panel_count: u32,
    panel_area_m2: f64,
    efficiency: f64,
}

impl SolarArrayParams {
    pub fn new(panel_count: u32, panel_area_m2: f64, efficiency: f64) -> Result<Self> {
        if panel_count == 0 {
            return Err(Error::InvalidParam("panel_count must be at least 1".into()));
        }
        if !panel_area_m2.is_finite() || panel_area_m2 <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "panel_area_m2 must be positive, got {panel_area_m2}"
            )));
        }
        if !efficiency.is_finite() || efficiency <= 0.0 || efficiency > 1.0 {
            return Err(Error::InvalidParam(format!(
                "efficiency must lie in (0, 1], got {efficiency}"
            )));
        }
        Ok(Self {
            panel_count,
            panel_area_m2,
            efficiency,
        })
    }

    pub fn panel_count(&self) -> u32 {
        self.panel_count
    }

    pub fn panel_area_m2(&self) -> f64 {
        self.panel_area_m2
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    /// Same array with a different panel count; used by panel sweeps.
    pub fn with_panel_count(&self, panel_count: u32) -> Result<Self> {
        Self::new(panel_count, self.panel_area_m2, self.efficiency)
    }
}

/// Per-slot price triple in cents/kWh.
///
/// `grid_sell` is what the grid charges the controller, `sfc_sell` is what the
/// controller charges households, and `grid_buy` is the feed-in price the grid
/// pays. Construction rejects anything but `grid_buy < sfc_sell < grid_sell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceTriple {
    grid_sell: f64,
    sfc_sell: f64,
    grid_buy: f64,
}

impl PriceTriple {
    pub fn new(grid_sell: f64, sfc_sell: f64, grid_buy: f64) -> Result<Self> {
        for (name, p) in [
            ("grid_sell", grid_sell),
            ("sfc_sell", sfc_sell),
            ("grid_buy", grid_buy),
        ] {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidParam(format!(
                    "{name} price must be positive, got {p}"
                )));
            }
        }
        if !(grid_buy < sfc_sell && sfc_sell < grid_sell) {
            return Err(Error::InvalidParam(format!(
                "prices must satisfy grid_buy < sfc_sell < grid_sell, \
                 got {grid_buy} / {sfc_sell} / {grid_sell}"
            )));
        }
        Ok(Self {
            grid_sell,
            sfc_sell,
            grid_buy,
        })
    }

    pub fn grid_sell(&self) -> f64 {
        self.grid_sell
    }

    pub fn sfc_sell(&self) -> f64 {
        self.sfc_sell
    }

    pub fn grid_buy(&self) -> f64 {
        self.grid_buy
    }
}

/// Battery (energy storage device) parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsdParams {
    capacity_kwh: f64,
    floor_kwh: f64,
    efficiency: f64,
    rate_limit_kwh: f64,
    cycle_cost_cents: f64,
}

impl EsdParams {
    /// `floor_kwh` must be strictly positive: the stored-energy cost estimate
    /// divides by the state of charge, so the floor keeps it away from zero.
    pub fn new(
        capacity_kwh: f64,
        floor_kwh: f64,
        efficiency: f64,
        rate_limit_kwh: f64,
        cycle_cost_cents: f64,
    ) -> Result<Self> {
        if !floor_kwh.is_finite() || !capacity_kwh.is_finite() {
            return Err(Error::InvalidParam("capacity and floor must be finite".into()));
        }
        if !(floor_kwh > 0.0 && floor_kwh < capacity_kwh) {
            return Err(Error::InvalidParam(format!(
                "need 0 < floor < capacity, got floor {floor_kwh} / capacity {capacity_kwh}"
            )));
        }
        if !efficiency.is_finite() || efficiency <= 0.0 || efficiency > 1.0 {
            return Err(Error::InvalidParam(format!(
                "storage efficiency must lie in (0, 1], got {efficiency}"
            )));
        }
        if !rate_limit_kwh.is_finite() || rate_limit_kwh <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "rate_limit_kwh must be positive, got {rate_limit_kwh}"
            )));
        }
        if !cycle_cost_cents.is_finite() || cycle_cost_cents <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "cycle_cost_cents must be positive, got {cycle_cost_cents}"
            )));
        }
        Ok(Self {
            capacity_kwh,
            floor_kwh,
            efficiency,
            rate_limit_kwh,
            cycle_cost_cents,
        })
    }

    pub fn capacity_kwh(&self) -> f64 {
        self.capacity_kwh
    }

    pub fn floor_kwh(&self) -> f64 {
        self.floor_kwh
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn rate_limit_kwh(&self) -> f64 {
        self.rate_limit_kwh
    }

    pub fn cycle_cost_cents(&self) -> f64 {
        self.cycle_cost_cents
    }
}

/// Battery state at a slot boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsdState {
    pub soc_kwh: f64,
}

/// One slot's exogenous inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotInput {
    /// 1-based slot ordinal.
    pub index: usize,
    pub irradiance_w_m2: f64,
    pub sfc_demand_kwh: f64,
    pub household_demand_kwh: f64,
    pub prices: PriceTriple,
}

impl SlotInput {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("irradiance_w_m2", self.irradiance_w_m2),
            ("sfc_demand_kwh", self.sfc_demand_kwh),
            ("household_demand_kwh", self.household_demand_kwh),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "slot {}: {name} must be nonnegative, got {v}",
                    self.index
                )));
            }
        }
        Ok(())
    }
}

/// The five nonnegative energy flows settled for one slot.
///
/// `discharge_kwh * charge_kwh == 0` and `buy_grid_kwh * sell_grid_kwh == 0`
/// hold exactly in every settled decision.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlotDecision {
    /// Battery to facility (e_bs).
    pub discharge_kwh: f64,
    /// Surplus into the battery (e_sb).
    pub charge_kwh: f64,
    /// Bought from the grid (e_gs).
    pub buy_grid_kwh: f64,
    /// Sold to the grid (e_sg).
    pub sell_grid_kwh: f64,
    /// Delivered to households (e_su).
    pub sell_users_kwh: f64,
}

impl SlotDecision {
    /// Supply minus use for this slot:
    /// generation + discharge + grid purchase on one side, facility demand +
    /// household delivery + charge + grid sale on the other.
    pub fn balance_residual_kwh(&self, generation_kwh: f64, sfc_demand_kwh: f64) -> f64 {
        (generation_kwh + self.discharge_kwh + self.buy_grid_kwh)
            - (sfc_demand_kwh + self.sell_users_kwh + self.charge_kwh + self.sell_grid_kwh)
    }
}

/// Per-slot cost split, all in cents. Revenue terms are negative or zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub buy: f64,
    pub sell_users: f64,
    pub sell_grid: f64,
    pub storage_cycle: f64,
    pub virtual_cost: f64,
    pub total: f64,
    pub case: CaseLabel,
}

impl CostBreakdown {
    pub(crate) fn new(
        buy: f64,
        sell_users: f64,
        sell_grid: f64,
        storage_cycle: f64,
        virtual_cost: f64,
        case: CaseLabel,
    ) -> Self {
        Self {
            buy,
            sell_users,
            sell_grid,
            storage_cycle,
            virtual_cost,
            total: buy + sell_users + sell_grid + storage_cycle + virtual_cost,
            case,
        }
    }
}

/// PV energy harvested over one slot, in kWh.
///
/// The array model yields watts (`efficiency * area * count * irradiance`);
/// the slot-duration factor and the /1000 convert to kWh so generation is
/// directly comparable with demand and trade quantities.
pub fn solar_generation(
    irradiance_w_m2: f64,
    array: &SolarArrayParams,
    slot_hours: f64,
) -> Result<f64> {
    if !irradiance_w_m2.is_finite() || irradiance_w_m2 < 0.0 {
        return Err(Error::InvalidInput(format!(
            "irradiance must be nonnegative, got {irradiance_w_m2}"
        )));
    }
    if !slot_hours.is_finite() || slot_hours <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "slot_hours must be positive, got {slot_hours}"
        )));
    }
    Ok(array.efficiency * array.panel_area_m2 * f64::from(array.panel_count) * irradiance_w_m2
        * slot_hours
        / 1000.0)
}

/// Checks the cycle cost against the whole price series.
///
/// The per-case setpoints stay interior-feasible only while
/// `cycle_cost < (grid_sell - sfc_sell) / 2` at every slot; the first slot
/// breaking the bound is reported.
pub fn validate_cycle_cost(esd: &EsdParams, prices: &[PriceTriple]) -> Result<()> {
    if prices.is_empty() {
        return Err(Error::InvalidInput(
            "cycle-cost validation needs a non-empty price sequence".into(),
        ));
    }
    for (i, p) in prices.iter().enumerate() {
        let limit = (p.grid_sell() - p.sfc_sell()) / 2.0;
        if esd.cycle_cost_cents >= limit {
            return Err(Error::CycleCostBound {
                slot: i + 1,
                limit,
                cycle_cost: esd.cycle_cost_cents,
            });
        }
    }
    Ok(())
}

/// Largest admissible cycle cost for a price series, minus a one-cent margin.
///
/// Used as the default when no explicit cycle cost is configured. Errors if
/// the resulting value would not be positive.
pub fn derived_cycle_cost(prices: &[PriceTriple]) -> Result<f64> {
    if prices.is_empty() {
        return Err(Error::InvalidInput(
            "cycle-cost derivation needs a non-empty price sequence".into(),
        ));
    }
    let min_gap = prices
        .iter()
        .map(|p| (p.grid_sell() - p.sfc_sell()) / 2.0)
        .fold(f64::INFINITY, f64::min);
    let cost = min_gap - 1.0;
    if cost <= 0.0 {
        return Err(Error::Config(format!(
            "derived cycle cost {cost} is not positive; \
             set cycle_cost_cents explicitly or widen the price gap"
        )));
    }
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv_array() -> SolarArrayParams {
        SolarArrayParams::new(65, 1.952964, 0.30).unwrap()
    }

    #[test]
    fn solar_generation_zero_irradiance() {
        assert_eq!(solar_generation(0.0, &iv_array(), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn solar_generation_matches_hand_arithmetic() {
        // 0.30 * 1.952964 * 65 * 800 W over half an hour.
        let got = solar_generation(800.0, &iv_array(), 0.5).unwrap();
        assert!((got - 15.2331192).abs() < 1e-9, "got {got}");
        let got = solar_generation(500.0, &iv_array(), 0.5).unwrap();
        assert!((got - 9.5206995).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn solar_generation_is_homogeneous_in_irradiance() {
        let array = iv_array();
        for irr in [1.3, 250.0, 777.77, 901.5] {
            let one = solar_generation(irr, &array, 0.5).unwrap();
            let two = solar_generation(2.0 * irr, &array, 0.5).unwrap();
            assert_eq!(two, 2.0 * one);
        }
    }

    #[test]
    fn solar_generation_rejects_negative_irradiance() {
        assert!(matches!(
            solar_generation(-1.0, &iv_array(), 0.5),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn price_triple_requires_strict_ordering() {
        assert!(PriceTriple::new(60.0, 36.0, 18.0).is_ok());
        assert!(PriceTriple::new(60.0, 18.0, 36.0).is_err());
        assert!(PriceTriple::new(36.0, 60.0, 18.0).is_err());
        assert!(PriceTriple::new(60.0, 36.0, 36.0).is_err());
        assert!(PriceTriple::new(60.0, 60.0, 18.0).is_err());
        assert!(PriceTriple::new(60.0, 36.0, 0.0).is_err());
    }

    #[test]
    fn esd_params_require_positive_floor_below_capacity() {
        assert!(EsdParams::new(15.0, 0.75, 0.9, 5.0, 10.0).is_ok());
        assert!(EsdParams::new(15.0, 0.0, 0.9, 5.0, 10.0).is_err());
        assert!(EsdParams::new(15.0, 15.0, 0.9, 5.0, 10.0).is_err());
        assert!(EsdParams::new(15.0, 0.75, 1.1, 5.0, 10.0).is_err());
        assert!(EsdParams::new(15.0, 0.75, 0.9, 0.0, 10.0).is_err());
        assert!(EsdParams::new(15.0, 0.75, 0.9, 5.0, 0.0).is_err());
    }

    #[test]
    fn cycle_cost_bound_is_strict() {
        // min (grid_sell - sfc_sell)/2 over the series is 12 cents.
        let prices = vec![
            PriceTriple::new(60.0, 36.0, 18.0).unwrap(),
            PriceTriple::new(50.0, 26.0, 10.0).unwrap(),
        ];
        let ok = EsdParams::new(15.0, 0.75, 0.9, 5.0, 5.0).unwrap();
        assert!(validate_cycle_cost(&ok, &prices).is_ok());

        let boundary = EsdParams::new(15.0, 0.75, 0.9, 5.0, 12.0).unwrap();
        match validate_cycle_cost(&boundary, &prices) {
            Err(Error::CycleCostBound { slot, limit, .. }) => {
                assert_eq!(slot, 1);
                assert!((limit - 12.0).abs() < 1e-12);
            }
            other => panic!("expected cycle-cost violation, got {other:?}"),
        }
    }

    #[test]
    fn cycle_cost_rejects_empty_series() {
        let esd = EsdParams::new(15.0, 0.75, 0.9, 5.0, 5.0).unwrap();
        assert!(matches!(
            validate_cycle_cost(&esd, &[]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn derived_cycle_cost_leaves_one_cent_margin() {
        let prices = vec![
            PriceTriple::new(60.0, 36.0, 18.0).unwrap(),
            PriceTriple::new(30.0, 18.0, 9.0).unwrap(),
        ];
        // min gap/2 = 6, so the derived value is 5 and must validate.
        let cost = derived_cycle_cost(&prices).unwrap();
        assert!((cost - 5.0).abs() < 1e-12);
        let esd = EsdParams::new(15.0, 0.75, 0.9, 5.0, cost).unwrap();
        assert!(validate_cycle_cost(&esd, &prices).is_ok());
    }

    #[test]
    fn cost_breakdown_total_is_sum_of_parts() {
        let b = CostBreakdown::new(10.0, -3.5, -1.25, 2.0, 7.75, CaseLabel::Case1);
        assert!((b.total - (b.buy + b.sell_users + b.sell_grid + b.storage_cycle + b.virtual_cost)).abs() < 1e-9);
        assert!((b.total - 15.0).abs() < 1e-9);
    }
}
