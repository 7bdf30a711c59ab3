//! Storage-free comparison schemes and the savings metric.
//!
//! All three baselines trade each slot in isolation: no battery, no
//! stored-energy estimate. `Fit` and `GridTie` sell every surplus to the
//! grid at the feed-in price; `Modified` sells to the households first.

use crate::domain::{solar_generation, SlotDecision, SlotInput, SolarArrayParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// Feed-in tariff: surplus to the grid only.
    Fit,
    /// Surplus to households first, remainder to the grid.
    Modified,
    /// Grid-tied array; trades exactly like `Fit` in this model.
    GridTie,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 3] = [BaselineKind::Fit, BaselineKind::Modified, BaselineKind::GridTie];

    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineKind::Fit => "fit",
            BaselineKind::Modified => "modified",
            BaselineKind::GridTie => "grid_tie",
        }
    }
}

impl std::fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One baseline slot: deficits bought at the grid sell price, surpluses sold
/// per the scheme. Returns the settled flows and the slot cost in cents.
pub fn baseline_slot(
    kind: BaselineKind,
    input: &SlotInput,
    generation_kwh: f64,
) -> (SlotDecision, f64) {
    let net = generation_kwh - input.sfc_demand_kwh;
    if net < 0.0 {
        let buy = -net;
        let decision = SlotDecision {
            buy_grid_kwh: buy,
            ..SlotDecision::default()
        };
        return (decision, input.prices.grid_sell() * buy);
    }
    let surplus = net;
    match kind {
        BaselineKind::Fit | BaselineKind::GridTie => {
            let decision = SlotDecision {
                sell_grid_kwh: surplus,
                ..SlotDecision::default()
            };
            (decision, -input.prices.grid_buy() * surplus)
        }
        BaselineKind::Modified => {
            let to_users = surplus.min(input.household_demand_kwh);
            let to_grid = surplus - to_users;
            let decision = SlotDecision {
                sell_users_kwh: to_users,
                sell_grid_kwh: to_grid,
                ..SlotDecision::default()
            };
            (
                decision,
                -input.prices.sfc_sell() * to_users - input.prices.grid_buy() * to_grid,
            )
        }
    }
}

/// A baseline run over a horizon.
#[derive(Debug, Clone)]
pub struct BaselineTrace {
    pub per_slot: Vec<(SlotDecision, f64)>,
    pub total_cost_cents: f64,
}

/// Runs a baseline over the same slot inputs the dispatch scheme sees.
pub fn baseline_day(
    kind: BaselineKind,
    slots: &[SlotInput],
    array: &SolarArrayParams,
    slot_hours: f64,
) -> Result<BaselineTrace> {
    let mut per_slot = Vec::with_capacity(slots.len());
    let mut total = 0.0;
    for input in slots {
        input.validate()?;
        let generation = solar_generation(input.irradiance_w_m2, array, slot_hours)?;
        let (decision, cost) = baseline_slot(kind, input, generation);
        total += cost;
        per_slot.push((decision, cost));
    }
    Ok(BaselineTrace {
        per_slot,
        total_cost_cents: total,
    })
}

/// Relative saving of the proposed scheme against a baseline, in percent:
/// `(baseline - proposed) / baseline * 100`.
pub fn percent_savings(baseline_cents: f64, proposed_cents: f64) -> Result<f64> {
    if baseline_cents == 0.0 {
        return Err(Error::UndefinedMetric(
            "percent savings against a zero baseline cost".into(),
        ));
    }
    Ok((baseline_cents - proposed_cents) / baseline_cents * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PriceTriple;

    fn toy_input(index: usize, sfc: f64, hh: f64) -> SlotInput {
        SlotInput {
            index,
            irradiance_w_m2: 0.0,
            sfc_demand_kwh: sfc,
            household_demand_kwh: hh,
            prices: PriceTriple::new(60.0, 24.0, 8.54).unwrap(),
        }
    }

    #[test]
    fn fit_sells_surplus_to_grid_only() {
        let (d, cost) = baseline_slot(BaselineKind::Fit, &toy_input(1, 80.0, 25.0), 100.0);
        assert!((cost - (-170.8)).abs() < 1e-9);
        assert!((d.sell_grid_kwh - 20.0).abs() < 1e-12);
        assert_eq!(d.sell_users_kwh, 0.0);
    }

    #[test]
    fn fit_buys_the_deficit() {
        let (d, cost) = baseline_slot(BaselineKind::Fit, &toy_input(2, 100.0, 25.0), 90.0);
        assert!((cost - 600.0).abs() < 1e-9);
        assert!((d.buy_grid_kwh - 10.0).abs() < 1e-12);
    }

    #[test]
    fn modified_sells_to_households_first() {
        let (d, cost) = baseline_slot(BaselineKind::Modified, &toy_input(1, 80.0, 25.0), 100.0);
        // All 20 kWh of surplus absorbed by the households at 24 cents.
        assert!((cost - (-480.0)).abs() < 1e-9);
        assert!((d.sell_users_kwh - 20.0).abs() < 1e-12);
        assert_eq!(d.sell_grid_kwh, 0.0);

        let (d, cost) = baseline_slot(BaselineKind::Modified, &toy_input(1, 80.0, 8.0), 100.0);
        assert!((d.sell_users_kwh - 8.0).abs() < 1e-12);
        assert!((d.sell_grid_kwh - 12.0).abs() < 1e-12);
        assert!((cost - (-(24.0 * 8.0 + 8.54 * 12.0))).abs() < 1e-9);
    }

    #[test]
    fn fit_and_grid_tie_agree_slot_by_slot() {
        for (gen, sfc) in [(100.0, 80.0), (90.0, 100.0), (50.0, 50.0)] {
            let input = toy_input(1, sfc, 25.0);
            let (_, fit) = baseline_slot(BaselineKind::Fit, &input, gen);
            let (_, gt) = baseline_slot(BaselineKind::GridTie, &input, gen);
            assert_eq!(fit, gt);
        }
    }

    #[test]
    fn modified_never_costs_more_than_fit() {
        for (gen, sfc, hh) in [
            (100.0, 80.0, 25.0),
            (90.0, 100.0, 25.0),
            (120.0, 80.0, 10.0),
            (80.5, 80.0, 0.0),
        ] {
            let input = toy_input(1, sfc, hh);
            let (_, fit) = baseline_slot(BaselineKind::Fit, &input, gen);
            let (_, modified) = baseline_slot(BaselineKind::Modified, &input, gen);
            assert!(modified <= fit + 1e-12);
        }
    }

    #[test]
    fn percent_savings_examples() {
        assert!((percent_savings(100.0, 60.0).unwrap() - 40.0).abs() < 1e-12);
        assert!((percent_savings(100.0, 100.0).unwrap() - 0.0).abs() < 1e-12);
        assert!((percent_savings(429.2, 100.0).unwrap() - 76.70083876980429).abs() < 1e-9);
        assert!(percent_savings(0.0, 10.0).is_err());
    }
}
