//! Brute-force verifier for the closed-form setpoints: exhaustive grid
//! search over the single decision variable of each case.
//!
//! The cost expressions here are written out term by term and are kept
//! independent of the `policy` implementations they are used to check.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{EsdParams, PriceTriple, SlotInput};
use crate::error::{Error, Result};
use crate::policy::{self, CaseLabel};

/// Outcome of one grid search.
#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub best_decision_kwh: f64,
    pub best_cost_cents: f64,
    pub grid_resolution_kwh: f64,
    pub evaluations: usize,
}

/// Per-case slot cost at an arbitrary setpoint, evaluated straight from the
/// cost definitions (buy, sale revenues, cycle cost, stored-energy estimate).
pub fn cost_at(
    case: CaseLabel,
    input: &SlotInput,
    generation_kwh: f64,
    soc_prev_kwh: f64,
    a: f64,
    esd: &EsdParams,
    setpoint_kwh: f64,
) -> f64 {
    let alpha = esd.cycle_cost_cents();
    let nu = esd.efficiency();
    match case {
        CaseLabel::Case1 => {
            let shortfall =
                (input.sfc_demand_kwh - (generation_kwh + setpoint_kwh)).max(0.0);
            input.prices.grid_sell() * shortfall
                + alpha * setpoint_kwh
                + a / (soc_prev_kwh - nu * setpoint_kwh)
        }
        CaseLabel::Case2 => {
            -input.prices.sfc_sell() * (generation_kwh - input.sfc_demand_kwh - setpoint_kwh)
                + alpha * setpoint_kwh
                + a / (soc_prev_kwh + nu * setpoint_kwh)
        }
        CaseLabel::Case3 => {
            -input.prices.sfc_sell() * input.household_demand_kwh
                - input.prices.grid_buy()
                    * (generation_kwh
                        - input.sfc_demand_kwh
                        - input.household_demand_kwh
                        - setpoint_kwh)
                + alpha * setpoint_kwh
                + a / (soc_prev_kwh + nu * setpoint_kwh)
        }
    }
}

/// Upper end of the feasible interval for the case's decision variable.
///
/// Case 1 additionally stops at the deficit: past it the buy term is already
/// floored at zero and the cost is strictly increasing.
pub fn feasible_upper(
    case: CaseLabel,
    input: &SlotInput,
    generation_kwh: f64,
    soc_prev_kwh: f64,
    esd: &EsdParams,
) -> f64 {
    let bound = match case {
        CaseLabel::Case1 => esd
            .rate_limit_kwh()
            .min(soc_prev_kwh - esd.floor_kwh())
            .min(input.sfc_demand_kwh - generation_kwh),
        CaseLabel::Case2 => esd
            .rate_limit_kwh()
            .min(esd.capacity_kwh() - soc_prev_kwh)
            .min(generation_kwh - input.sfc_demand_kwh),
        CaseLabel::Case3 => esd
            .rate_limit_kwh()
            .min(esd.capacity_kwh() - soc_prev_kwh)
            .min(generation_kwh - input.sfc_demand_kwh - input.household_demand_kwh),
    };
    bound.max(0.0)
}

/// Exhaustive search of the feasible interval at the given resolution.
///
/// Both endpoints are always evaluated, so clamped-boundary optima are
/// exactly representable. Ties go to the smaller setpoint.
pub fn brute_force_slot(
    case: CaseLabel,
    input: &SlotInput,
    generation_kwh: f64,
    soc_prev_kwh: f64,
    a: f64,
    esd: &EsdParams,
    resolution_kwh: f64,
) -> Result<OracleResult> {
    if !resolution_kwh.is_finite() || resolution_kwh <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "grid resolution must be positive, got {resolution_kwh}"
        )));
    }
    let upper = feasible_upper(case, input, generation_kwh, soc_prev_kwh, esd);
    let steps = (upper / resolution_kwh).floor() as usize;
    let mut best_decision = 0.0;
    let mut best_cost = f64::INFINITY;
    let mut evaluations = 0;
    let consider = |e: f64, best_cost: &mut f64, best_decision: &mut f64| {
        let c = cost_at(case, input, generation_kwh, soc_prev_kwh, a, esd, e);
        if c < *best_cost {
            *best_cost = c;
            *best_decision = e;
        }
    };
    for k in 0..=steps {
        consider(k as f64 * resolution_kwh, &mut best_cost, &mut best_decision);
        evaluations += 1;
    }
    if (steps as f64) * resolution_kwh < upper {
        consider(upper, &mut best_cost, &mut best_decision);
        evaluations += 1;
    }
    Ok(OracleResult {
        best_decision_kwh: best_decision,
        best_cost_cents: best_cost,
        grid_resolution_kwh: resolution_kwh,
        evaluations,
    })
}

/// One randomized single-slot problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub case: CaseLabel,
    pub input: SlotInput,
    pub generation_kwh: f64,
    pub soc_prev_kwh: f64,
    pub a: f64,
    pub esd: EsdParams,
}

/// Draws an instance of the given case with parameters in everyday ranges:
/// grid prices of 20..60 cents/kWh with the 0.6/0.3 sale factors, batteries
/// of 10..20 kWh, coefficients of 50..400 cents.kWh.
pub fn random_instance(case: CaseLabel, rng: &mut ChaCha8Rng) -> Instance {
    let grid_sell = rng.random_range(20.0..60.0);
    let prices = PriceTriple::new(grid_sell, 0.6 * grid_sell, 0.3 * grid_sell)
        .expect("factors keep the ordering");
    let capacity = rng.random_range(10.0..20.0);
    let floor = 0.05 * capacity;
    let efficiency = rng.random_range(0.6..1.0);
    let rate_limit = rng.random_range(2.0..5.0);
    // Anything below (grid_sell - sfc_sell)/2 = 0.2 * grid_sell is admissible.
    let cycle_cost = rng.random_range(0.5..(0.2 * grid_sell - 0.5));
    let esd = EsdParams::new(capacity, floor, efficiency, rate_limit, cycle_cost)
        .expect("ranges are admissible");
    let soc_prev = rng.random_range(floor..capacity);
    let a = rng.random_range(50.0..400.0);

    let household = rng.random_range(10.0..25.0);
    let (generation, sfc_demand) = match case {
        CaseLabel::Case1 => {
            let generation = rng.random_range(0.0..15.0);
            (generation, generation + rng.random_range(0.1..15.0))
        }
        CaseLabel::Case2 => {
            let sfc_demand = rng.random_range(5.0..15.0);
            let surplus = rng.random_range(0.0..household);
            (sfc_demand + surplus, sfc_demand)
        }
        CaseLabel::Case3 => {
            let sfc_demand = rng.random_range(5.0..15.0);
            let extra = rng.random_range(0.1..15.0);
            (sfc_demand + household + extra, sfc_demand)
        }
    };
    Instance {
        case,
        input: SlotInput {
            index: 1,
            irradiance_w_m2: 0.0,
            sfc_demand_kwh: sfc_demand,
            household_demand_kwh: household,
            prices,
        },
        generation_kwh: generation,
        soc_prev_kwh: soc_prev,
        a,
        esd,
    }
}

/// The decision the dispatch policy takes on an instance, with all clamps.
pub fn closed_form_decision(inst: &Instance) -> Result<f64> {
    Ok(match inst.case {
        CaseLabel::Case1 => {
            let sp = policy::optimal_discharge_case1(
                inst.soc_prev_kwh,
                inst.a,
                inst.input.prices.grid_sell(),
                &inst.esd,
            )?;
            sp.clamped_kwh
                .min(inst.input.sfc_demand_kwh - inst.generation_kwh)
        }
        CaseLabel::Case2 => {
            policy::optimal_charge_case2(
                inst.soc_prev_kwh,
                inst.a,
                inst.input.prices.sfc_sell(),
                inst.generation_kwh - inst.input.sfc_demand_kwh,
                &inst.esd,
            )
            .clamped_kwh
        }
        CaseLabel::Case3 => {
            policy::optimal_charge_case3(
                inst.soc_prev_kwh,
                inst.a,
                inst.input.prices.grid_buy(),
                inst.generation_kwh
                    - inst.input.sfc_demand_kwh
                    - inst.input.household_demand_kwh,
                &inst.esd,
            )
            .clamped_kwh
        }
    })
}

/// Cost of an instance along the dispatch policy's own evaluation path.
pub fn closed_form_cost(inst: &Instance, decision_kwh: f64) -> Result<f64> {
    let cost = match inst.case {
        CaseLabel::Case1 => policy::cost_case1(
            &inst.input,
            inst.generation_kwh,
            decision_kwh,
            inst.a,
            inst.soc_prev_kwh,
            &inst.esd,
        )?,
        CaseLabel::Case2 => policy::cost_case2(
            &inst.input,
            inst.generation_kwh,
            decision_kwh,
            inst.a,
            inst.soc_prev_kwh,
            &inst.esd,
        )?,
        CaseLabel::Case3 => policy::cost_case3(
            &inst.input,
            inst.generation_kwh,
            decision_kwh,
            inst.a,
            inst.soc_prev_kwh,
            &inst.esd,
        )?,
    };
    Ok(cost.total)
}

/// Grid-search agreement statistics for one case.
#[derive(Debug, Clone, Copy)]
pub struct CaseReport {
    pub case: CaseLabel,
    pub instances: usize,
    pub failures: usize,
    pub max_cost_gap_cents: f64,
}

/// Full verification report over randomized instances of all three cases.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub per_case: Vec<CaseReport>,
    pub resolution_kwh: f64,
    pub tolerance_cents: f64,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.per_case.iter().map(|c| c.failures).sum()
    }

    pub fn max_cost_gap_cents(&self) -> f64 {
        self.per_case
            .iter()
            .map(|c| c.max_cost_gap_cents)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Checks, for seeded random instances of every case, that the clamped
/// closed-form decision's cost agrees with the grid-search minimum to within
/// `tolerance_cents`.
pub fn verify_closed_forms(
    instances_per_case: usize,
    resolution_kwh: f64,
    tolerance_cents: f64,
    seed: u64,
) -> Result<VerifyReport> {
    if instances_per_case == 0 {
        return Err(Error::InvalidInput("need at least one instance per case".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_case = Vec::with_capacity(3);
    for case in [CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3] {
        let mut failures = 0;
        let mut max_gap: f64 = 0.0;
        for _ in 0..instances_per_case {
            let inst = random_instance(case, &mut rng);
            let decision = closed_form_decision(&inst)?;
            let closed = closed_form_cost(&inst, decision)?;
            let oracle = brute_force_slot(
                case,
                &inst.input,
                inst.generation_kwh,
                inst.soc_prev_kwh,
                inst.a,
                &inst.esd,
                resolution_kwh,
            )?;
            let gap = (closed - oracle.best_cost_cents).abs();
            max_gap = max_gap.max(gap);
            if gap > tolerance_cents {
                failures += 1;
            }
        }
        per_case.push(CaseReport {
            case,
            instances: instances_per_case,
            failures,
            max_cost_gap_cents: max_gap,
        });
    }
    Ok(VerifyReport {
        per_case,
        resolution_kwh,
        tolerance_cents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case1_instance() -> Instance {
        Instance {
            case: CaseLabel::Case1,
            input: SlotInput {
                index: 1,
                irradiance_w_m2: 0.0,
                sfc_demand_kwh: 15.0,
                household_demand_kwh: 5.0,
                prices: PriceTriple::new(60.0, 36.0, 18.0).unwrap(),
            },
            generation_kwh: 10.0,
            soc_prev_kwh: 5.0,
            a: 250.0,
            esd: EsdParams::new(15.0, 0.25, 0.9, 10.0, 10.0).unwrap(),
        }
    }

    #[test]
    fn grid_search_finds_the_case1_optimum() {
        let inst = case1_instance();
        let res = brute_force_slot(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            inst.a,
            &inst.esd,
            1e-3,
        )
        .unwrap();
        assert!((res.best_decision_kwh - 3.1985329516003973).abs() <= 1e-3);
        assert!((res.best_cost_cents - 257.9244826177381).abs() <= 1e-3);
    }

    #[test]
    fn degenerate_interval_yields_zero() {
        let mut inst = case1_instance();
        // State of charge at the floor: nothing can be discharged.
        inst.soc_prev_kwh = inst.esd.floor_kwh();
        let res = brute_force_slot(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            inst.a,
            &inst.esd,
            1e-3,
        )
        .unwrap();
        assert_eq!(res.best_decision_kwh, 0.0);
        assert_eq!(res.evaluations, 1);
    }

    #[test]
    fn grid_costs_are_unimodal() {
        let inst = case1_instance();
        let upper = feasible_upper(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            &inst.esd,
        );
        let n = 500;
        let costs: Vec<f64> = (0..=n)
            .map(|k| {
                let e = upper * k as f64 / n as f64;
                cost_at(
                    inst.case,
                    &inst.input,
                    inst.generation_kwh,
                    inst.soc_prev_kwh,
                    inst.a,
                    &inst.esd,
                    e,
                )
            })
            .collect();
        let mut rising = false;
        for w in costs.windows(2) {
            let d = w[1] - w[0];
            if d > 1e-9 {
                rising = true;
            } else if d < -1e-9 {
                assert!(!rising, "cost decreased again after rising");
            }
        }
        assert!(rising, "cost never rose on the feasible interval");
    }

    #[test]
    fn search_direction_does_not_change_the_minimum() {
        let inst = case1_instance();
        let upper = feasible_upper(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            &inst.esd,
        );
        let res = 1e-3;
        let forward = brute_force_slot(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            inst.a,
            &inst.esd,
            res,
        )
        .unwrap();
        let steps = (upper / res).floor() as i64;
        let mut best = f64::INFINITY;
        for k in (0..=steps).rev() {
            let c = cost_at(
                inst.case,
                &inst.input,
                inst.generation_kwh,
                inst.soc_prev_kwh,
                inst.a,
                &inst.esd,
                k as f64 * res,
            );
            best = best.min(c);
        }
        best = best.min(cost_at(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            inst.a,
            &inst.esd,
            upper,
        ));
        assert!((best - forward.best_cost_cents).abs() < 1e-12);
    }

    #[test]
    fn verify_report_small_run_passes() {
        let report = verify_closed_forms(25, 1e-3, 1e-3, 7).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.per_case.len(), 3);
    }

    #[test]
    fn rejects_nonpositive_resolution() {
        let inst = case1_instance();
        assert!(brute_force_slot(
            inst.case,
            &inst.input,
            inst.generation_kwh,
            inst.soc_prev_kwh,
            inst.a,
            &inst.esd,
            0.0,
        )
        .is_err());
    }
}
