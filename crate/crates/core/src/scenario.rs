//! Scenario configuration, seeded series generators, and scenario
//! materialization into per-slot inputs.
//!
//! All generators are pure functions of the spec and a seed. Each series
//! draws from its own ChaCha stream, so sweeps that vary panel counts,
//! household scale, or the virtual-cost coefficient reuse identical demand
//! and irradiance draws (common random numbers).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{baseline_day, percent_savings, BaselineKind};
use crate::domain::{derived_cycle_cost, EsdParams, PriceTriple, SlotInput, SolarArrayParams};
use crate::error::{Error, Result};
use crate::scheduler::run_day;
use crate::vc::VcParams;

/// Name of the pseudo-random generator recorded in output metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

const SFC_DEMAND_STREAM: u64 = 1;
const HOUSEHOLD_DEMAND_STREAM: u64 = 2;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Slot timing of a simulated day.
#[derive(Debug, Clone, Copy)]
pub struct SlotGrid {
    pub slot_count: usize,
    pub slot_hours: f64,
    pub day_start_hour: f64,
}

impl SlotGrid {
    /// Wall-clock hour at which slot `i` (0-based) starts.
    pub fn start_hour(&self, i: usize) -> f64 {
        self.day_start_hour + i as f64 * self.slot_hours
    }
}

/// Parameters for the two demand generators: facility demand from lift
/// trips, household demand from a uniform range.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfileSpec {
    /// Peak-hour windows as [start, end) wall-clock hours.
    pub peak_windows: Vec<(f64, f64)>,
    /// Lift trips per slot during peak windows, inclusive.
    pub peak_trips: (u32, u32),
    /// Lift trips per slot outside peak windows, inclusive.
    pub offpeak_trips: (u32, u32),
    pub energy_per_trip_kwh: f64,
    /// Household demand per slot, kWh, before scaling.
    pub household_range_kwh: (f64, f64),
    /// Multiplier on the household draw; 2.0 doubles every slot's demand.
    pub household_scale: f64,
}

impl Default for DemandProfileSpec {
    fn default() -> Self {
        Self {
            peak_windows: vec![(6.0, 9.0), (16.5, 20.0)],
            peak_trips: (100, 200),
            offpeak_trips: (70, 100),
            energy_per_trip_kwh: 0.1,
            household_range_kwh: (10.0, 25.0),
            household_scale: 1.0,
        }
    }
}

impl DemandProfileSpec {
    pub fn validate(&self) -> Result<()> {
        for &(lo, hi) in &[self.peak_trips, self.offpeak_trips] {
            if lo > hi {
                return Err(Error::InvalidParam(format!(
                    "trip range [{lo}, {hi}] is empty"
                )));
            }
        }
        let (lo, hi) = self.household_range_kwh;
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo > hi {
            return Err(Error::InvalidParam(format!(
                "household range [{lo}, {hi}] must be nonnegative and nonempty"
            )));
        }
        if !self.energy_per_trip_kwh.is_finite() || self.energy_per_trip_kwh < 0.0 {
            return Err(Error::InvalidParam("energy_per_trip_kwh must be nonnegative".into()));
        }
        if !self.household_scale.is_finite() || self.household_scale <= 0.0 {
            return Err(Error::InvalidParam("household_scale must be positive".into()));
        }
        for &(start, end) in &self.peak_windows {
            if !start.is_finite() || !end.is_finite() || start >= end {
                return Err(Error::InvalidParam(format!(
                    "peak window [{start}, {end}) is empty"
                )));
            }
        }
        Ok(())
    }

    fn is_peak(&self, hour: f64) -> bool {
        self.peak_windows
            .iter()
            .any(|&(start, end)| hour >= start && hour < end)
    }
}

/// Irradiance source: a per-slot series in W/m2, or a synthetic bell that is
/// zero at the window edges and unimodal around the peak slot.
#[derive(Debug, Clone, PartialEq)]
pub enum IrradianceSpec {
    Series(Vec<f64>),
    Synthetic {
        peak_w_m2: f64,
        /// Slot position (0-based, may be fractional) of the peak; defaults
        /// to the middle of the day.
        peak_slot: Option<f64>,
        /// Half-width of the bell in slots; defaults to half the day.
        width_slots: Option<f64>,
    },
}

impl Default for IrradianceSpec {
    fn default() -> Self {
        IrradianceSpec::Synthetic {
            peak_w_m2: 900.0,
            peak_slot: None,
            width_slots: None,
        }
    }
}

/// Facility demand series: seeded uniform trip counts per slot, peak or
/// off-peak range by slot start time, times the energy per trip.
pub fn gen_sfc_demand(spec: &DemandProfileSpec, grid: &SlotGrid, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, SFC_DEMAND_STREAM);
    (0..grid.slot_count)
        .map(|i| {
            let (lo, hi) = if spec.is_peak(grid.start_hour(i)) {
                spec.peak_trips
            } else {
                spec.offpeak_trips
            };
            let trips = rng.random_range(lo..=hi);
            f64::from(trips) * spec.energy_per_trip_kwh
        })
        .collect()
}

/// Household demand series: seeded uniform draw per slot times the scale.
pub fn gen_household_demand(spec: &DemandProfileSpec, slot_count: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, HOUSEHOLD_DEMAND_STREAM);
    let (lo, hi) = spec.household_range_kwh;
    (0..slot_count)
        .map(|_| {
            let base = if lo == hi { lo } else { rng.random_range(lo..hi) };
            base * spec.household_scale
        })
        .collect()
}

/// Synthetic bell irradiance: `peak * cos^2(pi/2 * (i - peak_slot) / width)`
/// inside the width, zero outside.
pub fn synthetic_irradiance(
    peak_w_m2: f64,
    peak_slot: f64,
    width_slots: f64,
    slot_count: usize,
) -> Result<Vec<f64>> {
    if !peak_w_m2.is_finite() || peak_w_m2 < 0.0 {
        return Err(Error::InvalidParam(format!(
            "irradiance peak must be nonnegative, got {peak_w_m2}"
        )));
    }
    if !width_slots.is_finite() || width_slots <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "irradiance width must be positive, got {width_slots}"
        )));
    }
    Ok((0..slot_count)
        .map(|i| {
            let d = (i as f64 - peak_slot) / width_slots;
            if d.abs() >= 1.0 {
                0.0
            } else {
                let c = (std::f64::consts::FRAC_PI_2 * d).cos();
                peak_w_m2 * c * c
            }
        })
        .collect())
}

/// Builds per-slot price triples from a grid-sell series:
/// `sfc_sell = sell_factor * grid_sell`, `grid_buy = buy_factor * grid_sell`.
pub fn derive_prices(
    grid_sell_cents: &[f64],
    sell_factor: f64,
    buy_factor: f64,
) -> Result<Vec<PriceTriple>> {
    if !(buy_factor > 0.0 && buy_factor < sell_factor && sell_factor < 1.0) {
        return Err(Error::InvalidParam(format!(
            "price factors must satisfy 0 < buy < sell < 1, got buy {buy_factor} / sell {sell_factor}"
        )));
    }
    grid_sell_cents
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "grid sell price at slot {} must be positive, got {p}",
                    i + 1
                )));
            }
            PriceTriple::new(p, sell_factor * p, buy_factor * p)
        })
        .collect()
}

/// Bundled sample of a daily grid-sell price shape in cents/kWh, covering a
/// 06:00 to 20:00 window in half-hour slots. Synthetic data shipped with the
/// repo; lowest price 20, evening peak 34.
pub const DEFAULT_GRID_SELL_CENTS: [f64; 28] = [
    22.0, 21.0, 20.0, 20.0, 21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 26.0, 27.0, 27.0, 28.0, 28.0,
    29.0, 30.0, 31.0, 32.0, 33.0, 34.0, 34.0, 33.0, 32.0, 30.0, 28.0, 26.0, 24.0,
];

/// The sample price shape resampled (linear interpolation) onto any slot count.
pub fn default_grid_sell_series(slot_count: usize) -> Vec<f64> {
    let table = &DEFAULT_GRID_SELL_CENTS;
    if slot_count == 0 {
        return Vec::new();
    }
    if slot_count == 1 {
        return vec![table[0]];
    }
    (0..slot_count)
        .map(|i| {
            let x = i as f64 / (slot_count - 1) as f64 * (table.len() - 1) as f64;
            let lo = x.floor() as usize;
            let hi = (lo + 1).min(table.len() - 1);
            let frac = x - lo as f64;
            table[lo] * (1.0 - frac) + table[hi] * frac
        })
        .collect()
}

/// Full scenario description. `Default` gives the reference setup: 65 panels
/// of 1.926 m by 1.014 m at 30% efficiency, a 15 kWh battery, 28 half-hour
/// slots from 06:00, the bundled price shape, and a seeded synthetic day.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub slot_count: usize,
    pub slot_hours: f64,
    pub day_start_hour: f64,
    pub array: SolarArrayParams,
    pub esd_capacity_kwh: f64,
    pub esd_floor_kwh: f64,
    pub esd_efficiency: f64,
    pub esd_rate_limit_kwh: f64,
    /// Explicit cycle cost in cents/kWh; `None` derives
    /// `min((grid_sell - sfc_sell)/2) - 1` from the price series.
    pub cycle_cost_cents: Option<f64>,
    pub initial_soc_kwh: f64,
    pub vc: VcParams,
    pub demand: DemandProfileSpec,
    /// Optional per-slot override of the generated facility demand.
    pub sfc_demand_series: Option<Vec<f64>>,
    /// Optional per-slot override of the household demand (still scaled).
    pub household_demand_series: Option<Vec<f64>>,
    pub irradiance: IrradianceSpec,
    /// Optional per-slot grid-sell prices; `None` uses the bundled shape.
    pub grid_sell_series: Option<Vec<f64>>,
    pub sell_factor: f64,
    pub buy_factor: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            slot_count: 28,
            slot_hours: 0.5,
            day_start_hour: 6.0,
            array: SolarArrayParams::new(65, 1.952964, 0.30).expect("valid default array"),
            esd_capacity_kwh: 15.0,
            esd_floor_kwh: 0.75,
            esd_efficiency: 0.9,
            esd_rate_limit_kwh: 5.0,
            cycle_cost_cents: None,
            initial_soc_kwh: 1.5,
            vc: VcParams::new(250.0, 1.0, 1.0).expect("valid default estimator"),
            demand: DemandProfileSpec::default(),
            sfc_demand_series: None,
            household_demand_series: None,
            irradiance: IrradianceSpec::default(),
            grid_sell_series: None,
            sell_factor: 0.6,
            buy_factor: 0.3,
            rng_seed: 7,
        }
    }
}

/// A scenario with every series materialized and every parameter validated,
/// ready to run.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub slots: Vec<SlotInput>,
    pub array: SolarArrayParams,
    pub esd: EsdParams,
    pub vc: VcParams,
    pub initial_soc_kwh: f64,
    pub slot_hours: f64,
    pub rng_seed: u64,
}

impl ScenarioConfig {
    fn check_len(&self, name: &str, len: usize) -> Result<()> {
        if len != self.slot_count {
            return Err(Error::Config(format!(
                "{name} has {len} slots but the scenario has {}",
                self.slot_count
            )));
        }
        Ok(())
    }

    /// Materializes all series and validates the whole scenario.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        if self.slot_count < 3 {
            return Err(Error::Config(format!(
                "slot_count must be at least 3, got {}",
                self.slot_count
            )));
        }
        if !self.slot_hours.is_finite() || self.slot_hours <= 0.0 {
            return Err(Error::Config(format!(
                "slot_duration_hours must be positive, got {}",
                self.slot_hours
            )));
        }
        self.demand.validate()?;

        let grid = SlotGrid {
            slot_count: self.slot_count,
            slot_hours: self.slot_hours,
            day_start_hour: self.day_start_hour,
        };

        let grid_sell = match &self.grid_sell_series {
            Some(series) => {
                self.check_len("grid-sell price series", series.len())?;
                series.clone()
            }
            None => default_grid_sell_series(self.slot_count),
        };
        let prices = derive_prices(&grid_sell, self.sell_factor, self.buy_factor)?;

        let irradiance = match &self.irradiance {
            IrradianceSpec::Series(series) => {
                self.check_len("irradiance series", series.len())?;
                series.clone()
            }
            IrradianceSpec::Synthetic {
                peak_w_m2,
                peak_slot,
                width_slots,
            } => {
                let centre = (self.slot_count - 1) as f64 / 2.0;
                synthetic_irradiance(
                    *peak_w_m2,
                    peak_slot.unwrap_or(centre),
                    width_slots.unwrap_or(centre),
                    self.slot_count,
                )?
            }
        };

        let sfc_demand = match &self.sfc_demand_series {
            Some(series) => {
                self.check_len("facility demand series", series.len())?;
                series.clone()
            }
            None => gen_sfc_demand(&self.demand, &grid, self.rng_seed),
        };
        let household_demand = match &self.household_demand_series {
            Some(series) => {
                self.check_len("household demand series", series.len())?;
                series
                    .iter()
                    .map(|v| v * self.demand.household_scale)
                    .collect()
            }
            None => gen_household_demand(&self.demand, self.slot_count, self.rng_seed),
        };

        let cycle_cost = match self.cycle_cost_cents {
            Some(c) => c,
            None => derived_cycle_cost(&prices)?,
        };
        let esd = EsdParams::new(
            self.esd_capacity_kwh,
            self.esd_floor_kwh,
            self.esd_efficiency,
            self.esd_rate_limit_kwh,
            cycle_cost,
        )?;
        crate::domain::validate_cycle_cost(&esd, &prices)?;

        if self.initial_soc_kwh < esd.floor_kwh() || self.initial_soc_kwh > esd.capacity_kwh() {
            return Err(Error::Config(format!(
                "initial_soc_kwh {} outside [{}, {}]",
                self.initial_soc_kwh,
                esd.floor_kwh(),
                esd.capacity_kwh()
            )));
        }

        let slots: Vec<SlotInput> = (0..self.slot_count)
            .map(|i| SlotInput {
                index: i + 1,
                irradiance_w_m2: irradiance[i],
                sfc_demand_kwh: sfc_demand[i],
                household_demand_kwh: household_demand[i],
                prices: prices[i],
            })
            .collect();
        for slot in &slots {
            slot.validate()?;
        }

        Ok(ResolvedScenario {
            slots,
            array: self.array,
            esd,
            vc: self.vc,
            initial_soc_kwh: self.initial_soc_kwh,
            slot_hours: self.slot_hours,
            rng_seed: self.rng_seed,
        })
    }
}

/// One point of a panel-count sweep.
///
/// Savings compare cash flows: what the controller actually paid and earned
/// against the grid-tie baseline, which has no estimator term at all. The
/// decision-shaping virtual cost is reported alongside in the with-estimate
/// total.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    /// Household-demand multiplier label (scenario 1, 2, ...).
    pub scenario: u32,
    pub a_initial: f64,
    pub panel_count: u32,
    /// Cash cost of the dispatch scheme: buys, sales, cycle cost.
    pub proposed_cash_cents: f64,
    /// Cash cost plus the per-slot virtual-cost terms.
    pub proposed_with_vc_cents: f64,
    pub grid_tie_cash_cents: f64,
    pub savings_cents: f64,
    pub savings_pct: f64,
}

/// Runs the dispatch scheme and the grid-tie baseline over a panel-count by
/// scenario by coefficient grid, reusing the base seed everywhere so all
/// points share the same demand and irradiance draws.
pub fn sweep_panels(
    base: &ScenarioConfig,
    panel_counts: &[u32],
    scenario_multipliers: &[u32],
    a_initials: &[f64],
) -> Result<Vec<SweepPoint>> {
    if panel_counts.is_empty() || scenario_multipliers.is_empty() || a_initials.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one point per axis".into()));
    }
    let mut points = Vec::new();
    for &scenario in scenario_multipliers {
        if scenario == 0 {
            return Err(Error::InvalidInput("scenario multiplier must be positive".into()));
        }
        for &a_initial in a_initials {
            for &panel_count in panel_counts {
                let mut cfg = base.clone();
                cfg.array = base.array.with_panel_count(panel_count)?;
                cfg.demand.household_scale =
                    base.demand.household_scale * f64::from(scenario);
                cfg.vc = VcParams::new(a_initial, base.vc.step(), base.vc.a_floor())?;
                let resolved = cfg.resolve()?;
                let trace = run_day(&resolved)?;
                let cash = trace.cash_cost_cents();
                let grid_tie = baseline_day(
                    BaselineKind::GridTie,
                    &resolved.slots,
                    &resolved.array,
                    resolved.slot_hours,
                )?
                .total_cost_cents;
                points.push(SweepPoint {
                    scenario,
                    a_initial,
                    panel_count,
                    proposed_cash_cents: cash,
                    proposed_with_vc_cents: trace.total_cost_cents,
                    grid_tie_cash_cents: grid_tie,
                    savings_cents: grid_tie - cash,
                    savings_pct: percent_savings(grid_tie, cash)?,
                });
            }
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sfc_demand_respects_the_trip_ranges() {
        let spec = DemandProfileSpec::default();
        let grid = SlotGrid {
            slot_count: 28,
            slot_hours: 0.5,
            day_start_hour: 6.0,
        };
        let series = gen_sfc_demand(&spec, &grid, 11);
        assert_eq!(series.len(), 28);
        for (i, v) in series.iter().enumerate() {
            let hour = grid.start_hour(i);
            if spec.is_peak(hour) {
                assert!((10.0..=20.0).contains(v), "slot {i} peak value {v}");
            } else {
                assert!((7.0..=10.0).contains(v), "slot {i} off-peak value {v}");
            }
        }
        // 06:00-09:00 and 16:30-20:00 are peak, the middle of the day is not.
        assert!(spec.is_peak(6.0) && spec.is_peak(8.5) && !spec.is_peak(9.0));
        assert!(spec.is_peak(16.5) && spec.is_peak(19.5) && !spec.is_peak(12.0));
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let spec = DemandProfileSpec::default();
        let grid = SlotGrid {
            slot_count: 28,
            slot_hours: 0.5,
            day_start_hour: 6.0,
        };
        assert_eq!(gen_sfc_demand(&spec, &grid, 5), gen_sfc_demand(&spec, &grid, 5));
        assert_ne!(gen_sfc_demand(&spec, &grid, 5), gen_sfc_demand(&spec, &grid, 6));
        assert_eq!(
            gen_household_demand(&spec, 28, 5),
            gen_household_demand(&spec, 28, 5)
        );
    }

    #[test]
    fn household_demand_scales_pointwise() {
        let mut spec = DemandProfileSpec::default();
        let base = gen_household_demand(&spec, 28, 9);
        for v in &base {
            assert!((10.0..=25.0).contains(v));
        }
        spec.household_scale = 2.0;
        let doubled = gen_household_demand(&spec, 28, 9);
        for (a, b) in base.iter().zip(&doubled) {
            assert!((b - 2.0 * a).abs() < 1e-12);
        }
    }

    #[test]
    fn trips_convert_to_kwh_through_the_per_trip_energy() {
        let spec = DemandProfileSpec {
            peak_trips: (150, 150),
            offpeak_trips: (80, 80),
            ..DemandProfileSpec::default()
        };
        let grid = SlotGrid {
            slot_count: 28,
            slot_hours: 0.5,
            day_start_hour: 6.0,
        };
        let series = gen_sfc_demand(&spec, &grid, 1);
        assert_eq!(series[0], 15.0);
        assert_eq!(series[10], 8.0);
    }

    #[test]
    fn zero_width_household_range_is_constant() {
        let spec = DemandProfileSpec {
            household_range_kwh: (10.0, 10.0),
            ..DemandProfileSpec::default()
        };
        assert!(gen_household_demand(&spec, 8, 3).iter().all(|&v| v == 10.0));
    }

    #[test]
    fn derive_prices_applies_the_factors() {
        let triples = derive_prices(&[60.0, 10.0], 0.6, 0.3).unwrap();
        assert!((triples[0].sfc_sell() - 36.0).abs() < 1e-12);
        assert!((triples[0].grid_buy() - 18.0).abs() < 1e-12);
        assert!((triples[1].sfc_sell() - 6.0).abs() < 1e-12);
        assert!((triples[1].grid_buy() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn derive_prices_rejects_bad_factor_ordering() {
        assert!(derive_prices(&[60.0], 0.6, 0.6).is_err());
        assert!(derive_prices(&[60.0], 0.3, 0.6).is_err());
        assert!(derive_prices(&[60.0], 1.0, 0.3).is_err());
        assert!(derive_prices(&[0.0], 0.6, 0.3).is_err());
    }

    #[test]
    fn synthetic_irradiance_is_zero_edged_and_unimodal() {
        let centre = 27.0 / 2.0;
        let series = synthetic_irradiance(900.0, centre, centre, 28).unwrap();
        assert_eq!(series[0], 0.0);
        assert_eq!(series[27], 0.0);
        let peak = series.iter().cloned().fold(0.0, f64::max);
        assert!(peak <= 900.0 && peak > 890.0);
        let argmax = series
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        for i in 1..=argmax {
            assert!(series[i] >= series[i - 1]);
        }
        for i in argmax + 1..series.len() {
            assert!(series[i] <= series[i - 1]);
        }
    }

    #[test]
    fn default_scenario_resolves() {
        let resolved = ScenarioConfig::default().resolve().unwrap();
        assert_eq!(resolved.slots.len(), 28);
        assert_eq!(resolved.slots[0].index, 1);
        assert_eq!(resolved.slots[27].index, 28);
        // Derived cycle cost: min gap is 0.2 * 20 cents, minus the margin.
        assert!((resolved.esd.cycle_cost_cents() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn resolve_rejects_length_mismatches() {
        let cfg = ScenarioConfig {
            grid_sell_series: Some(vec![30.0; 27]),
            ..ScenarioConfig::default()
        };
        assert!(cfg.resolve().is_err());

        let cfg = ScenarioConfig {
            irradiance: IrradianceSpec::Series(vec![500.0; 10]),
            ..ScenarioConfig::default()
        };
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn resolve_rejects_short_horizons_and_bad_soc() {
        let cfg = ScenarioConfig {
            slot_count: 2,
            ..ScenarioConfig::default()
        };
        assert!(cfg.resolve().is_err());

        let cfg = ScenarioConfig {
            initial_soc_kwh: 16.0,
            ..ScenarioConfig::default()
        };
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn sweep_shares_draws_across_the_grid() {
        let base = ScenarioConfig::default();
        let points = sweep_panels(&base, &[65, 70], &[1, 2], &[250.0]).unwrap();
        assert_eq!(points.len(), 4);
        // Same panel count, doubled households: identical grid-tie baseline.
        let p65: Vec<_> = points.iter().filter(|p| p.panel_count == 65).collect();
        assert_eq!(p65.len(), 2);
        assert!((p65[0].grid_tie_cash_cents - p65[1].grid_tie_cash_cents).abs() < 1e-9);
    }
}
