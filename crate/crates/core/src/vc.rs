//! Virtual cost: a per-slot estimate of the next slot's cost, driven by the
//! end-of-slot state of charge and an adaptive coefficient.
//!
//! The estimate is `a(t) / soc_end`: cheap when the battery ends full,
//! expensive when it ends near the floor. The coefficient `a(t)` tracks the
//! trend of recent grid purchases, so rising purchases raise the estimate.

use crate::error::{Error, Result};

/// Parameters of the virtual-cost estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VcParams {
    a_initial: f64,
    step: f64,
    a_floor: f64,
}

impl VcParams {
    pub fn new(a_initial: f64, step: f64, a_floor: f64) -> Result<Self> {
        if !a_floor.is_finite() || a_floor <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "a_floor must be positive, got {a_floor}"
            )));
        }
        if !a_initial.is_finite() || a_initial < a_floor {
            return Err(Error::InvalidParam(format!(
                "a_initial must be at least a_floor ({a_floor}), got {a_initial}"
            )));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "step must be positive, got {step}"
            )));
        }
        Ok(Self {
            a_initial,
            step,
            a_floor,
        })
    }

    pub fn a_initial(&self) -> f64 {
        self.a_initial
    }

    /// Sensitivity of the coefficient to the purchase trend (cents.kWh per kWh).
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn a_floor(&self) -> f64 {
        self.a_floor
    }
}

/// Coefficient plus the two-slot purchase history it is updated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VcState {
    /// Current coefficient a(t), cents.kWh.
    pub a: f64,
    /// Grid purchase in the previous slot, kWh.
    pub prev_purchase_kwh: f64,
    /// Grid purchase two slots back, kWh.
    pub prev_prev_purchase_kwh: f64,
}

impl VcState {
    /// State before the first slot: coefficient at its initial value and an
    /// empty (all-zero) purchase history.
    pub fn initial(params: &VcParams) -> Self {
        Self {
            a: params.a_initial,
            prev_purchase_kwh: 0.0,
            prev_prev_purchase_kwh: 0.0,
        }
    }
}

/// Virtual cost `a / soc_end` in cents.
///
/// Strictly decreasing in the end-of-slot state of charge and strictly
/// increasing in the coefficient. The storage floor keeps `soc_end` positive;
/// a nonpositive value here is a bug upstream.
pub fn virtual_cost(a: f64, soc_end_kwh: f64) -> Result<f64> {
    if !soc_end_kwh.is_finite() || soc_end_kwh <= 0.0 {
        return Err(Error::Singular(format!(
            "virtual cost undefined at soc_end {soc_end_kwh} kWh"
        )));
    }
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "virtual-cost coefficient must be positive, got {a}"
        )));
    }
    Ok(a / soc_end_kwh)
}

/// Next coefficient: `a + step * (prev - prev_prev)`, floored at `a_floor`.
///
/// Increasing purchases raise the coefficient, decreasing purchases lower it;
/// the floor absorbs any underflow so the coefficient stays positive.
pub fn update_coefficient(state: &VcState, params: &VcParams) -> f64 {
    let raw = state.a + params.step * (state.prev_purchase_kwh - state.prev_prev_purchase_kwh);
    raw.max(params.a_floor)
}

/// Shifts the purchase history after a slot settles; the coefficient is untouched.
pub fn record_purchase(state: &VcState, purchase_kwh: f64) -> Result<VcState> {
    if !purchase_kwh.is_finite() || purchase_kwh < 0.0 {
        return Err(Error::InvalidInput(format!(
            "grid purchase must be nonnegative, got {purchase_kwh}"
        )));
    }
    Ok(VcState {
        a: state.a,
        prev_purchase_kwh: purchase_kwh,
        prev_prev_purchase_kwh: state.prev_purchase_kwh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(step: f64) -> VcParams {
        VcParams::new(250.0, step, 1.0).unwrap()
    }

    #[test]
    fn virtual_cost_is_a_over_soc() {
        assert!((virtual_cost(250.0, 5.0).unwrap() - 50.0).abs() < 1e-12);
        assert!((virtual_cost(100.0, 4.0).unwrap() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_soc_halves_the_estimate() {
        let lo = virtual_cost(250.0, 5.0).unwrap();
        let hi = virtual_cost(250.0, 10.0).unwrap();
        assert!((hi - lo / 2.0).abs() < 1e-12);
    }

    #[test]
    fn virtual_cost_rejects_nonpositive_soc() {
        assert!(matches!(virtual_cost(250.0, 0.0), Err(Error::Singular(_))));
        assert!(matches!(virtual_cost(250.0, -1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn coefficient_update_follows_purchase_trend() {
        let st = VcState {
            a: 250.0,
            prev_purchase_kwh: 10.0,
            prev_prev_purchase_kwh: 4.0,
        };
        assert!((update_coefficient(&st, &params(1.0)) - 256.0).abs() < 1e-12);

        let flat = VcState {
            a: 250.0,
            prev_purchase_kwh: 5.0,
            prev_prev_purchase_kwh: 5.0,
        };
        assert!((update_coefficient(&flat, &params(17.0)) - 250.0).abs() < 1e-12);

        let falling = VcState {
            a: 250.0,
            prev_purchase_kwh: 0.0,
            prev_prev_purchase_kwh: 6.0,
        };
        assert!((update_coefficient(&falling, &params(10.0)) - 190.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_floors_instead_of_going_negative() {
        let crash = VcState {
            a: 10.0,
            prev_purchase_kwh: 0.0,
            prev_prev_purchase_kwh: 50.0,
        };
        assert_eq!(update_coefficient(&crash, &params(1.0)), 1.0);
    }

    #[test]
    fn record_purchase_shifts_history() {
        let st = VcState {
            a: 250.0,
            prev_purchase_kwh: 10.0,
            prev_prev_purchase_kwh: 4.0,
        };
        let next = record_purchase(&st, 7.0).unwrap();
        assert_eq!(next.prev_purchase_kwh, 7.0);
        assert_eq!(next.prev_prev_purchase_kwh, 10.0);
        assert_eq!(next.a, 250.0);

        let zero = record_purchase(&st, 0.0).unwrap();
        assert_eq!(zero.prev_purchase_kwh, 0.0);
        assert_eq!(zero.prev_prev_purchase_kwh, 10.0);
    }

    #[test]
    fn two_records_compose() {
        let st = VcState::initial(&params(1.0));
        let st = record_purchase(&st, 3.0).unwrap();
        let st = record_purchase(&st, 9.0).unwrap();
        assert_eq!(st.prev_purchase_kwh, 9.0);
        assert_eq!(st.prev_prev_purchase_kwh, 3.0);
    }

    #[test]
    fn record_purchase_rejects_negative() {
        let st = VcState::initial(&params(1.0));
        assert!(record_purchase(&st, -0.1).is_err());
    }
}
