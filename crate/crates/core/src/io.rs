//! CSV ingestion and report emission.
//!
//! All files are plain comma-separated with a header row, decimal points,
//! and no thousands separators. Trace files carry full-precision values;
//! summary files round money to two decimals.

use std::io::Write;
use std::path::Path;

use crate::baselines::BaselineKind;
use crate::error::{Error, Result};
use crate::scenario::SweepPoint;
use crate::scheduler::DayTrace;

fn csv_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Loads a per-slot series from a `slot,value` CSV.
///
/// Slots must cover 1..=n with no gaps or duplicates; any order is accepted.
pub fn load_series_csv(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e.to_string()))?;
    {
        let headers = reader.headers().map_err(|e| csv_err(path, e.to_string()))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != ["slot", "value"] {
            return Err(csv_err(
                path,
                format!("expected header `slot,value`, got `{}`", got.join(",")),
            ));
        }
    }
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e.to_string()))?;
        if record.len() != 2 {
            return Err(csv_err(
                path,
                format!("row {}: expected 2 fields, got {}", line + 2, record.len()),
            ));
        }
        let slot: usize = record[0]
            .parse()
            .map_err(|_| csv_err(path, format!("row {}: bad slot `{}`", line + 2, &record[0])))?;
        let value: f64 = record[1]
            .parse()
            .map_err(|_| csv_err(path, format!("row {}: bad value `{}`", line + 2, &record[1])))?;
        rows.push((slot, value));
    }
    if rows.is_empty() {
        return Err(csv_err(path, "no data rows"));
    }
    rows.sort_by_key(|&(slot, _)| slot);
    for (i, &(slot, _)) in rows.iter().enumerate() {
        if slot != i + 1 {
            return Err(csv_err(
                path,
                format!(
                    "slots must cover 1..={} without gaps or duplicates; found slot {slot} at position {}",
                    rows.len(),
                    i + 1
                ),
            ));
        }
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

/// Trace CSV header, one row per slot.
pub const TRACE_HEADER: [&str; 18] = [
    "slot",
    "case",
    "generation_kwh",
    "sfc_demand_kwh",
    "household_demand_kwh",
    "e_bs",
    "e_sb",
    "e_gs",
    "e_sg",
    "e_su",
    "soc_after",
    "a_after",
    "j_buy",
    "j_user",
    "j_grid",
    "j_sd",
    "j_v",
    "j_total",
];

/// Writes a full-day trace, full precision, one row per slot.
pub fn write_trace_csv(trace: &DayTrace, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    writer
        .write_record(TRACE_HEADER)
        .map_err(|e| csv_err(path, e.to_string()))?;
    for r in &trace.records {
        writer
            .write_record(&[
                r.input.index.to_string(),
                r.cost.case.as_str().to_string(),
                r.generation_kwh.to_string(),
                r.input.sfc_demand_kwh.to_string(),
                r.input.household_demand_kwh.to_string(),
                r.decision.discharge_kwh.to_string(),
                r.decision.charge_kwh.to_string(),
                r.decision.buy_grid_kwh.to_string(),
                r.decision.sell_grid_kwh.to_string(),
                r.decision.sell_users_kwh.to_string(),
                r.soc_after_kwh.to_string(),
                r.a_after.to_string(),
                r.cost.buy.to_string(),
                r.cost.sell_users.to_string(),
                r.cost.sell_grid.to_string(),
                r.cost.storage_cycle.to_string(),
                r.cost.virtual_cost.to_string(),
                r.cost.total.to_string(),
            ])
            .map_err(|e| csv_err(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| csv_err(path, e.to_string()))?;
    Ok(())
}

/// Writes the proposed-versus-baselines summary. Money is rounded to two
/// decimals here; traces keep full precision.
///
/// Savings percentages compare cash totals: the baselines carry no
/// virtual-cost term, so the with-estimate total is reported as its own
/// column instead of entering the ratio.
pub fn write_summary(
    path: &Path,
    proposed: &DayTrace,
    baselines: &[(BaselineKind, f64)],
    rng_algorithm: &str,
    rng_seed: u64,
) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    let slots = proposed.records.len() as f64;
    let cash = proposed.cash_cost_cents();
    writeln!(
        file,
        "scheme,cash_total_cents,with_vc_total_cents,average_cash_cents_per_slot,\
         savings_vs_fit_pct,savings_vs_modified_pct,savings_vs_grid_tie_pct,rng_algorithm,rng_seed"
    )?;
    let savings = |kind: BaselineKind| -> String {
        baselines
            .iter()
            .find(|(k, _)| *k == kind)
            .and_then(|(_, total)| crate::baselines::percent_savings(*total, cash).ok())
            .map(|pct| format!("{pct:.2}"))
            .unwrap_or_default()
    };
    writeln!(
        file,
        "proposed,{cash:.2},{:.2},{:.2},{},{},{},{rng_algorithm},{rng_seed}",
        proposed.total_cost_cents,
        cash / slots,
        savings(BaselineKind::Fit),
        savings(BaselineKind::Modified),
        savings(BaselineKind::GridTie),
    )?;
    for (kind, total) in baselines {
        writeln!(
            file,
            "{kind},{total:.2},{total:.2},{:.2},,,,{rng_algorithm},{rng_seed}",
            total / slots,
        )?;
    }
    Ok(())
}

/// Writes sweep points, one row per (scenario, a_initial, panel count).
pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    writer
        .write_record([
            "scenario",
            "a_initial",
            "panels",
            "proposed_cash_cents",
            "proposed_with_vc_cents",
            "grid_tie_cash_cents",
            "savings_cents",
            "savings_pct",
        ])
        .map_err(|e| csv_err(path, e.to_string()))?;
    for p in points {
        writer
            .write_record(&[
                p.scenario.to_string(),
                p.a_initial.to_string(),
                p.panel_count.to_string(),
                format!("{:.2}", p.proposed_cash_cents),
                format!("{:.2}", p.proposed_with_vc_cents),
                format!("{:.2}", p.grid_tie_cash_cents),
                format!("{:.2}", p.savings_cents),
                format!("{:.2}", p.savings_pct),
            ])
            .map_err(|e| csv_err(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| csv_err(path, e.to_string()))?;
    Ok(())
}
