//! Plain-text scenario configuration files.
//!
//! A config is a TOML key-value file mirroring [`ScenarioConfig`]; every key
//! is optional and missing keys fall back to the reference defaults. Series
//! can be pulled from `slot,value` CSV files; relative paths are resolved
//! against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::domain::SolarArrayParams;
use crate::error::{Error, Result};
use crate::io::load_series_csv;
use crate::scenario::{DemandProfileSpec, IrradianceSpec, ScenarioConfig};
use crate::vc::VcParams;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    slot_count: Option<usize>,
    slot_duration_hours: Option<f64>,
    day_start_hour: Option<f64>,
    rng_seed: Option<u64>,
    array: Option<ArraySection>,
    esd: Option<EsdSection>,
    vc: Option<VcSection>,
    prices: Option<PricesSection>,
    irradiance: Option<IrradianceSection>,
    sfc_demand: Option<SfcDemandSection>,
    household_demand: Option<HouseholdSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArraySection {
    panel_count: Option<u32>,
    panel_area_m2: Option<f64>,
    efficiency: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EsdSection {
    capacity_kwh: Option<f64>,
    floor_kwh: Option<f64>,
    efficiency: Option<f64>,
    rate_limit_kwh: Option<f64>,
    cycle_cost_cents: Option<f64>,
    initial_soc_kwh: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VcSection {
    a_initial: Option<f64>,
    step: Option<f64>,
    a_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PricesSection {
    grid_sell_csv: Option<PathBuf>,
    sell_factor: Option<f64>,
    buy_factor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrradianceSection {
    csv: Option<PathBuf>,
    peak_w_per_m2: Option<f64>,
    peak_slot: Option<f64>,
    width_slots: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SfcDemandSection {
    csv: Option<PathBuf>,
    energy_per_trip_kwh: Option<f64>,
    peak_trips: Option<(u32, u32)>,
    offpeak_trips: Option<(u32, u32)>,
    peak_windows: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HouseholdSection {
    csv: Option<PathBuf>,
    range_kwh: Option<(f64, f64)>,
    scale: Option<f64>,
}

fn resolve_path(base_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

/// Loads a scenario config file, merging it over the defaults.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read {}: {e}", path.display()))
    })?;
    let file: FileConfig = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut cfg = ScenarioConfig::default();

    if let Some(v) = file.slot_count {
        cfg.slot_count = v;
    }
    if let Some(v) = file.slot_duration_hours {
        cfg.slot_hours = v;
    }
    if let Some(v) = file.day_start_hour {
        cfg.day_start_hour = v;
    }
    if let Some(v) = file.rng_seed {
        cfg.rng_seed = v;
    }

    if let Some(array) = file.array {
        cfg.array = SolarArrayParams::new(
            array.panel_count.unwrap_or(cfg.array.panel_count()),
            array.panel_area_m2.unwrap_or(cfg.array.panel_area_m2()),
            array.efficiency.unwrap_or(cfg.array.efficiency()),
        )?;
    }

    if let Some(esd) = file.esd {
        if let Some(v) = esd.capacity_kwh {
            cfg.esd_capacity_kwh = v;
        }
        if let Some(v) = esd.floor_kwh {
            cfg.esd_floor_kwh = v;
        }
        if let Some(v) = esd.efficiency {
            cfg.esd_efficiency = v;
        }
        if let Some(v) = esd.rate_limit_kwh {
            cfg.esd_rate_limit_kwh = v;
        }
        if esd.cycle_cost_cents.is_some() {
            cfg.cycle_cost_cents = esd.cycle_cost_cents;
        }
        if let Some(v) = esd.initial_soc_kwh {
            cfg.initial_soc_kwh = v;
        }
    }

    if let Some(vc) = file.vc {
        cfg.vc = VcParams::new(
            vc.a_initial.unwrap_or(cfg.vc.a_initial()),
            vc.step.unwrap_or(cfg.vc.step()),
            vc.a_floor.unwrap_or(cfg.vc.a_floor()),
        )?;
    }

    if let Some(prices) = file.prices {
        if let Some(csv) = prices.grid_sell_csv {
            cfg.grid_sell_series = Some(load_series_csv(&resolve_path(base_dir, &csv))?);
        }
        if let Some(v) = prices.sell_factor {
            cfg.sell_factor = v;
        }
        if let Some(v) = prices.buy_factor {
            cfg.buy_factor = v;
        }
    }

    if let Some(irr) = file.irradiance {
        if let Some(csv) = irr.csv {
            if irr.peak_w_per_m2.is_some() || irr.peak_slot.is_some() || irr.width_slots.is_some()
            {
                return Err(Error::Config(
                    "[irradiance] takes either `csv` or synthetic bell keys, not both".into(),
                ));
            }
            cfg.irradiance =
                IrradianceSpec::Series(load_series_csv(&resolve_path(base_dir, &csv))?);
        } else {
            cfg.irradiance = IrradianceSpec::Synthetic {
                peak_w_m2: irr.peak_w_per_m2.unwrap_or(900.0),
                peak_slot: irr.peak_slot,
                width_slots: irr.width_slots,
            };
        }
    }

    let defaults = DemandProfileSpec::default();
    if let Some(sfc) = file.sfc_demand {
        if let Some(csv) = sfc.csv {
            cfg.sfc_demand_series = Some(load_series_csv(&resolve_path(base_dir, &csv))?);
        }
        cfg.demand.energy_per_trip_kwh =
            sfc.energy_per_trip_kwh.unwrap_or(defaults.energy_per_trip_kwh);
        cfg.demand.peak_trips = sfc.peak_trips.unwrap_or(defaults.peak_trips);
        cfg.demand.offpeak_trips = sfc.offpeak_trips.unwrap_or(defaults.offpeak_trips);
        cfg.demand.peak_windows = sfc.peak_windows.unwrap_or(defaults.peak_windows);
    }
    if let Some(hh) = file.household_demand {
        if let Some(csv) = hh.csv {
            cfg.household_demand_series = Some(load_series_csv(&resolve_path(base_dir, &csv))?);
        }
        cfg.demand.household_range_kwh = hh.range_kwh.unwrap_or(defaults.household_range_kwh);
        cfg.demand.household_scale = hh.scale.unwrap_or(defaults.household_scale);
    }

    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn empty_config_is_the_default_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "empty.toml", "");
        assert_eq!(load_config(&path).unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn partial_sections_override_only_their_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            &dir,
            "partial.toml",
            "rng_seed = 99\n[array]\npanel_count = 80\n[vc]\na_initial = 150.0\n",
        );
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.rng_seed, 99);
        assert_eq!(cfg.array.panel_count(), 80);
        assert!((cfg.array.efficiency() - 0.30).abs() < 1e-12);
        assert!((cfg.vc.a_initial() - 150.0).abs() < 1e-12);
        assert!((cfg.vc.step() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_paths_resolve_relative_to_the_config() {
        let dir = tempfile::tempdir().unwrap();
        write_file(&dir, "p.csv", "slot,value\n1,30\n2,31\n3,32\n");
        let path = write_file(
            &dir,
            "cfg.toml",
            "slot_count = 3\n[prices]\ngrid_sell_csv = \"p.csv\"\n",
        );
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.grid_sell_series, Some(vec![30.0, 31.0, 32.0]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "typo.toml", "slot_cont = 28\n");
        assert!(load_config(&path).is_err());
    }

    #[test]
    fn irradiance_csv_and_bell_keys_conflict() {
        let dir = tempfile::tempdir().unwrap();
        write_file(&dir, "i.csv", "slot,value\n1,0\n2,500\n3,0\n");
        let path = write_file(
            &dir,
            "cfg.toml",
            "[irradiance]\ncsv = \"i.csv\"\npeak_w_per_m2 = 900.0\n",
        );
        assert!(load_config(&path).is_err());
    }
}
