#!/usr/bin/env python3
"""Builds the sfc_py extension module and exercises its main entry points.

Usage: python3 python/smoke_test.py [--debug]

Builds the cdylib with cargo (release unless --debug), copies it next to a
temporary import root as sfc_py.so, then checks a handful of known values
and whole-day invariants.
"""

import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig

ROOT = pathlib.Path(__file__).resolve().parents[1]


def build_module(profile: str) -> pathlib.Path:
    args = ["cargo", "build", "-p", "sfc-py"]
    if profile == "release":
        args.append("--release")
    subprocess.run(args, cwd=ROOT, check=True)
    built = ROOT / "target" / profile / "libsfc_py.so"
    if not built.exists():  # macOS
        built = ROOT / "target" / profile / "libsfc_py.dylib"
    if not built.exists():
        sys.exit(f"no built extension found under target/{profile}")
    ext_suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    import_root = ROOT / "target" / "python"
    import_root.mkdir(parents=True, exist_ok=True)
    dest = import_root / f"sfc_py{ext_suffix}"
    shutil.copy2(built, dest)
    return import_root


def approx(got: float, want: float, tol: float = 1e-6) -> None:
    assert math.isfinite(got) and abs(got - want) <= tol, f"got {got}, want {want}"


def main() -> None:
    profile = "debug" if "--debug" in sys.argv[1:] else "release"
    sys.path.insert(0, str(build_module(profile)))
    import sfc_py

    # PV generation of the reference array over half an hour.
    approx(sfc_py.solar_generation(800.0, 65, 1.952964, 0.30, 0.5), 15.2331192)
    approx(sfc_py.solar_generation(0.0, 65, 1.952964, 0.30, 0.5), 0.0)

    # Virtual cost and its coefficient update.
    approx(sfc_py.virtual_cost(250.0, 5.0), 50.0)
    approx(sfc_py.update_coefficient(250.0, 10.0, 4.0), 256.0)
    approx(sfc_py.update_coefficient(250.0, 0.0, 6.0, step=10.0), 190.0)

    # Case classification boundaries.
    assert sfc_py.classify_case(10.0, 12.0, 5.0) == "case1"
    assert sfc_py.classify_case(10.0, 8.0, 5.0) == "case2"
    assert sfc_py.classify_case(20.0, 8.0, 5.0) == "case3"
    assert sfc_py.case_labels() == ["case1", "case2", "case3"]

    # Closed-form setpoints against frozen values.
    esd = sfc_py.EsdParams(15.0, 0.25, 0.9, 10.0, 10.0)
    raw, clamped = sfc_py.optimal_discharge_case1(5.0, 250.0, 60.0, esd)
    approx(raw, 3.1985329516003973, 1e-9)
    approx(clamped, raw, 0.0)
    raw, clamped = sfc_py.optimal_charge_case2(1.0, 250.0, 36.0, 100.0, esd)
    approx(raw, 1.346254824803841, 1e-9)
    raw3, _ = sfc_py.optimal_charge_case3(1.0, 250.0, 18.0, 100.0, esd)
    approx(raw3, 2.038592830632449, 1e-9)
    assert raw3 > raw

    approx(sfc_py.soc_update(5.0, 0.0, 3.19853, 0.9), 2.121323, 1e-9)
    approx(sfc_py.percent_savings(100.0, 60.0), 40.0, 1e-12)

    # A full default day: balance, bounds, and determinism.
    day = sfc_py.run_day(seed=7)
    records = day["records"]
    assert len(records) == 28
    for r in records:
        supply = r["generation_kwh"] + r["discharge_kwh"] + r["buy_grid_kwh"]
        use = (
            r["sfc_demand_kwh"]
            + r["sell_users_kwh"]
            + r["charge_kwh"]
            + r["sell_grid_kwh"]
        )
        assert abs(supply - use) <= 1e-9, f"slot {r['slot']} unbalanced"
        assert r["charge_kwh"] * r["discharge_kwh"] == 0.0
        assert r["buy_grid_kwh"] * r["sell_grid_kwh"] == 0.0
        assert 0.75 - 1e-9 <= r["soc_after_kwh"] <= 15.0 + 1e-9
    assert day == sfc_py.run_day(seed=7), "rerun with the same seed differs"
    assert day != sfc_py.run_day(seed=8), "different seeds agree suspiciously"

    # The shipped config file reproduces the built-in defaults.
    from_file = sfc_py.run_day(config_path=str(ROOT / "config" / "default.toml"))
    assert from_file == sfc_py.run_day()

    comparison = sfc_py.compare(seed=7)
    assert comparison["fit_cents"] == comparison["grid_tie_cents"]
    assert comparison["modified_cents"] <= comparison["fit_cents"] + 1e-9

    report = sfc_py.verify(instances=100, seed=3)
    assert report["passed"], report

    print("smoke test passed:", len(records), "slots,",
          f"cash {day['cash_cents']:.2f} cents,",
          f"verify max gap {report['max_cost_gap_cents']:.2e} cents")


if __name__ == "__main__":
    main()
