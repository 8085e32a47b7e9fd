"""Build the frozen rate-recovery band fixture used by the acceptance tests.

Runs the moving-window pipeline on many independently seeded simulations of
the same 5-asset market, records each replicate's worst deviation of the raw
rate estimate from the model-implied rate, and freezes the 99% quantile of
those deviations as the acceptance band. A separate, fixed test seed is then
verified to stay inside the band before anything is written.

One-off, deterministic: rerunning reproduces tests/fixtures/recovery_band.json
byte for byte.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import numpy as np

from shadowrate.pipeline import PipelineConfig, run_srr_series
from shadowrate.solver import build_phi, solve_svd
from shadowrate.synthetic import GbmSpec, simulate_gbm

MU = [4e-4, 6e-4, 5e-4, 3e-4, 7e-4]
SIGMA = [
    [0.012, 0.004, 0.002, 0.001],
    [0.018, -0.006, 0.003, 0.002],
    [0.009, 0.008, -0.004, 0.001],
    [0.015, 0.002, 0.005, -0.003],
    [0.021, -0.003, -0.002, 0.004],
]
S0 = [100.0, 80.0, 120.0, 60.0, 90.0]
STEPS = 5000
WINDOW = 2500
REPLICATES = 200
SEED_BASE = 77000  # band replicates use SEED_BASE + 1 .. SEED_BASE + REPLICATES
TEST_SEED = 424243  # deliberately outside the band-seed range
BAND_QUANTILE = 0.99

OUT_PATH = Path(__file__).resolve().parents[1] / "tests" / "fixtures" \
    / "recovery_band.json"


def nu_true() -> float:
    mu = np.array(MU)
    sigma = np.array(SIGMA)
    mu_log = mu - 0.5 * np.sum(sigma**2, axis=1)
    return solve_svd(build_phi(sigma, mu_log)).nu


def max_deviation(seed: int, target: float) -> float:
    spec = GbmSpec(mu=np.array(MU), sigma=np.array(SIGMA), s0=np.array(S0),
                   steps=STEPS, seed=seed)
    _, panel = simulate_gbm(spec)
    run = run_srr_series(panel, PipelineConfig(window_m=WINDOW))
    if any(row.nu_raw is None for row in run.rows):
        raise RuntimeError(f"seed {seed}: degenerate window in a healthy "
                           f"simulation")
    if len(run.rows) != STEPS - 1 - WINDOW + 1:
        raise RuntimeError(f"seed {seed}: unexpected row count "
                           f"{len(run.rows)}")
    return max(abs(row.nu_raw - target) for row in run.rows)


def main() -> int:
    target = nu_true()
    started = time.time()
    deviations = []
    for k in range(1, REPLICATES + 1):
        deviations.append(max_deviation(SEED_BASE + k, target))
        if k % 20 == 0:
            print(f"  {k}/{REPLICATES} replicates "
                  f"({time.time() - started:.0f}s)", flush=True)
    band = float(np.quantile(np.array(deviations), BAND_QUANTILE))

    test_dev = max_deviation(TEST_SEED, target)
    print(f"band={band:.6e}  test-seed max deviation={test_dev:.6e}")
    if test_dev > band:
        print("test seed falls outside the band; pick another seed",
              file=sys.stderr)
        return 1

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps({
        "mu": MU,
        "sigma": SIGMA,
        "s0": S0,
        "steps": STEPS,
        "window": WINDOW,
        "replicates": REPLICATES,
        "seed_base": SEED_BASE,
        "band_quantile": BAND_QUANTILE,
        "band": band,
        "nu_true": target,
        "test_seed": TEST_SEED,
        "test_seed_max_deviation": test_dev,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT_PATH}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
