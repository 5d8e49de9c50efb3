"""Acceptance suite for the built-in quasi-periodic example.

Each test records one PASS/FAIL line; the lines are printed together in the
terminal summary (see ``conftest.py``). Run alone with::

    pytest tests/test_acceptance.py -v
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from lvpatch import cli
from lvpatch.almostperiod import almost_period_scan
from lvpatch.bounds import RegionEstimate, check_dispersal_bound, estimate_ultimate_bounds
from lvpatch.integrator import IntegrationOptions, integrate, integrate_batch
from lvpatch.model import SystemParams
from lvpatch.stability import attractivity_experiment, check_contraction, verify_decay

from conftest import MERGE_ICS, logistic
from randparams import random_params

pytestmark = pytest.mark.acceptance


@pytest.fixture
def record(acceptance_lines):
    def _record(number, ok, detail):
        acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}")
        return ok
    return _record


@pytest.fixture(scope="module")
def c2_region(ex51):
    t = time.perf_counter()
    region = estimate_ultimate_bounds(ex51, seed=42)
    return region, time.perf_counter() - t


def test_c1_dispersal_margins(ex51, record):
    rep = check_dispersal_bound(ex51)
    t = time.perf_counter()
    for _ in range(100):
        check_dispersal_bound(ex51)
    per_call = (time.perf_counter() - t) / 100
    ok = np.allclose(rep.margins, (2.8, 2.8, 1.8, 2.0), rtol=0, atol=1e-12) and rep.holds and per_call < 1e-3
    record(1, ok, f"margins={tuple(round(m, 12) for m in rep.margins)}, {per_call * 1e6:.0f} us/call")
    assert ok


def test_c2_contraction_constants(ex51, c2_region, record):
    unit = check_contraction(ex51, RegionEstimate.uniform(1.0, 2.0))
    exact = np.allclose(unit.margins, (1.35, 1.1, 1.8, 1.8), rtol=0, atol=1e-12) \
        and abs(unit.eta - 1.1) <= 1e-12 and abs(unit.c - 1.1) <= 1e-12
    region, seconds = c2_region
    emp = check_contraction(ex51, region)
    ok = exact and emp.holds and seconds < 120
    record(2, ok, f"unit P={tuple(round(p, 12) for p in unit.margins)} eta={unit.eta:.12g} c={unit.c:.12g}; "
                  f"empirical holds={emp.holds} c={emp.c:.4f}, region estimate {seconds:.1f} s")
    assert ok


def test_c3_positivity_suite(record):
    rng = np.random.default_rng(20240601)
    params = [random_params(rng) for _ in range(1000)]
    states = rng.uniform(0.01, 10.0, (1000, 4))
    t = time.perf_counter()
    nonpositive = 0
    smallest = math.inf
    for i in range(0, 1000, 50):
        for tr in integrate_batch(params[i:i + 50], states[i:i + 50], 0.0, 50.0, IntegrationOptions()):
            nonpositive += int(np.sum(tr.z <= 0))
            smallest = min(smallest, float(tr.z.min()))
    seconds = time.perf_counter() - t
    ok = nonpositive == 0 and seconds < 300
    record(3, ok, f"1000 sets, {nonpositive} nonpositive samples, smallest {smallest:.3g}, {seconds:.0f} s")
    assert ok


def test_c4_integrator_oracle(record):
    logistic_params = SystemParams.constant(r1=1.0, a11=1.0)
    tr = integrate(logistic_params, [0.5, 1, 1, 1], 0.0, 20.0)
    err20 = abs(tr.final[0] - logistic(20.0, 0.5))

    def max_error(h):
        run = integrate(logistic_params, [0.1, 1, 1, 1], 0.0, 10.0, IntegrationOptions(h_init=h, h_min=1e-6))
        return np.max(np.abs(run.z[:, 0] - logistic(run.t, 0.1)))

    errs = [max_error(h) for h in (0.2, 0.1, 0.05)]
    ratios = [float(a / b) for a, b in zip(errs, errs[1:])]
    ok = err20 < 1e-4 and all(8.0 <= r <= 32.0 for r in ratios)
    record(4, ok, f"|err(20)|={err20:.2e}, halving ratios {[round(r, 2) for r in ratios]}")
    assert ok


def test_c5_attractivity(ex51, record):
    rep = attractivity_experiment(ex51, MERGE_ICS, 300.0, 1e-3)
    times = [p.time for p in rep.pairs]
    after = rep.max_after(200.0)
    ok = rep.all_converged and max(times) < 200.0 and after <= 2e-3
    record(5, ok, f"merge times {[round(x, 2) for x in times]}, max difference after t=200 {after:.2e}")
    assert ok


def test_c6_lyapunov_decay(ex51, c2_region, record):
    cond = check_contraction(ex51, c2_region[0])
    rep = verify_decay(ex51, (1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.5, 0.8), 100.0, 200.0, cond.c, tol=1e-8)
    ok = rep.violations == 0 and rep.rate >= cond.c
    record(6, ok, f"c={cond.c:.4f}, violations={rep.violations}/{len(rep.t)}, fitted rate {rep.rate:.4f}, "
                  f"largest c under the envelope {rep.max_envelope_rate():.4f}")
    assert ok


def test_c7_almost_period(ex51_long, record):
    t = time.perf_counter()
    cands = almost_period_scan(ex51_long, (100.0, 150.0), (150.0, 200.0), 0.01, 0.2)
    seconds = time.perf_counter() - t
    target = 58 * math.pi
    near = [c for c in cands if c.accepted and abs(c.shift - target) <= 0.1]
    ok = bool(near) and seconds < 180
    best = near[0] if near else cands[0]
    record(7, ok, f"candidate T={best.shift:.2f} defect={best.defect:.4f} (58 pi = {target:.2f}), {seconds:.1f} s")
    assert ok


def _csv_bytes(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.glob("*.csv"))}


def test_c8_determinism(tmp_path, record):
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["example51", "--out", str(out), "-q"]) == cli.EXIT_OK
        runs.append(_csv_bytes(out))
    same = runs[0].keys() == runs[1].keys() and all(runs[0][k] == runs[1][k] for k in runs[0])
    ok = same and len(runs[0]) > 0
    record(8, ok, f"{len(runs[0])} CSV files, byte-identical={same}")
    assert ok
