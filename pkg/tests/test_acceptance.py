"""End-to-end acceptance gate: ten criteria, one printed line each.

Each test prints a single PASS/FAIL line (bypassing capture) with the
measured quantity and runtime, then asserts the criterion.
"""

import time

import numpy as np
import pytest

from rodfe import bench, checks
from rodfe.oracles import elastica_oracle


def report(capsys, num, name, ok, detail):
    with capsys.disabled():
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} "
              f"({name}): {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_01_frame_indifference(tmp_path, capsys):
    t0 = time.monotonic()
    rep = bench.run_case("frame_indifference", out_dir=str(tmp_path))
    dt = time.monotonic() - t0
    ok = rep.converged
    worst = -np.inf
    for r in rep.results:
        Wb, We = bench.energies(rep.model, r.state)
        worst = max(worst, Wb, We)
    ok = ok and worst < 1e-10 and dt < 1.0
    report(capsys, 1, "frame indifference", ok,
           f"max energy {worst:.3e} (limit 1e-10), {dt:.2f}s (limit 1s)")


def test_criterion_02_rolling_convergence(tmp_path, capsys):
    t0 = time.monotonic()
    rep = bench.convergence_study("rolling", out_dir=str(tmp_path))
    dt = time.monotonic() - t0
    ok = (rep.meshes == [5, 10, 20, 40, 80, 160]
          and 1.85 <= rep.slope <= 2.15 and dt < 10.0)
    report(capsys, 2, "rolling convergence", ok,
           f"slope {rep.slope:.3f} (band [1.85, 2.15]), {dt:.2f}s (limit 10s)")


def test_criterion_03_unrolling_convergence(tmp_path, capsys):
    t0 = time.monotonic()
    rep = bench.convergence_study("unrolling", out_dir=str(tmp_path))
    dt = time.monotonic() - t0
    ok = (rep.meshes == [5, 10, 20, 40, 80, 160]
          and 1.85 <= rep.slope <= 2.15 and dt < 10.0)
    report(capsys, 3, "unrolling convergence", ok,
           f"slope {rep.slope:.3f} (band [1.85, 2.15]), {dt:.2f}s (limit 10s)")


def test_criterion_04_elastica(tmp_path, capsys):
    t0 = time.monotonic()
    rep = bench.run_case("elastica", mesh=20, out_dir=str(tmp_path))
    dt = time.monotonic() - t0
    L, EI, P_full = 100.0, 1000.0, 10.0 * 1000.0 / 100.0 ** 2
    worst = np.inf
    ok = rep.converged
    if ok:
        worst = 0.0
        for r in rep.results:
            dh, dv = elastica_oracle(r.factor * P_full, EI, L)
            u = r.state.u[rep.case.monitor]
            worst = max(worst, abs(-u[0] - dh), abs(u[1] - dv))
    ok = ok and worst < 0.01 * L and dt < 5.0
    report(capsys, 4, "elastica vs elliptic integrals", ok,
           f"max tip error {worst:.4f} (limit {0.01 * L:g}), "
           f"{dt:.2f}s (limit 5s)")


def test_criterion_05_bent_cantilever(tmp_path, capsys):
    t0 = time.monotonic()
    rep = bench.run_case("bent_cantilever", out_dir=str(tmp_path))
    dt = time.monotonic() - t0
    refs = bench.REFERENCES["bent_cantilever"]
    ok = rep.converged
    worst = np.inf
    if ok:
        worst = 0.0
        pos = {r.factor: bench.positions(rep.model, r.state)[-1]
               for r in rep.results}
        for factor, ref in refs.items():
            rel = np.abs(pos[factor] - np.array(ref)) / np.abs(ref)
            worst = max(worst, rel.max())
    ok = ok and worst < 0.005 and dt < 10.0
    report(capsys, 5, "bent cantilever tip coordinates", ok,
           f"worst component error {100 * worst:.3f}% (limit 0.5%), "
           f"{dt:.2f}s (limit 10s)")


def test_criterion_06_l_frame(tmp_path, capsys):
    rep = bench.run_case("l_frame", out_dir=str(tmp_path))
    ref = np.array(bench.REFERENCES["l_frame"])
    ok = rep.converged
    worst = np.inf
    if ok:
        u = rep.final_state.u[rep.case.monitor]
        worst = (np.abs(u - ref) / np.abs(ref)).max()
    ok = ok and worst < 0.01
    report(capsys, 6, "right-angle frame tip displacement", ok,
           f"worst component error {100 * worst:.3f}% (limit 1%)")


def test_criterion_07_arch_limit_load(tmp_path, capsys):
    t0 = time.monotonic()
    rep = bench.run_case("arch", out_dir=str(tmp_path))
    dt = time.monotonic() - t0
    ok = rep.converged
    peak = -np.inf
    post_ok = False
    if ok:
        loads = [row[1] for row in rep.path_rows]
        peak = max(loads)
        # the path must continue past the limit point (unstable branch)
        post_ok = loads.index(peak) < len(loads) - 1
    ok = ok and 878.0 <= peak <= 915.0 and post_ok and dt < 60.0
    report(capsys, 7, "arch limit load", ok,
           f"peak {peak:.2f} (band [878, 915]), "
           f"unstable branch traced: {post_ok}, {dt:.2f}s (limit 60s)")


def test_criterion_08_spiral_newton_counts(tmp_path, capsys):
    counts = {}
    ok = True
    for mesh in (8, 16):
        rep = bench.run_case("spiral", mesh=mesh,
                             out_dir=str(tmp_path / str(mesh)))
        ok = ok and rep.converged
        counts[mesh] = rep.results[0].iterations if rep.results else -1
    ok = ok and counts[8] <= 5 and counts[8] == counts[16]
    report(capsys, 8, "spiral Newton iteration count", ok,
           f"iterations {counts[8]} @8 elements, {counts[16]} @16 "
           f"(limit 5, must match)")


def test_criterion_09_williams_limit_point(tmp_path, capsys):
    rep = bench.run_case("williams", out_dir=str(tmp_path))
    ok = rep.converged
    detail = "did not converge"
    if ok:
        loads = np.array([row[1] for row in rep.path_rows])
        k = int(np.argmax(loads))
        post = loads[k:]
        ok = 0 < k < len(loads) - 1 and np.all(np.diff(post) < 0.0)
        detail = (f"peak load {loads[k]:.4f} at step {k + 1}/{len(loads)}, "
                  f"strictly decreasing after peak: {bool(np.all(np.diff(post) < 0.0))}")
    report(capsys, 9, "toggle frame limit point", ok, detail)


def test_criterion_10_oracle_suite(capsys):
    t0 = time.monotonic()
    failures = checks.run_all()
    dt = time.monotonic() - t0
    ok = not failures and dt < 30.0
    report(capsys, 10, "randomized oracle suite", ok,
           f"failures: {failures or 'none'}, {dt:.2f}s (limit 30s)")
