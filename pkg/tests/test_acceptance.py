"""End-to-end acceptance checks at the benchmark scale.

Each test prints one PASS/FAIL line for its criterion.  Run with
`pytest tests/test_acceptance.py -v -s` to see the lines as they appear;
the full module takes a few minutes, dominated by the 5-point SNR sweep.
"""

import time
from itertools import product

import numpy as np
import pytest

from dcsparse.channel import dft_matrix, sample_sparse_channel
from dcsparse.harness import ExperimentConfig, run_noiseless_study, run_snr_sweep
from dcsparse.metrics import normalized_sq_error
from dcsparse.seeding import derive_seed, make_rng
from dcsparse.sensing import gaussian_matrix, measure
from dcsparse.solvers import (SolverOptions, SparseProblem, bcqp_gradient,
                              brute_force_l0, dc_gpsr, default_rho,
                              gpsr_baseline, ista, objective_l1, omp,
                              solve_bcqp_gp)
from dcsparse.sparsity import (project_nonneg, sparsity_gap, top_k1_norm,
                               top_k1_subgradient)

N_COMPLEX = 256
N_REAL = 512
M = 128
K = 32
SEEDS = range(20)


@pytest.fixture(scope="module")
def noiseless_runs():
    """20 benchmark-scale noiseless instances solved by DC-GPSR and GPSR."""
    runs = []
    for seed in SEEDS:
        cs = sample_sparse_channel(N_COMPLEX, 16, derive_seed(seed, 0))
        phi = gaussian_matrix(M, N_REAL, derive_seed(seed, 1))
        y = measure(phi, cs.x_real)
        p = SparseProblem(y=y, phi=phi, k=K, rho=default_rho(phi, y))
        t0 = time.perf_counter()
        dc = dc_gpsr(p, ground_truth=cs.x_real)
        dc_wall = time.perf_counter() - t0
        gp = gpsr_baseline(p, ground_truth=cs.x_real)
        runs.append({
            "problem": p,
            "x_true": cs.x_real,
            "dc_nse": normalized_sq_error(cs.x_real, dc.x_hat),
            "dc_outer": dc.outer_iters,
            "dc_wall": dc_wall,
            "dc_trace": dc.trace,
            "dc_x": dc.x_hat,
            "gp_nse": normalized_sq_error(cs.x_real, gp.x_hat),
            "gp_final_l1": gp.trace.l1_objectives[-1],
            "l1_at_truth": p.rho * float(np.abs(cs.x_real).sum()),
        })
    return runs


def test_criterion_1_noiseless_recovery(noiseless_runs, criterion_report):
    hits = sum(r["dc_nse"] <= 1e-20 for r in noiseless_runs)
    slowest = max(r["dc_wall"] for r in noiseless_runs)
    ok = hits >= 18 and slowest <= 2.0
    criterion_report(1, ok, f"noiseless recovery: nse<=1e-20 on {hits}/20 seeds, "
                   f"slowest instance {slowest:.2f}s (<=2s)")
    assert ok


def test_criterion_2_baseline_gap(noiseless_runs, criterion_report):
    in_band = sum(1e-5 <= r["gp_nse"] <= 1e-1 for r in noiseless_runs)
    gap_pos = sum(r["gp_final_l1"] > r["l1_at_truth"] for r in noiseless_runs)
    joint = sum(1e-5 <= r["gp_nse"] <= 1e-1 and r["gp_final_l1"] > r["l1_at_truth"]
                for r in noiseless_runs)
    ok = in_band >= 18 and gap_pos >= 18 and joint >= 18
    criterion_report(2, ok, f"baseline gap: band {in_band}/20, positive gap {gap_pos}/20, "
                   f"joint {joint}/20 (>=18 each)")
    assert ok


def test_criterion_3_outer_speed(noiseless_runs, criterion_report):
    hits = sum(r["dc_outer"] <= 20 for r in noiseless_runs)
    worst = max(r["dc_outer"] for r in noiseless_runs)
    ok = hits >= 18
    criterion_report(3, ok, f"outer-loop speed: <=20 outer steps on {hits}/20 seeds (worst {worst})")
    assert ok


def test_criterion_4_noisy_nmse_25db(criterion_report):
    cfg = ExperimentConfig(n_antennas=N_COMPLEX, sparsity=16, m_measurements=M,
                           k_real=K, snr_grid_db=(25.0,), num_samples=100,
                           solvers=("dc_gpsr",), base_seed=42)
    t0 = time.perf_counter()
    _, summary = run_snr_sweep(cfg)
    elapsed = time.perf_counter() - t0
    nmse_25 = summary[0][2]
    ok = 1e-6 <= nmse_25 <= 1e-4 and elapsed <= 300.0
    criterion_report(4, ok, f"noisy NMSE at 25 dB: {nmse_25:.3e} in [1e-6, 1e-4], "
                   f"runtime {elapsed:.0f}s (<=300s)")
    assert ok


def test_criterion_5_ranking_across_snr(criterion_report):
    cfg = ExperimentConfig(n_antennas=N_COMPLEX, sparsity=16, m_measurements=M,
                           k_real=K, snr_grid_db=(5.0, 10.0, 15.0, 20.0, 25.0),
                           num_samples=100, solvers=("dc_gpsr", "gpsr", "ista", "omp"),
                           base_seed=42)
    _, summary = run_snr_sweep(cfg)
    table = {}
    for solver, snr, value in summary:
        table.setdefault(snr, {})[solver] = value
    lines = []
    ok = True
    for snr in sorted(table):
        row = table[snr]
        lowest = all(row["dc_gpsr"] < row[s] for s in ("gpsr", "ista", "omp"))
        ok = ok and lowest
        lines.append(f"{snr:g} dB: dc={row['dc_gpsr']:.2e} gpsr={row['gpsr']:.2e} "
                     f"ista={row['ista']:.2e} omp={row['omp']:.2e} lowest={lowest}")
    criterion_report(5, ok, "ranking: DC-GPSR lowest NMSE at every SNR\n  " + "\n  ".join(lines))
    assert ok


def test_criterion_6_oracle_equivalence(criterion_report):
    matches = 0
    for seed in range(50):
        phi = gaussian_matrix(8, 12, derive_seed(6000, seed))
        rng = make_rng(derive_seed(6001, seed))
        x_true = np.zeros(12)
        x_true[rng.choice(12, 2, replace=False)] = rng.standard_normal(2)
        y = phi.phi @ x_true
        p = SparseProblem(y=y, phi=phi, k=2, rho=default_rho(phi, y))
        x_dc = dc_gpsr(p).x_hat
        x_bf = brute_force_l0(y, phi, 2)
        sup_dc = set(np.flatnonzero(top_k1_subgradient(x_dc, 2).w))
        sup_bf = set(np.flatnonzero(top_k1_subgradient(x_bf, 2).w))
        matches += sup_dc == sup_bf
    ok = matches >= 45
    criterion_report(6, ok, f"oracle equivalence: support match on {matches}/50 tiny instances (>=45)")
    assert ok


def test_criterion_7_property_suites(noiseless_runs, tmp_path, criterion_report):
    checks = {}

    # Gradient vs central finite differences on a small instance.
    phi = gaussian_matrix(6, 10, derive_seed(7000, 0))
    rng = make_rng(derive_seed(7000, 1))
    x_t = np.zeros(10)
    x_t[[2, 7, 9]] = rng.standard_normal(3)
    p = SparseProblem(y=phi.phi @ x_t, phi=phi, k=3, rho=0.2)
    w_x = top_k1_subgradient(rng.standard_normal(10), 3).w
    w_z = np.concatenate([np.maximum(w_x, 0), np.maximum(-w_x, 0)])
    ptp = phi.phi.T @ phi.phi
    B = np.block([[ptp, -ptp], [-ptp, ptp]])
    pty = phi.phi.T @ p.y
    c = np.concatenate([-pty, pty]) + p.rho * (1.0 - w_z)
    worst = 0.0
    h = 1e-6
    for _ in range(20):
        z = np.abs(rng.standard_normal(20))
        grad = bcqp_gradient(z, p, w_z)
        fd = np.zeros(20)
        for i in range(20):
            e = np.zeros(20)
            e[i] = h
            fd[i] = ((0.5 * (z + e) @ B @ (z + e) + c @ (z + e))
                     - (0.5 * (z - e) @ B @ (z - e) + c @ (z - e))) / (2 * h)
        worst = max(worst, np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-12))
    checks["gradient_fd"] = worst <= 1e-5

    # DC outer descent on every benchmark run of criterion 1.
    checks["dc_outer_descent"] = all(
        all(b <= a + 1e-9 for a, b in zip(r["dc_trace"].outer_objectives,
                                          r["dc_trace"].outer_objectives[1:]))
        for r in noiseless_runs)

    # Inner-loop monotone descent.
    gvals = []
    solve_bcqp_gp(p, w_z, np.zeros(20), SolverOptions(inner_tol=1e-300, inner_max=400),
                  on_iterate=lambda k, z, g, a: gvals.append(g))
    checks["inner_descent"] = all(b <= a + 1e-12 for a, b in zip(gvals, gvals[1:]))

    # Top-(k,1) norm identities.
    ident = True
    for _ in range(25):
        x = rng.standard_normal(int(rng.integers(1, 15)))
        ident &= top_k1_norm(x, 1) == pytest.approx(np.max(np.abs(x)))
        ident &= top_k1_norm(x, x.size) == pytest.approx(np.abs(x).sum())
    checks["topk_identities"] = ident

    # Subgradient brute-force optimality for n <= 8.
    sub_ok = True
    for n in (4, 6, 8):
        x = rng.standard_normal(n)
        for k in range(1, n + 1):
            best = max(float(x @ np.array(w)) for w in product((-1, 0, 1), repeat=n)
                       if sum(abs(e) for e in w) == k)
            sub_ok &= abs(x @ top_k1_subgradient(x, k).w - best) <= 1e-12
    checks["subgradient_bruteforce"] = sub_ok

    # Sparsity gap <=> l0 equivalence, exhaustive on {-1,0,1}^6.
    gap_ok = True
    for entries in product((-1.0, 0.0, 1.0), repeat=6):
        x = np.array(entries)
        nnz = np.count_nonzero(x)
        for k in range(1, 7):
            gap_ok &= (sparsity_gap(x, k) == 0.0) == (nnz <= k)
    checks["gap_l0_equivalence"] = gap_ok

    # DFT unitarity.
    checks["dft_unitarity"] = all(
        np.max(np.abs(dft_matrix(n) @ dft_matrix(n).conj().T - np.eye(n))) <= 1e-12
        for n in (1, 2, 4, 8, 64))

    # Projection idempotence and nonexpansiveness.
    proj_ok = True
    for _ in range(25):
        a, b = rng.standard_normal(12), rng.standard_normal(12)
        proj_ok &= np.array_equal(project_nonneg(project_nonneg(a)), project_nonneg(a))
        proj_ok &= (np.linalg.norm(project_nonneg(a) - project_nonneg(b))
                    <= np.linalg.norm(a - b) + 1e-15)
    checks["projection"] = proj_ok

    # Determinism: byte-identical benchmark reruns except wall time.
    cfg = ExperimentConfig(n_antennas=16, sparsity=2, m_measurements=12, k_real=4,
                           snr_grid_db=(10.0,), num_samples=2, solvers=("dc_gpsr", "omp"),
                           base_seed=9, solver_options=SolverOptions(inner_max=400,
                                                                     outer_max=25))
    run_snr_sweep(cfg, out_dir=tmp_path / "a")
    run_snr_sweep(cfg, out_dir=tmp_path / "b")

    def strip_wall(path):
        return ["," .join(line.split(",")[:-1])
                for line in path.read_text().strip().split("\n")]

    checks["determinism"] = (
        strip_wall(tmp_path / "a" / "records.csv") == strip_wall(tmp_path / "b" / "records.csv")
        and (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "b" / "summary.csv").read_bytes())

    ok = all(checks.values())
    detail = ", ".join(f"{name}={'ok' if good else 'FAIL'}" for name, good in checks.items())
    criterion_report(7, ok, f"property suites: {detail}")
    assert ok, checks


def test_criterion_8_convex_consistency(criterion_report):
    worst = 0.0
    for seed in range(20):
        phi = gaussian_matrix(10, 20, derive_seed(8000, seed))
        y = make_rng(derive_seed(8001, seed)).standard_normal(10)
        p = SparseProblem(y=y, phi=phi, k=3, rho=0.1 * np.max(np.abs(phi.phi.T @ y)))
        a = gpsr_baseline(p, opts=SolverOptions(inner_tol=1e-300, inner_max=60_000))
        b = ista(p, opts=SolverOptions(inner_tol=1e-15, inner_max=200_000))
        worst = max(worst, abs(objective_l1(a.x_hat, p) - objective_l1(b.x_hat, p)))
    ok = worst <= 1e-6
    criterion_report(8, ok, f"convex consistency: max |gpsr - ista| l1-objective difference "
                   f"{worst:.2e} (<=1e-6) over 20 instances")
    assert ok
