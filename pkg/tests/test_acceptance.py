"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
the captured output of a failure) and asserts the criterion.  Expensive runs
(the 10^6-sample estimates, the 256-dimensional Choi spectrum) are session
fixtures shared with the unit tests.
"""

import math
import time

import numpy as np
import pytest

from echochan import channels, estimators, ladder, protocols, reports
from echochan.protocols import (
    optimize_flagged_rate,
    run_dephased_c2,
    run_ebit_via_back,
    run_erasure_conversion,
    run_qubit_via_ebit,
    run_qubit_via_two_uses_back,
    run_qubit_via_two_way,
    run_superdense_via_three_uses,
)
from tests.conftest import ACCEPTANCE_SEED

HOLEVO_22_TARGET = 1.0 + (math.pi ** 2 / 18.0 - 5.0 / 6.0) / math.log(2.0)
COHERENT_22_TARGET = 0.4262   # reported to four digits
TWO_MINUS_SQRT2 = 2.0 - math.sqrt(2.0)


def report(criterion: str, passed: bool, detail: str):
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    assert passed, f"{criterion}: {detail}"


def quadrature_holevo_target(n: int = 400) -> float:
    """Independent oracle for the (2,2) Holevo constant: 2-D Gauss-Legendre
    quadrature of the closed-form per-flag entropy over weight and overlap."""
    xs, ws = np.polynomial.legendre.leggauss(n)
    xs = 0.5 * (xs + 1.0)
    ws = 0.5 * ws
    p, f = np.meshgrid(xs, xs, indexing="ij")
    lam = 0.5 * (1.0 + np.sqrt(np.maximum(0.0, 1 - 4 * p * (1 - p) * (1 - f))))
    h = np.zeros_like(lam)
    inner = (lam > 0) & (lam < 1)
    li = lam[inner]
    h[inner] = -(li * np.log2(li) + (1 - li) * np.log2(1 - li))
    return 1.0 - float(np.sum(np.outer(ws, ws) * h))


def quadrature_coherent_target(n: int = 400) -> float:
    """Independent oracle for the (2,2) coherent-information value, using
    the trace-overlap density of Haar qubit unitaries."""
    xs, ws = np.polynomial.legendre.leggauss(n)
    p = 0.5 * (xs + 1.0)
    wp = 0.5 * ws
    phi = math.pi * xs
    wphi = math.pi * ws * (1.0 - np.cos(phi)) / (2.0 * math.pi)
    overlap = np.cos(phi / 2.0) ** 2
    pp, ff = np.meshgrid(p, overlap, indexing="ij")
    lam = 0.5 * (1.0 + np.sqrt(np.maximum(0.0, 1 - 4 * pp * (1 - pp) * (1 - ff))))
    h = np.zeros_like(lam)
    inner = (lam > 0) & (lam < 1)
    li = lam[inner]
    h[inner] = -(li * np.log2(li) + (1 - li) * np.log2(1 - li))
    return 1.0 - float(np.sum(np.outer(wp, wphi) * h))


class TestCriterion01Holevo:
    def test_constant_against_quadrature_oracle(self):
        assert abs(HOLEVO_22_TARGET - quadrature_holevo_target()) < 1e-9

    def test_holevo_estimate(self, ch_r22_1m):
        est, elapsed = ch_r22_1m
        dev = abs(est.mean - HOLEVO_22_TARGET)
        ok = (dev <= 3 * est.stderr and est.stderr <= 5e-4 and elapsed < 60.0)
        report("criterion 1 (one-shot Holevo, 10^6 samples)", ok,
               f"estimate {est.mean:.6f} vs {HOLEVO_22_TARGET:.6f}, "
               f"stderr {est.stderr:.2e}, {elapsed:.1f}s")


class TestCriterion02CoherentInfo:
    def test_coherent_estimate(self, ic_r22_1m):
        est = ic_r22_1m
        # sanity: the four-digit target matches the quadrature oracle
        assert abs(quadrature_coherent_target() - COHERENT_22_TARGET) < 5e-5
        dev = abs(est.mean - COHERENT_22_TARGET)
        ok = dev <= 3 * est.stderr
        report("criterion 2 (one-shot coherent information)", ok,
               f"estimate {est.mean:.6f} vs {COHERENT_22_TARGET}, "
               f"stderr {est.stderr:.2e}")


class TestCriterion03EchoProtocols:
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_all_three_protocols(self, d):
        runners = {"two-way": run_qubit_via_two_way,
                   "ebit-via-back": run_ebit_via_back,
                   "qubit-via-ebit": run_qubit_via_ebit}
        worst = 1.0
        for name, runner in runners.items():
            res = runner(d, 1000, seed=ACCEPTANCE_SEED + 10 * d,
                         keep_traces=False)
            worst = min(worst, res.min_fidelity)
            assert res.echo_mismatches == 0, name
        ok = worst >= 1 - 1e-9
        report(f"criterion 3 (echo protocols, d={d})", ok,
               f"min per-trial fidelity {worst:.2e} over 3x1000 trials, "
               f"echo audit exact")


class TestCriterion04Compositions:
    def test_qubit_from_two_uses(self):
        res = run_qubit_via_two_uses_back(2, 1000, seed=ACCEPTANCE_SEED + 40,
                                          keep_traces=False)
        ok = res.min_fidelity >= 1 - 1e-9 and res.ledger.channel_uses == 2
        report("criterion 4a (qubit via 2 uses + back)", ok,
               f"min fidelity {res.min_fidelity:.2e}, "
               f"{res.ledger.channel_uses} uses")

    def test_superdense_all_messages(self):
        total_errors = 0
        for m in range(4):
            res = run_superdense_via_three_uses(
                1000, seed=ACCEPTANCE_SEED + 50 + m,
                message=(m >> 1, m & 1))
            total_errors += res.bit_errors
            assert res.ledger.channel_uses == 3
        ok = total_errors == 0
        report("criterion 4b (superdense via 3 uses + back)", ok,
               f"{total_errors} bit errors over 4x1000 trials, 3 uses each")


class TestCriterion05SimplifiedChi:
    def test_closed_form_and_scan(self):
        from echochan.linalg import binary_entropy
        from echochan.states import basis_state
        eigenstate = estimators.simplified_chi(basis_state(2, 0))
        exact = 0.5 + 0.5 * (1 - binary_entropy(0.25))
        assert eigenstate == exact  # closed form, no tolerance
        mc = estimators.simplified_chi_mc(basis_state(2, 0), 100_000,
                                          ACCEPTANCE_SEED + 60)
        scan = estimators.simplified_chi_scan(512, mc_samples=50_000,
                                              seed=ACCEPTANCE_SEED + 61)
        ok = (abs(mc.mean - exact) <= 3 * mc.stderr
              and scan.exceeds_eigenstate_value
              and all(c.consistent for c in scan.mc_checks))
        report("criterion 5 (simplified-channel chi)", ok,
               f"closed form {exact:.6f}, MC {mc.mean:.6f}+-{mc.stderr:.1e}; "
               f"scan max {scan.max_value:.6f} exceeds the eigenstate value "
               f"(discrepancy with the published maximum flagged)")

    def test_discrepancy_reported_not_resolved(self):
        rep = reports.build_report_simplified(
            seed=ACCEPTANCE_SEED + 62, scan_resolution=256,
            mc_samples=20_000, erasure_trials=10_000, grid_resolution=101)
        claimed = rep.entries["C_H_claimed_max"]
        computed = rep.entries["C_H"]
        ok = (claimed.tag == "paper-reported-unverified"
              and computed.value > claimed.value + 1e-3
              and "flagged" in computed.note)
        report("criterion 5 (flagged finding in the report)", ok,
               f"model maximum {computed.value:.6f} vs claimed "
               f"{claimed.value:.6f}, tags preserved")


class TestCriterion06DephasedChannel:
    def test_choi_is_ppt(self, dephased_choi_ppt):
        _, ok, min_eig = dephased_choi_ppt
        report("criterion 6a (dephased Choi PPT)", ok and min_eig >= -1e-10,
               f"min partial-transpose eigenvalue {min_eig:.2e}")

    def test_c2_protocol_and_audit(self):
        res = run_dephased_c2(10_000, seed=ACCEPTANCE_SEED + 70)
        ok = (res.bit_errors == 0 and res.audit["message_independent"]
              and res.audit["counterfactual_ok"] == 10_000)
        report("criterion 6b (dephased bit protocol)", ok,
               f"{res.bit_errors} errors over {res.trials} bits; "
               f"side conversation independent in all counterfactual replays")

    def test_dephased_holevo_matches_standard(self, ch_r22_1m, ch_dephased_1m):
        standard, _ = ch_r22_1m
        dephased = ch_dephased_1m
        joint = math.hypot(standard.stderr, dephased.stderr)
        dev = abs(standard.mean - dephased.mean)
        ok = dev <= 3 * joint
        report("criterion 6c (dephased C_H equals standard C_H)", ok,
               f"{dephased.mean:.6f} vs {standard.mean:.6f}, "
               f"joint 3*stderr {3 * joint:.2e}")


class TestCriterion07ErasureConversion:
    def test_erasure_statistics(self):
        res = run_erasure_conversion(100_000, seed=ACCEPTANCE_SEED + 80)
        ok = (res.misses == 0
              and abs(res.erasure_fraction - 0.5) <= 3 * res.stderr
              and res.q2_lower_bound == 0.5)
        report("criterion 7a (erasure conversion)", ok,
               f"fraction {res.erasure_fraction:.4f} over {res.trials} "
               f"trials, {res.misses} misses, bound 0.5 recorded")

    def test_flagged_rate_optimum(self):
        res = optimize_flagged_rate(201, seed=ACCEPTANCE_SEED + 81,
                                    sim_trials=20_000)
        grid_max = self._brute_force_grid_max()
        ok = (abs(res.best_rate - TWO_MINUS_SQRT2) <= 1e-6
              and res.best_rate >= grid_max - 1e-9
              and res.sim_misses == 0
              and abs(res.sim_rate - res.best_rate) <= 3 * res.sim_stderr)
        report("criterion 7b (flagged-rate optimum)", ok,
               f"optimum {res.best_rate:.9f} vs 2-sqrt(2) "
               f"{TWO_MINUS_SQRT2:.9f}; independent grid max {grid_max:.9f} "
               f"over {201 * 201} points; simulation zero-miss")

    @staticmethod
    def _brute_force_grid_max() -> float:
        """Independent oracle: evaluate the conclusive-clean rate from Born
        rules directly on a 201x201 grid (>= 10^4 points)."""
        z1 = np.array([0.0, 1.0])                      # Z trigger |1>
        xm = np.array([1.0, -1.0]) / math.sqrt(2.0)    # X trigger |->
        best = -1.0
        weights = np.linspace(0.0, 1.0, 201)
        angles = np.linspace(0.0, math.pi / 2.0, 201)
        for a in weights:
            for th in angles:
                s1 = np.array([math.cos(th), math.sin(th)])
                s2 = np.array([-math.sin(th), math.cos(th)])
                psi = (math.sqrt(a) * np.outer(s1, [1, 0])
                       + math.sqrt(1 - a) * np.outer(s2, [0, 1]))
                rate = 0.0
                for trig in (z1, xm):
                    r_trig = trig @ psi          # unnormalized reference
                    norm2 = float(r_trig @ r_trig)
                    if norm2 < 1e-15:
                        rate += 0.5
                        continue
                    r_hat = r_trig / math.sqrt(norm2)
                    rho_ref = psi.T @ psi        # reference marginal
                    rate += 0.5 * (1.0 - float(r_hat @ rho_ref @ r_hat))
                best = max(best, rate)
        return best


class TestCriterion08TrendScan:
    def test_strictly_decreasing(self):
        points = estimators.trend_scan([2, 4, 8, 16], 1000,
                                       ACCEPTANCE_SEED + 90)
        decreasing = True
        gaps = []
        for a, b in zip(points, points[1:]):
            joint = math.hypot(a.estimate.stderr, b.estimate.stderr)
            gap = a.estimate.mean - b.estimate.mean
            gaps.append(f"{a.d}->{b.d}: {gap:.4f} (3sigma {3 * joint:.4f})")
            if gap <= 3 * joint:
                decreasing = False
        values = ", ".join(f"d={p.d}: {p.estimate.mean:.4f}" for p in points)
        report("criterion 8 (trend scan decreasing)", decreasing,
               f"{values}; gaps {gaps}")


class TestCriterion09Ladder:
    def test_ladder_checks(self, r22_report, identity_report, bit_report,
                           dephased_report):
        outcome = ladder.check_ladder(
            [r22_report, identity_report, bit_report, dephased_report])
        ce = identity_report.entries["C_E"]
        qe = identity_report.entries["Q_E"]
        bit_classical = [bit_report.entries[k].value
                         for k in ("C_H", "C", "C_B", "C_2", "C_E")]
        bit_quantum = [bit_report.entries[k].value
                       for k in ("Q", "Q_B", "Q_2")]
        ch = r22_report.entries["C_H"]
        q2 = r22_report.entries["Q_2"]
        headline = q2.value - ch.value > 3 * ch.stderr
        ok = (not outcome.violations
              and abs(ce.value - 2.0) <= 1e-3
              and abs(qe.value - ce.value / 2.0) <= 1e-9
              and all(abs(v - 1.0) <= 1e-3 for v in bit_classical)
              and all(v == 0.0 for v in bit_quantum)
              and headline)
        report("criterion 9 (capacity ladder)", ok,
               f"{len(outcome.checks)} checks, {len(outcome.violations)} "
               f"violations; C_E(qubit) {ce.value:.4f}, Q_E = C_E/2; "
               f"classical-bit capacities 1/0; headline separation "
               f"Q_2 >= {q2.value} > C_H {ch.value:.4f}")


class TestCriterion10Determinism:
    def test_cli_byte_identical_for_any_worker_count(self, tmp_path):
        from echochan import cli
        outs = []
        for name, workers in (("a", "1"), ("b", "1"), ("c", "4")):
            path = tmp_path / f"{name}.json"
            code = cli.main(["holevo", "--c", "2", "--d", "2", "--samples",
                             "30000", "--seed", "99", "--workers", workers,
                             "--output", str(path)])
            assert code == 0
            outs.append(path.read_bytes())
        ok = outs[0] == outs[1] == outs[2]
        report("criterion 10 (byte-identical reproducibility)", ok,
               f"three runs (workers 1, 1, 4) produced "
               f"{len({o for o in outs})} distinct outputs")
