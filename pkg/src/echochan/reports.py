"""Capacity-report builders for the named witness channels.

Each builder runs the relevant estimators and protocols and assembles a
:class:`~echochan.estimators.CapacityReport` whose entries carry provenance
tags: ``computed`` (evaluated by this artifact, with the derivation noted),
``protocol-lower-bound`` (certified by an exact protocol simulation), or
``paper-reported-unverified`` (a published value this artifact cannot
reproduce from its model; kept for comparison, never used in checks).
"""

from __future__ import annotations

import math

from . import channels, estimators, protocols
from .errors import ValidityError
from .estimators import CapacityEntry, CapacityReport

R22 = "retro-2-2"
DEPHASED_R22 = "dephased-retro-2-2"
IDENTITY_QUBIT = "identity-qubit"
CLASSICAL_BIT = "classical-bit"
SIMPLIFIED = "simplified"


def _estimate_entry(est: estimators.Estimate, note: str = "") -> CapacityEntry:
    return CapacityEntry(value=est.mean, tag="computed", stderr=est.stderr,
                         samples=est.samples, seed=est.seed, note=note)


def build_report_r22(samples: int = 1_000_000, seed: int = 0, *,
                     protocol_trials: int = 200, workers: int = 1) -> CapacityReport:
    """Report for the standard (2,2) retrocorrectable channel: Monte Carlo
    one-shot quantities plus the protocol-certified assisted lower bounds."""
    ch = estimators.holevo_retro_mc(2, 2, samples, seed, workers=workers)
    ic = estimators.coherent_info_retro_mc(2, 2, samples, seed + 1,
                                           workers=workers)
    two_way = protocols.run_qubit_via_two_way(2, protocol_trials, seed + 2,
                                              keep_traces=False)
    via_ebit = protocols.run_qubit_via_ebit(2, protocol_trials, seed + 3,
                                            keep_traces=False)
    two_uses = protocols.run_qubit_via_two_uses_back(2, protocol_trials,
                                                     seed + 4, keep_traces=False)
    superdense = protocols.run_superdense_via_three_uses(protocol_trials,
                                                         seed + 5)
    entries = {
        "C_H": _estimate_entry(ch, note="symmetric-ensemble Monte Carlo"),
        "I_c": _estimate_entry(ic, note="symmetric-ensemble Monte Carlo"),
        "Q_2": CapacityEntry(
            value=1.0, tag="protocol-lower-bound",
            note=f"one faithful qubit per use with two-way side messages; "
                 f"min fidelity {two_way.min_fidelity:.12f} over "
                 f"{two_way.trials} trials"),
        "Q_E": CapacityEntry(
            value=1.0, tag="protocol-lower-bound",
            note=f"one faithful qubit per use consuming one ebit; min fidelity "
                 f"{via_ebit.min_fidelity:.12f} over {via_ebit.trials} trials"),
        "Q_B": CapacityEntry(
            value=0.5, tag="protocol-lower-bound",
            note=f"one faithful qubit per two uses, back messages only; "
                 f"min fidelity {two_uses.min_fidelity:.12f} over "
                 f"{two_uses.trials} trials"),
        "C_B": CapacityEntry(
            value=2.0 / 3.0, tag="protocol-lower-bound",
            note=f"two classical bits per three uses, back messages only; "
                 f"{superdense.bit_errors} bit errors over "
                 f"{superdense.trials} trials"),
    }
    return CapacityReport(channel=R22, entries=entries,
                          params={"c": 2, "d": 2, "samples": samples,
                                  "seed": seed,
                                  "protocol_trials": protocol_trials})


def build_report_dephased_r22(samples: int = 1_000_000, seed: int = 0, *,
                              protocol_trials: int = 2000, workers: int = 1,
                              check_ppt: bool = False) -> CapacityReport:
    """Report for the dephased (2,2) channel: entanglement breaking by
    construction, so the feedback-assisted classical capacities collapse to
    the Holevo value while the message-independent two-way protocol still
    reaches rate 1."""
    ch = estimators.holevo_retro_mc(2, 2, samples, seed, variant="dephased",
                                    workers=workers)
    c2 = protocols.run_dephased_c2(protocol_trials, seed + 1)
    if not c2.audit["message_independent"]:
        raise ValidityError("side conversation failed the independence audit")
    eb_note = ("entanglement breaking: factors as control measurement plus "
               "data dephasing, then flag-conditioned unitaries")
    if check_ppt:
        ok, min_eig = channels.is_ppt(
            channels.choi_matrix(channels.dephased_retro_discretized()))
        eb_note += f"; discretized Choi PPT={ok} (min eig {min_eig:.2e})"
    entries = {
        "C_H": _estimate_entry(ch, note="symmetric-ensemble Monte Carlo"),
        "C": CapacityEntry(
            value=ch.mean, tag="computed", stderr=ch.stderr,
            samples=ch.samples, seed=ch.seed,
            note="equals C_H for entanglement-breaking channels; " + eb_note),
        "C_B": CapacityEntry(
            value=ch.mean, tag="computed", stderr=ch.stderr,
            samples=ch.samples, seed=ch.seed,
            note="classical feedback does not help entanglement-breaking "
                 "channels, so C_B = C_H"),
        "C_2": CapacityEntry(
            value=1.0, tag="protocol-lower-bound",
            note=f"{c2.bit_errors} errors over {c2.trials} random bits with "
                 f"message-independent side conversation"),
        "Q": CapacityEntry(value=0.0, tag="computed", note=eb_note),
        "Q_B": CapacityEntry(value=0.0, tag="computed", note=eb_note),
        "Q_2": CapacityEntry(value=0.0, tag="computed", note=eb_note),
    }
    return CapacityReport(channel=DEPHASED_R22, entries=entries,
                          params={"c": 2, "d": 2, "samples": samples,
                                  "seed": seed,
                                  "protocol_trials": protocol_trials})


def build_report_identity_qubit(seed: int = 0) -> CapacityReport:
    """Report for the noiseless qubit channel."""
    chi = estimators.holevo_chi(channels.identity_qudit(2),
                                estimators.uniform_basis_ensemble(2))
    ea = estimators.maximize_ea(channels.identity_qudit(2))
    entries = {
        "C_H": CapacityEntry(value=chi, tag="computed",
                             note="uniform basis ensemble; equals log2 d"),
        "C": CapacityEntry(value=1.0, tag="computed",
                           note="pinched between chi = 1 and log2 d = 1"),
        "Q": CapacityEntry(value=1.0, tag="computed",
                           note="noiseless; pinched between exact "
                                "transmission and log2 d"),
        "C_2": CapacityEntry(value=1.0, tag="protocol-lower-bound",
                             note="computational-basis bits"),
        "C_E": CapacityEntry(value=ea.value, tag="computed", stderr=1e-4,
                             note="coordinate-ascent maximizer of the "
                                  "entanglement-assisted mutual information"),
        "Q_E": CapacityEntry(value=ea.value / 2.0, tag="computed", stderr=5e-5,
                             note="factor-2 law Q_E = C_E / 2"),
    }
    return CapacityReport(channel=IDENTITY_QUBIT, entries=entries,
                          params={"seed": seed})


def build_report_classical_bit(seed: int = 0) -> CapacityReport:
    """Report for the classical bit channel (100% dephasing qubit)."""
    bit = channels.classical_bit()
    chi = estimators.holevo_chi(bit, estimators.uniform_basis_ensemble(2))
    ea = estimators.maximize_ea(bit)
    ppt, min_eig = channels.is_ppt(channels.choi_matrix(bit))
    if not ppt:
        raise ValidityError("classical bit channel's Choi is not PPT")
    eb_note = (f"entanglement breaking (2x2 Choi is PPT, min eig "
               f"{min_eig:.2e}), so all unassisted/classically assisted "
               f"quantum capacities vanish")
    entries = {
        "C_H": CapacityEntry(value=chi, tag="computed",
                             note="uniform basis ensemble"),
        "C": CapacityEntry(value=chi, tag="computed",
                           note="equals C_H for entanglement-breaking channels"),
        "C_B": CapacityEntry(value=chi, tag="computed",
                             note="feedback does not help entanglement-"
                                  "breaking channels"),
        "C_2": CapacityEntry(value=1.0, tag="computed",
                             note="pinched between the trivial bit protocol "
                                  "and C_E = 1"),
        "C_E": CapacityEntry(value=ea.value, tag="computed", stderr=1e-4,
                             note="coordinate-ascent maximizer"),
        "Q": CapacityEntry(value=0.0, tag="computed", note=eb_note),
        "Q_B": CapacityEntry(value=0.0, tag="computed", note=eb_note),
        "Q_2": CapacityEntry(value=0.0, tag="computed", note=eb_note),
        "Q_E": CapacityEntry(value=ea.value / 2.0, tag="computed", stderr=5e-5,
                             note="factor-2 law Q_E = C_E / 2"),
    }
    return CapacityReport(channel=CLASSICAL_BIT, entries=entries,
                          params={"seed": seed})


def build_report_simplified(seed: int = 0, *, scan_resolution: int = 512,
                            mc_samples: int = 50_000,
                            erasure_trials: int = 100_000,
                            grid_resolution: int = 201) -> CapacityReport:
    """Report for the simplified (partially retrocorrectable) channel.

    The scan maximum of the implemented model exceeds the published maximum
    claim; both numbers are recorded, the published ones tagged unverified.
    """
    scan = estimators.simplified_chi_scan(scan_resolution,
                                          mc_samples=mc_samples, seed=seed)
    erasure = protocols.run_erasure_conversion(erasure_trials, seed + 10)
    flagged = protocols.optimize_flagged_rate(grid_resolution, seed=seed + 11)
    entries = {
        "C_H": CapacityEntry(
            value=scan.max_value, tag="computed",
            note=f"maximum of the symmetric-ensemble chi curve over the "
                 f"scanned control circle (at angle {scan.max_theta:.4f}); "
                 f"exceeds the published maximum claim of 0.594361 -- "
                 f"flagged, not silently resolved"),
        "C_H_eigenstate": CapacityEntry(
            value=scan.eigenstate_value, tag="computed",
            note="closed form at the basis-eigenstate control, "
                 "1/2 + (1 - h2(1/4))/2"),
        "C_H_claimed_max": CapacityEntry(
            value=0.5 + 0.5 * (1.0 - _h2_quarter()), tag="paper-reported-unverified",
            note="published maximum claim, attained at a basis eigenstate "
                 "under the published model; the implemented model's curve "
                 "maximum is larger"),
        "Q_2": CapacityEntry(
            value=flagged.best_rate, tag="protocol-lower-bound",
            note=f"best zero-miss flagged-erasure construction "
                 f"(weight {flagged.best_weight:.6f}, angle "
                 f"{flagged.best_angle:.6f}); simulation "
                 f"{flagged.sim_rate:.4f} +- {flagged.sim_stderr:.4f}, "
                 f"{flagged.sim_misses} misses"),
        "Q_2_mes": CapacityEntry(
            value=erasure.q2_lower_bound, tag="protocol-lower-bound",
            note=f"maximally entangled control: erasure fraction "
                 f"{erasure.erasure_fraction:.4f} over {erasure.trials} "
                 f"trials, {erasure.misses} misses"),
        "Q_2_claimed": CapacityEntry(
            value=math.cos(math.pi / 8.0) ** 2, tag="paper-reported-unverified",
            note="published value cos^2(pi/8) = 0.853553; no achieving "
                 "protocol is described, and the best certified construction "
                 "here reaches 2 - sqrt(2) = 0.585786"),
    }
    return CapacityReport(channel=SIMPLIFIED, entries=entries,
                          params={"seed": seed,
                                  "scan_resolution": scan_resolution,
                                  "grid_resolution": grid_resolution})


def _h2_quarter() -> float:
    from .linalg import binary_entropy
    return binary_entropy(0.25)


BUILDERS = {
    R22: build_report_r22,
    DEPHASED_R22: build_report_dephased_r22,
    IDENTITY_QUBIT: build_report_identity_qubit,
    CLASSICAL_BIT: build_report_classical_bit,
    SIMPLIFIED: build_report_simplified,
}
