"""Shared fixtures: the expensive session-level runs are computed once."""

import time

import pytest

from echochan import channels, estimators, reports

ACCEPTANCE_SEED = 20240214


@pytest.fixture(scope="session")
def ch_r22_1m():
    """Timed 10^6-sample Holevo estimate for the (2,2) channel."""
    started = time.monotonic()
    est = estimators.holevo_retro_mc(2, 2, 1_000_000, ACCEPTANCE_SEED)
    return est, time.monotonic() - started


@pytest.fixture(scope="session")
def ic_r22_1m():
    return estimators.coherent_info_retro_mc(2, 2, 1_000_000,
                                             ACCEPTANCE_SEED + 1)


@pytest.fixture(scope="session")
def ch_dephased_1m():
    return estimators.holevo_retro_mc(2, 2, 1_000_000, ACCEPTANCE_SEED + 2,
                                      variant="dephased")


@pytest.fixture(scope="session")
def dephased_choi_ppt():
    """PPT verdict for the discretized dephased channel's Choi state."""
    choi = channels.choi_matrix(channels.dephased_retro_discretized())
    ok, min_eig = channels.is_ppt(choi)
    return choi, ok, min_eig


@pytest.fixture(scope="session")
def r22_report():
    return reports.build_report_r22(samples=100_000, seed=ACCEPTANCE_SEED + 3,
                                    protocol_trials=200)


@pytest.fixture(scope="session")
def identity_report():
    return reports.build_report_identity_qubit(seed=ACCEPTANCE_SEED)


@pytest.fixture(scope="session")
def bit_report():
    return reports.build_report_classical_bit(seed=ACCEPTANCE_SEED)


@pytest.fixture(scope="session")
def dephased_report():
    return reports.build_report_dephased_r22(samples=100_000,
                                             seed=ACCEPTANCE_SEED + 4,
                                             protocol_trials=500)
