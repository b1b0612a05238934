from fractions import Fraction as F

import numpy as np
import pytest

from optce.game import ExplicitGame


def table_2p(u1, u2):
    """Two-player game from two m1 x m2 payoff matrices."""
    return ExplicitGame(np.array([u1, u2], dtype=object if _frac(u1, u2) else float))


def _frac(*mats):
    return any(isinstance(v, F) for m in mats for row in m for v in row)


@pytest.fixture
def chicken():
    # (dare, chicken) scaled by 1/4; best CE mixes DC, CD, CC equally: welfare 4/3
    q = F(1, 4)
    u1 = [[0 * q, 4 * q], [1 * q, 3 * q]]
    u2 = [[0 * q, 1 * q], [4 * q, 3 * q]]
    return table_2p(u1, u2)


@pytest.fixture
def pennies():
    return table_2p([[1, 0], [0, 1]], [[0, 1], [1, 0]])


@pytest.fixture
def prisoners():
    # action 0 = cooperate, 1 = defect; defect strictly dominates
    u1 = [[F(2, 3), 0], [1, F(1, 3)]]
    u2 = [[F(2, 3), 1], [0, F(1, 3)]]
    return table_2p(u1, u2)


def identical_interest(values):
    values = np.asarray(values, dtype=float)
    n = values.ndim
    return ExplicitGame(np.stack([values] * n))


# acceptance verdicts, criterion number -> (ok, detail); echoed after the run
ACCEPTANCE: dict = {}


def record_criterion(k: int, ok: bool, detail: str):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
