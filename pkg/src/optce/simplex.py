"""Two-phase revised simplex with Bland's rule.

Solves ``min c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.

In exact mode every array is a numpy object array of Fractions and all
comparisons are exact, so Bland's rule guarantees termination. Float mode
uses the same code path with a pivot/feasibility tolerance and periodically
refactors the basis inverse.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LPError

FLOAT_TOL = 1e-9
REFACTOR_EVERY = 64
PIVOT_REL = 1e-3


@dataclass
class LPResult:
    x: np.ndarray
    objective: object
    basis: list[int]
    iterations: int
    exact: bool


def _convert(arr, exact):
    if arr is None:
        return None
    if exact:
        src = np.asarray(arr, dtype=object)
        out = np.empty(src.shape, dtype=object)
        out.ravel()[:] = [v if isinstance(v, Fraction) else Fraction(v) for v in src.ravel()]
        return out
    return np.asarray(arr, dtype=float)


class _Tableau:
    """Standard-form problem ``A z = b, z >= 0`` with basis inverse kept explicitly."""

    def __init__(self, A, b, basis, exact, tol):
        self.A = A
        self.b = b
        self.basis = list(basis)
        self.exact = exact
        self.tol = tol
        self.iterations = 0
        self._since_refactor = 0
        m = A.shape[0]
        if exact:
            self.Binv = np.empty((m, m), dtype=object)
            self.Binv.ravel()[:] = [Fraction(0)] * (m * m)
            for r in range(m):
                self.Binv[r, r] = Fraction(1)
        else:
            self.Binv = np.eye(m)
        # initial basis columns are +/- unit vectors
        for r, col in enumerate(self.basis):
            if A[r, col] != 1:
                self.Binv[r, r] = 1 / A[r, col]

    def xB(self):
        return self.Binv.dot(self.b)

    def refactor(self):
        if self.exact:
            return
        self.Binv = np.linalg.inv(self.A[:, self.basis])
        self._since_refactor = 0

    def pivot(self, r, j, col):
        piv = col[r]
        row = self.Binv[r] / piv
        self.Binv = self.Binv - np.outer(col, row)
        self.Binv[r] = row
        self.basis[r] = j
        self.iterations += 1
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def _leaving(self, col, xB):
        """Ratio test. Exact mode breaks ties by smallest basic index (Bland);
        float mode applies the same rule among near-minimal ratios whose pivot
        is not tiny next to the largest, which keeps the basis well conditioned."""
        tol = self.tol
        rows = [r for r in range(len(col)) if col[r] > tol]
        if not rows:
            return None
        ratios = {r: xB[r] / col[r] for r in rows}
        best = min(ratios.values())
        if self.exact:
            ties = [r for r in rows if ratios[r] == best]
            return min(ties, key=lambda r: self.basis[r])
        ties = [r for r in rows if ratios[r] <= best + tol]
        big = max(col[r] for r in ties)
        ties = [r for r in ties if col[r] >= PIVOT_REL * big]
        return min(ties, key=lambda r: self.basis[r])

    def run(self, c, allowed, max_iter):
        """Minimize ``c^T z`` over the current feasible basis; Bland's rule."""
        tol = self.tol
        while True:
            if self.iterations >= max_iter:
                raise LPError(f"simplex exceeded {max_iter} iterations")
            duals = c[self.basis].dot(self.Binv)
            reduced = c - duals.dot(self.A)
            candidates = allowed & np.asarray(reduced < -tol, dtype=bool)
            candidates[self.basis] = False
            hits = np.flatnonzero(candidates)
            if not len(hits):
                return
            entering = int(hits[0])
            col = self.Binv.dot(self.A[:, entering])
            xB = self.xB()
            if not self.exact:
                xB = np.maximum(xB, 0.0)
            leave = self._leaving(col, xB)
            if leave is None:
                raise LPError("LP is unbounded")
            self.pivot(leave, entering, col)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, exact=False,
             tol=None, max_iter=100_000) -> LPResult:
    """Minimize ``c^T x`` subject to the given rows and ``x >= 0``.

    Raises LPError when the problem is infeasible or unbounded.
    """
    tol = (0 if exact else FLOAT_TOL) if tol is None else tol
    c = _convert(c, exact)
    nvar = len(c)
    rows, rhs, slack_rows = [], [], []
    if A_ub is not None and len(A_ub):
        A_ub, b_ub = _convert(A_ub, exact), _convert(b_ub, exact)
        for r in range(A_ub.shape[0]):
            rows.append(A_ub[r])
            rhs.append(b_ub[r])
            slack_rows.append(True)
    if A_eq is not None and len(A_eq):
        A_eq, b_eq = _convert(A_eq, exact), _convert(b_eq, exact)
        for r in range(A_eq.shape[0]):
            rows.append(A_eq[r])
            rhs.append(b_eq[r])
            slack_rows.append(False)
    m = len(rows)
    nslack = sum(slack_rows)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    dtype = object if exact else float

    # columns: original | slacks | artificials
    needs_art = []
    for r in range(m):
        sign_neg = rhs[r] < 0
        needs_art.append(sign_neg or not slack_rows[r])
    nart = sum(needs_art)
    ncols = nvar + nslack + nart
    A = np.empty((m, ncols), dtype=dtype)
    A[:] = zero
    b = np.empty(m, dtype=dtype)
    basis = []
    s_pos, a_pos = nvar, nvar + nslack
    for r in range(m):
        flip = rhs[r] < 0
        row = -rows[r] if flip else rows[r]
        A[r, :nvar] = row
        b[r] = -rhs[r] if flip else rhs[r]
        if slack_rows[r]:
            A[r, s_pos] = -one if flip else one
            slack_col = s_pos
            s_pos += 1
        if needs_art[r]:
            A[r, a_pos] = one
            basis.append(a_pos)
            a_pos += 1
        else:
            basis.append(slack_col)

    tab = _Tableau(A, b, basis, exact, tol)
    is_art = np.zeros(ncols, dtype=bool)
    is_art[nvar + nslack:] = True

    if nart:
        c1 = np.empty(ncols, dtype=dtype)
        c1[:] = zero
        c1[is_art] = one
        tab.run(c1, np.ones(ncols, dtype=bool), max_iter)
        infeas = c1[tab.basis].dot(tab.xB())
        if infeas > (tol * 10 if not exact else 0):
            raise LPError(f"LP is infeasible (phase one residual {infeas})")
        # drive zero-level artificials out where a real column can replace them
        for r in range(m):
            if not is_art[tab.basis[r]]:
                continue
            row = tab.Binv[r].dot(A)
            basic = set(tab.basis)
            cand = [j for j in range(nvar + nslack) if j not in basic and abs(row[j]) > tol]
            if cand:
                j = cand[0] if exact else max(cand, key=lambda k: abs(row[k]))
                tab.pivot(r, j, tab.Binv.dot(A[:, j]))
            # otherwise the row is redundant; the artificial stays basic at zero

    c2 = np.empty(ncols, dtype=dtype)
    c2[:] = zero
    c2[:nvar] = c
    tab.run(c2, ~is_art, max_iter)
    tab.refactor()
    z = np.empty(ncols, dtype=dtype)
    z[:] = zero
    xB = tab.xB()
    for r, j in enumerate(tab.basis):
        z[j] = xB[r]
    x = z[:nvar]
    if not exact:
        x = np.where(x < 0, 0.0, x)
    return LPResult(x=x, objective=c.dot(x), basis=list(tab.basis), iterations=tab.iterations,
                    exact=exact)
