"""Dense two-phase primal simplex with Bland's rule.

Solves min c.x subject to A x = b, x >= 0 on a full tableau. Bland's
anti-cycling rule keeps every pivot choice deterministic and guarantees
termination; artificial columns are kept through phase 2 (barred from
entering) so the optimal dual vector can be read off their reduced costs.
Intended for the small programs this package generates (a few thousand
rows at most); no sparsity, no scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9


class SimplexError(RuntimeError):
    pass


@dataclass(frozen=True)
class LPSolution:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    iterations: int


def solve_standard_form(c, A, b, tol: float = FEAS_TOL) -> LPSolution:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    mc, nv = A.shape
    if b.shape != (mc,) or c.shape != (nv,):
        raise ValueError("inconsistent LP dimensions")

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # columns: nv originals, mc artificials, rhs
    T = np.hstack([A, np.eye(mc), b[:, None]])
    basis = list(range(nv, nv + mc))
    iterations = 0
    max_iterations = 2000 + 200 * (mc + nv)

    def run_phase(obj_row: np.ndarray, allow_artificial: bool) -> np.ndarray:
        nonlocal iterations
        limit = nv + mc if allow_artificial else nv
        while True:
            entering = -1
            for j in range(limit):
                if obj_row[j] < -tol:
                    entering = j
                    break
            if entering < 0:
                return obj_row
            col = T[:, entering]
            rows = np.where(col > tol)[0]
            if rows.size == 0:
                raise SimplexError("LP is unbounded")
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            # Bland: among minimizing rows leave the smallest basis index
            cand = rows[ratios <= best + tol * max(1.0, abs(best))]
            leave = min(cand, key=lambda r: basis[r])
            pivot = T[leave, entering]
            T[leave] /= pivot
            for r in range(mc):
                if r != leave and T[r, entering] != 0.0:
                    T[r] -= T[r, entering] * T[leave]
            obj_row = obj_row - obj_row[entering] * T[leave]
            basis[leave] = entering
            iterations += 1
            if iterations > max_iterations:
                raise SimplexError("simplex iteration limit exceeded")

    # phase 1: minimize the sum of artificials
    c1 = np.concatenate([np.zeros(nv), np.ones(mc), [0.0]])
    obj_row = c1.copy()
    for i in range(mc):
        obj_row -= T[i]
    obj_row = run_phase(obj_row, allow_artificial=True)
    if -obj_row[-1] > 1e-7:
        raise SimplexError(f"LP infeasible, phase-1 objective {-obj_row[-1]:.3e}")

    # pivot remaining artificials out where a nonzero original column exists
    for i in range(mc):
        if basis[i] >= nv:
            for j in range(nv):
                if abs(T[i, j]) > tol:
                    pivot = T[i, j]
                    T[i] /= pivot
                    for r in range(mc):
                        if r != i and T[r, j] != 0.0:
                            T[r] -= T[r, j] * T[i]
                    basis[i] = j
                    break

    # phase 2
    c2 = np.concatenate([c, np.zeros(mc), [0.0]])
    obj_row = c2.copy()
    for i in range(mc):
        obj_row -= c2[basis[i]] * T[i]
    obj_row = run_phase(obj_row, allow_artificial=False)

    x = np.zeros(nv)
    for i, bi in enumerate(basis):
        if bi < nv:
            x[bi] = T[i, -1]
    duals = -obj_row[nv : nv + mc].copy()
    duals[flip] *= -1.0
    return LPSolution(x=x, objective=float(c @ x), duals=duals, iterations=iterations)
