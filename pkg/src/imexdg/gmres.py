"""Restarted GMRES with modified Gram-Schmidt and Givens rotations.

Unpreconditioned; the pressure systems it is used on here are strongly
diagonally dominated at the acoustic Courant numbers of interest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class GMRESError(RuntimeError):
    """Non-convergence; carries the residual-norm history."""

    def __init__(self, message: str, residuals: list[float]):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class GMRESResult:
    x: np.ndarray
    iterations: int
    residuals: list[float] = field(repr=False, default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else 0.0


def gmres(op: Callable[[np.ndarray], np.ndarray], rhs: np.ndarray,
          x0: np.ndarray | None = None, tol: float = 1e-12,
          restart: int = 30, maxiter: int = 2000) -> GMRESResult:
    """Solve op(x) = rhs to a relative residual of ``tol``.

    ``op`` maps flat vectors to flat vectors of the same size. Raises
    :class:`GMRESError` when ``maxiter`` operator applications are exhausted.
    """
    rhs = np.asarray(rhs, dtype=float).ravel()
    n = rhs.size
    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return GMRESResult(x=np.zeros(n), iterations=0, residuals=[0.0])
    target = tol * b_norm

    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel().copy()
    residuals: list[float] = []
    total = 0

    while True:
        r = rhs - np.asarray(op(x)).ravel()
        beta = float(np.linalg.norm(r))
        residuals.append(beta)
        if beta <= target:
            return GMRESResult(x=x, iterations=total, residuals=residuals)

        V = np.empty((restart + 1, n))
        H = np.zeros((restart + 1, restart))
        cs = np.zeros(restart)
        sn = np.zeros(restart)
        g = np.zeros(restart + 1)
        V[0] = r / beta
        g[0] = beta

        j = 0
        while j < restart and total < maxiter:
            # force a copy: op may return its argument (or a view of it),
            # and MGS must not write into the Krylov basis
            w = np.array(op(V[j]), dtype=float).ravel()
            total += 1
            for i in range(j + 1):  # modified Gram-Schmidt
                H[i, j] = np.dot(V[i], w)
                w -= H[i, j] * V[i]
            w_norm = float(np.linalg.norm(w))
            H[j + 1, j] = w_norm
            if w_norm > 0.0:
                V[j + 1] = w / w_norm

            # apply the accumulated Givens rotations, then a new one
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            if denom == 0.0:
                cs[j], sn[j] = 1.0, 0.0
            else:
                cs[j] = H[j, j] / denom
                sn[j] = H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]

            res = abs(g[j + 1])
            residuals.append(res)
            j += 1
            if res <= target or w_norm == 0.0:
                break

        if j > 0:
            y = np.linalg.solve(np.triu(H[:j, :j]), g[:j])
            x = x + V[:j].T @ y

        r = rhs - np.asarray(op(x)).ravel()
        true_res = float(np.linalg.norm(r))
        residuals[-1] = true_res
        if true_res <= target:
            return GMRESResult(x=x, iterations=total, residuals=residuals)
        if total >= maxiter:
            raise GMRESError(
                f"GMRES stalled at relative residual "
                f"{true_res / b_norm:.3e} after {total} iterations",
                residuals)
