"""Nonlinear stage solves: Picard iteration over Schur-complement systems.

Two lagging strategies for the rotational/gravitational couplings:

* R1 moves ``R u`` (momentum) and ``M_g u`` plus the kinetic vector (energy)
  to the right-hand side at the previous iterate; the pressure operator is
  ``D - C A^{-1} B``.
* R2 keeps rotation and gravity coupling implicit; the pressure operator is
  ``D - (C + M_g)(A + R)^{-1} B`` with the pointwise rotation factorization.

Both iterate until the joint relative variation of (u, p) drops below the
configured tolerance, starting from the previous stage's solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gmres import GMRESError, gmres
from .operators import DGOperators, OperatorAction, StageContext


class StageSolveError(RuntimeError):
    """Stage solve failure; carries the convergence history."""

    def __init__(self, message: str, history: list[float]):
        super().__init__(message)
        self.history = history


@dataclass(frozen=True)
class PicardConfig:
    strategy: str = "R1"
    max_iterations: int = 10
    tol: float = 1e-10
    gmres_tol: float = 1e-12
    gmres_restart: int = 30
    gmres_max_iterations: int = 2000

    def __post_init__(self):
        if self.strategy not in ("R1", "R2"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not (0.0 < self.tol < 1.0 and 0.0 < self.gmres_tol < 1.0):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.max_iterations < 1 or self.gmres_max_iterations < 1:
            raise ValueError("iteration caps must be >= 1")


@dataclass
class StageSolution:
    u: np.ndarray
    p: np.ndarray
    picard_iterations: int
    gmres_iterations: list[int] = field(default_factory=list)
    final_variation: float = np.inf


def _variation(u_new, p_new, u_old, p_old) -> float:
    diff = np.sqrt(np.sum((u_new - u_old) ** 2) + np.sum((p_new - p_old) ** 2))
    base = np.sqrt(np.sum(u_old ** 2) + np.sum(p_old ** 2))
    return diff / max(base, 1e-30)


def schur_operator(ops: DGOperators, rho_stage: np.ndarray,
                   p_coeff: np.ndarray, ctx: StageContext,
                   strategy: str) -> OperatorAction:
    """Matrix-free pressure Schur operator at a frozen enthalpy coefficient."""
    n = rho_stage.size
    pshape = ops.pshape

    if strategy == "R1":
        def apply(x: np.ndarray) -> np.ndarray:
            p = x.reshape(pshape)
            t = ops.apply_inv_mass_rho(
                ops.apply_pressure_gradient_B(p, ctx), rho_stage)
            out = ops.apply_energy_mass_D(p) \
                - ops.apply_C_with_pressure(t, p_coeff, ctx)
            return out.ravel()
    else:
        def apply(x: np.ndarray) -> np.ndarray:
            p = x.reshape(pshape)
            t = ops.apply_inv_A_plus_R(
                ops.apply_pressure_gradient_B(p, ctx), rho_stage, ctx)
            out = ops.apply_energy_mass_D(p) \
                - ops.apply_C_with_pressure(t, p_coeff, ctx) \
                - ops.apply_gravity_coupling_Mg(t, rho_stage, ctx)
            return out.ravel()

    return OperatorAction(apply=apply, n_in=n, n_out=n)


def solve_stage(ops: DGOperators, rho_stage: np.ndarray, f_vec: np.ndarray,
                g_fixed: np.ndarray, u_init: np.ndarray, p_init: np.ndarray,
                ctx: StageContext, cfg: PicardConfig) -> StageSolution:
    """Solve one implicit stage for (u, p).

    ``f_vec`` is the weighted momentum RHS, ``g_fixed`` the weighted energy
    RHS without the lagged stage-diagonal penalty (re-added each iteration
    at the current iterate).
    """
    u_k = u_init.copy()
    p_k = p_init.copy()
    f_g = ops.gravity_vector_fg(rho_stage, ctx)
    gmres_its: list[int] = []
    history: list[float] = []

    for k in range(cfg.max_iterations):
        g_vec = g_fixed + ops.stage_penalty(rho_stage, u_k, p_k, ctx)
        kvec = ops.kinetic_vector(rho_stage, u_k)

        if cfg.strategy == "R1":
            rhs_u = f_vec - ops.apply_coriolis_R(u_k, rho_stage, ctx) - f_g
            t = ops.apply_inv_mass_rho(rhs_u, rho_stage)
            rhs_p = g_vec - ops.apply_gravity_coupling_Mg(u_k, rho_stage, ctx) \
                - kvec - ops.apply_C_with_pressure(t, p_k, ctx)
        else:
            rhs_u = f_vec - f_g
            t = ops.apply_inv_A_plus_R(rhs_u, rho_stage, ctx)
            rhs_p = g_vec - kvec \
                - ops.apply_C_with_pressure(t, p_k, ctx) \
                - ops.apply_gravity_coupling_Mg(t, rho_stage, ctx)

        op = schur_operator(ops, rho_stage, p_k, ctx, cfg.strategy)
        try:
            res = gmres(op, rhs_p.ravel(), x0=p_k.ravel(),
                        tol=cfg.gmres_tol, restart=cfg.gmres_restart,
                        maxiter=cfg.gmres_max_iterations)
        except GMRESError as exc:
            raise StageSolveError(
                f"pressure solve failed in Picard iteration {k + 1} "
                f"(strategy {cfg.strategy}): {exc}", exc.residuals) from exc
        gmres_its.append(res.iterations)
        p_next = res.x.reshape(ops.pshape)

        bp = ops.apply_pressure_gradient_B(p_next, ctx)
        if cfg.strategy == "R1":
            u_next = ops.apply_inv_mass_rho(rhs_u - bp, rho_stage)
        else:
            u_next = ops.apply_inv_A_plus_R(rhs_u - bp, rho_stage, ctx)

        var = _variation(u_next, p_next, u_k, p_k)
        history.append(var)
        u_k, p_k = u_next, p_next
        if var < cfg.tol:
            return StageSolution(u=u_k, p=p_k, picard_iterations=k + 1,
                                 gmres_iterations=gmres_its,
                                 final_variation=var)

    raise StageSolveError(
        f"Picard iteration did not converge in {cfg.max_iterations} "
        f"iterations (strategy {cfg.strategy}); variations {history}",
        history)
