"""NumPy kernel backend.

Vectorized reference implementation of the hot DG kernels; the Cython
extension (imexdg._core._kernels) implements the same signatures with fused
loops. Conventions are documented in :mod:`imexdg._core.geometry`.
"""

from __future__ import annotations

import numpy as np

from .geometry import Geometry

BACKEND_NAME = "numpy"


# ---------------------------------------------------------------- traces

def _trace_x(q: np.ndarray, g: Geometry):
    """Minus/plus traces on the nx vertical faces, shape (nz, nx, n1)."""
    right = q @ g.tR                      # value at x=+1 per element
    left = q @ g.tL
    return np.roll(right, 1, axis=1), left


def _trace_z(q: np.ndarray, g: Geometry):
    """Bottom/top traces of every element, shape (nz, nx, n1)."""
    bottom = np.tensordot(q, g.tL, axes=([2], [0]))
    top = np.tensordot(q, g.tR, axes=([2], [0]))
    return bottom, top


# ------------------------------------------------------------- scatters

def _scatter_x(out: np.ndarray, val: np.ndarray, g: Geometry) -> None:
    """Accumulate a per-x-face value (already = Fhat.n) into the weak form."""
    vw = val * g.wfx[None, None, :]
    out += np.roll(vw, -1, axis=1)[..., None] * g.tR
    out -= vw[..., None] * g.tL


def _scatter_z(out: np.ndarray, val: np.ndarray, g: Geometry) -> None:
    """Accumulate per-interior-z-face values, val shape (nz-1, nx, n1)."""
    vw = val * g.wfz[None, None, :]
    out[:-1] += vw[:, :, None, :] * g.tR[None, None, :, None]
    out[1:] -= vw[:, :, None, :] * g.tL[None, None, :, None]


def _scatter_wall(out: np.ndarray, val_bot: np.ndarray, val_top: np.ndarray,
                  g: Geometry) -> None:
    """Accumulate wall-face values (already = Fhat.n_outward), (nx, n1)."""
    if val_bot is not None:
        out[0] += (val_bot * g.wfz)[:, None, :] * g.tL[None, :, None]
    if val_top is not None:
        out[-1] += (val_top * g.wfz)[:, None, :] * g.tR[None, :, None]


# ------------------------------------------------------- volume pieces

def _vol_x(F: np.ndarray, g: Geometry) -> np.ndarray:
    """-int F d(psi)/dx over every element (weighted)."""
    return -g.scale_x * ((g.W * F) @ g.D1)


def _vol_z(F: np.ndarray, g: Geometry) -> np.ndarray:
    return -g.scale_z * np.matmul(g.D1T, g.W * F)


# ------------------------------------------------------- public kernels

def weak_gradient(p: np.ndarray, g: Geometry):
    """Weak pressure gradient; returns the (x, z) component pair.

    Face averages are centered; wall faces use the interior pressure.
    """
    gx = _vol_x(p, g)
    gz = _vol_z(p, g)
    pm, pp = _trace_x(p, g)
    _scatter_x(gx, 0.5 * (pm + pp), g)
    bot, top = _trace_z(p, g)
    _scatter_z(gz, 0.5 * (top[:-1] + bot[1:]), g)
    # walls: {{p}} = interior trace; outward normal is -z at the bottom
    _scatter_wall(gz, -bot[0], top[-1], g)
    return gx, gz


def centered_div(c: np.ndarray, ux: np.ndarray, uz: np.ndarray, g: Geometry):
    """Divergence form of the flux c*u with centered face averages.

    The coefficient and velocity are traced separately and multiplied at
    the face. Wall faces carry no flux (the mirror state cancels the
    normal component exactly).
    """
    out = _vol_x(c * ux, g)
    out += _vol_z(c * uz, g)
    cm, cp = _trace_x(c, g)
    um, up = _trace_x(ux, g)
    _scatter_x(out, 0.5 * (cm * um + cp * up), g)
    cb, ct = _trace_z(c, g)
    wb, wt = _trace_z(uz, g)
    _scatter_z(out, 0.5 * (ct[:-1] * wt[:-1] + cb[1:] * wb[1:]), g)
    return out


def face_lambda(rho: np.ndarray, mx: np.ndarray, mz: np.ndarray, g: Geometry):
    """Rusanov speed max(|u.n|^-, |u.n|^+) on x faces and interior z faces.

    Face velocities come from the traced density and momentum, matching the
    flux evaluation in :func:`advect5`.
    """
    rm, rp = _trace_x(rho, g)
    um, up = _trace_x(mx, g)
    lam_x = np.maximum(np.abs(um / rm), np.abs(up / rp))
    rb, rt = _trace_z(rho, g)
    wb, wt = _trace_z(mz, g)
    lam_z = np.maximum(np.abs(wt[:-1] / rt[:-1]), np.abs(wb[1:] / rb[1:]))
    return lam_x, lam_z


def jump_penalty(s: np.ndarray, lam_x: np.ndarray, lam_z: np.ndarray,
                 g: Geometry):
    """Jump-penalty weak form: sum over faces of (lam/2)[[s]].[[psi]].

    Vanishes on walls (the mirror state has an equal trace).
    """
    out = np.zeros_like(s)
    sm, sp = _trace_x(s, g)
    _scatter_x(out, 0.5 * lam_x * (sm - sp), g)
    sb, st = _trace_z(s, g)
    _scatter_z(out, 0.5 * lam_z * (st[:-1] - sb[1:]), g)
    return out


def advect5(rho: np.ndarray, mx: np.ndarray, my: np.ndarray, mz: np.ndarray,
            g: Geometry):
    """Rusanov divergence forms of all explicitly advected quantities.

    Returns (mass, x/y/z momentum, kinetic energy) weak forms for the
    fluxes (rho u, rho u_c u, kappa rho u) with jump penalties on
    (rho, rho u_c, rho kappa) and lambda = max |u.n|. Walls see a mirror
    ghost state (normal momentum negated), which kills every wall flux
    except the normal-momentum component.
    """
    ux, uz = mx / rho, mz / rho
    kap = 0.5 * (mx * mx + my * my + mz * mz) / (rho * rho)

    o_rho = _vol_x(mx, g) + _vol_z(mz, g)
    o_mx = _vol_x(mx * ux, g) + _vol_z(mx * uz, g)
    o_my = _vol_x(my * ux, g) + _vol_z(my * uz, g)
    o_mz = _vol_x(mz * ux, g) + _vol_z(mz * uz, g)
    o_ke = _vol_x(kap * mx, g) + _vol_z(kap * mz, g)

    # ---- x faces (normal +x)
    rm, rp = _trace_x(rho, g)
    xm, xp = _trace_x(mx, g)
    ym, yp = _trace_x(my, g)
    zm, zp = _trace_x(mz, g)
    unm, unp = xm / rm, xp / rp
    lam = np.maximum(np.abs(unm), np.abs(unp))
    km = 0.5 * (xm * xm + ym * ym + zm * zm) / (rm * rm)
    kp = 0.5 * (xp * xp + yp * yp + zp * zp) / (rp * rp)
    _scatter_x(o_rho, 0.5 * (xm + xp) + 0.5 * lam * (rm - rp), g)
    _scatter_x(o_mx, 0.5 * (xm * unm + xp * unp) + 0.5 * lam * (xm - xp), g)
    _scatter_x(o_my, 0.5 * (ym * unm + yp * unp) + 0.5 * lam * (ym - yp), g)
    _scatter_x(o_mz, 0.5 * (zm * unm + zp * unp) + 0.5 * lam * (zm - zp), g)
    _scatter_x(o_ke, 0.5 * (km * xm + kp * xp)
               + 0.5 * lam * (rm * km - rp * kp), g)

    # ---- interior z faces (normal +z)
    rb, rt = _trace_z(rho, g)
    xb, xt = _trace_z(mx, g)
    yb, yt = _trace_z(my, g)
    zb, zt = _trace_z(mz, g)
    rm, rp = rt[:-1], rb[1:]
    xm, xp = xt[:-1], xb[1:]
    ym, yp = yt[:-1], yb[1:]
    zm, zp = zt[:-1], zb[1:]
    unm, unp = zm / rm, zp / rp
    lam = np.maximum(np.abs(unm), np.abs(unp))
    km = 0.5 * (xm * xm + ym * ym + zm * zm) / (rm * rm)
    kp = 0.5 * (xp * xp + yp * yp + zp * zp) / (rp * rp)
    _scatter_z(o_rho, 0.5 * (zm + zp) + 0.5 * lam * (rm - rp), g)
    _scatter_z(o_mx, 0.5 * (xm * unm + xp * unp) + 0.5 * lam * (xm - xp), g)
    _scatter_z(o_my, 0.5 * (ym * unm + yp * unp) + 0.5 * lam * (ym - yp), g)
    _scatter_z(o_mz, 0.5 * (zm * unm + zp * unp) + 0.5 * lam * (zm - zp), g)
    _scatter_z(o_ke, 0.5 * (km * zm + kp * zp)
               + 0.5 * lam * (rm * km - rp * kp), g)

    # ---- walls: only the normal momentum survives the mirror state.
    # Bottom (outward -z): Fhat.n = -mz w + |w| mz; top (+z): mz w + |w| mz.
    wbot = zb[0] / rb[0]
    wtop = zt[-1] / rt[-1]
    _scatter_wall(o_mz, zb[0] * (-wbot) + np.abs(wbot) * zb[0],
                  zt[-1] * wtop + np.abs(wtop) * zt[-1], g)
    return o_rho, o_mx, o_my, o_mz, o_ke
