"""Principal branch of the Lambert W function for real arguments."""

from __future__ import annotations

import numpy as np

from .errors import AlohaAoiError

BRANCH_POINT = -np.exp(-1.0)
MAX_ITER = 50


class LambertDomainError(AlohaAoiError, ValueError):
    """Argument below -1/e, where the principal branch is not real."""


class LambertConvergenceError(AlohaAoiError, ArithmeticError):
    """Halley iteration failed to converge."""


def _initial_guess(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    near = x < -0.25
    # series about the branch point in p = sqrt(2 (e x + 1))
    p = np.sqrt(np.maximum(2.0 * (np.e * x[near] + 1.0), 0.0))
    w[near] = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0))
    mid = ~near & (x <= 3.0)
    w[mid] = np.log1p(x[mid])
    far = x > 3.0
    l1 = np.log(x[far])
    l2 = np.log(l1)
    w[far] = l1 - l2 + l2 / l1
    return w


def lambert_w0(x):
    """Principal branch ``W0(x)``, the solution ``w >= -1`` of ``w * exp(w) = x``.

    Halley's method started from a branch-point series for ``x < -0.25``,
    ``log1p(x)`` up to ``x = 3`` and the asymptotic ``log x - log log x``
    beyond. Accepts scalars or arrays; a scalar input returns a float.

    Raises
    ------
    LambertDomainError
        For ``x < -1/e`` (up to rounding of the branch point itself).
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.isnan(x)):
        raise LambertDomainError("lambert_w0 of NaN")
    # a few ulps below -1/e are treated as the branch point
    if np.any(x < BRANCH_POINT * (1.0 + 4e-16)):
        raise LambertDomainError(f"lambert_w0 is undefined below -1/e, got {x.min()!r}")
    x = np.maximum(x, BRANCH_POINT)
    w = _initial_guess(x)
    at_branch = x == BRANCH_POINT
    active = ~at_branch & (x != 0.0)
    w[at_branch] = -1.0
    w[x == 0.0] = 0.0
    for _ in range(MAX_ITER):
        if not active.any():
            break
        wa, xa = w[active], x[active]
        ew = np.exp(wa)
        f = wa * ew - xa
        wp1 = wa + 1.0
        denom = ew * wp1 - (wa + 2.0) * f / (2.0 * wp1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(denom != 0.0, f / denom, 0.0)
        wn = wa - step
        w[active] = wn
        # near -1/e the residual hits rounding level before the step does
        done = (np.abs(step) <= 1e-12 * (1.0 + np.abs(wn))) | (
            np.abs(f) <= 2.0 * np.finfo(float).eps * np.abs(xa)
        )
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    else:
        if active.any():
            raise LambertConvergenceError("Halley iteration did not converge")
    return float(w[0]) if scalar else w
