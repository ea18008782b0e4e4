"""Simultaneous polynomial root finding (Aberth-Ehrlich iteration).

Coefficients are given lowest degree first, as in ``numpy.polynomial``.
"""
from __future__ import annotations

import numpy as np

TOL = 1e-13
MAX_SWEEPS = 200


class RootFindFailure(ArithmeticError):
    pass


def trim(coeffs, rel: float = 1e-14) -> np.ndarray:
    """Drop leading (highest-degree) coefficients that are numerically zero."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0:
        return c
    scale = np.max(np.abs(c))
    if scale == 0:
        return c[:0]
    k = c.size
    while k > 0 and abs(c[k - 1]) <= rel * scale:
        k -= 1
    return c[:k]


def _horner(c, z):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def roots(coeffs, tol: float = TOL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """All complex roots, with multiplicity.

    Exact zero roots (vanishing low coefficients) are split off before the
    iteration.  Raises :class:`RootFindFailure` if the iteration produces
    non-finite values; slow convergence at clustered roots is not an error.
    """
    c = trim(coeffs)
    if c.size == 0:
        raise RootFindFailure("zero polynomial")
    nz = 0
    while nz < c.size - 1 and c[nz] == 0:
        nz += 1
    c = c[nz:]
    n = c.size - 1
    zeros = np.zeros(nz, dtype=complex)
    if n == 0:
        return zeros
    c = c / c[-1]
    if n == 1:
        return np.concatenate([zeros, [-c[0]]])
    # initial guesses on a circle sized by the Fujiwara-type bound
    radius = max(abs(c[0]) ** (1.0 / n), 1e-3)
    radius = min(radius, 2 * max(abs(c[n - k]) ** (1.0 / k) for k in range(1, n + 1)))
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles) - c[n - 1] / n
    for _ in range(max_sweeps):
        p, dp = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1 - ratio * s)
        step = np.where(p == 0, 0, step)
        if not np.all(np.isfinite(step)):
            # a coincidence of iterates; nudge and carry on
            bad = ~np.isfinite(step)
            step[bad] = 1e-8 * (1 + abs(z[bad]))
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            break
    if not np.all(np.isfinite(z)):
        raise RootFindFailure("non-finite root estimate")
    # a couple of Newton polishing steps for simple roots
    for _ in range(2):
        p, dp = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dp != 0, p / dp, 0)
        ok = np.isfinite(step) & (np.abs(step) < 1e-6 * np.maximum(1.0, np.abs(z)))
        z = np.where(ok, z - step, z)
    return np.concatenate([zeros, z])


def evaluate(coeffs, z):
    c = np.asarray(coeffs, dtype=complex)
    return _horner(c, np.asarray(z, dtype=complex))[0]
