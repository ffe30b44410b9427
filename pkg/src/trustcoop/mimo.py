"""Both transmitters with antenna arrays.

Tu1's beam is restricted to the arc between MRT toward Ru1 and the
strongest eigenbeam of the Tu1 -> Tu2 channel, indexed by ``lam`` on a
uniform grid. For each grid point the helper beams come from the same
block-coordinate runs as the SIMO case; those runs do not depend on
``w1``, so they are computed once and only the caps are re-checked.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError, NumericalError
from .linalg import normalize_phase, top_eigvec
from .rates import Strategy, check_qos, cooperation_useful, evaluate_strategy
from .simo import DEFAULT_EPS, DEFAULT_MAX_ITER, bcu_runs, best_over_beams, mrt_baseline_beamformers

__all__ = ["LambdaGrid", "MimoCandidate", "relay_eigbeam", "w1_of_lambda", "solve_mimo", "DEFAULT_M"]

DEFAULT_M = 100


@dataclass(frozen=True)
class LambdaGrid:
    """``lam = m / M`` for ``m = 0..M``; zero is included so pure MRT is a candidate."""

    M: int = DEFAULT_M

    def __post_init__(self):
        if isinstance(self.M, bool) or not isinstance(self.M, (int, np.integer)) or self.M < 1:
            raise InvalidInputError("M must be a positive integer")

    @property
    def points(self):
        return np.arange(self.M + 1) / self.M


@dataclass(frozen=True)
class MimoCandidate:
    lam: float
    w1: np.ndarray
    w21: np.ndarray
    w22: np.ndarray
    report: object


def relay_eigbeam(channels):
    """Top eigenvector of H0^H H0, rotated so its inner product with h1 is
    real and nonnegative (this keeps the arc short and the mix nonzero)."""
    H0 = channels.H0
    lam, v = top_eigvec(H0.conj().T @ H0)
    c = np.vdot(channels.h1, v)
    if abs(c) > 0:
        v = v * (abs(c) / c)
    return lam, v


def w1_of_lambda(channels, P1, lam, eigbeam=None):
    """``sqrt(P1)`` times the unit-normalized mix ``lam*v0 + (1-lam)*h1/|h1|``."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError("lam must lie in [0, 1]")
    v0 = relay_eigbeam(channels)[1] if eigbeam is None else eigbeam
    mrt = channels.h1 / np.linalg.norm(channels.h1)
    mix = lam * v0 + (1.0 - lam) * mrt
    n = np.linalg.norm(mix)
    if not n > 1e-12:
        raise NumericalError("beam mix vanished")
    return normalize_phase(np.sqrt(P1) * mix / n)


def solve_mimo(channels, params, M=DEFAULT_M, scheme="proposed", eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER,
               runs=None):
    """Tu1 beam on the ``lam`` grid plus helper beams, best expected rate.

    Schemes: ``proposed``, ``no_sic``, ``mrt_baseline`` (MRT toward Ru1 at
    Tu1, MRT beams at Tu2, no SIC) and ``no_cooperation``. ``runs`` may
    carry BCU results from :func:`trustcoop.simo.bcu_runs`.
    """
    if scheme not in ("proposed", "no_sic", "mrt_baseline", "no_cooperation"):
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    check_qos(channels, params)
    grid = LambdaGrid(M)
    useful = cooperation_useful(channels)
    mrt_w1 = w1_of_lambda(channels, params.P1, 0.0, eigbeam=channels.h1 / np.linalg.norm(channels.h1))
    if scheme == "no_cooperation" or not useful:
        h2 = channels.h2
        w22 = normalize_phase(np.sqrt(params.P2) * h2 / np.linalg.norm(h2))
        st = Strategy(beta=0.0, w1=mrt_w1, w21=np.zeros_like(w22), w22=w22, sic=False, subproblem="direct", lam=0.0)
        return st, evaluate_strategy(channels, params, st, allow_sic=False, useful=useful, subproblem="direct")
    if scheme == "mrt_baseline":
        w21, w22 = mrt_baseline_beamformers(channels, params)
        st = Strategy(beta=float(np.vdot(w21, w21).real / params.P2), w1=mrt_w1, w21=w21, w22=w22,
                      sic=False, subproblem="mrt", lam=0.0)
        return st, evaluate_strategy(channels, params, st, allow_sic=False, useful=True, subproblem="mrt")

    allow_sic = scheme == "proposed"
    if runs is None:
        runs = bcu_runs(channels, params, allow_sic, eps, max_iter)
    v0 = relay_eigbeam(channels)[1]
    lams = grid.points
    W1 = np.array([w1_of_lambda(channels, params.P1, lam, eigbeam=v0) for lam in lams])
    i, c = best_over_beams(channels, params, runs, W1, allow_sic)
    return replace(c.strategy, lam=float(lams[i])), c.report
