"""Closed-form power split at the helper for single-antenna nodes.

Tu2 spends a fraction ``beta`` of its power relaying Tu1's symbol and the
rest on its own receiver. The rate at Ru1 never decreases with ``beta``,
so the optimum is the largest ``beta`` that still meets Ru2's QoS target,
given whether Ru2 can cancel Tu1's symbol (SIC) or must treat the relayed
copy as noise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleQoSError, InvalidInputError
from .rates import (
    EffectiveLinks, RateReport, Strategy, expected_rate_ru1, q_tu1, rate_ru2, sic_feasible,
)

__all__ = [
    "SisoGains",
    "BetaBreakpoints",
    "breakpoints",
    "optimal_beta",
    "solve_siso",
    "siso_links",
]


@dataclass(frozen=True)
class SisoGains:
    g0: float
    g1: float
    g2: float
    g12: float
    g21: float
    rho1: float
    rho2: float

    def __post_init__(self):
        vals = (self.g0, self.g1, self.g2, self.g12, self.g21, self.rho1, self.rho2)
        if not all(np.isfinite(v) and v > 0 for v in vals):
            raise InvalidInputError("SISO gains and SNRs must be positive and finite")

    @classmethod
    def from_channels(cls, channels, params):
        g = lambda x: float(np.sum(np.abs(x) ** 2))  # noqa: E731
        return cls(
            g0=g(channels.H0), g1=g(channels.h1), g2=g(channels.h2),
            g12=g(channels.h12), g21=g(channels.h21),
            rho1=params.rho1, rho2=params.rho2,
        )

    @property
    def useful(self):
        return self.g0 > self.g1

    @property
    def q_max(self):
        return 0.5 * np.log2(1.0 + self.rho2 * self.g2)


@dataclass(frozen=True)
class BetaBreakpoints:
    """Breakpoints of the power split, clamped to [0, 1], plus raw values.

    beta0: where the relayed rate meets the Tu1 -> Tu2 cap.
    beta_q1 / beta_q2: largest split meeting QoS with / without SIC.
    beta_tilde1: largest split at which Ru2 can still decode Tu1.
    r1, r2, r3: the QoS levels at which those breakpoints cross.
    """

    beta0: float
    beta_q1: float
    beta_q2: float
    beta_tilde1: float
    raw_beta0: float
    raw_beta_q1: float
    raw_beta_q2: float
    raw_beta_tilde1: float
    r1: float
    r2: float
    r3: float


def _clamp(x):
    return min(max(x, 0.0), 1.0)


def _crossing(gap, rho2g21):
    # split at which rho1*g1 + boost(beta) reaches rho1*g1 + gap
    return 1.0 - (rho2g21 - gap) / (rho2g21 * (1.0 + gap))


def _pos_rate(arg):
    return 0.5 * np.log2(arg) if arg > 1.0 else 0.0


def breakpoints(gains, Q):
    if Q < 0:
        raise InvalidInputError("Q must be nonnegative")
    if Q > gains.q_max * (1.0 + 1e-12) + 1e-15:
        raise InfeasibleQoSError(f"Q={Q:.6g} exceeds Q_max={gains.q_max:.6g}")
    g = gains
    snr2 = g.rho2 * g.g2
    rho2g21 = g.rho2 * g.g21
    b0 = _crossing(g.rho1 * (g.g0 - g.g1), rho2g21)
    bt1 = _crossing(g.rho1 * (g.g12 - g.g1), rho2g21)
    bq1 = 1.0 - (4.0**Q - 1.0) / snr2
    bq2 = bq1 * 4.0**-Q
    r1 = _pos_rate(1.0 + (1.0 - b0) * snr2)
    r2 = _pos_rate(1.0 + (1.0 - bt1) * snr2)
    den = 1.0 + snr2 * bt1
    r3 = 0.5 * np.log2((1.0 + snr2) / den) if den > 0 else np.inf
    return BetaBreakpoints(
        beta0=_clamp(b0), beta_q1=_clamp(bq1), beta_q2=_clamp(bq2), beta_tilde1=_clamp(bt1),
        raw_beta0=b0, raw_beta_q1=bq1, raw_beta_q2=bq2, raw_beta_tilde1=bt1,
        r1=r1, r2=r2, r3=r3,
    )


def optimal_beta(gains, Q):
    """Optimal split and whether it relies on SIC at Ru2.

    Returns ``(0.0, False)`` when relaying cannot help (g0 <= g1).
    """
    bp = breakpoints(gains, Q)
    g = gains
    if not g.useful:
        return 0.0, False
    if (g.g12 >= g.g0 and Q <= bp.r1) or (g.g12 >= g.g1 and Q >= max(bp.r1, bp.r2)):
        return bp.beta_q1, True
    if g.g0 > g.g12 >= g.g1 and bp.r2 >= Q > bp.r3:
        return bp.beta_tilde1, True
    return bp.beta_q2, False


def siso_links(gains, beta):
    g = gains
    rho2g21 = g.rho2 * g.g21
    return EffectiveLinks(
        direct=g.rho1 * g.g1,
        boost=beta * rho2g21 / ((1.0 - beta) * rho2g21 + 1.0),
        relay_cap=g.rho1 * g.g0,
        decode12=g.rho1 * g.g12,
        ru2_signal=(1.0 - beta) * g.rho2 * g.g2,
        ru2_interf=beta * g.rho2 * g.g2,
    )


def solve_siso(gains, params, scheme="proposed"):
    """Power split and rate report for one SISO instance.

    ``scheme`` is one of ``proposed`` (closed-form optimum), ``no_sic`` and
    ``mrt_baseline`` (Ru2 never cancels, so the split is the no-SIC QoS
    limit), or ``no_cooperation`` (Tu2 never relays).
    """
    bp = breakpoints(gains, params.Q)
    allow_sic = scheme == "proposed"
    if scheme == "proposed":
        beta, sic = optimal_beta(gains, params.Q)
    elif scheme in ("no_sic", "mrt_baseline"):
        beta, sic = (bp.beta_q2 if gains.useful else 0.0), False
    elif scheme == "no_cooperation":
        beta, sic = 0.0, False
    else:
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    useful = gains.useful and scheme != "no_cooperation"
    if not useful:
        beta = 0.0
    links = siso_links(gains, beta)
    sic_used = bool(allow_sic and sic_feasible(links))
    no_help = 0.5 * np.log2(1.0 + links.direct)
    report = RateReport(
        expected_ru1=expected_rate_ru1(params, links, useful),
        ru2=rate_ru2(links, sic_used),
        rate_if_help=q_tu1(links) if useful else no_help,
        rate_if_no_help=no_help,
        sic_used=sic_used,
        cooperation_useful=useful,
        subproblem="sic" if sic else "nsic",
    )
    strategy = Strategy(
        beta=beta,
        w1=np.array([np.sqrt(params.P1)], dtype=complex),
        w21=np.array([np.sqrt(beta * params.P2)], dtype=complex),
        w22=np.array([np.sqrt((1.0 - beta) * params.P2)], dtype=complex),
        sic=sic,
        subproblem="sic" if sic else "nsic",
    )
    return strategy, report
