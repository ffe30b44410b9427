"""Achievable-rate expressions shared by every antenna configuration.

All four configurations reduce to the same handful of normalized SNR terms
(:class:`EffectiveLinks`); the functions here turn those into rates. The
factor 1/2 for two-slot transmission is applied here and nowhere else.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InfeasibleQoSError, InvalidInputError

__all__ = [
    "SystemParams",
    "EffectiveLinks",
    "RateReport",
    "Strategy",
    "q_tu1",
    "expected_rate_ru1",
    "rate_ru2",
    "sic_feasible",
    "cooperation_useful",
    "links_from_beamformers",
    "evaluate_strategy",
    "check_qos",
    "SIC_RTOL",
]

# Relative slack on the decodability test so that strategies constructed to
# sit exactly on the SIC boundary are not flipped by rounding.
SIC_RTOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    alpha: float
    Q: float
    P1: float
    P2: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidInputError("alpha must lie in [0, 1]")
        if not self.Q >= 0.0:
            raise InvalidInputError("Q must be nonnegative")
        if not (self.P1 > 0 and self.P2 > 0 and self.sigma2 > 0):
            raise InvalidInputError("P1, P2 and sigma2 must be positive")

    @classmethod
    def from_config(cls, config, alpha, Q):
        return cls(alpha=alpha, Q=Q, P1=config.P1, P2=config.P2, sigma2=config.noise_power)

    @property
    def rho1(self):
        return self.P1 / self.sigma2

    @property
    def rho2(self):
        return self.P2 / self.sigma2

    @property
    def qos_snr(self):
        """SINR at Ru2 that meets the QoS target, 4**Q - 1."""
        return 4.0**self.Q - 1.0


@dataclass(frozen=True)
class EffectiveLinks:
    """Normalized SNR terms (already divided by the noise power).

    direct: Tu1 -> Ru1; boost: helper SINR at Ru1 from the relayed copy;
    relay_cap: Tu1 -> Tu2; decode12: Tu1 -> Ru2 in the first slot;
    ru2_signal / ru2_interf: Ru2's own signal and Tu2's relayed stream
    leaking into it in the second slot.
    """

    direct: float
    boost: float
    relay_cap: float
    decode12: float
    ru2_signal: float
    ru2_interf: float


@dataclass(frozen=True)
class RateReport:
    expected_ru1: float
    ru2: float
    rate_if_help: float
    rate_if_no_help: float
    sic_used: bool
    cooperation_useful: bool = True
    iterations: int = 0
    subproblem: Optional[str] = None
    converged: bool = True


@dataclass(frozen=True)
class Strategy:
    """Solver output. Beamformers carry their transmit power in their norm."""

    beta: float
    w1: np.ndarray
    w21: np.ndarray
    w22: np.ndarray
    sic: bool
    subproblem: Optional[str] = None
    eta: Optional[float] = None
    lam: Optional[float] = None
    extra: dict = field(default_factory=dict, compare=False)


def _half_log(x):
    return 0.5 * np.log2(1.0 + x)


def q_tu1(links):
    """Rate Tu1 can push to Ru1 with Tu2 decoding and forwarding."""
    return 0.5 * min(np.log2(1.0 + links.direct + links.boost), np.log2(1.0 + links.relay_cap))


def expected_rate_ru1(params, links, cooperation_useful):
    direct = _half_log(links.direct)
    if not cooperation_useful:
        return direct
    return params.alpha * q_tu1(links) + (1.0 - params.alpha) * direct


def rate_ru2(links, sic):
    if sic:
        return _half_log(links.ru2_signal)
    return _half_log(links.ru2_signal / (links.ru2_interf + 1.0))


def sic_feasible(links):
    """Whether Ru2 can decode Tu1's first-slot symbol (ties count as yes)."""
    need = min(links.direct + links.boost, links.relay_cap)
    return links.decode12 >= need - SIC_RTOL * max(need, 1.0)


def cooperation_useful(channels):
    """Relaying helps only if the best Tu1 -> Tu2 gain beats the direct link."""
    H0 = channels.H0
    g1 = np.vdot(channels.h1, channels.h1).real
    if min(H0.shape) == 1:
        lam = float(np.sum(np.abs(H0) ** 2))
    else:
        lam = float(np.linalg.eigvalsh(H0.conj().T @ H0)[-1])
    return lam > g1


def links_from_beamformers(channels, w1, w21, w22):
    s2 = channels.noise_power
    a = lambda h, w: float(np.abs(np.vdot(h, w)) ** 2)  # noqa: E731
    leak = a(channels.h21, w22)
    return EffectiveLinks(
        direct=a(channels.h1, w1) / s2,
        boost=a(channels.h21, w21) / (leak + s2),
        relay_cap=float(np.linalg.norm(channels.H0 @ w1) ** 2) / s2,
        decode12=a(channels.h12, w1) / s2,
        ru2_signal=a(channels.h2, w22) / s2,
        ru2_interf=a(channels.h2, w21) / s2,
    )


def evaluate_strategy(channels, params, strategy, allow_sic=True, useful=None, **diagnostics):
    """Rate report computed straight from the beamformers of ``strategy``.

    Ru2 applies SIC exactly when it is allowed and decoding is possible.
    """
    links = links_from_beamformers(channels, strategy.w1, strategy.w21, strategy.w22)
    if useful is None:
        useful = cooperation_useful(channels)
    sic = bool(allow_sic and sic_feasible(links))
    no_help = _half_log(links.direct)
    help_rate = q_tu1(links) if useful else no_help
    return RateReport(
        expected_ru1=float(params.alpha * help_rate + (1.0 - params.alpha) * no_help),
        ru2=float(rate_ru2(links, sic)),
        rate_if_help=float(help_rate),
        rate_if_no_help=float(no_help),
        sic_used=sic,
        cooperation_useful=bool(useful),
        **diagnostics,
    )


def check_qos(channels, params):
    """Raise if ``params.Q`` is above what Ru2 can ever reach."""
    qmax = channels.q_max(params.P2)
    if params.Q > qmax * (1.0 + 1e-12) + 1e-15:
        raise InfeasibleQoSError(f"Q={params.Q:.6g} exceeds Q_max={qmax:.6g}")
    return qmax
