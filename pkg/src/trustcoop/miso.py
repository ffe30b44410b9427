"""Tu1 with several antennas, single-antenna Tu2 (MISO).

Tu1's beamformer lives on the arc between the MRT direction towards Ru1
and the projection of h1 onto the relay channel h0:

    w1(eta) = sqrt(eta) * w0 + sqrt(1 - eta) * w0_perp,   eta in [v1/(v1+v2), 1]

For a given power split ``beta`` at Tu2, :func:`choose_eta` picks ``eta`` in
closed form by maximizing a high-SNR proxy of the rate at Ru1. The split
itself is chosen by a one-dimensional search that scores every candidate
with the exact rates.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .linalg import normalize_phase, project_complement, project_onto
from .rates import Strategy, check_qos, evaluate_strategy

__all__ = [
    "MisoDerived",
    "EtaChoice",
    "choose_eta",
    "choose_eta_array",
    "trust_eta",
    "crossing_eta",
    "boost_gain",
    "approx_rate",
    "regime_beta",
    "solve_miso",
    "DEFAULT_BETA_GRID",
]

DEFAULT_BETA_GRID = 2001
QOS_SLACK = 1e-12
# labels for the branch codes returned by choose_eta_array
BRANCH_LABELS = {1: "mrt-beam", 2: "trust-beam", 3: "crossing-beam"}


@dataclass(frozen=True)
class MisoDerived:
    """Channel constants of one MISO instance.

    v1, v2 split |h1|^2 into the parts along and orthogonal to h0;
    g0t = |h0|^2, g1t = |h1|^2; v3 = |h12^H h1|^2; phi1 = rho1 (1 + 1/(rho2 g21)).
    """

    v1: float
    v2: float
    g0t: float
    g1t: float
    g2: float
    g21: float
    v3: float
    phi1: float
    rho1: float
    rho2: float
    w0: np.ndarray
    w0_perp: np.ndarray
    h0: np.ndarray
    h12: np.ndarray

    @classmethod
    def from_channels(cls, channels, params):
        if channels.n2 != 1:
            raise InvalidInputError("MISO solver needs a single-antenna Tu2")
        h0 = channels.H0[0].conj()
        h1 = channels.h1
        along = project_onto(h1, h0)
        perp = project_complement(h1, h0)
        g1t = float(np.vdot(h1, h1).real)
        v1 = float(np.vdot(along, along).real)
        v2 = float(np.vdot(perp, perp).real)
        if v1 > 0:
            w0 = along / np.sqrt(v1)
        else:
            w0 = h0 / np.linalg.norm(h0)
        w0_perp = perp / np.sqrt(v2) if v2 > 1e-24 * g1t else np.zeros_like(perp)
        if not w0_perp.any():
            v2 = 0.0
        g21 = float(np.abs(channels.h21[0]) ** 2)
        rho1, rho2 = params.rho1, params.rho2
        return cls(
            v1=v1, v2=v2,
            g0t=float(np.vdot(h0, h0).real), g1t=g1t,
            g2=float(np.abs(channels.h2[0]) ** 2), g21=g21,
            v3=float(np.abs(np.vdot(channels.h12, h1)) ** 2),
            phi1=rho1 * (1.0 + 1.0 / (rho2 * g21)),
            rho1=rho1, rho2=rho2,
            w0=w0, w0_perp=w0_perp, h0=h0, h12=channels.h12,
        )

    @property
    def mrt_eta(self):
        return self.v1 / (self.v1 + self.v2)

    def beamformer(self, eta):
        return np.sqrt(eta) * self.w0 + np.sqrt(max(1.0 - eta, 0.0)) * self.w0_perp

    def gains(self, eta):
        """Beamforming gains towards Ru1, Tu2 and Ru2 for unit-norm w1(eta)."""
        eta = np.asarray(eta, dtype=float)
        rest = np.clip(1.0 - eta, 0.0, None)
        direct = (np.sqrt(eta * self.v1) + np.sqrt(rest * self.v2)) ** 2
        relay = eta * self.g0t
        a0 = np.vdot(self.h12, self.w0)
        ap = np.vdot(self.h12, self.w0_perp)
        decode = np.abs(np.sqrt(eta) * a0 + np.sqrt(rest) * ap) ** 2
        return direct, relay, decode

    @property
    def beta_lower(self):
        k = self.v1 * self.g0t - (self.v1 + self.v2) ** 2
        return k * self.phi1 / (self.v1 + self.v2 + k * self.rho1)

    @property
    def beta_upper(self):
        k = self.g0t - self.v1
        return k * self.phi1 / (1.0 + k * self.rho1)


@dataclass(frozen=True)
class EtaChoice:
    eta: float
    branch: str
    w1: np.ndarray


def boost_gain(derived, beta):
    """Relay boost expressed as an equivalent extra channel gain; inf past the pole."""
    beta = np.asarray(beta, dtype=float)
    den = derived.phi1 - beta * derived.rho1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, beta / np.where(den > 0, den, 1.0), np.inf)
    return out if out.ndim else float(out)


def trust_eta(derived, alpha):
    """Maximizer of alpha*log f + (1-alpha)*log g on the beamformer arc."""
    v1, v2 = derived.v1, derived.v2
    return (v1 + 2 * v2 * alpha + np.sqrt(v1 * v1 + 4 * v1 * v2 * alpha * (1 - alpha))) / (2 * (v1 + v2))


def crossing_eta(derived, m):
    """Crossing point f(eta) = g(eta) + m, clamped to the arc."""
    v1, v2, g0 = derived.v1, derived.v2, derived.g0t
    m = np.asarray(m, dtype=float)
    rad = np.clip(v1 * v2 * (v2 * g0 + m * (g0 - (v1 + v2) - m)), 0.0, None)
    num = v2 * (v1 + v2 + g0) + m * (g0 - v1 + v2) + 2.0 * np.sqrt(rad)
    den = (g0 - v1) ** 2 + v2 * (2 * v1 + v2 + 2 * g0)
    return np.clip(num / den, derived.mrt_eta, 1.0)


def choose_eta_array(derived, alpha, betas):
    """Vectorized :func:`choose_eta`; returns (eta, branch) arrays, branch in {1, 2, 3}."""
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    d = derived
    e1, e2 = d.mrt_eta, trust_eta(d, alpha)
    if d.v2 == 0.0:
        return np.ones_like(betas), np.full(betas.shape, 2)
    mm = boost_gain(d, betas)
    low = d.g0t * d.v1 > (d.v1 + d.v2) ** 2
    take1 = low & (betas < d.beta_lower) if low else np.zeros(betas.shape, bool)
    if d.g0t < d.v1:
        take2 = np.ones(betas.shape, bool)
    else:
        take2 = (betas > d.beta_upper) | np.isinf(mm)
    finite_m = np.where(np.isinf(mm), 0.0, mm)
    e3 = np.minimum(e2, crossing_eta(d, finite_m))
    eta = np.where(take1, e1, np.where(take2, e2, e3))
    branch = np.where(take1, 1, np.where(take2, 2, np.where(e3 < e2, 3, 2)))
    return eta, branch


def choose_eta(derived, alpha, beta):
    eta, branch = choose_eta_array(derived, alpha, [beta])
    e = float(eta[0])
    return EtaChoice(eta=e, branch=BRANCH_LABELS[int(branch[0])], w1=derived.beamformer(e))


def approx_rate(derived, alpha, beta, eta):
    """High-SNR proxy of the expected rate at Ru1 for beamformer w1(eta)."""
    d = derived
    eta = np.asarray(eta, dtype=float)
    rest = np.clip(1.0 - eta, 0.0, None)
    g = (np.sqrt(eta * d.v1) + np.sqrt(rest * d.v2)) ** 2
    f = eta * d.g0t
    helped = np.minimum(g + boost_gain(d, beta), f)
    with np.errstate(divide="ignore"):
        return 0.5 * alpha * np.log2(d.rho1 * helped) + 0.5 * (1 - alpha) * np.log2(d.rho1 * g)


def _beta_q(derived, Q):
    snr2 = derived.rho2 * derived.g2
    bq1 = min(max(1.0 - (4.0**Q - 1.0) / snr2, 0.0), 1.0)
    return bq1, bq1 * 4.0**-Q


def regime_beta(derived, alpha, Q):
    """Closed-form split for the strong- and weak-relay-channel regimes.

    Only defined when rho1 == rho2; returns ``(beta, eta)`` or ``None``.
    In the strong regime the MRT beamformer is optimal for every split and
    the split is the largest one meeting QoS, with or without SIC.
    """
    d = derived
    if d.rho1 != d.rho2 or d.v1 <= 0:
        return None
    bq1, bq2 = _beta_q(d, Q)
    if d.g0t >= d.g1t * (d.g1t + d.g21) / d.v1:
        k = d.v3 - d.g1t**2
        if k >= 0:
            bt2 = min(max(k * d.phi1 / (d.g1t + k * d.rho1), 0.0), 1.0)
            return max(min(bt2, bq1), bq2), d.mrt_eta
        return bq2, d.mrt_eta
    if d.g0t < d.v1:
        e2 = float(trust_eta(d, alpha))
        w1 = d.beamformer(e2)
        v4 = abs(np.vdot(d.h12, w1)) ** 2
        v5 = abs(np.vdot(d.h0, w1)) ** 2
        return (bq1 if v4 >= v5 else bq2), e2
    return None


def _strategy(derived, params, beta, eta, sic, branch):
    w1 = normalize_phase(derived.beamformer(eta)) * np.sqrt(params.P1)
    return Strategy(
        beta=float(beta),
        w1=w1,
        w21=np.array([np.sqrt(beta * params.P2)], dtype=complex),
        w22=np.array([np.sqrt((1.0 - beta) * params.P2)], dtype=complex),
        sic=sic,
        subproblem=branch,
        eta=float(eta),
    )


def solve_miso(channels, params, scheme="proposed", beta_grid=DEFAULT_BETA_GRID):
    """Beamformer and power split for one MISO instance.

    Schemes: ``proposed``; ``no_sic`` (same search, Ru2 never cancels);
    ``mrt_baseline`` (MRT at Tu1, no SIC, largest split meeting QoS);
    ``no_cooperation``.
    """
    check_qos(channels, params)
    d = MisoDerived.from_channels(channels, params)
    useful = d.g0t > d.g1t
    allow_sic = scheme == "proposed"
    if scheme not in ("proposed", "no_sic", "mrt_baseline", "no_cooperation"):
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    bq1, bq2 = _beta_q(d, params.Q)

    if scheme == "no_cooperation" or not useful:
        st = _strategy(d, params, 0.0, d.mrt_eta, False, "direct")
        return st, evaluate_strategy(channels, params, st, allow_sic=False, useful=False)
    if scheme == "mrt_baseline":
        st = _strategy(d, params, bq2, d.mrt_eta, False, "mrt")
        return st, evaluate_strategy(channels, params, st, allow_sic=False, useful=True)

    if scheme == "proposed":
        fast = regime_beta(d, params.alpha, params.Q)
        if fast is not None:
            beta, eta = fast
            st = _strategy(d, params, beta, eta, False, "regime")
            rep = evaluate_strategy(channels, params, st, allow_sic=True, useful=True)
            st = _strategy(d, params, beta, eta, rep.sic_used, "regime")
            return st, rep

    betas = np.unique(np.concatenate([np.linspace(0.0, 1.0, beta_grid), [bq1, bq2]]))
    eta, branch = choose_eta_array(d, params.alpha, betas)
    gd, gr, gdec = d.gains(eta)
    rho1 = d.rho1
    direct, relay, decode = rho1 * gd, rho1 * gr, rho1 * gdec
    r2g21 = d.rho2 * d.g21
    boost = betas * r2g21 / ((1.0 - betas) * r2g21 + 1.0)
    need = np.minimum(direct + boost, relay)
    sic = allow_sic & (decode >= need - 1e-9 * np.maximum(need, 1.0))
    snr2 = d.rho2 * d.g2
    ru2 = np.where(
        sic,
        0.5 * np.log2(1.0 + (1.0 - betas) * snr2),
        0.5 * np.log2(1.0 + (1.0 - betas) * snr2 / (betas * snr2 + 1.0)),
    )
    feasible = ru2 >= params.Q - QOS_SLACK
    help_rate = 0.5 * np.log2(1.0 + need)
    rate = params.alpha * help_rate + (1 - params.alpha) * 0.5 * np.log2(1.0 + direct)
    rate = np.where(feasible, rate, -np.inf)
    best = rate.max()
    k = int(np.argmax(rate >= best - 1e-12))
    st = _strategy(d, params, betas[k], eta[k], bool(sic[k]), BRANCH_LABELS[int(branch[k])])
    return st, evaluate_strategy(channels, params, st, allow_sic=allow_sic, useful=True)
