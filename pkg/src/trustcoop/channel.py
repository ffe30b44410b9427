"""Rayleigh channel realizations for the two-pair cooperation model.

Each trial draws from its own counter-based stream keyed by
``(seed, trial_index, attempt)``, so a trial's channels do not depend on
which other trials ran or in what order.
"""

from dataclasses import dataclass
from numbers import Real

import numpy as np

from .errors import ConfigError

__all__ = ["ChannelConfig", "ChannelSet", "db_to_linear", "sample", "standard_draws"]


def db_to_linear(x_dB):
    return 10.0 ** (x_dB / 10.0)


@dataclass(frozen=True)
class ChannelConfig:
    """Antenna counts, average element gains (dB) and transmit SNRs (dB)."""

    n1: int = 1
    n2: int = 1
    var_H0: float = -35.0
    var_h1: float = -45.0
    var_h2: float = -30.0
    var_h12: float = -25.0
    var_h21: float = -25.0
    noise_power: float = 1.0
    rho1_dB: float = 40.0
    rho2_dB: float = 40.0

    def __post_init__(self):
        for name in ("n1", "n2"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"channel.{name}", "must be an integer >= 1")
            if v > 8:
                raise ConfigError(f"channel.{name}", "at most 8 antennas are supported")
        for name in ("var_H0", "var_h1", "var_h2", "var_h12", "var_h21", "rho1_dB", "rho2_dB"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, Real) or not np.isfinite(v):
                raise ConfigError(f"channel.{name}", "must be a finite number")
        if not (isinstance(self.noise_power, Real) and not isinstance(self.noise_power, bool) and self.noise_power > 0
                and np.isfinite(self.noise_power)):
            raise ConfigError("channel.noise_power", "must be a positive finite number")

    @property
    def P1(self):
        return db_to_linear(self.rho1_dB) * self.noise_power

    @property
    def P2(self):
        return db_to_linear(self.rho2_dB) * self.noise_power


@dataclass(frozen=True)
class ChannelSet:
    """One realization of all five channels.

    ``H0`` is (n2, n1); ``h1`` and ``h12`` have length n1; ``h2`` and ``h21``
    have length n2. A receiver sees ``h^H w`` for transmit beamformer ``w``.
    """

    H0: np.ndarray
    h1: np.ndarray
    h12: np.ndarray
    h2: np.ndarray
    h21: np.ndarray
    noise_power: float = 1.0

    @property
    def n1(self):
        return self.h1.shape[0]

    @property
    def n2(self):
        return self.h2.shape[0]

    def q_max(self, P2):
        """Largest Ru2 rate, reached by full-power MRT on h2."""
        g2 = np.vdot(self.h2, self.h2).real
        return 0.5 * np.log2(1.0 + P2 * g2 / self.noise_power)

    def with_h21_scaled(self, factor):
        return ChannelSet(self.H0, self.h1, self.h12, self.h2, self.h21 * factor, self.noise_power)


def _stream(seed, trial_index, attempt):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial_index), int(attempt)]))


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def standard_draws(n1, n2, seed, trial_index, attempt=0):
    """Unit-variance CN(0, 1) draws in the fixed order H0, h1, h2, h12, h21."""
    rng = _stream(seed, trial_index, attempt)
    H0 = _cn(rng, (n2, n1))
    h1 = _cn(rng, n1)
    h2 = _cn(rng, n2)
    h12 = _cn(rng, n1)
    h21 = _cn(rng, n2)
    return H0, h1, h2, h12, h21


def sample(config, seed, trial_index, attempt=0):
    """Draw a ChannelSet for ``config`` from the stream of one trial.

    Draws are unit-variance normals scaled by the configured linear
    variances, so configs that differ only in variances share the same
    underlying randomness for a given ``(seed, trial_index, attempt)``.
    """
    H0, h1, h2, h12, h21 = standard_draws(config.n1, config.n2, seed, trial_index, attempt)
    s = lambda dB: np.sqrt(db_to_linear(dB))  # noqa: E731
    return ChannelSet(
        H0=H0 * s(config.var_H0),
        h1=h1 * s(config.var_h1),
        h12=h12 * s(config.var_h12),
        h2=h2 * s(config.var_h2),
        h21=h21 * s(config.var_h21),
        noise_power=float(config.noise_power),
    )
