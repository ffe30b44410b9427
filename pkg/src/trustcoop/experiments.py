"""Monte Carlo sweeps over trust degree, QoS target or relay-link gain.

Every sweep value in a run sees the same channel draws per trial (common
random numbers), so curve orderings can be checked trial by trial. A trial
whose Ru2 link cannot reach the largest QoS target in the run is redrawn
from the next stream of that trial.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from numbers import Integral, Real
from typing import Optional

import numpy as np

from .channel import ChannelConfig, db_to_linear, sample
from .errors import ConfigError, TrustCoopError
from .mimo import DEFAULT_M, solve_mimo
from .miso import DEFAULT_BETA_GRID, solve_miso
from .rates import SystemParams
from .simo import DEFAULT_EPS, DEFAULT_MAX_ITER, bcu_runs, solve_simo
from .siso import SisoGains, solve_siso

__all__ = [
    "SCHEMES",
    "SWEEP_VARIABLES",
    "PRESET_NAMES",
    "SolverOptions",
    "Sweep",
    "ExperimentConfig",
    "SweepRow",
    "SweepResult",
    "CSV_COLUMNS",
    "solve",
    "run_sweep",
    "run_many",
    "preset",
    "emit_csv",
    "write_csv",
    "with_trials",
    "read_csv",
    "load_config",
    "config_from_dict",
    "default_workers",
]

SCHEMES = ("proposed", "no_sic", "mrt_baseline", "no_cooperation")
SWEEP_VARIABLES = ("alpha", "Q", "g21_dB")
PRESET_NAMES = tuple(f"fig{k}" for k in range(2, 10))
MAX_ATTEMPTS = 10_000

CSV_COLUMNS = (
    "sweep_var", "sweep_value", "scheme", "n1", "n2", "rho1_dB", "rho2_dB", "alpha", "Q", "trials",
    "mean_rate_ru1", "mean_rate_ru2", "mean_beta", "mean_eta", "mean_lambda", "feasible_frac",
)


@dataclass(frozen=True)
class SolverOptions:
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    beta_grid: int = DEFAULT_BETA_GRID
    lambda_M: int = DEFAULT_M

    def __post_init__(self):
        if not (_is_real(self.eps) and self.eps > 0):
            raise ConfigError("solver.eps", "must be a positive number")
        for name, lo in (("max_iter", 1), ("beta_grid", 2), ("lambda_M", 1)):
            v = getattr(self, name)
            if not _is_int(v) or v < lo:
                raise ConfigError(f"solver.{name}", f"must be an integer >= {lo}")


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: tuple

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError("sweep.variable", f"must be one of {', '.join(SWEEP_VARIABLES)}")
        vals = tuple(self.values)
        for i, v in enumerate(vals):
            path = f"sweep.values[{i}]"
            if not _is_real(v) or not math.isfinite(v):
                raise ConfigError(path, "must be a finite number")
            if self.variable == "alpha" and not 0 <= v <= 1:
                raise ConfigError(path, "alpha must lie in [0, 1]")
            if self.variable == "Q" and v < 0:
                raise ConfigError(path, "Q must be nonnegative")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))


@dataclass(frozen=True)
class ExperimentConfig:
    """One curve: a channel model, base (alpha, Q), a sweep and a scheme.

    ``qmax_floor`` raises the redraw threshold above the run's own largest
    QoS target so several curves can share the same draws.
    """

    sweep: Sweep
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    alpha: float = 0.5
    Q: float = 0.5
    trials: int = 100
    seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)
    scheme: str = "proposed"
    qmax_floor: Optional[float] = None

    def __post_init__(self):
        if not (_is_real(self.alpha) and 0 <= self.alpha <= 1):
            raise ConfigError("params.alpha", "must lie in [0, 1]")
        if not (_is_real(self.Q) and self.Q >= 0 and math.isfinite(self.Q)):
            raise ConfigError("params.Q", "must be a finite nonnegative number")
        if not _is_int(self.trials) or self.trials < 1:
            raise ConfigError("trials", "must be an integer >= 1")
        if not _is_int(self.seed) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an integer in [0, 2**64)")
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"must be one of {', '.join(SCHEMES)}")
        if self.qmax_floor is not None and not (_is_real(self.qmax_floor) and self.qmax_floor >= 0):
            raise ConfigError("qmax_floor", "must be a nonnegative number or null")

    def row_params(self):
        """(alpha, Q, var_h21 dB) for each sweep value, in sweep order."""
        out = []
        for v in self.sweep.values:
            a, q, g = self.alpha, self.Q, self.channel.var_h21
            if self.sweep.variable == "alpha":
                a = v
            elif self.sweep.variable == "Q":
                q = v
            else:
                g = v
            out.append((a, q, g))
        return out

    def q_needed(self):
        qs = [q for _, q, _ in self.row_params()] or [self.Q]
        top = max(qs)
        return top if self.qmax_floor is None else max(top, self.qmax_floor)

    def to_dict(self):
        return {
            "channel": asdict(self.channel),
            "params": {"alpha": self.alpha, "Q": self.Q},
            "sweep": {"variable": self.sweep.variable, "values": list(self.sweep.values)},
            "trials": self.trials,
            "seed": self.seed,
            "solver": asdict(self.solver),
            "scheme": self.scheme,
            "qmax_floor": self.qmax_floor,
        }


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    n1: int
    n2: int
    rho1_dB: float
    rho2_dB: float
    alpha: float
    Q: float
    trials: int
    mean_rate_ru1: float
    mean_rate_ru2: float
    mean_beta: float
    mean_eta: float
    mean_lambda: float
    feasible_frac: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    resamples: int = 0
    per_trial: Optional[np.ndarray] = field(default=None, compare=False, repr=False)


# --- config parsing ------------------------------------------------------------


def _is_real(v):
    return isinstance(v, Real) and not isinstance(v, bool)


def _is_int(v):
    return isinstance(v, Integral) and not isinstance(v, bool)


def _take(d, allowed, path):
    if not isinstance(d, dict):
        raise ConfigError(path or "<root>", "must be a JSON object")
    extra = sorted(set(d) - set(allowed))
    if extra:
        where = f"{path}.{extra[0]}" if path else extra[0]
        raise ConfigError(where, "unknown key")
    return d


def config_from_dict(d, path=""):
    """Build an ExperimentConfig from parsed JSON; unknown keys are errors."""
    top = ("channel", "params", "sweep", "trials", "seed", "solver", "scheme", "qmax_floor")
    _take(d, top, path)
    p = (path + ".") if path else ""
    if "sweep" not in d:
        raise ConfigError(f"{p}sweep", "is required")
    ch_fields = [f.name for f in fields(ChannelConfig)]
    ch = _take(d.get("channel", {}), ch_fields, f"{p}channel")
    params = _take(d.get("params", {}), ("alpha", "Q"), f"{p}params")
    sw = _take(d["sweep"], ("variable", "values"), f"{p}sweep")
    so = _take(d.get("solver", {}), [f.name for f in fields(SolverOptions)], f"{p}solver")
    if "variable" not in sw or "values" not in sw:
        raise ConfigError(f"{p}sweep", "needs 'variable' and 'values'")
    if not isinstance(sw["values"], list):
        raise ConfigError(f"{p}sweep.values", "must be a list")
    try:
        return ExperimentConfig(
            channel=ChannelConfig(**ch),
            sweep=Sweep(sw["variable"], tuple(sw["values"])),
            solver=SolverOptions(**so),
            **{k: d[k] for k in ("trials", "seed", "scheme", "qmax_floor") if k in d},
            **params,
        )
    except ConfigError as e:
        if path:
            raise ConfigError(f"{path}.{e.path}", e.message) from None
        raise


def load_config(path):
    """Read a UTF-8 JSON file holding one config object or a list of them."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(str(path), f"cannot read: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON: {e}") from None
    if isinstance(doc, list):
        return [config_from_dict(item, f"[{i}]") for i, item in enumerate(doc)]
    return [config_from_dict(doc)]


# --- solving -------------------------------------------------------------------


def solve(channels, params, scheme="proposed", options=None, runs=None):
    """Pick the solver by antenna counts and return ``(Strategy, RateReport)``."""
    opts = options or SolverOptions()
    n1, n2 = channels.n1, channels.n2
    if n1 == 1 and n2 == 1:
        return solve_siso(SisoGains.from_channels(channels, params), params, scheme)
    if n2 == 1:
        return solve_miso(channels, params, scheme, beta_grid=opts.beta_grid)
    if n1 == 1:
        return solve_simo(channels, params, scheme, eps=opts.eps, max_iter=opts.max_iter, runs=runs)
    return solve_mimo(channels, params, M=opts.lambda_M, scheme=scheme, eps=opts.eps,
                      max_iter=opts.max_iter, runs=runs)


def _draw(config, trial):
    """Channels for one trial plus the Q_max of every attempt made."""
    need = config.q_needed()
    qmaxes = []
    for attempt in range(MAX_ATTEMPTS):
        ch = sample(config.channel, config.seed, trial, attempt)
        qm = ch.q_max(config.channel.P2)
        qmaxes.append(qm)
        if qm >= need:
            return ch, qmaxes
    raise TrustCoopError(f"trial {trial}: no draw reached Q={need:g} in {MAX_ATTEMPTS} attempts")


def _trial(config, trial):
    """Per-row (rate_ru1, rate_ru2, beta, eta, lambda) and the attempts' Q_max."""
    ch, qmaxes = _draw(config, trial)
    cc = config.channel
    base_var = db_to_linear(cc.var_h21)
    runs_cache = {}
    out = np.empty((len(config.sweep.values), 5))
    for i, (alpha, Q, g21) in enumerate(config.row_params()):
        chi = ch if g21 == cc.var_h21 else ch.with_h21_scaled(math.sqrt(db_to_linear(g21) / base_var))
        params = SystemParams(alpha=alpha, Q=Q, P1=cc.P1, P2=cc.P2, sigma2=cc.noise_power)
        runs = None
        if ch.n2 > 1 and config.scheme in ("proposed", "no_sic"):
            key = (g21, Q)
            if key not in runs_cache:
                runs_cache[key] = bcu_runs(chi, params, config.scheme == "proposed",
                                           config.solver.eps, config.solver.max_iter)
            runs = runs_cache[key]
        st, rep = solve(chi, params, config.scheme, config.solver, runs=runs)
        eta = st.eta if (ch.n1 > 1 and ch.n2 == 1 and st.eta is not None) else math.nan
        lam = st.lam if (ch.n1 > 1 and ch.n2 > 1 and st.lam is not None) else math.nan
        out[i] = (rep.expected_ru1, rep.ru2, st.beta, eta, lam)
    return out, qmaxes


def _trial_job(args):
    return _trial(*args)


def default_workers():
    """Worker count: CPU count, capped by TRUSTCOOP_THREADS when set."""
    n = os.cpu_count() or 1
    env = os.environ.get("TRUSTCOOP_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError("TRUSTCOOP_THREADS", "must be a positive integer") from None
        if cap < 1:
            raise ConfigError("TRUSTCOOP_THREADS", "must be a positive integer")
        n = min(n, cap)
    return n


def _map_trials(config, workers):
    jobs = [(config, t) for t in range(config.trials)]
    if workers <= 1 or config.trials == 1:
        return [_trial_job(j) for j in jobs]
    chunk = max(1, config.trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_trial_job, jobs, chunksize=chunk))


def run_sweep(config, workers=None):
    """Run every trial and average per sweep value.

    Means are compensated sums taken in trial order, so the result is the
    same for any worker count. ``feasible_frac`` is the share of all draws
    (redraws included) whose Q_max reaches that row's Q.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    results = _map_trials(config, workers)
    per_trial = np.stack([r for r, _ in results]) if results else np.empty((0, len(config.sweep.values), 5))
    qmaxes = [q for _, qs in results for q in qs]
    resamples = len(qmaxes) - len(results)
    cc = config.channel
    rows = []
    for i, (alpha, Q, _g) in enumerate(config.row_params()):
        col = per_trial[:, i, :]
        mean = lambda k: math.fsum(col[:, k]) / len(col)  # noqa: E731
        rows.append(SweepRow(
            sweep_var=config.sweep.variable,
            sweep_value=config.sweep.values[i],
            scheme=config.scheme,
            n1=cc.n1, n2=cc.n2, rho1_dB=cc.rho1_dB, rho2_dB=cc.rho2_dB,
            alpha=alpha, Q=Q, trials=config.trials,
            mean_rate_ru1=mean(0), mean_rate_ru2=mean(1), mean_beta=mean(2),
            mean_eta=mean(3), mean_lambda=mean(4),
            feasible_frac=float(sum(q >= Q for q in qmaxes) / len(qmaxes)),
        ))
    return SweepResult(rows=tuple(rows), resamples=resamples, per_trial=per_trial)


def run_many(configs, workers=None):
    """Run several configs and concatenate their rows in the given order."""
    results = [run_sweep(c, workers) for c in configs]
    return SweepResult(
        rows=tuple(r for res in results for r in res.rows),
        resamples=sum(res.resamples for res in results),
    )


# --- presets -------------------------------------------------------------------

_ALPHAS = tuple(round(0.1 * k, 1) for k in range(11))
_G21_WIDE = tuple(float(v) for v in range(-50, -9, 5))


def preset(name, trials=10_000, seed=0):
    """Configs reproducing one of the published sweeps, one per curve.

    Curves of a preset share the draw threshold, so they see the same
    channels trial by trial.
    """
    if name not in PRESET_NAMES:
        raise ConfigError("preset", f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}")
    mk = lambda **kw: ExperimentConfig(trials=trials, seed=seed, **kw)  # noqa: E731

    if name == "fig2":
        ch = ChannelConfig(n1=1, n2=1, rho1_dB=40.0, rho2_dB=40.0)
        qs = Sweep("Q", tuple(round(0.1 * k, 1) for k in range(1, 16)))
        curves = [("proposed", 1.0), ("proposed", 0.5), ("no_sic", 1.0), ("no_sic", 0.5), ("no_cooperation", 0.0)]
        return [mk(channel=ch, sweep=qs, scheme=s, alpha=a, qmax_floor=1.5) for s, a in curves]
    if name == "fig3":
        out = []
        for Q in (0.5, 0.3):
            for rho2 in (40.0, 30.0):
                ch = ChannelConfig(n1=1, n2=1, var_H0=-32.0, var_h1=-40.0, var_h2=-30.0, var_h12=-32.0,
                                   rho1_dB=40.0, rho2_dB=rho2)
                sw = Sweep("g21_dB", tuple(float(v) for v in range(-40, -9, 2)))
                out.append(mk(channel=ch, sweep=sw, alpha=0.5, Q=Q, qmax_floor=0.5))
        return out
    if name in ("fig4", "fig5"):
        ch = ChannelConfig(n1=2, n2=1, rho1_dB=50.0, rho2_dB=50.0)
        schemes = ("proposed", "mrt_baseline", "no_cooperation") if name == "fig4" else ("proposed", "mrt_baseline")
        return [mk(channel=ch, sweep=Sweep("alpha", _ALPHAS), Q=1.0, scheme=s) for s in schemes]
    if name in ("fig6", "fig8"):
        n1, qs = (1, (0.5, 1.0)) if name == "fig6" else (2, (1.0, 2.0))
        ch = ChannelConfig(n1=n1, n2=2, rho1_dB=50.0, rho2_dB=50.0)
        return [mk(channel=ch, sweep=Sweep("alpha", _ALPHAS), Q=Q, scheme=s, qmax_floor=max(qs))
                for Q in qs for s in ("proposed", "mrt_baseline", "no_cooperation")]
    # fig7 / fig9
    n1, qs = (1, (0.5, 1.0)) if name == "fig7" else (2, (1.0, 2.0))
    ch = ChannelConfig(n1=n1, n2=2, rho1_dB=50.0, rho2_dB=50.0)
    return [mk(channel=ch, sweep=Sweep("g21_dB", _G21_WIDE), alpha=0.5, Q=Q, qmax_floor=max(qs)) for Q in qs]


# --- CSV -----------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, str):
        return v
    if _is_int(v):
        return str(int(v))
    x = float(v)
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def write_csv(result, stream):
    """Write the header and one line per row to an open text stream."""
    w = csv.writer(stream, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(CSV_COLUMNS)
    for row in result.rows:
        w.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])


def emit_csv(result, path):
    """Write ``result`` to ``path`` as CSV (LF line ends, no quoting needed)."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_csv(result, fh)
    except OSError as e:
        raise TrustCoopError(f"{path}: cannot write CSV: {e.strerror or e}") from None


_INT_COLS = {"n1", "n2", "trials"}
_STR_COLS = {"sweep_var", "scheme"}


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into a SweepResult."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise TrustCoopError(f"{path}: unexpected header")
        rows = []
        for line in reader:
            vals = {}
            for c, v in zip(CSV_COLUMNS, line):
                vals[c] = v if c in _STR_COLS else (int(v) if c in _INT_COLS else float(v))
            rows.append(SweepRow(**vals))
    return SweepResult(rows=tuple(rows))


def with_trials(configs, trials=None, seed=None):
    """Copies of ``configs`` with trial count and/or seed overridden."""
    out = []
    for c in configs:
        kw = {}
        if trials is not None:
            kw["trials"] = trials
        if seed is not None:
            kw["seed"] = seed
        out.append(replace(c, **kw))
    return out
