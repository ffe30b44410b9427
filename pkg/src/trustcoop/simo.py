"""Helper beamformers when Tu2 has several antennas.

Tu2 splits its power between ``w21`` (relaying Tu1's symbol toward Ru1)
and ``w22`` (its own stream toward Ru2). The relayed SINR at Ru1,

    s = |h21^H w21|^2 / (|h21^H w22|^2 + sigma^2),

is pushed up by alternating two small quadratic programs while Ru2 keeps
its QoS. Two constraint sets are run: with SIC at Ru2 only ``w22`` has to
carry the QoS, without SIC ``w21`` counts as interference. The resulting
beamformers are then checked against Tu1's constants (direct gain,
Tu1 -> Tu2 gain, decode gain at Ru2), which is the only place where
``w1`` enters. That split lets the MIMO solver reuse the same runs for
every candidate ``w1``.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import Infeasible, InvalidInputError
from .linalg import normalize_phase, project_complement
from .qcqp import boost_max_values, leakage_min_values, solve_boost_max, solve_leakage_min
from .rates import Strategy, check_qos, cooperation_useful, evaluate_strategy

__all__ = [
    "SubproblemKind",
    "BcuState",
    "SimoCandidate",
    "initial_state",
    "bcu_iterate",
    "run_bcu",
    "check_caps_and_rate",
    "simo_candidates",
    "solve_simo",
    "mrt_baseline_beamformers",
    "scan_candidates",
    "best_over_beams",
    "bcu_runs",
    "pick_best",
    "QOS_SLACK",
]

QOS_SLACK = 1e-9
DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITER = 100

# power-split search: coarse fractions of the free power, then zooms
_SPLIT_GRID = np.concatenate([[0.0], np.geomspace(1e-7, 1.0, 160)])
_ZOOM_PTS = 33
_ZOOM_ROUNDS = 4


class SubproblemKind(enum.Enum):
    """Which cancellation mode Ru2 uses and which term of the helped rate binds."""

    SIC_RATIO = ("sic", "ratio")
    SIC_CAP = ("sic", "relay_cap")
    NSIC_RATIO = ("nsic", "ratio")
    NSIC_CAP = ("nsic", "relay_cap")

    @property
    def sic(self):
        return self.value[0] == "sic"

    @property
    def limiting_term(self):
        return self.value[1]

    @property
    def label(self):
        return f"{self.value[0]}-{self.value[1]}"


KIND_ORDER = (
    SubproblemKind.SIC_RATIO,
    SubproblemKind.SIC_CAP,
    SubproblemKind.NSIC_RATIO,
    SubproblemKind.NSIC_CAP,
)


@dataclass(frozen=True)
class BcuState:
    w21: np.ndarray
    w22: np.ndarray
    s: float
    iteration: int = 0
    history: tuple = ()


def _ratio(channels, w21, w22):
    s2 = channels.noise_power
    leak = abs(np.vdot(channels.h21, w22)) ** 2
    return float(abs(np.vdot(channels.h21, w21)) ** 2 / (leak + s2))


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def _relay_direction(channels, sic):
    """Unit direction for w21 when it has none yet.

    Without SIC the direction avoids h2; ``None`` if that is impossible.
    """
    h21 = channels.h21
    if sic:
        return _unit(h21)
    if channels.n2 == 1:
        return None
    perp = project_complement(h21, channels.h2)
    if np.linalg.norm(perp) <= 1e-12 * np.linalg.norm(h21):
        return None
    return _unit(perp)


def initial_state(channels, params, sic):
    """Feasible start: w22 is MRT on h2 at the least power meeting the QoS
    without interference, w21 takes the rest along h21 (with h2 projected
    out when Ru2 does not cancel)."""
    s2 = channels.noise_power
    h2 = channels.h2
    g2 = np.vdot(h2, h2).real
    p22 = min(params.qos_snr * s2 / g2, params.P2)
    w22 = normalize_phase(np.sqrt(p22) * h2 / np.sqrt(g2))
    u = _relay_direction(channels, sic)
    if u is None:
        w21 = np.zeros_like(w22)
    else:
        w21 = normalize_phase(np.sqrt(max(params.P2 - p22, 0.0)) * u)
    s = _ratio(channels, w21, w22)
    return BcuState(w21=w21, w22=w22, s=s, iteration=0, history=(s,))


def _split_search(score, p_lo, p_hi):
    """Maximize the vectorized ``score(p22)`` over w22's power in [p_lo, p_hi].

    Coarse grid biased toward p_lo, then zooms around the incumbent.
    Returns ``(p22, value)``; value is ``-inf`` if nothing is feasible.
    """
    ps = p_lo + (p_hi - p_lo) * _SPLIT_GRID
    vals = score(ps)
    k = int(np.argmax(vals))
    p_best, v_best = ps[k], vals[k]
    for _ in range(_ZOOM_ROUNDS):
        if not np.isfinite(v_best):
            break
        ps = np.linspace(ps[max(k - 1, 0)], ps[min(k + 1, len(ps) - 1)], _ZOOM_PTS)
        vals = score(ps)
        k = int(np.argmax(vals))
        if vals[k] > v_best:
            p_best, v_best = ps[k], vals[k]
    return float(p_best), float(v_best)


def _min_own_power(channels, params):
    return min(params.qos_snr * channels.noise_power / np.vdot(channels.h2, channels.h2).real, params.P2)


def _boost_step(state, channels, params, sic):
    """w21 <- strongest relay beam for w22's current direction.

    w22 keeps its direction but its power is searched too; w21 gets the
    rest and, without SIC, only as much leakage into h2 as the QoS leaves.
    Returns ``(w21, w22, s)`` or ``None``.
    """
    s2 = channels.noise_power
    gamma = params.qos_snr
    P2 = params.P2
    h2, h21 = channels.h2, channels.h21
    if not np.any(state.w22):
        return None
    u22 = _unit(state.w22)
    b = abs(np.vdot(h2, u22)) ** 2
    c = abs(np.vdot(h21, u22)) ** 2
    if b == 0:
        return None
    free_leak = sic or gamma == 0

    def leak_bound(p22):
        return np.full_like(p22, np.inf) if free_leak else np.maximum(p22 * b / gamma - s2, 0.0)

    def score(p22):
        gain = boost_max_values(h21, h2, leak_bound(p22), np.maximum(P2 - p22, 0.0))
        ok = p22 * b >= gamma * s2 * (1 - 1e-12)
        return np.where(ok, gain / (p22 * c + s2), -np.inf)

    p22, v = _split_search(score, _min_own_power(channels, params), P2)
    if not np.isfinite(v):
        return None
    w21 = solve_boost_max(h21, h2, float(leak_bound(np.array(p22))), max(P2 - p22, 0.0))
    w21, w22 = normalize_phase(w21), normalize_phase(np.sqrt(p22) * u22)
    return w21, w22, _ratio(channels, w21, w22)


def _leakage_split_step(state, channels, params, sic):
    """w22 <- least-leakage beam for w21's current direction.

    w21 keeps its direction, its power is whatever w22 leaves over; w22's
    power is searched. Returns ``(w21, w22, s)`` or ``None``.
    """
    s2 = channels.noise_power
    gamma = params.qos_snr
    P2 = params.P2
    h2, h21 = channels.h2, channels.h21
    u21 = _unit(state.w21) if np.any(state.w21) else _relay_direction(channels, sic)
    if u21 is None:
        u21 = _unit(h21)
    a = abs(np.vdot(h21, u21)) ** 2
    e = abs(np.vdot(h2, u21)) ** 2

    def need(p22):
        return np.full_like(p22, gamma * s2) if sic else gamma * (np.maximum(P2 - p22, 0.0) * e + s2)

    def score(p22):
        leak = leakage_min_values(h21, h2, need(p22), p22)
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(leak), np.maximum(P2 - p22, 0.0) * a / (leak + s2), -np.inf)

    p22, v = _split_search(score, _min_own_power(channels, params), P2)
    if not np.isfinite(v):
        return None
    p21 = max(P2 - p22, 0.0)
    try:
        w22 = solve_leakage_min(h21, h2, float(need(np.array(p22))), p22)
    except Infeasible:
        return None
    w21, w22 = normalize_phase(np.sqrt(p21) * u21), normalize_phase(w22)
    return w21, w22, _ratio(channels, w21, w22)


def bcu_iterate(state, channels, params, kind):
    """One sweep: relay beam, then own-stream beam, each with the power split.

    A block update is kept only if it does not lower ``s``, so ``s`` is
    nondecreasing along the iterations.
    """
    sic = kind.sic if isinstance(kind, SubproblemKind) else bool(kind)
    w21, w22, s = state.w21, state.w22, state.s
    for step in (_boost_step, _leakage_split_step):
        out = step(BcuState(w21=w21, w22=w22, s=s), channels, params, sic)
        if out is not None and out[2] >= s:
            w21, w22, s = out
    return BcuState(w21=w21, w22=w22, s=s, iteration=state.iteration + 1, history=state.history + (s,))


def _rel_change(old, new):
    if new == old:
        return 0.0
    return abs(new - old) / abs(new) if new != 0 else np.inf


def run_bcu(channels, params, kind, eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER, state=None):
    """Iterate until the relative change of ``s`` is at most ``eps``.

    Returns ``(state, converged)``.
    """
    if not eps > 0:
        raise InvalidInputError("eps must be positive")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be at least 1")
    sic = kind.sic if isinstance(kind, SubproblemKind) else bool(kind)
    if state is None:
        state = initial_state(channels, params, sic)
    for _ in range(max_iter):
        nxt = bcu_iterate(state, channels, params, kind)
        done = _rel_change(state.s, nxt.s) <= eps
        state = nxt
        if done:
            return state, True
    return state, False


@dataclass(frozen=True)
class SimoCandidate:
    kind: object  # SubproblemKind, or None for the no-relay fallback
    strategy: Strategy
    report: object
    valid: bool


def _tu1_constants(channels, w1):
    s2 = channels.noise_power
    direct = abs(np.vdot(channels.h1, w1)) ** 2 / s2
    relay = float(np.linalg.norm(channels.H0 @ w1) ** 2) / s2
    decode = abs(np.vdot(channels.h12, w1)) ** 2 / s2
    return direct, relay, decode


def _scaled(w21, s, target):
    if s <= target or s == 0:
        return w21
    return w21 * np.sqrt(max(target, 0.0) / s)


def check_caps_and_rate(state, channels, params, kind, w1=None, allow_sic=True, **diag):
    """Turn a BCU state into a candidate strategy for subproblem ``kind``.

    SIC kinds shrink w21 until Ru2 can still decode Tu1's symbol; ratio kinds
    also stop at the point where the Tu1 -> Tu2 cap takes over, since more
    relay power adds nothing there. Validity follows the kind's defining
    conditions and Ru2's QoS evaluated on the final beamformers.
    """
    if w1 is None:
        w1 = np.array([np.sqrt(params.P1)], dtype=complex)
    d, r, dec = _tu1_constants(channels, w1)
    w21, s = state.w21, state.s
    if kind.limiting_term == "ratio":
        cap = r - d
        if kind.sic:
            cap = min(cap, dec - d)
        w21 = _scaled(w21, s, cap)
    s_final = _ratio(channels, w21, state.w22)
    scale = max(d + s_final, r, 1.0)
    tol = 1e-9 * scale
    if kind.limiting_term == "ratio":
        valid = d + s_final <= r + tol
    else:
        valid = d + s_final >= r - tol
    if kind.sic:
        valid = valid and dec >= min(d + s_final, r) - tol
    strat = Strategy(
        beta=float(np.vdot(w21, w21).real / params.P2),
        w1=w1,
        w21=w21,
        w22=state.w22,
        sic=kind.sic,
        subproblem=kind.label,
    )
    useful = bool(r > d) and cooperation_useful(channels)
    rep = evaluate_strategy(channels, params, strat, allow_sic=allow_sic, useful=useful, subproblem=kind.label, **diag)
    strat = replace(strat, sic=rep.sic_used)
    valid = bool(valid and s_final >= 0 and rep.ru2 >= params.Q - QOS_SLACK)
    return SimoCandidate(kind=kind, strategy=strat, report=rep, valid=valid)


def _fallback(channels, params, w1, allow_sic, **diag):
    h2 = channels.h2
    w22 = normalize_phase(np.sqrt(params.P2) * h2 / np.linalg.norm(h2))
    strat = Strategy(beta=0.0, w1=w1, w21=np.zeros_like(w22), w22=w22, sic=False, subproblem="direct")
    rep = evaluate_strategy(channels, params, strat, allow_sic=False, useful=cooperation_useful(channels), subproblem="direct", **diag)
    return SimoCandidate(kind=None, strategy=strat, report=rep, valid=rep.ru2 >= params.Q - QOS_SLACK)


def simo_candidates(channels, params, runs, w1, allow_sic=True):
    """All candidates for a given Tu1 beamformer, fallback first.

    ``runs`` maps ``True``/``False`` (SIC or not) to ``(state, converged)``.
    """
    out = [_fallback(channels, params, w1, allow_sic)]
    for kind in KIND_ORDER:
        if kind.sic not in runs:
            continue
        state, conv = runs[kind.sic]
        out.append(check_caps_and_rate(
            state, channels, params, kind, w1=w1, allow_sic=allow_sic,
            iterations=state.iteration, converged=conv,
        ))
    return out


def pick_best(candidates, alpha):
    """Highest expected rate among valid candidates.

    Ties (within 1e-12) go to the earliest candidate in the list, except at
    alpha = 0 where the no-relay fallback is returned outright.
    """
    valid = [c for c in candidates if c.valid]
    if alpha == 0:
        fb = [c for c in valid if c.kind is None]
        if fb:
            return fb[0]
    best = max(c.report.expected_ru1 for c in valid)
    kinds = [c for c in valid if c.kind is not None and c.report.expected_ru1 >= best - 1e-12]
    if kinds:
        return kinds[0]
    return next(c for c in valid if c.report.expected_ru1 >= best - 1e-12)


def _candidate_order(runs):
    return [None] + [k for k in KIND_ORDER if k.sic in runs]


def scan_candidates(channels, params, runs, W1, allow_sic=True):
    """Expected rate and validity of every candidate for many Tu1 beams at once.

    ``W1`` holds one Tu1 beamformer per row. Returns ``(rates, valid)``,
    each of shape ``(len(W1), 1 + n_kinds)``; column 0 is the no-relay
    fallback, the rest follow :func:`simo_candidates`. Uses the same rules
    as :func:`check_caps_and_rate` in array form.
    """
    s2 = channels.noise_power
    W1 = np.atleast_2d(W1)
    d = np.abs(W1 @ channels.h1.conj()) ** 2 / s2
    r = np.linalg.norm(W1 @ channels.H0.T, axis=1) ** 2 / s2
    dec = np.abs(W1 @ channels.h12.conj()) ** 2 / s2
    useful = cooperation_useful(channels)
    alpha, Q = params.alpha, params.Q
    plain = 0.5 * np.log2(1 + d)
    kinds = _candidate_order(runs)[1:]
    rates = np.empty((len(W1), 1 + len(kinds)))
    valid = np.empty(rates.shape, dtype=bool)

    fb_help = 0.5 * np.minimum(np.log2(1 + d), np.log2(1 + r)) if useful else plain
    rates[:, 0] = alpha * fb_help + (1 - alpha) * plain
    valid[:, 0] = channels.q_max(params.P2) >= Q - QOS_SLACK

    for j, kind in enumerate(kinds, start=1):
        state = runs[kind.sic][0]
        s = state.s
        sig = abs(np.vdot(channels.h2, state.w22)) ** 2 / s2
        interf = abs(np.vdot(channels.h2, state.w21)) ** 2 / s2
        k2 = np.ones_like(d)
        if kind.limiting_term == "ratio":
            cap = r - d
            if kind.sic:
                cap = np.minimum(cap, dec - d)
            if s > 0:
                k2 = np.where(s <= cap, 1.0, np.maximum(cap, 0.0) / s)
        sf = k2 * s
        tol = 1e-9 * np.maximum(np.maximum(d + sf, r), 1.0)
        if kind.limiting_term == "ratio":
            ok = d + sf <= r + tol
        else:
            ok = d + sf >= r - tol
        need = np.minimum(d + sf, r)
        if kind.sic:
            ok &= dec >= need - tol
        phys = allow_sic & (dec >= need - 1e-9 * np.maximum(need, 1.0))
        ru2 = np.where(phys, 0.5 * np.log2(1 + sig), 0.5 * np.log2(1 + sig / (k2 * interf + 1)))
        use = (r > d) & useful
        helped = np.where(use, 0.5 * np.log2(1 + need), plain)
        rates[:, j] = alpha * helped + (1 - alpha) * plain
        valid[:, j] = ok & (sf >= 0) & (ru2 >= Q - QOS_SLACK)
    return rates, valid


def _pick_column(rates, valid, alpha):
    # same tie rules as pick_best on one row
    if alpha == 0 and valid[0]:
        return 0
    masked = np.where(valid, rates, -np.inf)
    best = masked.max()
    for j in range(1, len(rates)):
        if valid[j] and rates[j] >= best - 1e-12:
            return j
    return 0


def best_over_beams(channels, params, runs, W1, allow_sic=True):
    """Index of the best Tu1 beam in ``W1`` and the materialized candidate.

    Earlier rows win ties (within 1e-12). The winner is rebuilt through
    :func:`simo_candidates` so its report comes from the beamformers.
    """
    rates, valid = scan_candidates(channels, params, runs, W1, allow_sic)
    best_i, best_j, best_v = 0, 0, -np.inf
    for i in range(len(rates)):
        j = _pick_column(rates[i], valid[i], params.alpha)
        if rates[i, j] > best_v + 1e-12:
            best_i, best_j, best_v = i, j, rates[i, j]
    cands = simo_candidates(channels, params, runs, np.atleast_2d(W1)[best_i], allow_sic)
    chosen = cands[best_j]
    if not chosen.valid:
        # array and scalar rules disagree only within rounding; defer to the scalar one
        chosen = pick_best(cands, params.alpha)
    return best_i, chosen


def bcu_runs(channels, params, allow_sic=True, eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER):
    """BCU results keyed by SIC mode; they depend on Tu2's channels, P2 and Q only."""
    modes = (True, False) if allow_sic else (False,)
    return {m: run_bcu(channels, params, m, eps=eps, max_iter=max_iter) for m in modes}


def mrt_baseline_beamformers(channels, params):
    """MRT on h21 for relaying and on h2 for Ru2, with the largest relay power
    meeting the QoS when Ru2 treats the relayed stream as noise."""
    s2 = channels.noise_power
    gamma = params.qos_snr
    h2, h21 = channels.h2, channels.h21
    g2 = np.vdot(h2, h2).real
    u21 = h21 / np.linalg.norm(h21)
    leak = abs(np.vdot(h2, u21)) ** 2
    p21 = (params.P2 * g2 - gamma * s2) / (g2 + gamma * leak)
    p21 = min(max(p21, 0.0), params.P2)
    w21 = normalize_phase(np.sqrt(p21) * u21)
    w22 = normalize_phase(np.sqrt(params.P2 - p21) * h2 / np.sqrt(g2))
    return w21, w22


def solve_simo(channels, params, scheme="proposed", eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER, runs=None):
    """Helper beamformers for one SIMO instance (single antenna at Tu1).

    Schemes: ``proposed`` (best of the four subproblems), ``no_sic``
    (Ru2 never cancels), ``mrt_baseline`` (MRT beams, largest relay power
    meeting QoS without SIC) and ``no_cooperation``. ``runs`` may carry
    BCU results from :func:`bcu_runs` for the same channels, P2 and Q.
    """
    if channels.n1 != 1:
        raise InvalidInputError("solve_simo expects a single antenna at Tu1")
    if scheme not in ("proposed", "no_sic", "mrt_baseline", "no_cooperation"):
        raise InvalidInputError(f"unknown scheme {scheme!r}")
    check_qos(channels, params)
    w1 = np.array([np.sqrt(params.P1)], dtype=complex)
    useful = cooperation_useful(channels)
    if scheme == "no_cooperation" or not useful:
        c = _fallback(channels, params, w1, False)
        return c.strategy, c.report
    if scheme == "mrt_baseline":
        w21, w22 = mrt_baseline_beamformers(channels, params)
        st = Strategy(beta=float(np.vdot(w21, w21).real / params.P2), w1=w1, w21=w21, w22=w22, sic=False, subproblem="mrt")
        return st, evaluate_strategy(channels, params, st, allow_sic=False, useful=True, subproblem="mrt")
    allow_sic = scheme == "proposed"
    if runs is None:
        runs = bcu_runs(channels, params, allow_sic, eps, max_iter)
    _, c = best_over_beams(channels, params, runs, w1[None, :], allow_sic)
    return c.strategy, c.report
