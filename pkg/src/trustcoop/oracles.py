"""Brute-force reference solvers.

These are deliberately naive: they evaluate the rate expressions on dense
grids (plus local zooming) without reusing the closed forms or the
iterative solvers, and serve as ground truth in tests and in the
``trustcoop oracle`` command.
"""

import numpy as np

from .linalg import as_cvec

__all__ = [
    "qcqp_grid_oracle",
    "siso_beta_oracle",
    "miso_eta_oracle",
    "miso_joint_oracle",
    "simo_ratio_oracle",
    "simo_rate_oracle",
]


# --- quadratic programs --------------------------------------------------------


def _orthonormal_pair(u, v):
    e1 = u / np.linalg.norm(u)
    r = v - e1 * np.vdot(e1, v)
    if np.linalg.norm(r) < 1e-12 * np.linalg.norm(v):
        # any unit vector orthogonal to e1
        k = int(np.argmin(np.abs(e1)))
        r = np.zeros_like(e1)
        r[k] = 1.0
        r = r - e1 * np.vdot(e1, r)
    return e1, r / np.linalg.norm(r)


def qcqp_grid_oracle(problem, n_theta=1025, n_phase=256, zoom_rounds=8, zoom_pts=41):
    """Best grid direction of a one-constraint QuadProblem on span{objective, constraint}.

    Unit directions ``cos(t) e1 + sin(t) exp(i phi) e2`` are scanned on a
    uniform (t, phi) grid, then refined by repeated local zooming. Along a
    fixed direction objective and constraint both scale with the transmit
    power, so the best feasible power for that direction is exact. Returns
    ``(w, value)``; both are ``None`` when no direction is feasible.
    """
    a = as_cvec(problem.objective)
    (b, bound, direction), = problem.constraints
    b = as_cvec(b)
    P = float(problem.power_budget)
    e1, e2 = _orthonormal_pair(b, a)
    a1, a2 = np.vdot(a, e1), np.vdot(a, e2)
    b1, b2 = np.vdot(b, e1), np.vdot(b, e2)
    maximize = problem.sense == "maximize"
    half_pi = np.pi / 2

    def unit_gain(x1, x2, c, s, ph):
        cross = np.abs(np.conj(x1) * x2) * np.cos(ph + np.angle(np.conj(x1) * x2))
        return c * c * abs(x1) ** 2 + s * s * abs(x2) ** 2 + 2 * c * s * cross

    def power_and_value(t, ph):
        t = np.clip(t, 0.0, half_pi)
        c = np.where(t >= half_pi, 0.0, np.cos(t))
        s = np.sin(t)
        T, PH = c[:, None], ph[None, :]
        S = s[:, None]
        obj = np.maximum(unit_gain(a1, a2, T, S, PH), 0.0)
        con = np.maximum(unit_gain(b1, b2, T, S, PH), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            if direction == "<=":
                p = np.where(con * P <= bound, P, bound / con)
            else:
                p = np.where(bound <= 0, 0.0, bound / con)
                p = np.where(p <= P * (1 + 1e-12), np.minimum(p, P), np.nan)
        val = p * obj
        score = np.where(np.isfinite(val), val if maximize else -val, -np.inf)
        return score, p

    def best_of(t, ph):
        score, p = power_and_value(t, ph)
        i, j = np.unravel_index(np.argmax(score), score.shape)
        return float(score[i, j]), float(np.clip(t[i], 0.0, half_pi)), float(ph[j]), float(p[i, j])

    ts = np.linspace(0.0, half_pi, n_theta)
    phs = np.linspace(-np.pi, np.pi, n_phase, endpoint=False)
    best, t0, ph0, p0 = best_of(ts, phs)
    if not np.isfinite(best):
        return None, None
    dt, dp = half_pi / (n_theta - 1), 2 * np.pi / n_phase
    for _ in range(zoom_rounds):
        cand = best_of(np.linspace(t0 - dt, t0 + dt, zoom_pts), np.linspace(ph0 - dp, ph0 + dp, zoom_pts))
        if cand[0] >= best:
            best, t0, ph0, p0 = cand
        dt, dp = dt / 8, dp / 8
    c0 = 0.0 if t0 >= half_pi else np.cos(t0)
    w = np.sqrt(p0) * (c0 * e1 + np.sin(t0) * np.exp(1j * ph0) * e2)
    return w, float(abs(np.vdot(a, w)) ** 2)


# --- SISO ----------------------------------------------------------------------


def siso_beta_oracle(gains, alpha, Q, step=1e-4):
    """Best expected rate over a uniform beta grid, scoring every point exactly.

    Returns ``(beta, rate)``.
    """
    g = gains
    beta = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    direct = g.rho1 * g.g1
    boost = beta * g.rho2 * g.g21 / ((1.0 - beta) * g.rho2 * g.g21 + 1.0)
    helped = 0.5 * np.minimum(np.log2(1 + direct + boost), np.log2(1 + g.rho1 * g.g0))
    plain = 0.5 * np.log2(1 + direct)
    if g.g0 > g.g1:
        rate = alpha * helped + (1 - alpha) * plain
    else:
        rate = np.full_like(beta, plain)
    decodable = 0.5 * np.log2(1 + g.rho1 * g.g12) >= helped
    snr2 = g.rho2 * g.g2
    ru2 = np.where(
        decodable,
        0.5 * np.log2(1 + (1 - beta) * snr2),
        0.5 * np.log2(1 + (1 - beta) * snr2 / (beta * snr2 + 1)),
    )
    rate = np.where(ru2 >= Q, rate, -np.inf)
    k = int(np.argmax(rate))
    return float(beta[k]), float(rate[k])


# --- MISO ----------------------------------------------------------------------


def _miso_constants(channels, rho1, rho2):
    h0 = channels.H0[0].conj()
    h1 = channels.h1
    e_par = h0 / np.linalg.norm(h0)
    along = e_par * np.vdot(e_par, h1)
    perp = h1 - along
    return h0, h1, along, perp


def miso_eta_oracle(derived, alpha, beta, step=1e-5):
    """Max of the high-SNR proxy over a uniform eta grid on [v1/(v1+v2), 1].

    Builds the beamformers explicitly from w0, w0_perp rather than from
    the closed-form gains. Returns ``(eta, value)``.
    """
    d = derived
    lo = d.v1 / (d.v1 + d.v2)
    eta = np.arange(lo, 1.0, step)
    eta = np.append(eta, 1.0)
    h1 = np.sqrt(d.v1) * d.w0 + np.sqrt(d.v2) * d.w0_perp
    x0, xp = np.vdot(h1, d.w0), np.vdot(h1, d.w0_perp)
    y0, yp = np.vdot(d.h0, d.w0), np.vdot(d.h0, d.w0_perp)
    s, c = np.sqrt(eta), np.sqrt(np.clip(1 - eta, 0, None))
    g = np.abs(s * x0 + c * xp) ** 2
    f = np.abs(s * y0 + c * yp) ** 2
    den = d.phi1 - beta * d.rho1
    m = beta / den if den > 0 else np.inf
    with np.errstate(divide="ignore"):
        val = 0.5 * alpha * np.log2(d.rho1 * np.minimum(g + m, f)) + 0.5 * (1 - alpha) * np.log2(d.rho1 * g)
    k = int(np.argmax(val))
    return float(eta[k]), float(val[k])


def miso_joint_oracle(channels, params, n_beta=801, n_eta=801):
    """Exact expected rate maximized over a joint (beta, eta) grid.

    ``eta`` parameterizes the same arc as the solver's beamformer. Returns
    ``(beta, eta, rate)``.
    """
    h0, h1, along, perp = _miso_constants(channels, params.rho1, params.rho2)
    v1 = np.vdot(along, along).real
    v2 = np.vdot(perp, perp).real
    g1t = np.vdot(h1, h1).real
    g0t = np.vdot(h0, h0).real
    s2 = params.sigma2
    plain_mrt = 0.5 * np.log2(1 + params.P1 * g1t / s2)
    if g0t <= g1t:
        return 0.0, v1 / (v1 + v2), plain_mrt
    u0 = along / np.sqrt(v1)
    up = perp / np.sqrt(v2) if v2 > 0 else np.zeros_like(perp)
    B, E = np.meshgrid(np.linspace(0, 1, n_beta), np.linspace(v1 / (v1 + v2), 1, n_eta), indexing="ij")
    s, c = np.sqrt(E), np.sqrt(np.clip(1 - E, 0, None))
    gain = lambda h: np.abs(s * np.vdot(h, u0) + c * np.vdot(h, up)) ** 2  # noqa: E731
    rho1 = params.P1 / s2
    direct, relay, dec = rho1 * gain(h1), rho1 * gain(h0), rho1 * gain(channels.h12)
    g21 = abs(channels.h21[0]) ** 2
    g2 = abs(channels.h2[0]) ** 2
    r2 = params.P2 / s2
    boost = B * r2 * g21 / ((1 - B) * r2 * g21 + 1)
    helped = np.minimum(direct + boost, relay)
    sic = dec >= helped
    ru2 = np.where(sic, 0.5 * np.log2(1 + (1 - B) * r2 * g2), 0.5 * np.log2(1 + (1 - B) * r2 * g2 / (B * r2 * g2 + 1)))
    rate = params.alpha * 0.5 * np.log2(1 + helped) + (1 - params.alpha) * 0.5 * np.log2(1 + direct)
    rate = np.where(ru2 >= params.Q, rate, -np.inf)
    k = np.unravel_index(np.argmax(rate), rate.shape)
    return float(B[k]), float(E[k]), float(rate[k])


# --- SIMO ----------------------------------------------------------------------


def _directions(theta, phi):
    # unit vectors [cos t, sin t e^{i phi}] in C^2 (global phase dropped)
    return np.cos(theta), np.sin(theta) * np.exp(1j * phi)


def _inner(h, c0, c1):
    return np.conj(h[0]) * c0 + np.conj(h[1]) * c1


def _split_for(sic, b, e, P2, gamma, s2):
    """Relay power for given directions: all power not needed by w22."""
    if sic:
        p21 = P2 - gamma * s2 / b
    else:
        p21 = (P2 * b - gamma * s2) / (b + gamma * e)
    return p21


def _simo_terms(channels, t1, f1, t2, f2):
    u21 = _directions(t1, f1)
    u22 = _directions(t2, f2)
    h2, h21 = channels.h2, channels.h21
    a = np.abs(_inner(h21, *u21)) ** 2
    c = np.abs(_inner(h21, *u22)) ** 2
    b = np.abs(_inner(h2, *u22)) ** 2
    e = np.abs(_inner(h2, *u21)) ** 2
    return a, b, c, e


def _require_two(channels):
    if channels.n2 != 2:
        raise ValueError("SIMO brute-force oracles cover two helper antennas only")


def simo_ratio_oracle(channels, params, sic, n_theta=40, n_phi=40, polish=3):
    """Largest relay SINR ``s`` reachable under Ru2's QoS, by brute force.

    Both beam directions sweep a (angle, phase) grid on the unit sphere of
    C^2; for each pair the power split is the one leaving w22 exactly the
    QoS power. The best few grid points are then polished by Nelder-Mead.
    """
    from scipy.optimize import minimize

    _require_two(channels)
    P2, s2, gamma = params.P2, channels.noise_power, params.qos_snr

    def score(t1, f1, t2, f2):
        a, b, c, e = _simo_terms(channels, t1, f1, t2, f2)
        with np.errstate(divide="ignore", invalid="ignore"):
            p21 = _split_for(sic, b, e, P2, gamma, s2)
            p22 = P2 - p21
            s = p21 * a / (p22 * c + s2)
        return np.where((p21 >= 0) & (p22 >= 0) & (b > 0), s, -np.inf)

    th = np.linspace(0.0, np.pi / 2, n_theta)
    ph = np.linspace(-np.pi, np.pi, n_phi, endpoint=False)
    T1, F1, T2, F2 = np.meshgrid(th, ph, th, ph, indexing="ij", sparse=True)
    grid = score(T1, F1, T2, F2)
    flat = np.argsort(grid, axis=None)[::-1][:polish]
    best = float(grid.max())
    if not np.isfinite(best):
        return 0.0
    for idx in flat:
        i, j, k, m = np.unravel_index(idx, grid.shape)
        x0 = np.array([th[i], ph[j], th[k], ph[m]])
        res = minimize(lambda x: -float(score(*x)), x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if np.isfinite(res.fun):
            best = max(best, -float(res.fun))
    return best


def simo_rate_oracle(channels, params, w1=None, n_theta=20, n_phi=20, n_scale=25, polish=True):
    """Best expected rate at Ru1 over helper beams, evaluated from scratch.

    Grid over both directions and over the relay power as a fraction of
    its QoS-limited maximum, for Ru2 with and without cancellation; every
    point is scored with the physical rule that Ru2 cancels whenever it
    can decode. Returns the best rate, never below direct transmission.
    """
    from scipy.optimize import minimize

    _require_two(channels)
    if w1 is None:
        w1 = np.array([np.sqrt(params.P1)], dtype=complex)
    P2, s2, gamma, alpha = params.P2, channels.noise_power, params.qos_snr, params.alpha
    d = abs(np.vdot(channels.h1, w1)) ** 2 / s2
    r = float(np.linalg.norm(channels.H0 @ w1) ** 2) / s2
    dec = abs(np.vdot(channels.h12, w1)) ** 2 / s2
    direct_rate = 0.5 * np.log2(1 + d)
    g0_big = float(np.linalg.eigvalsh(channels.H0.conj().T @ channels.H0)[-1]) > np.vdot(channels.h1, channels.h1).real
    if not g0_big:
        return direct_rate

    def score(sic, t1, f1, t2, f2, k):
        a, b, c, e = _simo_terms(channels, t1, f1, t2, f2)
        with np.errstate(divide="ignore", invalid="ignore"):
            p21 = np.clip(_split_for(sic, b, e, P2, gamma, s2), 0.0, P2) * k
            p22 = P2 - p21
            s = p21 * a / (p22 * c + s2)
            helped = np.minimum(d + s, r)
            can = dec >= helped - 1e-9 * np.maximum(helped, 1.0)
            sig = p22 * b / s2
            ru2 = np.where(can, 0.5 * np.log2(1 + sig), 0.5 * np.log2(1 + sig / (p21 * e / s2 + 1)))
            rate = alpha * 0.5 * np.log2(1 + helped) + (1 - alpha) * direct_rate
        return np.where((ru2 >= params.Q - 1e-9) & (k >= 0) & (k <= 1), rate, -np.inf)

    th = np.linspace(0.0, np.pi / 2, n_theta)
    ph = np.linspace(-np.pi, np.pi, n_phi, endpoint=False)
    ks = np.linspace(0.0, 1.0, n_scale)
    T1, F1, T2, F2, K = np.meshgrid(th, ph, th, ph, ks, indexing="ij", sparse=True)
    best = direct_rate
    for sic in (True, False):
        grid = score(sic, T1, F1, T2, F2, K)
        top = float(grid.max())
        if not np.isfinite(top):
            continue
        if polish:
            i = np.unravel_index(int(np.argmax(grid)), grid.shape)
            x0 = np.array([th[i[0]], ph[i[1]], th[i[2]], ph[i[3]], ks[i[4]]])
            res = minimize(lambda x: -float(score(sic, *x)), x0, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
            if np.isfinite(res.fun):
                top = max(top, -float(res.fun))
        best = max(best, top)
    return best
