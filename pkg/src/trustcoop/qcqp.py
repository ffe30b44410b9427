"""Small complex quadratic programs behind the helper's beamformer updates.

Two problem shapes appear, both over a single beamformer ``w``:

* boost-max:    max |a^H w|^2  s.t. |b^H w|^2 <= L,  |w|^2 <= P
* leakage-min:  min |b^H w|^2  s.t. |a^H w|^2 >= S,  |w|^2 <= P

The optimum lies in span{a, b}. Writing ``w = x * b_hat + y * u`` with
``u`` the unit part of ``a`` orthogonal to ``b`` turns both into a
two-variable problem with an explicit solution, implemented in
:func:`solve_boost_max` and :func:`solve_leakage_min`.

:func:`sdr_solve_and_extract` is an independent route for the same
problems: it solves the semidefinite relaxation on the span with a
log-det barrier method and recovers a vector with
:func:`~trustcoop.linalg.rank_one_extract`.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import Infeasible, InvalidInputError, NumericalError
from .linalg import as_cvec, normalize_phase, rank_one_extract

__all__ = [
    "QuadProblem",
    "solve_boost_max",
    "solve_leakage_min",
    "sdr_relaxation",
    "sdr_solve_and_extract",
    "quad_value",
    "boost_max_values",
    "leakage_min_values",
]


def _split(a, b):
    """Coordinates of ``a`` in the basis (b_hat, u) with u the unit part of a orthogonal to b."""
    nb = np.linalg.norm(b)
    bh = b / nb
    c1 = np.vdot(bh, a)
    u = a - c1 * bh
    c2 = np.linalg.norm(u)
    uh = u / c2 if c2 > 1e-14 * np.linalg.norm(a) else np.zeros_like(u)
    if not uh.any():
        c2 = 0.0
    return bh, uh, c1, c2


def _rot(c):
    return c / abs(c) if abs(c) > 0 else 1.0


def solve_boost_max(h_gain, h_leak, leak_bound, power):
    """Maximize |h_gain^H w|^2 s.t. |h_leak^H w|^2 <= leak_bound and |w|^2 <= power."""
    a = as_cvec(h_gain, "h_gain")
    b = as_cvec(h_leak, "h_leak")
    if not np.any(a):
        raise InvalidInputError("h_gain must be nonzero")
    if leak_bound < 0:
        raise Infeasible("negative leakage bound")
    if power <= 0:
        return np.zeros_like(a)
    na = np.linalg.norm(a)
    mrt = np.sqrt(power) * a / na
    nb2 = np.vdot(b, b).real
    if nb2 == 0 or np.isinf(leak_bound) or abs(np.vdot(b, mrt)) ** 2 <= leak_bound:
        return normalize_phase(mrt)
    bh, uh, c1, c2 = _split(a, b)
    s = np.sqrt(leak_bound / nb2)
    t = np.sqrt(max(power - s * s, 0.0)) if c2 > 0 else 0.0
    return normalize_phase(s * _rot(c1) * bh + t * uh)


def solve_leakage_min(h_leak, h_sig, sig_bound, power):
    """Minimize |h_leak^H w|^2 s.t. |h_sig^H w|^2 >= sig_bound and |w|^2 <= power.

    Raises :class:`Infeasible` if even full-power MRT on ``h_sig`` misses
    ``sig_bound``. When a zero-leakage direction exists within budget the
    cheapest such ``w`` is returned.
    """
    b = as_cvec(h_leak, "h_leak")
    a = as_cvec(h_sig, "h_sig")
    if sig_bound <= 0:
        return np.zeros_like(a)
    na2 = np.vdot(a, a).real
    if na2 * power < sig_bound * (1.0 - 1e-12):
        raise Infeasible("signal bound above full-power MRT")
    if not np.any(b):
        return normalize_phase(np.sqrt(sig_bound / na2) * a / np.sqrt(na2))
    bh, uh, c1, c2 = _split(a, b)
    if c2 > 0 and c2 * c2 * power >= sig_bound:
        return normalize_phase(np.sqrt(sig_bound) / c2 * uh)
    root = np.sqrt(max(na2 * power - sig_bound, 0.0))
    s = max((abs(c1) * np.sqrt(sig_bound) - c2 * root) / na2, 0.0)
    t = np.sqrt(max(power - s * s, 0.0)) if c2 > 0 else 0.0
    return normalize_phase(s * _rot(c1) * bh + t * uh)


def boost_max_values(h_gain, h_leak, leak_bound, power):
    """Optimal objective of :func:`solve_boost_max` for arrays of bounds and budgets.

    Same closed form, evaluated without building the beamformers.
    """
    a = as_cvec(h_gain, "h_gain")
    b = as_cvec(h_leak, "h_leak")
    L, P = np.broadcast_arrays(np.asarray(leak_bound, float), np.asarray(power, float))
    na2 = np.vdot(a, a).real
    nb2 = np.vdot(b, b).real
    P = np.maximum(P, 0.0)
    full = P * na2
    if nb2 == 0:
        return full
    _, _, c1, c2 = _split(a, b)
    mrt_leak = P * abs(np.vdot(b, a)) ** 2 / na2
    with np.errstate(invalid="ignore"):
        s = np.sqrt(np.where(np.isinf(L), 0.0, np.maximum(L, 0.0)) / nb2)
        t = np.sqrt(np.maximum(P - s * s, 0.0)) if c2 > 0 else 0.0
        capped = (s * abs(c1) + t * c2) ** 2
    return np.where(np.isinf(L) | (mrt_leak <= L), full, capped)


def leakage_min_values(h_leak, h_sig, sig_bound, power):
    """Optimal leakage of :func:`solve_leakage_min` for arrays of bounds and budgets.

    ``inf`` marks infeasible entries.
    """
    b = as_cvec(h_leak, "h_leak")
    a = as_cvec(h_sig, "h_sig")
    S, P = np.broadcast_arrays(np.asarray(sig_bound, float), np.asarray(power, float))
    na2 = np.vdot(a, a).real
    nb2 = np.vdot(b, b).real
    if nb2 == 0:
        out = np.zeros(S.shape)
    else:
        _, _, c1, c2 = _split(a, b)
        root = np.sqrt(np.maximum(na2 * P - S, 0.0))
        s = np.maximum((abs(c1) * np.sqrt(np.maximum(S, 0.0)) - c2 * root) / na2, 0.0)
        zf = (c2 > 0) & (c2 * c2 * P >= S)
        out = np.where(zf, 0.0, nb2 * s * s)
    out = np.where(na2 * P < S * (1.0 - 1e-12), np.inf, out)
    return np.where(S <= 0, 0.0, out)


@dataclass(frozen=True)
class QuadProblem:
    """Optimize |objective^H w|^2 under vector constraints and a power budget.

    Each constraint is ``(b, bound, direction)`` meaning
    ``|b^H w|^2 <= bound`` (direction ``"<="``) or ``>= bound``.
    """

    objective: np.ndarray
    sense: str
    constraints: Tuple[tuple, ...]
    power_budget: float

    def __post_init__(self):
        if self.sense not in ("maximize", "minimize"):
            raise InvalidInputError("sense must be 'maximize' or 'minimize'")
        if len(self.constraints) > 2:
            raise InvalidInputError("at most two vector constraints")
        for _, bound, direction in self.constraints:
            if direction not in ("<=", ">=") or bound < 0:
                raise InvalidInputError("bad constraint")
        if self.power_budget < 0:
            raise InvalidInputError("power budget must be nonnegative")

    @classmethod
    def boost_max(cls, h_gain, h_leak, leak_bound, power):
        return cls(as_cvec(h_gain), "maximize", ((as_cvec(h_leak), leak_bound, "<="),), power)

    @classmethod
    def leakage_min(cls, h_leak, h_sig, sig_bound, power):
        return cls(as_cvec(h_leak), "minimize", ((as_cvec(h_sig), sig_bound, ">="),), power)


def quad_value(v, w):
    return float(abs(np.vdot(v, w)) ** 2)


# --- semidefinite relaxation -------------------------------------------------


def _herm_basis(n):
    """Trace-orthonormal basis of n x n Hermitian matrices."""
    out = []
    r = 1.0 / np.sqrt(2.0)
    for j in range(n):
        e = np.zeros((n, n), complex)
        e[j, j] = 1.0
        out.append(e)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), complex)
            e[j, k] = e[k, j] = r
            out.append(e)
            e = np.zeros((n, n), complex)
            e[j, k] = 1j * r
            e[k, j] = -1j * r
            out.append(e)
    return np.array(out)


def _vec(M, basis):
    return np.einsum("kij,ji->k", basis, M).real


def _barrier(c, A, b, basis, z0, stop_below=None, gap=1e-13):
    """Maximize c.z s.t. A z < b and W(z) > 0, from a strictly feasible z0.

    W(z) is built from the first len(basis) entries of z. If ``stop_below``
    is given, return as soon as the last coordinate drops below it.
    """
    nw = len(basis)
    n = basis.shape[1]

    def parts(z):
        W = np.einsum("k,kij->ij", z[:nw], basis)
        s = b - A @ z
        return W, s

    def feasible(z):
        W, s = parts(z)
        if np.any(s <= 0):
            return None
        try:
            L = np.linalg.cholesky(W)
        except np.linalg.LinAlgError:
            return None
        return W, s, L

    def value(z, t, st):
        W, s, L = st
        return -t * (c @ z) - np.sum(np.log(s)) - 2.0 * np.sum(np.log(np.real(np.diag(L))))

    z = np.array(z0, float)
    st = feasible(z)
    if st is None:
        raise NumericalError("barrier start is not strictly feasible")
    m = len(b) + n
    t = 1.0
    while True:
        for _ in range(200):
            W, s, L = st
            Winv = np.linalg.inv(W)
            F = np.einsum("ij,kjl->kil", Winv, basis)
            grad = -t * c + A.T @ (1.0 / s)
            grad[:nw] -= np.einsum("kii->k", F).real
            H = (A.T * (1.0 / s**2)) @ A
            H[:nw, :nw] += np.einsum("kij,lji->kl", F, F).real
            step = -np.linalg.solve(H, grad)
            dec = -grad @ step
            if dec < 1e-14:
                break
            f0 = value(z, t, st)
            alpha = 1.0
            while True:
                zn = z + alpha * step
                stn = feasible(zn)
                if stn is not None and value(zn, t, stn) <= f0 - 0.25 * alpha * dec:
                    break
                alpha *= 0.5
                if alpha < 1e-16:
                    stn = None
                    break
            if stn is None:
                break
            z, st = zn, stn
            if stop_below is not None and z[-1] < stop_below:
                return z
        if m / t < gap:
            return z
        t *= 10.0


def _span_basis(vectors, tol=1e-12):
    M = np.column_stack(vectors)
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    keep = sv > tol * sv[0]
    return U[:, keep]


def sdr_relaxation(p):
    """Solve the semidefinite relaxation of ``p`` on the span of its vectors.

    Returns ``(W, value)`` with ``W`` the full-size PSD optimum and
    ``value`` the optimal objective ``tr(a a^H W)``.
    """
    a = as_cvec(p.objective)
    P = float(p.power_budget)
    if P == 0:
        for _, bound, direction in p.constraints:
            if direction == ">=" and bound > 0:
                raise Infeasible("positive signal bound with zero power")
        return np.zeros((a.size, a.size), complex), 0.0
    cons = []
    zero_leak = []
    for v, bound, direction in p.constraints:
        v = as_cvec(v)
        nv = np.linalg.norm(v)
        if nv == 0:
            if direction == ">=" and bound > 0:
                raise Infeasible("signal constraint on a zero vector")
            continue
        if direction == "<=" and bound == 0:
            zero_leak.append(v / nv)
        else:
            cons.append((v / nv, bound / (P * nv * nv), direction))
    vecs = [a] + [v for v, _, _ in cons] + zero_leak
    U = _span_basis(vecs)
    for v in zero_leak:
        U = U - np.outer(v, v.conj() @ U)
        U = _span_basis(list(U.T)) if np.linalg.norm(U) > 1e-12 else U[:, :0]
    if U.shape[1] == 0:
        for _, bound, direction in cons:
            if direction == ">=" and bound > 0:
                raise Infeasible("no direction avoids the zero-leakage constraints")
        return np.zeros((a.size, a.size), complex), 0.0
    n = U.shape[1]
    basis = _herm_basis(n)
    na = np.linalg.norm(a)
    ac = U.conj().T @ (a / na) if na > 0 else np.zeros(n, complex)
    c = _vec(np.outer(ac, ac.conj()), basis)
    if p.sense == "minimize":
        c = -c
    rows, rhs = [], []
    for v, bound, direction in cons:
        vc = U.conj().T @ v
        row = _vec(np.outer(vc, vc.conj()), basis)
        if direction == "<=":
            rows.append(row)
            rhs.append(bound)
        else:
            rows.append(-row)
            rhs.append(-bound)
    rows.append(_vec(np.eye(n), basis))
    rhs.append(1.0)
    A = np.array(rows)
    b = np.array(rhs)

    # phase one: maximize -sigma s.t. A z <= b + sigma, sigma >= -1
    x0 = _vec(np.eye(n) * (0.5 / n), basis)
    sigma0 = max(np.max(A @ x0 - b), 0.0) + 1.0
    A1 = np.vstack([np.hstack([A, -np.ones((len(b), 1))]), np.r_[np.zeros(len(x0)), -1.0]])
    b1 = np.r_[b, 1.0]
    c1 = np.r_[np.zeros(len(x0)), -1.0]
    z1 = _barrier(c1, A1, b1, basis, np.r_[x0, sigma0], stop_below=-1e-9)
    if z1[-1] > 1e-9:
        raise Infeasible("semidefinite relaxation is infeasible")
    if z1[-1] > -1e-9:
        x = z1[:-1]
    else:
        x = _barrier(c, A, b, basis, z1[:-1])
    Wc = np.einsum("k,kij->ij", x, basis)
    W = P * (U @ Wc @ U.conj().T)
    W = 0.5 * (W + W.conj().T)
    return W, float(np.vdot(a, W @ a).real)


def sdr_solve_and_extract(p):
    """Vector solution of ``p`` through its semidefinite relaxation.

    The relaxed optimum is reduced to rank one while keeping the value of
    every constraint and of the power. With a single vector constraint the
    objective is kept explicitly as well; with two, it is kept by
    complementary slackness of the relaxed optimum.
    """
    W, _ = sdr_relaxation(p)
    a = as_cvec(p.objective)
    if not np.any(W):
        return np.zeros_like(a)
    mats = [np.outer(v, np.conj(v)) for v, _, _ in p.constraints]
    mats.append(np.eye(a.size))
    if len(mats) < 3:
        mats.insert(0, np.outer(a, a.conj()))
    return rank_one_extract(W, mats)
