"""Small dense complex linear algebra used by the solvers.

Vectors are 1-D complex numpy arrays and matrices are 2-D complex arrays.
Everything here is a pure function of its inputs.
"""

import numpy as np

from .errors import DegenerateInputError, InvalidInputError, NumericalError

__all__ = [
    "as_cvec",
    "as_hermitian",
    "normalize_phase",
    "project_onto",
    "project_complement",
    "top_eigvec",
    "rank_one_extract",
]

HERMITIAN_RTOL = 1e-10
PHASE_RTOL = 1e-9


def as_cvec(x, name="vector"):
    v = np.atleast_1d(np.asarray(x, dtype=complex))
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return v


def as_hermitian(m, name="matrix"):
    """Return ``m`` as a complex array, symmetrized after checking it is Hermitian."""
    a = np.atleast_2d(np.asarray(m, dtype=complex))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be square")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > HERMITIAN_RTOL * max(scale, 1e-300):
        raise InvalidInputError(f"{name} is not Hermitian")
    return 0.5 * (a + a.conj().T)


def normalize_phase(v):
    """Rotate ``v`` so its first non-negligible entry is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    peak = mags.max() if v.size else 0.0
    if peak == 0.0:
        return v.copy()
    k = int(np.argmax(mags > PHASE_RTOL * peak))
    return v * (np.conj(v[k]) / mags[k])


def _check_basis(basis):
    b = as_cvec(basis, "basis")
    nb = np.vdot(b, b).real
    if nb == 0.0:
        raise DegenerateInputError("projection basis is the zero vector")
    return b, nb


def project_onto(x, basis):
    """Orthogonal projection of ``x`` onto span{basis}."""
    b, nb = _check_basis(basis)
    x = as_cvec(x, "x")
    return b * (np.vdot(b, x) / nb)


def project_complement(x, basis):
    """Projection of ``x`` onto the orthogonal complement of span{basis}."""
    b, nb = _check_basis(basis)
    x = as_cvec(x, "x")
    return x - b * (np.vdot(b, x) / nb)


def top_eigvec(m):
    """Largest eigenvalue of a Hermitian matrix and a unit eigenvector.

    When the top eigenvalue is repeated, the returned vector is the
    projection of the first standard basis vector that is not orthogonal
    to the top eigenspace, so ties resolve the same way every time.
    The phase is fixed by :func:`normalize_phase`.
    """
    a = as_hermitian(m)
    w, U = np.linalg.eigh(a)
    lam = float(w[-1])
    tol = 1e-12 * max(np.abs(w).max(), 1e-300)
    top = U[:, w >= lam - tol]
    if top.shape[1] == 1:
        vec = top[:, 0]
    else:
        weights = np.linalg.norm(top, axis=1)
        k = int(np.argmax(weights > 1e-8))
        vec = top @ top[k].conj()
        vec = vec / np.linalg.norm(vec)
        lam = float(np.vdot(vec, a @ vec).real)
    return lam, normalize_phase(vec)


def _hermitian_basis(r):
    basis = []
    for j in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    for j in range(r):
        for k in range(j + 1, r):
            e = np.zeros((r, r), dtype=complex)
            e[j, k] = e[k, j] = 1.0
            basis.append(e)
            e = np.zeros((r, r), dtype=complex)
            e[j, k] = 1j
            e[k, j] = -1j
            basis.append(e)
    return basis


def _psd_factor(X, rtol):
    w, U = np.linalg.eigh(X)
    peak = w[-1]
    keep = w > rtol * peak
    return U[:, keep] * np.sqrt(w[keep])


def rank_one_extract(X, A, rtol=1e-12):
    """Find ``z`` with ``tr(A_i z z^H) = tr(A_i X)`` for every ``A_i``.

    Works by repeated rank reduction: with ``X = V V^H`` of rank ``r``,
    a nonzero Hermitian ``D`` satisfying ``tr(V^H A_i V D) = 0`` exists
    whenever ``r**2 > len(A)``. Moving ``X`` along ``-V D V^H`` until an
    eigenvalue hits zero keeps every trace and lowers the rank by one.

    Parameters
    ----------
    X : (n, n) Hermitian positive semidefinite matrix, nonzero.
    A : sequence of at most three (n, n) Hermitian matrices.

    Returns
    -------
    z : (n,) complex vector, phase-normalized.
    """
    X = as_hermitian(X, "X")
    mats = [as_hermitian(a, "A") for a in A]
    if len(mats) > 3:
        raise InvalidInputError("at most three trace functionals are supported")
    if any(a.shape != X.shape for a in mats):
        raise InvalidInputError("A matrices must match the shape of X")
    w = np.linalg.eigvalsh(X)
    if w[-1] <= 0.0:
        raise DegenerateInputError("X must be a nonzero PSD matrix")
    if w[0] < -1e-10 * max(w.sum(), w[-1]):
        raise InvalidInputError("X is not positive semidefinite")

    V = _psd_factor(X, rtol)
    steps = 0
    while V.shape[1] > 1:
        r = V.shape[1]
        if steps > X.shape[0] + 1:
            raise NumericalError(f"rank reduction stalled at rank {r}")
        basis = _hermitian_basis(r)
        if mats:
            reduced = [V.conj().T @ a @ V for a in mats]
            coeff = np.array([[np.trace(ra @ b).real for b in basis] for ra in reduced])
            _, _, vt = np.linalg.svd(coeff)
            c = vt[-1]
        else:
            c = np.zeros(len(basis))
            c[0] = 1.0
        D = sum(ck * bk for ck, bk in zip(c, basis))
        ev = np.linalg.eigvalsh(D)
        if ev[-1] <= 0.0:
            D = -D
            ev = -ev[::-1]
        if ev[-1] <= 0.0:
            raise NumericalError("rank reduction produced a zero direction")
        Y = np.eye(r) - D / ev[-1]
        V = V @ _psd_factor(0.5 * (Y + Y.conj().T), 1e-12)
        steps += 1
    return normalize_phase(V[:, 0])
