import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import cn
from trustcoop.errors import Infeasible, InvalidInputError
from trustcoop.qcqp import (
    QuadProblem, boost_max_values, leakage_min_values, quad_value, sdr_relaxation, sdr_solve_and_extract,
    solve_boost_max, solve_leakage_min,
)

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=200, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), frac=st.floats(0.0, 1.5))
def test_boost_max_is_feasible_and_beats_random_beams(seed, n, frac):
    rng = np.random.default_rng(seed)
    a, b = cn(rng, n), cn(rng, n)
    P = rng.uniform(0.1, 10.0)
    L = frac * P * abs(np.vdot(b, a)) ** 2 / np.vdot(a, a).real
    w = solve_boost_max(a, b, L, P)
    assert np.vdot(w, w).real <= P * (1 + 1e-12)
    assert quad_value(b, w) <= L * (1 + 1e-9) + 1e-12 * P * np.vdot(b, b).real
    v = quad_value(a, w)
    for _ in range(50):
        u = cn(rng, n)
        u *= np.sqrt(P) / np.linalg.norm(u) * rng.uniform() ** 0.5
        if quad_value(b, u) <= L:
            assert quad_value(a, u) <= v * (1 + 1e-9)


@settings(max_examples=200, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), frac=st.floats(0.0, 1.0))
def test_leakage_min_is_feasible_and_beats_random_beams(seed, n, frac):
    rng = np.random.default_rng(seed)
    b, a = cn(rng, n), cn(rng, n)
    P = rng.uniform(0.1, 10.0)
    S = frac * P * np.vdot(a, a).real
    w = solve_leakage_min(b, a, S, P)
    assert np.vdot(w, w).real <= P * (1 + 1e-12)
    assert quad_value(a, w) >= S * (1 - 1e-9)
    v = quad_value(b, w)
    for _ in range(50):
        u = cn(rng, n)
        u *= np.sqrt(P) / np.linalg.norm(u)
        if quad_value(a, u) >= S:
            assert quad_value(b, u) >= v - 1e-9 * P * np.vdot(b, b).real


def test_leakage_min_infeasible():
    with pytest.raises(Infeasible):
        solve_leakage_min(np.array([1, 0]), np.array([1, 1]), 10.0, 1.0)


def test_zero_forcing_when_possible():
    b, a = np.array([1.0, 0.0]), np.array([1.0, 1.0])
    w = solve_leakage_min(b, a, 0.5, 1.0)
    assert quad_value(b, w) == pytest.approx(0.0, abs=1e-15)
    w = solve_boost_max(a, b, 0.0, 1.0)
    assert quad_value(b, w) == pytest.approx(0.0, abs=1e-15)
    assert quad_value(a, w) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_value_forms_match_vector_solvers(seed):
    rng = np.random.default_rng(seed)
    a, b = cn(rng, 2), cn(rng, 2)
    P = rng.uniform(0.1, 5.0, 8)
    L = rng.uniform(0, 1.5, 8) * P * abs(np.vdot(b, a)) ** 2 / np.vdot(a, a).real
    got = boost_max_values(a, b, L, P)
    want = [quad_value(a, solve_boost_max(a, b, li, pi)) for li, pi in zip(L, P)]
    assert np.allclose(got, want, rtol=1e-10, atol=1e-12)
    S = rng.uniform(0, 1, 8) * P * np.vdot(a, a).real
    got = leakage_min_values(b, a, S, P)
    want = [quad_value(b, solve_leakage_min(b, a, si, pi)) for si, pi in zip(S, P)]
    assert np.allclose(got, want, rtol=1e-9, atol=1e-10 * P.max() * np.vdot(b, b).real)


def test_value_forms_flag_infeasible():
    out = leakage_min_values(np.array([1, 0]), np.array([1, 1]), np.array([1.0, 10.0]), 1.0)
    assert np.isfinite(out[0]) and np.isinf(out[1])


def test_sdr_two_constraints_matches_enumeration(rng):
    # maximize |a^H w|^2 s.t. |b^H w|^2 <= L, |c^H w|^2 >= S, ||w||^2 <= P in C^2
    a, b, c = cn(rng, 2), cn(rng, 2), cn(rng, 2)
    P, L, S = 1.0, 0.3 * abs(np.vdot(b, a)) ** 2 / np.vdot(a, a).real, 0.05
    p = QuadProblem(a, "maximize", ((b, L, "<="), (c, S, ">=")), P)
    W, val = sdr_relaxation(p)
    z = sdr_solve_and_extract(p)
    assert quad_value(b, z) <= L * (1 + 1e-6) and quad_value(c, z) >= S * (1 - 1e-6)
    assert quad_value(a, z) == pytest.approx(val, rel=1e-6)
    # fine sweep over unit directions with the best feasible power
    t = np.linspace(0, np.pi / 2, 801)[:, None]
    ph = np.linspace(-np.pi, np.pi, 801)[None, :]
    u0, u1 = np.cos(t), np.sin(t) * np.exp(1j * ph)
    g = lambda h: np.abs(np.conj(h[0]) * u0 + np.conj(h[1]) * u1) ** 2  # noqa: E731
    ga, gb, gc = g(a), g(b), g(c)
    with np.errstate(divide="ignore"):
        pw = np.minimum(P, np.where(gb > 0, L / gb, P))
    best = np.max(np.where(pw * gc >= S, pw * ga, -np.inf))
    assert val >= best * (1 - 1e-6)
    assert val <= best * (1 + 1e-3)


def test_sdr_reports_infeasible():
    p = QuadProblem.leakage_min(np.array([1, 0]), np.array([1, 1]), 10.0, 1.0)
    with pytest.raises(Infeasible):
        sdr_relaxation(p)


def test_quad_problem_validation():
    with pytest.raises(InvalidInputError):
        QuadProblem(np.ones(2), "sideways", (), 1.0)
    with pytest.raises(InvalidInputError):
        QuadProblem(np.ones(2), "maximize", ((np.ones(2), -1.0, "<="),), 1.0)
