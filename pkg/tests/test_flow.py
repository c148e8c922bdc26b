import math
import numpy as np
import pytest
import scipy.linalg
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from collatz_flows import (
    CollatzParams,
    SpectralState,
    apply,
    build_flow_closure,
    delta_probe,
    growth_monitor,
    orbit,
    solve_closed_form,
    solve_numerical,
)
from collatz_flows.flow import (
    ClosureBudgetExceeded,
    CycleModeDecomposition,
    bessel_i0_series,
    cycle_modes,
    hitting_times,
    picard_integrate,
    rk4_integrate,
    successor_index,
    taylor_tail,
)

C31 = CollatzParams(3, 1)
C11 = CollatzParams(1, 1)


def expm_solution(closure, initial, t):
    freqs, succ = successor_index(closure)
    mat = np.zeros((len(freqs), len(freqs)))
    mat[np.arange(len(freqs)), succ] = 1.0
    u0 = np.array([initial[n] for n in freqs], dtype=complex)
    return dict(zip(freqs, scipy.linalg.expm(t * mat) @ u0))


def random_window_state(p, size, seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=size) + 1j * rng.normal(size=size)
    return SpectralState(p, {n + 1: complex(v) for n, v in enumerate(vals)})


# -- closure ----------------------------------------------------------------------


def test_closure_examples():
    c = build_flow_closure(C31, {5})
    assert c.closure == {5, 8, 4, 2, 1}
    assert (c.orbit_meta[5].ell, c.orbit_meta[5].cycle_length) == (3, 2)
    c = build_flow_closure(C31, {1, 2})
    assert c.closure == {1, 2} and all(c.orbit_meta[n].ell == 0 for n in (1, 2))
    c = build_flow_closure(C11, {7})
    assert c.closure == {7, 4, 2, 1} and c.cycles == {1: (1,)}


def test_closure_budget():
    with pytest.raises(ClosureBudgetExceeded) as info:
        build_flow_closure(CollatzParams(5, 1), {7}, max_steps=1000)
    assert info.value.frequency == 7


def test_closure_is_forward_closed():
    c = build_flow_closure(C31, range(1, 65))
    assert all(c.edges[n] in c.closure for n in c.closure)
    assert len(c.closure) == 141
    for n in c.closure:
        path = c.path_to_cycle(n)
        assert path[-1] in c.cycles[c.orbit_meta[n].cycle_id]


# -- solvers ------------------------------------------------------------------------


@pytest.mark.parametrize("p", [C31, C11], ids=["a3b1", "a1b1"])
@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 2.0])
def test_closed_form_matches_expm(p, t):
    u0 = random_window_state(p, 64, 11)
    closure = build_flow_closure(p, range(1, 65))
    exact = expm_solution(closure, u0, t)
    got = solve_closed_form(closure, u0, t)
    assert max(abs(got[n] - exact[n]) for n in closure.closure) < 1e-9


def test_nontrivial_cycle_expm():
    p = CollatzParams(5, 1)
    closure = build_flow_closure(p, {13, 17, 3})
    u0 = SpectralState(p, {13: 1.0, 17: 2.0 - 1j, 3: 0.5})
    exact = expm_solution(closure, u0, 1.5)
    got = solve_closed_form(closure, u0, 1.5)
    assert max(abs(got[n] - exact[n]) for n in closure.closure) < 1e-9


def test_initial_time_exact():
    closure = build_flow_closure(C31, range(1, 20))
    u0 = random_window_state(C31, 19, 2)
    for state in (solve_closed_form(closure, u0, 0.0), solve_numerical(closure, u0, 0.0, "rk4")):
        assert all(state[n] == u0[n] for n in closure.closure)


def test_rk4_delta5():
    closure = build_flow_closure(C31, {5})
    u0 = SpectralState.delta(C31, 5)
    exact = solve_closed_form(closure, u0, 1.0)
    rk = solve_numerical(closure, u0, 1.0, "rk4", 1e-3)
    assert max(abs(exact[n] - rk[n]) for n in closure.closure) < 1e-9
    assert exact[5] == 1.0


def test_picard_eigenvector():
    closure = build_flow_closure(C31, {1, 2})
    u = solve_numerical(closure, SpectralState(C31, {1: 1.0, 2: 1.0}), 2.0, "picard", 0.25)
    assert abs(u[1] - math.e**2) < 1e-8 and abs(u[2] - math.e**2) < 1e-8


def test_picard_matches_closed_form():
    closure = build_flow_closure(C31, range(1, 33))
    u0 = random_window_state(C31, 32, 5)
    exact = solve_closed_form(closure, u0, 2.0)
    pic = solve_numerical(closure, u0, 2.0, "picard", 0.4)
    assert max(abs(exact[n] - pic[n]) for n in closure.closure) < 1e-11


def test_solver_argument_checks():
    closure = build_flow_closure(C31, {1})
    with pytest.raises(ValueError):
        picard_integrate(np.array([0]), np.ones(1), 1.0, subinterval=0.6)
    with pytest.raises(ValueError):
        solve_numerical(closure, SpectralState.delta(C31, 1), 1.0, "euler")
    with pytest.raises(ValueError):
        solve_closed_form(closure, SpectralState.delta(C31, 9), 1.0)


def test_cycle_modes_dft():
    values = [1.0, 2.0 - 1j, 0.5j]
    dec = CycleModeDecomposition.from_cycle_data(values)
    assert np.allclose(dec.lambdas**3, 1)
    # Vandermonde system u_p = sum_j c_j lambda_j^p
    vander = dec.lambdas[None, :] ** np.arange(3)[:, None]
    assert np.allclose(vander @ dec.coefficients, values)
    assert all(abs(dec.value(p, 0.0) - values[p]) < 1e-14 for p in range(3))


def test_cycle_coordinates_satisfy_mth_derivative():
    p = CollatzParams(5, 1)
    closure = build_flow_closure(p, {13, 1})
    u0 = SpectralState(p, {13: 1.0, 33: -2.0, 1: 0.3, 3: 1j})
    modes = cycle_modes(closure, u0)
    for cid, nodes in closure.cycles.items():
        dec = modes[cid]
        for phase, z in enumerate(nodes):
            for t in (0.5, 1.0, 2.0):
                assert abs(dec.value(phase, t, derivative=dec.cycle_length) - dec.value(phase, t)) < 1e-9
                assert abs(dec.value(phase, t) - solve_closed_form(closure, u0, t)[z]) < 1e-12


def test_central_difference():
    closure = build_flow_closure(C31, range(1, 65))
    u0 = random_window_state(C31, 64, 7)
    h = 1e-4
    for t in (0.5, 1.0, 2.0):
        plus, minus = solve_closed_form(closure, u0, t + h), solve_closed_form(closure, u0, t - h)
        now = solve_closed_form(closure, u0, t)
        for n in closure.closure:
            target = now[closure.edges[n]]
            assert abs((plus[n] - minus[n]) / (2 * h) - target) <= 1e-6 * max(1.0, abs(target))


def test_divergent_tail_alpha5():
    rec = orbit(CollatzParams(5, 1), 7, max_steps=50)
    assert not rec.cycle_found
    L = len(rec.values)
    data = np.cos(np.arange(L)) / (1 + np.arange(L)) + 1j * np.sin(np.arange(L)) / (1 + np.arange(L)) ** 2
    succ = np.arange(1, L + 1)
    succ[-1] = -1
    for t in (0.5, 1.0, 2.0):
        assert np.max(np.abs(taylor_tail(data, t) - rk4_integrate(succ, data, t, 1e-3))) < 1e-8


# -- growth and probe ---------------------------------------------------------------


def test_growth_examples():
    closure = build_flow_closure(C31, {5})
    run = growth_monitor(closure, SpectralState.delta(C31, 5), [1.0])
    assert run.rows[0].windowed_norm == 1.0 and run.rows[0].growth_bound == pytest.approx(math.exp(math.sqrt(2)))
    closure = build_flow_closure(C31, {1, 2})
    rows = growth_monitor(closure, SpectralState(C31, {1: 1.0, 2: 1.0}), [0.5, 1.0]).rows
    assert all(abs(r.windowed_norm - math.sqrt(2) * math.exp(r.t)) < 1e-12 for r in rows)
    zero = growth_monitor(closure, SpectralState(C31), [1.0]).rows[0]
    assert zero.windowed_norm == 0.0 == zero.growth_bound


def test_growth_violation_is_reported():
    closure = build_flow_closure(C31, {1, 2})
    with pytest.raises(ValueError):
        growth_monitor(closure, SpectralState.delta(C31, 1), [-1.0])


@pytest.mark.parametrize("x", [0.0, 1e-3, 0.5, 1.0, 2 * math.sqrt(2), 5.0, 20.0])
def test_bessel_series_matches_scipy(x):
    assert bessel_i0_series(x) == pytest.approx(scipy.special.i0(x), rel=1e-14)


def memo_hits(p, pivot, window_max):
    """Depth to ``pivot`` by memoized forward recursion; ``None`` once the trivial cycle is reached first."""
    depth = {pivot: 0}
    for cyc in (1, 2):
        depth.setdefault(cyc, None)

    def walk(n):
        path = []
        while n not in depth:
            path.append(n)
            n = apply(p, n)
        d = depth[n]
        for m in reversed(path):
            d = None if d is None else d + 1
            depth[m] = d

    out = {}
    for k in range(1, window_max + 1):
        walk(k)
        if depth[k] is not None:
            out[k] = depth[k]
    return out


def test_delta_probe_against_memo():
    probe = delta_probe(C31, 5, 10_000)
    assert probe.hits[13] == 3 and probe.hits[5] == 0
    assert probe.amplitude(13, 2.0) == pytest.approx(8 / 6)
    assert probe.hits == memo_hits(C31, 5, 10_000)
    for row in probe.rows:
        assert row.norm_sq <= scipy.special.i0(2 * math.sqrt(2) * row.t)


def test_delta_probe_matches_flow():
    probe = delta_probe(C31, 5, 200, (1.0,))
    closure = build_flow_closure(C31, range(1, 201))
    u = solve_closed_form(closure, SpectralState.delta(C31, 5), 1.0)
    for k in range(1, 201):
        assert abs(u[k] - probe.amplitude(k, 1.0)) < 1e-12


def test_probe_rejects_cycle_pivot():
    with pytest.raises(ValueError):
        hitting_times(C31, 1, 10)


@given(st.integers(1, 40), st.floats(0.0, 3.0))
def test_closed_form_growth_random(seed, t):
    closure = build_flow_closure(C31, range(1, 17))
    u0 = random_window_state(C31, 16, seed)
    run = growth_monitor(closure, u0, [t])
    assert run.ok
