import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pipedreams import walk
from pipedreams.rng import Stream


def test_transition_matrix_examples():
    assert np.allclose(walk.transition_matrix(0.5).P, 0.25)
    assert np.allclose(walk.transition_matrix(0.3).P[0], [0.09, 0.21, 0.21, 0.49])
    with pytest.raises(ValueError):
        walk.transition_matrix(1.0)


@pytest.mark.parametrize("p", np.round(np.arange(0.05, 0.96, 0.05), 2))
def test_chain_properties(p):
    c = walk.transition_matrix(p)
    assert np.allclose(c.P.sum(axis=1), 1.0, atol=1e-15)
    assert np.allclose(c.P.sum(axis=0), 1.0, atol=1e-15)
    assert np.array_equal(c.P, c.P.T)
    pi = walk.stationary(c)
    assert np.abs(pi @ c.P - pi).max() < 1e-12
    assert abs(walk.sigma2_tl(p) - walk.sigma2_closed(p)) <= 1e-9


def test_sigma2_examples():
    assert abs(walk.sigma2_tl(0.5) - 2.0) <= 1e-9
    assert abs(walk.sigma2_tl(1 / 3) - 1.0) <= 1e-9
    assert abs(walk.sigma2_tl(0.9) - 18.0) <= 1e-9
    assert walk.sigma2_closed(1e-9) < 1e-8


def test_sigma2_matches_simulated_variance():
    # independent route: empirical Var(psi_k)/k from the chain
    k, trials = 2000, 4000
    for p in (0.3, 0.5):
        v = walk.psi_samples(k, p, trials, seed=31).astype(float)
        est = v.var(ddof=1) / k
        # relative standard error of a sample variance is about sqrt(2/trials)
        assert abs(est / walk.sigma2_closed(p) - 1) < 5 * math.sqrt(2 / trials) + 0.01


def test_phi_p_examples():
    for p in (0.1, 0.5, 0.9):
        assert walk.phi_p(0.0, p) == 0.5
    assert abs(walk.phi_p(math.sqrt(2), 0.5) - 0.841345) <= 1e-6
    assert abs(walk.first_kiss_cdf_approx(2, 4, 0.5) - 0.4795) <= 1e-4
    assert walk.first_kiss_cdf_approx(0, 10, 0.5) == 1.0
    assert walk.first_kiss_cdf_approx(10**6, 1, 0.5) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(0.01, 0.99))
def test_phi_p_symmetry(x, p):
    assert abs(walk.phi_p(-x, p) + walk.phi_p(x, p) - 1.0) <= 1e-7


def test_phi_p_increasing():
    xs = np.linspace(-5, 5, 2001)
    vals = [walk.phi_p(x, 0.4) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert walk.phi_p(-40, 0.4) <= walk.phi_p(-39, 0.4) and walk.phi_p(40, 0.4) == 1.0


def test_normal_cdf_against_integration():
    # trapezoid integration of the density as an oracle
    grid = np.linspace(-12, 2.0, 400001)
    dens = np.exp(-grid**2 / 2) / math.sqrt(2 * math.pi)
    assert abs(np.trapezoid(dens, grid) - walk.normal_cdf(2.0)) < 1e-7


def test_bounds_examples():
    assert walk.chernoff_bound(100, 1e-12, 0.5) == pytest.approx(2.0)
    assert walk.chernoff_bound(100, 50, 0.5) == pytest.approx(2 * math.exp(-2.5), rel=1e-12)
    assert walk.veer_bound(10, 0, 1, 1) == pytest.approx(math.exp(-10), rel=1e-12)
    with pytest.raises(ValueError):
        walk.veer_bound(1, 0, 1, 1)
    with pytest.raises(ValueError):
        walk.chernoff_bound(0, 1, 0.5)


def test_single_pipe_basics():
    path = walk.simulate_single_pipe(0.5, 500, 3)
    assert path.first_passage(0) == 0
    assert np.all(np.abs(np.diff(path.d)) == 1)
    assert np.all(np.diff(path.turns) >= 1)
    # drift direction flips exactly at turns
    steps = np.diff(path.d)
    # step t goes from d(t-1) to d(t) using the facing after the tile in box t
    changes = np.flatnonzero(steps[1:] != steps[:-1]) + 2
    assert np.array_equal(changes, path.turns[path.turns > 1])
    assert np.array_equal(np.flatnonzero(np.diff(path.facing)) + 1, path.turns)


def test_turn_gaps_are_geometric():
    # chi-square goodness of fit for the gaps between consecutive turns, p = 0.5
    p, trials = 0.5, 100000
    tau, _ = walk.turn_samples(1, p, trials, seed=77)
    counts = np.bincount(tau)
    ks = np.arange(1, 12)
    expected = trials * (1 - p) * p ** (ks - 1)
    observed = counts[1:12].astype(float)
    tail_obs = trials - observed.sum()
    tail_exp = trials * p**11
    chi2 = float(((observed - expected) ** 2 / expected).sum() + (tail_obs - tail_exp) ** 2 / tail_exp)
    assert chi2 < 32.9  # 99.9% quantile of chi-square with 11 degrees of freedom


def test_batch_matches_single_pipe():
    tau, disp = walk.turn_samples(4, 0.4, 6, seed=2)
    times = walk.first_passage_times(6, 0.4, 6, seed=2, cap=5000)
    for t in range(6):
        path = walk.simulate_single_pipe(0.4, 5000, Stream(2, "pipe", t))
        assert path.turns[3] == tau[t]
        assert path.d[tau[t]] == disp[t]
        fp = path.first_passage(6)
        assert (fp if fp is not None else -1) == times[t]


def test_pair_examples():
    out = walk.simulate_pair(0, "NE", 0.5, 50, 1)
    assert out.first_kiss == 0
    with pytest.raises(ValueError):
        walk.simulate_pair(3, "NN", 0.5, 10, 1)
    with pytest.raises(ValueError):
        walk.simulate_pair(0, "NN", 0.5, 10, 1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 6).map(lambda x: 2 * x), st.sampled_from(walk.STATES), st.integers(0, 2**40))
def test_pair_invariants(ell, init, seed):
    if ell == 0 and init in ("NN", "EE"):
        return
    out = walk.simulate_pair(ell, init, 0.5, 300, seed)
    assert np.all((out.h - out.h[0]) % 2 == 0)
    zeros = np.flatnonzero(out.h == 0)
    assert out.first_kiss == (int(zeros[0]) if zeros.size else None)
    assert out.crossings <= out.kisses


def test_pair_batch_matches_single():
    ts = walk.first_kiss_times(6, 0.5, 8, seed=13, cap=3000, init="EN")
    for t in range(8):
        out = walk.simulate_pair(6, "EN", 0.5, 3000, Stream(13, "pair", t))
        assert (out.first_kiss if out.first_kiss is not None else -1) == ts[t]


def test_pair_crossing_parity_matches_pipe_dream():
    # two pipes on adjacent diagonals in a rank-2 shape: the pair is inverted iff the crossing count is odd
    from pipedreams.pipedream import sample, trace
    from pipedreams.shape import strip

    s = strip(3, 6)
    for t in range(40):
        pd = sample(s, 0.5, Stream(5, "pipedream", t))
        r = trace(pd)
        v = r.permutation.one_line
        for a in range(1, 4):
            for b in range(a + 1, 4):
                assert (r.crossings[a - 1, b - 1] % 2 == 1) == (v.index(a) > v.index(b))


def test_psi_basics():
    assert walk.sample_psi(0, 0.5, None, 3) == 0
    vals = walk.psi_samples(101, 0.3, 200, seed=4)
    assert np.all(vals % 2 == 0)
    assert walk.sample_psi(101, 0.3, None, Stream(4, "psi", 7)) == vals[7]
    assert walk.hitting_time_psi(0, 0.5) == 0
    h = walk.psi_hitting_times(4, 0.5, 50, seed=4, cap=10000)
    assert walk.hitting_time_psi(4, 0.5, None, 10000, Stream(4, "psi", 3)) == (h[3] if h[3] >= 0 else None)


def test_psi_clt_sup_difference():
    from pipedreams.estimate import psi_clt_check

    t = psi_clt_check(10000, 0.5, 20000, seed=8)
    assert max(abs(d) for d in t.column("difference")) <= 0.02


def test_mirror():
    assert [walk.STATES[walk.mirror(i)] for i in range(4)] == ["NN", "EN", "NE", "EE"]
