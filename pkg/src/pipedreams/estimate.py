"""Expected inversion counts: Monte Carlo, exact oracles, the predicted value, and experiments."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels, walk
from .errors import UnsupportedShapeError
from .parallel import map_keys, resolve_threads
from .pipedream import TILE_STREAM
from .rng import trial_keys
from .shape import Shape, diagonal_counts, is_order_convex, staircase, strip
from .table import Table, build_id
from .word import Word

KAPPA = 2.0 * math.sqrt(2.0) / (3.0 * math.sqrt(math.pi))
BIPARTITE_CONSTANT = 1.0 / math.sqrt(math.pi)
DP_MAX_N = 8
ENUM_MAX_K = 20


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    variance: float
    trials: int
    seed: int
    predicted: float

    @property
    def ratio(self) -> float | None:
        return self.mean / self.predicted if self.predicted > 0 else None

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "variance": self.variance,
            "trials": self.trials,
            "seed": self.seed,
            "predicted": self.predicted,
            "ratio": self.ratio,
        }


def _odds_root(p: float) -> float:
    return math.sqrt(p / (1.0 - p))


def predicted_from_counts(counts, p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return math.sqrt(2.0 / math.pi) * _odds_root(p) * math.fsum(math.sqrt(c) for c in np.asarray(counts).tolist())


def predicted_inversions(s: Shape, p: float) -> float:
    """sqrt(2/pi) * sqrt(p/(1-p)) * sum over diagonals of sqrt(O_i)."""
    return predicted_from_counts(diagonal_counts(s), p)


def summarize(values: np.ndarray) -> tuple[float, float, float]:
    """(mean, stderr, sample variance) with compensated summation in trial order."""
    vals = np.asarray(values, dtype=np.float64)
    t = vals.size
    mean = math.fsum(vals.tolist()) / t
    if t < 2:
        return mean, 0.0, 0.0
    var = math.fsum(((vals - mean) ** 2).tolist()) / (t - 1)
    return mean, math.sqrt(var / t), var


def inversion_samples(s: Shape, p: float, trials: int, seed: int, threads: int | None = None,
                      start: int = 0) -> np.ndarray:
    """Inversion counts of ``trials`` random pipe dreams; trial ``i`` uses tile stream ``start + i``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if trials < 1:
        raise ValueError("trials must be positive")
    diags = np.ascontiguousarray(s.diagonals, dtype=np.int32)
    keys = trial_keys(seed, TILE_STREAM, start, trials)
    return map_keys(lambda ks: kernels.subword_inversions(diags, p, np.ascontiguousarray(ks), s.n), keys, threads)


def mc_expected_inversions(s: Shape, p: float, trials: int, seed: int, threads: int | None = None) -> Estimate:
    if not is_order_convex(s):
        raise UnsupportedShapeError("Monte Carlo estimation needs an order-convex shape")
    vals = inversion_samples(s, p, trials, seed, threads)
    mean, se, var = summarize(vals)
    pred = predicted_inversions(s, p) if 0.0 < p < 1.0 else 0.0
    return Estimate(mean, se, var, trials, seed, pred)


def _inversions_small(perm: tuple[int, ...]) -> int:
    return sum(1 for a, b in itertools.combinations(perm, 2) if a > b)


def _expected_dp(w: Word, p: float) -> float:
    mass: dict[tuple[int, ...], float] = {tuple(range(1, w.n + 1)): 1.0}
    for a in w.letters:
        nxt: dict[tuple[int, ...], float] = {}
        for u, m in mass.items():
            if p < 1.0:
                nxt[u] = nxt.get(u, 0.0) + (1.0 - p) * m
            if p > 0.0:
                v = list(u)
                v[a - 1], v[a] = v[a], v[a - 1]
                v = tuple(v)
                nxt[v] = nxt.get(v, 0.0) + p * m
        mass = nxt
    return math.fsum(m * _inversions_small(u) for u, m in mass.items())


def _expected_enumeration(w: Word, p: float) -> float:
    K = len(w)
    if K == 0:
        return 0.0
    subsets = np.arange(1 << K, dtype=np.int64)
    keep = ((subsets[:, None] >> np.arange(K)) & 1).astype(bool)
    perms = np.tile(np.arange(1, w.n + 1, dtype=np.int8), (subsets.size, 1))
    for j, a in enumerate(w.letters):
        rows = keep[:, j]
        left = perms[rows, a - 1].copy()
        perms[rows, a - 1] = perms[rows, a]
        perms[rows, a] = left
    inv = np.zeros(subsets.size, dtype=np.int64)
    for i, k in itertools.combinations(range(w.n), 2):
        inv += perms[:, i] > perms[:, k]
    kept = keep.sum(axis=1)
    weights = p ** kept * (1.0 - p) ** (K - kept)
    return math.fsum((weights * inv).tolist())


def exact_expected_inversions(w: Word, p: float, method: str = "auto") -> float:
    """E inv of the random subword, by a distribution recursion (n <= 8) or subset enumeration (length <= 20)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if method == "auto":
        method = "dp" if w.n <= DP_MAX_N else "enumerate"
    if method == "dp":
        if w.n > DP_MAX_N:
            raise ValueError(f"distribution recursion needs n <= {DP_MAX_N}, got {w.n}")
        return _expected_dp(w, p)
    if method == "enumerate":
        if len(w) > ENUM_MAX_K:
            raise ValueError(f"subset enumeration needs length <= {ENUM_MAX_K}, got {len(w)}")
        return _expected_enumeration(w, p)
    raise ValueError(f"unknown method {method!r}")


# experiments -------------------------------------------------------------

def _meta(seed: int, trials: int, **extra) -> dict:
    return {"seed": seed, "trials": trials, "build": build_id(), **extra}


def scaling_row(s: Shape, p: float, trials: int, seed: int, threads=None) -> dict:
    """Monte Carlo mean together with its ratio to sqrt(p/(1-p)) n^{3/2}."""
    est = mc_expected_inversions(s, p, trials, seed, threads)
    scale = _odds_root(p) * s.n ** 1.5
    return {
        "n": s.n,
        "boxes": len(s),
        "p": p,
        "mean": est.mean,
        "stderr": est.stderr,
        "variance": est.variance,
        "ratio": est.mean / scale,
        "ratio_stderr": est.stderr / scale,
        "predicted": est.predicted,
        "predicted_ratio": est.predicted / scale,
        "trials": trials,
        "seed": seed,
    }


_SCALING_COLUMNS = ["n", "boxes", "p", "mean", "stderr", "variance", "ratio", "ratio_stderr",
                    "predicted", "predicted_ratio", "target", "trials", "seed"]


def kappa_table(ns, p: float, trials: int, seed: int, threads=None) -> Table:
    ns = list(ns)
    if ns != sorted(ns):
        raise ValueError("ns must be ascending")
    t = Table("kappa", _SCALING_COLUMNS,
              meta=_meta(seed, trials, shape="staircase", calibration="finite-n tolerances are calibration choices"))
    for n in ns:
        t.add(target=KAPPA, **scaling_row(staircase(n), p, trials, seed, threads))
    return t


def bipartite_table(ns, p: float, trials: int, seed: int, rho=None, threads=None) -> Table:
    t = Table("bipartite", ["rho"] + _SCALING_COLUMNS,
              meta=_meta(seed, trials, shape="strip", calibration="finite-n tolerances are calibration choices"))
    for n in ns:
        r = n // 2 if rho is None else rho
        t.add(rho=r, target=BIPARTITE_CONSTANT, **scaling_row(strip(n, r), p, trials, seed, threads))
    return t


def _proportion(hits: np.ndarray) -> tuple[float, float]:
    t = hits.size
    f = float(np.count_nonzero(hits)) / t
    return f, math.sqrt(f * (1.0 - f) / t)


def first_kiss_experiment(ells, ks, p: float, trials: int, seed: int, init=None, threads=None) -> Table:
    """Empirical P(first kiss <= k) for pairs of pipes against the chain hitting time and the normal approximation.

    With a fixed initial facing pair the chain is started from the mirrored
    state, since the distance between the pipes moves by minus the chain
    increment; under the uniform start the two laws coincide.
    """
    ks = sorted(int(k) for k in ks)
    cap = ks[-1]
    psi_init = None if init is None else walk.mirror(walk.state_index(init))
    t = Table(
        "first_kiss",
        ["ell", "k", "p", "cdf_pair", "se_pair", "cdf_psi", "se_psi", "approx",
         "diff_pair_psi", "combined_se", "diff_pair_approx", "trials", "seed"],
        meta=_meta(seed, trials, init="uniform" if init is None else walk.STATES[walk.state_index(init)]),
    )
    for ell in ells:
        kiss = walk.first_kiss_times(ell, p, trials, seed, cap, init, threads)
        hit = walk.psi_hitting_times(ell, p, trials, seed, cap, psi_init, threads)
        for k in ks:
            fa, sa = _proportion((kiss >= 0) & (kiss <= k))
            fb, sb = _proportion((hit >= 0) & (hit <= k))
            approx = walk.first_kiss_cdf_approx(ell, k, p)
            t.add(ell=ell, k=k, p=p, cdf_pair=fa, se_pair=sa, cdf_psi=fb, se_psi=sb, approx=approx,
                  diff_pair_psi=fa - fb, combined_se=math.hypot(sa, sb), diff_pair_approx=fa - approx,
                  trials=trials, seed=seed)
    return t


def concentration_experiment(zs, rs, p: float, trials: int, seed: int, threads=None) -> Table:
    """Empirical P(T(z) <= r) for a single pipe next to the shape exp(-z^2/(z+r))."""
    t = Table("concentration", ["z", "r", "p", "estimate", "stderr", "shape", "trials", "seed"],
              meta=_meta(seed, trials, note="constants of the veer bound are not pinned; shape uses C1 = C2 = 1"))
    for r in rs:
        for z in zs:
            times = walk.first_passage_times(int(math.ceil(z)), p, trials, seed, int(r), threads=threads)
            f, se = _proportion(times >= 0)
            shape_val = math.exp(-z * z / (z + r)) if z > 0 else 1.0
            t.add(z=z, r=r, p=p, estimate=f, stderr=se, shape=shape_val, trials=trials, seed=seed)
    return t


def chernoff_experiment(ks, xis, p: float, trials: int, seed: int, threads=None) -> Table:
    """Tails of a sum of k geometric(1-p) gaps (the k-th turn time) against the closed-form bound.

    ``xis`` entries may be numbers or callables of k.
    """
    t = Table("chernoff", ["k", "xi", "p", "estimate", "stderr", "bound", "within", "trials", "seed"],
              meta=_meta(seed, trials))
    for k in ks:
        tau, _ = walk.turn_samples(int(k), p, trials, seed, threads=threads)
        dev = np.abs(tau - k / (1.0 - p))
        for xi in xis:
            x = float(xi(k) if callable(xi) else xi)
            f, se = _proportion(dev >= x)
            b = walk.chernoff_bound(int(k), x, p)
            t.add(k=k, xi=x, p=p, estimate=f, stderr=se, bound=b, within=bool(f <= b), trials=trials, seed=seed)
    return t


def half_check(ks, ps, trials: int, seed: int, facings=("E", "N"), threads=None) -> Table:
    """Frequency of delta * (d(tau_k) - d(0)) >= -1, delta = +1 for an east-facing start."""
    t = Table("half", ["k", "p", "facing", "frequency", "stderr", "passes", "trials", "seed"],
              meta=_meta(seed, trials))
    for p in ps:
        for facing in facings:
            delta = 1 if facing == "E" else -1
            for k in ks:
                _, disp = walk.turn_samples(int(k), p, trials, seed, facing=facing, threads=threads)
                f, se = _proportion(delta * disp >= -1)
                t.add(k=k, p=p, facing=facing, frequency=f, stderr=se, passes=bool(f >= 0.5 - 3 * se),
                      trials=trials, seed=seed)
    return t


def psi_clt_check(k: int, p: float, trials: int, seed: int, zs=None, threads=None) -> Table:
    """Empirical P(psi_k <= z) against the normal law with variance 2p/(1-p) per step."""
    vals = np.sort(walk.psi_samples(k, p, trials, seed, threads=threads))
    if zs is None:
        sd = math.sqrt(walk.sigma2_closed(p) * k)
        zs = np.arange(-3 * sd, 3 * sd + 1, max(1.0, sd / 20))
    t = Table("psi_clt", ["k", "p", "z", "empirical", "normal", "difference", "trials", "seed"],
              meta=_meta(seed, trials))
    for z in zs:
        emp = float(np.searchsorted(vals, z, side="right")) / trials
        nor = walk.phi_p(z / math.sqrt(k), p)
        t.add(k=k, p=p, z=float(z), empirical=emp, normal=nor, difference=emp - nor, trials=trials, seed=seed)
    return t


def estimate_table(s: Shape, p: float, trials: int, seed: int, threads=None, label: str = "") -> Table:
    est = mc_expected_inversions(s, p, trials, seed, threads)
    t = Table("estimate", ["shape", "n", "boxes", "p", "mean", "stderr", "variance", "predicted", "ratio",
                           "trials", "seed"], meta=_meta(seed, trials))
    t.add(shape=label or s.family, n=s.n, boxes=len(s), p=p, mean=est.mean, stderr=est.stderr,
          variance=est.variance, predicted=est.predicted, ratio=est.ratio, trials=trials, seed=seed)
    return t


__all__ = [
    "KAPPA", "BIPARTITE_CONSTANT", "Estimate", "predicted_inversions", "predicted_from_counts",
    "mc_expected_inversions", "inversion_samples", "exact_expected_inversions", "summarize",
    "kappa_table", "bipartite_table", "first_kiss_experiment", "concentration_experiment",
    "chernoff_experiment", "half_check", "psi_clt_check", "estimate_table", "resolve_threads",
]
