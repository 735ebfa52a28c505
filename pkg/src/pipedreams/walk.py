"""Pipes in the infinite shape and the facing chain of a pair of pipes.

A pipe sits in one box per time step. Its facing at time ``t`` is the
direction in which it entered its current box (east if through the west
side). A cross tile keeps the facing, a bump tile flips it, and the pipe
then moves one box in its new facing. Tiles are read from a keyed random
field indexed by box, so two pipes in the same box see the same tile.

Chain states are the facings of two pipes, encoded ``2*f1 + f2`` with
east = 1: NN = 0, NE = 1, EN = 2, EE = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .parallel import map_keys
from .rng import Stream, as_stream, box_code, trial_keys, uniform, uniforms

STATES = ("NN", "NE", "EN", "EE")
NU = np.array([0.0, 2.0, -2.0, 0.0])
NORTH, EAST = 0, 1

PIPE_STREAM = "pipe"
PAIR_STREAM = "pair"
PAIR_INIT_STREAM = "pair-init"
PSI_STREAM = "psi"
PSI_INIT_STREAM = "psi-init"


def _check_open_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")


def state_index(state) -> int:
    if isinstance(state, str):
        try:
            return STATES.index(state.upper())
        except ValueError:
            raise ValueError(f"unknown chain state {state!r}") from None
    s = int(state)
    if not 0 <= s <= 3:
        raise ValueError(f"chain state must be in 0..3, got {s}")
    return s


def mirror(state: int) -> int:
    """Swap the roles of the two pipes (NE <-> EN)."""
    return ((state & 1) << 1) | (state >> 1)


@dataclass(frozen=True, eq=False)
class ChainSpec:
    p: float
    P: np.ndarray
    nu: np.ndarray = field(default_factory=lambda: NU.copy())

    @property
    def cumulative(self) -> np.ndarray:
        """Row-wise cumulative sums with the last column pinned to 1 for inverse-CDF stepping."""
        cum = np.cumsum(self.P, axis=1)
        cum[:, 3] = 1.0
        return np.ascontiguousarray(cum)


def transition_matrix(p: float) -> ChainSpec:
    _check_open_p(p)
    q = 1.0 - p
    a, b, c = p * p, p * q, q * q
    P = np.array(
        [
            [a, b, b, c],
            [b, a, c, b],
            [b, c, a, b],
            [c, b, b, a],
        ]
    )
    return ChainSpec(p, P)


def stationary(chain: ChainSpec) -> np.ndarray:
    """The stationary law. It is uniform; the left-eigenvector residual is checked."""
    pi = np.full(4, 0.25)
    resid = np.abs(pi @ chain.P - pi).max()
    if resid > 1e-12:
        raise ArithmeticError(f"uniform vector is not stationary (residual {resid:.3e})")
    return pi


def sigma2_tl(p: float) -> float:
    """Asymptotic variance of the additive functional via the fundamental matrix.

    sigma^2 = nu (2 D Z - D - D Pi) nu^T with Z = (I - P + Pi)^{-1}, Pi the
    matrix whose rows are the stationary law and D its diagonal.
    """
    chain = transition_matrix(p)
    pi = stationary(chain)
    Pi = np.tile(pi, (4, 1))
    D = np.diag(pi)
    A = np.eye(4) - chain.P + Pi
    if abs(np.linalg.det(A)) < 1e-14:
        raise np.linalg.LinAlgError("I - P + Pi is singular")
    Z = np.linalg.solve(A, np.eye(4))
    nu = chain.nu
    return float(nu @ (2.0 * D @ Z - D - D @ Pi) @ nu)


def sigma2_closed(p: float) -> float:
    _check_open_p(p)
    return 2.0 * p / (1.0 - p)


def normal_cdf(x: float) -> float:
    if x < 0:
        return 0.5 * math.erfc(-x / math.sqrt(2.0))
    return 1.0 - 0.5 * math.erfc(x / math.sqrt(2.0))


def phi_p(x: float, p: float) -> float:
    """CDF of a centred normal with variance 2p/(1-p)."""
    return normal_cdf(x / math.sqrt(sigma2_closed(p)))


def first_kiss_cdf_approx(ell: int, k: int, p: float) -> float:
    if ell < 0 or k < 1:
        raise ValueError("need ell >= 0 and k >= 1")
    if ell == 0:
        return 1.0
    return min(1.0, max(0.0, 2.0 - 2.0 * phi_p(ell / math.sqrt(k), p)))


def chernoff_bound(k: int, xi: float, p: float) -> float:
    """Two-sided tail bound for a sum of k geometric(1-p) variables deviating by xi from its mean."""
    _check_open_p(p)
    if k < 1 or xi <= 0:
        raise ValueError("need k >= 1 and xi > 0")
    q = 1.0 - p
    return 2.0 * math.exp(-(q / 2.0) * xi * xi / (k / q + xi))


def veer_bound(z: float, r: float, c1: float, c2: float) -> float:
    if z < 2 or r < 0 or c1 <= 0 or c2 <= 0:
        raise ValueError("need z >= 2, r >= 0 and positive constants")
    return c1 * math.exp(-c2 * z * z / (z + r))


@dataclass(frozen=True)
class PipePath:
    d: np.ndarray  # d(t) - d(0) for t = 0..max_steps
    facing: np.ndarray  # facing at each time, 1 = east
    turns: np.ndarray  # turn times tau_1, tau_2, ...

    def first_passage(self, z: float) -> int | None:
        """T(z) = first t with |d(t) - d(0)| >= z; None if not reached in the simulated window."""
        if z <= 0:
            return 0
        hit = np.flatnonzero(np.abs(self.d) >= z)
        return int(hit[0]) if hit.size else None


@dataclass(frozen=True)
class PairOutcome:
    first_kiss: int | None  # None when no kiss within max_steps
    crossings: int
    kisses: int
    h: np.ndarray  # d'(t) - d(t) for t = 0..max_steps


def _facing_code(f) -> int:
    if isinstance(f, str):
        return {"N": NORTH, "E": EAST}[f.upper()]
    return int(f)


def simulate_single_pipe(p: float, max_steps: int, rng, facing: str | int = "E") -> PipePath:
    """One pipe started in b(0, 0); reads the same tiles as the batch kernels for the same key."""
    _check_open_p(p)
    key = as_stream(rng, PIPE_STREAM).key
    f = _facing_code(facing)
    x = y = 0
    d = np.zeros(max_steps + 1, dtype=np.int64)
    fac = np.zeros(max_steps + 1, dtype=np.int8)
    fac[0] = f
    turns = []
    for t in range(1, max_steps + 1):
        g = f if uniform(key, box_code(x, y)) < p else 1 - f
        if g != f:
            turns.append(t)
        f = g
        x, y = (x + 1, y) if f == EAST else (x, y + 1)
        d[t] = x - y
        fac[t] = f
    return PipePath(d, fac, np.asarray(turns, dtype=np.int64))


def simulate_pair(ell: int, init, p: float, max_steps: int, rng) -> PairOutcome:
    """Two pipes on a common anti-diagonal, the second ``ell`` diagonals to the east."""
    _check_open_p(p)
    if ell < 0 or ell % 2:
        raise ValueError(f"ell must be a non-negative even integer, got {ell}")
    s = state_index(init)
    if ell == 0 and s not in (1, 2):
        raise ValueError("pipes sharing a box must face different ways (NE or EN)")
    key = as_stream(rng, PAIR_STREAM).key
    f1, f2 = s >> 1, s & 1
    x1, y1 = 0, 0
    x2, y2 = ell // 2, -(ell // 2)
    h = np.zeros(max_steps + 1, dtype=np.int64)
    h[0] = ell
    first = 0 if ell == 0 else None
    crossings = kisses = 0
    for t in range(1, max_steps + 1):
        c1 = uniform(key, box_code(x1, y1)) < p
        c2 = uniform(key, box_code(x2, y2)) < p
        if (x1, y1) == (x2, y2):
            kisses += 1
            crossings += int(c1)
        f1 = f1 if c1 else 1 - f1
        f2 = f2 if c2 else 1 - f2
        x1, y1 = (x1 + 1, y1) if f1 else (x1, y1 + 1)
        x2, y2 = (x2 + 1, y2) if f2 else (x2, y2 + 1)
        h[t] = (x2 - y2) - (x1 - y1)
        if first is None and h[t] == 0:
            first = t
    if (x1, y1) == (x2, y2):
        kisses += 1
        crossings += int(uniform(key, box_code(x1, y1)) < p)
    return PairOutcome(first, crossings, kisses, h)


def _single_chain(p: float, init, rng):
    stream = as_stream(rng, PSI_STREAM)
    if init is None:
        u = Stream(stream.seed, PSI_INIT_STREAM, stream.trial).random()
        s = min(int(u * 4), 3)
    else:
        s = state_index(init)
    cum = transition_matrix(p).cumulative
    return np.array([s], dtype=np.int8), cum, np.array([stream.key], dtype=np.uint64)


def sample_psi(k: int, p: float, init=None, rng=0) -> int:
    """psi_k for one run of the chain; ``init`` None draws the start uniformly.

    Trial ``t`` of :func:`psi_samples` with the same seed is reproduced by
    passing ``Stream(seed, "psi", t)``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    s, cum, key = _single_chain(p, init, rng)
    return int(kernels.psi_sample(k, s, cum, key)[0])


def hitting_time_psi(z: float, p: float, init=None, cap: int = 1 << 20, rng=0) -> int | None:
    """Psi_z = first k with psi_k >= z; None when the cap is reached first."""
    if z < 0:
        raise ValueError("z must be non-negative")
    s, cum, key = _single_chain(p, init, rng)
    out = int(kernels.psi_hitting(math.ceil(z), s, cum, cap, key)[0])
    return None if out < 0 else out


# batch drivers -----------------------------------------------------------

def _inits(seed: int, tag: str, trials: int, init, allowed=(0, 1, 2, 3)) -> np.ndarray:
    if init is not None:
        return np.full(trials, state_index(init), dtype=np.int8)
    keys = trial_keys(seed, tag, 0, trials)
    u = uniforms(keys, 0)
    choices = np.asarray(allowed, dtype=np.int8)
    return choices[np.minimum((u * len(choices)).astype(np.int64), len(choices) - 1)]


def first_kiss_times(ell: int, p: float, trials: int, seed: int, cap: int, init=None, threads=None) -> np.ndarray:
    """T_heart for ``trials`` independent pairs; -1 marks no kiss by ``cap``."""
    _check_open_p(p)
    if ell < 0 or ell % 2:
        raise ValueError(f"ell must be a non-negative even integer, got {ell}")
    keys = trial_keys(seed, PAIR_STREAM, 0, trials)
    inits = _inits(seed, PAIR_INIT_STREAM, trials, init)
    idx = np.arange(trials, dtype=np.int64)

    def run(chunk):
        return kernels.pair_first_kiss(ell, np.ascontiguousarray(inits[chunk]), p, cap,
                                       np.ascontiguousarray(keys[chunk]))

    return map_keys(run, idx, threads)


def psi_hitting_times(z: float, p: float, trials: int, seed: int, cap: int, init=None, threads=None) -> np.ndarray:
    """Psi_z for ``trials`` chain runs; -1 marks not reached by ``cap``."""
    cum = transition_matrix(p).cumulative
    keys = trial_keys(seed, PSI_STREAM, 0, trials)
    inits = _inits(seed, PSI_INIT_STREAM, trials, init)
    idx = np.arange(trials, dtype=np.int64)
    zi = math.ceil(z)

    def run(chunk):
        return kernels.psi_hitting(zi, np.ascontiguousarray(inits[chunk]), cum, cap,
                                   np.ascontiguousarray(keys[chunk]))

    return map_keys(run, idx, threads)


def psi_samples(k: int, p: float, trials: int, seed: int, init=None, threads=None) -> np.ndarray:
    cum = transition_matrix(p).cumulative
    keys = trial_keys(seed, PSI_STREAM, 0, trials)
    inits = _inits(seed, PSI_INIT_STREAM, trials, init)
    idx = np.arange(trials, dtype=np.int64)

    def run(chunk):
        return kernels.psi_sample(k, np.ascontiguousarray(inits[chunk]), cum, np.ascontiguousarray(keys[chunk]))

    return map_keys(run, idx, threads)


def turn_samples(k: int, p: float, trials: int, seed: int, facing="E", threads=None):
    """(tau_k, d(tau_k) - d(0)) for ``trials`` single pipes."""
    _check_open_p(p)
    keys = trial_keys(seed, PIPE_STREAM, 0, trials)
    f = _facing_code(facing)
    return map_keys(lambda ks: kernels.pipe_turns(k, f, p, np.ascontiguousarray(ks)), keys, threads)


def first_passage_times(z: int, p: float, trials: int, seed: int, cap: int, facing="E", threads=None) -> np.ndarray:
    """T(z) for ``trials`` single pipes; -1 when not reached by ``cap``."""
    _check_open_p(p)
    keys = trial_keys(seed, PIPE_STREAM, 0, trials)
    f = _facing_code(facing)
    return map_keys(lambda ks: kernels.pipe_first_passage(int(math.ceil(z)), cap, f, p, np.ascontiguousarray(ks)),
                    keys, threads)
