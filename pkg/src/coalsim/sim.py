"""Single-path simulation of the block and singleton counting processes.

A path starts from n blocks, all singletons.  While b > 1 blocks remain:
draw the waiting time W ~ Exp(lam(b)), the merger size K from the embedded
chain P(K = k) proportional to C(b,k) lam(b,k), and the number dY of current
singletons swallowed by the merger, which given (b, Y, K) is hypergeometric
(the K merging blocks are a uniform K-subset).  The external branch length
of a leaf is the absolute time at which its singleton block disappears, so
the multiset of external lengths is exactly {(t_jump, dY)} expanded.

RNG is counter-based (Philox keyed by the seed) and the draw order per jump
is fixed (K, then W, then dY with dY drawn only while singletons remain), so
a (measure, n, seed) triple pins the path bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .measure import LambdaMeasure, PowerBetaDensity
from .rates import RateFunctions, _log_binom, rates_for

DEFAULT_SEED = 123456789

_LABELED_MAX_N = 12


def _make_rng(seed: int) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def as_rate_functions(source) -> RateFunctions:
    """Accept either a RateFunctions instance or a plain measure."""
    if isinstance(source, RateFunctions):
        return source
    if isinstance(source, LambdaMeasure):
        return rates_for(source)
    raise TypeError("expected RateFunctions or LambdaMeasure, "
                    f"got {type(source).__name__}")


# ---------------------------------------------------------------------------
# merger-size sampling, vectorized over replications with unequal b

class MergerSizeSampler:
    """Draws (total rate, merger size) for arrays of block counts.

    Strategy is chosen once per measure:

    * every component recognized (mass at 0, uniform density, power-beta
      with right exponent 1, interior atoms): closed-form per-component
      rates; K by exact inverse CDF (uniform density), one global prefix
      table (power-beta b=1, since C(B,k) lam(B,k) = const(B) *
      Gamma(a+k-2)/k! there), or a short ratio walk (atoms);
    * anything else: group replications by unique b and invert the exact
      cached probability vector.  Same law, just slower.
    """

    def __init__(self, rates: RateFunctions, max_blocks: int):
        self.rates = rates
        self.max_blocks = int(max_blocks)
        self._grouped_cache: dict[int, tuple[np.ndarray, float]] = {}
        self._components: list[tuple] = []
        self._fast = rates.use_closed_forms
        measure = rates.measure
        if measure.atom_at_zero:
            self._components.append(("kingman", measure.atom_at_zero))
        for p, m in measure.atoms:
            self._components.append(("atom", p, m))
        for dens in measure.densities:
            if isinstance(dens, PowerBetaDensity) and dens.a == 1.0 \
                    and dens.b == 1.0:
                self._components.append(("uniform", dens.c))
            elif isinstance(dens, PowerBetaDensity) and dens.b == 1.0 \
                    and dens.a not in (1.0, 2.0):
                self._components.append(self._pb1_component(dens))
            else:
                self._fast = False
        if not self._fast:
            self._components = []

    def _pb1_component(self, dens: PowerBetaDensity) -> tuple:
        # prefix[j] = sum_{k=2}^{j+2} Gamma(a+k-2)/k!; P(K <= j+2 | B) is
        # prefix[j]/prefix[B-2] for every B, so one table serves all B.
        ks = np.arange(2.0, self.max_blocks + 1.0)
        g = np.exp(special.gammaln(dens.a + ks - 2.0)
                   - special.gammaln(ks + 1.0))
        prefix = np.cumsum(g)
        bs = np.arange(self.max_blocks + 1, dtype=float)
        scale = np.zeros(self.max_blocks + 1)
        scale[2:] = dens.c * np.exp(special.gammaln(bs[2:] + 1.0)
                                    - special.gammaln(dens.a + bs[2:] - 1.0))
        rate_table = np.zeros(self.max_blocks + 1)
        rate_table[2:] = scale[2:] * prefix[:self.max_blocks - 1]
        return ("pb1", prefix, rate_table)

    def _component_rates(self, b: np.ndarray) -> np.ndarray:
        rows = []
        for comp in self._components:
            kind = comp[0]
            if kind == "kingman":
                rows.append(comp[1] * b * (b - 1.0) / 2.0)
            elif kind == "uniform":
                rows.append(comp[1] * (b - 1.0))
            elif kind == "pb1":
                rows.append(comp[2][b])
            else:
                _, p, m = comp
                z = (b - 1.0) * math.log1p(-p) + np.log1p((b - 1.0) * p)
                rows.append(-np.expm1(z) * (m / p ** 2))
        return np.vstack(rows)

    def sample_step(self, rng: np.random.Generator,
                    b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(lam(b), K) for an int64 array of current block counts >= 2."""
        if self._fast:
            per_comp = self._component_rates(b)
            lam = per_comp.sum(axis=0)
            k_out = np.full(b.shape, 2, dtype=np.int64)
            if len(self._components) == 1:
                which = np.zeros(b.shape, dtype=np.intp)
            else:
                u = rng.random(b.shape) * lam
                which = (np.cumsum(per_comp, axis=0) < u).sum(axis=0)
                which = np.minimum(which, len(self._components) - 1)
            for ci, comp in enumerate(self._components):
                rows = np.nonzero(which == ci)[0]
                if rows.size == 0:
                    continue
                kind = comp[0]
                if kind == "kingman":
                    continue
                if kind == "uniform":
                    bb = b[rows].astype(float)
                    u2 = rng.random(rows.shape)
                    raw = np.ceil(1.0 / (1.0 - u2 * (bb - 1.0) / bb))
                    k_out[rows] = np.clip(raw, 2, bb).astype(np.int64)
                elif kind == "pb1":
                    prefix = comp[1]
                    bb = b[rows]
                    t = rng.random(rows.shape) * prefix[bb - 2]
                    idx = np.searchsorted(prefix, t, side="left")
                    k_out[rows] = np.minimum(idx + 2, bb)
                else:
                    k_out[rows] = self._atom_walk(rng, comp, b[rows])
            return lam, k_out
        return self._grouped_step(rng, b)

    def _atom_walk(self, rng: np.random.Generator, comp: tuple,
                   b: np.ndarray) -> np.ndarray:
        _, p, m = comp
        bb = b.astype(float)
        z = (bb - 1.0) * math.log1p(-p) + np.log1p((bb - 1.0) * p)
        target = rng.random(b.shape) * (-np.expm1(z) * (m / p ** 2))
        w = m * np.exp(_log_binom(bb, 2.0) + (bb - 2.0) * math.log1p(-p))
        cdf = w.copy()
        k = np.full(b.shape, 2, dtype=np.int64)
        odds = p / (1.0 - p)
        active = (cdf < target) & (k < b)
        while np.any(active):
            kk = k[active].astype(float)
            w[active] *= (bb[active] - kk) / (kk + 1.0) * odds
            cdf[active] += w[active]
            k[active] += 1
            active = (cdf < target) & (k < b)
        return k

    def _grouped_step(self, rng: np.random.Generator,
                      b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lam = np.empty(b.shape)
        k_out = np.empty(b.shape, dtype=np.int64)
        u = rng.random(b.shape)
        for bi in np.unique(b):
            entry = self._grouped_cache.get(int(bi))
            if entry is None:
                w = self.rates.merger_size_weights(int(bi))
                entry = (np.cumsum(w), float(w.sum()))
                if len(self._grouped_cache) < 4096:
                    self._grouped_cache[int(bi)] = entry
            cum, tot = entry
            rows = np.nonzero(b == bi)[0]
            idx = np.searchsorted(cum, u[rows] * tot, side="left")
            k_out[rows] = np.minimum(idx + 2, bi)
            lam[rows] = tot
        return lam, k_out


# ---------------------------------------------------------------------------
# path containers

@dataclass(frozen=True, eq=False)
class ExternalLengths:
    """Sorted multiset of external branch lengths: values[i] occurs
    multiplicities[i] times; multiplicities sum to the sample size."""

    values: np.ndarray
    multiplicities: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.multiplicities.shape:
            raise ValueError("values and multiplicities must align")
        if np.any(np.diff(self.values) <= 0):
            raise ValueError("values must be strictly increasing")
        if np.any(self.multiplicities < 1):
            raise ValueError("multiplicities are positive integers")

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum())

    def flat(self) -> np.ndarray:
        return np.repeat(self.values, self.multiplicities)

    def count_exceeding(self, x: float) -> int:
        return int(self.multiplicities[self.values > x].sum())

    def dump_csv(self, stream) -> None:
        stream.write("length,multiplicity\n")
        for v, m in zip(self.values, self.multiplicities):
            stream.write(f"{float(v)!r},{int(m)}\n")


@dataclass(frozen=True, eq=False)
class CoalescentPath:
    """Full record of one run: per-jump state plus the seed that made it."""

    n: int
    seed: int | None
    block_count_before: np.ndarray   # X_before, strictly decreasing from n
    merger_size: np.ndarray          # K, in [2, X_before]
    absorbed_singletons: np.ndarray  # dY
    waiting_time: np.ndarray         # W
    jump_time: np.ndarray            # t_jump, cumulative sum of W

    def __post_init__(self) -> None:
        x, k = self.block_count_before, self.merger_size
        dy, w, t = self.absorbed_singletons, self.waiting_time, self.jump_time
        if not (len(x) == len(k) == len(dy) == len(w) == len(t)):
            raise ValueError("jump arrays must align")
        if self.n < 2 or x[0] != self.n:
            raise ValueError("path must start at n >= 2 blocks")
        after = x - k + 1
        if np.any(x[1:] != after[:-1]) or after[-1] != 1:
            raise ValueError("block counts must chain down to 1")
        if np.any(k < 2) or np.any(k > x):
            raise ValueError("merger sizes must lie in [2, X_before]")
        if dy.sum() != self.n or np.any(dy < 0) or np.any(dy > k):
            raise ValueError("absorbed singletons must total n")
        if np.any(np.cumsum(dy) > self.n):
            raise ValueError("singleton count went negative")
        if np.any(w <= 0) or not np.allclose(np.cumsum(w), t, rtol=1e-12):
            raise ValueError("jump times must cumulate the waiting times")

    @property
    def num_jumps(self) -> int:
        return len(self.merger_size)

    @property
    def absorption_time(self) -> float:
        return float(self.jump_time[-1])

    def _blocks_after(self) -> np.ndarray:
        return self.block_count_before - self.merger_size + 1

    def block_count_at(self, t) -> np.ndarray:
        """N(t): right-continuous block count, 1 from absorption onward."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("time must be nonnegative")
        idx = np.searchsorted(self.jump_time, t, side="right")
        after = np.concatenate([[self.n], self._blocks_after()])
        return after[idx]

    def singleton_count_at(self, t) -> np.ndarray:
        """M(t): right-continuous count of surviving singletons."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("time must be nonnegative")
        idx = np.searchsorted(self.jump_time, t, side="right")
        remaining = np.concatenate(
            [[self.n], self.n - np.cumsum(self.absorbed_singletons)])
        return remaining[idx]

    def external_lengths(self) -> ExternalLengths:
        keep = self.absorbed_singletons > 0
        return ExternalLengths(self.jump_time[keep],
                               self.absorbed_singletons[keep])

    def stopping_times(self, r_level: float) -> tuple[int, float]:
        """(rho, rho~): jump index and time of first reaching <= r_level
        blocks; (0, 0.0) when r_level >= n."""
        if r_level < 1:
            raise ValueError("r_level must be >= 1")
        if r_level >= self.n:
            return 0, 0.0
        after = self._blocks_after()
        hits = np.nonzero(after <= r_level)[0]
        j = int(hits[0])  # nonempty: the path ends at 1 <= r_level
        return j + 1, float(self.jump_time[j])

    def conditional_factorial_moment(self, rho_index: int, r: int) -> float:
        """E[(Y_rho)_r | block chain] = (X_rho)_r prod_{j<=rho} (1 - r/X_j).

        Exact given the realized chain; 0 whenever r exceeds X_rho.
        """
        if not 0 <= rho_index <= self.num_jumps:
            raise ValueError("rho_index out of range")
        if r < 1:
            raise ValueError("r must be a positive integer")
        after = self._blocks_after()
        x_rho = self.n if rho_index == 0 else int(after[rho_index - 1])
        if r > x_rho:
            return 0.0
        value = 1.0
        for i in range(r):
            value *= x_rho - i
        for j in range(rho_index):
            value *= 1.0 - r / float(after[j])
        return value

    def dump_csv(self, stream) -> None:
        stream.write("j,X_before,K,dY,W,t_jump\n")
        for j in range(self.num_jumps):
            stream.write(f"{j},{self.block_count_before[j]},"
                         f"{self.merger_size[j]},{self.absorbed_singletons[j]},"
                         f"{float(self.waiting_time[j])!r},"
                         f"{float(self.jump_time[j])!r}\n")


# ---------------------------------------------------------------------------
# simulators

def simulate_path(rates, n: int, seed: int = DEFAULT_SEED) -> CoalescentPath:
    """One full trajectory from n blocks down to 1.  `rates` may be a
    RateFunctions instance or the underlying measure."""
    if n < 2:
        raise ValueError("need n >= 2 blocks")
    sampler = MergerSizeSampler(as_rate_functions(rates), n)
    rng = _make_rng(seed)
    return _simulate_with(rng, sampler, n, seed)


def _simulate_with(rng: np.random.Generator, sampler: MergerSizeSampler,
                   n: int, seed: int | None) -> CoalescentPath:
    xs, ks, dys, ws = [], [], [], []
    b, y = n, n
    one = np.empty(1, dtype=np.int64)
    while b > 1:
        one[0] = b
        lam, k_arr = sampler.sample_step(rng, one)
        w = rng.standard_exponential() / lam[0]
        k = int(k_arr[0])
        dy = int(rng.hypergeometric(y, b - y, k)) if y > 0 else 0
        xs.append(b)
        ks.append(k)
        dys.append(dy)
        ws.append(w)
        b -= k - 1
        y -= dy
    w = np.array(ws)
    return CoalescentPath(
        n=n, seed=seed,
        block_count_before=np.array(xs, dtype=np.int64),
        merger_size=np.array(ks, dtype=np.int64),
        absorbed_singletons=np.array(dys, dtype=np.int64),
        waiting_time=w,
        jump_time=np.cumsum(w))


def external_lengths(path: CoalescentPath) -> ExternalLengths:
    return path.external_lengths()


@dataclass(frozen=True, eq=False)
class LabeledHistory:
    """Explicit-partition run for small n: every state is a tuple of
    frozensets of leaf labels 0..n-1."""

    n: int
    seed: int | None
    jump_times: np.ndarray
    partitions: tuple              # state after each jump
    leaf_absorption_times: np.ndarray

    def block_path(self) -> CoalescentPath:
        """The induced block-count record (for equivalence checks)."""
        sizes = [self.n] + [len(part) for part in self.partitions]
        x = np.array(sizes[:-1], dtype=np.int64)
        k = x - np.array(sizes[1:], dtype=np.int64) + 1
        times = np.asarray(self.jump_times)
        dy = np.array([np.sum(self.leaf_absorption_times == t)
                       for t in times], dtype=np.int64)
        w = np.diff(np.concatenate([[0.0], times]))
        return CoalescentPath(self.n, self.seed, x, k, dy, w, times)


def simulate_labeled(rates, n: int, seed: int = DEFAULT_SEED) -> LabeledHistory:
    """Partition-valued run, n <= 12: merger size first, then a uniform
    K-subset of the current blocks."""
    if not 2 <= n <= _LABELED_MAX_N:
        raise ValueError(f"labeled simulation supports 2 <= n <= {_LABELED_MAX_N}")
    rates = as_rate_functions(rates)
    rng = _make_rng(seed)
    blocks = [frozenset([i]) for i in range(n)]
    t = 0.0
    times, states = [], []
    absorbed = np.full(n, np.nan)
    while len(blocks) > 1:
        b = len(blocks)
        lam = rates.total_jump_rate(b)
        t += rng.standard_exponential() / lam
        probs = rates.merger_size_distribution(b)
        k = 2 + int(np.searchsorted(np.cumsum(probs), rng.random(),
                                    side="left"))
        k = min(k, b)
        chosen = rng.choice(b, size=k, replace=False)
        merged = frozenset().union(*(blocks[i] for i in chosen))
        for i in sorted(chosen, reverse=True):
            if len(blocks[i]) == 1:
                absorbed[next(iter(blocks[i]))] = t
            del blocks[i]
        blocks.append(merged)
        times.append(t)
        states.append(tuple(blocks))
    return LabeledHistory(n, seed, np.array(times), tuple(states), absorbed)


# ---------------------------------------------------------------------------
# functional wrappers matching the path methods

def block_count_at(path: CoalescentPath, t):
    return path.block_count_at(t)


def singleton_count_at(path: CoalescentPath, t):
    return path.singleton_count_at(t)


def stopping_times(path: CoalescentPath, r_level: float):
    return path.stopping_times(r_level)


def conditional_factorial_moment(path: CoalescentPath, rho_index: int,
                                 r: int) -> float:
    return path.conditional_factorial_moment(rho_index, r)
