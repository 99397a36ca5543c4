"""Uniform-on-sphere sampling, deterministic Monte Carlo tail estimation,
and exact small-instance oracles.

Determinism contract
--------------------
Every Monte Carlo result here depends only on (seed, n_samples, coefficients,
dimension, threshold).  Samples are generated in fixed chunks of
``CHUNK_SIZE``; chunk k derives its generator from
``SeedSequence(seed, spawn_key=(k,))``.  Workers only map chunks to threads,
so the drawn sample stream, the hit count, and hence the reported estimate
are identical for any degree of parallelism.

Sphere sampling is by normalization of standard Gaussian vectors: it is
dimension-uniform, vectorizes, and inherits exact rotation invariance from
the Gaussian law.

Confidence intervals are exact binomial (Clopper-Pearson), so statistical
verdicts built on them stay conservative even at very small tail
probabilities.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy import stats

from .bounds import TailQuery, coeff_array
from .gaussian_chi import check_dimension

#: fixed Monte Carlo chunk size; part of the reproducibility contract
CHUNK_SIZE = 1 << 15

#: hard cap for exhaustive sign-pattern enumeration (2^n patterns)
ENUMERATION_MAX = 26


class CapacityError(Exception):
    """A request exceeds a hard capacity limit (enumeration size, budget)."""


@dataclass(frozen=True)
class RngStream:
    """A reproducible substream: (seed, stream_index) -> identical samples
    on any platform and any worker layout."""

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_index < 0:
            raise ValueError("seed and stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class McEstimate:
    """Empirical tail probability with an exact binomial confidence interval."""

    p_hat: float
    ci_low: float
    ci_high: float
    n_samples: int
    hits: int
    seed: int
    alpha: float


def clopper_pearson(hits: int, n: int, alpha: float = 0.01) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval at level 1 - alpha."""
    if not 0 <= hits <= n:
        raise ValueError(f"need 0 <= hits <= n, got hits={hits}, n={n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    low = 0.0 if hits == 0 else float(stats.beta.ppf(alpha / 2.0, hits, n - hits + 1))
    high = 1.0 if hits == n else float(stats.beta.ppf(1.0 - alpha / 2.0, hits + 1, n - hits))
    return low, high


def _unit_chunk(rng: np.random.Generator, size: int, n: int, d: int) -> np.ndarray:
    """(size, n, d) array of independent uniform unit vectors."""
    g = rng.standard_normal((size, n, d))
    norms = np.sqrt(np.einsum("ijk,ijk->ij", g, g))
    g /= norms[:, :, None]
    return g


def sample_sphere(d, stream: RngStream) -> np.ndarray:
    """One vector uniformly distributed on the unit sphere in R^d."""
    d = check_dimension(d)
    return _unit_chunk(stream.generator(), 1, 1, d)[0, 0]


def _chunk_layout(n_samples: int) -> list[tuple[int, int]]:
    """(chunk_index, chunk_size) pairs covering n_samples."""
    full, rem = divmod(n_samples, CHUNK_SIZE)
    layout = [(k, CHUNK_SIZE) for k in range(full)]
    if rem:
        layout.append((full, rem))
    return layout


def _map_chunks(fn, layout, workers: int):
    if workers <= 1:
        return [fn(k, size) for k, size in layout]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ks: fn(*ks), layout))


def iter_sum_norm_chunks(
    coeffs: Sequence[float], d, n_samples: int, seed: int
) -> Iterator[np.ndarray]:
    """Yield chunks of ||a_1 U_1 + ... + a_n U_n|| samples, deterministically.

    The concatenation of the yielded chunks is a fixed function of
    (coeffs, d, n_samples, seed).
    """
    a = coeff_array(coeffs)
    d = check_dimension(d)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    for k, size in _chunk_layout(n_samples):
        rng = RngStream(seed, k).generator()
        u = _unit_chunk(rng, size, a.size, d)
        s = np.einsum("ijk,j->ik", u, a)
        yield np.sqrt(np.einsum("ik,ik->i", s, s))


def sample_sum_norms(coeffs: Sequence[float], d, n_samples: int, seed: int) -> np.ndarray:
    """All ||sum a_i U_i|| samples as one array (see iter_sum_norm_chunks)."""
    return np.concatenate(list(iter_sum_norm_chunks(coeffs, d, n_samples, seed)))


def mc_tail_multi(
    d,
    coeffs: Sequence[float],
    u_values: Sequence[float],
    n_samples: int,
    seed: int,
    alpha: float = 0.01,
    workers: int = 1,
) -> list[McEstimate]:
    """Estimate P(||sum a_i U_i|| > u) for several thresholds at once.

    All thresholds are counted against the same sample stream, so the entry
    for each u is exactly what ``mc_tail`` would return for that u alone:
    the stream depends on (seed, n_samples, coeffs, d) but not on u.
    """
    a = coeff_array(coeffs)
    d = check_dimension(d)
    us = np.asarray(u_values, dtype=float)
    if us.ndim != 1 or us.size < 1 or not np.all(np.isfinite(us)):
        raise ValueError("u_values must be a nonempty sequence of finite reals")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")

    def chunk_hits(k: int, size: int) -> np.ndarray:
        rng = RngStream(seed, k).generator()
        u = _unit_chunk(rng, size, a.size, d)
        s = np.einsum("ijk,j->ik", u, a)
        r = np.sqrt(np.einsum("ik,ik->i", s, s))
        return np.array([np.count_nonzero(r > ui) for ui in us], dtype=np.int64)

    per_chunk = _map_chunks(chunk_hits, _chunk_layout(n_samples), workers)
    hits = np.sum(per_chunk, axis=0)
    out = []
    for ui, h in zip(us, hits):
        h = int(h)
        low, high = clopper_pearson(h, n_samples, alpha)
        out.append(
            McEstimate(
                p_hat=h / n_samples,
                ci_low=low,
                ci_high=high,
                n_samples=n_samples,
                hits=h,
                seed=seed,
                alpha=alpha,
            )
        )
    return out


def mc_tail(
    query: TailQuery,
    n_samples: int,
    seed: int,
    alpha: float = 0.01,
    workers: int = 1,
) -> McEstimate:
    """Seeded Monte Carlo estimate of P(||sum a_i U_i|| > u), strict ">"."""
    return mc_tail_multi(
        query.d, query.coeffs, [query.u], n_samples, seed, alpha, workers
    )[0]


def _signed_sums(a: np.ndarray) -> np.ndarray:
    """All 2^len(a) values of sum_i s_i a_i over sign patterns s in {-1,+1}^n."""
    sums = np.zeros(1)
    for ai in a:
        sums = np.concatenate([sums - ai, sums + ai])
    return sums


def exact_rademacher_tail(coeffs: Sequence[float], u: float, strict: bool = True) -> float:
    """Exact P(|sum eps_i a_i| > u) (or >= u when strict=False) by enumeration.

    eps_i are independent signs.  Uses a meet-in-the-middle split, so the
    cost is O(2^(n/2) log) up to the hard cap of n = 26.  The returned value
    is hits / 2^n, which is an exact dyadic rational in double precision.
    """
    a = coeff_array(coeffs)
    n = a.size
    if n > ENUMERATION_MAX:
        raise CapacityError(
            f"sign-pattern enumeration supports n <= {ENUMERATION_MAX}, got n = {n}"
        )
    u = float(u)
    if not math.isfinite(u):
        raise ValueError(f"threshold must be finite, got {u!r}")
    if u < 0.0 or (u == 0.0 and not strict):
        return 1.0
    left = _signed_sums(a[: n // 2])
    right = np.sort(_signed_sums(a[n // 2 :]))
    m = right.size
    if strict:
        above = m - np.searchsorted(right, u - left, side="right")
        below = np.searchsorted(right, -u - left, side="left")
    else:
        above = m - np.searchsorted(right, u - left, side="left")
        below = np.searchsorted(right, -u - left, side="right")
    hits = int(above.sum() + below.sum())
    return hits / float(2**n)


def second_moment_exact(coeffs: Sequence[float]) -> float:
    """E ||sum a_i U_i||^2 = sum a_i^2 (cross terms vanish: E U_i . U_j = 0)."""
    a = coeff_array(coeffs)
    return float(a @ a)


def fourth_moment_exact(coeffs: Sequence[float], d) -> float:
    """E ||sum a_i U_i||^4, in closed form.

    Expanding (||S||^2)^2 and using E ||U_i||^4 = 1, E ||U_i||^2 ||U_j||^2 = 1
    and E (U_i . U_j)^2 = 1/d for i != j gives

        sum a_i^4 + (2 + 4/d) sum_{i<j} a_i^2 a_j^2.
    """
    a = coeff_array(coeffs)
    d = check_dimension(d)
    sq = a * a
    t2 = float(sq.sum())
    t4 = float(sq @ sq)
    pair = 0.5 * (t2 * t2 - t4)
    return t4 + (2.0 + 4.0 / d) * pair


def gaussian_fourth_moment(coeffs: Sequence[float], d) -> float:
    """E ||a Z_d||^4 with a = sqrt(sum a_i^2 / d): equals (sum a_i^2)^2 (1 + 2/d).

    Dominates ``fourth_moment_exact`` with gap exactly (2/d) sum a_i^4, the
    fourth-power instance of the Gaussian moment comparison.
    """
    a = coeff_array(coeffs)
    d = check_dimension(d)
    t2 = float(a @ a)
    return t2 * t2 * (1.0 + 2.0 / d)
