"""Direct samplers for random arms and polygons of total length 2.

Arms come from uniform points on a sphere of radius sqrt(2), closed polygons
from uniform orthonormal 2-frames obtained by Gram-Schmidt on Gaussian
vectors. Both are pushed to edge vectors by the Hopf map. Everything is
vectorised: ``sample_edges`` returns a ``(count, n, dim)`` array and the
single-polygon helpers wrap it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quat_geom import hopf, hopf_planar
from .theory import SpaceKind

__all__ = [
    "Polygon",
    "RngStream",
    "RejectionStats",
    "RejectionTimeout",
    "gaussian_vector",
    "gram_schmidt_pairs",
    "sample_edges",
    "sample_arm2",
    "sample_arm3",
    "sample_pol2",
    "sample_pol3",
    "sample_equilateral_arm",
    "sample_polygon",
    "rejection_sample",
]

SQRT2 = math.sqrt(2.0)

# Gram-Schmidt tolerances.
DEGENERATE_RESIDUAL = 1e-8
REORTHOGONALIZE_ABOVE = 1e-13

# Edges per generated block inside the rejection sampler (memory bound).
_REJECTION_BLOCK_EDGES = 1 << 20
MAX_ATTEMPTS_PER_ACCEPT = 10**6


@dataclass(eq=False)
class Polygon:
    """Edge vectors of a polygon, one per row.

    Vertices are ``v_1 = 0`` and ``v_{i+1} = v_i + e_i``. ``closed`` records
    which space the polygon was drawn from; it decides how chords wrap and
    how many vertices count for the gyradius.
    """

    edges: np.ndarray
    closed: bool = False

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        if self.edges.ndim != 2 or self.edges.shape[1] not in (2, 3):
            raise ValueError(f"edges must have shape (n, 2) or (n, 3), got {self.edges.shape}")
        if self.edges.shape[0] < 1:
            raise ValueError("a polygon needs at least one edge")
        self.closed = bool(self.closed)

    @property
    def n(self):
        return self.edges.shape[0]

    @property
    def dim(self):
        return self.edges.shape[1]

    @property
    def length(self):
        return float(np.linalg.norm(self.edges, axis=1).sum())

    def edgelengths(self):
        return np.linalg.norm(self.edges, axis=1)

    def vertices(self):
        v = np.zeros((self.n + 1, self.dim))
        np.cumsum(self.edges, axis=0, out=v[1:])
        return v


class RngStream:
    """Seeded random stream; ``(seed, stream_id)`` fixes the whole sequence.

    Distinct stream ids give statistically independent substreams, which is
    how parallel workers share one seed.
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_id < 2**64):
            raise ValueError("seed and stream id must be unsigned 64-bit integers")
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def normal(self, shape):
        return self.generator.standard_normal(shape)

    def uniform(self, shape):
        return self.generator.random(shape)


def _as_stream(rng):
    if isinstance(rng, RngStream):
        return rng
    return RngStream(rng)


def gaussian_vector(rng, m):
    """``m`` independent standard normal draws."""
    if m < 1:
        raise ValueError("need at least one draw")
    return _as_stream(rng).normal(m)


def _sphere_points(rng, count, dims, radius):
    """Uniform points on the sphere of given radius, one per row."""
    def draw(m):
        return rng.normal((m,) + dims)

    def bad(x):
        return np.sum(x * x, axis=tuple(range(1, x.ndim))) == 0.0

    x = draw(count)
    zero = bad(x)
    while np.any(zero):
        idx = np.flatnonzero(zero)
        x[idx] = draw(idx.size)
        zero = np.zeros(count, dtype=bool)
        zero[idx] = bad(x[idx])
    norms = np.sqrt(np.sum(x * x, axis=tuple(range(1, x.ndim))))
    return x * (radius / norms).reshape((count,) + (1,) * len(dims))


def _hdot(v, w):
    """Row-wise Hermitian product ``sum v * conj(w)`` (plain dot for reals)."""
    return np.einsum("ij,ij->i", v, np.conj(w))


def _row_norms(v):
    if np.iscomplexobj(v):
        return np.sqrt(np.einsum("ij,ij->i", v.real, v.real) + np.einsum("ij,ij->i", v.imag, v.imag))
    return np.sqrt(np.einsum("ij,ij->i", v, v))


def gram_schmidt_pairs(a, b):
    """Orthonormalise each row pair ``(a[r], b[r])``; real or complex.

    Classical single-pass Gram-Schmidt, then one re-orthogonalisation pass on
    rows whose frames are still off by more than ``1e-13``. Returns the frame
    and a boolean mask of rows whose residual ``|b'|/|b|`` fell below
    ``1e-8`` (those rows are not usable and must be redrawn).
    """
    a = np.array(a, copy=True)
    b = np.array(b, copy=True)
    na = _row_norms(a)
    nb = _row_norms(b)
    bad = (na == 0.0) | (nb == 0.0)
    safe_na = np.where(bad, 1.0, na)
    coef = _hdot(b, a) / (safe_na * safe_na)
    b -= coef[:, None] * a
    a /= safe_na[:, None]
    nr = _row_norms(b)
    bad |= nr < DEGENERATE_RESIDUAL * np.where(nb == 0.0, 1.0, nb)
    b /= np.where(bad, 1.0, nr)[:, None]

    off = np.abs(_hdot(b, a)) > REORTHOGONALIZE_ABOVE
    off &= ~bad
    if np.any(off):
        idx = np.flatnonzero(off)
        b[idx] -= _hdot(b[idx], a[idx])[:, None] * a[idx]
        b[idx] /= _row_norms(b[idx])[:, None]
    return a, b, bad


def _stiefel_frames(rng, count, n, complex_):
    """Uniform orthonormal 2-frames in C^n (or R^n), one per row."""
    def draw(m):
        if complex_:
            a = rng.normal((m, n)) + 1j * rng.normal((m, n))
            b = rng.normal((m, n)) + 1j * rng.normal((m, n))
        else:
            a = rng.normal((m, n))
            b = rng.normal((m, n))
        return gram_schmidt_pairs(a, b)

    a, b, bad = draw(count)
    while np.any(bad):
        idx = np.flatnonzero(bad)
        a2, b2, bad2 = draw(idx.size)
        a[idx], b[idx] = a2, b2
        bad = np.zeros(count, dtype=bool)
        bad[idx] = bad2
    return a, b


def _hopf_frames_complex(a, b):
    """Edges ``hopf_complex(a_i, b_i)`` written out on real parts for speed."""
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    e = np.empty(a.shape + (3,))
    e[..., 0] = ar * ar + ai * ai - br * br - bi * bi
    # a conj(b) = (ar br + ai bi) + i (ai br - ar bi)
    e[..., 1] = 2.0 * (ai * br - ar * bi)
    e[..., 2] = 2.0 * (ar * br + ai * bi)
    return e


def _arm3_edges(rng, n, count):
    q = _sphere_points(rng, count, (n, 4), SQRT2)
    return hopf(q)


def _arm2_edges(rng, n, count):
    z = _sphere_points(rng, count, (n, 2), SQRT2)
    return hopf_planar(z[..., 0], z[..., 1])


def _pol3_edges(rng, n, count):
    a, b = _stiefel_frames(rng, count, n, complex_=True)
    return _hopf_frames_complex(a, b)


def _pol2_edges(rng, n, count):
    # Only the V_2(R^n) component; its mirror i V_2(R^n) gives reflected
    # polygons and every statistic here is reflection invariant.
    a, b = _stiefel_frames(rng, count, n, complex_=False)
    return hopf_planar(a, b)


def _equilateral_edges(rng, n, count, dim):
    if dim == 3:
        u = _sphere_points(rng, count * n, (3,), 1.0)
        return u.reshape(count, n, 3) * (2.0 / n)
    theta = 2.0 * math.pi * rng.uniform((count, n))
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1) * (2.0 / n)


_EDGE_SAMPLERS = {
    SpaceKind.ARM2: _arm2_edges,
    SpaceKind.ARM3: _arm3_edges,
    SpaceKind.POL2: _pol2_edges,
    SpaceKind.POL3: _pol3_edges,
    SpaceKind.EARM2: lambda rng, n, count: _equilateral_edges(rng, n, count, 2),
    SpaceKind.EARM3: lambda rng, n, count: _equilateral_edges(rng, n, count, 3),
}


def sample_edges(rng, space, n, count):
    """Edge vectors of ``count`` independent polygons, shape ``(count, n, dim)``.

    Equilateral closed spaces have no direct sampler.
    """
    space = SpaceKind.parse(space)
    if space not in _EDGE_SAMPLERS:
        raise ValueError(f"no direct sampler for {space.value}")
    n = int(n)
    if n < space.min_n:
        raise ValueError(f"{space.value} needs n >= {space.min_n}, got {n}")
    if count < 0:
        raise ValueError("count must be non-negative")
    return _EDGE_SAMPLERS[space](_as_stream(rng), n, int(count))


def sample_polygon(rng, space, n):
    space = SpaceKind.parse(space)
    return Polygon(sample_edges(rng, space, n, 1)[0], closed=space.closed)


def sample_arm3(rng, n):
    return sample_polygon(rng, SpaceKind.ARM3, n)


def sample_arm2(rng, n):
    return sample_polygon(rng, SpaceKind.ARM2, n)


def sample_pol3(rng, n):
    return sample_polygon(rng, SpaceKind.POL3, n)


def sample_pol2(rng, n):
    return sample_polygon(rng, SpaceKind.POL2, n)


def sample_equilateral_arm(rng, dim, n):
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    return sample_polygon(rng, SpaceKind.EARM2 if dim == 2 else SpaceKind.EARM3, n)


@dataclass
class RejectionStats:
    attempted: int = 0
    accepted: int = 0
    lam: float = float("nan")

    @property
    def ratio(self):
        return self.accepted / self.attempted if self.attempted else float("nan")


class RejectionTimeout(RuntimeError):
    pass


def rejection_edges(rng, space, n, lam, count, max_attempts=None):
    """Array form of :func:`rejection_sample`: ``(edges, stats)``.

    A polygon is kept when its longest edge is strictly below ``lam * 2/n``.
    Attempts are counted up to the one that yields the ``count``-th accept,
    exactly as if polygons were drawn one at a time.
    """
    space = SpaceKind.parse(space)
    if space.equilateral:
        raise ValueError("rejection sampling starts from arm or polygon space")
    if not lam > 1:
        raise ValueError("lambda must exceed 1; otherwise nothing but equilateral polygons pass")
    rng = _as_stream(rng)
    if max_attempts is None:
        max_attempts = MAX_ATTEMPTS_PER_ACCEPT * max(count, 1)
    bound = lam * 2.0 / n
    stats = RejectionStats(lam=float(lam))
    kept = []
    block_cap = max(1, _REJECTION_BLOCK_EDGES // n)
    block = min(block_cap, max(16, count))
    while stats.accepted < count:
        if stats.attempted >= max_attempts:
            raise RejectionTimeout(
                f"{stats.attempted} attempts gave {stats.accepted}/{count} polygons "
                f"with max edge < {lam} * mean; lambda is too small"
            )
        block = min(block, max_attempts - stats.attempted)
        edges = sample_edges(rng, space, n, block)
        longest = np.sqrt(np.max(np.einsum("mij,mij->mi", edges, edges), axis=1))
        hits = np.flatnonzero(longest < bound)
        need = count - stats.accepted
        if hits.size >= need:
            hits = hits[:need]
            stats.attempted += int(hits[-1]) + 1
        else:
            stats.attempted += block
        stats.accepted += hits.size
        if hits.size:
            kept.append(edges[hits])
        # Grow the block towards the size expected to finish the job.
        rate = max(stats.accepted, 1) / stats.attempted
        block = int(min(block_cap, max(16, math.ceil(1.2 * (count - stats.accepted) / rate))))
    dim = space.dim
    out = np.concatenate(kept) if kept else np.empty((0, n, dim))
    return out, stats


def rejection_sample(rng, space, n, lam, count, max_attempts=None):
    """``count`` quasi-equilateral polygons and the acceptance bookkeeping."""
    space = SpaceKind.parse(space)
    edges, stats = rejection_edges(rng, space, n, lam, count, max_attempts)
    return [Polygon(e, closed=space.closed) for e in edges], stats
