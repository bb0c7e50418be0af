"""Statistics of single polygons and exact edge set ensemble averages.

Polygon-level functions take either a :class:`~hopfpoly.sampler.Polygon` or a
raw array of edge vectors with shape ``(..., n, dim)``; for arrays the
``closed`` flag must be given and the result carries the leading batch shape.

Vertex convention: ``v_1 = 0`` and ``v_{i+1} = v_i + e_i``. An open arm has
``n + 1`` vertices; a closed polygon counts only ``v_1 .. v_n``.
"""

import itertools
import math

import numpy as np

from .sampler import Polygon

__all__ = [
    "EdgeSet",
    "MomentAccumulator",
    "closure_defect",
    "chord_sq",
    "mean_chord_sq",
    "gyradius",
    "total_curvature",
    "schord_formula",
    "schord_permutation_oracle",
    "sgyradius_formula",
    "sgyradius_permutation_oracle",
    "project_to_plane",
    "rescale_to_length",
    "random_unit_vectors",
]

CLOSURE_TOL = 1e-10
ARCCOS_SLACK = 1e-12
MAX_ORACLE_EDGES = 8


def _unpack(P, closed):
    if isinstance(P, Polygon):
        return P.edges, P.closed if closed is None else bool(closed)
    if closed is None:
        raise TypeError("closed must be given when passing a raw edge array")
    edges = np.asarray(P, dtype=float)
    if edges.ndim < 2 or edges.shape[-1] not in (2, 3):
        raise ValueError(f"edge array must have shape (..., n, 2|3), got {edges.shape}")
    return edges, bool(closed)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _sq_norm(v):
    return _dot(v, v)


def closure_defect(P, closed=None):
    """Failure to close ``|sum e_i|``."""
    edges, _ = _unpack(P, False if closed is None else closed)
    return _scalar(np.sqrt(_sq_norm(edges.sum(axis=-2))))


def _check_chord(n, start, k, closed):
    if not 1 <= k <= n:
        raise ValueError(f"chord must span 1..{n} edges, got {k}")
    if closed:
        if not 0 <= start < n:
            raise ValueError(f"start must lie in [0, {n}), got {start}")
    elif not (0 <= start and start + k <= n):
        raise ValueError(f"open chord start={start}, k={k} runs past {n} edges")


def chord_sq(P, start, k, closed=None):
    """``|e_{start+1} + ... + e_{start+k}|^2``; closed polygons wrap."""
    edges, closed = _unpack(P, closed)
    n = edges.shape[-2]
    _check_chord(n, start, k, closed)
    idx = (start + np.arange(k)) % n
    return _scalar(_sq_norm(edges[..., idx, :].sum(axis=-2)))


def _prefix(edges, closed):
    """Partial sums ``S_0 = 0, S_1, ...``; doubled around the loop if closed."""
    if closed:
        edges = np.concatenate([edges, edges], axis=-2)
    shape = edges.shape[:-2] + (edges.shape[-2] + 1, edges.shape[-1])
    s = np.zeros(shape)
    np.cumsum(edges, axis=-2, out=s[..., 1:, :])
    return s


def mean_chord_sq(P, k, closed=None):
    """Mean squared chord over every chord spanning ``k`` edges.

    Closed polygons average the ``n`` cyclic chords, open ones the
    ``n - k + 1`` chords that stay inside the arm. ``k`` may be a sequence;
    the result then gains a trailing axis of the same length.
    """
    edges, closed = _unpack(P, closed)
    n = edges.shape[-2]
    ks = np.atleast_1d(np.asarray(k, dtype=int))
    for kk in ks:
        _check_chord(n, 0, int(kk), closed)
    s = _prefix(edges, closed)
    out = []
    for kk in ks:
        starts = n if closed else n - kk + 1
        d = s[..., kk:kk + starts, :] - s[..., :starts, :]
        out.append(_sq_norm(d).mean(axis=-1))
    if np.ndim(k) == 0:
        return _scalar(out[0])
    return np.stack(out, axis=-1)


def _vertices(edges, closed):
    v = _prefix(edges, False)
    return v[..., :-1, :] if closed else v


def gyradius(P, closed=None):
    """Half the mean squared distance over ordered vertex pairs.

    Evaluated through the centroid: ``sum_ij |v_i - v_j|^2 = 2m sum_i |v_i - c|^2``.
    """
    edges, closed = _unpack(P, closed)
    v = _vertices(edges, closed)
    c = v.mean(axis=-2, keepdims=True)
    return _scalar(_sq_norm(v - c).mean(axis=-1))


def _gyradius_pairwise(P, closed=None):
    """Direct O(n^2) pair sum; reference path for tests."""
    edges, closed = _unpack(P, closed)
    v = _vertices(edges, closed)
    m = v.shape[-2]
    diff = v[..., :, None, :] - v[..., None, :, :]
    return _scalar(_sq_norm(diff).sum(axis=(-1, -2)) / (2.0 * m * m))


def _turning_cosines(edges, closed):
    if closed:
        nxt = np.roll(edges, -1, axis=-2)
        cur = edges
    else:
        cur, nxt = edges[..., :-1, :], edges[..., 1:, :]
    lens = np.sqrt(_sq_norm(edges))
    if np.any(lens == 0):
        raise ValueError("total curvature is undefined with a zero-length edge")
    lc = lens if closed else lens[..., :-1]
    ln = np.roll(lens, -1, axis=-1) if closed else lens[..., 1:]
    cos = _dot(cur, nxt) / (lc * ln)
    if np.any(np.abs(cos) > 1 + ARCCOS_SLACK) or np.any(np.isnan(cos)):
        raise ValueError("turning angle cosine outside [-1, 1] beyond rounding")
    return np.clip(cos, -1.0, 1.0)


def total_curvature(P, closed=None):
    """Sum of turning angles; ``n`` terms for closed polygons, ``n - 1`` for arms."""
    edges, closed = _unpack(P, closed)
    return _scalar(np.arccos(_turning_cosines(edges, closed)).sum(axis=-1))


def random_unit_vectors(rng, count, dim=3):
    """``count`` uniform directions from an :class:`~hopfpoly.sampler.RngStream`."""
    x = rng.normal((count, dim))
    r = np.sqrt(_sq_norm(x))
    while np.any(r == 0):
        bad = r == 0
        x[bad] = rng.normal((int(bad.sum()), dim))
        r = np.sqrt(_sq_norm(x))
    return x / r[:, None]


def _plane_basis(normal):
    """Orthonormal ``(u, w)`` spanning the plane orthogonal to each normal."""
    nrm = np.asarray(normal, dtype=float)
    length = np.sqrt(_sq_norm(nrm))
    if np.any(length == 0) or not np.all(np.isfinite(length)):
        raise ValueError("projection normal must be a nonzero finite vector")
    nhat = nrm / length[..., None]
    # Helper axis: the coordinate axis least aligned with the normal.
    axis = np.argmin(np.abs(nhat), axis=-1)
    helper = np.eye(3)[axis]
    u = np.cross(nhat, helper)
    u /= np.sqrt(_sq_norm(u))[..., None]
    w = np.cross(nhat, u)
    return u, w


def project_to_plane(P, normal, closed=None):
    """Orthogonal projection of a space polygon to the plane normal to ``normal``.

    Edges are written in an orthonormal basis of that plane. Lengths are not
    renormalised. For a batch of polygons ``normal`` may hold one row per
    polygon.
    """
    edges, closed = _unpack(P, closed)
    if edges.shape[-1] != 3:
        raise ValueError("only space polygons can be projected")
    u, w = _plane_basis(normal)
    out = np.stack(
        [np.einsum("...ni,...i->...n", edges, u), np.einsum("...ni,...i->...n", edges, w)],
        axis=-1,
    )
    if isinstance(P, Polygon):
        return Polygon(out, closed=closed)
    return out


def rescale_to_length(P, L=2.0, closed=None):
    """Scale edges so the total length becomes ``L``."""
    edges, closed = _unpack(P, closed)
    total = np.sqrt(_sq_norm(edges)).sum(axis=-1)
    if np.any(total == 0):
        raise ValueError("cannot rescale a polygon of zero length")
    out = edges * (L / total)[..., None, None]
    if isinstance(P, Polygon):
        return Polygon(out, closed=closed)
    return out


class EdgeSet:
    """Multiset of edge vectors; ensemble quantities ignore their order."""

    def __init__(self, edges):
        self.edges = np.asarray(edges, dtype=float)
        if self.edges.ndim != 2 or self.edges.shape[1] not in (2, 3) or len(self.edges) < 1:
            raise ValueError(f"edge set must have shape (n, 2|3), got {self.edges.shape}")

    @property
    def n(self):
        return self.edges.shape[0]

    @property
    def dim(self):
        return self.edges.shape[1]

    @property
    def failure_to_close(self):
        return float(np.linalg.norm(self.edges.sum(axis=0)))

    @property
    def sum_sq(self):
        return float(_sq_norm(self.edges).sum())

    def __repr__(self):
        return f"EdgeSet(n={self.n}, dim={self.dim}, ell={self.failure_to_close:.3g})"

    def schord(self, k):
        return schord_formula(self, self.n, k)

    def sgyradius(self, closed):
        return sgyradius_formula(self, self.n, closed)


def _edge_set(E):
    return E if isinstance(E, EdgeSet) else EdgeSet(E)


def schord_formula(E, n=None, k=1):
    """Ensemble mean of the squared chord over the first ``k`` edges.

    ``k(n-k)/(n(n-1)) sum |e_j|^2 + k(k-1)/(n(n-1)) ell^2``.
    """
    E = _edge_set(E)
    n = E.n if n is None else n
    if n != E.n:
        raise ValueError(f"edge set has {E.n} edges, not {n}")
    if n < 2:
        raise ValueError("ensemble chord needs at least two edges")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    ell_sq = float(_sq_norm(E.edges.sum(axis=0)))
    denom = n * (n - 1)
    return k * (n - k) / denom * E.sum_sq + k * (k - 1) / denom * ell_sq


def sgyradius_formula(E, n=None, closed=False):
    """Ensemble mean gyradius in closed form."""
    E = _edge_set(E)
    n = E.n if n is None else n
    if n != E.n:
        raise ValueError(f"edge set has {E.n} edges, not {n}")
    ell = E.failure_to_close
    if closed:
        if ell > CLOSURE_TOL:
            raise ValueError(f"closed edge set fails to close by {ell:.3g}")
        return (n + 1) / (12 * n) * E.sum_sq
    return (n + 2) / (12 * (n + 1)) * (E.sum_sq + ell * ell)


def _all_orderings(E):
    E = _edge_set(E)
    if E.n > MAX_ORACLE_EDGES:
        raise ValueError(f"permutation oracle limited to n <= {MAX_ORACLE_EDGES}, got {E.n}")
    perms = np.array(list(itertools.permutations(range(E.n))), dtype=np.intp)
    return E, E.edges[perms]


def schord_permutation_oracle(E, k):
    """Average of the first-``k`` chord over all ``n!`` orderings."""
    E, ordered = _all_orderings(E)
    if not 1 <= k <= E.n:
        raise ValueError(f"k must lie in [1, {E.n}], got {k}")
    return float(_sq_norm(ordered[:, :k, :].sum(axis=1)).mean())


def sgyradius_permutation_oracle(E, closed):
    """Average gyradius over all ``n!`` orderings."""
    E, ordered = _all_orderings(E)
    if closed and E.failure_to_close > CLOSURE_TOL:
        raise ValueError(f"closed edge set fails to close by {E.failure_to_close:.3g}")
    return float(np.mean(gyradius(ordered, closed=closed)))


class MomentAccumulator:
    """Streaming mean and variance that can be merged across workers.

    Batches are folded in with the pairwise update of Chan, Golub and LeVeque,
    which keeps the result stable when batch means differ little.
    """

    __slots__ = ("count", "mean", "m2")

    def __init__(self, count=0, mean=0.0, m2=0.0):
        self.count = int(count)
        self.mean = float(mean)
        self.m2 = float(m2)

    @classmethod
    def of(cls, values):
        acc = cls()
        acc.add(values)
        return acc

    def add(self, values):
        x = np.asarray(values, dtype=float).ravel()
        if x.size == 0:
            return self
        mean = float(x.mean())
        m2 = float(np.sum((x - mean) ** 2))
        return self._combine(x.size, mean, m2)

    def merge(self, other):
        return self._combine(other.count, other.mean, other.m2)

    def _combine(self, nb, mb, m2b):
        na = self.count
        if nb == 0:
            return self
        if na == 0:
            self.count, self.mean, self.m2 = nb, mb, m2b
            return self
        n = na + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta * delta * na * nb / n
        self.count = n
        return self

    def copy(self):
        return MomentAccumulator(self.count, self.mean, self.m2)

    @property
    def variance(self):
        return self.m2 / (self.count - 1) if self.count > 1 else math.nan

    @property
    def stderr(self):
        return math.sqrt(self.variance / self.count) if self.count > 1 else math.nan

    def as_dict(self):
        return {"count": self.count, "mean": self.mean, "m2": self.m2}

    def __repr__(self):
        return f"MomentAccumulator(count={self.count}, mean={self.mean:.6g}, var={self.variance:.6g})"
