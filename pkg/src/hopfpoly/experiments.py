"""Monte Carlo experiments that compare sampled statistics with closed forms.

Every experiment splits its sample count into chunks whose size depends only
on ``n``; chunk ``i`` draws from stream ``i`` of the seed. Chunks are merged
in stream order, so results do not depend on how many workers ran them.
"""

import functools
import json
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import __version__
from . import theory
from .polystats import (
    EdgeSet,
    MomentAccumulator,
    gyradius,
    mean_chord_sq,
    project_to_plane,
    random_unit_vectors,
    rescale_to_length,
    schord_formula,
    schord_permutation_oracle,
    sgyradius_formula,
    sgyradius_permutation_oracle,
    total_curvature,
)
from .sampler import RngStream, rejection_edges, sample_edges
from .theory import SpaceKind

__all__ = [
    "Estimate",
    "ExperimentReport",
    "chunk_plan",
    "run_chunks",
    "verify_chords",
    "verify_gyradius",
    "verify_pdf",
    "verify_ese",
    "builtin_edge_set",
    "reject",
    "curvature",
    "project",
    "sample_ensemble",
]

# Edges generated per chunk; sets both memory use and the chunk layout.
EDGE_BUDGET = 1 << 19
# Verification passes when |estimate - theory| <= TOL_SIGMA * stderr + ABS_FLOOR.
TOL_SIGMA = 4.0
ABS_FLOOR = 1e-15
EXACT_TOL = 1e-12
# Rescaled projected gyradius reported for 1024-gons; there is no closed form.
PROJECTED_GYRADIUS_REFERENCE = 5.27e-4


@dataclass
class Estimate:
    """One statistic: Monte Carlo value, its standard error and the closed form."""

    name: str
    estimate: float
    stderr: float
    theory: float
    tolerance: float = math.nan
    passed: bool = True
    params: dict = field(default_factory=dict)

    @property
    def rel_deviation(self):
        if self.theory == 0 or not math.isfinite(self.theory):
            return None
        return abs(self.estimate - self.theory) / abs(self.theory)

    @property
    def sigmas(self):
        if not self.stderr > 0:
            return None
        return abs(self.estimate - self.theory) / self.stderr

    def as_dict(self):
        d = asdict(self)
        d["rel_deviation"] = self.rel_deviation
        d["sigmas"] = self.sigmas
        return d


def _checked(name, acc, theory_value, sigma=TOL_SIGMA, **params):
    """Estimate from an accumulator, passing within ``sigma`` standard errors."""
    se = acc.stderr if acc.count > 1 else 0.0
    tol = sigma * se + ABS_FLOOR
    ok = abs(acc.mean - theory_value) <= tol
    return Estimate(name, acc.mean, se, float(theory_value), tol, bool(ok), params)


@dataclass
class ExperimentReport:
    command: str
    flags: dict
    estimates: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    # Bulk output (e.g. accepted polygons); never serialised.
    payload: object = field(default=None, repr=False)

    @property
    def passed(self):
        return all(e.passed for e in self.estimates) and self.extra.get("passed", True)

    def find(self, name, **params):
        for e in self.estimates:
            if e.name == name and all(e.params.get(k) == v for k, v in params.items()):
                return e
        raise KeyError(f"no estimate {name!r} with {params}")

    def as_dict(self):
        return {
            "command": self.command,
            "flags": self.flags,
            "estimates": [e.as_dict() for e in self.estimates],
            "extra": self.extra,
            "passed": self.passed,
            "wall_time": self.wall_time,
            "version": self.version,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }

    def to_json(self):
        return json.dumps(_jsonable(self.as_dict()), indent=2, sort_keys=True, allow_nan=True)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json() + "\n")

    def summary_lines(self):
        lines = []
        for e in self.estimates:
            rel = e.rel_deviation
            rel_s = "n/a" if rel is None else f"{100 * rel:.3f}%"
            par = " ".join(f"{k}={v}" for k, v in e.params.items())
            lines.append(
                f"{'PASS' if e.passed else 'FAIL'} {e.name} {par}: estimate {e.estimate:.10g} "
                f"+/- {e.stderr:.3g}, theory {e.theory:.10g}, deviation {rel_s}"
            )
        return lines


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, SpaceKind):
        return x.value
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def chunk_plan(count, n, budget=EDGE_BUDGET):
    """``[(stream_id, size), ...]`` covering ``count`` polygons of ``n`` edges."""
    if count < 0:
        raise ValueError("count must be non-negative")
    size = max(1, budget // max(int(n), 1))
    plan = []
    start = 0
    while start < count:
        plan.append((len(plan), min(size, count - start)))
        start += size
    return plan


def run_chunks(task, count, n, seed, workers=1, args=()):
    """Run ``task(seed, stream_id, size, *args)`` over the chunk plan, in order."""
    plan = chunk_plan(count, n)
    jobs = [(seed, sid, size) + tuple(args) for sid, size in plan]
    workers = max(1, int(workers or 1))
    if workers == 1 or len(jobs) <= 1:
        return [task(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(task, *zip(*jobs)))


def _merge(parts):
    total = MomentAccumulator()
    for p in parts:
        total.merge(p)
    return total


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        report = fn(*args, **kwargs)
        report.wall_time = time.perf_counter() - t0
        return report

    return wrapper


# Chunk tasks live at module level so worker processes can unpickle them.

def _chords_task(seed, sid, size, space, n, ks):
    edges = sample_edges(RngStream(seed, sid), space, n, size)
    vals = mean_chord_sq(edges, list(ks), closed=SpaceKind(space).closed)
    return [MomentAccumulator.of(vals[:, j]) for j in range(len(ks))]


@_timed
def verify_chords(space, n, count, seed, ks, workers=1):
    """Mean squared chord over all chords spanning each ``k``."""
    space = SpaceKind.parse(space)
    ks = [int(k) for k in np.atleast_1d(ks)]
    for k in ks:
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in [1, {n}], got {k}")
    parts = run_chunks(_chords_task, count, n, seed, workers, (space.value, n, tuple(ks)))
    report = ExperimentReport(
        "verify-chords",
        {"space": space.value, "n": n, "count": count, "seed": seed, "k": ks, "workers": workers},
    )
    if not space.closed:
        report.extra["open_chord_weighting"] = "uniform over the n-k+1 chords inside the arm"
    for j, k in enumerate(ks):
        acc = _merge(p[j] for p in parts)
        report.estimates.append(
            _checked("mean_chord_sq", acc, theory.expected_chord(space, n, k), k=k)
        )
    return report


def _gyradius_task(seed, sid, size, space, n):
    edges = sample_edges(RngStream(seed, sid), space, n, size)
    return MomentAccumulator.of(gyradius(edges, closed=SpaceKind(space).closed))


@_timed
def verify_gyradius(spaces, ns, count, seed, workers=1):
    """Mean gyradius for every ``(space, n)`` pair.

    Each pair gets its own seed offset so that the ensembles are independent.
    """
    spaces = [SpaceKind.parse(s) for s in np.atleast_1d(spaces)]
    ns = [int(n) for n in np.atleast_1d(ns)]
    report = ExperimentReport(
        "verify-gyradius",
        {"space": [s.value for s in spaces], "n": ns, "count": count, "seed": seed, "workers": workers},
    )
    for i, space in enumerate(spaces):
        for j, n in enumerate(ns):
            sub_seed = (seed + 1_000_003 * (i * len(ns) + j)) % 2**64
            parts = run_chunks(_gyradius_task, count, n, sub_seed, workers, (space.value, n))
            report.estimates.append(
                _checked("gyradius", _merge(parts), theory.expected_gyradius(space, n),
                         space=space.value, n=n, seed=sub_seed)
            )
    return report


def _pdf_task(seed, sid, size, space, n):
    # One edge per polygon keeps the histogram counts independent.
    edges = sample_edges(RngStream(seed, sid), space, n, size)
    return np.sqrt(np.einsum("ij,ij->i", edges[:, 0, :], edges[:, 0, :]))


def _beta_frozen(space, n):
    a, b, scale = theory.edgelength_beta_params(space, n)
    return stats.beta(a, b, scale=scale)


@_timed
def verify_pdf(space, n, count, bins, seed, workers=1):
    """Histogram of edgelengths against the closed-form density.

    Bins are equiprobable under the predicted law, so the chi-square test has
    ``count / bins`` expected counts in every cell. ``extra["histogram"]``
    holds one ``(left, right, center, empirical, theory)`` row per bin.
    """
    space = SpaceKind.parse(space)
    if bins < 10:
        raise ValueError("need at least 10 bins")
    if space.equilateral:
        raise theory.UnsupportedSpace("equilateral edgelengths are constant")
    y = np.concatenate(run_chunks(_pdf_task, count, n, seed, workers, (space.value, n)))
    law = _beta_frozen(space, n)
    cuts = law.ppf(np.linspace(0.0, 1.0, bins + 1))
    cuts[0], cuts[-1] = 0.0, theory.edgelength_domain(space)
    observed = np.histogram(y, bins=cuts)[0]
    expected = np.full(bins, y.size / bins)
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    p_value = float(stats.chi2.sf(chi2, bins - 1))
    widths = np.diff(cuts)
    centers = 0.5 * (cuts[:-1] + cuts[1:])
    empirical = observed / (y.size * widths)
    predicted = theory.edgelength_pdf(space, n, centers)
    rows = np.column_stack([cuts[:-1], cuts[1:], centers, empirical, predicted])

    over = int(np.sum(y > theory.edgelength_domain(space)))
    report = ExperimentReport(
        "verify-pdf",
        {"space": space.value, "n": n, "count": count, "bins": bins, "seed": seed, "workers": workers},
        extra={
            "chi2": chi2,
            "dof": bins - 1,
            "p_value": p_value,
            "passed": p_value > 1e-3 and over == 0,
            "samples_beyond_domain": over,
            "max_edgelength": float(y.max()) if y.size else math.nan,
            "histogram_columns": ["left", "right", "center", "empirical_density", "theory_density"],
            "histogram": rows,
        },
    )
    for p in (1, 2):
        report.estimates.append(
            _checked("edge_moment", MomentAccumulator.of(y ** p), theory.edge_moment(space, n, p), p=p)
        )
    return report


def builtin_edge_set(name):
    """Equilateral closed planar 5-gons of side 2/5.

    ``pentagon`` is the regular one. ``irregular5`` fixes three edge
    directions and solves for the two remaining edges so the loop closes.
    """
    s = 2.0 / 5.0
    if name == "pentagon":
        theta = 2.0 * math.pi * np.arange(5) / 5
    elif name == "irregular5":
        first = np.array([0.0, 1.1, 2.5])
        r = -s * np.array([np.cos(first).sum(), np.sin(first).sum()])
        half = np.linalg.norm(r) / 2
        h = math.sqrt(s * s - half * half)
        perp = np.array([-r[1], r[0]]) / np.linalg.norm(r)
        e4 = r / 2 + h * perp
        e5 = r / 2 - h * perp
        theta = np.concatenate([first, [math.atan2(e4[1], e4[0]), math.atan2(e5[1], e5[0])]])
    else:
        raise ValueError(f"unknown builtin edge set {name!r}")
    return EdgeSet(s * np.column_stack([np.cos(theta), np.sin(theta)]))


@_timed
def verify_ese(edge_set, k, label=None):
    """Permutation oracle against the closed forms for one edge set."""
    E = edge_set if isinstance(edge_set, EdgeSet) else EdgeSet(edge_set)
    closed = E.failure_to_close <= 1e-10
    oracle = schord_permutation_oracle(E, k)
    formula = schord_formula(E, E.n, k)
    g_oracle = sgyradius_permutation_oracle(E, closed)
    g_formula = sgyradius_formula(E, E.n, closed)
    report = ExperimentReport(
        "verify-ese",
        {"edge_set": label or "custom", "n": E.n, "k": k},
        extra={"closed": closed, "failure_to_close": E.failure_to_close,
               "edges": E.edges},
    )
    for name, got, want in (("schord", oracle, formula), ("sgyradius", g_oracle, g_formula)):
        tol = EXACT_TOL * max(1.0, abs(want))
        report.estimates.append(
            Estimate(name, got, 0.0, want, tol, abs(got - want) <= tol, {"k": k} if name == "schord" else {})
        )
    return report


def _reject_task(seed, sid, size, space, n, lam):
    edges, st = rejection_edges(RngStream(seed, sid), space, n, lam, size)
    return edges, st.attempted, st.accepted


@_timed
def reject(space, n, lam, count, seed, workers=1, keep_edges=False):
    """Quasi-equilateral ensemble by rejection; acceptance against its estimate."""
    space = SpaceKind.parse(space)
    parts = run_chunks(_reject_task, count, n, seed, workers, (space.value, n, lam))
    attempted = sum(p[1] for p in parts)
    accepted = sum(p[2] for p in parts)
    edges = np.concatenate([p[0] for p in parts]) if parts else np.empty((0, n, space.dim))
    ratio = accepted / attempted if attempted else math.nan
    estimate = theory.acceptance_estimate(space, n, lam)
    per_polygon = np.einsum("mij,mij->mi", edges, edges).mean(axis=1)
    m2 = MomentAccumulator.of(per_polygon)
    report = ExperimentReport(
        "reject",
        {"space": space.value, "n": n, "lambda": lam, "count": count, "seed": seed, "workers": workers},
        extra={
            "attempted": attempted,
            "accepted": accepted,
            "acceptance_ratio": ratio,
            "acceptance_estimate": estimate,
            "passed": abs(ratio - estimate) <= 0.03,
            "second_moment": m2.mean,
            "second_moment_stderr": m2.stderr,
            "second_moment_unconstrained": theory.edge_moment(space, n, 2),
            "second_moment_equilateral": (2.0 / n) ** 2,
            "planar_component": "one of two mirror components" if space is SpaceKind.POL2 else None,
        },
    )
    if keep_edges:
        report.payload = edges
    return report


def _curvature_task(seed, sid, size, n):
    edges = sample_edges(RngStream(seed, sid), SpaceKind.POL3, n, size)
    kappa = total_curvature(edges, closed=True)
    dots = np.einsum("mij,mij->m", edges, np.roll(edges, -1, axis=1))
    return kappa, dots


@_timed
def curvature(n, count, seed, workers=1):
    """Mean total curvature of closed space polygons minus ``n pi / 2``.

    The mean is estimated with a regression control variate: the sum of
    consecutive edge dot products has a known mean and is strongly
    (negatively) correlated with total curvature, which shrinks the standard
    error by about a quarter at no extra sampling cost.
    """
    if n < 3:
        raise ValueError("closed polygons need n >= 3")
    parts = run_chunks(_curvature_task, count, n, seed, workers, (n,))
    kappa = np.concatenate([p[0] for p in parts])
    dots = np.concatenate([p[1] for p in parts])
    m = kappa.size
    mu_dots = n * theory.expected_dot(SpaceKind.POL3, n)
    plain = MomentAccumulator.of(kappa)
    cov = np.cov(kappa, dots) if m > 2 else np.full((2, 2), math.nan)
    beta = cov[0, 1] / cov[1, 1] if m > 2 and cov[1, 1] > 0 else 0.0
    adjusted = kappa - beta * (dots - mu_dots)
    acc = MomentAccumulator.of(adjusted)
    rho = cov[0, 1] / math.sqrt(cov[0, 0] * cov[1, 1]) if m > 2 else math.nan
    base = n * math.pi / 2
    surplus = Estimate(
        "curvature_surplus", acc.mean - base, acc.stderr, math.pi / 4,
        TOL_SIGMA * acc.stderr, bool(abs(acc.mean - base - math.pi / 4) <= TOL_SIGMA * acc.stderr),
        {"n": n},
    )
    report = ExperimentReport(
        "curvature",
        {"n": n, "count": count, "seed": seed, "workers": workers},
        estimates=[surplus],
        extra={
            "exploratory": True,
            "conjectured_total_curvature": theory.conjectured_total_curvature(n),
            "mean_total_curvature": acc.mean,
            "plain_mean_total_curvature": plain.mean,
            "plain_stderr": plain.stderr,
            "control_variate": "sum of consecutive edge dot products",
            "control_variate_mean": mu_dots,
            "control_variate_beta": beta,
            "control_variate_correlation": rho,
        },
    )
    return report


def _project_task(seed, sid, size, n):
    rng = RngStream(seed, sid)
    edges = sample_edges(rng, SpaceKind.POL3, n, size)
    normals = random_unit_vectors(rng, size, 3)
    flat = project_to_plane(edges, normals, closed=True)
    length = np.sqrt(np.einsum("mij,mij->mi", flat, flat)).sum(axis=1)
    g = gyradius(rescale_to_length(flat, 2.0, closed=True), closed=True)
    return MomentAccumulator.of(length), MomentAccumulator.of(g)


@_timed
def project(n, count, seed, workers=1):
    """Project closed space polygons to random planes.

    Mean projected length should be ``pi/2``. After rescaling to length 2 the
    mean gyradius is compared with the closed planar prediction, which it
    is expected to miss: projection does not give the planar measure.
    """
    if n < 3:
        raise ValueError("closed polygons need n >= 3")
    parts = run_chunks(_project_task, count, n, seed, workers, (n,))
    length = _merge(p[0] for p in parts)
    gyr = _merge(p[1] for p in parts)
    planar = theory.expected_gyradius(SpaceKind.POL2, n)
    gap = abs(gyr.mean - planar) / planar
    report = ExperimentReport(
        "project",
        {"n": n, "count": count, "seed": seed, "workers": workers},
        estimates=[_checked("projected_length", length, math.pi / 2, n=n)],
        extra={
            "rescaled_gyradius": gyr.mean,
            "rescaled_gyradius_stderr": gyr.stderr,
            "planar_prediction": planar,
            "relative_gap_to_planar": gap,
            "passed": gap > 0.15,
        },
    )
    return report


def _sample_task(seed, sid, size, space, n):
    return sample_edges(RngStream(seed, sid), space, n, size)


def sample_ensemble(space, n, count, seed, workers=1):
    """``(count, n, dim)`` edges, identical for any worker count."""
    space = SpaceKind.parse(space)
    parts = run_chunks(_sample_task, count, n, seed, workers, (space.value, n))
    if not parts:
        return np.empty((0, n, space.dim))
    return np.concatenate(parts)


def default_workers():
    return max(1, min(os.cpu_count() or 1, 8))
