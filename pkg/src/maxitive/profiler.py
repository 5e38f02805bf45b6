"""Profile likelihood by nested numerical maximisation.

For each interest value ``t`` the log-likelihood is maximised over the fiber
``{theta in box : T(theta) = t}``:

* ``Coordinate``: the remaining coordinates are searched inside their box.
* ``LinearCombination``: the fiber is a hyperplane, searched through an
  orthonormal null-space parameterisation ``theta = theta0 + N z``.
* ``GeneralMap``: quadratic penalty ``rho * (T(theta) - t)**2`` with ``rho``
  escalated until the constraint violation drops below ``ctol``.

Each local search is Nelder-Mead from several starts (previous argmax or
box centre plus Latin-hypercube points).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import DimensionError, InfeasibleError, NotNormalizedError, OptimizerFailure, ValidationError
from .plausibility import Axis, GridDensity
from .semiring import MAXITIVE

__all__ = [
    "LikelihoodModel",
    "Coordinate",
    "LinearCombination",
    "GeneralMap",
    "ProfileOptions",
    "ProfileCurve",
    "profile",
    "profile_to_grid",
    "grid_profile_oracle",
]


@dataclass(frozen=True, eq=False)
class LikelihoodModel:
    """Log-likelihood over a bounded parameter box.

    ``loglik(theta)`` may return ``-inf`` (zero likelihood).  ``loglik_batch``
    is an optional vectorised version taking an ``(N, n)`` array; it only
    speeds up dense-grid evaluation.  ``oracle(interest, t_grid)`` optionally
    returns the closed-form relative log profile.
    """

    name: str
    bounds: np.ndarray
    loglik: object
    loglik_batch: object = None
    oracle: object = None
    param_names: tuple = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        bounds = np.array(self.bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2 or bounds.shape[0] < 1:
            raise ValidationError("bounds must be an (n, 2) array")
        if not np.all(bounds[:, 0] < bounds[:, 1]) or not np.all(np.isfinite(bounds)):
            raise ValidationError("bounds need finite lower < upper on every axis")
        bounds.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)
        names = self.param_names or tuple(f"theta_{i + 1}" for i in range(len(bounds)))
        if len(names) != len(bounds):
            raise ValidationError("param_names must match the model dimension")
        object.__setattr__(self, "param_names", tuple(names))

    @property
    def dim(self):
        return self.bounds.shape[0]

    def in_box(self, theta, slack=0.0):
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta >= self.bounds[:, 0] - slack) and np.all(theta <= self.bounds[:, 1] + slack))

    def evaluate(self, theta):
        """Log-likelihood, with NaN and out-of-box points mapped to ``-inf``."""
        theta = np.asarray(theta, dtype=float)
        if not self.in_box(theta):
            return -math.inf
        v = float(self.loglik(theta))
        return -math.inf if math.isnan(v) else v

    def evaluate_batch(self, points):
        points = np.asarray(points, dtype=float)
        if self.loglik_batch is not None:
            out = np.asarray(self.loglik_batch(points), dtype=float)
        else:
            out = np.array([float(self.loglik(p)) for p in points])
        out = np.where(np.isnan(out), -np.inf, out)
        inside = np.all((points >= self.bounds[:, 0]) & (points <= self.bounds[:, 1]), axis=1)
        return np.where(inside, out, -np.inf)


@dataclass(frozen=True)
class Coordinate:
    index: int

    def check(self, n):
        if not 0 <= self.index < n:
            raise DimensionError(f"coordinate {self.index} out of range for dimension {n}")

    def values(self, points):
        return np.asarray(points, dtype=float)[:, self.index]

    def __call__(self, theta):
        return float(np.asarray(theta, dtype=float)[self.index])


@dataclass(frozen=True, eq=False)
class LinearCombination:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float).ravel()
        if not np.any(c != 0) or not np.all(np.isfinite(c)):
            raise ValidationError("coefficient vector must be finite and nonzero")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def check(self, n):
        if self.coefficients.size != n:
            raise DimensionError(f"{self.coefficients.size} coefficients for dimension {n}")

    def values(self, points):
        return np.asarray(points, dtype=float) @ self.coefficients

    def __call__(self, theta):
        return float(np.dot(self.coefficients, np.asarray(theta, dtype=float)))


@dataclass(frozen=True, eq=False)
class GeneralMap:
    """Scalar interest function ``fn(theta) -> float``.

    ``batch`` optionally evaluates an ``(N, n)`` array at once.
    """

    fn: object
    name: str = "map"
    batch: object = None

    def check(self, n):
        pass

    def values(self, points):
        points = np.asarray(points, dtype=float)
        if self.batch is not None:
            return np.asarray(self.batch(points), dtype=float)
        return np.array([float(self.fn(p)) for p in points])

    def __call__(self, theta):
        return float(self.fn(np.asarray(theta, dtype=float)))


@dataclass(frozen=True)
class ProfileOptions:
    """Optimizer settings.

    ``warm_start=True`` (default) runs the grid sequentially, seeding each
    point from the previous argmax; ``warm_start=False`` makes grid points
    independent so they may run on ``workers`` threads.
    """

    starts: int = 5
    xtol: float = 1e-8
    ftol: float = 1e-10
    ctol: float = 1e-6
    seed: int = 0
    warm_start: bool = True
    workers: int = 1
    maxiter: int = None
    rho_initial: float = 1.0
    rho_factor: float = 10.0
    rho_max: float = 1e8
    simplex_scale: float = 0.1

    def __post_init__(self):
        if int(self.starts) != self.starts or self.starts < 1:
            raise ValidationError("starts must be a positive integer")
        for name in ("xtol", "ftol", "ctol", "rho_initial", "simplex_scale"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if not self.rho_factor > 1 or not self.rho_max >= self.rho_initial:
            raise ValidationError("need rho_factor > 1 and rho_max >= rho_initial")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValidationError("workers must be a positive integer")
        if self.workers > 1 and self.warm_start:
            raise ValidationError("warm starts are sequential; set warm_start=False to use workers")
        if self.maxiter is not None and self.maxiter < 1:
            raise ValidationError("maxiter must be positive")

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(eq=False)
class ProfileCurve:
    """Profile over ``t_grid``; ``log_values`` are relative to the curve maximum."""

    t_grid: np.ndarray
    log_values: np.ndarray
    raw_log_values: np.ndarray
    argmax_points: np.ndarray
    model_name: str = ""
    param_names: tuple = ()
    diagnostics: list = field(default_factory=list)
    normalized: bool = True

    def csv_rows(self):
        header = ["t", "log_profile"] + [f"theta_{i + 1}" for i in range(self.argmax_points.shape[1])]
        rows = [
            [float(t), float(v)] + [float(x) for x in theta]
            for t, v, theta in zip(self.t_grid, self.log_values, self.argmax_points)
        ]
        return header, rows

    def peak_index(self):
        return int(np.argmax(self.log_values))


@dataclass
class _Solution:
    value: float
    theta: np.ndarray
    converged: bool
    nfev: int
    violation: float = 0.0


def _nelder_mead(objective, x0, step, opts, bounds=None):
    x0 = np.asarray(x0, dtype=float)
    d = x0.size
    simplex = [x0]
    for i in range(d):
        v = x0.copy()
        s = step[i]
        if bounds is not None and v[i] + s > bounds[i][1]:
            s = -s
        v[i] += s
        simplex.append(v)
    maxiter = opts.maxiter or 2000 * (d + 1)
    # rejected points score +inf, so scipy's spread test may compute inf - inf
    with np.errstate(invalid="ignore"):
        return minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": opts.xtol,
                "fatol": opts.ftol,
                "maxiter": maxiter,
                "maxfev": 2 * maxiter,
                "initial_simplex": np.array(simplex),
            },
        )


def _lhs(dim, count, rng):
    if count <= 0 or dim == 0:
        return np.empty((max(count, 0), dim))
    return qmc.LatinHypercube(d=dim, seed=rng).random(count)


def _finite_or_inf(v):
    return v if math.isfinite(v) else math.inf


class _Fiber:
    """Search problem for one interest value ``t``."""

    def __init__(self, model, interest, t, opts):
        self.model = model
        self.interest = interest
        self.t = float(t)
        self.opts = opts
        lo, hi = model.bounds[:, 0], model.bounds[:, 1]
        self.lo, self.hi = lo, hi
        if isinstance(interest, Coordinate):
            self.kind = "coordinate"
            i = interest.index
            if not lo[i] <= self.t <= hi[i]:
                raise InfeasibleError(f"t={self.t} outside the box [{lo[i]}, {hi[i]}] of coordinate {i}")
            self.nuisance = [k for k in range(model.dim) if k != i]
        elif isinstance(interest, LinearCombination):
            self.kind = "linear"
            c = interest.coefficients
            corner_lo = np.where(c > 0, lo, hi)
            corner_hi = np.where(c > 0, hi, lo)
            tmin, tmax = float(c @ corner_lo), float(c @ corner_hi)
            if not tmin <= self.t <= tmax:
                raise InfeasibleError(f"t={self.t} outside the attainable range [{tmin}, {tmax}]")
            s = 0.0 if tmax == tmin else (self.t - tmin) / (tmax - tmin)
            anchor = corner_lo + s * (corner_hi - corner_lo)
            cc = float(c @ c)
            self.theta0 = c * self.t / cc
            # rows of vt beyond the first span the orthogonal complement of c
            _, _, vt = np.linalg.svd(c[None, :])
            self.basis = vt[1:].T
            centre = self._project((lo + hi) / 2)
            self.anchor = self._pull_inside(anchor, centre)
        else:
            self.kind = "penalty"

    # linear-fiber helpers
    def _project(self, theta):
        c = self.interest.coefficients
        return theta - c * (float(c @ theta) - self.t) / float(c @ c)

    def _pull_inside(self, anchor, theta):
        """Furthest point from ``anchor`` towards ``theta`` that stays in the box."""
        d = theta - anchor
        s = 1.0
        for k in range(d.size):
            if d[k] > 0:
                s = min(s, (self.hi[k] - anchor[k]) / d[k])
            elif d[k] < 0:
                s = min(s, (self.lo[k] - anchor[k]) / d[k])
        s = max(s, 0.0)
        return np.clip(anchor + s * d, self.lo, self.hi)

    def embed(self, x):
        if self.kind == "coordinate":
            theta = np.empty(self.model.dim)
            theta[self.interest.index] = self.t
            theta[self.nuisance] = x
            return theta
        if self.kind == "linear":
            return self.theta0 + self.basis @ x
        return np.asarray(x, dtype=float)

    def search_dim(self):
        if self.kind == "coordinate":
            return len(self.nuisance)
        if self.kind == "linear":
            return self.model.dim - 1
        return self.model.dim

    def to_search(self, theta):
        """Search-space start corresponding to a parameter point."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "coordinate":
            return np.clip(theta[self.nuisance], self.lo[self.nuisance], self.hi[self.nuisance])
        if self.kind == "linear":
            p = self._pull_inside(self.anchor, self._project(theta))
            return self.basis.T @ (p - self.theta0)
        return np.clip(theta, self.lo, self.hi)

    def starts(self, warm, rng):
        """Warm start (or box centre) followed by Latin-hypercube box points."""
        first = warm if warm is not None else (self.lo + self.hi) / 2
        unit = _lhs(self.model.dim, self.opts.starts - 1, rng)
        pts = [first] + [self.lo + u * (self.hi - self.lo) for u in unit]
        return [self.to_search(p) for p in pts]

    def steps(self):
        width = self.hi - self.lo
        if self.kind == "coordinate":
            return self.opts.simplex_scale * width[self.nuisance]
        if self.kind == "linear":
            return np.full(self.model.dim - 1, self.opts.simplex_scale * float(width.min()))
        return self.opts.simplex_scale * width

    def solve_from(self, x0):
        model = self.model
        if self.search_dim() == 0:
            theta = self.embed(np.empty(0))
            return _Solution(model.evaluate(theta), theta, True, 1)
        if self.kind in ("coordinate", "linear"):
            bounds = None
            if self.kind == "coordinate":
                bounds = list(zip(self.lo[self.nuisance], self.hi[self.nuisance]))

            def objective(x):
                return _finite_or_inf(-model.evaluate(self.embed(x)))

            res = _nelder_mead(objective, x0, self.steps(), self.opts, bounds)
            theta = self.embed(res.x)
            value = model.evaluate(theta)
            ok = bool(res.success) and math.isfinite(value)
            return _Solution(value, theta, ok, int(res.nfev))
        return self._solve_penalty(x0)

    def _solve_penalty(self, x0):
        model, opts, T, t = self.model, self.opts, self.interest, self.t
        bounds = list(zip(self.lo, self.hi))
        rho = opts.rho_initial
        x = np.asarray(x0, dtype=float)
        nfev = 0
        converged = False
        while True:

            def objective(z, rho=rho):
                v = model.evaluate(z)
                if not math.isfinite(v):
                    return math.inf
                return -v + rho * (T(z) - t) ** 2

            step = self.steps() if rho == opts.rho_initial else self.steps() * 1e-3
            res = _nelder_mead(objective, x, step, opts, bounds)
            nfev += int(res.nfev)
            x = np.clip(res.x, self.lo, self.hi)
            violation = abs(T(x) - t)
            if violation <= opts.ctol:
                converged = bool(res.success)
                break
            if rho * opts.rho_factor > opts.rho_max * (1 + 1e-12):
                break
            rho *= opts.rho_factor
        value = model.evaluate(x)
        return _Solution(value, x, converged and math.isfinite(value), nfev, violation)


def _solve_point(model, interest, t, opts, warm, seed_key):
    fiber = _Fiber(model, interest, t, opts)
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    sols = [fiber.solve_from(x0) for x0 in fiber.starts(warm, rng)]
    good = [s for s in sols if s.converged and s.violation <= opts.ctol]
    diag = {
        "t": float(t),
        "starts": len(sols),
        "converged": len(good),
        "values": [float(s.value) for s in sols],
        "nfev": sum(s.nfev for s in sols),
    }
    if not good:
        raise OptimizerFailure(f"no optimizer start converged at t={t}", diag)
    best = good[0]
    for s in good[1:]:
        if s.value > best.value:
            best = s
    vals = [s.value for s in good]
    diag["dispersion"] = float(max(vals) - min(vals))
    diag["violation"] = float(abs(interest(best.theta) - t))
    return best, diag


def profile(model, interest, t_grid, opts=None):
    """Profile log-likelihood of ``model`` for ``interest`` over ``t_grid``.

    Raises :class:`InfeasibleError` when a fiber misses the box and
    :class:`OptimizerFailure` when every start fails at some grid point.
    """
    opts = opts or ProfileOptions()
    interest.check(model.dim)
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size == 0:
        raise ValidationError("t_grid is empty")
    if np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be strictly increasing")
    keys = [(int(opts.seed), k) for k in range(t_grid.size)]
    if opts.warm_start:
        results = []
        warm = None
        for t, key in zip(t_grid, keys):
            best, diag = _solve_point(model, interest, t, opts, warm, key)
            results.append((best, diag))
            warm = best.theta
    elif opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            futures = [
                pool.submit(_solve_point, model, interest, t, opts, None, key) for t, key in zip(t_grid, keys)
            ]
            results = [f.result() for f in futures]
    else:
        results = [_solve_point(model, interest, t, opts, None, key) for t, key in zip(t_grid, keys)]
    raw = np.array([b.value for b, _ in results])
    thetas = np.array([b.theta for b, _ in results])
    return ProfileCurve(
        t_grid=t_grid,
        log_values=raw - raw.max(),
        raw_log_values=raw,
        argmax_points=thetas,
        model_name=model.name,
        param_names=model.param_names,
        diagnostics=[d for _, d in results],
    )


def profile_to_grid(curve):
    """Exponentiate a normalized curve into a 1-d maxitive grid density.

    The t grid must be uniformly spaced.
    """
    if not curve.normalized:
        raise NotNormalizedError("profile curve is not normalized")
    t = np.asarray(curve.t_grid, dtype=float)
    if t.size < 2:
        raise ValidationError("need at least two grid points")
    step = (t[-1] - t[0]) / (t.size - 1)
    if not np.allclose(np.diff(t), step, rtol=1e-9, atol=0):
        raise ValidationError("t grid must be uniformly spaced to form a grid density")
    return GridDensity((Axis(t[0], t[-1], t.size),), np.exp(curve.log_values), MAXITIVE, True)


def grid_profile_oracle(model, interest, t_grid, resolution, bin_halfwidth=None):
    """Brute-force profile: max of the log-likelihood over dense-grid nodes per t bin.

    For a ``Coordinate`` interest the interest axis is tabulated at the t
    values themselves, so each bin is an exact slice of the fiber.  Otherwise
    nodes are binned to the nearest t value and kept when within
    ``bin_halfwidth`` of it.  The default is half the t spacing, narrowed for a
    ``LinearCombination`` to half the largest change of ``T`` between adjacent
    nodes, which still leaves every fiber line a node per grid column.  Bins
    with no node get ``-inf``.
    """
    n = model.dim
    if n > 3:
        raise DimensionError("grid oracle supports at most three parameters")
    interest.check(n)
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size < 2 and not isinstance(interest, Coordinate):
        raise ValidationError("need at least two t values to form bins")
    axes_nodes = [np.linspace(lo, hi, int(resolution)) for lo, hi in model.bounds]
    if isinstance(interest, Coordinate):
        axes_nodes[interest.index] = t_grid
    mesh = np.meshgrid(*axes_nodes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    ll = model.evaluate_batch(points)
    if isinstance(interest, Coordinate):
        # exact slices: node k along the interest axis belongs to t_grid[k]
        bins = np.indices(mesh[0].shape)[interest.index].ravel()
        keep = np.ones(bins.size, dtype=bool)
    else:
        tv = interest.values(points)
        mids = (t_grid[1:] + t_grid[:-1]) / 2
        bins = np.searchsorted(mids, tv)
        gaps = np.diff(t_grid)
        if bin_halfwidth is None and isinstance(interest, LinearCombination):
            spacing = (model.bounds[:, 1] - model.bounds[:, 0]) / (int(resolution) - 1)
            lattice = float(np.max(np.abs(interest.coefficients) * spacing)) / 2
            bin_halfwidth = min(lattice, float(gaps.min()) / 2)
        if bin_halfwidth is None:
            keep = (tv >= t_grid[0] - gaps[0] / 2) & (tv <= t_grid[-1] + gaps[-1] / 2)
        else:
            keep = np.abs(tv - t_grid[bins]) <= float(bin_halfwidth)
    raw = np.full(t_grid.size, -np.inf)
    arg = np.full((t_grid.size, n), np.nan)
    order = np.nonzero(keep)[0]
    np.maximum.at(raw, bins[order], ll[order])
    for k in range(t_grid.size):
        sel = order[bins[order] == k]
        if sel.size and np.isfinite(raw[k]):
            arg[k] = points[sel[np.argmax(ll[sel])]]
    if not np.any(np.isfinite(raw)):
        raise OptimizerFailure("dense grid found no finite log-likelihood in any bin")
    return ProfileCurve(
        t_grid=t_grid,
        log_values=raw - raw.max(),
        raw_log_values=raw,
        argmax_points=arg,
        model_name=model.name,
        param_names=model.param_names,
        diagnostics=[{"oracle": "grid", "resolution": int(resolution)}],
    )
