"""Numerical Christoffel symbols, Riemann tensor and flatness scans."""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .charts import check_metric, hopf_chart, pullback_metric, wick_chart
from .errors import ConfigError, NumericalError
from .expr_dsl import Parameter
from .finite_diff import DifferentiationScheme, gradient
from .quantum_metric import assemble_real_metric, qgt

__all__ = [
    "MetricField",
    "CurvatureReport",
    "constant_field",
    "assembled_field",
    "sphere2_field",
    "polar_plane_field",
    "pullback_field",
    "quantum_metric_field",
    "builtin_field",
    "BUILTIN_FIELDS",
    "inverse_metric",
    "christoffel",
    "riemann",
    "flatness_scan",
    "DEFAULT_SCHEME",
    "SINGULAR_BAND",
]

DEFAULT_SCHEME = DifferentiationScheme("central-4", h=1e-3)
# outer derivative of Gamma uses this multiple of the inner step
OUTER_FACTOR = 1.0
SINGULAR_BAND = 1e-2
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class MetricField:
    """Point -> symmetric metric on a parameter box.

    ``margin`` is how far ``fn`` itself differentiates around a point (for
    pullbacks and quantum metrics), added to the curvature stencil reach when
    sampling.  ``singular`` holds ``(axis, value)`` coordinate singularities.
    """

    name: str
    parameters: tuple
    fn: Callable = field(repr=False)
    singular: tuple = ()
    margin: float = 0.0

    @property
    def dim(self):
        return len(self.parameters)

    @property
    def lower(self):
        return np.array([p.lower for p in self.parameters])

    @property
    def upper(self):
        return np.array([p.upper for p in self.parameters])

    def __call__(self, p):
        p = np.asarray(p, dtype=float).reshape(-1)
        if p.size != self.dim:
            raise ConfigError(f"field {self.name} expects {self.dim} coordinates, got {p.size}")
        g = check_metric(self.fn(p), f"metric of {self.name}")
        if g.shape != (self.dim, self.dim):
            raise NumericalError(f"field {self.name} returned shape {g.shape}")
        return g


def _box(names, lo, hi):
    return tuple(Parameter(n, lo, hi) for n in names)


def constant_field(G, name="constant", half_width=1.0):
    G = check_metric(G)
    G = G.copy()
    G.setflags(write=False)
    names = [f"x{k}" for k in range(G.shape[0])]
    return MetricField(name, _box(names, -half_width, half_width), lambda x: G)


def assembled_field(g11, g22, c):
    return constant_field(assemble_real_metric(g11, g22, c), name=f"assembled({g11},{g22},{c})")


def sphere2_field(radius=1.0):
    r2 = float(radius) ** 2
    params = (Parameter("theta", 0.0, math.pi), Parameter("phi", 0.0, 2 * math.pi))
    return MetricField(
        "sphere2",
        params,
        lambda x: np.diag([r2, r2 * math.sin(x[0]) ** 2]),
        singular=((0, 0.0), (0, math.pi)),
    )


def polar_plane_field():
    params = (Parameter("rho", 0.0, 10.0), Parameter("phi", 0.0, 2 * math.pi))
    return MetricField("polar_plane", params, lambda x: np.diag([1.0, x[0] ** 2]), singular=((0, 0.0),))


def pullback_field(chart, target_metric=None, scheme=None):
    """Metric induced on ``chart``'s source by ``target_metric`` (flat by default)."""
    target = np.eye(chart.target_dim) if target_metric is None else target_metric
    scheme = scheme or DifferentiationScheme()
    reach = max(scheme.reach(k, _finite_extent(p)) for k, p in enumerate(chart.parameters))
    return MetricField(
        f"pullback[{chart.name}]",
        chart.parameters,
        lambda x: pullback_metric(target, chart, x, scheme),
        singular=chart.singular,
        margin=0.0 if chart.exact_jacobian is not None else reach,
    )


def quantum_metric_field(family, convention="projective", scheme=None):
    """Real part of the quantum geometric tensor as a metric field."""
    scheme = scheme or DifferentiationScheme()
    reach = max(scheme.reach(k, _finite_extent(p)) for k, p in enumerate(family.parameters))
    singular = ()
    if family.parameter_names[:1] == ("theta",):
        singular = ((0, 0.0), (0, math.pi))
    return MetricField(
        f"qmetric[{family.name}]",
        family.parameters,
        lambda x: qgt(family, x, scheme, convention).metric,
        singular=singular,
        margin=reach,
    )


def _finite_extent(par):
    vals = [abs(v) for v in (par.lower, par.upper) if math.isfinite(v)]
    return max(vals, default=1.0)


BUILTIN_FIELDS = {
    "sphere2": lambda: sphere2_field(1.0),
    "polar_plane": polar_plane_field,
    "s3_hopf": lambda: pullback_field(hopf_chart(1.0)),
    "minkowski": lambda: assembled_field(1.0, 1.0, 1.0),
    "wick": lambda: pullback_field(wick_chart(1.0)),
}


def builtin_field(name):
    try:
        return BUILTIN_FIELDS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown metric field {name!r}; built-ins are {', '.join(sorted(BUILTIN_FIELDS))}"
        ) from None


# -- tensors -----------------------------------------------------------------

def inverse_metric(g):
    """Inverse through a symmetric eigendecomposition.

    A (near) degenerate metric raises instead of falling back to a
    pseudo-inverse.
    """
    lam, vec = np.linalg.eigh(g)
    big = np.max(np.abs(lam))
    if big == 0 or np.min(np.abs(lam)) < DEGENERACY_RTOL * big:
        raise NumericalError(f"degenerate metric (eigenvalues {lam.tolist()})")
    return (vec / lam) @ vec.T


def christoffel(field: MetricField, p, scheme=None) -> np.ndarray:
    """``Gamma[a, b, c]`` = Gamma^a_{bc} at ``p``."""
    scheme = scheme or DEFAULT_SCHEME
    p = np.asarray(p, dtype=float)
    ginv = inverse_metric(field(p))
    dg = gradient(field, p, scheme, field.lower, field.upper)
    return kernels.christoffel_kernel(np.ascontiguousarray(ginv), np.ascontiguousarray(dg))


def _outer_scheme(scheme, p):
    steps = {k: OUTER_FACTOR * scheme.step(k, x) for k, x in enumerate(p)}
    return DifferentiationScheme(scheme.kind, overrides=steps, levels=scheme.levels)


def riemann(field: MetricField, p, scheme=None):
    """``(R, scalar)`` with ``R[a, b, c, d]`` = R^a_{bcd}.

    ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}``
    and ``scalar = g^{bd} R^a_{bad}``.  The derivative of Gamma uses the same
    stencil as the metric derivative.
    """
    scheme = scheme or DEFAULT_SCHEME
    p = np.asarray(p, dtype=float)
    ginv = inverse_metric(field(p))
    gamma = christoffel(field, p, scheme)
    dgamma = gradient(lambda x: christoffel(field, x, scheme), p, _outer_scheme(scheme, p), field.lower, field.upper)
    riem = kernels.riemann_kernel(gamma, np.ascontiguousarray(dgamma))
    scalar = kernels.scalar_curvature_kernel(np.ascontiguousarray(ginv), riem)
    return riem, float(scalar)


@dataclass
class CurvatureReport:
    field: str
    points: list
    max_abs_riemann: list
    scalar_curvature: list
    global_max: float
    tol: float
    flat: bool
    seed: int
    scheme: dict

    def as_dict(self):
        return {
            "field": self.field,
            "seed": self.seed,
            "tol": self.tol,
            "scheme": self.scheme,
            "global_max_abs_riemann": self.global_max,
            "flat": self.flat,
            "points": [
                {"index": k, "point": list(p), "max_abs_riemann": m, "scalar_curvature": s}
                for k, (p, m, s) in enumerate(zip(self.points, self.max_abs_riemann, self.scalar_curvature))
            ],
        }


def _sample_points(field, n_points, seed, reach):
    lo = np.where(np.isfinite(field.lower), field.lower, -1.0) + reach
    hi = np.where(np.isfinite(field.upper), field.upper, 1.0) - reach
    if np.any(hi <= lo):
        raise ConfigError(f"empty sampling region for {field.name}")
    rng = np.random.default_rng(seed)
    points = []
    tries = 0
    while len(points) < n_points:
        tries += 1
        if tries > 1000 * n_points:
            raise ConfigError(f"empty sampling region for {field.name} after singular-band exclusion")
        x = rng.uniform(lo, hi)
        if any(abs(x[axis] - value) < SINGULAR_BAND + reach[axis] for axis, value in field.singular):
            continue
        points.append(x)
    return points


def flatness_scan(field: MetricField, n_points=50, tol=1e-6, seed=0, scheme=None) -> CurvatureReport:
    """Riemann tensor at ``n_points`` seeded uniform interior points.

    The field is flat when every sampled component stays below ``tol``.
    """
    if n_points < 1:
        raise ConfigError("n_points must be >= 1")
    if not tol > 0:
        raise ConfigError("tol must be positive")
    scheme = scheme or DEFAULT_SCHEME
    # stencil reach of the outer and inner derivatives plus the field's own
    extent = np.array([_finite_extent(p) for p in field.parameters])
    reach = np.array(
        [
            (OUTER_FACTOR + 1) * scheme.reach(k, extent[k]) + field.margin + 1e-9
            for k in range(field.dim)
        ]
    )
    points = _sample_points(field, n_points, seed, reach)
    maxima, scalars = [], []
    for x in points:
        riem, scalar = riemann(field, x, scheme)
        maxima.append(float(np.max(np.abs(riem))))
        scalars.append(scalar)
    gmax = max(maxima)
    return CurvatureReport(
        field=field.name,
        points=[[float(v) for v in x] for x in points],
        max_abs_riemann=maxima,
        scalar_curvature=scalars,
        global_max=gmax,
        tol=tol,
        flat=bool(gmax < tol),
        seed=seed,
        scheme={**scheme.as_dict(), "outer_factor": OUTER_FACTOR},
    )
