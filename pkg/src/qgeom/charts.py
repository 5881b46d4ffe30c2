"""Real coordinate charts, line elements and metric pullbacks.

The imaginary time coordinate ``x4 = i c t`` is never formed.  Instead a
chart carries a *twist*: one sign per target axis, applied to the flat (or
any) target metric before pulling back.  ``x4 = c t`` with twist ``-1``
reproduces ``dz^2 - c^2 dt^2`` exactly as ``(dz + i c dt)(dz - i c dt)``
would in formal complex arithmetic.
"""
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError, NumericalError
from .expr_dsl import FamilyDefinition, Parameter, eval_expression, load_family_file
from .finite_diff import DifferentiationScheme, gradient

__all__ = [
    "ChartMap",
    "RankDiagnostic",
    "minkowski_line_element",
    "complexify_pairs",
    "split_pairs",
    "complex_pair_line_element",
    "wick_twisted_line_element",
    "identity_chart",
    "wick_chart",
    "hopf_chart",
    "chart_from_definition",
    "load_chart",
    "compose",
    "jacobian",
    "apply_twist",
    "pullback_metric",
    "rank_diagnostic",
    "check_metric",
    "flat_metric",
    "BUILTIN_CHARTS",
]

DATA_DIR = Path(__file__).parent / "data"

SYMMETRY_TOL = 1e-13


@dataclass(frozen=True)
class ChartMap:
    """A differentiable map from a real parameter box into R^k.

    ``exact_jacobian`` is set for linear maps, which then report constant
    Jacobians instead of finite differences.  ``singular`` lists
    ``(axis, value)`` coordinate singularities where the Jacobian drops rank.
    """

    name: str
    parameters: tuple
    target_dim: int
    fn: Callable = field(repr=False)
    twist: tuple = None
    exact_jacobian: Callable = field(default=None, repr=False)
    singular: tuple = ()

    def __post_init__(self):
        if self.twist is None:
            object.__setattr__(self, "twist", (1,) * self.target_dim)
        if len(self.twist) != self.target_dim or any(s not in (1, -1) for s in self.twist):
            raise ConfigError(f"twist must hold {self.target_dim} entries of +1/-1")
        if self.source_dim > self.target_dim:
            raise ConfigError("chart source dimension exceeds target dimension")

    @property
    def source_dim(self):
        return len(self.parameters)

    @property
    def lower(self):
        return np.array([p.lower for p in self.parameters])

    @property
    def upper(self):
        return np.array([p.upper for p in self.parameters])

    def __call__(self, p):
        p = _as_point(self, p)
        out = np.asarray(self.fn(p), dtype=float).reshape(-1)
        if out.size != self.target_dim or not np.all(np.isfinite(out)):
            raise NumericalError(f"chart {self.name} produced an invalid image at {p.tolist()}")
        return out


def _as_point(chart, p):
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != chart.source_dim:
        raise ConfigError(f"chart {chart.name} expects {chart.source_dim} coordinates, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ConfigError("point coordinates must be finite")
    return p


def check_metric(g, name="metric"):
    """Validate a real symmetric finite matrix and return it as an array."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ConfigError(f"{name} must be square, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise NumericalError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(g))) if g.size else 1.0)
    if np.max(np.abs(g - g.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise ConfigError(f"{name} is not symmetric")
    return g


def flat_metric(dim):
    return np.eye(dim)


# -- line elements -----------------------------------------------------------

def minkowski_line_element(d, c):
    """dx^2 + dy^2 + dz^2 - c^2 dt^2 for ``d = (dx, dy, dz, dt)``.

    ``d`` may also be an ``(N, 4)`` batch, giving an array of N values.
    """
    if not c > 0:
        raise ConfigError("c must be positive")
    d = np.asarray(d, dtype=float)
    if d.shape[-1] != 4 or d.ndim > 2:
        raise ConfigError(f"displacement must be 4-dimensional, got shape {d.shape}")
    out = kernels.minkowski_batch(np.atleast_2d(d), float(c))
    return float(out[0]) if d.ndim == 1 else out


def complexify_pairs(x):
    """(x1, x2, x3, x4) -> (x1 + i x2, x3 + i x4)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ConfigError("complexify_pairs needs 4 real coordinates")
    if not np.all(np.isfinite(x)):
        raise ConfigError("coordinates must be finite")
    z1 = x[..., 0] + 1j * x[..., 1]
    z2 = x[..., 2] + 1j * x[..., 3]
    if x.ndim == 1:
        return complex(z1), complex(z2)
    return z1, z2


def split_pairs(z1, z2):
    """Inverse of :func:`complexify_pairs`."""
    z1, z2 = np.asarray(z1), np.asarray(z2)
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1).astype(float)


def complex_pair_line_element(dz1, dz2, g11=1.0, g22=1.0, twist=(1, 1, 1, 1)):
    """g11 |dZ1|^2 + g22 |dZ2|^2.

    ``twist`` signs multiply the squared real and imaginary parts, so
    ``twist=(1, 1, 1, -1)`` turns ``|dZ2|^2`` into ``Re^2 - Im^2``.
    Scalars or equal-length arrays are accepted.
    """
    scalar = np.ndim(dz1) == 0
    z1 = np.atleast_1d(np.asarray(dz1, dtype=complex))
    z2 = np.atleast_1d(np.asarray(dz2, dtype=complex))
    tw = np.asarray(twist, dtype=float)
    out = kernels.twisted_pair_batch(z1, z2, float(g11), float(g22), tw)
    return float(out[0]) if scalar else out


def wick_twisted_line_element(d, c, g11=1.0, g22=1.0):
    """Line element of ``d = (dx, dy, dz, dt)`` through the Wick-paired chart.

    The displacement is mapped to ``(dx, dy, dz, c dt)``, complexified to
    ``(dZ1, dZ2)`` and contracted with the twisted pair form.  With unit
    coefficients this equals :func:`minkowski_line_element`.
    """
    if not c > 0:
        raise ConfigError("c must be positive")
    d = np.asarray(d, dtype=float)
    if d.shape[-1] != 4 or d.ndim > 2:
        raise ConfigError(f"displacement must be 4-dimensional, got shape {d.shape}")
    mapped = d * np.array([1.0, 1.0, 1.0, c])
    z1, z2 = complexify_pairs(mapped)
    return complex_pair_line_element(z1, z2, g11, g22, twist=(1, 1, 1, -1))


# -- built-in charts ---------------------------------------------------------

def _box(names, lo=-math.inf, hi=math.inf):
    return tuple(Parameter(n, lo, hi) for n in names)


def identity_chart(dim):
    eye = np.eye(dim)
    names = [f"x{k}" for k in range(dim)]
    return ChartMap(f"identity{dim}", _box(names), dim, lambda x: x.copy(), exact_jacobian=lambda x: eye)


def wick_chart(c):
    """(x, y, z, t) -> (x, y, z, c t) with the last target axis twisted."""
    if not c > 0:
        raise ConfigError("c must be positive")
    jac = np.diag([1.0, 1.0, 1.0, float(c)])
    return ChartMap(
        "wick",
        _box(("x", "y", "z", "t")),
        4,
        lambda x: jac @ x,
        twist=(1, 1, 1, -1),
        exact_jacobian=lambda x: jac,
    )


def hopf_chart(r=None):
    """Euler-angle chart of the 3-sphere embedded in R^4.

    ``x1 + i x2 = r cos(theta/2) exp(i (chi + phi)/2)`` and
    ``x3 + i x4 = r sin(theta/2) exp(i (chi - phi)/2)``.  With ``r=None``
    the radius is a leading free coordinate.
    """
    angles = (
        Parameter("theta", 0.0, math.pi),
        Parameter("phi", 0.0, 2 * math.pi, upper_closed=False),
        Parameter("chi", 0.0, 4 * math.pi, upper_closed=False),
    )

    def embed(radius, theta, phi, chi):
        a, b = (chi + phi) / 2, (chi - phi) / 2
        ct, st = math.cos(theta / 2), math.sin(theta / 2)
        return radius * np.array([ct * math.cos(a), ct * math.sin(a), st * math.cos(b), st * math.sin(b)])

    if r is None:
        params = (Parameter("r", 0.0, math.inf),) + angles
        return ChartMap("hopf", params, 4, lambda x: embed(*x), singular=((1, 0.0), (1, math.pi)))
    if not r > 0:
        raise ConfigError("hopf chart radius must be positive")
    r = float(r)
    return ChartMap("hopf", angles, 4, lambda x: embed(r, *x), singular=((0, 0.0), (0, math.pi)))


BUILTIN_CHARTS = {
    "wick": lambda consts: wick_chart(consts.get("c", 1.0)),
    "hopf": lambda consts: hopf_chart(consts.get("r", 1.0)),
    "hopf_free_r": lambda consts: hopf_chart(None),
}


def chart_from_definition(defn: FamilyDefinition, constants=None) -> ChartMap:
    """Compile a ``chart`` file.  Component values must be real."""
    if defn.kind != "chart":
        raise ConfigError(f"{defn.name} is a state family, not a chart")
    merged = {**defn.constants, **(constants or {})}
    fixed = {k: complex(v) for k, v in merged.items()}
    names = defn.parameter_names
    comps = defn.components

    def fn(x):
        bindings = dict(fixed)
        bindings.update(zip(names, (complex(v) for v in x)))
        vals = [eval_expression(c, bindings) for c in comps]
        if any(abs(v.imag) > 1e-12 * max(1.0, abs(v)) for v in vals):
            raise NumericalError(f"chart {defn.name} produced a complex coordinate")
        return np.array([v.real for v in vals])

    return ChartMap(defn.name, defn.parameters, len(comps), fn, twist=defn.twist)


def load_chart(source, constants=None) -> ChartMap:
    source = str(source)
    if source in BUILTIN_CHARTS:
        return BUILTIN_CHARTS[source](dict(constants or {}))
    path = Path(source)
    if not path.exists():
        shipped = DATA_DIR / f"{source}.chart"
        if not shipped.exists():
            raise ConfigError(f"no built-in chart or file named {source!r}")
        path = shipped
    return chart_from_definition(load_family_file(path), constants)


def compose(outer: ChartMap, inner: ChartMap) -> ChartMap:
    """``outer`` after ``inner``; the twist is the outer one."""
    if inner.target_dim != outer.source_dim:
        raise ConfigError("cannot compose: dimension mismatch")
    jac = None
    if inner.exact_jacobian is not None and outer.exact_jacobian is not None:
        jac = lambda x: outer.exact_jacobian(inner.fn(x)) @ inner.exact_jacobian(x)  # noqa: E731
    return ChartMap(
        f"{outer.name}.{inner.name}",
        inner.parameters,
        outer.target_dim,
        lambda x: outer.fn(inner.fn(x)),
        twist=outer.twist,
        exact_jacobian=jac,
        singular=inner.singular,
    )


# -- Jacobians and pullbacks -------------------------------------------------

def jacobian(chart: ChartMap, p, scheme=None) -> np.ndarray:
    """``J[a, b] = d target_a / d source_b``, shape ``(k, m)``."""
    p = _as_point(chart, p)
    if chart.exact_jacobian is not None:
        return np.array(chart.exact_jacobian(p), dtype=float)
    grad = gradient(lambda x: chart.fn(x), p, scheme, chart.lower, chart.upper)
    jac = np.asarray(grad, dtype=float).T
    if not np.all(np.isfinite(jac)):
        raise NumericalError(f"non-finite Jacobian of {chart.name}")
    return jac


def apply_twist(g, twist):
    """Fold per-axis signs into a target metric.

    Equivalent to ``D g D`` with ``D = diag(1 or i)``: entries between two
    twisted axes change sign, and mixed entries between a twisted and an
    untwisted axis would become imaginary, so they must vanish.
    """
    g = np.asarray(g, dtype=float)
    s = np.asarray(twist, dtype=float)
    twisted = s < 0
    mixed = np.logical_xor.outer(twisted, twisted)
    if np.any(g[mixed] != 0):
        raise ConfigError("metric couples a twisted axis to an untwisted one")
    both = np.logical_and.outer(twisted, twisted)
    return np.where(both, -g, g)


def pullback_metric(target_metric, chart: ChartMap, p, scheme=None) -> np.ndarray:
    """``J^T (twisted target metric) J`` at ``p``, symmetrised.

    ``target_metric`` is a ``(k, k)`` array or a callable of the target
    point returning one.
    """
    p = _as_point(chart, p)
    if callable(target_metric):
        g = target_metric(chart(p))
    else:
        g = target_metric
    g = check_metric(g, "target metric")
    if g.shape[0] != chart.target_dim:
        raise ConfigError(
            f"target metric is {g.shape[0]}x{g.shape[0]} but chart {chart.name} maps into R^{chart.target_dim}"
        )
    jac = jacobian(chart, p, scheme)
    out = jac.T @ apply_twist(g, chart.twist) @ jac
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class RankDiagnostic:
    rank: int
    singular_values: tuple
    deficient: bool


def _one_sided_jacobian(chart: ChartMap, p, h):
    cols = []
    f0 = np.asarray(chart.fn(p), dtype=float)
    for k in range(chart.source_dim):
        sign = 1.0 if p[k] + 2 * h <= chart.upper[k] else -1.0
        e = np.zeros_like(p)
        e[k] = sign * h
        f1 = np.asarray(chart.fn(p + e), dtype=float)
        f2 = np.asarray(chart.fn(p + 2 * e), dtype=float)
        cols.append(sign * (-3 * f0 + 4 * f1 - f2) / (2 * h))
    return np.stack(cols, axis=1)


def rank_diagnostic(chart: ChartMap, p, scheme=None, rtol=1e-8) -> RankDiagnostic:
    """Report whether the chart Jacobian loses rank at ``p``.

    Near coordinate singularities (hopf at theta = 0 or pi) the pulled back
    metric is degenerate; callers check this instead of trusting it.
    """
    p = _as_point(chart, p)
    try:
        jac = jacobian(chart, p, scheme)
    except DomainError:
        # stencil falls off the box at the boundary; use second-order one-sided
        # differences on the offending axes
        jac = _one_sided_jacobian(chart, p, h=1e-5)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(sv > rtol * max(sv[0], 1e-300)))
    return RankDiagnostic(rank, tuple(float(v) for v in sv), rank < chart.source_dim)
