"""Central finite-difference stencils with bound-aware step control."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

__all__ = ["DifferentiationScheme", "partial", "gradient", "default_step"]

_KINDS = ("central-2", "central-4", "richardson")


def default_step(x):
    return 1e-3 * max(1.0, abs(x))


@dataclass(frozen=True)
class DifferentiationScheme:
    """How to take a numerical derivative.

    Parameters
    ----------
    kind : {"central-2", "central-4", "richardson"}
    h : float or None
        Base step.  ``None`` means ``1e-3 * max(1, |x|)`` at the evaluation
        coordinate.
    overrides : dict
        Per-axis steps, taking precedence over ``h``.
    levels : int
        Number of halvings used by the Richardson table (``kind="richardson"``).
    """

    kind: str = "central-4"
    h: float | None = None
    overrides: dict = field(default_factory=dict)
    levels: int = 3

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown differentiation scheme {self.kind!r}")
        if self.h is not None and not self.h > 0:
            raise ConfigError("step h must be positive")
        if any(not v > 0 for v in self.overrides.values()):
            raise ConfigError("per-axis steps must be positive")
        if self.kind == "richardson" and self.levels < 2:
            raise ConfigError("richardson needs at least 2 levels")

    @property
    def order(self):
        return {"central-2": 2, "central-4": 4, "richardson": 2 * self.levels}[self.kind]

    @property
    def width(self):
        """Stencil reach in units of the base step."""
        return 2 if self.kind == "central-4" else 1

    def step(self, axis, x):
        if axis in self.overrides:
            return float(self.overrides[axis])
        if self.h is not None:
            return float(self.h)
        return default_step(x)

    def scaled(self, factor):
        """Same scheme with every explicit step multiplied by ``factor``."""
        return DifferentiationScheme(
            kind=self.kind,
            h=None if self.h is None else self.h * factor,
            overrides={k: v * factor for k, v in self.overrides.items()},
            levels=self.levels,
        )

    def reach(self, axis, x):
        return self.width * self.step(axis, x)

    def as_dict(self):
        return {
            "kind": self.kind,
            "h": self.h,
            "order": self.order,
            "overrides": {str(k): v for k, v in sorted(self.overrides.items())},
            "levels": self.levels,
        }


def _central(f, x, axis, h, kind):
    e = np.zeros_like(x)
    e[axis] = h
    if kind == "central-2":
        return (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h)
    fp1, fm1 = np.asarray(f(x + e)), np.asarray(f(x - e))
    fp2, fm2 = np.asarray(f(x + 2 * e)), np.asarray(f(x - 2 * e))
    return (8 * (fp1 - fm1) - (fp2 - fm2)) / (12 * h)


def partial(f, x, axis, scheme=None, lower=None, upper=None):
    """Numerical ``df/dx[axis]`` of an array-valued ``f`` at ``x``.

    ``lower``/``upper`` are the domain bounds; a stencil that would leave
    them raises :class:`DomainError` instead of silently degrading.
    """
    scheme = scheme or DifferentiationScheme()
    x = np.asarray(x, dtype=float)
    if not 0 <= axis < x.size:
        raise DomainError(f"axis {axis} out of range for a {x.size}-dimensional point")
    h = scheme.step(axis, x[axis])
    reach = scheme.width * h
    if lower is not None and x[axis] - reach < lower[axis]:
        raise DomainError(
            f"stencil along axis {axis} reaches {float(x[axis] - reach)!r}, below bound {float(lower[axis])!r}"
        )
    if upper is not None and x[axis] + reach > upper[axis]:
        raise DomainError(
            f"stencil along axis {axis} reaches {float(x[axis] + reach)!r}, above bound {float(upper[axis])!r}"
        )
    if scheme.kind != "richardson":
        return _central(f, x, axis, h, scheme.kind)

    # Richardson table on central-2; the base (largest) step sets the reach.
    table = [_central(f, x, axis, h / 2**k, "central-2") for k in range(scheme.levels)]
    for j in range(1, scheme.levels):
        factor = 4.0**j
        table = [(factor * table[k + 1] - table[k]) / (factor - 1) for k in range(len(table) - 1)]
    return table[0]


def gradient(f, x, scheme=None, lower=None, upper=None):
    """Stack of partials, shape ``(len(x),) + f(x).shape``."""
    x = np.asarray(x, dtype=float)
    return np.stack([partial(f, x, k, scheme, lower, upper) for k in range(x.size)])
