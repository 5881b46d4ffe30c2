"""Parametrised families of (unnormalised) state vectors."""
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError, NumericalError
from .expr_dsl import FamilyDefinition, Parameter, eval_expression, load_family_file
from .finite_diff import DifferentiationScheme, gradient, partial

__all__ = [
    "StateFamily",
    "DifferentiationScheme",
    "BUILTIN_FAMILIES",
    "builtin_family",
    "family_from_definition",
    "load_family",
    "evaluate_state",
    "differentiate_state",
    "state_gradient",
    "inner_product",
    "with_phase",
    "scaled",
]

DATA_DIR = Path(__file__).parent / "data"

_INF = math.inf


@dataclass(frozen=True)
class StateFamily:
    """A smooth map from a real parameter box to C^n.

    ``fn`` takes a float array of length ``len(parameters)`` and returns a
    complex array of length ``dim``.
    """

    name: str
    parameters: tuple
    dim: int
    fn: Callable = field(repr=False)
    constants: dict = field(default_factory=dict)

    @property
    def n_params(self):
        return len(self.parameters)

    @property
    def parameter_names(self):
        return tuple(p.name for p in self.parameters)

    @property
    def lower(self):
        return np.array([p.lower for p in self.parameters])

    @property
    def upper(self):
        return np.array([p.upper for p in self.parameters])

    def __call__(self, p):
        return evaluate_state(self, p)


def _as_point(family, p):
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != family.n_params:
        raise ConfigError(
            f"{family.name} expects {family.n_params} coordinates "
            f"({', '.join(family.parameter_names)}), got {p.size}"
        )
    if not np.all(np.isfinite(p)):
        raise ConfigError("point coordinates must be finite")
    return p


def evaluate_state(family: StateFamily, p, check_bounds=True) -> np.ndarray:
    """Amplitudes of ``family`` at ``p``.

    With ``check_bounds`` a point outside the declared parameter box raises
    :class:`DomainError`.
    """
    p = _as_point(family, p)
    if check_bounds:
        for x, par in zip(p, family.parameters):
            if not par.contains(x):
                raise DomainError(f"{par.name}={float(x)!r} outside [{par.lower}, {par.upper}]")
    psi = np.asarray(family.fn(p), dtype=complex).reshape(-1)
    if psi.size != family.dim:
        raise NumericalError(f"{family.name} returned {psi.size} amplitudes, expected {family.dim}")
    if not np.all(np.isfinite(psi)):
        raise NumericalError(f"non-finite amplitude in {family.name} at {p.tolist()}")
    return psi


def _raw(family):
    return lambda x: evaluate_state(family, x, check_bounds=False)


def differentiate_state(family: StateFamily, p, axis: int, scheme=None) -> np.ndarray:
    """Componentwise derivative along one real parameter.

    The stencil must stay inside the parameter box.
    """
    p = _as_point(family, p)
    return partial(_raw(family), p, axis, scheme, family.lower, family.upper)


def state_gradient(family: StateFamily, p, scheme=None) -> np.ndarray:
    """All parameter derivatives, shape ``(n_params, dim)``."""
    p = _as_point(family, p)
    return gradient(_raw(family), p, scheme, family.lower, family.upper)


def inner_product(a, b) -> complex:
    """<a|b>, antilinear in ``a``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ConfigError(f"length mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


# -- built-in families -------------------------------------------------------

_HOPF_PARAMS = (
    Parameter("theta", 0.0, math.pi),
    Parameter("phi", 0.0, 2 * math.pi, upper_closed=False),
    Parameter("chi", 0.0, 4 * math.pi, upper_closed=False),
)


def _hopf(consts, half):
    r = consts["r"]
    if not r > 0:
        raise ConfigError("hopf families need r > 0")
    s = 0.5 if half else 1.0

    def fn(x):
        theta, phi, chi = x
        return r * np.array(
            [
                math.cos(theta / 2) * np.exp(1j * s * (chi + phi)),
                math.sin(theta / 2) * np.exp(1j * s * (chi - phi)),
            ]
        )

    return _HOPF_PARAMS, 2, fn


def _bloch(consts):
    def fn(x):
        theta, phi = x
        return np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])

    params = (Parameter("theta", 0.0, math.pi), Parameter("phi", 0.0, 2 * math.pi, False))
    return params, 2, fn


def _plane_wave(consts):
    k, omega = consts["k"], consts["omega"]

    def fn(x):
        z, t = x
        return np.array([np.exp(1j * (k * z - omega * t))])

    return (Parameter("z", -_INF, _INF), Parameter("t", -_INF, _INF)), 1, fn


def _constant(consts):
    vec = np.asarray(consts["vector"], dtype=complex).reshape(-1)
    if vec.size == 0 or not np.any(vec != 0):
        raise ConfigError("constant_state needs a nonzero vector")
    m = int(consts["dim"])
    if m < 1:
        raise ConfigError("constant_state needs dim >= 1")
    params = tuple(Parameter(f"x{k}", -_INF, _INF) for k in range(m))
    return params, vec.size, lambda x: vec


# name -> (builder, defaults, required)
BUILTIN_FAMILIES = {
    "hopf_s3": (lambda c: _hopf(c, True), {"r": 1.0}, ()),
    "hopf_s3_nohalf": (lambda c: _hopf(c, False), {"r": 1.0}, ()),
    "bloch_cp1": (_bloch, {}, ()),
    "plane_wave": (_plane_wave, {}, ("k", "omega")),
    "constant_state": (_constant, {"vector": (1.0, 0.0), "dim": 2}, ()),
}


def builtin_family(name: str, constants=None) -> StateFamily:
    """One of :data:`BUILTIN_FAMILIES`, with constants overriding defaults."""
    try:
        builder, defaults, required = BUILTIN_FAMILIES[name]
    except KeyError:
        raise ConfigError(
            f"unknown family {name!r}; built-ins are {', '.join(sorted(BUILTIN_FAMILIES))}"
        ) from None
    constants = dict(constants or {})
    unknown = set(constants) - set(defaults) - set(required)
    if unknown:
        raise ConfigError(f"{name} has no constant(s) {', '.join(sorted(unknown))}")
    missing = [c for c in required if c not in constants]
    if missing:
        raise ConfigError(f"{name} requires constant(s) {', '.join(missing)}")
    merged = {**defaults, **constants}
    params, dim, fn = builder(merged)
    return StateFamily(name, params, dim, fn, merged)


def family_from_definition(defn: FamilyDefinition, constants=None) -> StateFamily:
    """Compile a parsed family file into a :class:`StateFamily`."""
    if defn.kind != "family":
        raise ConfigError(f"{defn.name} is a chart file, not a state family")
    constants = dict(constants or {})
    unknown = set(constants) - set(defn.constants)
    if unknown:
        raise ConfigError(f"{defn.name} has no constant(s) {', '.join(sorted(unknown))}")
    merged = {**defn.constants, **constants}
    names = defn.parameter_names
    fixed = {k: complex(v) for k, v in merged.items()}
    comps = defn.components

    def fn(x):
        bindings = dict(fixed)
        bindings.update(zip(names, (complex(v) for v in x)))
        return np.array([eval_expression(c, bindings) for c in comps])

    return StateFamily(defn.name, defn.parameters, len(comps), fn, merged)


def load_family(source, constants=None) -> StateFamily:
    """Built-in name, shipped file name, or path to a family file."""
    source = str(source)
    if source in BUILTIN_FAMILIES:
        return builtin_family(source, constants)
    path = Path(source)
    if not path.exists():
        shipped = DATA_DIR / f"{source}.fam"
        if not shipped.exists():
            raise ConfigError(f"no built-in family or file named {source!r}")
        path = shipped
    return family_from_definition(load_family_file(path), constants)


# -- transformations used by invariance checks -------------------------------

def with_phase(family: StateFamily, alpha: Callable) -> StateFamily:
    """Multiply every state by ``exp(i * alpha(p))`` for real ``alpha``."""
    inner = family.fn
    return replace(
        family, name=f"{family.name}*phase", fn=lambda x: np.exp(1j * alpha(x)) * inner(x)
    )


def scaled(family: StateFamily, factor: complex) -> StateFamily:
    inner = family.fn
    factor = complex(factor)
    if factor == 0:
        raise ConfigError("scale factor must be nonzero")
    return replace(family, name=f"{family.name}*scale", fn=lambda x: factor * inner(x))
