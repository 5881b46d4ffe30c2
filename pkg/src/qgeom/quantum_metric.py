"""Quantum geometric tensor, Wirtinger components, real metric assembly,
eta coefficients and signature classification.

Conventions
-----------
``Q[mu, nu] = <d_mu psi|d_nu psi>/<psi|psi>
             - <d_mu psi|psi><psi|d_nu psi>/<psi|psi>^2``  (projective)

The raw convention keeps only the first term.  Derivatives are always taken
along real parameters.  A complex coordinate ``Z = x_a + i x_b`` is handled
through ``d_Z = (d_a - i d_b)/2``, so that ``g dZ dZbar = g (dx_a^2 + dx_b^2)``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .charts import check_metric
from .errors import ConfigError, NumericalError
from .state_families import StateFamily, evaluate_state, state_gradient, differentiate_state

__all__ = [
    "HermitianTensor",
    "SignatureTriple",
    "EtaReport",
    "qgt",
    "g_component_wirtinger",
    "assemble_real_metric",
    "eta_coefficients",
    "signature",
    "ZERO_TOL",
]

ZERO_TOL = 1e-9
CONVENTIONS = ("projective", "raw")


@dataclass(frozen=True)
class HermitianTensor:
    matrix: np.ndarray
    convention: str

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def metric(self):
        """Real part, the quantum metric."""
        return self.matrix.real.copy()

    @property
    def berry_curvature(self):
        """``-2 Im Q``."""
        return -2.0 * self.matrix.imag

    def as_pairs(self):
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]


class SignatureTriple(NamedTuple):
    n_plus: int
    n_minus: int
    n_zero: int


@dataclass(frozen=True)
class EtaReport:
    eta: tuple
    residual_12: float
    residual_34: float
    tol: float
    passed: bool

    def as_dict(self):
        return {
            "eta": list(self.eta),
            "residual_12": self.residual_12,
            "residual_34": self.residual_34,
            "tol": self.tol,
            "pass": self.passed,
        }


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    return convention == "projective"


def _norm(psi):
    norm = float(np.vdot(psi, psi).real)
    if not norm > 0:
        raise NumericalError("zero-norm state")
    return norm


def qgt(family: StateFamily, p, scheme=None, convention="projective") -> HermitianTensor:
    """Quantum geometric tensor of ``family`` at ``p`` over its real parameters."""
    projective = _check_convention(convention)
    psi = evaluate_state(family, p, check_bounds=False)
    _norm(psi)
    dpsi = np.ascontiguousarray(state_gradient(family, p, scheme))
    q = kernels.qgt_kernel(psi, dpsi, projective)
    q = 0.5 * (q + q.conj().T)
    if not np.all(np.isfinite(q)):
        raise NumericalError("non-finite quantum geometric tensor")
    return HermitianTensor(q, convention)


def g_component_wirtinger(family: StateFamily, p, pair, c=1.0, scheme=None, convention="projective") -> complex:
    """Diagonal metric component along ``Z = x_a + i c x_b``.

    ``pair = (a, b)`` indexes the real parameters.  The second axis is read
    as ``c`` times the parameter, so its derivative is ``(1/c) d_b``; use
    ``c=1`` for a purely spatial pair and the signal speed for a ``(z, t)``
    pair.  The value is ``Q_ZZ`` of the same form as :func:`qgt`, built from
    ``d_Z psi = (d_a psi - (i/c) d_b psi)/2``.
    """
    projective = _check_convention(convention)
    a, b = pair
    if a == b:
        raise ConfigError("Wirtinger pair needs two distinct axes")
    if not c > 0:
        raise ConfigError("c must be positive")
    psi = evaluate_state(family, p, check_bounds=False)
    norm = _norm(psi)
    da = differentiate_state(family, p, a, scheme)
    db = differentiate_state(family, p, b, scheme)
    dz = 0.5 * (da - 1j * db / c)
    value = np.vdot(dz, dz) / norm
    if projective:
        conn = np.vdot(dz, psi)
        value -= conn * np.conj(conn) / norm**2
    return complex(value)


def assemble_real_metric(g11, g22, c):
    """``diag(g11, g11, g22, -c^2 g22)`` on ``(x, y, z, t)``.

    This is ``g11 (dx^2 + dy^2) + g22 (dz^2 - c^2 dt^2)``.
    """
    if not c > 0:
        raise ConfigError("c must be positive")
    g11, g22 = float(g11), float(g22)
    if not (np.isfinite(g11) and np.isfinite(g22)):
        raise ConfigError("metric coefficients must be finite")
    return np.diag([g11, g11, g22, -(c**2) * g22])


def eta_coefficients(G, c, tol=1e-12) -> EtaReport:
    """Diagonal coefficients of a 4x4 metric on ``(x, y, z, t)``.

    The ``dt^2`` coefficient is divided by ``-c^2`` so that the equalities
    ``eta11 == eta22`` and ``eta33 == eta44`` can be checked directly.
    """
    if not c > 0:
        raise ConfigError("c must be positive")
    G = check_metric(G)
    if G.shape != (4, 4):
        raise ConfigError("eta coefficients need a 4x4 metric")
    off = G - np.diag(np.diag(G))
    if np.max(np.abs(off)) > tol * max(1.0, np.max(np.abs(G))):
        raise ConfigError("metric is not diagonal")
    eta = (float(G[0, 0]), float(G[1, 1]), float(G[2, 2]), float(G[3, 3] / -(c**2)))
    r12 = abs(eta[0] - eta[1])
    r34 = abs(eta[2] - eta[3])
    bound = tol * max(1.0, abs(eta[0]), abs(eta[2]))
    return EtaReport(eta, r12, r34, tol, bool(r12 <= bound and r34 <= bound))


def signature(G, zero_tol=ZERO_TOL) -> SignatureTriple:
    """Inertia ``(n_plus, n_minus, n_zero)`` of a symmetric matrix.

    Eigenvalues within ``zero_tol * max(1, max|lambda|)`` of zero count as
    zero.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ConfigError("signature needs a square matrix")
    if not np.all(np.isfinite(G)):
        raise NumericalError("metric has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.T)) > 1e-10 * scale:
        raise ConfigError("signature needs a symmetric matrix")
    lam = np.linalg.eigvalsh(0.5 * (G + G.T))
    s = max(1.0, float(np.max(np.abs(lam))))
    cut = zero_tol * s
    n_plus = int(np.sum(lam > cut))
    n_minus = int(np.sum(lam < -cut))
    return SignatureTriple(n_plus, n_minus, len(lam) - n_plus - n_minus)
