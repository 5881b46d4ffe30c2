"""Independent reference computations for the test-suite.

Nothing here calls the finite-difference or tensor code under test.
"""
import math
import random

import numpy as np

from qgeom.expr_dsl import FUNCTIONS, BinOp, Call, Constant, Neg, Number, Param


def bloch_state(theta, phi):
    return np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])


def bloch_dtheta(theta, phi):
    return np.array([-math.sin(theta / 2) / 2, math.cos(theta / 2) / 2 * np.exp(1j * phi)])


def hopf_embedding(theta, phi, chi, r=1.0):
    a, b = (chi + phi) / 2, (chi - phi) / 2
    return r * np.array(
        [
            math.cos(theta / 2) * math.cos(a),
            math.cos(theta / 2) * math.sin(a),
            math.sin(theta / 2) * math.cos(b),
            math.sin(theta / 2) * math.sin(b),
        ]
    )


def hopf_jacobian(theta, phi, chi, r=1.0):
    """Hand-differentiated Jacobian of :func:`hopf_embedding`, shape (4, 3)."""
    a, b = (chi + phi) / 2, (chi - phi) / 2
    ct, st = math.cos(theta / 2), math.sin(theta / 2)
    return r * np.array(
        [
            [-st / 2 * math.cos(a), -ct / 2 * math.sin(a), -ct / 2 * math.sin(a)],
            [-st / 2 * math.sin(a), ct / 2 * math.cos(a), ct / 2 * math.cos(a)],
            [ct / 2 * math.cos(b), st / 2 * math.sin(b), -st / 2 * math.sin(b)],
            [ct / 2 * math.sin(b), -st / 2 * math.cos(b), st / 2 * math.cos(b)],
        ]
    )


def s3_euler_metric(theta, r=1.0):
    c = math.cos(theta)
    return r**2 / 4 * np.array([[1.0, 0.0, 0.0], [0.0, 1.0, c], [0.0, c, 1.0]])


def _infidelity(state, p, v):
    a = state(*p)
    b = state(*(np.asarray(p) + v))
    overlap = np.vdot(a, b)
    return 1.0 - abs(overlap) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real)


def fidelity_metric(state, p, delta=1e-3):
    """Projective metric from state overlaps only.

    ``1 - F(p, p + v) = v^T g v + O(|v|^3)``; symmetric displacements cancel
    the odd orders and a two-level Richardson step removes the quartic one.
    """
    m = len(p)

    def estimate(d):
        g = np.zeros((m, m))
        for i in range(m):
            e = np.zeros(m)
            e[i] = d
            g[i, i] = (_infidelity(state, p, e) + _infidelity(state, p, -e)) / (2 * d * d)
        for i in range(m):
            for j in range(i + 1, m):
                u = np.zeros(m)
                w = np.zeros(m)
                u[i] = u[j] = d
                w[i], w[j] = d, -d
                s = (
                    _infidelity(state, p, u)
                    + _infidelity(state, p, -u)
                    - _infidelity(state, p, w)
                    - _infidelity(state, p, -w)
                )
                g[i, j] = g[j, i] = s / (8 * d * d)
        return g

    return (4 * estimate(delta / 2) - estimate(delta)) / 3


def plaquette_berry_curvature(state, p, d=1e-3):
    """Berry curvature in the (0, 1) plane from the phase of a loop product."""
    t, f = p[0] - d / 2, p[1] - d / 2
    loop = [(t, f), (t + d, f), (t + d, f + d), (t, f + d)]
    prod = 1.0 + 0j
    for k in range(4):
        prod *= np.vdot(state(*loop[k]), state(*loop[(k + 1) % 4]))
    return -np.angle(prod) / (d * d)


def sphere_christoffel_thth_phiphi(theta):
    """Gamma^theta_{phi phi} on the unit 2-sphere."""
    return -math.sin(theta) * math.cos(theta)


NAMES = ("a", "b", "theta", "x_1")
OPS = ("+", "-", "*", "/", "^")


def random_ast(rng: random.Random, depth=4):
    """Uniform-ish random expression tree with non-negative literals."""
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(4)
        if kind == 0:
            choice = rng.randrange(4)
            value = [0.5, 2.0, 1e-05, rng.uniform(0, 1e3)][choice]
            return Number(value)
        if kind == 1:
            return Constant(rng.choice(("i", "pi")))
        return Param(rng.choice(NAMES))
    kind = rng.randrange(3)
    if kind == 0:
        return Neg(random_ast(rng, depth - 1))
    if kind == 1:
        return BinOp(rng.choice(OPS), random_ast(rng, depth - 1), random_ast(rng, depth - 1))
    return Call(rng.choice(sorted(FUNCTIONS)), random_ast(rng, depth - 1))
