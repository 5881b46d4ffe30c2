"""Inner numeric kernels.

Every kernel exists twice: a vectorised numpy version (``*_numpy``) and an
explicit-loop version (``*_loops``) compiled with numba.  The public names
(``christoffel_kernel`` etc.) point at the loop versions unless JIT is
disabled, see :mod:`qgeom._jit`.  Both paths are tested against each other
and compared in ``benchmarks/bench_kernels.py``.

Index conventions
-----------------
``dg[k, i, j]``        = d g_ij / dx^k
``gamma[a, b, c]``     = Gamma^a_{bc}
``dgamma[k, a, b, c]`` = d Gamma^a_{bc} / dx^k
``riem[a, b, c, d]``   = R^a_{bcd}
"""
import numpy as np

from ._jit import JIT_DISABLED, njit

__all__ = [
    "christoffel_kernel",
    "riemann_kernel",
    "scalar_curvature_kernel",
    "qgt_kernel",
    "minkowski_batch",
    "twisted_pair_batch",
    "KERNELS",
]


# -- Christoffel symbols ----------------------------------------------------

def christoffel_numpy(ginv, dg):
    # lowered[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    lowered = np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg
    return 0.5 * np.einsum("ad,dbc->abc", ginv, lowered)


@njit(cache=True)
def christoffel_loops(ginv, dg):
    n = ginv.shape[0]
    out = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(b, n):
                acc = 0.0
                for d in range(n):
                    acc += ginv[a, d] * (dg[b, d, c] + dg[c, d, b] - dg[d, b, c])
                out[a, b, c] = 0.5 * acc
                out[a, c, b] = 0.5 * acc
    return out


# -- Riemann tensor ---------------------------------------------------------

def riemann_numpy(gamma, dgamma):
    deriv = np.einsum("cadb->abcd", dgamma)
    quad = np.einsum("ace,edb->abcd", gamma, gamma)
    return deriv - np.swapaxes(deriv, 2, 3) + quad - np.swapaxes(quad, 2, 3)


@njit(cache=True)
def riemann_loops(gamma, dgamma):
    n = gamma.shape[0]
    out = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    acc = dgamma[c, a, d, b] - dgamma[d, a, c, b]
                    for e in range(n):
                        acc += gamma[a, c, e] * gamma[e, d, b] - gamma[a, d, e] * gamma[e, c, b]
                    out[a, b, c, d] = acc
                    out[a, b, d, c] = -acc
    return out


def scalar_curvature_numpy(ginv, riem):
    return float(np.einsum("bd,abad->", ginv, riem))


@njit(cache=True)
def scalar_curvature_loops(ginv, riem):
    n = ginv.shape[0]
    acc = 0.0
    for a in range(n):
        for b in range(n):
            for d in range(n):
                acc += ginv[b, d] * riem[a, b, a, d]
    return acc


# -- quantum geometric tensor -----------------------------------------------

def qgt_numpy(psi, dpsi, projective):
    norm = np.vdot(psi, psi).real
    q = np.conj(dpsi) @ dpsi.T / norm
    if projective:
        conn = np.conj(dpsi) @ psi  # <d_mu psi | psi>
        q = q - np.outer(conn, np.conj(conn)) / norm**2
    return q


@njit(cache=True)
def qgt_loops(psi, dpsi, projective):
    m, n = dpsi.shape
    norm = 0.0
    for k in range(n):
        norm += psi[k].real ** 2 + psi[k].imag ** 2
    conn = np.zeros(m, dtype=np.complex128)
    for mu in range(m):
        acc = 0j
        for k in range(n):
            acc += np.conj(dpsi[mu, k]) * psi[k]
        conn[mu] = acc
    q = np.zeros((m, m), dtype=np.complex128)
    for mu in range(m):
        for nu in range(m):
            acc = 0j
            for k in range(n):
                acc += np.conj(dpsi[mu, k]) * dpsi[nu, k]
            q[mu, nu] = acc / norm
            if projective:
                q[mu, nu] -= conn[mu] * np.conj(conn[nu]) / (norm * norm)
    return q


# -- line elements over displacement batches --------------------------------

def minkowski_numpy(disp, c):
    return disp[:, 0] ** 2 + disp[:, 1] ** 2 + disp[:, 2] ** 2 - c**2 * disp[:, 3] ** 2


@njit(cache=True)
def minkowski_loops(disp, c):
    out = np.empty(disp.shape[0])
    for k in range(disp.shape[0]):
        out[k] = disp[k, 0] ** 2 + disp[k, 1] ** 2 + disp[k, 2] ** 2 - c**2 * disp[k, 3] ** 2
    return out


def twisted_pair_numpy(z1, z2, g11, g22, twist):
    part1 = twist[0] * z1.real**2 + twist[1] * z1.imag**2
    part2 = twist[2] * z2.real**2 + twist[3] * z2.imag**2
    return g11 * part1 + g22 * part2


@njit(cache=True)
def twisted_pair_loops(z1, z2, g11, g22, twist):
    out = np.empty(z1.shape[0])
    for k in range(z1.shape[0]):
        part1 = twist[0] * z1[k].real ** 2 + twist[1] * z1[k].imag ** 2
        part2 = twist[2] * z2[k].real ** 2 + twist[3] * z2[k].imag ** 2
        out[k] = g11 * part1 + g22 * part2
    return out


KERNELS = {
    "christoffel": (christoffel_numpy, christoffel_loops),
    "riemann": (riemann_numpy, riemann_loops),
    "scalar_curvature": (scalar_curvature_numpy, scalar_curvature_loops),
    "qgt": (qgt_numpy, qgt_loops),
    "minkowski": (minkowski_numpy, minkowski_loops),
    "twisted_pair": (twisted_pair_numpy, twisted_pair_loops),
}

_pick = 0 if JIT_DISABLED else 1

christoffel_kernel = KERNELS["christoffel"][_pick]
riemann_kernel = KERNELS["riemann"][_pick]
scalar_curvature_kernel = KERNELS["scalar_curvature"][_pick]
qgt_kernel = KERNELS["qgt"][_pick]
minkowski_batch = KERNELS["minkowski"][_pick]
twisted_pair_batch = KERNELS["twisted_pair"][_pick]
