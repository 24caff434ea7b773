"""Brute-force references, written independently of the library kernels."""

import itertools
from collections import Counter

import numpy as np


def ising_terms(n, edges, root=None):
    """(e, m) -> count by looping over every spin tuple; ``root`` pins that spin to +1."""
    out = Counter()
    for spins in itertools.product((1, -1), repeat=n):
        if root is not None and spins[root - 1] != 1:
            continue
        e = sum(spins[i - 1] * spins[j - 1] for i, j in edges)
        out[(e, sum(spins))] += 1
    return dict(out)


def pauli_hamiltonian(n, edges, a, b, fields=None):
    """Dense transverse-field Hamiltonian from Kronecker products.

    Qubit ``i`` (1-based) is bit ``i - 1`` of the basis index, bit 0 = spin up.
    """
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    fields = [1.0] * n if fields is None else fields

    def op(single, i):
        # np.kron puts the first factor on the most significant bit
        mats = [single if k == i else eye for k in range(n - 1, -1, -1)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    H = np.zeros((1 << n, 1 << n))
    for i in range(n):
        H += a * op(x, i) + b * fields[i] * op(z, i)
    for i, j in edges:
        H += b * op(z, i - 1) @ op(z, j - 1)
    return H


def gibbs_observables(H, n, edges, beta):
    """Exact (E, M, Q2, Omega2) of exp(-beta H) by full diagonalization, plain loops."""
    vals, vecs = np.linalg.eigh(H)
    w = np.exp(-beta * (vals - vals[0]))
    p = (vecs**2) @ w
    p /= p.sum()
    spins = np.array([[1 - 2 * ((z >> i) & 1) for i in range(n)] for z in range(1 << n)], dtype=float)
    mean = spins.T @ p
    corr = np.einsum("z,zi,zj->ij", p, spins, spins)
    energy = sum(corr[i - 1, j - 1] for i, j in edges) + mean.sum()
    adj = np.zeros((n, n))
    for i, j in edges:
        adj[i - 1, j - 1] = adj[j - 1, i - 1] = 1
    a2 = adj @ adj
    omega2 = float((a2 * corr).sum())
    off = [corr[i, j] ** 2 for i in range(n) for j in range(n) if i != j]
    q2 = float(np.sqrt(sum(off) / (n * (n - 1)))) if n > 1 else 0.0
    return np.array([energy, mean.sum(), q2, omega2]), p
