"""Dense complex operator algebra for small Hilbert spaces.

All operators are plain complex numpy arrays; the Hilbert dimension is the
matrix side. Everything here is a pure function, safe to call concurrently.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12

# Basis convention: |0> = (1, 0) is the +1 eigenvector of sigma_z and the
# ground state of the free Hamiltonian (w/2)(-sigma_z + I).  "plus" excites
# the ground state, "minus" de-excites, so that the exchange coupling
# g(plus_A minus_B + minus_A plus_B) swaps excitations.
_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
}


def pauli(kind: str) -> np.ndarray:
    """Pauli / two-level ladder operator in the sigma_z eigenbasis."""
    try:
        return _PAULI[kind].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli kind {kind!r}") from None


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def ladder(n_trunc: int, kind: str) -> np.ndarray:
    """Truncated annihilation/creation operator of dimension n_trunc."""
    if n_trunc < 2:
        raise ValueError(f"invalid dimension: n_trunc must be >= 2, got {n_trunc}")
    a = np.zeros((n_trunc, n_trunc), dtype=complex)
    for n in range(1, n_trunc):
        a[n - 1, n] = np.sqrt(n)
    if kind == "annihilate":
        return a
    if kind == "create":
        return a.conj().T
    raise ValueError(f"unknown ladder kind {kind!r}")


def tensor(ops: list[np.ndarray]) -> np.ndarray:
    """Kronecker product of the operators, in list order."""
    if not ops:
        raise ValueError("tensor() requires a non-empty operator list")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same_dim(a, b)
    return a @ b + b @ a


def trace(a: np.ndarray) -> complex:
    return complex(np.trace(a))


def expectation(rho: np.ndarray, a: np.ndarray) -> complex:
    """tr(rho A)."""
    _check_same_dim(rho, a)
    return complex(np.trace(rho @ a))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) < tol)


def projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex).ravel()
    return np.outer(ket, ket.conj())


def basis_state(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Trace out all subsystems not listed in `keep` (indices into dims)."""
    dims = tuple(dims)
    n = len(dims)
    if rho.shape != (int(np.prod(dims)),) * 2:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs dims {dims}")
    keep = tuple(sorted(keep))
    reshaped = rho.reshape(dims + dims)
    traced = tuple(i for i in range(n) if i not in keep)
    for i in sorted(traced, reverse=True):
        reshaped = np.trace(reshaped, axis1=i, axis2=i + reshaped.ndim // 2)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reshaped.reshape(d_keep, d_keep)
