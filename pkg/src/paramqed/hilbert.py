"""Bosonic operator algebra on truncated Fock spaces.

Dense complex matrices throughout; the Hilbert spaces in this problem stay
small enough (total dimension of a few hundred) that sparsity never pays.
Mode ordering in composite spaces is fixed globally as (L, R, C).
"""

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Requested truncation dimension is not representable."""


def annihilation(dim: int) -> np.ndarray:
    """Truncated lowering operator: entry (n, n+1) = sqrt(n+1)."""
    if dim < 2:
        raise DimensionError(f"Fock truncation needs dim >= 2, got {dim}")
    a = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(dim - 1)
    a[ns, ns + 1] = np.sqrt(ns + 1.0)
    return a


def creation(dim: int) -> np.ndarray:
    """Truncated raising operator, the conjugate transpose of ``annihilation``."""
    return annihilation(dim).conj().T


def number(dim: int) -> np.ndarray:
    """Number operator a†a = diag(0, 1, ..., dim-1)."""
    if dim < 2:
        raise DimensionError(f"Fock truncation needs dim >= 2, got {dim}")
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


@dataclass(frozen=True)
class CompositeSpace:
    """Tensor-product space over an ordered tuple of factor dimensions."""

    factor_dims: tuple

    def __post_init__(self):
        if not self.factor_dims:
            raise DimensionError("composite space needs at least one factor")
        if any(d < 2 for d in self.factor_dims):
            raise DimensionError(f"factor dims must all be >= 2, got {self.factor_dims}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def basis_index(self, occupations) -> int:
        """Flat index of the bare product state |n_0, n_1, ...>."""
        idx = 0
        for n, d in zip(occupations, self.factor_dims):
            if not 0 <= n < d:
                raise DimensionError(f"occupation {n} outside factor of dim {d}")
            idx = idx * d + n
        return idx

    def embed(self, op: np.ndarray, slot: int) -> np.ndarray:
        return embed(op, self, slot)


def embed(op: np.ndarray, space, slot: int) -> np.ndarray:
    """Embed a single-mode operator: identity x ... x op x ... x identity.

    ``space`` may be a CompositeSpace or a plain sequence of factor dims.
    """
    dims = space.factor_dims if isinstance(space, CompositeSpace) else tuple(space)
    if not 0 <= slot < len(dims):
        raise IndexError(f"slot {slot} out of range for {len(dims)} factors")
    if op.shape != (dims[slot], dims[slot]):
        raise DimensionError(
            f"operator shape {op.shape} does not match factor dim {dims[slot]}"
        )
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == slot else np.eye(d, dtype=complex))
    return out


def check_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    """True iff max |m - m†| <= tol entrywise."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"hermiticity check needs a square matrix, got shape {m.shape}")
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)
