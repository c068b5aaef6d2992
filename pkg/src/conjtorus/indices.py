"""Finitely supported integer multi-indices and torus characters.

An ``Index`` names a character of the (finite-dimensional slice of the)
infinite torus: ``chi_J(theta) = prod_n exp(i j_n theta_n)``.  Indices are
stored canonically, without trailing zeros, so equality and hashing are
structural.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Index",
    "last_nonzero",
    "in_block",
    "eval_character",
    "wrap_angle",
    "as_torus_point",
]


class Index(tuple):
    """Integer multi-index with trailing zeros stripped.

    The zero index is the empty tuple.  Addition and negation act
    componentwise (group operations of the index lattice), not by tuple
    concatenation.
    """

    __slots__ = ()

    def __new__(cls, entries=()):
        t = [int(e) for e in entries]
        while t and t[-1] == 0:
            t.pop()
        return super().__new__(cls, t)

    def __add__(self, other):
        other = Index(other)
        n = max(len(self), len(other))
        return Index(
            (self[i] if i < len(self) else 0) + (other[i] if i < len(other) else 0)
            for i in range(n)
        )

    __radd__ = __add__

    def __neg__(self):
        return Index(-e for e in self)

    def __sub__(self, other):
        return self + (-Index(other))

    def __repr__(self):
        return f"Index({list(self)})"


def last_nonzero(index) -> int:
    """Position (1-based) of the last nonzero entry; 0 for the zero index."""
    index = Index(index)
    return len(index)


def in_block(index, n: int) -> bool:
    """True iff the index lies in the block of indices supported on 1..n."""
    return last_nonzero(index) <= int(n)


def wrap_angle(x):
    """Wrap angles into the fundamental interval [-pi, pi)."""
    x = np.asarray(x, dtype=float)
    return np.mod(x + np.pi, 2.0 * np.pi) - np.pi


def as_torus_point(angles) -> np.ndarray:
    """Return a 1-d float array of angles wrapped into [-pi, pi)."""
    a = np.atleast_1d(np.asarray(angles, dtype=float))
    if a.ndim != 1:
        raise ValueError("a torus point is a 1-d sequence of angles")
    return wrap_angle(a)


def eval_character(index, theta):
    """Evaluate ``chi_J`` at one or many torus points.

    ``theta`` has shape ``(m,)`` or ``(..., m)`` with ``m`` at least the
    support length of ``index``.  Returns a unit-modulus complex scalar,
    or an array of them for batched input.
    """
    index = Index(index)
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[-1] if theta.ndim else 0
    if m < len(index):
        raise ValueError(
            f"torus point has {m} coordinates but the index is supported on {len(index)}"
        )
    if not index:
        if theta.ndim <= 1:
            return complex(1.0)
        return np.ones(theta.shape[:-1], dtype=complex)
    j = np.asarray(index, dtype=float)
    phase = theta[..., : len(index)] @ j
    out = np.exp(1j * phase)
    if out.ndim == 0:
        return complex(out)
    return out
