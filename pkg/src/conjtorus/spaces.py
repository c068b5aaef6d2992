"""Finite-dimensional complex coordinate spaces with l_q norms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["NormedSpaceSpec", "vector_norm", "norming_functional"]


@dataclass(frozen=True)
class NormedSpaceSpec:
    """Complex coordinate space of dimension ``dim`` with the l_q norm."""

    dim: int
    q: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "q", float(self.q))
        if self.dim < 1:
            raise ValueError("space dimension must be >= 1")
        if not (self.q >= 1.0):
            raise ValueError("norm exponent q must satisfy q >= 1 (inf allowed)")

    @property
    def q_dual(self) -> float:
        if self.q == 1.0:
            return math.inf
        if math.isinf(self.q):
            return 1.0
        return self.q / (self.q - 1.0)

    def to_json(self) -> dict:
        return {"d": self.dim, "q": "inf" if math.isinf(self.q) else self.q}

    @classmethod
    def from_json(cls, obj) -> "NormedSpaceSpec":
        try:
            q = obj["q"]
            q = math.inf if q == "inf" else float(q)
            return cls(int(obj["d"]), q)
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"malformed space object: {obj!r}") from exc


def _check_dim(space: NormedSpaceSpec, v: np.ndarray):
    if v.shape[-1] != space.dim:
        raise ValueError(f"vector has {v.shape[-1]} coordinates, space has {space.dim}")


def vector_norm(space: NormedSpaceSpec, v):
    """l_q norm of one vector or a batch of vectors (last axis = coordinates)."""
    v = np.asarray(v, dtype=complex)
    _check_dim(space, v)
    a = np.abs(v)
    if math.isinf(space.q):
        out = a.max(axis=-1)
    elif space.q == 1.0:
        out = a.sum(axis=-1)
    elif space.q == 2.0:
        out = np.sqrt((a * a).sum(axis=-1))
    else:
        out = (a ** space.q).sum(axis=-1) ** (1.0 / space.q)
    return float(out) if out.ndim == 0 else out


def norming_functional(space: NormedSpaceSpec, v):
    """Unit-norm dual vector u (in l_{q'}) with <u, v> = ||v||_q.

    The pairing is ``sum conj(u_i) v_i``.  Zero vectors map to zero.  For
    q = inf the functional concentrates on the first coordinate attaining
    the maximum modulus (a deterministic tie break).  Batched input is
    handled along the last axis.
    """
    v = np.asarray(v, dtype=complex)
    _check_dim(space, v)
    a = np.abs(v)
    phase = np.where(a > 0, v / np.where(a > 0, a, 1.0), 0.0)
    if math.isinf(space.q):
        pick = a.argmax(axis=-1)
        u = np.zeros_like(v)
        idx = np.indices(a.shape[:-1])
        u[(*idx, pick)] = phase[(*idx, pick)]
        return u
    if space.q == 1.0:
        return phase
    norm = vector_norm(space, v)
    norm = np.asarray(norm)
    safe = np.where(norm > 0, norm, 1.0)
    return np.where(
        norm[..., None] > 0, (a / safe[..., None]) ** (space.q - 1.0) * phase, 0.0
    )
