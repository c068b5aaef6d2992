"""Vector-valued trigonometric polynomials on the m-torus and their L^p norms.

A polynomial is a finite map from indices to coefficient vectors.  The L^p
norm against normalized Haar measure is computed either on an equispaced
tensor grid (exact for trigonometric integrands of per-axis degree below
the point count) or by seeded Monte Carlo sampling.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .indices import Index, last_nonzero
from .spaces import NormedSpaceSpec, vector_norm

__all__ = [
    "GridQuadrature",
    "MonteCarloQuadrature",
    "TrigPolynomial",
    "eval_poly",
    "lp_norm",
    "random_poly",
    "default_quadrature",
    "substream",
]


def substream(seed: int, *tags) -> np.random.Generator:
    """Named random substream: one master seed, independent per-use streams."""
    import zlib

    words = [int(seed) & 0xFFFFFFFF]
    for t in tags:
        words.append(zlib.crc32(str(t).encode()) & 0xFFFFFFFF)
    return np.random.default_rng(words)


@dataclass(frozen=True)
class GridQuadrature:
    """Equispaced tensor-product rule with a fixed point count per axis."""

    points_per_axis: int

    def __post_init__(self):
        if self.points_per_axis < 1:
            raise ValueError("points_per_axis must be >= 1")


@dataclass(frozen=True)
class MonteCarloQuadrature:
    """Uniform sampling of the torus, deterministic in its seed."""

    samples: int
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("sample count must be >= 1")


class TrigPolynomial:
    """Immutable sparse trigonometric polynomial with vector coefficients."""

    __slots__ = ("torus_dim", "space", "coeffs")

    def __init__(self, torus_dim: int, space: NormedSpaceSpec, coeffs=None):
        torus_dim = int(torus_dim)
        if torus_dim < 0:
            raise ValueError("torus dimension must be >= 0")
        clean = {}
        for J, v in (coeffs or {}).items():
            J = Index(J)
            v = np.asarray(v, dtype=complex)
            if v.shape != (space.dim,):
                raise ValueError(
                    f"coefficient at {list(J)} has shape {v.shape}, expected ({space.dim},)"
                )
            if len(J) > torus_dim:
                raise ValueError(
                    f"index {list(J)} exceeds torus dimension {torus_dim}"
                )
            if np.all(v == 0):
                continue
            v = v.copy()
            v.setflags(write=False)
            clean[J] = v
        object.__setattr__(self, "torus_dim", torus_dim)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TrigPolynomial is immutable")

    # -- basic structure ---------------------------------------------------

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def spectrum(self):
        return sorted(self.coeffs)

    def max_degree(self) -> int:
        return max((max(abs(e) for e in J) for J in self.coeffs if J), default=0)

    def coefficient(self, index) -> np.ndarray:
        return self.coeffs.get(Index(index), np.zeros(self.space.dim, dtype=complex))

    # -- algebra (plumbing for operators and tests) ------------------------

    def _binop(self, other, sign):
        if self.space != other.space:
            raise ValueError("polynomials live in different coefficient spaces")
        m = max(self.torus_dim, other.torus_dim)
        out = {J: v.copy() for J, v in self.coeffs.items()}
        for J, v in other.coeffs.items():
            out[J] = out.get(J, 0) + sign * v
        return TrigPolynomial(m, self.space, out)

    def __add__(self, other):
        return self._binop(other, 1.0)

    def __sub__(self, other):
        return self._binop(other, -1.0)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return TrigPolynomial(
            self.torus_dim, self.space, {J: scalar * v for J, v in self.coeffs.items()}
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def with_torus_dim(self, m: int) -> "TrigPolynomial":
        return TrigPolynomial(m, self.space, self.coeffs)

    def translate(self, shift) -> "TrigPolynomial":
        """The polynomial theta -> f(theta - shift), as new coefficients."""
        from .indices import eval_character

        shift = np.asarray(shift, dtype=float)
        out = {
            J: v * np.conj(eval_character(J, shift[: self.torus_dim]))
            for J, v in self.coeffs.items()
        }
        return TrigPolynomial(self.torus_dim, self.space, out)

    def allclose(self, other, tol=1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            np.max(np.abs(self.coefficient(J) - other.coefficient(J))) <= tol
            for J in keys
        )

    def __repr__(self):
        return (
            f"TrigPolynomial(m={self.torus_dim}, d={self.space.dim}, "
            f"q={self.space.q}, terms={len(self.coeffs)})"
        )

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for J in sorted(self.coeffs):
            v = self.coeffs[J]
            terms.append(
                {"index": list(J), "value": [[float(z.real), float(z.imag)] for z in v]}
            )
        return {"torus_dim": self.torus_dim, "space": self.space.to_json(), "coeffs": terms}

    @classmethod
    def from_json(cls, obj) -> "TrigPolynomial":
        try:
            space = NormedSpaceSpec.from_json(obj["space"])
            coeffs = {}
            for term in obj["coeffs"]:
                v = np.array([complex(re, im) for re, im in term["value"]])
                coeffs[Index(term["index"])] = v
            return cls(int(obj["torus_dim"]), space, coeffs)
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"malformed polynomial object") from exc

    # -- construction helpers ----------------------------------------------

    @classmethod
    def zero(cls, torus_dim: int, space: NormedSpaceSpec) -> "TrigPolynomial":
        return cls(torus_dim, space, {})

    @classmethod
    def monomial(cls, torus_dim, space, index, value) -> "TrigPolynomial":
        return cls(torus_dim, space, {Index(index): np.asarray(value, dtype=complex)})


def _index_matrix(f: TrigPolynomial):
    keys = sorted(f.coeffs)
    A = np.zeros((len(keys), f.torus_dim), dtype=float)
    C = np.zeros((len(keys), f.space.dim), dtype=complex)
    for r, J in enumerate(keys):
        A[r, : len(J)] = J
        C[r] = f.coeffs[J]
    return A, C


def eval_poly(f: TrigPolynomial, theta):
    """Evaluate at one torus point ``(m,)`` or a batch ``(..., m)``."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0 or theta.shape[-1] != f.torus_dim:
        if not (f.torus_dim == 0 and theta.size == 0):
            raise ValueError(
                f"expected {f.torus_dim} angle coordinates, got shape {theta.shape}"
            )
    if not f.coeffs:
        return np.zeros(theta.shape[:-1] + (f.space.dim,), dtype=complex)
    A, C = _index_matrix(f)
    phases = theta @ A.T if f.torus_dim else np.zeros(theta.shape[:-1] + (len(C),))
    return np.exp(1j * phases) @ C


def _grid_points(m: int, n: int) -> np.ndarray:
    axis = -np.pi + 2.0 * np.pi * np.arange(n) / n
    if m == 0:
        return np.zeros((1, 0))
    grids = np.meshgrid(*([axis] * m), indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, m)


def lp_norm(f: TrigPolynomial, p: float, quad) -> float:
    """L^p norm against normalized Haar measure, per the quadrature spec.

    Grid mode is exact whenever the integrand ||f||^p is a trigonometric
    polynomial of per-axis degree below the point count (always true at
    p = 2 with enough points); otherwise it carries discretization error
    that shrinks under grid refinement.
    """
    if not (p > 1.0):
        raise ValueError("exponent p must lie in (1, inf)")
    if not f.coeffs:
        return 0.0
    if isinstance(quad, GridQuadrature):
        n = quad.points_per_axis
        if n <= 2 * f.max_degree():
            warnings.warn(
                f"grid with {n} points per axis risks aliasing at degree "
                f"{f.max_degree()}; results carry that error",
                stacklevel=2,
            )
        pts = _grid_points(f.torus_dim, n)
    elif isinstance(quad, MonteCarloQuadrature):
        rng = np.random.default_rng(quad.seed)
        pts = rng.uniform(-np.pi, np.pi, size=(quad.samples, max(f.torus_dim, 1)))
        pts = pts[:, : f.torus_dim]
    else:
        raise TypeError(f"not a quadrature spec: {quad!r}")
    values = eval_poly(f, pts)
    norms = vector_norm(f.space, values)
    return float(np.mean(norms**p) ** (1.0 / p))


def default_quadrature(f: TrigPolynomial, p: float = 2.0):
    """Grid spec sized for exactness where affordable, Monte Carlo beyond m = 4."""
    deg = f.max_degree()
    if f.torus_dim > 4:
        return MonteCarloQuadrature(samples=65536, seed=0)
    n = 2 * deg + 2
    if float(p).is_integer() and (f.space.dim == 1 or f.space.q == 2.0):
        n = max(n, int(p) * deg + 2)
    return GridQuadrature(n)


def random_poly(torus_dim, space, max_degree, sparsity, seed=None, rng=None) -> TrigPolynomial:
    """Seed-deterministic sparse polynomial with unit-scale coefficients.

    Draws ``sparsity`` distinct indices from the degree box and complex
    standard-normal coordinates for each.
    """
    if torus_dim < 1 or max_degree < 0 or sparsity < 0:
        raise ValueError("torus_dim must be >= 1 and bounds nonnegative")
    if rng is None:
        rng = substream(0 if seed is None else seed, "random_poly")
    box = 2 * max_degree + 1
    total = box**torus_dim
    sparsity = min(sparsity, total)
    chosen = {}
    while len(chosen) < sparsity:
        flat = int(rng.integers(0, total))
        if flat in chosen:
            continue
        entries = []
        x = flat
        for _ in range(torus_dim):
            entries.append(x % box - max_degree)
            x //= box
        chosen[flat] = Index(entries)
    coeffs = {}
    for J in chosen.values():
        v = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        coeffs[J] = coeffs.get(J, 0) + v / math.sqrt(2.0)
    return TrigPolynomial(torus_dim, space, coeffs)
