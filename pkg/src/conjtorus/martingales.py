"""Dyadic martingale difference sequences and their torus realization.

A dyadic difference sequence is driven by independent signs; its torus
realization replaces the k-th driving sign with the sign of the (k-1)-th
angle coordinate.  The first driving function is the constant +1 on both
sides (the first difference is normalized to zero), so a length-n sequence
is determined by n-1 signs on either side: 2^(n-1) sign atoms against the
2^(n-1) equal-measure sign cells of the torus coordinates.

The sign function is represented two ways: exactly, as a step-function
evaluator (distribution and martingale-property checks are exact
statements), and approximately, as a truncated odd Fourier series (the
conjugation operators act on trigonometric polynomials only).  With the
zero-normalized first difference the k-th realized difference depends on
coordinates 1..k-1, so its spectrum sits in the block with last nonzero
coordinate k-1: block map b(k) = k - 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .indices import Index, last_nonzero
from .polynomials import TrigPolynomial, substream
from .spaces import NormedSpaceSpec

__all__ = [
    "DyadicMDS",
    "TorusMDS",
    "sign_fourier",
    "realize_on_torus",
    "distribution_check",
    "block_spectrum_check",
    "martingale_property_check",
    "random_mds",
]

ENUMERATION_CAP = 12  # exact checks enumerate at most 2^12 atoms per level


def pattern_row(pattern) -> int:
    """Row index of a sign pattern: bit i set iff sign i+1 is -1."""
    row = 0
    for i, s in enumerate(pattern):
        if s == -1:
            row |= 1 << i
        elif s != 1:
            raise ValueError("sign patterns contain only -1 and +1")
    return row


def row_pattern(row: int, width: int) -> tuple:
    return tuple(-1 if (row >> i) & 1 else 1 for i in range(width))


@dataclass(frozen=True)
class DyadicMDS:
    """Length-n dyadic martingale difference sequence.

    ``tables[k]`` holds the multiplier table of the k-th difference as an
    array of shape (2^(k-1), space.dim), one row per sign pattern of the
    preceding driving signs (see ``pattern_row``).  The first difference
    is identically zero and has no table.
    """

    length: int
    space: NormedSpaceSpec
    tables: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")
        tables = {}
        for k in range(2, self.length + 1):
            arr = np.asarray(self.tables[k], dtype=complex)
            if arr.shape != (1 << (k - 1), self.space.dim):
                raise ValueError(
                    f"table {k} has shape {arr.shape}, expected "
                    f"({1 << (k - 1)}, {self.space.dim})"
                )
            arr = arr.copy()
            arr.setflags(write=False)
            tables[k] = arr
        object.__setattr__(self, "tables", tables)

    def difference(self, k: int, signs) -> np.ndarray:
        """Value of d_k for driving signs (the first sign is pinned to +1)."""
        if k < 1 or k > self.length:
            raise ValueError(f"difference index {k} out of range")
        if k == 1:
            return np.zeros(self.space.dim, dtype=complex)
        args = (1,) + tuple(signs[: k - 2])
        return self.tables[k][pattern_row(args)] * signs[k - 2]

    def to_json(self) -> dict:
        tables = {}
        for k in range(2, self.length + 1):
            rows = []
            for r in range(1 << (k - 1)):
                value = [[float(z.real), float(z.imag)] for z in self.tables[k][r]]
                rows.append([list(row_pattern(r, k - 1)), value])
            tables[str(k)] = rows
        return {"n": self.length, "space": self.space.to_json(), "tables": tables}

    @classmethod
    def from_json(cls, obj) -> "DyadicMDS":
        try:
            n = int(obj["n"])
            space = NormedSpaceSpec.from_json(obj["space"])
            tables = {}
            for k in range(2, n + 1):
                arr = np.zeros((1 << (k - 1), space.dim), dtype=complex)
                seen = set()
                for pattern, value in obj["tables"][str(k)]:
                    r = pattern_row(pattern)
                    if len(pattern) != k - 1 or r in seen:
                        raise ValueError("bad pattern")
                    seen.add(r)
                    arr[r] = np.array([complex(re, im) for re, im in value])
                if len(seen) != 1 << (k - 1):
                    raise ValueError("missing patterns")
                tables[k] = arr
            return cls(n, space, tables)
        except (TypeError, KeyError, ValueError, IndexError) as exc:
            raise ValueError("malformed martingale difference file") from exc


def random_mds(length: int, space: NormedSpaceSpec, seed: int) -> DyadicMDS:
    """Seed-deterministic random difference sequence (unit-scale tables)."""
    rng = substream(seed, "mds")
    tables = {}
    for k in range(2, length + 1):
        shape = (1 << (k - 1), space.dim)
        tables[k] = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    return DyadicMDS(length, space, tables)


@dataclass(frozen=True)
class TorusMDS:
    """Torus realization: exact step evaluators plus polynomial approximants."""

    length: int
    space: NormedSpaceSpec
    truncation: int
    approximants: tuple  # TrigPolynomial per difference, index 0 = first
    evaluators: tuple  # callables theta -> vector, same indexing


def sign_fourier(truncation: int) -> TrigPolynomial:
    """Odd-harmonic partial sum of the sign of the angle, as a polynomial.

    Fourier coefficients of sgn on [-pi, pi) are -2i/(pi k) at odd k and 0
    otherwise; truncation keeps odd |k| <= M.
    """
    m = int(truncation)
    if m < 1:
        raise ValueError("truncation must be >= 1")
    space = NormedSpaceSpec(1, 2.0)
    coeffs = {}
    for k in range(1, m + 1, 2):
        c = -2j / (math.pi * k)
        coeffs[Index((k,))] = np.array([c])
        coeffs[Index((-k,))] = np.array([-c])
    return TrigPolynomial(1, space, coeffs)


def _walsh_coefficients(table: np.ndarray, nvars: int) -> np.ndarray:
    """Multilinear (Walsh) coefficients of a function of +-1 variables.

    ``table`` has 2^nvars rows in ``pattern_row`` order; output row S (a
    bitmask) is the coefficient of prod_{i in S} u_i.
    """
    c = table.astype(complex).copy()
    for lvl in range(nvars):
        c = c.reshape((1 << lvl, 2, -1, c.shape[-1]))
        plus, minus = c[:, 0].copy(), c[:, 1].copy()
        c[:, 0] = (plus + minus) / 2.0
        c[:, 1] = (plus - minus) / 2.0
        c = c.reshape((-1, c.shape[-1]))
    # after the passes, row r holds the coefficient of the monomial whose
    # variable set is the bitmask of r (bit i <-> u_{i+1})
    return c


def _difference_evaluator(mds: DyadicMDS, k: int):
    if k == 1:
        zero = np.zeros(mds.space.dim, dtype=complex)
        return lambda theta: zero.copy()
    table = mds.tables[k]

    def evaluate(theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape[-1] < k - 1:
            raise ValueError(f"difference {k} needs at least {k - 1} coordinates")
        signs = tuple(1 if theta[i] >= 0 else -1 for i in range(k - 2))
        factor = 1 if theta[k - 2] >= 0 else -1
        return table[pattern_row((1,) + signs)] * factor

    return evaluate


def _difference_approximant(mds: DyadicMDS, k: int, truncation: int) -> TrigPolynomial:
    m = max(mds.length - 1, 1)
    if k == 1:
        return TrigPolynomial.zero(m, mds.space)
    sub = mds.tables[k][0::2]  # rows with the pinned first sign +1
    walsh = _walsh_coefficients(sub, k - 2)
    sf = {int(J[0]): val[0] for J, val in sign_fourier(truncation).coeffs.items()}
    harmonics = sorted(sf)
    coeffs = {}
    for mask in range(1 << (k - 2)):
        c_s = walsh[mask]
        if not np.any(c_s):
            continue
        coords = [i + 1 for i in range(k - 2) if (mask >> i) & 1]
        coords.append(k - 1)
        for combo in itertools.product(harmonics, repeat=len(coords)):
            entries = [0] * (k - 1)
            scalar = 1.0 + 0j
            for coord, j in zip(coords, combo):
                entries[coord - 1] = j
                scalar *= sf[j]
            J = Index(entries)
            coeffs[J] = coeffs.get(J, 0) + scalar * c_s
    return TrigPolynomial(m, mds.space, coeffs)


def realize_on_torus(mds: DyadicMDS, truncation: int = 31) -> TorusMDS:
    """Torus realization of a dyadic difference sequence.

    Each difference is produced both exactly (step-function evaluator on
    the sign cells) and as a trigonometric polynomial with every sign
    factor replaced by its truncated Fourier series, expanded into the
    character basis through the multilinear form of the multiplier table.
    """
    evaluators = tuple(_difference_evaluator(mds, k) for k in range(1, mds.length + 1))
    approximants = tuple(
        _difference_approximant(mds, k, truncation) for k in range(1, mds.length + 1)
    )
    return TorusMDS(mds.length, mds.space, int(truncation), approximants, evaluators)


def _atom_signs(width: int, rng=None):
    if width <= ENUMERATION_CAP:
        for row in range(1 << width):
            yield row_pattern(row, width)
    else:
        for _ in range(1 << ENUMERATION_CAP):
            yield tuple(1 if x >= 0 else -1 for x in rng.standard_normal(width))


def distribution_check(mds: DyadicMDS, torus: TorusMDS) -> bool:
    """Exact equality of the two joint distributions as weighted multisets.

    Both sides are driven by n-1 signs (atoms on one side, equal-measure
    sign cells on the other), so the comparison enumerates 2^(n-1) value
    tuples per side and compares them as sorted multisets, exactly.
    """
    if mds.length != torus.length:
        raise ValueError("sequences have different lengths")
    if mds.space != torus.space:
        raise ValueError("sequences live in different spaces")
    width = mds.length - 1
    if width > ENUMERATION_CAP:
        raise ValueError(f"exact distribution check is capped at length {ENUMERATION_CAP + 1}")

    def flatten(vectors):
        out = []
        for v in vectors:
            for z in v:
                out.append(float(z.real))
                out.append(float(z.imag))
        return tuple(out)

    dyadic = []
    cell = []
    for signs in _atom_signs(width):
        dyadic.append(flatten(mds.difference(k, signs) for k in range(1, mds.length + 1)))
        theta = np.array(signs, dtype=float)  # representative angle per cell
        cell.append(flatten(ev(theta) for ev in torus.evaluators))
    return sorted(dyadic) == sorted(cell)


def block_spectrum_check(torus: TorusMDS) -> bool:
    """True iff the k-th approximant's spectrum sits in block k-1."""
    for k in range(1, torus.length + 1):
        poly = torus.approximants[k - 1]
        for J in poly.coeffs:
            if last_nonzero(J) != k - 1:
                return False
    return True


def martingale_property_check(torus: TorusMDS, seed: int = 0) -> bool:
    """Conditional-mean-zero check on the exact evaluators.

    For each difference, the sum over the two refinements of every
    conditioning sign cell must vanish exactly.  Cells are enumerated
    exhaustively up to the enumeration cap and sampled (seeded) beyond it.
    """
    rng = substream(seed, "martingale_property")
    for k in range(2, torus.length + 1):
        ev = torus.evaluators[k - 1]
        width = k - 2
        for signs in _atom_signs(width, rng):
            theta = np.ones(max(torus.length - 1, 1), dtype=float) * 0.5
            theta[:width] = np.array(signs, dtype=float)
            theta[k - 2] = 0.5
            up = ev(theta)
            theta[k - 2] = -0.5
            down = ev(theta)
            if np.any(up + down != 0):
                return False
    return True
