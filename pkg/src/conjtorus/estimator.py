"""Lower-bound estimation of the operator-norm constants.

Three constants are estimated on a concrete coordinate space: the
conjugation constant (ratio of a conjugated polynomial's L^p norm to the
input's), the martingale-transform constant (signed block sums), and the
truncated-Hilbert constant (through the transferred multiplier).  All
three operators act diagonally in the character basis, so one search
engine covers them: candidates are coefficient arrays over a fixed
frequency box, and the reported bound is the best Rayleigh ratio seen.

The search interleaves seeded random candidates with a nonlinear power
iteration (duality-map ascent): from f, form g = Tf, take the pointwise
L^p duality image of g, pull it back through the adjoint multiplier,
apply the inverse duality map, and project onto the admissible spectrum.
Every reported bound is re-evaluated through the public ``rayleigh``
operation before being returned, so reports are sound by construction.

A dense 1-d grid ascent (independent of the coefficient-space engine) is
provided as a reference value; it also serves as the upper proxy in the
composition-inequality consistency sweep.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .indices import Index, last_nonzero
from .orders import Homomorphism, RevLex, eps_at, separating_homomorphism, sgn_order, twist
from .polynomials import (
    GridQuadrature,
    TrigPolynomial,
    eval_poly,
    lp_norm,
    substream,
)
from .spaces import NormedSpaceSpec, norming_functional, vector_norm
from .operators import (
    conjugate,
    hilbert_multiplier,
    martingale_transform,
    split_blocks,
    transferred_truncated,
)

__all__ = [
    "ConstantKind",
    "SearchParams",
    "EstimateReport",
    "rayleigh",
    "estimate_constant",
    "grid_ascent_reference",
    "theorem31_consistency",
    "random_block_polys",
]

DENOMINATOR_FLOOR = 1e-12
DEFAULT_TRUNCATION = 1e4


class ConstantKind(str, enum.Enum):
    CONJUGATE = "conjugate"       # abstract M. Riesz constant
    TRANSFORM = "umd"             # martingale-transform constant
    HILBERT = "hilbert"           # truncated Hilbert transform constant


@dataclass(frozen=True)
class SearchParams:
    """Caps and parameters of the candidate space (all flags at the CLI)."""

    torus_dim: int = 1
    max_degree: int = 16
    block_degree: int = 2
    truncation: float = DEFAULT_TRUNCATION
    grid_points: int | None = None
    stint: int = 40  # candidates per restart segment

    def resolved_for(self, kind: ConstantKind) -> "SearchParams":
        if kind is ConstantKind.TRANSFORM and self.torus_dim == 1:
            return replace(self, torus_dim=3, max_degree=self.block_degree)
        return self


@dataclass(frozen=True)
class EstimateReport:
    kind: ConstantKind
    p: float
    space: NormedSpaceSpec
    params: dict
    lower_bound: float
    witness: dict
    budget: int
    seed: int
    quad: GridQuadrature

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "p": self.p,
            "space": self.space.to_json(),
            "params": self.params,
            "lower_bound": self.lower_bound,
            "witness": self.witness,
            "budget": self.budget,
            "seed": self.seed,
            "quad": {"grid_points": self.quad.points_per_axis},
        }

    def summary_row(self) -> dict:
        return {
            "kind": self.kind.value,
            "p": self.p,
            "d": self.space.dim,
            "q": "inf" if math.isinf(self.space.q) else self.space.q,
            "lower_bound": self.lower_bound,
            "budget": self.budget,
            "seed": self.seed,
        }


def rayleigh(kind, f_or_blocks, p, quad, *, order=None, eps=None, weights=None,
             truncation=DEFAULT_TRUNCATION) -> float:
    """Ratio of the transformed L^p norm to the input L^p norm.

    ``f_or_blocks`` is a polynomial for the conjugation and Hilbert kinds
    and a sequence of spectrum blocks for the transform kind.  Near-zero
    denominators are rejected.
    """
    kind = ConstantKind(kind)
    if kind is ConstantKind.TRANSFORM:
        blocks = list(f_or_blocks)
        f = blocks[0]
        for b in blocks[1:]:
            f = f + b.with_torus_dim(max(f.torus_dim, b.torus_dim))
        g = martingale_transform(eps if eps is not None else (), blocks)
    else:
        f = f_or_blocks
        if kind is ConstantKind.CONJUGATE:
            g = conjugate(order if order is not None else RevLex(), f)
        else:
            if weights is None:
                weights = separating_homomorphism(f.coeffs.keys(), RevLex())
            g = transferred_truncated(weights, f, truncation)
    denom = lp_norm(f, p, quad)
    if denom <= DENOMINATOR_FLOOR:
        raise ValueError("input polynomial has near-zero norm")
    return lp_norm(g, p, quad) / denom


def random_block_polys(torus_dim, space, degree, per_block, rng) -> list:
    """Random spectrum blocks: block k holds indices with last nonzero at k."""
    blocks = []
    for k in range(1, torus_dim + 1):
        coeffs = {}
        for _ in range(per_block):
            while True:
                entries = list(rng.integers(-degree, degree + 1, size=k))
                if entries[-1] != 0:
                    break
            v = (rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim))
            J = Index(entries)
            coeffs[J] = coeffs.get(J, 0) + v / math.sqrt(2.0)
        blocks.append(TrigPolynomial(torus_dim, space, coeffs))
    return blocks


# ---------------------------------------------------------------------------
# coefficient-space search engine
# ---------------------------------------------------------------------------


def _box_indices(torus_dim: int, degree: int, include_zero: bool) -> list:
    rng_axis = range(-degree, degree + 1)
    out = []

    def rec(prefix, dim):
        if dim == torus_dim:
            J = Index(prefix)
            if J or include_zero:
                out.append(J)
            return
        for e in rng_axis:
            rec(prefix + [e], dim + 1)

    rec([], 0)
    return sorted(out)


class _RatioEngine:
    """Grid evaluation and duality ascent over a fixed frequency box."""

    def __init__(self, space, p, torus_dim, indices, grid_points):
        self.space = space
        self.p = float(p)
        self.torus_dim = torus_dim
        self.indices = list(indices)
        self.grid_points = grid_points
        from .polynomials import _grid_points as mk

        pts = mk(torus_dim, grid_points)
        A = np.zeros((len(self.indices), torus_dim))
        for r, J in enumerate(self.indices):
            A[r, : len(J)] = J
        self.synth = np.exp(1j * (pts @ A.T))  # (P, K)
        self.npts = len(pts)
        self.qdual = NormedSpaceSpec(space.dim, space.q_dual)

    def lp(self, values) -> float:
        norms = vector_norm(self.space, values)
        return float(np.mean(norms**self.p) ** (1.0 / self.p))

    def ratio(self, c, mult) -> float:
        f = self.synth @ c
        g = self.synth @ (mult[:, None] * c)
        denom = self.lp(f)
        if denom <= DENOMINATOR_FLOOR:
            return 0.0
        return self.lp(g) / denom

    def ascend(self, c, mult):
        """One duality-map power step; returns the projected new candidate."""
        p, pd = self.p, self.p / (self.p - 1.0)
        g = self.synth @ (mult[:, None] * c)
        gn = np.asarray(vector_norm(self.space, g))
        u = (gn ** (p - 1.0))[:, None] * norming_functional(self.space, g)
        d = self.synth.conj().T @ u / self.npts
        h = self.synth @ (np.conj(mult)[:, None] * d)
        hn = np.asarray(vector_norm(self.qdual, h))
        fn = (hn ** (pd - 1.0))[:, None] * norming_functional(self.qdual, h)
        c2 = self.synth.conj().T @ fn / self.npts
        scale = np.linalg.norm(c2)
        return c2 / scale if scale > 0 else c2

    def to_polynomial(self, c) -> TrigPolynomial:
        coeffs = {J: c[r] for r, J in enumerate(self.indices) if np.any(c[r] != 0)}
        return TrigPolynomial(self.torus_dim, self.space, coeffs)


def _multiplier_vector(kind, indices, *, order=None, eps=None, weights=None,
                       truncation=DEFAULT_TRUNCATION) -> np.ndarray:
    mult = np.zeros(len(indices), dtype=complex)
    for r, J in enumerate(indices):
        if kind is ConstantKind.CONJUGATE:
            mult[r] = -1j * sgn_order(order, J)
        elif kind is ConstantKind.TRANSFORM:
            n = last_nonzero(J)
            mult[r] = eps_at(eps, n) if n else 0.0
        else:
            psi = sum(j * w for j, w in zip(J, weights))
            mult[r] = hilbert_multiplier(float(psi), float(truncation)) if J else 0.0
    return mult


def _engine_grid(p, degree, override=None) -> int:
    if override is not None:
        return override
    return max(2 * degree + 2, int(math.ceil(p)) * degree + 2)


def estimate_constant(kind, space, p, budget, seed, search: SearchParams | None = None) -> EstimateReport:
    """Seeded lower-bound search for one constant on one space.

    Interleaves random sparse candidates with duality-map ascent stints;
    the candidate stream depends only on the seed, so the result is
    deterministic and nondecreasing in the budget.  The returned bound is
    reproduced through the public ``rayleigh`` operation on the witness.
    """
    kind = ConstantKind(kind)
    p = float(p)
    if not (p > 1.0):
        raise ValueError("exponent p must lie in (1, inf)")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    search = (search or SearchParams()).resolved_for(kind)
    m, deg = search.torus_dim, search.max_degree
    indices = _box_indices(m, deg, include_zero=(kind is ConstantKind.CONJUGATE))
    grid_n = _engine_grid(p, deg, search.grid_points)
    engine = _RatioEngine(space, p, m, indices, grid_n)
    rng = substream(seed, "estimate", kind.value)

    order = RevLex()
    weights = separating_homomorphism(indices, order)
    fixed_mult = None
    if kind is ConstantKind.CONJUGATE:
        fixed_mult = _multiplier_vector(kind, indices, order=order)
    elif kind is ConstantKind.HILBERT:
        fixed_mult = _multiplier_vector(
            kind, indices, weights=weights, truncation=search.truncation
        )

    K, d = len(indices), space.dim

    def fresh_candidate():
        c = np.zeros((K, d), dtype=complex)
        support = rng.integers(0, K, size=min(K, 8))
        for r in set(int(s) for s in support):
            c[r] = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        if not np.any(c):
            c[int(rng.integers(0, K))] = 1.0
        return c / np.linalg.norm(c)

    def canonical_candidates():
        # single characters seed exact unimodular ratios
        for J in (Index((1,)), Index([0] * (m - 1) + [1]) if m > 1 else None):
            if J is None:
                continue
            c = np.zeros((K, d), dtype=complex)
            c[indices.index(J), 0] = 1.0
            yield c

    best_ratio = -1.0
    best_c = None
    best_eps = None
    evals = 0
    pending = list(canonical_candidates())
    current = None
    eps = ()
    stint_left = 0

    while evals < budget:
        if pending:
            cand = pending.pop(0)
            current = None
        elif current is None or stint_left <= 0:
            cand = fresh_candidate()
            if kind is ConstantKind.TRANSFORM:
                eps = tuple(1 if x >= 0 else -1 for x in rng.standard_normal(m))
            stint_left = search.stint
            current = cand
        else:
            cand = engine.ascend(current, mult)
            current = cand
        mult = fixed_mult
        if mult is None:
            mult = _multiplier_vector(kind, indices, eps=eps)
        r = engine.ratio(cand, mult)
        evals += 1
        stint_left -= 1
        if r > best_ratio:
            best_ratio = r
            best_c = cand.copy()
            best_eps = eps
        elif current is not None and r < 0.999 * best_ratio and stint_left < search.stint - 5:
            stint_left = 0  # stalled stint, restart

    poly = engine.to_polynomial(best_c)
    quad = GridQuadrature(grid_n)
    params: dict = {}
    if kind is ConstantKind.CONJUGATE:
        witness = poly.to_json()
        params["order"] = {"kind": "revlex"}
        check = rayleigh(kind, poly, p, quad, order=order)
    elif kind is ConstantKind.HILBERT:
        witness = poly.to_json()
        params["weights"] = [int(w) for w in weights]
        params["truncation"] = search.truncation
        check = rayleigh(kind, poly, p, quad, weights=weights, truncation=search.truncation)
    else:
        blocks = split_blocks(poly, m)
        witness = {"blocks": [b.to_json() for b in blocks], "eps": list(best_eps)}
        params["eps"] = list(best_eps)
        check = rayleigh(kind, blocks, p, quad, eps=best_eps)
    if abs(check - best_ratio) > 1e-9:
        raise AssertionError(
            f"witness does not reproduce the bound: {check} vs {best_ratio}"
        )
    return EstimateReport(
        kind=kind,
        p=p,
        space=space,
        params=params,
        lower_bound=best_ratio,
        witness=witness,
        budget=budget,
        seed=seed,
        quad=quad,
    )


# ---------------------------------------------------------------------------
# dense-grid reference ascent (independent of the coefficient engine)
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def grid_ascent_reference(space: NormedSpaceSpec, p: float, max_degree: int = 32,
                          grid_points: int = 2048, iters: int = 600,
                          restarts: int = 6, seed: int = 1849) -> float:
    """Dense 1-d ascent value for the conjugation constant on one space.

    Power iteration with the L^p duality map on a dense equispaced grid,
    restricted to spectrum [-max_degree, max_degree] on the circle.  At
    p = 2 on a Hilbert-geometry space the exact value 1 is returned.
    """
    p = float(p)
    if p == 2.0 and (space.q == 2.0 or space.dim == 1):
        return 1.0
    js = np.arange(-max_degree, max_degree + 1)
    theta = -np.pi + 2.0 * np.pi * np.arange(grid_points) / grid_points
    E = np.exp(1j * np.outer(theta, js))
    mult = -1j * np.sign(js)
    dual = NormedSpaceSpec(space.dim, space.q_dual)
    pd = p / (p - 1.0)
    rng = substream(seed, "grid_ascent")

    def lp(values):
        return float(np.mean(np.asarray(vector_norm(space, values)) ** p) ** (1.0 / p))

    best = 1.0  # witnessed by any single character
    for _ in range(restarts):
        c = rng.standard_normal((len(js), space.dim)) + 1j * rng.standard_normal(
            (len(js), space.dim)
        )
        c /= np.linalg.norm(c)
        for _ in range(iters):
            f = E @ c
            g = E @ (mult[:, None] * c)
            denom = lp(f)
            if denom <= DENOMINATOR_FLOOR:
                break
            best = max(best, lp(g) / denom)
            gn = np.asarray(vector_norm(space, g))
            u = (gn ** (p - 1.0))[:, None] * norming_functional(space, g)
            dcoef = E.conj().T @ u / grid_points
            h = E @ (np.conj(mult)[:, None] * dcoef)
            hn = np.asarray(vector_norm(dual, h))
            fn = (hn ** (pd - 1.0))[:, None] * norming_functional(dual, h)
            c = E.conj().T @ fn / grid_points
            scale = np.linalg.norm(c)
            if scale == 0:
                break
            c /= scale
    return best


# ---------------------------------------------------------------------------
# composition-inequality consistency sweep
# ---------------------------------------------------------------------------


def theorem31_consistency(space, p, eps_samples, instance_samples, seed,
                          tol: float = 1e-6, torus_dim: int = 3,
                          block_degree: int = 2, per_block: int = 2,
                          reference_degree: int = 32) -> dict:
    """Check the two-step conjugation path against the transform ratio.

    For each sampled block polynomial f and sign pattern, verifies that
    the twisted conjugation step, the plain conjugation step, and the
    martingale-transform ratio all stay within the upper proxy (and its
    square), and that the transform ratio never exceeds the product of
    the two step ratios.  Returns a report dict listing any violations.
    """
    p = float(p)
    proxy = grid_ascent_reference(space, p, max_degree=reference_degree)
    rng = substream(seed, "thm31")
    violations = []
    checked = 0
    max_excess = 0.0
    for i in range(instance_samples):
        blocks = random_block_polys(torus_dim, space, block_degree, per_block, rng)
        f = blocks[0]
        for b in blocks[1:]:
            f = f + b
        quad = GridQuadrature(_engine_grid(p, f.max_degree()))
        nf = lp_norm(f, p, quad)
        if nf <= DENOMINATOR_FLOOR:
            continue
        for _ in range(eps_samples):
            eps = tuple(1 if x >= 0 else -1 for x in rng.standard_normal(torus_dim))
            h = conjugate(twist(eps), f)
            g = conjugate(RevLex(), h)
            nh = lp_norm(h, p, quad)
            ng = lp_norm(g, p, quad)
            nt = lp_norm(martingale_transform(eps, blocks), p, quad)
            checked += 1
            r1 = nh / nf
            r2 = ng / nh if nh > DENOMINATOR_FLOOR else 0.0
            rt = nt / nf
            for label, value, bound in (
                ("twisted_step", r1, proxy),
                ("plain_step", r2, proxy),
                ("transform_vs_square", rt, proxy * proxy),
                ("transform_vs_product", rt, r1 * r2),
            ):
                excess = value - bound
                max_excess = max(max_excess, excess)
                if excess > tol:
                    violations.append(
                        {
                            "instance": i,
                            "eps": list(eps),
                            "check": label,
                            "value": value,
                            "bound": bound,
                        }
                    )
    return {
        "p": p,
        "space": space.to_json(),
        "instances": instance_samples,
        "eps_samples": eps_samples,
        "proxy": proxy,
        "checked": checked,
        "violations": violations,
        "max_excess": max_excess,
        "seed": seed,
        "tol": tol,
    }
