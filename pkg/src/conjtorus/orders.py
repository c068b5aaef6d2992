"""Orders on the index lattice and their signum functions.

Three order variants are representable: the reversed lexicographic order
(sign of the last nonzero coordinate), its sign-twisted variants, and
orders induced by an integer-weight homomorphism into the reals.  The
``separating_homomorphism`` constructor produces, for a finite index set,
integer weights whose induced signs agree with a given order on that set.

All sign evaluation is exact integer arithmetic; nothing here touches
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
import warnings

from .indices import Index, last_nonzero

__all__ = [
    "RevLex",
    "SignTwisted",
    "Homomorphism",
    "DegenerateOrderError",
    "eps_at",
    "sgn_order",
    "twist",
    "separating_homomorphism",
    "verify_separation",
    "order_to_json",
    "order_from_json",
]

# Weights beyond one machine word mean the requested index set is far past
# desk scale; arithmetic stays exact (Python ints) but we flag it.
_WORD_LIMIT = 1 << 63


class DegenerateOrderError(ValueError):
    """A homomorphism order evaluated to 0 on a nonzero index."""


def _validate_signs(eps):
    eps = tuple(int(e) for e in eps)
    if any(e not in (-1, 1) for e in eps):
        raise ValueError("sign sequence entries must be -1 or +1")
    return eps


def eps_at(eps, n: int) -> int:
    """Entry n (1-based) of a sign sequence; +1 beyond its stored length."""
    if n < 1:
        raise ValueError("sign sequences are indexed from 1")
    return eps[n - 1] if n <= len(eps) else 1


@dataclass(frozen=True)
class RevLex:
    """Reversed lexicographic order: positive iff the last nonzero entry is."""


@dataclass(frozen=True)
class SignTwisted:
    """Reversed lexicographic order twisted by a sign sequence."""

    eps: tuple

    def __post_init__(self):
        object.__setattr__(self, "eps", _validate_signs(self.eps))


@dataclass(frozen=True)
class Homomorphism:
    """Order induced by integer weights: sign of sum_n j_n * w_n."""

    weights: tuple

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        if any(x == 0 for x in w):
            raise ValueError("homomorphism weights must be nonzero")
        object.__setattr__(self, "weights", w)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def sgn_order(order, index) -> int:
    """Signum of an index under an order: -1, 0 or +1 (0 only for J = 0)."""
    index = Index(index)
    if isinstance(order, RevLex):
        return _sign(index[-1]) if index else 0
    if isinstance(order, SignTwisted):
        if not index:
            return 0
        return eps_at(order.eps, len(index)) * _sign(index[-1])
    if isinstance(order, Homomorphism):
        if len(order.weights) < len(index):
            raise ValueError(
                f"weights cover {len(order.weights)} coordinates but the index "
                f"is supported on {len(index)}"
            )
        value = sum(j * w for j, w in zip(index, order.weights))
        if value == 0 and index:
            raise DegenerateOrderError(
                f"weights {order.weights} vanish on nonzero index {list(index)}"
            )
        return _sign(value)
    raise TypeError(f"not an order: {order!r}")


def twist(eps) -> SignTwisted:
    """The sign-twisted variant of the reversed lexicographic order."""
    return SignTwisted(tuple(eps))


def separating_homomorphism(indices, order=RevLex()) -> tuple:
    """Integer weights whose induced signs match ``order`` on ``indices``.

    Construction: with B the largest absolute coordinate over the set, pick
    |w_1| = 1 and |w_{k+1}| = 1 + B * (|w_1| + ... + |w_k|), giving each
    w_k the k-th twist sign.  The last-coordinate term then dominates every
    weighted sum, so the induced sign equals the (twisted) reversed
    lexicographic sign on the whole set.
    """
    if isinstance(order, RevLex):
        eps = ()
    elif isinstance(order, SignTwisted):
        eps = order.eps
    else:
        raise ValueError("only RevLex and SignTwisted orders have a closed-form separation")
    idx = [Index(J) for J in indices]
    m = max((len(J) for J in idx), default=0)
    if m == 0:
        return (1,)
    bound = max(max((abs(e) for e in J), default=0) for J in idx)
    bound = max(bound, 1)
    weights = []
    total = 0
    for k in range(1, m + 1):
        mag = 1 if k == 1 else 1 + bound * total
        weights.append(eps_at(eps, k) * mag)
        total += mag
    if any(abs(w) >= _WORD_LIMIT for w in weights):
        warnings.warn(
            "separating weights exceed one machine word; results stay exact "
            "but the index set is beyond desk scale",
            stacklevel=2,
        )
    return tuple(weights)


def verify_separation(indices, weights, order) -> bool:
    """Exact check that sign(sum j_n w_n) matches the order sign on a set."""
    weights = tuple(int(w) for w in weights)
    for J in indices:
        J = Index(J)
        if len(weights) < len(J):
            raise ValueError("weights do not cover the support of the index set")
        value = sum(j * w for j, w in zip(J, weights))
        if _sign(value) != sgn_order(order, J):
            return False
    return True


def order_to_json(order) -> dict:
    if isinstance(order, RevLex):
        return {"kind": "revlex"}
    if isinstance(order, SignTwisted):
        return {"kind": "twist", "eps": list(order.eps)}
    if isinstance(order, Homomorphism):
        return {"kind": "hom", "w": list(order.weights)}
    raise TypeError(f"not an order: {order!r}")


def order_from_json(obj) -> object:
    try:
        kind = obj["kind"]
        if kind == "revlex":
            return RevLex()
        if kind == "twist":
            return SignTwisted(tuple(obj["eps"]))
        if kind == "hom":
            return Homomorphism(tuple(obj["w"]))
    except (TypeError, KeyError) as exc:
        raise ValueError(f"malformed order object: {obj!r}") from exc
    raise ValueError(f"unknown order kind: {kind!r}")
