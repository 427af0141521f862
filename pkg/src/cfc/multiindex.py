"""Multi-index combinatorics on Z^d.

Hyperbolic crosses, lower (downward closed) sets, reduced margins and
reflection families, all over signed integer frequency vectors.  Multi-indices
are plain tuples of ints; ``IndexSet`` wraps a finite collection of them
together with the ambient dimension.

The partial order used throughout compares absolute values componentwise:
``mu <= nu`` iff ``|mu_i| <= |nu_i|`` for every coordinate.  A set is *lower*
when it contains every index dominated by one of its members; lower sets of
Z^d are automatically symmetric under coordinate sign flips.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

MultiIndex = tuple

DEFAULT_CARDINALITY_CAP = 10_000_000


class IndexSetTooLarge(ValueError):
    """Raised when a requested index set would exceed the cardinality cap."""


class NotLowerError(ValueError):
    """Raised when an operation requires a lower set and the input is not one."""


@dataclass(frozen=True)
class IndexSet:
    """A finite set of equal-dimension multi-indices.

    Attributes
    ----------
    dimension : int
        Ambient dimension d >= 1.
    members : frozenset of tuple
        The indices, each a tuple of ``dimension`` signed ints.
    """

    dimension: int
    members: frozenset

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        for nu in self.members:
            if len(nu) != self.dimension:
                raise ValueError(f"index {nu} has dimension {len(nu)}, expected {self.dimension}")

    @classmethod
    def from_indices(cls, indices: Iterable[Sequence[int]], dimension: int | None = None) -> "IndexSet":
        members = frozenset(tuple(int(v) for v in nu) for nu in indices)
        if dimension is None:
            if not members:
                raise ValueError("dimension required for an empty index set")
            dimension = len(next(iter(members)))
        return cls(dimension=dimension, members=members)

    @classmethod
    def empty(cls, dimension: int) -> "IndexSet":
        return cls(dimension=dimension, members=frozenset())

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, nu) -> bool:
        return tuple(nu) in self.members

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.ordered())

    def ordered(self) -> list:
        """Members in canonical (lexicographic on signed entries) order."""
        return sorted(self.members)

    def to_text(self) -> str:
        lines = [f"d={self.dimension}"]
        lines.extend(" ".join(str(v) for v in nu) for nu in self.ordered())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IndexSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("d="):
            raise ValueError("index set text must start with a 'd=<dim>' header")
        dimension = int(lines[0][2:])
        members = [tuple(int(v) for v in ln.split()) for ln in lines[1:]]
        return cls.from_indices(members, dimension=dimension)


def hyperbolic_cross_cardinality_bound(d: int, n: int) -> float:
    """Upper bound min{4 n^5 16^d, e^2 n^(2 + log2 d)} on |HC(d, n)|."""
    log_b1 = math.log(4.0) + 5.0 * math.log(n) + d * math.log(16.0)
    log_b2 = 2.0 + (2.0 + math.log2(d)) * math.log(n)
    return math.exp(min(log_b1, log_b2))


def enumerate_hyperbolic_cross(d: int, n: int, cap: int = DEFAULT_CARDINALITY_CAP) -> list:
    """Enumerate the hyperbolic cross {nu in Z^d : prod_k (|nu_k| + 1) <= n}.

    Returns the indices in canonical lexicographic order.  Enumeration
    descends dimension by dimension with a running product budget, so the
    cost is proportional to the output size rather than to a box scan.

    Raises
    ------
    IndexSetTooLarge
        If the cardinality bound (or the actual count while enumerating)
        exceeds ``cap``.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    if hyperbolic_cross_cardinality_bound(d, n) > cap:
        raise IndexSetTooLarge(
            f"index set too large: cardinality bound for (d={d}, n={n}) exceeds cap {cap}"
        )
    out = []
    prefix = [0] * d

    def descend(k: int, budget: int):
        if k == d:
            out.append(tuple(prefix))
            if len(out) > cap:
                raise IndexSetTooLarge(f"index set too large: more than {cap} indices")
            return
        # signed values in increasing order keep the output lexicographic
        for v in range(-(budget - 1), budget):
            prefix[k] = v
            descend(k + 1, budget // (abs(v) + 1))

    descend(0, n)
    return out


def reflection_family(nu: Sequence[int]) -> list:
    """All sign variants of ``nu``: {mu : |mu_i| = |nu_i| for every i}.

    The family has cardinality 2^(number of nonzero entries).
    """
    nu = tuple(int(v) for v in nu)
    nz = [i for i, v in enumerate(nu) if v != 0]
    fam = []
    for signs in itertools.product((1, -1), repeat=len(nz)):
        mu = list(nu)
        for i, s in zip(nz, signs):
            mu[i] = s * abs(nu[i])
        fam.append(tuple(mu))
    return sorted(set(fam))


def _members_and_dim(S) -> tuple:
    if isinstance(S, IndexSet):
        return S.members, S.dimension
    members = frozenset(tuple(nu) for nu in S)
    if not members:
        raise ValueError("dimension cannot be inferred from an empty plain iterable")
    return members, len(next(iter(members)))


def _is_lower_members(members: frozenset, d: int) -> bool:
    # Predecessor-plus-flip characterization: single-coordinate sign flips and
    # single-step absolute decrements must stay inside the set.  Valid because
    # lower sets of Z^d are exactly the sets closed under both moves.
    for nu in members:
        for k in range(d):
            v = nu[k]
            if v == 0:
                continue
            flip = nu[:k] + (-v,) + nu[k + 1:]
            if flip not in members:
                return False
            step = nu[:k] + (v - (1 if v > 0 else -1),) + nu[k + 1:]
            if step not in members:
                return False
    return True


def is_lower(S) -> bool:
    """True iff S is a lower set of Z^d (contains all dominated indices)."""
    if isinstance(S, IndexSet) and not S.members:
        return True
    members, d = _members_and_dim(S)
    return _is_lower_members(members, d)


def _in_margin(nu: tuple, members: frozenset) -> bool:
    # nu is in the reduced margin of a lower set iff nu is outside the set and
    # every immediate predecessor (one absolute step down) is inside.
    if nu in members:
        return False
    for k, v in enumerate(nu):
        if v == 0:
            continue
        step = nu[:k] + (v - (1 if v > 0 else -1),) + nu[k + 1:]
        if step not in members:
            return False
    return True


def reduced_margin(S) -> IndexSet:
    """Reduced margin {nu not in S : every mu strictly below nu lies in S}.

    ``S`` must be lower; the margin of the empty set is {0}.
    """
    if isinstance(S, IndexSet):
        members, d = S.members, S.dimension
    else:
        members, d = _members_and_dim(S)
    if not members:
        return IndexSet.from_indices([(0,) * d], dimension=d)
    if not _is_lower_members(members, d):
        raise NotLowerError("not a lower set")
    margin = set()
    for nu in members:
        for k in range(d):
            for delta in (1, -1):
                cand = nu[:k] + (nu[k] + delta,) + nu[k + 1:]
                if cand not in members and cand not in margin and _in_margin(cand, members):
                    margin.add(cand)
    return IndexSet.from_indices(margin, dimension=d)


class AdaptiveIndexSet:
    """Single-owner lower set with an incrementally maintained reduced margin.

    Grows by whole reflection families picked from the margin, which is the
    update pattern of adaptive recovery.  After each growth step the margin is
    repaired locally (absorbed indices removed, neighbors of the new indices
    tested for eligibility) instead of being recomputed from scratch.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.members = set()
        self.margin = {(0,) * dimension}

    def __len__(self) -> int:
        return len(self.members)

    def margin_ordered(self) -> list:
        return sorted(self.margin)

    def members_ordered(self) -> list:
        return sorted(self.members)

    def as_index_set(self) -> IndexSet:
        return IndexSet.from_indices(self.members, dimension=self.dimension)

    def add_reflection_family(self, nu: Sequence[int]) -> list:
        """Add the reflection family of a margin element; return the new indices."""
        nu = tuple(int(v) for v in nu)
        if nu not in self.margin:
            raise ValueError(f"{nu} is not in the current reduced margin")
        fam = reflection_family(nu)
        new = [mu for mu in fam if mu not in self.members]
        self.members.update(new)
        self.margin.difference_update(new)
        d = self.dimension
        for mu in new:
            for k in range(d):
                for delta in (1, -1):
                    cand = mu[:k] + (mu[k] + delta,) + mu[k + 1:]
                    if cand not in self.members and cand not in self.margin \
                            and _in_margin(cand, self.members):
                        self.margin.add(cand)
        return sorted(new)
