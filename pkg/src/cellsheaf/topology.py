"""The Alexandrov topology of a finite preorder.

Open sets are exactly the up-closed subsets; the open stars U_x = {y : x <= y}
form a basis, and arbitrary intersections of opens stay open. Everything is
stored explicitly as member sets, which keeps containment and equality plain
set operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import EnumerationLimitError, NotOpenError
from .order import MonotoneMap, PreOrder, quotient_to_poset

DEFAULT_MAX_ELEMENTS = 20


@dataclass(frozen=True)
class OpenSet:
    """An up-closed subset of a preorder; construction validates up-closure."""

    space: PreOrder
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        witness = open_violation(self.space, self.members)
        if witness is not None:
            raise NotOpenError(*witness)

    @property
    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members, key=self.space.index))

    def sort_key(self) -> tuple:
        return (len(self.members), self.space.sort_key(self.members))

    def union(self, other: "OpenSet") -> "OpenSet":
        return OpenSet(self.space, self.members | other.members)

    def intersection(self, other: "OpenSet") -> "OpenSet":
        return OpenSet(self.space, self.members & other.members)

    def __contains__(self, x) -> bool:
        return x in self.members

    def __le__(self, other: "OpenSet") -> bool:
        return self.members <= other.members

    def __repr__(self):
        return "{" + ", ".join(self.sorted_members) + "}"


def open_violation(space: PreOrder, members: Iterable[str]) -> tuple[str, str] | None:
    """A witness (x, y) with x in the set, x <= y, y missing; None if open."""
    members = frozenset(members)
    for x in sorted(members, key=space.index):
        for y in sorted(space.up_set(x), key=space.index):
            if y not in members:
                return (x, y)
    return None


def is_open(space: PreOrder, members: Iterable[str]) -> bool:
    return open_violation(space, members) is None


def open_star(space: PreOrder, x: str) -> OpenSet:
    """The smallest open set containing x: everything above x."""
    return OpenSet(space, space.up_set(x))


def closure_of_point(space: PreOrder, x: str) -> frozenset:
    """The closure of {x}: everything below x."""
    return space.down_set(x)


def empty_open(space: PreOrder) -> OpenSet:
    return OpenSet(space, frozenset())


def whole_space(space: PreOrder) -> OpenSet:
    return OpenSet(space, frozenset(space.elements))


def union_of_stars(space: PreOrder, points: Iterable[str]) -> OpenSet:
    members: frozenset = frozenset()
    for x in points:
        members |= space.up_set(x)
    return OpenSet(space, members)


@dataclass(frozen=True)
class BasisIndex:
    """The star centers x whose basic open U_x sits inside a given open."""

    open: OpenSet
    stars: tuple[str, ...]


def basis_index(U: OpenSet) -> BasisIndex:
    # In an Alexandrov space U_x is contained in the open U exactly when
    # x is a member, so no star containment scan is needed; the naive scan
    # is kept below as basis_index_by_scan for cross-checking.
    return BasisIndex(U, U.sorted_members)


def basis_index_by_scan(U: OpenSet) -> BasisIndex:
    space = U.space
    stars = tuple(
        x for x in space.elements if space.up_set(x) <= U.members
    )
    return BasisIndex(U, stars)


def check_index_lemma(U1: OpenSet, U2: OpenSet) -> tuple[bool, bool, bool]:
    """Truth of the three index-set laws for a pair of opens.

    Writing I(U) for the star centers x with star(x) contained in U,
    computed by the literal containment scan:
    (i)   U1 contained in U2   iff   I(U1) contained in I(U2)
    (ii)  U1 equals U2         iff   I(U1) equals I(U2)
    (iii) I(intersection) equals the intersection of the index sets
    """
    space = U1.space
    i1 = set(basis_index_by_scan(U1).stars)
    i2 = set(basis_index_by_scan(U2).stars)
    inter = OpenSet(space, U1.members & U2.members)
    i_inter = set(basis_index_by_scan(inter).stars)
    law_i = (U1.members <= U2.members) == (i1 <= i2)
    law_ii = (U1.members == U2.members) == (i1 == i2)
    law_iii = i_inter == (i1 & i2)
    return (law_i, law_ii, law_iii)


def enumerate_opens(space: PreOrder, max_elements: int = DEFAULT_MAX_ELEMENTS) -> list[OpenSet]:
    """All open sets, sorted by (size, member indices).

    Up-sets of a preorder are unions of mutual-comparability classes, so the
    enumeration runs on the poset quotient and maps classes back. The count
    is the number of antichains of the quotient, hence the size guard.
    """
    n = len(space)
    if n > max_elements:
        raise EnumerationLimitError(n, max_elements)
    q = quotient_to_poset(space)
    poset = q.quotient
    members_of = {cls[0]: frozenset(cls) for cls in q.classes}
    # process maximal representatives first so that including an element
    # only requires its already-decided strict successors to be present
    order = sorted(
        poset.elements, key=lambda e: (len(poset.down_set(e)), poset.index(e)),
        reverse=True,
    )
    strict_up = {e: poset.up_set(e) - {e} for e in poset.elements}
    found: list[frozenset] = []

    def extend(i: int, current: set[str]):
        if i == len(order):
            total: frozenset = frozenset()
            for rep in current:
                total |= members_of[rep]
            found.append(total)
            return
        e = order[i]
        extend(i + 1, current)
        if strict_up[e] <= current:
            current.add(e)
            extend(i + 1, current)
            current.remove(e)

    extend(0, set())
    opens = [OpenSet(space, m) for m in found]
    opens.sort(key=OpenSet.sort_key)
    return opens


def is_continuous(f: MonotoneMap, max_elements: int = DEFAULT_MAX_ELEMENTS) -> bool:
    """Whether preimages of opens are open; true for every monotone map."""
    for V in enumerate_opens(f.target, max_elements):
        preimage = frozenset(x for x in f.source.elements if f.mapping[x] in V.members)
        if not is_open(f.source, preimage):
            return False
    return True
