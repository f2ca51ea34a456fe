"""Isomorphism of set families.

Two families are isomorphic when some bijection between their ground sets
carries members to members in both directions.  A general backtracking search
handles arbitrary families; maximal hke families get a constructive bijection
through their dual pairings, and a relabelling-invariant canonical string
supports hashing families up to isomorphism at desk scale.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial
from typing import Iterable

from .errors import AlphaMismatch, NotMaximal, TheoremViolation, TooLarge
from .families import SetFamily, label_sort_key
from .maximal import as_dual_pairing
from .verify import _require_hke

CANONICAL_UNIVERSE_CAP = 12
_CANONICAL_WORK_CAP = 5_000_000


@dataclass
class FamilyBijection:
    """A ground-set bijection carrying members to members both ways."""

    forward: dict[str, str]

    def inverse(self) -> dict[str, str]:
        return {v: k for k, v in self.forward.items()}

    def apply(self, labels: Iterable[str]) -> frozenset[str]:
        return frozenset(self.forward[lab] for lab in labels)

    def is_valid_for(self, first: SetFamily, second: SetFamily) -> bool:
        u1 = set(first.table.labels_of(first.union_all()))
        u2 = set(second.table.labels_of(second.union_all()))
        if set(self.forward) != u1 or set(self.forward.values()) != u2:
            return False
        if len(set(self.forward.values())) != len(self.forward):
            return False
        sets1 = set(first.labelsets())
        sets2 = set(second.labelsets())
        if any(self.apply(s) not in sets2 for s in sets1):
            return False
        inverse = self.inverse()
        return all(frozenset(inverse[lab] for lab in s) in sets1 for s in sets2)

    def as_dict(self) -> dict:
        ordered = sorted(self.forward.items(), key=lambda kv: label_sort_key(kv[0]))
        return {"forward": {k: v for k, v in ordered}}


def _element_signatures(family: SetFamily) -> dict[str, tuple[int, ...]]:
    """Per element, the sorted sizes of the members containing it."""
    sigs: dict[str, list[int]] = {}
    for labelset in family.labelsets():
        for lab in labelset:
            sigs.setdefault(lab, []).append(len(labelset))
    return {lab: tuple(sorted(sizes)) for lab, sizes in sigs.items()}


def are_isomorphic(first: SetFamily, second: SetFamily) -> FamilyBijection | None:
    """First witnessing bijection in canonical backtracking order, or None."""
    if len(first) != len(second):
        return None
    sets1 = list(first.labelsets())
    sets2 = set(second.labelsets())
    elems1 = sorted({lab for s in sets1 for lab in s}, key=label_sort_key)
    elems2 = sorted({lab for s in sets2 for lab in s}, key=label_sort_key)
    if len(elems1) != len(elems2):
        return None
    if sorted(len(s) for s in sets1) != sorted(len(s) for s in sets2):
        return None
    sig1 = _element_signatures(first)
    sig2 = _element_signatures(second)
    if Counter(sig1.values()) != Counter(sig2.values()):
        return None

    candidates = {u: [v for v in elems2 if sig2[v] == sig1[u]] for u in elems1}
    # most constrained elements first; canonical order breaks ties
    order = sorted(elems1, key=lambda u: (len(candidates[u]), label_sort_key(u)))
    containing = {u: [s for s in sets1 if u in s] for u in elems1}

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def fits(u: str) -> bool:
        for s in containing[u]:
            image = {mapping[w] for w in s if w in mapping}
            if not any(len(t) == len(s) and image <= t for t in sets2):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return all(frozenset(mapping[w] for w in s) in sets2 for s in sets1)
        u = order[i]
        for v in candidates[u]:
            if v in used:
                continue
            mapping[u] = v
            used.add(v)
            if fits(u) and search(i + 1):
                return True
            del mapping[u]
            used.discard(v)
        return False

    if search(0):
        return FamilyBijection(dict(mapping))
    return None


def maximal_iso(first: SetFamily, second: SetFamily) -> FamilyBijection:
    """Constructive bijection between two maximal hke families of equal alpha.

    The first members are matched in canonical label order and the map extends
    dual-to-dual; the result is validated before being returned.
    """
    a1 = _require_hke(first)
    a2 = _require_hke(second)
    if len(first) != 1 << a1 or len(second) != 1 << a2:
        raise NotMaximal("both families must be maximal hke collections")
    if a1 != a2:
        raise AlphaMismatch(f"cardinalities differ: {a1} vs {a2}")
    pairing1 = as_dual_pairing(first)
    pairing2 = as_dual_pairing(second)
    base1 = sorted(first.labelset(0), key=label_sort_key)
    base2 = sorted(second.labelset(0), key=label_sort_key)
    forward = dict(zip(base1, base2))
    for x in base1:
        forward[pairing1.partner(x)] = pairing2.partner(forward[x])
    bijection = FamilyBijection(forward)
    if not bijection.is_valid_for(first, second):
        raise TheoremViolation("dual-extension map failed to carry members to members")
    return bijection


def _stable_colors(members: list[frozenset[int]], n: int) -> list[str]:
    """Relabelling-invariant element colors by iterated incidence refinement."""
    containing = [[m for m in members if e in m] for e in range(n)]
    colors = [repr(tuple(sorted(len(m) for m in containing[e]))) for e in range(n)]
    for _ in range(n):
        member_color = {}
        for idx, m in enumerate(members):
            member_color[idx] = repr((len(m), tuple(sorted(colors[e] for e in m))))
        new = [
            repr((colors[e], tuple(sorted(member_color[i] for i, m in enumerate(members) if e in m))))
            for e in range(n)
        ]
        if _partition_of(new) == _partition_of(colors):
            break
        colors = new
    return colors


def _partition_of(colors: list[str]) -> set[frozenset[int]]:
    groups: dict[str, set[int]] = {}
    for e, c in enumerate(colors):
        groups.setdefault(c, set()).add(e)
    return {frozenset(g) for g in groups.values()}


def canonical_form(family: SetFamily) -> str:
    """A relabelling-invariant text: equal strings iff isomorphic families.

    Minimises the rendered member list over all colour-respecting bijections,
    so the cost is the product of the factorials of the refinement classes;
    highly symmetric families hit the work cap well before the universe cap.
    Declared extra labels are ignored, matching isomorphism semantics.
    """
    union_labels = sorted(family.table.labels_of(family.union_all()), key=label_sort_key)
    n = len(union_labels)
    if n > CANONICAL_UNIVERSE_CAP:
        raise TooLarge(f"canonical form supports ground sets up to {CANONICAL_UNIVERSE_CAP} elements")
    local = {lab: i for i, lab in enumerate(union_labels)}
    members = [frozenset(local[lab] for lab in s) for s in family.labelsets()]
    colors = _stable_colors(members, n)

    groups: dict[str, list[int]] = {}
    for e, c in enumerate(colors):
        groups.setdefault(c, []).append(e)
    classes = [sorted(groups[c]) for c in sorted(groups)]

    work = 1
    for cls in classes:
        work *= factorial(len(cls))
        if work > _CANONICAL_WORK_CAP:
            raise TooLarge("too many colour-respecting relabellings; family is too symmetric for exact canonicalisation")

    best: tuple | None = None
    for arrangement in product(*(permutations(cls) for cls in classes)):
        position: dict[int, int] = {}
        pos = 0
        for block in arrangement:
            for e in block:
                position[e] = pos
                pos += 1
        key = tuple(sorted(tuple(sorted(position[e] for e in m)) for m in members))
        if best is None or key < best:
            best = key
    assert best is not None
    lines = [" ".join(str(i + 1) for i in member) for member in best]
    return "\n".join(lines) + "\n"
