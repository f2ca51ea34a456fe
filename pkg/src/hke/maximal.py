"""Maximal hke collections: the typical example, restriction maps, the dual
pairing, constructive single-set extension, and completion.

For a fixed alpha, the typical collection is the family of all subsets S of
{1..2a} with i in S exactly when i+a is not; it is hke with 2^a members and,
up to isomorphism, it is the only maximal hke collection.  An hke family is
maximal exactly when |F| = 2^alpha, exactly when the restriction map
D -> A & D is onto the power set of any fixed member A, and exactly when the
singleton-difference relation pairs the ground set into alpha two-element
classes whose transversals are precisely the members.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .errors import (
    AlphaOutOfRange,
    NotASubset,
    NotMaximal,
    PreconditionFailed,
    TheoremViolation,
    UnknownLabel,
)
from .families import (
    ElementSet,
    ElementTable,
    SetFamily,
    alpha_of,
    bit_indices,
    label_sort_key,
)
from .verify import _require_hke

TYPICAL_ALPHA_CAP = 7


@dataclass(frozen=True)
class DualPairing:
    """The partition of the ground set into alpha two-element dual classes."""

    alpha: int
    classes: tuple[tuple[str, str], ...]

    def partner(self, label: str) -> str:
        for x, y in self.classes:
            if label == x:
                return y
            if label == y:
                return x
        raise UnknownLabel(f"label {label!r} is not in any dual class")

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "classes": [list(pair) for pair in self.classes]}


@dataclass(frozen=True)
class RestrictionMap:
    """The map D -> A & D from the family into the power set of member A."""

    base: int
    values: tuple[ElementSet, ...]
    injective: bool
    surjective: bool


@dataclass(frozen=True)
class Extension:
    """Result of appending a constructed set: the grown family and the new
    member's position (the position of the existing member when the
    construction lands on one)."""

    family: SetFamily
    index: int

    @property
    def added(self) -> ElementSet:
        return self.family.members[self.index]

    @property
    def added_labels(self) -> frozenset[str]:
        return self.family.labelset(self.index)


def typical_collection(alpha: int) -> SetFamily:
    """All subsets S of {1..2a} with i in S iff i+a not in S, for i <= a.

    Members come out in lexicographic order of their sorted index tuples.
    """
    if not 1 <= alpha <= TYPICAL_ALPHA_CAP:
        raise AlphaOutOfRange(f"alpha must be between 1 and {TYPICAL_ALPHA_CAP}, got {alpha}")
    table = ElementTable([str(i) for i in range(1, 2 * alpha + 1)])
    index_sets = []
    for choice in range(1 << alpha):
        idxs = tuple(i + alpha if choice >> i & 1 else i for i in range(alpha))
        index_sets.append(tuple(sorted(idxs)))
    index_sets.sort()
    members = [ElementSet.from_indices(2 * alpha, idxs) for idxs in index_sets]
    return SetFamily(table, members)


def restriction_map(family: SetFamily, base: int) -> RestrictionMap:
    """Intersect every member with member `base`; injective on any hke family,
    bijective onto the power set exactly for maximal ones."""
    _require_hke(family)
    a = family.member(base)
    values = tuple(a & m for m in family.members)
    injective = len({v.mask for v in values}) == len(values)
    surjective = injective and len(values) == 1 << len(a)
    return RestrictionMap(base, values, injective, surjective)


def _singleton_difference_pairs(family: SetFamily) -> tuple[tuple[str, str], ...]:
    """Unordered label pairs {x, y} with A - D = {x} and D - A = {y} for some
    members A, D.  Pure scan; no hke assumption."""
    masks = family.member_masks
    table = family.table
    pairs: set[tuple[str, str]] = set()
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            d1 = masks[i] & ~masks[j]
            d2 = masks[j] & ~masks[i]
            if d1.bit_count() == 1 and d2.bit_count() == 1:
                x = table.label(d1.bit_length() - 1)
                y = table.label(d2.bit_length() - 1)
                pair = tuple(sorted((x, y), key=label_sort_key))
                pairs.add(pair)
    return tuple(sorted(pairs, key=lambda p: (label_sort_key(p[0]), label_sort_key(p[1]))))


def dual_relation(family: SetFamily) -> tuple[tuple[str, str], ...]:
    """All non-reflexive dual pairs of an hke family."""
    _require_hke(family)
    return _singleton_difference_pairs(family)


def as_dual_pairing(family: SetFamily) -> DualPairing:
    """The validated dual pairing of a maximal hke family."""
    alpha = _require_hke(family)
    if len(family) != 1 << alpha:
        raise NotMaximal(f"family has {len(family)} members, a maximal one has {1 << alpha}")
    pairs = _singleton_difference_pairs(family)
    covered: set[str] = set()
    for x, y in pairs:
        if x in covered or y in covered:
            raise NotMaximal("dual pairs overlap; the relation does not partition the ground set")
        covered.update((x, y))
    union_labels = set(family.table.labels_of(family.union_all()))
    if len(pairs) != alpha or covered != union_labels:
        raise NotMaximal("dual pairs do not partition the ground set into alpha two-element classes")
    return DualPairing(alpha, pairs)


def _fresh_labels(table: ElementTable, count: int) -> list[str]:
    """The `count` smallest non-negative integers unused as numeric labels."""
    used = set()
    for lab in table.labels:
        key = label_sort_key(lab)
        if key[0] == 0:
            used.add(key[1])
    out: list[str] = []
    value = 0
    while len(out) < count:
        if value not in used:
            out.append(str(value))
        value += 1
    return out


def _extend_core(family: SetFamily, base: int, e_mask: int, alpha: int) -> Extension:
    """Construct D with A & D = E for an hke family (assumed, not re-checked).

    Elements of E are grouped by the exact subcollection containing them; each
    group of size e whose subcollection is proper removes the e lowest
    canonical elements of the mirror-difference set from the complement part
    of D, and |inter(F) - E| fresh labels complete the cardinality.
    """
    masks = family.member_masks
    table = family.table
    k = len(masks)
    a_mask = masks[base]
    union_mask = 0
    inter_mask = (1 << family.universe_size) - 1
    for m in masks:
        union_mask |= m
        inter_mask &= m

    groups: dict[int, int] = {}
    bits = e_mask
    while bits:
        low = bits & -bits
        bits ^= low
        sig = 0
        for j, m in enumerate(masks):
            if m & low:
                sig |= 1 << j
        groups[sig] = groups.get(sig, 0) + 1

    full_members = (1 << k) - 1
    removed = 0
    for sig, count in groups.items():
        if sig == full_members:
            continue
        u1 = 0
        i2 = (1 << family.universe_size) - 1
        for j, m in enumerate(masks):
            if sig >> j & 1:
                u1 |= m
            else:
                i2 &= m
        target = i2 & ~u1
        chosen = 0
        for idx in table.canonical_order():
            if target >> idx & 1:
                chosen |= 1 << idx
                count -= 1
                if count == 0:
                    break
        if count:
            raise TheoremViolation("mirror-difference set smaller than its group; input was not hke")
        removed |= chosen

    core_count = (inter_mask & ~e_mask).bit_count()
    fresh = _fresh_labels(table, core_count)
    existing = e_mask | (union_mask & ~a_mask & ~removed)
    d_labels = [table.label(i) for i in bit_indices(existing)]
    d_labels.extend(fresh)
    grown, index = family.with_labelset(d_labels)
    if len(grown.members[index]) != alpha:
        raise TheoremViolation("constructed set does not have cardinality alpha; input was not hke")
    return Extension(grown, index)


def extend(family: SetFamily, base: int, subset: ElementSet | Iterable[str]) -> Extension:
    """Append a set D with A & D = E, keeping the family hke.

    E must be a subset of member `base`.  The construction satisfies
    |D - union(F)| = |inter(F) - E|, so when the family's intersection is
    empty D stays inside the current ground set.
    """
    alpha = _require_hke(family)
    a = family.member(base)
    if isinstance(subset, ElementSet):
        e = subset
        if e.universe_size != family.universe_size:
            raise ValueError("subset lives over a different universe")
    else:
        e = family.table.set_of(subset)
    if not e.issubset(a):
        raise NotASubset("the requested trace is not a subset of the base member")
    return _extend_core(family, base, e.mask, alpha)


def _first_missing_submask(a_mask: int, image: set[int]) -> int:
    positions = bit_indices(a_mask)
    t = len(positions)
    for j in range(1 << t):
        sub = 0
        jj = j
        while jj:
            low = jj & -jj
            sub |= 1 << positions[low.bit_length() - 1]
            jj ^= low
        if sub not in image:
            return sub
    raise TheoremViolation("restriction map already surjective; nothing to extend")


def complete_to_maximal(family: SetFamily) -> SetFamily:
    """Grow an hke family to the maximal one with 2^alpha members.

    First, if the members share a core, one core-free twin of the first member
    is added (fresh labels replace the core), which empties the intersection.
    Then, repeatedly, the smallest-bitmask subset of the first member missing
    from its restriction image is realised through the extension construction.
    The result is unique up to isomorphism.
    """
    alpha = _require_hke(family)
    if alpha > TYPICAL_ALPHA_CAP:
        raise AlphaOutOfRange(f"completion supports alpha up to {TYPICAL_ALPHA_CAP}, got {alpha}")
    fam = family
    core = fam.intersection_all()
    if not core.is_empty:
        stripped = fam.member(0) - core
        fresh = _fresh_labels(fam.table, len(core))
        twin_labels = [fam.table.label(i) for i in stripped.indices()] + fresh
        fam, _ = fam.with_labelset(twin_labels)
        if not fam.intersection_all().is_empty:
            raise TheoremViolation("core-free twin did not empty the intersection")
    target = 1 << alpha
    while len(fam) < target:
        a_mask = fam.member_masks[0]
        image = {a_mask & m for m in fam.member_masks}
        e_mask = _first_missing_submask(a_mask, image)
        fam = _extend_core(fam, 0, e_mask, alpha).family
    return fam


def is_maximal(family: SetFamily) -> bool:
    """An hke family is maximal exactly when it has 2^alpha members."""
    alpha = _require_hke(family)
    return len(family) == 1 << alpha


def characterize_maximal(family: SetFamily) -> bool:
    """Structural test for maximality, with no hke verification.

    True exactly when the ground set has 2*alpha elements, the
    singleton-difference pairs partition it into alpha two-element classes,
    and the members are precisely the transversals of those classes.  Agrees
    with is_maximal on every hke input.
    """
    alpha = alpha_of(family)
    union = family.union_all()
    if len(union) != 2 * alpha:
        return False
    pairs = _singleton_difference_pairs(family)
    covered: set[str] = set()
    for x, y in pairs:
        if x in covered or y in covered:
            return False
        covered.update((x, y))
    if len(pairs) != alpha or covered != set(family.table.labels_of(union)):
        return False
    if len(family) != 1 << alpha:
        return False
    transversals = {frozenset(pick) for pick in product(*pairs)}
    return set(family.labelsets()) == transversals


def dual_membership_test(family: SetFamily, x: str, y: str) -> bool:
    """Whether x and y are dual in a maximal hke family.

    Evaluates three equivalent conditions (dual pair, every member meets
    {x, y}, no member contains {x, y}) and returns their shared value.
    """
    alpha = _require_hke(family)
    if len(family) != 1 << alpha:
        raise NotMaximal(f"family has {len(family)} members, a maximal one has {1 << alpha}")
    if x == y:
        raise PreconditionFailed("the two labels must differ")
    union_labels = family.table.labels_of(family.union_all())
    if x not in union_labels or y not in union_labels:
        raise UnknownLabel(f"labels must lie in the ground set; got {x!r}, {y!r}")
    pairing = as_dual_pairing(family)
    are_dual = pairing.partner(x) == y
    bx = 1 << family.table.index_of(x)
    by = 1 << family.table.index_of(y)
    meets_all = all(m & (bx | by) for m in family.member_masks)
    contains_none = not any(m & bx and m & by for m in family.member_masks)
    if not (are_dual == meets_all == contains_none):
        raise TheoremViolation("the three dual-membership conditions disagreed")
    return are_dual
