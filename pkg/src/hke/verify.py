"""Deciders for the KE and hereditary-KE (hke) collection properties.

A relevant collection F (all members of one cardinality alpha) is a KE
collection when |union(F)| + |inter(F)| = 2*alpha, and an hke collection when
that equality holds for every non-empty subcollection.  The same property can
be decided through the difference equality

    |inter(G1) - union(G2)| = |inter(G2) - union(G1)|

quantified over disjoint non-empty pairs (G1, G2), or only over two-block
partitions of F; all three deciders here return the same bit, and the
partition form needs no relevance assumption up front.

Failing verdicts carry a minimal witness: the first violating subcollection
mask, or the first violating (mask1, mask2) pair, in increasing mask order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from .errors import (
    EmptySelector,
    IndexOutOfRange,
    NotHke,
    NotRelevant,
    OverlappingSelectors,
    TheoremViolation,
    TooLarge,
    TooSmall,
)
from .families import (
    SUBCOLLECTION_CAP,
    ElementSet,
    Selector,
    SetFamily,
    _check_selector,
    alpha_of,
    label_sort_key,
)

PAIRWISE_CAP = 16

MODE_KE = "ke"
MODE_DEFINITION = "definition"
MODE_PAIRWISE = "pairwise"
MODE_PARTITION = "partition"


@dataclass(frozen=True)
class HkeVerdict:
    """Outcome of one checker: the bit, the common cardinality when it exists,
    and a re-checkable witness when the property fails."""

    holds: bool
    mode: str
    alpha: int | None
    witness: Selector | tuple[Selector, Selector] | None = None

    def as_dict(self) -> dict:
        if self.witness is None:
            witness = None
        elif isinstance(self.witness, Selector):
            witness = {"gamma": list(self.witness.indices())}
        else:
            g1, g2 = self.witness
            witness = {"gamma1": list(g1.indices()), "gamma2": list(g2.indices())}
        return {"holds": self.holds, "alpha": self.alpha, "mode": self.mode, "witness": witness}


def _alpha_or_none(family: SetFamily) -> int | None:
    try:
        return alpha_of(family)
    except NotRelevant:
        return None


def check_ke(family: SetFamily) -> HkeVerdict:
    """Non-hereditary check: |union(F)| + |inter(F)| = 2*alpha for F itself."""
    alpha = alpha_of(family)
    total = len(family.union_all()) + len(family.intersection_all())
    if total == 2 * alpha:
        return HkeVerdict(True, MODE_KE, alpha)
    witness = Selector((1 << len(family)) - 1)
    return HkeVerdict(False, MODE_KE, alpha, witness)


def _first_definition_violation(masks: Sequence[int], target: int, universe_mask: int) -> int | None:
    """First non-empty member mask, in increasing numeric order, whose
    subcollection violates |union| + |inter| = target."""

    def rec(bit: int, chosen: int, union: int, inter: int) -> int | None:
        if bit < 0:
            if chosen and union.bit_count() + inter.bit_count() != target:
                return chosen
            return None
        hit = rec(bit - 1, chosen, union, inter)
        if hit is not None:
            return hit
        m = masks[bit]
        return rec(bit - 1, chosen | (1 << bit), union | m, inter & m)

    return rec(len(masks) - 1, 0, 0, universe_mask)


def check_hke_definition(family: SetFamily) -> HkeVerdict:
    """Sweep every non-empty subcollection against the defining equality."""
    if len(family) > SUBCOLLECTION_CAP:
        raise TooLarge(f"definition check sweeps 2^{len(family)} subcollections; cap is {SUBCOLLECTION_CAP} members")
    alpha = alpha_of(family)
    universe_mask = (1 << family.universe_size) - 1
    bad = _first_definition_violation(family.member_masks, 2 * alpha, universe_mask)
    if bad is None:
        return HkeVerdict(True, MODE_DEFINITION, alpha)
    return HkeVerdict(False, MODE_DEFINITION, alpha, Selector(bad))


def equality1_holds(family: SetFamily, first: Selector, second: Selector) -> bool:
    """Truth of |inter(G1) - union(G2)| = |inter(G2) - union(G1)| for two
    non-empty disjoint subcollections."""
    _check_selector(family, first)
    _check_selector(family, second)
    if first.mask & second.mask:
        raise OverlappingSelectors("the two subcollections share a member")
    u1, i1 = _union_inter(family.member_masks, first.mask, family.universe_size)
    u2, i2 = _union_inter(family.member_masks, second.mask, family.universe_size)
    return (i1 & ~u2).bit_count() == (i2 & ~u1).bit_count()


def _union_inter(masks: Sequence[int], sel: int, universe_size: int) -> tuple[int, int]:
    union = 0
    inter = (1 << universe_size) - 1
    m = sel
    while m:
        low = m & -m
        mask = masks[low.bit_length() - 1]
        union |= mask
        inter &= mask
        m ^= low
    return union, inter


def _union_inter_tables(masks: Sequence[int], universe_mask: int) -> tuple[list[int], list[int]]:
    """union/intersection of every subcollection mask, by lowest-bit recurrence."""
    size = 1 << len(masks)
    uni = [0] * size
    inter = [universe_mask] * size
    for m in range(1, size):
        low = m & -m
        rest = m ^ low
        mask = masks[low.bit_length() - 1]
        uni[m] = uni[rest] | mask
        inter[m] = inter[rest] & mask
    return uni, inter


def check_hke_pairwise(family: SetFamily) -> HkeVerdict:
    """Quantify the difference equality over all disjoint non-empty pairs."""
    k = len(family)
    if k > PAIRWISE_CAP:
        raise TooLarge(f"pairwise check enumerates 3^{k} pairs; cap is {PAIRWISE_CAP} members")
    alpha = alpha_of(family)
    universe_mask = (1 << family.universe_size) - 1
    uni, inter = _union_inter_tables(family.member_masks, universe_mask)
    full = (1 << k) - 1
    for m1 in range(1, full + 1):
        comp = full ^ m1
        if not comp:
            continue
        bits = []
        c = comp
        while c:
            low = c & -c
            bits.append(low.bit_length() - 1)
            c ^= low
        i1 = inter[m1]
        u1 = uni[m1]
        for j in range(1, 1 << len(bits)):
            m2 = 0
            jj = j
            while jj:
                lowj = jj & -jj
                m2 |= 1 << bits[lowj.bit_length() - 1]
                jj ^= lowj
            if (i1 & ~uni[m2]).bit_count() != (inter[m2] & ~u1).bit_count():
                return HkeVerdict(False, MODE_PAIRWISE, alpha, (Selector(m1), Selector(m2)))
    return HkeVerdict(True, MODE_PAIRWISE, alpha)


def check_hke_partition(family: SetFamily) -> HkeVerdict:
    """Quantify the difference equality over two-block partitions only.

    No relevance precondition: passing already forces all members to share one
    cardinality, which is confirmed after the sweep.
    """
    k = len(family)
    if k > SUBCOLLECTION_CAP:
        raise TooLarge(f"partition check sweeps 2^{k} partitions; cap is {SUBCOLLECTION_CAP} members")
    universe_mask = (1 << family.universe_size) - 1
    masks = family.member_masks
    full = (1 << k) - 1
    if k >= 2:
        if k <= 18:
            uni, inter = _union_inter_tables(masks, universe_mask)
            for m1 in range(1, full):
                m2 = full ^ m1
                if (inter[m1] & ~uni[m2]).bit_count() != (inter[m2] & ~uni[m1]).bit_count():
                    alpha = _alpha_or_none(family)
                    return HkeVerdict(False, MODE_PARTITION, alpha, (Selector(m1), Selector(m2)))
        else:
            # beyond 2^18 partitions the tables would dominate memory
            for m1 in range(1, full):
                m2 = full ^ m1
                u1, i1 = _union_inter(masks, m1, family.universe_size)
                u2, i2 = _union_inter(masks, m2, family.universe_size)
                if (i1 & ~u2).bit_count() != (i2 & ~u1).bit_count():
                    alpha = _alpha_or_none(family)
                    return HkeVerdict(False, MODE_PARTITION, alpha, (Selector(m1), Selector(m2)))
    alpha = _alpha_or_none(family)
    if alpha is None:
        raise TheoremViolation("every partition balanced yet member cardinalities differ")
    return HkeVerdict(True, MODE_PARTITION, alpha)


def _require_hke(family: SetFamily) -> int:
    verdict = check_hke_definition(family)
    if not verdict.holds:
        raise NotHke("family is not an hke collection", verdict=verdict)
    return verdict.alpha


def _can_add_masks(member_masks: Sequence[int], alpha: int, new_mask: int, base: int = 0) -> bool:
    """Addition test for an hke family given as raw masks.

    Equivalent to re-running the definition sweep on the extended family, via
    the partition condition anchored at member `base`: grouping elements by
    the exact subcollection containing them turns the per-partition equalities
    into a comparison of two signature counters.
    """
    if new_mask.bit_count() != alpha:
        return False
    a_mask = member_masks[base]
    others = [m for i, m in enumerate(member_masks) if i != base]
    k = len(others)
    if k == 0:
        return True
    full = (1 << k) - 1
    union_members = 0
    for m in member_masks:
        union_members |= m

    left: dict[int, int] = {}
    x_bits = a_mask & new_mask
    while x_bits:
        low = x_bits & -x_bits
        x_bits ^= low
        sig = 0
        for j, m in enumerate(others):
            if m & low:
                sig |= 1 << j
        if sig != full:
            left[sig] = left.get(sig, 0) + 1

    right: dict[int, int] = {}
    y_bits = union_members & ~(a_mask | new_mask)
    while y_bits:
        low = y_bits & -y_bits
        y_bits ^= low
        sig = 0
        for j, m in enumerate(others):
            if m & low:
                sig |= 1 << j
        if sig:
            key = full ^ sig
            right[key] = right.get(key, 0) + 1

    return left == right


def _candidate_mask(family: SetFamily, candidate: ElementSet | Iterable[str]) -> tuple[SetFamily, int]:
    """Normalise a candidate set to a mask over the family's universe,
    extending the universe with any fresh labels (appended canonically).

    Returns the family re-based over the extended table plus the mask; when no
    fresh labels occur the family is returned unchanged."""
    if isinstance(candidate, ElementSet):
        if candidate.universe_size != family.universe_size:
            raise ValueError("candidate set lives over a different universe")
        return family, candidate.mask
    labels = list(candidate)
    fresh = sorted({lab for lab in labels if lab not in family.table}, key=label_sort_key)
    if not fresh:
        return family, family.table.set_of(labels).mask
    table = family.table.extended(fresh)
    members = [ElementSet(len(table), m) for m in family.member_masks]
    return SetFamily(table, members), table.set_of(labels).mask


def can_add(family: SetFamily, base: int, candidate: ElementSet | Iterable[str]) -> bool:
    """Whether appending the candidate set keeps the family hke.

    `base` anchors the partition condition at one member; any anchor gives the
    same answer.  The candidate may use labels outside the current universe.
    """
    family.member(base)
    alpha = _require_hke(family)
    rebased, new_mask = _candidate_mask(family, candidate)
    return _can_add_masks(rebased.member_masks, alpha, new_mask, base)


def exercise1_identities(family: SetFamily) -> bool:
    """Difference identities over ordered member triples and quadruples:
    |A-B-C| = |B&C-A|, and for four members |A&B-C-D| = |C&D-A-B|."""
    _require_hke(family)
    masks = family.member_masks
    k = len(masks)
    if k < 3:
        raise TooSmall("needs at least three members")
    for a, b, c in permutations(range(k), 3):
        ma, mb, mc = masks[a], masks[b], masks[c]
        if (ma & ~mb & ~mc).bit_count() != (mb & mc & ~ma).bit_count():
            return False
    if k >= 4:
        for a, b, c, d in permutations(range(k), 4):
            ma, mb, mc, md = masks[a], masks[b], masks[c], masks[d]
            if (ma & mb & ~mc & ~md).bit_count() != (mc & md & ~ma & ~mb).bit_count():
                return False
    return True
