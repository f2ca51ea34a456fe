"""Ground universes, bitmask sets, set families, and the family file format.

Labels are arbitrary non-whitespace tokens.  For canonical ordering, numeric
labels compare by value and all other labels lexicographically, so "10" comes
after "2" while "b10" still comes before "b2".  Sets are immutable bitmasks
over a dense index space owned by an ElementTable; all members of one family
share one table.

Family file format (UTF-8 text):
  - '#' starts a comment running to the end of the line,
  - blank lines are ignored,
  - an optional header line "universe: <lbl> <lbl> ..." declares ground
    elements that belong to no member,
  - every other line is one member set, written as whitespace-separated labels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    DuplicateSet,
    EmptyFamily,
    EmptySelector,
    EmptySet,
    IndexOutOfRange,
    NotRelevant,
    ParseError,
    TooLarge,
    UniverseTooLarge,
    UnknownLabel,
)

UNIVERSE_CAP = 128
SUBCOLLECTION_CAP = 24

_NUMERIC = re.compile(r"-?\d+")
_TOKEN = re.compile(r"\S+")


def label_sort_key(label: str) -> tuple:
    """Canonical ordering key: numeric labels by value, the rest lexicographic."""
    if _NUMERIC.fullmatch(label):
        return (0, int(label), label)
    return (1, 0, label)


def bit_indices(mask: int) -> list[int]:
    """Positions of the set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _check_token(label: str) -> str:
    if not label or any(ch.isspace() for ch in label) or "#" in label:
        raise ValueError(f"invalid label {label!r}: labels are non-empty tokens without whitespace or '#'")
    return label


class ElementTable:
    """Immutable bijection between labels and dense indices 0..n-1.

    Insertion order is preserved; it is the index order everywhere.
    """

    __slots__ = ("labels", "_index", "_canonical")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(_check_token(lab) for lab in labels)
        index: dict[str, int] = {}
        for i, lab in enumerate(labels):
            if lab in index:
                raise ValueError(f"duplicate label {lab!r}")
            index[lab] = i
        if len(labels) > UNIVERSE_CAP:
            raise UniverseTooLarge(f"universe has {len(labels)} elements, capacity is {UNIVERSE_CAP}")
        self.labels = labels
        self._index = index
        self._canonical: tuple[int, ...] | None = None

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, ElementTable) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"ElementTable({list(self.labels)!r})"

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"label {label!r} is not in the universe") from None

    def label(self, index: int) -> str:
        return self.labels[index]

    def canonical_order(self) -> tuple[int, ...]:
        """Indices sorted by the canonical label order."""
        if self._canonical is None:
            self._canonical = tuple(
                sorted(range(len(self.labels)), key=lambda i: label_sort_key(self.labels[i]))
            )
        return self._canonical

    def extended(self, new_labels: Iterable[str]) -> "ElementTable":
        """A table with any unseen labels appended, in the order given."""
        extra = [lab for lab in new_labels if lab not in self._index]
        if not extra:
            return self
        return ElementTable(self.labels + tuple(extra))

    def set_of(self, labels: Iterable[str]) -> "ElementSet":
        mask = 0
        for lab in labels:
            mask |= 1 << self.index_of(lab)
        return ElementSet(len(self.labels), mask)

    def labels_of(self, eset: "ElementSet") -> frozenset[str]:
        if eset.universe_size != len(self.labels):
            raise ValueError("set does not live over this table")
        return frozenset(self.labels[i] for i in eset.indices())

    def sorted_labels_of(self, eset: "ElementSet") -> list[str]:
        return sorted(self.labels_of(eset), key=label_sort_key)


@dataclass(frozen=True, slots=True)
class ElementSet:
    """A subset of a finite universe, stored as a bitmask over dense indices."""

    universe_size: int
    mask: int

    def __post_init__(self):
        if self.universe_size < 0:
            raise ValueError("universe_size must be non-negative")
        if not 0 <= self.mask < (1 << self.universe_size):
            raise ValueError("mask has bits outside the universe")

    @classmethod
    def empty(cls, universe_size: int) -> "ElementSet":
        return cls(universe_size, 0)

    @classmethod
    def full(cls, universe_size: int) -> "ElementSet":
        return cls(universe_size, (1 << universe_size) - 1)

    @classmethod
    def from_indices(cls, universe_size: int, indices: Iterable[int]) -> "ElementSet":
        mask = 0
        for i in indices:
            if not 0 <= i < universe_size:
                raise IndexOutOfRange(f"index {i} outside universe of size {universe_size}")
            mask |= 1 << i
        return cls(universe_size, mask)

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.mask.bit_count()

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def _check_mate(self, other: "ElementSet") -> None:
        if self.universe_size != other.universe_size:
            raise ValueError("sets live over different universes")

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._check_mate(other)
        return ElementSet(self.universe_size, self.mask | other.mask)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._check_mate(other)
        return ElementSet(self.universe_size, self.mask & other.mask)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._check_mate(other)
        return ElementSet(self.universe_size, self.mask & ~other.mask)

    def issubset(self, other: "ElementSet") -> bool:
        self._check_mate(other)
        return self.mask & ~other.mask == 0

    def __le__(self, other: "ElementSet") -> bool:
        return self.issubset(other)

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.universe_size and bool(self.mask >> index & 1)

    def indices(self) -> tuple[int, ...]:
        out = []
        m = self.mask
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return tuple(out)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())


@dataclass(frozen=True, slots=True)
class Selector:
    """A bitmask choosing member positions of a SetFamily."""

    mask: int

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("selector mask must be non-negative")

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "Selector":
        mask = 0
        for i in indices:
            if i < 0:
                raise IndexOutOfRange(f"member index {i} is negative")
            mask |= 1 << i
        return cls(mask)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def count(self) -> int:
        return self.mask.bit_count()

    def indices(self) -> tuple[int, ...]:
        out = []
        m = self.mask
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return tuple(out)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())


class SetFamily:
    """An ordered collection of distinct non-empty sets over one universe.

    The universe is the union of the members plus any explicitly declared
    extra labels; by default it is exactly the union.
    """

    __slots__ = ("table", "members", "member_masks")

    def __init__(self, table: ElementTable, members: Iterable[ElementSet]):
        members = tuple(members)
        if not members:
            raise EmptyFamily("a family needs at least one member set")
        n = len(table)
        seen: dict[int, int] = {}
        for i, m in enumerate(members):
            if m.universe_size != n:
                raise ValueError(f"member {i} lives over a different universe")
            if m.mask == 0:
                raise EmptySet(f"member {i} is empty")
            if m.mask in seen:
                raise DuplicateSet(f"members {seen[m.mask]} and {i} are the same set")
            seen[m.mask] = i
        self.table = table
        self.members = members
        self.member_masks = tuple(m.mask for m in members)

    @classmethod
    def from_labelsets(
        cls,
        labelsets: Iterable[Iterable[str]],
        extra_labels: Iterable[str] = (),
    ) -> "SetFamily":
        """Build a family, interning labels in first-appearance order."""
        rows = [list(row) for row in labelsets]
        order: list[str] = []
        index: dict[str, int] = {}
        for row in rows:
            for lab in row:
                if lab not in index:
                    index[lab] = len(order)
                    order.append(lab)
        for lab in extra_labels:
            if lab not in index:
                index[lab] = len(order)
                order.append(lab)
        table = ElementTable(order)
        members = [table.set_of(row) for row in rows]
        return cls(table, members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[ElementSet]:
        return iter(self.members)

    def member(self, index: int) -> ElementSet:
        if not 0 <= index < len(self.members):
            raise IndexOutOfRange(f"member index {index} outside family of {len(self.members)} sets")
        return self.members[index]

    @property
    def universe_size(self) -> int:
        return len(self.table)

    def universe(self) -> ElementSet:
        return ElementSet.full(len(self.table))

    def labelset(self, index: int) -> frozenset[str]:
        return self.table.labels_of(self.member(index))

    def labelsets(self) -> tuple[frozenset[str], ...]:
        return tuple(self.table.labels_of(m) for m in self.members)

    def union_all(self) -> ElementSet:
        mask = 0
        for m in self.member_masks:
            mask |= m
        return ElementSet(len(self.table), mask)

    def intersection_all(self) -> ElementSet:
        mask = self.member_masks[0]
        for m in self.member_masks[1:]:
            mask &= m
        return ElementSet(len(self.table), mask)

    def restricted(self, sel: Selector) -> "SetFamily":
        """The subfamily picked out by a non-empty selector (table shared)."""
        _check_selector(self, sel)
        return SetFamily(self.table, [self.members[i] for i in sel.indices()])

    def with_labelset(self, labels: Iterable[str]) -> tuple["SetFamily", int]:
        """The family with the given set appended, extending the universe as
        needed.  If the set is already a member, returns self unchanged with
        the existing position."""
        labels = list(labels)
        fresh = sorted({lab for lab in labels if lab not in self.table}, key=label_sort_key)
        table = self.table.extended(fresh)
        new = table.set_of(labels)
        if new.mask == 0:
            raise EmptySet("cannot add an empty member")
        if not fresh:
            for i, m in enumerate(self.member_masks):
                if m == new.mask:
                    return self, i
        members = [ElementSet(len(table), m) for m in self.member_masks]
        members.append(new)
        return SetFamily(table, members), len(members) - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.labelsets() == other.labelsets() and set(self.table.labels) == set(other.table.labels)

    def __hash__(self) -> int:
        return hash((self.labelsets(), frozenset(self.table.labels)))

    def __repr__(self) -> str:
        sets = ", ".join("{" + " ".join(self.table.sorted_labels_of(m)) + "}" for m in self.members)
        return f"SetFamily[{sets}]"

    def render(self) -> str:
        return render_family(self)


def _check_selector(family: SetFamily, sel: Selector) -> None:
    if sel.mask == 0:
        raise EmptySelector("selector picks no members")
    if sel.mask >> len(family.members):
        raise IndexOutOfRange("selector has bits beyond the last member")


def parse_family(text: str | bytes) -> SetFamily:
    """Parse the family file format; see the module docstring for the grammar."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    order: list[str] = []
    index: dict[str, int] = {}
    rows: list[tuple[int, list[str]]] = []

    def intern(label: str) -> None:
        if label not in index:
            index[label] = len(order)
            order.append(label)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        if tokens[0][0] == "universe:":
            for lab, _ in tokens[1:]:
                intern(lab)
            continue
        seen_here: dict[str, int] = {}
        for lab, col in tokens:
            if lab in seen_here:
                raise ParseError(f"label {lab!r} repeated within one member set", lineno, col)
            seen_here[lab] = col
            intern(lab)
        rows.append((lineno, [lab for lab, _ in tokens]))

    if not rows:
        raise EmptyFamily("input declares no member sets")
    if len(order) > UNIVERSE_CAP:
        raise UniverseTooLarge(f"universe has {len(order)} elements, capacity is {UNIVERSE_CAP}")
    table = ElementTable(order)
    members: list[ElementSet] = []
    masks: dict[int, int] = {}
    for lineno, row in rows:
        eset = table.set_of(row)
        if eset.mask in masks:
            raise DuplicateSet(f"line {lineno} repeats the member set first given on line {masks[eset.mask]}")
        masks[eset.mask] = lineno
        members.append(eset)
    return SetFamily(table, members)


def render_family(family: SetFamily) -> str:
    """Canonical text for a family; parse_family(render_family(F)) == F."""
    lines: list[str] = []
    extras = family.universe() - family.union_all()
    if not extras.is_empty:
        lines.append("universe: " + " ".join(family.table.sorted_labels_of(extras)))
    for member in family.members:
        lines.append(" ".join(family.table.sorted_labels_of(member)))
    return "\n".join(lines) + "\n"


def union_of(family: SetFamily, sel: Selector) -> ElementSet:
    """Union of the selected members."""
    _check_selector(family, sel)
    mask = 0
    for i in sel.indices():
        mask |= family.member_masks[i]
    return ElementSet(family.universe_size, mask)


def intersection_of(family: SetFamily, sel: Selector) -> ElementSet:
    """Intersection of the selected members."""
    _check_selector(family, sel)
    mask = (1 << family.universe_size) - 1
    for i in sel.indices():
        mask &= family.member_masks[i]
    return ElementSet(family.universe_size, mask)


def alpha_of(family: SetFamily) -> int:
    """The common member cardinality; raises NotRelevant when sizes differ."""
    sizes = [m.bit_count() for m in family.member_masks]
    first = sizes[0]
    for j, size in enumerate(sizes):
        if size != first:
            raise NotRelevant(
                f"members 0 and {j} have cardinalities {first} and {size}",
                first=0,
                second=j,
            )
    return first


def enumerate_subcollections(family: SetFamily, require_nonempty: bool = True) -> Iterator[Selector]:
    """All subcollection selectors in increasing numeric mask order."""
    k = len(family.members)
    if k > SUBCOLLECTION_CAP:
        raise TooLarge(f"family has {k} members; subcollection sweeps are capped at {SUBCOLLECTION_CAP}")
    start = 1 if require_nonempty else 0
    for mask in range(start, 1 << k):
        yield Selector(mask)
