"""Wildcard rows and binary state vectors.

A row (t-object) over ``N`` Boolean variables is a word over ``{0, 1, -}``;
it stands for the ``2**w`` states obtained by substituting bits into its
``w`` wildcards. A binary state vector is a set of states kept as a list of
pairwise disjoint rows.

Rows are stored as two integer bit-planes: bit ``i`` of ``care`` is set when
column ``i`` holds a digit, and bit ``i`` of ``value`` is that digit. Column
``i`` is variable ``X_{i+1}``; the textual form prints column 0 first.

Every :class:`BinaryStateVector` is canonical: the row list is a function of
the state set alone. It is the path list of the reduced decision tree over
the fixed column order ``0..N-1`` (so free columns are always all-wildcard),
followed by a deterministic greedy merge pass and a sort.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ResourceLimitError, UsageError

MAX_WIDTH = 4096
MAX_EXPAND_WILDCARDS = 30

VariableSet = frozenset  # frozenset[int] of column indices


class Trit(enum.Enum):
    ZERO = "0"
    ONE = "1"
    WILD = "-"


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int) -> Iterator[int]:
    """Indices of the set bits of ``x``, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _check_width(width: int) -> None:
    if not 0 <= width <= MAX_WIDTH:
        raise UsageError(f"width {width} outside [0, {MAX_WIDTH}]")


@dataclass(frozen=True, order=True, slots=True)
class Row:
    """A single t-object. Ordering is lexicographic on ``(care, value)``."""

    width: int
    care: int
    value: int

    def __post_init__(self):
        if self.value & ~self.care:
            raise UsageError("value bits set outside the care mask")
        if self.care >> self.width:
            raise UsageError("care mask wider than the row")

    @classmethod
    def parse(cls, text: str) -> "Row":
        """Build a row from ``"1 - 0"`` or ``"1-0"``."""
        cells = [ch for ch in text if not ch.isspace()]
        care = value = 0
        for i, ch in enumerate(cells):
            if ch in "01":
                care |= 1 << i
                if ch == "1":
                    value |= 1 << i
            elif ch not in "-–":
                raise UsageError(f"invalid row cell {ch!r}")
        return cls(len(cells), care, value)

    @classmethod
    def wild(cls, width: int) -> "Row":
        return cls(width, 0, 0)

    @classmethod
    def from_cells(cls, cells: Sequence[Trit]) -> "Row":
        return cls.parse("".join(t.value for t in cells))

    @classmethod
    def from_assignment(cls, width: int, assignment: dict[int, int]) -> "Row":
        care = value = 0
        for i, bit in assignment.items():
            if not 0 <= i < width:
                raise UsageError(f"variable index {i} out of range for width {width}")
            if bit not in (0, 1):
                raise UsageError(f"bit for X{i + 1} must be 0 or 1, got {bit!r}")
            care |= 1 << i
            value |= bit << i
        return cls(width, care, value)

    @property
    def cells(self) -> tuple[Trit, ...]:
        out = []
        for i in range(self.width):
            if not (self.care >> i) & 1:
                out.append(Trit.WILD)
            else:
                out.append(Trit.ONE if (self.value >> i) & 1 else Trit.ZERO)
        return tuple(out)

    @property
    def wildcards(self) -> int:
        return self.width - _popcount(self.care)

    def is_state(self) -> bool:
        return self.care == (1 << self.width) - 1

    def cardinality(self) -> int:
        return 1 << self.wildcards

    def __contains__(self, state: "Row") -> bool:
        return (state.value ^ self.value) & self.care == 0 and state.care & self.care == self.care

    def __str__(self) -> str:
        return " ".join(t.value for t in self.cells)

    def __repr__(self) -> str:
        return f"Row({str(self)!r})"


def row_intersect(a: Row, b: Row) -> Row | None:
    """Cell-wise meet of two rows; ``None`` when they are orthogonal."""
    if a.width != b.width:
        raise UsageError(f"width mismatch: {a.width} vs {b.width}")
    if (a.value ^ b.value) & a.care & b.care:
        return None
    return Row(a.width, a.care | b.care, a.value | b.value)


# -- raw (care, value) pair machinery ---------------------------------------

Pair = tuple  # (care, value)


def _shannon(pairs: list) -> list:
    """Reduced decision-tree paths of the union of ``pairs`` (may overlap).

    Columns are tested in ascending order; a column is left as a wildcard
    whenever both cofactors are equal. Iterative so very wide rows do not hit
    the interpreter's recursion limit.
    """
    results: list = []
    stack: list = [(False, pairs)]
    while stack:
        combine, data = stack.pop()
        if combine:
            bit, fixed, fixed_value = data
            c1 = results.pop()
            c0 = results.pop()
            if set(c0) == set(c1):
                merged = c0
            else:
                merged = [(c | bit, v) for c, v in c0] + [(c | bit, v | bit) for c, v in c1]
            if fixed:
                merged = [(c | fixed, v | fixed_value) for c, v in merged]
            results.append(merged)
            continue

        rows = data
        if not rows:
            results.append([])
            continue
        c_first, v_first = rows[0]
        common = c_first
        spread = 0
        union_care = 0
        for c, v in rows:
            common &= c
            spread |= v ^ v_first
            union_care |= c
        fixed = common & ~spread
        fixed_value = v_first & fixed
        if fixed:
            keep = ~fixed
            rows = [(c & keep, v & keep) for c, v in rows]
            union_care &= keep
        if len(rows) == 1 or any(c == 0 for c, _ in rows):
            if len(rows) == 1:
                c, v = rows[0]
            else:
                c = v = 0
            results.append([(c | fixed, v | fixed_value)])
            continue
        bit = union_care & -union_care
        nbit = ~bit
        r0: list = []
        r1: list = []
        for c, v in rows:
            if c & bit:
                (r1 if v & bit else r0).append((c & nbit, v & nbit))
            else:
                r0.append((c, v))
                r1.append((c, v))
        stack.append((True, (bit, fixed, fixed_value)))
        stack.append((False, r1))
        stack.append((False, r0))
    return results[0]


def _merge_pairs(pairs: Iterable) -> list:
    """Greedily merge disjoint rows that differ in exactly one digit column.

    Deterministic: every pass walks the rows in sorted order and merges each
    row with the partner found on its lowest such column.
    """
    pool = set(pairs)
    changed = True
    while changed:
        changed = False
        for c, v in sorted(pool):
            if (c, v) not in pool:
                continue
            for b in _bits(c):
                bit = 1 << b
                partner = (c, v ^ bit)
                if partner in pool:
                    pool.discard((c, v))
                    pool.discard(partner)
                    pool.add((c & ~bit, v & ~bit))
                    changed = True
                    break
    return sorted(pool)


def _canonical(pairs: list) -> tuple:
    if not pairs:
        return ()
    return tuple(_merge_pairs(_shannon(pairs)))


def _cube_minus(a: Pair, b: Pair) -> list:
    """``a \\ b`` for single cubes as a list of disjoint cubes."""
    ca, va = a
    cb, vb = b
    if (va ^ vb) & ca & cb:
        return [a]
    out = []
    for bitpos in _bits(cb & ~ca):
        bit = 1 << bitpos
        out.append((ca | bit, va | (~vb & bit)))
        ca |= bit
        va |= vb & bit
    return out


def _subtract(pieces: list, others: Iterable) -> list:
    for q in others:
        if not pieces:
            break
        nxt = []
        for p in pieces:
            nxt.extend(_cube_minus(p, q))
        pieces = nxt
    return pieces


def _select_bits(mask: int, columns: Sequence[int]) -> int:
    """Pack the bits of ``mask`` at ``columns`` into positions 0, 1, ..."""
    out = 0
    for k, col in enumerate(columns):
        if (mask >> col) & 1:
            out |= 1 << k
    return out


def _spread_bits(mask: int, columns: Sequence[int]) -> int:
    """Inverse of :func:`_select_bits`."""
    out = 0
    for k, col in enumerate(columns):
        if (mask >> k) & 1:
            out |= 1 << col
    return out


class BinaryStateVector:
    """A set of states held as canonical disjoint rows.

    Construct from any iterable of rows (overlaps allowed) or row strings;
    the constructor canonicalizes. Instances are immutable.
    """

    __slots__ = ("width", "_pairs", "_hash")

    def __init__(self, width: int, rows: Iterable[Row | str] = ()):
        _check_width(width)
        pairs = []
        for r in rows:
            if isinstance(r, str):
                r = Row.parse(r)
            if r.width != width:
                raise UsageError(f"row width {r.width} does not match vector width {width}")
            pairs.append((r.care, r.value))
        self.width = width
        self._pairs = _canonical(pairs)
        self._hash = None

    @classmethod
    def _from_canonical(cls, width: int, pairs: tuple) -> "BinaryStateVector":
        obj = cls.__new__(cls)
        obj.width = width
        obj._pairs = pairs
        obj._hash = None
        return obj

    @classmethod
    def _from_pairs(cls, width: int, pairs: list) -> "BinaryStateVector":
        return cls._from_canonical(width, _canonical(pairs))

    @classmethod
    def zero(cls, width: int) -> "BinaryStateVector":
        _check_width(width)
        return cls._from_canonical(width, ())

    @classmethod
    def one(cls, width: int) -> "BinaryStateVector":
        _check_width(width)
        return cls._from_canonical(width, ((0, 0),))

    @classmethod
    def of(cls, *rows: str) -> "BinaryStateVector":
        """Shorthand: ``BinaryStateVector.of("1 - 0", "- 0 1")``."""
        parsed = [Row.parse(r) for r in rows]
        if not parsed:
            raise UsageError("of() needs at least one row; use zero(width)")
        return cls(parsed[0].width, parsed)

    @property
    def rows(self) -> tuple[Row, ...]:
        return tuple(Row(self.width, c, v) for c, v in self._pairs)

    def __iter__(self) -> Iterator[Row]:
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self._pairs)

    def __bool__(self) -> bool:
        return bool(self._pairs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryStateVector):
            return NotImplemented
        return self.width == other.width and self._pairs == other._pairs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.width, self._pairs))
        return self._hash

    def __lt__(self, other: "BinaryStateVector") -> bool:
        return (self.width, self._pairs) < (other.width, other._pairs)

    def __contains__(self, state: Row) -> bool:
        return any(state in r for r in self.rows)

    def __and__(self, other: "BinaryStateVector") -> "BinaryStateVector":
        return vector_product(self, other)

    def __or__(self, other: "BinaryStateVector") -> "BinaryStateVector":
        return vector_union(self, other)

    def __sub__(self, other: "BinaryStateVector") -> "BinaryStateVector":
        return vector_difference(self, other)

    def __invert__(self) -> "BinaryStateVector":
        return complement(self)

    def is_one(self) -> bool:
        return self._pairs == ((0, 0),)

    @property
    def care_union(self) -> int:
        out = 0
        for c, _ in self._pairs:
            out |= c
        return out

    def __str__(self) -> str:
        if not self._pairs:
            return "{}"
        return "{" + "; ".join(str(r) for r in self.rows) + "}"

    def __repr__(self) -> str:
        return f"BinaryStateVector({self.width}, {str(self)})"

    def to_text(self) -> str:
        """Matrix form: one row per line, cells separated by spaces."""
        return "\n".join(str(r) for r in self.rows)


def _same_width(s: BinaryStateVector, q: BinaryStateVector) -> None:
    if s.width != q.width:
        raise UsageError(f"width mismatch: {s.width} vs {q.width}")


def vector_product(s: BinaryStateVector, q: BinaryStateVector) -> BinaryStateVector:
    """Intersection ``s q``: all pairwise row intersections."""
    _same_width(s, q)
    if not s or not q:
        return BinaryStateVector.zero(s.width)
    if q.is_one():
        return s
    if s.is_one():
        return q
    pairs = []
    for ca, va in s._pairs:
        for cb, vb in q._pairs:
            if (va ^ vb) & ca & cb:
                continue
            pairs.append((ca | cb, va | vb))
    return BinaryStateVector._from_pairs(s.width, pairs)


def vector_union(s: BinaryStateVector, q: BinaryStateVector) -> BinaryStateVector:
    _same_width(s, q)
    if not q:
        return s
    if not s:
        return q
    return BinaryStateVector._from_pairs(s.width, list(s._pairs) + list(q._pairs))


def vector_difference(s: BinaryStateVector, q: BinaryStateVector) -> BinaryStateVector:
    """``s \\ q`` by cube subtraction, then canonicalized."""
    _same_width(s, q)
    if not s or not q:
        return s
    if q.is_one():
        return BinaryStateVector.zero(s.width)
    return BinaryStateVector._from_pairs(s.width, _subtract(list(s._pairs), q._pairs))


def complement(s: BinaryStateVector) -> BinaryStateVector:
    return vector_difference(BinaryStateVector.one(s.width), s)


def cardinality(s: BinaryStateVector) -> int:
    """Exact number of states, ``sum(2**w_i)`` over the disjoint rows."""
    n = s.width
    return sum(1 << (n - _popcount(c)) for c, _ in s._pairs)


def support(s: BinaryStateVector) -> VariableSet:
    """Causal variables of ``s``.

    Exact because of the canonical form: a column the set does not depend on
    is a wildcard in every canonical row.
    """
    return frozenset(_bits(s.care_union))


def free(s: BinaryStateVector) -> VariableSet:
    return frozenset(range(s.width)) - support(s)


def cofactor(s: BinaryStateVector, i: int, v: int) -> BinaryStateVector:
    """The part of ``s`` with ``X_i = v``, column ``i`` fixed to ``v``."""
    if not 0 <= i < s.width:
        raise UsageError(f"variable index {i} out of range for width {s.width}")
    if v not in (0, 1):
        raise UsageError(f"cofactor value must be 0 or 1, got {v!r}")
    bit = 1 << i
    pairs = []
    for c, val in s._pairs:
        if c & bit and ((val >> i) & 1) != v:
            continue
        pairs.append((c | bit, val | (bit if v else 0)))
    return BinaryStateVector._from_pairs(s.width, pairs)


def merge_rows(rows: Sequence[Row]) -> list[Row]:
    """Greedy reduction of a list of pairwise disjoint rows.

    Pairs with the same wildcard positions that differ in exactly one digit
    are merged until no such pair is left. The result is not a minimum cover.
    """
    if not rows:
        return []
    width = rows[0].width
    return [Row(width, c, v) for c, v in _merge_pairs((r.care, r.value) for r in rows)]


def reduce_rows(s: BinaryStateVector) -> BinaryStateVector:
    """Merge adjacent rows of ``s``; never increases the row count."""
    merged = _merge_pairs(s._pairs)
    if len(merged) >= len(s._pairs):
        return s
    return BinaryStateVector._from_pairs(s.width, merged)


def expand(r: Row) -> list[Row]:
    """All states of ``r`` as digit-only rows, in lexicographic order."""
    if r.wildcards > MAX_EXPAND_WILDCARDS:
        raise ResourceLimitError(
            f"expanding {r.wildcards} wildcards exceeds the limit of {MAX_EXPAND_WILDCARDS}"
        )
    wild = [i for i in range(r.width) if not (r.care >> i) & 1]
    full = (1 << r.width) - 1
    out = []
    for bits in itertools.product((0, 1), repeat=len(wild)):
        value = r.value
        for i, b in zip(wild, bits):
            value |= b << i
        out.append(Row(r.width, full, value))
    return out


def states(s: BinaryStateVector) -> Iterator[Row]:
    """Every state of ``s``; rows are disjoint so nothing repeats."""
    for r in s.rows:
        yield from expand(r)


def select_columns(s: BinaryStateVector, columns: Sequence[int]) -> BinaryStateVector:
    """Restrict ``s`` to ``columns`` (ascending); the rest must be free."""
    cols = list(columns)
    keep = 0
    for c in cols:
        keep |= 1 << c
    if s.care_union & ~keep:
        raise UsageError("cannot drop columns that are in the support")
    pairs = [(_select_bits(c, cols), _select_bits(v, cols)) for c, v in s._pairs]
    return BinaryStateVector._from_canonical(len(cols), tuple(sorted(pairs)))


def embed_columns(s: BinaryStateVector, columns: Sequence[int], width: int) -> BinaryStateVector:
    """Inverse of :func:`select_columns`: place ``s`` into ``width`` columns."""
    cols = list(columns)
    if len(cols) != s.width:
        raise UsageError("column list does not match the vector width")
    pairs = [(_spread_bits(c, cols), _spread_bits(v, cols)) for c, v in s._pairs]
    return BinaryStateVector._from_pairs(width, pairs)
