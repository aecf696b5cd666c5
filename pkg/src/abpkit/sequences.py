"""Read-sequence combinatorics for read-k programs.

A read-k sequence lists, in layer order, which element is read and for which
occurrence (1..k).  Elements are canonical indices 0..n-1 assigned by first
occurrence, so the subsequence of first occurrences is always increasing;
``labels`` remembers what each canonical index originally was (for sequences
extracted from a program, the variable id).

The pruning operations trade elements for structure: first make every
per-occurrence subsequence monotone, then make every pair of occurrences
regularly interleaving.  Both properties are downward-closed, which the
pipeline relies on when it prunes pair by pair.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence


class SequenceError(ValueError):
    """A sequence does not satisfy the structural precondition of an operation."""


def _direction(vals: Sequence) -> str | None:
    """'inc', 'dec', 'flat' (fewer than two entries), or None if not monotone."""
    if len(vals) < 2:
        return "flat"
    if all(a < b for a, b in zip(vals, vals[1:])):
        return "inc"
    if all(a > b for a, b in zip(vals, vals[1:])):
        return "dec"
    return None


@dataclass
class ReadSequence:
    """Read-k sequence over elements 0..n-1, entries as (element, occurrence)."""

    n: int
    k: int
    entries: tuple
    labels: tuple

    def __post_init__(self) -> None:
        self.entries = tuple((int(e), int(c)) for e, c in self.entries)
        self.labels = tuple(self.labels)
        if len(self.labels) != self.n:
            raise ValueError("labels length must equal n")
        counts = [0] * self.n
        for e, c in self.entries:
            if not 0 <= e < self.n:
                raise ValueError(f"element {e} out of range")
            counts[e] += 1
            if c != counts[e]:
                raise ValueError(
                    f"occurrence counter {c} for element {e} out of order"
                )
        if any(c != self.k for c in counts):
            raise ValueError("every element must occur exactly k times")
        self._occ = {(e, c): i for i, (e, c) in enumerate(self.entries)}

    @classmethod
    def from_order(cls, order: Iterable) -> "ReadSequence":
        """Build from a raw order of element ids, relabeling so that first
        occurrences come in increasing canonical order."""
        order = list(order)
        first: dict = {}
        labels: list = []
        for x in order:
            if x not in first:
                first[x] = len(labels)
                labels.append(x)
        n = len(labels)
        counts = [0] * n
        entries = []
        for x in order:
            e = first[x]
            counts[e] += 1
            entries.append((e, counts[e]))
        k = counts[0] if counts else 0
        if any(c != k for c in counts):
            raise ValueError("order is not read-k: unequal occurrence counts")
        return cls(n, k, tuple(entries), tuple(labels))

    # -- accessors -----------------------------------------------------------

    def occur(self, i: int, e: int) -> int:
        """Index of the i-th occurrence of element e."""
        return self._occ[(e, i)]

    def var_at(self, idx: int) -> tuple:
        return self.entries[idx]

    def read_order(self, i: int) -> list:
        """The permutation of elements given by their i-th occurrences."""
        return [e for e, c in self.entries if c == i]

    def read_direction(self, i: int) -> str | None:
        return _direction(self.read_order(i))

    def is_per_read_monotone(self) -> bool:
        return all(self.read_direction(i) is not None for i in range(1, self.k + 1))

    @property
    def is_canonical(self) -> bool:
        return self.read_order(1) == sorted(range(self.n))

    # -- projections ---------------------------------------------------------

    def project(self, reads) -> "ReadSequence":
        """Keep only the given occurrence indices; occurrence counters are
        renumbered but elements keep their ids."""
        reads = sorted(set(reads))
        if not reads:
            raise ValueError("projection needs at least one read index")
        if reads[0] < 1 or reads[-1] > self.k:
            raise ValueError(f"read indices {reads} out of range 1..{self.k}")
        renum = {c: i + 1 for i, c in enumerate(reads)}
        entries = tuple((e, renum[c]) for e, c in self.entries if c in renum)
        return ReadSequence(self.n, len(reads), entries, self.labels)

    def restrict(self, keep) -> "ReadSequence":
        """Drop all elements outside ``keep`` and relabel canonically; labels
        compose so they still point at the original ids."""
        keep = set(keep)
        if not keep <= set(range(self.n)):
            raise ValueError("restriction set contains unknown elements")
        filtered = [e for e, _ in self.entries if e in keep]
        seq = ReadSequence.from_order(filtered)
        return ReadSequence(seq.n, seq.k, seq.entries,
                            tuple(self.labels[t] for t in seq.labels))

    def __str__(self) -> str:
        def show(label):
            return f"x{label + 1}" if isinstance(label, int) else str(label)

        return " ".join(show(self.labels[e]) for e, _ in self.entries)


# -- longest monotone subsequence ---------------------------------------------


def _lis_end_lengths(vals: Sequence) -> list:
    """lengths[i] = length of the longest increasing subsequence ending at i."""
    tails: list = []
    out = []
    for v in vals:
        pos = bisect_left(tails, v)
        if pos == len(tails):
            tails.append(v)
        else:
            tails[pos] = v
        out.append(pos + 1)
    return out


def _lis_start_lengths(vals: Sequence) -> list:
    """lengths[i] = length of the longest increasing subsequence starting at i."""
    rev = [-v for v in reversed(vals)]
    return list(reversed(_lis_end_lengths(rev)))


def _reconstruct(vals: Sequence, starts: list, length: int, increasing: bool) -> list:
    out = []
    prev = None
    need = length
    for i, v in enumerate(vals):
        if starts[i] != need:
            continue
        if prev is not None and ((v <= prev) if increasing else (v >= prev)):
            continue
        out.append(v)
        prev = v
        need -= 1
        if need == 0:
            break
    return out


def longest_monotone(seq: Sequence) -> tuple:
    """A longest monotone subsequence of a sequence of distinct comparables.

    Returns (values, direction) with direction 'increasing' or 'decreasing'.
    Length is always at least ceil(sqrt(len(seq))).  Ties between the two
    directions go to increasing, and within a direction the lexicographically
    smallest index set is returned.
    """
    vals = list(seq)
    if len(set(vals)) != len(vals):
        raise ValueError("longest_monotone requires distinct values")
    if not vals:
        return [], "increasing"
    inc_starts = _lis_start_lengths(vals)
    dec_starts = _lis_start_lengths([-v for v in vals])
    inc_len = max(inc_starts)
    dec_len = max(dec_starts)
    if inc_len >= dec_len:
        return _reconstruct(vals, inc_starts, inc_len, True), "increasing"
    return _reconstruct(vals, dec_starts, dec_len, False), "decreasing"


# -- per-read-monotone pruning --------------------------------------------------


def per_read_monotone_subset(S: ReadSequence) -> frozenset:
    """Subset X' of elements with S|X' per-read-monotone, found by chaining a
    longest-monotone extraction through occurrences 2..k.  Guarantees
    |X'| >= n^(1/2^(k-1))."""
    alive = set(range(S.n))
    for i in range(2, S.k + 1):
        order_i = [e for e in S.read_order(i) if e in alive]
        picked, _ = longest_monotone(order_i)
        alive = set(picked)
    return frozenset(alive)


# -- regular interleaving --------------------------------------------------------


def _two_regular_blocks(pairs: Sequence) -> tuple | None:
    """Unique block partition of a read-2 pair sequence if it is 2-regularly
    interleaving, else None.  The layout must be [firsts of B1][seconds of B1]
    [firsts of B2][seconds of B2]...; since each block's seconds immediately
    follow its firsts, a greedy left-to-right scan is forced."""
    pos = 0
    m = len(pairs)
    blocks = []
    while pos < m:
        if pairs[pos][1] != 1:
            return None
        block = []
        while pos < m and pairs[pos][1] == 1:
            block.append(pairs[pos][0])
            pos += 1
        bset = set(block)
        chunk = pairs[pos:pos + len(block)]
        if len(chunk) != len(block):
            return None
        if any(c != 2 or e not in bset for e, c in chunk):
            return None
        if {e for e, _ in chunk} != bset:
            return None
        pos += len(block)
        blocks.append(tuple(sorted(bset)))
    return tuple(blocks)


def is_regularly_interleaving(S: ReadSequence):
    """True iff every pairwise occurrence projection is 2-regularly
    interleaving.  Returns (flag, witness) where witness maps each pair (i, j)
    to its block partition, or names the failing pair."""
    witnesses = {}
    for i, j in combinations(range(1, S.k + 1), 2):
        pairs = [(e, 1 if c == i else 2) for e, c in S.entries if c in (i, j)]
        blocks = _two_regular_blocks(pairs)
        if blocks is None:
            return False, {"failing_pair": (i, j)}
        witnesses[(i, j)] = blocks
    return True, witnesses


def _prune_pair(pairs: list) -> set:
    """Pruning step on a read-2 pair sequence whose two reads are monotone.
    Returns the subset of elements to keep so that the restriction becomes
    2-regularly interleaving, keeping at least a third of the elements.

    When the two reads run in opposite directions the whole sequence is
    already a single block.  Otherwise the element x with the widest gap
    between its occurrences anchors a block: the majority occurrence kind
    strictly between x's occurrences selects the block members A, everything
    else inside the spanned interval is erased, and the disjoint left and
    right remainders are pruned recursively.
    """
    elems = {e for e, _ in pairs}
    if len(elems) <= 1:
        return elems
    read1 = [e for e, c in pairs if c == 1]
    read2 = [e for e, c in pairs if c == 2]
    d1 = _direction(read1)
    d2 = _direction(read2)
    if d1 is None or d2 is None:
        raise SequenceError("pair pruning requires monotone reads")
    if {d1, d2} == {"inc", "dec"}:
        return elems
    occ1 = {}
    occ2 = {}
    for idx, (e, c) in enumerate(pairs):
        (occ1 if c == 1 else occ2)[e] = idx
    x = max(elems, key=lambda e: (occ2[e] - occ1[e], -e))
    r = occ2[x] - occ1[x]
    inside_first = [e for e in elems
                    if e != x and occ1[x] < occ1[e] < occ2[x]]
    inside_second = [e for e in elems
                     if e != x and occ1[x] < occ2[e] < occ2[x]]
    if len(inside_first) >= len(inside_second):
        block = {x, *inside_first}
        y = max(block, key=lambda e: occ2[e])
        lo, hi = occ1[x], occ2[y]
    else:
        block = {x, *inside_second}
        y = min(block, key=lambda e: occ1[e])
        lo, hi = occ1[y], occ2[x]
    assert hi - lo <= 2 * r
    before = {e for e in elems if occ1[e] < lo and occ2[e] < lo}
    after = {e for e in elems if occ1[e] > hi and occ2[e] > hi}
    kept = set(block)
    if before:
        kept |= _prune_pair([(e, c) for e, c in pairs[:lo] if e in before])
    if after:
        kept |= _prune_pair([(e, c) for e, c in pairs[hi + 1:] if e in after])
    return kept


def regularly_interleaving_subset(S: ReadSequence) -> frozenset:
    """Subset X' of a per-read-monotone sequence with S|X' per-read-monotone
    and k-regularly-interleaving, obtained by running the read-2 pruning step
    on every occurrence pair (i, j) in lexicographic order.  Keeps at least a
    1/3 fraction per pair, so |X'| >= s/3^(k^2) overall."""
    if not S.is_per_read_monotone():
        raise SequenceError("input sequence is not per-read-monotone")
    alive = set(range(S.n))
    for i, j in combinations(range(1, S.k + 1), 2):
        pairs = [(e, 1 if c == i else 2)
                 for e, c in S.entries if c in (i, j) and e in alive]
        alive = _prune_pair(pairs)
    return frozenset(alive)


# -- concatenation decomposition --------------------------------------------------


@dataclass
class Segment:
    """Contiguous piece of a sequence holding complete reads of one direction.
    For decreasing segments ``reversal`` maps each element to its mirror, the
    relabeling that turns the segment's reads increasing."""

    start: int
    end: int
    reads: tuple
    direction: str
    reversal: tuple | None = None


def concat_decompose(S: ReadSequence) -> list:
    """Split a per-read-monotone sequence with increasing first read into
    contiguous segments that alternate all-increasing / all-decreasing reads,
    each read lying wholly inside one segment.  Consecutive segments share
    their border element, which is the largest element at an
    increasing-to-decreasing border and the smallest at the opposite one."""
    if not S.is_per_read_monotone():
        raise SequenceError("input sequence is not per-read-monotone")
    if S.k == 0:
        return []
    if S.read_direction(1) == "dec":
        raise SequenceError("first read must be increasing")
    if S.n == 1:
        return [Segment(0, len(S.entries), tuple(range(1, S.k + 1)), "inc")]
    dirs = {i: S.read_direction(i) for i in range(1, S.k + 1)}
    spans = {}
    for idx, (e, c) in enumerate(S.entries):
        if c not in spans:
            spans[c] = [idx, idx]
        else:
            spans[c][1] = idx
    remaining = set(range(1, S.k + 1))
    segments: list = []
    pos = 0
    expected = "inc"
    mirror = tuple(S.n - 1 - t for t in range(S.n))
    while remaining:
        opposite = [i for i in remaining if dirs[i] != expected]
        boundary = min((spans[i][0] for i in opposite), default=len(S.entries))
        seg_reads = sorted(i for i in remaining if spans[i][1] < boundary)
        if not seg_reads:
            raise SequenceError(
                f"reads do not alternate cleanly at position {boundary}"
            )
        for i in seg_reads:
            if dirs[i] != expected or spans[i][0] < pos:
                raise SequenceError(
                    f"read {i} crosses a segment border; sequence is not decomposable"
                )
        segments.append(Segment(pos, boundary, tuple(seg_reads), expected,
                                mirror if expected == "dec" else None))
        remaining -= set(seg_reads)
        pos = boundary
        expected = "dec" if expected == "inc" else "inc"
    for a, b in zip(segments, segments[1:]):
        last = S.entries[a.end - 1][0]
        first = S.entries[b.start][0]
        border = S.n - 1 if a.direction == "inc" else 0
        if last != first or last != border:
            raise SequenceError(
                f"segment border mismatch between positions {a.end - 1} and {b.start}"
            )
    return segments
