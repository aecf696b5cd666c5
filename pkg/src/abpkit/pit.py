"""Hitting sets and identity testing for read-k oblivious programs.

The white-box test needs the program only for its read order: each round it
picks a large per-read-monotone, regularly-interleaving subset of the
remaining variables, walks a hitting set for that subset until it finds a
point keeping the restricted program nonzero, and recurses on the rest.  With
the grid generator every step is unconditionally exact, so the verdict is a
decision procedure; the random generator trades completeness for size.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .abp import ObliviousAbp, read_sequence, validate
from .algebra import GuardExceeded, PrimeField
from .sequences import (ReadSequence, is_regularly_interleaving,
                        per_read_monotone_subset, regularly_interleaving_subset)

DEFAULT_POINT_GUARD = 10 ** 6
DEFAULT_FASTPATH_TERMS = 4096
DEFAULT_PROBES = 12


@dataclass
class HittingSet:
    """Points over a declared variable subset, with provenance recording how
    they were produced (grid, random, or loaded from an external file)."""

    vars: tuple
    points: tuple
    provenance: str

    def __post_init__(self) -> None:
        self.vars = tuple(self.vars)
        self.points = tuple(tuple(pt) for pt in self.points)
        for pt in self.points:
            if len(pt) != len(self.vars):
                raise ValueError("hitting set point arity mismatch")

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class IterationRecord:
    """One round of the identity test: the chosen variable subset, the size
    floor it had to meet, and the accepted point (None when the round
    exhausted its hitting set)."""

    subset: tuple
    size_floor: float
    h_size: int
    points_tried: int
    chosen: tuple | None


@dataclass
class PitVerdict:
    is_zero: bool
    witness: tuple | None
    iterations: tuple
    generator: str
    n: int
    k: int

    def __post_init__(self) -> None:
        self.iterations = tuple(self.iterations)


def grid_hitting_set(vars, degrees, guard: int = DEFAULT_POINT_GUARD) -> HittingSet:
    """The full grid {0..d_v} per variable: hits every nonzero polynomial with
    those individual degree bounds, unconditionally."""
    vars = tuple(vars)
    if isinstance(degrees, int):
        degrees = [degrees] * len(vars)
    degrees = [int(d) for d in degrees]
    if len(degrees) != len(vars):
        raise ValueError("one degree bound per variable required")
    size = 1
    for d in degrees:
        if d < 0:
            raise ValueError("negative degree bound")
        size *= d + 1
        if size > guard:
            raise GuardExceeded(f"grid of {size}+ points exceeds guard {guard}")
    points = tuple(itertools.product(*(range(d + 1) for d in degrees)))
    return HittingSet(vars, points, "grid")


def random_hitting_set(vars, field: PrimeField, count: int, seed: int,
                       guard: int = DEFAULT_POINT_GUARD) -> HittingSet:
    vars = tuple(vars)
    if count > guard:
        raise GuardExceeded(f"{count} random points exceeds guard {guard}")
    rng = random.Random(seed)
    points = tuple(tuple(field.random(rng) for _ in vars) for _ in range(count))
    return HittingSet(vars, points, f"random(seed={seed},count={count})")


def external_hitting_set(vars, path, field: PrimeField | None = None) -> HittingSet:
    """Load an externally supplied point set: one assignment per line, decimal
    field elements in declared variable order.  Size is recorded; validity of
    the generator is trusted."""
    vars = tuple(vars)
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            try:
                vals = [int(x) for x in parts]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer entry") from exc
            if len(vals) != len(vars):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(vars)} values, got {len(vals)}"
                )
            if field is not None:
                vals = [v % field.p for v in vals]
            points.append(tuple(vals))
    return HittingSet(vars, tuple(points), f"external({path})")


def roabp_hitting_set(vars, width: int, degree, field: PrimeField,
                      generator: str = "grid", seed: int = 0,
                      count: int | None = None, path=None,
                      guard: int = DEFAULT_POINT_GUARD) -> HittingSet:
    """Point set aimed at width-``width`` read-once programs over ``vars``.
    The grid generator is unconditionally complete (and ignores the width);
    random is probabilistically complete; external loads a user file."""
    vars = tuple(vars)
    if generator == "grid":
        return grid_hitting_set(vars, degree, guard)
    if generator == "random":
        if count is None:
            d = max(degree) if not isinstance(degree, int) else degree
            count = max(1, (len(vars) * width * max(d, 1)) ** 2)
        return random_hitting_set(vars, field, count, seed, guard)
    if generator == "external":
        if path is None:
            raise ValueError("external generator needs a points file path")
        return external_hitting_set(vars, path, field)
    raise ValueError(f"unknown generator {generator!r}")


def k_pass_hitting_set(n: int, width: int, degree: int, k: int, field: PrimeField,
                       order=None, generator: str = "grid", seed: int = 0,
                       count: int | None = None, path=None,
                       guard: int = DEFAULT_POINT_GUARD) -> HittingSet:
    """Hitting set for k-pass programs in the given order: the read-once set
    for collapsed width w^(2k) (plain w when k = 1) at individual degree k*d."""
    vars = tuple(order) if order is not None else tuple(range(n))
    if sorted(vars) != list(range(n)):
        raise ValueError("order must be a permutation of all variables")
    eff_width = width if k == 1 else width ** (2 * k)
    return roabp_hitting_set(vars, eff_width, k * degree, field,
                             generator, seed, count, path, guard)


def _choose_subset(seq: ReadSequence) -> tuple:
    """One pruning round: per-read-monotone then regularly-interleaving.
    Returns (original variable ids, size floor) for the surviving subset."""
    mono = per_read_monotone_subset(seq)
    s1 = seq.restrict(mono)
    regular = regularly_interleaving_subset(s1)
    s2 = s1.restrict(regular)
    ok, _ = is_regularly_interleaving(s2)
    if not ok or not s2.is_per_read_monotone():
        raise RuntimeError("pruned subset failed its structural checks")
    subset = tuple(sorted(s1.labels[e] for e in regular))
    k = max(seq.k, 1)
    floor = seq.n ** (1.0 / 2 ** (k - 1)) / 3 ** (k * k)
    return subset, floor


def iteration_bound(n: int, k: int) -> float:
    """Round-count ceiling 2 * 3^(k^2) * n^(1 - 1/2^(k-1)) for the test."""
    if n <= 0:
        return 1.0
    return 2 * 3 ** (k * k) * n ** (1 - 1.0 / 2 ** (k - 1))


def _subset_degrees(abp: ObliviousAbp, subset) -> list:
    degs = abp.individual_degrees()
    return [degs[v] for v in subset]


def _build_generator(abp: ObliviousAbp, subset, k, generator, seed, count, path, guard):
    degrees = _subset_degrees(abp, subset)
    if generator == "grid":
        return grid_hitting_set(subset, degrees, guard)
    width = abp.width ** (2 * k)
    return roabp_hitting_set(subset, width, max(degrees, default=0) or 1,
                             abp.field, generator, seed, count, path, guard)


def _abp_nonzero(abp: ObliviousAbp, rng: random.Random, generator: str,
                 fastpath: int, guard: int, count, path) -> bool:
    """Exact nonzero test used inside the search loop.  Random evaluation
    probes certify nonzero quickly; a zero answer falls through to the exact
    path (direct expansion when small, recursion on fewer variables else)."""
    if not abp.read_order():
        return abp.evaluate([0] * abp.num_vars) != 0
    point = [0] * abp.num_vars
    for _ in range(DEFAULT_PROBES):
        for i in range(abp.num_vars):
            point[i] = abp.field.random(rng)
        if abp.evaluate(point) != 0:
            return True
    if abp.estimated_terms() <= fastpath:
        return not abp.expand(guard=max(fastpath, 1)).is_zero
    verdict = read_k_pit(abp, generator=generator, seed=rng.getrandbits(32),
                         guard=guard, fastpath=fastpath, count=count, path=path)
    return not verdict.is_zero


def read_k_pit(abp: ObliviousAbp, generator: str = "grid", seed: int = 0,
               guard: int = DEFAULT_POINT_GUARD,
               fastpath: int = DEFAULT_FASTPATH_TERMS,
               count: int | None = None, path=None) -> PitVerdict:
    """White-box identity test for a read-k oblivious program.

    Each round prunes the current read sequence to a per-read-monotone,
    regularly-interleaving subset y_i, then scans the generator's point set
    over y_i (in enumeration order) for the first point whose restriction
    stays nonzero.  If a round exhausts its points the polynomial is declared
    zero; otherwise the accepted points assemble into a witness, which is
    re-checked by direct evaluation before returning.  With the grid
    generator the verdict is exact.
    """
    cls = validate(abp)
    work = cls.normalized
    k = max(cls.k, 1)
    rng = random.Random(seed)
    assigned: dict = {}
    iterations: list = []
    while work.read_order():
        seq = read_sequence(work)
        subset, floor = _choose_subset(seq)
        hs = _build_generator(work, subset, k, generator, seed + len(iterations),
                              count, path, guard)
        chosen = None
        tried = 0
        restricted = None
        for pt in hs.points:
            tried += 1
            candidate = work.restrict(dict(zip(subset, pt)))
            if _abp_nonzero(candidate, rng, generator, fastpath, guard, count, path):
                chosen = pt
                restricted = candidate
                break
        iterations.append(IterationRecord(subset, floor, len(hs), tried, chosen))
        if chosen is None:
            return PitVerdict(True, None, iterations, generator, abp.num_vars, k)
        assigned.update(zip(subset, chosen))
        work = restricted
    constant = work.evaluate([0] * work.num_vars)
    if constant == 0:
        return PitVerdict(True, None, iterations, generator, abp.num_vars, k)
    witness = tuple(assigned.get(v, 0) for v in range(abp.num_vars))
    check = abp.evaluate(witness)
    if check == 0:
        raise RuntimeError("internal error: witness evaluates to zero")
    return PitVerdict(False, witness, iterations, generator, abp.num_vars, k)


def read_k_hitting_set(abp: ObliviousAbp, generator: str = "grid", seed: int = 0,
                       guard: int = DEFAULT_POINT_GUARD, count: int | None = None,
                       path=None) -> HittingSet:
    """The full point set the test walks: the cartesian product of the
    per-round sets H_1^(y_1) x ... x H_t^(y_t).  Only the read order of the
    program is used to build it."""
    cls = validate(abp)
    work = cls.normalized
    k = max(cls.k, 1)
    seq = read_sequence(work) if work.read_order() else None
    rounds = []
    idx = 0
    while seq is not None and seq.n > 0:
        subset, _ = _choose_subset(seq)
        hs = _build_generator(work, subset, k, generator, seed + idx, count, path, guard)
        rounds.append(hs)
        keep = [e for e in range(seq.n) if seq.labels[e] not in set(subset)]
        seq = seq.restrict(keep) if keep else None
        idx += 1
    size = 1
    for hs in rounds:
        size *= max(len(hs), 1)
        if size > guard:
            raise GuardExceeded(f"cartesian product exceeds guard {guard}")
    n = abp.num_vars
    points = []
    for combo in itertools.product(*(hs.points for hs in rounds)):
        point = [0] * n
        for hs, pt in zip(rounds, combo):
            for v, val in zip(hs.vars, pt):
                point[v] = val
        points.append(tuple(point))
    if not points:
        points = [()] if n == 0 else [tuple([0] * n)]
    prov = " x ".join(
        f"{hs.provenance}^{{{','.join(str(v + 1) for v in hs.vars)}}}" for hs in rounds
    ) or "empty"
    return HittingSet(tuple(range(n)), tuple(points), prov)


# -- iteration-count inequality ------------------------------------------------


def _iroot(value: int, k: int) -> int:
    """Floor of the integer k-th root."""
    if value < 0:
        raise ValueError("negative radicand")
    if value == 0:
        return 0
    x = 1 << ((value.bit_length() + k - 1) // k + 1)
    while True:
        y = ((k - 1) * x + value // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > value:
        x -= 1
    return x


def _pow_bounds(base: Fraction, exp: Fraction, bits: int) -> tuple:
    """Rational enclosure of base**exp for base >= 0 and 0 < exp < 1."""
    if base < 0:
        raise ValueError("negative base")
    if base == 0:
        return Fraction(0), Fraction(0)
    a, b = exp.numerator, exp.denominator
    num = base.numerator ** a * (1 << (bits * b))
    den = base.denominator ** a
    root = _iroot(num // den, b)
    scale = 1 << bits
    return Fraction(root, scale), Fraction(root + 1, scale)


def iteration_bound_check(n: int, p, r: int, bits: int = 32) -> bool:
    """Exact decision, via rational interval arithmetic, of the inequality

        n^(1-p) - (n - n^p / r)^(1-p) >= (1-p) / r

    for 0 < p < 1 (given as an exact rational, e.g. the string "0.1") and a
    positive integer r.  Precision is refined until the comparison resolves.
    """
    if isinstance(p, float):
        p = Fraction(str(p))
    else:
        p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    if r < 1 or n < 1:
        raise ValueError("r and n must be positive integers")
    rhs = (1 - p) / r
    nfrac = Fraction(n)
    while True:
        a_lo, a_hi = _pow_bounds(nfrac, 1 - p, bits)
        b_lo, b_hi = _pow_bounds(nfrac, p, bits)
        inner_lo = max(nfrac - b_hi / r, Fraction(0))
        inner_hi = max(nfrac - b_lo / r, Fraction(0))
        c_lo, _ = _pow_bounds(inner_lo, 1 - p, bits)
        _, c_hi = _pow_bounds(inner_hi, 1 - p, bits)
        if a_lo - c_hi >= rhs:
            return True
        if a_hi - c_lo < rhs:
            return False
        bits *= 2
        if bits > 4096:
            raise RuntimeError("interval refinement failed to resolve comparison")


def iteration_bound_sweep(p_values, r_values, n_max: int):
    """Yield (p, r, n, ok) over the full parameter grid."""
    for p in p_values:
        for r in r_values:
            for n in range(1, n_max + 1):
                yield p, r, n, iteration_bound_check(n, p, r)
