"""Seeded random instances: programs, polynomials, and read sequences.

Generators are deterministic given their Random instance, and the program
samplers keep the estimated expansion size under a term budget so that the
brute-force oracle stays viable on every instance they emit.
"""

from __future__ import annotations

import random
from typing import Sequence

from .abp import ObliviousAbp
from .algebra import PrimeField, SparsePoly, UniMatrix
from .evaldim import Roabp
from .sequences import ReadSequence


def _random_entry(rng: random.Random, field: PrimeField, degree: int) -> tuple:
    return tuple(field.random(rng) for _ in range(degree + 1))


def _random_matrix(rng: random.Random, field: PrimeField, var: int,
                   rows: int, cols: int, degree: int) -> UniMatrix:
    grid = tuple(tuple(_random_entry(rng, field, degree) for _ in range(cols))
                 for _ in range(rows))
    return UniMatrix(field, var, grid)


def random_read_k_abp(rng: random.Random, field: PrimeField, n: int, k: int,
                      width: int, max_entry_degree: int = 2,
                      term_budget: int = 30000,
                      zero_kind: str | None = None) -> ObliviousAbp:
    """Random oblivious program with tight read multiplicity k.  Layer degrees
    are throttled so the product of (individual degree + 1) stays within the
    term budget.  ``zero_kind`` forces an identically zero polynomial either
    by a zero layer or by a cancelling two-lane chain."""
    if n < 1 or k < 1 or width < 1:
        raise ValueError("n, k, width must be positive")
    counts = [rng.randint(1, k) for _ in range(n)]
    counts[rng.randrange(n)] = k
    order = [v for v in range(n) for _ in range(counts[v])]
    rng.shuffle(order)
    length = len(order)

    if zero_kind == "cancel":
        # Two identical lanes subtracted at the sink: width 2, exactly zero.
        layers = []
        ind = [0] * n
        for pos, v in enumerate(order):
            est = 1
            for d in ind:
                est *= d + 1
            room = max_entry_degree
            while room > 0 and est // (ind[v] + 1) * (ind[v] + room + 1) > term_budget:
                room -= 1
            deg = rng.randint(0, room)
            ind[v] += deg
            entry = _random_entry(rng, field, deg)
            if pos == 0:
                layers.append(UniMatrix(field, v, ((entry, entry),)))
            else:
                layers.append(UniMatrix(field, v, ((entry, ()), ((), entry))))
        c = rng.randrange(1, field.p)
        layers.append(UniMatrix(field, None, (((c,),), ((field.p - c,),))))
        return ObliviousAbp(field, n, tuple(layers))

    dims = [1] + [rng.randint(1, width) for _ in range(length - 1)] + [1]
    layers = []
    ind = [0] * n
    for pos, v in enumerate(order):
        est = 1
        for d in ind:
            est *= d + 1
        room = max_entry_degree
        while room > 0 and est // (ind[v] + 1) * (ind[v] + room + 1) > term_budget:
            room -= 1
        deg = rng.randint(0, room)
        ind[v] += deg
        layers.append(_random_matrix(rng, field, v, dims[pos], dims[pos + 1], deg))
    if zero_kind == "zero_layer":
        idx = rng.randrange(length)
        old = layers[idx]
        zero = tuple(tuple(() for _ in range(old.width_out))
                     for _ in range(old.width_in))
        layers[idx] = UniMatrix(field, old.var, zero)
    elif zero_kind is not None:
        raise ValueError(f"unknown zero_kind {zero_kind!r}")
    return ObliviousAbp(field, n, tuple(layers))


def random_k_pass_abp(rng: random.Random, field: PrimeField, n: int, k: int,
                      width: int, entry_degree: int = 1,
                      varying: bool = False) -> ObliviousAbp:
    """Random k-pass program: one layer per variable per pass, same order each
    pass unless ``varying``."""
    base = list(range(n))
    rng.shuffle(base)
    orders = []
    for _ in range(k):
        if varying:
            pi = list(range(n))
            rng.shuffle(pi)
            orders.append(pi)
        else:
            orders.append(list(base))
    flat = [v for pi in orders for v in pi]
    dims = [1] + [rng.randint(1, width) for _ in range(len(flat) - 1)] + [1]
    layers = []
    for pos, v in enumerate(flat):
        deg = rng.randint(0, entry_degree)
        layers.append(_random_matrix(rng, field, v, dims[pos], dims[pos + 1], deg))
    return ObliviousAbp(field, n, tuple(layers))


def random_roabp(rng: random.Random, field: PrimeField, n: int, width: int,
                 entry_degree: int = 1, order: Sequence[int] | None = None) -> Roabp:
    """Random read-once program in the given (or a random) order."""
    if order is None:
        order = list(range(n))
        rng.shuffle(order)
    order = tuple(order)
    dims = [1] + [rng.randint(1, width) for _ in range(n - 1)] + [1]
    if n == 1:
        dims = [1, 1]
    layers = []
    for pos, v in enumerate(order):
        deg = rng.randint(0, entry_degree)
        layers.append(_random_matrix(rng, field, v, dims[pos], dims[pos + 1], deg))
    abp = ObliviousAbp(field, n, tuple(layers))
    return Roabp(abp, order, tuple(layer.width_out for layer in abp.layers[:-1]))


def random_multilinear_poly(rng: random.Random, field: PrimeField, n: int,
                            density: float = 0.4) -> SparsePoly:
    """Random multilinear polynomial; resamples until nonzero."""
    while True:
        terms = {}
        for bits in range(2 ** n):
            if rng.random() < density:
                exps = tuple((bits >> i) & 1 for i in range(n))
                terms[exps] = rng.randrange(1, field.p)
        if terms:
            return SparsePoly(field, n, terms)


def random_read_k_sequence(rng: random.Random, n: int, k: int) -> ReadSequence:
    """Uniformly shuffled read-k order, canonically relabeled."""
    order = [v for v in range(n) for _ in range(k)]
    rng.shuffle(order)
    return ReadSequence.from_order(order)


def random_per_read_monotone_sequence(rng: random.Random, n: int, k: int,
                                      directions: Sequence[str] | None = None) -> ReadSequence:
    """Random per-read-monotone read-k sequence built as a random linear
    extension of k monotone reads (first read increasing by convention)."""
    if directions is None:
        directions = ["inc"] + [rng.choice(["inc", "dec"]) for _ in range(k - 1)]
    if directions[0] == "dec":
        raise ValueError("first read must be increasing")
    tokens = []
    for i, d in enumerate(directions, start=1):
        elems = list(range(n)) if d == "inc" else list(range(n - 1, -1, -1))
        tokens.append(elems)
    ptr = [0] * k
    placed = [0] * n
    order = []
    while any(ptr[i] < n for i in range(k)):
        ready = []
        for i in range(k):
            if ptr[i] >= n:
                continue
            e = tokens[i][ptr[i]]
            if placed[e] == i:
                ready.append(i)
        i = rng.choice(ready)
        e = tokens[i][ptr[i]]
        order.append(e)
        placed[e] += 1
        ptr[i] += 1
    return ReadSequence.from_order(order)
