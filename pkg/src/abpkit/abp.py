"""Oblivious algebraic branching programs: layered products of univariate
matrices, one read variable per layer.

The polynomial computed by a program is the (1,1) entry of the product of its
layer matrices.  ``expand`` is the brute-force oracle that turns a program
into an explicit SparsePoly; it is guarded so it refuses (never truncates)
when the estimated term count is too large.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import GuardExceeded, PrimeField, SparsePoly, UniMatrix, mat_mul
from .sequences import ReadSequence

DEFAULT_EXPAND_GUARD = 10 ** 6


class ClassificationError(ValueError):
    """An ABP does not belong to the class an operation requires."""


@dataclass
class ObliviousAbp:
    """Ordered list of univariate-entry matrices with chained dimensions.
    The first layer has one row and the last layer has one column (the source
    and sink vertices)."""

    field: PrimeField
    num_vars: int
    layers: tuple

    def __post_init__(self) -> None:
        self.layers = tuple(self.layers)
        prev_out = 1
        for idx, layer in enumerate(self.layers):
            if layer.field != self.field:
                raise ValueError(f"layer {idx} uses a different field")
            if layer.var is not None and not 0 <= layer.var < self.num_vars:
                raise ValueError(f"layer {idx} reads variable {layer.var} out of range")
            if layer.width_in != prev_out:
                raise ValueError(
                    f"layer {idx} expects width {layer.width_in}, previous produces {prev_out}"
                )
            prev_out = layer.width_out
        if self.layers and prev_out != 1:
            raise ValueError("last layer must have a single column (sink)")

    # -- basic measures ------------------------------------------------------

    @property
    def width(self) -> int:
        w = 1
        for layer in self.layers:
            w = max(w, layer.width_in, layer.width_out)
        return w

    @property
    def degree(self) -> int:
        return max((layer.degree for layer in self.layers), default=0)

    def read_order(self) -> list:
        """Variables read layer by layer; constant layers read nothing and
        identity-padding layers count as genuine reads."""
        return [layer.var for layer in self.layers if layer.var is not None]

    def read_counts(self) -> dict:
        counts: dict = {}
        for v in self.read_order():
            counts[v] = counts.get(v, 0) + 1
        return counts

    def individual_degrees(self) -> list:
        degs = [0] * self.num_vars
        for layer in self.layers:
            if layer.var is not None:
                degs[layer.var] += layer.degree
        return degs

    def estimated_terms(self) -> int:
        est = 1
        for d in self.individual_degrees():
            est *= d + 1
        return est

    # -- semantics -----------------------------------------------------------

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.num_vars:
            raise ValueError(f"point length {len(point)} != num_vars {self.num_vars}")
        p = self.field.p
        vec = [1]
        for layer in self.layers:
            grid = layer.eval_at(point[layer.var]) if layer.var is not None \
                else layer.eval_at(0)
            out = [0] * layer.width_out
            for j in range(layer.width_out):
                s = 0
                for i, v in enumerate(vec):
                    if v:
                        s += v * grid[i][j]
                out[j] = s % p
            vec = out
        return vec[0] % p if vec else 1

    def expand(self, guard: int = DEFAULT_EXPAND_GUARD) -> SparsePoly:
        """Exact polynomial computed by the program.  Refuses explicitly when
        the estimated term count exceeds the guard."""
        est = self.estimated_terms()
        if est > guard:
            raise GuardExceeded(
                f"expansion estimated at {est} terms exceeds guard {guard}"
            )
        row = [SparsePoly.const(self.field, self.num_vars, 1)]
        for layer in self.layers:
            entry_polys = [[layer.entry_poly(i, j, self.num_vars)
                            for j in range(layer.width_out)]
                           for i in range(layer.width_in)]
            out = []
            for j in range(layer.width_out):
                acc = SparsePoly.zero(self.field, self.num_vars)
                for i, poly in enumerate(row):
                    if poly.is_zero:
                        continue
                    acc = acc + poly * entry_polys[i][j]
                out.append(acc)
            row = out
        return row[0]

    def restrict(self, assignment: Mapping[int, int], compress: bool = True) -> "ObliviousAbp":
        """Fix some variables: layers reading them become constant matrices.
        With ``compress`` adjacent constant layers are multiplied together,
        which never changes the computed polynomial."""
        for i in assignment:
            if not 0 <= i < self.num_vars:
                raise ValueError(f"assigned variable {i} out of range")
        new_layers = []
        for layer in self.layers:
            if layer.var is not None and layer.var in assignment:
                new_layers.append(layer.to_constant(assignment[layer.var]))
            else:
                new_layers.append(layer)
        if compress:
            merged: list = []
            pending = None
            for layer in new_layers:
                if layer.is_constant and layer.var is None:
                    grid = layer.eval_at(0)
                    pending = grid if pending is None else mat_mul(self.field, pending, grid)
                else:
                    if pending is not None:
                        merged.append(UniMatrix.constant(self.field, pending))
                        pending = None
                    merged.append(layer)
            if pending is not None:
                merged.append(UniMatrix.constant(self.field, pending))
            new_layers = merged
        return ObliviousAbp(self.field, self.num_vars, tuple(new_layers))


@dataclass
class AbpClass:
    """Result of classifying an oblivious ABP: tight read multiplicity,
    k-pass structure, and the exact-k normalized copy padded with identity
    layers."""

    k: int
    read_counts: dict
    is_k_pass: bool
    is_k_pass_varying_order: bool
    pass_orders: tuple | None
    normalized: ObliviousAbp


def normalize(abp: ObliviousAbp, k: int | None = None) -> ObliviousAbp:
    """Pad with identity layers so every variable is read exactly k times.
    Padding layers are 1x1 identities appended after the sink, which keeps the
    width and the computed polynomial unchanged."""
    counts = abp.read_counts()
    k_tight = max(counts.values(), default=0)
    if k is None:
        k = max(k_tight, 1) if abp.num_vars else k_tight
    if k_tight > k:
        raise ValueError(f"program already reads a variable {k_tight} times > k={k}")
    pad = []
    for v in range(abp.num_vars):
        for _ in range(k - counts.get(v, 0)):
            pad.append(UniMatrix.identity(abp.field, 1, var=v, padding=True))
    if not pad:
        return abp
    return ObliviousAbp(abp.field, abp.num_vars, abp.layers + tuple(pad))


def validate(abp: ObliviousAbp) -> AbpClass:
    """Classify the program: tight k, k-pass / k-pass varying-order structure
    (judged on the raw read order), plus the normalized exact-k copy."""
    order = abp.read_order()
    counts = abp.read_counts()
    k = max(counts.values(), default=0)
    n = abp.num_vars
    is_pass = False
    varying = False
    pass_orders = None
    if n > 0 and k > 0 and len(order) == n * k and len(counts) == n:
        chunks = [tuple(order[j * n:(j + 1) * n]) for j in range(k)]
        if all(sorted(c) == list(range(n)) for c in chunks):
            varying = True
            pass_orders = tuple(chunks)
            is_pass = all(c == chunks[0] for c in chunks)
    return AbpClass(
        k=k,
        read_counts=counts,
        is_k_pass=is_pass,
        is_k_pass_varying_order=varying,
        pass_orders=pass_orders,
        normalized=normalize(abp),
    )


def read_sequence(abp: ObliviousAbp) -> ReadSequence:
    """Read sequence of an exact-k program, padding layers included.  Elements
    are relabeled by first occurrence; the original variable ids are kept in
    the sequence labels."""
    order = abp.read_order()
    counts = abp.read_counts()
    if counts and len(set(counts.values())) != 1:
        raise ClassificationError(
            "read sequence requires an exact-k program; normalize() first"
        )
    return ReadSequence.from_order(order)


# -- file format -------------------------------------------------------------
#
# An ABP file is a JSON document:
#
#   {"field_prime": 101,
#    "num_vars": 4,
#    "layers": [{"var": 1, "matrix": [[[0, 1], [1]], [[], [2, 0, 3]]]},
#               {"var": null, "matrix": [[[5]]]}]}
#
# "var" is the 1-based read variable (null for a constant layer), "matrix" is
# a rows-of-entries grid and each entry is a coefficient list, lowest degree
# first (the empty list is the zero polynomial).  An optional "padding": true
# marks identity-padding layers.  Serialization is canonical: sorted keys,
# fixed separators, one trailing newline.


def to_json_obj(abp: ObliviousAbp) -> dict:
    layers = []
    for layer in abp.layers:
        entry: dict = {
            "var": layer.var + 1 if layer.var is not None else None,
            "matrix": [[list(coeffs) for coeffs in row] for row in layer.entries],
        }
        if layer.padding:
            entry["padding"] = True
        layers.append(entry)
    return {"field_prime": abp.field.p, "num_vars": abp.num_vars, "layers": layers}


def to_canonical_text(abp: ObliviousAbp) -> str:
    return json.dumps(to_json_obj(abp), sort_keys=True, separators=(",", ":")) + "\n"


def from_json_obj(obj: dict) -> ObliviousAbp:
    try:
        prime = obj["field_prime"]
        num_vars = obj["num_vars"]
        raw_layers = obj["layers"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"ABP document missing required field: {exc}") from exc
    field = PrimeField(prime)
    layers = []
    for idx, raw in enumerate(raw_layers):
        try:
            var = raw["var"]
            matrix = raw["matrix"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"layer {idx} missing required field: {exc}") from exc
        if var is not None:
            if not isinstance(var, int) or var < 1:
                raise ValueError(f"layer {idx}: var must be a 1-based index or null")
            var -= 1
        rows = tuple(tuple(tuple(entry) for entry in row) for row in matrix)
        layers.append(UniMatrix(field, var, rows, padding=bool(raw.get("padding", False))))
    return ObliviousAbp(field, num_vars, tuple(layers))


def parse_text(text: str) -> ObliviousAbp:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(
            f"ABP parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return from_json_obj(obj)


def load(path) -> ObliviousAbp:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_text(fh.read())


def save(abp: ObliviousAbp, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_canonical_text(abp))
