"""Evaluation dimension and the width characterization of read-once oblivious
programs.

For a partition S, T of the variables (large field), the dimension of the
space spanned by all restrictions fixing S equals the rank of the coefficient
matrix whose rows are indexed by S-monomials and columns by T-monomials.
A polynomial has a read-once oblivious program of width w in a given order
exactly when this dimension is at most w at every prefix cut, and the
synthesis below realizes that width cut by cut.

Variables moved into the coefficient field (the R part) are handled by
substituting independent uniformly random values over a few trials and taking
the best rank, a with-high-probability lower bound on the generic rank.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .abp import DEFAULT_EXPAND_GUARD, ClassificationError, ObliviousAbp, validate
from .algebra import LinearSolver, PrimeField, SparsePoly, UniMatrix, sparse_rank


@dataclass
class EvalDimReport:
    """Dimension of the restriction span for one (S, T; R) split, together
    with assignments to S whose restrictions realize a basis."""

    S: tuple
    T: tuple
    R: tuple
    dimension: int
    basis_assignments: tuple
    trial_dims: tuple = ()


@dataclass
class Roabp:
    """A read-once oblivious program together with its variable order and the
    realized width between consecutive variable layers."""

    abp: ObliviousAbp
    order: tuple
    width_profile: tuple

    def __post_init__(self) -> None:
        self.order = tuple(self.order)
        self.width_profile = tuple(self.width_profile)
        if self.abp.read_order() != list(self.order):
            raise ValueError("program does not read the declared order once each")

    @property
    def width(self) -> int:
        return self.abp.width


def _check_partition(num_vars: int, *parts) -> None:
    seen: set = set()
    for part in parts:
        for v in part:
            if not 0 <= v < num_vars:
                raise ValueError(f"variable {v} out of range")
            if v in seen:
                raise ValueError(f"variable {v} appears in two parts")
            seen.add(v)
    if seen != set(range(num_vars)):
        raise ValueError("S, T, R must partition all variables")


def _pd_rows(f: SparsePoly, S: Sequence[int], T: Sequence[int]) -> list:
    """Rows of the partial derivative matrix: one sparse vector per S-monomial
    of f, indexed by T-monomials.  Requires the support of f inside S union T."""
    S = sorted(S)
    T = sorted(T)
    allowed = set(S) | set(T)
    rows: dict = {}
    for exps, c in f.terms.items():
        for i, e in enumerate(exps):
            if e and i not in allowed:
                raise ValueError(f"polynomial mentions variable {i} outside S and T")
        skey = tuple(exps[i] for i in S)
        tkey = tuple(exps[i] for i in T)
        rows.setdefault(skey, {})[tkey] = c
    return list(rows.values())


def pd_rank(f: SparsePoly, S, T) -> int:
    """Rank over F_p of the partial derivative matrix for the split (S, T)."""
    return sparse_rank(f.field, _pd_rows(f, S, T))


def _assignment_grid(degrees: Sequence[int]):
    """Lexicographic grid over {0..d_v} per variable."""
    if not degrees:
        yield ()
        return
    head, tail = degrees[0], degrees[1:]
    for v in range(head + 1):
        for rest in _assignment_grid(tail):
            yield (v,) + rest


def _greedy_basis(f: SparsePoly, S: Sequence[int], target: int) -> tuple:
    """First assignments, in lexicographic grid order, whose restrictions span
    the evaluation space.  Stops as soon as the known dimension is reached."""
    S = sorted(S)
    degs = f.individual_degrees()
    solver = LinearSolver(f.field)
    chosen = []
    for a in _assignment_grid([degs[v] for v in S]):
        g = f.substitute(dict(zip(S, a)))
        if solver.try_add(g.terms):
            chosen.append(a)
            if solver.rank >= target:
                break
    return tuple(chosen)


def eval_dim(f: SparsePoly, S, T, R=(), *, trials: int = 3, seed: int = 0,
             with_basis: bool = True) -> EvalDimReport:
    """Evaluation dimension of f with respect to fixing S, distinguishing T,
    with R moved into the coefficient field by random substitution.

    With empty R the answer is the exact partial-derivative-matrix rank; with
    nonempty R it is the maximum rank over ``trials`` independent random
    substitutions, exact with high probability.
    """
    S = tuple(sorted(set(S)))
    T = tuple(sorted(set(T)))
    R = tuple(sorted(set(R)))
    _check_partition(f.num_vars, S, T, R)
    if f.field.p <= f.total_degree():
        raise ValueError(
            f"field size {f.field.p} must exceed deg(f) = {f.total_degree()}"
        )
    if not R:
        dim = pd_rank(f, S, T)
        basis = _greedy_basis(f, S, dim) if with_basis else ()
        return EvalDimReport(S, T, R, dim, basis)
    rng = random.Random(seed)
    best_dim = -1
    best_sub: SparsePoly | None = None
    trial_dims = []
    for _ in range(trials):
        sub = {r: f.field.random(rng) for r in R}
        g = f.substitute(sub)
        d = pd_rank(g, S, T)
        trial_dims.append(d)
        if d > best_dim:
            best_dim = d
            best_sub = g
    basis = _greedy_basis(best_sub, S, best_dim) if with_basis else ()
    return EvalDimReport(S, T, R, best_dim, basis, tuple(trial_dims))


def _check_order(num_vars: int, order) -> tuple:
    order = tuple(order)
    if sorted(order) != list(range(num_vars)):
        raise ValueError("order must be a permutation of all variables")
    return order


def roabp_width_profile(f: SparsePoly, order) -> tuple:
    """Exact evaluation dimension at every interior prefix cut of the order:
    the pointwise minimal width of any read-once program in that order."""
    order = _check_order(f.num_vars, order)
    if f.field.p <= f.total_degree():
        raise ValueError("field too small for exact width profile")
    out = []
    for i in range(1, f.num_vars):
        out.append(pd_rank(f, order[:i], order[i:]))
    return tuple(out)


def _inv_vandermonde(field: PrimeField, npoints: int) -> list:
    """Inverse of the Vandermonde matrix on points 0..npoints-1 over F_p."""
    p = field.p
    size = npoints
    aug = [[pow(c, e, p) for e in range(size)] + [1 if r == c else 0
           for r in range(size)] for c in range(size)]
    for col in range(size):
        piv = next(r for r in range(col, size) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = field.inv(aug[col][col])
        aug[col] = [(x * inv) % p for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % p for x, y in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def roabp_synthesize(f: SparsePoly, order=None) -> Roabp:
    """Construct a read-once oblivious program for f in the given order whose
    realized widths meet the evaluation-dimension profile exactly.

    At every prefix cut a basis of restrictions is chosen greedily in
    lexicographic order over the (d+1)-grid of prefix assignments; each layer
    then expresses the previous basis, extended by one variable, in the next
    basis, with the univariate entries recovered by interpolation.
    """
    n = f.num_vars
    order = _check_order(n, order if order is not None else range(n))
    field = f.field
    if field.p <= f.total_degree():
        raise ValueError("field too small for synthesis")
    if n == 0:
        value = f.coefficient(())
        abp = ObliviousAbp(field, 0, (UniMatrix.constant(field, ((value,),)),))
        return Roabp(abp, (), ())
    if f.is_zero:
        layers = []
        for idx, v in enumerate(order):
            entry = () if idx == 0 else (1,)
            layers.append(UniMatrix(field, v, ((entry,),)))
        return Roabp(ObliviousAbp(field, n, tuple(layers)),
                     order, (1,) * (n - 1))
    degs = f.individual_degrees()
    cur_basis = [f]
    layers = []
    profile = []
    for i in range(1, n + 1):
        v = order[i - 1]
        dv = degs[v]
        solver = LinearSolver(field, track_coords=True)
        if i < n:
            target = pd_rank(f, order[:i], order[i:])
            basis_polys: list = []
            for a in _assignment_grid([degs[u] for u in order[:i]]):
                g = f.substitute(dict(zip(order[:i], a)))
                if solver.try_add(g.terms):
                    basis_polys.append(g)
                    if solver.rank >= target:
                        break
        else:
            one = SparsePoly.const(field, n, 1)
            solver.try_add(one.terms)
            basis_polys = [one]
        vinv = _inv_vandermonde(field, dv + 1)
        rows = []
        for g in cur_basis:
            coords_per_point = []
            for c in range(dv + 1):
                h = g.substitute({v: c})
                coords = solver.express(h.terms, size=len(basis_polys))
                if coords is None:
                    raise RuntimeError("synthesis basis does not span an extension")
                coords_per_point.append(coords)
            row = []
            for s in range(len(basis_polys)):
                coeffs = []
                for e in range(dv + 1):
                    acc = 0
                    for c in range(dv + 1):
                        acc += vinv[e][c] * coords_per_point[c][s]
                    coeffs.append(acc % field.p)
                row.append(tuple(coeffs))
            rows.append(tuple(row))
        layers.append(UniMatrix(field, v, tuple(rows)))
        if i < n:
            profile.append(len(basis_polys))
        cur_basis = basis_polys
    abp = ObliviousAbp(field, n, tuple(layers))
    return Roabp(abp, order, tuple(profile))


def k_gap_check(abp: ObliviousAbp, prefix_len: int, order=None) -> int:
    """Number of alternations between layers reading the first ``prefix_len``
    variables of the order and layers reading the rest: the minimal t for
    which the restricted program factors as N_1 M_1 ... N_t M_t.  The program
    has the k-gap property for this prefix exactly when the result is <= k."""
    n = abp.num_vars
    order = _check_order(n, order if order is not None else range(n))
    if not 0 <= prefix_len <= n:
        raise ValueError(f"prefix length {prefix_len} out of range")
    prefix = set(order[:prefix_len])
    reads = abp.read_order()
    if not reads:
        return 1
    flags = ["P" if v in prefix else "N" for v in reads]
    runs = 1 + sum(1 for a, b in zip(flags, flags[1:]) if a != b)
    p_runs = (runs + (flags[0] == "P")) // 2
    n_runs = runs - p_runs
    t = (p_runs + n_runs + (flags[0] == "N") + (flags[-1] == "P")) // 2
    return max(t, 1)


def max_gap(abp: ObliviousAbp, order=None) -> int:
    n = abp.num_vars
    return max((k_gap_check(abp, i, order) for i in range(1, n + 1)), default=1)


def k_gap_to_roabp(abp: ObliviousAbp, bound: int | None = None,
                   guard: int = DEFAULT_EXPAND_GUARD) -> Roabp:
    """Collapse a width-w program with the k-gap property (identity prefix
    order) to a read-once program of width at most w^(2k) in that order."""
    cls = validate(abp)
    k = bound if bound is not None else max(cls.k, 1)
    offending = [(i, g) for i in range(1, abp.num_vars + 1)
                 if (g := k_gap_check(abp, i)) > k]
    if offending:
        i, g = offending[0]
        raise ClassificationError(
            f"k-gap bound {k} violated at prefix length {i} (needs {g} gaps)"
        )
    f = abp.expand(guard)
    return roabp_synthesize(f, tuple(range(abp.num_vars)))


def k_pass_to_roabp(abp: ObliviousAbp, guard: int = DEFAULT_EXPAND_GUARD) -> Roabp:
    """Collapse a k-pass program (same order every pass) to a read-once
    program in that order, of width at most w^(2k).  A 1-pass input is already
    read-once and is returned unchanged."""
    cls = validate(abp)
    if not cls.is_k_pass:
        raise ClassificationError("program is not k-pass in a single order")
    pi = cls.pass_orders[0]
    if cls.k == 1:
        boundary = tuple(layer.width_out for layer in abp.layers[:-1])
        return Roabp(abp, pi, boundary)
    gaps = max_gap(abp, order=pi)
    if gaps > cls.k:
        raise ClassificationError(
            f"k-pass program shows {gaps} gaps in its own order; expected <= {cls.k}"
        )
    f = abp.expand(guard)
    return roabp_synthesize(f, pi)
