"""Explicit search over the commuting graph of a full matrix ring.

Vertices are the non-scalar n x n matrices over a finite field, with an edge
between commuting pairs.  Matrices are addressed by an integer code: entries
read row-major, each entry contributing one base-q digit, least significant
first.  Neighbor expansion enumerates the centralizer of a vertex instead of
scanning the whole space, which is what makes exhaustive BFS workable at desk
scale.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .commute import (
    _projective_reps,
    is_scalar,
    lift_rows_raw,
)
from .errors import CapExceeded, DimMismatch, FieldMismatch, ScalarVertex
from .field import FieldSpec
from .matrix import ExactMatrix, nullspace_raw, rank_raw, unvec

SPACE_CAP = 1 << 24
DIAMETER_CAP = 1 << 20
_PREBUILD_CAP = 1 << 17  # adjacency lists are materialized below this many codes

INFINITE = math.inf


# ---------------------------------------------------------------------------
# codec


@dataclass(frozen=True)
class MatIndex:
    """Position of a matrix in the enumeration of Mat_n over a finite field."""

    spec: FieldSpec
    n: int
    code: int

    def to_matrix(self) -> ExactMatrix:
        return decode_matrix(self.spec, self.n, self.code)

    @classmethod
    def of_matrix(cls, m: ExactMatrix) -> "MatIndex":
        return cls(m.spec, m.nrows, encode_matrix(m))


def encode_matrix(m: ExactMatrix) -> int:
    """Code of a square matrix over a finite field (row-major base-q digits)."""
    q = m.spec.order
    if q is None:
        raise FieldMismatch("only finite-field matrices have codes")
    if not m.is_square:
        raise DimMismatch("codes are defined for square matrices")
    code = 0
    flat = [x for row in m.rows for x in row]
    for raw in reversed(flat):
        code = code * q + raw
    return code


def decode_matrix(spec: FieldSpec, n: int, code: int) -> ExactMatrix:
    q = spec.order
    if q is None:
        raise FieldMismatch("only finite fields enumerate matrices")
    total = q ** (n * n)
    if not 0 <= code < total:
        raise DimMismatch(f"code {code} out of range for n={n}, q={q}")
    digits = []
    for _ in range(n * n):
        digits.append(code % q)
        code //= q
    return ExactMatrix._from_raw(spec, [digits[i * n : (i + 1) * n] for i in range(n)])


def _scalar_codes(spec: FieldSpec, n: int) -> frozenset[int]:
    q = spec.order
    stride = sum(q ** (i * (n + 1)) for i in range(n))
    return frozenset(lam * stride for lam in range(q))


# ---------------------------------------------------------------------------
# neighbor generation


def _centralizer_combos(spec: FieldSpec, n: int, code: int) -> list[int]:
    """Codes of every matrix in the centralizer of the decoded vertex."""
    mat = decode_matrix(spec, n, code)
    basis = nullspace_raw(spec, lift_rows_raw(mat))
    q = spec.order
    d = len(basis)
    if spec.kind == "prime" and d > 1:
        p = spec.p
        pos_pow = np.array([q**t for t in range(n * n)], dtype=np.int64)
        bmat = np.array(basis, dtype=np.int64)
        count = q**d
        coeff_pow = np.array([q**t for t in range(d)], dtype=np.int64)
        coeffs = (np.arange(count, dtype=np.int64)[:, None] // coeff_pow[None, :]) % q
        rows = coeffs @ bmat % p
        return (rows @ pos_pow).tolist()
    ops = spec.ops()
    # mixed-radix enumeration keeps combo order aligned with coefficient codes
    out = []
    for t in range(q**d):
        tt = t
        acc = [ops.zero] * (n * n)
        for bi in range(d):
            digit = tt % q
            tt //= q
            if digit:
                row = basis[bi]
                acc = [ops.add(x, ops.mul(digit, y)) for x, y in zip(acc, row)]
        code_acc = 0
        for raw in reversed(acc):
            code_acc = code_acc * q + raw
        out.append(code_acc)
    return out


def _neighbor_codes(spec: FieldSpec, n: int, code: int) -> list[int]:
    scalars = _scalar_codes(spec, n)
    combos = _centralizer_combos(spec, n, code)
    return sorted(c for c in combos if c != code and c not in scalars)


def neighbors(a: ExactMatrix):
    """Iterate the non-scalar matrices other than `a` in its centralizer."""
    if not a.spec.is_finite:
        raise FieldMismatch("the commuting graph is only enumerable over finite fields")
    if is_scalar(a):
        raise ScalarVertex("scalar matrices are not graph vertices")
    spec, n = a.spec, a.nrows
    for code in _neighbor_codes(spec, n, encode_matrix(a)):
        yield decode_matrix(spec, n, code)


# ---------------------------------------------------------------------------
# cached graph


class _CommGraph:
    """Adjacency of one commuting graph, fully materialized."""

    def __init__(self, spec: FieldSpec, n: int):
        self.spec = spec
        self.n = n
        q = spec.order
        self.total = q ** (n * n)
        self.scalars = _scalar_codes(spec, n)
        adj: list[list[int] | None] = [None] * self.total
        for code in range(self.total):
            if code in self.scalars:
                continue
            adj[code] = _neighbor_codes(spec, n, code)
        self.adj = adj

    @property
    def vertex_count(self) -> int:
        return self.total - len(self.scalars)


@functools.lru_cache(maxsize=4)
def _graph_cache(spec: FieldSpec, n: int) -> _CommGraph:
    return _CommGraph(spec, n)


def _space_size(spec: FieldSpec, n: int) -> int:
    q = spec.order
    if q is None:
        raise FieldMismatch("finite field required")
    return q ** (n * n)


def _check_vertex_pair(a: ExactMatrix, b: ExactMatrix):
    if a.spec != b.spec:
        raise FieldMismatch(f"{a.spec} vs {b.spec}")
    if a.nrows != b.nrows or not (a.is_square and b.is_square):
        raise DimMismatch("BFS needs square matrices of one size")
    if not a.spec.is_finite:
        raise FieldMismatch("BFS requires a finite field")
    if is_scalar(a) or is_scalar(b):
        raise ScalarVertex("scalar matrices are not graph vertices")


def _expander(spec: FieldSpec, n: int):
    total = _space_size(spec, n)
    if total <= _PREBUILD_CAP:
        graph = _graph_cache(spec, n)
        return graph.adj.__getitem__
    return lambda code: _neighbor_codes(spec, n, code)


def _bfs(spec, n, source: int, target: int | None, radius_cap, want_parents: bool):
    """Breadth-first search from one code.

    Returns (distances bytearray with 255 = unreached, frontier_sizes,
    parents dict or None, hit, capped): hit is the level at which the target
    was found (None otherwise) and capped is True when the radius cap stopped
    the sweep while the frontier was still growing.
    """
    total = _space_size(spec, n)
    if total > SPACE_CAP:
        raise CapExceeded(f"state space {total} exceeds 2^24")
    expand = _expander(spec, n)
    dist = bytearray([255]) * total
    dist[source] = 0
    parents = {source: None} if want_parents else None
    frontier = [source]
    frontier_sizes = [1]
    level = 0
    if target == source:
        return dist, frontier_sizes, parents, 0, False
    while frontier:
        if radius_cap is not None and level >= radius_cap:
            return dist, frontier_sizes, parents, None, True
        level += 1
        nxt = []
        for code in frontier:
            for nb in expand(code):
                if dist[nb] == 255:
                    dist[nb] = min(level, 255)
                    if want_parents:
                        parents[nb] = code
                    if nb == target:
                        frontier_sizes.append(len(nxt) + 1)
                        return dist, frontier_sizes, parents, level, False
                    nxt.append(nb)
        frontier = nxt
        if nxt:
            frontier_sizes.append(len(nxt))
    return dist, frontier_sizes, parents, None, False


def bfs_distance(a: ExactMatrix, b: ExactMatrix, cap: int | None = None):
    """Exact graph distance between two non-scalar matrices.

    Returns an int when a path of length <= cap exists, INFINITE (math.inf)
    when the component of `a` is exhausted without reaching `b`, and None when
    the search stopped at the radius cap undecided.
    """
    _check_vertex_pair(a, b)
    src, dst = encode_matrix(a), encode_matrix(b)
    _, _, _, hit, capped = _bfs(a.spec, a.nrows, src, dst, cap, False)
    if hit is not None:
        return hit
    return None if capped else INFINITE


def bfs_path(a: ExactMatrix, b: ExactMatrix):
    """(distance, interior chain) with parent tracking; chain is None when
    unreachable and empty for adjacent or identical vertices."""
    _check_vertex_pair(a, b)
    spec, n = a.spec, a.nrows
    src, dst = encode_matrix(a), encode_matrix(b)
    _, _, parents, hit, _ = _bfs(spec, n, src, dst, None, True)
    if hit is None:
        return INFINITE, None
    chain_codes = []
    cur = parents[dst] if hit > 0 else None
    while cur is not None and cur != src:
        chain_codes.append(cur)
        cur = parents[cur]
    chain_codes.reverse()
    return hit, [decode_matrix(spec, n, c) for c in chain_codes]


@dataclass
class BfsReport:
    """Full BFS sweep from one source, the regression-friendly form."""

    spec: FieldSpec
    n: int
    source: int
    cap: int | None
    complete: bool  # False when the radius cap cut the sweep short
    frontier_sizes: list[int]
    distances: dict[int, int]

    def distance_of(self, target) -> int | float | None:
        code = target if isinstance(target, int) else encode_matrix(target)
        if code in self.distances:
            return self.distances[code]
        return INFINITE if self.complete else None

    def to_json(self) -> dict:
        return {
            "field": self.spec.to_string(),
            "n": self.n,
            "source": self.source,
            "cap": self.cap,
            "complete": self.complete,
            "frontier_sizes": self.frontier_sizes,
            "distances": {str(k): v for k, v in sorted(self.distances.items())},
        }


def bfs_report(a: ExactMatrix, cap: int | None = None) -> BfsReport:
    """Distances from `a` to every vertex it reaches within the radius cap."""
    if not a.spec.is_finite:
        raise FieldMismatch("BFS requires a finite field")
    if is_scalar(a):
        raise ScalarVertex("scalar matrices are not graph vertices")
    spec, n = a.spec, a.nrows
    src = encode_matrix(a)
    dist, frontier_sizes, _, _, capped = _bfs(spec, n, src, None, cap, False)
    reached = {code: d for code, d in enumerate(dist) if d != 255}
    return BfsReport(spec, n, src, cap, not capped, frontier_sizes, reached)


@dataclass
class ComponentsReport:
    vertex_count: int
    count: int
    sizes: list[int]  # in discovery order (ascending smallest code)

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "count": self.count,
            "sizes": self.sizes,
        }


def components(spec: FieldSpec, n: int) -> ComponentsReport:
    """Connected components of the commuting graph by repeated BFS."""
    total = _space_size(spec, n)
    if total > SPACE_CAP:
        raise CapExceeded(f"state space {total} exceeds 2^24")
    scalars = _scalar_codes(spec, n)
    expand = _expander(spec, n)
    seen = bytearray(total)
    sizes = []
    for start in range(total):
        if seen[start] or start in scalars:
            continue
        size = 0
        frontier = [start]
        seen[start] = 1
        while frontier:
            nxt = []
            for code in frontier:
                size += 1
                for nb in expand(code):
                    if not seen[nb]:
                        seen[nb] = 1
                        nxt.append(nb)
            frontier = nxt
        sizes.append(size)
    return ComponentsReport(total - len(scalars), len(sizes), sizes)


def diameter(spec: FieldSpec, n: int) -> int:
    """Largest finite eccentricity over all vertices (all-pairs BFS)."""
    total = _space_size(spec, n)
    if total > DIAMETER_CAP:
        raise CapExceeded(f"state space {total} exceeds 2^20 for diameter")
    scalars = _scalar_codes(spec, n)
    expand = _expander(spec, n)
    best = 0
    for start in range(total):
        if start in scalars:
            continue
        dist = bytearray([255]) * total
        dist[start] = 0
        frontier = [start]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for code in frontier:
                for nb in expand(code):
                    if dist[nb] == 255:
                        dist[nb] = min(level, 255)
                        nxt.append(nb)
            frontier = nxt
        best = max(best, level - 1 if level else 0)
    return best


# ---------------------------------------------------------------------------
# restricted mode: decide distance <= 3 for one pair without global BFS


def restricted_distance_le_3(
    a: ExactMatrix, b: ExactMatrix, class_cap: int = 1 << 20
):
    """Search for a chain a <-> C <-> D <-> B with non-scalar C, D.

    Enumerates the centralizer of `a` up to scaling and shifts by the
    identity, which suffices: commuting with D is unchanged under
    C -> u*C + v*I, so one representative per projective class of the quotient
    centralizer(a)/<I> covers every candidate.  Complete for the <=3 question;
    returns the chain (C, D) or None.
    """
    _check_vertex_pair(a, b)
    spec, n = a.spec, a.nrows
    ops = spec.ops()
    basis = nullspace_raw(spec, lift_rows_raw(a))
    ident = [x for row in ExactMatrix.identity(spec, n).rows for x in row]
    # extend {vec(I)} to a basis of the centralizer; the extras span the quotient
    rows = [ident]
    quotient: list[list] = []
    cur_rank = 1
    for v in basis:
        cand = rows + [v]
        r = rank_raw(spec, cand)
        if r > cur_rank:
            rows = cand
            cur_rank = r
            quotient.append(v)
    d = len(quotient)
    if d == 0:
        return None  # centralizer is the scalar line only (cannot happen for nonscalar a)
    q = spec.order
    classes = (q**d - 1) // (q - 1)
    if classes > class_cap:
        raise CapExceeded(f"{classes} centralizer classes exceed the cap {class_cap}")
    b_rows = lift_rows_raw(b)
    for _, coeffs in _projective_reps(spec, d):
        acc = [ops.zero] * (n * n)
        for coef, vec_ in zip(coeffs, quotient):
            if coef != ops.zero:
                acc = [ops.add(x, ops.mul(coef, y)) for x, y in zip(acc, vec_)]
        c_mat = unvec(spec, n, acc)
        c_rows = lift_rows_raw(c_mat)
        for null_vec in nullspace_raw(spec, c_rows + b_rows):
            cand = unvec(spec, n, null_vec)
            if not is_scalar(cand):
                return c_mat, cand
    return None
