"""Dense exact matrices over a FieldSpec.

Entries are stored in raw form (integer codes for finite fields, Fraction for
the rationals).  Rank and nullspace go through reduced row echelon form, which
is unique, so nullspace bases are reproducible across runs and backends.  Four
elimination backends share that contract: XOR bit packing for GF(2), numpy
modular elimination for odd prime fields, table-driven elimination for
extension fields, and fraction-free (Bareiss) forward elimination with a final
normalization pass over the rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import DimMismatch, FieldMismatch, ParseError
from .field import FieldElem, FieldSpec

_MAX_DIM = 128  # lift stacks for n = 8 are 128 x 64; anything larger is a mistake


class ExactMatrix:
    """Immutable dense matrix over one exact field."""

    __slots__ = ("spec", "nrows", "ncols", "rows")

    def __init__(self, spec: FieldSpec, rows):
        converted = tuple(
            tuple(spec.raw_from(x) if not _is_raw(spec, x) else x for x in row)
            for row in rows
        )
        if not converted or not converted[0]:
            raise DimMismatch("matrices need at least one row and one column")
        ncols = len(converted[0])
        if any(len(r) != ncols for r in converted):
            raise DimMismatch("ragged rows")
        if len(converted) > _MAX_DIM or ncols > _MAX_DIM:
            raise DimMismatch(f"dimension exceeds the {_MAX_DIM} cap")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "nrows", len(converted))
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", converted)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def _from_raw(cls, spec: FieldSpec, rows) -> "ExactMatrix":
        """Trusted constructor for rows that already hold raw values."""
        obj = object.__new__(cls)
        converted = tuple(tuple(row) for row in rows)
        if len(converted) > _MAX_DIM or len(converted[0]) > _MAX_DIM:
            raise DimMismatch(f"dimension exceeds the {_MAX_DIM} cap")
        object.__setattr__(obj, "spec", spec)
        object.__setattr__(obj, "nrows", len(converted))
        object.__setattr__(obj, "ncols", len(converted[0]))
        object.__setattr__(obj, "rows", converted)
        return obj

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "ExactMatrix":
        ops = spec.ops()
        return cls._from_raw(
            spec,
            [[ops.one if i == j else ops.zero for j in range(n)] for i in range(n)],
        )

    @classmethod
    def zeros(cls, spec: FieldSpec, nrows: int, ncols: int) -> "ExactMatrix":
        z = spec.ops().zero
        return cls._from_raw(spec, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def diag(cls, spec: FieldSpec, entries) -> "ExactMatrix":
        ops = spec.ops()
        raws = [spec.raw_from(x) for x in entries]
        n = len(raws)
        return cls(
            spec,
            [[raws[i] if i == j else ops.zero for j in range(n)] for i in range(n)],
        )

    @classmethod
    def from_json(cls, obj) -> "ExactMatrix":
        """Build from ``{"field": spec-string, "rows": [[entry, ...], ...]}``."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or "field" not in obj or "rows" not in obj:
            raise ParseError("matrix JSON needs 'field' and 'rows' keys")
        spec = FieldSpec.parse(obj["field"])
        return cls(spec, obj["rows"])

    def to_json(self) -> dict:
        return {
            "field": self.spec.to_string(),
            "rows": [[self.spec.entry_to_json(x) for x in row] for row in self.rows],
        }

    def to_field(self, target: FieldSpec) -> "ExactMatrix":
        """Reinterpret entries in another field (e.g. reduce rationals mod p)."""
        if target == self.spec:
            return self
        return ExactMatrix(
            target, [[target.raw_from(_as_portable(self.spec, x)) for x in row] for row in self.rows]
        )

    # -- accessors ------------------------------------------------------------

    def __getitem__(self, ij) -> FieldElem:
        i, j = ij
        return FieldElem(self.spec, self.rows[i][j])

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def raw_rows(self) -> list[list]:
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        if isinstance(other, ExactMatrix):
            return (
                self.spec == other.spec
                and self.nrows == other.nrows
                and self.rows == other.rows
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.rows))

    def __repr__(self):
        return f"ExactMatrix({self.spec}, {self.nrows}x{self.ncols})"

    def pretty(self) -> str:
        cells = [[str(self.spec.entry_to_json(x)) for x in row] for row in self.rows]
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)

    # -- arithmetic -----------------------------------------------------------

    def _check_peer(self, other: "ExactMatrix"):
        if not isinstance(other, ExactMatrix):
            raise TypeError("expected an ExactMatrix")
        if other.spec != self.spec:
            raise FieldMismatch(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_peer(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimMismatch("shape mismatch in add")
        add = self.spec.ops().add
        return ExactMatrix._from_raw(
            self.spec,
            [
                [add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_peer(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimMismatch("shape mismatch in sub")
        sub = self.spec.ops().sub
        return ExactMatrix._from_raw(
            self.spec,
            [
                [sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __neg__(self) -> "ExactMatrix":
        neg = self.spec.ops().neg
        return ExactMatrix._from_raw(self.spec, [[neg(a) for a in row] for row in self.rows])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_peer(other)
        if self.ncols != other.nrows:
            raise DimMismatch(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
            )
        ops = self.spec.ops()
        add, mul, zero = ops.add, ops.mul, ops.zero
        bt = list(zip(*other.rows))  # columns of other
        out = []
        for ra in self.rows:
            out_row = []
            for cb in bt:
                acc = zero
                for a, b in zip(ra, cb):
                    acc = add(acc, mul(a, b))
                out_row.append(acc)
            out.append(out_row)
        return ExactMatrix._from_raw(self.spec, out)

    def scale(self, scalar) -> "ExactMatrix":
        raw = self.spec.raw_from(scalar)
        mul = self.spec.ops().mul
        return ExactMatrix._from_raw(self.spec, [[mul(raw, a) for a in row] for row in self.rows])

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._from_raw(self.spec, list(zip(*self.rows)))

    def trace(self) -> FieldElem:
        if not self.is_square:
            raise DimMismatch("trace needs a square matrix")
        ops = self.spec.ops()
        acc = ops.zero
        for i in range(self.nrows):
            acc = ops.add(acc, self.rows[i][i])
        return FieldElem(self.spec, acc)


def _is_raw(spec: FieldSpec, x) -> bool:
    if spec.kind == "rationals":
        return isinstance(x, Fraction)
    if spec.kind == "extension":
        return False  # plain ints always embed as integer constants
    return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < spec.p


def _as_portable(spec: FieldSpec, raw):
    """Raw value in a form `raw_from` of another field accepts."""
    if spec.kind == "rationals":
        return raw
    if spec.kind == "prime":
        return raw
    # extension code -> coefficient list
    return spec.entry_to_json(raw)


def mat_op(a: ExactMatrix, b: ExactMatrix, op: str) -> ExactMatrix:
    """Dispatch add/sub/mul by name (mul is the matrix product)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a @ b
    raise ParseError(f"unknown matrix operation {op!r}")


def commutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """AB - BA; both operands must be square of the same size and field."""
    if not (a.is_square and b.is_square and a.nrows == b.nrows):
        raise DimMismatch("commutator needs square matrices of equal size")
    return a @ b - b @ a


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product with block structure (a_ij * B)."""
    a._check_peer(b)
    mul = a.spec.ops().mul
    out = []
    for i in range(a.nrows):
        for s in range(b.nrows):
            row = []
            for j in range(a.ncols):
                aij = a.rows[i][j]
                row.extend(mul(aij, x) for x in b.rows[s])
            out.append(row)
    return ExactMatrix._from_raw(a.spec, out)


def mat_vec(m: ExactMatrix, v) -> list:
    """Apply m to a vector of raw values (FieldElems are unwrapped); returns raws."""
    spec = m.spec
    raws = [x.raw if isinstance(x, FieldElem) else x for x in v]
    if len(raws) != m.ncols:
        raise DimMismatch("vector length mismatch")
    ops = spec.ops()
    out = []
    for row in m.rows:
        acc = ops.zero
        for a, x in zip(row, raws):
            acc = ops.add(acc, ops.mul(a, x))
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# vec flattening


@dataclass(frozen=True)
class VecFlattening:
    """Row-major flattening of an n x n matrix: (m_11, m_12, ..., m_nn)."""

    n: int
    entries: tuple

    @classmethod
    def from_matrix(cls, m: ExactMatrix) -> "VecFlattening":
        if not m.is_square:
            raise DimMismatch("vec flattening needs a square matrix")
        return cls(m.nrows, tuple(x for row in m.rows for x in row))

    def to_matrix(self, spec: FieldSpec) -> ExactMatrix:
        n = self.n
        return ExactMatrix._from_raw(
            spec, [self.entries[i * n : (i + 1) * n] for i in range(n)]
        )


def vec(m: ExactMatrix) -> VecFlattening:
    return VecFlattening.from_matrix(m)


def unvec(spec: FieldSpec, n: int, entries) -> ExactMatrix:
    raws = list(entries)
    if len(raws) != n * n:
        raise DimMismatch(f"expected {n * n} entries, got {len(raws)}")
    return VecFlattening(n, tuple(raws)).to_matrix(spec)


# ---------------------------------------------------------------------------
# elimination backends (shared by rank / nullspace / solving)


def rref_raw(spec: FieldSpec, rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of raw rows.

    Returns (pivot_rows, pivot_cols): only the nonzero rows of the RREF, with
    each pivot normalized to one.  Pivot columns are scanned left to right, so
    the output is the unique RREF and independent of the backend.
    """
    if spec.kind == "prime" and spec.p == 2:
        return _rref_gf2(rows)
    if spec.kind == "prime":
        return _rref_prime(spec.p, rows)
    if spec.kind == "rationals":
        return _rref_rationals(rows)
    return _rref_generic(spec, rows)


def _rref_gf2(rows):
    ncols = len(rows[0])
    packed = []
    for row in rows:
        v = 0
        for j, x in enumerate(row):
            if x:
                v |= 1 << j
        packed.append(v)
    m = len(packed)
    pivots = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        pr = -1
        for i in range(r, m):
            if packed[i] & bit:
                pr = i
                break
        if pr < 0:
            continue
        packed[r], packed[pr] = packed[pr], packed[r]
        pv = packed[r]
        for i in range(m):
            if i != r and packed[i] & bit:
                packed[i] ^= pv
        pivots.append(c)
        r += 1
        if r == m:
            break
    out = [[(packed[i] >> j) & 1 for j in range(ncols)] for i in range(r)]
    return out, pivots


def _rref_prime(p, rows):
    mat = np.array(rows, dtype=np.int64) % p
    m, n = mat.shape
    pivots = []
    r = 0
    for c in range(n):
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            mat[[r, pr]] = mat[[pr, r]]
        inv = pow(int(mat[r, c]), p - 2, p)
        mat[r] = mat[r] * inv % p
        col = mat[:, c].copy()
        col[r] = 0
        hot = np.nonzero(col)[0]
        if hot.size:
            mat[hot] = (mat[hot] - np.outer(col[hot], mat[r])) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return [[int(x) for x in mat[i]] for i in range(r)], pivots


def _rref_generic(spec: FieldSpec, rows):
    ops = spec.ops()
    work = [list(r) for r in rows]
    m = len(work)
    n = len(work[0])
    pivots = []
    r = 0
    zero = ops.zero
    for c in range(n):
        pr = -1
        for i in range(r, m):
            if work[i][c] != zero:
                pr = i
                break
        if pr < 0:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = ops.inv(work[r][c])
        work[r] = [ops.mul(inv, x) for x in work[r]]
        prow = work[r]
        for i in range(m):
            f = work[i][c]
            if i != r and f != zero:
                work[i] = [ops.sub(x, ops.mul(f, y)) for x, y in zip(work[i], prow)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return work[:r], pivots


def _rref_rationals(rows):
    # Clear denominators row by row, then run fraction-free (Bareiss) forward
    # elimination on integers; a final pass normalizes pivots to 1 and clears
    # entries above them with exact Fraction arithmetic.
    work = []
    for row in rows:
        fracs = [Fraction(x) for x in row]
        scale = lcm(*(f.denominator for f in fracs)) if fracs else 1
        work.append([int(f * scale) for f in fracs])
    m = len(work)
    n = len(work[0])
    pivots = []
    r = 0
    prev = 1
    for c in range(n):
        pr = -1
        for i in range(r, m):
            if work[i][c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        work[r], work[pr] = work[pr], work[r]
        piv = work[r][c]
        for i in range(r + 1, m):
            fi = work[i][c]
            row_i = work[i]
            prow = work[r]
            work[i] = [(piv * x - fi * y) // prev for x, y in zip(row_i, prow)]
        pivots.append(c)
        prev = piv
        r += 1
        if r == m:
            break
    # normalization pass: integer echelon rows -> unique RREF over Q
    echelon = [[Fraction(x) for x in work[i]] for i in range(r)]
    for i in range(r):
        pc = pivots[i]
        inv = 1 / echelon[i][pc]
        echelon[i] = [x * inv for x in echelon[i]]
    for i in range(r - 1, -1, -1):
        pc = pivots[i]
        for j in range(i):
            f = echelon[j][pc]
            if f:
                echelon[j] = [x - f * y for x, y in zip(echelon[j], echelon[i])]
    return echelon, pivots


# ---------------------------------------------------------------------------
# rank / nullspace / determinant / powers / minimal polynomial


def rank(m: ExactMatrix) -> int:
    """Exact rank by Gaussian elimination over the matrix's field."""
    return rank_raw(m.spec, m.raw_rows())


def rank_raw(spec: FieldSpec, rows: list[list]) -> int:
    return len(rref_raw(spec, rows)[1])


def nullspace_basis(m: ExactMatrix) -> list[tuple[FieldElem, ...]]:
    """Canonical echelon nullspace basis, one vector per free column."""
    return [
        tuple(FieldElem(m.spec, x) for x in v)
        for v in nullspace_raw(m.spec, m.raw_rows())
    ]


def nullspace_raw(spec: FieldSpec, rows: list[list]) -> list[list]:
    rref, pivots = rref_raw(spec, rows)
    n = len(rows[0])
    ops = spec.ops()
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [ops.zero] * n
        v[free] = ops.one
        for i, pc in enumerate(pivots):
            coeff = rref[i][free]
            if coeff != ops.zero:
                v[pc] = ops.neg(coeff)
        basis.append(v)
    return basis


def det(m: ExactMatrix) -> FieldElem:
    """Exact determinant via forward elimination."""
    if not m.is_square:
        raise DimMismatch("determinant needs a square matrix")
    spec = m.spec
    ops = spec.ops()
    work = m.raw_rows()
    n = m.nrows
    sign_flip = False
    acc = ops.one
    for c in range(n):
        pr = -1
        for i in range(c, n):
            if work[i][c] != ops.zero:
                pr = i
                break
        if pr < 0:
            return FieldElem(spec, ops.zero)
        if pr != c:
            work[c], work[pr] = work[pr], work[c]
            sign_flip = not sign_flip
        piv = work[c][c]
        acc = ops.mul(acc, piv)
        inv = ops.inv(piv)
        for i in range(c + 1, n):
            f = ops.mul(work[i][c], inv)
            if f != ops.zero:
                work[i] = [ops.sub(x, ops.mul(f, y)) for x, y in zip(work[i], work[c])]
    if sign_flip:
        acc = ops.neg(acc)
    return FieldElem(spec, acc)


def mat_pow(m: ExactMatrix, e: int) -> ExactMatrix:
    """m**e for 0 <= e <= 64 by repeated squaring."""
    if not m.is_square:
        raise DimMismatch("powers need a square matrix")
    if not 0 <= e <= 64:
        raise DimMismatch("exponent must be between 0 and 64")
    result = ExactMatrix.identity(m.spec, m.nrows)
    base = m
    while e:
        if e & 1:
            result = result @ base
        e >>= 1
        if e:
            base = base @ base
    return result


def min_poly(m: ExactMatrix) -> list[FieldElem]:
    """Monic minimal polynomial, coefficients low-to-high.

    Found as the first linear dependence in the flattened power sequence
    vec(I), vec(A), vec(A^2), ...
    """
    if not m.is_square:
        raise DimMismatch("minimal polynomial needs a square matrix")
    spec = m.spec
    ops = spec.ops()
    n = m.nrows
    power = ExactMatrix.identity(spec, n)
    flats = [[x for row in power.rows for x in row]]
    for deg in range(1, n + 1):
        power = power @ m
        flats.append([x for row in power.rows for x in row])
        # dependence among the rows == nullspace of the transposed stack
        cols = list(zip(*flats))
        kernel = nullspace_raw(spec, [list(c) for c in cols])
        if kernel:
            coeffs = kernel[0]
            lead_inv = ops.inv(coeffs[deg])
            monic = [ops.mul(lead_inv, c) for c in coeffs]
            return [FieldElem(spec, c) for c in monic]
    raise AssertionError("powers of an n x n matrix must be dependent by degree n")


def random_matrix(spec: FieldSpec, nrows: int, ncols: int, rng) -> ExactMatrix:
    """Uniform random matrix over a finite field; small-height entries over Q."""
    if spec.is_finite:
        q = spec.order
        return ExactMatrix._from_raw(
            spec, [[rng.randrange(q) for _ in range(ncols)] for _ in range(nrows)]
        )
    return ExactMatrix(
        spec,
        [
            [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(ncols)]
            for _ in range(nrows)
        ],
    )
