"""Exact field arithmetic: prime fields GF(p), small extensions GF(p^k), and rationals.

Field elements are stored in canonical raw form: `fractions.Fraction` for the
rationals, and integer codes for finite fields.  A finite-field code encodes
the coefficient vector of the residue low-to-high in base p, so for GF(p) the
code is the residue itself and for GF(p^k) the element c_0 + c_1 x + ... has
code sum(c_i * p**i).  Codes double as the enumeration order used everywhere
else in the library.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DivisionByZero,
    FieldMismatch,
    NotPrime,
    ParseError,
    ReducibleModulus,
    UnsupportedDegree,
)

_MAX_PRIME = 2**31
_MAX_EXT_CHAR = 31  # exhaustive irreducibility checks stay feasible
_MAX_EXT_DEGREE = 4
_TABLE_MAX = 512  # build full q x q lookup tables below this order

_SPEC_RE = re.compile(r"^gf\((\d+)(?:\^(\d+))?\)(?::(-?\d+(?:\s*,\s*-?\d+)*))?$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _factor(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n fits well under 2**62)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), coefficients low-to-high as tuples


def _poly_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mod(num: tuple[int, ...], den: tuple[int, ...], p: int) -> tuple[int, ...]:
    """Remainder of num modulo den over GF(p); den must be nonzero."""
    num_l = list(num)
    dd = len(den) - 1
    inv_lead = pow(den[-1], p - 2, p)
    while len(num_l) - 1 >= dd and num_l:
        if num_l[-1] == 0:
            num_l.pop()
            continue
        shift = len(num_l) - 1 - dd
        factor = num_l[-1] * inv_lead % p
        for i, c in enumerate(den):
            num_l[shift + i] = (num_l[shift + i] - factor * c) % p
        while num_l and num_l[-1] == 0:
            num_l.pop()
    return tuple(num_l)


def _is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustively test that no monic divisor of degree <= k/2 exists."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        # all monic polynomials of degree d: p**d candidates
        for code in range(p**d):
            cand = []
            c = code
            for _ in range(d):
                cand.append(c % p)
                c //= p
            cand.append(1)
            if not _poly_mod(modulus, tuple(cand), p):
                return False
    return True


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """An exact field: the rationals, GF(p), or GF(p^k) as a polynomial quotient.

    Instances are immutable values; use the classmethod constructors or
    :func:`field_from_spec`, which validate primality and irreducibility.
    """

    kind: str  # "rationals" | "prime" | "extension"
    p: int = 0
    k: int = 1
    modulus: tuple[int, ...] = ()

    # -- constructors -------------------------------------------------------

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("rationals")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        if p >= _MAX_PRIME:
            raise ParseError(f"prime {p} exceeds the 2^31 cap")
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        return cls("prime", p=p)

    @classmethod
    def extension(cls, p: int, k: int, modulus: tuple[int, ...]) -> "FieldSpec":
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k > _MAX_EXT_DEGREE:
            raise UnsupportedDegree(f"extension degree {k} > {_MAX_EXT_DEGREE}")
        if k < 2:
            raise ParseError("extension degree must be at least 2; use gf(p) for prime fields")
        if p > _MAX_EXT_CHAR:
            raise ParseError(
                f"extension characteristic {p} > {_MAX_EXT_CHAR}: "
                "irreducibility is only checked exhaustively"
            )
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != k + 1:
            raise ParseError(f"modulus needs {k + 1} coefficients, got {len(modulus)}")
        if modulus[-1] != 1:
            raise ParseError("modulus must be monic (leading coefficient 1)")
        if not _is_irreducible(modulus, p):
            raise ReducibleModulus(f"modulus {list(modulus)} is reducible over GF({p})")
        return cls("extension", p=p, k=k, modulus=modulus)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        s = text.strip().lower().replace(" ", "")
        if s == "qq":
            return cls.rationals()
        m = _SPEC_RE.match(s)
        if m is None:
            raise ParseError(f"bad field spec {text!r}")
        base = int(m.group(1))
        caret = m.group(2)
        coeffs = m.group(3)
        if caret is not None:
            p, k = base, int(caret)
            if k == 1:
                raise ParseError(f"write gf({p}) for a prime field, not gf({p}^1)")
        else:
            fac = _factor(base) if base > 1 else {}
            if len(fac) != 1:
                raise NotPrime(f"{base} is not a prime power")
            p, k = next(iter(fac.items()))
        if k == 1:
            if coeffs is not None:
                raise ParseError("prime fields take no modulus")
            return cls.prime(p)
        if coeffs is None:
            if k == 2 and p % 4 == 3:
                modulus: tuple[int, ...] = (1, 0, 1)  # x^2 + 1, irreducible since -1 is a non-square
            else:
                raise ParseError(f"gf({base}) needs an explicit modulus")
        else:
            modulus = tuple(int(c) for c in coeffs.split(","))
        return cls.extension(p, k, modulus)

    # -- basics --------------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.kind != "rationals"

    @property
    def order(self) -> int | None:
        """Number of elements, or None for the rationals."""
        if self.kind == "prime":
            return self.p
        if self.kind == "extension":
            return self.p**self.k
        return None

    def to_string(self) -> str:
        if self.kind == "rationals":
            return "qq"
        if self.kind == "prime":
            return f"gf({self.p})"
        return f"gf({self.p}^{self.k}):" + ",".join(str(c) for c in self.modulus)

    def __str__(self) -> str:
        return self.to_string()

    def ops(self) -> "_Ops":
        return _ops_for(self)

    # -- element construction -------------------------------------------------

    def zero(self) -> "FieldElem":
        return FieldElem(self, self.ops().zero)

    def one(self) -> "FieldElem":
        return FieldElem(self, self.ops().one)

    def elem(self, value) -> "FieldElem":
        """Build an element from an int, Fraction, "a/b" string, coefficient list, or code."""
        return FieldElem(self, self.raw_from(value))

    def raw_from(self, value):
        if isinstance(value, FieldElem):
            if value.spec != self:
                raise FieldMismatch(f"element of {value.spec} used in {self}")
            return value.raw
        if self.kind == "rationals":
            if isinstance(value, (int, Fraction)):
                return Fraction(value)
            if isinstance(value, str):
                try:
                    return Fraction(value)
                except (ValueError, ZeroDivisionError) as exc:
                    raise ParseError(f"bad rational {value!r}") from exc
            raise ParseError(f"cannot interpret {value!r} as a rational")
        if isinstance(value, bool):
            raise ParseError("booleans are not field elements")
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p  # embedded as a constant
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise DivisionByZero(f"denominator {value.denominator} vanishes in GF({self.p})")
            num = value.numerator % self.p
            den_inv = pow(value.denominator % self.p, self.p - 2, self.p)
            return num * den_inv % self.p
        if isinstance(value, str):
            num, _, den = value.partition("/")
            try:
                a = int(num)
                b = int(den) if den else 1
            except ValueError as exc:
                raise ParseError(f"bad field entry {value!r}") from exc
            if b % self.p == 0:
                raise DivisionByZero(f"denominator {b} vanishes in GF({self.p})")
            return a % self.p * pow(b % self.p, self.p - 2, self.p) % self.p
        if isinstance(value, (list, tuple)):
            if self.kind != "extension":
                raise ParseError("coefficient vectors only make sense for extension fields")
            if len(value) > self.k:
                raise ParseError(f"coefficient vector longer than degree {self.k}")
            code = 0
            for c in reversed(value):
                code = code * self.p + int(c) % self.p
            return code
        raise ParseError(f"cannot interpret {value!r} as an element of {self}")

    def elem_from_code(self, code: int) -> "FieldElem":
        """Element with the given enumeration code (finite fields only)."""
        q = self.order
        if q is None:
            raise FieldMismatch("the rationals have no element codes")
        if not 0 <= code < q:
            raise ParseError(f"code {code} out of range for {self}")
        return FieldElem(self, code)

    def entry_to_json(self, raw):
        if self.kind == "rationals":
            return int(raw) if raw.denominator == 1 else f"{raw.numerator}/{raw.denominator}"
        if self.kind == "prime":
            return int(raw)
        digits = []
        c = raw
        for _ in range(self.k):
            digits.append(c % self.p)
            c //= self.p
        return digits


def field_from_spec(text: str) -> FieldSpec:
    """Parse a field-spec string: "qq", "gf(p)", or "gf(p^k)[:c0,...,ck]"."""
    return FieldSpec.parse(text)


# ---------------------------------------------------------------------------
# raw arithmetic kits


class _Ops:
    """Scalar arithmetic on raw values for one field spec."""

    __slots__ = ("spec", "zero", "one", "add", "sub", "mul", "neg", "inv", "q")

    def __init__(self, spec, zero, one, add, sub, mul, neg, inv, q=None):
        self.spec = spec
        self.zero = zero
        self.one = one
        self.add = add
        self.sub = sub
        self.mul = mul
        self.neg = neg
        self.inv = inv
        self.q = q

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        acc = self.one
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc


def _rational_ops(spec: FieldSpec) -> _Ops:
    def inv(a: Fraction) -> Fraction:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a

    return _Ops(
        spec,
        Fraction(0),
        Fraction(1),
        lambda a, b: a + b,
        lambda a, b: a - b,
        lambda a, b: a * b,
        lambda a: -a,
        inv,
        q=None,
    )


def _prime_ops(spec: FieldSpec) -> _Ops:
    p = spec.p

    def inv(a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, p - 2, p)

    return _Ops(
        spec,
        0,
        1,
        lambda a, b: (a + b) % p,
        lambda a, b: (a - b) % p,
        lambda a, b: a * b % p,
        lambda a: -a % p,
        inv,
        q=p,
    )


class _ExtTables:
    """Lookup tables for one extension field GF(p^k)."""

    def __init__(self, spec: FieldSpec):
        p, k, modulus = spec.p, spec.k, spec.modulus
        q = p**k
        self.p, self.k, self.q = p, k, q

        # reduction of x^k .. x^(2k-2) modulo the defining polynomial
        reductions = []
        cur = tuple((-c) % p for c in modulus[:k])  # x^k as a degree<k vector
        reductions.append(cur)
        for _ in range(k - 2):
            shifted = (0,) + cur
            if len(shifted) > k:
                overflow = shifted[k]
                shifted = tuple(
                    (shifted[i] + overflow * reductions[0][i]) % p for i in range(k)
                )
            cur = shifted
            reductions.append(cur)
        self._reductions = reductions

        self.exp, self.log = self._build_log_tables()

        self.add_table = self.mul_table = self.inv_table = None
        if q <= _TABLE_MAX:
            self.add_table = [
                [self._add_slow(a, b) for b in range(q)] for a in range(q)
            ]
            self.mul_table = [
                [self.mul_via_log(a, b) for b in range(q)] for a in range(q)
            ]
            self.inv_table = [0] * q
            for a in range(1, q):
                self.inv_table[a] = self.exp[(q - 1 - self.log[a]) % (q - 1)]
            self.np_add = np.array(self.add_table, dtype=np.int64)
            self.np_mul = np.array(self.mul_table, dtype=np.int64)

    def digits(self, code: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return out

    def _add_slow(self, a: int, b: int) -> int:
        p = self.p
        da, db = self.digits(a), self.digits(b)
        code = 0
        for i in range(self.k - 1, -1, -1):
            code = code * p + (da[i] + db[i]) % p
        return code

    def mul_poly(self, a: int, b: int) -> int:
        """School multiplication of codes followed by reduction."""
        p, k = self.p, self.k
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * k - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        acc = prod[:k]
        for d in range(k, 2 * k - 1):
            c = prod[d]
            if c:
                red = self._reductions[d - k]
                for i in range(k):
                    acc[i] = (acc[i] + c * red[i]) % p
        code = 0
        for i in range(k - 1, -1, -1):
            code = code * p + acc[i]
        return code

    def _build_log_tables(self):
        q = self.q
        factors = list(_factor(q - 1))
        gen = None
        for cand in range(2, q):
            if all(self._pow_poly(cand, (q - 1) // f) != 1 for f in factors):
                gen = cand
                break
        assert gen is not None, "multiplicative group of a finite field is cyclic"
        exp = [1] * (q - 1)
        log = [0] * q
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = self.mul_poly(cur, gen)
        return exp, log

    def _pow_poly(self, a: int, e: int) -> int:
        acc, base = 1, a
        while e:
            if e & 1:
                acc = self.mul_poly(acc, base)
            base = self.mul_poly(base, base)
            e >>= 1
        return acc

    def mul_via_log(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]


def _extension_ops(spec: FieldSpec) -> _Ops:
    t = _ext_tables(spec)
    q = t.q
    if t.add_table is not None:
        add_t, mul_t, inv_t = t.add_table, t.mul_table, t.inv_table
        neg_t = [_neg_code(t, a) for a in range(q)]

        def add(a, b):
            return add_t[a][b]

        def sub(a, b):
            return add_t[a][neg_t[b]]

        def mul(a, b):
            return mul_t[a][b]

        def neg(a):
            return neg_t[a]

        def inv(a):
            if a == 0:
                raise DivisionByZero("inverse of zero")
            return inv_t[a]

    else:

        def add(a, b):
            return t._add_slow(a, b)

        def sub(a, b):
            return t._add_slow(a, _neg_code(t, b))

        def mul(a, b):
            return t.mul_via_log(a, b)

        def neg(a):
            return _neg_code(t, a)

        def inv(a):
            if a == 0:
                raise DivisionByZero("inverse of zero")
            return t.exp[(q - 1 - t.log[a]) % (q - 1)]

    return _Ops(spec, 0, 1, add, sub, mul, neg, inv, q=q)


def _neg_code(t: _ExtTables, a: int) -> int:
    p = t.p
    code = 0
    da = t.digits(a)
    for i in range(t.k - 1, -1, -1):
        code = code * p + (-da[i]) % p
    return code


@functools.lru_cache(maxsize=None)
def _ext_tables(spec: FieldSpec) -> _ExtTables:
    return _ExtTables(spec)


@functools.lru_cache(maxsize=None)
def _ops_for(spec: FieldSpec) -> _Ops:
    if spec.kind == "rationals":
        return _rational_ops(spec)
    if spec.kind == "prime":
        return _prime_ops(spec)
    return _extension_ops(spec)


# ---------------------------------------------------------------------------


class FieldElem:
    """One field element: an immutable (spec, raw value) pair with operators."""

    __slots__ = ("spec", "raw")

    def __init__(self, spec: FieldSpec, raw):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "raw", raw)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    def _peer(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise FieldMismatch(f"{self.spec} vs {other.spec}")
            return other
        return self.spec.elem(other)

    def __add__(self, other):
        o = self._peer(other)
        return FieldElem(self.spec, self.spec.ops().add(self.raw, o.raw))

    def __sub__(self, other):
        o = self._peer(other)
        return FieldElem(self.spec, self.spec.ops().sub(self.raw, o.raw))

    def __mul__(self, other):
        o = self._peer(other)
        return FieldElem(self.spec, self.spec.ops().mul(self.raw, o.raw))

    def __truediv__(self, other):
        o = self._peer(other)
        return FieldElem(self.spec, self.spec.ops().div(self.raw, o.raw))

    def __neg__(self):
        return FieldElem(self.spec, self.spec.ops().neg(self.raw))

    def inv(self) -> "FieldElem":
        return FieldElem(self.spec, self.spec.ops().inv(self.raw))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.spec == other.spec and self.raw == other.raw
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.raw))

    @property
    def is_zero(self) -> bool:
        return self.raw == self.spec.ops().zero

    @property
    def is_one(self) -> bool:
        return self.raw == self.spec.ops().one

    def to_json(self):
        return self.spec.entry_to_json(self.raw)

    def __repr__(self):
        return f"FieldElem({self.spec}, {self.to_json()!r})"


def arith(a: FieldElem, b: FieldElem | None, op: str):
    """Dispatch one arithmetic operation by name.

    `op` is one of add, sub, mul, div, neg, inv, eq.  The unary ops ignore `b`;
    eq returns a boolean, everything else a FieldElem.
    """
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    if b is None:
        raise ParseError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "eq":
        if isinstance(b, FieldElem) and b.spec != a.spec:
            raise FieldMismatch(f"{a.spec} vs {b.spec}")
        return a == b
    raise ParseError(f"unknown operation {op!r}")
