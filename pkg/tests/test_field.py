"""Field-spec parsing, exact arithmetic, and the field axioms."""

import random
from fractions import Fraction

import pytest

from commdist.errors import (
    DivisionByZero,
    FieldMismatch,
    NotPrime,
    ParseError,
    ReducibleModulus,
    UnsupportedDegree,
)
from commdist.field import FieldSpec, arith, field_from_spec

QQ = FieldSpec.rationals()
GF2 = FieldSpec.prime(2)
GF3 = FieldSpec.prime(3)
GF4 = FieldSpec.parse("gf(2^2):1,1,1")
GF9 = FieldSpec.parse("gf(9)")
GF27 = FieldSpec.parse("gf(3^3):1,2,0,1")


def test_grammar_terminals():
    assert field_from_spec("qq").kind == "rationals"
    assert field_from_spec("QQ") == QQ
    g3 = field_from_spec("gf(3)")
    assert g3.kind == "prime" and g3.p == 3 and g3.order == 3


def test_gf9_sugar_expands_to_x_squared_plus_one():
    # oracle: x^2 + 1 has no root in GF(3), so the default modulus is irreducible
    assert all((x * x + 1) % 3 != 0 for x in range(3))
    assert GF9.kind == "extension" and (GF9.p, GF9.k) == (3, 2)
    assert GF9.modulus == (1, 0, 1)
    assert GF9 == field_from_spec("gf(3^2):1,0,1")
    assert GF9.order == 9
    assert GF9.to_string() == "gf(3^2):1,0,1"


def test_gf49_sugar_also_works_for_p_3_mod_4():
    g49 = field_from_spec("gf(49)")
    assert (g49.p, g49.k, g49.modulus) == (7, 2, (1, 0, 1))


@pytest.mark.parametrize(
    "text,exc",
    [
        ("gf(6)", NotPrime),
        ("gf(1)", NotPrime),
        ("gf(4)", ParseError),  # 2 != 3 mod 4: modulus mandatory
        ("gf(25):1,0,1", ReducibleModulus),  # 2^2 = -1 mod 5
        ("gf(2^2):1,0,1", ReducibleModulus),  # (x+1)^2 over GF(2)
        ("gf(2^5):1,0,0,0,0,1", UnsupportedDegree),
        ("gf(3^2):1,0,2", ParseError),  # not monic
        ("gf(3^2):1,1", ParseError),  # wrong length
        ("gf(3", ParseError),
        ("hello", ParseError),
        ("gf(37^2):1,0,1", ParseError),  # extension characteristic cap
    ],
)
def test_bad_specs(text, exc):
    with pytest.raises(exc):
        field_from_spec(text)


def test_prime_cap():
    with pytest.raises(ParseError):
        FieldSpec.prime(2**31 + 11)
    big = FieldSpec.prime(2147483647)  # largest prime below 2^31
    assert big.order == 2147483647


def test_arith_examples():
    assert (GF3.elem(2) * GF3.elem(2)).to_json() == 1
    assert (QQ.elem("1/3") + QQ.elem("1/6")).to_json() == "1/2"
    x = GF9.elem([0, 1])
    assert (x * x).to_json() == [2, 0]  # the quotient relation forces x^2 = -1


def test_arith_dispatch():
    a, b = GF3.elem(2), GF3.elem(2)
    assert arith(a, b, "add").to_json() == 1
    assert arith(a, b, "sub").to_json() == 0
    assert arith(a, b, "mul").to_json() == 1
    assert arith(a, b, "div").to_json() == 1
    assert arith(a, None, "neg").to_json() == 1
    assert arith(a, None, "inv").to_json() == 2
    assert arith(a, b, "eq") is True
    assert arith(a, GF3.elem(1), "eq") is False
    with pytest.raises(ParseError):
        arith(a, b, "xor")


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        GF3.elem(1) / GF3.elem(0)
    with pytest.raises(DivisionByZero):
        QQ.elem(0).inv()
    with pytest.raises(DivisionByZero):
        GF9.elem_from_code(0).inv()


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        GF3.elem(1) + GF2.elem(1)
    with pytest.raises(FieldMismatch):
        arith(GF3.elem(1), QQ.elem(1), "eq")


@pytest.mark.parametrize("spec", [QQ, GF2, GF3, GF4, GF9, GF27])
def test_field_axioms(spec):
    rng = random.Random(hash(spec.to_string()) & 0xFFFF)

    def rand():
        if spec.is_finite:
            return spec.elem_from_code(rng.randrange(spec.order))
        return spec.elem(Fraction(rng.randint(-50, 50), rng.randint(1, 20)))

    one = spec.one()
    for _ in range(120):
        a, b, c = rand(), rand(), rand()
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        if not a.is_zero:
            assert a * a.inv() == one
        assert a + (-a) == spec.zero()


@pytest.mark.parametrize("spec", [GF2, GF3, GF4, GF9, GF27])
def test_multiplicative_group_order(spec):
    q = spec.order
    elems = [spec.elem_from_code(c) for c in range(q)]
    assert len(set(elems)) == q
    one = spec.one()
    for e in elems[1:]:
        acc = one
        for _ in range(q - 1):
            acc = acc * e
        assert acc == one


def test_rational_round_trip():
    rng = random.Random(7)
    for _ in range(200):
        a = QQ.elem(Fraction(rng.getrandbits(64), rng.getrandbits(32) + 1))
        b = QQ.elem(Fraction(rng.getrandbits(64), rng.getrandbits(32) + 1))
        assert (a + b) - b == a


def test_lowest_terms_and_reduction_invariants():
    e = QQ.elem("-6/4")
    assert e.raw == Fraction(-3, 2) and e.raw.denominator == 2
    assert GF3.elem(-1).to_json() == 2
    assert GF9.elem([4, 5]).to_json() == [1, 2]  # coefficients reduce mod p


def test_entry_json_round_trip():
    for spec, values in [
        (QQ, [0, 5, "-7/3"]),
        (GF3, [0, 1, 2]),
        (GF9, [[0, 0], [2, 1]]),
    ]:
        for v in values:
            e = spec.elem(v)
            assert spec.elem(e.to_json()) == e


def test_fraction_embedding_into_prime_fields():
    # 1/2 = 2 in GF(3); denominators divisible by p are rejected
    assert GF3.elem(Fraction(1, 2)).to_json() == 2
    with pytest.raises(DivisionByZero):
        GF3.elem(Fraction(1, 3))
