"""Distance-theoretic tests: lifts, rank criterion, derogatory classification,
idempotent witnesses, certificates, and the distance decision ladder."""

import math
import random

import pytest

from commdist.errors import BadWitness, CapExceeded, DimMismatch
from commdist.field import FieldSpec
from commdist import commute as cm
from commdist.graph import bfs_distance, decode_matrix
from commdist.matrix import (
    ExactMatrix,
    min_poly,
    nullspace_basis,
    random_matrix,
    rank,
)

QQ = FieldSpec.rationals()
GF2 = FieldSpec.prime(2)
GF3 = FieldSpec.prime(3)
GF9 = FieldSpec.parse("gf(9)")

A25 = ExactMatrix(QQ, [[1, 2, 0], [3, 4, 0], [0, 0, 5]])
B25 = ExactMatrix(QQ, [[1, 1, 0], [2, 2, 0], [0, 0, 3]])
C25 = ExactMatrix(QQ, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
A46 = ExactMatrix(QQ, [[1, -1, 0, 3], [-1, 1, 0, -1], [-2, 2, 0, -4], [0, 0, 0, -2]])
B46 = ExactMatrix(QQ, [[1, 1, 0, 0], [-1, 1, 0, 0], [0, 0, -1, 1], [0, 0, -1, -1]])
A410 = ExactMatrix(QQ, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
B410 = ExactMatrix(QQ, [[0, -1, 0], [1, 0, 1], [0, 0, 0]])


def test_is_scalar():
    assert cm.is_scalar(ExactMatrix.identity(QQ, 4).scale(3))
    assert not cm.is_scalar(C25)
    assert cm.is_scalar(ExactMatrix.zeros(GF3, 3, 3))


def test_lift_of_scalar_is_zero():
    lam = ExactMatrix.identity(GF3, 3).scale(2)
    assert cm.lift_M(lam).matrix == ExactMatrix.zeros(GF3, 9, 9)


def test_stack_dimensions():
    stacked = cm.stack_M(A25, B25)
    assert (stacked.matrix.nrows, stacked.matrix.ncols) == (18, 9)
    assert stacked.kind == "stacked"
    # the top block is the single lift of the first operand
    single = cm.lift_M(A25).matrix
    assert stacked.matrix.rows[:9] == single.rows


@pytest.mark.parametrize("spec", [QQ, GF2, GF3, GF9])
def test_lift_identity_property(spec):
    rng = random.Random(101)
    for _ in range(40):
        a = random_matrix(spec, 3, 3, rng)
        c = random_matrix(spec, 3, 3, rng)
        lhs = cm.lift_M(a).apply_vec([x for row in c.rows for x in row])
        rhs = [x for row in (a @ c - c @ a).rows for x in row]
        assert lhs == rhs


def test_centralizer_of_scalar_is_everything():
    assert len(cm.centralizer_basis(ExactMatrix.identity(GF2, 3))) == 9


def test_centralizer_dimension_of_bundled_matrices():
    basis = cm.centralizer_basis(A25)
    assert len(basis) == 3
    # oracle: over GF(2) the centralizer size must be 2^dim, counted brute force
    a2 = A25.to_field(GF2)
    brute = sum(
        1
        for code in range(512)
        if (lambda m: m @ a2 == a2 @ m)(decode_matrix(GF2, 3, code))
    )
    assert brute == 2 ** len(cm.centralizer_basis(a2))
    # the 4x4 pair: 6-parameter and 4-parameter commuting templates
    assert len(cm.centralizer_basis(A46)) == 6
    assert len(cm.centralizer_basis(B46)) == 4


def test_centralizer_members_commute():
    for m in cm.centralizer_basis(A46):
        assert m @ A46 == A46 @ m


def test_dist_le_2_bundled_pair():
    assert cm.dist_le_2(A25, B25)
    assert not cm.commutes(A25, B25)


def test_dist_le_2_reflexive():
    rng = random.Random(5)
    for spec in (QQ, GF3):
        a = random_matrix(spec, 3, 3, rng)
        assert cm.dist_le_2(a, a)
    lam = ExactMatrix.identity(QQ, 2).scale(7)
    assert cm.dist_le_2(lam, lam)


def test_no_two_by_two_distance_two_pairs_exhaustive():
    # oracle: brute-force search for a common non-scalar commuter among all 16
    mats = [decode_matrix(GF2, 2, c) for c in range(16)]
    nonscalar = [m for m in mats if not cm.is_scalar(m)]
    for a in nonscalar:
        for b in nonscalar:
            if a @ b == b @ a:
                continue
            assert not cm.dist_le_2(a, b)
            brute = any(
                not cm.is_scalar(c) and c @ a == a @ c and c @ b == b @ c
                for c in mats
            )
            assert not brute


def test_dist_le_2_matches_stack_rank():
    rng = random.Random(31)
    for spec in (QQ, GF2, GF3, GF9):
        for _ in range(15):
            a = random_matrix(spec, 3, 3, rng)
            b = random_matrix(spec, 3, 3, rng)
            assert cm.dist_le_2(a, b) == (rank(cm.stack_M(a, b).matrix) <= 7)


def test_stack_nullity_at_least_one():
    rng = random.Random(37)
    for spec in (QQ, GF2, GF9):
        for _ in range(10):
            a = random_matrix(spec, 3, 3, rng)
            b = random_matrix(spec, 3, 3, rng)
            assert len(nullspace_basis(cm.stack_M(a, b).matrix)) >= 1


def test_derogatory_examples():
    assert cm.derogatory(A46)
    assert cm.derogatory(ExactMatrix.identity(QQ, 3))
    companion = ExactMatrix(GF2, [[0, 0, 1], [1, 0, 1], [0, 1, 0]])  # x^3 + x + 1
    assert not cm.derogatory(companion)


@pytest.mark.parametrize("spec", [QQ, GF2, GF3, GF9])
def test_derogatory_agrees_with_min_poly_degree(spec):
    rng = random.Random(41)
    for _ in range(25):
        n = rng.randint(2, 4)
        a = random_matrix(spec, n, n, rng)
        assert cm.derogatory(a) == (len(min_poly(a)) - 1 < n)


def test_zi_witness_validation():
    p = ExactMatrix(QQ, [[0, 0, 0], [0, 0, 0], [0, 0, 1]])
    assert cm.zi_membership(A25, B25, 1, witness=p) == p
    with pytest.raises(BadWitness) as err:
        cm.zi_membership(A25, B25, 1, witness=ExactMatrix(QQ, [[0, 1, 0], [0, 0, 0], [0, 0, 0]]))
    assert err.value.condition == "idempotent"
    with pytest.raises(BadWitness) as err:
        cm.zi_membership(A25, B25, 1, witness=C25)  # idempotent of rank 2, not 1
    assert err.value.condition == "rank"
    bad = ExactMatrix(QQ, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(BadWitness) as err:
        cm.zi_membership(A25, B25, 1, witness=bad)
    assert err.value.condition == "commutes-with-first"


def test_zi_enumeration_matches_independent_oracle():
    rng = random.Random(47)
    ident = ExactMatrix.identity(GF2, 3)
    for trial in range(12):
        a = ident.scale(1) if trial % 4 == 0 else random_matrix(GF2, 3, 3, rng)
        b = random_matrix(GF2, 3, 3, rng)
        got = cm.zi_membership(a, b, 1)
        # oracle: independent scan of all 512 matrices in code order
        want = None
        for code in range(512):
            p = decode_matrix(GF2, 3, code)
            if (
                p @ p == p
                and rank(p) == 1
                and p @ a == a @ p
                and p @ b == b @ p
            ):
                want = p
                break
        assert got == want


def test_zi_block_diagonal_pair_has_rank_two_witness():
    a = ExactMatrix(GF2, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 1]])
    b = ExactMatrix(GF2, [[0, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    wit = cm.zi_membership(a, b, 2)
    assert wit is not None and rank(wit) == 2 and wit @ wit == wit
    assert cm.dist_le_2(a, b)


def test_zi_cap_and_range_errors():
    g7 = FieldSpec.prime(7)
    a = ExactMatrix(g7, [[1, 1, 0], [0, 1, 0], [0, 0, 2]])
    with pytest.raises(CapExceeded):
        cm.zi_membership(a, a, 1)  # 7^9 codes exceed 2^24
    with pytest.raises(DimMismatch):
        cm.zi_membership(A25, B25, 2)  # rank above floor(n/2)


def test_self_pair_lies_in_z1_over_gf2():
    a = ExactMatrix(GF2, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    wit = cm.zi_membership(a, a, 1)
    assert wit is not None and cm.dist_le_2(a, a)


# ---------------------------------------------------------------------------
# certificates


def test_pc_search_self_pair_returns_x_x():
    rng = random.Random(53)
    m = random_matrix(GF3, 3, 3, rng)
    while cm.is_scalar(m):
        m = random_matrix(GF3, 3, 3, rng)
    res = cm.pc_search(m, m)
    assert res.status == "certificate"
    assert [c.raw for c in res.certificate.cs] == [1, 0]
    assert [d.raw for d in res.certificate.ds] == [1, 0]


def test_pc_derogatory_certificate_over_gf3():
    a3, b3 = A46.to_field(GF3), B46.to_field(GF3)
    res = cm.pc_search(a3, b3)
    assert res.status == "certificate"
    assert cm.pc_verify(a3, b3, res.certificate)
    # the annihilating-polynomial route: p = normalized minimal polynomial, q = x
    ops = GF3.ops()
    coeffs = [c.raw for c in min_poly(a3)]
    vec = cm._normalize_vector(GF3, coeffs[1:] + [ops.zero] * (4 - len(coeffs)))
    cert = cm.PcCertificate(
        cm._elems(GF3, vec),
        cm._elems(GF3, [1, 0, 0]),
        True,
        False,
    )
    assert cm.pc_verify(a3, b3, cert)


def test_pc_search_none_is_a_proof_over_finite_fields():
    a3, b3 = A410.to_field(GF3), B410.to_field(GF3)
    res = cm.pc_search(a3, b3)
    assert res.status == "none"
    # both are non-derogatory mod 3, so "none" matches distance >= 4 there
    assert not cm.derogatory(a3) and not cm.derogatory(b3)


def test_pc_search_results_always_verify():
    rng = random.Random(59)
    found = 0
    for _ in range(40):
        a = random_matrix(GF2, 3, 3, rng)
        b = random_matrix(GF2, 3, 3, rng)
        res = cm.pc_search(a, b)
        if res.certificate is not None:
            found += 1
            assert cm.pc_verify(a, b, res.certificate)
    assert found > 0


def test_pc_verify_against_direct_evaluation():
    rng = random.Random(61)
    ops = GF3.ops()
    for _ in range(60):
        a = random_matrix(GF3, 3, 3, rng)
        b = random_matrix(GF3, 3, 3, rng)
        raw = [rng.randrange(3) for _ in range(2)]
        vec = cm._normalize_vector(GF3, raw)
        if vec is None:
            continue
        dvec = cm._normalize_vector(GF3, [rng.randrange(3) for _ in range(2)])
        if dvec is None:
            continue
        pa = cm.poly_eval_no_const(a, cm._elems(GF3, vec))
        qb = cm.poly_eval_no_const(b, cm._elems(GF3, dvec))
        cert = cm.PcCertificate(
            cm._elems(GF3, vec), cm._elems(GF3, dvec), cm.is_scalar(pa), cm.is_scalar(qb)
        )
        assert cm.pc_verify(a, b, cert) == (pa @ qb == qb @ pa)


def test_pc_verify_rejects_zero_and_unnormalized_vectors():
    zero2 = cm._elems(GF3, [0, 0])
    x2 = cm._elems(GF3, [1, 0])
    assert not cm.pc_verify(A410.to_field(GF3), B410.to_field(GF3),
                            cm.PcCertificate(zero2, x2, False, False))
    unnorm = cm._elems(GF3, [2, 0])  # first nonzero coordinate must be one
    assert not cm.pc_verify(A410.to_field(GF3), B410.to_field(GF3),
                            cm.PcCertificate(unnorm, x2, False, False))


def test_pc_verify_checks_scalar_flags():
    m = ExactMatrix(GF3, [[1, 1, 0], [0, 1, 0], [0, 0, 2]])
    res = cm.pc_search(m, m)
    cert = res.certificate
    lied = cm.PcCertificate(cert.cs, cert.ds, not cert.pa_scalar, cert.qb_scalar)
    assert not cm.pc_verify(m, m, lied)


def test_pc_needs_n_at_least_3():
    with pytest.raises(DimMismatch):
        cm.pc_search(ExactMatrix(GF2, [[0, 1], [0, 0]]), ExactMatrix(GF2, [[0, 0], [1, 0]]))


def test_pc_rational_reconstruction_of_self_pair():
    m = ExactMatrix(QQ, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert not cm.derogatory(m)
    res = cm.pc_search(m, m)
    assert res.status == "certificate" and res.note == "reconstructed from residues"
    assert cm.pc_verify(m, m, res.certificate)


def test_pc_rational_unknown_when_a_prime_blocks():
    res = cm.pc_search(A410, B410)
    assert res.status == "unknown"
    assert "modulo 3" in res.note


def test_poly_eval_uses_field_coefficients():
    # regression: extension-field coefficient codes must never re-embed
    a = A410.to_field(GF9)
    i_elem = GF9.elem([0, 1])
    p = cm.poly_eval_no_const(a, [GF9.zero(), i_elem])  # i * A^2
    expected = (a @ a).scale(i_elem)
    assert p == expected


def test_certificate_json_round_trip():
    res = cm.pc_search(A46.to_field(GF9), B46.to_field(GF9))
    cert = res.certificate
    again = cm.PcCertificate.from_json(GF9, cert.to_json())
    assert again == cert


# ---------------------------------------------------------------------------
# the distance ladder


def test_distance_conventions():
    lam = ExactMatrix.identity(QQ, 3).scale(4)
    assert cm.distance(lam, lam).value == 0
    assert cm.distance(lam, A25).value == 1
    assert cm.distance(A25, lam).value == 1
    assert cm.distance(A25, A25).value == 0
    r = cm.distance(A25, C25)
    assert r.value == 1 and r.decided_by == "commuting"


def test_distance_two_with_witness():
    r = cm.distance(A25, B25)
    assert (r.kind, r.value, r.decided_by) == ("exact", 2, "rank-criterion")
    assert cm.verify_chain(A25, B25, r.witness)
    assert not cm.is_scalar(r.witness[0])


def test_distance_two_by_two_infinite():
    e12 = ExactMatrix(QQ, [[0, 1], [0, 0]])
    e21 = ExactMatrix(QQ, [[0, 0], [1, 0]])
    assert cm.distance(e12, e21).kind == "infinite"
    g2pair = cm.distance(e12.to_field(GF2), e21.to_field(GF2))
    assert g2pair.kind == "infinite"


def test_distance_agrees_with_bfs_over_small_field():
    rng = random.Random(67)
    for _ in range(40):
        a = random_matrix(GF2, 3, 3, rng)
        b = random_matrix(GF2, 3, 3, rng)
        if cm.is_scalar(a) or cm.is_scalar(b) or a == b:
            continue
        r = cm.distance(a, b)
        d = 1 if a @ b == b @ a else bfs_distance(a, b)
        if d == math.inf:
            assert r.kind == "infinite"
        else:
            assert r.kind == "exact" and r.value == d
        if r.witness:
            assert cm.verify_chain(a, b, r.witness)


def test_distance_three_by_certificate_chain_over_gf9():
    a9, b9 = A410.to_field(GF9), B410.to_field(GF9)
    r = cm.distance(a9, b9)
    assert (r.kind, r.value, r.decided_by) == ("exact", 3, "pc-chain")
    assert cm.verify_chain(a9, b9, r.witness)
    assert r.certificate is not None and not r.certificate.pa_scalar


def test_distance_bounded_over_rationals():
    r = cm.distance(A410, B410)
    assert r.kind == "bounded" and (r.lower, r.upper) == (3, math.inf)
    assert r.decided_by == "pc-unknown"
    r46 = cm.distance(A46, B46)
    assert r46.kind == "bounded" and r46.decided_by == "pc-scalar-side"
    assert r46.certificate is not None and r46.certificate.pa_scalar


def test_distance_result_json():
    r = cm.distance(A25, B25)
    js = r.to_json()
    assert js["kind"] == "exact" and js["value"] == 2 and "witness" in js
    rb = cm.distance(A410, B410).to_json()
    assert rb["upper"] == "inf" and rb["lower"] == 3


def test_verify_chain_rejects_scalar_interior():
    lam = ExactMatrix.identity(QQ, 3).scale(2)
    assert not cm.verify_chain(A25, B25, [lam])
    assert cm.verify_chain(A25, B25, [C25])


def test_size_cap():
    big = ExactMatrix.identity(QQ, 9)
    with pytest.raises(CapExceeded):
        cm.distance(big, big)
