"""Bundled reference checks: worked examples, oracle equivalences, snapshots.

Each check compares library output against an independently derived expected
value: hand-checkable matrices shipped as fixtures, brute-force recounts run
in-suite, or frozen regression snapshots.  The CLI `verify-paper` subcommand
and the acceptance test module both run this registry.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass
from importlib import resources

from . import census as cs
from . import commute as cm
from . import graph as gr
from .field import FieldSpec
from .matrix import ExactMatrix, min_poly, rank_raw, random_matrix

QQ = FieldSpec.rationals()
GF2 = FieldSpec.prime(2)
GF3 = FieldSpec.prime(3)
GF5 = FieldSpec.prime(5)
GF7 = FieldSpec.prime(7)
GF9 = FieldSpec.parse("gf(9)")


def _data(kind: str, name: str) -> dict:
    ref = resources.files("commdist").joinpath(f"data/{kind}/{name}.json")
    return json.loads(ref.read_text())


def load_fixture(name: str) -> ExactMatrix:
    """One of the bundled example matrices (ex25_A, ex46_B, ...)."""
    return ExactMatrix.from_json(_data("fixtures", name))


def load_template(name: str) -> dict:
    return _data("fixtures", name)


def load_snapshot(name: str) -> dict:
    return _data("snapshots", name)


def _eval_template_entry(expr: str, a: ExactMatrix):
    """Evaluate entries like "0", "-a21", "a11-a22" at a concrete matrix."""
    ops = a.spec.ops()
    acc = ops.zero
    sign = 1
    token = ""

    def flush(tok, sgn, acc):
        if not tok:
            return acc
        if tok == "0":
            return acc
        i, j = int(tok[1]) - 1, int(tok[2]) - 1
        val = a.rows[i][j]
        return ops.add(acc, val) if sgn > 0 else ops.sub(acc, val)

    for ch in expr:
        if ch in "+-":
            acc = flush(token, sign, acc)
            token = ""
            sign = 1 if ch == "+" else -1
        else:
            token += ch
    return flush(token, sign, acc)


@dataclass
class CheckResult:
    name: str
    passed: bool
    expected: str
    actual: str
    seconds: float
    budget_s: float

    @property
    def in_budget(self) -> bool:
        return self.seconds < self.budget_s

    def row(self) -> str:
        status = "PASS" if self.passed and self.in_budget else "FAIL"
        return (
            f"{status:4} {self.name:28} {self.seconds:8.2f}s/{self.budget_s:.0f}s  "
            f"expected {self.expected} | actual {self.actual}"
        )


# ---------------------------------------------------------------------------
# the individual checks; each returns (passed, expected, actual)


def check_ex25_distance():
    a, b, c = load_fixture("ex25_A"), load_fixture("ex25_B"), load_fixture("ex25_C")
    adjacency = cm.commutes(a, c) and cm.commutes(b, c) and not cm.commutes(a, b)
    res = cm.distance(a, b)
    chain_ok = res.witness is not None and cm.verify_chain(a, b, res.witness)
    ok = adjacency and res.kind == "exact" and res.value == 2 and chain_ok
    return ok, "A<->C, B<->C, AB!=BA, d=2", f"adjacency={adjacency}, d={res.value}, chain={chain_ok}"


def check_ex32_lift_template():
    template = load_template("ex32_template")
    rng = random.Random(32)
    mismatches = 0
    for _ in range(100):
        a = random_matrix(GF5, 3, 3, rng)
        lifted = cm.lift_M(a).matrix
        for i in range(9):
            for j in range(9):
                want = _eval_template_entry(template["rows"][i][j], a)
                if lifted.rows[i][j] != want:
                    mismatches += 1
    stacked = cm.stack_M(random_matrix(GF5, 3, 3, rng), random_matrix(GF5, 3, 3, rng))
    dims_ok = (stacked.matrix.nrows, stacked.matrix.ncols) == (18, 9)
    minors = math.comb(9, 8) * math.comb(18, 8)
    ok = mismatches == 0 and dims_ok and minors == 393822
    return (
        ok,
        "100 template matches, 18x9 stack, 393822 minors",
        f"mismatches={mismatches}, dims_ok={dims_ok}, minors={minors}",
    )


def check_rank_criterion_vs_bfs():
    """Exhaustive agreement between the rank test and graph distance <= 2."""
    scalars = gr._scalar_codes(GF2, 3)
    verts = [c for c in range(512) if c not in scalars]
    mats = {c: gr.decode_matrix(GF2, 3, c) for c in verts}
    le2_cache: dict[frozenset, bool] = {}
    disagreements = 0
    pairs = 0
    for a_code in verts:
        report = gr.bfs_report(mats[a_code])
        for b_code in verts:
            pairs += 1
            key = frozenset((a_code, b_code))
            if key not in le2_cache:
                le2_cache[key] = cm.dist_le_2(mats[a_code], mats[b_code])
            if le2_cache[key] != (report.distance_of(b_code) <= 2):
                disagreements += 1
    ok = disagreements == 0 and pairs == 510 * 510
    return ok, "0 disagreements on 260100 ordered pairs", f"{disagreements} on {pairs}"


def check_two_by_two_dichotomy():
    outcomes = []
    for spec in (GF2, GF3):
        scalars = gr._scalar_codes(spec, 2)
        total = spec.order**4
        verts = [c for c in range(total) if c not in scalars]
        dist2 = 0
        for code in verts:
            report = gr.bfs_report(gr.decode_matrix(spec, 2, code))
            dist2 += sum(1 for d in report.distances.values() if d == 2)
        comp = gr.components(spec, 2)
        outcomes.append((dist2, comp.count))
    ok = all(d == 0 and c > 1 for d, c in outcomes)
    return ok, "no distance-2 pairs, >1 component (both fields)", f"{outcomes}"


_EX46_C_RELATIONS = "10 linear relations of the 6-parameter commuter form"


def _fits_ex46_c_template(c: ExactMatrix) -> bool:
    ops = c.spec.ops()
    half = ops.inv(c.spec.raw_from(2))
    r = c.rows
    add, sub, mul = ops.add, ops.sub, ops.mul
    two = c.spec.raw_from(2)
    checks = [
        r[1][0] == add(r[0][1], mul(two, r[0][2])),
        r[1][1] == sub(r[0][0], mul(two, r[0][2])),
        r[1][2] == r[0][2],
        r[1][3] == add(r[0][1], r[0][2]),
        r[2][2]
        == add(
            sub(sub(r[0][0], r[0][1]), mul(two, r[0][2])),
            sub(mul(half, r[2][0]), mul(half, r[2][1])),
        ),
        r[2][3]
        == add(
            sub(add(r[0][1], r[0][2]), r[0][3]),
            add(mul(half, r[2][0]), mul(half, r[2][1])),
        ),
        r[3][0] == ops.zero,
        r[3][1] == ops.zero,
        r[3][2] == ops.zero,
        r[3][3] == sub(sub(r[0][0], r[0][2]), r[0][3]),
    ]
    return all(checks)


def _fits_ex46_d_template(d: ExactMatrix) -> bool:
    ops = d.spec.ops()
    r = d.rows
    zero = ops.zero
    return (
        r[1][0] == ops.neg(r[0][1])
        and r[1][1] == r[0][0]
        and r[3][2] == ops.neg(r[2][3])
        and r[3][3] == r[2][2]
        and all(
            r[i][j] == zero
            for i, j in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0), (3, 1)]
        )
    )


def check_ex46():
    a, b = load_fixture("ex46_A"), load_fixture("ex46_B")
    derog = cm.derogatory(a) and not cm.derogatory(b)
    za = cm.centralizer_basis(a)
    zb = cm.centralizer_basis(b)
    dims_ok = len(za) == 6 and len(zb) == 4
    template_ok = all(_fits_ex46_c_template(c) for c in za) and all(
        _fits_ex46_d_template(d) for d in zb
    )
    mp = [c.to_json() for c in min_poly(a)]
    minpoly_ok = mp == [0, -4, 0, 1]  # x^3 - 4x
    blocked = []
    for spec in (GF3, GF7):
        ap, bp = a.to_field(spec), b.to_field(spec)
        no_chain = (
            not cm.commutes(ap, bp)
            and not cm.dist_le_2(ap, bp)
            and gr.restricted_distance_le_3(ap, bp) is None
        )
        blocked.append(no_chain)
    a9, b9 = a.to_field(GF9), b.to_field(GF9)
    pc = cm.pc_search(a9, b9)
    cert_ok = pc.status == "certificate" and cm.pc_verify(a9, b9, pc.certificate)
    ok = derog and dims_ok and template_ok and minpoly_ok and all(blocked) and cert_ok
    return (
        ok,
        "derogatory, dims 6/4, templates, minpoly x^3-4x, d>=4 mod 3 and 7, gf(9) cert",
        f"derog={derog}, dims=({len(za)},{len(zb)}), templates={template_ok}, "
        f"minpoly={minpoly_ok}, blocked={blocked}, cert={cert_ok}",
    )


def check_ex410():
    a, b = load_fixture("ex410_A"), load_fixture("ex410_B")
    c9, d9 = load_fixture("ex410_C"), load_fixture("ex410_D")
    a9, b9 = a.to_field(GF9), b.to_field(GF9)
    nonscalar = not cm.is_scalar(c9) and not cm.is_scalar(d9)
    chain_ok = cm.verify_chain(a9, b9, [c9, d9])
    not2 = not cm.dist_le_2(a9, b9)
    res = cm.distance(a9, b9)
    d3 = res.kind == "exact" and res.value == 3 and cm.verify_chain(a9, b9, res.witness)
    a3, b3 = a.to_field(GF3), b.to_field(GF3)
    blocked = (
        not cm.commutes(a3, b3)
        and not cm.dist_le_2(a3, b3)
        and gr.restricted_distance_le_3(a3, b3) is None
    )
    dims_ok = len(cm.centralizer_basis(a)) == 3 and len(cm.centralizer_basis(b)) == 3
    ok = nonscalar and chain_ok and not2 and d3 and blocked and dims_ok
    return (
        ok,
        "gf(9): chain valid so d=3; gf(3): no chain so d>=4; dims 3/3 over Q",
        f"nonscalar={nonscalar}, chain={chain_ok}, not2={not2}, d3={d3}, "
        f"blocked={blocked}, dims_ok={dims_ok}",
    )


def random_derogatory(spec: FieldSpec, n: int, rng: random.Random) -> ExactMatrix:
    """Conjugated diagonal matrix with a repeated eigenvalue in two blocks."""
    q = spec.order
    lam = rng.randrange(q)
    rest = [rng.randrange(q) for _ in range(n - 2)]
    d = ExactMatrix.diag(spec, [spec.elem_from_code(x) for x in [lam, lam] + rest])
    while True:
        p = random_matrix(spec, n, n, rng)
        if rank_raw(spec, p.raw_rows()) == n:
            break
    p_inv = _invert(p)
    return p @ d @ p_inv


def _invert(m: ExactMatrix) -> ExactMatrix:
    from .matrix import rref_raw

    n = m.nrows
    ops = m.spec.ops()
    aug = [
        list(row) + [ops.one if i == j else ops.zero for j in range(n)]
        for i, row in enumerate(m.rows)
    ]
    rref, pivots = rref_raw(m.spec, aug)
    assert pivots[:n] == list(range(n)), "matrix not invertible"
    return ExactMatrix._from_raw(m.spec, [row[n:] for row in rref])


def check_derogatory_certificates():
    rng = random.Random(42)
    n = 4
    ok_count = 0
    for _ in range(50):
        a = random_derogatory(GF3, n, rng)
        b = random_matrix(GF3, n, n, rng)
        found = cm.pc_search(a, b)
        # the annihilating-polynomial certificate, built by hand
        ops = GF3.ops()
        coeffs = [c.raw for c in min_poly(a)]
        vec = coeffs[1:] + [ops.zero] * (n - len(coeffs))
        vec = cm._normalize_vector(GF3, vec)
        x_vec = [ops.one, ops.zero, ops.zero]
        cert = cm.PcCertificate(
            cm._elems(GF3, vec),
            cm._elems(GF3, x_vec),
            cm.is_scalar(cm.poly_eval_no_const(a, cm._elems(GF3, vec))),
            cm.is_scalar(cm.poly_eval_no_const(b, cm._elems(GF3, x_vec))),
        )
        if found.status == "certificate" and cm.pc_verify(a, b, cert):
            ok_count += 1
    return ok_count == 50, "50/50 derogatory pairs certified", f"{ok_count}/50"


def check_census_fixtures():
    mats2 = [gr.decode_matrix(GF2, 2, c) for c in range(16)]
    brute = sum(1 for x in mats2 for y in mats2 if x @ y == y @ x)
    ccp22 = cs.count_commuting_pairs(GF2, 2).value
    cd22 = cs.count_dist_le_2(GF2, 2).value
    snap = load_snapshot("census")
    cd32 = cs.count_dist_le_2(GF2, 3).value
    snap_ok = cd32 == snap["pairs_dist_le_2"]["3|gf(2)"]
    ccp32 = cs.count_commuting_pairs(GF2, 3).value
    bounds_ok = ccp32 < cd32 < 2**18
    # recount a seeded 1000-pair subsample with the pairwise library test
    total = 512
    sample_ok = True
    for pair_code in cs.sample_codes(8, 0, 1000, total * total):
        a_code, b_code = divmod(pair_code, total)
        a = gr.decode_matrix(GF2, 3, a_code)
        b = gr.decode_matrix(GF2, 3, b_code)
        want = cm.dist_le_2(a, b)
        # independent recount: search the joint nullspace for a non-scalar member
        joint = cm.common_nonscalar_commuter(a, b) is not None
        if joint != want:
            sample_ok = False
    ok = brute == 88 and ccp22 == 88 and cd22 == 88 and snap_ok and bounds_ok and sample_ok
    return (
        ok,
        "88/88/88, cd2(3,2) snapshot, bounds, 1000-pair recount",
        f"brute={brute}, ccp={ccp22}, cd2={cd22}, snap_ok={snap_ok}, "
        f"bounds_ok={bounds_ok}, sample_ok={sample_ok}",
    )


def check_invariant_suites():
    rng = random.Random(9)
    lift_ok = True
    ranknull_ok = True
    for spec in (QQ, GF2, GF3, GF9):
        for _ in range(1000):
            m = random_matrix(spec, 3, 3, rng)
            c = random_matrix(spec, 3, 3, rng)
            lhs = cm.lift_M(m).apply_vec([x for row in c.rows for x in row])
            rhs = [x for row in (m @ c - c @ m).rows for x in row]
            if lhs != rhs:
                lift_ok = False
        for _ in range(50):
            from .matrix import nullspace_raw

            m = random_matrix(spec, rng.randint(1, 6), rng.randint(1, 6), rng)
            rows = m.raw_rows()
            if rank_raw(spec, rows) + len(nullspace_raw(spec, rows)) != m.ncols:
                ranknull_ok = False
    zi_ok = True
    zi_hits = 0
    for _ in range(60):
        a = random_matrix(GF2, 3, 3, rng)
        b = random_matrix(GF2, 3, 3, rng)
        if cm.is_scalar(a) or cm.is_scalar(b):
            continue
        wit = cm.zi_membership(a, b, 1)
        if wit is not None:
            zi_hits += 1
            if not cm.dist_le_2(a, b):
                zi_ok = False
    pc_ok = True
    pc_hits = 0
    total = 3**9
    for pair_code in cs.sample_codes(11, 0, 200, total * total):
        a_code, b_code = divmod(pair_code, total)
        a = gr.decode_matrix(GF3, 3, a_code)
        b = gr.decode_matrix(GF3, 3, b_code)
        if cm.is_scalar(a) or cm.is_scalar(b):
            continue
        pc = cm.pc_search(a, b)
        if (
            pc.certificate is not None
            and not pc.certificate.pa_scalar
            and not pc.certificate.qb_scalar
        ):
            pc_hits += 1
            if not (gr.bfs_distance(a, b) <= 3):
                pc_ok = False
    ok = lift_ok and ranknull_ok and zi_ok and pc_ok and zi_hits > 0 and pc_hits > 0
    return (
        ok,
        "lift identity, rank-nullity, zi=>dist2, pc=>bfs<=3 (nonvacuous)",
        f"lift={lift_ok}, ranknull={ranknull_ok}, zi={zi_ok}({zi_hits} hits), "
        f"pc={pc_ok}({pc_hits} hits)",
    )


def check_graph_snapshots():
    snap = load_snapshot("graph")
    actual = {}
    for key, spec, n in (("2|gf(2)", GF2, 2), ("2|gf(3)", GF3, 2), ("3|gf(2)", GF2, 3)):
        comp = gr.components(spec, n)
        actual[key] = {
            "vertex_count": comp.vertex_count,
            "count": comp.count,
            "sizes": comp.sizes,
        }
    comp_ok = all(actual[k] == snap["components"][k] for k in actual)
    diam_ok = all(
        gr.diameter(spec, n) == snap["diameter"][key]
        for key, spec, n in (("2|gf(2)", GF2, 2), ("2|gf(3)", GF3, 2), ("3|gf(2)", GF2, 3))
    )
    return comp_ok and diam_ok, "components and diameters match snapshots", f"components={comp_ok}, diameters={diam_ok}"


CHECKS: list[tuple[str, float, object]] = [
    ("ex25-distance", 1.0, check_ex25_distance),
    ("ex32-lift-template", 1.0, check_ex32_lift_template),
    ("rank-criterion-vs-bfs", 60.0, check_rank_criterion_vs_bfs),
    ("two-by-two-dichotomy", 10.0, check_two_by_two_dichotomy),
    ("ex46", 120.0, check_ex46),
    ("ex410", 30.0, check_ex410),
    ("derogatory-certificates", 30.0, check_derogatory_certificates),
    ("census-fixtures", 120.0, check_census_fixtures),
    ("invariant-suites", 120.0, check_invariant_suites),
    ("graph-snapshots", 60.0, check_graph_snapshots),
]


def verify_paper(names: list[str] | None = None) -> list[CheckResult]:
    """Run the bundled reference checks (all of them by default)."""
    wanted = set(names) if names else None
    results = []
    for name, budget, fn in CHECKS:
        if wanted is not None and name not in wanted:
            continue
        t0 = time.perf_counter()
        try:
            passed, expected, actual = fn()
        except Exception as exc:  # a crash is a failing check, not a crash of the runner
            passed, expected, actual = False, "no exception", f"{type(exc).__name__}: {exc}"
        results.append(
            CheckResult(name, passed, expected, actual, time.perf_counter() - t0, budget)
        )
    return results
