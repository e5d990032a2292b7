"""Exhaustive and sampled point counts over small finite matrix spaces.

Counts are exact integers when the space fits the exhaustive caps; otherwise
seeded sampling produces an estimate whose replay data (seed, sample count)
rides along in the report.  Sampling is counter-based: sample j always comes
from block j of a Philox stream, so shards are reproducible and independent of
how an index range is partitioned.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np
from numpy.random import Philox

from .commute import dist_le_2, derogatory, idempotent_pool, lift_rows_raw
from .errors import CapExceeded, FieldMismatch
from .field import FieldSpec
from .graph import decode_matrix
from .matrix import ExactMatrix, nullspace_raw, rank_raw

SPACE_CAP = 1 << 24  # single-matrix enumerations
PAIR_CAP = 1 << 26  # exhaustive pair scans


@dataclass
class CensusReport:
    """One counted or estimated quantity plus everything needed to replay it."""

    field: str
    n: int
    quantity: str
    mode: dict
    value: object  # exact int, or a dict for sampled estimates
    wall_time_s: float
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "field": self.field,
            "n": self.n,
            "quantity": self.quantity,
            "mode": self.mode,
            "value": self.value,
            "wall_time_s": round(self.wall_time_s, 6),
        }
        out.update(self.extra)
        return out

    def to_json_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def sample_codes(seed: int, start: int, count: int, modulus: int) -> list[int]:
    """Counter-based uniform codes: sample j is derived from Philox block j.

    The same (seed, j) always yields the same code, so partitioning a range
    across workers cannot change the results.
    """
    if count == 0:
        return []
    bg = Philox(key=seed)
    if start:
        bg = bg.advance(start)
    raw = bg.random_raw(4 * count)
    out = []
    for idx in range(count):
        hi = int(raw[4 * idx])
        lo = int(raw[4 * idx + 1])
        out.append(((hi << 64) | lo) % modulus)
    return out


def _require_finite(spec: FieldSpec) -> int:
    q = spec.order
    if q is None:
        raise FieldMismatch("census operations need a finite field")
    return q


def count_commuting_pairs(spec: FieldSpec, n: int) -> CensusReport:
    """|{(A, B) : AB = BA}| as the sum of centralizer sizes over all A."""
    q = _require_finite(spec)
    total = q ** (n * n)
    if total > SPACE_CAP:
        raise CapExceeded(f"state space {total} exceeds 2^24")
    t0 = time.perf_counter()
    acc = 0
    nsq = n * n
    for code in range(total):
        m = decode_matrix(spec, n, code)
        nullity = nsq - rank_raw(spec, lift_rows_raw(m))
        acc += q**nullity
    return CensusReport(
        spec.to_string(),
        n,
        "pairs_dist_le_1",
        {"kind": "exhaustive"},
        acc,
        time.perf_counter() - t0,
    )


def _packed_bases_gf2(spec: FieldSpec, n: int, total: int) -> list[list[int]]:
    bases = []
    for code in range(total):
        m = decode_matrix(spec, n, code)
        vecs = nullspace_raw(spec, lift_rows_raw(m))
        bases.append([_pack_bits(v) for v in vecs])
    return bases


def _pack_bits(bits) -> int:
    acc = 0
    for j, x in enumerate(bits):
        if x:
            acc |= 1 << j
    return acc


def _bit_rank(rows: list[int]) -> int:
    basis: list[int] = []
    for row in rows:
        for b in basis:
            low = b & -b
            if row & low:
                row ^= b
        if row:
            basis.append(row)
    return len(basis)


def _joint_nullity_raw(spec: FieldSpec, ba: list, bb: list) -> int:
    if not ba or not bb:
        return 0
    return len(ba) + len(bb) - rank_raw(spec, [list(v) for v in ba + bb])


def count_dist_le_2(
    spec: FieldSpec, n: int, samples: int | None = None, seed: int = 0
) -> CensusReport:
    """Pairs whose stacked lift drops rank to n^2 - 2 or lower.

    Exhaustive when the ordered-pair space fits 2^26, else give `samples` for
    a seeded estimate.
    """
    q = _require_finite(spec)
    total = q ** (n * n)
    pair_total = total * total
    t0 = time.perf_counter()
    if samples is None:
        if pair_total > PAIR_CAP:
            raise CapExceeded(f"{pair_total} ordered pairs exceed 2^26; use sampling")
        if spec.kind == "prime" and spec.p == 2:
            bases = _packed_bases_gf2(spec, n, total)
            count = total  # the diagonal: every pair (A, A) qualifies
            for a in range(total):
                ba = bases[a]
                da = len(ba)
                for b in range(a + 1, total):
                    bb = bases[b]
                    if da + len(bb) - _bit_rank(ba + bb) >= 2:
                        count += 2
        else:
            raw_bases = []
            for code in range(total):
                m = decode_matrix(spec, n, code)
                raw_bases.append(nullspace_raw(spec, lift_rows_raw(m)))
            count = total
            for a in range(total):
                for b in range(a + 1, total):
                    if _joint_nullity_raw(spec, raw_bases[a], raw_bases[b]) >= 2:
                        count += 2
        return CensusReport(
            spec.to_string(),
            n,
            "pairs_dist_le_2",
            {"kind": "exhaustive"},
            count,
            time.perf_counter() - t0,
        )
    hits = 0
    for pair_code in sample_codes(seed, 0, samples, pair_total):
        a_code, b_code = divmod(pair_code, total)
        a = decode_matrix(spec, n, a_code)
        b = decode_matrix(spec, n, b_code)
        if dist_le_2(a, b):
            hits += 1
    return CensusReport(
        spec.to_string(),
        n,
        "pairs_dist_le_2",
        {"kind": "sampled", "samples": samples, "seed": seed},
        _estimate(hits, samples, pair_total),
        time.perf_counter() - t0,
    )


def _estimate(hits: int, samples: int, universe: int) -> dict:
    frac = Fraction(hits, samples)
    p_hat = hits / samples
    stderr = math.sqrt(max(p_hat * (1 - p_hat), 0.0) / samples)
    return {
        "hits": hits,
        "samples": samples,
        "fraction": f"{frac.numerator}/{frac.denominator}",
        "scaled": str(frac * universe),
        "stderr_fraction": stderr,
    }


def derogatory_count(spec: FieldSpec, n: int) -> CensusReport:
    """Number of matrices whose minimal polynomial degree falls below n."""
    q = _require_finite(spec)
    total = q ** (n * n)
    if total > SPACE_CAP:
        raise CapExceeded(f"state space {total} exceeds 2^24")
    t0 = time.perf_counter()
    count = 0
    for code in range(total):
        if derogatory(decode_matrix(spec, n, code)):
            count += 1
    report = CensusReport(
        spec.to_string(),
        n,
        "derogatory_count",
        {"kind": "exhaustive"},
        count,
        time.perf_counter() - t0,
    )
    # dimension diagnostic: derogatory matrices should thin out like q^(n^2-3)
    report.extra["ratio_to_q_pow_nsq_minus_3"] = str(Fraction(count, q ** (n * n - 3)))
    return report


def zi_pair_census(
    spec: FieldSpec, n: int, i: int, samples: int, seed: int = 0
) -> CensusReport:
    """Fraction of sampled pairs sharing a rank-i idempotent commuter.

    Every hit is cross-checked against the rank criterion; a hit that failed
    it would be a library bug, so the check raises.
    """
    q = _require_finite(spec)
    total = q ** (n * n)
    pool = [
        decode_matrix(spec, n, code)
        for code, r in idempotent_pool(spec, n)
        if r == i
    ]
    t0 = time.perf_counter()
    use_numpy = spec.kind == "prime" and pool
    if use_numpy:
        stack = np.array(
            [[[x for x in row] for row in m.rows] for m in pool], dtype=np.int64
        )
    hits = 0
    for pair_code in sample_codes(seed, 0, samples, total * total):
        a_code, b_code = divmod(pair_code, total)
        a = decode_matrix(spec, n, a_code)
        b = decode_matrix(spec, n, b_code)
        if use_numpy:
            hit = bool(
                np.any(
                    _commute_mask(stack, a, spec.p) & _commute_mask(stack, b, spec.p)
                )
            )
        else:
            hit = any(
                (a @ pm == pm @ a) and (b @ pm == pm @ b) for pm in pool
            )
        if hit:
            if not dist_le_2(a, b):
                raise AssertionError(
                    "idempotent witness without rank-criterion membership"
                )
            hits += 1
    report = CensusReport(
        spec.to_string(),
        n,
        f"zi_pair_count({i})",
        {"kind": "sampled", "samples": samples, "seed": seed},
        _estimate(hits, samples, total * total),
        time.perf_counter() - t0,
        extra={"i": i, "idempotents_of_rank_i": len(pool), "crosschecked": True},
    )
    return report


def _commute_mask(stack: np.ndarray, m: ExactMatrix, p: int) -> np.ndarray:
    arr = np.array([[x for x in row] for row in m.rows], dtype=np.int64)
    left = np.einsum("ij,ajk->aik", arr, stack) % p
    right = np.einsum("aij,jk->aik", stack, arr) % p
    return np.all(left == right, axis=(1, 2))
