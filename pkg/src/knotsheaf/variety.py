"""Exhaustive enumeration of augmentations over prime fields.

Candidates are ``(mu, off-diagonal entries of R)`` with the diagonal fixed to
``1 - mu``; ``lambda`` is read off the longitude action on ``R_1``.  A
vectorized numpy filter discards failing candidates in batches and every
survivor is then re-checked with the exact :func:`knotsheaf.augment.verify`.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .augment import Augmentation, Profile, aug_to_json, degenerate_profile, lift, verify
from .diagram import WirtingerPresentation
from .errors import BudgetExceeded, ConsistencyError
from .exactalg import GF, MAX_PRIME, Matrix, is_prime
from .reps import RepFamily, Representation, classify_rep
from .words import GroupWord

DEFAULT_BUDGET = 10**8
BATCH = 1 << 16


def default_budget() -> int:
    env = os.environ.get("KNOTSHEAF_BUDGET")
    return int(float(env)) if env else DEFAULT_BUDGET


@dataclass(frozen=True, order=True)
class AugPoint:
    lam: int
    mu: int

    def __post_init__(self):
        if self.lam == 0 or self.mu == 0:
            raise ValueError("augmentation-variety points have nonzero coordinates")


@dataclass
class EnumerationReport:
    prime: int
    knot: dict
    augmentations: list[Augmentation]
    points: list[AugPoint]
    multiplicity: dict[AugPoint, int]
    candidates: int
    elapsed: float = 0.0

    @property
    def count(self) -> int:
        return len(self.augmentations)

    def without(self, point: AugPoint) -> "EnumerationReport":
        """Copy with one point removed (for mutation tests)."""
        keep = [a for a in self.augmentations if _point(a) != point]
        mult = {q: k for q, k in self.multiplicity.items() if q != point}
        return EnumerationReport(
            self.prime, self.knot, keep, [q for q in self.points if q != point], mult, self.candidates, self.elapsed
        )

    def to_json(self, *, include_augmentations: bool = False, include_timing: bool = False) -> dict:
        doc = {
            "prime": self.prime,
            "knot": self.knot,
            "count": self.count,
            "candidates": self.candidates,
            "points": [
                {"lambda": q.lam, "mu": q.mu, "multiplicity": self.multiplicity[q]} for q in self.points
            ],
        }
        if include_augmentations:
            doc["augmentations"] = [aug_to_json(a) for a in self.augmentations]
        if include_timing:
            doc["elapsed_seconds"] = self.elapsed
        return doc

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["lambda", "mu", "multiplicity"])
        for q in self.points:
            writer.writerow([q.lam, q.mu, self.multiplicity[q]])
        return buf.getvalue()


def _point(aug: Augmentation) -> AugPoint:
    return AugPoint(int(aug.lam), int(aug.mu))


def candidate_count(presentation: WirtingerPresentation, p: int) -> int:
    N = presentation.n_generators
    return (p - 1) * p ** (N * N - N)


def _modinv(x: np.ndarray, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _act(word: GroupWord, v: np.ndarray, R: np.ndarray, inv_mu: np.ndarray, p: int) -> np.ndarray:
    # v: (B, N) vectors, R: (B, N, N); returns M_w v
    v = v.copy()
    for g, e in reversed(word.letters):
        c = v[:, g - 1]
        if e < 0:
            c = (p - c) * inv_mu % p
        v = (v - c[:, None] * R[:, :, g - 1]) % p
    return v


def _filter_range(pres: WirtingerPresentation, p: int, start: int, stop: int) -> list[tuple[int, int, tuple]]:
    """Survivors ``(mu, lambda, flat R)`` among candidate indices ``[start, stop)``."""
    N = pres.n_generators
    K = N * N - N
    off_positions = [(i, j) for i in range(N) for j in range(N) if i != j]
    pK = p**K
    out = []
    for lo in range(start, stop, BATCH):
        hi = min(stop, lo + BATCH)
        idx = np.arange(lo, hi, dtype=np.int64)
        mu = 1 + idx // pK
        rest = idx % pK
        R = np.zeros((hi - lo, N, N), dtype=np.int64)
        for i in range(N):
            R[:, i, i] = (1 - mu) % p
        for (i, j) in reversed(off_positions):
            R[:, i, j] = rest % p
            rest //= p
        zero = np.all(R == 0, axis=(1, 2))
        keep = ~zero
        R, mu = R[keep], mu[keep]
        if not len(mu):
            continue
        inv_mu = _modinv(mu, p)
        r1 = R[:, :, 0]
        ok = np.ones(len(mu), dtype=bool)
        for t, g in enumerate(pres.conjugators):
            ok &= np.all(_act(g.inverse(), r1, R, inv_mu, p) == R[:, :, t], axis=1)
        R, mu, inv_mu, r1 = R[ok], mu[ok], inv_mu[ok], r1[ok]
        if not len(mu):
            continue
        image = _act(pres.longitude, r1, R, inv_mu, p)
        nz = r1 != 0
        has = nz.any(axis=1)
        k = np.argmax(nz, axis=1)
        rows = np.arange(len(mu))
        lam = image[rows, k] * _modinv(r1[rows, k], p) % p
        ok = has & np.all(image == lam[:, None] * r1 % p, axis=1)
        for lhs, rhs in pres.relations:
            for j in range(N):
                col = R[:, :, j]
                ok &= np.all(_act(lhs, col, R, inv_mu, p) == _act(rhs, col, R, inv_mu, p), axis=1)
        for s in np.nonzero(ok)[0]:
            out.append((int(mu[s]), int(lam[s]), tuple(int(x) for x in R[s].ravel())))
    return out


def enumerate_augmentations(
    pres: WirtingerPresentation,
    p: int,
    *,
    threads: int = 1,
    budget: int | None = None,
) -> EnumerationReport:
    if not is_prime(p) or p >= MAX_PRIME:
        raise ValueError(f"{p} is not a prime below 2^31")
    budget = default_budget() if budget is None else budget
    total = candidate_count(pres, p)
    if total > budget:
        raise BudgetExceeded(f"{total} candidates exceed the budget of {budget}")
    t0 = time.perf_counter()
    field = GF(p)
    N = pres.n_generators
    threads = max(1, threads)
    step = -(-total // threads)
    ranges = [(a, min(total, a + step)) for a in range(0, total, step)]
    if threads == 1 or len(ranges) == 1:
        chunks = [_filter_range(pres, p, a, b) for a, b in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda r: _filter_range(pres, p, *r), ranges))
    augs = []
    for mu, lam, flat in sorted(x for chunk in chunks for x in chunk):
        R = Matrix(field, [flat[i * N:(i + 1) * N] for i in range(N)], N)
        aug = Augmentation(pres, field, mu, lam, R)
        verdict = verify(aug)
        if not verdict:
            raise ConsistencyError(f"batch filter accepted a candidate that fails {verdict.condition}")
        augs.append(aug)
    # R = 0 forces mu = 1 and leaves lambda free
    zero = Matrix.zeros(field, N, N)
    augs.extend(Augmentation(pres, field, 1, lam, zero) for lam in range(1, p))
    augs.sort(key=_sort_key)
    mult: dict[AugPoint, int] = {}
    for a in augs:
        q = _point(a)
        mult[q] = mult.get(q, 0) + 1
    elapsed = time.perf_counter() - t0
    return EnumerationReport(p, pres.reference(), augs, sorted(mult), mult, total, elapsed)


def _sort_key(aug: Augmentation) -> tuple:
    return (int(aug.lam), int(aug.mu), tuple(int(x) for r in aug.R.rows() for x in r))


def enumerate_exact(pres: WirtingerPresentation, p: int) -> list[Augmentation]:
    """Pure-Python enumeration through :func:`verify` (slow reference route)."""
    import itertools

    field = GF(p)
    N = pres.n_generators
    off = [(i, j) for i in range(N) for j in range(N) if i != j]
    out = []
    for mu in range(1, p):
        for vals in itertools.product(range(p), repeat=len(off)):
            rows = [[(1 - mu) % p if i == j else 0 for j in range(N)] for i in range(N)]
            for (i, j), v in zip(off, vals):
                rows[i][j] = v
            R = Matrix(field, rows, N)
            lams = range(1, p) if R.is_zero() else None
            if lams is None:
                from .augment import longitude_eigenvalue

                lam = longitude_eigenvalue(Augmentation(pres, field, mu, 1, R))
                if lam is None:
                    continue
                lams = [int(lam)]
            for lam in lams:
                aug = Augmentation(pres, field, mu, lam, R)
                if verify(aug):
                    out.append(aug)
    out.sort(key=_sort_key)
    return out


def universal_locus_check(report: EnumerationReport) -> bool:
    pts = set(report.points)
    p = report.prime
    return all(AugPoint(1, m) in pts for m in range(1, p)) and all(AugPoint(l, 1) in pts for l in range(1, p))


EXPECTED_LIFT = {
    Profile.NONVANISHING_E: "irreducible KCH",
    Profile.UNIPOTENT: "irreducible UnipotentKCH",
    Profile.ALL_CORDS_VANISH: "zero representation",
}


def _lift_label(rep: Representation) -> str:
    if rep.dim == 0:
        return "zero representation"
    cls = classify_rep(rep)
    prefix = "irreducible" if cls.irreducible else "reducible"
    return f"{prefix} {cls.family.value}" if cls.family in (RepFamily.KCH, RepFamily.UNIPOTENT) else cls.family.value


@dataclass
class Census:
    rows: dict[str, int] = dc_field(default_factory=dict)
    mismatches: list[dict] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    @property
    def total(self) -> int:
        return sum(self.rows.values())

    def to_json(self) -> dict:
        return {
            "rows": [
                {"profile": prof.value, "lift": EXPECTED_LIFT[prof], "count": self.rows[prof.value]}
                for prof in Profile
                if prof.value in self.rows
            ],
            "total": self.total,
            "mismatches": self.mismatches,
        }


def census(report: EnumerationReport, lifts: Sequence[Representation] | None = None) -> Census:
    if lifts is None:
        lifts = [lift(a) for a in report.augmentations]
    if len(lifts) != len(report.augmentations):
        raise ValueError("one lift per enumerated augmentation is required")
    table = Census()
    for aug, rep in zip(report.augmentations, lifts):
        prof = degenerate_profile(aug)
        table.rows[prof.value] = table.rows.get(prof.value, 0) + 1
        got = _lift_label(rep)
        if got != EXPECTED_LIFT[prof]:
            table.mismatches.append(
                {"profile": prof.value, "lift": got, "augmentation": aug_to_json(aug)}
            )
    return table
