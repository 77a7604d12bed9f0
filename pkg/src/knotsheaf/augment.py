"""Augmentations of the framed cord algebra.

An augmentation is stored as ``(mu, lambda, R)`` where ``R[i][j]`` is the value
on the cord ``[g_i g_j^-1]``.  Values on arbitrary cords ``[w]`` are computed
through the ambient meridian matrices ``M_t = Id - R_t e_t^T`` acting on the
columns of ``R``: ``eps([w])`` is the first coordinate of ``M_w R_1``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence

from .diagram import WirtingerPresentation, presentation_from_reference
from .errors import ConsistencyError, NotKCHError, NotSimpleError, VerificationError
from .exactalg import (
    Field,
    Matrix,
    Scalar,
    column_basis_indices,
    field_from_json,
    field_to_json,
    inverse,
    matrix_from_json,
    matrix_to_json,
    rank_one_update,
    solve_matrix,
)
from .reps import (
    RepFamily,
    Representation,
    classify_meridian,
    classify_rep,
    longitude_image,
    trivial_rep,
)
from .sheaf import SheafData, cone_rank, is_simple, pushforward, skyscraper
from .words import GroupWord, random_word


@dataclass(frozen=True, eq=False)
class Augmentation:
    presentation: WirtingerPresentation
    field: Field
    mu: Scalar
    lam: Scalar
    R: Matrix

    def __post_init__(self):
        N = self.presentation.n_generators
        if self.R.shape != (N, N):
            raise ValueError(f"R must be {N}x{N}, got {self.R.shape}")
        if self.R.field != self.field:
            raise ValueError("R is over a different field")
        object.__setattr__(self, "mu", self.field(self.mu))
        object.__setattr__(self, "lam", self.field(self.lam))
        if not self.mu or not self.lam:
            raise ValueError("mu and lambda must be nonzero")

    @property
    def columns(self) -> list[tuple]:
        return self.R.columns()

    def key(self) -> tuple:
        return (self.mu, self.lam, self.R)

    def __eq__(self, other):
        if not isinstance(other, Augmentation):
            return NotImplemented
        return self.presentation == other.presentation and self.field == other.field and self.key() == other.key()

    def __hash__(self):
        return hash((self.presentation, self.field) + self.key())

    def ambient(self, t: int) -> Matrix:
        """``M_t`` for the 1-based generator index ``t``."""
        return rank_one_update(t - 1, self.R.column(t - 1), self.field)

    def ambient_inverse(self, t: int) -> Matrix:
        col = tuple(-x / self.mu for x in self.R.column(t - 1))
        return rank_one_update(t - 1, col, self.field)


def act(aug: Augmentation, w: GroupWord, v: Sequence) -> tuple:
    """``M_w v``, applying the letters right to left as rank-one updates."""
    v = list(v)
    cols = aug.columns
    inv_mu = aug.field.one / aug.mu
    for g, e in reversed(w.letters):
        col = cols[g - 1]
        c = v[g - 1] if e > 0 else -v[g - 1] * inv_mu
        if c:
            v = [x - c * y for x, y in zip(v, col)]
    return tuple(v)


def evaluate(aug: Augmentation, w: GroupWord) -> Scalar:
    """Value of the augmentation on the cord ``[w]``."""
    return act(aug, w, aug.R.column(0))[0]


@dataclass(frozen=True)
class Verdict:
    ok: bool
    condition: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "condition": self.condition, "detail": self.detail}


def diagnose(aug: Augmentation) -> list[Verdict]:
    """All failed conditions, in the order diagonal, relation, conjugator, longitude."""
    field, N = aug.field, aug.presentation.n_generators
    one = field.one
    diag = one - aug.mu
    out = []
    for i in range(N):
        if aug.R[i, i] != diag:
            out.append(Verdict(False, "diagonal", f"R[{i + 1},{i + 1}] = {aug.R[i, i]} but 1 - mu = {diag}"))
            break
    if aug.R.is_zero():
        if aug.mu != one:
            out.append(Verdict(False, "zero-R", "R = 0 requires mu = 1"))
        return out
    cols = aug.columns
    for k, (lhs, rhs) in enumerate(aug.presentation.relations, start=1):
        bad = next((j for j, col in enumerate(cols, start=1) if act(aug, lhs, col) != act(aug, rhs, col)), None)
        if bad is not None:
            out.append(Verdict(False, "relation", f"relation {k} ({lhs} = {rhs}) fails on column {bad}"))
            break
    r1 = cols[0]
    for t, g in enumerate(aug.presentation.conjugators, start=1):
        if act(aug, g.inverse(), r1) != cols[t - 1]:
            out.append(Verdict(False, "conjugator", f"M(g_{t}^-1) R_1 != R_{t}"))
            break
    lam_r1 = tuple(aug.lam * x for x in r1)
    if act(aug, aug.presentation.longitude, r1) != lam_r1:
        out.append(Verdict(False, "longitude", "M(l) R_1 != lambda R_1"))
    return out


def verify(aug: Augmentation) -> Verdict:
    """First failed condition, or a passing verdict."""
    failures = diagnose(aug)
    return failures[0] if failures else Verdict(True)


def longitude_eigenvalue(aug: Augmentation) -> Scalar | None:
    """``lambda`` with ``M_l R_1 = lambda R_1`` if ``R_1`` is an eigenvector, else ``None``."""
    r1 = aug.R.column(0)
    if not any(r1):
        return None
    image = act(aug, aug.presentation.longitude, r1)
    k = next(i for i, x in enumerate(r1) if x)
    lam = image[k] / r1[k]
    return lam if all(a == lam * b for a, b in zip(image, r1)) else None


@dataclass
class SuiteReport:
    samples: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def relation_suite(aug: Augmentation, rng: random.Random, samples: int = 200, max_length: int = 6) -> SuiteReport:
    """Test normalization, meridian, longitude and skein relations on random words."""
    N = aug.presentation.n_generators
    m = GroupWord.gen(1)
    ell = aug.presentation.longitude
    ev = lambda w: evaluate(aug, w)  # noqa: E731
    failures = []
    if ev(GroupWord()) != aug.field.one - aug.mu:
        failures.append("normalization: eps([e]) != 1 - mu")
    for _ in range(samples):
        g = random_word(N, max_length, rng)
        g1 = random_word(N, max_length, rng)
        g2 = random_word(N, max_length, rng)
        eg = ev(g)
        if ev(m * g) != aug.mu * eg or ev(g * m) != aug.mu * eg:
            failures.append(f"meridian relation fails at {g}")
        if ev(ell * g) != aug.lam * eg or ev(g * ell) != aug.lam * eg:
            failures.append(f"longitude relation fails at {g}")
        if ev(g1 * g2) - ev(g1 * m * g2) != ev(g1) * ev(g2):
            failures.append(f"skein relation fails at ({g1}, {g2})")
    return SuiteReport(samples, failures)


def _cord_matrix(rep: Representation, cord) -> Matrix:
    pres = rep.presentation
    N = pres.n_generators
    field = rep.field
    g = [rep(w) for w in pres.conjugators]
    g_inv = [inverse(x) for x in g]
    return Matrix(field, [[cord(g[i] @ g_inv[j]) for j in range(N)] for i in range(N)], N)


def from_sheaf(s: SheafData) -> Augmentation:
    """Trace formulas: ``mu = tr rho(m) - dim V + 1``, ``lambda = tr rho(l) - tr A``."""
    if not is_simple(s):
        raise NotSimpleError(f"cone of T has rank {cone_rank(s)}, not 1")
    rep = s.complement_rep
    field = rep.field
    defect = rep.identity - rep.images[0]
    mu = rep.images[0].trace() - field(rep.dim) + field.one
    lam = longitude_image(rep).trace() - s.knot_monodromy.trace()
    R = _cord_matrix(rep, lambda M: (defect @ M).trace())
    return Augmentation(rep.presentation, field, mu, lam, R)


def from_kch_rep(rep: Representation) -> Augmentation:
    """Cord values ``(1 - mu0) (P^-1 rho(g) P)_11`` in the eigenbasis ``P`` of the meridian.

    The result is compared entry by entry with the trace computation of the
    pushforward sheaf.
    """
    cls = classify_rep(rep)
    if cls.family is not RepFamily.KCH:
        raise NotKCHError(f"representation is {cls.family.value}, not KCH")
    mc = classify_meridian(rep.images[0])
    P = mc.basis_change
    Pinv = inverse(P)
    mu0 = mc.mu0
    c = rep.field.one - mu0
    lam = (Pinv @ longitude_image(rep) @ P)[0, 0]
    R = _cord_matrix(rep, lambda M: c * (Pinv @ M @ P)[0, 0])
    aug = Augmentation(rep.presentation, rep.field, mu0, lam, R)
    other = from_sheaf(pushforward(rep))
    if aug != other:
        raise ConsistencyError("eigenbasis and trace computations of the augmentation disagree")
    return aug


def lift(aug: Augmentation, order: Sequence[int] | None = None) -> Representation:
    """Representation on the column span of ``R``.

    Basis columns are chosen greedily in ``order`` (0-based, default ascending,
    which puts ``R_1`` first).  ``R = 0`` gives the 0-dimensional representation.
    """
    verdict = verify(aug)
    if not verdict:
        raise VerificationError(f"{verdict.condition}: {verdict.detail}")
    pres, field = aug.presentation, aug.field
    if aug.R.is_zero():
        return trivial_rep(pres, field, 0)
    idx = column_basis_indices(aug.R, order)
    B = aug.R.submatrix(range(aug.R.nrows), idx)
    images = []
    for t in range(1, pres.n_generators + 1):
        X = solve_matrix(B, aug.ambient(t) @ B)
        if X is None:
            raise ConsistencyError(f"M_{t} does not preserve the column span of R")
        images.append(X)
    return Representation(pres, field, len(idx), tuple(images))


def realize(aug: Augmentation) -> SheafData:
    """A simple sheaf whose augmentation is ``aug``."""
    if aug.R.is_zero():
        verdict = verify(aug)
        if not verdict:
            raise VerificationError(f"{verdict.condition}: {verdict.detail}")
        return skyscraper(aug.presentation, -aug.lam, aug.field)
    return pushforward(lift(aug))


class Profile(str, enum.Enum):
    NONVANISHING_E = "NonvanishingE"
    UNIPOTENT = "UnipotentProfile"
    ALL_CORDS_VANISH = "AllCordsVanish"


def degenerate_profile(aug: Augmentation) -> Profile:
    if aug.mu != aug.field.one:
        return Profile.NONVANISHING_E
    first_row_zero = not any(aug.R.row(0))
    first_col_zero = not any(aug.R.column(0))
    if first_row_zero != first_col_zero or (first_row_zero and not aug.R.is_zero()):
        raise ConsistencyError("R vanishes on its first row or column but not entirely")
    return Profile.ALL_CORDS_VANISH if first_row_zero else Profile.UNIPOTENT


def aug_to_json(aug: Augmentation) -> dict:
    doc = dict(aug.presentation.reference())
    doc.update(field_to_json(aug.field))
    doc["mu"] = aug.field.format(aug.mu)
    doc["lambda"] = aug.field.format(aug.lam)
    doc["R"] = matrix_to_json(aug.R)
    return doc


def aug_from_json(doc: dict, presentation: WirtingerPresentation | None = None) -> Augmentation:
    pres = presentation or presentation_from_reference(doc)
    R = matrix_from_json(doc["R"])
    field = field_from_json(doc) if "field" in doc else R.field
    return Augmentation(pres, field, field.parse(str(doc["mu"])), field.parse(str(doc["lambda"])), R)
