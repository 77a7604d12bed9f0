"""Representations of knot groups by exact matrices.

A :class:`Representation` assigns an invertible matrix to every Wirtinger
generator.  Dimension 0 is allowed throughout (the representation on the zero
space).  Relation checking is a separate step, so relation-violating tuples
can be built and rejected by :func:`check_relations`.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterator, Sequence

from .diagram import WirtingerPresentation, presentation_from_reference
from .errors import DimensionError, NotInvariantError
from .exactalg import (
    Field,
    Matrix,
    PrimeField,
    Scalar,
    field_from_json,
    field_to_json,
    fixed_subspace,
    inverse,
    is_invertible,
    iter_gl,
    kernel_basis,
    matrix_equation_kernel,
    matrix_from_json,
    matrix_to_json,
    rank,
    search_invertible,
    solve_matrix,
    span_basis,
)
from .words import GroupWord


@dataclass(frozen=True, eq=False)
class Representation:
    presentation: WirtingerPresentation
    field: Field
    dim: int
    images: tuple[Matrix, ...]

    def __post_init__(self):
        if len(self.images) != self.presentation.n_generators:
            raise DimensionError(
                f"{len(self.images)} images for {self.presentation.n_generators} generators"
            )
        for A in self.images:
            if A.field != self.field:
                raise DimensionError(f"image over {A.field!r}, representation over {self.field!r}")
            if A.shape != (self.dim, self.dim):
                raise DimensionError(f"image of shape {A.shape} in a {self.dim}-dimensional representation")
            if not is_invertible(A):
                raise ValueError("generator images must be invertible")

    @classmethod
    def from_matrices(cls, presentation: WirtingerPresentation, images: Sequence[Matrix]) -> "Representation":
        if not images:
            raise ValueError("need at least one image")
        return cls(presentation, images[0].field, images[0].nrows, tuple(images))

    @cached_property
    def inverses(self) -> tuple[Matrix, ...]:
        return tuple(inverse(A) for A in self.images)

    @cached_property
    def identity(self) -> Matrix:
        return Matrix.identity(self.field, self.dim)

    def __call__(self, w: GroupWord) -> Matrix:
        return evaluate(self, w)

    def __eq__(self, other):
        if not isinstance(other, Representation):
            return NotImplemented
        return (
            self.presentation == other.presentation
            and self.field == other.field
            and self.dim == other.dim
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.presentation, self.field, self.dim, self.images))


def evaluate(rep: Representation, w: GroupWord) -> Matrix:
    """Ordered product of generator images (inverses for negative letters)."""
    out = rep.identity
    for g, e in w.letters:
        if g > rep.presentation.n_generators:
            raise IndexError(f"generator m{g} out of range")
        out = out @ (rep.images[g - 1] if e > 0 else rep.inverses[g - 1])
    return out


def check_relations(rep: Representation) -> bool:
    return all(evaluate(rep, lhs) == evaluate(rep, rhs) for lhs, rhs in rep.presentation.relations)


def longitude_image(rep: Representation) -> Matrix:
    return evaluate(rep, rep.presentation.longitude)


class MeridianTag(str, enum.Enum):
    IDENTITY = "IdentityAction"
    KCH = "KCH"
    UNIPOTENT = "Unipotent"
    OTHER = "Other"


@dataclass(frozen=True)
class MeridianClass:
    """Type of a meridian matrix.

    ``basis_change`` is a matrix ``P`` whose columns form the normal-form basis:
    ``P^-1 A P`` equals ``I + (mu0 - 1) E11`` (KCH) or ``I + E12`` (unipotent).
    """

    tag: MeridianTag
    mu0: Scalar | None = None
    basis_change: Matrix | None = None


def classify_meridian(A: Matrix) -> MeridianClass:
    if not A.is_square:
        raise DimensionError("meridian matrix must be square")
    if not is_invertible(A):
        raise ValueError("meridian matrix must be invertible")
    n = A.nrows
    field = A.field
    ident = Matrix.identity(field, n)
    D = A - ident
    r = rank(D)
    if r == 0:
        return MeridianClass(MeridianTag.IDENTITY, None, ident)
    if r > 1:
        return MeridianClass(MeridianTag.OTHER)
    fixed = fixed_subspace(A)
    # a column of A - I spans im(A - I)
    image_vec = next(c for c in D.columns() if any(c))
    if rank(D @ D) == r:
        # diagonalizable: im(A - I) is the non-trivial eigenline
        Av = A.apply(image_vec)
        k = next(i for i, x in enumerate(image_vec) if x)
        mu0 = Av[k] / image_vec[k]
        P = Matrix.from_columns(field, [image_vec] + fixed, n)
        return MeridianClass(MeridianTag.KCH, mu0, P)
    # (A - I)^2 = 0: pick v2 outside the fixed space, v1 = (A - I) v2
    j = next(i for i in range(n) if any(D.column(i)))
    v2 = tuple(field.one if k == j else field.zero for k in range(n))
    v1 = D.apply(v2)
    fixed_completion = _complete_in_subspace([v1], fixed, field, n)
    P = Matrix.from_columns(field, [v1, v2] + fixed_completion, n)
    return MeridianClass(MeridianTag.UNIPOTENT, None, P)


def _complete_in_subspace(start, subspace_basis, field, n):
    chosen = list(start)
    for v in subspace_basis:
        if len(span_basis(chosen + [v], field, n)) > len(chosen):
            chosen.append(v)
    return chosen[len(start):]


def meridian_defect(rep: Representation) -> list[tuple]:
    """Reduced basis of the sum of the images ``im(rho(m_i) - Id)``."""
    vecs = []
    for A in rep.images:
        vecs.extend(c for c in (A - rep.identity).columns() if any(c))
    return span_basis(vecs, rep.field, rep.dim)


class RepFamily(str, enum.Enum):
    TRIVIAL = "TrivialOnAllMeridians"
    KCH = "KCH"
    UNIPOTENT = "UnipotentKCH"
    OTHER = "Other"


@dataclass(frozen=True)
class RepClass:
    family: RepFamily
    mu0: Scalar | None = None
    irreducible: bool | None = None

    def to_json(self) -> dict:
        doc: dict = {"family": self.family.value, "irreducible": self.irreducible}
        if self.mu0 is not None:
            doc["mu0"] = str(self.mu0)
        return doc


def classify_rep(rep: Representation) -> RepClass:
    """Family from the preferred meridian; irreducibility via the defect subspace."""
    if rep.dim == 0:
        return RepClass(RepFamily.TRIVIAL)
    mc = classify_meridian(rep.images[0])
    if mc.tag is MeridianTag.IDENTITY:
        return RepClass(RepFamily.TRIVIAL)
    if mc.tag is MeridianTag.OTHER:
        return RepClass(RepFamily.OTHER)
    irreducible = len(meridian_defect(rep)) == rep.dim
    if mc.tag is MeridianTag.KCH:
        return RepClass(RepFamily.KCH, mc.mu0, irreducible)
    return RepClass(RepFamily.UNIPOTENT, None, irreducible)


def restrict(rep: Representation, basis: Sequence[Sequence]) -> Representation:
    """Induced representation on an invariant subspace, in the given basis."""
    B = Matrix.from_columns(rep.field, basis, rep.dim)
    if rank(B) != B.ncols:
        raise ValueError("subspace basis is not linearly independent")
    images = []
    for A in rep.images:
        X = solve_matrix(B, A @ B)
        if X is None:
            raise NotInvariantError("subspace is not invariant under every generator")
        images.append(X)
    return Representation(rep.presentation, rep.field, len(basis), tuple(images))


def conjugate(rep: Representation, P: Matrix) -> Representation:
    """The representation ``P rho P^-1``."""
    Pinv = inverse(P)
    return Representation(rep.presentation, rep.field, rep.dim, tuple(P @ A @ Pinv for A in rep.images))


def direct_sum(r1: Representation, r2: Representation) -> Representation:
    if r1.presentation != r2.presentation or r1.field != r2.field:
        raise ValueError("direct sum needs a common presentation and field")
    return Representation(
        r1.presentation, r1.field, r1.dim + r2.dim, tuple(a.block_diag(b) for a, b in zip(r1.images, r2.images))
    )


def trivial_rep(presentation: WirtingerPresentation, field: Field, dim: int) -> Representation:
    ident = Matrix.identity(field, dim)
    return Representation(presentation, field, dim, (ident,) * presentation.n_generators)


def abelian_rep(presentation: WirtingerPresentation, mu0: Scalar, field: Field) -> Representation:
    """One-dimensional representation sending every meridian to ``mu0``."""
    A = Matrix(field, [[mu0]])
    return Representation(presentation, field, 1, (A,) * presentation.n_generators)


def intertwiners(r1: Representation, r2: Representation) -> list[Matrix]:
    """Basis of ``{X : X rho1(m_t) = rho2(m_t) X for all t}``."""
    n1, n2 = r1.dim, r2.dim
    I1 = Matrix.identity(r1.field, n1)
    I2 = Matrix.identity(r1.field, n2)
    eqs = [[(I2, 0, A), (-B, 0, I1)] for A, B in zip(r1.images, r2.images)]
    return [blocks[0] for blocks in matrix_equation_kernel(r1.field, [(n2, n1)], eqs)]


def are_isomorphic(
    r1: Representation, r2: Representation, *, rng: random.Random | None = None
) -> bool | None:
    """Whether an invertible intertwiner exists; ``None`` when sampling was inconclusive."""
    if r1.presentation != r2.presentation:
        raise ValueError("representations of different presentations")
    if r1.field != r2.field or r1.dim != r2.dim:
        return False
    if r1.dim == 0:
        return True
    basis = [[X] for X in intertwiners(r1, r2)]
    found, exact = search_invertible(basis, [r1.dim], r1.field, rng=rng)
    if found is not None:
        return True
    return False if exact else None


def cocycle_space(rep: Representation) -> list[tuple[tuple, ...]]:
    """Basis of 1-cocycles ``c`` (one vector per generator) with trivial-quotient extensions.

    ``c(m_t)`` is the top-right column of the extension
    ``[[rho(m_t), c(m_t)], [0, 1]]``; the cocycle condition is imposed on every
    relation via the Fox-calculus recursion ``c(xy) = rho(x) c(y) + c(x)``.
    """
    n, N, field = rep.dim, rep.presentation.n_generators, rep.field
    total = n * N

    def word_cocycle(w: GroupWord, cvec):
        # returns (rho(w), c(w)) for a cocycle given on generators
        M = rep.identity
        acc = tuple(field.zero for _ in range(n))
        for g, e in w.letters:
            cg = cvec[g - 1]
            if e < 0:
                cg = tuple(-x for x in rep.inverses[g - 1].apply(cg))
            acc = tuple(a + b for a, b in zip(acc, M.apply(cg)))
            M = M @ (rep.images[g - 1] if e > 0 else rep.inverses[g - 1])
        return acc

    rows = []
    for lhs, rhs in rep.presentation.relations:
        cols = []
        for k in range(total):
            unit = [tuple(field.one if (t * n + i) == k else field.zero for i in range(n)) for t in range(N)]
            l = word_cocycle(lhs, unit)
            r = word_cocycle(rhs, unit)
            cols.append(tuple(a - b for a, b in zip(l, r)))
        for i in range(n):
            rows.append([cols[k][i] for k in range(total)])
    if rows:
        vecs = kernel_basis(Matrix(field, rows, total))
    else:
        vecs = [tuple(field.one if j == k else field.zero for j in range(total)) for k in range(total)]
    return [tuple(tuple(v[t * n:(t + 1) * n]) for t in range(N)) for v in vecs]


def extension_by_trivial(rep: Representation, cocycle: Sequence[tuple]) -> Representation:
    """The ``(dim + 1)``-dimensional extension ``0 -> rep -> E -> trivial -> 0`` of a cocycle."""
    field, n = rep.field, rep.dim
    images = []
    for A, c in zip(rep.images, cocycle):
        rows = [list(A.row(i)) + [c[i]] for i in range(n)] + [[field.zero] * n + [field.one]]
        images.append(Matrix(field, rows, n + 1))
    return Representation(rep.presentation, field, n + 1, tuple(images))


def all_representations(
    presentation: WirtingerPresentation, field: PrimeField, dim: int
) -> Iterator[Representation]:
    """Every relation-satisfying representation of dimension ``dim`` (desk scale).

    The preferred meridian ranges over ``GL(dim)``; the other meridians are
    branched over its conjugacy class and propagated through the relations.
    """
    if dim == 0:
        yield trivial_rep(presentation, field, 0)
        return
    gl = list(iter_gl(field, dim))
    inv = {A: inverse(A) for A in gl}
    N = presentation.n_generators
    rels = []
    for lhs, rhs in presentation.relations:
        b = lhs.letters[0][0]
        (o, s), (a, _), _ = rhs.letters
        rels.append((b, o, s, a))

    def power(A, s):
        return A if s > 0 else inv[A]

    classes: dict[Matrix, list[Matrix]] = {}
    for A in gl:
        if A not in classes:
            cls = sorted({P @ A @ inv[P] for P in gl}, key=_entry_key)
            for B in cls:
                classes[B] = cls
        yield from _backtrack(presentation, field, dim, N, rels, [A] + [None] * (N - 1), classes[A], power)


def _entry_key(M: Matrix) -> tuple:
    return tuple(int(x) for r in M.rows() for x in r)


def _backtrack(presentation, field, dim, N, rels, assign, cls, power):
    assign = list(assign)
    changed = True
    while changed:
        changed = False
        for b, o, s, a in rels:
            Mo, Ma, Mb = assign[o - 1], assign[a - 1], assign[b - 1]
            if Mo is not None and Ma is not None:
                val = power(Mo, s) @ Ma @ power(Mo, -s)
                if Mb is None:
                    assign[b - 1] = val
                    changed = True
                elif Mb != val:
                    return
            elif Mo is not None and Mb is not None and Ma is None:
                assign[a - 1] = power(Mo, -s) @ Mb @ power(Mo, s)
                changed = True
    if all(x is not None for x in assign):
        yield Representation(presentation, field, dim, tuple(assign))
        return
    k = assign.index(None)
    for M in cls:
        trial = list(assign)
        trial[k] = M
        yield from _backtrack(presentation, field, dim, N, rels, trial, cls, power)


def rep_to_json(rep: Representation) -> dict:
    doc = dict(rep.presentation.reference())
    doc.update(field_to_json(rep.field))
    doc["dim"] = rep.dim
    doc["images"] = [matrix_to_json(A) for A in rep.images]
    return doc


def rep_from_json(doc: dict, presentation: WirtingerPresentation | None = None) -> Representation:
    pres = presentation or presentation_from_reference(doc)
    field = field_from_json(doc) if "field" in doc else None
    images = tuple(matrix_from_json(m) for m in doc["images"])
    if field is None:
        if not images:
            raise ValueError("representation JSON needs a field")
        field = images[0].field
    dim = int(doc.get("dim", images[0].nrows if images else 0))
    if not images and dim == 0:
        images = (Matrix.zeros(field, 0, 0),) * pres.n_generators
    return Representation(pres, field, dim, images)


def trefoil_example() -> Representation:
    """The unipotent KCH representation of the table trefoil used throughout the tests."""
    from .diagram import knot
    from .exactalg import QQ

    images = [[[1, 1], [0, 1]], [[1, 0], [-1, 1]], [[2, 1], [-1, 0]]]
    return Representation.from_matrices(knot("trefoil"), [Matrix(QQ, m) for m in images])
