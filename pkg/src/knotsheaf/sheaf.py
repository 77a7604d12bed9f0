"""Sheaves on the ambient space with singular support in the knot conormal.

Such a sheaf is modelled by linear data: a representation ``rho`` of the knot
group on ``V`` (the restriction to the complement), a monodromy ``A`` on the
stalk space ``W`` along the knot, and a map ``T: W -> V``.  The gluing
conditions are::

    rho(longitude) T = T A        (longitude compatibility)
    (Id - rho(m1)) T = 0          (the meridian fixes im T)

The sheaf is simple when ``dim ker T + dim coker T == 1``.  Simple sheaves fall
into five isomorphism types, see :func:`classify`.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence

from .diagram import WirtingerPresentation
from .errors import ConsistencyError, InvalidSheafError, NotSimpleError
from .exactalg import (
    Field,
    Matrix,
    Scalar,
    extend_to_basis,
    field_of,
    fixed_subspace,
    inverse,
    is_invertible,
    kernel_basis,
    matrix_equation_kernel,
    matrix_from_json,
    matrix_to_json,
    rank,
    search_invertible,
    solve_matrix,
)
from .reps import (
    MeridianTag,
    Representation,
    classify_meridian,
    check_relations,
    direct_sum,
    longitude_image,
    meridian_defect,
    rep_from_json,
    rep_to_json,
    restrict,
    trivial_rep,
)


@dataclass(frozen=True, eq=False)
class SheafData:
    complement_rep: Representation
    knot_monodromy: Matrix
    T: Matrix

    def __post_init__(self):
        rep, A, T = self.complement_rep, self.knot_monodromy, self.T
        if A.field != rep.field or T.field != rep.field:
            raise InvalidSheafError("sheaf data over mixed fields")
        if not A.is_square or not is_invertible(A):
            raise InvalidSheafError("knot monodromy must be square and invertible")
        if T.shape != (rep.dim, A.nrows):
            raise InvalidSheafError(f"T has shape {T.shape}, expected {(rep.dim, A.nrows)}")
        if not check_relations(rep):
            raise InvalidSheafError("complement representation violates a Wirtinger relation")
        if longitude_image(rep) @ T != T @ A:
            raise InvalidSheafError("longitude compatibility rho(l) T = T A fails")
        if not (rep.images[0] - rep.identity) @ T == Matrix.zeros(rep.field, rep.dim, A.nrows):
            raise InvalidSheafError("the meridian does not fix the image of T")

    @property
    def field(self) -> Field:
        return self.complement_rep.field

    @property
    def presentation(self) -> WirtingerPresentation:
        return self.complement_rep.presentation

    @property
    def dim_v(self) -> int:
        return self.complement_rep.dim

    @property
    def dim_w(self) -> int:
        return self.knot_monodromy.nrows

    def __eq__(self, other):
        if not isinstance(other, SheafData):
            return NotImplemented
        return (
            self.complement_rep == other.complement_rep
            and self.knot_monodromy == other.knot_monodromy
            and self.T == other.T
        )

    def __hash__(self):
        return hash((self.complement_rep, self.knot_monodromy, self.T))


def cone_rank(s: SheafData) -> int:
    r = rank(s.T)
    return (s.dim_w - r) + (s.dim_v - r)


def is_simple(s: SheafData) -> bool:
    return cone_rank(s) == 1


def pushforward(rep: Representation) -> SheafData:
    """``j_*`` of a local system: ``W`` is the meridian-fixed subspace, ``T`` its inclusion."""
    fixed = fixed_subspace(rep.images[0])
    T = Matrix.from_columns(rep.field, fixed, rep.dim)
    A = solve_matrix(T, longitude_image(rep) @ T)
    if A is None:
        raise ConsistencyError("longitude does not preserve the meridian-fixed subspace")
    return SheafData(rep, A, T)


def skyscraper(presentation: WirtingerPresentation, alpha: Scalar, field: Field | None = None) -> SheafData:
    """Rank-one local system on the knot with monodromy ``alpha`` (``V = 0``)."""
    field = field or field_of(alpha)
    alpha = field(alpha)
    if not alpha:
        raise ValueError("skyscraper monodromy must be nonzero")
    return SheafData(trivial_rep(presentation, field, 0), Matrix(field, [[alpha]]), Matrix.zeros(field, 0, 1))


def extend_by_zero(rep: Representation) -> SheafData:
    """``j_!`` of a local system: ``W = 0``."""
    return SheafData(rep, Matrix.zeros(rep.field, 0, 0), Matrix.zeros(rep.field, rep.dim, 0))


def local_system(presentation: WirtingerPresentation, field: Field, dim: int) -> SheafData:
    """Constant sheaf of rank ``dim``: trivial ``rho``, ``W = V`` and ``T = Id``."""
    return SheafData(trivial_rep(presentation, field, dim), Matrix.identity(field, dim), Matrix.identity(field, dim))


def direct_sum_sheaves(s1: SheafData, s2: SheafData) -> SheafData:
    return SheafData(
        direct_sum(s1.complement_rep, s2.complement_rep),
        s1.knot_monodromy.block_diag(s2.knot_monodromy),
        s1.T.block_diag(s2.T),
    )


def transform(s: SheafData, X: Matrix, Y: Matrix) -> SheafData:
    """The isomorphic data obtained by changing bases with ``X`` on ``V`` and ``Y`` on ``W``."""
    Xi, Yi = inverse(X), inverse(Y)
    rep = s.complement_rep
    new_rep = Representation(rep.presentation, rep.field, rep.dim, tuple(X @ M @ Xi for M in rep.images))
    return SheafData(new_rep, Y @ s.knot_monodromy @ Yi, X @ s.T @ Yi)


class SheafTag(str, enum.Enum):
    CASE1 = "Case1_JShriekConstant"
    CASE2 = "Case2_KCHPushforward"
    CASE3 = "Case3_UnipotentPushforward"
    CASE4 = "Case4_Skyscraper"
    CASE5 = "Case5_NontrivialKnotExtension"


@dataclass(frozen=True, eq=False)
class SheafClass:
    """Isomorphism type of a simple sheaf with an explicit certificate.

    ``normal_form`` is the representative of the type and ``(X, Y)`` is an
    isomorphism from the input to it: ``X`` acts on ``V`` and ``Y`` on ``W``.
    ``local_rank`` is the rank of the split-off constant local system.
    ``extension`` (case 5 only) holds the coefficients ``c`` with
    ``A w_i = w_i + c_i w_0`` where ``w_0`` spans ``ker T``.
    """

    tag: SheafTag
    normal_form: SheafData
    X: Matrix
    Y: Matrix
    alpha: Scalar | None = None
    rep: Representation | None = None
    local_rank: int = 0
    extension: tuple | None = None

    def reconstruct(self) -> SheafData:
        return self.normal_form

    def certifies(self, s: SheafData) -> bool:
        """Check that ``(X, Y)`` is an isomorphism from ``s`` to the normal form."""
        nf, X, Y = self.normal_form, self.X, self.Y
        if X.shape != (nf.dim_v, s.dim_v) or Y.shape != (nf.dim_w, s.dim_w):
            return False
        if not (is_invertible(X) and is_invertible(Y)):
            return False
        if X @ s.T != nf.T @ Y or Y @ s.knot_monodromy != nf.knot_monodromy @ Y:
            return False
        return all(
            X @ a == b @ X for a, b in zip(s.complement_rep.images, nf.complement_rep.images)
        )

    def to_json(self) -> dict:
        cert: dict = {"local_rank": self.local_rank}
        if self.alpha is not None:
            cert["alpha"] = self.normal_form.field.format(self.alpha)
        if self.rep is not None:
            cert["rep"] = rep_to_json(self.rep)
        if self.extension is not None:
            cert["extension"] = [self.normal_form.field.format(c) for c in self.extension]
        cert["X"] = matrix_to_json(self.X)
        cert["Y"] = matrix_to_json(self.Y)
        return {"tag": self.tag.value, "certificate": cert, "normal_form": sheaf_to_json(self.normal_form)}


def _trivial_normal_form(pres, field, n, A, T) -> SheafData:
    return SheafData(trivial_rep(pres, field, n), A, T)


def classify(s: SheafData) -> SheafClass:
    if not is_simple(s):
        raise NotSimpleError(f"cone of T has rank {cone_rank(s)}, not 1")
    field, pres = s.field, s.presentation
    n, m = s.dim_v, s.dim_w
    rep = s.complement_rep
    if rank(s.T) == m:
        return _classify_injective(s, field, pres, n, m, rep)
    return _classify_surjective(s, field, pres, n, m)


def _classify_injective(s, field, pres, n, m, rep) -> SheafClass:
    codim = n - len(fixed_subspace(rep.images[0]))
    if codim == 0:
        # trivial local system of rank n: split off im T, the rest is j_!
        basis = list(s.T.columns())
        basis = extend_to_basis(basis, field, n)
        X = inverse(Matrix.from_columns(field, basis, n))
        T0 = Matrix.identity(field, m).vstack(Matrix.zeros(field, 1, m))
        nf = _trivial_normal_form(pres, field, n, Matrix.identity(field, m), T0)
        return SheafClass(SheafTag.CASE1, nf, X, Matrix.identity(field, m), local_rank=m)
    if codim != 1:
        raise ConsistencyError("simple sheaf whose meridian moves a subspace of codimension > 1")
    # im T is the whole fixed subspace, so s is the pushforward of rho
    mc = classify_meridian(rep.images[0])
    nf = pushforward(rep)
    Y = solve_matrix(nf.T, s.T)
    if Y is None:
        raise ConsistencyError("image of T is not the meridian-fixed subspace")
    tag = SheafTag.CASE2 if mc.tag is MeridianTag.KCH else SheafTag.CASE3
    return SheafClass(tag, nf, Matrix.identity(field, n), Y, rep=rep)


def _classify_surjective(s, field, pres, n, m) -> SheafClass:
    # rho is trivial here: every meridian fixes im T = V
    T, A = s.T, s.knot_monodromy
    (w0,) = kernel_basis(T)
    k = next(i for i, x in enumerate(w0) if x)
    c0 = A.apply(w0)[k] / w0[k]
    # preimages w_i of the standard basis of V
    pre = solve_matrix(T, Matrix.identity(field, n))
    ws = pre.columns()
    coeff = []
    for w in ws:
        # A w = w + c w0
        diff = tuple(a - b for a, b in zip(A.apply(w), w))
        coeff.append(diff[k] / w0[k])
    one = field.one
    if c0 != one or not any(coeff):
        # diagonalizable: w_i' = w_i + (1 - c0)^-1 c_i w0
        shift = [field.zero] * n if c0 == one else [c / (one - c0) for c in coeff]
        new = [w0] + [tuple(x + sh * y for x, y in zip(w, w0)) for w, sh in zip(ws, shift)]
        A0 = Matrix.diagonal(field, [c0] + [one] * n)
        tag, extension = SheafTag.CASE4, None
    else:
        # unipotent Jordan block: w_s' = w_s / c_s, w_i' = w_i - (c_i / c_s) w_s
        j = next(i for i, c in enumerate(coeff) if c)
        cs = coeff[j]
        ws_new = tuple(x / cs for x in ws[j])
        rest = [
            tuple(x - (c / cs) * y for x, y in zip(w, ws[j])) for i, (w, c) in enumerate(zip(ws, coeff)) if i != j
        ]
        new = [w0, ws_new] + rest
        rows = [[one if a == b else field.zero for b in range(n + 1)] for a in range(n + 1)]
        rows[0][1] = one
        A0 = Matrix(field, rows, n + 1)
        tag, extension = SheafTag.CASE5, tuple(coeff)
    Q = Matrix.from_columns(field, new, m)
    Y = inverse(Q)
    # X sends T(new_{k+1}) to e_k
    X = inverse(T @ Q.submatrix(range(m), range(1, m))) if n else Matrix.zeros(field, 0, 0)
    T0 = Matrix.zeros(field, n, 1).hstack(Matrix.identity(field, n))
    nf = _trivial_normal_form(pres, field, n, A0, T0)
    alpha = c0 if tag is SheafTag.CASE4 else None
    return SheafClass(tag, nf, X, Y, alpha=alpha, local_rank=n, extension=extension)


def is_split(cls: SheafClass) -> bool:
    """Whether the stalk extension ``0 -> ker T -> W -> V -> 0`` splits ``A``-equivariantly."""
    A = cls.normal_form.knot_monodromy
    D = A - Matrix.identity(A.field, A.nrows)
    return rank(D @ D) == rank(D) if cls.tag in (SheafTag.CASE4, SheafTag.CASE5) else True


def moduli_canonical(s: SheafData) -> SheafData:
    """Representative of the moduli class: an irreducible pushforward or a skyscraper."""
    cls = classify(s)
    if cls.tag in (SheafTag.CASE1, SheafTag.CASE5):
        return skyscraper(s.presentation, s.field.one, s.field)
    if cls.tag is SheafTag.CASE4:
        return skyscraper(s.presentation, cls.alpha, s.field)
    rep = cls.rep
    defect = meridian_defect(rep)
    if len(defect) == 1 and cls.tag is SheafTag.CASE3:
        # extension of trivial local systems: its cords all vanish, as for j_! k
        return skyscraper(s.presentation, s.field.one, s.field)
    return pushforward(restrict(rep, defect))


def ext1_dim(rep: Representation, alpha: Scalar) -> int:
    """Dimension of ``{v in ker(Id - rho(m1)) : rho(l) v = alpha v}``."""
    alpha = rep.field(alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    if rep.dim == 0:
        return 0
    ident = rep.identity
    stacked = (rep.images[0] - ident).vstack(longitude_image(rep) - ident.scale(alpha))
    return len(kernel_basis(stacked))


def are_isomorphic_sheaves(
    s1: SheafData, s2: SheafData, *, rng: random.Random | None = None
) -> bool | None:
    """Search for ``(X, Y)`` invertible with ``X rho1 = rho2 X``, ``X T1 = T2 Y``, ``Y A1 = A2 Y``.

    ``None`` means the randomized search was inconclusive.
    """
    if s1.presentation != s2.presentation or s1.field != s2.field:
        raise ValueError("sheaves over different presentations or fields")
    if s1.dim_v != s2.dim_v or s1.dim_w != s2.dim_w:
        return False
    field = s1.field
    n, m = s1.dim_v, s1.dim_w
    In, Im = Matrix.identity(field, n), Matrix.identity(field, m)
    eqs: list[list[tuple[Matrix, int, Matrix]]] = []
    for a, b in zip(s1.complement_rep.images, s2.complement_rep.images):
        eqs.append([(In, 0, a), (-b, 0, In)])
    eqs.append([(In, 0, s1.T), (-s2.T, 1, Im)])
    eqs.append([(Im, 1, s1.knot_monodromy), (-s2.knot_monodromy, 1, Im)])
    basis = matrix_equation_kernel(field, [(n, n), (m, m)], eqs)
    found, exact = search_invertible(basis, [n, m], field, rng=rng)
    if found is not None:
        return True
    return False if exact else None


def sheaf_to_json(s: SheafData) -> dict:
    return {
        "complement_rep": rep_to_json(s.complement_rep),
        "knot_monodromy": matrix_to_json(s.knot_monodromy),
        "T": matrix_to_json(s.T),
    }


def sheaf_from_json(doc: dict, presentation: WirtingerPresentation | None = None) -> SheafData:
    rep = rep_from_json(doc["complement_rep"], presentation)
    return SheafData(rep, matrix_from_json(doc["knot_monodromy"]), matrix_from_json(doc["T"]))


def random_simple_sheaf(
    presentation: WirtingerPresentation,
    field: Field,
    rng: random.Random,
    *,
    reps: Sequence[Representation] = (),
    max_dim: int = 3,
) -> SheafData:
    """A random simple sheaf with ``dim V, dim W <= max_dim``.

    Injective-type data come from ``reps`` (any relation-satisfying
    representations); surjective-type data have trivial ``rho`` and a random
    monodromy preserving a random kernel line.
    """
    from .exactalg import random_invertible

    choice = rng.random()
    candidates = [r for r in reps if 1 <= r.dim <= max_dim]
    if choice < 0.5 and candidates:
        rep = rng.choice(candidates)
        fixed = fixed_subspace(rep.images[0])
        if len(fixed) == rep.dim - 1:
            s = pushforward(rep)
        elif len(fixed) == rep.dim:
            # trivial meridians: any hyperplane that the longitude preserves
            s = _trivial_hyperplane(rep, rng)
        else:
            return random_simple_sheaf(presentation, field, rng, reps=(), max_dim=max_dim)
    elif choice < 0.65:
        n = rng.randint(1, max_dim)
        s = extend_by_zero(trivial_rep(presentation, field, 1))
        if n > 1:
            s = direct_sum_sheaves(s, local_system(presentation, field, n - 1))
    else:
        n = rng.randint(0, max_dim - 1)
        c0 = field.random(rng, nonzero=True)
        rows = [[field.zero] * (n + 1) for _ in range(n + 1)]
        rows[0][0] = c0
        for i in range(1, n + 1):
            rows[0][i] = field.random(rng)
            rows[i][i] = field.one
        A = Matrix(field, rows, n + 1)
        T = Matrix.zeros(field, n, 1).hstack(Matrix.identity(field, n))
        s = SheafData(trivial_rep(presentation, field, n), A, T)
    X = random_invertible(field, s.dim_v, rng) if s.dim_v else Matrix.zeros(field, 0, 0)
    Y = random_invertible(field, s.dim_w, rng) if s.dim_w else Matrix.zeros(field, 0, 0)
    return transform(s, X, Y)


def _trivial_hyperplane(rep: Representation, rng: random.Random) -> SheafData:
    # every meridian is trivial, hence so is the longitude: any hyperplane works
    field, n = rep.field, rep.dim
    normal = [field.zero] * n
    while not any(normal):
        normal = [field.random(rng) for _ in range(n)]
    hyper = kernel_basis(Matrix(field, [normal], n))
    T = Matrix.from_columns(field, hyper, n) if hyper else Matrix.zeros(field, n, 0)
    return SheafData(rep, Matrix.identity(field, n - 1), T)
