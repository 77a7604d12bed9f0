import itertools
import random

import pytest

from knotsheaf.diagram import knot
from knotsheaf.errors import DimensionError, NotInvariantError
from knotsheaf.exactalg import GF, QQ, Matrix, inverse, random_invertible, rank
from knotsheaf.reps import (
    MeridianTag,
    RepFamily,
    Representation,
    abelian_rep,
    are_isomorphic,
    check_relations,
    classify_meridian,
    classify_rep,
    cocycle_space,
    conjugate,
    direct_sum,
    evaluate,
    extension_by_trivial,
    intertwiners,
    meridian_defect,
    rep_from_json,
    rep_to_json,
    restrict,
    trefoil_example,
    trivial_rep,
)
from knotsheaf.exactalg import iter_gl
from knotsheaf.words import GroupWord
from pools import rep_pool, small_reps

TREFOIL = knot("trefoil")


def M(rows, field=QQ):
    return Matrix(field, rows)


class TestEvaluate:
    def test_products(self):
        rep = trefoil_example()
        target = M([[1, 1], [-1, 0]])
        assert evaluate(rep, GroupWord.parse("m3*m2")) == target
        assert evaluate(rep, GroupWord.parse("m2*m1")) == target
        assert evaluate(rep, GroupWord.parse("m1*m3")) == target
        assert evaluate(rep, GroupWord()) == Matrix.identity(QQ, 2)

    def test_inverse_letters(self):
        rep = trefoil_example()
        assert evaluate(rep, GroupWord.parse("m1^-1")) == M([[1, -1], [0, 1]])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            evaluate(trefoil_example(), GroupWord.parse("m4"))


class TestCheckRelations:
    def test_bundled_trefoil_matrices(self):
        assert check_relations(trefoil_example())

    def test_broken_third_matrix(self):
        rep = trefoil_example()
        bad = Representation.from_matrices(TREFOIL, [rep.images[0], rep.images[1], Matrix.identity(QQ, 2)])
        assert not check_relations(bad)

    def test_zero_dimensional(self):
        assert check_relations(trivial_rep(TREFOIL, QQ, 0))

    def test_rejects_singular_and_bad_shapes(self):
        with pytest.raises(ValueError):
            Representation.from_matrices(TREFOIL, [M([[0]])] * 3)
        with pytest.raises(DimensionError):
            Representation(TREFOIL, QQ, 1, (M([[1]]),) * 2)


class TestMeridian:
    def test_examples(self):
        kch = classify_meridian(Matrix.diagonal(QQ, [5, 1, 1]))
        assert kch.tag is MeridianTag.KCH and kch.mu0 == 5
        assert classify_meridian(M([[1, 1], [0, 1]])).tag is MeridianTag.UNIPOTENT
        assert classify_meridian(Matrix.identity(QQ, 4)).tag is MeridianTag.IDENTITY
        assert classify_meridian(Matrix.diagonal(QQ, [2, 3])).tag is MeridianTag.OTHER

    def test_errors(self):
        with pytest.raises(DimensionError):
            classify_meridian(M([[1, 2]]))
        with pytest.raises(ValueError):
            classify_meridian(M([[1, 1], [1, 1]]))

    @pytest.mark.parametrize("p", [3, 5])
    def test_conjugation_invariance_and_certificate(self, p):
        F = GF(p)
        rng = random.Random(p)
        forms = []
        for n in (1, 2, 3):
            for mu0 in range(2, p):
                forms.append((Matrix.diagonal(F, [mu0] + [1] * (n - 1)), MeridianTag.KCH, F(mu0)))
            if n >= 2:
                J = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
                J[0][1] = 1
                forms.append((Matrix(F, J), MeridianTag.UNIPOTENT, None))
        for A, tag, mu0 in forms:
            for _ in range(10):
                P = random_invertible(F, A.nrows, rng)
                B = P @ A @ inverse(P)
                mc = classify_meridian(B)
                assert mc.tag is tag and mc.mu0 == mu0
                Q = mc.basis_change
                assert inverse(Q) @ B @ Q == A


class TestDefectAndFamilies:
    def test_trefoil_defect_is_everything(self):
        assert len(meridian_defect(trefoil_example())) == 2

    def test_trivial_and_abelian(self):
        assert meridian_defect(trivial_rep(TREFOIL, QQ, 3)) == []
        assert len(meridian_defect(abelian_rep(TREFOIL, QQ(3), QQ))) == 1

    def test_families(self):
        cls = classify_rep(trefoil_example())
        assert cls.family is RepFamily.UNIPOTENT and cls.irreducible is True
        cls = classify_rep(abelian_rep(TREFOIL, QQ(4), QQ))
        assert cls.family is RepFamily.KCH and cls.mu0 == 4 and cls.irreducible
        cls = classify_rep(direct_sum(trefoil_example(), trivial_rep(TREFOIL, QQ, 1)))
        assert cls.family is RepFamily.UNIPOTENT and cls.irreducible is False
        assert classify_rep(trivial_rep(TREFOIL, QQ, 2)).family is RepFamily.TRIVIAL
        other = direct_sum(abelian_rep(TREFOIL, QQ(2), QQ), abelian_rep(TREFOIL, QQ(3), QQ))
        assert classify_rep(other).family is RepFamily.OTHER and classify_rep(other).irreducible is None

    def test_json(self):
        assert classify_rep(trefoil_example()).to_json() == {"family": "UnipotentKCH", "irreducible": True}


class TestRestrictAndIsomorphism:
    def test_restrict_to_defect(self):
        big = direct_sum(trefoil_example(), trivial_rep(TREFOIL, QQ, 1))
        sub = restrict(big, meridian_defect(big))
        assert sub.dim == 2 and are_isomorphic(sub, trefoil_example())

    def test_restrict_not_invariant(self):
        with pytest.raises(NotInvariantError):
            restrict(trefoil_example(), [(QQ(0), QQ(1))])

    def test_examples(self):
        r = trefoil_example()
        assert are_isomorphic(r, r)
        assert are_isomorphic(r, trivial_rep(TREFOIL, QQ, 2)) is False
        P = M([[2, 1], [1, 1]])
        assert are_isomorphic(r, conjugate(r, P))

    def test_against_gl_bruteforce(self):
        F = GF(3)
        reps = small_reps("trefoil", 3, 2)
        gl = list(iter_gl(F, 2))
        rng = random.Random(0)
        for _ in range(40):
            a, b = rng.choice(reps), rng.choice(reps)
            oracle = any(all(P @ x == y @ P for x, y in zip(a.images, b.images)) for P in gl)
            assert are_isomorphic(a, b) is oracle

    def test_intertwiners_commute(self):
        r = trefoil_example()
        for X in intertwiners(r, r):
            assert all(X @ A == A @ X for A in r.images)


class TestPoolProperties:
    @pytest.mark.parametrize("p", [2, 3])
    def test_defect_restriction_is_irreducible(self, p):
        for rep in rep_pool("trefoil", p):
            cls = classify_rep(rep)
            if cls.family not in (RepFamily.KCH, RepFamily.UNIPOTENT):
                continue
            defect = meridian_defect(rep)
            sub = restrict(rep, defect)
            assert check_relations(sub)
            if cls.family is RepFamily.UNIPOTENT and len(defect) == 1:
                # a one-dimensional defect is fixed by every meridian
                assert classify_rep(sub).family is RepFamily.TRIVIAL
            else:
                sub_cls = classify_rep(sub)
                assert sub_cls.family is cls.family and sub_cls.irreducible is True
            # quotient by the defect is trivial: (rho(m_t) - Id) V lies in V0
            D = Matrix.from_columns(rep.field, defect, rep.dim)
            for A in rep.images:
                assert rank(D.hstack(A - rep.identity)) == len(defect)

    def test_one_dimensional_count(self):
        # one-dimensional representations factor through the abelianization
        for name in ("trefoil", "figure-eight"):
            assert len(small_reps(name, 5, 1)) == 4

    def test_extension_cocycles(self):
        F = GF(3)
        for rep in small_reps("trefoil", 3, 2)[:30]:
            for c in cocycle_space(rep):
                assert check_relations(extension_by_trivial(rep, c))


def test_json_roundtrip():
    r = trefoil_example()
    assert rep_from_json(rep_to_json(r)) == r
    z = trivial_rep(TREFOIL, GF(5), 0)
    assert rep_from_json(rep_to_json(z)) == z
