import json
import random

import pytest

from knotsheaf.augment import from_kch_rep, lift
from knotsheaf.diagram import knot, parse_pd, wirtinger
from knotsheaf.errors import BudgetExceeded
from knotsheaf.exactalg import GF, rank
from knotsheaf.reps import RepFamily, are_isomorphic, classify_rep, longitude_image, trefoil_example
from knotsheaf.variety import (
    AugPoint,
    EnumerationReport,
    census,
    enumerate_augmentations,
    enumerate_exact,
    universal_locus_check,
)
from pools import small_reps

TREFOIL = knot("trefoil")


def points(report):
    return {(q.lam, q.mu) for q in report.points}


def unknot_closed_form(p):
    return {(1, m) for m in range(1, p)} | {(l, 1) for l in range(1, p)}


@pytest.mark.parametrize("p", [5, 7, 11])
def test_unknot_closed_form(p):
    report = enumerate_augmentations(knot("unknot"), p)
    assert points(report) == unknot_closed_form(p)
    assert len(report.points) == 2 * p - 3
    assert universal_locus_check(report)


def test_trefoil_contains_universal_locus():
    assert universal_locus_check(enumerate_augmentations(TREFOIL, 3))


def test_trefoil_unipotent_point_at_5():
    rep = trefoil_example()
    # longitude eigenvalue on the meridian-fixed vector (1, 0)
    lam = longitude_image(rep).column(0)[0]
    assert lam == -1
    assert (int(lam) % 5, 1) in points(enumerate_augmentations(TREFOIL, 5))


def test_mutation_fails_check():
    report = enumerate_augmentations(TREFOIL, 3)
    assert not universal_locus_check(report.without(AugPoint(2, 1)))


class TestCensus:
    def test_unknot(self):
        table = census(enumerate_augmentations(knot("unknot"), 5))
        assert table.rows == {"NonvanishingE": 3, "AllCordsVanish": 4}
        assert table.ok

    def test_trefoil_unipotent_rows(self):
        report = enumerate_augmentations(TREFOIL, 3)
        table = census(report)
        assert table.ok and table.total == report.count
        for aug in report.augmentations:
            if aug.mu == 1 and not aug.R.is_zero():
                cls = classify_rep(lift(aug))
                assert cls.family is RepFamily.UNIPOTENT and cls.irreducible

    def test_empty(self):
        empty = EnumerationReport(3, {"knot": "trefoil"}, [], [], {}, 0)
        table = census(empty)
        assert table.rows == {} and table.ok

    def test_mismatch_has_witness(self):
        report = enumerate_augmentations(TREFOIL, 3)
        wrong = [lift(a) for a in report.augmentations]
        wrong.reverse()
        table = census(report, wrong)
        assert not table.ok and "augmentation" in table.mismatches[0]


class TestDeterminism:
    def test_threads_do_not_change_output(self):
        a = enumerate_augmentations(TREFOIL, 5, threads=1)
        b = enumerate_augmentations(TREFOIL, 5, threads=4)
        ja = json.dumps(a.to_json(include_augmentations=True))
        jb = json.dumps(b.to_json(include_augmentations=True))
        assert ja == jb
        assert a.to_csv() == b.to_csv()


class TestCompleteness:
    @pytest.mark.parametrize("name,p", [("trefoil", 3), ("trefoil", 5), ("unknot", 7), ("figure-eight", 2)])
    def test_batch_filter_matches_exact_route(self, name, p):
        pres = knot(name)
        assert enumerate_augmentations(pres, p).augmentations == enumerate_exact(pres, p)

    @pytest.mark.parametrize("p", [3, 5])
    def test_kch_augmentations_come_from_small_reps(self, p):
        report = enumerate_augmentations(TREFOIL, p)
        enumerated = {a for a in report.augmentations if a.mu != 1}
        from_reps = set()
        for dim in (1, 2):
            for r in small_reps("trefoil", p, dim):
                cls = classify_rep(r)
                if cls.family is RepFamily.KCH and cls.irreducible:
                    from_reps.add(from_kch_rep(r))
        assert enumerated == from_reps

    def test_point_set_independent_of_diagram(self):
        # same trefoil, edge labels shifted so a different arc is arc 1
        shifted = wirtinger(parse_pd("X[3,6,4,1],X[5,2,6,3],X[1,4,2,5]".translate(str.maketrans("123456", "345612"))))
        for p in (3, 5, 7):
            assert points(enumerate_augmentations(shifted, p)) == points(enumerate_augmentations(TREFOIL, p))


def test_uniqueness_of_lift():
    rng = random.Random(6)
    for aug in enumerate_augmentations(TREFOIL, 5).augmentations:
        base = lift(aug)
        order = list(range(3))
        rng.shuffle(order)
        assert are_isomorphic(lift(aug, order), base)


def test_budget_and_prime():
    with pytest.raises(BudgetExceeded):
        enumerate_augmentations(TREFOIL, 11, budget=1000)
    with pytest.raises(ValueError):
        enumerate_augmentations(TREFOIL, 9)


def test_budget_env(monkeypatch):
    monkeypatch.setenv("KNOTSHEAF_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        enumerate_augmentations(TREFOIL, 3)


def test_csv():
    text = enumerate_augmentations(knot("unknot"), 5).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "lambda,mu,multiplicity" and len(lines) == 8
