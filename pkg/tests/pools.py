"""Representation and sheaf pools shared by the test modules."""

from __future__ import annotations

import random
from functools import lru_cache

from knotsheaf.diagram import knot
from knotsheaf.exactalg import GF, random_invertible
from knotsheaf.reps import (
    Representation,
    abelian_rep,
    all_representations,
    check_relations,
    cocycle_space,
    conjugate,
    direct_sum,
    extension_by_trivial,
    trivial_rep,
)


@lru_cache(maxsize=None)
def small_reps(knot_name: str, p: int, dim: int) -> tuple[Representation, ...]:
    return tuple(all_representations(knot(knot_name), GF(p), dim))


@lru_cache(maxsize=None)
def rep_pool(knot_name: str, p: int, max_dim: int = 3, seed: int = 0) -> tuple[Representation, ...]:
    """Relation-satisfying representations of dimension 1..max_dim.

    Dimensions 1 and 2 are exhaustive; dimension 3 is built from direct sums,
    extensions by the trivial representation and random conjugation.
    """
    pres = knot(knot_name)
    field = GF(p)
    rng = random.Random(seed)
    pool = list(small_reps(knot_name, p, 1))
    if max_dim >= 2:
        pool.extend(small_reps(knot_name, p, 2))
    if max_dim >= 3:
        ones = list(small_reps(knot_name, p, 1))
        twos = list(small_reps(knot_name, p, 2))
        built = []
        for r in rng.sample(twos, min(len(twos), 40)):
            built.append(direct_sum(r, rng.choice(ones)))
            cocycles = cocycle_space(r)
            if cocycles:
                coeffs = [field.random(rng) for _ in cocycles]
                c = [
                    tuple(sum((k * vec[t][i] for k, vec in zip(coeffs, cocycles)), field.zero) for i in range(r.dim))
                    for t in range(pres.n_generators)
                ]
                built.append(extension_by_trivial(r, c))
        for r in built:
            P = random_invertible(field, r.dim, rng)
            built_conj = conjugate(r, P)
            assert check_relations(built_conj)
            pool.append(built_conj)
        pool.append(trivial_rep(pres, field, 3))
    return tuple(pool)


def abelian_reps(knot_name: str, p: int) -> list[Representation]:
    pres = knot(knot_name)
    field = GF(p)
    return [abelian_rep(pres, field(m), field) for m in range(1, p)]
