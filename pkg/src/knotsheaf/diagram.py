"""Planar-diagram codes and their Wirtinger presentations.

Conventions
-----------
``X[i,j,k,l]`` lists the four edge labels of a crossing counterclockwise,
starting at the incoming under-edge ``i``; the under-strand runs ``i -> k``.
A crossing is positive (right-handed, +1) when the over-strand runs ``l -> j``.

Generators are the arcs of the diagram (maximal over-passes).  Arc 1 is the
arc containing edge 1 and the rest are numbered in the order met while walking
the knot.  At a crossing with over-arc ``o``, sign ``s``, incoming under-arc
``a`` and outgoing under-arc ``b`` the relation is ``m_b = m_o^s m_a m_o^-s``.
This orientation of the relation is the one under which the standard table
trefoil reproduces ``m3 m2 = m2 m1 = m1 m3``.

Walking the knot gives the conjugators ``g_{t+1} = g_t m_o^{-s}`` (so that
``m_t = g_t^-1 m_1 g_t``) and the zero-framed longitude
``m_{o_N}^{s_N} ... m_{o_1}^{s_1} m_1^{-w}`` with ``w`` the writhe.

See ``docs/conventions.md`` for a picture.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import PDCodeError
from .words import GroupWord, linking_number, product

KNOT_TABLE: dict[str, str] = {
    "unknot": "",
    "trefoil": "X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]",
    "figure-eight": "X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]",
}

KNOT_ALIASES: dict[str, str] = {
    "0_1": "unknot",
    "3_1": "trefoil",
    "4_1": "figure-eight",
    "figure8": "figure-eight",
    "figure_eight": "figure-eight",
}

_X_BRACKET = re.compile(r"X\[\s*([^\]]*)\]")


@dataclass(frozen=True)
class PDCode:
    """Validated planar-diagram code of a knot.

    ``signs[c]`` is +1 for a right-handed crossing.  ``strand`` is the cyclic
    sequence of ``(crossing, position)`` slots met walking the knot from edge
    1; entries come in (entry, exit) pairs per crossing visit.
    """

    crossings: tuple[tuple[int, int, int, int], ...]
    signs: tuple[int, ...]
    walk: tuple[tuple[int, int, int], ...] = field(repr=False, default=())

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def writhe(self) -> int:
        return sum(self.signs)

    def to_text(self) -> str:
        return ",".join("X[%d,%d,%d,%d]" % c for c in self.crossings)


@dataclass(frozen=True)
class WirtingerPresentation:
    n_generators: int
    relations: tuple[tuple[GroupWord, GroupWord], ...]
    conjugators: tuple[GroupWord, ...]
    longitude: GroupWord
    writhe: int
    pd: PDCode
    name: str | None = None

    @property
    def meridian(self) -> GroupWord:
        return GroupWord.gen(1)

    def reference(self) -> dict:
        if self.name is not None:
            return {"knot": self.name}
        return {"pd": self.pd.to_text()}

    def __eq__(self, other):
        if not isinstance(other, WirtingerPresentation):
            return NotImplemented
        return self.pd == other.pd

    def __hash__(self):
        return hash(self.pd)


def _tokens(text: str) -> list[list[str]]:
    text = text.strip()
    if not text or text in ("PD[]", "[]"):
        return []
    if text.startswith("PD[") and text.endswith("]"):
        text = text[3:-1]
    if "X[" in text:
        leftover = _X_BRACKET.sub("", text).replace(",", "").strip()
        if leftover:
            raise PDCodeError(f"malformed token near {leftover!r}")
        return [[p.strip() for p in m.group(1).split(",")] for m in _X_BRACKET.finditer(text)]
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "X":
            raise PDCodeError(f"malformed line {line!r}")
        out.append(parts[1:])
    return out


def parse_pd(text: str) -> PDCode:
    """Parse ``X[a,b,c,d],...`` or one-crossing-per-line ``X a b c d`` text."""
    raw = []
    for parts in _tokens(text):
        if len(parts) != 4:
            raise PDCodeError(f"crossing needs 4 labels, got {len(parts)}: {parts}")
        try:
            labels = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise PDCodeError(f"non-integer label in {parts}") from exc
        if any(x < 1 for x in labels):
            raise PDCodeError(f"labels must be positive: {parts}")
        raw.append(labels)
    return _validate(raw)


def _validate(raw: list[tuple[int, ...]]) -> PDCode:
    if not raw:
        return PDCode((), (), ())
    counts: dict[int, int] = {}
    for c in raw:
        for x in c:
            counts[x] = counts.get(x, 0) + 1
    bad = sorted(x for x, k in counts.items() if k != 2)
    if bad:
        raise PDCodeError(f"edge labels must appear exactly twice; offending: {bad}")
    relabel = {old: new for new, old in enumerate(sorted(counts), start=1)}
    crossings = tuple(tuple(relabel[x] for x in c) for c in raw)

    slots: dict[int, list[tuple[int, int]]] = {}
    for ci, c in enumerate(crossings):
        for pos, x in enumerate(c):
            slots.setdefault(x, []).append((ci, pos))

    def other_slot(label, slot):
        a, b = slots[label]
        return b if a == slot else a

    # Walk starting on edge 1: pick the traversal direction consistent with
    # the under-strand orientation i -> k at the first under-passage.
    def traverse(start_slot):
        seq = []  # (crossing, entry position, exit position)
        slot = start_slot
        seen = set()
        while True:
            ci, pos = slot
            if (ci, pos) in seen:
                break
            exit_pos = (pos + 2) % 4
            seen.add((ci, pos))
            seen.add((ci, exit_pos))
            seq.append((ci, pos, exit_pos))
            label = crossings[ci][exit_pos]
            slot = other_slot(label, (ci, exit_pos))
        return seq, seen

    first = slots[1][1]  # entering a crossing along edge 1 through this slot
    walk, seen = traverse(first)
    if len(seen) != 4 * len(crossings):
        raise PDCodeError("diagram has more than one component (links are not supported)")
    unders = [(ci, a) for ci, a, _ in walk if a in (0, 2)]
    if not unders:
        raise PDCodeError("diagram has no under-passages")
    if unders[0][1] == 2:
        walk, _ = traverse(slots[1][0])
    for ci, a, b in walk:
        if a == 2:
            raise PDCodeError(f"under-strand orientation inconsistent at crossing {crossings[ci]}")
    signs = [0] * len(crossings)
    for ci, a, b in walk:
        if a in (1, 3):
            signs[ci] = 1 if a == 3 else -1
    walk = _rotate_to_edge_one(walk, crossings)
    return PDCode(crossings, tuple(signs), tuple(walk))


def _rotate_to_edge_one(walk, crossings):
    # make the first visit the one entered along edge 1
    for idx, (ci, a, _) in enumerate(walk):
        if crossings[ci][a] == 1:
            return walk[idx:] + walk[:idx]
    raise PDCodeError("edge 1 not found on the walk")  # pragma: no cover


def wirtinger(pd: PDCode, name: str | None = None) -> WirtingerPresentation:
    if pd.n_crossings == 0:
        return WirtingerPresentation(1, (), (GroupWord(),), GroupWord(), 0, pd, name)

    # arc index for every (crossing, position) met on the walk
    arc_of_slot: dict[tuple[int, int], int] = {}
    arc = 1
    under_events = []  # (crossing, incoming arc) in walk order
    for ci, a, b in pd.walk:
        if a == 0:
            arc_of_slot[(ci, 0)] = arc
            under_events.append((ci, arc))
            arc += 1
            arc_of_slot[(ci, 2)] = arc
        else:
            arc_of_slot[(ci, a)] = arc
            arc_of_slot[(ci, b)] = arc
    n = pd.n_crossings
    # the final arc wraps around to arc 1
    for key, val in arc_of_slot.items():
        if val == n + 1:
            arc_of_slot[key] = 1

    relations = []
    conjugators = [GroupWord()]
    overs = []
    for ci, a_in in under_events:
        a_out = arc_of_slot[(ci, 2)]
        o = arc_of_slot[(ci, 1)]
        s = pd.signs[ci]
        lhs = GroupWord.gen(a_out)
        rhs = product([GroupWord.gen(o, s), GroupWord.gen(a_in), GroupWord.gen(o, -s)])
        relations.append((lhs, rhs))
        overs.append((o, s))
        if len(conjugators) < n:
            conjugators.append(conjugators[-1] * GroupWord.gen(o, -s))

    w = pd.writhe
    longitude = product([GroupWord.gen(o, s) for o, s in reversed(overs)] + [GroupWord.gen(1, -w)])
    return WirtingerPresentation(n, tuple(relations), tuple(conjugators), longitude, w, pd, name)


def canonical_name(name: str) -> str:
    key = name.strip().lower()
    key = KNOT_ALIASES.get(key, key)
    if key not in KNOT_TABLE:
        raise KeyError(f"unknown knot {name!r}; known: {', '.join(sorted(KNOT_TABLE))}")
    return key


def knot(name: str) -> WirtingerPresentation:
    """Presentation of a knot from the built-in table."""
    key = canonical_name(name)
    return wirtinger(parse_pd(KNOT_TABLE[key]), name=key)


def presentation_from_reference(ref: dict) -> WirtingerPresentation:
    if "knot" in ref and ref["knot"] is not None:
        return knot(ref["knot"])
    if "pd" in ref:
        return wirtinger(parse_pd(ref["pd"]))
    raise PDCodeError("reference needs a 'knot' name or a 'pd' code")


def presentation_to_json(pres: WirtingerPresentation) -> dict:
    doc = dict(pres.reference())
    doc.update(
        {
            "pd": pres.pd.to_text(),
            "n_generators": pres.n_generators,
            "generators": [f"m{i}" for i in range(1, pres.n_generators + 1)],
            "relations": [[str(l), str(r)] for l, r in pres.relations],
            "conjugators": [str(g) for g in pres.conjugators],
            "longitude": str(pres.longitude),
            "writhe": pres.writhe,
            "crossing_signs": list(pres.pd.signs),
        }
    )
    return doc


def check_presentation_invariants(pres: WirtingerPresentation) -> None:
    """Raise ``AssertionError`` if a structural invariant fails."""
    assert len(pres.relations) == pres.pd.n_crossings
    for lhs, rhs in pres.relations:
        assert linking_number(lhs) == linking_number(rhs)
    assert pres.conjugators[0] == GroupWord()
    assert len(pres.conjugators) == pres.n_generators
    assert linking_number(pres.longitude) == 0
