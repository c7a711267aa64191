"""Worked-example instances shared by the test modules."""

from paraspace.core import (
    BooleanFormula,
    CellularAutomaton,
    CellularInstance,
    FamilyUnionInstance,
    Graph,
    SubsetUnionInstance,
    TemplateWord,
    conj,
    encode_bf,
    imp,
    var,
)

# x ∧ (y → x) ∧ z
PHI = BooleanFormula(conj(var(0), imp(var(1), var(0)), var(2)), ("x", "y", "z"))
PHI_TEMPLATE = TemplateWord(encode_bf(PHI))


def phi_word(bits: str):
    return PHI_TEMPLATE.fill([int(b) for b in bits])


def example_family() -> FamilyUnionInstance:
    return FamilyUnionInstance(PHI_TEMPLATE, ((phi_word("000"), phi_word("001")), (phi_word("001"),)), "bf")


def example_subset() -> SubsetUnionInstance:
    S = tuple(phi_word(b) for b in ("000", "101", "010", "111"))
    return SubsetUnionInstance(PHI_TEMPLATE, S, 1, "bf")


# three layers v1..v3, v4..v6, v7..v9 (indices 0..8), edges a..j in
# ascending (start, end) order
LAYERED_EDGES = ((0, 3), (1, 3), (1, 4), (1, 5), (2, 5), (3, 6), (3, 7), (4, 8), (5, 7), (5, 8))
LAYERED_LAYERS = (0, 0, 0, 1, 1, 1, 2, 2, 2)
LAYERED_STRINGS = ("a bcd e f gi hj", "e dcb a jh ig f", "ab fg c h de ij", "ed ji c h ba gf")


def layered_example(**kw) -> Graph:
    return Graph.from_edges(9, LAYERED_EDGES, layers=LAYERED_LAYERS, **kw)


# a two-state, three-cell automaton: (left, own, right) -> new
PEBBLE_TRANSITIONS = (
    ((None, "q1", "q1"), "q1"),
    ((None, "q2", "q1"), "q1"),
    (("q1", "q1", "q1"), "q1"),
    (("q1", "q2", "q1"), "q1"),
    (("q2", "q1", "q1"), "q2"),
    (("q2", "q2", "q2"), "q2"),
    (("q1", "q1", None), "q1"),
    (("q2", "q1", None), "q2"),
    (("q1", "q2", None), "q2"),
)


def pebble_example(initial=("q1", "q1", "q1")) -> CellularInstance:
    ca = CellularAutomaton(("q1", "q2"), PEBBLE_TRANSITIONS, frozenset(), deterministic=True)
    return CellularInstance(ca, initial)
