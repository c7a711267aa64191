"""Headline criteria; each test prints one PASS/FAIL line."""

import itertools
import random
import time

import pytest

from paraspace.core import TemplateWord, decode_bf, doubling_projection, union_instantiations
from paraspace.generators import gen_instance, random_ca, random_generator_frame, random_word
from paraspace.harness import get_reduction, kappa, make_cases, summarize, verify_reduction
from paraspace.machine_reductions import layeredreach_to_lcs_injective, seqca_to_lcs, tpg_layout
from paraspace.oracles import ca_step, lcs_decide, lcs_injective_decide, pebbleable, rs_normalize
from paraspace.union_reductions import (
    family_agen_rules,
    family_to_subset_bf,
    projection_to_family_union,
    representative_system,
    subset_to_weighted_bf,
)

from worked import LAYERED_STRINGS, PEBBLE_TRANSITIONS, example_family, example_subset, layered_example, pebble_example


@pytest.fixture
def report(capsys):
    def emit(label: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}{': ' + detail if detail else ''}")
        assert ok, f"{label}: {detail}"

    return emit


# --- 1. worked examples


def test_1a_projection_families(report):
    inst = projection_to_family_union(doubling_projection(4, 2), tuple("αβγα"), (), 2)
    got = [["".join(w.symbols) for w in fam] for fam in inst.families]
    expected = [
        ["αβγα0000αβγα0000", "αβγα0100αβγα0100", "αβγα1000αβγα1000", "αβγα1100αβγα1100"],
        ["αβγα0000αβγα0000", "αβγα0001αβγα0001", "αβγα0010αβγα0010", "αβγα0011αβγα0011"],
    ]
    report("1a projection families S1 and S2", got == expected)


def test_1b_union_chain(report):
    S = ["".join(map(str, w.bits)) for w in family_to_subset_bf(example_family()).S]
    out = subset_to_weighted_bf(example_subset())
    S2 = sorted("".join(w.symbols[-4:]) for w in out.template.weight_k(1))
    ok = S == ["000100", "001010", "001001"] and S2 == ["0001", "0010", "0100", "1000"] and out.k == 1
    report("1b subset words and weight-one words", ok)


@pytest.mark.xfail(strict=True, reason="x is also set by member 4, so its variable is v2 or v4, not v2 alone")
def test_1b_literal_formula(report):
    f, _ = decode_bf(subset_to_weighted_bf(example_subset()).template.symbols)
    report("1b formula text", f.pretty() == "v2∧((v3∨v4)→v2)∧(v2∨v4)", f.pretty())


def test_1c_layered_strings(report):
    out = layeredreach_to_lcs_injective(layered_example())
    ok = ["".join(s) for s in out.strings] == [s.replace(" ", "") for s in LAYERED_STRINGS]
    report("1c four strings, l=2, yes", ok and out.l == 2 and lcs_injective_decide(out))


def test_1d_pebble_fragment(report):
    inst = pebble_example()
    layout = tpg_layout(inst, t=2, target=("q1", "q1", "q1"))
    game = layout.game
    aux, main = layout.vertices("aux", 1), layout.vertices("main", 1) + layout.vertices("main", 2)
    ok = len(aux) == 16 and len(main) == 12
    ok &= [game.threshold[v] for v in aux] == [2] * 4 + [3] * 8 + [2] * 4
    ok &= all(game.threshold[v] == 1 for v in main)
    rules = dict(PEBBLE_TRANSITIONS)
    index = {lab: v for v, lab in enumerate(layout.labels)}
    for v in aux:
        _, _, cell, w = layout.labels[v]
        succ = {layout.labels[u] for u in game.graph.successors(v)}
        ok &= succ == ({("main", 2, cell, rules[w])} if w in rules else set())
    # one pebble per cell block: exactly s windows fire, and they pebble the next configuration
    for conf in itertools.product(("q1", "q2"), repeat=3):
        X = frozenset(index[("main", 1, c + 1, q)] for c, q in enumerate(conf))
        fired = pebbleable(game, X) & set(aux)
        nxt = {layout.labels[u] for u in pebbleable(game, fired) if layout.labels[u][0] == "main"}
        ok &= len(fired) == 3
        (after,) = ca_step(inst.automaton, conf)
        ok &= nxt == {("main", 2, c + 1, q) for c, q in enumerate(after) if q is not None}
    report("1d aux layer 16, thresholds 2/3/2, main 1", ok)


# --- 2. round-trip suites

SUITES = [
    ("family_to_subset_bf+subset_to_weighted_bf", 200),
    ("family_to_subset_graph", 1400),
    ("family_to_subset_agen", 100),
    ("subset_to_weighted_agen", 100),
    ("dtsc_from_parameterized_run", 100),
    ("tm_to_ca", 50),
    ("tm_to_nca", 50),
    ("ca_to_dag_ca", 50),
    ("dagca_to_tpg", 100),
    ("ca_to_tpg_cyclic", 100),
    ("layeredreach_to_lcs_injective", 200),
    ("nca_to_sequential", 100),
    ("seqca_to_lcs", 100),
]


@pytest.mark.parametrize("name, count", SUITES)
def test_2_roundtrip(report, name, count):
    t0 = time.perf_counter()
    d = get_reduction(name)
    cases = make_cases(d, count, 0)
    reports = verify_reduction(d, cases)
    row = summarize(name, reports)
    seconds = time.perf_counter() - t0
    ok = row["agree"] == count and seconds < 300
    if name == "subset_to_weighted_agen":
        ok &= all(kappa(d.apply(c.instance)) == kappa(c.instance) + 3 for c in cases)
    if name == "family_to_subset_graph":
        kinds = {c.instance.kind for c in cases}
        ok &= len(kinds) == 7 and all(sum(c.instance.kind == k for c in cases) == 200 for k in kinds)
    if name in ("dtsc_from_parameterized_run", "dagca_to_tpg", "ca_to_tpg_cyclic"):
        det = sum(c.instance.machine.deterministic if hasattr(c.instance, "machine") else c.instance.automaton.deterministic for c in cases)
        ok &= det == count // 2
    report(f"2 {name}", ok, f"{row['agree']}/{count} agree, {row['skipped']} skipped, {seconds:.1f}s")


# --- 3. structural invariants


def test_3_dag_automata_halt(report):
    ok = True
    for seed in range(200):
        rng = random.Random(seed)
        inst = random_ca(rng, rng.randint(1, 4), rng.randint(1, 3), rng.random() < 0.5, True, 0.8)
        confs = {inst.initial}
        for _ in range(len(inst.automaton.states)):
            confs = {c for conf in confs for c in ca_step(inst.automaton, conf)}
        ok &= all(all(q is None for q in c) for c in confs)
    report("3 dag automata halt within |Q| steps", ok)


def test_3_representative_bound(report):
    ok = True
    for seed in range(100):
        rng = random.Random(seed)
        frame = random_generator_frame(rng, rng.randint(1, 4))
        k = rng.randint(1, 2)
        rules, _ = family_agen_rules(frame, k)
        u_prime = len(frame.universe) + k
        ok &= len(representative_system(rules).words) <= 1 + u_prime * (k * k + 1)
    report("3 representatives <= 1+|U'|(k^2+1)", ok)


def test_3_layered_outputs(report):
    d = get_reduction("layeredreach_to_lcs_injective")
    ok = True
    for c in make_cases(d, 200, 0):
        out = d.apply(c.instance)
        ok &= len(out.strings) == 4 and out.injective
    report("3 layered outputs are 4 p-sequences", ok)


def test_3_seqca_shape(report):
    d = get_reduction("seqca_to_lcs")
    ok = True
    for c in make_cases(d, 100, 0):
        out = seqca_to_lcs(c.instance)
        ok &= len(out.strings) == 4 * c.instance.k and out.l == c.instance.horizon * c.instance.k
    report("3 seqca_to_lcs gives 4k strings and l=t*k", ok)


def test_3_union_laws(report):
    rng = random.Random(0)
    t = TemplateWord(tuple("a??b???c?"))
    u = union_instantiations
    ok = True
    for _ in range(1000):
        a, b, c = (t.fill([rng.randint(0, 1) for _ in t.holes]) for _ in range(3))
        ok &= u([a, b]) == u([b, a]) and u([u([a, b]), c]) == u([a, u([b, c])]) and u([a, a]) == a
    report("3 union laws over 1000 triples", ok)


# --- 4. cross-oracle agreement


def test_4_lcs_oracles(report):
    agree = sum(
        lcs_injective_decide(x) == lcs_decide(x) for x in (gen_instance("lcs", {"injective": True}, seed) for seed in range(500))
    )
    report("4 injective lcs oracle = general lcs oracle", agree == 500, f"{agree}/500")


def test_4_rewriting_order(report):
    ok = True
    for seed in range(200):
        rng = random.Random(seed)
        r = gen_instance("rs", None, seed)
        w = random_word(rng, r.alphabet, rng.randint(0, 8))
        first = rs_normalize(r, w)
        ok &= all(rs_normalize(r, w, rng=random.Random(s)) == first for s in range(5))
    report("4 normal forms do not depend on rewrite order", ok)
