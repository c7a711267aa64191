import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraspace.core import (
    BoundedTMInstance,
    Graph,
    SequentialCellularInstance,
    TwoTapeTM,
)
from paraspace.generators import config_bound, gen_instance, layered_graph, random_ca, random_tm
from paraspace.machine_reductions import (
    StateTag,
    TransitionTag,
    binarize,
    ca_to_dag_ca,
    ca_to_tpg_cyclic,
    cyclic_tpg_layout,
    dagca_to_tpg,
    decode_tm_configuration,
    dtsc_from_parameterized_run,
    edge_names,
    layeredreach_to_lcs_injective,
    lcs_skeleton,
    mfa_to_dag,
    nca_to_sequential,
    normalize_for_lcs,
    normalize_unique_accepting,
    seqca_to_lcs,
    tm_hardwire_input,
    tm_space_compress,
    tm_to_ca,
    tm_to_nca,
)
from paraspace.oracles import (
    ca_step,
    graph_property,
    lcs_decide,
    lcs_injective_decide,
    run_ca,
    run_mfa,
    run_sequential,
    run_tm_bounded,
    run_tpg,
    run_two_tape,
    tm_trace,
)
from paraspace.union_reductions import ReductionError

from worked import LAYERED_STRINGS, layered_example

seeds = st.integers(0, 10**6)


# --- hard-wiring and compression


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_hardwire_copies_and_acceptance(seed):
    run = gen_instance("tm2", None, seed)
    wired = tm_hardwire_input(run.machine, run.x)
    n = max(len(run.x), 1)
    assert len(wired.states) == len(run.machine.states) * n
    assert run_tm_bounded(BoundedTMInstance(wired, run.t, run.s)) == run_two_tape(run.machine, run.x, run.t, run.s)


def test_hardwire_empty_input_is_one_copy():
    m = TwoTapeTM(("p", "q"), ("a",), ("_", "w"), (("p", "_", "_", "q", "w", "S", "R"),), "p", frozenset({"q"}), True)
    wired = tm_hardwire_input(m, ())
    assert wired.states == ("p#1", "q#1")
    assert run_tm_bounded(BoundedTMInstance(wired, 1, 2)) == run_two_tape(m, (), 1, 2) is True


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_block_size_one_is_a_renaming(seed):
    m = random_tm(random.Random(seed), 3, 2, True, 0.7)
    c = tm_space_compress(m, 1)
    assert (len(c.states), len(c.alphabet), len(c.transitions)) == (len(m.states), len(m.alphabet), len(m.transitions))
    for s in (1, 3):
        assert run_tm_bounded(BoundedTMInstance(c, 20, s)) == run_tm_bounded(BoundedTMInstance(m, 20, s))


@settings(max_examples=50, deadline=None)
@given(seeds, st.sampled_from([2, 3]), st.booleans())
def test_compression_preserves_acceptance(seed, b, det):
    rng = random.Random(seed)
    m = random_tm(rng, 3, 2, det, 0.7, 2)
    s = b * rng.randint(1, 6 // b)
    t = rng.randint(0, 25)
    c = tm_space_compress(m, b)
    assert len(c.alphabet) == len(m.alphabet) ** b
    assert run_tm_bounded(BoundedTMInstance(c, t, s // b)) == run_tm_bounded(BoundedTMInstance(m, t, s))


@pytest.mark.parametrize("s, b, blocks, effective", [(5, 2, 3, 6), (6, 3, 2, 6), (4, 1, 4, 4), (1, 3, 1, 3)])
def test_space_rounds_up_to_whole_blocks(s, b, blocks, effective):
    run = gen_instance("tm2", None, 0)
    out = dtsc_from_parameterized_run(run.machine, run.x, 10, s, b)
    assert out.s == blocks == math.ceil(s / b)
    assert out.meta["effective_s"] == effective


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 3))
def test_dtsc_matches_the_run_on_effective_space(seed, s, b):
    run = gen_instance("tm2", None, seed)
    out = dtsc_from_parameterized_run(run.machine, run.x, run.t, s, b)
    assert run_tm_bounded(out) == run_two_tape(run.machine, run.x, run.t, out.meta["effective_s"])


def test_dtsc_block_one_is_the_wired_machine():
    run = gen_instance("tm2", None, 1)
    out = dtsc_from_parameterized_run(run.machine, run.x, run.t, run.s, 1)
    assert out.machine == tm_hardwire_input(run.machine, run.x)
    assert (out.t, out.s) == (run.t, run.s)


# --- Turing machines to cellular automata


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4))
def test_tm_to_ca_configurations_correspond(seed, s):
    m = random_tm(random.Random(seed), 3, 2, True, 0.8)
    inst = tm_to_ca(m, s)
    trace = tm_trace(m, s, 20)
    conf = inst.initial
    for expected in trace:
        assert decode_tm_configuration(inst, conf) == expected
        (conf,) = ca_step(inst.automaton, conf)
    assert decode_tm_configuration(inst, conf) is None or len(trace) == 21


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 3))
def test_tm_to_ca_acceptance(seed, s):
    m = random_tm(random.Random(seed), 3, 2, True, 0.7)
    assert run_ca(tm_to_ca(m, s)) == run_tm_bounded(BoundedTMInstance(m, config_bound(m, s), s))


def test_immediately_accepting_machine():
    m = random_tm(random.Random(0), 2, 2, True, 0.5)
    m = type(m)(m.states, m.alphabet, m.transitions, m.initial, frozenset({m.initial}), True)
    inst = tm_to_ca(m, 3)
    assert inst.initial[0] in inst.automaton.accepting


def test_tm_to_ca_rejects_nondeterminism():
    with pytest.raises(ReductionError):
        tm_to_ca(random_tm(random.Random(1), 3, 2, False, 1.0, 3), 2)


def _tm_layers(m, s, steps):
    """Configuration sets of a machine after 0..steps steps."""
    layer = {(m.initial, 0, (m.blank,) * s)}
    out = [layer]
    for _ in range(steps):
        nxt = set()
        for q, h, tape in layer:
            for q2, b, d in m.delta.get((q, tape[h]), ()):
                h2 = h + {"L": -1, "S": 0, "R": 1}[d]
                if 0 <= h2 < s:
                    nxt.add((q2, h2, tape[:h] + (b,) + tape[h + 1 :]))
        layer = nxt
        out.append(layer)
    return out


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 3))
def test_two_ca_steps_per_machine_step(seed, s):
    m = random_tm(random.Random(seed), 3, 2, False, 0.7, 2)
    assert binarize(m) == m
    inst = tm_to_nca(m, s)
    confs = {inst.initial}
    for expected in _tm_layers(m, s, 4):
        decoded = {decode_tm_configuration(inst, c) for c in confs} - {None}
        assert decoded == expected
        for _ in range(2):
            confs = {c for conf in confs for c in ca_step(inst.automaton, conf)}


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 3))
def test_tm_to_nca_acceptance(seed, s):
    m = random_tm(random.Random(seed), 3, 2, False, 0.7, 3)
    assert run_ca(tm_to_nca(m, s), "nondet") == run_tm_bounded(BoundedTMInstance(m, config_bound(binarize(m), s) * 2, s))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_deterministic_machine_through_the_tagged_construction(seed, s):
    m = random_tm(random.Random(seed), 3, 2, True, 0.7)
    assert run_ca(tm_to_nca(m, s), "nondet") == run_ca(tm_to_ca(m, s))


def test_binarize_splits_wide_choices():
    m = random_tm(random.Random(3), 2, 2, False, 1.0, 3)
    b = binarize(m)
    assert all(len(v) <= 2 for v in b.delta.values())
    assert b.meta["step_factor"] == max(1, max(len(v) for v in m.delta.values()) - 1)


# --- layering


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4), st.booleans())
def test_ca_to_dag_ca(seed, t, det):
    inst = random_ca(random.Random(seed), 3, 3, det, False, 0.8)
    out = ca_to_dag_ca(inst, t)
    ca = out.automaton
    assert ca.dag
    for (l, c, r), q in ca.transitions:
        assert all(ca.order[q] > ca.order[x] for x in (l, c, r) if x is not None)
    mode = "det" if det else "nondet"
    assert run_ca(out, mode) == run_ca(inst, mode, steps=t)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 5))
def test_mfa_to_dag(seed, t):
    a = gen_instance("mfa", None, seed)
    out = mfa_to_dag(a, t)
    assert out.dag
    assert run_mfa(out) == run_mfa(a, steps=t)


# --- pebble games


@settings(max_examples=30, deadline=None)
@given(seeds, st.booleans())
def test_dag_ca_to_pebbles(seed, det):
    inst = random_ca(random.Random(seed), 3, 2, det, True, 0.7)
    norm = normalize_unique_accepting(inst)
    game = dagca_to_tpg(norm)
    assert game.cap == inst.k
    mode = "det" if det else "nondet"
    assert run_tpg(game, "max" if det else "nondet") == run_ca(inst, mode)


@settings(max_examples=30, deadline=None)
@given(seeds, st.booleans())
def test_cyclic_ca_to_pebbles(seed, det):
    inst = random_ca(random.Random(seed), 3, 2, det, False, 0.7)
    norm = normalize_unique_accepting(inst)
    layout = cyclic_tpg_layout(norm)
    q, k = len(norm.automaton.states), norm.k
    aux = len(layout.vertices("aux", 1))
    assert layout.game.graph.n == k * q + aux
    assert aux == (2 * q * q + (k - 2) * q**3 if k > 1 else q)
    mode = "det" if det else "nondet"
    assert run_tpg(ca_to_tpg_cyclic(norm), "max" if det else "nondet") == run_ca(inst, mode)


# --- layered reachability to lcs


def test_example_graph_strings():
    out = layeredreach_to_lcs_injective(layered_example())
    assert ["".join(s) for s in out.strings] == [s.replace(" ", "") for s in LAYERED_STRINGS]
    assert out.l == 2
    assert lcs_injective_decide(out) and lcs_decide(out)


def _antiparallel(g: Graph, out) -> None:
    names = dict(zip(sorted(g.edges()), edge_names(len(g.edges()))))
    pos = [{a: p for p, a in enumerate(s)} for s in out.strings]
    for layer in range(max(g.layers)):
        leaving = [names[e] for e in sorted(g.edges()) if g.layers[e[0]] == layer]
        a, b = (0, 1) if layer % 2 == 0 else (2, 3)
        for x, y in itertools.combinations(leaving, 2):
            assert (pos[a][x] < pos[a][y]) != (pos[b][x] < pos[b][y])


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_layered_reach_to_lcs(seed):
    rng = random.Random(seed)
    g = layered_graph(rng, rng.randint(2, 5), rng.randint(1, 3), rng.choice([0.3, 0.5, 0.8]))
    out = layeredreach_to_lcs_injective(g)
    assert len(out.strings) == 4
    assert all(sorted(s) == sorted(out.alphabet) for s in out.strings)
    _antiparallel(g, out)
    assert lcs_injective_decide(out) == graph_property("layered-reach", g)


def test_example_graph_is_antiparallel():
    g = layered_example()
    _antiparallel(g, layeredreach_to_lcs_injective(g))


def test_layered_input_checks():
    with pytest.raises(ReductionError):
        layeredreach_to_lcs_injective(Graph.from_edges(2, [(0, 1)]))


@pytest.mark.parametrize("count, last", [(1, "a"), (26, "z"), (27, "aa"), (28, "ab")])
def test_edge_names(count, last):
    assert edge_names(count)[-1] == last


# --- sequential automata


@settings(max_examples=50, deadline=None)
@given(seeds, st.booleans())
def test_pair_states(seed, det):
    inst = random_ca(random.Random(seed), 3, 3, det, False, 0.6)
    out = nca_to_sequential(inst)
    q = len(inst.automaton.states)
    assert len(out.automaton.states) in (q * q, q * q + q + 1)
    assert run_sequential(out) == run_ca(inst, "det" if det else "nondet")


def test_dead_cell_stays_readable():
    # cell 2 dies beside a dead cell 1 while cell 3 still needs its old state
    inst = random_ca(random.Random(870378), 3, 3, False, False, 0.6)
    assert run_sequential(nca_to_sequential(inst)) == run_ca(inst, "nondet") is True


@settings(max_examples=50, deadline=None)
@given(seeds, st.booleans())
def test_single_cell_semantics_coincide(seed, det):
    inst = random_ca(random.Random(seed), 3, 1, det, False, 0.6)
    seq = SequentialCellularInstance(inst.automaton, inst.initial)
    assert run_sequential(seq) == run_ca(inst, "det" if det else "nondet")


def _sequential_step(ca, conf):
    conf = list(conf)
    for i in range(len(conf)):
        w = (conf[i - 1] if i else None, conf[i], conf[i + 1] if i + 1 < len(conf) else None)
        (conf[i],) = ca.successors(w)
    return tuple(conf)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_sequential_trace_projects_to_parallel_trace(seed):
    inst = random_ca(random.Random(seed), 3, 3, True, False, 1.0)
    out = nca_to_sequential(inst)
    par, seq = inst.initial, out.initial
    for _ in range(6):
        assert tuple(c.split(">")[1] for c in seq) == par
        (par,) = ca_step(inst.automaton, par)
        seq = _sequential_step(out.automaton, seq)


def _witness(inst: SequentialCellularInstance):
    """Transition tags of one run of exactly ``horizon`` major steps, or None."""
    ca, k = inst.automaton, inst.k
    ranks = {((l, o, r), n): i for i, ((l, o, r), n) in enumerate(ca.transitions)}

    def go(conf, s, i, path):
        if s > inst.horizon:
            return path
        l = conf[i - 2] if i > 1 else None
        r = conf[i] if i < k else None
        for n in ca.successors((l, conf[i - 1], r)):
            tag = TransitionTag((l, conf[i - 1], r, n), s, i, ranks[((l, conf[i - 1], r), n)])
            nxt = conf[: i - 1] + (n,) + conf[i:]
            found = go(nxt, s + (i == k), 1 if i == k else i + 1, path + [tag])
            if found is not None:
                return found
        return None

    return go(inst.initial, 1, 1, [])


def _is_subsequence(w, s) -> bool:
    it = iter(s)
    return all(a in it for a in w)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_seqca_to_lcs_shape_and_witness(seed):
    rng = random.Random(seed)
    base = random_ca(rng, rng.randint(1, 3), rng.randint(1, 3), False, False, 0.6)
    inst = SequentialCellularInstance(base.automaton, base.initial, horizon=rng.randint(0, 3))
    out = seqca_to_lcs(inst)
    assert len(out.strings) == 4 * inst.k and out.l == inst.horizon * inst.k
    run = _witness(inst)
    assert (run is not None) == run_sequential(inst) == lcs_decide(out)
    if run is not None:
        names = [g.name for g in run]
        assert all(_is_subsequence(names, s) for s in out.strings)


def test_skeleton_needs_a_horizon():
    base = random_ca(random.Random(0), 2, 2, False, False, 0.6)
    with pytest.raises(ReductionError):
        lcs_skeleton(SequentialCellularInstance(base.automaton, base.initial))


@pytest.mark.xfail(strict=True, reason="strings group tags under per-state markers, so earlier steps can follow later ones")
def test_real_positions_follow_step_order():
    for seed in range(20):
        rng = random.Random(seed)
        base = random_ca(rng, rng.randint(1, 3), rng.randint(1, 3), False, False, 0.5)
        inst = SequentialCellularInstance(base.automaton, base.initial, horizon=rng.randint(1, 3))
        for s in lcs_skeleton(inst):
            real = [g for g, origin in s if isinstance(g, TransitionTag) and origin != "rule7"]
            for a, b in itertools.combinations(real, 2):
                assert (b.s, b.i) >= (a.s, a.i)


def test_skeleton_markers_are_dropped():
    inst = SequentialCellularInstance(*_seq_parts(1), horizon=2)
    sk = lcs_skeleton(inst)
    assert any(isinstance(g, StateTag) for s in sk for g, _ in s)
    assert all(len(s) == sum(isinstance(g, TransitionTag) for g, _ in k) for s, k in zip(seqca_to_lcs(inst).strings, sk))


def _seq_parts(seed):
    base = random_ca(random.Random(seed), 2, 2, False, False, 0.6)
    return base.automaton, base.initial


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_normalized_instances(seed):
    rng = random.Random(seed)
    base = random_ca(rng, 3, rng.randint(1, 3), False, True, 0.6)
    seq = nca_to_sequential(base)
    norm = normalize_for_lcs(seq)
    assert norm.horizon is not None and norm.automaton.accepting == {norm.automaton.meta["unique_accepting"]}
    assert run_sequential(norm) == run_sequential(seq) == run_ca(base, "nondet")


def test_cyclic_automata_need_a_bound():
    seq = nca_to_sequential(random_ca(random.Random(0), 2, 2, False, False, 0.6))
    with pytest.raises(ReductionError):
        normalize_for_lcs(seq)
