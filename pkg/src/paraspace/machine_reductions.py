"""Reductions between machine models.

Naming scheme for generated states and symbols:

* hard-wired copies of a state: ``q#i`` (input head on position i, from 1)
* compressed machines: state ``q@o`` (offset o in the block), block
  symbol ``(a,b,c)``
* Turing machine cells: ``q/a`` (head here), ``⊥/a`` (head elsewhere),
  tagged heads ``q:0/a`` and ``q:1/a``
* layered copies: ``q^i``
* sequential pairs: ``p>q`` (previous, current)
* normalization states ``⊤`` (accepting sink) and ``✝``, ``✝1``, ``✝2``,
  ... (cells that are dying)
* layered-graph edges: ``a`` .. ``z``, ``aa``, ``ab``, ...
* transition tags ``[l,o,r>n]@s.i`` with ``-`` for a missing neighbour
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    MOVES,
    BoundedTMInstance,
    CellularAutomaton,
    CellularInstance,
    Graph,
    LcsInstance,
    MultiHeadAutomaton,
    SequentialCellularInstance,
    SingleTapeTM,
    ThresholdPebbleGame,
    TwoTapeTM,
)
from .union_reductions import ReductionError, _fresh

# ---------------------------------------------------------------------------
# Turing machine compression


def tm_hardwire_input(m: TwoTapeTM, x: Sequence[str]) -> SingleTapeTM:
    """One copy of the state set per input head position, input symbol fixed per copy."""
    x = tuple(x)
    n = max(len(x), 1)
    if not set(x) <= set(m.input_alphabet):
        raise ReductionError("input word uses symbols outside the input alphabet")

    def name(q: str, i: int) -> str:
        return f"{q}#{i + 1}"

    trans = []
    for q, a, w, q2, w2, mi, mw in m.transitions:
        for i in range(n):
            seen = x[i] if i < len(x) else m.blank
            j = i + MOVES[mi]
            if seen == a and 0 <= j < n:
                trans.append((name(q, i), w, name(q2, j), w2, mw))
    out = SingleTapeTM(
        tuple(name(q, i) for i in range(n) for q in m.states),
        m.work_alphabet,
        tuple(trans),
        name(m.initial, 0),
        frozenset(name(q, i) for q in m.accepting for i in range(n)),
        m.deterministic,
        {"copies": n},
    )
    assert len(out.states) == len(m.states) * n
    return out


def _block_name(block: Sequence[str]) -> str:
    return "(" + ",".join(block) + ")"


def tm_space_compress(m: SingleTapeTM, b: int) -> SingleTapeTM:
    """Pack b cells into one symbol; the offset inside the block moves into the state.

    A step of the compressed machine is one step of m, so the time bound is
    unchanged.  The compressed tape of ceil(s/b) cells holds b*ceil(s/b)
    original cells, recorded as ``effective_s`` by the callers.
    """
    if b < 1:
        raise ReductionError("block size must be at least 1")
    blocks = list(itertools.product(m.alphabet, repeat=b))

    def st(q: str, o: int) -> str:
        return f"{q}@{o}"

    trans = []
    for q in m.states:
        for o in range(b):
            for blk in blocks:
                for q2, w, mv in m.delta.get((q, blk[o]), ()):
                    new = blk[:o] + (w,) + blk[o + 1 :]
                    o2 = o + MOVES[mv]
                    if o2 == b:
                        trans.append((st(q, o), _block_name(blk), st(q2, 0), _block_name(new), "R"))
                    elif o2 < 0:
                        trans.append((st(q, o), _block_name(blk), st(q2, b - 1), _block_name(new), "L"))
                    else:
                        trans.append((st(q, o), _block_name(blk), st(q2, o2), _block_name(new), "S"))
    out = SingleTapeTM(
        tuple(st(q, o) for q in m.states for o in range(b)),
        tuple(_block_name(blk) for blk in blocks),
        tuple(trans),
        st(m.initial, 0),
        frozenset(st(q, o) for q in m.accepting for o in range(b)),
        m.deterministic,
        {"block": b, "step_factor": 1},
    )
    assert len(out.alphabet) == len(m.alphabet) ** b
    return out


def dtsc_from_parameterized_run(m: TwoTapeTM, x: Sequence[str], t: int, s: int, b: int) -> BoundedTMInstance:
    """Hard-wire x, then compress blocks of b cells; the space bound becomes ceil(s/b)."""
    if b < 1:
        raise ReductionError("block size must be at least 1")
    wired = tm_hardwire_input(m, x)
    machine = wired if b == 1 else tm_space_compress(wired, b)
    s2 = math.ceil(s / b)
    out = BoundedTMInstance(machine, t, s2, {"effective_s": b * s2, "block": b})
    assert out.s == math.ceil(s / b)
    return out


# ---------------------------------------------------------------------------
# Turing machines to cellular automata


def _windows(states: Sequence[str], cells: int):
    """All windows a cell of a ``cells``-cell array can see."""
    shapes = set()
    for i in range(cells):
        shapes.add((i > 0, i < cells - 1))
    for has_l, has_r in sorted(shapes):
        for l in states if has_l else (None,):
            for c in states:
                for r in states if has_r else (None,):
                    yield l, c, r


def _bottom(m: SingleTapeTM) -> str:
    return _fresh("⊥", set(m.states))


def tm_to_ca(m: SingleTapeTM, s: int) -> CellularInstance:
    """One cell per tape cell; one global step per machine step."""
    if not m.deterministic:
        raise ReductionError("tm_to_ca needs a deterministic machine; use tm_to_nca")
    if s < 1:
        raise ReductionError("need at least one cell")
    bot = _bottom(m)
    heads = {f"{q}/{a}": (q, a) for q in m.states for a in m.alphabet}
    idle = {f"{bot}/{a}": a for a in m.alphabet}
    states = tuple(heads) + tuple(idle)

    def head_move(st):
        if st is None or st not in heads:
            return None
        moves = m.delta.get(heads[st], ())
        return moves[0] if moves else None

    trans = []
    for l, c, r in _windows(states, s):
        if sum(1 for x in (l, c, r) if x in heads) > 1:
            continue
        if c in heads:
            mv = head_move(c)
            if mv is None:
                continue
            q2, b, d = mv
            if d == "S":
                trans.append(((l, c, r), f"{q2}/{b}"))
            elif (d == "L" and l is not None) or (d == "R" and r is not None):
                trans.append(((l, c, r), f"{bot}/{b}"))
            continue
        a = idle[c]
        new = c
        ml, mr = head_move(l), head_move(r)
        if ml is not None and ml[2] == "R":
            new = f"{ml[0]}/{a}"
        elif mr is not None and mr[2] == "L":
            new = f"{mr[0]}/{a}"
        trans.append(((l, c, r), new))
    decode = {st: (q, a) for st, (q, a) in heads.items()}
    decode.update({st: (None, a) for st, a in idle.items()})
    ca = CellularAutomaton(
        states,
        tuple(trans),
        frozenset(f"{q}/{a}" for q in m.accepting for a in m.alphabet),
        True,
        meta={"decode": decode, "step_factor": 1},
    )
    initial = (f"{m.initial}/{m.blank}",) + (f"{bot}/{m.blank}",) * (s - 1)
    return CellularInstance(ca, initial, {"decode": decode})


def decode_tm_configuration(inst: CellularInstance, conf: Sequence[str | None]):
    """Read a state string of ``tm_to_ca`` or ``tm_to_nca`` back as (state, head, tape)."""
    decode = inst.automaton.meta["decode"]
    q, head, tape = None, None, []
    for i, c in enumerate(conf):
        if c is None:
            return None
        sq, a = decode[c]
        tape.append(a)
        if sq is not None:
            if head is not None:
                return None
            q, head = sq, i
    return q, head, tuple(tape)


def binarize(m: SingleTapeTM) -> SingleTapeTM:
    """Split every choice among n >= 3 moves into a chain of n-1 binary choices.

    The chain states write back the symbol they read and stay put, so one
    original step costs at most n-1 steps.
    """
    taken = set(m.states)
    trans = []
    extra: list[str] = []
    factor = 1
    for (q, a), moves in sorted(m.delta.items()):
        if len(moves) <= 2:
            trans += [(q, a, q2, b, d) for q2, b, d in moves]
            continue
        factor = max(factor, len(moves) - 1)
        chain = [_fresh(f"{q}~{a}~{j}", taken) for j in range(1, len(moves) - 1)]
        extra += chain
        cur = q
        for j, nxt in enumerate(chain):
            q2, b, d = moves[j]
            trans.append((cur, a, q2, b, d))
            trans.append((cur, a, nxt, a, "S"))
            cur = nxt
        for q2, b, d in moves[-2:]:
            trans.append((cur, a, q2, b, d))
    out = SingleTapeTM(
        m.states + tuple(extra),
        m.alphabet,
        tuple(trans),
        m.initial,
        m.accepting,
        m.deterministic,
        {"aux_states": len(extra), "step_factor": factor},
    )
    assert all(len(v) <= 2 for v in out.delta.values())
    return out


def tm_to_nca(m: SingleTapeTM, s: int) -> CellularInstance:
    """Tagged construction: a head cell first picks a tag, then everyone moves by it.

    Two global steps simulate one step of the binarized machine.
    """
    if s < 1:
        raise ReductionError("need at least one cell")
    mb = binarize(m)
    bot = _bottom(mb)
    plain = {f"{q}/{a}": (q, a) for q in mb.states for a in mb.alphabet}
    tagged = {}
    for (q, a), moves in mb.delta.items():
        for i, mv in enumerate(moves):
            tagged[f"{q}:{i}/{a}"] = (q, a, mv)
    idle = {f"{bot}/{a}": a for a in mb.alphabet}
    states = tuple(plain) + tuple(sorted(tagged)) + tuple(idle)

    trans = []
    for l, c, r in _windows(states, s):
        if sum(1 for x in (l, c, r) if x is not None and x not in idle) > 1:
            continue
        if c in plain:
            q, a = plain[c]
            for i in range(len(mb.delta.get((q, a), ()))):
                trans.append(((l, c, r), f"{q}:{i}/{a}"))
            continue
        if c in tagged:
            _, _, (q2, b, d) = tagged[c]
            if d == "S":
                trans.append(((l, c, r), f"{q2}/{b}"))
            elif (d == "L" and l is not None) or (d == "R" and r is not None):
                trans.append(((l, c, r), f"{bot}/{b}"))
            continue
        a = idle[c]
        new = c
        if l in tagged and tagged[l][2][2] == "R":
            new = f"{tagged[l][2][0]}/{a}"
        elif r in tagged and tagged[r][2][2] == "L":
            new = f"{tagged[r][2][0]}/{a}"
        trans.append(((l, c, r), new))
    decode = {st: qa for st, qa in plain.items()}
    decode.update({st: (q, a) for st, (q, a, _) in tagged.items()})
    decode.update({st: (None, a) for st, a in idle.items()})
    accepting = {st for st, (q, _) in plain.items() if q in mb.accepting}
    accepting |= {st for st, (q, _, _) in tagged.items() if q in mb.accepting}
    ca = CellularAutomaton(
        states,
        tuple(trans),
        frozenset(accepting),
        all(len(v) == 1 for v in mb.delta.values()),
        meta={
            "decode": decode,
            "aux_states": mb.meta["aux_states"],
            "step_factor": 2 * mb.meta["step_factor"],
        },
    )
    initial = (f"{mb.initial}/{mb.blank}",) + (f"{bot}/{mb.blank}",) * (s - 1)
    return CellularInstance(ca, initial, {"decode": decode})


# ---------------------------------------------------------------------------
# layering


def _copy(q: str, i: int) -> str:
    return f"{q}^{i}"


def ca_to_dag_ca(inst: CellularInstance, t: int) -> CellularInstance:
    """t+1 copies of the state set; every transition moves to the next copy."""
    if t < 1:
        raise ReductionError("need t >= 1")
    ca = inst.automaton
    states = tuple(_copy(q, i) for i in range(1, t + 2) for q in ca.states)
    trans = []
    for i in range(1, t + 1):
        for (l, c, r), q in ca.transitions:
            w = tuple(None if x is None else _copy(x, i) for x in (l, c, r))
            trans.append((w, _copy(q, i + 1)))
    out = CellularAutomaton(
        states,
        tuple(trans),
        frozenset(_copy(q, i) for q in ca.accepting for i in range(1, t + 2)),
        ca.deterministic,
        dag=True,
        meta={"layers": t + 1},
    )
    return CellularInstance(out, tuple(_copy(q, 1) for q in inst.initial))


def mfa_to_dag(a: MultiHeadAutomaton, t: int) -> MultiHeadAutomaton:
    """The same layering for multi-head automata: accept within t steps."""
    if t < 1:
        raise ReductionError("need t >= 1")
    trans = [
        (_copy(q, i), obs, _copy(q2, i + 1), mv)
        for i in range(1, t + 1)
        for q, obs, q2, mv in a.transitions
    ]
    return MultiHeadAutomaton(
        tuple(_copy(q, i) for i in range(1, t + 2) for q in a.states),
        a.heads,
        tuple(trans),
        _copy(a.initial, 1),
        frozenset(_copy(q, i) for q in a.accepting for i in range(1, t + 2)),
        a.word,
        dag=True,
    )


# ---------------------------------------------------------------------------
# pebble games


def normalize_unique_accepting(inst: CellularInstance) -> CellularInstance:
    """Make "every cell is ⊤" the only accepting configuration.

    A cell that is accepting or sees ⊤ becomes ⊤ and stays there.  Missing
    successors and dead neighbours lead to ✝, which also persists, so no
    cell ever dies.  The automaton accepts iff the input does.
    """
    ca = inst.automaton
    taken = set(ca.states)
    dead = _fresh("✝", taken)
    top = _fresh("⊤", taken)
    states = ca.states + (dead, top)
    trans = []
    for l, c, r in _windows(states, inst.k):
        if top in (l, c, r) or c in ca.accepting:
            trans.append(((l, c, r), top))
        elif dead in (l, c, r):
            trans.append(((l, c, r), dead))
        else:
            succ = ca.successors((l, c, r)) or (dead,)
            trans += [((l, c, r), q) for q in succ]
    out = CellularAutomaton(
        states,
        tuple(trans),
        frozenset({top}),
        ca.deterministic,
        meta={"unique_accepting": top, "orig_states": len(ca.states), "source_dag": ca.dag},
    )
    return CellularInstance(out, inst.initial, {"unique_accepting": top})


@dataclass(frozen=True)
class PebbleLayout:
    """A pebble game with the meaning of every vertex."""

    game: ThresholdPebbleGame
    labels: tuple[tuple, ...]

    def vertices(self, kind: str, layer: int) -> list[int]:
        return [v for v, lab in enumerate(self.labels) if lab[0] == kind and lab[1] == layer]


def _target(inst: CellularInstance, target: Sequence[str] | None) -> tuple[str, ...]:
    if target is not None:
        target = tuple(target)
        if len(target) != inst.k or not set(target) <= set(inst.automaton.states):
            raise ReductionError("target must be a state string of the instance's length")
        return target
    top = inst.automaton.meta.get("unique_accepting")
    if top is None:
        raise ReductionError("no unique accepting configuration; normalize the automaton first")
    return (top,) * inst.k


def _aux_windows(states: Sequence[str], k: int, c: int):
    """Windows of cell c, leftmost component varying fastest."""
    comps = ([None] if c == 0 else list(states), list(states), [None] if c == k - 1 else list(states))
    for r, mid, l in itertools.product(comps[2], comps[1], comps[0]):
        yield l, mid, r


def tpg_layout(inst: CellularInstance, t: int | None = None, target: Sequence[str] | None = None) -> PebbleLayout:
    """t main layers of k blocks of |Q| vertices, one auxiliary layer between neighbours."""
    ca, k = inst.automaton, inst.k
    goal = _target(inst, target)
    if t is None:
        meta = ca.meta
        if meta.get("unique_accepting") and meta.get("source_dag"):
            t = meta["orig_states"] + k
        elif ca.dag:
            t = len(ca.states)
        else:
            raise ReductionError("automaton is not a dag automaton; pass the layer count t")
    if t < 1:
        raise ReductionError("need t >= 1")
    labels: list[tuple] = []
    index: dict[tuple, int] = {}
    thresholds: list[int] = []
    edges: list[tuple[int, int]] = []

    def add(label: tuple, threshold: int) -> int:
        index[label] = len(labels)
        labels.append(label)
        thresholds.append(threshold)
        return index[label]

    for layer in range(1, t + 1):
        for c in range(k):
            for q in ca.states:
                add(("main", layer, c + 1, q), 1)
        if layer == 1:
            continue
        for c in range(k):
            for w in _aux_windows(ca.states, k, c):
                present = [(c + d, q) for d, q in zip((-1, 0, 1), w) if q is not None]
                v = add(("aux", layer - 1, c + 1, w), len(present))
                for cc, q in present:
                    edges.append((index[("main", layer - 1, cc + 1, q)], v))
                for q in ca.successors(w):
                    edges.append((v, index[("main", layer, c + 1, q)]))
    graph = Graph.from_edges(len(labels), edges, directed=True)
    S = {index[("main", 1, c + 1, q)] for c, q in enumerate(inst.initial)}
    T = {index[("main", t, c + 1, q)] for c, q in enumerate(goal)}
    game = ThresholdPebbleGame(graph, tuple(thresholds), frozenset(S), frozenset(T), dag=True, cap=k)
    assert game.cap == k
    return PebbleLayout(game, tuple(labels))


def dagca_to_tpg(inst: CellularInstance, t: int | None = None, target: Sequence[str] | None = None) -> ThresholdPebbleGame:
    return tpg_layout(inst, t, target).game


def cyclic_tpg_layout(inst: CellularInstance, target: Sequence[str] | None = None) -> PebbleLayout:
    """One main layer and one auxiliary layer whose edges lead back to it."""
    ca, k = inst.automaton, inst.k
    goal = _target(inst, target)
    labels: list[tuple] = []
    index: dict[tuple, int] = {}
    thresholds: list[int] = []
    edges: list[tuple[int, int]] = []
    for c in range(k):
        for q in ca.states:
            index[("main", 1, c + 1, q)] = len(labels)
            labels.append(("main", 1, c + 1, q))
            thresholds.append(1)
    for c in range(k):
        for w in _aux_windows(ca.states, k, c):
            present = [(c + d, q) for d, q in zip((-1, 0, 1), w) if q is not None]
            v = len(labels)
            labels.append(("aux", 1, c + 1, w))
            thresholds.append(len(present))
            for cc, q in present:
                edges.append((index[("main", 1, cc + 1, q)], v))
            for q in ca.successors(w):
                edges.append((v, index[("main", 1, c + 1, q)]))
    graph = Graph.from_edges(len(labels), edges, directed=True)
    S = {index[("main", 1, c + 1, q)] for c, q in enumerate(inst.initial)}
    T = {index[("main", 1, c + 1, q)] for c, q in enumerate(goal)}
    game = ThresholdPebbleGame(graph, tuple(thresholds), frozenset(S), frozenset(T), dag=False, cap=k)
    assert game.cap == k
    return PebbleLayout(game, tuple(labels))


def ca_to_tpg_cyclic(inst: CellularInstance, target: Sequence[str] | None = None) -> ThresholdPebbleGame:
    return cyclic_tpg_layout(inst, target).game


# ---------------------------------------------------------------------------
# layered reachability to injective lcs


def edge_names(count: int) -> list[str]:
    """a, b, ..., z, aa, ab, ... in order."""
    out = []
    width = 1
    while len(out) < count:
        for combo in itertools.product("abcdefghijklmnopqrstuvwxyz", repeat=width):
            out.append("".join(combo))
            if len(out) == count:
                break
        width += 1
    return out


def layeredreach_to_lcs_injective(g: Graph) -> LcsInstance:
    """Four p-sequences over the edges; a common subsequence of length m-1 is an s-t path."""
    if g.layers is None or not g.directed:
        raise ReductionError("need a directed layered graph")
    if g.n == 0:
        raise ReductionError("empty layered graph")
    m = max(g.layers) + 1
    for v, layer in ((g.s, 0), (g.t, m - 1)):
        if v is not None and (g.layers[v] != layer or g.layers.count(layer) != 1):
            raise ReductionError("malformed layering: s and t must be alone on the first and last layer")
    edges = sorted(g.edges())
    names = dict(zip(edges, edge_names(len(edges))))
    incoming = {v: [e for e in edges if e[1] == v] for v in range(g.n)}
    outgoing = {v: [e for e in edges if e[0] == v] for v in range(g.n)}
    strings: list[list[str]] = [[], [], [], []]
    for layer in range(m):
        vs = [v for v in range(g.n) if g.layers[v] == layer]
        fwd, bwd = (0, 1) if layer % 2 == 0 else (2, 3)
        for v in vs:
            strings[fwd] += [names[e] for e in incoming[v] + outgoing[v]]
        for v in reversed(vs):
            strings[bwd] += [names[e] for e in reversed(incoming[v])] + [names[e] for e in reversed(outgoing[v])]
    out = LcsInstance(tuple(names[e] for e in edges), tuple(map(tuple, strings)), m - 1)
    assert len(out.strings) == 4 and out.injective
    return out


# ---------------------------------------------------------------------------
# sequential automata and lcs


def _pair(p: str, q: str) -> str:
    return f"{p}>{q}"


def nca_to_sequential(inst: CellularInstance) -> SequentialCellularInstance:
    """Cells remember their previous state, so a left neighbour can be read as it was.

    When the transition relation is partial, a cell without successor moves
    to ``p>✝``: dead now, previous state p still readable by its right
    neighbour.  At its next update it becomes ``✝>✝`` and stays there, so a
    dead cell never vanishes while a live cell to its right still reads it.
    """
    ca, k = inst.automaton, inst.k
    Q = ca.states
    partial = any(not ca.successors(w) for w in _windows(Q, k))
    dead = _fresh("✝", set(Q))
    gone = _pair(dead, dead)
    states = [_pair(p, q) for p in Q for q in Q]
    split = {_pair(p, q): (p, q) for p in Q for q in Q}
    if partial:
        states += [_pair(p, dead) for p in Q] + [gone]
        split.update({_pair(p, dead): (p, dead) for p in Q})
        split[gone] = (dead, dead)
    trans = []
    for left, mid, right in _windows(states, k):
        _, o = split[mid]
        if o == dead:
            trans.append(((left, mid, right), gone))
            continue
        r = None if right is None else split[right][1]
        l = None if left is None else split[left][0]
        if dead in (l, r):
            trans.append(((left, mid, right), _pair(o, dead)))
            continue
        succ = ca.successors((l, o, r))
        for n in succ or (dead,):
            trans.append(((left, mid, right), _pair(o, n)))
    out = CellularAutomaton(
        tuple(states),
        tuple(trans),
        frozenset(_pair(p, q) for p in Q for q in ca.accepting),
        ca.deterministic,
        meta={
            "pairs": True,
            "dead": (gone,) if partial else (),
            "major_step_bound": len(Q) + 2 if ca.dag else None,
        },
    )
    return SequentialCellularInstance(out, tuple(_pair(q, q) for q in inst.initial), {"source_cells": k})


def normalize_for_lcs(inst: SequentialCellularInstance, bound: int | None = None) -> SequentialCellularInstance:
    """Turn "some cell gets accepting" into "a run of exactly T major steps exists".

    ``bound`` caps the major steps during which the input can have live
    cells.  An accepting cell becomes ⊤, ⊤ spreads to the neighbours and
    persists.  A cell that would die counts down through ✝1..✝m instead, so
    that a later ⊤ can still rescue it; after ✝m it dies for good.  With
    m = bound + k + 1 and T = bound + m + 1 every rejecting run dies before
    T while every accepting run fills the array with ⊤ in time.
    """
    ca, k = inst.automaton, inst.k
    if bound is None:
        bound = ca.meta.get("major_step_bound")
    if bound is None:
        if not ca.dag:
            raise ReductionError("unbounded automaton: pass the major step bound")
        bound = len(ca.states)
    m = bound + k + 1
    horizon = bound + m + 1
    taken = set(ca.states)
    dying = [_fresh(f"✝{j}", taken) for j in range(1, m + 1)]
    top = _fresh("⊤", taken)
    nxt = {d: dying[j + 1] for j, d in enumerate(dying[:-1])}
    dying_set = set(dying)
    # cells the source already keeps as permanently dead
    gone = set(ca.meta.get("dead", ()))
    states = ca.states + tuple(dying) + (top,)
    trans = []
    for l, c, r in _windows(states, k):
        w = (l, c, r)
        if top in w or c in ca.accepting:
            trans.append((w, top))
        elif c in nxt:
            trans.append((w, nxt[c]))
        elif c in dying:
            continue
        elif c in gone or l in dying_set or r in dying_set:
            trans.append((w, dying[0]))
        else:
            trans += [(w, q) for q in ca.successors(w) or (dying[0],)]
    out = CellularAutomaton(
        states,
        tuple(trans),
        frozenset({top}),
        ca.deterministic,
        meta={"bound": bound, "countdown": m, "unique_accepting": top},
    )
    return SequentialCellularInstance(out, inst.initial, {"bound": bound}, horizon=horizon)


@dataclass(frozen=True)
class StateTag:
    """Conceptual marker: state q just before major step s."""

    q: str
    s: int


@dataclass(frozen=True)
class TransitionTag:
    """Symbol (f, s, i): cell i applies f = (left, old, right, new) in major step s."""

    f: tuple[str | None, str, str | None, str]
    s: int
    i: int
    rank: int

    @property
    def key(self) -> tuple[int, int, int]:
        return self.s, self.i, self.rank

    @property
    def name(self) -> str:
        l, o, r, n = ("-" if x is None else x for x in self.f)
        return f"[{l},{o},{r}>{n}]@{self.s}.{self.i}"


START = "start"


def _cell_transitions(ca: CellularAutomaton, k: int, i: int):
    """Transitions (with their rank) applicable to cell i of k."""
    for rank, ((l, o, r), n) in enumerate(ca.transitions):
        if (l is None) == (i == 1) and (r is None) == (i == k):
            yield rank, (l, o, r, n)


def lcs_skeleton(inst: SequentialCellularInstance, t: int | None = None) -> list[list[tuple[object, str]]]:
    """The 4k strings before markers are dropped, each item paired with its origin.

    Origins are ``marker``, ``start``, ``rule1`` .. ``rule7``.  Strings are
    ordered s_1^1, s_2^1, s_3^1, s_4^1, s_1^2, ...
    """
    ca, k = inst.automaton, inst.k
    if t is None:
        t = inst.horizon
    if t is None:
        raise ReductionError("automaton not normalized: no horizon")
    if inst.horizon is not None and inst.horizon != t:
        raise ReductionError("t differs from the instance's horizon")
    Q = ca.states
    tags = [
        TransitionTag(f, s, i, rank)
        for s in range(1, t + 1)
        for i in range(1, k + 1)
        for rank, f in _cell_transitions(ca, k, i)
    ]
    # (f, s, i) in lexicographic order: transition rank first
    order = sorted(tags, key=lambda g: (g.rank, g.s, g.i))

    def pair(s: int) -> tuple[int, int]:
        return (0, 1) if s % 2 else (2, 3)

    slots: dict[tuple, dict[str, list]] = {}

    def slot(cell: int, j: int, s: int, q: str) -> dict[str, list]:
        key = (cell, j, s, q)
        if key not in slots:
            slots[key] = {"before": [], "rule5": [], "rule6": [], "own": []}
        return slots[key]

    for g in order:
        slot(g.i, pair(g.s)[0], g.s, g.f[1])["own"].insert(0, (g, "rule1"))
    for g in reversed(order):
        slot(g.i, pair(g.s)[1], g.s, g.f[1])["own"].insert(0, (g, "rule2"))
    for g in order:
        slot(g.i, pair(g.s + 1)[0], g.s + 1, g.f[3])["before"].append((g, "rule3"))
    for g in reversed(order):
        slot(g.i, pair(g.s + 1)[1], g.s + 1, g.f[3])["before"].append((g, "rule4"))
    for g in order:
        if g.i > 1:
            for j in pair(g.s + 1):
                slot(g.i - 1, j, g.s + 1, g.f[0])["rule5"].insert(0, (g, "rule5"))
    for g in order:
        if g.i < k:
            for j in pair(g.s):
                slot(g.i + 1, j, g.s, g.f[2])["rule6"].insert(0, (g, "rule6"))

    everything = sorted(tags, key=lambda g: g.key)
    out = []
    for cell in range(1, k + 1):
        for j in range(4):
            items: list[tuple[object, str]] = [(START, "start")]
            for s in range(1, t + 2):
                if pair(s)[0] != j and pair(s)[1] != j:
                    continue
                for q in Q if j % 2 == 0 else reversed(Q):
                    sl = slots.get((cell, j, s, q), {"before": [], "rule5": [], "rule6": [], "own": []})
                    items += sl["before"]
                    items.append((StateTag(q, s), "marker"))
                    # rule 5 symbols belong to the earlier major step, so they sit
                    # nearest to the marker, then rule 6, then rules 1-2
                    items += sl["rule5"] + sl["rule6"] + sl["own"]
            present = {g for g, _ in items if isinstance(g, TransitionTag)}
            X = [(g, "rule7") for g in everything if g not in present]
            filled = []
            for item in items:
                filled.append(item)
                filled += X
            if j < 2:
                first = StateTag(inst.initial[cell - 1], 1)
                cut = next(p for p, (g, _) in enumerate(filled) if g == first)
                filled = filled[cut:]
            out.append(filled)
    assert len(out) == 4 * k
    return out


def seqca_to_lcs(inst: SequentialCellularInstance, t: int | None = None) -> LcsInstance:
    """4k strings over transition tags; a common subsequence of length t*k is an accepting run."""
    skeleton = lcs_skeleton(inst, t)
    t = inst.horizon if t is None else t
    k = inst.k
    strings = tuple(tuple(g.name for g, _ in s if isinstance(g, TransitionTag)) for s in skeleton)
    names = {}
    for s in skeleton:
        for g, _ in s:
            if isinstance(g, TransitionTag):
                names[g.key] = g.name
    alphabet = tuple(names[key] for key in sorted(names))
    out = LcsInstance(alphabet, strings, t * k)
    assert len(out.strings) == 4 * k and out.l == t * k
    return out


__all__ = [
    "PebbleLayout",
    "StateTag",
    "TransitionTag",
    "binarize",
    "ca_to_dag_ca",
    "ca_to_tpg_cyclic",
    "cyclic_tpg_layout",
    "dagca_to_tpg",
    "decode_tm_configuration",
    "dtsc_from_parameterized_run",
    "edge_names",
    "layeredreach_to_lcs_injective",
    "lcs_skeleton",
    "mfa_to_dag",
    "nca_to_sequential",
    "normalize_for_lcs",
    "normalize_unique_accepting",
    "seqca_to_lcs",
    "tm_hardwire_input",
    "tm_space_compress",
    "tm_to_ca",
    "tm_to_nca",
    "tpg_layout",
]
