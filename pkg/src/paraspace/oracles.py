"""Brute-force reference deciders for every problem kind.

Every nondeterministic search is an explicit breadth-first search with a
node budget.  Running out of budget raises :class:`BudgetExceeded`; it is
never reported as a "no".
"""

from __future__ import annotations

import enum
import itertools
import math
import os
import random
from collections import deque
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    MOVES,
    BooleanFormula,
    BoundedTMInstance,
    CellularInstance,
    FamilyUnionInstance,
    GeneratorInstance,
    Graph,
    GraphPropertyKind,
    InstantiationWord,
    LcsInstance,
    LEFT_END,
    MultiHeadAutomaton,
    ReplacementSystem,
    RIGHT_END,
    SubsetUnionInstance,
    TemplateWord,
    ThresholdPebbleGame,
    WeightedUnionInstance,
    Word,
    decode_agen,
    decode_bf,
    decode_graph,
    union_instantiations,
)

BUDGET_ENV = "PARASPACE_BUDGET"
DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    pass


class NonTermination(RuntimeError):
    pass


def default_budget() -> int:
    value = os.environ.get(BUDGET_ENV)
    return int(value) if value else DEFAULT_BUDGET


def _budget(budget: int | None) -> int:
    return default_budget() if budget is None else budget


class UnionVariant(str, enum.Enum):
    FAMILY = "family"
    SUBSET = "subset"
    WEIGHTED = "weighted"


# ---------------------------------------------------------------------------
# formulas and graphs


def eval_bf(f: BooleanFormula, a: Sequence[int | str]) -> bool:
    if len(a) != f.m:
        raise ValueError(f"formula has {f.m} variables, assignment has {len(a)}")
    bits = [int(b) for b in a]

    def ev(node) -> bool:
        tag = node[0]
        if tag == "var":
            return bool(bits[node[1]])
        if tag == "const":
            return node[1]
        if tag == "not":
            return not ev(node[1])
        if tag == "imp":
            return (not ev(node[1])) or ev(node[2])
        if tag == "and":
            return all(ev(x) for x in node[1])
        return any(ev(x) for x in node[1])

    return ev(f.root)


def _reachable(g: Graph, src: int) -> set[int]:
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in g.successors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _has_directed_cycle(g: Graph) -> bool:
    color = [0] * g.n
    for root in range(g.n):
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(g.successors(root)))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if color[v] == 1:
                    return True
                if color[v] == 0:
                    color[v] = 1
                    stack.append((v, iter(g.successors(v))))
                    break
            else:
                color[u] = 2
                stack.pop()
    return False


def _components(g: Graph) -> int:
    seen: set[int] = set()
    count = 0
    for v in range(g.n):
        if v not in seen:
            count += 1
            seen |= _reachable(g, v)
    return count


def _undirected_edge_count(g: Graph) -> int:
    return sum(g.adj[u][v] for u in range(g.n) for v in range(u + 1, g.n))


def graph_property(kind: GraphPropertyKind | str, g: Graph) -> bool:
    """Decide a graph property.  Undirected kinds ignore self-loops."""
    kind = GraphPropertyKind(kind)
    if kind.needs_endpoints and (g.s is None or g.t is None):
        raise ValueError(f"{kind.value} needs s and t")
    if kind.directed != g.directed:
        raise ValueError(f"{kind.value} expects a {'directed' if kind.directed else 'undirected'} graph")
    if kind is GraphPropertyKind.REACH or kind is GraphPropertyKind.UNDIRECTED_REACH:
        return g.t in _reachable(g, g.s)
    if kind is GraphPropertyKind.DAG_REACH:
        return not _has_directed_cycle(g) and g.t in _reachable(g, g.s)
    if kind is GraphPropertyKind.LAYERED_REACH:
        if g.layers is None:
            raise ValueError("layered-reach needs a layer assignment")
        return g.t in _reachable(g, g.s)
    if kind is GraphPropertyKind.CYCLE:
        return _has_directed_cycle(g)
    # undirected structure: a forest has exactly n - c edges
    acyclic = _undirected_edge_count(g) == g.n - _components(g)
    if kind is GraphPropertyKind.FOREST:
        return acyclic
    if kind is GraphPropertyKind.TREE:
        return g.n >= 1 and acyclic and _components(g) == 1
    return not acyclic


# ---------------------------------------------------------------------------
# union problems


def base_oracle(kind: str) -> Callable[[Word], bool]:
    """Membership test for words of a base language: ``bf``, ``agen`` or a graph kind."""
    if kind == "bf":

        def bf(word: Word) -> bool:
            f, bits = decode_bf(word)
            return eval_bf(f, bits)

        return bf
    if kind == "agen":

        def agen(word: Word) -> bool:
            inst, chosen = decode_agen(word)
            return inst.target in generator_closure(inst.universe, inst.table, chosen)

        return agen
    gkind = GraphPropertyKind(kind)
    return lambda word: graph_property(gkind, decode_graph(word, gkind))


def _zero(t: TemplateWord) -> InstantiationWord:
    return t.fill([0] * len(t.holes))


def solve_union(
    variant: UnionVariant | str,
    instance: FamilyUnionInstance | SubsetUnionInstance | WeightedUnionInstance,
    base: Callable[[Word], bool] | None = None,
    budget: int | None = None,
) -> bool:
    """Exhaustive search over the choices of a union instance.

    An empty choice (k = 0) yields the all-zero instantiation.
    """
    variant = UnionVariant(variant)
    budget = _budget(budget)
    base = base or base_oracle(instance.kind)
    t = instance.template
    if variant is UnionVariant.FAMILY:
        if not isinstance(instance, FamilyUnionInstance):
            raise TypeError("family variant needs a FamilyUnionInstance")
        if any(not f for f in instance.families):
            return False
        if math.prod(len(f) for f in instance.families) > budget:
            raise BudgetExceeded("family choice space exceeds budget")
        if not instance.families:
            return base(_zero(t).symbols)
        return any(base(union_instantiations(c).symbols) for c in itertools.product(*instance.families))
    if variant is UnionVariant.SUBSET:
        if not isinstance(instance, SubsetUnionInstance):
            raise TypeError("subset variant needs a SubsetUnionInstance")
        if instance.k > len(instance.S):
            return False
        if math.comb(len(instance.S), instance.k) > budget:
            raise BudgetExceeded("subset choice space exceeds budget")
        if instance.k == 0:
            return base(_zero(t).symbols)
        return any(base(union_instantiations(c).symbols) for c in itertools.combinations(instance.S, instance.k))
    if not isinstance(instance, WeightedUnionInstance):
        raise TypeError("weighted variant needs a WeightedUnionInstance")
    holes = len(t.holes)
    if instance.k > holes:
        return False
    if math.comb(holes, instance.k) > budget:
        raise BudgetExceeded("weighted choice space exceeds budget")
    return any(base(s.symbols) for s in t.weight_k(instance.k))


# ---------------------------------------------------------------------------
# Turing machines


def run_tm_bounded(inst: BoundedTMInstance, budget: int | None = None) -> bool:
    """Accept iff an accepting state is reached within t steps on s cells.

    A move off the s-cell tape, or a missing transition, ends that branch.
    """
    m, t, s = inst.machine, inst.t, inst.s
    budget = _budget(budget)
    start = (m.initial, 0, (m.blank,) * s)
    frontier = [start]
    seen = {start}
    for step in range(t + 1):
        nxt = []
        for q, head, tape in frontier:
            if q in m.accepting:
                return True
            if step == t:
                continue
            for q2, b, mv in m.delta.get((q, tape[head]), ()):
                h2 = head + MOVES[mv]
                if not 0 <= h2 < s:
                    continue
                conf = (q2, h2, tape[:head] + (b,) + tape[head + 1 :])
                if conf not in seen:
                    seen.add(conf)
                    if len(seen) > budget:
                        raise BudgetExceeded("TM configuration budget exceeded")
                    nxt.append(conf)
        if not nxt:
            return False
        frontier = nxt
    return False


def tm_trace(m, s: int, steps: int) -> list[tuple[str, int, tuple[str, ...]]]:
    """Configurations of a deterministic machine, one per step, until it stops."""
    conf = (m.initial, 0, (m.blank,) * s)
    out = [conf]
    for _ in range(steps):
        q, head, tape = conf
        moves = m.delta.get((q, tape[head]), ())
        if not moves:
            break
        q2, b, mv = moves[0]
        h2 = head + MOVES[mv]
        if not 0 <= h2 < s:
            break
        conf = (q2, h2, tape[:head] + (b,) + tape[head + 1 :])
        out.append(conf)
    return out


def run_two_tape(m, x: Sequence[str], t: int, s: int, budget: int | None = None) -> bool:
    """Bounded acceptance of a read-only-input two-tape machine on x."""
    budget = _budget(budget)
    x = tuple(x)
    n = max(len(x), 1)
    delta: dict[tuple, list] = {}
    for q, a, w, q2, w2, mi, mw in m.transitions:
        delta.setdefault((q, a, w), []).append((q2, w2, mi, mw))
    start = (m.initial, 0, 0, (m.blank,) * s)
    frontier, seen = [start], {start}
    for step in range(t + 1):
        nxt = []
        for q, ih, wh, tape in frontier:
            if q in m.accepting:
                return True
            if step == t:
                continue
            a = x[ih] if ih < len(x) else m.blank
            for q2, w2, mi, mw in delta.get((q, a, tape[wh]), ()):
                i2, h2 = ih + MOVES[mi], wh + MOVES[mw]
                if not (0 <= i2 < n and 0 <= h2 < s):
                    continue
                conf = (q2, i2, h2, tape[:wh] + (w2,) + tape[wh + 1 :])
                if conf not in seen:
                    seen.add(conf)
                    if len(seen) > budget:
                        raise BudgetExceeded("TM configuration budget exceeded")
                    nxt.append(conf)
        if not nxt:
            return False
        frontier = nxt
    return False


# ---------------------------------------------------------------------------
# multi-head automata


def run_mfa(a: MultiHeadAutomaton, budget: int | None = None, steps: int | None = None) -> bool:
    """Heads start on position 1 of ``< w >`` and may not leave the markers.

    With ``steps`` set, only runs of at most that many transitions count.
    """
    budget = _budget(budget)
    tape = (LEFT_END, *a.word, RIGHT_END)
    last = len(tape) - 1
    start = (a.initial, (1,) * a.heads)
    frontier, seen = [start], {start}
    depth = 0
    while frontier:
        if a.dag:
            assert depth <= len(a.states), "dag automaton ran longer than |Q| steps"
        nxt = []
        for q, pos in frontier:
            if q in a.accepting:
                return True
            if steps is not None and depth == steps:
                continue
            obs = tuple(tape[p] for p in pos)
            for q2, mv in a.delta.get((q, obs), ()):
                pos2 = tuple(p + MOVES[d] for p, d in zip(pos, mv))
                if any(not 0 <= p <= last for p in pos2):
                    continue
                conf = (q2, pos2)
                if conf not in seen:
                    seen.add(conf)
                    if len(seen) > budget:
                        raise BudgetExceeded("multi-head configuration budget exceeded")
                    nxt.append(conf)
        frontier = nxt
        depth += 1
    return False


# ---------------------------------------------------------------------------
# cellular automata
#
# A configuration is a tuple of states with None for dead cells.  A cell dies
# when its window has no successor or touches a dead neighbour.


def _ca_successor_choices(ca, conf):
    k = len(conf)
    out = []
    for i, c in enumerate(conf):
        if c is None:
            out.append((None,))
            continue
        left = conf[i - 1] if i > 0 else None
        right = conf[i + 1] if i < k - 1 else None
        if (i > 0 and left is None) or (i < k - 1 and right is None):
            out.append((None,))
            continue
        succ = ca.successors((left, c, right))
        out.append(succ if succ else (None,))
    return out


def ca_step(ca, conf: tuple) -> list[tuple]:
    """All successor configurations of one synchronous step."""
    choices = _ca_successor_choices(ca, conf)
    return [tuple(c) for c in itertools.product(*choices)]


def ca_accepting(ca, conf: tuple) -> bool:
    return any(c is not None and c in ca.accepting for c in conf)


def run_ca(
    inst: CellularInstance,
    mode: str = "det",
    budget: int | None = None,
    steps: int | None = None,
) -> bool:
    """Accept iff some live cell is accepting after at most ``steps`` global steps."""
    ca = inst.automaton
    if mode == "det" and not ca.deterministic:
        raise ValueError("det mode needs a deterministic automaton")
    if mode not in ("det", "nondet"):
        raise ValueError(f"unknown mode {mode!r}")
    budget = _budget(budget)
    start = tuple(inst.initial)
    frontier, seen = [start], {start}
    step = 0
    while frontier:
        if ca.dag:
            assert step <= len(ca.states), "dag automaton ran longer than |Q| steps"
        nxt = []
        for conf in frontier:
            if ca_accepting(ca, conf):
                return True
            if steps is not None and step == steps:
                continue
            choices = _ca_successor_choices(ca, conf)
            if math.prod(len(c) for c in choices) + len(seen) > budget:
                raise BudgetExceeded("cellular configuration budget exceeded")
            for c in itertools.product(*choices):
                if all(x is None for x in c) or c in seen:
                    continue
                seen.add(c)
                nxt.append(c)
        frontier = nxt
        step += 1
    return False


def ca_full_run(inst: CellularInstance, horizon: int, budget: int | None = None) -> bool:
    """Is there a run of exactly ``horizon`` synchronous steps in which no cell dies?"""
    ca = inst.automaton
    budget = _budget(budget)
    frontier = {tuple(inst.initial)}
    for _ in range(horizon):
        nxt = set()
        for conf in frontier:
            choices = _ca_successor_choices(ca, conf)
            if any(c == (None,) for c in choices):
                continue
            if math.prod(len(c) for c in choices) + len(nxt) > budget:
                raise BudgetExceeded("cellular configuration budget exceeded")
            nxt.update(itertools.product(*choices))
        if not nxt:
            return False
        frontier = nxt
    return True


def run_sequential(
    inst,
    major_steps: int | None = None,
    budget: int | None = None,
) -> bool:
    """Cells update one at a time, left to right, within each major step.

    With ``major_steps`` (or the instance's ``horizon``) set, accept iff some
    run completes exactly that many major steps without a cell dying.
    Otherwise accept iff some live cell is ever accepting.
    """
    ca = inst.automaton
    budget = _budget(budget)
    k = inst.k
    horizon = inst.horizon if major_steps is None else major_steps
    frontier = {tuple(inst.initial)}
    seen = set(frontier)
    step = 0
    while frontier:
        if horizon is None:
            if any(ca_accepting(ca, c) for c in frontier):
                return True
        elif step == horizon:
            return True
        nxt: set[tuple] = set()
        for conf in frontier:
            partial = [conf]
            for i in range(k):
                after = []
                for c in partial:
                    if c[i] is None:
                        after.append(c)
                        continue
                    left = c[i - 1] if i > 0 else None
                    right = c[i + 1] if i < k - 1 else None
                    if (i > 0 and left is None) or (i < k - 1 and right is None):
                        succ = ()
                    else:
                        succ = ca.successors((left, c[i], right))
                    if not succ:
                        if horizon is None:
                            after.append(c[:i] + (None,) + c[i + 1 :])
                        continue
                    if horizon is None and any(q in ca.accepting for q in succ):
                        return True
                    for q in succ:
                        after.append(c[:i] + (q,) + c[i + 1 :])
                partial = after
                if len(partial) > budget:
                    raise BudgetExceeded("sequential configuration budget exceeded")
            for c in partial:
                if horizon is not None or (c not in seen and not all(x is None for x in c)):
                    if horizon is None:
                        seen.add(c)
                    nxt.add(c)
        if len(nxt) > budget:
            raise BudgetExceeded("sequential configuration budget exceeded")
        frontier = nxt
        step += 1
    return False


# ---------------------------------------------------------------------------
# threshold pebble games


def pebbleable(game: ThresholdPebbleGame, X: frozenset[int]) -> frozenset[int]:
    preds = game.predecessors
    return frozenset(v for v in range(game.graph.n) if sum(1 for u in preds[v] if u in X) >= game.threshold[v])


def tpg_max_trace(game: ThresholdPebbleGame, limit: int | None = None) -> list[frozenset[int]]:
    """Pebblings of the max game until the first repeat (or ``limit`` moves)."""
    X = game.S
    trace, seen = [X], {X}
    while limit is None or len(trace) <= limit:
        X = pebbleable(game, X)
        trace.append(X)
        if X in seen:
            break
        seen.add(X)
    return trace


def run_tpg(game: ThresholdPebbleGame, mode: str = "max", budget: int | None = None, prune: bool = True) -> bool:
    """Decide whether T is reachable from S.

    In nondet mode a move picks any Y within the pebbleable set with at most
    ``cap`` vertices.  Pebbleable sets grow with the pebbling, so with
    ``prune`` only maximal moves are expanded, after checking whether T
    itself is a legal move.
    """
    budget = _budget(budget)
    if game.S == game.T:
        return True
    if mode == "max":
        X, seen = game.S, {game.S}
        while True:
            X = pebbleable(game, X)
            if X == game.T:
                return True
            if X in seen:
                return False
            seen.add(X)
            if len(seen) > budget:
                raise BudgetExceeded("pebbling budget exceeded")
    if mode != "nondet":
        raise ValueError(f"unknown mode {mode!r}")
    cap = game.graph.n if game.cap is None else game.cap
    frontier, seen = deque([game.S]), {game.S}
    while frontier:
        X = frontier.popleft()
        P = pebbleable(game, X)
        if game.T <= P and len(game.T) <= cap:
            return True
        if prune:
            moves: Iterable = [P] if len(P) <= cap else itertools.combinations(sorted(P), cap)
        else:
            moves = (c for r in range(min(cap, len(P)) + 1) for c in itertools.combinations(sorted(P), r))
        for Y in moves:
            Y = frozenset(Y)
            if Y not in seen:
                seen.add(Y)
                if len(seen) > budget:
                    raise BudgetExceeded("pebbling budget exceeded")
                frontier.append(Y)
    return False


# ---------------------------------------------------------------------------
# longest common subsequence


def _next_arrays(strings, symbols) -> list[np.ndarray]:
    """nxt[p, a] = 1 + first index >= p of symbol a, or len+1 when there is none."""
    col = {a: i for i, a in enumerate(symbols)}
    out = []
    for s in strings:
        n = len(s)
        arr = np.full((n + 2, len(symbols)), n + 1, dtype=np.int64)
        for p in range(n - 1, -1, -1):
            arr[p] = arr[p + 1]
            j = col.get(s[p])
            if j is not None:
                arr[p, j] = p + 1
        out.append(arr)
    return out


def lcs_decide(inst: LcsInstance, budget: int | None = None) -> bool:
    """k-pointer search: each matched symbol advances every pointer to its leftmost occurrence."""
    budget = _budget(budget)
    if inst.l == 0:
        return True
    if not inst.strings:
        return bool(inst.alphabet)
    common = set(inst.strings[0]).intersection(*inst.strings[1:])
    symbols = [a for a in inst.alphabet if a in common]
    if not symbols:
        return False
    # the lookup tables alone can outgrow memory on large instances
    if sum(len(s) + 2 for s in inst.strings) * len(symbols) > 16 * budget:
        raise BudgetExceeded("lcs lookup tables exceed budget")
    tables = _next_arrays(inst.strings, symbols)
    limits = np.array([len(s) for s in inst.strings])
    frontier = np.zeros((1, len(inst.strings)), dtype=np.int64)
    explored = 0
    for _ in range(inst.l):
        # the same pointers at a greater length dominate, so dedupe per level only
        moved = np.stack([tab[frontier[:, j]] for j, tab in enumerate(tables)], axis=-1)
        moved = moved.reshape(-1, len(tables))
        moved = moved[(moved <= limits).all(axis=1)]
        if not len(moved):
            return False
        frontier = np.unique(moved, axis=0)
        explored += len(frontier)
        if explored > budget:
            raise BudgetExceeded("pointer budget exceeded")
    return True


def lcs_injective_decide(inst: LcsInstance) -> bool:
    """Search over the last guessed symbol: a may precede b iff it does so in every string."""
    if not inst.injective:
        raise ValueError("lcs_injective_decide needs p-sequences")
    if inst.l == 0:
        return True
    if not inst.strings:
        return bool(inst.alphabet)
    pos = [{a: i for i, a in enumerate(s)} for s in inst.strings]
    symbols = [a for a in inst.alphabet if all(a in p for p in pos)]

    def before(a, b):
        return all(p[a] < p[b] for p in pos)

    frontier = set(symbols)
    for _ in range(inst.l - 1):
        frontier = {b for b in symbols if any(before(a, b) for a in frontier)}
        if not frontier:
            return False
    return bool(frontier)


# ---------------------------------------------------------------------------
# generators and replacement systems


def generator_closure(universe: Sequence, table, G: Iterable[int]) -> frozenset[int]:
    """Smallest superset of G closed under the operation, as element indices."""
    n = len(universe)
    op = np.asarray(table, dtype=np.int64).reshape(n, n)
    inside = np.zeros(n, dtype=bool)
    inside[list(G)] = True
    while True:
        idx = np.flatnonzero(inside)
        new = inside.copy()
        new[op[np.ix_(idx, idx)].ravel()] = True
        if (new == inside).all():
            return frozenset(int(i) for i in idx)
        inside = new


def agen_decide(inst: GeneratorInstance, budget: int | None = None) -> bool:
    budget = _budget(budget)
    if inst.k > len(inst.candidates):
        return False
    if math.comb(len(inst.candidates), inst.k) > budget:
        raise BudgetExceeded("generator subset space exceeds budget")
    for G in itertools.combinations(inst.candidates, inst.k):
        if inst.target in generator_closure(inst.universe, inst.table, G):
            return True
    return False


def rs_redexes(r: ReplacementSystem, w: Word) -> list[tuple[int, int]]:
    """All (position, rule index) pairs where a rule applies."""
    out = []
    for p in range(len(w)):
        for i, (lhs, _) in enumerate(r.rules):
            if w[p : p + len(lhs)] == lhs:
                out.append((p, i))
    return out


def rs_normalize(
    r: ReplacementSystem,
    w: Sequence[str],
    budget: int | None = None,
    rng: random.Random | None = None,
    start: int = 0,
) -> Word:
    """Rewrite to an irreducible word.

    The default order applies the first listed rule at the leftmost position
    where any rule applies.  With ``rng`` a uniformly random redex is
    rewritten instead.  ``start`` may skip a prefix known to hold no redex.
    """
    budget = _budget(budget)
    w = tuple(w)
    steps = 0
    if rng is not None:
        while True:
            red = rs_redexes(r, w)
            if not red:
                return w
            if steps >= budget:
                raise NonTermination("rewrite budget exhausted")
            p, i = rng.choice(red)
            lhs, rhs = r.rules[i]
            w = w[:p] + rhs + w[p + len(lhs) :]
            steps += 1
    p = start
    back = max(r.max_lhs - 1, 0)
    while p < len(w):
        for lhs, rhs in r.by_first.get(w[p], ()):
            if w[p : p + len(lhs)] == lhs:
                if steps >= budget:
                    raise NonTermination("rewrite budget exhausted")
                w = w[:p] + rhs + w[p + len(lhs) :]
                steps += 1
                # a new redex can start at most max_lhs - 1 symbols to the left
                p = max(0, p - back)
                break
        else:
            p += 1
    return w


def is_irreducible(r: ReplacementSystem, w: Word) -> bool:
    return not rs_redexes(r, w)


__all__ = [
    "BudgetExceeded",
    "NonTermination",
    "UnionVariant",
    "agen_decide",
    "base_oracle",
    "ca_full_run",
    "ca_step",
    "default_budget",
    "eval_bf",
    "generator_closure",
    "graph_property",
    "is_irreducible",
    "lcs_decide",
    "lcs_injective_decide",
    "pebbleable",
    "rs_normalize",
    "run_ca",
    "run_mfa",
    "run_sequential",
    "run_tm_bounded",
    "run_tpg",
    "run_two_tape",
    "solve_union",
    "tm_trace",
    "tpg_max_trace",
]
