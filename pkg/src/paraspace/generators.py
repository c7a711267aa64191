"""Seeded random instances for every kind.

``gen_instance(kind, profile, seed)`` is a pure function of its arguments:
the random stream is seeded from a string built out of all three, so the
same call gives byte-identical output across runs and platforms.  Profiles
are plain mappings; missing keys take the defaults below and every key is
checked against a desk-scale cap.
"""

from __future__ import annotations

import itertools
import json
import random
from typing import Callable, Mapping

from .core import (
    BfInstance,
    BooleanFormula,
    BoundedTMInstance,
    CellularAutomaton,
    CellularInstance,
    FamilyUnionInstance,
    GeneratorInstance,
    Graph,
    GraphPropertyKind,
    InstantiationWord,
    LcsInstance,
    MultiHeadAutomaton,
    ParameterizedRun,
    ProjectionInstance,
    ReplacementSystem,
    SequentialCellularInstance,
    SingleTapeTM,
    SubsetUnionInstance,
    TemplateWord,
    ThresholdPebbleGame,
    TwoTapeTM,
    WeightedUnionInstance,
    conj,
    const,
    disj,
    doubling_projection,
    encode_agen,
    encode_bf,
    encode_graph,
    find_nonassociative_triple,
    imp,
    neg,
    var,
)


class ProfileError(ValueError):
    """The profile is outside the caps or cannot be realized."""


# default value and cap of every profile key, per kind
PROFILES: dict[str, dict[str, tuple]] = {
    "graph": {"n": (4, 8), "property": ("reach", None), "density": (0.35, 1.0), "layers": (4, 6), "width": (3, 4)},
    "bf": {"vars": (3, 6), "depth": (3, 4)},
    "dtsc": {"states": (3, 4), "symbols": (2, 3), "s": (3, 6), "t": (30, 10**4), "density": (0.7, 1.0)},
    "ntsc": {"states": (3, 4), "symbols": (2, 3), "s": (3, 6), "t": (30, 10**4), "density": (0.7, 1.0), "branching": (3, 3)},
    "tm2": {"states": (3, 4), "x": (3, 4), "s": (4, 6), "t": (30, 30), "b": (2, 3), "deterministic": (True, None)},
    "mfa": {"states": (3, 4), "heads": (2, 3), "word": (3, 4), "density": (0.5, 1.0)},
    "ca": {"states": (3, 4), "cells": (3, 4), "deterministic": (True, None), "dag": (False, None), "density": (0.8, 1.0)},
    "seqca": {"states": (3, 4), "cells": (3, 4), "deterministic": (False, None), "dag": (False, None), "density": (0.6, 1.0), "horizon": (None, 4)},
    "tpg": {"n": (6, 10), "density": (0.35, 1.0), "max_threshold": (2, 3), "dag": (False, None), "cap": (None, 10)},
    "lcs": {"strings": (3, 5), "alphabet": (4, 8), "length": (5, 8), "l": (None, 8), "injective": (True, None)},
    "agen": {"u": (4, 6), "k": (2, 3), "candidates": (None, 6)},
    "rs": {"u": (3, 4), "k": (2, 3)},
    "projection": {"n": (3, 4), "f_x": (2, 2)},
    "family-union": {"base": ("bf", None), "k": (2, 3), "size": (3, 3), "n": (3, 4), "vars": (3, 4), "u": (3, 4)},
    "subset-union": {"base": ("bf", None), "k": (2, 3), "size": (4, 6), "n": (3, 4), "vars": (3, 4), "u": (3, 4)},
    "weighted-union": {"base": ("bf", None), "k": (2, 3), "n": (3, 4), "vars": (3, 6), "u": (3, 4)},
}

GEN_KINDS = tuple(PROFILES)
BASES = ("bf", "agen") + tuple(k.value for k in GraphPropertyKind if k is not GraphPropertyKind.LAYERED_REACH)


def _resolve(kind: str, profile: Mapping | None) -> dict:
    if kind not in PROFILES:
        raise ProfileError(f"unknown kind {kind!r}; choose from {', '.join(GEN_KINDS)}")
    spec = PROFILES[kind]
    profile = dict(profile or {})
    unknown = set(profile) - set(spec)
    if unknown:
        raise ProfileError(f"unknown profile keys for {kind}: {', '.join(sorted(unknown))}")
    out = {}
    for key, (default, cap) in spec.items():
        val = profile.get(key, default)
        if cap is not None and isinstance(cap, (int, float)) and val is not None and not isinstance(val, bool):
            if val < 0 or val > cap:
                raise ProfileError(f"{kind}.{key}={val} is outside 0..{cap}")
        out[key] = val
    return out


def gen_instance(kind: str, profile: Mapping | None = None, seed: int = 0):
    """A pseudo-random instance of ``kind``; identical arguments give identical instances."""
    prof = _resolve(kind, profile)
    rng = random.Random(f"{kind}|{seed}|{json.dumps(prof, sort_keys=True)}")
    return _GENERATORS[kind](rng, prof)


# ---------------------------------------------------------------------------
# graphs


def _endpoints(rng: random.Random, n: int, prop: GraphPropertyKind) -> dict:
    if not prop.needs_endpoints or n == 0:
        return {}
    return {"s": rng.randrange(n), "t": rng.randrange(n)}


def _random_graph(rng: random.Random, n: int, prop: GraphPropertyKind, density: float) -> Graph:
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v and (prop.directed or u < v)]
    edges = [e for e in pairs if rng.random() < density]
    return Graph.from_edges(n, edges, directed=prop.directed, **_endpoints(rng, n, prop))


def layered_graph(rng: random.Random, layers: int, width: int, density: float = 0.5) -> Graph:
    """Single vertices on the first and last layer, 1..width vertices in between."""
    sizes = [1] + [rng.randint(1, width) for _ in range(max(layers - 2, 0))] + ([1] if layers > 1 else [])
    layer_of = [i for i, c in enumerate(sizes) for _ in range(c)]
    n = len(layer_of)
    edges = [(u, v) for u in range(n) for v in range(n) if layer_of[v] == layer_of[u] + 1 and rng.random() < density]
    return Graph.from_edges(n, edges, directed=True, layers=tuple(layer_of), s=0, t=n - 1)


def _gen_graph(rng: random.Random, p: dict) -> Graph:
    prop = GraphPropertyKind(p["property"])
    if prop is GraphPropertyKind.LAYERED_REACH:
        return layered_graph(rng, rng.randint(2, p["layers"]), p["width"], max(p["density"], 0.4))
    return _random_graph(rng, p["n"], prop, p["density"])


# ---------------------------------------------------------------------------
# formulas


def random_formula(rng: random.Random, m: int, depth: int) -> BooleanFormula:
    def node(d: int):
        if d == 0 or rng.random() < 0.25:
            return var(rng.randrange(m)) if m and rng.random() < 0.9 else const(rng.random() < 0.5)
        op = rng.choice(("and", "or", "not", "imp"))
        if op == "not":
            return neg(node(d - 1))
        if op == "imp":
            return imp(node(d - 1), node(d - 1))
        xs = [node(d - 1) for _ in range(rng.randint(2, 3))]
        return conj(*xs) if op == "and" else disj(*xs)

    return BooleanFormula(node(depth), tuple(f"x{i}" for i in range(1, m + 1)))


def _gen_bf(rng: random.Random, p: dict) -> BfInstance:
    m = max(p["vars"], 1)
    f = random_formula(rng, m, p["depth"])
    return BfInstance(f, tuple(rng.randint(0, 1) for _ in range(m)))


# ---------------------------------------------------------------------------
# machines


def _tape_symbols(count: int) -> tuple[str, ...]:
    return ("_",) + tuple(f"g{i}" for i in range(1, count))


def random_tm(rng: random.Random, states: int, symbols: int, deterministic: bool, density: float, branching: int = 1) -> SingleTapeTM:
    Q = tuple(f"q{i}" for i in range(max(states, 1)))
    G = _tape_symbols(max(symbols, 1))
    trans = []
    for q in Q:
        for a in G:
            if rng.random() < density:
                for _ in range(1 if deterministic else rng.randint(1, branching)):
                    trans.append((q, a, rng.choice(Q), rng.choice(G), rng.choice("LSR")))
    # deterministic machines keep the first move per key
    if deterministic:
        first = {}
        for tr in trans:
            first.setdefault(tr[:2], tr)
        trans = list(first.values())
    accepting = frozenset({rng.choice(Q[1:] or Q)}) if rng.random() < 0.8 else frozenset()
    return SingleTapeTM(Q, G, tuple(trans), Q[0], accepting, deterministic)


def config_bound(m: SingleTapeTM, s: int) -> int:
    """Number of configurations on s cells, a time bound no run needs to exceed."""
    return len(m.states) * s * len(m.alphabet) ** s


def _gen_tm(rng: random.Random, p: dict, deterministic: bool) -> BoundedTMInstance:
    m = random_tm(rng, p["states"], p["symbols"], deterministic, p["density"], p.get("branching", 1))
    s = max(p["s"], 1)
    return BoundedTMInstance(m, p["t"], s)


def _gen_tm2(rng: random.Random, p: dict) -> ParameterizedRun:
    det = p["deterministic"]
    Q = tuple(f"q{i}" for i in range(max(p["states"], 1)))
    inputs = ("a", "b")
    work = ("_", "w")
    trans = []
    for q in Q:
        for a in inputs + ("_",):
            for w in work:
                if rng.random() < 0.6:
                    for _ in range(1 if det else rng.randint(1, 2)):
                        trans.append((q, a, w, rng.choice(Q), rng.choice(work), rng.choice("LSR"), rng.choice("LSR")))
    if det:
        first = {}
        for tr in trans:
            first.setdefault(tr[:3], tr)
        trans = list(first.values())
    accepting = frozenset({rng.choice(Q[1:] or Q)})
    m = TwoTapeTM(Q, inputs, work, tuple(trans), Q[0], accepting, det)
    b = max(p["b"], 1)
    # whole blocks only: the compressed tape covers b * ceil(s / b) cells
    s = b * max(1, p["s"] // b)
    x = tuple(rng.choice(inputs) for _ in range(rng.randint(0, p["x"])))
    return ParameterizedRun(m, x, p["t"], s, b)


def _gen_mfa(rng: random.Random, p: dict) -> MultiHeadAutomaton:
    Q = tuple(f"q{i}" for i in range(max(p["states"], 1)))
    h = max(p["heads"], 1)
    sigma = ("a", "b")
    tape = ("<",) + sigma + (">",)
    trans = []
    for q in Q:
        for obs in itertools.product(tape, repeat=h):
            if rng.random() < p["density"]:
                trans.append((q, obs, rng.choice(Q), tuple(rng.choice("LSR") for _ in range(h))))
    word = tuple(rng.choice(sigma) for _ in range(rng.randint(0, p["word"])))
    accepting = frozenset({Q[-1]}) if rng.random() < 0.8 else frozenset()
    return MultiHeadAutomaton(Q, h, tuple(trans), Q[0], accepting, word)


def random_ca(rng: random.Random, states: int, cells: int, deterministic: bool, dag: bool, density: float) -> CellularInstance:
    Q = tuple(f"s{i}" for i in range(max(states, 1)))
    k = max(cells, 1)
    shapes = sorted({(i > 0, i < k - 1) for i in range(k)})
    trans = []
    for has_l, has_r in shapes:
        for l in Q if has_l else (None,):
            for c in Q:
                for r in Q if has_r else (None,):
                    if rng.random() >= density:
                        continue
                    lo = max(Q.index(x) for x in (l, c, r) if x is not None) + 1 if dag else 0
                    if lo >= len(Q):
                        continue
                    for _ in range(1 if deterministic else rng.randint(1, 2)):
                        trans.append(((l, c, r), Q[rng.randrange(lo, len(Q))]))
    if deterministic:
        first = {}
        for w, q in trans:
            first.setdefault(w, q)
        trans = list(first.items())
    accepting = frozenset({Q[-1]}) if rng.random() < 0.8 else frozenset()
    ca = CellularAutomaton(Q, tuple(trans), accepting, deterministic, dag=dag)
    start = Q[: max(1, len(Q) - 1)]
    return CellularInstance(ca, tuple(rng.choice(start) for _ in range(k)))


def _gen_ca(rng: random.Random, p: dict) -> CellularInstance:
    return random_ca(rng, p["states"], p["cells"], p["deterministic"], p["dag"], p["density"])


def _gen_seqca(rng: random.Random, p: dict) -> SequentialCellularInstance:
    base = random_ca(rng, p["states"], p["cells"], p["deterministic"], p["dag"], p["density"])
    return SequentialCellularInstance(base.automaton, base.initial, horizon=p["horizon"])


def _gen_tpg(rng: random.Random, p: dict) -> ThresholdPebbleGame:
    n = max(p["n"], 1)
    dag = p["dag"]
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and (not dag or u < v) and rng.random() < p["density"]]
    g = Graph.from_edges(n, edges, directed=True)
    thresholds = tuple(rng.randint(1, p["max_threshold"]) for _ in range(n))
    S = frozenset(v for v in range(n) if rng.random() < 0.4)
    T = frozenset(v for v in range(n) if rng.random() < 0.3)
    cap = p["cap"] if p["cap"] is not None else rng.choice((None, 2, 3))
    return ThresholdPebbleGame(g, thresholds, S, T, dag=dag, cap=cap)


# ---------------------------------------------------------------------------
# strings


def _gen_lcs(rng: random.Random, p: dict) -> LcsInstance:
    sigma = tuple("abcdefgh"[: max(p["alphabet"], 1)])
    strings = []
    for _ in range(max(p["strings"], 1)):
        if p["injective"]:
            size = rng.randint(0, min(len(sigma), p["length"]))
            strings.append(tuple(rng.sample(sigma, size)))
        else:
            strings.append(tuple(rng.choice(sigma) for _ in range(rng.randint(0, p["length"]))))
    l = p["l"] if p["l"] is not None else rng.randint(0, 4)
    return LcsInstance(sigma, tuple(strings), l)


# ---------------------------------------------------------------------------
# semigroups


def _monoid_tables(n: int) -> list[tuple[str, Callable[[int, int], int]]]:
    out = [
        ("cyclic", lambda a, b: (a + b) % n),
        ("multiplicative", lambda a, b: (a * b) % n),
        ("max", max),
        ("min", min),
        ("left-zero", lambda a, b: a),
        ("right-zero", lambda a, b: b),
        ("null", lambda a, b: 0),
    ]
    if n >= 2:
        # a left-zero band with an identity element 0 adjoined
        out.append(("left-zero+1", lambda a, b: b if a == 0 else a))
    if n == 4:
        # all maps {0,1} -> {0,1} under composition: id, swap, const0, const1
        maps = [(0, 1), (1, 0), (0, 0), (1, 1)]
        out.append(("T2", lambda a, b: maps.index(tuple(maps[a][maps[b][x]] for x in range(2)))))
    return out


def random_semigroup(rng: random.Random, n: int, retries: int = 8) -> tuple[tuple[str, ...], tuple[tuple[int, ...], ...]]:
    """A relabeled small monoid or semigroup on n elements, checked for associativity."""
    if n < 1:
        raise ProfileError("need at least one element")
    names = tuple("abcdef"[:n])
    for _ in range(retries):
        _, op = rng.choice(_monoid_tables(n))
        perm = list(range(n))
        rng.shuffle(perm)
        inv = {p: i for i, p in enumerate(perm)}
        # element i of the result is perm[i] of the construction
        table = tuple(tuple(inv[op(perm[a], perm[b])] for b in range(n)) for a in range(n))
        if find_nonassociative_triple(table) is None:
            return names, table
    raise ProfileError(f"no associative table on {n} elements after {retries} attempts")


def random_generator_frame(rng: random.Random, n: int, candidates: int | None = None) -> GeneratorInstance:
    names, table = random_semigroup(rng, n)
    c = rng.randint(1, n) if candidates is None else min(candidates, n)
    cands = tuple(sorted(rng.sample(range(n), c)))
    return GeneratorInstance(names, table, rng.randrange(n), cands, 0)


def _gen_agen(rng: random.Random, p: dict) -> GeneratorInstance:
    frame = random_generator_frame(rng, max(p["u"], 1), p["candidates"])
    return GeneratorInstance(frame.universe, frame.table, frame.target, frame.candidates, p["k"])


def _gen_rs(rng: random.Random, p: dict) -> ReplacementSystem:
    from .union_reductions import family_agen_rules

    frame = random_generator_frame(rng, max(p["u"], 1))
    rules, _ = family_agen_rules(frame, max(p["k"], 1))
    return rules


def random_word(rng: random.Random, alphabet, length: int) -> tuple[str, ...]:
    return tuple(rng.choice(alphabet) for _ in range(length))


# ---------------------------------------------------------------------------
# projections and unions


def _gen_projection(rng: random.Random, p: dict) -> ProjectionInstance:
    n = max(p["n"], 1)
    proj = doubling_projection(n, p["f_x"])
    return ProjectionInstance(proj, tuple(rng.choice("xyz") for _ in range(n)))


def _union_frame(rng: random.Random, p: dict):
    """Template and a way to draw random members of it, for the base kind."""
    base = p["base"]
    if base == "bf":
        f = random_formula(rng, max(p["vars"], 1), 3)
        template = TemplateWord(encode_bf(f))
    elif base == "agen":
        frame = random_generator_frame(rng, max(p["u"], 1))
        template = TemplateWord(encode_agen(frame))
    else:
        prop = GraphPropertyKind(base)
        if prop is GraphPropertyKind.LAYERED_REACH:
            raise ProfileError("layered-reach is not a union base")
        n = max(p["n"], 1)
        shell = Graph(n, prop.directed, ((0,) * n,) * n, **_endpoints(rng, n, prop))
        template = TemplateWord(encode_graph(shell, template=True))

    def member() -> InstantiationWord:
        if base in ("bf", "agen"):
            return template.fill([rng.random() < 0.4 for _ in template.holes])
        prop = GraphPropertyKind(base)
        n = max(p["n"], 1)
        bits = [0] * (n * n)
        for u in range(n):
            for v in range(n):
                if u != v and (prop.directed or u < v) and rng.random() < 0.3:
                    bits[u * n + v] = 1
                    if not prop.directed:
                        bits[v * n + u] = 1
        return template.fill(bits)

    return template, member


def _gen_family(rng: random.Random, p: dict) -> FamilyUnionInstance:
    template, member = _union_frame(rng, p)
    families = tuple(tuple(member() for _ in range(rng.randint(1, max(p["size"], 1)))) for _ in range(p["k"]))
    return FamilyUnionInstance(template, families, p["base"])


def _gen_subset(rng: random.Random, p: dict) -> SubsetUnionInstance:
    template, member = _union_frame(rng, p)
    S = tuple(member() for _ in range(rng.randint(0, p["size"])))
    return SubsetUnionInstance(template, S, p["k"], p["base"])


def _gen_weighted(rng: random.Random, p: dict) -> WeightedUnionInstance:
    template, _ = _union_frame(rng, p)
    return WeightedUnionInstance(template, min(p["k"], len(template.holes)), p["base"])


_GENERATORS: dict[str, Callable] = {
    "graph": _gen_graph,
    "bf": _gen_bf,
    "dtsc": lambda rng, p: _gen_tm(rng, p, True),
    "ntsc": lambda rng, p: _gen_tm(rng, p, False),
    "tm2": _gen_tm2,
    "mfa": _gen_mfa,
    "ca": _gen_ca,
    "seqca": _gen_seqca,
    "tpg": _gen_tpg,
    "lcs": _gen_lcs,
    "agen": _gen_agen,
    "rs": _gen_rs,
    "projection": _gen_projection,
    "family-union": _gen_family,
    "subset-union": _gen_subset,
    "weighted-union": _gen_weighted,
}

__all__ = [
    "BASES",
    "GEN_KINDS",
    "PROFILES",
    "ProfileError",
    "config_bound",
    "gen_instance",
    "layered_graph",
    "random_ca",
    "random_formula",
    "random_generator_frame",
    "random_semigroup",
    "random_tm",
    "random_word",
]
