"""Reductions between union problems.

Fresh names follow one scheme throughout: tag variables of the formula
chain are ``v{i}_{j}`` and ``v{i}``; chain vertices of the graph gadget are
numbered after the original vertices; new generator elements start with
``#`` (``#e1``, ``#x``, ``#err``, ``#start``, ``#end``, ``#tick``,
``#sel1``); a representative word is named by joining its letters with
``.``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .core import (
    HOLE,
    BooleanFormula,
    CompatibleProjection,
    FamilyUnionInstance,
    GeneratorInstance,
    Graph,
    GraphPropertyKind,
    InstantiationWord,
    ReplacementSystem,
    SubsetUnionInstance,
    TemplateWord,
    WeightedUnionInstance,
    Word,
    block_width,
    conj,
    const,
    decode_agen,
    decode_bf,
    decode_graph,
    disj,
    encode_agen,
    encode_bf,
    encode_graph,
    var,
)
from .oracles import is_irreducible, rs_normalize


class ReductionError(ValueError):
    pass


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


# ---------------------------------------------------------------------------
# compatible projections


def projection_to_family_union(
    p: CompatibleProjection,
    x: Sequence[str],
    advice: Sequence[str] = (),
    f_x: int | None = None,
) -> FamilyUnionInstance:
    """One family per block of choice bits, one member per block value.

    Member ``m_i^d`` carries the block value d at the positions driven by
    block i and 0 at the positions driven by any other block.
    """
    x, advice = tuple(x), tuple(advice)
    f_x = p.f_x if f_x is None else f_x
    if f_x != p.f_x or p.width != block_width(len(x)):
        raise ReductionError("block structure does not match f_x blocks of ceil(log2 |x|) bits")
    if len(x) != p.n:
        raise ReductionError("input length differs from the projection's n")
    template = p.template(x, advice)
    base = list(template.symbols)
    families = []
    for i in range(f_x):
        members = []
        for delta in itertools.product((0, 1), repeat=p.width):
            word = list(base)
            for r, pos in enumerate(p.positions):
                if pos[0] != "b":
                    continue
                j = pos[1]
                word[r] = pos[2][delta[j - i * p.width]] if p.block_of(j) == i else "0"
            members.append(InstantiationWord(tuple(word), template))
        families.append(tuple(members))
    return FamilyUnionInstance(template, tuple(families), p.kind)


# ---------------------------------------------------------------------------
# Boolean formulas


def _bf_frame(template: TemplateWord) -> BooleanFormula:
    f, bits = decode_bf(template.symbols)
    if any(b != HOLE for b in bits):
        raise ReductionError("bf template must leave every variable open")
    return f


def family_to_subset_bf(inst: FamilyUnionInstance) -> SubsetUnionInstance:
    """Conjoin one disjunction of tag variables per family."""
    if inst.kind != "bf":
        raise ReductionError("family_to_subset_bf needs base kind bf")
    f = _bf_frame(inst.template)
    taken = set(f.names)
    names = list(f.names)
    tag_index: list[list[int]] = []
    for i, fam in enumerate(inst.families, 1):
        row = []
        for j in range(1, len(fam) + 1):
            row.append(len(names))
            names.append(_fresh(f"v{i}_{j}", taken))
        tag_index.append(row)
    psi = conj(*(disj(*(var(v) for v in row)) for row in tag_index))
    # keep the original formula as one conjunct
    root = f.root if not tag_index else ("and", (f.root, psi))
    phi = BooleanFormula(root, tuple(names))
    template = TemplateWord(encode_bf(phi))
    members = []
    for fam, row in zip(inst.families, tag_index):
        for w, tag in zip(fam, row):
            bits = list(w.bits) + [0] * (len(names) - f.m)
            bits[tag] = 1
            members.append(template.fill(bits))
    out = SubsetUnionInstance(template, tuple(members), inst.k, "bf")
    assert out.k <= inst.k
    return out


def subset_to_weighted_bf(inst: SubsetUnionInstance) -> WeightedUnionInstance:
    """Replace each variable by the disjunction of the members that set it."""
    if inst.kind != "bf":
        raise ReductionError("subset_to_weighted_bf needs base kind bf")
    f = _bf_frame(inst.template)
    setters = [[i for i, s in enumerate(inst.S) if s.bits[v]] for v in range(f.m)]

    def sub(node):
        tag = node[0]
        if tag == "var":
            hits = setters[node[1]]
            if not hits:
                return const(False)
            if len(hits) == 1:
                return var(hits[0])
            return ("or", tuple(var(i) for i in hits))
        if tag == "const":
            return node
        if tag == "not":
            return ("not", sub(node[1]))
        if tag == "imp":
            return ("imp", sub(node[1]), sub(node[2]))
        return (tag, tuple(sub(x) for x in node[1]))

    phi = BooleanFormula(sub(f.root), tuple(f"v{i}" for i in range(1, len(inst.S) + 1)))
    out = WeightedUnionInstance(TemplateWord(encode_bf(phi)), inst.k, "bf")
    assert out.k <= inst.k
    return out


# ---------------------------------------------------------------------------
# graphs


def _graph_frame(template: TemplateWord):
    head = [tok for tok in template.symbols if "=" in tok]
    fields = {h.split("=")[0]: int(h.split("=")[1]) for h in head}
    return fields["n"], fields.get("s"), fields.get("t")


def chain_vertex(n: int, k: int, a: int, b: int, i: int) -> int:
    """Index of the i-th chain vertex (1 <= i <= k) of pair (a, b)."""
    return n + (a * n + b) * k + (i - 1)


def _word_of(n: int, edges: set[tuple[int, int]], directed: bool, s, t, template: TemplateWord) -> InstantiationWord:
    m = [[0] * n for _ in range(n)]
    for u, v in edges:
        m[u][v] = 1
        if not directed:
            m[v][u] = 1
    g = Graph(n, directed, tuple(map(tuple, m)), s=s, t=t)
    return InstantiationWord(encode_graph(g), template)


def family_to_subset_graph(inst: FamilyUnionInstance) -> SubsetUnionInstance:
    """Chain gadget: member of family i supplies link i of every pair's chain.

    A pair (a, b) is connected through its chain only when every family
    contributes a member, so two members of one family leave every chain
    broken.  When s = t the target becomes the last chain vertex of (t, t),
    so that reaching it also needs a complete chain.  The forest kind uses
    the triangle gadget instead.
    """
    try:
        kind = GraphPropertyKind(inst.kind)
    except ValueError:
        raise ReductionError(f"unsupported base kind {inst.kind!r}") from None
    if kind is GraphPropertyKind.LAYERED_REACH:
        raise ReductionError("layered-reach is not a supported base kind")
    if kind is GraphPropertyKind.FOREST:
        return _forest_gadget(inst)
    n, s, t = _graph_frame(inst.template)
    k = inst.k
    n2 = n + k * n * n
    t2 = t
    if s is not None and s == t and k > 0:
        t2 = chain_vertex(n, k, t, t, k)
    template = TemplateWord(encode_graph(Graph(n2, kind.directed, ((0,) * n2,) * n2, s=s, t=t2), template=True))
    members = []
    for i, fam in enumerate(inst.families, 1):
        for w in fam:
            g = decode_graph(w.symbols, kind)
            edges = set()
            for a in range(n):
                for b in range(n):
                    prev = a if i == 1 else chain_vertex(n, k, a, b, i - 1)
                    edges.add((prev, chain_vertex(n, k, a, b, i)))
            for a, b in g.edges():
                if not kind.directed and (a >= b):
                    continue
                edges.add((chain_vertex(n, k, a, b, k), b))
            members.append(_word_of(n2, edges, kind.directed, s, t2, template))
    out = SubsetUnionInstance(template, tuple(members), k, kind.value)
    assert out.k <= inst.k
    return out


def _forest_gadget(inst: FamilyUnionInstance) -> SubsetUnionInstance:
    """Triangle gadget: two members of one family together close a cycle.

    Each member also gets its own isolated edge so that equal words from
    different families stay distinct members.
    """
    n, _, _ = _graph_frame(inst.template)
    pairs = sum(len(f) * (len(f) - 1) // 2 for f in inst.families)
    total = sum(len(f) for f in inst.families)
    n2 = n + 3 * pairs + 2 * total
    extra: dict[tuple[int, int], set[tuple[int, int]]] = {}
    nxt = n
    for x, fam in enumerate(inst.families):
        for i, j in itertools.combinations(range(len(fam)), 2):
            a, b, c = nxt, nxt + 1, nxt + 2
            nxt += 3
            extra.setdefault((x, i), set()).update({(a, b), (b, c)})
            extra.setdefault((x, j), set()).add((c, a))
    template = TemplateWord(encode_graph(Graph(n2, False, ((0,) * n2,) * n2), template=True))
    members = []
    for x, fam in enumerate(inst.families):
        for i, w in enumerate(fam):
            g = decode_graph(w.symbols, GraphPropertyKind.FOREST)
            edges = {(a, b) for a, b in g.edges() if a < b}
            edges |= extra.get((x, i), set())
            edges.add((nxt, nxt + 1))
            nxt += 2
            members.append(_word_of(n2, edges, False, None, None, template))
    out = SubsetUnionInstance(template, tuple(members), inst.k, "forest")
    assert out.k <= inst.k
    return out


# ---------------------------------------------------------------------------
# associative generability via replacement systems


@dataclass(frozen=True)
class RepresentativeSystem:
    """Irreducible representatives of all classes of nonempty words, with the induced operation."""

    rules: ReplacementSystem
    words: tuple[Word, ...]
    table: tuple[tuple[int, ...], ...]

    def index(self, word: Sequence[str]) -> int:
        return self.words.index(tuple(word))

    def name(self, i: int) -> str:
        return ".".join(self.words[i])

    def normal_form(self, word: Sequence[str]) -> Word:
        return rs_normalize(self.rules, word)


def representative_system(rules: ReplacementSystem, limit: int | None = None) -> RepresentativeSystem:
    """Close the letters under concatenation followed by normalization."""
    words: list[Word] = []
    index: dict[Word, int] = {}

    def add(w: Word) -> int:
        if w not in index:
            if limit is not None and len(words) >= limit:
                raise ReductionError(f"representative count exceeds the bound {limit}")
            index[w] = len(words)
            words.append(w)
        return index[w]

    for a in rules.alphabet:
        add(rs_normalize(rules, (a,)))
    products: dict[tuple[int, int], int] = {}
    done = 0
    while done < len(words):
        # extend the table by the rows and columns of the newly added words
        hi = len(words)
        for u in range(hi):
            for v in range(hi):
                if (u, v) not in products:
                    # both factors are irreducible, so redexes straddle the junction
                    cut = max(0, len(words[u]) - rules.max_lhs + 1)
                    products[(u, v)] = add(rs_normalize(rules, words[u] + words[v], start=cut))
        done = hi
    n = len(words)
    table = tuple(tuple(products[(u, v)] for v in range(n)) for u in range(n))
    for w in words:
        assert is_irreducible(rules, w), f"representative {w} is reducible"
    return RepresentativeSystem(rules, tuple(words), table)


def _agen_frame(template: TemplateWord) -> GeneratorInstance:
    inst, chosen = decode_agen(template.symbols)
    if chosen:
        raise ReductionError("agen template must leave every candidate open")
    return inst


def family_agen_rules(frame: GeneratorInstance, k: int) -> tuple[ReplacementSystem, dict[str, str]]:
    """Rules of the family reduction over U plus e_1..e_k, x' and an error letter."""
    U = frame.universe
    taken = set(U)
    e = [_fresh(f"#e{i}", taken) for i in range(1, k + 1)]
    xp = _fresh("#x", taken)
    err = _fresh("#err", taken)
    x = U[frame.target]
    gamma = U + tuple(e) + (xp, err)
    rules: list[tuple[Word, Word]] = []
    for a in range(len(U)):
        for b in range(len(U)):
            rules.append(((U[a], U[b]), (U[frame.table[a][b]],)))
    rules.append(((x, *e), (xp,)))
    for u in gamma:
        rules.append(((err, u), (err,)))
        if u != err:
            rules.append(((u, err), (err,)))
    for i, ei in enumerate(e):
        for u in gamma:
            if i + 1 < k and u == e[i + 1]:
                continue
            if u != err:
                rules.append(((ei, u), (err,)))
    for u in gamma:
        if u != err:
            rules.append(((xp, u), (err,)))
    # completion: a x' and a x e_1..e_k must meet
    for a in range(len(U)):
        ax = frame.table[a][frame.target]
        rhs = (xp,) if ax == frame.target else (U[ax], *e)
        rules.append(((U[a], xp), rhs))
    names = {"x'": xp, "error": err, **{f"e{i}": n for i, n in enumerate(e, 1)}}
    return ReplacementSystem(gamma, tuple(rules)), names


def family_to_subset_agen(inst: FamilyUnionInstance) -> SubsetUnionInstance:
    if inst.kind != "agen":
        raise ReductionError("family_to_subset_agen needs base kind agen")
    frame = _agen_frame(inst.template)
    k = inst.k
    if k == 0:
        return SubsetUnionInstance(inst.template, (), 0, "agen")
    rules, names = family_agen_rules(frame, k)
    bound = 1 + (len(frame.universe) + k) * (k * k + 1)
    reps = representative_system(rules, limit=bound)
    assert len(reps.words) <= bound
    e = [reps.index((names[f"e{i}"],)) for i in range(1, k + 1)]
    C = [reps.index((frame.universe[c],)) for c in frame.candidates]
    gen = GeneratorInstance(
        tuple(reps.name(i) for i in range(len(reps.words))),
        reps.table,
        reps.index((names["x'"],)),
        tuple(C + e),
        k,
    )
    template = TemplateWord(encode_agen(gen))
    members = []
    for i, fam in enumerate(inst.families):
        for w in fam:
            _, chosen = decode_agen(w.symbols)
            picked = [reps.index((frame.universe[c],)) for c in chosen] + [e[i]]
            members.append(InstantiationWord(encode_agen(gen, picked), template))
    out = SubsetUnionInstance(template, tuple(members), k, "agen")
    assert out.k <= inst.k
    return out


def weighted_agen_rules(frame: GeneratorInstance, selections: Sequence[Sequence[int]]) -> tuple[ReplacementSystem, dict[str, str]]:
    """Rules of the weighted reduction.

    Selector ``sel_i`` followed by j ticks and a non-tick letter u becomes
    the j-th candidate picked by member i, followed by u.  A start marker
    that only the generating set can supply keeps the selection count
    exact.
    """
    U = frame.universe
    taken = set(U)
    err = _fresh("#err", taken)
    start = _fresh("#start", taken)
    end = _fresh("#end", taken)
    tick = _fresh("#tick", taken)
    sel = [_fresh(f"#sel{i}", taken) for i in range(1, len(selections) + 1)]
    gamma = U + (err, start, end, tick) + tuple(sel)
    longest = max(max((len(s) for s in selections), default=0), 1)
    rules: list[tuple[Word, Word]] = []
    for a in range(len(U)):
        for b in range(len(U)):
            rules.append(((U[a], U[b]), (U[frame.table[a][b]],)))
    for u in gamma:
        rules.append(((err, u), (err,)))
        if u != err:
            rules.append(((u, err), (err,)))
            rules.append(((end, u), (err,)))
            if u != start:
                rules.append(((u, start), (err,)))
    rules.append(((start, start), (err,)))
    for s, picks in zip(sel, selections):
        for j, c in enumerate(picks, 1):
            for u in gamma:
                if u not in (tick, err):
                    rules.append(((s, *(tick,) * j, u), (U[c], u)))
        for u in gamma:
            if u not in (tick, err):
                rules.append(((s, u), (err,)))
        rules.append(((s, *(tick,) * (len(picks) + 1)), (err,)))
    rules.append((((tick,) * (longest + 1)), (err,)))
    for u in U + (start, end):
        rules.append(((u, tick), (err,)))
    names = {"error": err, "start": start, "end": end, "tick": tick, **{f"sel{i}": n for i, n in enumerate(sel, 1)}}
    return ReplacementSystem(gamma, tuple(rules)), names


def subset_to_weighted_agen(inst: SubsetUnionInstance) -> WeightedUnionInstance:
    if inst.kind != "agen":
        raise ReductionError("subset_to_weighted_agen needs base kind agen")
    frame = _agen_frame(inst.template)
    selections = [decode_agen(w.symbols)[1] for w in inst.S]
    rules, names = weighted_agen_rules(frame, selections)
    reps = representative_system(rules)
    target = reps.normal_form((names["start"], frame.universe[frame.target], names["end"]))
    cands = [reps.index((names[key],)) for key in ("start", "end", "tick")]
    cands += [reps.index((names[f"sel{i}"],)) for i in range(1, len(inst.S) + 1)]
    gen = GeneratorInstance(
        tuple(reps.name(i) for i in range(len(reps.words))),
        reps.table,
        reps.index(target),
        tuple(cands),
        inst.k + 3,
    )
    out = WeightedUnionInstance(TemplateWord(encode_agen(gen)), inst.k + 3, "agen")
    assert out.k <= inst.k + 3
    return out


def weighted_to_generator(inst: WeightedUnionInstance) -> GeneratorInstance:
    """Read a weighted agen instance as the generator instance it encodes."""
    frame = _agen_frame(inst.template)
    return GeneratorInstance(frame.universe, frame.table, frame.target, frame.candidates, inst.k, associative=False)


__all__ = [
    "ReductionError",
    "RepresentativeSystem",
    "chain_vertex",
    "family_agen_rules",
    "family_to_subset_agen",
    "family_to_subset_bf",
    "family_to_subset_graph",
    "projection_to_family_union",
    "representative_system",
    "subset_to_weighted_agen",
    "subset_to_weighted_bf",
    "weighted_agen_rules",
    "weighted_to_generator",
]
