"""Instance types, word codecs and the template/instantiation union algebra.

Words are tuples of string tokens, so a single symbol may be several
characters long (``"n=4"``, ``"and/3"``, ``"#e1"``).  The tokens ``?``,
``0`` and ``1`` are reserved: ``?`` marks a hole in a template and the
bits fill holes in an instantiation.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

HOLE = "?"
BITS = ("0", "1")
RESERVED = frozenset({HOLE, *BITS})
# tokens with a structural meaning in the text format
MARKERS = frozenset({"|", "-", "->"})

Word = tuple[str, ...]


class IncompatibleInstantiations(ValueError):
    pass


class InvalidInstance(ValueError):
    pass


def check_name(name: str, what: str = "symbol") -> str:
    if not isinstance(name, str) or not name:
        raise InvalidInstance(f"{what} must be a nonempty string, got {name!r}")
    if name in RESERVED or name in MARKERS:
        raise InvalidInstance(f"{what} {name!r} is reserved")
    if any(ch.isspace() for ch in name):
        raise InvalidInstance(f"{what} {name!r} contains whitespace")
    return name


def check_alphabet(symbols: Iterable[str], what: str = "symbol") -> tuple[str, ...]:
    out = tuple(symbols)
    for s in out:
        check_name(s, what)
    if len(set(out)) != len(out):
        raise InvalidInstance(f"duplicate {what} in {out!r}")
    return out


def _frozen_meta(meta: Mapping | None) -> Mapping:
    return MappingProxyType(dict(meta or {}))


# ---------------------------------------------------------------------------
# templates and instantiations


@dataclass(frozen=True)
class TemplateWord:
    symbols: Word

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        for s in self.symbols:
            if s in BITS:
                raise InvalidInstance("a template may not contain 0 or 1")

    @cached_property
    def holes(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.symbols) if s == HOLE)

    def __len__(self) -> int:
        return len(self.symbols)

    def fill(self, bits: Sequence[int | str]) -> "InstantiationWord":
        """Instantiate with one bit per hole, in hole order."""
        if len(bits) != len(self.holes):
            raise ValueError(f"need {len(self.holes)} bits, got {len(bits)}")
        out = list(self.symbols)
        for pos, b in zip(self.holes, bits):
            out[pos] = str(int(b))
        return InstantiationWord(tuple(out), self)

    def instantiations(self) -> Iterator["InstantiationWord"]:
        for bits in itertools.product((0, 1), repeat=len(self.holes)):
            yield self.fill(bits)

    def weight_k(self, k: int) -> Iterator["InstantiationWord"]:
        """All instantiations with exactly k ones."""
        n = len(self.holes)
        for ones in itertools.combinations(range(n), k):
            bits = [0] * n
            for i in ones:
                bits[i] = 1
            yield self.fill(bits)

    def __str__(self) -> str:
        return " ".join(self.symbols)


@dataclass(frozen=True)
class InstantiationWord:
    symbols: Word
    template: TemplateWord

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not is_instantiation_of(self.symbols, self.template):
            raise InvalidInstance("word is not an instantiation of its template")

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(self.symbols[i]) for i in self.template.holes)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return " ".join(self.symbols)


def is_instantiation_of(s: Sequence[str] | InstantiationWord, t: TemplateWord) -> bool:
    symbols = s.symbols if isinstance(s, InstantiationWord) else tuple(s)
    if len(symbols) != len(t.symbols):
        return False
    for a, b in zip(symbols, t.symbols):
        if b == HOLE:
            if a not in BITS:
                return False
        elif a != b:
            return False
    return True


def union_instantiations(items: Sequence[InstantiationWord]) -> InstantiationWord:
    """Bitwise or over the hole positions of instantiations of one template."""
    if not items:
        raise IncompatibleInstantiations("union of an empty list")
    t = items[0].template
    if any(it.template != t for it in items[1:]):
        raise IncompatibleInstantiations("instantiations of different templates")
    out = list(t.symbols)
    for pos in t.holes:
        out[pos] = "1" if any(it.symbols[pos] == "1" for it in items) else "0"
    return InstantiationWord(tuple(out), t)


def weight(s: InstantiationWord) -> int:
    return sum(1 for i in s.template.holes if s.symbols[i] == "1")


# ---------------------------------------------------------------------------
# Boolean formulas
#
# Nodes are nested tuples: ("var", i), ("const", b), ("not", x),
# ("imp", x, y), ("and", (xs...)), ("or", (xs...)).


def var(i: int) -> tuple:
    return ("var", i)


def const(b: bool) -> tuple:
    return ("const", bool(b))


def neg(x: tuple) -> tuple:
    return ("not", x)


def imp(x: tuple, y: tuple) -> tuple:
    return ("imp", x, y)


def _nary(op: str, xs: Sequence[tuple]) -> tuple:
    flat: list[tuple] = []
    for x in xs:
        if x[0] == op:
            flat.extend(x[1])
        else:
            flat.append(x)
    if len(flat) == 1:
        return flat[0]
    return (op, tuple(flat))


def conj(*xs: tuple) -> tuple:
    if not xs:
        return const(True)
    return _nary("and", xs)


def disj(*xs: tuple) -> tuple:
    if not xs:
        return const(False)
    return _nary("or", xs)


_OPS = {"and": "∧", "or": "∨"}


@dataclass(frozen=True)
class BooleanFormula:
    root: tuple
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", check_alphabet(self.names, "variable"))
        for n in self.names:
            if n in ("T", "F", "not", "imp") or "/" in n:
                raise InvalidInstance(f"variable name {n!r} clashes with an operator token")
        for node in self.nodes():
            if node[0] == "var" and not 0 <= node[1] < len(self.names):
                raise InvalidInstance(f"variable index {node[1]} out of range")

    @property
    def m(self) -> int:
        return len(self.names)

    def nodes(self) -> Iterator[tuple]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            tag = node[0]
            if tag == "not":
                stack.append(node[1])
            elif tag == "imp":
                stack.extend((node[1], node[2]))
            elif tag in ("and", "or"):
                stack.extend(node[1])
            elif tag not in ("var", "const"):
                raise InvalidInstance(f"unknown formula node {tag!r}")

    def tokens(self) -> Word:
        """Prefix token encoding; variables are written by name."""
        out: list[str] = []

        def walk(node):
            tag = node[0]
            if tag == "var":
                out.append(self.names[node[1]])
            elif tag == "const":
                out.append("T" if node[1] else "F")
            elif tag == "not":
                out.append("not")
                walk(node[1])
            elif tag == "imp":
                out.append("imp")
                walk(node[1])
                walk(node[2])
            else:
                out.append(f"{tag}/{len(node[1])}")
                for x in node[1]:
                    walk(x)

        walk(self.root)
        return tuple(out)

    @classmethod
    def from_tokens(cls, names: Sequence[str], tokens: Sequence[str]) -> "BooleanFormula":
        index = {n: i for i, n in enumerate(names)}
        pos = 0

        def parse():
            nonlocal pos
            if pos >= len(tokens):
                raise InvalidInstance("truncated formula")
            tok = tokens[pos]
            pos += 1
            if tok == "T" or tok == "F":
                return const(tok == "T")
            if tok == "not":
                return neg(parse())
            if tok == "imp":
                a = parse()
                return imp(a, parse())
            if "/" in tok:
                op, _, arity = tok.partition("/")
                if op not in ("and", "or") or not arity.isdigit():
                    raise InvalidInstance(f"bad operator token {tok!r}")
                return (op, tuple(parse() for _ in range(int(arity))))
            if tok not in index:
                raise InvalidInstance(f"unknown variable {tok!r}")
            return var(index[tok])

        root = parse()
        if pos != len(tokens):
            raise InvalidInstance("trailing tokens after formula")
        return cls(root, tuple(names))

    def pretty(self) -> str:
        """Infix rendering, e.g. ``v2∧((v3∨v4)→v2)∧(v2∨v4)``."""

        def show(node, top=False) -> str:
            tag = node[0]
            if tag == "var":
                return self.names[node[1]]
            if tag == "const":
                return "⊤" if node[1] else "⊥"
            if tag == "not":
                return "¬" + show(node[1])
            if tag == "imp":
                text = show(node[1]) + "→" + show(node[2])
            else:
                text = _OPS[tag].join(show(x) for x in node[1])
            return text if top else f"({text})"

        return show(self.root, top=True)


@dataclass(frozen=True)
class BfInstance:
    """A formula together with an assignment to its variables."""

    formula: BooleanFormula
    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(b) for b in self.assignment))
        if len(self.assignment) != self.formula.m or any(b not in (0, 1) for b in self.assignment):
            raise InvalidInstance("assignment needs one bit per variable")


# ---------------------------------------------------------------------------
# graphs


class GraphPropertyKind(str, enum.Enum):
    REACH = "reach"
    DAG_REACH = "dag-reach"
    LAYERED_REACH = "layered-reach"
    CYCLE = "cycle"
    UNDIRECTED_REACH = "undirected-reach"
    TREE = "tree"
    FOREST = "forest"
    UNDIRECTED_CYCLE = "undirected-cycle"

    @property
    def directed(self) -> bool:
        return self in (self.REACH, self.DAG_REACH, self.LAYERED_REACH, self.CYCLE)

    @property
    def needs_endpoints(self) -> bool:
        return self in (self.REACH, self.DAG_REACH, self.LAYERED_REACH, self.UNDIRECTED_REACH)


@dataclass(frozen=True)
class Graph:
    n: int
    directed: bool
    adj: tuple[tuple[int, ...], ...]
    layers: tuple[int, ...] | None = None
    s: int | None = None
    t: int | None = None

    def __post_init__(self):
        adj = tuple(tuple(int(b) for b in row) for row in self.adj)
        object.__setattr__(self, "adj", adj)
        if self.n < 0 or len(adj) != self.n or any(len(r) != self.n for r in adj):
            raise InvalidInstance("adjacency matrix must be n x n")
        if any(b not in (0, 1) for r in adj for b in r):
            raise InvalidInstance("adjacency entries must be 0 or 1")
        if not self.directed and any(adj[i][j] != adj[j][i] for i in range(self.n) for j in range(self.n)):
            raise InvalidInstance("undirected adjacency must be symmetric")
        for v in (self.s, self.t):
            if v is not None and not 0 <= v < self.n:
                raise InvalidInstance("distinguished vertex out of range")
        if self.layers is not None:
            layers = tuple(self.layers)
            object.__setattr__(self, "layers", layers)
            if len(layers) != self.n or any(x < 0 for x in layers):
                raise InvalidInstance("one non-negative layer index per vertex")
            for u, v in self.edges():
                if layers[v] != layers[u] + 1:
                    raise InvalidInstance("layered edge must go to the next layer")
            if self.s is not None and self.t is not None and self.n:
                top = max(layers)
                if layers.count(0) != 1 or layers.count(top) != 1:
                    raise InvalidInstance("first and last layer must hold one vertex each")
                if layers[self.s] != 0 or layers[self.t] != top:
                    raise InvalidInstance("s and t must sit on the first and last layer")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = True, **kw) -> "Graph":
        m = [[0] * n for _ in range(n)]
        for u, v in edges:
            m[u][v] = 1
            if not directed:
                m[v][u] = 1
        return cls(n, directed, tuple(map(tuple, m)), **kw)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(self.n) if self.adj[u][v]]

    def successors(self, u: int) -> list[int]:
        return [v for v in range(self.n) if self.adj[u][v]]


# ---------------------------------------------------------------------------
# machines and automata

MOVES = {"L": -1, "S": 0, "R": 1}


@dataclass(frozen=True)
class SingleTapeTM:
    """Single-tape machine; ``alphabet[0]`` is the blank."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[tuple[str, str, str, str, str], ...]
    initial: str
    accepting: frozenset[str]
    deterministic: bool
    meta: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", check_alphabet(self.states, "state"))
        object.__setattr__(self, "alphabet", check_alphabet(self.alphabet, "tape symbol"))
        object.__setattr__(self, "transitions", tuple(sorted(set(map(tuple, self.transitions)))))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "meta", _frozen_meta(self.meta))
        qs, gs = set(self.states), set(self.alphabet)
        if not self.alphabet:
            raise InvalidInstance("tape alphabet needs a blank")
        if self.initial not in qs or not self.accepting <= qs:
            raise InvalidInstance("initial/accepting states must be states")
        for q, a, q2, b, mv in self.transitions:
            if q not in qs or q2 not in qs or a not in gs or b not in gs or mv not in MOVES:
                raise InvalidInstance(f"bad transition {(q, a, q2, b, mv)}")
        if self.deterministic and any(len(v) > 1 for v in self.delta.values()):
            raise InvalidInstance("deterministic machine with two transitions on one key")

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    @cached_property
    def delta(self) -> Mapping[tuple[str, str], tuple[tuple[str, str, str], ...]]:
        out: dict[tuple[str, str], list] = {}
        for q, a, q2, b, mv in self.transitions:
            out.setdefault((q, a), []).append((q2, b, mv))
        return {k: tuple(v) for k, v in out.items()}


@dataclass(frozen=True)
class TwoTapeTM:
    """Read-only input tape plus one work tape; ``work_alphabet[0]`` is the blank.

    A transition is ``(q, input symbol, work symbol, q', written, input move,
    work move)``.  The input head ranges over positions ``0..max(|x|,1)-1``; on
    the empty input it reads the blank.
    """

    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    work_alphabet: tuple[str, ...]
    transitions: tuple[tuple[str, str, str, str, str, str, str], ...]
    initial: str
    accepting: frozenset[str]
    deterministic: bool

    def __post_init__(self):
        object.__setattr__(self, "states", check_alphabet(self.states, "state"))
        object.__setattr__(self, "input_alphabet", check_alphabet(self.input_alphabet, "input symbol"))
        object.__setattr__(self, "work_alphabet", check_alphabet(self.work_alphabet, "tape symbol"))
        object.__setattr__(self, "transitions", tuple(sorted(set(map(tuple, self.transitions)))))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        qs = set(self.states)
        ins = set(self.input_alphabet) | {self.blank}
        ws = set(self.work_alphabet)
        if self.initial not in qs or not self.accepting <= qs:
            raise InvalidInstance("initial/accepting states must be states")
        keys: dict[tuple, int] = {}
        for q, a, w, q2, w2, mi, mw in self.transitions:
            if q not in qs or q2 not in qs or a not in ins or w not in ws or w2 not in ws:
                raise InvalidInstance("bad two-tape transition")
            if mi not in MOVES or mw not in MOVES:
                raise InvalidInstance("bad head move")
            keys[(q, a, w)] = keys.get((q, a, w), 0) + 1
        if self.deterministic and any(c > 1 for c in keys.values()):
            raise InvalidInstance("deterministic machine with two transitions on one key")

    @property
    def blank(self) -> str:
        return self.work_alphabet[0]


@dataclass(frozen=True)
class BoundedTMInstance:
    machine: SingleTapeTM
    t: int
    s: int
    meta: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "meta", _frozen_meta(self.meta))
        if self.t < 0 or self.s < 1:
            raise InvalidInstance("need t >= 0 and s >= 1")


@dataclass(frozen=True)
class ParameterizedRun:
    """Input of the compression pipeline: a two-tape machine run on x."""

    machine: TwoTapeTM
    x: tuple[str, ...]
    t: int
    s: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if self.t < 0 or self.s < 1 or self.b < 1:
            raise InvalidInstance("need t >= 0, s >= 1, b >= 1")
        if not set(self.x) <= set(self.machine.input_alphabet):
            raise InvalidInstance("input word uses symbols outside the input alphabet")


LEFT_END, RIGHT_END = "<", ">"


@dataclass(frozen=True)
class MultiHeadAutomaton:
    """Two-way multi-head automaton with end markers ``<`` and ``>``.

    States are numbered by their position in ``states``.  A transition is
    ``(q, observed symbols, q', moves)`` with one move in ``L/S/R`` per head.
    Heads start on the first input symbol (or on ``>`` for empty input).
    """

    states: tuple[str, ...]
    heads: int
    transitions: tuple[tuple[str, tuple[str, ...], str, tuple[str, ...]], ...]
    initial: str
    accepting: frozenset[str]
    word: tuple[str, ...]
    dag: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", check_alphabet(self.states, "state"))
        object.__setattr__(self, "word", tuple(self.word))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        trans = tuple(sorted({(q, tuple(obs), q2, tuple(mv)) for q, obs, q2, mv in self.transitions}))
        object.__setattr__(self, "transitions", trans)
        qs = set(self.states)
        if self.heads < 1 or self.initial not in qs or not self.accepting <= qs:
            raise InvalidInstance("bad multi-head automaton header")
        for w in self.word:
            check_name(w, "input symbol")
            if w in (LEFT_END, RIGHT_END):
                raise InvalidInstance("end markers may not occur in the input")
        order = {q: i for i, q in enumerate(self.states)}
        for q, obs, q2, mv in trans:
            if q not in qs or q2 not in qs or len(obs) != self.heads or len(mv) != self.heads:
                raise InvalidInstance("bad multi-head transition")
            if any(m not in MOVES for m in mv):
                raise InvalidInstance("bad head move")
            if self.dag and order[q2] <= order[q]:
                raise InvalidInstance("dag automaton transition does not increase the state")

    @property
    def deterministic(self) -> bool:
        keys = [(q, obs) for q, obs, _, _ in self.transitions]
        return len(keys) == len(set(keys))

    @cached_property
    def delta(self) -> Mapping[tuple[str, tuple[str, ...]], tuple[tuple[str, tuple[str, ...]], ...]]:
        out: dict = {}
        for q, obs, q2, mv in self.transitions:
            out.setdefault((q, obs), []).append((q2, mv))
        return {k: tuple(v) for k, v in out.items()}


Window = tuple[str | None, str, str | None]


@dataclass(frozen=True)
class CellularAutomaton:
    """One-dimensional cellular automaton with a partial transition relation.

    ``transitions`` lists ``((left, own, right), new)`` where a missing
    neighbour (the array border) is ``None``.  A cell whose window has no
    successor dies; a cell next to a dead cell dies as well.  States are
    numbered by their position in ``states``.
    """

    states: tuple[str, ...]
    transitions: tuple[tuple[Window, str], ...]
    accepting: frozenset[str]
    deterministic: bool
    dag: bool = False
    meta: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", check_alphabet(self.states, "state"))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "meta", _frozen_meta(self.meta))
        trans = tuple(sorted(set((tuple(w), q) for w, q in self.transitions), key=_trans_key))
        object.__setattr__(self, "transitions", trans)
        qs = set(self.states)
        if not self.accepting <= qs:
            raise InvalidInstance("accepting states must be states")
        order = self.order
        for (l, c, r), q in trans:
            if c not in qs or q not in qs or (l is not None and l not in qs) or (r is not None and r not in qs):
                raise InvalidInstance(f"bad cellular transition {((l, c, r), q)}")
            if self.dag and any(x is not None and order[q] <= order[x] for x in (l, c, r)):
                raise InvalidInstance("dag automaton transition does not increase the state")
        if self.deterministic and any(len(v) > 1 for v in self.delta.values()):
            raise InvalidInstance("deterministic automaton with two successors for one window")

    @cached_property
    def order(self) -> Mapping[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def delta(self) -> Mapping[Window, tuple[str, ...]]:
        out: dict[Window, list[str]] = {}
        for w, q in self.transitions:
            out.setdefault(w, []).append(q)
        return {w: tuple(v) for w, v in out.items()}

    def successors(self, window: Window) -> tuple[str, ...]:
        return self.delta.get(window, ())


def _trans_key(item):
    (l, c, r), q = item
    return ("" if l is None else "\x01" + l, c, "" if r is None else "\x01" + r, q)


@dataclass(frozen=True)
class CellularInstance:
    automaton: CellularAutomaton
    initial: tuple[str, ...]
    meta: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "initial", tuple(self.initial))
        object.__setattr__(self, "meta", _frozen_meta(self.meta))
        if not self.initial:
            raise InvalidInstance("need at least one cell")
        if not set(self.initial) <= set(self.automaton.states):
            raise InvalidInstance("initial string uses unknown states")

    @property
    def k(self) -> int:
        return len(self.initial)


@dataclass(frozen=True)
class SequentialCellularInstance(CellularInstance):
    """Cells update one at a time, 1..k, within every major step.

    With ``horizon`` set the instance is in normalized form: it is accepted
    iff some run performs exactly ``horizon`` complete major steps.
    """

    horizon: int | None = None

    def __post_init__(self):
        super().__post_init__()
        if self.horizon is not None and self.horizon < 0:
            raise InvalidInstance("horizon must be non-negative")


@dataclass(frozen=True)
class ThresholdPebbleGame:
    graph: Graph
    threshold: tuple[int, ...]
    S: frozenset[int]
    T: frozenset[int]
    dag: bool = False
    cap: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "threshold", tuple(self.threshold))
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "T", frozenset(self.T))
        n = self.graph.n
        if not self.graph.directed:
            raise InvalidInstance("pebble games are played on directed graphs")
        if len(self.threshold) != n or any(x < 0 for x in self.threshold):
            raise InvalidInstance("one non-negative threshold per vertex")
        if not all(0 <= v < n for v in self.S | self.T):
            raise InvalidInstance("pebblings must be vertex sets")
        if self.cap is not None and self.cap < 0:
            raise InvalidInstance("negative pebble cap")

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        preds: list[list[int]] = [[] for _ in range(self.graph.n)]
        for u, v in self.graph.edges():
            preds[v].append(u)
        return tuple(map(tuple, preds))


@dataclass(frozen=True)
class LcsInstance:
    alphabet: tuple[str, ...]
    strings: tuple[tuple[str, ...], ...]
    l: int

    def __post_init__(self):
        object.__setattr__(self, "alphabet", check_alphabet(self.alphabet))
        object.__setattr__(self, "strings", tuple(tuple(s) for s in self.strings))
        if self.l < 0:
            raise InvalidInstance("target length must be non-negative")
        sigma = set(self.alphabet)
        if any(a not in sigma for s in self.strings for a in s):
            raise InvalidInstance("string uses a symbol outside the alphabet")

    @property
    def injective(self) -> bool:
        return all(len(set(s)) == len(s) for s in self.strings)


@dataclass(frozen=True)
class GeneratorInstance:
    """Universe ``U`` (names), operation table by index, target, candidates."""

    universe: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    target: int
    candidates: tuple[int, ...]
    k: int
    associative: bool = True

    def __post_init__(self):
        object.__setattr__(self, "universe", check_alphabet(self.universe, "element"))
        object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        object.__setattr__(self, "candidates", tuple(sorted(set(self.candidates))))
        n = len(self.universe)
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise InvalidInstance("operation table must be |U| x |U|")
        if any(not 0 <= v < n for r in self.table for v in r):
            raise InvalidInstance("operation table entry outside U")
        if not 0 <= self.target < n or any(not 0 <= c < n for c in self.candidates):
            raise InvalidInstance("target/candidates outside U")
        if self.k < 0:
            raise InvalidInstance("negative k")
        if self.associative:
            bad = find_nonassociative_triple(self.table)
            if bad is not None:
                raise InvalidInstance(f"operation is not associative at {bad}")

    @cached_property
    def op(self):
        import numpy as np

        return np.asarray(self.table, dtype=np.int64).reshape(len(self.universe), len(self.universe))

    def index(self, name: str) -> int:
        return self.universe.index(name)


def find_nonassociative_triple(table, exhaustive_limit: int = 32, samples: int = 20000, seed: int = 0):
    """Return a witness triple or None.  Exhaustive up to the limit, sampled beyond."""
    import numpy as np

    n = len(table)
    if n == 0:
        return None
    op = np.asarray(table, dtype=np.int64).reshape(n, n)
    if n <= exhaustive_limit:
        # (a∘b)∘c versus a∘(b∘c) for all triples at once
        left = op[op[:, :, None], np.arange(n)[None, None, :]]
        right = op[np.arange(n)[:, None, None], op[None, :, :]]
        bad = np.argwhere(left != right)
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, samples))
        mask = op[op[a, b], c] != op[a, op[b, c]]
        bad = np.stack([a[mask], b[mask], c[mask]], axis=1)
    if len(bad):
        return tuple(int(v) for v in bad[0])
    return None


@dataclass(frozen=True)
class ReplacementSystem:
    alphabet: tuple[str, ...]
    rules: tuple[tuple[Word, Word], ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", check_alphabet(self.alphabet))
        rules = tuple((tuple(l), tuple(r)) for l, r in self.rules)
        object.__setattr__(self, "rules", rules)
        sigma = set(self.alphabet)
        for l, r in rules:
            if not l:
                raise InvalidInstance("rule with empty left-hand side")
            if not set(l) <= sigma or not set(r) <= sigma:
                raise InvalidInstance("rule uses a symbol outside the alphabet")

    @cached_property
    def by_first(self) -> Mapping[str, tuple[tuple[Word, Word], ...]]:
        out: dict[str, list] = {}
        for l, r in self.rules:
            out.setdefault(l[0], []).append((l, r))
        return {a: tuple(v) for a, v in out.items()}

    @cached_property
    def max_lhs(self) -> int:
        return max((len(l) for l, _ in self.rules), default=0)


# ---------------------------------------------------------------------------
# compatible projections


@dataclass(frozen=True)
class CompatibleProjection:
    """A position-wise map from (x, advice, b) to words of one fixed template.

    Each output position is one of ``("c", symbol)``, ``("x", j, table)``,
    ``("a", j, table)`` or ``("b", j, (image of 0, image of 1))``.  A ``table``
    is a tuple of ``(input symbol, output symbol)`` pairs or None for the
    identity; ``j`` indexes x, the advice word or the choice bits.  The choice
    bits form ``f_x`` blocks of ``width`` bits each.
    """

    n: int
    advice_length: int
    f_x: int
    width: int
    positions: tuple[tuple, ...]
    kind: str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(_norm_pos(p) for p in self.positions))
        nbits = self.f_x * self.width
        for p in self.positions:
            tag = p[0]
            if tag == "c":
                check_name(p[1])
            elif tag == "x" and not 0 <= p[1] < self.n:
                raise InvalidInstance("x position out of range")
            elif tag == "a" and not 0 <= p[1] < self.advice_length:
                raise InvalidInstance("advice position out of range")
            elif tag == "b":
                if not 0 <= p[1] < nbits:
                    raise InvalidInstance("choice-bit position out of range")
                if any(v not in BITS for v in p[2]):
                    raise InvalidInstance("choice-bit positions must produce 0 or 1")
            elif tag not in ("c", "x", "a", "b"):
                raise InvalidInstance(f"unknown position tag {tag!r}")

    @property
    def choice_bits(self) -> int:
        return self.f_x * self.width

    def block_of(self, bit: int) -> int:
        return bit // self.width

    def apply(self, x: Sequence[str], advice: Sequence[str], b: Sequence[int | str]) -> Word:
        if len(x) != self.n or len(advice) != self.advice_length or len(b) != self.choice_bits:
            raise ValueError("argument lengths do not match the projection")
        out = []
        for p in self.positions:
            tag = p[0]
            if tag == "c":
                out.append(p[1])
            elif tag in ("x", "a"):
                src = (x if tag == "x" else advice)[p[1]]
                out.append(src if p[2] is None else dict(p[2])[src])
            else:
                out.append(p[2][int(b[p[1]])])
        return tuple(out)

    def template(self, x: Sequence[str], advice: Sequence[str]) -> TemplateWord:
        zeros = [0] * self.choice_bits
        word = list(self.apply(x, advice, zeros))
        for i, p in enumerate(self.positions):
            if p[0] == "b":
                word[i] = HOLE
        return TemplateWord(tuple(word))


@dataclass(frozen=True)
class ProjectionInstance:
    """A projection together with the input word and advice it is applied to."""

    projection: CompatibleProjection
    x: tuple[str, ...]
    advice: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "advice", tuple(self.advice))
        for a in self.x + self.advice:
            check_name(a, "input symbol")


def _norm_pos(p) -> tuple:
    p = tuple(p)
    if p[0] in ("x", "a"):
        table = None if len(p) < 3 or p[2] is None else tuple(tuple(e) for e in p[2])
        return (p[0], int(p[1]), table)
    if p[0] == "b":
        return ("b", int(p[1]), tuple(str(v) for v in p[2]))
    return p


def block_width(n: int) -> int:
    """Ceiling of log2 n, the number of bits naming a position of x."""
    return max(n - 1, 0).bit_length()


def doubling_projection(n: int, f_x: int, width: int | None = None) -> CompatibleProjection:
    """The projection (x, b) -> x b x b used as a running example."""
    width = block_width(n) if width is None else width
    half = [("x", j, None) for j in range(n)] + [("b", j, ("0", "1")) for j in range(f_x * width)]
    return CompatibleProjection(n, 0, f_x, width, tuple(half + half))


# ---------------------------------------------------------------------------
# union instances


def _check_members(template: TemplateWord, words: Iterable[InstantiationWord]) -> None:
    for w in words:
        if w.template != template:
            raise InvalidInstance("member is not an instantiation of the shared template")


def _dedup(words: Iterable[InstantiationWord]) -> tuple[InstantiationWord, ...]:
    seen, out = set(), []
    for w in words:
        if w.symbols not in seen:
            seen.add(w.symbols)
            out.append(w)
    return tuple(out)


@dataclass(frozen=True)
class FamilyUnionInstance:
    template: TemplateWord
    families: tuple[tuple[InstantiationWord, ...], ...]
    kind: str

    def __post_init__(self):
        fams = tuple(_dedup(f) for f in self.families)
        object.__setattr__(self, "families", fams)
        for f in fams:
            _check_members(self.template, f)

    @property
    def k(self) -> int:
        return len(self.families)


@dataclass(frozen=True)
class SubsetUnionInstance:
    template: TemplateWord
    S: tuple[InstantiationWord, ...]
    k: int
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "S", _dedup(self.S))
        _check_members(self.template, self.S)
        if self.k < 0:
            raise InvalidInstance("negative k")


@dataclass(frozen=True)
class WeightedUnionInstance:
    template: TemplateWord
    k: int
    kind: str

    def __post_init__(self):
        if self.k < 0:
            raise InvalidInstance("negative k")


# ---------------------------------------------------------------------------
# word codecs for the base problems of union instances
#
# bf:    vars/m name_1..name_m, formula tokens, then one bit per variable
# graph: "n=N" ["s=i" "t=j"] then the n*n adjacency entries row by row
# agen:  "U" then each element, followed by a bit slot if it is a candidate,
#        then "|", the |U|^2 table entries, "|" and the target


def encode_bf(f: BooleanFormula, assignment: Sequence[int | str] | None = None) -> Word:
    head = (f"vars/{f.m}", *f.names, *f.tokens())
    bits = [HOLE] * f.m if assignment is None else [str(int(b)) for b in assignment]
    if len(bits) != f.m:
        raise ValueError("assignment length differs from variable count")
    return head + tuple(bits)


def decode_bf(word: Sequence[str]) -> tuple[BooleanFormula, tuple[str, ...]]:
    word = tuple(word)
    if not word or not word[0].startswith("vars/"):
        raise InvalidInstance("bf word must start with vars/m")
    m = int(word[0][5:])
    names = word[1 : 1 + m]
    body, bits = word[1 + m : len(word) - m], word[len(word) - m :]
    return BooleanFormula.from_tokens(names, body), bits


def encode_graph(g: Graph, template: bool = False) -> Word:
    head = [f"n={g.n}"]
    if g.s is not None:
        head += [f"s={g.s}", f"t={g.t}"]
    cells = [HOLE if template else str(b) for row in g.adj for b in row]
    return tuple(head + cells)


def decode_graph(word: Sequence[str], kind: GraphPropertyKind | str) -> Graph:
    """Undirected kinds read entry (i, j) or (j, i) as the edge {i, j}."""
    kind = GraphPropertyKind(kind)
    word = tuple(word)
    head = {}
    i = 0
    while i < len(word) and "=" in word[i]:
        key, _, val = word[i].partition("=")
        head[key] = int(val)
        i += 1
    n = head.get("n")
    if n is None or len(word) - i != n * n:
        raise InvalidInstance("graph word needs n=N and n*n entries")
    m = [[0] * n for _ in range(n)]
    for idx, tok in enumerate(word[i:]):
        if tok not in BITS:
            raise InvalidInstance("graph word entries must be bits")
        if tok == "1":
            u, v = divmod(idx, n)
            m[u][v] = 1
            if not kind.directed:
                m[v][u] = 1
    if not kind.directed:
        for u in range(n):
            m[u][u] = 0
    return Graph(n, kind.directed, tuple(map(tuple, m)), s=head.get("s"), t=head.get("t"))


def encode_agen(inst: GeneratorInstance, selected: Iterable[int] | None = None) -> Word:
    chosen = None if selected is None else set(selected)
    cand = set(inst.candidates)
    out = ["U"]
    for i, name in enumerate(inst.universe):
        out.append(name)
        if i in cand:
            out.append(HOLE if chosen is None else ("1" if i in chosen else "0"))
    out.append("|")
    out.extend(inst.universe[v] for row in inst.table for v in row)
    out += ["|", inst.universe[inst.target]]
    return tuple(out)


def decode_agen(word: Sequence[str], k: int = 0) -> tuple[GeneratorInstance, tuple[int, ...]]:
    """Return the generator instance (without re-checking associativity) and G."""
    word = tuple(word)
    if not word or word[0] != "U":
        raise InvalidInstance("agen word must start with U")
    universe, cands, chosen = [], [], []
    i = 1
    while word[i] != "|":
        universe.append(word[i])
        i += 1
        if i < len(word) and word[i] in RESERVED:
            cands.append(len(universe) - 1)
            if word[i] == "1":
                chosen.append(len(universe) - 1)
            i += 1
    n = len(universe)
    index = {u: j for j, u in enumerate(universe)}
    cells = word[i + 1 : i + 1 + n * n]
    table = tuple(tuple(index[c] for c in cells[r * n : (r + 1) * n]) for r in range(n))
    if word[i + 1 + n * n] != "|":
        raise InvalidInstance("malformed agen word")
    target = index[word[i + 2 + n * n]]
    inst = GeneratorInstance(tuple(universe), table, target, tuple(cands), k, associative=False)
    return inst, tuple(chosen)
