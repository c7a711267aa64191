"""Plain-text instance files.

A file starts with a header line ``kind label`` where the label names the
parameter (``-`` if there is none).  Every following line is a record
``key token token ...``; a few records (``matrix``, ``row``, ``word``) are
followed by a block of lines.  Unary numbers are written as runs of ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .core import (
    BfInstance,
    BooleanFormula,
    BoundedTMInstance,
    CellularAutomaton,
    CellularInstance,
    CompatibleProjection,
    FamilyUnionInstance,
    GeneratorInstance,
    Graph,
    GraphPropertyKind,
    InstantiationWord,
    InvalidInstance,
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
)

UNARY_CAP = 10**6
BORDER = "-"


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# line reader


@dataclass
class _Reader:
    lines: list[str]
    pos: int = 0

    def peek(self) -> list[str] | None:
        while self.pos < len(self.lines) and not self.lines[self.pos].strip():
            self.pos += 1
        if self.pos >= len(self.lines):
            return None
        return self.lines[self.pos].split()

    def next(self) -> list[str]:
        toks = self.peek()
        if toks is None:
            raise ParseError("unexpected end of file")
        self.pos += 1
        return toks

    def raw(self) -> str:
        if self.pos >= len(self.lines):
            raise ParseError("unexpected end of file")
        line = self.lines[self.pos].strip()
        self.pos += 1
        return line

    def records(self) -> Iterator[list[str]]:
        while self.peek() is not None:
            yield self.next()


def _bit(tok: str) -> bool:
    if tok not in ("0", "1"):
        raise ParseError(f"expected 0 or 1, got {tok!r}")
    return tok == "1"


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}") from None


def unary(n: int) -> str:
    return "1" * n


def parse_unary(vals: list[str], cap: int = UNARY_CAP) -> int:
    if not vals:
        return 0
    if len(vals) != 1 or set(vals[0]) != {"1"}:
        raise ParseError("unary numbers are runs of 1")
    if len(vals[0]) > cap:
        raise ParseError(f"unary number exceeds cap {cap}")
    return len(vals[0])


def _line(key: str, *vals) -> str:
    return " ".join([key, *map(str, vals)])


def _matrix_rows(word: tuple[str, ...], n: int) -> list[str]:
    return ["".join(word[r * n : (r + 1) * n]) for r in range(n)]


def _read_matrix(rd: _Reader, n: int, allowed: str = "01") -> list[str]:
    cells = []
    for _ in range(n):
        row = rd.raw()
        if len(row) != n or any(ch not in allowed for ch in row):
            raise ParseError(f"matrix rows must be {n} characters from {allowed!r}")
        cells.extend(row)
    return cells


# ---------------------------------------------------------------------------
# per-kind writers


def _graph_lines(g: Graph) -> list[str]:
    out = [_line("n", g.n), _line("directed", int(g.directed))]
    if g.s is not None:
        out += [_line("s", g.s), _line("t", g.t)]
    if g.layers is not None:
        out.append(_line("layers", *g.layers))
    out.append("matrix")
    out += ["".join(map(str, row)) for row in g.adj]
    return out


def _tm_lines(m: SingleTapeTM) -> list[str]:
    out = [
        _line("states", *m.states),
        _line("alphabet", *m.alphabet),
        _line("initial", m.initial),
        _line("accepting", *sorted(m.accepting)),
    ]
    out += [_line("delta", *tr) for tr in m.transitions]
    return out


def _ca_lines(ca: CellularAutomaton) -> list[str]:
    out = [
        _line("states", *ca.states),
        _line("accepting", *sorted(ca.accepting)),
        _line("deterministic", int(ca.deterministic)),
        _line("dag", int(ca.dag)),
    ]
    for (l, c, r), q in ca.transitions:
        out.append(_line("delta", BORDER if l is None else l, c, BORDER if r is None else r, q))
    return out


def _word_lines(key: str, word: tuple[str, ...], base: str) -> list[str]:
    if base in GraphPropertyKind._value2member_map_:
        head = [tok for tok in word if "=" in tok]
        n = int(head[0][2:])
        return [_line(key, *head)] + _matrix_rows(word[len(head) :], n)
    return [_line(key, *word)]


def serialize(obj) -> str:
    """Canonical text of an instance; ``parse`` inverts it exactly."""
    if isinstance(obj, Graph):
        lines = ["graph -"] + _graph_lines(obj)
    elif isinstance(obj, BfInstance):
        f = obj.formula
        lines = ["bf -", _line("vars", *f.names), _line("formula", *f.tokens()), _line("assignment", *obj.assignment)]
    elif isinstance(obj, BoundedTMInstance):
        kind = "dtsc" if obj.machine.deterministic else "ntsc"
        lines = [f"{kind} s"] + _tm_lines(obj.machine) + [_line("t", unary(obj.t)), _line("s", unary(obj.s))]
    elif isinstance(obj, ParameterizedRun):
        m = obj.machine
        lines = [
            "tm2 s",
            _line("states", *m.states),
            _line("input", *m.input_alphabet),
            _line("alphabet", *m.work_alphabet),
            _line("initial", m.initial),
            _line("accepting", *sorted(m.accepting)),
            _line("deterministic", int(m.deterministic)),
        ]
        lines += [_line("delta", *tr) for tr in m.transitions]
        lines += [_line("x", *obj.x), _line("t", unary(obj.t)), _line("s", unary(obj.s)), _line("b", obj.b)]
    elif isinstance(obj, MultiHeadAutomaton):
        lines = [
            "mfa heads",
            _line("states", *obj.states),
            _line("heads", obj.heads),
            _line("initial", obj.initial),
            _line("accepting", *sorted(obj.accepting)),
            _line("dag", int(obj.dag)),
        ]
        lines += [_line("delta", q, *obs, q2, *mv) for q, obs, q2, mv in obj.transitions]
        lines.append(_line("word", *obj.word))
    elif isinstance(obj, SequentialCellularInstance):
        lines = ["seqca cells"] + _ca_lines(obj.automaton) + [_line("initial", *obj.initial)]
        if obj.horizon is not None:
            lines.append(_line("horizon", obj.horizon))
    elif isinstance(obj, CellularInstance):
        lines = ["ca cells"] + _ca_lines(obj.automaton) + [_line("initial", *obj.initial)]
    elif isinstance(obj, ThresholdPebbleGame):
        lines = ["tpg -"] + _graph_lines(obj.graph)
        lines += [
            _line("threshold", *obj.threshold),
            _line("S", *sorted(obj.S)),
            _line("T", *sorted(obj.T)),
            _line("dag", int(obj.dag)),
        ]
        if obj.cap is not None:
            lines.append(_line("cap", obj.cap))
    elif isinstance(obj, LcsInstance):
        lines = ["lcs strings", _line("alphabet", *obj.alphabet), _line("l", obj.l)]
        lines += [_line("string", *s) for s in obj.strings]
    elif isinstance(obj, GeneratorInstance):
        u = obj.universe
        lines = ["agen k", _line("universe", *u)]
        lines += [_line("row", *(u[v] for v in row)) for row in obj.table]
        lines += [
            _line("target", u[obj.target]),
            _line("candidates", *(u[c] for c in obj.candidates)),
            _line("k", obj.k),
            _line("associative", int(obj.associative)),
        ]
    elif isinstance(obj, ReplacementSystem):
        lines = ["rs -", _line("alphabet", *obj.alphabet)]
        lines += [_line("rule", *lhs, "->", *rhs) for lhs, rhs in obj.rules]
    elif isinstance(obj, ProjectionInstance):
        p = obj.projection
        lines = [
            "projection -",
            _line("n", p.n),
            _line("advice_length", p.advice_length),
            _line("f_x", p.f_x),
            _line("width", p.width),
            _line("kind", p.kind),
        ]
        for pos in p.positions:
            if pos[0] == "c":
                lines.append(_line("pos", "c", pos[1]))
            elif pos[0] in ("x", "a"):
                table = [] if pos[2] is None else [f"{a}:{b}" for a, b in pos[2]]
                lines.append(_line("pos", pos[0], pos[1], *table))
            else:
                lines.append(_line("pos", "b", pos[1], *pos[2]))
        lines += [_line("x", *obj.x), _line("advice", *obj.advice)]
    elif isinstance(obj, FamilyUnionInstance):
        lines = ["family-union k", _line("base", obj.kind)] + _word_lines("template", obj.template.symbols, obj.kind)
        for fam in obj.families:
            lines.append("family")
            for w in fam:
                lines += _word_lines("word", w.symbols, obj.kind)
    elif isinstance(obj, SubsetUnionInstance):
        lines = ["subset-union k", _line("base", obj.kind), _line("k", obj.k)]
        lines += _word_lines("template", obj.template.symbols, obj.kind)
        for w in obj.S:
            lines += _word_lines("word", w.symbols, obj.kind)
    elif isinstance(obj, WeightedUnionInstance):
        lines = ["weighted-union k", _line("base", obj.kind), _line("k", obj.k)]
        lines += _word_lines("template", obj.template.symbols, obj.kind)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# per-kind readers


def _fields(rd: _Reader, multi: tuple[str, ...] = ("delta",), blocks: dict | None = None) -> dict:
    """Collect records; keys in ``multi`` may repeat, ``blocks`` read extra lines."""
    out: dict = {k: [] for k in multi}
    for toks in rd.records():
        key, vals = toks[0], toks[1:]
        if blocks and key in blocks:
            vals = blocks[key](rd, vals, out)
        if key in multi:
            out[key].append(vals)
        elif key in out:
            raise ParseError(f"duplicate record {key!r}")
        else:
            out[key] = vals
    return out


def _need(f: dict, key: str) -> list[str]:
    if key not in f:
        raise ParseError(f"missing record {key!r}")
    return f[key]


def _one(f: dict, key: str) -> str:
    vals = _need(f, key)
    if len(vals) != 1:
        raise ParseError(f"record {key!r} takes one value")
    return vals[0]


def _read_graph_block(rd: _Reader, vals, out) -> list[str]:
    n = _int(_one(out, "n"))
    return _read_matrix(rd, n)


def _graph_from(f: dict) -> Graph:
    n = _int(_one(f, "n"))
    cells = _need(f, "matrix")
    adj = tuple(tuple(int(c) for c in cells[r * n : (r + 1) * n]) for r in range(n))
    s = _int(_one(f, "s")) if "s" in f else None
    t = _int(_one(f, "t")) if "t" in f else None
    layers = tuple(_int(v) for v in f["layers"]) if "layers" in f else None
    return Graph(n, _bit(_one(f, "directed")), adj, layers=layers, s=s, t=t)


def _tm_from(f: dict, deterministic: bool) -> SingleTapeTM:
    trans = []
    for vals in f["delta"]:
        if len(vals) != 5:
            raise ParseError("delta records take q a q' b move")
        trans.append(tuple(vals))
    return SingleTapeTM(
        tuple(_need(f, "states")),
        tuple(_need(f, "alphabet")),
        tuple(trans),
        _one(f, "initial"),
        frozenset(_need(f, "accepting")),
        deterministic,
    )


def _ca_from(f: dict) -> CellularAutomaton:
    trans = []
    for vals in f["delta"]:
        if len(vals) != 4:
            raise ParseError("delta records take left own right new")
        l, c, r, q = vals
        trans.append(((None if l == BORDER else l, c, None if r == BORDER else r), q))
    return CellularAutomaton(
        tuple(_need(f, "states")),
        tuple(trans),
        frozenset(_need(f, "accepting")),
        _bit(_one(f, "deterministic")),
        dag=_bit(_one(f, "dag")),
    )


def _read_word(rd: _Reader, vals: list[str], base: str) -> tuple[str, ...]:
    if base in GraphPropertyKind._value2member_map_:
        head = [v for v in vals if v.startswith("n=")]
        if not head:
            raise ParseError("graph words need n=N")
        n = _int(head[0][2:])
        return tuple(vals) + tuple(_read_matrix(rd, n, "01?"))
    return tuple(vals)


def _union_from(kind: str, rd: _Reader):
    first = rd.next()
    if first[0] != "base" or len(first) != 2:
        raise ParseError("union files start with a base record")
    base = first[1]
    if base not in ("bf", "agen") and base not in GraphPropertyKind._value2member_map_:
        raise ParseError(f"unknown base kind {base!r}")
    k = None
    template = None
    families: list[list[tuple[str, ...]]] = []
    words: list[tuple[str, ...]] = []
    for toks in rd.records():
        key, vals = toks[0], toks[1:]
        if key == "k":
            k = _int(vals[0])
        elif key == "template":
            template = TemplateWord(_read_word(rd, vals, base))
        elif key == "family":
            families.append([])
        elif key == "word":
            w = _read_word(rd, vals, base)
            (families[-1] if kind == "family-union" and families else words).append(w)
            if kind == "family-union" and not families:
                raise ParseError("word before the first family record")
        else:
            raise ParseError(f"unknown record {key!r}")
    if template is None:
        raise ParseError("missing template")
    inst = lambda w: InstantiationWord(w, template)  # noqa: E731
    if kind == "family-union":
        return FamilyUnionInstance(template, tuple(tuple(map(inst, fam)) for fam in families), base)
    if k is None:
        raise ParseError("missing k")
    if kind == "subset-union":
        return SubsetUnionInstance(template, tuple(map(inst, words)), k, base)
    return WeightedUnionInstance(template, k, base)


def parse(text: str, cap: int = UNARY_CAP):
    """Parse an instance file.  Raises ParseError or InvalidInstance."""
    rd = _Reader(text.splitlines())
    header = rd.next()
    if len(header) != 2:
        raise ParseError("header must be 'kind label'")
    kind = header[0]
    try:
        return _parse_body(kind, rd, cap)
    except (KeyError, IndexError) as exc:
        raise ParseError(f"malformed {kind} file: {exc}") from None


def _parse_body(kind: str, rd: _Reader, cap: int):
    graph_blocks = {"matrix": _read_graph_block}
    if kind == "graph":
        return _graph_from(_fields(rd, (), graph_blocks))
    if kind == "bf":
        f = _fields(rd, ())
        formula = BooleanFormula.from_tokens(tuple(_need(f, "vars")), tuple(_need(f, "formula")))
        return BfInstance(formula, tuple(int(_bit(b)) for b in _need(f, "assignment")))
    if kind in ("dtsc", "ntsc"):
        f = _fields(rd)
        return BoundedTMInstance(_tm_from(f, kind == "dtsc"), parse_unary(_need(f, "t"), cap), parse_unary(_need(f, "s"), cap))
    if kind == "tm2":
        f = _fields(rd)
        trans = []
        for vals in f["delta"]:
            if len(vals) != 7:
                raise ParseError("two-tape delta records take 7 fields")
            trans.append(tuple(vals))
        m = TwoTapeTM(
            tuple(_need(f, "states")),
            tuple(_need(f, "input")),
            tuple(_need(f, "alphabet")),
            tuple(trans),
            _one(f, "initial"),
            frozenset(_need(f, "accepting")),
            _bit(_one(f, "deterministic")),
        )
        return ParameterizedRun(
            m, tuple(_need(f, "x")), parse_unary(_need(f, "t"), cap), parse_unary(_need(f, "s"), cap), _int(_one(f, "b"))
        )
    if kind == "mfa":
        f = _fields(rd)
        h = _int(_one(f, "heads"))
        trans = []
        for vals in f["delta"]:
            if len(vals) != 2 + 2 * h:
                raise ParseError("mfa delta records take q, h symbols, q', h moves")
            trans.append((vals[0], tuple(vals[1 : 1 + h]), vals[1 + h], tuple(vals[2 + h :])))
        return MultiHeadAutomaton(
            tuple(_need(f, "states")),
            h,
            tuple(trans),
            _one(f, "initial"),
            frozenset(_need(f, "accepting")),
            tuple(_need(f, "word")),
            dag=_bit(_one(f, "dag")),
        )
    if kind in ("ca", "seqca"):
        f = _fields(rd)
        ca = _ca_from(f)
        if kind == "ca":
            return CellularInstance(ca, tuple(_need(f, "initial")))
        horizon = _int(_one(f, "horizon")) if "horizon" in f else None
        return SequentialCellularInstance(ca, tuple(_need(f, "initial")), horizon=horizon)
    if kind == "tpg":
        f = _fields(rd, (), graph_blocks)
        g = _graph_from(f)
        return ThresholdPebbleGame(
            g,
            tuple(_int(v) for v in _need(f, "threshold")),
            frozenset(_int(v) for v in _need(f, "S")),
            frozenset(_int(v) for v in _need(f, "T")),
            dag=_bit(_one(f, "dag")),
            cap=_int(_one(f, "cap")) if "cap" in f else None,
        )
    if kind == "lcs":
        f = _fields(rd, ("string",))
        return LcsInstance(tuple(_need(f, "alphabet")), tuple(tuple(s) for s in f["string"]), _int(_one(f, "l")))
    if kind == "agen":
        f = _fields(rd, ("row",))
        u = tuple(_need(f, "universe"))
        index = {name: i for i, name in enumerate(u)}
        table = tuple(tuple(index[v] for v in row) for row in f["row"])
        return GeneratorInstance(
            u,
            table,
            index[_one(f, "target")],
            tuple(index[c] for c in f.get("candidates", [])),
            _int(_one(f, "k")),
            associative=_bit(_one(f, "associative")),
        )
    if kind == "rs":
        f = _fields(rd, ("rule",))
        rules = []
        for vals in f["rule"]:
            if vals.count("->") != 1:
                raise ParseError("rules are written 'lhs -> rhs'")
            cut = vals.index("->")
            rules.append((tuple(vals[:cut]), tuple(vals[cut + 1 :])))
        return ReplacementSystem(tuple(_need(f, "alphabet")), tuple(rules))
    if kind == "projection":
        f = _fields(rd, ("pos",))
        positions = []
        for vals in f["pos"]:
            tag = vals[0]
            if tag == "c":
                positions.append(("c", vals[1]))
            elif tag in ("x", "a"):
                table = tuple(tuple(e.split(":", 1)) for e in vals[2:]) or None
                positions.append((tag, _int(vals[1]), table))
            elif tag == "b":
                positions.append(("b", _int(vals[1]), tuple(vals[2:4])))
            else:
                raise ParseError(f"unknown position tag {tag!r}")
        p = CompatibleProjection(
            _int(_one(f, "n")),
            _int(_one(f, "advice_length")),
            _int(_one(f, "f_x")),
            _int(_one(f, "width")),
            tuple(positions),
            kind=_one(f, "kind"),
        )
        return ProjectionInstance(p, tuple(_need(f, "x")), tuple(f.get("advice", ())))
    if kind in ("family-union", "subset-union", "weighted-union"):
        return _union_from(kind, rd)
    raise ParseError(f"unknown kind {kind!r}")


KINDS = (
    "graph",
    "bf",
    "dtsc",
    "ntsc",
    "tm2",
    "mfa",
    "ca",
    "seqca",
    "tpg",
    "lcs",
    "agen",
    "rs",
    "projection",
    "family-union",
    "subset-union",
    "weighted-union",
)


__all__ = ["KINDS", "ParseError", "InvalidInstance", "parse", "parse_unary", "serialize", "unary"]
