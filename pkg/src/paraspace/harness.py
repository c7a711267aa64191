"""Reduction registry and the verification driver.

A reduction is checked on an instance by deciding the instance with its
oracle, transforming it, deciding the image with the target oracle and
comparing the two answers, together with the parameter bound
κ₂(r(x)) ≤ g(κ₁(x)).  A case whose oracle runs out of budget is
reported as skipped.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .core import (
    BfInstance,
    BoundedTMInstance,
    CellularInstance,
    FamilyUnionInstance,
    GeneratorInstance,
    Graph,
    GraphPropertyKind,
    LcsInstance,
    MultiHeadAutomaton,
    ParameterizedRun,
    ProjectionInstance,
    ReplacementSystem,
    SequentialCellularInstance,
    SubsetUnionInstance,
    ThresholdPebbleGame,
    WeightedUnionInstance,
    union_instantiations,
)
from .generators import config_bound, gen_instance
from .machine_reductions import (
    ca_to_dag_ca,
    ca_to_tpg_cyclic,
    dagca_to_tpg,
    dtsc_from_parameterized_run,
    layeredreach_to_lcs_injective,
    mfa_to_dag,
    nca_to_sequential,
    normalize_for_lcs,
    normalize_unique_accepting,
    seqca_to_lcs,
    tm_to_ca,
    tm_to_nca,
)
from .oracles import (
    BudgetExceeded,
    agen_decide,
    eval_bf,
    graph_property,
    lcs_decide,
    lcs_injective_decide,
    run_ca,
    run_mfa,
    run_sequential,
    run_tm_bounded,
    run_tpg,
    run_two_tape,
    solve_union,
)
from .union_reductions import (
    family_to_subset_agen,
    family_to_subset_bf,
    family_to_subset_graph,
    projection_to_family_union,
    subset_to_weighted_agen,
    subset_to_weighted_bf,
    weighted_to_generator,
)


class UnknownReduction(KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


# ---------------------------------------------------------------------------
# kinds, parameters and oracles


def kind_of(obj) -> str:
    """The file kind of an instance object."""
    for cls, name in _KIND_OF:
        if isinstance(obj, cls):
            if name == "dtsc" and not obj.machine.deterministic:
                return "ntsc"
            return name
    raise TypeError(f"not an instance: {type(obj).__name__}")


_KIND_OF = (
    (Graph, "graph"),
    (BfInstance, "bf"),
    (BoundedTMInstance, "dtsc"),
    (ParameterizedRun, "tm2"),
    (MultiHeadAutomaton, "mfa"),
    (SequentialCellularInstance, "seqca"),
    (CellularInstance, "ca"),
    (ThresholdPebbleGame, "tpg"),
    (LcsInstance, "lcs"),
    (GeneratorInstance, "agen"),
    (ReplacementSystem, "rs"),
    (ProjectionInstance, "projection"),
    (FamilyUnionInstance, "family-union"),
    (SubsetUnionInstance, "subset-union"),
    (WeightedUnionInstance, "weighted-union"),
)


def kappa(obj) -> int:
    """The parameter of an instance; 0 for unparameterized kinds."""
    kind = kind_of(obj)
    if kind in ("dtsc", "ntsc"):
        return obj.s
    if kind == "tm2":
        # space counted in blocks of b cells
        return math.ceil(obj.s / obj.b)
    if kind == "mfa":
        return obj.heads
    if kind in ("ca", "seqca"):
        return obj.k
    if kind == "tpg":
        return obj.cap if obj.cap is not None else obj.graph.n
    if kind == "lcs":
        return len(obj.strings)
    if kind in ("agen", "family-union", "subset-union", "weighted-union"):
        return obj.k
    if kind == "projection":
        return obj.projection.f_x
    return 0


def graph_kind(g: Graph, prop: str | None = None) -> GraphPropertyKind:
    if prop is not None:
        return GraphPropertyKind(prop)
    if g.layers is not None:
        return GraphPropertyKind.LAYERED_REACH
    raise ValueError("graph instances need a property (reach, tree, ...)")


def projected_words(inst: ProjectionInstance) -> frozenset:
    """Every word the projection produces, over all choice bits."""
    p = inst.projection
    return frozenset(p.apply(inst.x, inst.advice, b) for b in itertools.product((0, 1), repeat=p.choice_bits))


def family_unions(inst: FamilyUnionInstance) -> frozenset:
    """Every union of one member per family."""
    if not inst.families:
        return frozenset({inst.template.fill([0] * len(inst.template.holes)).symbols})
    return frozenset(union_instantiations(c).symbols for c in itertools.product(*inst.families))


def solve(obj, mode: str | None = None, prop: str | None = None, steps: int | None = None, budget: int | None = None):
    """Decide an instance with its reference oracle.

    ``mode`` selects det/nondet cellular runs and max/nondet pebble games,
    ``prop`` the graph property, ``steps`` a step bound for automata.
    Projections have no language of their own; their answer is the set of
    words they produce.
    """
    kind = kind_of(obj)
    if kind == "graph":
        return graph_property(graph_kind(obj, prop), obj)
    if kind == "bf":
        return eval_bf(obj.formula, obj.assignment)
    if kind in ("dtsc", "ntsc"):
        return run_tm_bounded(obj, budget)
    if kind == "tm2":
        return run_two_tape(obj.machine, obj.x, obj.t, obj.s, budget)
    if kind == "mfa":
        return run_mfa(obj, budget, steps)
    if kind == "seqca":
        return run_sequential(obj, budget=budget)
    if kind == "ca":
        mode = mode or ("det" if obj.automaton.deterministic else "nondet")
        return run_ca(obj, mode, budget, steps)
    if kind == "tpg":
        return run_tpg(obj, mode or "max", budget)
    if kind == "lcs":
        return lcs_injective_decide(obj) if obj.injective else lcs_decide(obj, budget)
    if kind == "agen":
        return agen_decide(obj, budget)
    if kind in ("family-union", "subset-union", "weighted-union"):
        return solve_union(kind.split("-")[0], obj, budget=budget)
    if kind == "projection":
        return projected_words(obj)
    raise ValueError(f"no decision procedure for kind {kind!r}; use normalize for replacement systems")


# ---------------------------------------------------------------------------
# registry


Params = Mapping[str, Any]


@dataclass(frozen=True)
class Case:
    case_id: int
    seed: int | None
    instance: Any
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ReductionDescriptor:
    name: str
    source_kind: str
    target_kind: str
    transform: Callable[[Any, Params], Any]
    g: Callable[[int], int]
    g_text: str
    generate: Callable[[random.Random, int], tuple[Any, dict]] | None = None
    source_answer: Callable[[Any, Params, int | None], Any] | None = None
    target_answer: Callable[[Any, Params, int | None], Any] | None = None
    doc: str = ""

    def apply(self, instance, params: Params | None = None):
        return self.transform(instance, dict(params or {}))

    def decide_source(self, instance, params: Params, budget: int | None):
        if self.source_answer is not None:
            return self.source_answer(instance, params, budget)
        return solve(instance, params.get("mode"), params.get("property"), budget=budget)

    def decide_target(self, out, params: Params, budget: int | None):
        if self.target_answer is not None:
            return self.target_answer(out, params, budget)
        return solve(out, params.get("target_mode", params.get("mode")), params.get("property"), budget=budget)


REGISTRY: dict[str, ReductionDescriptor] = {}


def register(desc: ReductionDescriptor) -> ReductionDescriptor:
    REGISTRY[desc.name] = desc
    return desc


def _same(k: int) -> int:
    return k


def _profile_gen(kind: str, profile: Callable[[random.Random], dict], params: Callable[[random.Random, Any], dict] | None = None):
    def gen(rng: random.Random, seed: int):
        x = gen_instance(kind, profile(rng), seed)
        return x, params(rng, x) if params else {}

    return gen


def _union_gen(kind: str, base: str | Sequence[str], caps: dict, cycle: bool = False):
    """Random profiles within ``caps``; with ``cycle`` the base goes round-robin by seed."""
    bases = (base,) if isinstance(base, str) else tuple(base)

    def gen(rng: random.Random, seed: int):
        p = {"base": bases[seed % len(bases)] if cycle else rng.choice(bases), "k": rng.randint(1, caps["k"])}
        for key in ("size", "n", "vars", "u"):
            if key in caps:
                p[key] = rng.randint(1, caps[key])
        return gen_instance(kind, p, seed), {}

    return gen


GRAPH_UNION_BASES = ("reach", "dag-reach", "cycle", "undirected-reach", "tree", "forest", "undirected-cycle")

register(
    ReductionDescriptor(
        "identity",
        "any",
        "any",
        lambda x, p: x,
        _same,
        "κ",
        lambda rng, seed: (gen_instance(rng.choice(("bf", "lcs", "agen", "dtsc")), {}, seed), {}),
        doc="debugging aid: the output is the input",
    )
)

register(
    ReductionDescriptor(
        "projection_to_family_union",
        "projection",
        "family-union",
        lambda x, p: projection_to_family_union(x.projection, x.x, x.advice),
        _same,
        "κ",
        _profile_gen("projection", lambda rng: {"n": rng.randint(1, 4), "f_x": rng.randint(1, 2)}),
        target_answer=lambda out, p, b: family_unions(out),
        doc="compares the set of projected words with the set of family unions",
    )
)

register(
    ReductionDescriptor(
        "family_to_subset_bf",
        "family-union",
        "subset-union",
        lambda x, p: family_to_subset_bf(x),
        _same,
        "κ",
        _union_gen("family-union", "bf", {"k": 3, "size": 3, "vars": 4}),
    )
)

register(
    ReductionDescriptor(
        "subset_to_weighted_bf",
        "subset-union",
        "weighted-union",
        lambda x, p: subset_to_weighted_bf(x),
        _same,
        "κ",
        _union_gen("subset-union", "bf", {"k": 3, "size": 6, "vars": 4}),
    )
)

register(
    ReductionDescriptor(
        "family_to_subset_graph",
        "family-union",
        "subset-union",
        lambda x, p: family_to_subset_graph(x),
        _same,
        "κ",
        _union_gen("family-union", GRAPH_UNION_BASES, {"k": 3, "size": 3, "n": 4}, cycle=True),
    )
)

register(
    ReductionDescriptor(
        "family_to_subset_agen",
        "family-union",
        "subset-union",
        lambda x, p: family_to_subset_agen(x),
        _same,
        "κ",
        _union_gen("family-union", "agen", {"k": 2, "size": 3, "u": 4}),
    )
)

register(
    ReductionDescriptor(
        "subset_to_weighted_agen",
        "subset-union",
        "weighted-union",
        lambda x, p: subset_to_weighted_agen(x),
        lambda k: k + 3,
        "κ+3",
        _union_gen("subset-union", "agen", {"k": 2, "size": 4, "u": 4}),
    )
)

register(
    ReductionDescriptor(
        "weighted_to_generator",
        "weighted-union",
        "agen",
        lambda x, p: weighted_to_generator(x),
        _same,
        "κ",
        _union_gen("weighted-union", "agen", {"k": 3, "u": 4}),
    )
)


# machine models


def _dtsc_gen(rng: random.Random, seed: int):
    # even seeds give deterministic machines
    prof = {
        "states": rng.randint(1, 4),
        "x": rng.randint(0, 3),
        "s": rng.randint(1, 6),
        "t": rng.randint(0, 30),
        "b": rng.randint(1, 3),
        "deterministic": seed % 2 == 0,
    }
    return gen_instance("tm2", prof, seed), {}


register(
    ReductionDescriptor(
        "dtsc_from_parameterized_run",
        "tm2",
        "dtsc",
        lambda x, p: dtsc_from_parameterized_run(x.machine, x.x, x.t, x.s, x.b),
        _same,
        "κ",
        _dtsc_gen,
        doc="κ of a two-tape run is ceil(s/b), its space in blocks",
    )
)


def _unbounded_tm(deterministic: bool):
    kind = "dtsc" if deterministic else "ntsc"

    def gen(rng: random.Random, seed: int):
        prof = {"states": rng.randint(1, 3), "symbols": rng.randint(1, 2), "s": rng.randint(1, 4), "density": rng.choice((0.5, 0.8))}
        x = gen_instance(kind, prof, seed)
        # a time bound no run needs to exceed, so both sides decide plain acceptance
        return BoundedTMInstance(x.machine, config_bound(x.machine, x.s), x.s), {}

    return gen


register(
    ReductionDescriptor(
        "tm_to_ca",
        "dtsc",
        "ca",
        lambda x, p: tm_to_ca(x.machine, x.s),
        _same,
        "κ",
        _unbounded_tm(True),
        target_answer=lambda out, p, b: run_ca(out, "det", b),
    )
)

register(
    ReductionDescriptor(
        "tm_to_nca",
        "ntsc",
        "ca",
        lambda x, p: tm_to_nca(x.machine, x.s),
        _same,
        "κ",
        _unbounded_tm(False),
        target_answer=lambda out, p, b: run_ca(out, "nondet", b),
    )
)


def _ca_profile(dag: bool | None = None, det: bool | None = None, states: int = 3, cells: int = 3):
    def profile(rng: random.Random) -> dict:
        return {
            "states": rng.randint(1, states),
            "cells": rng.randint(1, cells),
            "deterministic": rng.random() < 0.5 if det is None else det,
            "dag": dag if dag is not None else False,
            "density": rng.choice((0.5, 0.8, 1.0)),
        }

    return profile


def _mode_of(x: CellularInstance) -> str:
    return "det" if x.automaton.deterministic else "nondet"


def _tpg_params(rng: random.Random, x: CellularInstance) -> dict:
    mode = "max" if x.automaton.deterministic else "nondet"
    return {"mode": _mode_of(x), "target_mode": mode}


def _alternating_ca(dag: bool, params: Callable[[random.Random, Any], dict] = _tpg_params):
    def gen(rng: random.Random, seed: int):
        # even seeds give deterministic automata
        det = seed % 2 == 0
        x = gen_instance("ca", _ca_profile(dag, det, states=3, cells=3)(rng), seed)
        return x, params(rng, x)

    return gen


register(
    ReductionDescriptor(
        "ca_to_dag_ca",
        "ca",
        "ca",
        lambda x, p: ca_to_dag_ca(x, p["t"]),
        _same,
        "κ",
        _alternating_ca(False, lambda rng, x: {"t": rng.randint(1, 3)}),
        source_answer=lambda x, p, b: run_ca(x, _mode_of(x), b, steps=p["t"]),
        target_answer=lambda out, p, b: run_ca(out, _mode_of(out), b),
        doc="acceptance within t global steps against plain acceptance of the layered automaton",
    )
)

register(
    ReductionDescriptor(
        "mfa_to_dag",
        "mfa",
        "mfa",
        lambda x, p: mfa_to_dag(x, p["t"]),
        _same,
        "κ",
        _profile_gen(
            "mfa",
            lambda rng: {"states": rng.randint(1, 3), "heads": rng.randint(1, 2), "word": rng.randint(0, 3)},
            lambda rng, x: {"t": rng.randint(1, 4)},
        ),
        source_answer=lambda x, p, b: run_mfa(x, b, steps=p["t"]),
        target_answer=lambda out, p, b: run_mfa(out, b),
    )
)


register(
    ReductionDescriptor(
        "dagca_to_tpg",
        "ca",
        "tpg",
        lambda x, p: dagca_to_tpg(normalize_unique_accepting(x), p.get("t"), p.get("target")),
        _same,
        "κ",
        _alternating_ca(True),
        doc="normalizes to a unique accepting configuration first; max game for deterministic automata",
    )
)

register(
    ReductionDescriptor(
        "ca_to_tpg_cyclic",
        "ca",
        "tpg",
        lambda x, p: ca_to_tpg_cyclic(normalize_unique_accepting(x), p.get("target")),
        _same,
        "κ",
        _alternating_ca(False),
        doc="normalizes to a unique accepting configuration first; max game for deterministic automata",
    )
)

register(
    ReductionDescriptor(
        "layeredreach_to_lcs_injective",
        "graph",
        "lcs",
        lambda x, p: layeredreach_to_lcs_injective(x),
        lambda k: 4,
        "4",
        _profile_gen(
            "graph",
            lambda rng: {"property": "layered-reach", "layers": rng.randint(2, 5), "width": rng.randint(1, 4), "density": rng.choice((0.4, 0.6))},
        ),
        source_answer=lambda x, p, b: graph_property("layered-reach", x),
        target_answer=lambda out, p, b: lcs_injective_decide(out),
    )
)

register(
    ReductionDescriptor(
        "nca_to_sequential",
        "ca",
        "seqca",
        lambda x, p: nca_to_sequential(x),
        _same,
        "κ",
        _alternating_ca(False, lambda rng, x: {}),
    )
)

register(
    ReductionDescriptor(
        "normalize_for_lcs",
        "seqca",
        "seqca",
        lambda x, p: normalize_for_lcs(x, p.get("bound")),
        _same,
        "κ",
        _profile_gen(
            "seqca",
            lambda rng: {"states": rng.randint(1, 3), "cells": rng.randint(1, 3), "dag": True, "density": rng.choice((0.5, 0.8))},
        ),
    )
)

register(
    ReductionDescriptor(
        "seqca_to_lcs",
        "seqca",
        "lcs",
        lambda x, p: seqca_to_lcs(x),
        lambda k: 4 * k,
        "4κ",
        _profile_gen(
            "seqca",
            lambda rng: {
                "states": rng.randint(1, 3),
                "cells": rng.randint(1, 3),
                "density": rng.choice((0.3, 0.5, 0.8)),
                "horizon": rng.randint(0, 3),
            },
        ),
        target_answer=lambda out, p, b: lcs_decide(out, b),
    )
)


def compose(names: Sequence[str]) -> ReductionDescriptor:
    """The pipeline ``a+b+c``: apply a, then b, then c."""
    parts = [get_reduction(n) for n in names]
    for a, b in zip(parts, parts[1:]):
        if "any" not in (a.target_kind, b.source_kind) and a.target_kind != b.source_kind:
            raise UnknownReduction(f"cannot chain {a.name} ({a.target_kind}) into {b.name} ({b.source_kind})")

    def transform(x, p):
        for d in parts:
            x = d.transform(x, p)
        return x

    def g(k: int) -> int:
        for d in parts:
            k = d.g(k)
        return k

    g_text = "κ"
    for d in parts:
        inner = g_text if g_text == "κ" else f"({g_text})"
        g_text = d.g_text.replace("κ", inner)
    first, last = parts[0], parts[-1]
    return ReductionDescriptor(
        "+".join(names),
        first.source_kind,
        last.target_kind,
        transform,
        g,
        g_text,
        first.generate,
        first.source_answer,
        last.target_answer,
        "pipeline",
    )


def get_reduction(name: str) -> ReductionDescriptor:
    if "+" in name:
        return compose(name.split("+"))
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownReduction(f"unknown reduction {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationReport:
    case_id: int
    seed: int | None
    source_answer: Any
    target_answer: Any
    kappa1: int | None
    kappa2: int | None
    g_kappa1: int | None
    agreement: bool | None
    wall_time: float
    status: str
    note: str = ""

    def record(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("source_answer", "target_answer"):
            if isinstance(out[key], frozenset):
                out[key] = f"<{len(out[key])} words>"
        out["wall_time"] = round(self.wall_time, 6)
        return out


def make_cases(desc: ReductionDescriptor, count: int, seed: int = 0) -> list[Case]:
    """``count`` generated cases; case i is derived from (reduction, seed, i) alone."""
    if desc.generate is None:
        raise ValueError(f"{desc.name} has no case generator")
    cases = []
    for i in range(count):
        case_seed = seed * 1_000_003 + i
        rng = random.Random(f"{desc.name}|{case_seed}")
        x, params = desc.generate(rng, case_seed)
        cases.append(Case(i, case_seed, x, params))
    return cases


def _verify_one(desc: ReductionDescriptor, case: Case, budget: int | None) -> VerificationReport:
    t0 = time.perf_counter()
    params = dict(case.params)
    src = tgt = k1 = k2 = gk = None
    try:
        src = desc.decide_source(case.instance, params, budget)
        out = desc.apply(case.instance, params)
        k1, k2 = kappa(case.instance), kappa(out)
        gk = desc.g(k1)
        tgt = desc.decide_target(out, params, budget)
    except BudgetExceeded as exc:
        return VerificationReport(case.case_id, case.seed, src, tgt, k1, k2, gk, None, time.perf_counter() - t0, "skipped", str(exc))
    agree = src == tgt and k2 <= gk
    note = "" if agree else ("answers differ" if src != tgt else "parameter bound violated")
    return VerificationReport(case.case_id, case.seed, src, tgt, k1, k2, gk, agree, time.perf_counter() - t0, "agree" if agree else "disagree", note)


def verify_reduction(desc: ReductionDescriptor | str, instances: Iterable, budget: int | None = None) -> list[VerificationReport]:
    """One report per instance, sorted by case id.

    ``instances`` holds :class:`Case` objects or bare instances (numbered in
    order, no parameters).
    """
    if isinstance(desc, str):
        desc = get_reduction(desc)
    cases = [c if isinstance(c, Case) else Case(i, None, c) for i, c in enumerate(instances)]
    reports = [_verify_one(desc, c, budget) for c in cases]
    return sorted(reports, key=lambda r: r.case_id)


def summarize(name: str, reports: Sequence[VerificationReport]) -> dict:
    return {
        "reduction": name,
        "cases": len(reports),
        "agree": sum(r.status == "agree" for r in reports),
        "disagree": sum(r.status == "disagree" for r in reports),
        "skipped": sum(r.status == "skipped" for r in reports),
        "seconds": round(sum(r.wall_time for r in reports), 3),
    }


def summary_table(rows: Sequence[dict]) -> str:
    cols = ("reduction", "cases", "agree", "disagree", "skipped", "seconds")
    cells = [[str(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def report_text(name: str, reports: Sequence[VerificationReport]) -> str:
    """JSON lines, one per case, then the summary table as ``#`` comment lines."""
    lines = [json.dumps(r.record(), sort_keys=True, ensure_ascii=False) for r in reports]
    lines += ["# " + line for line in summary_table([summarize(name, reports)]).splitlines()]
    return "\n".join(lines) + "\n"


__all__ = [
    "Case",
    "REGISTRY",
    "ReductionDescriptor",
    "UnknownReduction",
    "VerificationReport",
    "compose",
    "family_unions",
    "get_reduction",
    "kappa",
    "kind_of",
    "make_cases",
    "projected_words",
    "report_text",
    "solve",
    "summarize",
    "summary_table",
    "verify_reduction",
]
