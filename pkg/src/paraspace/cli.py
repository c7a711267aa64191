"""Command-line front end.

Exit codes: 0 yes/success, 1 no (or a disagreement in ``verify``),
2 budget exceeded, 3 usage or parse error.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from .core import GraphPropertyKind, InvalidInstance, ReplacementSystem
from .generators import GEN_KINDS, ProfileError, gen_instance
from .harness import (
    REGISTRY,
    Case,
    UnknownReduction,
    get_reduction,
    kappa,
    kind_of,
    make_cases,
    report_text,
    solve,
    summarize,
    summary_table,
    verify_reduction,
)
from .oracles import BUDGET_ENV, BudgetExceeded, NonTermination, rs_normalize
from .textio import ParseError, parse, serialize
from .union_reductions import ReductionError

EXIT_YES, EXIT_NO, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3
GRAPH_PROPERTIES = tuple(k.value for k in GraphPropertyKind)


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _pairs(items: tuple[str, ...]) -> dict:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected key=value, got {item!r}")
        out[key] = _value(val)
    return out


def _read(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse(text)


def _write(path: str, text: str) -> None:
    if path == "-":
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text, encoding="utf-8")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--budget", type=int, default=None, help=f"explored-configuration budget per case (default ${BUDGET_ENV} or 10^6)")
@click.pass_context
def cli(ctx: click.Context, budget: int | None) -> None:
    """Instances, oracles and reductions for parameterized space classes."""
    ctx.obj = {"budget": budget}


@cli.command()
@click.argument("kind", type=click.Choice(GEN_KINDS))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--set", "settings", multiple=True, metavar="KEY=VALUE", help="profile entry, e.g. n=4 or base=agen")
@click.option("-o", "--output", default="-", help="output file (default stdout)")
def gen(kind: str, seed: int, settings: tuple[str, ...], output: str) -> int:
    """Write a seeded random instance of KIND."""
    _write(output, serialize(gen_instance(kind, _pairs(settings), seed)))
    return EXIT_YES


@cli.command("solve")
@click.argument("kind")
@click.argument("file")
@click.option("--mode", type=click.Choice(["det", "nondet", "max"]), default=None, help="cellular run or pebble game mode")
@click.option("--property", "prop", type=click.Choice(GRAPH_PROPERTIES), default=None, help="graph property")
@click.option("--steps", type=int, default=None, help="step bound for automata")
@click.pass_obj
def solve_cmd(obj: dict, kind: str, file: str, mode: str | None, prop: str | None, steps: int | None) -> int:
    """Decide FILE, an instance of KIND (a graph property may stand for KIND)."""
    x = _read(file)
    actual = kind_of(x)
    if kind in GRAPH_PROPERTIES and actual == "graph":
        prop = prop or kind
    elif kind != actual and {kind, actual} != {"dtsc", "ntsc"}:
        raise click.UsageError(f"{file} holds a {actual} instance, not {kind}")
    answer = solve(x, mode, prop, steps, obj["budget"])
    if isinstance(answer, frozenset):
        for word in sorted(answer):
            click.echo(" ".join(word))
        return EXIT_YES
    click.echo("yes" if answer else "no")
    return EXIT_YES if answer else EXIT_NO


@cli.command()
@click.argument("name")
@click.argument("source")
@click.argument("target")
@click.option("--param", "params", multiple=True, metavar="KEY=VALUE", help="reduction parameter, e.g. t=3")
def reduce(name: str, source: str, target: str, params: tuple[str, ...]) -> int:
    """Apply reduction NAME (or a pipeline a+b+c) to SOURCE and write TARGET."""
    desc = get_reduction(name)
    x = _read(source)
    actual = kind_of(x)
    if desc.source_kind not in ("any", actual) and {desc.source_kind, actual} != {"dtsc", "ntsc"}:
        raise click.UsageError(f"{name} reads {desc.source_kind} instances, {source} holds {actual}")
    out = desc.apply(x, _pairs(params))
    _write(target, serialize(out))
    k1, k2 = kappa(x), kappa(out)
    click.echo(f"{desc.name}: κ {k1} -> {k2} (g = {desc.g_text})", err=True)
    return EXIT_YES


@cli.command()
@click.option("--reduction", "name", required=True, help="registered name or pipeline a+b+c")
@click.option("--cases", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="report path")
@click.option("--param", "params", multiple=True, metavar="KEY=VALUE", help="parameters for file inputs")
@click.argument("files", nargs=-1)
@click.pass_obj
def verify(obj: dict, name: str, cases: int, seed: int, out: str | None, params: tuple[str, ...], files: tuple[str, ...]) -> int:
    """Round-trip generated cases (or FILES) through a reduction and write a report.

    The report goes next to the first input file, or into the working
    directory for generated cases, unless --out is given.
    """
    desc = get_reduction(name)
    if files:
        extra = _pairs(params)
        batch = [Case(i, None, _read(f), extra) for i, f in enumerate(files)]
        default = Path(files[0]).with_name(Path(files[0]).name + f".{desc.name}.report.jsonl")
    else:
        batch = make_cases(desc, cases, seed)
        default = Path(f"{desc.name}-seed{seed}.report.jsonl")
    reports = verify_reduction(desc, batch, obj["budget"])
    path = Path(out) if out else default
    path.write_text(report_text(desc.name, reports), encoding="utf-8")
    row = summarize(desc.name, reports)
    click.echo(summary_table([row]))
    click.echo(f"report: {path}")
    return EXIT_YES if row["disagree"] == 0 else EXIT_NO


@cli.command()
@click.argument("file")
@click.argument("word", nargs=-1)
@click.option("--random-order", "order_seed", type=int, default=None, help="rewrite random redexes with this seed")
@click.pass_obj
def normalize(obj: dict, file: str, word: tuple[str, ...], order_seed: int | None) -> int:
    """Rewrite WORD (tokens) to its irreducible form under the replacement system in FILE."""
    rules = _read(file)
    if not isinstance(rules, ReplacementSystem):
        raise click.UsageError(f"{file} is not a replacement system")
    rng = None if order_seed is None else random.Random(order_seed)
    click.echo(" ".join(rs_normalize(rules, word, obj["budget"], rng)))
    return EXIT_YES


@cli.command("list")
def list_cmd() -> int:
    """List the registered reductions with their parameter bounds."""
    for name in sorted(REGISTRY):
        d = REGISTRY[name]
        click.echo(f"{name:32} {d.source_kind:>14} -> {d.target_kind:<14} g = {d.g_text}")
    return EXIT_YES


def main(argv: list[str] | None = None) -> int:
    try:
        code = cli.main(args=argv, prog_name="paraspace", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except (BudgetExceeded, NonTermination) as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        return EXIT_BUDGET
    except (ParseError, InvalidInstance, UnknownReduction, ReductionError, ProfileError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    return EXIT_YES if code is None else code


if __name__ == "__main__":
    sys.exit(main())
