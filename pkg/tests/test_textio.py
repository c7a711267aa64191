import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraspace.generators import BASES, GEN_KINDS, gen_instance
from paraspace.machine_reductions import layeredreach_to_lcs_injective
from paraspace.textio import KINDS, InvalidInstance, ParseError, parse, parse_unary, serialize, unary

from worked import pebble_example, example_family, example_subset, layered_example


def test_every_kind_has_a_generator():
    assert set(GEN_KINDS) >= set(KINDS) - {"ntsc"}


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(GEN_KINDS), seed=st.integers(0, 10**6))
def test_roundtrip_generated(kind, seed):
    x = gen_instance(kind, None, seed)
    text = serialize(x)
    assert parse(text) == x
    assert serialize(parse(text)) == text


@pytest.mark.parametrize("base", BASES)
@pytest.mark.parametrize("kind", ["family-union", "subset-union", "weighted-union"])
def test_roundtrip_union_bases(kind, base):
    x = gen_instance(kind, {"base": base}, 3)
    assert parse(serialize(x)) == x


@pytest.mark.parametrize(
    "make", [example_family, example_subset, pebble_example, layered_example, lambda: layeredreach_to_lcs_injective(layered_example())]
)
def test_roundtrip_worked_examples(make):
    x = make()
    assert parse(serialize(x)) == x


def test_header_names_the_kind():
    assert serialize(gen_instance("lcs", None, 0)).startswith("lcs strings\n")


@pytest.mark.parametrize("n", [0, 1, 7])
def test_unary(n):
    assert parse_unary(unary(n).split()) == n


def test_unary_cap():
    with pytest.raises(ParseError):
        parse_unary(["1" * 11], cap=10)
    text = serialize(gen_instance("dtsc", None, 0))
    with pytest.raises(ParseError):
        parse(text, cap=2)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "garbage\n",
        "graph -\nn 2\ndirected 1\nmatrix\n01\n",
        "graph -\nn 2\ndirected 1\nmatrix\n0?\n00\n",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse(text)


@pytest.mark.parametrize(
    "text",
    [
        "lcs strings\nalphabet a ?\nl 1\nstring a\n",
        "lcs strings\nalphabet a 0\nl 1\n",
        "graph -\nn 2\ndirected 0\nmatrix\n01\n00\n",
    ],
)
def test_invalid_values(text):
    with pytest.raises(InvalidInstance):
        parse(text)
