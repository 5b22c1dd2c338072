import pytest
from hypothesis import given
from hypothesis import strategies as st

from trustproc.terms import BlankNode, InvalidIri, Iri, Literal, Quad, canonicalize_iri


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("HTTP://Ex.org/A", "http://ex.org/A"),
        ("http://ex.org/a", "http://ex.org/a"),
        ("  https://EX.ORG:8080/Path?Q=1#Frag ", "https://ex.org:8080/Path?Q=1#Frag"),
        ("http://User@Ex.Org/x", "http://User@ex.org/x"),
        ("URN:ISBN:0451450523", "urn:ISBN:0451450523"),
    ],
)
def test_canonicalize(raw, expected):
    assert canonicalize_iri(raw).value == expected


@pytest.mark.parametrize(
    "raw, position",
    [
        ("not an iri", 3),
        ("", 0),
        ("   ", 0),
        ("http://ex.org/<a>", 14),
        ("noscheme", 0),
        ("1http://x", 5),
    ],
)
def test_invalid_iri_reports_position(raw, position):
    with pytest.raises(InvalidIri) as info:
        canonicalize_iri(raw)
    assert info.value.position == position


def test_equality_is_after_canonicalization():
    assert Iri("HTTP://EX.org/a") == Iri("http://ex.org/a")
    assert Iri("http://ex.org/a") != Iri("http://ex.org/A")


_iri_text = st.from_regex(r"[A-Za-z][A-Za-z0-9+.-]{0,5}:(//[A-Za-z0-9.@:-]{0,10})?[A-Za-z0-9/?#=&._~-]{0,15}", fullmatch=True)


@given(_iri_text)
def test_canonicalize_is_idempotent(raw):
    once = canonicalize_iri(raw)
    assert canonicalize_iri(once.value) == once


def test_literal_datatype_and_language_are_exclusive():
    with pytest.raises(ValueError):
        Literal("x", datatype=Iri("http://ex.org/dt"), language="en")


def test_quad_rejects_literal_subject():
    with pytest.raises(TypeError):
        Quad(Literal("x"), Iri("http://ex.org/p"), Literal("y"), Iri("http://ex.org/g"))  # type: ignore[arg-type]


def test_blank_label_validation():
    assert str(BlankNode("b0")) == "_:b0"
    with pytest.raises(ValueError):
        BlankNode("has space")
