"""Hand-written recursive descent parser for ``.tpol`` policy documents.

Grammar (keywords are case-insensitive)::

    policy  := "policy" NAME "for" IRI ["default" EFFECT] set* rule* EOF
    set     := "set" NAME "{" [IRI ("," IRI)*] "}"
    rule    := "rule" NAME EFFECT "when" cond
    cond    := conj ("or" conj)*
    conj    := unary ("and" unary)*
    unary   := "not" unary | "(" cond ")" | atom
    atom    := "source" "is" IRI
             | "source" "in" NAME
             | "has" ("source" | "evidence")
             | "published" ("after" | "before") TIMESTAMP
             | "chain" "anchored" "in" NAME "depth" INT ["any" | "all"]
             | "context" NAME ("=" (STRING | IRI) | "defined")
             | "assertion" "matches" ["pred" "=" IRI] ["obj" "=" TERM]
    TERM    := IRI | STRING ["^^" IRI | "@" LANGTAG]

Names occupy fixed positions, so a keyword may also be used as a name.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..terms import InvalidIri, Iri, Literal, Term
from .ast import (
    NAME_RE,
    AgentSet,
    And,
    AssertionMatches,
    ChainAnchored,
    Condition,
    ContextDefined,
    ContextEquals,
    HasEvidence,
    HasSource,
    Not,
    Or,
    Policy,
    PublishedAfter,
    PublishedBefore,
    Rule,
    SourceIn,
    SourceIs,
)

__all__ = ["ParseError", "parse_policy", "parse_sets"]

_WORD_CHARS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.:+-")
_SYMBOLS = ("^^", "{", "}", ",", "(", ")", "=", "@")
_SIMPLE_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class ParseError(ValueError):
    def __init__(self, line: int, column: int, expected: frozenset[str], found: str, message: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        detail = message or f"expected {' or '.join(sorted(expected))}"
        super().__init__(f"line {line}, column {column}: {detail}, found {found}")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # WORD, IRI, STRING, SYM, EOF
    text: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "IRI":
            return f"<{self.text}>"
        if self.kind == "STRING":
            return "string literal"
        return repr(self.text)


def _tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def fail(msg: str, l: int = 0, c: int = 0, found: str = "") -> ParseError:
        return ParseError(l or line, c or col, frozenset(), found or repr(src[i : i + 1]), msg)

    while i < n:
        ch = src[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r\f\v":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "<":
            j = i + 1
            while j < n and src[j] not in ">\n":
                j += 1
            if j >= n or src[j] != ">":
                raise fail("unterminated IRI", start_line, start_col, "'<'")
            tokens.append(Token("IRI", src[i + 1 : j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == '"':
            j = i + 1
            chars: list[str] = []
            while True:
                if j >= n or src[j] == "\n":
                    raise fail("unterminated string", start_line, start_col, "'\"'")
                c = src[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    esc = src[j + 1 : j + 2]
                    if esc in _SIMPLE_ESCAPES and esc:
                        chars.append(_SIMPLE_ESCAPES[esc])
                        j += 2
                        continue
                    width = {"u": 4, "U": 8}.get(esc)
                    digits = src[j + 2 : j + 2 + width] if width else ""
                    if not width or len(digits) != width or any(d not in "0123456789abcdefABCDEF" for d in digits):
                        raise fail("invalid escape in string", start_line, col + (j - i), repr(src[j : j + 2]))
                    code = int(digits, 16)
                    if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
                        raise fail("escape is not a unicode scalar value", start_line, col + (j - i), repr(digits))
                    chars.append(chr(code))
                    j += 2 + width
                    continue
                chars.append(c)
                j += 1
            tokens.append(Token("STRING", "".join(chars), start_line, start_col))
            col += j - i
            i = j
            continue
        sym = next((s for s in _SYMBOLS if src.startswith(s, i)), None)
        if sym is not None:
            tokens.append(Token("SYM", sym, start_line, start_col))
            i += len(sym)
            col += len(sym)
            continue
        if ch in _WORD_CHARS:
            j = i
            while j < n and src[j] in _WORD_CHARS:
                j += 1
            tokens.append(Token("WORD", src[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        raise fail(f"unexpected character {ch!r}")
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, expected: set[str] | frozenset[str], message: str = "", tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(tok.line, tok.column, frozenset(expected), tok.describe(), message)

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "WORD" and self.tok.text.lower() in words

    def kw(self, *words: str) -> str:
        if not self.at_kw(*words):
            raise self.error({f"'{w}'" for w in words})
        word = self.tok.text.lower()
        self.pos += 1
        return word

    def sym(self, s: str) -> None:
        if not (self.tok.kind == "SYM" and self.tok.text == s):
            raise self.error({f"'{s}'"})
        self.pos += 1

    def at_sym(self, s: str) -> bool:
        return self.tok.kind == "SYM" and self.tok.text == s

    def name(self, what: str) -> str:
        tok = self.tok
        if tok.kind != "WORD" or not NAME_RE.fullmatch(tok.text):
            raise self.error({what})
        self.pos += 1
        return tok.text

    def iri(self) -> Iri:
        tok = self.tok
        if tok.kind != "IRI":
            raise self.error({"IRI"})
        try:
            value = Iri(tok.text)
        except InvalidIri as exc:
            raise ParseError(
                tok.line, tok.column + 1 + exc.position, frozenset({"IRI"}), tok.describe(), f"invalid IRI ({exc.reason})"
            ) from None
        self.pos += 1
        return value

    def word(self, what: str) -> str:
        tok = self.tok
        if tok.kind != "WORD":
            raise self.error({what})
        self.pos += 1
        return tok.text

    def policy(self) -> Policy:
        self.kw("policy")
        name = self.name("policy name")
        self.kw("for")
        owner = self.iri()
        default = "reject"
        if self.at_kw("default"):
            self.pos += 1
            default = self.kw("accept", "reject")
        sets = []
        while self.at_kw("set"):
            sets.append(self.agent_set())
        rules = []
        while self.at_kw("rule"):
            rules.append(self.rule())
        if self.tok.kind != "EOF":
            expected = {"'rule'", "end of input"} | ({"'set'"} if not rules else set())
            raise self.error(expected)
        return Policy(name, owner, default, tuple(rules), tuple(sets))  # type: ignore[arg-type]

    def agent_set(self) -> AgentSet:
        self.kw("set")
        name = self.name("set name")
        self.sym("{")
        members = []
        if not self.at_sym("}"):
            members.append(self.iri())
            while self.at_sym(","):
                self.pos += 1
                members.append(self.iri())
        if not self.at_sym("}"):
            raise self.error({"','", "'}'"})
        self.pos += 1
        return AgentSet(name, frozenset(members))

    def rule(self) -> Rule:
        self.kw("rule")
        name = self.name("rule name")
        effect = self.kw("accept", "reject")
        self.kw("when")
        return Rule(name, effect, self.cond())  # type: ignore[arg-type]

    def cond(self) -> Condition:
        parts = [self.conj()]
        while self.at_kw("or"):
            self.pos += 1
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Condition:
        parts = [self.unary()]
        while self.at_kw("and"):
            self.pos += 1
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Condition:
        if self.at_kw("not"):
            self.pos += 1
            return Not(self.unary())
        if self.at_sym("("):
            self.pos += 1
            inner = self.cond()
            if not self.at_sym(")"):
                raise self.error({"')'", "'and'", "'or'"})
            self.pos += 1
            return inner
        return self.atom()

    _ATOM_STARTS = frozenset(
        {"'not'", "'('", "'source'", "'has'", "'published'", "'chain'", "'context'", "'assertion'"}
    )

    def atom(self) -> Condition:
        if not self.at_kw("source", "has", "published", "chain", "context", "assertion"):
            raise self.error(self._ATOM_STARTS)
        head = self.kw("source", "has", "published", "chain", "context", "assertion")
        if head == "source":
            if self.kw("is", "in") == "is":
                return SourceIs(self.iri())
            return SourceIn(self.name("set name"))
        if head == "has":
            return HasSource() if self.kw("source", "evidence") == "source" else HasEvidence()
        if head == "published":
            when = self.kw("after", "before")
            ts = self.word("timestamp")
            return PublishedAfter(ts) if when == "after" else PublishedBefore(ts)
        if head == "chain":
            self.kw("anchored")
            self.kw("in")
            roots = self.name("set name")
            self.kw("depth")
            tok = self.tok
            if tok.kind != "WORD" or not tok.text.isascii() or not tok.text.isdigit() or len(tok.text) > 9:
                raise self.error({"positive integer"})
            depth = int(tok.text)
            if depth < 1:
                raise self.error({"positive integer"}, "chain depth must be at least 1")
            self.pos += 1
            mode = "any"
            if self.at_kw("any", "all"):
                mode = self.kw("any", "all")
            return ChainAnchored(roots, depth, mode)  # type: ignore[arg-type]
        if head == "context":
            key = self.name("context key")
            if self.at_kw("defined"):
                self.pos += 1
                return ContextDefined(key)
            if not self.at_sym("="):
                raise self.error({"'='", "'defined'"})
            self.pos += 1
            if self.tok.kind == "STRING":
                value = self.tok.text
                self.pos += 1
                return ContextEquals(key, value)
            if self.tok.kind == "IRI":
                return ContextEquals(key, self.iri().value)
            raise self.error({"string literal", "IRI"})
        # assertion matches
        self.kw("matches")
        pred = obj = None
        if self.at_kw("pred"):
            self.pos += 1
            self.sym("=")
            pred = self.iri()
        if self.at_kw("obj"):
            self.pos += 1
            self.sym("=")
            obj = self.term()
        return AssertionMatches(pred, obj)

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "IRI":
            return self.iri()
        if tok.kind != "STRING":
            raise self.error({"IRI", "string literal"})
        self.pos += 1
        if self.at_sym("^^"):
            self.pos += 1
            return Literal(tok.text, datatype=self.iri())
        if self.at_sym("@"):
            self.pos += 1
            lang_tok = self.tok
            lang = self.word("language tag")
            try:
                return Literal(tok.text, language=lang)
            except ValueError:
                raise self.error({"language tag"}, tok=lang_tok) from None
        return Literal(tok.text)


def _decode(text: str | bytes) -> str:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = text[: exc.start]
            line = prefix.count(b"\n") + 1
            column = exc.start - (prefix.rfind(b"\n") + 1) + 1
            raise ParseError(line, column, frozenset({"UTF-8 text"}), repr(text[exc.start : exc.start + 1]), "invalid UTF-8") from None
    return text


def parse_policy(text: str | bytes) -> Policy:
    """Parse a policy document; raises :class:`ParseError` on any defect."""
    return _Parser(_tokenize(_decode(text))).policy()


def parse_sets(text: str | bytes) -> list[AgentSet]:
    """Parse a document holding only ``set`` declarations."""
    parser = _Parser(_tokenize(_decode(text)))
    sets = []
    while parser.at_kw("set"):
        sets.append(parser.agent_set())
    if parser.tok.kind != "EOF":
        raise parser.error({"'set'", "end of input"})
    return sets
