"""Canonical text notation for outcome sets.

Grammar (whitespace-insensitive)::

    expr     := "union(" expr ("," expr)+ ")"
              | "{" item ("," item)* "}"
              | ("int" | "real") bounds
    bounds   := ("[" | "(") endpoint "," endpoint ("]" | ")")
    endpoint := number | "inf" | "-inf"
    item     := integer | real | label

Examples: ``{1000}``, ``{-1,0,1}``, ``int[0,inf)``, ``real[0,2]``,
``union(int[0,999], int[1001,inf))``, ``{no,yes}``.

Integer literals have no decimal point; real literals carry one (or an
exponent). Labels are bare tokens (letters, digits, ``_``, ``.``, ``-``;
must not start with a digit). Parsing accepts any well-formed text;
printing emits one canonical spelling per value, so
``parse_set(format_set(v)) == v`` for every normalized value. Small
finite sets (up to 12 members) print in brace form; everything else
prints ranges, joined by ``union(...)`` when disconnected.
"""

from __future__ import annotations

import math
import re

from .errors import ParseError
from .outcomes import (
    FiniteSet,
    IntegerRange,
    Kind,
    OutcomeSet,
    OutcomeSpace,
    RealInterval,
    UnionOf,
    normalize,
)

_FINITE_PRINT_LIMIT = 12

_TOKEN_RE = re.compile(
    r"""
    (?P<punct>[{}\[\](),])
    | (?P<number>[+-]?(?:inf\b
        | \d+\.\d*(?:[eE][+-]?\d+)?
        | \.\d+(?:[eE][+-]?\d+)?
        | \d+(?:[eE][+-]?\d+)?))
    | (?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)
    """,
    re.VERBOSE,
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r} at position {pos}")
            kind = m.lastgroup or ""
            self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.index = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of set expression")
        self.index += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, pos = self.next()
        if text != value:
            raise ParseError(f"expected {value!r} at position {pos}, got {text!r}")


def _parse_number(text: str) -> int | float:
    if "inf" in text:
        return -math.inf if text.startswith("-") else math.inf
    if any(c in text for c in ".eE"):
        return float(text)
    return int(text)


def _parse_expr(toks: _Tokens):
    kind, text, pos = toks.next()
    if kind == "name" and text == "union":
        toks.expect("(")
        members = [_parse_expr(toks)]
        while True:
            k, t, p = toks.next()
            if t == ")":
                break
            if t != ",":
                raise ParseError(f"expected ',' or ')' at position {p}, got {t!r}")
            members.append(_parse_expr(toks))
        return UnionOf(members)

    if text == "{":
        items: list = []
        tok = toks.peek()
        if tok is not None and tok[1] == "}":
            toks.next()
            return FiniteSet(())
        while True:
            k, t, p = toks.next()
            if k == "number":
                value = _parse_number(t)
                if isinstance(value, float) and math.isinf(value):
                    raise ParseError(f"'inf' cannot be a set member (position {p})")
                items.append(value)
            elif k == "name":
                items.append(t)
            else:
                raise ParseError(f"expected a set member at position {p}, got {t!r}")
            k, t, p = toks.next()
            if t == "}":
                break
            if t != ",":
                raise ParseError(f"expected ',' or '}}' at position {p}, got {t!r}")
        return FiniteSet(items)

    if kind == "name" and text in ("int", "real"):
        return _parse_bounds(toks, text)

    raise ParseError(f"expected a set expression at position {pos}, got {text!r}")


def _parse_bounds(toks: _Tokens, range_kind: str):
    k, open_b, p = toks.next()
    if open_b not in ("[", "("):
        raise ParseError(f"expected '[' or '(' at position {p}, got {open_b!r}")
    lo = _parse_endpoint(toks, range_kind)
    toks.expect(",")
    hi = _parse_endpoint(toks, range_kind)
    k, close_b, p = toks.next()
    if close_b not in ("]", ")"):
        raise ParseError(f"expected ']' or ')' at position {p}, got {close_b!r}")

    if range_kind == "real":
        return RealInterval(lo, hi, lo_closed=open_b == "[", hi_closed=close_b == "]")

    # Integer ranges are inclusive in canonical form; exclusive brackets on
    # finite endpoints are accepted and shifted inward.
    if open_b == "(" and not math.isinf(lo):
        lo = lo + 1
    if close_b == ")" and not math.isinf(hi):
        hi = hi - 1
    return IntegerRange(
        None if lo == -math.inf else lo,
        None if hi == math.inf else hi,
    )


def _parse_endpoint(toks: _Tokens, range_kind: str) -> int | float:
    k, t, p = toks.next()
    if k != "number":
        raise ParseError(f"expected a numeric endpoint at position {p}, got {t!r}")
    value = _parse_number(t)
    if range_kind == "int" and isinstance(value, float) and not math.isinf(value):
        raise ParseError(f"integer range endpoint must be an integer (position {p})")
    return value


def parse_set(text: str) -> OutcomeSpace:
    """Parse set notation into a normalized value."""
    if not isinstance(text, str):
        raise ParseError(f"expected set notation text, got {text!r}")
    toks = _Tokens(text)
    raw = _parse_expr(toks)
    trailing = toks.peek()
    if trailing is not None:
        raise ParseError(
            f"trailing input at position {trailing[2]}: {trailing[1]!r}"
        )
    return normalize(raw)


def _format_real_number(x: float) -> str:
    return repr(x)


def _format_integer_piece(lo: int | None, hi: int | None) -> str:
    if lo is not None and lo == hi:
        return f"{{{lo}}}"
    left = "(-inf" if lo is None else f"[{lo}"
    right = "inf)" if hi is None else f"{hi}]"
    return f"int{left},{right}"


def _format_real_piece(part: tuple) -> str:
    lo, lc, hi, hc = part
    if lo == hi:
        return f"{{{_format_real_number(lo)}}}"
    left = "(-inf" if lo == -math.inf else ("[" if lc else "(") + _format_real_number(lo)
    right = "inf)" if hi == math.inf else _format_real_number(hi) + ("]" if hc else ")")
    return f"real{left},{right}"


def format_set(value: OutcomeSpace | OutcomeSet) -> str:
    """Render a normalized value in its one canonical spelling."""
    space = value.values if isinstance(value, OutcomeSet) else value

    if space.kind is Kind.CATEGORY:
        return "{" + ",".join(space.parts) + "}"

    count = space.count()
    if count is not None and count <= _FINITE_PRINT_LIMIT:
        if space.kind is Kind.INTEGER:
            members = (str(v) for v in space.iter_values())
        else:
            members = (_format_real_number(v) for v in space.iter_values())
        return "{" + ",".join(members) + "}"

    if space.kind is Kind.INTEGER:
        pieces = [_format_integer_piece(lo, hi) for lo, hi in space.parts]
    else:
        pieces = [_format_real_piece(part) for part in space.parts]
    if len(pieces) == 1:
        return pieces[0]
    return "union(" + ", ".join(pieces) + ")"
