"""Text form of operator expressions.

Grammar (primitives written in application order, first applied leftmost)::

    expr   := '0' | term ('+' term)*
    term   := [coeff '*'] prim ('.' prim)*
    coeff  := '(' ['-'] mono (('+' | '-') mono)* ')'
    mono   := factor ('*' factor)*
    factor := INT | 'i' | 'k' ['^' INT]
    prim   := 'Id[a]' | 'D[a]' ['^' INT] | 'B[a,b]' | 'Tr[a]'

``k`` stands for kappa.  A missing coefficient means ``(1)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .operators import (
    ONE, Coefficient, Collision, Deriv, OperatorError, OperatorExpr, OperatorTerm, PTrace,
    SlotLifetimeError, check_pipeline, make_expr,
)


MAX_POWER = 64


class OperatorSyntaxError(OperatorError):
    def __init__(self, msg, line, column):
        self.line = line
        self.column = column
        super().__init__(f"{msg} at line {line}, column {column}")


# -- printing ----------------------------------------------------------------

def _mono_text(re_part, im_part, m):
    value = re_part if im_part == 0 else im_part
    factors = []
    if abs(value) != 1:
        factors.append(str(abs(value)))
    if im_part:
        factors.append("i")
    if m == 1:
        factors.append("k")
    elif m > 1:
        factors.append(f"k^{m}")
    body = "*".join(factors) or "1"
    return ("-" if value < 0 else "") + body


def coefficient_text(c: Coefficient) -> str:
    monos = []
    for m, re_part, im_part in c.terms:
        if re_part:
            monos.append(_mono_text(re_part, 0, m))
        if im_part:
            monos.append(_mono_text(0, im_part, m))
    out = monos[0]
    for s in monos[1:]:
        out += s if s.startswith("-") else "+" + s
    return f"({out})"


def _prim_text(p):
    if isinstance(p, Deriv):
        return f"D[{p.slot}]"
    if isinstance(p, Collision):
        return f"B[{p.target},{p.source}]"
    return f"Tr[{p.slot}]"


def term_text(t: OperatorTerm, slots) -> str:
    parts = []
    i, pipe = 0, t.pipeline
    while i < len(pipe):
        p = pipe[i]
        run = 1
        if isinstance(p, Deriv):
            while i + run < len(pipe) and pipe[i + run] == p:
                run += 1
        parts.append(_prim_text(p) + (f"^{run}" if run > 1 else ""))
        i += run
    touched = {a for p in pipe for a in p.labels}
    parts += [f"Id[{a}]" for a in slots if a not in touched]
    body = ".".join(parts)
    if t.coeff == ONE:
        return body
    return f"{coefficient_text(t.coeff)}*{body}"


def pretty_print(e: OperatorExpr) -> str:
    """Deterministic text, e.g. ``(-1)*D[1]^2.Tr[2].Tr[3] + (k)*B[1,2].Tr[3]``."""
    if not e.terms:
        return "0"
    return " + ".join(term_text(t, e.slots) for t in e.terms)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>Tr|Id|[A-Za-z_]\w*)|(?P<op>[()*+\-.\[\],^]))")


@dataclass
class _Tok:
    kind: str  # 'int' | 'name' | 'op' | 'eof'
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    line_starts = [0] + [m.end() for m in re.finditer("\n", src)]

    def where(offset):
        line = max(i for i, s in enumerate(line_starts) if s <= offset)
        return line + 1, offset - line_starts[line] + 1

    while True:
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            rest = src[pos:]
            stripped = len(rest) - len(rest.lstrip())
            if pos + stripped >= len(src):
                toks.append(_Tok("eof", "", *where(len(src))))
                return toks
            raise OperatorSyntaxError(f"unexpected character {src[pos + stripped]!r}", *where(pos + stripped))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), *where(start)))
        pos = m.end()


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise OperatorSyntaxError(f"{msg}; got {got}", tok.line, tok.col)

    def accept(self, text):
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.error(f"expected {text!r}")

    def integer(self, what="integer", positive=True):
        tok = self.tok
        if tok.kind != "int":
            self.error(f"expected {what}")
        self.i += 1
        value = int(tok.text)
        if positive and value < 1:
            self.error(f"{what} must be positive", tok)
        return value

    def expr(self):
        if self.tok.kind == "int" and self.tok.text == "0" and self.toks[self.i + 1].kind == "eof":
            self.i += 1
            return []
        terms = [self.term()]
        while self.accept("+"):
            terms.append(self.term())
        if self.tok.kind != "eof":
            self.error("expected '+' or end of input")
        return terms

    def term(self):
        start = self.tok
        coeff = ONE
        if self.accept("("):
            coeff = self.poly()
            self.expect(")")
            self.expect("*")
        prims, ids = self.prim()
        while self.accept("."):
            p, i = self.prim()
            prims += p
            ids += i
        return start, coeff, prims, ids

    def poly(self):
        sign = -1 if self.accept("-") else 1
        total = self.mono(sign)
        while True:
            if self.accept("+"):
                total = total + self.mono(1)
            elif self.accept("-"):
                total = total + self.mono(-1)
            else:
                return total

    def mono(self, sign):
        c = Coefficient.monomial(scale=sign)
        c = c * self.factor()
        while self.accept("*"):
            c = c * self.factor()
        return c

    def factor(self):
        tok = self.tok
        if tok.kind == "int":
            value = self.integer("integer factor", positive=False)
            return Coefficient._make({0: (value, 0)})
        if self.accept("i"):
            return Coefficient.monomial(3)  # +i = (-i)^3
        if self.accept("k"):
            power = self.integer("exponent") if self.accept("^") else 1
            return Coefficient.monomial(0, power)
        self.error("expected coefficient factor (integer, 'i' or 'k')")

    def label(self):
        return self.integer("slot label")

    def prim(self):
        tok = self.tok
        if tok.kind != "name":
            self.error("expected primitive Id, D, B or Tr")
        name = tok.text
        self.i += 1
        self.expect("[")
        if name == "B":
            a = self.label()
            self.expect(",")
            b = self.label()
            self.expect("]")
            if a == b:
                self.error("collision needs two distinct slots", tok)
            return [Collision(a, b)], []
        if name not in ("Id", "D", "Tr"):
            self.error("unknown primitive", tok)
        a = self.label()
        self.expect("]")
        if name == "Id":
            return [], [a]
        if name == "Tr":
            return [PTrace(a)], []
        power = self.integer("derivative power") if self.accept("^") else 1
        if power > MAX_POWER:
            self.error(f"derivative power exceeds {MAX_POWER}", tok)
        return [Deriv(a)] * power, []


def parse(src: str) -> OperatorExpr:
    """Parse and normalize; errors carry line and column."""
    if not isinstance(src, str):
        raise TypeError("parse expects text")
    terms = _Parser(src).expr()
    slots = set()
    for _, _, prims, ids in terms:
        slots |= set(ids) | {a for p in prims for a in p.labels}
    slots = sorted(slots)
    outputs = None
    built = []
    for start, coeff, prims, _ in terms:
        try:
            out = check_pipeline(prims, slots)
        except SlotLifetimeError as exc:
            raise SlotLifetimeError(str(exc), start.line, start.col) from None
        if outputs is not None and out != outputs:
            raise SlotLifetimeError(f"term leaves slots {list(out)}, expected {list(outputs)}", start.line, start.col)
        outputs = out
        built.append(OperatorTerm(coeff, tuple(prims)))
    return make_expr(slots, built)
