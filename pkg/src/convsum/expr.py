"""Term expressions: AST nodes, canonicalization, parsing, printing, substitution.

Expressions are immutable trees over a single free index variable. The
canonical form flattens associative chains, folds rational constants,
collects like terms/powers and orders arguments structurally, so two
equal-by-construction expressions compare equal with ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ExprParseError, UnknownIdentifierError, UnsupportedFormError

__all__ = [
    "Expr", "Num", "Const", "Var", "Add", "Mul", "Pow", "LnK", "Abs", "Sin",
    "Cos", "Factorial", "AltSign", "num", "add", "mul", "div", "pow_", "lnk",
    "exp_", "sqrt", "neg", "parse", "format_expr", "substitute", "free_vars",
    "is_integer_shaped", "structurally_positive", "E", "PI", "abs_",
    "children", "altsign", "factorial", "binom",
]


class Expr:
    __slots__ = ()

    def sort_key(self):
        raise NotImplementedError

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return f"<{format_expr(self)}>"


@dataclass(frozen=True, slots=True)
class Num(Expr):
    val: Fraction

    def sort_key(self):
        return (0, str(self.val))


@dataclass(frozen=True, slots=True)
class Const(Expr):
    name: str  # "e" or "pi"

    def sort_key(self):
        return (1, self.name)


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str

    def sort_key(self):
        return (2, self.name)


@dataclass(frozen=True, slots=True)
class Add(Expr):
    args: tuple

    def sort_key(self):
        return (3, tuple(a.sort_key() for a in self.args))


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    args: tuple

    def sort_key(self):
        return (4, tuple(a.sort_key() for a in self.args))


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exp: Expr

    def sort_key(self):
        return (5, self.base.sort_key(), self.exp.sort_key())


@dataclass(frozen=True, slots=True)
class LnK(Expr):
    depth: int
    arg: Expr

    def sort_key(self):
        return (6, self.depth, self.arg.sort_key())


@dataclass(frozen=True, slots=True)
class Abs(Expr):
    arg: Expr

    def sort_key(self):
        return (7, self.arg.sort_key())


@dataclass(frozen=True, slots=True)
class Sin(Expr):
    arg: Expr

    def sort_key(self):
        return (8, self.arg.sort_key())


@dataclass(frozen=True, slots=True)
class Cos(Expr):
    arg: Expr

    def sort_key(self):
        return (9, self.arg.sort_key())


@dataclass(frozen=True, slots=True)
class Factorial(Expr):
    arg: Expr

    def sort_key(self):
        return (10, self.arg.sort_key())


@dataclass(frozen=True, slots=True)
class AltSign(Expr):
    """(-1)**arg for an integer-valued ``arg``; kept abstract so rearrangement
    transforms can pattern-match alternation."""

    arg: Expr

    def sort_key(self):
        return (11, self.arg.sort_key())


E = Const("e")
PI = Const("pi")

ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))
MINUS_ONE = Num(Fraction(-1))
HALF = Num(Fraction(1, 2))


def num(q) -> Num:
    return Num(Fraction(q))


# ---------------------------------------------------------------------------
# Canonicalizing constructors
# ---------------------------------------------------------------------------

def _as_coeff_rest(t: Expr):
    """Split a term into (rational coefficient, remaining factor)."""
    if isinstance(t, Num):
        return t.val, ONE
    if isinstance(t, Mul) and isinstance(t.args[0], Num):
        rest = t.args[1:]
        rest_e = rest[0] if len(rest) == 1 else Mul(rest)
        return t.args[0].val, rest_e
    return Fraction(1), t


def add(*args) -> Expr:
    terms = []
    stack = list(args)
    while stack:
        a = stack.pop(0)
        if isinstance(a, Add):
            stack = list(a.args) + stack
        else:
            terms.append(a)
    const = Fraction(0)
    collected = {}  # rest expr -> coefficient
    order = []
    for t in terms:
        if isinstance(t, Num):
            const += t.val
            continue
        c, rest = _as_coeff_rest(t)
        if rest not in collected:
            collected[rest] = Fraction(0)
            order.append(rest)
        collected[rest] += c
    out = []
    for rest in sorted(order, key=lambda r: r.sort_key()):
        c = collected[rest]
        if c == 0:
            continue
        out.append(mul(Num(c), rest) if c != 1 else rest)
    if const != 0:
        out.insert(0, Num(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def _base_exp(f: Expr):
    if isinstance(f, Pow):
        return f.base, f.exp
    return f, ONE


def mul(*args) -> Expr:
    factors = []
    stack = list(args)
    while stack:
        a = stack.pop(0)
        if isinstance(a, Mul):
            stack = list(a.args) + stack
        else:
            factors.append(a)
    coeff = Fraction(1)
    bases = {}  # base expr -> list of exponent exprs
    order = []
    for f in factors:
        if isinstance(f, Num):
            if f.val == 0:
                return ZERO
            coeff *= f.val
            continue
        b, e = _base_exp(f)
        if b not in bases:
            bases[b] = []
            order.append(b)
        bases[b].append(e)
    out = []
    for b in sorted(order, key=lambda x: x.sort_key()):
        e = add(*bases[b]) if len(bases[b]) > 1 else bases[b][0]
        p = pow_(b, e)
        if isinstance(p, Num):
            if p.val == 0:
                return ZERO
            coeff *= p.val
        else:
            out.append(p)
    if not out:
        return Num(coeff)
    if coeff != 1:
        out.insert(0, Num(coeff))
    if len(out) == 1:
        return out[0]
    return Mul(tuple(out))


def neg(a: Expr) -> Expr:
    return mul(MINUS_ONE, a)


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, pow_(b, MINUS_ONE))


def _int_nth_root(x: int, k: int):
    if x < 0:
        return None
    r = round(x ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == x:
            return cand
    return None


def _rational_pow(q: Fraction, e: Fraction):
    """Exact q**e when it stays rational, else None."""
    if e.denominator == 1:
        k = e.numerator
        if q == 0 and k < 0:
            return None
        return q ** k
    if q < 0:
        return None
    np_ = _int_nth_root(q.numerator, e.denominator)
    dp = _int_nth_root(q.denominator, e.denominator)
    if np_ is None or dp is None:
        return None
    return Fraction(np_, dp) ** e.numerator


def structurally_positive(e: Expr) -> bool:
    """True when ``e`` is positive for every index value in its domain."""
    if isinstance(e, Num):
        return e.val > 0
    if isinstance(e, (Const, Var, Factorial, Abs)):
        return True
    if isinstance(e, Pow):
        if structurally_positive(e.base):
            return True
        if isinstance(e.exp, Num) and e.exp.val.denominator == 1 \
                and e.exp.val.numerator % 2 == 0:
            return True
        return False
    if isinstance(e, Mul):
        return all(structurally_positive(f) for f in e.args)
    if isinstance(e, Add):
        return all(structurally_positive(t) for t in e.args)
    return False


def is_integer_shaped(e: Expr) -> bool:
    """True when ``e`` takes integer values under integer substitution."""
    if isinstance(e, Num):
        return e.val.denominator == 1
    if isinstance(e, Var):
        return True
    if isinstance(e, Add):
        return all(is_integer_shaped(t) for t in e.args)
    if isinstance(e, Mul):
        return all(is_integer_shaped(f) for f in e.args)
    if isinstance(e, Pow):
        return (is_integer_shaped(e.base) and isinstance(e.exp, Num)
                and e.exp.val.denominator == 1 and e.exp.val >= 0) or \
               (is_integer_shaped(e.base) and is_integer_shaped(e.exp)
                and _nonneg_shaped(e.exp))
    if isinstance(e, Factorial):
        return is_integer_shaped(e.arg)
    if isinstance(e, AltSign):
        return True
    return False


def _nonneg_shaped(e: Expr) -> bool:
    if isinstance(e, Num):
        return e.val >= 0
    if isinstance(e, (Var, Factorial, Abs)):
        return True
    if isinstance(e, Add):
        return all(_nonneg_shaped(t) for t in e.args)
    if isinstance(e, Mul):
        return all(_nonneg_shaped(f) for f in e.args)
    return False


def _int_parity(e: Expr):
    """Parity (0 even, 1 odd) of an integer-shaped expression, or None."""
    if isinstance(e, Num) and e.val.denominator == 1:
        return e.val.numerator % 2
    if isinstance(e, Add):
        par = 0
        for t in e.args:
            p = _int_parity(t)
            if p is None:
                return None
            par ^= p
        return par
    if isinstance(e, Mul):
        # even factor forces even product; all-odd gives odd
        parities = [_int_parity(f) for f in e.args]
        if any(p == 0 for p in parities):
            return 0
        if all(p == 1 for p in parities):
            return 1
        return None
    if isinstance(e, Pow) and isinstance(e.exp, Num) and e.exp.val >= 1:
        return _int_parity(e.base)
    return None


def pow_(b: Expr, e: Expr) -> Expr:
    if isinstance(e, Num):
        if e.val == 0:
            return ONE
        if e.val == 1:
            return b
        if isinstance(b, Num):
            r = _rational_pow(b.val, e.val)
            if r is not None:
                return Num(r)
            if b.val == -1 and e.val.denominator == 1:
                return ONE if e.val.numerator % 2 == 0 else MINUS_ONE
        if isinstance(b, Pow) and isinstance(b.exp, Num):
            if structurally_positive(b.base) or \
                    (b.exp.val.denominator == 1 and e.val.denominator == 1):
                return pow_(b.base, Num(b.exp.val * e.val))
        if isinstance(b, Mul):
            if e.val.denominator == 1 or all(structurally_positive(f) for f in b.args):
                return mul(*[pow_(f, e) for f in b.args])
        if isinstance(b, AltSign) and e.val.denominator == 1:
            return ONE if e.val.numerator % 2 == 0 else b
        if isinstance(b, Abs) and e.val.denominator == 1 and e.val.numerator % 2 == 0:
            return pow_(b.arg, e)
    # (-1)^g for integer-shaped g becomes the alternation marker
    if isinstance(b, Num) and b.val == -1 and is_integer_shaped(e):
        return altsign(e)
    if isinstance(b, Num) and b.val < 0 and is_integer_shaped(e):
        return mul(altsign(e), pow_(Num(-b.val), e))
    if isinstance(b, Pow) and structurally_positive(b.base):
        return pow_(b.base, mul(b.exp, e))
    return Pow(b, e)


def altsign(e: Expr) -> Expr:
    p = _int_parity(e)
    if p == 0:
        return ONE
    if p == 1:
        return MINUS_ONE
    # peel off additive parts of known parity: (-1)^(n+k) == (-1)^k * (-1)^n
    if isinstance(e, Add):
        known, rest = 0, []
        for t in e.args:
            tp = _int_parity(t)
            if tp is None:
                rest.append(t)
            else:
                known ^= tp
        if len(rest) < len(e.args):
            inner = AltSign(add(*rest)) if rest else ONE
            return mul(MINUS_ONE, inner) if known else inner
    return AltSign(e)


def exp_(x: Expr) -> Expr:
    return pow_(E, x)


def sqrt(x: Expr) -> Expr:
    return pow_(x, HALF)


def lnk(k: int, x: Expr) -> Expr:
    if k < 1:
        raise UnsupportedFormError("lnk depth must be >= 1")
    if k == 1:
        if isinstance(x, Const) and x.name == "e":
            return ONE
        if isinstance(x, Num) and x.val == 1:
            return ZERO
        if isinstance(x, Pow) and structurally_positive(x.base):
            return mul(x.exp, lnk(1, x.base))
        if isinstance(x, Mul) and all(structurally_positive(f) for f in x.args):
            return add(*[lnk(1, f) for f in x.args])
    else:
        inner = lnk(k - 1, x)
        if not isinstance(inner, LnK) or inner.depth != k - 1 or inner.arg != x:
            return lnk(1, inner)
    return LnK(k, x)


def binom(n: Expr, k: int) -> Expr:
    """binom(n, k) for a literal k, expanded to a falling-factorial ratio."""
    if k < 0:
        raise UnsupportedFormError("binom lower index must be a nonnegative integer")
    import math
    prod = [add(n, Num(Fraction(-j))) for j in range(k)]
    return mul(Num(Fraction(1, math.factorial(k))), *prod) if k else ONE


def factorial(x: Expr) -> Expr:
    if not is_integer_shaped(x):
        raise UnsupportedFormError(
            f"factorial of non-integer-shaped argument: {format_expr(x)}")
    if isinstance(x, Num):
        import math
        if x.val < 0:
            raise UnsupportedFormError("factorial of a negative constant")
        return Num(Fraction(math.factorial(x.val.numerator)))
    return Factorial(x)


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Num):
        if e.val.denominator == 1:
            s = str(e.val.numerator)
            need = _PREC_ATOM if e.val >= 0 else _PREC_UNARY
        else:
            s = f"{e.val.numerator}/{e.val.denominator}"
            need = _PREC_MUL if e.val >= 0 else _PREC_UNARY
        return f"({s})" if ctx > need else s
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.args):
            c, rest = _as_coeff_rest(t)
            if i > 0 and c < 0:
                inner = mul(Num(-c), rest)
                parts.append(" - " + _fmt(inner, _PREC_MUL))
            else:
                parts.append((" + " if i else "") + _fmt(t, _PREC_ADD + (1 if i else 0)))
        s = "".join(parts)
        return f"({s})" if ctx > _PREC_ADD else s
    if isinstance(e, Mul):
        numer, denom = [], []
        for f in e.args:
            b, ex = _base_exp(f)
            if isinstance(ex, Num) and ex.val < 0:
                denom.append(pow_(b, Num(-ex.val)))
            else:
                numer.append(f)
        if denom:
            ntxt = _fmt(mul(*numer) if numer else ONE, _PREC_MUL)
            d = mul(*denom)
            dtxt = _fmt(d, _PREC_MUL + 1)
            s = f"{ntxt}/{dtxt}"
        else:
            s = "*".join(_fmt(f, _PREC_MUL + (1 if i else 0))
                         for i, f in enumerate(e.args))
        return f"({s})" if ctx > _PREC_MUL else s
    if isinstance(e, Pow):
        b, ex = e.base, e.exp
        if isinstance(ex, Num) and ex.val < 0:
            inner = f"1/{_fmt(pow_(b, Num(-ex.val)), _PREC_MUL + 1)}"
            return f"({inner})" if ctx > _PREC_MUL else inner
        if isinstance(b, Const) and b.name == "e":
            return f"exp({_fmt(ex, 0)})"
        s = f"{_fmt(b, _PREC_POW + 1)}^{_fmt(ex, _PREC_POW + 1)}"
        return f"({s})" if ctx > _PREC_POW else s
    if isinstance(e, LnK):
        if e.depth == 1:
            return f"ln({_fmt(e.arg, 0)})"
        return f"lnk({e.depth}, {_fmt(e.arg, 0)})"
    if isinstance(e, Abs):
        return f"abs({_fmt(e.arg, 0)})"
    if isinstance(e, Sin):
        return f"sin({_fmt(e.arg, 0)})"
    if isinstance(e, Cos):
        return f"cos({_fmt(e.arg, 0)})"
    if isinstance(e, Factorial):
        inner = _fmt(e.arg, _PREC_ATOM + 1) if not isinstance(e.arg, (Var, Num)) \
            else _fmt(e.arg, _PREC_ATOM)
        if isinstance(e.arg, Num) and e.arg.val < 0:
            inner = f"({inner})"
        return f"{inner}!"
    if isinstance(e, AltSign):
        s = f"(-1)^{_fmt(e.arg, _PREC_POW + 1)}"
        return f"({s})" if ctx > _PREC_POW else s
    raise UnsupportedFormError(f"cannot format {e!r}")


def format_expr(e: Expr) -> str:
    return _fmt(e, 0)


# ---------------------------------------------------------------------------
# Parsing (precedence climbing over the fixed grammar)
# ---------------------------------------------------------------------------

_FUNCS = {"ln", "lnk", "exp", "sqrt", "abs", "sin", "cos", "binom"}


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("num", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("ident", text[i:j], i))
            i = j
            continue
        if c in "+-*/^!(),":
            toks.append((c, c, i))
            i += 1
            continue
        raise ExprParseError(f"unexpected character {c!r}", i)
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, toks, var):
        self.toks = toks
        self.pos = 0
        self.var = var

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ExprParseError(f"unexpected token {t[1]!r}", t[2], [kind])
        return t

    def parse_expr(self):
        e = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.parse_term()
            e = add(e, rhs) if op == "+" else add(e, neg(rhs))
        return e

    def parse_term(self):
        e = self.parse_unary()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            rhs = self.parse_unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def parse_unary(self):
        if self.peek()[0] == "-":
            self.next()
            return neg(self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self):
        e = self.parse_atom()
        while True:
            t = self.peek()
            if t[0] == "!":
                self.next()
                try:
                    e = factorial(e)
                except UnsupportedFormError as exc:
                    raise ExprParseError(str(exc), t[2]) from exc
            elif t[0] == "^":
                self.next()
                rhs = self.parse_unary()
                e = pow_(e, rhs)
            else:
                return e

    def parse_atom(self):
        t = self.next()
        if t[0] == "num":
            return Num(Fraction(int(t[1])))
        if t[0] == "(":
            e = self.parse_expr()
            self.expect(")")
            return e
        if t[0] == "ident":
            name = t[1]
            if self.peek()[0] == "(":
                if name not in _FUNCS:
                    raise UnknownIdentifierError(
                        f"unknown function {name!r}", t[2], sorted(_FUNCS))
                self.next()
                args = [self.parse_expr()]
                while self.peek()[0] == ",":
                    self.next()
                    args.append(self.parse_expr())
                self.expect(")")
                return self._call(name, args, t[2])
            if name == "e":
                return E
            if name == "pi":
                return PI
            if name == self.var:
                return Var(name)
            raise UnknownIdentifierError(
                f"unknown identifier {name!r}", t[2], [self.var, "e", "pi"])
        raise ExprParseError(f"unexpected token {t[1]!r}", t[2],
                             ["number", "identifier", "("])

    def _call(self, name, args, pos):
        def arity(k):
            if len(args) != k:
                raise ExprParseError(
                    f"{name} takes {k} argument(s), got {len(args)}", pos)
        if name == "ln":
            arity(1)
            return lnk(1, args[0])
        if name == "lnk":
            arity(2)
            k = args[0]
            if not isinstance(k, Num) or k.val.denominator != 1 or k.val < 1:
                raise ExprParseError("lnk depth must be a positive integer literal", pos)
            return lnk(int(k.val), args[1])
        if name == "exp":
            arity(1)
            return exp_(args[0])
        if name == "sqrt":
            arity(1)
            return sqrt(args[0])
        if name == "abs":
            arity(1)
            a = args[0]
            return a if structurally_positive(a) else Abs(a)
        if name == "sin":
            arity(1)
            return Sin(args[0])
        if name == "cos":
            arity(1)
            return Cos(args[0])
        if name == "binom":
            arity(2)
            k = args[1]
            if not isinstance(k, Num) or k.val.denominator != 1 or k.val < 0:
                raise ExprParseError(
                    "binom second argument must be a nonnegative integer literal", pos)
            return binom(args[0], int(k.val))
        raise AssertionError(name)


def parse(text: str, var: str = "n") -> Expr:
    toks = _tokenize(text)
    p = _Parser(toks, var)
    e = p.parse_expr()
    t = p.peek()
    if t[0] != "end":
        raise ExprParseError(f"trailing input {t[1]!r}", t[2])
    return e


# ---------------------------------------------------------------------------
# Substitution and variable queries
# ---------------------------------------------------------------------------

def free_vars(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    out = set()
    for c in _children(e):
        out |= free_vars(c)
    return out


def abs_(x: Expr) -> Expr:
    """|x|, dropped when x is structurally nonnegative."""
    if structurally_positive(x) or _nonneg_shaped(x):
        return x
    if isinstance(x, Num):
        return Num(abs(x.val))
    return Abs(x)


def children(e: Expr):
    """Immediate sub-expressions of a node."""
    return _children(e)


def _children(e: Expr):
    if isinstance(e, (Num, Const, Var)):
        return ()
    if isinstance(e, (Add, Mul)):
        return e.args
    if isinstance(e, Pow):
        return (e.base, e.exp)
    if isinstance(e, (LnK, Abs, Sin, Cos, Factorial, AltSign)):
        return (e.arg,)
    raise UnsupportedFormError(repr(e))


def substitute(e: Expr, var: str, repl: Expr) -> Expr:
    """Capture-free substitution of ``repl`` for ``var``, re-normalized."""
    if isinstance(e, Var):
        return repl if e.name == var else e
    if isinstance(e, (Num, Const)):
        return e
    if isinstance(e, Add):
        return add(*[substitute(t, var, repl) for t in e.args])
    if isinstance(e, Mul):
        return mul(*[substitute(t, var, repl) for t in e.args])
    if isinstance(e, Pow):
        return pow_(substitute(e.base, var, repl), substitute(e.exp, var, repl))
    if isinstance(e, LnK):
        return lnk(e.depth, substitute(e.arg, var, repl))
    if isinstance(e, Abs):
        a = substitute(e.arg, var, repl)
        return a if structurally_positive(a) else Abs(a)
    if isinstance(e, Sin):
        return Sin(substitute(e.arg, var, repl))
    if isinstance(e, Cos):
        return Cos(substitute(e.arg, var, repl))
    if isinstance(e, Factorial):
        return factorial(substitute(e.arg, var, repl))
    if isinstance(e, AltSign):
        return altsign(substitute(e.arg, var, repl))
    raise UnsupportedFormError(repr(e))
