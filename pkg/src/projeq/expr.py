"""Expression language for metric and integral coefficients.

Grammar (EBNF, see README):

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;            (* right associative *)
    atom    = NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")" ;

Variables: x, y in the real context, z in the complex context.  No implicit
multiplication.  Functions: sin, cos, exp, log, sqrt, abs.

Evaluation is jet-based: eval_jet returns the value and all partial
derivatives up to second order, computed exactly by the product/chain rules.
eval_complex returns the value and the first two z-derivatives of a
holomorphic expression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")

REAL_VARIABLES = ("x", "y")
COMPLEX_VARIABLES = ("z",)

# abs is treated as non-differentiable when its argument is this close to 0.
_ABS_KINK_TOL = 1e-12


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Num | Var | Neg | BinOp | Call


# --- tokenizer / parser -------------------------------------------------------

_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, position) triples; kind in {num, ident, op}."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tok = text[i:j]
            try:
                float(tok)
            except ValueError:
                raise ExprSyntaxError(i, f"malformed number '{tok}'")
            tokens.append(("num", tok, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(i, f"unexpected character '{ch}'")
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _end_position(self):
        if self.tokens:
            kind, val, p = self.tokens[-1]
            return p + len(val)
        return 0

    def _expect_op(self, op):
        tok = self._peek()
        if tok is None:
            raise ExprSyntaxError(self._end_position(), f"expected '{op}', found end of input")
        if tok[0] != "op" or tok[1] != op:
            raise ExprSyntaxError(tok[2], f"expected '{op}', found '{tok[1]}'")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.expr()
        tok = self._peek()
        if tok is not None:
            raise ExprSyntaxError(tok[2], f"unexpected '{tok[1]}'")
        return e

    def expr(self) -> Expr:
        node = self.term()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self.pos += 1
                node = BinOp(tok[1], node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] in "*/":
                self.pos += 1
                node = BinOp(tok[1], node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.pos += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self._peek()
        if tok is None:
            raise ExprSyntaxError(self._end_position(), "expected a value, found end of input")
        kind, val, p = tok
        if kind == "num":
            self.pos += 1
            return Num(float(val))
        if kind == "ident":
            self.pos += 1
            if val in FUNCTIONS:
                self._expect_op("(")
                arg = self.expr()
                self._expect_op(")")
                return Call(val, arg)
            if val in self.variables:
                return Var(val)
            raise UnknownIdentifier(val, p)
        if kind == "op" and val == "(":
            self.pos += 1
            e = self.expr()
            self._expect_op(")")
            return e
        raise ExprSyntaxError(p, f"unexpected '{val}'")


def parse(text: str, context: str = "real", variables: tuple[str, ...] | None = None) -> Expr:
    """Parse an expression.  context selects the default variable set
    ('real' -> x, y; 'complex' -> z); pass variables to restrict further,
    e.g. variables=('y',) for a function of y alone."""
    if not text or not text.strip():
        raise ExprSyntaxError(0, "empty expression")
    if variables is None:
        if context == "real":
            variables = REAL_VARIABLES
        elif context == "complex":
            variables = COMPLEX_VARIABLES
        else:
            raise ValueError(f"unknown context {context!r}")
    return _Parser(_tokenize(text), variables).parse()


# --- rendering ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _render(e: Expr, parent_prec: int, right_side: bool) -> str:
    match e:
        case Num(v):
            s = repr(v)
            return s
        case Var(name):
            return name
        case Neg(arg):
            s = "-" + _render(arg, _PREC["neg"], False)
            return f"({s})" if parent_prec > _PREC["neg"] or (parent_prec == _PREC["neg"] and right_side) else s
        case Call(func, arg):
            return f"{func}({_render(arg, 0, False)})"
        case BinOp(op, left, right):
            prec = _PREC[op]
            # - and / are left associative, ^ is right associative
            lp = _render(left, prec if op != "^" else prec + 1, False)
            rp = _render(right, prec + (1 if op in "-/" else 0) if op != "^" else prec, True)
            s = f"{lp}{op}{rp}"
            need = parent_prec > prec or (parent_prec == prec and right_side)
            return f"({s})" if need else s
    raise TypeError(f"not an Expr: {e!r}")


def render(e: Expr) -> str:
    """Render back to a string; parse(render(e)) is structurally e."""
    return _render(e, 0, False)


# --- order-2 jets --------------------------------------------------------------

class Jet2:
    """Value and partial derivatives up to second order of a function of (x, y).
    Mixed-partial symmetry holds by construction (one dxy slot)."""

    __slots__ = ("v", "dx", "dy", "dxx", "dxy", "dyy")

    def __init__(self, v, dx=0.0, dy=0.0, dxx=0.0, dxy=0.0, dyy=0.0):
        self.v = v
        self.dx = dx
        self.dy = dy
        self.dxx = dxx
        self.dxy = dxy
        self.dyy = dyy

    def __repr__(self):
        return (f"Jet2(v={self.v}, dx={self.dx}, dy={self.dy}, "
                f"dxx={self.dxx}, dxy={self.dxy}, dyy={self.dyy})")

    # arithmetic -------------------------------------------------------------
    def __add__(self, o):
        o = _as_jet(o)
        return Jet2(self.v + o.v, self.dx + o.dx, self.dy + o.dy,
                    self.dxx + o.dxx, self.dxy + o.dxy, self.dyy + o.dyy)

    __radd__ = __add__

    def __sub__(self, o):
        o = _as_jet(o)
        return Jet2(self.v - o.v, self.dx - o.dx, self.dy - o.dy,
                    self.dxx - o.dxx, self.dxy - o.dxy, self.dyy - o.dyy)

    def __rsub__(self, o):
        return _as_jet(o) - self

    def __neg__(self):
        return Jet2(-self.v, -self.dx, -self.dy, -self.dxx, -self.dxy, -self.dyy)

    def __mul__(self, o):
        o = _as_jet(o)
        u, w = self, o
        return Jet2(
            u.v * w.v,
            u.dx * w.v + u.v * w.dx,
            u.dy * w.v + u.v * w.dy,
            u.dxx * w.v + 2.0 * u.dx * w.dx + u.v * w.dxx,
            u.dxy * w.v + u.dx * w.dy + u.dy * w.dx + u.v * w.dxy,
            u.dyy * w.v + 2.0 * u.dy * w.dy + u.v * w.dyy,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.v
        if v == 0.0:
            raise DomainError("division by zero")
        iv = 1.0 / v
        iv2 = iv * iv
        iv3 = iv2 * iv
        return Jet2(
            iv,
            -self.dx * iv2,
            -self.dy * iv2,
            (2.0 * self.dx * self.dx - v * self.dxx) * iv3,
            (2.0 * self.dx * self.dy - v * self.dxy) * iv3,
            (2.0 * self.dy * self.dy - v * self.dyy) * iv3,
        )

    def __truediv__(self, o):
        return self * _as_jet(o).reciprocal()

    def __rtruediv__(self, o):
        return _as_jet(o) * self.reciprocal()

    def chain(self, f0, f1, f2):
        """Compose with a scalar function given (f(v), f'(v), f''(v))."""
        return Jet2(
            f0,
            f1 * self.dx,
            f1 * self.dy,
            f2 * self.dx * self.dx + f1 * self.dxx,
            f2 * self.dx * self.dy + f1 * self.dxy,
            f2 * self.dy * self.dy + f1 * self.dyy,
        )

    def __pow__(self, k):
        if isinstance(k, Jet2):
            return _jet_pow(self, k)
        return _jet_pow(self, Jet2(float(k)))


def _as_jet(o):
    if isinstance(o, Jet2):
        return o
    return Jet2(float(o))


def _jet_pow(u: Jet2, w: Jet2) -> Jet2:
    const_expo = w.dx == 0.0 and w.dy == 0.0 and w.dxx == 0.0 and w.dxy == 0.0 and w.dyy == 0.0
    k = w.v
    if const_expo and k == round(k):
        k = int(round(k))
        if k == 0:
            return Jet2(1.0)
        if u.v == 0.0 and k < 0:
            raise DomainError("zero raised to a negative power")
        f0 = u.v ** k
        f1 = k * u.v ** (k - 1)
        f2 = k * (k - 1) * (u.v ** (k - 2) if k != 1 else 0.0)
        return u.chain(f0, f1, f2)
    if const_expo:
        if u.v <= 0.0:
            raise DomainError("non-integer power of a non-positive base")
        f0 = u.v ** k
        f1 = k * u.v ** (k - 1.0)
        f2 = k * (k - 1.0) * u.v ** (k - 2.0)
        return u.chain(f0, f1, f2)
    # general u^w = exp(w log u)
    if u.v <= 0.0:
        raise DomainError("power with variable exponent needs a positive base")
    return _jet_exp(w * _jet_log(u))


def _jet_exp(u: Jet2) -> Jet2:
    e = math.exp(u.v)
    return u.chain(e, e, e)


def _jet_log(u: Jet2) -> Jet2:
    if u.v <= 0.0:
        raise DomainError("log of a non-positive value")
    iv = 1.0 / u.v
    return u.chain(math.log(u.v), iv, -iv * iv)


def _jet_sqrt(u: Jet2) -> Jet2:
    if u.v < 0.0:
        raise DomainError("sqrt of a negative value")
    if u.v == 0.0:
        raise DomainError("sqrt is not differentiable at 0")
    s = math.sqrt(u.v)
    return u.chain(s, 0.5 / s, -0.25 / (s * u.v))


def _jet_abs(u: Jet2) -> Jet2:
    if abs(u.v) < _ABS_KINK_TOL:
        raise DomainError("abs is not differentiable at 0")
    s = 1.0 if u.v > 0.0 else -1.0
    return u.chain(abs(u.v), s, 0.0)


_JET_FUNCS = {
    "sin": lambda u: u.chain(math.sin(u.v), math.cos(u.v), -math.sin(u.v)),
    "cos": lambda u: u.chain(math.cos(u.v), -math.sin(u.v), -math.cos(u.v)),
    "exp": _jet_exp,
    "log": _jet_log,
    "sqrt": _jet_sqrt,
    "abs": _jet_abs,
}

_JET_X = ("x",)


def eval_jet(e: Expr, x: float, y: float) -> Jet2:
    """Value and exact partial derivatives up to second order at (x, y)."""
    try:
        return _eval_jet(e, x, y)
    except DomainError:
        raise
    except ZeroDivisionError:
        raise DomainError("division by zero", render(e))


def _eval_jet(e: Expr, x: float, y: float) -> Jet2:
    match e:
        case Num(v):
            return Jet2(v)
        case Var(name):
            if name == "x":
                return Jet2(x, 1.0, 0.0)
            if name == "y":
                return Jet2(y, 0.0, 1.0)
            raise DomainError(f"variable '{name}' has no real-context value")
        case Neg(arg):
            return -_eval_jet(arg, x, y)
        case BinOp(op, left, right):
            lu = _eval_jet(left, x, y)
            ru = _eval_jet(right, x, y)
            if op == "+":
                return lu + ru
            if op == "-":
                return lu - ru
            if op == "*":
                return lu * ru
            if op == "/":
                if ru.v == 0.0:
                    raise DomainError("division by zero", render(right))
                return lu / ru
            return _jet_pow(lu, ru)
        case Call(func, arg):
            u = _eval_jet(arg, x, y)
            try:
                return _JET_FUNCS[func](u)
            except DomainError as err:
                raise DomainError(str(err), render(e)) from None
    raise TypeError(f"not an Expr: {e!r}")


# --- complex jets ----------------------------------------------------------------

class ComplexJet:
    """Value and the first two z-derivatives of a holomorphic expression."""

    __slots__ = ("v", "dv", "ddv")

    def __init__(self, v, dv=0j, ddv=0j):
        self.v = complex(v)
        self.dv = complex(dv)
        self.ddv = complex(ddv)

    def __repr__(self):
        return f"ComplexJet(v={self.v}, dv={self.dv}, ddv={self.ddv})"

    def __add__(self, o):
        return ComplexJet(self.v + o.v, self.dv + o.dv, self.ddv + o.ddv)

    def __sub__(self, o):
        return ComplexJet(self.v - o.v, self.dv - o.dv, self.ddv - o.ddv)

    def __neg__(self):
        return ComplexJet(-self.v, -self.dv, -self.ddv)

    def __mul__(self, o):
        return ComplexJet(
            self.v * o.v,
            self.dv * o.v + self.v * o.dv,
            self.ddv * o.v + 2.0 * self.dv * o.dv + self.v * o.ddv,
        )

    def reciprocal(self):
        if self.v == 0:
            raise DomainError("complex division by zero (pole)")
        iv = 1.0 / self.v
        return self.chain(iv, -iv * iv, 2.0 * iv * iv * iv)

    def __truediv__(self, o):
        return self * o.reciprocal()

    def chain(self, f0, f1, f2):
        return ComplexJet(
            f0,
            f1 * self.dv,
            f2 * self.dv * self.dv + f1 * self.ddv,
        )


def _cpow(u: ComplexJet, w: ComplexJet) -> ComplexJet:
    if w.dv == 0 and w.ddv == 0 and w.v == round(w.v.real) and w.v.imag == 0.0:
        k = int(round(w.v.real))
        if k == 0:
            return ComplexJet(1.0)
        if u.v == 0 and k < 0:
            raise DomainError("complex pole: zero to a negative power")
        return u.chain(u.v ** k, k * u.v ** (k - 1),
                       k * (k - 1) * (u.v ** (k - 2) if k != 1 else 0.0))
    return _cexp(w * _clog(u))


def _cexp(u: ComplexJet) -> ComplexJet:
    import cmath
    e = cmath.exp(u.v)
    return u.chain(e, e, e)


def _clog(u: ComplexJet) -> ComplexJet:
    import cmath
    if u.v == 0:
        raise DomainError("log at the branch point 0")
    iv = 1.0 / u.v
    return u.chain(cmath.log(u.v), iv, -iv * iv)


def _csqrt(u: ComplexJet) -> ComplexJet:
    import cmath
    if u.v == 0:
        raise DomainError("sqrt at the branch point 0")
    s = cmath.sqrt(u.v)
    return u.chain(s, 0.5 / s, -0.25 / (s * u.v))


def _csin(u: ComplexJet) -> ComplexJet:
    import cmath
    return u.chain(cmath.sin(u.v), cmath.cos(u.v), -cmath.sin(u.v))


def _ccos(u: ComplexJet) -> ComplexJet:
    import cmath
    return u.chain(cmath.cos(u.v), -cmath.sin(u.v), -cmath.cos(u.v))


_CFUNCS = {"exp": _cexp, "log": _clog, "sqrt": _csqrt, "sin": _csin, "cos": _ccos}


def eval_complex(e: Expr, z: complex) -> ComplexJet:
    """Value and z-derivatives of a complex-context expression at z."""
    match e:
        case Num(v):
            return ComplexJet(v)
        case Var(name):
            if name == "z":
                return ComplexJet(z, 1.0)
            raise DomainError(f"variable '{name}' has no complex-context value")
        case Neg(arg):
            return -eval_complex(arg, z)
        case BinOp(op, left, right):
            lu = eval_complex(left, z)
            ru = eval_complex(right, z)
            if op == "+":
                return lu + ru
            if op == "-":
                return lu - ru
            if op == "*":
                return lu * ru
            if op == "/":
                return lu / ru
            return _cpow(lu, ru)
        case Call(func, arg):
            if func == "abs":
                raise DomainError("abs is not holomorphic")
            return _CFUNCS[func](eval_complex(arg, z))
    raise TypeError(f"not an Expr: {e!r}")


# --- symbolic derivative -----------------------------------------------------------

def simplify(e: Expr) -> Expr:
    """Constant folding and identity elimination (0 + e, 1 * e, e ^ 1, ...);
    keeps derivative trees produced by diff() from blowing up."""
    match e:
        case Num(_) | Var(_):
            return e
        case Neg(arg):
            arg = simplify(arg)
            match arg:
                case Num(v):
                    return Num(-v)
                case Neg(inner):
                    return inner
            return Neg(arg)
        case Call(func, arg):
            return Call(func, simplify(arg))
        case BinOp(op, l, r):
            l, r = simplify(l), simplify(r)
            if isinstance(l, Num) and isinstance(r, Num) and op != "/":
                if op == "+":
                    return Num(l.value + r.value)
                if op == "-":
                    return Num(l.value - r.value)
                if op == "*":
                    return Num(l.value * r.value)
                if op == "^" and (l.value > 0.0 or r.value == int(r.value)):
                    return Num(l.value ** r.value)
            if op == "+":
                if _is_num(l, 0.0):
                    return r
                if _is_num(r, 0.0):
                    return l
            elif op == "-":
                if _is_num(r, 0.0):
                    return l
                if _is_num(l, 0.0):
                    return simplify(Neg(r))
            elif op == "*":
                if _is_num(l, 0.0) or _is_num(r, 0.0):
                    return Num(0.0)
                if _is_num(l, 1.0):
                    return r
                if _is_num(r, 1.0):
                    return l
            elif op == "/":
                if _is_num(l, 0.0):
                    return Num(0.0)
                if _is_num(r, 1.0):
                    return l
            elif op == "^":
                if _is_num(r, 1.0):
                    return l
                if _is_num(r, 0.0):
                    return Num(1.0)
            return BinOp(op, l, r)
    raise TypeError(f"not an Expr: {e!r}")


def _is_num(e: Expr, v: float) -> bool:
    return isinstance(e, Num) and e.value == v


def diff(e: Expr, var: str) -> Expr:
    """Exact symbolic derivative with respect to var (used where a derived
    function such as Y' must itself be evaluable to order-2 jets)."""
    return simplify(_diff(e, var))


def _diff(e: Expr, var: str) -> Expr:
    diff = _diff
    match e:
        case Num(_):
            return Num(0.0)
        case Var(name):
            return Num(1.0) if name == var else Num(0.0)
        case Neg(arg):
            return Neg(diff(arg, var))
        case BinOp("+", l, r):
            return BinOp("+", diff(l, var), diff(r, var))
        case BinOp("-", l, r):
            return BinOp("-", diff(l, var), diff(r, var))
        case BinOp("*", l, r):
            return BinOp("+", BinOp("*", diff(l, var), r), BinOp("*", l, diff(r, var)))
        case BinOp("/", l, r):
            num = BinOp("-", BinOp("*", diff(l, var), r), BinOp("*", l, diff(r, var)))
            return BinOp("/", num, BinOp("^", r, Num(2.0)))
        case BinOp("^", base, Num(k)):
            inner = BinOp("*", Num(k), BinOp("^", base, Num(k - 1.0)))
            return BinOp("*", inner, diff(base, var))
        case BinOp("^", base, expo):
            # u^w = exp(w log u)
            return diff(Call("exp", BinOp("*", expo, Call("log", base))), var)
        case Call(func, arg):
            d = diff(arg, var)
            match func:
                case "sin":
                    outer = Call("cos", arg)
                case "cos":
                    outer = Neg(Call("sin", arg))
                case "exp":
                    outer = Call("exp", arg)
                case "log":
                    outer = BinOp("/", Num(1.0), arg)
                case "sqrt":
                    outer = BinOp("/", Num(0.5), Call("sqrt", arg))
                case "abs":
                    outer = BinOp("/", arg, Call("abs", arg))
                case _:
                    raise ValueError(func)
            return BinOp("*", outer, d)
    raise TypeError(f"not an Expr: {e!r}")
