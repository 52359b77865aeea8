"""Expression language for shutter conditions C(S_t, |Delta_t|).

Conditions are written over the variables ``st`` (transmitted photon
total) and ``adt`` (absolute transmitted population difference), plus
named real parameters bound at evaluation time, e.g.::

    adt >= 120
    adt > (a*st)^2
    adt > st + sqrt(b^2 - st^2) - b

Grammar (loosest to tightest binding)::

    or      :=  and ("or" and)*
    and     :=  not ("and" not)*
    not     :=  "not" not | cmp
    cmp     :=  sum (( ">" | ">=" | "<" | "<=" | "=" ) sum)?
    sum     :=  term (("+" | "-") term)*
    term    :=  unary (("*" | "/") unary)*
    unary   :=  "-" unary | power
    power   :=  atom ("^" unary)?            # right-associative
    atom    :=  NUMBER | NAME | NAME "(" args ")" | "(" or ")"

Functions: floor, sqrt, sin, abs (one argument), min, max (two or more).
Only |Delta_t| is exposed, so every condition is symmetric in the sign
of Delta_t by construction.  Numeric domain faults (square root of a
negative, division by zero) raise ``ConditionDomainError`` rather than
evaluating to false; callers may opt into clamping via ``domain_errors``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Union

VARIABLES = ("st", "adt")
KEYWORDS = ("and", "or", "not")
FUNCTION_ARITY = {"floor": (1, 1), "sqrt": (1, 1), "sin": (1, 1), "abs": (1, 1),
                  "min": (2, None), "max": (2, None)}


class ConditionError(Exception):
    pass


class ConditionSyntaxError(ConditionError):
    """Parse failure with a 1-based column and the token classes expected there."""

    def __init__(self, message: str, column: int, expected: tuple[str, ...] = ()):
        self.column = column
        self.expected = expected
        detail = f"syntax error at column {column}: {message}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)


class ConditionEvalError(ConditionError):
    pass


class ConditionDomainError(ConditionEvalError):
    pass


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Unary:
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Logical:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


Expr = Union[Number, Name, Unary, Binary, Call, Compare, Logical, Not]

_BOOLEAN_NODES = (Compare, Logical, Not)


@dataclass(frozen=True)
class FilterCondition:
    """A parsed, statically type-checked condition over (st, adt)."""

    root: Expr

    def free_parameters(self) -> set[str]:
        found: set[str] = set()
        _collect_names(self.root, found)
        return found - set(VARIABLES)

    def __str__(self) -> str:
        return to_source(self)


def _collect_names(node: Expr, out: set[str]) -> None:
    if isinstance(node, Name):
        out.add(node.ident)
    elif isinstance(node, Unary):
        _collect_names(node.operand, out)
    elif isinstance(node, Not):
        _collect_names(node.operand, out)
    elif isinstance(node, (Binary, Compare, Logical)):
        _collect_names(node.left, out)
        _collect_names(node.right, out)
    elif isinstance(node, Call):
        for arg in node.args:
            _collect_names(arg, out)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>>=|<=|[><=+\-*/^(),]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    pos: int   # 0-based offset into the source


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            at = len(source) - len(stripped)
            raise ConditionSyntaxError(f"unrecognized character {stripped[0]!r}", at + 1)
        for kind in ("num", "name", "op"):
            text = match.group(kind)
            if text is not None:
                tokens.append(_Token(kind, text, match.start(kind)))
                break
        pos = match.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def at_op(self, *texts: str) -> bool:
        return self.current.kind == "op" and self.current.text in texts

    def at_keyword(self, word: str) -> bool:
        return self.current.kind == "name" and self.current.text == word

    def fail(self, message: str, expected: tuple[str, ...] = ()) -> ConditionSyntaxError:
        return ConditionSyntaxError(message, self.current.pos + 1, expected)

    def parse_condition(self) -> Expr:
        node = self.parse_or()
        if self.current.kind != "end":
            raise self.fail(f"unexpected {self.current.text!r} after the expression")
        if not isinstance(node, _BOOLEAN_NODES):
            raise ConditionSyntaxError(
                "condition must be a comparison or a boolean combination", 1
            )
        return node

    def parse_or(self) -> Expr:
        node = self.parse_and()
        while self.at_keyword("or"):
            self.advance()
            right = self.parse_and()
            self._need_boolean(node, "'or'")
            self._need_boolean(right, "'or'")
            node = Logical("or", node, right)
        return node

    def parse_and(self) -> Expr:
        node = self.parse_not()
        while self.at_keyword("and"):
            self.advance()
            right = self.parse_not()
            self._need_boolean(node, "'and'")
            self._need_boolean(right, "'and'")
            node = Logical("and", node, right)
        return node

    def parse_not(self) -> Expr:
        if self.at_keyword("not"):
            self.advance()
            operand = self.parse_not()
            self._need_boolean(operand, "'not'")
            return Not(operand)
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_sum()
        if self.at_op(">", ">=", "<", "<=", "="):
            op = self.advance().text
            right = self.parse_sum()
            self._need_numeric(left, f"{op!r}")
            self._need_numeric(right, f"{op!r}")
            node = Compare(op, left, right)
            if self.at_op(">", ">=", "<", "<=", "="):
                raise self.fail("comparisons cannot be chained")
            return node
        return left

    def parse_sum(self) -> Expr:
        node = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance().text
            right = self.parse_term()
            self._need_numeric(node, f"{op!r}")
            self._need_numeric(right, f"{op!r}")
            node = Binary(op, node, right)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            right = self.parse_unary()
            self._need_numeric(node, f"{op!r}")
            self._need_numeric(right, f"{op!r}")
            node = Binary(op, node, right)
        return node

    def parse_unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            operand = self.parse_unary()
            self._need_numeric(operand, "unary '-'")
            return Unary(operand)
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.at_op("^"):
            self.advance()
            exponent = self.parse_unary()
            self._need_numeric(base, "'^'")
            self._need_numeric(exponent, "'^'")
            return Binary("^", base, exponent)
        return base

    def parse_atom(self) -> Expr:
        token = self.current
        if token.kind == "num":
            self.advance()
            return Number(float(token.text))
        if token.kind == "name" and token.text not in KEYWORDS:
            self.advance()
            if self.at_op("("):
                return self.parse_call(token)
            return Name(token.text)
        if self.at_op("("):
            self.advance()
            node = self.parse_or()
            if not self.at_op(")"):
                raise self.fail("unclosed parenthesis", ("')'",))
            self.advance()
            return node
        raise self.fail(
            f"expected a value, got {token.text!r}" if token.kind != "end"
            else "expression ends too early",
            ("a number", "a name", "'('"),
        )

    def parse_call(self, name_token: _Token) -> Expr:
        func = name_token.text
        if func not in FUNCTION_ARITY:
            raise ConditionSyntaxError(
                f"unknown function {func!r}", name_token.pos + 1
            )
        self.advance()  # consume "("
        args = [self.parse_sum()]
        while self.at_op(","):
            self.advance()
            args.append(self.parse_sum())
        if not self.at_op(")"):
            raise self.fail("unclosed argument list", ("','", "')'"))
        self.advance()
        lo, hi = FUNCTION_ARITY[func]
        if len(args) < lo or (hi is not None and len(args) > hi):
            wants = f"exactly {lo}" if hi == lo else f"at least {lo}"
            raise ConditionSyntaxError(
                f"{func} takes {wants} argument(s), got {len(args)}",
                name_token.pos + 1,
            )
        for arg in args:
            self._need_numeric(arg, f"{func}()")
        return Call(func, tuple(args))

    def _need_numeric(self, node: Expr, where: str) -> None:
        if isinstance(node, _BOOLEAN_NODES):
            raise self.fail(f"{where} needs numeric operands, got a boolean expression")

    def _need_boolean(self, node: Expr, where: str) -> None:
        if not isinstance(node, _BOOLEAN_NODES):
            raise self.fail(f"{where} needs boolean operands, got a numeric expression")


def parse(source: str) -> FilterCondition:
    """Parse condition text; failures carry a 1-based column and expectations."""
    return FilterCondition(_Parser(_tokenize(source)).parse_condition())


def _eval_numeric(node: Expr, env: Mapping[str, float]) -> float:
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Name):
        try:
            return env[node.ident]
        except KeyError:
            raise ConditionEvalError(f"unbound parameter {node.ident!r}") from None
    if isinstance(node, Unary):
        return -_eval_numeric(node.operand, env)
    if isinstance(node, Binary):
        left = _eval_numeric(node.left, env)
        right = _eval_numeric(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            if right == 0.0:
                raise ConditionDomainError("division by zero")
            return left / right
        # "^": surface complex results and 0^negative as domain faults
        try:
            value = math.pow(left, right)
        except (ValueError, OverflowError) as exc:
            raise ConditionDomainError(f"invalid power: {exc}") from None
        return value
    if isinstance(node, Call):
        args = [_eval_numeric(a, env) for a in node.args]
        if node.func == "floor":
            return float(math.floor(args[0]))
        if node.func == "sqrt":
            if args[0] < 0.0:
                raise ConditionDomainError(f"sqrt of negative value {args[0]!r}")
            return math.sqrt(args[0])
        if node.func == "sin":
            return math.sin(args[0])
        if node.func == "abs":
            return abs(args[0])
        if node.func == "min":
            return min(args)
        return max(args)
    raise ConditionEvalError("boolean expression where a number was expected")


def _eval_boolean(node: Expr, env: Mapping[str, float]) -> bool:
    if isinstance(node, Compare):
        left = _eval_numeric(node.left, env)
        right = _eval_numeric(node.right, env)
        if node.op == ">":
            return left > right
        if node.op == ">=":
            return left >= right
        if node.op == "<":
            return left < right
        if node.op == "<=":
            return left <= right
        return left == right
    if isinstance(node, Logical):
        # both sides evaluate unconditionally so domain faults never hide
        left = _eval_boolean(node.left, env)
        right = _eval_boolean(node.right, env)
        return (left and right) if node.op == "and" else (left or right)
    if isinstance(node, Not):
        return not _eval_boolean(node.operand, env)
    raise ConditionEvalError("numeric expression where a boolean was expected")


def evaluate(
    cond: FilterCondition,
    s_t: int,
    delta_t: int,
    params: Optional[Mapping[str, float]] = None,
    domain_errors: str = "raise",
) -> bool:
    """Evaluate a condition at one transmitted point.

    ``delta_t`` may be signed; only its absolute value enters. With
    ``domain_errors="false"`` numeric domain faults count as an unmet
    condition instead of raising (opt-in clamp mode).
    """
    env: dict[str, float] = dict(params or {})
    env["st"] = float(s_t)
    env["adt"] = float(abs(delta_t))
    try:
        return _eval_boolean(cond.root, env)
    except ConditionDomainError:
        if domain_errors == "false":
            return False
        raise


_PRECEDENCE = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5,
               "*": 6, "/": 6, "neg": 7, "^": 8, "atom": 9}


def _prec(node: Expr) -> int:
    if isinstance(node, Logical):
        return _PRECEDENCE[node.op]
    if isinstance(node, Not):
        return _PRECEDENCE["not"]
    if isinstance(node, Compare):
        return _PRECEDENCE["cmp"]
    if isinstance(node, Binary):
        return _PRECEDENCE[node.op]
    if isinstance(node, Unary):
        return _PRECEDENCE["neg"]
    return _PRECEDENCE["atom"]


def _render(node: Expr, min_prec: int) -> str:
    prec = _prec(node)
    if isinstance(node, Number):
        text = repr(node.value)
        if text.endswith(".0"):
            text = text[:-2]
        body = text
    elif isinstance(node, Name):
        body = node.ident
    elif isinstance(node, Unary):
        body = "-" + _render(node.operand, prec)
    elif isinstance(node, Binary):
        if node.op == "^":  # right-associative
            body = _render(node.left, prec + 1) + " ^ " + _render(node.right, prec)
        else:
            body = _render(node.left, prec) + f" {node.op} " + _render(node.right, prec + 1)
    elif isinstance(node, Call):
        body = node.func + "(" + ", ".join(_render(a, 0) for a in node.args) + ")"
    elif isinstance(node, Compare):
        body = _render(node.left, prec + 1) + f" {node.op} " + _render(node.right, prec + 1)
    elif isinstance(node, Not):
        body = "not " + _render(node.operand, prec)
    else:  # Logical
        body = _render(node.left, prec) + f" {node.op} " + _render(node.right, prec + 1)
    if prec < min_prec:
        return "(" + body + ")"
    return body


def to_source(cond: FilterCondition) -> str:
    """Render back to text; parse(to_source(c)) is structurally equal to c."""
    return _render(cond.root, 0)


ALWAYS_OPEN: Optional[FilterCondition] = None
