"""Guard-expression language for dataCondition / given / makes / requires / provides.

Grammar (whitespace insignificant):

    Or        := And ("||" And)*
    And       := Unary ("&&" Unary)*
    Unary     := "!" Unary | "(" Or ")" | Predicate | "true" | "false"
    Predicate := ident "(" [ident ("," ident)*] ")" | ident

Identifiers are [A-Za-z_][A-Za-z0-9_]*; a bare identifier is shorthand for
a zero-argument predicate. Binary operators associate left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ParseError, UnknownPredicate

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

DEFAULT_TRIVIAL_PREFIXES = ("exists", "has", "ispresent", "notnull", "isdefined", "isset")


@dataclass(frozen=True)
class LiteralTrue:
    pass


@dataclass(frozen=True)
class LiteralFalse:
    pass


@dataclass(frozen=True)
class Predicate:
    name: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Not:
    child: "ConditionAst"


@dataclass(frozen=True)
class And:
    left: "ConditionAst"
    right: "ConditionAst"


@dataclass(frozen=True)
class Or:
    left: "ConditionAst"
    right: "ConditionAst"


ConditionAst = Union[LiteralTrue, LiteralFalse, Predicate, Not, And, Or]

TRUE = LiteralTrue()
FALSE = LiteralFalse()

Signature = tuple[str, tuple[str, ...]]


@dataclass(frozen=True)
class PredicateEnv:
    """Truth assignment for predicate signatures.

    In strict mode an unevaluated predicate raises UnknownPredicate; in
    lenient mode it is false.
    """

    assignments: dict[Signature, bool]
    strict: bool = False

    @classmethod
    def from_strings(cls, mapping: dict[str, bool], strict: bool = False) -> "PredicateEnv":
        """Builds an env from printed predicate forms, e.g. {"p(x)": True, "q": False}."""
        assignments: dict[Signature, bool] = {}
        for text, value in mapping.items():
            ast = parse_condition(text)
            if not isinstance(ast, Predicate):
                raise ParseError(f"environment key is not a single predicate: {text!r}")
            assignments[(ast.name, ast.args)] = bool(value)
        return cls(assignments=assignments, strict=strict)

    def lookup(self, predicate: Predicate) -> bool:
        signature = (predicate.name, predicate.args)
        if signature in self.assignments:
            return self.assignments[signature]
        if self.strict:
            raise UnknownPredicate(f"no assignment for predicate {print_condition(predicate)!r}")
        return False


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<or>\|\|)|(?P<and>&&)"
    r"|(?P<not>!)|(?P<lparen>\()|(?P<rparen>\))|(?P<comma>,))"
)


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.lastgroup is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(
                f"illegal character {stripped[0]!r} at position {at}",
                column=at + 1,
                token=stripped[0],
            )
        yield match.lastgroup, match.group(match.lastgroup), match.start(match.lastgroup)
        pos = match.end()
    yield "eof", "", len(text)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.index = 0

    @property
    def current(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str) -> tuple[str, str, int]:
        token_kind, value, pos = self.current
        if token_kind != kind:
            shown = value if value else "<end of input>"
            raise ParseError(
                f"expected {kind}, found {shown!r} at position {pos}",
                column=pos + 1,
                token=shown,
            )
        return self.advance()

    def parse(self) -> ConditionAst:
        ast = self.parse_or()
        kind, value, pos = self.current
        if kind != "eof":
            raise ParseError(
                f"unexpected {value!r} at position {pos}", column=pos + 1, token=value
            )
        return ast

    def parse_or(self) -> ConditionAst:
        node = self.parse_and()
        while self.current[0] == "or":
            self.advance()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> ConditionAst:
        node = self.parse_unary()
        while self.current[0] == "and":
            self.advance()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self) -> ConditionAst:
        kind, value, pos = self.current
        if kind == "not":
            self.advance()
            return Not(self.parse_unary())
        if kind == "lparen":
            self.advance()
            node = self.parse_or()
            self.expect("rparen")
            return node
        if kind == "ident":
            self.advance()
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            if self.current[0] == "lparen":
                self.advance()
                args: list[str] = []
                if self.current[0] != "rparen":
                    args.append(self.expect("ident")[1])
                    while self.current[0] == "comma":
                        self.advance()
                        args.append(self.expect("ident")[1])
                self.expect("rparen")
                return Predicate(value, tuple(args))
            return Predicate(value)
        shown = value if value else "<end of input>"
        raise ParseError(
            f"expected a predicate, literal, '!' or '(', found {shown!r} at position {pos}",
            column=pos + 1,
            token=shown,
        )


def parse_condition(text: str) -> ConditionAst:
    """Parses guard text into an AST; raises ParseError with position."""
    return _Parser(text).parse()


# --- printing ----------------------------------------------------------------

_PRECEDENCE = {Or: 1, And: 2, Not: 3}
_ATOM_PRECEDENCE = 4


def _precedence(ast: ConditionAst) -> int:
    return _PRECEDENCE.get(type(ast), _ATOM_PRECEDENCE)


def print_condition(ast: ConditionAst) -> str:
    """Canonical minimal-parenthesization text; parse(print(a)) == a.

    Zero-argument predicates print bare. A right operand at the same
    precedence keeps its parentheses so the left-associative parser
    rebuilds the identical tree.
    """
    if isinstance(ast, LiteralTrue):
        return "true"
    if isinstance(ast, LiteralFalse):
        return "false"
    if isinstance(ast, Predicate):
        if not ast.args:
            return ast.name
        return f"{ast.name}({', '.join(ast.args)})"
    if isinstance(ast, Not):
        child = print_condition(ast.child)
        if _precedence(ast.child) < _PRECEDENCE[Not]:
            child = f"({child})"
        return f"!{child}"
    op = " && " if isinstance(ast, And) else " || "
    own = _precedence(ast)
    left = print_condition(ast.left)
    if _precedence(ast.left) < own:
        left = f"({left})"
    right = print_condition(ast.right)
    if _precedence(ast.right) <= own:
        right = f"({right})"
    return f"{left}{op}{right}"


def print_signature(signature: Signature) -> str:
    return print_condition(Predicate(signature[0], signature[1]))


# --- evaluation --------------------------------------------------------------


def evaluate(ast: ConditionAst, env: PredicateEnv) -> bool:
    """Standard boolean semantics, short-circuiting left to right."""
    if isinstance(ast, LiteralTrue):
        return True
    if isinstance(ast, LiteralFalse):
        return False
    if isinstance(ast, Predicate):
        return env.lookup(ast)
    if isinstance(ast, Not):
        return not evaluate(ast.child, env)
    if isinstance(ast, And):
        return evaluate(ast.left, env) and evaluate(ast.right, env)
    if isinstance(ast, Or):
        return evaluate(ast.left, env) or evaluate(ast.right, env)
    raise TypeError(f"not a condition AST node: {ast!r}")


def collect_predicates(ast: ConditionAst) -> set[Signature]:
    """All predicate signatures mentioned in an AST."""
    found: set[Signature] = set()

    def walk(node: ConditionAst) -> None:
        if isinstance(node, Predicate):
            found.add((node.name, node.args))
        elif isinstance(node, Not):
            walk(node.child)
        elif isinstance(node, (And, Or)):
            walk(node.left)
            walk(node.right)

    walk(ast)
    return found


def is_trivial(
    ast: ConditionAst, trivial_prefixes: tuple[str, ...] = DEFAULT_TRIVIAL_PREFIXES
) -> bool:
    """True for literals and bare existence-style checks.

    A condition is trivial iff it is a boolean literal, or a single
    predicate (no operators) whose lowercased name starts with one of the
    configured existence prefixes.
    """
    if isinstance(ast, (LiteralTrue, LiteralFalse)):
        return True
    if isinstance(ast, Predicate):
        lowered = ast.name.lower()
        return any(lowered.startswith(prefix) for prefix in trivial_prefixes)
    return False
