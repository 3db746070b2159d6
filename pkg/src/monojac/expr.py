"""Small arithmetic-expression grammar for weights and initial data.

Expressions use ``+ - * / ^``, numeric literals, parentheses, the phase-space
variables ``x1..x3`` and ``v1..v3``, the constant ``pi`` and the functions
``sin cos exp sqrt tanh``. Parsing goes through :mod:`ast` with a whitelist,
so nothing outside the grammar is ever evaluated.
"""

from __future__ import annotations

import ast
from fractions import Fraction

import numpy as np

from .polyalg import Polynomial

VARIABLES = ("x1", "x2", "x3", "v1", "v2", "v3")
FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
}
CONSTANTS = {"pi": np.pi}


class ExpressionError(ValueError):
    pass


def parse(text: str, allowed: frozenset[str] | None = None) -> ast.Expression:
    if not isinstance(text, str):
        raise ExpressionError(f"expression must be a string, got {type(text).__name__}")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    _validate(tree.body, text, frozenset(VARIABLES) if allowed is None else allowed)
    return tree


def _validate(node: ast.AST, text: str, allowed: frozenset[str]) -> None:
    if isinstance(node, ast.BinOp):
        if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed in {text!r}")
        _validate(node.left, text, allowed)
        _validate(node.right, text, allowed)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.UAdd, ast.USub)):
            raise ExpressionError(f"unary {type(node.op).__name__} not allowed in {text!r}")
        _validate(node.operand, text, allowed)
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"literal {node.value!r} not allowed in {text!r}")
    elif isinstance(node, ast.Name):
        if node.id not in allowed and node.id not in CONSTANTS:
            raise ExpressionError(f"unknown name {node.id!r} in {text!r}")
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError(f"unknown function in {text!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"functions take exactly one argument in {text!r}")
        _validate(node.args[0], text, allowed)
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__} in {text!r}")


def names(text: str) -> set[str]:
    tree = parse(text)
    return {n.id for n in ast.walk(tree) if isinstance(n, ast.Name) and n.id in VARIABLES}


def evaluate(text: str, env: dict[str, object]):
    """Evaluate with numpy broadcasting; ``env`` maps variable names to arrays."""
    tree = parse(text)

    def ev(node):
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            return a**b
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in CONSTANTS:
                return CONSTANTS[node.id]
            try:
                return env[node.id]
            except KeyError:
                raise ExpressionError(f"variable {node.id!r} has no value here") from None
        return FUNCTIONS[node.func.id](ev(node.args[0]))

    return ev(tree.body)


def to_polynomial(text: str, variables: tuple[str, ...], rename: dict[str, str] | None = None) -> Polynomial:
    """Exact conversion for polynomial expressions (no functions, no ``pi``).

    Division is allowed only by constants and powers must be non-negative
    integer literals. Names may be grammar variables or any of ``variables``;
    ``rename`` maps grammar names (``x1``) onto polynomial variable names.
    """
    tree = parse(text, frozenset(VARIABLES) | frozenset(variables))
    rename = rename or {}

    def ev(node) -> Polynomial:
        if isinstance(node, ast.BinOp):
            a = ev(node.left)
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                    raise ExpressionError(f"exponent must be an integer literal in {text!r}")
                return a ** node.right.value
            b = ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if not b.is_constant():
                raise ExpressionError(f"division by a non-constant in {text!r}")
            return a / b.constant_term()
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Constant):
            value = node.value
            c = Fraction(value) if isinstance(value, int) else Fraction(repr(value))
            return Polynomial.constant(c, variables)
        if isinstance(node, ast.Name):
            if node.id in CONSTANTS:
                raise ExpressionError(f"{node.id!r} is not rational; not allowed in exact expressions")
            return Polynomial.variable(rename.get(node.id, node.id), variables)
        raise ExpressionError(f"functions are not polynomial: {text!r}")

    return ev(tree.body)
