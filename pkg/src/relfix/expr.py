"""Whitelisted arithmetic expressions for instance files.

Maps, relation predicates, kernels and source terms in continuous-mode
instance files are written as small Python expressions (``"x**2"``,
``"0 if x <= 1 else 1"``).  They are parsed with :mod:`ast` and only a fixed
set of node types and functions is accepted, so loading a file never runs
arbitrary code.
"""
import ast
import math

import numpy as np

_FUNCTIONS = {
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "abs": np.abs,
    "floor": np.floor,
    "min": min,
    "max": max,
}
_CONSTANTS = {"pi": math.pi, "e": math.e}

_ALLOWED = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.BoolOp, ast.Compare,
    ast.IfExp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod, ast.FloorDiv,
    ast.USub, ast.UAdd, ast.Not, ast.And, ast.Or,
    ast.Eq, ast.NotEq, ast.Lt, ast.LtE, ast.Gt, ast.GtE,
)


class ExpressionError(ValueError):
    pass


class Expression:
    """A compiled expression over a fixed tuple of variable names."""

    def __init__(self, source, variables=("x",)):
        self.source = str(source)
        self.variables = tuple(variables)
        try:
            tree = ast.parse(self.source, mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse expression {self.source!r}: {exc.msg}") from None
        for node in ast.walk(tree):
            if not isinstance(node, _ALLOWED):
                raise ExpressionError(
                    f"{type(node).__name__} not allowed in expression {self.source!r}")
            if isinstance(node, ast.Name):
                if node.id not in self.variables and node.id not in _FUNCTIONS \
                        and node.id not in _CONSTANTS:
                    raise ExpressionError(f"unknown name {node.id!r} in {self.source!r}")
            if isinstance(node, ast.Call):
                if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                    raise ExpressionError(f"only {sorted(_FUNCTIONS)} may be called")
                if node.keywords:
                    raise ExpressionError("keyword arguments not allowed")
            if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
                raise ExpressionError(f"only numeric constants allowed in {self.source!r}")
        self._code = compile(tree, "<expr>", "eval")

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments, got {len(args)}")
        scope = dict(_FUNCTIONS)
        scope.update(_CONSTANTS)
        scope.update(zip(self.variables, args))
        return eval(self._code, {"__builtins__": {}}, scope)

    def __repr__(self):
        return f"Expression({self.source!r}, variables={self.variables})"
