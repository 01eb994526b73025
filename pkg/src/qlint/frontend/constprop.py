"""Flow-sensitive integer constant propagation.

Values are either exactly known integers or Unknown; any operation with an
Unknown operand stays Unknown, so a Known answer is always trustworthy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import (
    Assign,
    Attribute,
    BinOp,
    Call,
    Expr,
    ExprStmt,
    ForRange,
    FunctionDef,
    If,
    IntLit,
    ListExpr,
    ModuleAst,
    Name,
    Opaque,
    Return,
    Stmt,
    Subscript,
    TupleExpr,
    UnaryOp,
    expr_names,
)

MODULE_SCOPE = "<module>"


@dataclass(frozen=True)
class ConstValue:
    """A statically resolved integer, or Unknown when value is None."""

    value: int | None

    @property
    def is_known(self) -> bool:
        return self.value is not None

    def __repr__(self) -> str:
        return f"Known({self.value})" if self.is_known else "Unknown"


UNKNOWN = ConstValue(None)


def known(value: int) -> ConstValue:
    return ConstValue(value)


_Env = dict[str, ConstValue]


def eval_expr(expr: Expr, env: _Env, record: "ConstEnv | None" = None) -> ConstValue:
    """Evaluate an expression to a ConstValue under the given variable bindings."""
    result = _eval(expr, env, record)
    if record is not None:
        record._values[expr.uid] = result
    return result


def _eval(expr: Expr, env: _Env, record: "ConstEnv | None") -> ConstValue:
    if isinstance(expr, IntLit):
        return known(expr.value)
    if isinstance(expr, Name):
        return env.get(expr.ident, UNKNOWN)
    if isinstance(expr, BinOp):
        left = eval_expr(expr.left, env, record)
        right = eval_expr(expr.right, env, record)
        if not (left.is_known and right.is_known):
            return UNKNOWN
        assert left.value is not None and right.value is not None
        if expr.op == "+":
            return known(left.value + right.value)
        if expr.op == "-":
            return known(left.value - right.value)
        if expr.op == "*":
            return known(left.value * right.value)
        if expr.op == "//":
            if right.value == 0:
                return UNKNOWN
            return known(left.value // right.value)
        return UNKNOWN
    if isinstance(expr, UnaryOp):
        operand = eval_expr(expr.operand, env, record)
        if expr.op == "-" and operand.is_known:
            assert operand.value is not None
            return known(-operand.value)
        return UNKNOWN
    if isinstance(expr, Call):
        # Visit arguments so their resolutions are recorded too.
        for a in expr.args:
            eval_expr(a, env, record)
        for k in expr.keywords:
            eval_expr(k.value, env, record)
        eval_expr(expr.func, env, record)
        return UNKNOWN
    if isinstance(expr, Subscript):
        eval_expr(expr.value, env, record)
        eval_expr(expr.index, env, record)
        return UNKNOWN
    if isinstance(expr, Attribute):
        eval_expr(expr.value, env, record)
        return UNKNOWN
    if isinstance(expr, (ListExpr, TupleExpr)):
        for e in expr.elements:
            eval_expr(e, env, record)
        return UNKNOWN
    # Everything else (strings, floats, bools, opaque expressions) is not an int.
    return UNKNOWN


def range_values(args: list[Expr], env: _Env, limit: int) -> list[int] | None:
    """Concrete iteration values of range(*args), or None when not resolvable.

    Loops longer than `limit` iterations return None as well, so callers never
    materialize huge ranges.
    """
    vals = [eval_expr(a, env) for a in args]
    if not all(v.is_known for v in vals):
        return None
    ints = [v.value for v in vals if v.value is not None]
    try:
        rng = range(*ints)
    except (TypeError, ValueError):
        return None
    if len(rng) > limit:
        return None
    return list(rng)


def tuple_assign_pairs(stmt: Assign) -> list[tuple[str, Expr]] | None:
    """(name, value expr) pairs of `a, b = x, y`, or None for other shapes."""
    if len(stmt.targets) != 1:
        return None
    target = stmt.targets[0]
    value = stmt.value
    if not isinstance(target, (ListExpr, TupleExpr)):
        return None
    if not isinstance(value, (ListExpr, TupleExpr)):
        return None
    if len(target.elements) != len(value.elements):
        return None
    if not all(isinstance(e, Name) for e in target.elements):
        return None
    return [
        (t.ident, v)
        for t, v in zip(target.elements, value.elements)
        if isinstance(t, Name)
    ]


def collect_assigned_names(stmts: list[Stmt]) -> set[str]:
    """Names possibly (re)bound anywhere in a statement list, same scope only."""
    out: set[str] = set()
    for stmt in stmts:
        if isinstance(stmt, Assign):
            for target in stmt.targets:
                if isinstance(target, Name):
                    out.add(target.ident)
                elif isinstance(target, TupleExpr):
                    out.update(expr_names(target))
        elif isinstance(stmt, ForRange):
            out.add(stmt.var)
            out.update(collect_assigned_names(stmt.body))
        elif isinstance(stmt, If):
            out.update(collect_assigned_names(stmt.body))
            out.update(collect_assigned_names(stmt.orelse))
        elif isinstance(stmt, Opaque):
            out.update(stmt.names)
    return out


def join_envs(a: _Env, b: _Env) -> _Env:
    """Join of two branch environments: keep a binding only if both agree."""
    out: _Env = {}
    for name, val in a.items():
        if b.get(name, UNKNOWN) == val:
            out[name] = val
        else:
            out[name] = UNKNOWN
    for name in b:
        if name not in a:
            out[name] = UNKNOWN
    return out


class ConstEnv:
    """Resolved integer values per expression node plus per-statement snapshots."""

    def __init__(self) -> None:
        self._values: dict[int, ConstValue] = {}
        self._snapshots: dict[tuple[str, int], _Env] = {}

    def resolve(self, expr: Expr) -> ConstValue:
        """ConstValue of an expression occurrence in the analyzed tree."""
        got = self._values.get(expr.uid)
        if got is not None:
            return got
        # Context-free fallback for nodes outside any visited statement.
        if isinstance(expr, IntLit):
            return known(expr.value)
        if (
            isinstance(expr, UnaryOp)
            and expr.op == "-"
            and isinstance(expr.operand, IntLit)
        ):
            return known(-expr.operand.value)
        return UNKNOWN

    def lookup(self, scope: str, name: str, stmt_uid: int) -> ConstValue:
        """Value of a variable just before the given statement executes."""
        return self._snapshots.get((scope, stmt_uid), {}).get(name, UNKNOWN)


def propagate_constants(tree: ModuleAst) -> ConstEnv:
    """Compute Known/Unknown integer facts for every expression in the tree."""
    record = ConstEnv()
    _walk(tree.statements, MODULE_SCOPE, {}, record)
    return record


def _walk(stmts: list[Stmt], scope: str, env: _Env, record: ConstEnv) -> _Env:
    for stmt in stmts:
        record._snapshots[(scope, stmt.uid)] = dict(env)
        if isinstance(stmt, Assign):
            pairs = tuple_assign_pairs(stmt)
            if pairs is not None:
                values = [eval_expr(v, env, record) for _, v in pairs]
                for (name, _), value in zip(pairs, values):
                    env[name] = value
                continue
            value = eval_expr(stmt.value, env, record)
            for target in stmt.targets:
                if isinstance(target, Name):
                    env[target.ident] = value
                elif isinstance(target, TupleExpr):
                    for name in expr_names(target):
                        env[name] = UNKNOWN
        elif isinstance(stmt, ExprStmt):
            eval_expr(stmt.value, env, record)
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                eval_expr(stmt.value, env, record)
        elif isinstance(stmt, If):
            eval_expr(stmt.test, env, record)
            env_then = _walk(stmt.body, scope, dict(env), record)
            env_else = _walk(stmt.orelse, scope, dict(env), record)
            env = join_envs(env_then, env_else)
        elif isinstance(stmt, ForRange):
            for arg in stmt.range_args:
                eval_expr(arg, env, record)
            killed = collect_assigned_names(stmt.body) | {stmt.var}
            env_body = dict(env)
            for name in killed:
                env_body[name] = UNKNOWN
            _walk(stmt.body, scope, env_body, record)
            for name in killed:
                env[name] = UNKNOWN
        elif isinstance(stmt, FunctionDef):
            inner_scope = f"{scope}.{stmt.name}#{stmt.uid}"
            inner_env: _Env = {p: UNKNOWN for p in stmt.params}
            _walk(stmt.body, inner_scope, inner_env, record)
        elif isinstance(stmt, Opaque):
            for name in stmt.names:
                if name in env:
                    env[name] = UNKNOWN
    return env
