"""Bounded unrolling of `for ... in range(...)` loops.

A loop is expanded only when its trip count is statically known and small;
every other loop is kept intact and flagged, so downstream stages treat its
body conservatively.
"""

from __future__ import annotations

from dataclasses import replace

from .constprop import (
    ConstValue,
    UNKNOWN,
    tuple_assign_pairs,
    collect_assigned_names,
    eval_expr,
    join_envs,
    range_values,
)
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
    Keyword,
    ListExpr,
    ModuleAst,
    Name,
    NoOp,
    Opaque,
    Return,
    Stmt,
    Subscript,
    TupleExpr,
    UnaryOp,
)

DEFAULT_MAX_UNROLL = 10


def unroll_loops(tree: ModuleAst, max_iterations: int = DEFAULT_MAX_UNROLL) -> ModuleAst:
    """Return a new tree with small constant-bound loops expanded.

    Loops that cannot be expanded (unknown or too-large trip count, or a
    break/continue in the body) are preserved and listed in the result's
    `non_unrollable` field.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    unroller = _Unroller(max_iterations)
    statements = unroller.walk(tree.statements, {})
    out = ModuleAst(tree.file, statements, tree.span)
    out.non_unrollable = unroller.non_unrollable
    return out


class _Unroller:
    def __init__(self, max_iterations: int) -> None:
        self.max_iterations = max_iterations
        self.non_unrollable: list[int] = []
        self._uid = 0

    def _next_uid(self) -> int:
        self._uid += 1
        return self._uid

    def walk(self, stmts: list[Stmt], env: dict[str, ConstValue]) -> list[Stmt]:
        out: list[Stmt] = []
        for stmt in stmts:
            if isinstance(stmt, ForRange):
                out.extend(self._for_range(stmt, env))
            elif isinstance(stmt, If):
                test = self._copy_expr(stmt.test, None, 0)
                env_then = dict(env)
                env_else = dict(env)
                body = self.walk(stmt.body, env_then)
                orelse = self.walk(stmt.orelse, env_else)
                node = If(test, body, orelse, span=stmt.span)
                node.uid = self._next_uid()
                out.append(node)
                env.clear()
                env.update(join_envs(env_then, env_else))
            elif isinstance(stmt, FunctionDef):
                inner_env = {p: UNKNOWN for p in stmt.params}
                body = self.walk(stmt.body, inner_env)
                node = FunctionDef(stmt.name, list(stmt.params), body, span=stmt.span)
                node.uid = self._next_uid()
                out.append(node)
            else:
                node = self._copy_simple(stmt)
                out.append(node)
                self._apply_env(node, env)
        return out

    def _for_range(self, stmt: ForRange, env: dict[str, ConstValue]) -> list[Stmt]:
        values = range_values(stmt.range_args, env, self.max_iterations)
        if values is None or _has_loop_escape(stmt.body):
            killed = collect_assigned_names(stmt.body) | {stmt.var}
            env_body = dict(env)
            for name in killed:
                env_body[name] = UNKNOWN
            body = self.walk(stmt.body, env_body)
            args = [self._copy_expr(a, None, 0) for a in stmt.range_args]
            node = ForRange(stmt.var, args, body, span=stmt.span)
            node.uid = self._next_uid()
            self.non_unrollable.append(node.uid)
            for name in killed:
                env[name] = UNKNOWN
            return [node]

        out: list[Stmt] = []
        substituted_everywhere = True
        for value in values:
            body_copy, active = self._copy_stmts(stmt.body, stmt.var, value)
            substituted_everywhere = substituted_everywhere and active
            out.extend(self.walk(body_copy, env))
        if values:
            # After full substitution the loop variable keeps its final value.
            if substituted_everywhere and stmt.var not in collect_assigned_names(stmt.body):
                env[stmt.var] = ConstValue(values[-1])
        return out

    def _apply_env(self, stmt: Stmt, env: dict[str, ConstValue]) -> None:
        if isinstance(stmt, Assign):
            pairs = tuple_assign_pairs(stmt)
            if pairs is not None:
                values = [eval_expr(v, env) for _, v in pairs]
                for (name, _), value in zip(pairs, values):
                    env[name] = value
                return
            value = eval_expr(stmt.value, env)
            for target in stmt.targets:
                if isinstance(target, Name):
                    env[target.ident] = value
                elif isinstance(target, TupleExpr):
                    for name in collect_assigned_names([stmt]):
                        env[name] = UNKNOWN
        elif isinstance(stmt, Opaque):
            for name in stmt.names:
                if name in env:
                    env[name] = UNKNOWN

    # --- node copying with optional loop-variable substitution ---

    def _copy_stmts(
        self, stmts: list[Stmt], var: str | None, value: int
    ) -> tuple[list[Stmt], bool]:
        """Deep-copy statements substituting `var` while the binding is intact.

        Substitution stops once the body rebinds the variable; later uses are
        left symbolic so ordinary constant propagation picks them up.
        """
        out: list[Stmt] = []
        active = var is not None
        for stmt in stmts:
            copied, active = self._copy_stmt(stmt, var if active else None, value)
            out.append(copied)
        return out, active

    def _copy_stmt(self, stmt: Stmt, var: str | None, value: int) -> tuple[Stmt, bool]:
        active = var is not None
        span = stmt.span
        node: Stmt
        if isinstance(stmt, Assign):
            copied_value = self._copy_expr(stmt.value, var, value)
            targets = [self._copy_expr(t, None, 0) for t in stmt.targets]
            node = Assign(targets, copied_value, span=span)
            rebinds = any(isinstance(t, Name) and t.ident == var for t in stmt.targets)
            active = active and not rebinds
        elif isinstance(stmt, ExprStmt):
            node = ExprStmt(self._copy_expr(stmt.value, var, value), span=span)
        elif isinstance(stmt, Return):
            v = self._copy_expr(stmt.value, var, value) if stmt.value else None
            node = Return(v, span=span)
        elif isinstance(stmt, If):
            test = self._copy_expr(stmt.test, var, value)
            body, a1 = self._copy_stmts(stmt.body, var, value)
            orelse, a2 = self._copy_stmts(stmt.orelse, var, value)
            node = If(test, body, orelse, span=span)
            active = active and a1 and a2
        elif isinstance(stmt, ForRange):
            args = [self._copy_expr(a, var, value) for a in stmt.range_args]
            if stmt.var == var:
                # Inner loop shadows and then rebinds the variable.
                body, _ = self._copy_stmts(stmt.body, None, 0)
                active = False
            else:
                body, _ = self._copy_stmts(stmt.body, var, value)
            node = ForRange(stmt.var, args, body, span=span)
        elif isinstance(stmt, FunctionDef):
            body, _ = self._copy_stmts(stmt.body, None, 0)
            node = FunctionDef(stmt.name, list(stmt.params), body, span=span)
        elif isinstance(stmt, Opaque):
            node = Opaque(stmt.names, stmt.label, span=span)
            active = active and var not in stmt.names
        elif isinstance(stmt, NoOp):
            node = NoOp(stmt.kind, span=span)
        else:
            node = replace(stmt)
        node.uid = self._next_uid()
        return node, active

    def _copy_simple(self, stmt: Stmt) -> Stmt:
        copied, _ = self._copy_stmt(stmt, None, 0)
        return copied

    def _copy_expr(self, expr: Expr, var: str | None, value: int) -> Expr:
        node: Expr
        if isinstance(expr, Name) and var is not None and expr.ident == var:
            node = IntLit(value, span=expr.span)
        elif isinstance(expr, Name):
            node = Name(expr.ident, span=expr.span)
        elif isinstance(expr, IntLit):
            node = IntLit(expr.value, span=expr.span)
        elif isinstance(expr, Attribute):
            node = Attribute(self._copy_expr(expr.value, var, value), expr.attr, span=expr.span)
        elif isinstance(expr, Subscript):
            node = Subscript(
                self._copy_expr(expr.value, var, value),
                self._copy_expr(expr.index, var, value),
                span=expr.span,
            )
        elif isinstance(expr, Call):
            args = [self._copy_expr(a, var, value) for a in expr.args]
            keywords = [
                Keyword(k.name, self._copy_expr(k.value, var, value))
                for k in expr.keywords
            ]
            node = Call(
                self._copy_expr(expr.func, var, value),
                args,
                keywords,
                expr.has_star_args,
                span=expr.span,
            )
        elif isinstance(expr, (ListExpr, TupleExpr)):
            elements = [self._copy_expr(e, var, value) for e in expr.elements]
            cls = ListExpr if isinstance(expr, ListExpr) else TupleExpr
            node = cls(elements, span=expr.span)
        elif isinstance(expr, BinOp):
            node = BinOp(
                self._copy_expr(expr.left, var, value),
                expr.op,
                self._copy_expr(expr.right, var, value),
                span=expr.span,
            )
        elif isinstance(expr, UnaryOp):
            node = UnaryOp(expr.op, self._copy_expr(expr.operand, var, value), span=expr.span)
        else:
            node = replace(expr)
        node.uid = self._next_uid()
        return node


def _has_loop_escape(stmts: list[Stmt]) -> bool:
    """True when the body has a break/continue bound to this loop."""
    for stmt in stmts:
        if isinstance(stmt, NoOp) and stmt.kind in ("break", "continue"):
            return True
        if isinstance(stmt, If):
            if _has_loop_escape(stmt.body) or _has_loop_escape(stmt.orelse):
                return True
        # Nested loops own their break/continue statements.
    return False
