from __future__ import annotations

from ..diagnostics import Diagnostic
from ..verilog import SignalInventory
from .ast import AssertionAst, Fell, Ident, Rose, Stable, assertion_exprs, walk
from .printer import pretty_print


def _fallback_span(ast: AssertionAst) -> tuple[int, int]:
    if ast.span and ast.span[1] > ast.span[0]:
        return ast.span
    return (0, max(1, len(pretty_print(ast))))


def check_semantics(ast: AssertionAst, inventory: SignalInventory) -> list[Diagnostic]:
    """Resolve the assertion's identifiers against the RTL signal inventory.

    * ``UnknownSignal`` (error): identifier not declared in the module.
    * ``IndexOnScalar`` (warning): indexing a 1-bit, non-array signal.
    * ``WideEdgeArgument`` (warning): ``$rose``/``$fell``/``$stable`` of a multi-bit signal.
    * ``SuspiciousReset`` (warning): ``disable iff`` that reads no reset-role signal.
    """
    diags: list[Diagnostic] = []
    loop_var = ast.generate.loop_var if ast.generate else None
    known_params = set(inventory.parameters)
    reported: set[str] = set()

    def span_of(ident: Ident) -> tuple[int, int]:
        return ident.span if ident.span and ident.span[1] > ident.span[0] else _fallback_span(ast)

    for expr in assertion_exprs(ast):
        for node in walk(expr):
            if isinstance(node, Ident):
                if node.name == loop_var or (node.name in known_params and node.index is None):
                    continue
                decl = inventory.get(node.name)
                if decl is None:
                    if node.name not in reported:
                        reported.add(node.name)
                        diags.append(
                            Diagnostic("error", "UnknownSignal",
                                       f"unknown signal '{node.name}' (not declared in module "
                                       f"{inventory.module_name})", span_of(node), ast.name)
                        )
                    continue
                if node.index is not None and not decl.is_array and decl.width == 1:
                    diags.append(
                        Diagnostic("warning", "IndexOnScalar", f"'{node.name}' is a 1-bit signal but is indexed",
                                   span_of(node), ast.name)
                    )
            elif isinstance(node, (Rose, Fell, Stable)) and isinstance(node.arg, Ident):
                decl = inventory.get(node.arg.name)
                if decl is not None and node.arg.index is None and decl.width > 1:
                    fn = {Rose: "$rose", Fell: "$fell", Stable: "$stable"}[type(node)]
                    diags.append(
                        Diagnostic("warning", "WideEdgeArgument", f"{fn} applied to {decl.width}-bit signal '{decl.name}'",
                                   span_of(node.arg), ast.name)
                    )

    if ast.clock not in inventory and ast.clock not in reported:
        diags.append(
            Diagnostic("error", "UnknownSignal", f"unknown signal '{ast.clock}' used as clock", _fallback_span(ast),
                       ast.name)
        )
    if ast.disable is not None:
        names = {n.name for n in walk(ast.disable) if isinstance(n, Ident)}
        roles = {inventory.get(n).role_hint for n in names if inventory.get(n) is not None}
        if "reset" not in roles:
            diags.append(
                Diagnostic("warning", "SuspiciousReset", "disable iff condition does not read a reset signal",
                           _fallback_span(ast), ast.name)
            )
    return diags
