"""Printers: surface declarations back to source, and kernel entities
in a readable concrete form.

The kernel printer recognises the built-in composite and identity
schemas and prints them applied to their top arguments; other
coherences are printed with their full pasting telescope, so output is
self-contained and deterministic.
"""

from __future__ import annotations

from .builtins import comp_schema, id_schema
from .parser import SApp, SCan, STArrow, STInv, STStar, SurfaceDecl, SVar, SWild
from .syntax import (
    Arr,
    Can,
    Coh,
    Coind,
    Context,
    Destr,
    Inv,
    MetaRef,
    Obj,
    Rec,
    Term,
    Type,
    alpha_key_context,
    alpha_key_type,
    dim_type,
)

_DESTR_TO_SURFACE = {
    "linv": "linv",
    "rinv": "rinv",
    "lunit": "lunit",
    "runit": "runit",
    "lwit": "ilunit",
    "rwit": "irunit",
}


# ---------------------------------------------------------------------------
# Surface printer (round-trip stable)
# ---------------------------------------------------------------------------


def print_surface_term(t) -> str:
    match t:
        case SVar(name, _):
            return name
        case SWild(_):
            return "_"
        case SApp(head, args, _):
            parts = [head.name] + [_surface_atom(a) for a in args]
            return " ".join(parts)
        case SCan(subject, wits, _):
            inner = " , ".join(print_surface_term(w) for w in wits)
            return f"can ({print_surface_term(subject)} {{ {inner} }})"
    raise TypeError(f"not a surface term: {t!r}")


def _surface_atom(t) -> str:
    if isinstance(t, (SApp,)):
        return f"({print_surface_term(t)})"
    return print_surface_term(t)


def print_surface_type(ty) -> str:
    match ty:
        case STStar(_):
            return "*"
        case STInv(subject, _):
            return f"Inv ({print_surface_term(subject)})"
        case STArrow(src, tgt, _):
            return f"{print_surface_term(src)} -> {print_surface_term(tgt)}"
    raise TypeError(f"not a surface type: {ty!r}")


def print_surface_decl(d: SurfaceDecl) -> str:
    tele = " ".join(f"({name} : {print_surface_type(ty)})" for name, ty in d.telescope)
    head = f"{d.kind} {d.name} {tele}".rstrip()
    if d.kind == "coh":
        return f"{head} : {print_surface_type(d.ty)}"
    if d.kind == "let":
        ann = f" : {print_surface_type(d.ty)}" if d.ty is not None else ""
        return f"{head}{ann} = {print_surface_term(d.body)}"
    comps = " ,\n    ".join(print_surface_term(c) for c in d.components)
    return f"{head} = {{ {comps} }}"


def print_surface_file(decls) -> str:
    return "\n\n".join(print_surface_decl(d) for d in decls) + "\n"


# ---------------------------------------------------------------------------
# Kernel printer
# ---------------------------------------------------------------------------


def _schema_kind(coh: Coh) -> tuple[str, int] | None:
    """Recognise the built-in composite/identity schemas."""
    n = dim_type(coh.ty) + 1
    key = (alpha_key_context(coh.ps), alpha_key_type(coh.ty, _index(coh.ps)))
    for k in range(1, max(2, (len(coh.ps) + 1) // 2) + 1):
        ctx, full = comp_schema(k, n)
        if key == (alpha_key_context(ctx), alpha_key_type(full, _index(ctx))):
            return ("comp", k)
    ctx, full = id_schema(n - 1)
    if key == (alpha_key_context(ctx), alpha_key_type(full, _index(ctx))):
        return ("id", 1)
    return None


def _index(ctx: Context) -> dict[str, int]:
    return {v.name: i for i, (v, _) in enumerate(ctx)}


def print_term(t: Term) -> str:
    match t:
        case MetaRef(_, hint):
            return f"?{hint}"
        case Coh() as coh:
            kind = _schema_kind(coh)
            n = dim_type(coh.ty) + 1
            if kind is not None:
                name, _ = kind
                if name == "id":
                    top = coh.sub.pairs[-1][1]
                    return f"id {_atom(top)}"
                tops = [coh.sub.lookup(v) for v, vty in coh.ps if dim_type(vty) + 1 == n]
                args = " ".join(_atom(a) for a in tops)
                return f"comp {args}"
            args = " , ".join(print_term(s) for s in coh.sub.terms())
            return f"coh[{print_context(coh.ps)} : {print_type(coh.ty)}][{args}]"
        case Destr(kind, arg):
            return f"{_DESTR_TO_SURFACE[kind]} ({print_term(arg)})"
        case Coind():
            inner = " , ".join(print_term(c) for c in t.components())
            return f"coind {{ {inner} }}"
        case Rec():
            inner = " , ".join(print_term(c) for c in t.components())
            args = " , ".join(print_term(s) for s in t.sub.terms())
            return f"rec {{ {inner} }}[{args}]"
        case Can(subject, wit):
            inner = " , ".join(print_term(w) for _, w in wit)
            return f"can ({print_term(subject)} {{ {inner} }})"
        case _:
            if hasattr(t, "var"):
                return t.var.name
    raise TypeError(f"not a term: {t!r}")


def _atom(t: Term) -> str:
    s = print_term(t)
    return f"({s})" if " " in s else s


def print_type(ty: Type) -> str:
    match ty:
        case Obj():
            return "*"
        case Arr(_, src, tgt):
            return f"{print_term(src)} -> {print_term(tgt)}"
        case Inv(_, subject):
            return f"Inv ({print_term(subject)})"
    raise TypeError(f"not a type: {ty!r}")


def print_context(ctx: Context) -> str:
    return " ".join(f"({v.name} : {print_type(ty)})" for v, ty in ctx)
