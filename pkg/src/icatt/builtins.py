"""Built-in coherence schemas: identities and unbiased composites.

The binary composite produced here is the one used by the destructor
typing rules, so everything that mentions "comp" (kernel, elaborator,
normaliser, inverse construction) agrees syntactically.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import TypeMismatch
from .syntax import (
    Arr,
    Coh,
    Context,
    Destr,
    Inv,
    Obj,
    Substitution,
    Term,
    Type,
    Var,
    VarRef,
    alpha_key_term,
    apply_sub_type,
    dim_type,
)
from .meta import classify_term, disk, disk_var


@lru_cache(maxsize=None)
def chain_context(k: int, dim: int) -> Context:
    """The linear pasting context for a k-ary composite of dim-cells:
    a tower of base pairs b0-,b0+,...,then parallel boundary cells
    x0..xk with the composands f1..fk between consecutive ones."""
    if k < 1 or dim < 1:
        raise ValueError("chain needs k >= 1 and dim >= 1")
    entries: list[tuple[Var, Type]] = []
    base: Type = Obj()
    for j in range(dim - 1):
        entries.append((Var(f"b{j}-"), base))
        entries.append((Var(f"b{j}+"), base))
        base = Arr(base, VarRef(Var(f"b{j}-")), VarRef(Var(f"b{j}+")))
    xs = [Var(f"x{i}") for i in range(k + 1)]
    entries.append((xs[0], base))
    for i in range(1, k + 1):
        entries.append((xs[i], base))
        entries.append((Var(f"f{i}"), Arr(base, VarRef(xs[i - 1]), VarRef(xs[i]))))
    return Context(tuple(entries))


@lru_cache(maxsize=None)
def comp_schema(k: int, dim: int) -> tuple[Context, Type]:
    """The k-ary composite coherence of dim-cells along their
    codimension-1 boundary: its pasting context and full type."""
    ctx = chain_context(k, dim)
    base = ctx.lookup(Var("x0"))
    ty = Arr(base, VarRef(Var("x0")), VarRef(Var(f"x{k}")))
    return ctx, ty


@lru_cache(maxsize=None)
def id_schema(dim: int) -> tuple[Context, Type]:
    """The identity coherence on dim-cells: D^dim with the reflexive
    arrow on its top variable."""
    ctx = disk(dim)
    top = disk_var(dim)
    ty = Arr(ctx.lookup(top), VarRef(top), VarRef(top))
    return ctx, ty


def id_of(t: Term, ty: Type) -> Term:
    """The identity cell on a checked term ``t : ty``."""
    n = dim_type(ty) + 1
    ctx, full = id_schema(n)
    return Coh(ctx, full, classify_term(t, ty))


def type_tower(ty: Type) -> list[tuple[Term, Term]]:
    """Source/target pairs of an iterated arrow type, outermost last."""
    tower: list[tuple[Term, Term]] = []
    while isinstance(ty, Arr):
        tower.append((ty.src, ty.tgt))
        ty = ty.base
    tower.reverse()
    return tower


def comp_of(args: list[tuple[Term, Type]]) -> tuple[Term, Type]:
    """The unbiased composite of composable cells, with its type.

    All arguments must share dimension and compose along their
    codimension-1 boundary (target of one = source of the next,
    syntactically).
    """
    if not args:
        raise ValueError("comp_of needs at least one argument")
    if len(args) == 1:
        return args[0]
    k = len(args)
    first_ty = args[0][1]
    if not isinstance(first_ty, Arr):
        raise TypeMismatch("only positive-dimensional cells compose")
    dim = dim_type(first_ty) + 1
    ctx, full = comp_schema(k, dim)
    tower = type_tower(first_ty)
    pairs: list[tuple[Var, Term]] = []
    for j in range(dim - 1):
        s, t = tower[j]
        pairs.append((Var(f"b{j}-"), s))
        pairs.append((Var(f"b{j}+"), t))
    boundaries: list[Term] = [tower[-1][0]]
    for i, (t, ty) in enumerate(args):
        if not isinstance(ty, Arr) or dim_type(ty) + 1 != dim:
            raise TypeMismatch("composite arguments must share dimension")
        if i > 0 and alpha_key_term(ty.src) != alpha_key_term(boundaries[-1]):
            raise TypeMismatch(f"composite boundary mismatch at argument {i}")
        boundaries.append(ty.tgt)
    for i in range(k + 1):
        pairs.append((Var(f"x{i}"), boundaries[i]))
        if i > 0:
            pairs.append((Var(f"f{i}"), args[i - 1][0]))
    sub = Substitution(_telescope_order(pairs, ctx), ctx)
    return Coh(ctx, full, sub), apply_sub_type(full, sub)


def _telescope_order(pairs: list[tuple[Var, Term]], cod: Context) -> tuple[tuple[Var, Term], ...]:
    by_name = {v.name: t for v, t in pairs}
    return tuple((v, by_name[v.name]) for v, _ in cod)


def destructor_result_type(kind: str, e: Term, inv_ty: Inv) -> Type:
    """Result type of a destructor applied to ``e : inv_ty``."""
    base = inv_ty.base
    if not isinstance(base, Arr):
        raise TypeMismatch("invertibility subject must have an arrow type")
    t = inv_ty.subject
    u, v = base.src, base.tgt
    match kind:
        case "linv" | "rinv":
            return Arr(base.base, v, u)
        case "lunit":
            left, _ = comp_of([(Destr("linv", e), Arr(base.base, v, u)), (t, base)])
            return Arr(Arr(base.base, v, v), left, id_of(v, base.base))
        case "runit":
            right, _ = comp_of([(t, base), (Destr("rinv", e), Arr(base.base, v, u))])
            return Arr(Arr(base.base, u, u), right, id_of(u, base.base))
        case "lwit":
            lu_ty = destructor_result_type("lunit", e, inv_ty)
            assert isinstance(lu_ty, Arr)
            return Inv(lu_ty, Destr("lunit", e))
        case "rwit":
            ru_ty = destructor_result_type("runit", e, inv_ty)
            assert isinstance(ru_ty, Arr)
            return Inv(ru_ty, Destr("runit", e))
    raise ValueError(f"unknown destructor {kind}")
