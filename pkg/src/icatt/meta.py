"""Meta-operations and distinguished contexts.

Suspension and opposites act on raw syntax; disks, spheres and walking
equivalences are built directly with canonical names (``d0-``, ``d0+``,
``d1``, ``e1``, ...) so that classifying substitutions are easy to
assemble.  Suspending a canonical context yields an alpha-equal copy of
the next canonical one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NotPasting, OppositeOnInv
from .syntax import (
    Arr,
    Can,
    Coh,
    Coind,
    Context,
    Destr,
    Inv,
    Obj,
    Rec,
    Substitution,
    Term,
    Type,
    Var,
    VarRef,
    apply_sub_term,
    apply_sub_type,
    dim_type,
    fresh_name,
    identity_sub,
)

# ---------------------------------------------------------------------------
# Suspension
# ---------------------------------------------------------------------------


def susp_base_names(avoid: set[str]) -> tuple[str, str]:
    return fresh_name("v-", avoid), fresh_name("v+", avoid)


def suspend_type(ty: Type, base: tuple[Term, Term]) -> Type:
    neg, pos = base
    match ty:
        case Obj():
            return Arr(Obj(), neg, pos)
        case Arr(b, src, tgt):
            return Arr(suspend_type(b, base), suspend_term(src, base), suspend_term(tgt, base))
        case Inv(b, subject):
            return Inv(suspend_type(b, base), suspend_term(subject, base))
    raise TypeError(f"not a type: {ty!r}")


def suspend_term(t: Term, base: tuple[Term, Term]) -> Term:
    match t:
        case VarRef():
            return t
        case Coh(ps, ty, sub):
            sps = suspend_context(ps)
            (vneg, _), (vpos, _) = sps.entries[0], sps.entries[1]
            inner_base = (VarRef(vneg), VarRef(vpos))
            sty = suspend_type(ty, inner_base)
            pairs = ((vneg, base[0]), (vpos, base[1]))
            pairs += tuple((x, suspend_term(s, base)) for x, s in sub.pairs)
            return Coh(sps, sty, Substitution(pairs, sps))
        case Coind():
            return Coind(*(suspend_term(c, base) for c in t.components()))
        case Rec():
            seed = t.sub.codomain
            sseed = suspend_context(seed)
            (vneg, _), (vpos, _) = sseed.entries[0], sseed.entries[1]
            inner_base = (VarRef(vneg), VarRef(vpos))
            comps = tuple(suspend_term(c, inner_base) for c in t.components())
            pairs = ((vneg, base[0]), (vpos, base[1]))
            pairs += tuple((x, suspend_term(s, base)) for x, s in t.sub.pairs)
            return Rec(*comps, Substitution(pairs, sseed))
        case Can(subject, wit):
            return Can(suspend_term(subject, base), tuple((x, suspend_term(w, base)) for x, w in wit))
        case Destr(kind, arg):
            return Destr(kind, suspend_term(arg, base))
    raise TypeError(f"not a term: {t!r}")


def suspend_context(ctx: Context) -> Context:
    neg_name, pos_name = susp_base_names(ctx.names())
    vneg, vpos = Var(neg_name), Var(pos_name)
    base = (VarRef(vneg), VarRef(vpos))
    entries: tuple[tuple[Var, Type], ...] = ((vneg, Obj()), (vpos, Obj()))
    for v, ty in ctx:
        entries += ((v, suspend_type(ty, base)),)
    return Context(entries)


def suspend_sub(sub: Substitution, base: tuple[Term, Term]) -> Substitution:
    """Suspend a substitution; ``base`` gives the images of the two new
    codomain objects (the new domain objects, at a top-level use)."""
    scod = suspend_context(sub.codomain)
    (vneg, _), (vpos, _) = scod.entries[0], scod.entries[1]
    pairs = ((vneg, base[0]), (vpos, base[1]))
    pairs += tuple((x, suspend_term(t, base)) for x, t in sub.pairs)
    return Substitution(pairs, scod)


def suspend_judgment(ctx: Context, t: Term, ty: Type) -> tuple[Context, Term, Type]:
    """Suspend a typed term together with its context."""
    sctx = suspend_context(ctx)
    (vneg, _), (vpos, _) = sctx.entries[0], sctx.entries[1]
    base = (VarRef(vneg), VarRef(vpos))
    return sctx, suspend_term(t, base), suspend_type(ty, base)


# ---------------------------------------------------------------------------
# Pasting order (used by opposites and the inverse construction)
# ---------------------------------------------------------------------------


def to_ps_order(entries: tuple[tuple[Var, Type], ...]) -> Context:
    """Reorder a set of globular entries into the (unique) valid pasting
    telescope order, raising NotPasting if none exists.

    Entry types must be arrows between entry variables at every level.
    Uses a backtracking simulation of the pasting rules; derivations are
    unique, so the first success is canonical.
    """
    if not entries:
        raise NotPasting("empty context is not a pasting diagram")
    by_name: dict[str, Type] = {}
    var_of: dict[str, Var] = {}
    for v, ty in entries:
        if v.name in by_name:
            raise NotPasting(f"duplicate variable {v.name}")
        by_name[v.name] = ty
        var_of[v.name] = v

    def src_tgt(ty: Type) -> tuple[str, str]:
        if not isinstance(ty, Arr) or not isinstance(ty.src, VarRef) or not isinstance(ty.tgt, VarRef):
            raise NotPasting("pasting entries must be variable arrows")
        return ty.src.var.name, ty.tgt.var.name

    targets: set[str] = set()
    arrows: list[str] = []
    for name, ty in by_name.items():
        if isinstance(ty, Inv):
            raise NotPasting("invertibility entries cannot occur in a pasting diagram")
        if isinstance(ty, Arr):
            s, t = src_tgt(ty)
            if s not in by_name or t not in by_name:
                raise NotPasting(f"dangling boundary in entry {name}")
            targets.add(t)
            arrows.append(name)

    objects = [name for name, ty in by_name.items() if isinstance(ty, Obj)]
    if not objects:
        raise NotPasting("pasting diagram needs an initial object")
    roots = [name for name in objects if name not in targets]
    if len(roots) != 1:
        raise NotPasting("pasting diagram must have a unique initial object")
    root = roots[0]

    order: list[str] = [root]
    used: set[str] = {root}
    total = len(entries)

    def extensions(focus: str, focus_ty: Type) -> list[tuple[str, str]]:
        out = []
        for f in arrows:
            if f in used:
                continue
            s, t = src_tgt(by_name[f])
            if s == focus and t not in used and by_name[t] == focus_ty:
                out.append((t, f))
        return out

    def search(focus: str, focus_ty: Type) -> bool:
        if len(used) == total:
            return True
        for t, f in extensions(focus, focus_ty):
            used.update((t, f))
            order.extend((t, f))
            if search(f, by_name[f]):
                return True
            used.difference_update((t, f))
            del order[-2:]
        if isinstance(focus_ty, Arr):
            return search(focus_ty.tgt.var.name, by_name[focus_ty.tgt.var.name])
        return False

    if not search(root, by_name[root]):
        raise NotPasting("context entries do not assemble into a pasting diagram")
    return Context(tuple((var_of[n], by_name[n]) for n in order))


# ---------------------------------------------------------------------------
# Opposites
# ---------------------------------------------------------------------------


def opposite_type(n: int, ty: Type) -> Type:
    match ty:
        case Obj():
            return ty
        case Arr(base, src, tgt):
            b = opposite_type(n, base)
            s = opposite_term(n, src)
            t = opposite_term(n, tgt)
            if dim_type(base) + 2 == n:
                return Arr(b, t, s)
            return Arr(b, s, t)
        case Inv():
            raise OppositeOnInv("opposite is only defined on Inv-free syntax")
    raise TypeError(f"not a type: {ty!r}")


def opposite_term(n: int, t: Term) -> Term:
    match t:
        case VarRef():
            return t
        case Coh(ps, ty, sub):
            _, iso = opposite_context(n, ps)
            ps_reordered = iso.codomain
            pairs = tuple((x, opposite_term(n, s)) for x, s in sub.pairs)
            reordered = _reorder_pairs(pairs, ps_reordered)
            return Coh(ps_reordered, opposite_type(n, ty), Substitution(reordered, ps_reordered))
        case _:
            raise OppositeOnInv("opposite is only defined on Inv-free syntax")


def opposite_context(n: int, ctx: Context) -> tuple[Context, Substitution]:
    """Opposite of a context: the entrywise-opposite context (original
    order) and, when it is a permuted pasting diagram, the isomorphism
    onto its pasting reordering (the identity assignment)."""
    op_ctx = Context(tuple((v, opposite_type(n, ty)) for v, ty in ctx))
    reordered = to_ps_order(op_ctx.entries)
    iso = Substitution(tuple((v, VarRef(v)) for v, _ in reordered), reordered)
    return op_ctx, iso


def opposite_sub(n: int, sub: Substitution) -> Substitution:
    cod = Context(tuple((v, opposite_type(n, ty)) for v, ty in sub.codomain))
    return Substitution(tuple((x, opposite_term(n, t)) for x, t in sub.pairs), cod)


def _reorder_pairs(pairs: tuple[tuple[Var, Term], ...], cod: Context) -> tuple[tuple[Var, Term], ...]:
    by_name = {v.name: t for v, t in pairs}
    return tuple((v, by_name[v.name]) for v, _ in cod)


# ---------------------------------------------------------------------------
# Disks, spheres, walking equivalences
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def sphere(n: int) -> Context:
    """S^n with entries d0-, d0+, ..., dn-, dn+ (S^{-1} is empty)."""
    if n < -1:
        raise ValueError("sphere dimension must be >= -1")
    if n == -1:
        return Context()
    prev = sphere(n - 1)
    ty = _sphere_top_type(n)
    return Context(prev.entries + ((Var(f"d{n}-"), ty), (Var(f"d{n}+"), ty)))


def _sphere_top_type(n: int) -> Type:
    if n == 0:
        return Obj()
    return Arr(_sphere_top_type(n - 1), VarRef(Var(f"d{n-1}-")), VarRef(Var(f"d{n-1}+")))


@lru_cache(maxsize=None)
def disk(n: int) -> Context:
    """D^n: the sphere S^{n-1} with one top cell dn."""
    if n < 0:
        raise ValueError("disk dimension must be >= 0")
    return Context(sphere(n - 1).entries + ((Var(f"d{n}"), _sphere_top_type(n)),))


def disk_var(n: int) -> Var:
    return Var(f"d{n}")


def sphere_inclusion(n: int) -> Substitution:
    """The substitution D^n -> S^{n-1} forgetting the top cell."""
    cod = sphere(n - 1)
    return Substitution(tuple((v, VarRef(v)) for v, _ in cod), cod)


@lru_cache(maxsize=None)
def walking_equiv(n: int) -> Context:
    """E^n = D^n extended by an invertibility entry on the top cell."""
    if n < 1:
        raise ValueError("walking equivalence needs dimension >= 1")
    d = disk(n)
    inv_ty = Inv(_sphere_top_type(n), VarRef(disk_var(n)))
    return Context(d.entries + ((Var(f"e{n}"), inv_ty),))


def equiv_var(n: int) -> Var:
    return Var(f"e{n}")


def equiv_display(n: int) -> Substitution:
    """The weakening E^n -> D^n."""
    cod = disk(n)
    return Substitution(tuple((v, VarRef(v)) for v, _ in cod), cod)


# ---------------------------------------------------------------------------
# Classifying substitutions
# ---------------------------------------------------------------------------


def classify_type(ty: Type) -> Substitution:
    """chi_A : the substitution into S^n (categorical) or D^{n+1} (Inv)
    classifying a type."""
    match ty:
        case Obj():
            return Substitution((), sphere(-1))
        case Arr(base, src, tgt):
            n = dim_type(ty)
            prev = classify_type(base)
            pairs = prev.pairs + ((Var(f"d{n}-"), src), (Var(f"d{n}+"), tgt))
            return Substitution(pairs, sphere(n))
        case Inv(base, subject):
            m = dim_type(base)
            prev = classify_type(base)
            pairs = prev.pairs + ((disk_var(m + 1), subject),)
            return Substitution(pairs, disk(m + 1))
    raise TypeError(f"not a type: {ty!r}")


def classify_term(t: Term, ty: Type) -> Substitution:
    """chi_{t,A} : into D^n for categorical types, E^{n} for Inv types."""
    match ty:
        case Obj() | Arr():
            n = dim_type(ty) + 1
            prev = classify_type(ty)
            return Substitution(prev.pairs + ((disk_var(n), t),), disk(n))
        case Inv():
            n = dim_type(ty)
            prev = classify_type(ty)
            return Substitution(prev.pairs + ((equiv_var(n), t),), walking_equiv(n))
    raise TypeError(f"not a type: {ty!r}")


def rename_to(src_ctx: Context, dst_ctx: Context) -> Substitution:
    """Positional renaming substitution dst |- ren : src for alpha-equal
    contexts (src variables mapped to the dst variables in order)."""
    assert len(src_ctx) == len(dst_ctx)
    pairs = tuple((v, VarRef(w)) for (v, _), (w, _) in zip(src_ctx, dst_ctx))
    return Substitution(pairs, src_ctx)


# ---------------------------------------------------------------------------
# The inductive extension of the walking equivalence
# ---------------------------------------------------------------------------


def wit_classifier(seed: Context, kind: str) -> Substitution:
    """chi of lwit/rwit applied to the top invertibility entry of a
    context alpha-equal to E^{n}, as a substitution seed -> E^{n+1}."""
    from .builtins import destructor_result_type

    e_var, e_ty = seed.entries[-1]
    assert isinstance(e_ty, Inv)
    ren = rename_to(seed, walking_equiv(dim_type(e_ty)))
    e_ty_canon = apply_sub_type(e_ty, ren)  # over canonical E^n names
    canon_e = VarRef(equiv_var(dim_type(e_ty)))
    wit = Destr(kind, canon_e)
    wit_ty = destructor_result_type(kind, canon_e, e_ty_canon)
    chi = classify_term(wit, wit_ty)  # E^n -> E^{n+1}
    back = rename_to(walking_equiv(dim_type(e_ty)), seed)
    from .syntax import compose_sub

    return compose_sub(chi, back)


def equiv_ind_context(seed: Context, t: Term, t_ty: Type) -> tuple[Context, Var, Var]:
    """Extend a walking equivalence by the two inductive hypotheses for
    recursion on ``t : t_ty`` (a categorical term over ``seed``)."""
    sseed, st, st_ty = suspend_judgment(seed, t, t_ty)
    n = dim_type(seed.entries[-1][1])
    canon = walking_equiv(n + 1)
    ren = rename_to(sseed, canon)
    inv_up = Inv(apply_sub_type(st_ty, ren), apply_sub_term(st, ren))  # over E^{n+1}
    chi_l = wit_classifier(seed, "lwit")
    chi_r = wit_classifier(seed, "rwit")
    h_minus = Var(fresh_name("h-", seed.names()))
    h_plus = Var(fresh_name("h+", seed.names()))
    entries = seed.entries
    entries += ((h_minus, apply_sub_type(inv_up, chi_l)),)
    entries += ((h_plus, apply_sub_type(inv_up, chi_r)),)
    return Context(entries), h_minus, h_plus


def instantiation(seed: Context, r: Term, t: Term, t_ty: Type) -> Substitution:
    """The substitution seed -> EquivInd(seed, t) feeding the recursive
    calls ``r : Inv(t)`` into the inductive hypotheses."""
    ind_ctx, h_minus, h_plus = equiv_ind_context(seed, t, t_ty)
    sseed, sr, _ = suspend_judgment(seed, r, Inv(t_ty, t))
    n = dim_type(seed.entries[-1][1])
    ren = rename_to(sseed, walking_equiv(n + 1))
    sr_canon = apply_sub_term(sr, ren)
    chi_l = wit_classifier(seed, "lwit")
    chi_r = wit_classifier(seed, "rwit")
    pairs = identity_sub(seed).pairs
    pairs += ((h_minus, apply_sub_term(sr_canon, chi_l)),)
    pairs += ((h_plus, apply_sub_term(sr_canon, chi_r)),)
    return Substitution(pairs, ind_ctx)


@dataclass(frozen=True)
class DistinguishedContext:
    """A named distinguished context together with its special variables."""

    kind: str  # "disk" | "sphere" | "equiv" | "equiv-ind"
    body: Context
    roles: tuple[tuple[str, Var], ...] = ()

    def role(self, name: str) -> Var:
        for role_name, var in self.roles:
            if role_name == name:
                return var
        raise KeyError(name)


def distinguished(kind: str, n: int, t: Term | None = None, t_ty: Type | None = None) -> DistinguishedContext:
    """Build one of the distinguished context families with its role map."""
    if kind == "disk":
        return DistinguishedContext("disk", disk(n), (("top", disk_var(n)),))
    if kind == "sphere":
        return DistinguishedContext("sphere", sphere(n))
    if kind == "equiv":
        return DistinguishedContext(
            "equiv", walking_equiv(n), (("top", disk_var(n)), ("inv", equiv_var(n)))
        )
    if kind == "equiv-ind":
        assert t is not None and t_ty is not None
        body, h_minus, h_plus = equiv_ind_context(walking_equiv(n), t, t_ty)
        roles = (
            ("top", disk_var(n)),
            ("inv", equiv_var(n)),
            ("hyp-left", h_minus),
            ("hyp-right", h_plus),
        )
        return DistinguishedContext("equiv-ind", body, roles)
    raise ValueError(f"unknown distinguished context kind {kind}")
