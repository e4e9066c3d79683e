"""The judgments of the theory: context, type, term and substitution
checking, pasting-diagram recognition, fullness, and conversion.

All checking is self-contained: coherence cells carry their pasting
context and type, so no global environment is needed to re-check a
term.  The environment here only stores accepted top-level declarations
for the elaborator to draw on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .builtins import comp_of, destructor_result_type, id_of
from .errors import (
    BadCanSubject,
    BadSubstitution,
    DuplicateVariable,
    IllFormedType,
    NotEquivContext,
    NotFull,
    NotPasting,
    ShadowedName,
    TypeMismatch,
    UnsolvedMeta,
    WrongWitnessSet,
)
from .meta import equiv_ind_context, walking_equiv
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
    Substitution,
    Term,
    Type,
    Var,
    VarRef,
    alpha_eq_context,
    alpha_eq_term,
    alpha_eq_type,
    alpha_key_context,
    alpha_key_term,
    apply_sub_term,
    apply_sub_type,
    dim_context,
    dim_type,
    variables_used_term,
    variables_used_type,
)

# ---------------------------------------------------------------------------
# Pasting diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsContext:
    """A validated pasting diagram with its boundary variable data."""

    ctx: Context
    dim: int
    src_by_dim: tuple[tuple[int, tuple[str, ...]], ...]
    tgt_by_dim: tuple[tuple[int, tuple[str, ...]], ...]

    def _by_dim(self, table, k: int) -> tuple[str, ...]:
        for d, names in table:
            if d == k:
                return names
        return ()

    def source_vars(self, k: int) -> tuple[str, ...]:
        """Dim-k variables that are not the target of another variable."""
        return self._by_dim(self.src_by_dim, k)

    def target_vars(self, k: int) -> tuple[str, ...]:
        return self._by_dim(self.tgt_by_dim, k)

    def boundary_src(self, m: int) -> set[str]:
        """Variables of the m-th source boundary."""
        out = {v.name for v, ty in self.ctx if dim_type(ty) + 1 < m}
        out.update(self.source_vars(m))
        return out

    def boundary_tgt(self, m: int) -> set[str]:
        out = {v.name for v, ty in self.ctx if dim_type(ty) + 1 < m}
        out.update(self.target_vars(m))
        return out

    def top_vars(self) -> tuple[Var, ...]:
        return tuple(v for v, ty in self.ctx if dim_type(ty) + 1 == self.dim)


_PS_CACHE: dict[tuple, PsContext] = {}


def check_ps(ctx: Context) -> PsContext:
    """Recognise a pasting diagram by a single left-to-right pass
    simulating the dangling-variable stack of the pasting rules."""
    key = alpha_key_context(ctx)
    hit = _PS_CACHE.get(key)
    if hit is not None and [v.name for v, _ in ctx] == [v.name for v, _ in hit.ctx]:
        return hit
    entries = ctx.entries
    if not entries:
        raise NotPasting("empty context is not a pasting diagram")
    v0, t0 = entries[0]
    if not isinstance(t0, Obj):
        raise NotPasting(f"pasting diagram must start with an object, got {v0.name}")
    focus_var, focus_ty = v0, t0
    i = 1
    while i < len(entries):
        if i + 1 >= len(entries):
            raise NotPasting(f"dangling entry {entries[i][0].name} (pasting entries come in pairs)")
        (y, b_ty), (f, c_ty) = entries[i], entries[i + 1]
        d = dim_type(b_ty) + 1
        while dim_type(focus_ty) + 1 > d:
            if not isinstance(focus_ty, Arr) or not isinstance(focus_ty.tgt, VarRef):
                raise NotPasting(f"cannot lower focus before {y.name}")
            focus_var = focus_ty.tgt.var
            focus_ty = focus_ty.base
        if dim_type(focus_ty) + 1 != d or focus_ty != b_ty:
            raise NotPasting(f"entry {y.name} does not extend the focus {focus_var.name}")
        if c_ty != Arr(b_ty, VarRef(focus_var), VarRef(y)):
            raise NotPasting(f"entry {f.name} must be an arrow from {focus_var.name} to {y.name}")
        focus_var, focus_ty = f, c_ty
        i += 2

    dims = {v.name: dim_type(ty) + 1 for v, ty in entries}
    tgt_of: set[str] = set()
    src_of: set[str] = set()
    for _, ty in entries:
        if isinstance(ty, Arr):
            src_of.add(ty.src.var.name)
            tgt_of.add(ty.tgt.var.name)
    dim = dim_context(ctx)
    src_tab = []
    tgt_tab = []
    for k in range(dim + 1):
        at_k = [v.name for v, _ in entries if dims[v.name] == k]
        src_tab.append((k, tuple(n for n in at_k if n not in tgt_of)))
        tgt_tab.append((k, tuple(n for n in at_k if n not in src_of)))
    ps = PsContext(ctx, dim, tuple(src_tab), tuple(tgt_tab))
    _PS_CACHE[key] = ps
    return ps


def full_type(ps: PsContext, ty: Type) -> bool:
    """The two fullness clauses on an arrow type over a pasting diagram.

    Variable use counts the free variables of the side together with
    those of the base type; the boundary clause compares against the
    full variable set of the (n-1)-boundary.
    """
    if not isinstance(ty, Arr):
        raise NotFull("only arrow types can be full")
    src_fv, tgt_fv = _side_variables(ty)
    allvars = {v.name for v, _ in ps.ctx}
    if src_fv == allvars and tgt_fv == allvars:
        return True
    n = ps.dim
    if dim_type(ty) == n - 1:
        return src_fv == ps.boundary_src(n - 1) and tgt_fv == ps.boundary_tgt(n - 1)
    return False


def _side_variables(ty: Arr) -> tuple[set[str], set[str]]:
    base_fv = set(variables_used_type(ty.base))
    return base_fv | set(variables_used_term(ty.src)), base_fv | set(variables_used_term(ty.tgt))


def fullness_failure(ps: PsContext, ty: Type) -> str:
    """A diagnostic naming the variables that break fullness."""
    if not isinstance(ty, Arr):
        return "only arrow types can be full"
    src_fv, tgt_fv = _side_variables(ty)
    allvars = {v.name for v, _ in ps.ctx}
    if dim_type(ty) == ps.dim - 1:
        want_src, want_tgt = ps.boundary_src(ps.dim - 1), ps.boundary_tgt(ps.dim - 1)
    else:
        want_src, want_tgt = allvars, allvars
    parts = []
    for side, fv, want in (("source", src_fv, want_src), ("target", tgt_fv, want_tgt)):
        missing = sorted(want - fv)
        stray = sorted(fv - want)
        if missing:
            parts.append(f"{side} side does not use {', '.join(missing)}")
        if stray:
            parts.append(f"{side} side uses non-boundary {', '.join(stray)}")
    detail = "; ".join(parts) or "no fullness clause applies"
    return f"type is not full over its pasting context: {detail}"


# ---------------------------------------------------------------------------
# Judgments
# ---------------------------------------------------------------------------


def check_ctx(ctx: Context) -> Context:
    seen: set[str] = set()
    prefix = Context()
    for v, ty in ctx:
        if v.name in seen:
            raise DuplicateVariable(f"duplicate variable {v.name} in context")
        check_type(prefix, ty)
        seen.add(v.name)
        prefix = Context(prefix.entries + ((v, ty),))
    return ctx


def check_type(ctx: Context, ty: Type) -> Type:
    match ty:
        case Obj():
            return ty
        case Arr(base, src, tgt):
            check_type(ctx, base)
            src_ty = infer_term(ctx, src)
            tgt_ty = infer_term(ctx, tgt)
            if not convertible_types(ctx, src_ty, base) or not convertible_types(ctx, tgt_ty, base):
                raise IllFormedType(
                    f"arrow endpoints must share the base type (got {src_ty} and {tgt_ty}, expected {base})"
                )
            return ty
        case Inv(base, subject):
            if not isinstance(base, Arr):
                raise IllFormedType("invertibility requires a positive-dimensional subject")
            check_type(ctx, base)
            sub_ty = infer_term(ctx, subject)
            if not convertible_types(ctx, sub_ty, base):
                raise IllFormedType(f"invertibility subject has type {sub_ty}, expected {base}")
            return ty
    raise IllFormedType(f"not a type: {ty!r}")


_INFER_CACHE: dict[tuple, Type] = {}


def infer_term(ctx: Context, t: Term) -> Type:
    key = (alpha_key_context(ctx), tuple(v.name for v, _ in ctx), alpha_key_term(t))
    hit = _INFER_CACHE.get(key)
    if hit is not None:
        return hit
    ty = _infer_term(ctx, t)
    _INFER_CACHE[key] = ty
    return ty


def _infer_term(ctx: Context, t: Term) -> Type:
    match t:
        case VarRef(v):
            return ctx.lookup(v)
        case MetaRef(_, hint):
            raise UnsolvedMeta(f"unsolved implicit argument {hint}; give it explicitly")
        case Coh(ps_ctx, ty, sub):
            check_ctx(ps_ctx)
            ps = check_ps(ps_ctx)
            check_type(ps_ctx, ty)
            if not full_type(ps, ty):
                raise NotFull(fullness_failure(ps, ty))
            check_sub(ctx, sub, ps_ctx)
            return apply_sub_type(ty, sub)
        case Destr(kind, arg):
            arg_ty = infer_term(ctx, arg)
            if not isinstance(arg_ty, Inv):
                raise TypeMismatch(f"destructor {kind} needs an invertibility structure, got {arg_ty}")
            return destructor_result_type(kind, arg, arg_ty)
        case Coind():
            return _infer_coind(ctx, t)
        case Can():
            return _infer_can(ctx, t)
        case Rec():
            return _infer_rec(ctx, t)
    raise TypeMismatch(f"not a term: {t!r}")


def check_term(ctx: Context, t: Term, expected: Type) -> Type:
    actual = infer_term(ctx, t)
    if not convertible_types(ctx, actual, expected):
        raise TypeMismatch(f"term has type {actual}, expected {expected}")
    return actual


def _infer_coind(ctx: Context, t: Coind) -> Type:
    ty = infer_term(ctx, t.t)
    if not isinstance(ty, Arr):
        raise TypeMismatch("coinductive tuple needs a positive-dimensional subject")
    flipped = Arr(ty.base, ty.tgt, ty.src)
    check_term(ctx, t.tl, flipped)
    check_term(ctx, t.tr, flipped)
    left, _ = comp_of([(t.tl, flipped), (t.t, ty)])
    right, _ = comp_of([(t.t, ty), (t.tr, flipped)])
    lu_ty = Arr(Arr(ty.base, ty.tgt, ty.tgt), left, id_of(ty.tgt, ty.base))
    ru_ty = Arr(Arr(ty.base, ty.src, ty.src), right, id_of(ty.src, ty.base))
    check_term(ctx, t.tlu, lu_ty)
    check_term(ctx, t.tru, ru_ty)
    check_term(ctx, t.tilu, Inv(lu_ty, t.tlu))
    check_term(ctx, t.tiru, Inv(ru_ty, t.tru))
    return Inv(ty, t.t)


def _infer_can(ctx: Context, t: Can) -> Type:
    if not isinstance(t.subject, Coh):
        raise BadCanSubject("canonical invertibility requires a coherence cell subject")
    subject_ty = infer_term(ctx, t.subject)
    if not isinstance(subject_ty, Arr):
        raise BadCanSubject("canonical invertibility requires a positive-dimensional subject")
    cell_dim = dim_type(t.subject.ty) + 1
    tops = tuple(v for v, ty in t.subject.ps if dim_type(ty) + 1 == cell_dim)
    if tuple(v.name for v, _ in t.witnesses) != tuple(v.name for v in tops):
        raise WrongWitnessSet(
            f"witness family must cover exactly the dimension-{cell_dim} variables "
            f"{[v.name for v in tops]} in order, got {[v.name for v, _ in t.witnesses]}"
        )
    for x, w in t.witnesses:
        x_img = t.subject.sub.lookup(x)
        x_ty = apply_sub_type(t.subject.ps.lookup(x), t.subject.sub)
        if not isinstance(x_ty, Arr):
            raise WrongWitnessSet(f"witness key {x.name} is not positive-dimensional")
        check_term(ctx, w, Inv(x_ty, x_img))
    return Inv(subject_ty, t.subject)


def _infer_rec(ctx: Context, t: Rec) -> Type:
    seed = t.sub.codomain
    if not seed.entries or not isinstance(seed.entries[-1][1], Inv):
        raise NotEquivContext("recursive definitions live over a walking equivalence")
    n = dim_type(seed.entries[-1][1])
    if not alpha_eq_context(seed, walking_equiv(n)):
        raise NotEquivContext("seed context of a recursive definition must be a walking equivalence")
    t_ty = infer_term(seed, t.t)
    if not isinstance(t_ty, Arr):
        raise TypeMismatch("recursive definitions need a positive-dimensional subject")
    flipped = Arr(t_ty.base, t_ty.tgt, t_ty.src)
    check_term(seed, t.tl, flipped)
    check_term(seed, t.tr, flipped)
    left, _ = comp_of([(t.tl, flipped), (t.t, t_ty)])
    right, _ = comp_of([(t.t, t_ty), (t.tr, flipped)])
    lu_ty = Arr(Arr(t_ty.base, t_ty.tgt, t_ty.tgt), left, id_of(t_ty.tgt, t_ty.base))
    ru_ty = Arr(Arr(t_ty.base, t_ty.src, t_ty.src), right, id_of(t_ty.src, t_ty.base))
    check_term(seed, t.tlu, lu_ty)
    check_term(seed, t.tru, ru_ty)
    ind_ctx, _, _ = equiv_ind_context(seed, t.t, t_ty)
    check_term(ind_ctx, t.tilu, Inv(lu_ty, t.tlu))
    check_term(ind_ctx, t.tiru, Inv(ru_ty, t.tru))
    check_sub(ctx, t.sub, seed)
    return Inv(apply_sub_type(t_ty, t.sub), apply_sub_term(t.t, t.sub))


def check_sub(ctx: Context, sub: Substitution, cod: Context) -> Substitution:
    if not alpha_eq_context(sub.codomain, cod) or sub.codomain.names() != cod.names():
        raise BadSubstitution("substitution codomain does not match")
    if len(sub.pairs) != len(cod):
        raise BadSubstitution(
            f"substitution has {len(sub.pairs)} assignments for {len(cod)} variables"
        )
    for (x, t), (v, v_ty) in zip(sub.pairs, cod):
        if x.name != v.name:
            raise BadSubstitution(f"substitution assigns {x.name} where {v.name} was expected")
        expected = apply_sub_type(v_ty, sub)
        actual = infer_term(ctx, t)
        if not convertible_types(ctx, actual, expected):
            raise BadSubstitution(
                f"image of {v.name} has type {actual}, expected {expected}"
            )
    return sub


# ---------------------------------------------------------------------------
# Conversion
# ---------------------------------------------------------------------------


def convertible_types(ctx: Context, a: Type, b: Type) -> bool:
    if alpha_eq_type(a, b):
        return True
    match (a, b):
        case (Obj(), Obj()):
            return True
        case (Arr(ba, sa, ta), Arr(bb, sb, tb)):
            return (
                convertible_types(ctx, ba, bb)
                and convertible_terms(ctx, sa, sb, ba)
                and convertible_terms(ctx, ta, tb, ba)
            )
        case (Inv(ba, ua), Inv(bb, ub)):
            return convertible_types(ctx, ba, bb) and convertible_inv_terms(ctx, ua, ub)
    return False


def convertible_terms(ctx: Context, a: Term, b: Term, ty: Type) -> bool:
    """Conversion of categorical terms at a common type: compare guarded
    normal forms up to alpha."""
    if alpha_eq_term(a, b):
        return True
    from .normalize import nf

    n = dim_type(ty) + 1
    return alpha_eq_term(nf(ctx, a, n), nf(ctx, b, n))


def convertible_inv_terms(ctx: Context, a: Term, b: Term) -> bool:
    """Equality of invertibility structures: beta-normal syntactic
    comparison (stricter than the theory, which never needs it)."""
    if alpha_eq_term(a, b):
        return True
    from .normalize import beta_reduce

    return alpha_eq_term(beta_reduce(a), beta_reduce(b))


def convertible(ctx: Context, a, b, at=None) -> bool:
    """Public conversion entry point for types or typed terms."""
    if isinstance(a, (Obj, Arr, Inv)):
        return convertible_types(ctx, a, b)
    if isinstance(at, Inv):
        return convertible_inv_terms(ctx, a, b)
    if at is None:
        at = infer_term(ctx, a)
        if isinstance(at, Inv):
            return convertible_inv_terms(ctx, a, b)
    return convertible_terms(ctx, a, b, at)


# ---------------------------------------------------------------------------
# Environment of top-level declarations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CohDecl:
    name: str
    ps: Context
    ty: Type


@dataclass(frozen=True)
class TermDecl:
    """A `let` or `inv` declaration: a named checked term over a telescope."""

    name: str
    ctx: Context
    term: Term
    ty: Type


@dataclass(frozen=True)
class RecDecl:
    name: str
    seed: Context
    components: tuple[Term, ...]  # t, tl, tr, tlu, tru, tilu, tiru


Decl = CohDecl | TermDecl | RecDecl


@dataclass
class Environment:
    decls: dict[str, Decl] = field(default_factory=dict)

    def lookup(self, name: str) -> Decl | None:
        return self.decls.get(name)


def check_decl(env: Environment, decl: Decl) -> Environment:
    """Re-check a declaration from scratch and extend the environment."""
    if decl.name in env.decls:
        raise ShadowedName(f"name {decl.name} is already declared")
    match decl:
        case CohDecl(_, ps_ctx, ty):
            check_ctx(ps_ctx)
            ps = check_ps(ps_ctx)
            check_type(ps_ctx, ty)
            if not full_type(ps, ty):
                raise NotFull(f"coherence {decl.name}: {fullness_failure(ps, ty)}")
        case TermDecl(_, ctx, term, ty):
            check_ctx(ctx)
            check_type(ctx, ty)
            check_term(ctx, term, ty)
        case RecDecl(_, seed, comps):
            check_ctx(seed)
            from .syntax import identity_sub

            probe = Rec(*comps, identity_sub(seed))
            infer_term(seed, probe)
        case _:
            raise TypeMismatch(f"unknown declaration {decl!r}")
    env.decls[decl.name] = decl
    return env


def categorical(ty: Type) -> bool:
    return isinstance(ty, (Obj, Arr))


def term_dimension(ctx: Context, t: Term) -> int:
    return dim_type(infer_term(ctx, t)) + 1


def clear_caches() -> None:
    _PS_CACHE.clear()
    _INFER_CACHE.clear()
