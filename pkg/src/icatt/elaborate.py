"""Surface-to-kernel elaboration.

Declared names are schemas over a telescope.  Only arguments whose
variables do not occur in the types of later telescope entries are
given explicitly; the rest are reconstructed by first-order unification
of the explicit arguments' types against the telescope (best effort:
unsolved metavariables are reported, never guessed).  Definitions are
implicitly suspended: when the explicit arguments (or the expected
type) live uniformly above the schema's dimension, the schema is
suspended to match before unification.

``comp`` is multi-ary and elaborates through the linear composite
schema of the right arity and dimension; ``id`` is the identity schema;
``IHleft``/``IHright`` resolve to the inductive-hypothesis variables
inside the last two components of a recursive definition.  Let-bodies
are inlined at use sites, so the kernel re-checks declarations with no
elaborator state left behind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .builtins import comp_of, comp_schema, destructor_result_type, id_of, id_schema
from .errors import (
    ArityError,
    BadCanSubject,
    IcattError,
    IHOutsideRec,
    IllFormedType,
    NotEquivContext,
    ShadowedName,
    TypeMismatch,
    UnificationFailure,
    UnknownName,
    UnsolvedMeta,
    WrongWitnessSet,
)
from .kernel import CohDecl, Environment, RecDecl, TermDecl, check_ctx, infer_term
from .meta import (
    equiv_ind_context,
    suspend_context,
    suspend_judgment,
    suspend_term,
    suspend_type,
    walking_equiv,
)
from .parser import (
    SApp,
    SCan,
    STArrow,
    STInv,
    STStar,
    SurfaceDecl,
    SurfaceTerm,
    SurfaceType,
    SVar,
    SWild,
)
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
    alpha_key_context,
    alpha_key_term,
    alpha_key_type,
    apply_sub_term,
    apply_sub_type,
    dim_type,
    variables_used_type,
)

_DESTR_SURFACE = {
    "linv": "linv",
    "rinv": "rinv",
    "lunit": "lunit",
    "runit": "runit",
    "ilunit": "lwit",
    "irunit": "rwit",
}


@dataclass
class _Schema:
    """A declared name instantiable at a substitution: its telescope,
    and how to build the applied term and type."""

    kind: str  # coh | term | rec
    telescope: Context
    ty: Type
    term: Term | None = None  # for term schemas (let/inv bodies)
    components: tuple[Term, ...] | None = None  # for rec schemas


def _schema_of_decl(decl) -> _Schema:
    if isinstance(decl, CohDecl):
        return _Schema("coh", decl.ps, decl.ty)
    if isinstance(decl, TermDecl):
        return _Schema("term", decl.ctx, decl.ty, term=decl.term)
    if isinstance(decl, RecDecl):
        t_ty = infer_term(decl.seed, decl.components[0])
        return _Schema(
            "rec", decl.seed, Inv(t_ty, decl.components[0]), components=decl.components
        )
    raise UnknownName(f"unknown declaration {decl!r}")


def _suspend_schema(s: _Schema) -> _Schema:
    if s.kind == "coh":
        sctx = suspend_context(s.telescope)
        base = (VarRef(sctx.entries[0][0]), VarRef(sctx.entries[1][0]))
        return _Schema("coh", sctx, suspend_type(s.ty, base))
    if s.kind == "term":
        sctx, sterm, sty = suspend_judgment(s.telescope, s.term, s.ty)
        return _Schema("term", sctx, sty, term=sterm)
    sctx = suspend_context(s.telescope)
    base = (VarRef(sctx.entries[0][0]), VarRef(sctx.entries[1][0]))
    comps = tuple(suspend_term(c, base) for c in s.components)
    return _Schema("rec", sctx, suspend_type(s.ty, base), components=comps)


def explicit_positions(tele: Context) -> list[int]:
    implicit: set[str] = set()
    for _, ty in tele:
        implicit |= set(variables_used_type(ty))
    return [i for i, (v, _) in enumerate(tele) if v.name not in implicit]


# ---------------------------------------------------------------------------
# Elaboration state
# ---------------------------------------------------------------------------


@dataclass
class _Metas:
    solutions: dict[int, Term] = field(default_factory=dict)
    types: dict[int, Type] = field(default_factory=dict)
    hints: dict[int, str] = field(default_factory=dict)
    next_uid: int = 0

    def fresh(self, hint: str, ty: Type | None = None) -> MetaRef:
        uid = self.next_uid
        self.next_uid += 1
        self.hints[uid] = hint
        if ty is not None:
            self.types[uid] = ty
        return MetaRef(uid, hint)


class Elaborator:
    def __init__(self, env: Environment):
        self.env = env
        self.metas = _Metas()
        self.ctx = Context()
        self.ih: tuple[tuple[Var, Type], tuple[Var, Type]] | None = None

    # -- metavariable plumbing -------------------------------------------

    def resolve(self, t: Term) -> Term:
        while isinstance(t, MetaRef) and t.uid in self.metas.solutions:
            t = self.metas.solutions[t.uid]
        return t

    def zonk_term(self, t: Term) -> Term:
        t = self.resolve(t)
        match t:
            case MetaRef(uid, hint):
                raise UnsolvedMeta(f"unsolved implicit argument {hint or uid}; give it explicitly")
            case VarRef():
                return t
            case Coh(ps, ty, sub):
                pairs = tuple((x, self.zonk_term(s)) for x, s in sub.pairs)
                return Coh(ps, ty, Substitution(pairs, sub.codomain))
            case Coind():
                return Coind(*(self.zonk_term(c) for c in t.components()))
            case Rec():
                pairs = tuple((x, self.zonk_term(s)) for x, s in t.sub.pairs)
                return Rec(*t.components(), Substitution(pairs, t.sub.codomain))
            case Can(subject, wit):
                return Can(self.zonk_term(subject), tuple((x, self.zonk_term(w)) for x, w in wit))
            case Destr(kind, arg):
                return Destr(kind, self.zonk_term(arg))
        raise TypeMismatch(f"not a term: {t!r}")

    def zonk_type(self, ty: Type) -> Type:
        match ty:
            case Obj():
                return ty
            case Arr(base, src, tgt):
                return Arr(self.zonk_type(base), self.zonk_term(src), self.zonk_term(tgt))
            case Inv(base, subject):
                return Inv(self.zonk_type(base), self.zonk_term(subject))
        raise TypeMismatch(f"not a type: {ty!r}")

    # -- unification -------------------------------------------------------

    def unify_term(self, a: Term, b: Term) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, MetaRef) and isinstance(b, MetaRef) and a.uid == b.uid:
            return
        if isinstance(a, MetaRef):
            self._bind(a, b)
            return
        if isinstance(b, MetaRef):
            self._bind(b, a)
            return
        match (a, b):
            case (VarRef(v), VarRef(w)) if v.name == w.name:
                return
            case (Coh(ps1, ty1, sub1), Coh(ps2, ty2, sub2)):
                if alpha_key_context(ps1) != alpha_key_context(ps2) or alpha_key_type(
                    ty1, _ctx_index(ps1)
                ) != alpha_key_type(ty2, _ctx_index(ps2)):
                    raise UnificationFailure("distinct coherence heads")
                for (_, s1), (_, s2) in zip(sub1.pairs, sub2.pairs):
                    self.unify_term(s1, s2)
                return
            case (Destr(k1, a1), Destr(k2, a2)) if k1 == k2:
                self.unify_term(a1, a2)
                return
            case (Coind(), Coind()):
                for c1, c2 in zip(a.components(), b.components()):
                    self.unify_term(c1, c2)
                return
            case (Can(s1, w1), Can(s2, w2)) if len(w1) == len(w2):
                self.unify_term(s1, s2)
                for (_, x1), (_, x2) in zip(w1, w2):
                    self.unify_term(x1, x2)
                return
            case (Rec(), Rec()):
                from .syntax import identity_sub

                head_a = Rec(*a.components(), identity_sub(a.sub.codomain))
                head_b = Rec(*b.components(), identity_sub(b.sub.codomain))
                if alpha_key_term(head_a) != alpha_key_term(head_b):
                    raise UnificationFailure("distinct recursive definitions")
                for (_, s1), (_, s2) in zip(a.sub.pairs, b.sub.pairs):
                    self.unify_term(s1, s2)
                return
        if alpha_key_term(a) == alpha_key_term(b):
            return
        raise UnificationFailure("terms do not unify")

    def _bind(self, m: MetaRef, t: Term) -> None:
        if self._occurs(m.uid, t):
            raise UnificationFailure("circular implicit argument")
        self.metas.solutions[m.uid] = t

    def _occurs(self, uid: int, t: Term) -> bool:
        t = self.resolve(t)
        match t:
            case MetaRef(u, _):
                return u == uid
            case Coh(_, _, sub):
                return any(self._occurs(uid, s) for s in sub.terms())
            case Coind():
                return any(self._occurs(uid, c) for c in t.components())
            case Rec():
                return any(self._occurs(uid, s) for s in t.sub.terms())
            case Can(subject, wit):
                return self._occurs(uid, subject) or any(self._occurs(uid, w) for _, w in wit)
            case Destr(_, arg):
                return self._occurs(uid, arg)
            case _:
                return False

    def unify_type(self, a: Type | None, b: Type | None) -> None:
        if a is None or b is None:
            return
        match (a, b):
            case (Obj(), Obj()):
                return
            case (Arr(b1, s1, t1), Arr(b2, s2, t2)):
                self.unify_type(b1, b2)
                self.unify_term(s1, s2)
                self.unify_term(t1, t2)
                return
            case (Inv(b1, u1), Inv(b2, u2)):
                self.unify_type(b1, b2)
                self.unify_term(u1, u2)
                return
        raise UnificationFailure("types do not unify")

    # -- terms ---------------------------------------------------------------

    def elab_check(self, s: SurfaceTerm, expected: Type | None) -> Term:
        term, ty = self.elab_infer(s, expected)
        if expected is not None and ty is not None:
            try:
                self.unify_type(ty, expected)
            except UnificationFailure:
                if self._concrete(ty) and self._concrete(expected):
                    raise TypeMismatch(
                        f"term has type {self.zonk_type(ty)}, expected {self.zonk_type(expected)}"
                    )
                raise
        return term

    def _concrete(self, ty: Type) -> bool:
        try:
            self.zonk_type(ty)
            return True
        except UnsolvedMeta:
            return False

    def elab_infer(self, s: SurfaceTerm, expected: Type | None = None) -> tuple[Term, Type | None]:
        match s:
            case SWild(span):
                m = self.metas.fresh("_", expected)
                if expected is None:
                    return m, None
                return m, expected
            case SVar(name, span):
                return self._elab_app(name, (), expected, span)
            case SApp(SVar(name, _), args, span):
                return self._elab_app(name, args, expected, span)
            case SCan():
                return self._elab_can(s, expected)
        raise TypeMismatch(f"cannot elaborate {s!r}")

    def _elab_app(
        self, name: str, args: tuple, expected: Type | None, span
    ) -> tuple[Term, Type | None]:
        if self.ctx.has(Var(name)):
            if args:
                raise ArityError(f"variable {name} cannot be applied to arguments", span=span)
            return VarRef(Var(name)), self.ctx.lookup(Var(name))
        if name in ("IHleft", "IHright"):
            if self.ih is None:
                raise IHOutsideRec(
                    "IHleft/IHright are only available in the last two components "
                    "of a recursive definition",
                    span=span,
                )
            (hm, hm_ty), (hp, hp_ty) = self.ih
            if args:
                raise ArityError(f"{name} cannot be applied to arguments", span=span)
            return (VarRef(hm), hm_ty) if name == "IHleft" else (VarRef(hp), hp_ty)
        if name in _DESTR_SURFACE:
            if len(args) != 1:
                raise ArityError(f"{name} takes exactly one argument", span=span)
            arg, arg_ty = self.elab_infer(args[0])
            arg_ty = self._zonkish_type(arg_ty)
            if not isinstance(arg_ty, Inv):
                raise TypeMismatch(
                    f"{name} needs an invertibility structure, got {arg_ty}", span=span
                )
            kind = _DESTR_SURFACE[name]
            return Destr(kind, arg), destructor_result_type(kind, arg, arg_ty)
        if name == "comp":
            return self._elab_comp(args, expected, span)
        if name == "id":
            if len(args) != 1:
                raise ArityError("id takes exactly one argument", span=span)
            dims = self._expected_dim(expected)
            k = None if dims is None else dims - 1
            term, ty = self.elab_infer(args[0])
            ty = self._zonkish_type(ty)
            if ty is not None:
                k = dim_type(ty) + 1
            if k is None:
                raise UnificationFailure("cannot infer the dimension of id here", span=span)
            sctx, sty = id_schema(k)
            return self._apply_schema_core(_Schema("coh", sctx, sty), [(term, ty)], expected, span)
        decl = self.env.lookup(name)
        if decl is None:
            raise UnknownName(f"unknown name {name}", span=span)
        schema = _schema_of_decl(decl)
        return self._apply_schema(schema, args, expected, span)

    def _elab_comp(self, args: tuple, expected: Type | None, span) -> tuple[Term, Type | None]:
        if not args:
            raise ArityError("comp needs at least one argument", span=span)
        if len(args) == 1:
            # a unary composite is its argument
            term, ty = self.elab_infer(args[0], expected)
            return term, ty
        pre: dict[int, tuple[Term, Type | None]] = {}
        dim = None
        for i, a in enumerate(args):
            if isinstance(a, SWild):
                continue
            snapshot = dict(self.metas.solutions)
            try:
                term, ty = self.elab_infer(a)
            except IcattError:
                self.metas.solutions = snapshot
                continue
            pre[i] = (term, ty)
            ty = self._zonkish_type(ty)
            if dim is None and ty is not None:
                dim = dim_type(ty) + 1
        if dim is None:
            exp_dim = self._expected_dim(expected)
            if exp_dim is not None:
                dim = exp_dim
        if dim is None or dim < 1:
            raise UnificationFailure("cannot infer the dimension of this composite", span=span)
        ctx, full = comp_schema(len(args), dim)
        arg_data = []
        for i, a in enumerate(args):
            arg_data.append(pre.get(i, a))
        return self._apply_schema_core(_Schema("coh", ctx, full), arg_data, expected, span)

    def _expected_dim(self, expected: Type | None) -> int | None:
        if expected is None:
            return None
        expected = self._zonkish_type(expected)
        if expected is None:
            return None
        return dim_type(expected) + 1

    def _zonkish_type(self, ty: Type | None) -> Type | None:
        """Resolve solved metas inside a type without failing on
        unsolved ones."""
        if ty is None:
            return None
        match ty:
            case Obj():
                return ty
            case Arr(base, src, tgt):
                return Arr(self._zonkish_type(base), self._resolve_deep(src), self._resolve_deep(tgt))
            case Inv(base, subject):
                return Inv(self._zonkish_type(base), self._resolve_deep(subject))
        return ty

    def _resolve_deep(self, t: Term) -> Term:
        t = self.resolve(t)
        match t:
            case Coh(ps, ty, sub):
                return Coh(ps, ty, Substitution(tuple((x, self._resolve_deep(s)) for x, s in sub.pairs), sub.codomain))
            case Coind():
                return Coind(*(self._resolve_deep(c) for c in t.components()))
            case Rec():
                return Rec(*t.components(), Substitution(tuple((x, self._resolve_deep(s)) for x, s in t.sub.pairs), t.sub.codomain))
            case Can(subject, wit):
                return Can(self._resolve_deep(subject), tuple((x, self._resolve_deep(w)) for x, w in wit))
            case Destr(kind, arg):
                return Destr(kind, self._resolve_deep(arg))
            case _:
                return t

    def _apply_schema(
        self, schema: _Schema, args: tuple, expected: Type | None, span
    ) -> tuple[Term, Type | None]:
        explicit = explicit_positions(schema.telescope)
        if len(args) != len(explicit):
            raise ArityError(
                f"expected {len(explicit)} explicit argument(s), got {len(args)}", span=span
            )
        # first pass: elaborate what can stand alone, to find the
        # suspension level from the argument dimensions
        pre: dict[int, tuple[Term, Type | None]] = {}
        susp = None
        for i, (pos, a) in enumerate(zip(explicit, args)):
            if isinstance(a, SWild):
                continue
            snapshot = dict(self.metas.solutions)
            try:
                term, ty = self.elab_infer(a)
            except IcattError:
                self.metas.solutions = snapshot
                continue
            pre[i] = (term, ty)
            ty = self._zonkish_type(ty)
            if susp is None and ty is not None:
                slot_dim = dim_type(schema.telescope.entries[pos][1])
                susp = dim_type(ty) - slot_dim
        if susp is None:
            exp_dim = self._expected_dim(expected)
            if exp_dim is not None:
                susp = exp_dim - (dim_type(schema.ty) + 1)
        if susp is None:
            susp = 0
        if susp < 0:
            raise UnificationFailure("argument dimensions are below the definition's", span=span)
        for _ in range(susp):
            schema = _suspend_schema(schema)
        arg_data = [pre.get(i, a) for i, a in enumerate(args)]
        return self._apply_schema_core(schema, arg_data, expected, span)

    def _apply_schema_core(
        self, schema: _Schema, arg_data: list, expected: Type | None, span
    ) -> tuple[Term, Type | None]:
        """Instantiate a schema: explicit slots get the given arguments
        (surface terms are elaborated against the slot types), implicit
        slots get fresh metas solved by unification."""
        tele = schema.telescope
        explicit = explicit_positions(tele)
        assign: dict[str, Term] = {
            v.name: self.metas.fresh(v.name) for v, _ in tele
        }

        def slot_sub() -> Substitution:
            return Substitution(tuple((v, assign[v.name]) for v, _ in tele), tele)

        for pos, data in zip(explicit, arg_data):
            v, v_ty = tele.entries[pos]
            if isinstance(data, tuple):
                term, ty = data
            else:
                slot_expect = self._zonkish_type(apply_sub_type(v_ty, slot_sub()))
                term = self.elab_check(data, slot_expect)
                ty = None
            placeholder = assign[v.name]
            assign[v.name] = term
            if isinstance(placeholder, MetaRef):
                self.metas.solutions.setdefault(placeholder.uid, term)
            if ty is not None:
                slot_ty = apply_sub_type(v_ty, slot_sub())
                try:
                    self.unify_type(ty, slot_ty)
                except UnificationFailure as e:
                    raise UnificationFailure(
                        f"argument for {v.name} does not fit: {e.message}", span=span
                    )
        sub = slot_sub()
        out_ty = apply_sub_type(schema.ty, sub)
        if expected is not None:
            try:
                self.unify_type(self._zonkish_type(out_ty), self._zonkish_type(expected))
            except UnificationFailure as e:
                raise UnificationFailure(f"result does not fit here: {e.message}", span=span)
        if schema.kind == "coh":
            return Coh(tele, schema.ty, sub), out_ty
        if schema.kind == "term":
            return apply_sub_term(schema.term, sub), out_ty
        return Rec(*schema.components, sub), out_ty

    def _elab_can(self, s: SCan, expected: Type | None) -> tuple[Term, Type | None]:
        expected = self._zonkish_type(expected)
        subject_hint: Term | None = None
        if isinstance(expected, Inv):
            subject_hint = expected.subject
        if isinstance(s.subject, SWild):
            if subject_hint is None:
                raise BadCanSubject(
                    "cannot infer the subject of can here; write it explicitly", span=s.span
                )
            subject = self._resolve_deep(subject_hint)
        else:
            exp_subject_ty = expected.base if isinstance(expected, Inv) else None
            subject = self.elab_check(s.subject, exp_subject_ty)
            subject = self._resolve_deep(subject)
            if subject_hint is not None:
                self.unify_term(subject, subject_hint)
        if not isinstance(subject, Coh):
            raise BadCanSubject(
                "can needs a coherence cell subject (after inlining definitions)", span=s.span
            )
        cell_dim = dim_type(subject.ty) + 1
        tops = tuple(v for v, vty in subject.ps if dim_type(vty) + 1 == cell_dim)
        if len(s.witnesses) != len(tops):
            raise WrongWitnessSet(
                f"can needs {len(tops)} witness(es) for {[v.name for v in tops]}, "
                f"got {len(s.witnesses)}",
                span=s.span,
            )
        wit_pairs = []
        for x, w in zip(tops, s.witnesses):
            x_img = subject.sub.lookup(x)
            x_ty = apply_sub_type(subject.ps.lookup(x), subject.sub)
            assert isinstance(x_ty, Arr)
            wit_pairs.append((x, self.elab_check(w, Inv(x_ty, x_img))))
        out_ty = Inv(apply_sub_type(subject.ty, subject.sub), subject)
        return Can(subject, tuple(wit_pairs)), out_ty

    # -- types ---------------------------------------------------------------

    def elab_type(self, s: SurfaceType) -> Type:
        match s:
            case STStar():
                return Obj()
            case STInv(subject, span):
                term, ty = self.elab_infer(subject)
                ty = self._zonkish_type(ty)
                if not isinstance(ty, Arr):
                    raise TypeMismatch(
                        "invertibility needs a positive-dimensional subject", span=span
                    )
                return Inv(ty, term)
            case STArrow(src, tgt, span):
                s_term, s_ty = self.elab_infer(src)
                t_term, t_ty = self.elab_infer(tgt)
                if s_ty is not None and t_ty is not None:
                    try:
                        self.unify_type(s_ty, t_ty)
                    except UnificationFailure:
                        if self._concrete(s_ty) and self._concrete(t_ty):
                            raise IllFormedType(
                                "arrow endpoints live in different types "
                                f"({self.zonk_type(s_ty)} and {self.zonk_type(t_ty)})",
                                span=span,
                            )
                        raise
                base = self._zonkish_type(s_ty if s_ty is not None else t_ty)
                if base is None:
                    raise UnificationFailure("cannot infer the base of this arrow type", span=span)
                return Arr(base, s_term, t_term)
        raise TypeMismatch(f"not a surface type: {s!r}")


def _ctx_index(ctx: Context) -> dict[str, int]:
    return {v.name: i for i, (v, _) in enumerate(ctx)}


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------


RESERVED_NAMES = frozenset(
    ["comp", "id", "can", "Inv", "IHleft", "IHright", "coh", "let", "inv", "rec", "_"]
    + list(_DESTR_SURFACE)
)


def elaborate_decl(env: Environment, sdecl: SurfaceDecl):
    """Elaborate a surface declaration to a kernel declaration (not yet
    environment-checked)."""
    el = Elaborator(env)
    if sdecl.name in RESERVED_NAMES:
        raise ShadowedName(f"{sdecl.name} is a reserved name", span=sdecl.span)
    ctx = Context()
    for name, sty in sdecl.telescope:
        if name in RESERVED_NAMES:
            raise ShadowedName(f"{name} is a reserved name", span=sdecl.span)
        el.ctx = ctx
        ty = el.elab_type(sty)
        ty = el.zonk_type(ty)
        ctx = ctx.extend(Var(name), ty)
    el.ctx = ctx
    check_ctx(ctx)

    if sdecl.kind == "coh":
        ty = el.zonk_type(el.elab_type(sdecl.ty))
        return CohDecl(sdecl.name, ctx, ty)

    if sdecl.kind == "let":
        declared = el.elab_type(sdecl.ty) if sdecl.ty is not None else None
        body = el.elab_check(sdecl.body, declared)
        body = el.zonk_term(body)
        if declared is not None:
            ty = el.zonk_type(declared)
        else:
            ty = infer_term(ctx, body)
        return TermDecl(sdecl.name, ctx, body, ty)

    comps = sdecl.components or ()
    if len(comps) != 7:
        raise ArityError(
            f"{sdecl.kind} declarations take exactly 7 components, got {len(comps)}",
            span=sdecl.span,
        )
    if sdecl.kind == "rec":
        last = ctx.entries[-1][1] if ctx.entries else None
        if not isinstance(last, Inv) or not alpha_eq_context(ctx, walking_equiv(dim_type(last))):
            raise NotEquivContext(
                "the context of a recursive definition must be a walking equivalence",
                span=sdecl.span,
            )
    t_term, t_ty = el.elab_infer(comps[0])
    t_term = el.zonk_term(t_term)
    t_ty = infer_term(ctx, t_term)
    if not isinstance(t_ty, Arr):
        raise TypeMismatch("the first component must be positive-dimensional", span=sdecl.span)
    flipped = Arr(t_ty.base, t_ty.tgt, t_ty.src)
    tl = el.zonk_term(el.elab_check(comps[1], flipped))
    tr = el.zonk_term(el.elab_check(comps[2], flipped))
    left, _ = comp_of([(tl, flipped), (t_term, t_ty)])
    right, _ = comp_of([(t_term, t_ty), (tr, flipped)])
    lu_ty = Arr(Arr(t_ty.base, t_ty.tgt, t_ty.tgt), left, id_of(t_ty.tgt, t_ty.base))
    ru_ty = Arr(Arr(t_ty.base, t_ty.src, t_ty.src), right, id_of(t_ty.src, t_ty.base))
    tlu = el.zonk_term(el.elab_check(comps[3], lu_ty))
    tru = el.zonk_term(el.elab_check(comps[4], ru_ty))
    if sdecl.kind == "rec":
        ind_ctx, hm, hp = equiv_ind_context(ctx, t_term, t_ty)
        el.ctx = ind_ctx
        el.ih = ((hm, ind_ctx.lookup(hm)), (hp, ind_ctx.lookup(hp)))
    tilu = el.zonk_term(el.elab_check(comps[5], Inv(lu_ty, tlu)))
    tiru = el.zonk_term(el.elab_check(comps[6], Inv(ru_ty, tru)))
    el.ctx = ctx
    el.ih = None
    if sdecl.kind == "inv":
        body = Coind(t_term, tl, tr, tlu, tru, tilu, tiru)
        return TermDecl(sdecl.name, ctx, body, Inv(t_ty, t_term))
    return RecDecl(sdecl.name, ctx, (t_term, tl, tr, tlu, tru, tilu, tiru))
