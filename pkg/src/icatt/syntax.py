"""Raw syntax of the theory: types, terms, contexts, substitutions.

Terms and types are immutable trees.  Variables are named; equality of
entities that contain binders (the pasting context of a coherence, the
seed context of a recursive definition) is alpha-insensitive, via
:func:`alpha_key`.  Free variables always compare by name, so two terms
over the same ambient context are equal exactly when they denote the
same syntax up to renaming of bound contexts.

The six destructors are identified by the strings in :data:`DESTRUCTORS`
("lwit"/"rwit" are the invertibility witnesses of the left/right
cancellation cells, written ``ilunit``/``irunit`` in source files).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .errors import DuplicateVariable, UnboundVariable

DESTRUCTORS = ("linv", "rinv", "lunit", "runit", "lwit", "rwit")

# destructors whose argument and result are both invertibility data
WITNESS_DESTRUCTORS = ("lwit", "rwit")


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Obj:
    """The base type of objects (0-cells)."""


@dataclass(frozen=True)
class Arr:
    """Arrow type between two parallel terms of a common base type."""

    base: Type
    src: Term
    tgt: Term


@dataclass(frozen=True)
class Inv:
    """Type of invertibility structures on ``subject : base``."""

    base: Type  # always an Arr in checked syntax
    subject: Term


Type = Union[Obj, Arr, Inv]


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarRef:
    var: Var


@dataclass(frozen=True)
class Coh:
    """A coherence cell: a pasting context, a full type over it, and the
    substitution instantiating it in the ambient context."""

    ps: Context
    ty: Type
    sub: Substitution


@dataclass(frozen=True)
class Coind:
    """Direct coinductive invertibility tuple."""

    t: Term
    tl: Term
    tr: Term
    tlu: Term
    tru: Term
    tilu: Term
    tiru: Term

    def components(self) -> tuple[Term, ...]:
        return (self.t, self.tl, self.tr, self.tlu, self.tru, self.tilu, self.tiru)


@dataclass(frozen=True)
class Rec:
    """Recursive invertibility definition.

    The first five components live over ``sub.codomain`` (a walking
    equivalence), the last two over its inductive extension; ``sub``
    instantiates the seed context in the ambient context.
    """

    t: Term
    tl: Term
    tr: Term
    tlu: Term
    tru: Term
    tilu: Term
    tiru: Term
    sub: Substitution

    def components(self) -> tuple[Term, ...]:
        return (self.t, self.tl, self.tr, self.tlu, self.tru, self.tilu, self.tiru)


@dataclass(frozen=True)
class Can:
    """Canonical invertibility structure on a coherence cell.

    ``witnesses`` maps the top-dimensional variables of the subject's
    pasting context (in telescope order) to invertibility structures on
    their images.
    """

    subject: Term  # a Coh in checked syntax
    witnesses: tuple[tuple[Var, Term], ...]


@dataclass(frozen=True)
class Destr:
    kind: str  # one of DESTRUCTORS
    arg: Term


@dataclass(frozen=True)
class MetaRef:
    """An unsolved elaboration metavariable.  Never reaches the kernel:
    declarations are zonked before checking."""

    uid: int
    hint: str = "_"


Term = Union[VarRef, Coh, Coind, Rec, Can, Destr, MetaRef]


# ---------------------------------------------------------------------------
# Contexts and substitutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Context:
    entries: tuple[tuple[Var, Type], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[Var, Type]]:
        return iter(self.entries)

    def vars(self) -> tuple[Var, ...]:
        return tuple(v for v, _ in self.entries)

    def names(self) -> set[str]:
        return {v.name for v, _ in self.entries}

    def lookup(self, var: Var) -> Type:
        for v, ty in self.entries:
            if v.name == var.name:
                return ty
        raise UnboundVariable(f"variable {var.name} not in context")

    def has(self, var: Var) -> bool:
        return any(v.name == var.name for v, _ in self.entries)

    def extend(self, var: Var, ty: Type) -> Context:
        if self.has(var):
            raise DuplicateVariable(f"variable {var.name} already in context")
        return Context(self.entries + ((var, ty),))


@dataclass(frozen=True)
class Substitution:
    """Ordered assignments onto the variables of ``codomain``."""

    pairs: tuple[tuple[Var, Term], ...]
    codomain: Context

    def lookup(self, var: Var) -> Term:
        for v, t in self.pairs:
            if v.name == var.name:
                return t
        raise UnboundVariable(f"substitution does not assign {var.name}")

    def terms(self) -> tuple[Term, ...]:
        return tuple(t for _, t in self.pairs)


def identity_sub(ctx: Context) -> Substitution:
    return Substitution(tuple((v, VarRef(v)) for v, _ in ctx), ctx)


def empty_sub() -> Substitution:
    return Substitution((), Context())


# ---------------------------------------------------------------------------
# Substitution action
# ---------------------------------------------------------------------------


def apply_sub_type(ty: Type, sub: Substitution) -> Type:
    match ty:
        case Obj():
            return ty
        case Arr(base, src, tgt):
            return Arr(apply_sub_type(base, sub), apply_sub_term(src, sub), apply_sub_term(tgt, sub))
        case Inv(base, subject):
            return Inv(apply_sub_type(base, sub), apply_sub_term(subject, sub))
    raise TypeError(f"not a type: {ty!r}")


def apply_sub_term(t: Term, sub: Substitution) -> Term:
    match t:
        case VarRef(v):
            return sub.lookup(v)
        case MetaRef():
            return t
        case Coh(ps, ty, inner):
            return Coh(ps, ty, compose_sub(inner, sub))
        case Coind():
            return Coind(*(apply_sub_term(c, sub) for c in t.components()))
        case Rec():
            return Rec(t.t, t.tl, t.tr, t.tlu, t.tru, t.tilu, t.tiru, compose_sub(t.sub, sub))
        case Can(subject, wit):
            return Can(apply_sub_term(subject, sub), tuple((x, apply_sub_term(w, sub)) for x, w in wit))
        case Destr(kind, arg):
            return Destr(kind, apply_sub_term(arg, sub))
    raise TypeError(f"not a term: {t!r}")


def compose_sub(first: Substitution, second: Substitution) -> Substitution:
    """Pointwise composition: apply ``second`` to the terms of ``first``."""
    return Substitution(tuple((v, apply_sub_term(t, second)) for v, t in first.pairs), first.codomain)


# ---------------------------------------------------------------------------
# Dimension
# ---------------------------------------------------------------------------


def dim_type(ty: Type) -> int:
    match ty:
        case Obj():
            return -1
        case Arr(base, _, _):
            return dim_type(base) + 1
        case Inv(base, _):
            # the dimension of an invertibility structure is the
            # dimension of its subject
            return dim_type(base) + 1
    raise TypeError(f"not a type: {ty!r}")


def dim_context(ctx: Context) -> int:
    return max((dim_type(ty) + 1 for _, ty in ctx), default=-1)


# ---------------------------------------------------------------------------
# Free variables
# ---------------------------------------------------------------------------


def variables_used_term(t: Term, acc: dict[str, Var] | None = None) -> dict[str, Var]:
    """Free variables of a term, in first-occurrence order.

    Variables bound by an internal context (the pasting context of a
    coherence, the seed of a recursive definition) do not occur free;
    what does occur free are the terms assigned by the attached
    substitution, witness images and so on.
    """
    out: dict[str, Var] = {} if acc is None else acc
    match t:
        case VarRef(v):
            out.setdefault(v.name, v)
        case Coh(_, _, sub):
            for _, s in sub.pairs:
                variables_used_term(s, out)
        case Coind():
            for c in t.components():
                variables_used_term(c, out)
        case Rec():
            for _, s in t.sub.pairs:
                variables_used_term(s, out)
        case Can(subject, wit):
            variables_used_term(subject, out)
            for _, w in wit:
                variables_used_term(w, out)
        case Destr(_, arg):
            variables_used_term(arg, out)
        case MetaRef():
            pass
        case _:
            raise TypeError(f"not a term: {t!r}")
    return out


def variables_used_type(ty: Type, acc: dict[str, Var] | None = None) -> dict[str, Var]:
    out: dict[str, Var] = {} if acc is None else acc
    match ty:
        case Obj():
            pass
        case Arr(base, src, tgt):
            variables_used_type(base, out)
            variables_used_term(src, out)
            variables_used_term(tgt, out)
        case Inv(base, subject):
            variables_used_type(base, out)
            variables_used_term(subject, out)
        case _:
            raise TypeError(f"not a type: {ty!r}")
    return out


def fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Alpha-invariant canonical keys
# ---------------------------------------------------------------------------

# Syntax trees are immutable and heavily shared after substitution, so
# canonical keys are memoised per object for the closed (no enclosing
# binder) case, which dominates.  The table holds strong references so
# object ids stay valid.
_KEY_CACHE: dict[int, tuple[object, object]] = {}


def _cached_key(obj, compute):
    hit = _KEY_CACHE.get(id(obj))
    if hit is not None and hit[0] is obj:
        return hit[1]
    key = compute()
    _KEY_CACHE[id(obj)] = (obj, key)
    return key


def alpha_key_type(ty: Type, bound: dict[str, int] | None = None):
    b = bound or {}
    if not b:
        return _cached_key(ty, lambda: _alpha_key_type_raw(ty, b))
    return _alpha_key_type_raw(ty, b)


def _alpha_key_type_raw(ty: Type, b: dict[str, int]):
    match ty:
        case Obj():
            return ("obj",)
        case Arr(base, src, tgt):
            return ("arr", alpha_key_type(base, b), alpha_key_term(src, b), alpha_key_term(tgt, b))
        case Inv(base, subject):
            return ("inv", alpha_key_type(base, b), alpha_key_term(subject, b))
    raise TypeError(f"not a type: {ty!r}")


def alpha_key_term(t: Term, bound: dict[str, int] | None = None):
    b = bound or {}
    if not b:
        return _cached_key(t, lambda: _alpha_key_term_raw(t, b))
    return _alpha_key_term_raw(t, b)


def _alpha_key_term_raw(t: Term, b: dict[str, int]):
    match t:
        case VarRef(v):
            if v.name in b:
                return ("bv", b[v.name])
            return ("fv", v.name)
        case Coh(ps, ty, sub):
            pk, pb = _alpha_key_ctx(ps)
            return ("coh", pk, alpha_key_type(ty, pb), tuple(alpha_key_term(s, b) for s in sub.terms()))
        case Coind():
            return ("coind",) + tuple(alpha_key_term(c, b) for c in t.components())
        case Rec():
            ek, eb = _alpha_key_ctx(t.sub.codomain)
            # the last two components see the two inductive-hypothesis
            # variables appended after the seed context
            comps = t.components()
            keys = [alpha_key_term(c, eb) for c in comps[:5]]
            ebh = dict(eb)
            for i, hv in enumerate(_rec_hyp_names(t)):
                ebh[hv] = len(eb) + i
            keys += [alpha_key_term(c, ebh) for c in comps[5:]]
            return ("rec", ek, tuple(keys), tuple(alpha_key_term(s, b) for s in t.sub.terms()))
        case Can(subject, wit):
            return ("can", alpha_key_term(subject, b), tuple(alpha_key_term(w, b) for _, w in wit))
        case Destr(kind, arg):
            return ("destr", kind, alpha_key_term(arg, b))
        case MetaRef(uid, _):
            return ("meta", uid)
    raise TypeError(f"not a term: {t!r}")


def _rec_hyp_names(t: Rec) -> tuple[str, str]:
    """Names of the inductive-hypothesis variables of a Rec node.

    They are generated deterministically from the seed context, so they
    can be recomputed instead of stored (see meta.equiv_ind_context).
    """
    avoid = t.sub.codomain.names()
    return fresh_name("h-", avoid), fresh_name("h+", avoid)


def _alpha_key_ctx(ctx: Context):
    def compute():
        b: dict[str, int] = {}
        keys = []
        for v, ty in ctx:
            keys.append(alpha_key_type(ty, b))
            b[v.name] = len(b)
        return tuple(keys), b

    return _cached_key(ctx, compute)


def alpha_key_context(ctx: Context):
    return _alpha_key_ctx(ctx)[0]


def alpha_key_sub(sub: Substitution, bound: dict[str, int] | None = None):
    return (alpha_key_context(sub.codomain), tuple(alpha_key_term(t, bound) for t in sub.terms()))


def alpha_eq_term(a: Term, b: Term) -> bool:
    return alpha_key_term(a) == alpha_key_term(b)


def alpha_eq_type(a: Type, b: Type) -> bool:
    return alpha_key_type(a) == alpha_key_type(b)


def alpha_eq_context(a: Context, b: Context) -> bool:
    return alpha_key_context(a) == alpha_key_context(b)


def rename_vars_type(ty: Type, mapping: dict[str, str]) -> Type:
    sub = _renaming_sub(mapping)
    return _rename_type(ty, sub)


def rename_vars_term(t: Term, mapping: dict[str, str]) -> Term:
    sub = _renaming_sub(mapping)
    return _rename_term(t, sub)


def _renaming_sub(mapping: dict[str, str]) -> dict[str, Term]:
    return {old: VarRef(Var(new)) for old, new in mapping.items()}


def _rename_term(t: Term, m: dict[str, Term]) -> Term:
    match t:
        case VarRef(v):
            return m.get(v.name, t)
        case Coh(ps, ty, sub):
            return Coh(ps, ty, Substitution(tuple((x, _rename_term(s, m)) for x, s in sub.pairs), sub.codomain))
        case Coind():
            return Coind(*(_rename_term(c, m) for c in t.components()))
        case Rec():
            new_sub = Substitution(tuple((x, _rename_term(s, m)) for x, s in t.sub.pairs), t.sub.codomain)
            return Rec(t.t, t.tl, t.tr, t.tlu, t.tru, t.tilu, t.tiru, new_sub)
        case Can(subject, wit):
            return Can(_rename_term(subject, m), tuple((x, _rename_term(w, m)) for x, w in wit))
        case Destr(kind, arg):
            return Destr(kind, _rename_term(arg, m))
        case MetaRef():
            return t
    raise TypeError(f"not a term: {t!r}")


def _rename_type(ty: Type, m: dict[str, Term]) -> Type:
    match ty:
        case Obj():
            return ty
        case Arr(base, src, tgt):
            return Arr(_rename_type(base, m), _rename_term(src, m), _rename_term(tgt, m))
        case Inv(base, subject):
            return Inv(_rename_type(base, m), _rename_term(subject, m))
    raise TypeError(f"not a type: {ty!r}")
