"""The rewrite system: beta-reduction, dimension-guarded eta-expansion,
the normal-form procedure for categorical entities, and the
conservativity erasure check.

Beta-reduction fires whenever a destructor meets a constructor head and
is applied exhaustively, innermost first.  Eta-expansion replaces an
invertibility structure by the coinductive tuple of its destructor
images; it is guarded by dimension, never applied under a destructor,
and applied at most once per position, which keeps the restricted
system terminating.
"""

from __future__ import annotations

from .errors import BoundExceeded, NotCategorical
from .inverse import canonical_component
from .meta import instantiation
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
    apply_sub_term,
    compose_sub,
    dim_type,
    identity_sub,
)

_COIND_COMPONENT = {"linv": 1, "rinv": 2, "lunit": 3, "runit": 4, "lwit": 5, "rwit": 6}

_BETA_FUEL = 1_000_000

# beta-normal forms memoised per (immutable, shared) object; holding the
# object keeps its id valid
_BETA_CACHE: dict[int, tuple[Term, Term]] = {}


def beta_step(t: Term) -> Term | None:
    """One beta-contraction at the root, if the root is a redex."""
    if not isinstance(t, Destr):
        return None
    kind, arg = t.kind, t.arg
    match arg:
        case Coind():
            return arg.components()[_COIND_COMPONENT[kind]]
        case Can():
            return canonical_component(arg, kind)
        case Rec():
            gamma = arg.sub
            seed = gamma.codomain
            if kind in ("linv", "rinv", "lunit", "runit"):
                comp = arg.components()[_COIND_COMPONENT[kind]]
                return apply_sub_term(comp, gamma)
            # witness rules: instantiate the inductive hypotheses with
            # the recursive call over the seed context, then substitute
            from .kernel import infer_term

            t_ty = infer_term(seed, arg.t)
            rec_over_seed = Rec(*arg.components(), identity_sub(seed))
            inst = instantiation(seed, rec_over_seed, arg.t, t_ty)
            comp = arg.tilu if kind == "lwit" else arg.tiru
            return apply_sub_term(comp, compose_sub(inst, gamma))
    return None


def beta_reduce(t: Term, fuel: int = _BETA_FUEL) -> Term:
    """Exhaustive beta-normalisation (innermost first, with sharing)."""
    remaining = fuel

    def go(term: Term) -> Term:
        nonlocal remaining
        hit = _BETA_CACHE.get(id(term))
        if hit is not None and hit[0] is term:
            return hit[1]
        mapped = _map_subterms(term, go)
        step = beta_step(mapped)
        if step is None:
            result = mapped
        else:
            remaining -= 1
            if remaining <= 0:
                raise BoundExceeded("beta-reduction fuel exhausted")
            result = go(step)
        _BETA_CACHE[id(term)] = (term, result)
        if mapped is not term:
            _BETA_CACHE[id(mapped)] = (mapped, result)
        _BETA_CACHE[id(result)] = (result, result)
        return result

    return go(t)


def _map_subterms(t: Term, f) -> Term:
    match t:
        case Coh(ps, ty, sub):
            return Coh(ps, ty, Substitution(tuple((x, f(s)) for x, s in sub.pairs), sub.codomain))
        case Coind():
            return Coind(*(f(c) for c in t.components()))
        case Rec():
            new_sub = Substitution(tuple((x, f(s)) for x, s in t.sub.pairs), t.sub.codomain)
            return Rec(t.t, t.tl, t.tr, t.tlu, t.tru, t.tilu, t.tiru, new_sub)
        case Can(subject, wit):
            return Can(f(subject), tuple((x, f(w)) for x, w in wit))
        case Destr(kind, arg):
            return Destr(kind, f(arg))
        case _:
            return t


def eta_expand_once(e: Term, subject: Term) -> Coind:
    """The coinductive tuple of destructor images of an invertibility
    structure on ``subject``."""
    return Coind(
        subject,
        Destr("linv", e),
        Destr("rinv", e),
        Destr("lunit", e),
        Destr("runit", e),
        Destr("lwit", e),
        Destr("rwit", e),
    )


def _eta_pass(t: Term, guard: int) -> Term:
    """Expand invertibility subterms of dimension at most ``guard`` not
    under a destructor, once each, recursing into the new components.

    In a beta-normal categorical term such positions only occur inside
    surviving constructor tuples, so this is usually the identity.
    """

    def expand_at(e: Term, subject: Term, subject_dim: int) -> Term:
        if subject_dim > guard or isinstance(e, Coind):
            return go(e)
        expanded = eta_expand_once(go(e), go(subject))
        return go(beta_reduce(expanded))

    def go(term: Term) -> Term:
        match term:
            case Destr(kind, arg):
                # no eta-expansion under a destructor
                return Destr(kind, go(arg))
            case Coind():
                comps = term.components()
                out = [go(c) for c in comps[:5]]
                # the witness components are structures on the
                # cancellation cells, whose dimension is read off the
                # syntax (a bare-variable subject counts as expandable)
                dim_up = _term_dim_bound(comps[3])
                out.append(expand_at(comps[5], comps[3], dim_up))
                out.append(expand_at(comps[6], comps[4], dim_up))
                return Coind(*out)
            case Can(subject, wit):
                assert isinstance(subject, Coh)
                new_wit = []
                for x, w in wit:
                    x_img = subject.sub.lookup(x)
                    x_dim = dim_type(subject.ps.lookup(x)) + 1
                    new_wit.append((x, expand_at(w, x_img, x_dim)))
                return Can(go(subject), tuple(new_wit))
            case Rec():
                new_pairs = []
                for x, s in term.sub.pairs:
                    x_ty = term.sub.codomain.lookup(x)
                    if isinstance(x_ty, Inv):
                        subj = apply_sub_term(x_ty.subject, term.sub)
                        new_pairs.append((x, expand_at(s, subj, dim_type(x_ty.base) + 1)))
                    else:
                        new_pairs.append((x, go(s)))
                return Rec(*term.components(), Substitution(tuple(new_pairs), term.sub.codomain))
            case _:
                return _map_subterms(term, go)

    return go(t)


def _term_dim_bound(t: Term) -> int:
    """Dimension of a checked term, read off its syntax (coherences and
    destructor results carry their type)."""
    match t:
        case Coh(_, ty, _):
            return dim_type(ty) + 1
        case Destr(kind, arg):
            inner = _term_dim_bound(arg)
            if kind in ("lunit", "runit", "lwit", "rwit"):
                return inner + 1
            return inner
        case Coind() | Can():
            return _term_dim_bound(t.components()[0] if isinstance(t, Coind) else t.subject)
        case Rec():
            return _term_dim_bound(t.t)
        case _:
            # a bare variable: no syntactic dimension; treat as 0 so the
            # guard always allows expansion at variable subjects
            return 0


def nf(ctx: Context, entity, n: int):
    """Normal form of an n-dimensional categorical term or type.

    Beta-normalises exhaustively, then eta-expands invertibility
    subterms of dimension at most n that are not under a destructor.
    """
    if isinstance(entity, (Obj, Arr)):
        match entity:
            case Obj():
                return entity
            case Arr(base, src, tgt):
                return Arr(nf(ctx, base, n - 1), nf(ctx, src, n), nf(ctx, tgt, n))
    if isinstance(entity, Inv):
        raise NotCategorical("normal forms are defined for categorical entities only")
    reduced = beta_reduce(entity)
    return _eta_pass(reduced, n)


def _mentions_inv_term(t: Term) -> bool:
    match t:
        case Destr() | Coind() | Can() | Rec():
            return True
        case Coh(ps, ty, sub):
            if any(isinstance(vty, Inv) for _, vty in ps) or _mentions_inv_type(ty):
                return True
            return any(_mentions_inv_term(s) for s in sub.terms())
        case _:
            return False


def _mentions_inv_type(ty: Type) -> bool:
    match ty:
        case Obj():
            return False
        case Arr(base, src, tgt):
            return _mentions_inv_type(base) or _mentions_inv_term(src) or _mentions_inv_term(tgt)
        case Inv():
            return True
    return False


def erase_check(ctx: Context, entity, n: int) -> bool:
    """Conservativity check: over an Inv-free context, the normal form
    of a categorical entity contains no invertibility syntax."""
    if any(isinstance(ty, Inv) for _, ty in ctx):
        raise NotCategorical("erasure is only meaningful over an Inv-free context")
    normal = nf(ctx, entity, n)
    if isinstance(normal, (Obj, Arr, Inv)):
        return not _mentions_inv_type(normal)
    return not _mentions_inv_term(normal)
