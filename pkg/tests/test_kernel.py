"""Kernel judgments: contexts, types, terms, substitutions, pasting
recognition and fullness, conversion, environment."""

import itertools

import pytest

from icatt.builtins import comp_of, id_of
from icatt.errors import (
    BadSubstitution,
    DuplicateVariable,
    IllFormedType,
    NotFull,
    NotPasting,
    ShadowedName,
    TypeMismatch,
    WrongWitnessSet,
)
from icatt.kernel import (
    CohDecl,
    Environment,
    TermDecl,
    check_ctx,
    check_decl,
    check_ps,
    check_sub,
    check_term,
    check_type,
    convertible,
    full_type,
    infer_term,
)
from icatt.meta import disk, walking_equiv
from icatt.normalize import eta_expand_once
from icatt.syntax import (
    Arr,
    alpha_eq_term,
    Can,
    Coh,
    Coind,
    Context,
    Destr,
    Inv,
    Obj,
    Substitution,
    Var,
    VarRef,
    alpha_key_context,
    identity_sub,
)


def arr0(s, t):
    return Arr(Obj(), VarRef(Var(s)), VarRef(Var(t)))


def v(name):
    return VarRef(Var(name))


TWO_CHAIN = Context((
    (Var("x"), Obj()), (Var("y"), Obj()), (Var("f"), arr0("x", "y")),
    (Var("z"), Obj()), (Var("g"), arr0("y", "z")),
))

GLOBULAR = Context((
    (Var("x"), Obj()), (Var("y"), Obj()),
    (Var("f"), arr0("x", "y")), (Var("g"), arr0("x", "y")),
    (Var("a"), Arr(arr0("x", "y"), v("f"), v("g"))),
    (Var("h"), arr0("x", "x")),
))

PASTING_2 = Context((
    (Var("x"), Obj()), (Var("y"), Obj()),
    (Var("f"), arr0("x", "y")), (Var("g"), arr0("x", "y")),
    (Var("a"), Arr(arr0("x", "y"), v("f"), v("g"))),
    (Var("z"), Obj()), (Var("h"), arr0("y", "z")),
))


# -- contexts ----------------------------------------------------------------


def test_empty_context_ok():
    check_ctx(Context())


def test_globular_context_ok():
    check_ctx(GLOBULAR)


def test_duplicate_variable_rejected():
    with pytest.raises(DuplicateVariable):
        check_ctx(Context(((Var("x"), Obj()), (Var("x"), Obj()))))


# -- types -------------------------------------------------------------------


def test_obj_always_checks():
    check_type(TWO_CHAIN, Obj())


def test_arrow_endpoint_mismatch():
    with pytest.raises(IllFormedType):
        check_type(TWO_CHAIN, Arr(Obj(), v("x"), v("f")))


def test_inv_over_object_rejected():
    with pytest.raises(IllFormedType):
        check_type(TWO_CHAIN, Inv(Obj(), v("x")))


def test_inv_over_disk_ok():
    d1 = disk(1)
    check_type(d1, Inv(arr0("d0-", "d0+"), v("d1")))


# -- pasting diagrams ---------------------------------------------------------


def test_single_object_is_pasting():
    ps = check_ps(Context(((Var("x"), Obj()),)))
    assert ps.dim == 0


def test_pasting_example_sources_targets():
    ps = check_ps(PASTING_2)
    positive_src = set(ps.source_vars(1)) | set(ps.source_vars(2))
    positive_tgt = set(ps.target_vars(1)) | set(ps.target_vars(2))
    assert positive_src == {"f", "a", "h"}
    assert positive_tgt == {"g", "a", "h"}


def test_globular_context_not_pasting():
    with pytest.raises(NotPasting):
        check_ps(GLOBULAR)


def _ps_oracle_contexts(max_entries: int):
    """All pasting contexts with at most max_entries entries, derived
    directly by the four inference rules (up to alpha)."""
    out = {}
    fresh = itertools.count()

    def note(entries):
        ctx = Context(tuple(entries))
        out.setdefault(alpha_key_context(ctx), ctx)

    def explore(entries, focus_var, focus_ty):
        note(entries)
        if len(entries) + 2 <= max_entries:
            y = Var(f"v{next(fresh)}")
            f = Var(f"v{next(fresh)}")
            new = entries + [(y, focus_ty), (f, Arr(focus_ty, VarRef(focus_var), VarRef(y)))]
            explore(new, f, new[-1][1])
        if isinstance(focus_ty, Arr):
            explore(entries, focus_ty.tgt.var, focus_ty.base)

    x0 = Var(f"v{next(fresh)}")
    explore([(x0, Obj())], x0, Obj())
    return out


def test_check_ps_matches_rule_oracle():
    oracle = _ps_oracle_contexts(7)
    assert len(oracle) > 5
    for key, ctx in oracle.items():
        assert check_ps(ctx).ctx is ctx
    # mutations of derivable contexts must be rejected unless they are
    # themselves derivable
    for ctx in list(oracle.values()):
        entries = list(ctx.entries)
        if len(entries) < 3:
            continue
        for i, j in [(1, 2), (0, len(entries) - 1)]:
            swapped = entries[:]
            swapped[i], swapped[j] = swapped[j], swapped[i]
            mutated = Context(tuple(swapped))
            key = alpha_key_context(mutated)
            if key in oracle:
                check_ps(mutated)
            else:
                with pytest.raises(NotPasting):
                    check_ps(mutated)


# -- fullness ------------------------------------------------------------------


def test_composite_type_is_full():
    ps = check_ps(TWO_CHAIN)
    assert full_type(ps, arr0("x", "z"))
    assert not full_type(ps, arr0("x", "y"))


def test_identity_type_is_full():
    ps = check_ps(Context(((Var("x"), Obj()),)))
    assert full_type(ps, arr0("x", "x"))


def test_full_type_needs_arrow():
    ps = check_ps(TWO_CHAIN)
    with pytest.raises(NotFull):
        full_type(ps, Obj())


# -- term inference -------------------------------------------------------------


def test_comp_infers_endpoints():
    cell, ty = comp_of([(v("f"), arr0("x", "y")), (v("g"), arr0("y", "z"))])
    assert infer_term(TWO_CHAIN, cell) == arr0("x", "z")


def test_coherence_over_non_pasting_rejected():
    bad = Coh(GLOBULAR, arr0("x", "y"), identity_sub(GLOBULAR))
    with pytest.raises(NotPasting):
        infer_term(GLOBULAR, bad)


def test_non_full_coherence_rejected():
    bad = Coh(TWO_CHAIN, arr0("x", "y"), identity_sub(TWO_CHAIN))
    with pytest.raises(NotFull):
        infer_term(TWO_CHAIN, bad)


def test_destructor_table_over_walking_equiv():
    e1 = walking_equiv(1)
    e = v("e1")
    lu = infer_term(e1, Destr("lunit", e))
    assert isinstance(lu, Arr)
    left, _ = comp_of([(Destr("linv", e), arr0("d0+", "d0-")), (v("d1"), arr0("d0-", "d0+"))])
    assert lu.src == left
    assert lu.tgt == id_of(v("d0+"), Obj())
    assert infer_term(e1, Destr("lwit", e)) == Inv(lu, Destr("lunit", e))


def test_coind_premises_checked():
    e1 = walking_equiv(1)
    good = eta_expand_once(v("e1"), v("d1"))
    assert isinstance(infer_term(e1, good), Inv)
    bad = Coind(v("d1"), v("d1"), good.tr, good.tlu, good.tru, good.tilu, good.tiru)
    with pytest.raises(TypeMismatch):
        infer_term(e1, bad)


def test_can_wrong_witness_set():
    ctx = Context(TWO_CHAIN.entries + (
        (Var("ef"), Inv(arr0("x", "y"), v("f"))),
    ))
    cell, _ = comp_of([(v("f"), arr0("x", "y")), (v("g"), arr0("y", "z"))])
    with pytest.raises(WrongWitnessSet):
        infer_term(ctx, Can(cell, ((Var("f1"), v("ef")),)))


# -- substitutions ---------------------------------------------------------------


def test_empty_sub_into_empty():
    check_sub(TWO_CHAIN, Substitution((), Context()), Context())


def test_gamma0_checks():
    e1 = walking_equiv(1)
    e10 = Context(((Var("x"), Obj()), (Var("y"), Obj())))
    gamma0 = Substitution(((Var("x"), v("d0-")), (Var("y"), v("d0+"))), e10)
    check_sub(e1, gamma0, e10)


def test_swapped_assignments_rejected():
    cod = Context(((Var("x"), Obj()), (Var("y"), Obj()), (Var("f"), arr0("x", "y"))))
    bad = Substitution(
        ((Var("x"), v("y")), (Var("y"), v("x")), (Var("f"), v("f"))), cod
    )
    with pytest.raises(BadSubstitution):
        check_sub(TWO_CHAIN, bad, cod)


# -- conversion --------------------------------------------------------------------


def test_convertible_reflexive():
    assert convertible(TWO_CHAIN, v("f"), v("f"), arr0("x", "y"))


def test_beta_rule_is_conversion():
    e1 = walking_equiv(1)
    tup = eta_expand_once(v("e1"), v("d1"))
    assert convertible(e1, Destr("linv", tup), tup.tl, arr0("d0+", "d0-"))


def test_distinct_normal_forms_not_convertible():
    ctx = Context(((Var("x"), Obj()),))
    idx = id_of(v("x"), Obj())
    two = comp_of([(idx, arr0("x", "x")), (idx, arr0("x", "x"))])[0]
    assert not convertible(ctx, idx, two, arr0("x", "x"))


# -- environment ---------------------------------------------------------------------


def test_check_decl_and_shadowing():
    env = Environment()
    decl = CohDecl("idcoh", Context(((Var("x"), Obj()),)), arr0("x", "x"))
    check_decl(env, decl)
    with pytest.raises(ShadowedName):
        check_decl(env, decl)


def test_term_decl_recheck():
    env = Environment()
    ctx = Context(((Var("x"), Obj()),))
    idx = id_of(v("x"), Obj())
    check_decl(env, TermDecl("idx", ctx, idx, arr0("x", "x")))
    with pytest.raises(TypeMismatch):
        check_decl(env, TermDecl("bad", ctx, idx, Obj()))


def test_term_dimension():
    from icatt.kernel import term_dimension

    assert term_dimension(TWO_CHAIN, v("x")) == 0
    assert term_dimension(TWO_CHAIN, v("f")) == 1
    cell, _ = comp_of([(v("f"), arr0("x", "y")), (v("g"), arr0("y", "z"))])
    assert term_dimension(TWO_CHAIN, cell) == 1


def test_convertible_infers_kind_when_unannotated():
    e1 = walking_equiv(1)
    tup = eta_expand_once(v("e1"), v("d1"))
    assert convertible(e1, tup, tup)
    assert convertible(e1, v("d1"), v("d1"))


def test_check_term_converts_across_beta():
    """Declared and inferred types that differ by a destructor redex are
    identified by conversion."""
    from icatt.builtins import id_of

    e1 = walking_equiv(1)
    tup = eta_expand_once(v("e1"), v("d1"))
    declared = Arr(arr0("d0+", "d0-"), Destr("linv", tup), Destr("linv", v("e1")))
    term = id_of(Destr("linv", v("e1")), arr0("d0+", "d0-"))
    inferred = infer_term(e1, term)
    assert not alpha_eq_term(inferred.src, declared.src)
    check_term(e1, term, declared)
