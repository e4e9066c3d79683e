import sys
from pathlib import Path

import pytest

sys.setrecursionlimit(200000)

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "proofs" / "invertibility.catt"


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return CORPUS.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_decls(corpus_text):
    from icatt.parser import parse

    return parse(corpus_text)


@pytest.fixture(scope="session")
def corpus_env(corpus_decls):
    """The corpus elaborated and checked, with the kernel declarations
    in order."""
    from icatt.elaborate import elaborate_decl
    from icatt.kernel import Environment, check_decl

    env = Environment()
    checked = []
    for sdecl in corpus_decls:
        kdecl = elaborate_decl(env, sdecl)
        check_decl(env, kdecl)
        checked.append(kdecl)
    return env, checked


@pytest.fixture(scope="session")
def corpus_terms(corpus_env):
    """Every checked corpus term with its context and type: let/inv
    bodies, rec components (over the seed or its inductive extension),
    and one cell per declared coherence."""
    from icatt.kernel import CohDecl, RecDecl, TermDecl, infer_term
    from icatt.meta import equiv_ind_context
    from icatt.syntax import Coh, identity_sub

    env, checked = corpus_env
    out = []
    for decl in checked:
        if isinstance(decl, TermDecl):
            out.append((decl.name, decl.ctx, decl.term, decl.ty))
        elif isinstance(decl, CohDecl):
            cell = Coh(decl.ps, decl.ty, identity_sub(decl.ps))
            out.append((decl.name, decl.ps, cell, decl.ty))
        elif isinstance(decl, RecDecl):
            seed = decl.seed
            t = decl.components[0]
            t_ty = infer_term(seed, t)
            ind_ctx, _, _ = equiv_ind_context(seed, t, t_ty)
            for i, comp in enumerate(decl.components):
                ctx = seed if i < 5 else ind_ctx
                out.append((f"{decl.name}#{i}", ctx, comp, infer_term(ctx, comp)))
    return out
