"""Command-line driver.

``icatt check FILE...`` parses, elaborates and kernel-checks each file
in order, printing one line per accepted declaration.  Files share one
growing environment, so later files may use earlier declarations.
Exit status is 0 when everything checks, 1 on the first failed
declaration (or after reporting all failures with ``--keep-going``),
2 on usage errors.

The analysis flags delegate to the walking-equivalence machinery:
``--neutral-count N`` prints the number of neutral categorical terms in
dimension N, ``--equiv-trunc N`` prints the N-truncation context, and
``--check-gamma N`` verifies the variable-to-neutral correspondence.
"""

from __future__ import annotations

import argparse
import sys

from .elaborate import elaborate_decl
from .errors import IcattError
from .kernel import Environment, RecDecl, TermDecl, check_decl
from .normalize import beta_reduce, nf
from .parser import parse
from .printer import print_context, print_term, print_type
from .syntax import Inv, dim_type


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="icatt", description=__doc__)
    ap.add_argument("--neutral-count", type=int, metavar="N",
                    help="print the number of neutral categorical terms of dimension N")
    ap.add_argument("--equiv-trunc", type=int, metavar="N",
                    help="print the N-truncation of the walking equivalence")
    ap.add_argument("--check-gamma", type=int, metavar="N",
                    help="check the variable-to-neutral correspondence up to stage N")
    sub = ap.add_subparsers(dest="command")
    chk = sub.add_parser("check", help="type-check proof scripts")
    chk.add_argument("files", nargs="+", metavar="FILE")
    chk.add_argument("--verbose", action="store_true", help="print judgment details")
    chk.add_argument("--keep-going", action="store_true",
                     help="report all failing declarations instead of stopping at the first")
    chk.add_argument("--dump-nf", metavar="NAME",
                     help="print the guarded normal form of a declaration after checking")
    return ap


def _run_check(args) -> int:
    status = 0
    env = Environment()
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            print(f"icatt: cannot read {path}: {exc}", file=sys.stderr)
            return 2
        try:
            decls = parse(text)
        except IcattError as exc:
            print(f"{path}:{exc}", file=sys.stderr)
            return 1
        for sdecl in decls:
            try:
                kdecl = elaborate_decl(env, sdecl)
                check_decl(env, kdecl)
            except IcattError as exc:
                print(f"{path}: {sdecl.kind} {sdecl.name}: {exc}", file=sys.stderr)
                status = 1
                if not args.keep_going:
                    return 1
                continue
            line = f"checked {sdecl.kind} {sdecl.name}"
            if args.verbose:
                line += f"  [{_describe(kdecl)}]"
            print(line)
    if args.dump_nf is not None and status == 0:
        decl = env.lookup(args.dump_nf)
        if decl is None:
            print(f"icatt: no declaration named {args.dump_nf}", file=sys.stderr)
            return 2
        print(_dump_nf(decl))
    return status


def _describe(decl) -> str:
    if isinstance(decl, TermDecl):
        return f"{print_context(decl.ctx)} |- {print_term(decl.term)} : {print_type(decl.ty)}"
    if isinstance(decl, RecDecl):
        return f"rec over {print_context(decl.seed)}"
    return f"{print_context(decl.ps)} |- {print_type(decl.ty)}"


def _dump_nf(decl) -> str:
    if isinstance(decl, TermDecl):
        if isinstance(decl.ty, Inv):
            normal = beta_reduce(decl.term)
        else:
            normal = nf(decl.ctx, decl.term, dim_type(decl.ty) + 1)
        return f"nf {decl.name} = {print_term(normal)}"
    if isinstance(decl, RecDecl):
        return f"nf {decl.name} = rec schema over {print_context(decl.seed)}"
    return f"nf {decl.name} = coherence schema : {print_type(decl.ty)}"


def main(argv: list[str] | None = None) -> int:
    sys.setrecursionlimit(200000)
    ap = _build_parser()
    args = ap.parse_args(argv)
    ran_analysis = False
    if args.neutral_count is not None:
        from .equiv import enumerate_neutrals

        print(len(enumerate_neutrals(args.neutral_count)))
        ran_analysis = True
    if args.equiv_trunc is not None:
        from .equiv import equiv_truncation

        try:
            trunc = equiv_truncation(args.equiv_trunc)
        except IcattError as exc:
            print(f"icatt: {exc}", file=sys.stderr)
            return 2
        print(print_context(trunc.ctx))
        ran_analysis = True
    if args.check_gamma is not None:
        from .equiv import check_gamma

        report = check_gamma(args.check_gamma)
        print(
            f"gamma^{report.stage}: checked={report.checked} "
            f"bijection={report.bijection} equations={report.equations} "
            f"counts={report.counts}"
        )
        for line in report.details:
            print(f"  {line}")
        if not report.ok:
            return 1
        ran_analysis = True
    if args.command == "check":
        return _run_check(args)
    if not ran_analysis:
        ap.print_usage(sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
