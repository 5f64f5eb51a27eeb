"""Command-line front end.

Exit codes: 0 success, 1 input or usage error, 2 numerical non-convergence,
3 failed invariant (uncertified eigenpair or failing reproduction check).
"""

from __future__ import annotations

import argparse
import sys

from . import formats
from .cheeger import cheeger_exact
from .errors import NoConvergence, PCheegerError
from .linear import (
    ANTITREE,
    DEFAULT_HORIZON,
    SCHEMES,
    TREE,
    Branching,
    ModelSpec,
    build_linear,
    cheeger_linear,
    model_row,
)
from .spectral import SolverConfig, first_eigenpair, max_eigenpair_bipartite
from .symmetry import (
    certify_orbit_partition,
    enumerate_automorphisms,
    orbits,
    quotient,
    validate_equitable,
    verify_quotient_invariance,
)

EXIT_OK, EXIT_INPUT, EXIT_NO_CONVERGENCE, EXIT_INVARIANT = 0, 1, 2, 3


def _emit(obj) -> None:
    print(formats.dumps(obj))


def _cfg(args) -> SolverConfig:
    return SolverConfig(rng_seed=args.seed)


def _load_domain(path: str):
    return formats.domain_from_json(formats.load_json(path))


def _text_pair(pair, domain) -> str:
    vec = ", ".join(f"{v}={x:.9g}" for v, x in zip(domain.interior, pair.u))
    flag = "certified" if pair.certified else "NOT certified"
    return f"{pair.kind} p={pair.p:.9g} lambda={pair.lam:.9g} residual={pair.residual:.3g} {flag}\n  {vec}"


def cmd_eigen(args) -> int:
    domain = _load_domain(args.domain)
    cfg = _cfg(args)
    out = []
    ok = True
    for p in args.p:
        pairs = [first_eigenpair(domain, p, cfg)]
        if args.max:
            pairs.append(max_eigenpair_bipartite(domain, p, cfg))
        for pair in pairs:
            ok = ok and pair.certified
            out.append((pair, {"kind": pair.kind, **pair.as_dict(domain)}))
    if args.format == "text":
        print("\n".join(_text_pair(pair, domain) for pair, _ in out))
    else:
        data = [d for _, d in out]
        _emit(data[0] if len(data) == 1 else data)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_cheeger(args) -> int:
    domain = _load_domain(args.domain)
    cells = None
    if args.orbit_restrict:
        part = formats.partition_from_json(formats.load_json(args.orbit_restrict))
        cells = part.index_cells(domain)
    res = cheeger_exact(domain, args.cap, cells)
    if args.format == "text":
        print(f"h = {res.h}")
        for c in res.cuts:
            print("  cut: " + " ".join(c))
        print(f"subsets examined: {res.subsets_examined}")
    else:
        _emit(res.as_dict())
    return EXIT_OK


def cmd_autgroup(args) -> int:
    domain = _load_domain(args.domain)
    group = enumerate_automorphisms(domain, args.cap)
    part = orbits(group, domain)
    data = {
        "size": group.size,
        "elements": [{domain.interior[i]: domain.interior[j] for i, j in enumerate(g)} for g in group.elements],
        **part.as_dict(),
    }
    if args.format == "text":
        print(f"group size {group.size}")
        for cell in part.cells:
            print("  orbit: " + " ".join(cell))
    else:
        _emit(data)
    return EXIT_OK


def cmd_quotient(args) -> int:
    domain = _load_domain(args.domain)
    if args.partition:
        part = formats.partition_from_json(formats.load_json(args.partition))
    else:
        part = orbits(enumerate_automorphisms(domain, args.cap), domain)
    report = validate_equitable(domain, part)
    data = {"partition": part.as_dict(), "equitable": report.valid, "violations": list(report.violations)}
    if not report.valid:
        _emit(data)
        return EXIT_INPUT
    data["origin"] = "group" if certify_orbit_partition(domain, part) is not None else "equitable-only"
    data["quotient"] = formats.domain_to_json(quotient(domain, part))
    code = EXIT_OK
    if args.p:
        inv = verify_quotient_invariance(domain, part, args.p, _cfg(args))
        data["invariance"] = inv.as_dict()
        if inv.origin == "group" and not (inv.h_equal and inv.lam_agreement() <= 1e-7):
            code = EXIT_INVARIANT
    _emit(data)
    return code


def _model_spec_from_args(args, scheme: str) -> ModelSpec:
    if args.family == ANTITREE:
        if args.a is None:
            raise PCheegerError("antitree needs --a")
        return ModelSpec(ANTITREE, scheme, order=args.a)
    if args.m_seq:
        branching = Branching.parse(args.m_seq)
    elif args.m is not None:
        branching = Branching.constant(args.m)
    else:
        raise PCheegerError("tree needs --m or --m-seq")
    return ModelSpec(TREE, scheme, branching=branching)


def cmd_model(args) -> int:
    horizon = args.horizon
    if args.spec:
        spec, horizon = formats.model_from_json(formats.load_json(args.spec))
        specs = [spec]
    else:
        if args.family is None:
            raise PCheegerError("model needs a family (tree or antitree) or --spec")
        schemes = SCHEMES if args.scheme == "all" else (args.scheme,)
        specs = [_model_spec_from_args(args, s) for s in schemes]
    if args.format == "csv":
        first = specs[0]
        row = model_row(
            first.family, horizon, branching=first.branching, order=first.order, schemes=[s.scheme for s in specs]
        )
        sys.stdout.write(formats.table_csv([row]))
        return EXIT_OK
    out = []
    for spec in specs:
        res = cheeger_linear(build_linear(spec, horizon), True)
        out.append(
            {
                **spec.as_dict(horizon),
                "h": res.h,
                "h_attained": res.attained,
                "h_inf": res.tail.as_number(),
                "h_inf_status": res.tail.status,
            }
        )
    if args.format == "text":
        for d in out:
            print(f"{d['scheme']}: h={formats.tidy(d['h'])} h_inf={formats.tidy(d['h_inf'])} ({d['h_inf_status']})")
    else:
        _emit(out[0] if len(out) == 1 else out)
    return EXIT_OK


def cmd_verify_paper(args) -> int:
    from .verify import resolve, run_checks

    try:
        names = resolve(args.only.split(",") if args.only else None)
    except KeyError as exc:
        raise PCheegerError(f"unknown check {exc.args[0]!r}") from None
    results = run_checks(names, _cfg(args))
    if args.json:
        _emit({"passed": all(r.passed for r in results), "checks": [r.as_dict() for r in results]})
    else:
        width = max(len(r.key) for r in results)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.key:<{width}}  {r.detail}")
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 stays reserved for non-convergence."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcheeger", description="Dirichlet p-Laplacian eigenpairs and Cheeger constants.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json", "text")):
        p.add_argument("--seed", type=int, default=0, help="solver RNG seed")
        p.add_argument("--format", choices=fmt, default=fmt[0])

    p = sub.add_parser("eigen", help="first (and maximum) eigenpairs of a domain")
    p.add_argument("domain")
    p.add_argument("--p", type=_floats, default=[2.0], help="one or more p values, comma separated")
    p.add_argument("--max", action="store_true", help="also compute the bipartite maximum eigenpair")
    common(p)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("cheeger", help="exact Cheeger constant and all minimizing cuts")
    p.add_argument("domain")
    p.add_argument("--cap", type=int, default=24, help="largest number of units to enumerate")
    p.add_argument("--orbit-restrict", metavar="PARTITION", help="only enumerate unions of these cells")
    common(p)
    p.set_defaults(func=cmd_cheeger)

    p = sub.add_parser("autgroup", help="automorphism group and orbits of a small domain")
    p.add_argument("domain")
    p.add_argument("--cap", type=int, default=12)
    common(p)
    p.set_defaults(func=cmd_autgroup)

    p = sub.add_parser("quotient", help="quotient domain by a partition (default: automorphism orbits)")
    p.add_argument("domain")
    p.add_argument("--partition", metavar="PARTITION")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--p", type=_floats, default=[], help="also compare lambda_{1,p} on both sides")
    common(p, ("json",))
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("model", help="Cheeger constants of trees and anti-trees")
    p.add_argument("family", nargs="?", choices=(TREE, ANTITREE))
    p.add_argument("--a", type=int, help="anti-tree order")
    p.add_argument("--m", type=int, help="constant branching number")
    p.add_argument("--m-seq", help='branching list such as "1,2,3,..." (trailing ... continues the step)')
    p.add_argument("--scheme", choices=(*SCHEMES, "all"), default="all")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--spec", help="model spec JSON file")
    common(p, ("json", "text", "csv"))
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("verify-paper", help="run the bundled reproduction checks")
    p.add_argument("--only", help="comma-separated check names or numbers")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (PCheegerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
