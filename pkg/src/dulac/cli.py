"""Command-line front end.

Every command reads one JSON problem file and writes one JSON report.
Exit status: 0 success, 1 a check failed, 2 inconclusive, 3 bad input.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .checks import Check, equal_check, status_of, verdict, zero_check
from .darboux import certify, find_semi_invariants, validate_semi_invariant
from .errors import CheckFailure, InputError, ValidationError
from .normalform import normalize_to_degree, split_resonant, validate_linear_part
from .problem import parse_problem
from .resonance import (
    check_decomposition,
    enumerate_resonances,
    is_resonant,
    is_resonant_monomial,
    resonances_by_lattice,
    toric_decompose,
)
from .series import (
    VectorFieldJet,
    format_monomial,
    lie_bracket,
    monomials,
    pushforward,
    render_series,
    render_vector_field,
)
from .walcher import (
    SemiInvariant,
    make_semi_invariant,
    require_normal_form,
    verify_commutant_conservation,
    verify_darboux_conservation,
    walcher_normalize,
)

COMMANDS = ("normalize", "resonances", "toric", "walcher", "verify-conservation",
            "check-darboux", "find-semi-invariants")
ENGINE = f"dulac {__version__}"
TORIC_CHECK_DEGREE = 8


def _components(change):
    return [render_series(c) for c in change]


def _prefixed(prefix, checks):
    for c in checks:
        c.name = f"{prefix}: {c.name}"
    return checks


def cmd_normalize(p, M, **_):
    res = normalize_to_degree(p.vector_field, M)
    lin = res.lin
    Y = res.normalized
    higher = Y - Y.homogeneous(1).with_cap(M)
    nr, kept = split_resonant(lin, higher)
    checks = [
        zero_check("degrees 2..M are resonant", nr, M),
        zero_check("[X^s, normal form] = 0", lie_bracket(lin.semisimple(M), Y), M),
        equal_check("pushforward through the composed change", pushforward(res.original, res.composed), Y, M),
    ]
    result = {
        "degree": M,
        "eigenvalues": [str(v) for v in lin.diag],
        "nilpotent_part": lin.has_nilpotent(),
        "normalized": render_vector_field(Y),
        "change": _components(res.composed),
        "inverse": _components(res.inverse),
        "steps": res.diagnostics,
    }
    return result, checks


def cmd_resonances(p, M, **_):
    lin = validate_linear_part(p.vector_field)
    lam = list(lin.diag)
    rs = enumerate_resonances(lam, M)
    lat = resonances_by_lattice(lam, M)
    checks = [Check("lattice solver agrees with enumeration", set(rs) == set(lat), None, None,
                    None if set(rs) == set(lat) else f"{len(rs)} vs {len(lat)} entries")]
    result = {
        "degree": M,
        "eigenvalues": [str(v) for v in lam],
        "count": len(rs),
        "resonances": [{"exponents": list(a), "component": j + 1,
                        "monomial": f"{format_monomial(a)} d/dx{j + 1}"} for a, j in rs],
    }
    return result, checks


def cmd_toric(p, M, **_):
    lin = validate_linear_part(p.vector_field)
    lam = list(lin.diag)
    dec = toric_decompose(lam)
    props = check_decomposition(dec, lam)
    checks = [Check(f"{k}", v) for k, v in props.items()]
    bound = min(M, TORIC_CHECK_DEGREE)
    bad = None
    for k in range(0, bound + 1):
        for a in monomials(p.n, k):
            for j in range(p.n):
                if is_resonant(lam, a, j) != is_resonant_monomial(dec, a, j):
                    bad = bad or f"{format_monomial(a) or '1'} d/dx{j + 1}"
    checks.append(Check("torus and eigenvalue resonance agree", bad is None, bound, None, bad))
    result = {
        "eigenvalues": [str(v) for v in lam],
        "iota": str(p.field.iota),
        "tau": dec.tau,
        "gammas": [str(g) for g in dec.gammas],
        "rhos": [list(r) for r in dec.rhos],
    }
    return result, checks


def _decomp_or_none(p, lam):
    return toric_decompose(lam) if p.field.iota is not None else None


def _walcher_json(res):
    out = {
        "beta": render_series(res.beta),
        "F_star": render_series(res.F_star),
        "lambda_star": render_series(res.lambda_star),
        "lambda0": str(res.lambda0),
    }
    if res.torus_cofactors:
        out["torus_cofactors"] = [str(c) for c in res.torus_cofactors]
        out["torus_weights"] = list(res.torus_weights)
    return out


def cmd_walcher(p, M, **_):
    if not p.semi_invariants:
        raise ValidationError("the problem declares no semi-invariants", "semi_invariants")
    X = p.vector_field.with_cap(M)
    lin = require_normal_form(X, M)
    decomp = _decomp_or_none(p, list(lin.diag))
    out = []
    checks = []
    for k, (G, cof) in enumerate(p.semi_invariants):
        si = make_semi_invariant(X, G, cof, M)
        res = walcher_normalize(X, si, M, decomp)
        again = walcher_normalize(X, SemiInvariant(res.F_star, res.lambda_star), M, decomp)
        checks.extend(_prefixed(f"semi_invariants[{k}]", res.checks))
        checks.extend(_prefixed(f"semi_invariants[{k}]", [
            zero_check("second pass gives beta = 1", again.beta - 1)]))
        item = {"cofactor": render_series(si.cofactor)}
        item.update(_walcher_json(res))
        out.append(item)
    return {"degree": M, "semi_invariants": out}, checks


def cmd_verify_conservation(p, M, **_):
    if not (p.integrals or p.symmetries or p.commuting_fields):
        raise ValidationError("the problem declares no integrals or symmetries", "problem")
    X = p.vector_field.with_cap(M)
    lin = require_normal_form(X, M)
    decomp = _decomp_or_none(p, list(lin.diag))
    checks = []
    integrals = []
    for k, P in enumerate(p.integrals):
        rep = verify_darboux_conservation(X, P, decomp, M)
        checks.extend(_prefixed(f"integrals[{k}]", rep.checks))
        integrals.append({
            "cofactors": [render_series(c) for c in rep.cofactors],
            "torus_cofactors": [[str(c) for c in row] for row in rep.torus_cofactors],
        })
    syms = []
    named = [("symmetries", Y) for Y in p.symmetries] + [("commuting_fields", Y) for Y in p.commuting_fields]
    counters = {}
    for key, Y in named:
        k = counters.get(key, 0)
        counters[key] = k + 1
        rep = verify_commutant_conservation(X, Y, decomp, M)
        checks.extend(_prefixed(f"{key}[{k}]", rep.checks))
        syms.append({"source": f"{key}[{k}]",
                     "denominator_cofactor": render_series(rep.cofactors[0]),
                     "torus_cofactors": [str(c) for c in rep.torus_cofactors[0]]})
    result = {"degree": M, "tau": None if decomp is None else decomp.tau,
              "integrals": integrals, "symmetries": syms}
    return result, checks


def cmd_check_darboux(p, M, **_):
    cert = certify(p.fields(), p.integrals, M)
    result = {"p": cert.p, "q": cert.q, "n": cert.n,
              "mode": "exact" if cert.exact else f"through degree {M}",
              "verdict": status_of(cert.passed)}
    return result, cert.checks


def cmd_find_semi_invariants(p, M, deg=None, **_):
    deg = deg if deg is not None else min(2, M)
    if deg < 1 or deg > M:
        raise ValidationError(f"--deg must lie in 1..{M}", "deg")
    X = p.vector_field.with_cap(M)
    sols = find_semi_invariants(X, deg, M=M)
    checks = []
    out = []
    for k, s in enumerate(sols):
        ok = validate_semi_invariant(X, s.G, s.cofactor, M)
        checks.append(Check(f"solution[{k}]: X(G) = lambda G", ok, M))
        out.append({"lambda0": str(s.lambda0), "lowest_degree": s.lowest_degree,
                    "G": render_series(s.G), "cofactor": render_series(s.cofactor)})
    return {"degree": M, "deg": deg, "count": len(out), "solutions": out}, checks


HANDLERS = {
    "normalize": cmd_normalize,
    "resonances": cmd_resonances,
    "toric": cmd_toric,
    "walcher": cmd_walcher,
    "verify-conservation": cmd_verify_conservation,
    "check-darboux": cmd_check_darboux,
    "find-semi-invariants": cmd_find_semi_invariants,
}


def _error(exc):
    out = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, CheckFailure):
        if exc.degree is not None:
            out["degree"] = exc.degree
        if exc.residual is not None:
            out["residual"] = exc.residual
    return out


def run(command, problem, degree=None, deg=None, problem_name=None):
    """Run one command; returns ``(report dict, exit code)``.

    ``problem`` is a parsed problem or a path; input errors become exit 3.
    """
    if command not in HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    echo = {"name": command}
    report = {"engine": ENGINE, "command": echo}
    try:
        if not hasattr(problem, "vector_field"):
            problem = parse_problem(problem)
        M = degree if degree is not None else problem.truncation
        echo["problem"] = problem_name if problem_name is not None else problem.name
        echo["degree"] = M
        if deg is not None:
            echo["deg"] = deg
        if M < 2:
            raise ValidationError("degree must be at least 2", "degree")
        result, checks = HANDLERS[command](problem, M, deg=deg)
    except InputError as exc:
        if problem_name is not None:
            echo.setdefault("problem", problem_name)
        report.update(status="error", exit_code=3, error=_error(exc))
        return report, 3
    except CheckFailure as exc:
        report.update(status="fail", exit_code=1, result=None, checks=[], first_failure=_error(exc))
        return report, 1
    except ValueError as exc:  # out of supported range
        report.update(status="error", exit_code=3, error={"type": "ValueError", "message": str(exc)})
        return report, 3
    v = verdict(checks)
    code = {True: 0, False: 1, None: 2}[v]
    first = next((c for c in checks if c.passed is False), None) or \
        next((c for c in checks if c.passed is None), None)
    report.update(status=status_of(v), exit_code=code, result=result,
                  checks=[c.to_json() for c in checks],
                  first_failure=None if first is None else first.to_json())
    return report, code


def dumps(report):
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _problem_files(directory):
    d = Path(directory)
    return sorted([q for q in d.glob("*/problem.json")] + [q for q in d.glob("*.json")])


def _build_parser():
    ap = argparse.ArgumentParser(prog="dulac", description="Normal forms, torus actions and Darboux checks.")
    ap.add_argument("--version", action="version", version=ENGINE)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("problem", nargs="?", help="problem file (JSON)")
        sp.add_argument("--degree", type=int, help="truncation degree M (default: from the problem)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--corpus", metavar="DIR", help="run over every problem in DIR")
        if name == "find-semi-invariants":
            sp.add_argument("--deg", type=int, help="maximal lowest degree of G (default 2)")
    cv = sub.add_parser("corpus-verify", help="compare the golden corpus against the engine")
    cv.add_argument("corpus", nargs="?", help="corpus directory")
    cv.add_argument("--regenerate", action="store_true", help="rewrite the golden files")
    cv.add_argument("--out", help="write the summary here instead of stdout")
    return ap


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "corpus-verify":
        from .corpus import corpus_verify, default_corpus_dir
        summary = corpus_verify(args.corpus or default_corpus_dir(), regenerate=args.regenerate)
        _emit(dumps(summary), args.out)
        return 0 if summary["ok"] else 1
    deg = getattr(args, "deg", None)
    if args.corpus:
        entries = []
        code = 0
        root = Path(args.corpus)
        for path in _problem_files(root):
            rel = path.relative_to(root).as_posix()
            rep, c = run(args.command, path, args.degree, deg, problem_name=rel)
            entries.append({"file": rel, "exit_code": c, "report": rep})
            code = max(code, c)
        _emit(dumps({"engine": ENGINE, "command": args.command, "entries": entries}), args.out)
        return code
    if not args.problem:
        sys.stderr.write("dulac: a problem file is required (or --corpus DIR)\n")
        return 3
    report, code = run(args.command, args.problem, args.degree, deg)
    _emit(dumps(report), args.out)
    if code == 3:
        sys.stderr.write(f"dulac: {report['error']['type']}: {report['error']['message']}\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
