"""Golden corpus: worked problems with expected reports.

Layout: ``<corpus>/<entry>/problem.json``, ``expected/<command>.json`` and
``PROVENANCE.md``.  Verification compares freshly generated reports byte for
byte; golden files are only rewritten with ``regenerate=True``.
"""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .cli import ENGINE, dumps, run
from .errors import DulacError
from .problem import parse_problem

ALWAYS = ("normalize", "resonances", "toric", "find-semi-invariants")


def default_corpus_dir():
    return Path(__file__).resolve().parents[2] / "corpus"


def entries(root):
    root = Path(root)
    return sorted(p.name for p in root.iterdir() if (p / "problem.json").is_file())


def applicable_commands(problem_path):
    """Commands an entry is run through, derived from what the problem declares."""
    try:
        p = parse_problem(problem_path)
    except DulacError:
        return ["normalize"]
    cmds = list(ALWAYS)
    if p.semi_invariants:
        cmds.append("walcher")
    if p.integrals or p.symmetries or p.commuting_fields:
        cmds.append("verify-conservation")
    if p.integrals or p.commuting_fields:
        cmds.append("check-darboux")
    return cmds


def render_entry(root, name):
    """``{command: (report text, exit code)}`` for one entry."""
    path = Path(root) / name / "problem.json"
    out = {}
    for cmd in applicable_commands(path):
        rep, code = run(cmd, path, problem_name=name)
        out[cmd] = (dumps(rep), code)
    return out


def _render_job(args):
    return render_entry(*args)


def corpus_verify(root=None, regenerate=False, jobs=1):
    """Run every entry through every applicable command and compare with the goldens."""
    root = Path(root) if root is not None else default_corpus_dir()
    names = entries(root)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rendered = list(ex.map(_render_job, [(root, n) for n in names]))
    else:
        rendered = [render_entry(root, n) for n in names]
    summary = {"engine": ENGINE, "entries": [], "mismatches": []}
    for name, reports in zip(names, rendered):
        exp_dir = root / name / "expected"
        row = {"entry": name, "commands": []}
        expected_files = {p.stem for p in exp_dir.glob("*.json")} if exp_dir.is_dir() else set()
        for cmd, (text, code) in reports.items():
            golden = exp_dir / f"{cmd}.json"
            if regenerate:
                exp_dir.mkdir(exist_ok=True)
                golden.write_text(text, encoding="utf-8")
                state = "written"
            elif not golden.is_file():
                state = "missing"
            elif golden.read_text(encoding="utf-8") == text:
                state = "match"
            else:
                state = "mismatch"
            row["commands"].append({"command": cmd, "exit_code": code, "state": state})
            if state in ("missing", "mismatch"):
                summary["mismatches"].append(f"{name}/{cmd}: {state}")
        for stale in sorted(expected_files - set(reports)):
            if regenerate:
                (exp_dir / f"{stale}.json").unlink()
            else:
                summary["mismatches"].append(f"{name}/{stale}: not produced by the engine")
        summary["entries"].append(row)
    summary["ok"] = not summary["mismatches"]
    return summary
