"""Batch front end: ``eqhh run scenario.json`` and ``eqhh verify scenario.json``.

Exit status: 0 ok, 1 a verification failed, 2 bad input, 3 a size guard was hit.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import config
from .config import GuardError
from .forms import ComplexPairs, Real
from .groups import (CircleAction, FiniteGroup, NonInvertibleGenerator, NotClosedWithinBound, NotUnitary,
                     ZeroWeight, circle_singular_points, close_generators, generic_stratum)
from .hochschild import brute_twisted_report, crossed_product_hh_finite
from .koszul import HomologyReport, aligned_csv, build_twisted_koszul, circle_stalk_homology, homology
from .linalg import DimensionMismatch
from .relforms import (basic_forms_table, finite_basic_forms_table, local_models, theta_injectivity_check,
                       vanishing_ideal_check)
from .scalars import ScalarParseError, parse_scalar
from .verify import circle_checks, finite_group_checks

log = logging.getLogger("eqhh")

TASKS = ("koszul", "bar-oracle", "hkr-finite", "circle-strata", "basic-forms", "vanishing-ideal",
         "theta-check", "verify-all")
FINITE_ONLY = {"hkr-finite"}
CIRCLE_ONLY = {"circle-strata", "vanishing-ideal", "theta-check"}

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    action: object                 # FiniteGroup or CircleAction
    kmax: int
    nmax: int
    tasks: list
    format: str = "json"
    out: str = "out"
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def is_circle(self) -> bool:
        return isinstance(self.action, CircleAction)


def _scalar(x):
    if isinstance(x, bool):
        raise InputError(f"bad matrix entry {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    raise InputError(f"matrix entries must be integers or strings, got {x!r}")


def parse_scenario(data: dict, base: Path | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise InputError("scenario must be a JSON object")
    has_group, has_circle = "group" in data, "circle" in data
    if has_group == has_circle:
        raise InputError("exactly one of 'group' or 'circle' must be given")
    bounds = data.get("bounds", data)
    try:
        kmax, nmax = int(bounds.get("kmax", 2)), int(bounds.get("nmax", 4))
    except (TypeError, ValueError):
        raise InputError("kmax and nmax must be integers") from None
    if kmax < 0 or nmax < 0:
        raise InputError("bounds must be non-negative")
    tasks = data.get("tasks", ["verify-all"])
    if not isinstance(tasks, list) or not tasks:
        raise InputError("'tasks' must be a non-empty list")
    for t in tasks:
        if t not in TASKS:
            raise InputError(f"unknown task {t!r}; choose from {', '.join(TASKS)}")
    fmt = data.get("format", "json")
    if fmt not in ("json", "csv"):
        raise InputError(f"unknown format {fmt!r}")
    if has_circle:
        block = data["circle"]
        weights = block.get("weights") if isinstance(block, dict) else block
        if not isinstance(weights, list) or not all(isinstance(w, int) and not isinstance(w, bool) for w in weights):
            raise InputError("circle weights must be a list of integers")
        action = CircleAction(tuple(weights))
        bad = [t for t in tasks if t in FINITE_ONLY]
    else:
        block = data["group"]
        if not isinstance(block, dict) or "generators" not in block:
            raise InputError("group needs 'generators'")
        kind = block.get("space", "real")
        gens = [[[_scalar(x) for x in row] for row in g] for g in block["generators"]]
        if not gens:
            raise InputError("at least one generator is required")
        n = len(gens[0])
        space = {"real": Real, "complex": ComplexPairs}.get(kind)
        if space is None:
            raise InputError(f"unknown space {kind!r}")
        action = close_generators(gens, space(n))
        bad = [t for t in tasks if t in CIRCLE_ONLY]
    if bad:
        raise InputError(f"tasks {bad} do not apply to this action")
    return Scenario(name=str(data.get("name", "scenario")), action=action, kmax=kmax, nmax=nmax,
                    tasks=list(tasks), format=fmt, out=str(data.get("out", "out")),
                    seed=int(data.get("seed", 0)), raw=data)


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise InputError(f"no such scenario file: {p}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{p}: invalid JSON ({e})") from None
    return parse_scenario(data, p.parent)


def check_guards(sc: Scenario) -> None:
    g = config.GUARDS
    if sc.kmax > g.kmax or sc.nmax > g.nmax:
        raise GuardError(f"bounds kmax={sc.kmax}, nmax={sc.nmax} exceed guards kmax={g.kmax}, nmax={g.nmax}")
    if "bar-oracle" in sc.tasks and (sc.nmax > g.bar_n or sc.kmax > g.bar_k):
        raise GuardError(f"bar-oracle needs nmax <= {g.bar_n} and kmax <= {g.bar_k}")


# -- tasks ------------------------------------------------------------------------------

def _strata_elements(sc: Scenario):
    A = sc.action
    if sc.is_circle:
        out = [(f"j={s.j}", A.element(s.j)) for s in circle_singular_points(A)]
        out.append(("generic", A.generic_element()))
        return A.space, out
    G: FiniteGroup = A
    return G.space, [(f"g{cls[0]}", G.elements[cls[0]]) for cls in G.conjugacy_classes()]


def task_koszul(sc, jobs):
    space, items = _strata_elements(sc)
    return [homology(build_twisted_koszul(h, sc.nmax, space), sc.kmax, sc.nmax, jobs=jobs, label=lab)
            for lab, h in items], True


def task_bar(sc, jobs):
    space, items = _strata_elements(sc)
    return [brute_twisted_report(h, sc.kmax, sc.nmax, space, jobs=jobs, label=lab) for lab, h in items], True


def task_hkr_finite(sc, jobs):
    per_class, total = crossed_product_hh_finite(sc.action, sc.kmax, sc.nmax, jobs=jobs)
    return per_class + [total], True


def task_circle_strata(sc, jobs):
    A = sc.action
    out = []
    for s in circle_singular_points(A) + [generic_stratum(A)]:
        rep = circle_stalk_homology(A, s.j, sc.kmax, sc.nmax, jobs=jobs)
        rep.stratum = s.label
        out.append(rep)
    return out, True


def task_basic_forms(sc, jobs):
    if sc.is_circle:
        return basic_forms_table(sc.action, sc.kmax, sc.nmax), True
    return finite_basic_forms_table(sc.action, sc.kmax, sc.nmax), True


def task_vanishing(sc, jobs):
    reps = [vanishing_ideal_check(sc.action, j, sc.nmax, where) for j, where in local_models(sc.action)]
    return reps, all(r.ok for r in reps)


def task_theta(sc, jobs):
    A = sc.action
    reps = [theta_injectivity_check(A, j, k, sc.nmax, where) for j, where in local_models(A)
            for k in range(min(sc.kmax, 2 * A.m) + 1)]
    return reps, all(r.ok for r in reps)


def task_verify(sc, jobs):
    suite = circle_checks if sc.is_circle else finite_group_checks
    checks = suite(sc.action, sc.kmax, sc.nmax, seed=sc.seed, jobs=jobs)
    return checks, all(c.ok for c in checks)


RUNNERS = {"koszul": task_koszul, "bar-oracle": task_bar, "hkr-finite": task_hkr_finite,
           "circle-strata": task_circle_strata, "basic-forms": task_basic_forms,
           "vanishing-ideal": task_vanishing, "theta-check": task_theta, "verify-all": task_verify}


# -- serialization ----------------------------------------------------------------------

def render(result, fmt: str) -> str:
    from .relforms import BasicFormsTable, CheckReport
    from .verify import Check
    items = result if isinstance(result, list) else [result]
    if fmt == "json":
        payload = []
        for r in items:
            if isinstance(r, Check):
                payload.append({"check": r.name, "ok": r.ok, "detail": r.detail})
            else:
                payload.append(r.to_json())
        return json.dumps(payload if isinstance(result, list) else payload[0], indent=1) + "\n"
    if all(isinstance(r, HomologyReport) for r in items):
        rows = [{"stratum": r.stratum, **row} for r in items for row in r.table()]
        return aligned_csv(["stratum", "k", "n", "dim"], rows)
    if isinstance(result, BasicFormsTable):
        return result.to_csv()
    if all(isinstance(r, CheckReport) for r in items):
        rows = [{"check": r.name, **row} for r in items for row in r.rows]
        cols = ["check"] + [c for c in rows[0] if c != "check"] if rows else ["check"]
        return aligned_csv(cols, rows)
    rows = [{"check": c.name, "ok": c.ok, "detail": c.detail} for c in items]
    return aligned_csv(["check", "ok", "detail"], rows)


def _witnesses(result) -> list[str]:
    items = result if isinstance(result, list) else [result]
    out = []
    for r in items:
        ok = getattr(r, "ok", True)
        if not ok:
            out.append(f"{getattr(r, 'name', '?')}: {getattr(r, 'detail', '') or getattr(r, 'witness', '')}")
    return out


def execute(sc: Scenario, out_dir: Path, jobs: int = 1, stream=sys.stdout) -> int:
    check_guards(sc)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    witnesses = []
    for task in sc.tasks:
        result, ok = RUNNERS[task](sc, jobs)
        path = out_dir / f"{sc.name}.{task}.{sc.format}"
        path.write_text(render(result, sc.format))
        print(f"{task:16s} {'ok' if ok else 'FAILED'}  -> {path}", file=stream)
        if task == "verify-all":
            for c in result:
                print("  " + c.line(), file=stream)
        if not ok:
            status = EXIT_FAIL
            witnesses += [f"[{task}] {w}" for w in _witnesses(result)]
    if witnesses:
        (out_dir / f"{sc.name}.witness.txt").write_text("\n".join(witnesses) + "\n")
        for w in witnesses:
            print("witness: " + w, file=sys.stderr)
    return status


def run_scenario(path, out: str | None = None, fmt: str | None = None, seed: int | None = None,
                 jobs: int = 1, verify_only: bool = False, stream=sys.stdout) -> int:
    try:
        config.set_guards(config.Guards.from_env())
        sc = load_scenario(path)
        if fmt:
            sc.format = fmt
        if seed is not None:
            sc.seed = seed
        if verify_only:
            sc.tasks = ["verify-all"]
        out_dir = Path(out) if out else Path(path).parent / sc.out
        return execute(sc, out_dir, jobs, stream)
    except (GuardError, NotClosedWithinBound) as e:
        print(f"guard violation: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, ZeroWeight, ScalarParseError, NotUnitary, NonInvertibleGenerator,
            DimensionMismatch, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="eqhh", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the tasks of a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out", default=None, help="output directory (default: scenario 'out' field)")
    r.add_argument("--format", choices=["json", "csv"], default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--jobs", type=int, default=1)
    v = sub.add_parser("verify", help="run the full cross-check suite of a scenario")
    v.add_argument("scenario")
    v.add_argument("--out", default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return run_scenario(args.scenario, out=args.out, fmt=getattr(args, "format", None), seed=args.seed,
                        jobs=args.jobs, verify_only=args.cmd == "verify")


if __name__ == "__main__":
    sys.exit(main())
