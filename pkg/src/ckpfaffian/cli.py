"""Batch driver: compute classes, run verification suites, build quadric tables,
export and check golden files.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .graded_core import BETA, BETA_MODES, AlgebraElement, beta_scalar
from .laurent_cone import WindowError
from .loci import (PartitionError, StrictPartition, class_via_pfaffian, class_via_product,
                   class_window_stable, gamma_table, generic_partition, strict_partitions,
                   verify_schur_pfaffian_identity)
from .quadric import QuadricError, build_quadric_ring, verify_relations
from .segre import (FreeModelProvider, PointModelProvider, random_chern_data, segre_from_g,
                    segre_g_series)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SUITES = ("pfaffian-vs-product", "schur-pfaffian", "gamma-support", "segre-negative",
          "specialize-commute", "quadric")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 2
    lam: str = ""
    model: str = "point"
    trunc: int = 8
    beta: str = "symbolic"
    window: int | None = None
    pipeline: str = "both"
    fmt: str = "json"
    out: str | None = None
    r: int = 4
    beta_bound: int = 16
    jobs: int = 1
    suite: str | None = None
    seed: int = 0
    samples: int = 50
    check: bool = False

    def partition(self) -> StrictPartition:
        try:
            return StrictPartition.parse(self.lam, self.n)
        except PartitionError as exc:
            raise UsageError(str(exc)) from exc


def make_provider(model: str, n: int, r: int, D: int, beta_mode: str):
    beta = beta_scalar(BETA_MODES[beta_mode])
    if model == "point":
        return PointModelProvider(n, D, beta)
    if model == "free":
        return FreeModelProvider(max(r, 1), D, beta)
    raise UsageError(f"unknown model {model!r}")


# reports ------------------------------------------------------------------------
def element_terms(value: AlgebraElement) -> list[dict]:
    return [{"beta_exponent": k, "numerator": str(q.numerator), "denominator": str(q.denominator),
             "generator_exponents": list(exps)}
            for exps, k, q in value.sorted_terms()]


@dataclass
class ClassReport:
    query: dict
    generators: list
    pipeline: str
    terms: list
    equal: bool | None = None
    stable: bool | None = None
    homogeneous: bool | None = None
    dyadic: bool | None = None

    def to_json(self) -> dict:
        return {"schema": SCHEMA, **asdict(self)}

    @classmethod
    def from_json(cls, data: dict) -> "ClassReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        fields = {k: v for k, v in data.items() if k != "schema"}
        return cls(**fields)

    def coefficients(self) -> dict:
        """``{(generator exponents, beta exponent): Fraction}``."""
        return {(tuple(t["generator_exponents"]), t["beta_exponent"]):
                Fraction(int(t["numerator"]), int(t["denominator"])) for t in self.terms}

    @property
    def ok(self) -> bool:
        return self.equal is not False and self.stable is not False


def compute_report(n: int, parts: tuple, model: str, D: int, beta_mode: str,
                   pipeline: str = "both", window: int | None = None) -> ClassReport:
    lam = StrictPartition(parts, n)
    provider = make_provider(model, n, lam.r, D, beta_mode)
    values = {}
    if pipeline in ("product", "both"):
        cap = None
        if window is not None:
            cap = tuple(window - p for p in _partial(lam.parts))
        values["product"] = class_via_product(lam, provider, cap)
    if pipeline in ("pfaffian", "both"):
        values["pfaffian"] = class_via_pfaffian(lam, provider, window)
    value = values.get("product", values.get("pfaffian"))
    equal = values["product"] == values["pfaffian"] if pipeline == "both" else None
    stable = all(class_window_stable(lam, provider, p) for p in values)
    homogeneous = value.is_homogeneous(lam.size) if provider.symbolic else None
    query = {"n": n, "lambda": list(lam.parts), "model": model, "trunc": D, "beta": beta_mode,
             "window": window}
    return ClassReport(query, list(provider.context.names), pipeline, element_terms(value),
                       equal, stable, homogeneous, value.has_dyadic_coefficients())


def _partial(parts):
    total, out = 0, []
    for p in parts:
        total += p
        out.append(total)
    return out


def _compute_task(args) -> dict:
    return compute_report(*args).to_json()


def _map(func, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, tasks))


# formatting ---------------------------------------------------------------------
def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def monomial_text(generators: list, exps: list) -> str:
    return "*".join(g if e == 1 else f"{g}^{e}" for g, e in zip(generators, exps) if e) or "1"


def report_csv(reports: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda", "pipeline", "beta_exponent", "numerator", "denominator", "monomial"])
    for rep in reports:
        lam = ",".join(map(str, rep["query"]["lambda"]))
        for t in rep["terms"]:
            writer.writerow([lam, rep["pipeline"], t["beta_exponent"], t["numerator"], t["denominator"],
                             monomial_text(rep["generators"], t["generator_exponents"])])
    return buf.getvalue()


def report_text(reports: list[dict]) -> str:
    lines = []
    for rep in reports:
        q = rep["query"]
        head = f"lambda=({','.join(map(str, q['lambda']))}) n={q['n']} model={q['model']} D={q['trunc']} beta={q['beta']}"
        flags = [f"{k}={rep[k]}" for k in ("equal", "stable", "homogeneous", "dyadic") if rep[k] is not None]
        lines.append(head + "  " + " ".join(flags))
        for t in rep["terms"]:
            q_ = Fraction(int(t["numerator"]), int(t["denominator"]))
            beta = "" if t["beta_exponent"] == 0 else f"b^{t['beta_exponent']}*"
            lines.append(f"  {q_} {beta}{monomial_text(rep['generators'], t['generator_exponents'])}")
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise IOError(f"cannot write {out}: {exc}") from exc


def render(reports: list[dict], fmt: str) -> str:
    if fmt == "json":
        return dumps(reports[0] if len(reports) == 1 else reports)
    if fmt == "csv":
        return report_csv(reports)
    return report_text(reports)


# commands -----------------------------------------------------------------------
def cmd_compute(cfg: RunConfig) -> int:
    lam = cfg.partition()
    if cfg.window is not None and cfg.window < cfg.trunc:
        raise UsageError(f"--window {cfg.window} is below --trunc {cfg.trunc}")
    report = compute_report(cfg.n, lam.parts, cfg.model, cfg.trunc, cfg.beta, cfg.pipeline, cfg.window)
    emit(render([report.to_json()], cfg.fmt), cfg.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def _suite_pfaffian_vs_product(cfg: RunConfig) -> list[dict]:
    tasks = [(cfg.n, lam.parts, cfg.model, cfg.trunc, cfg.beta, "both", cfg.window)
             for lam in strict_partitions(cfg.n)]
    cases = []
    for rep in _map(_compute_task, tasks, cfg.jobs):
        ok = rep["equal"] and rep["stable"] and rep["dyadic"] and rep["homogeneous"] is not False
        cases.append({"case": ",".join(map(str, rep["query"]["lambda"])) or "empty", "ok": bool(ok),
                      "terms": len(rep["terms"])})
    return cases


def _schur_task(args) -> dict:
    k, window, beta_mode = args
    lam = generic_partition(k)
    ok = verify_schur_pfaffian_identity(lam, window, beta_scalar(BETA_MODES[beta_mode]))
    return {"case": f"r={k} lambda={lam}", "ok": ok}


def _suite_schur_pfaffian(cfg: RunConfig) -> list[dict]:
    window = cfg.window if cfg.window is not None else 6
    return _map(_schur_task, [(k, window, cfg.beta) for k in range(1, cfg.r + 1)], cfg.jobs)


def _suite_gamma_support(cfg: RunConfig) -> list[dict]:
    window = cfg.window if cfg.window is not None else 8
    beta = beta_scalar(BETA_MODES[cfg.beta])
    cases = []
    for m in range(1, cfg.r // 2 + 1):
        table = gamma_table(m, window, beta)
        bad = table.support_violations()
        cases.append({"case": f"2m={2 * m}", "ok": not bad, "violations": len(bad)})
    return cases


def _suite_segre_negative(cfg: RunConfig) -> list[dict]:
    rng = random.Random(cfg.seed)
    cases = []
    for t in range(cfg.samples):
        E, F = random_chern_data(rng, min(cfg.trunc, 5))
        g = segre_g_series(E, F)
        ctx = E.ctx
        ok = segre_from_g(g, 0) == 1
        ok = ok and all(segre_from_g(g, -k) == ctx.scalar((-BETA) ** k) for k in range(1, 11))
        cases.append({"case": f"sample {t}", "ok": ok})
    return cases


def _specialize_task(args) -> dict:
    n, parts, model, D = args
    lam = StrictPartition(parts, n)
    ok = True
    for mode in ("zero", "minus-one"):
        value = BETA_MODES[mode]
        sym = make_provider(model, n, lam.r, D, "symbolic")
        pre = make_provider(model, n, lam.r, D, mode)
        for pipeline in (class_via_product, class_via_pfaffian):
            ok = ok and pipeline(lam, sym).specialize_beta(value) == pipeline(lam, pre)
    return {"case": str(lam), "ok": ok}


def _suite_specialize_commute(cfg: RunConfig) -> list[dict]:
    tasks = [(cfg.n, lam.parts, cfg.model, cfg.trunc) for lam in strict_partitions(cfg.n)]
    return _map(_specialize_task, tasks, cfg.jobs)


def _suite_quadric(cfg: RunConfig) -> list[dict]:
    cases = []
    for n in range(1, cfg.n + 1):
        rep = verify_relations(build_quadric_ring(n, cfg.beta_bound))
        cases.append({"case": f"n={n}", "ok": rep.ok, "failures": rep.failures})
    return cases


_SUITE_RUNNERS = {
    "pfaffian-vs-product": _suite_pfaffian_vs_product,
    "schur-pfaffian": _suite_schur_pfaffian,
    "gamma-support": _suite_gamma_support,
    "segre-negative": _suite_segre_negative,
    "specialize-commute": _suite_specialize_commute,
    "quadric": _suite_quadric,
}


def cmd_verify(cfg: RunConfig) -> int:
    runner = _SUITE_RUNNERS.get(cfg.suite)
    if runner is None:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    cases = sorted(runner(cfg), key=lambda c: c["case"])
    passed = sum(1 for c in cases if c["ok"])
    summary = {"schema": SCHEMA, "suite": cfg.suite, "total": len(cases), "passed": passed,
               "failed": len(cases) - passed, "cases": cases}
    if cfg.fmt == "json":
        text = dumps(summary)
    else:
        text = "".join(f"{'PASS' if c['ok'] else 'FAIL'} {c['case']}\n" for c in cases)
        text += f"{cfg.suite}: {passed}/{len(cases)} passed\n"
    emit(text, cfg.out)
    return EXIT_OK if passed == len(cases) else EXIT_FAIL


def cmd_quadric(cfg: RunConfig) -> int:
    try:
        ring = build_quadric_ring(cfg.n, cfg.beta_bound)
    except QuadricError as exc:
        raise UsageError(str(exc)) from exc
    report = verify_relations(ring)
    labels = ring.labels()
    table = []
    for (i, j), coords in sorted(ring.table.items()):
        table.append({"left": labels[i], "right": labels[j],
                      "product": [{"basis": labels[k],
                                   "coefficients": [{"beta_exponent": e, "numerator": str(q.numerator),
                                                     "denominator": str(q.denominator)} for e, q in c.items()]}
                                  for k, c in enumerate(coords) if c]})
    data = {"schema": SCHEMA, "n": ring.n, "beta_bound": ring.beta_bound, "basis": labels,
            "table": table, "report": asdict(report)}
    if cfg.fmt == "json":
        text = dumps(data)
    else:
        lines = [f"basis: {', '.join(labels)}"]
        for (i, j), coords in sorted(ring.table.items()):
            if i <= j:
                lines.append(f"{labels[i]} * {labels[j]} = {ring.element(coords)!r}")
        lines.append(f"relations ok: {report.ok}")
        text = "\n".join(lines) + "\n"
    emit(text, cfg.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def golden_payload(n: int, D: int, beta_mode: str, model: str, jobs: int) -> str:
    tasks = [(n, lam.parts, model, D, beta_mode, "both", None) for lam in strict_partitions(n)]
    reports = _map(_compute_task, tasks, jobs)
    return dumps({"schema": SCHEMA, "n": n, "trunc": D, "beta": beta_mode, "model": model,
                  "classes": reports})


def golden_name(n: int, D: int, beta_mode: str, model: str) -> str:
    return f"classes_{model}_n{n}_D{D}_{beta_mode}.json"


def cmd_export_golden(cfg: RunConfig) -> int:
    out = Path(cfg.out or "golden")
    failures = []
    try:
        if not cfg.check:
            out.mkdir(parents=True, exist_ok=True)
        for n in range(1, cfg.n + 1):
            path = out / golden_name(n, cfg.trunc, cfg.beta, cfg.model)
            payload = golden_payload(n, cfg.trunc, cfg.beta, cfg.model, cfg.jobs)
            if cfg.check:
                stored = path.read_text()
                if stored != payload:
                    failures.append(_golden_diff(path, stored, payload))
            else:
                path.write_text(payload)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    for msg in failures:
        sys.stderr.write(msg + "\n")
    return EXIT_FAIL if failures else EXIT_OK


def _golden_diff(path: Path, stored: str, fresh: str) -> str:
    try:
        old = {json.dumps(c["query"], sort_keys=True): c for c in json.loads(stored)["classes"]}
    except (ValueError, KeyError, TypeError):
        return f"{path}: not a valid golden file"
    new = {json.dumps(c["query"], sort_keys=True): c for c in json.loads(fresh)["classes"]}
    changed = sorted(k for k in set(old) | set(new) if old.get(k) != new.get(k))
    if not changed:
        return f"{path}: formatting differs"
    return f"{path}: {len(changed)} class(es) differ, first {changed[0]}"


# argument parsing ---------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2)
    common.add_argument("--lambda", dest="lam", default="")
    common.add_argument("--model", choices=["point", "free"], default="point")
    common.add_argument("--trunc", type=int, default=8)
    common.add_argument("--window", type=int, default=None)
    common.add_argument("--beta", choices=list(BETA_MODES), default="symbolic")
    common.add_argument("--pipeline", choices=["product", "pfaffian", "both"], default="both")
    common.add_argument("--format", dest="fmt", choices=["json", "csv", "text"], default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--r", type=int, default=4)
    common.add_argument("--beta-bound", dest="beta_bound", type=int, default=16)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=50)

    parser = argparse.ArgumentParser(prog="ckpfaffian", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="compute one class")
    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", help=" | ".join(SUITES))
    sub.add_parser("quadric", parents=[common], help="quadric ring table and relation checks")
    golden = sub.add_parser("export-golden", parents=[common], help="write or check golden snapshots")
    golden.add_argument("--check", action="store_true")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(ns))
    if cfg.n < 1 or cfg.trunc < 0 or cfg.jobs < 1 or cfg.r < 1:
        raise UsageError("--n, --r and --jobs must be positive and --trunc nonnegative")
    if cfg.command == "compute":
        cfg.partition()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        handler = {"compute": cmd_compute, "verify": cmd_verify, "quadric": cmd_quadric,
                   "export-golden": cmd_export_golden}[cfg.command]
        return handler(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, WindowError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except IOError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
