"""Command-line front end: check properties of documents, verify
certificates, run suites and scenarios.

Exit codes: 0 a definite Holds (or success), 1 a definite Fails (or
violation/rejected certificate), 2 Unknown, 64 usage errors, 65 parse or
data errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import documents as docs
from .deciders import (
    Verdict,
    check_bimorphism,
    check_epi,
    check_iso,
    check_mono,
    check_movability,
    check_stability,
    check_strong_epi,
    check_strong_mono,
)
from .gallery import builtin_scenarios, run_scenario, run_suite, scenario_by_name
from .prosys import Horizon, HorizonExhausted, default_horizon

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_CHECKS = {
    "mono": check_mono,
    "epi": check_epi,
    "strong-mono": check_strong_mono,
    "strong-epi": check_strong_epi,
    "iso": check_iso,
    "bimorphism": check_bimorphism,
}

_FLAVORS = {
    "movable": "classical",
    "uniformly-movable": "uniform",
    "sequentially-movable": "sequential",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="procat",
                     description="Levelwise decision procedures for pro-categories "
                                 "over FinSet and finitely generated abelian groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide a property for a named subject")
    p_check.add_argument("file", help="procat/1 JSON document")
    p_check.add_argument("property", help=", ".join(docs.PROPERTIES))
    p_check.add_argument("name", help="morphism or system name in the document")
    p_check.add_argument("--horizon", type=int, default=None)
    p_check.add_argument("--certificate", metavar="OUT",
                         help="write the certificate/counterwitness JSON here")

    p_run = sub.add_parser("run", help="run every query embedded in a document")
    p_run.add_argument("file")

    p_verify = sub.add_parser("verify", help="replay a certificate's equations")
    p_verify.add_argument("certificate")
    p_verify.add_argument("--doc", default=None,
                          help="re-check the hash binding against this document")

    p_suite = sub.add_parser("suite", help="run a property suite")
    p_suite.add_argument("name")
    p_suite.add_argument("-n", type=int, default=50)
    p_suite.add_argument("--seed", type=int, default=0)
    p_suite.add_argument("--replay-dir", default=".",
                         help="directory for violation replay files")

    p_scenario = sub.add_parser("scenario", help="replay builtin scenarios")
    p_scenario.add_argument("name", help="scenario name or 'all'")
    return parser


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(EXIT_DATA)
    except json.JSONDecodeError as exc:
        print(f"error: {path} line {exc.lineno} column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        raise SystemExit(EXIT_DATA)


def _load_document(path: str) -> docs.Document:
    payload = _load_json(path)
    try:
        return docs.parse_document(payload)
    except docs.DocumentError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_DATA)


def _decide(doc: docs.Document, prop: str, name: str,
            horizon: int | None) -> tuple[Verdict, int, str]:
    if prop not in docs.PROPERTIES:
        print(f"error: unknown property {prop!r}; valid: {', '.join(docs.PROPERTIES)}",
              file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if prop in docs.MORPHISM_PROPERTIES:
        if name not in doc.morphisms:
            print(f"error: no morphism named {name!r} in the document", file=sys.stderr)
            raise SystemExit(EXIT_DATA)
        subject = doc.morphisms[name]
        h = Horizon(horizon) if horizon else default_horizon(subject.source, subject.target)
        verdict = _CHECKS[prop](subject, h)
        kind = "morphism"
    else:
        if name not in doc.systems:
            print(f"error: no system named {name!r} in the document", file=sys.stderr)
            raise SystemExit(EXIT_DATA)
        subject = doc.systems[name]
        h = Horizon(horizon) if horizon else default_horizon(subject)
        if prop == "stable":
            verdict = check_stability(subject, h)
        else:
            verdict = check_movability(subject, _FLAVORS[prop], h)
        kind = "system"
    return verdict, h.depth, kind


def _outcome_exit(outcome: str) -> int:
    return {"holds": EXIT_HOLDS, "fails": EXIT_FAILS, "unknown": EXIT_UNKNOWN}[outcome]


def _render_verdict(prop: str, name: str, verdict: Verdict, elapsed: float) -> str:
    lines = [f"{prop} {name}: {verdict.outcome.upper()}  ({elapsed * 1000:.1f} ms)"]
    if verdict.note:
        lines.append(f"  note: {verdict.note}")
    if verdict.certificate is not None:
        entries = verdict.certificate.entries
        if entries:
            shown = entries[: min(len(entries), 6)]
            for e in shown:
                lines.append(f"  level {e.alpha}: witness at {e.beta} ({e.kind})")
            if len(entries) > len(shown):
                lines.append(f"  ... {len(entries) - len(shown)} more entries")
        for key, rule in verdict.certificate.rules.items():
            if isinstance(rule, dict) and "note" in rule:
                lines.append(f"  {key}: {rule['note']}")
        if verdict.certificate.sampled:
            lines.append("  (holds on the sampled selector family only)")
    if verdict.counterwitness is not None:
        cw = verdict.counterwitness
        lines.append(f"  counterwitness at level {cw.alpha}")
        rule = cw.rule
        if "note" in rule:
            lines.append(f"  rule: {rule.get('kind')}: {rule['note']}")
        for r in cw.refutations[:4]:
            lines.append(f"    beta {r.beta}: {r.reason}")
        if len(cw.refutations) > 4:
            lines.append(f"    ... {len(cw.refutations) - 4} more refutations")
    return "\n".join(lines)


def cmd_check(args) -> int:
    doc = _load_document(args.file)
    start = time.perf_counter()
    try:
        verdict, depth, kind = _decide(doc, args.property, args.name, args.horizon)
    except HorizonExhausted as exc:
        print(f"unknown: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    elapsed = time.perf_counter() - start
    print(_render_verdict(args.property, args.name, verdict, elapsed))
    bound = docs.subject_hash(doc, args.property, args.name)
    record = docs.encode_verdict(doc.category, verdict, args.property,
                                 kind, args.name, bound, depth)
    record["elapsed_ms"] = round(elapsed * 1000, 3)
    print("--- machine readable ---")
    print(json.dumps(record, indent=2, sort_keys=True))
    if args.certificate:
        Path(args.certificate).write_text(docs.canonical_json(record),
                                          encoding="utf-8")
        print(f"certificate written to {args.certificate}")
    return _outcome_exit(verdict.outcome)


def cmd_run(args) -> int:
    doc = _load_document(args.file)
    if not doc.queries:
        print("document has no queries")
        return EXIT_HOLDS
    worst = EXIT_HOLDS
    for q in doc.queries:
        start = time.perf_counter()
        verdict, _depth, _kind = _decide(doc, q.prop, q.subject, q.horizon)
        elapsed = time.perf_counter() - start
        print(_render_verdict(q.prop, q.subject, verdict, elapsed))
        worst = max(worst, _outcome_exit(verdict.outcome))
    return worst


def cmd_verify(args) -> int:
    payload = _load_json(args.certificate)
    if payload.get("format") != docs.CERT_FORMAT:
        print(f"error: not a certificate file (format "
              f"{payload.get('format')!r})", file=sys.stderr)
        return EXIT_DATA
    if args.doc is not None:
        doc = _load_document(args.doc)
        subject = payload.get("subject", {})
        name = subject.get("name")
        prop = payload.get("property")
        pool = doc.morphisms if subject.get("kind") == "morphism" else doc.systems
        if name not in pool:
            print(f"verify: FAILED binding: no subject {name!r} in {args.doc}")
            return EXIT_FAILS
        expect = docs.subject_hash(doc, prop, name)
        if expect != payload.get("subject_hash"):
            print("verify: FAILED binding: certificate was issued for a "
                  "different subject (hash mismatch)")
            return EXIT_FAILS
        bind_failures = docs.verify_against_document(payload, doc)
        if bind_failures:
            for f in bind_failures:
                print(f"verify: FAILED {f}")
            return EXIT_FAILS
    failures = docs.replay_certificate(payload)
    if failures:
        for f in failures:
            print(f"verify: FAILED {f}")
        return EXIT_FAILS
    print(f"verify: OK ({payload.get('property')} = {payload.get('verdict')}, "
          f"{len(payload.get('certificate', {}).get('entries', []) if payload.get('certificate') else [])} entries replayed)")
    return EXIT_HOLDS


def cmd_suite(args) -> int:
    try:
        report = run_suite(args.name, args.n, args.seed)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    print("\n".join(report.summary_lines()))
    print("--- machine readable ---")
    summary = {"suite": report.suite, "n": report.n, "seed": report.seed,
               "laws": {k: {"pass": v.passed, "skipped": v.skipped,
                            "violations": v.violations}
                        for k, v in report.laws.items()}}
    print(json.dumps(summary, indent=2, sort_keys=True))
    if not report.ok:
        path = Path(args.replay_dir) / f"procat-replay-{report.suite}-{report.seed}.json"
        path.write_text(docs.canonical_json(_replay_payload(report)), encoding="utf-8")
        print(f"violations: replay file written to {path}")
        return EXIT_FAILS
    return EXIT_HOLDS


def _replay_payload(report) -> dict:
    from .gallery import GeneratorParams, random_instance
    out = {"suite": report.suite, "n": report.n, "seed": report.seed,
           "violations": []}
    for law, lc in report.laws.items():
        for v in lc.violations:
            item = {"law": law, "instance": v}
            if isinstance(v, dict) and "seed" in v and "category" in v:
                try:
                    f = random_instance(GeneratorParams(category=v["category"],
                                                        seed=v["seed"]))
                    item["document"] = {
                        "format": docs.FORMAT,
                        "category": v["category"],
                        "systems": {"X": docs.encode_system(f.source),
                                    "Y": docs.encode_system(f.target)},
                        "morphisms": {"f": {**docs.encode_level_morphism(f),
                                            "source": "X", "target": "Y"}},
                        "queries": [],
                    }
                except Exception:
                    pass
            out["violations"].append(item)
    return out


def cmd_scenario(args) -> int:
    if args.name == "all":
        scenarios = builtin_scenarios()
    else:
        try:
            scenarios = [scenario_by_name(args.name)]
        except KeyError:
            names = ", ".join(sc.name for sc in builtin_scenarios())
            print(f"error: unknown scenario {args.name!r}; valid: {names}, all",
                  file=sys.stderr)
            return EXIT_USAGE
    bad = 0
    for sc in scenarios:
        results = run_scenario(sc)
        for prop, expected, actual, ok in results:
            mark = "ok" if ok else "MISMATCH"
            print(f"{sc.name}: {prop}: expected {expected}, got {actual} [{mark}]")
            if not ok:
                bad += 1
    return EXIT_HOLDS if bad == 0 else EXIT_FAILS


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    handlers = {"check": cmd_check, "run": cmd_run, "verify": cmd_verify,
                "suite": cmd_suite, "scenario": cmd_scenario}
    try:
        return handlers[args.command](args)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_DATA
    except docs.DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
