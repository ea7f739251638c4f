"""Command-line entry point: ``omegalab verify <suite>`` and ``omegalab run <scenario>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .coding import ApproxSequence, encode_set
from .construction import LeastEffortTracker, run_construction, silent_adversary
from .dyadic import Dyadic, prefix
from .games import hload, offset_use, table_use
from .machines import build_reduction, decide_member, reduce_real, solovay_items, stable_arguments
from .suites import SUITES, SuiteReport, run_suite, worker_count
from .usefn import ConstructionPlan, UseTable, build_plan, desk_signature

__all__ = ["SweepConfig", "main", "parse_range", "cmd_verify", "cmd_run"]

SUITE_DEFAULTS = {
    "general": {"count": 200},
    "truncsums": {"count": 200},
    "dominance": {"count": 20, "per_game": 100},
    "accumulation": {"count": 20, "per_game": 25},
    "coding": {"count": 500},
    "kc": {"count": 200},
    "reduction": {"count": 200},
}


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"1..10"`` (inclusive) or ``"1,4,9"``."""
    text = text.strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N, A..B or A,B,C") from None


@dataclass
class SweepConfig:
    suite: str
    n: list[int] = field(default_factory=lambda: list(range(1, 11)))
    k: list[int] = field(default_factory=lambda: list(range(0, 9)))
    c: list[int] = field(default_factory=lambda: list(range(0, 7)))
    E: list[int] = field(default_factory=lambda: [1, 2, 3])
    T: int = 12
    seed: int = 0
    count: int = 200
    per_game: int = 100
    out: Optional[str] = None
    format: str = "json"

    def __post_init__(self) -> None:
        for name in ("n", "k", "c", "E"):
            if not getattr(self, name):
                raise ValueError(f"grid {name} is empty")
        if self.count < 1 or self.per_game < 1:
            raise ValueError("counts must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    def to_json(self) -> dict:
        return asdict(self)


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_verify(cfg: SweepConfig) -> tuple[int, SuiteReport]:
    report = run_suite(cfg.suite, cfg)
    body = _rows_csv(report.rows) if cfg.format == "csv" else json.dumps(report.to_json(), indent=1)
    if cfg.out:
        _emit(body, cfg.out)
    summary = (f"{cfg.suite}: {len(report.rows)} rows, {report.violations} violations, "
               f"{report.seconds:.2f}s, workers={worker_count()}")
    print(summary, file=sys.stderr if not cfg.out else sys.stdout)
    if not cfg.out:
        _emit(body, None)
    return (0 if report.ok else 1), report


# run scenarios ------------------------------------------------------------------


def _load_json(path_or_text: str):
    text = path_or_text.strip()
    if text.startswith(("[", "{")):
        return json.loads(text)
    with open(path_or_text) as fh:
        return json.load(fh)


def _use_function(h_text: str, g_text: Optional[str]):
    h_text = h_text.replace(" ", "")
    if h_text == "x+g":
        if g_text is None:
            raise ValueError('"x+g" needs --g with a JSON array of g(1), g(2), ...')
        return table_use(UseTable.from_values(_load_json(g_text)))
    if h_text.startswith("x+") and h_text[2:].isdigit():
        return offset_use(int(h_text[2:]))
    if h_text == "x":
        return offset_use(0)
    raise ValueError(f'unsupported use expression {h_text!r}; use "x+<int>" or "x+g"')


def _interval(text: str) -> tuple[int, int]:
    parts = text.split("..")
    if len(parts) != 2:
        raise ValueError(f"interval must look like LO..HI, got {text!r}")
    return int(parts[0]), int(parts[1])


def run_hload(args) -> dict:
    h = _use_function(args.h, args.g)
    trace = hload(h, _interval(args.interval), gamma0=Dyadic.parse(args.gamma0))
    body = trace.to_csv() if args.format == "csv" else json.dumps(trace.to_json(), indent=1)
    _emit(body, args.out)
    return {"gamma": str(trace.final.gamma), "binary": trace.final.gamma.binary(), "steps": trace.final.step}


def _adversaries(spec: str, plan: ConstructionPlan, h) -> list:
    out = []
    for part in spec.split(","):
        kind, _, count = part.partition(":")
        for _ in range(int(count or 1)):
            e = len(out)
            if kind == "least_effort":
                out.append(LeastEffortTracker(h, plan.block(min(e, plan.E - 1))[1]))
            elif kind == "silent":
                out.append(silent_adversary())
            else:
                raise ValueError(f"unknown adversary {kind!r}; use least_effort or silent")
    return out


def run_construct(args) -> dict:
    if args.plan:
        plan = ConstructionPlan.from_json(_load_json(args.plan))
    else:
        plan = build_plan(desk_signature(args.desk), args.desk)
    h = table_use(plan.signature)
    advs = _adversaries(args.adversaries or f"least_effort:{plan.E}", plan, h)
    trace = run_construction(plan, advs, stage_budget=args.budget)
    if args.format == "csv":
        body = trace.to_csv()
    else:
        data = trace.to_json()
        if not args.full:
            data["stages"] = data["stages"][-args.tail:] if args.tail else []
            data["stage_count"] = len(trace.stages)
        data["digest"] = trace.digest()
        body = json.dumps(data, indent=1)
    _emit(body, args.out)
    return {"terminated": trace.terminated, "stages": len(trace.stages),
            "outcomes": [r.outcome for r in trace.requirements]}


def run_encode(args) -> dict:
    a = ApproxSequence.load(args.approx)
    coded = encode_set(a, args.n)
    payload = {"n": args.n, "bits": coded.bits, "length": len(coded.bits),
               "blocks": [coded.block(i) for i in range(1, args.n + 1)]}
    _emit(json.dumps(payload, indent=1) if args.out else coded.bits, args.out)
    return {"length": len(coded.bits)}


def run_reduce(args) -> dict:
    omega = ApproxSequence.load(args.omega)
    g = UseTable.from_values(_load_json(args.g))
    payload: dict = {}
    if args.A:
        A = [tuple(p) for p in _load_json(args.A)]
        tables = build_reduction(A, g, omega)
        stable = stable_arguments(tables, A, g, omega)
        payload["tables"] = tables.to_json()
        payload["decisions"] = [
            {"n": n, "bit": decide_member(n, prefix(omega.final, g(n)), tables, A, g, omega),
             "stable": n in stable}
            for n in range(tables.c + 1, len(g) + 1)
        ]
    if args.approx:
        a = ApproxSequence.load(args.approx)
        ledger = solovay_items(a, omega, g)
        payload["ledger"] = ledger.to_json()
        top = min(len(g), a.precision)
        payload["prefixes"] = [
            {"n": n, "prefix": reduce_real(n, prefix(omega.final, n + g(n)), a, omega, g),
             "true": prefix(a.final, n)}
            for n in range(1, top + 1)
        ]
    if not payload:
        raise ValueError("reduce needs --A (set reduction) and/or --approx (real reduction)")
    _emit(json.dumps(payload, indent=1), args.out)
    return {k: True for k in payload}


SCENARIOS = {"hload": run_hload, "construct": run_construct, "encode": run_encode, "reduce": run_reduce}


def cmd_run(args) -> int:
    try:
        summary = SCENARIOS[args.scenario](args)
    except (ValueError, IndexError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        print(json.dumps(summary))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="omegalab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--n", type=parse_range)
    v.add_argument("--k", type=parse_range)
    v.add_argument("--c", type=parse_range)
    v.add_argument("--E", type=parse_range, help="plan sizes for the construction suite")
    v.add_argument("--T", type=int, help="condensation depth (2^T terms)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int)
    v.add_argument("--per-game", type=int, dest="per_game")
    v.add_argument("--out")
    v.add_argument("--format", choices=["json", "csv"], default="json")

    r = sub.add_parser("run", help="run one scenario and write its trace")
    r.add_argument("scenario", choices=sorted(SCENARIOS))
    r.add_argument("--h", default="x+0", help='"x+<int>" or "x+g"')
    r.add_argument("--g", help="JSON array (or file) of g(1), g(2), ...")
    r.add_argument("--interval", default="0..1", help="LO..HI for the load on (LO, HI]")
    r.add_argument("--gamma0", default="0")
    r.add_argument("--plan", help="plan JSON with signature and boundaries (or E)")
    r.add_argument("--desk", type=int, default=1, help="without --plan: desk plan with this many blocks")
    r.add_argument("--adversaries", help="comma list of kind:count, kinds least_effort and silent")
    r.add_argument("--budget", type=int)
    r.add_argument("--full", action="store_true", help="keep every stage in JSON output")
    r.add_argument("--tail", type=int, default=20, help="stages kept in JSON output without --full")
    r.add_argument("--approx", help="JSON list of approximation values")
    r.add_argument("--omega", help="JSON list of Omega approximation values")
    r.add_argument("--A", help="JSON list of [n, stage] enumeration pairs")
    r.add_argument("--n", type=int, default=4)
    r.add_argument("--out")
    r.add_argument("--format", choices=["json", "csv"], default="json")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        fields = {"suite": args.suite, "seed": args.seed, "out": args.out, "format": args.format,
                  **SUITE_DEFAULTS.get(args.suite, {})}
        for name in ("n", "k", "c", "E", "T", "count", "per_game"):
            if getattr(args, name) is not None:
                fields[name] = getattr(args, name)
        try:
            cfg = SweepConfig(**fields)
        except ValueError as exc:
            parser.error(str(exc))
        code, _ = cmd_verify(cfg)
        return code
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
