"""Command line: gen-farm, run, replay, ask.

Exit codes: 0 ok, 1 usage error, 2 I/O or format error, 3 backend error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from farmtwin import ledger as ledger_io
from farmtwin.config import ConfigError, default_config, load_config, save_config
from farmtwin.engine import Simulation, generate_farm
from farmtwin.explain.chunking import terms
from farmtwin.explain.backends import BackendError, RemoteChatBackend, StubBackend
from farmtwin.explain.grounding import grounding_check
from farmtwin.explain.pipeline import DEFAULT_K, answer, build_index
from farmtwin.explain.retrieval import EmptyQueryError
from farmtwin.farm import confidence
from farmtwin.ledger import DecisionNotFound, LedgerError
from farmtwin.planner import NO_TRIGGER, DecisionRecord

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_BACKEND = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="farmtwin", description="Drone-fleet farm twin with explainable dispatch decisions.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress and backend payloads")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-farm", help="write a scenario config with a synthetic farm")
    g.add_argument("--rows", type=int, default=20)
    g.add_argument("--cols", type=int, default=20)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--duration", type=float, default=500.0)
    g.add_argument("--out", required=True, type=Path)

    r = sub.add_parser("run", help="run a scenario and write its ledger")
    r.add_argument("--config", required=True, type=Path)
    r.add_argument("--out", required=True, type=Path)

    rp = sub.add_parser("replay", help="print decision traces from a ledger")
    rp.add_argument("--ledger", required=True, type=Path)
    rp.add_argument("--decision", type=int)
    rp.add_argument("--all", action="store_true", help="include no_trigger decisions")

    a = sub.add_parser("ask", help="explain one decision")
    a.add_argument("--ledger", required=True, type=Path)
    a.add_argument("--kb", type=Path, help="knowledge base directory (default: shipped)")
    a.add_argument("--decision", required=True, type=int)
    a.add_argument("--question", required=True)
    a.add_argument("--backend", choices=("stub", "remote"), default="stub")
    a.add_argument("--k", type=int, default=DEFAULT_K)
    a.add_argument("--timeout", type=float, default=60.0)
    a.add_argument("--json", action="store_true", help="print the full explanation as JSON")
    return p


def format_decision(rec: DecisionRecord) -> str:
    t = rec.trigger
    cmp = "<" if t.confidence < t.t_alpha else ">="
    lines = [
        f"Decision {rec.decision_id} @ t={rec.sim_time:g}  tile {t.tile_id}  "
        f"observed mean {t.observed_mean:.4f}  confidence {t.confidence:.4f} {cmp} T_alpha {t.t_alpha:g}"
    ]
    if rec.candidates:
        lines.append(
            f"  {'drone':>5} {'t_rem':>8} {'t_disp':>8} {'t_insp':>8} {'delta_t':>8} {'battery':>8}  feasible  reason"
        )
        for c in rec.candidates:
            mark = "*" if c.drone_id == rec.selected_drone_id else " "
            lines.append(
                f" {mark}{c.drone_id:>5} {c.t_rem:>8.3f} {c.t_disp:>8.3f} {c.t_insp:>8.3f} {c.delta_t:>8.3f} "
                f"{c.predicted_battery:>8.3f}  {'yes' if c.feasible else 'no':<8}  {c.rejection_reason or ''}".rstrip()
            )
    tail = f"  outcome: {rec.outcome}"
    if rec.selected_drone_id is not None:
        tail += f" -> drone {rec.selected_drone_id}"
    tail += f"  (T_b {rec.thresholds_snapshot.t_b:g})"
    lines.append(tail)
    return "\n".join(lines)


def _gen_farm(args) -> int:
    if args.rows < 1 or args.cols < 1:
        raise UsageError("--rows and --cols must be >= 1")
    cfg = default_config(args.rows, args.cols, args.seed, duration=args.duration)
    save_config(cfg, args.out)
    tiles = generate_farm(cfg)
    ambiguous = sum(1 for t in tiles if confidence(t.true_mean, cfg.fuzzy) < cfg.thresholds.t_alpha)
    print(
        f"wrote {args.out}: {cfg.rows}x{cfg.cols} tiles, {len(cfg.field.patches)} blight patches, "
        f"{ambiguous} ambiguous tiles in ground truth"
    )
    return EXIT_OK


def _run(args) -> int:
    cfg = load_config(args.config)
    sim = Simulation(cfg)
    led = sim.run()
    ledger_io.save(led, args.out)
    outcomes = {}
    for r in led.decisions:
        outcomes[r.outcome] = outcomes.get(r.outcome, 0) + 1
    summary = ", ".join(f"{k} {v}" for k, v in sorted(outcomes.items()))
    print(f"wrote {args.out}: t={sim.now:g}, {len(led.events)} events, {len(led.decisions)} decisions ({summary})")
    if sim.pending:
        print(f"pending tiles at end: {', '.join(str(t) for t in sim.pending)}")
    return EXIT_OK


def _replay(args) -> int:
    led = ledger_io.load(args.ledger)
    if args.decision is not None:
        records = [led.get_decision(args.decision)[0]]
    else:
        records = [r for r in led.decisions if args.all or r.outcome != NO_TRIGGER]
    print("\n\n".join(format_decision(r) for r in records))
    return EXIT_OK


def _ask(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    led = ledger_io.load(args.ledger)
    led.get_decision(args.decision)
    if not terms(args.question):
        raise UsageError("--question has no words")
    index = build_index(args.kb)
    if args.backend == "stub":
        backend = StubBackend()
    else:
        backend = RemoteChatBackend.from_env(timeout=args.timeout, verbose=args.verbose)
    exp = answer(args.question, args.decision, led, index, backend, args.k)
    report = grounding_check(exp)
    if args.json:
        print(json.dumps({**exp.to_dict(), "grounding": report.to_dict()}, indent=2, ensure_ascii=False))
        return EXIT_OK
    print(exp.answer_text)
    print()
    print("used chunks: " + ", ".join(f"{s}#{i}" for s, i in exp.used_chunk_ids))
    if report.passed:
        print(f"grounding: ok ({len(report.checked)} numbers checked)")
    else:
        print(f"grounding: {len(report.ungrounded)} ungrounded numbers: {', '.join(report.ungrounded)}")
    return EXIT_OK


COMMANDS = {"gen-farm": _gen_farm, "run": _run, "replay": _replay, "ask": _ask}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, EmptyQueryError) as exc:
        print(f"farmtwin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DecisionNotFound as exc:
        print(f"farmtwin: {exc.args[0]}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, LedgerError, OSError) as exc:
        print(f"farmtwin: {exc}", file=sys.stderr)
        return EXIT_IO
    except BackendError as exc:
        print(f"farmtwin: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
