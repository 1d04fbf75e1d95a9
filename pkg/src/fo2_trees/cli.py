"""Command-line entry point: sat, check, normalize, oracle and gen."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from fo2_trees.checks import Fo2TreesError
from fo2_trees.config_path import CONFIG_PATH, load_config
from fo2_trees.formula import Formula, Signature, is_guarded, pretty
from fo2_trees.gf2 import Gf2Settings, gf2_sat_singular
from fo2_trees.io_utils import format_signature_header, read_formula_file, read_tree, write_tree
from fo2_trees.model import model_check
from fo2_trees.normal_form import NormalFormFormula, gf2_normalize, scott_normal_form
from fo2_trees.oracle import brute_force_sat
from fo2_trees.reductions import (
    gen_expdeg,
    gen_gf2_child_encoding,
    gen_path_gadget,
    gen_qbf,
    gen_unary_translation,
    read_qdimacs,
)
from fo2_trees.solver import BoundsSource, Mode, Outcome, SolverBounds, SolverSettings, Verdict, decide_sat, default_bounds

log = logging.getLogger(__name__)

EXIT_CODES = {Outcome.SAT: 0, Outcome.UNSAT: 1, Outcome.UNKNOWN: 2}
EXIT_ERROR = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fo2-trees", description="FO2 and GF2 satisfiability over finite trees")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--config", type=Path, default=CONFIG_PATH, help="YAML file with solver defaults")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sat = commands.add_parser("sat", help="decide finite satisfiability")
    sat.add_argument("file", type=Path)
    sat.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.GENERAL.value)
    sat.add_argument("--max-depth", type=int)
    sat.add_argument("--max-degree", type=int)
    sat.add_argument("--emit-model", type=Path, metavar="OUT.json")
    sat.add_argument("--engine", choices=["auto", "fo2", "gf2"], default="auto")

    check = commands.add_parser("check", help="model-check a sentence on a tree")
    check.add_argument("--tree", type=Path, required=True)
    check.add_argument("--formula", type=Path, required=True)

    normalize = commands.add_parser("normalize", help="print the normal form(s) of a sentence")
    normalize.add_argument("file", type=Path)
    normalize.add_argument("--gf2", action="store_true", help="stream the guarded candidates instead")

    oracle = commands.add_parser("oracle", help="search every tree up to a node count")
    oracle.add_argument("file", type=Path)
    oracle.add_argument("--max-nodes", type=int, required=True)
    oracle.add_argument("--singular", action="store_true")

    gen = commands.add_parser("gen", help="write a generated formula file to stdout")
    gen.add_argument("--out", type=Path, help="write to this file instead")
    kinds = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    kinds.add_parser("qbf").add_argument("file", type=Path, metavar="Q.qdimacs")
    kinds.add_parser("unary").add_argument("file", type=Path)
    kinds.add_parser("gf2child").add_argument("file", type=Path)
    kinds.add_parser("expdeg").add_argument("n", type=int)
    path = kinds.add_parser("path")
    path.add_argument("i", type=int)
    path.add_argument("--style", choices=["adjacent", "transitive"], default="adjacent")
    return parser


def _settings(config_file: Path) -> tuple[SolverSettings, Gf2Settings]:
    if not config_file.exists():
        log.debug("no config at %s, using built-in defaults", config_file)
        return SolverSettings(), Gf2Settings()
    config = load_config(config_file)
    return SolverSettings.from_config(config["solver"]), Gf2Settings.from_config(config["gf2"])


def choose_engine(f: Formula, sig: Signature, mode: Mode, engine: str) -> str:
    """gf2 for guarded sentences over D alone in singular mode, fo2 otherwise."""
    if engine != "auto":
        return engine
    if mode is Mode.SINGULAR and sig.binary == {"D"} and is_guarded(f):
        return "gf2"
    return "fo2"


def _emit(report: dict[str, Any]) -> None:
    print(json.dumps(report, sort_keys=True))


def _cmd_sat(args, solver_settings: SolverSettings, gf2_settings: Gf2Settings) -> int:
    f, sig = read_formula_file(args.file)
    mode = Mode(args.mode)
    engine = choose_engine(f, sig, mode, args.engine)
    log.info("engine %s, mode %s", engine, mode.value)
    if engine == "gf2":
        if args.max_depth is not None:
            gf2_settings = replace(gf2_settings, max_depth=args.max_depth)
        verdict = gf2_sat_singular(f, sig, gf2_settings)
    else:
        bounds = None
        if args.max_depth is not None or args.max_degree is not None:
            theory = default_bounds(scott_normal_form(f, sig), mode)
            bounds = SolverBounds(
                args.max_depth if args.max_depth is not None else theory.max_depth,
                args.max_degree if args.max_degree is not None else theory.max_degree,
                BoundsSource.USER,
            )
        verdict = decide_sat(f, sig, mode, bounds, solver_settings)
    report = verdict.to_dict() | {"engine": engine}
    if verdict.witness is not None and args.emit_model is not None:
        write_tree(args.emit_model, verdict.witness)
        report["model"] = str(args.emit_model)
    _emit(report)
    return EXIT_CODES[verdict.outcome]


def _cmd_check(args) -> int:
    t = read_tree(args.tree)
    f, _ = read_formula_file(args.formula)
    holds = model_check(t, f)
    print(json.dumps(holds))
    return 0 if holds else 1


def _describe(nf: NormalFormFormula) -> dict[str, Any]:
    return {
        "universal": [pretty(c) for c in nf.universal_conjuncts],
        "witnesses": [pretty(w.to_formula()) for w in nf.witness_conjuncts],
        "fresh": list(nf.fresh_predicates),
        "size": nf.size(),
    }


def _cmd_normalize(args) -> int:
    f, sig = read_formula_file(args.file)
    if args.gf2:
        _emit({"candidates": [_describe(nf) for nf in gf2_normalize(f, sig)]})
    else:
        _emit({"normal_form": _describe(scott_normal_form(f, sig))})
    return 0


def _cmd_oracle(args) -> int:
    f, sig = read_formula_file(args.file)
    found = brute_force_sat(f, sig, args.max_nodes, args.singular)
    verdict = Verdict(Outcome.SAT, found) if found is not None else Verdict(Outcome.UNKNOWN, reason=f"no model with at most {args.max_nodes} nodes")
    report = verdict.to_dict()
    if found is not None:
        report["model"] = found.to_dict()
    _emit(report)
    return EXIT_CODES[verdict.outcome]


def _cmd_gen(args) -> int:
    if args.kind == "qbf":
        generated = gen_qbf(read_qdimacs(args.file))
        f, sig = generated.formula, generated.signature
    elif args.kind in ("unary", "gf2child"):
        source, source_sig = read_formula_file(args.file)
        translate = gen_unary_translation if args.kind == "unary" else gen_gf2_child_encoding
        generated = translate(source, source_sig)
        f, sig = generated.formula, generated.signature
    elif args.kind == "expdeg":
        generated = gen_expdeg(args.n)
        f, sig = generated.formula, generated.signature
    else:
        f = gen_path_gadget(args.i, args.style)
        sig = Signature(("p",), frozenset({"N" if args.style == "adjacent" else "F"}))
    text = format_signature_header(sig) + "\n" + pretty(f) + "\n"
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def run(argv: Sequence[str] | None = None) -> int:
    """
    # Run one command and return its exit code.

        sat and oracle exit 0 for sat, 1 for unsat, 2 for unknown; check
        exits 0 when the sentence holds and 1 otherwise. Domain and file
        errors exit 3 and usage errors 64. Reports are JSON on stdout,
        logs go to stderr.

    Example
    -------
    > argv = ['sat', 'exists_a.fo2']

        return

            0, printing {"engine": "fo2", "stats": {...}, "verdict": "sat"}
    #
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "sat":
            return _cmd_sat(args, *_settings(args.config))
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "normalize":
            return _cmd_normalize(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        return _cmd_gen(args)
    except (Fo2TreesError, FileNotFoundError, ValueError) as exc:
        log.error("%s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
