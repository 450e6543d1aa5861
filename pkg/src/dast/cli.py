"""``dast`` command line: one subcommand per pipeline stage.

Exit codes: 0 success, 1 I/O error, 2 parse or validation error, 3 derivation
limit reached, 4 data-schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import terms as T
from .complexity import (
    DimensionPolicy,
    ValueConfig,
    complexity_report,
    fmt_number,
    relative_complexity,
    sentence_complexity,
)
from .corpus import DEFAULT_REFERENCES, METRICS, MEASURES, corpus_report, genre_split_regression, read_corpus, report_to_csv
from .engine import DerivationLimits, Lattice, derive, ordered_terms
from .errors import DataSchemaError, DerivationError, DSLSyntaxError, LimitExceeded, LogicError, QuantizationError
from .judgment import dast_judge, read_dast_json, read_human_csv, score_report
from .logic import SemanticLogic, load_logic, logic_id, logic_stats, quantize_text
from .markov import MarkovParams, fit_alphas_per_step, markov_report

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_LIMIT, EXIT_SCHEMA = 0, 1, 2, 3, 4


class _Usage(Exception):
    """Bad flag combination or value, reported with exit code 2."""


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# shared pieces


def _logic_and_terms(args) -> tuple[SemanticLogic, list, str]:
    """Load ``--logic`` and quantize ``--text`` or ``--binding``."""
    logic = load_logic(args.logic, strict=getattr(args, "strict", False))
    if args.binding:
        sym, term = _split_binding(args.binding)
        logic = logic.with_binding(sym, term)
        return logic, quantize_text(sym, logic), sym
    if args.text is None:
        raise _Usage("give --text or --binding")
    return logic, quantize_text(args.text, logic), args.text


def _split_binding(spec: str):
    sym, sep, rhs = spec.partition("=")
    if not sep or not sym.strip() or not rhs.strip():
        raise _Usage(f"binding must look like SYM=TERM, got {spec!r}")
    sym = sym.strip()
    if not sym.startswith("#"):
        sym = "#" + sym
    return sym, T.parse_term(rhs.strip())


def _limits(args) -> DerivationLimits:
    return DerivationLimits(args.max_iter, args.max_depth)


def _value_config(args) -> ValueConfig:
    weights = {}
    for spec in args.tag_weight or ():
        tag, sep, w = spec.partition("=")
        if not sep:
            raise _Usage(f"tag weight must look like TAG=W, got {spec!r}")
        try:
            weights[tag.strip()] = float(w)
        except ValueError:
            raise _Usage(f"tag weight {w!r} is not a number") from None
    return ValueConfig(args.schema, weights, args.log_base)


def _add_derive_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--logic", required=True, help="semantic logic file")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--text", help="text, #-symbol or registered sentence to quantize")
    src.add_argument("--binding", help="SYM=TERM binding to add and derive from")
    p.add_argument("--max-iter", type=int, default=DerivationLimits.max_iterations)
    p.add_argument("--max-depth", type=int, default=DerivationLimits.max_term_depth)
    p.add_argument("--strict", action="store_true", help="require declared symbols")


def _add_value_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schema", choices=("product", "tagged"), default="product")
    p.add_argument("--tag-weight", action="append", metavar="TAG=W",
                   help="weight for rules with this tag (tagged schema)")
    p.add_argument("--log-base", type=float, default=2.0)
    p.add_argument("--dims", default="maximal", help="maximal, all or top:K")


def _policy(args) -> DimensionPolicy:
    try:
        return DimensionPolicy.parse(args.dims)
    except ValueError as exc:
        raise _Usage(str(exc)) from None


# --------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    logic = load_logic(args.logic, strict=args.strict)
    stats = logic_stats(logic)
    _emit(args, dump_json({
        "valid": True,
        "logic_id": logic_id(logic),
        "theories": stats.theory_count,
        "dependencies": stats.dependency_count,
        "model_elements": stats.model_element_count,
        "operators": stats.operator_count,
        "rules": stats.rule_count,
    }))
    return EXIT_OK


def _lattice_output(args, lattice: Lattice) -> str:
    if args.terms_only:
        return dump_json([T.render_term(t) for t in ordered_terms(lattice)])
    return lattice.to_json() + "\n"


def cmd_derive(args) -> int:
    logic, initial, text = _logic_and_terms(args)
    try:
        lattice = derive(initial, logic, _limits(args), text=text)
    except LimitExceeded as exc:
        _emit(args, _lattice_output(args, exc.lattice))
        print(f"dast: limit reached: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    _emit(args, _lattice_output(args, lattice))
    return EXIT_OK


def cmd_complexity(args) -> int:
    if args.lattice:
        logic = load_logic(args.logic)
        if args.binding:
            logic = logic.with_binding(*_split_binding(args.binding))
        try:
            lattice = Lattice.from_json(Path(args.lattice).read_text(encoding="utf-8"))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataSchemaError(f"bad lattice file: {exc}") from None
    else:
        logic, initial, text = _logic_and_terms(args)
        lattice = derive(initial, logic, _limits(args), text=text)
    report = complexity_report(lattice, logic, _value_config(args), _policy(args),
                               normalize=args.log_normalize)
    _emit(args, dump_json(report))
    return EXIT_OK


def cmd_compare(args) -> int:
    if len(args.sentence) != 5:
        raise _Usage(f"compare needs exactly 5 --sentence values, got {len(args.sentence)}")
    base = load_logic(args.logic)
    config, policy = _value_config(args), _policy(args)
    values, dastexes = [], []
    for spec in args.sentence:
        logic, key = base, spec
        if "=" in spec and spec.split("=", 1)[0].strip().startswith("#"):
            key, term = _split_binding(spec)
            logic = base.with_binding(key, term)
        lattice = derive(quantize_text(key, logic), logic, _limits(args), text=key)
        values.append(sentence_complexity(lattice, logic, args.complexity, config, policy))
        dastexes.append(sentence_complexity(lattice, logic, "dastex"))
    dj = dast_judge(values)
    try:
        relative = [fmt_number(v) for v in relative_complexity(values)]
    except ValueError:
        relative = None
    _emit(args, dump_json({
        "complexity": args.complexity,
        "sentences": list(args.sentence),
        "values": [fmt_number(v) for v in values],
        "dastex": [int(v) for v in dastexes],
        "relative": relative,
        "judgment": dj.to_dict(),
    }))
    return EXIT_OK


def cmd_score(args) -> int:
    dj = read_dast_json(args.dj)
    hj = read_human_csv(args.hj)
    _emit(args, dump_json(score_report(dj, hj)))
    return EXIT_OK


def cmd_corpus(args) -> int:
    pairs = read_corpus(args.corpus)
    refs = args.reference or list(DEFAULT_REFERENCES)
    for r in refs:
        if r not in METRICS:
            raise _Usage(f"unknown reference metric {r!r}")
    report = corpus_report(pairs, references=refs, dr_decimals=args.dr_decimals)
    if args.regress:
        report["regression"] = genre_split_regression(pairs, args.regress, args.exclude or ())
    if args.format == "csv":
        _emit(args, report_to_csv(report))
    else:
        _emit(args, dump_json(report))
    return EXIT_OK


def cmd_markov(args) -> int:
    params = None
    if args.alpha is not None:
        if len(args.alpha) == 1:
            params = MarkovParams.shared(args.alpha[0])
        elif len(args.alpha) == 4:
            params = MarkovParams(tuple(args.alpha))
        else:
            raise _Usage("--alpha takes one shared value or four per-step values")
    if params is None and args.fit is None:
        raise _Usage("give --alpha and/or --fit")
    if args.simulate is not None:
        if params is None:
            raise _Usage("--simulate needs --alpha")
        if args.seed is None:
            raise _Usage("--simulate needs --seed")
    report = markov_report(params, args.fit, args.simulate, args.seed)
    if args.fit is not None and args.per_step:
        report["fit_per_step"] = fit_alphas_per_step(args.fit, seed=args.seed or 0)
    _emit(args, dump_json(report))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dast", description="Semantic complexity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and check a semantic logic")
    p.add_argument("--logic", required=True)
    p.add_argument("--strict", action="store_true", help="require declared symbols")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("derive", help="derive the semantic lattice of a text")
    _add_derive_flags(p)
    p.add_argument("--terms-only", action="store_true", help="print the closure terms only")
    p.add_argument("--out")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("complexity", help="node values, DASTEX and overall complexity")
    _add_derive_flags(p)
    p.add_argument("--lattice", help="lattice JSON from `dast derive` instead of deriving")
    _add_value_flags(p)
    p.add_argument("--log-normalize", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("compare", help="run the five-sentence bracket")
    p.add_argument("--logic", required=True)
    p.add_argument("--sentence", action="append", default=[],
                   help="#-symbol, SYM=TERM or text; give five times")
    p.add_argument("--complexity", choices=("overall", "dastex"), default="overall")
    p.add_argument("--max-iter", type=int, default=DerivationLimits.max_iterations)
    p.add_argument("--max-depth", type=int, default=DerivationLimits.max_term_depth)
    _add_value_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("score", help="score human judgments against a DAST judgment")
    p.add_argument("--dj", required=True, help="DAST judgment JSON")
    p.add_argument("--hj", required=True, help="human judgment CSV")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("corpus", help="difficulty-ratio report for a paragraph corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--reference", action="append", metavar="METRIC",
                   help="reference metric for error percentages (repeatable)")
    p.add_argument("--dr-decimals", type=int, help="round DRs before computing errors")
    p.add_argument("--regress", choices=sorted(MEASURES),
                   help="add per-genre DASTEX-DR regression on this measure")
    p.add_argument("--exclude", action="append", metavar="TOPIC")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("markov", help="deviation-count model of the judgment steps")
    p.add_argument("--alpha", type=float, nargs="+", help="one shared or four per-step alphas")
    p.add_argument("--fit", type=float, nargs=5, metavar="SHARE",
                   help="observed shares for 0..4 deviated steps")
    p.add_argument("--per-step", action="store_true", help="also fit four alphas (under-determined)")
    p.add_argument("--simulate", type=int, metavar="N")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_markov)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except LimitExceeded as exc:
        print(f"dast: limit reached: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except DataSchemaError as exc:
        print(f"dast: data error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except DSLSyntaxError as exc:
        print(f"{args.__dict__.get('logic') or 'dast'}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (LogicError, QuantizationError, DerivationError, _Usage, ValueError) as exc:
        print(f"dast: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"dast: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
