"""Command-line interface: ``causegraph <subcommand> ...``.

Every subcommand writes data to ``--out`` (or stdout) and diagnostics to
stderr. Exit codes: 0 success, 1 invalid data, 2 usage or I/O problems.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .analysis import corpus_report, round_floats, token_count
from .chains import DEFAULT_PRECEDENCE, chain_gold, corr_gold, corr_items, membership_items, parse_precedence, position_items, write_jsonl
from .complexity import METRICS, ComplexityConfig, compute_profiles, parse_log_base
from .graph import RunMode
from .ingest import IngestConfig, IngestError, load_dataset, serialize_dataset, validate
from .prompts import UnknownVariant, build_prompt_items, gold_task, parse_task, parse_variant
from .readability import EASY_WORDS_ENV, MissingWordList, load_easy_words, score_text, summarize
from .scoring import LABEL_SETS, DuplicateItem, read_gold, read_predictions, score_classification
from . import stats as st

logger = logging.getLogger("causegraph")

GOLD_TASKS = tuple(LABEL_SETS)


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# --- output helpers -----------------------------------------------------------

def _dump_json(obj, precise: bool) -> str:
    if not precise:
        obj = round_floats(obj)
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _fmt(v, precise: bool) -> str:
    if isinstance(v, float):
        return repr(v) if precise else f"{v:.4f}"
    return str(v)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence], precise: bool) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v, precise) for v in row])
    return buf.getvalue()


def _write(out: Optional[str], text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


def _is_csv(out: Optional[str], fmt: Optional[str]) -> bool:
    if fmt:
        return fmt == "csv"
    return bool(out) and out.lower().endswith(".csv")


# --- shared configuration -----------------------------------------------------

def _ingest_config(args) -> IngestConfig:
    return IngestConfig(delimiter=args.delimiter, unique_relation_scope=args.unique_scope)


def _parse_weights(text: Optional[str]) -> Dict[str, float]:
    weights = {m: 1.0 for m in METRICS}
    if not text:
        return weights
    for chunk in text.split(","):
        key, sep, val = chunk.partition("=")
        key = key.strip()
        if not sep or key not in METRICS:
            raise UsageError(f"--weights: bad entry {chunk!r}; expected metric=value with metric in {', '.join(METRICS)}")
        try:
            weights[key] = float(val)
        except ValueError:
            raise UsageError(f"--weights: {val!r} is not a number") from None
    return weights


def _complexity_config(args) -> ComplexityConfig:
    try:
        base = parse_log_base(args.log_base)
    except ValueError as exc:
        raise UsageError(f"--log-base: {exc}") from None
    return ComplexityConfig(
        log_base=base,
        run_mode=RunMode(args.run_mode),
        include_nested=not args.exclude_nested,
        weights=_parse_weights(args.weights),
    )


def _precedence(args):
    try:
        return parse_precedence(args.precedence)
    except ValueError as exc:
        raise UsageError(f"--precedence: {exc}") from None


def _easy_words(args):
    try:
        return load_easy_words(args.easy_words)
    except MissingWordList as exc:
        raise UsageError(str(exc)) from None


def _load(args):
    return load_dataset(args.input, _ingest_config(args))


# --- subcommands --------------------------------------------------------------

def cmd_ingest(args) -> int:
    ds = _load(args)
    report = validate(ds, _ingest_config(args))
    for issue in report.errors:
        logger.error("row %s [%s] %s", issue.row, issue.rule, issue.message)
    for issue in report.warnings:
        logger.warning("row %s [%s] %s", issue.row, issue.rule, issue.message)
    text = report.to_json() + "\n"
    if args.report:
        _write(args.report, text)
    else:
        sys.stdout.write(text)
    if args.canonical:
        Path(args.canonical).write_bytes(serialize_dataset(ds))
    return 0 if report.accepted else 1


def _profile_rows(ds, profiles):
    texts = {m.statement_id: m.text for m in ds.statements}
    header = ["statement_id", "tokens"] + [f"raw_{m}" for m in METRICS] + [f"norm_{m}" for m in METRICS] + ["total"]
    rows = []
    for sid, p in profiles.items():
        rows.append([sid, token_count(texts[sid])] + [p.raw[m] for m in METRICS]
                    + [p.normalized[m] for m in METRICS] + [p.total])
    return header, rows


def cmd_complexity(args) -> int:
    ds = _load(args)
    if not ds.statements:
        raise DataError("dataset has no statements")
    profiles = compute_profiles(ds, _complexity_config(args))
    header, rows = _profile_rows(ds, profiles)
    if _is_csv(args.out, args.format):
        _write(args.out, _csv_text(header, rows, args.precise))
    else:
        _write(args.out, _dump_json([dict(zip(header, r)) for r in rows], args.precise))
    return 0


def cmd_readability(args) -> int:
    ds = _load(args)
    if not ds.statements:
        raise DataError("dataset has no statements")
    words = _easy_words(args)
    per = [(m.statement_id, score_text(m.text, words, args.dc_adjusted)) for m in ds.statements]
    metrics = list(per[0][1])
    if _is_csv(args.out, args.format):
        _write(args.out, _csv_text(["statement_id"] + metrics, [[sid] + [s[k] for k in metrics] for sid, s in per],
                                   args.precise))
    else:
        summary = {k: summarize([s[k] for _, s in per]) for k in metrics}
        body = {"summary": summary, "statements": [dict(s, statement_id=sid) for sid, s in per]}
        _write(args.out, _dump_json(body, args.precise))
    return 0


def gold_items(ds, task: str, precedence=DEFAULT_PRECEDENCE, include_nested: bool = True) -> List[dict]:
    if task == "corri":
        return corr_items(corr_gold(ds))
    golds = chain_gold(ds, precedence, include_nested=include_nested)
    return membership_items(golds) if task == "ccr-membership" else position_items(golds)


def cmd_tasks(args) -> int:
    ds = _load(args)
    items = gold_items(ds, args.task, _precedence(args), not args.exclude_nested)
    buf = io.StringIO()
    n = write_jsonl(items, buf)
    _write(args.out, buf.getvalue())
    logger.info("%d gold items for %s", n, args.task)
    return 0


def cmd_prompts(args) -> int:
    try:
        task = parse_task(args.task)
        variant = parse_variant(task, args.variant)
    except UnknownVariant as exc:
        raise UsageError(str(exc)) from None
    ds = _load(args)
    items = build_prompt_items(ds, task, variant, include_nested=not args.exclude_nested)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {"task": task, "variant": variant, "gold_task": gold_task(task), "items": {}}
    for i, item in enumerate(items):
        name = f"{i:05d}.txt"
        (outdir / name).write_text(item.text, encoding="utf-8")
        manifest["items"][item.item_id] = {"file": name, "statement_id": item.statement_id, "bindings": item.bindings}
    (outdir / "manifest.json").write_text(_dump_json(manifest, True), encoding="utf-8")
    logger.info("wrote %d prompts to %s", len(items), outdir)
    return 0


def cmd_score(args) -> int:
    try:
        gold = read_gold(args.gold)
        preds = read_predictions(args.pred, args.task, extract=args.extract_answer)
        report = score_classification(preds, gold, task=args.task)
    except (DuplicateItem, ValueError, KeyError) as exc:
        raise DataError(str(exc)) from None
    _write(args.out, _dump_json(report.to_dict(), args.precise))
    return 0


def _read_json(path) -> dict:
    try:
        with (sys.stdin if path == "-" else open(path, encoding="utf-8")) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_stats(args) -> int:
    data = _read_json(args.input)
    alpha = args.alpha
    try:
        if args.test == "chi2":
            out = st.chi2_independence(data["table"], alpha=alpha).to_dict()
        elif args.test == "mcnemar":
            if "b01" in data:
                res = st.mcnemar_counts(int(data["b01"]), int(data["b10"]), exact=args.exact, alpha=alpha)
            else:
                res = st.mcnemar(data["a"], data["b"], data.get("gold"), exact=args.exact, alpha=alpha)
            out = res.to_dict()
        elif args.test == "kw":
            out = st.kruskal_wallis(data["groups"], method=data.get("method", "auto"), alpha=alpha).to_dict()
        elif args.test == "dunn":
            res = st.dunn_posthoc(data["groups"], data.get("names"), data.get("correction", "holm"), alpha=alpha)
            out = {"pairs": [r.to_dict() for r in res]}
        else:
            out = st.pearson(data["x"], data["y"], alpha=alpha).to_dict()
    except KeyError as exc:
        raise DataError(f"{args.test} input lacks field {exc}") from None
    except (st.ItemMismatch, st.DegenerateMargin, st.EmptyGroup, st.ZeroVariance, ValueError) as exc:
        raise DataError(str(exc)) from None
    _write(args.out, _dump_json(out, args.precise))
    return 0


def cmd_report(args) -> int:
    ds = _load(args)
    config = _complexity_config(args)
    profiles = compute_profiles(ds, config) if ds.statements else {}
    report = corpus_report(ds, config, profiles, _precedence(args), _easy_words(args), args.dc_adjusted,
                           _ingest_config(args))
    _write(args.out, _dump_json(report.to_dict(precise=True), args.precise))
    if args.per_statement:
        header, rows = _profile_rows(ds, profiles)
        _write(args.per_statement, _csv_text(header, rows, args.precise))
    if args.figures:
        from .plotting import render_report_figures

        render_report_figures(report, profiles, args.figures)
    return 0


# --- parser -------------------------------------------------------------------

def _add_input(p, required=True):
    p.add_argument("--input", required=required, help="annotation table (CSV)")
    p.add_argument("--delimiter", default=",", help="field delimiter (default: ,)")
    p.add_argument("--unique-scope", choices=("global", "statement"), default="global",
                   help="scope for counting unique relations (default: global)")


def _add_structure(p):
    p.add_argument("--exclude-nested", action="store_true", help="leave nested relations out of the causal graph")


def _add_complexity(p):
    p.add_argument("--log-base", default="e", help="log base for nesting complexity: e, 2, 10 or a number > 1 (default: e)")
    p.add_argument("--run-mode", choices=[m.value for m in RunMode], default=RunMode.MAXIMAL.value,
                   help="how negative runs are counted (default: maximal)")
    p.add_argument("--weights", default=None, help="metric weights, e.g. com=1,ex=0.5 (default: all 1)")
    _add_structure(p)


def _add_precedence(p):
    p.add_argument("--precedence", default=">".join(DEFAULT_PRECEDENCE),
                   help="role precedence for chain positions (default: middle>start>end)")


def _add_words(p):
    p.add_argument("--easy-words", default=None,
                   help=f"Dale-Chall easy-word list (default: ${EASY_WORDS_ENV}, then the bundled list)")
    p.add_argument("--dc-adjusted", action="store_true", help="apply the Dale-Chall +3.6365 adjustment")


def _add_out(p, fmt=False, required=False):
    p.add_argument("--out", required=required, default=None, help="output path (default: stdout)")
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default=None,
                       help="output format (default: from --out extension, else json)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key=value file with defaults for any flag")
    common.add_argument("--precise", action="store_true", help="full float precision instead of 4 decimals")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    parser = argparse.ArgumentParser(prog="causegraph", description=__doc__.splitlines()[0],
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("ingest", parents=[common], help="parse and validate an annotation table")
    _add_input(p)
    p.add_argument("--report", default=None, help="write the validation report JSON here (default: stdout)")
    p.add_argument("--canonical", default=None, help="also write the canonical CSV serialization here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("complexity", parents=[common], help="per-statement complexity scores")
    _add_input(p)
    _add_complexity(p)
    _add_out(p, fmt=True)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("readability", parents=[common], help="readability formulas per statement")
    _add_input(p)
    _add_words(p)
    _add_out(p, fmt=True)
    p.set_defaults(func=cmd_readability)

    p = sub.add_parser("tasks", parents=[common], help="benchmark gold labels")
    p.add_argument("action", choices=("gold",), help="what to produce")
    _add_input(p)
    p.add_argument("--task", required=True, choices=GOLD_TASKS)
    _add_precedence(p)
    _add_structure(p)
    _add_out(p)
    p.set_defaults(func=cmd_tasks)

    p = sub.add_parser("prompts", parents=[common], help="render benchmark prompts, one file per item")
    _add_input(p)
    p.add_argument("--task", required=True, help="CorrI, CorrI_RC, CCR_member, CCR_position, CCR_ECI_member or CCR_ECI_position")
    p.add_argument("--variant", required=True, help="variant id such as 0_1, F_3, A_4 (dash or underscore)")
    _add_structure(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_prompts)

    p = sub.add_parser("score", parents=[common], help="score a prediction file against gold")
    p.add_argument("--task", required=True, choices=GOLD_TASKS)
    p.add_argument("--gold", required=True, help="gold JSONL from 'tasks gold'")
    p.add_argument("--pred", required=True, help="predictions JSONL with item_id and label")
    p.add_argument("--extract-answer", action="store_true", help="read labels from <Answer>...</Answer> spans")
    _add_out(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", parents=[common], help="run one significance test on JSON input")
    p.add_argument("--test", required=True, choices=("chi2", "mcnemar", "kw", "dunn", "pearson"))
    p.add_argument("--input", required=True, help="JSON input ('-' for stdin); shapes in the README")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--exact", action="store_true", help="exact binomial McNemar")
    _add_out(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", parents=[common], help="corpus report, optional figures and per-statement CSV")
    _add_input(p)
    _add_complexity(p)
    _add_precedence(p)
    _add_words(p)
    _add_out(p)
    p.add_argument("--per-statement", default=None, help="write per-statement complexity CSV here")
    p.add_argument("--figures", default=None, help="directory for PNG figures")
    p.set_defaults(func=cmd_report)
    return parser


def read_config_file(path) -> Dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, quotes are optional."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"--config: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"--config {path}:{n}: expected key = value")
        val = val.strip()
        if len(val) >= 2 and val[0] == val[-1] and val[0] in "\"'":
            val = val[1:-1]
        out[key.strip().replace("-", "_")] = val
    return out


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config_file(known.config)
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in sub_action.choices.items():
        defaults = {}
        dests = {a.dest: a for a in sp._actions}
        for key, val in values.items():
            action = dests.get(key)
            if action is None:
                continue
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                low = val.lower()
                if low not in _TRUE | _FALSE:
                    raise UsageError(f"--config: {key} expects true/false, got {val!r}")
                defaults[key] = low in _TRUE
            else:
                defaults[key] = val
        sp.set_defaults(**defaults)
        for action in sp._actions:
            if action.dest in defaults and action.required:
                action.required = False


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING - 10 * min(verbosity, 2)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"causegraph: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"causegraph: error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, DataError) as exc:
        print(f"causegraph: invalid data: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"causegraph: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
