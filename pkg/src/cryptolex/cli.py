"""Command-line interface: lexicon management, annotation, discovery,
and trajectory export. Human-readable messages go to stderr; data goes
to stdout or --output."""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    PostFormatError,
    ReadReport,
    scan_affix_table,
    scan_annotations,
    scan_frequency_table,
    scan_usage,
)
from .discovery import (
    DiscoveryError,
    filter_stoplist,
    load_stoplist,
    log_ratio_rank,
    review_sheet,
    rows_to_jsonl,
    rows_to_tsv,
)
from .lexicon import (
    Lexicon,
    LexiconFormatError,
    category_stats,
    export_tsv,
    load_blocklist,
    load_lexicon,
    seed_blocklist,
    seed_lexicon_text,
    validate,
)
from .morpho import Annotation, annotate_text
from .trajectory import detect_gaps, export_series, series_from_counts

BANNER = (
    "content warning: the lexicon and any annotated output contain "
    "dehumanizing, racist, and misogynistic language."
)


def _warn_banner() -> None:
    if os.environ.get("CRYPTOLEX_NO_WARN") != "1":
        print(BANNER, file=sys.stderr)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _add_lexicon_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lexicon", metavar="PATH", help="lexicon JSON Lines (default: bundled seed)")
    parser.add_argument("--blocklist", metavar="PATH", help="blocklist file (default: bundled list)")


def _add_scan_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strict", action="store_true", help="abort on the first malformed line")
    parser.add_argument(
        "--workers",
        type=_positive_int,
        default=os.cpu_count() or 1,
        help="worker processes for corpus scans (result is identical for any value)",
    )


def _load_cli_lexicon(args) -> Lexicon:
    blocklist = load_blocklist(Path(args.blocklist)) if args.blocklist else seed_blocklist()
    if args.lexicon:
        return load_lexicon(Path(args.lexicon), blocklist)
    return load_lexicon(seed_lexicon_text(), blocklist)


def _open_output(output: str | None):
    if output:
        return open(output, "w", encoding="utf-8")
    return contextlib.nullcontext(sys.stdout)


def _report_skips(report: ReadReport) -> None:
    if report.skipped:
        detail = f" (first: {report.first_error})" if report.first_error else ""
        print(f"skipped {report.skipped} malformed lines{detail}", file=sys.stderr)


def _span_payload(ann: Annotation) -> str:
    spans = []
    for span in ann.spans:
        spans.append(
            {
                "start": span.start,
                "end": span.end,
                "term": span.term,
                "categories": sorted(span.categories),
                "segments": [
                    {
                        "slice": seg.slice,
                        "role": seg.role,
                        "entry": seg.entry.surface if seg.entry else None,
                    }
                    for seg in span.parse.segments
                ],
            }
        )
    return json.dumps(
        {
            "id": ann.post_id,
            "spans": spans,
            "token_count": ann.token_count,
            "matched_count": ann.matched_count,
        },
        ensure_ascii=False,
    )


def run_lexicon(args) -> int:
    lexicon = _load_cli_lexicon(args)
    if args.action == "validate":
        issues = validate(lexicon)
        for issue in issues:
            where = f" [{issue.surface}]" if issue.surface else ""
            print(f"{issue.severity}:{where} {issue.message}", file=sys.stderr)
        errors = sum(1 for i in issues if i.severity == "error")
        warnings = len(issues) - errors
        print(
            f"{len(lexicon)} entries, {errors} errors, {warnings} warnings",
            file=sys.stderr,
        )
        return 1 if errors else 0
    if args.action == "stats":
        stats = category_stats(lexicon)
        print(f"entries {stats.total}", file=sys.stderr)
        line = " ".join(
            f"{cat} {stats.counts[cat]} ({stats.percentages[cat]:.1f}%)"
            for cat in stats.counts
        )
        with _open_output(args.output) as out:
            out.write(line + "\n")
        return 0
    with _open_output(args.output) as out:
        out.write(export_tsv(lexicon))
    return 0


def run_annotate(args) -> int:
    _warn_banner()
    lexicon = _load_cli_lexicon(args)
    posts = tokens = matched = 0
    if args.plain:
        text = Path(args.input).read_text(encoding="utf-8")
        ann = annotate_text("plain", text, lexicon)
        with _open_output(args.output) as out:
            out.write(_span_payload(ann) + "\n")
        posts, tokens, matched = 1, ann.token_count, ann.matched_count
        terms = list(dict.fromkeys(span.term for span in ann.spans))
        if terms:
            print("matched terms: " + ", ".join(terms), file=sys.stderr)
    else:
        report = ReadReport()
        strictness = "strict" if args.strict else "skip"
        with _open_output(args.output) as out:
            for ann in scan_annotations(
                Path(args.input),
                lexicon,
                workers=args.workers,
                strictness=strictness,
                report=report,
            ):
                out.write(_span_payload(ann) + "\n")
                posts += 1
                tokens += ann.token_count
                matched += ann.matched_count
        _report_skips(report)
    rate = matched / tokens if tokens else 0.0
    print(f"posts {posts} tokens {tokens} matched {matched} rate {rate:.6f}", file=sys.stderr)
    return 0


def run_discover(args) -> int:
    strictness = "strict" if args.strict else "skip"
    report = ReadReport()
    if args.affixes:
        lexicon = _load_cli_lexicon(args)
        target = scan_affix_table(
            Path(args.input), lexicon, workers=args.workers, strictness=strictness, report=report
        )
        background = scan_affix_table(
            Path(args.background), lexicon, workers=args.workers, strictness=strictness, report=report
        )
    else:
        target = scan_frequency_table(
            Path(args.input), workers=args.workers, strictness=strictness, report=report
        )
        background = scan_frequency_table(
            Path(args.background), workers=args.workers, strictness=strictness, report=report
        )
    rows = log_ratio_rank(
        target, background, alpha=args.alpha, top_k=args.top_k, min_count=args.min_count
    )
    if args.stoplist:
        rows = filter_stoplist(rows, load_stoplist(Path(args.stoplist)))
    _report_skips(report)
    print(
        f"candidates {len(rows)} (target {target.total_tokens} tokens, "
        f"background {background.total_tokens} tokens)",
        file=sys.stderr,
    )
    if args.sheet:
        text = review_sheet(rows)
    elif args.format == "jsonl":
        text = rows_to_jsonl(rows)
    else:
        text = rows_to_tsv(rows)
    with _open_output(args.output) as out:
        out.write(text)
    return 0


def run_trajectory(args) -> int:
    _warn_banner()
    lexicon = _load_cli_lexicon(args)
    strictness = "strict" if args.strict else "skip"
    report = ReadReport()
    usage = scan_usage(
        Path(args.input), lexicon, workers=args.workers, strictness=strictness, report=report
    )
    _report_skips(report)
    if not usage:
        raise ValueError("empty corpus: no posts parsed")
    per_user: dict[str, dict[str, tuple[int, int, int]]] = {}
    for (user, week), cell in usage.items():
        per_user.setdefault(user, {})[week] = cell
    if args.user is not None:
        if args.user not in per_user:
            raise ValueError(f"user not found: {args.user!r}")
        users = [args.user]
    else:
        users = sorted(per_user)
    series_list = [series_from_counts(u, per_user[u]) for u in users]
    if args.gaps:
        data = [detect_gaps(s, args.min_gap_weeks) for s in series_list]
        n_gaps = sum(len(r.gaps) for r in data)
        print(f"users {len(users)} gaps {n_gaps}", file=sys.stderr)
    else:
        data = series_list
        n_buckets = sum(len(s.buckets) for s in series_list)
        print(f"users {len(users)} buckets {n_buckets}", file=sys.stderr)
    with _open_output(args.output) as out:
        out.write(export_series(data, format=args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cryptolex",
        description="Lexicon-driven cryptolect analysis for forum archives.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    lex = sub.add_parser("lexicon", help="validate, summarize, or export a lexicon")
    lex.add_argument("action", choices=("validate", "stats", "export"))
    _add_lexicon_flags(lex)
    lex.add_argument("--output", metavar="PATH")
    lex.set_defaults(handler=run_lexicon)

    ann = sub.add_parser("annotate", help="annotate posts (or raw text) with lexicon spans")
    ann.add_argument("--input", required=True, metavar="PATH", help="posts JSON Lines, or raw text with --plain")
    ann.add_argument("--plain", action="store_true", help="treat input as one raw text document")
    _add_lexicon_flags(ann)
    _add_scan_flags(ann)
    ann.add_argument("--output", metavar="PATH")
    ann.set_defaults(handler=run_annotate)

    dis = sub.add_parser("discover", help="rank target-corpus tokens against a background corpus")
    dis.add_argument("--input", required=True, metavar="PATH", help="target corpus JSON Lines")
    dis.add_argument("--background", required=True, metavar="PATH", help="background corpus JSON Lines")
    dis.add_argument("--affixes", action="store_true", help="rank productive affixes instead of words")
    dis.add_argument("--stoplist", metavar="PATH", help="plain-text stoplist, one token per line")
    dis.add_argument("--alpha", type=_positive_float, default=0.5, help="smoothing constant (default 0.5)")
    dis.add_argument("--top-k", type=_positive_int, default=1000, help="candidate window (default 1000)")
    dis.add_argument("--min-count", type=_positive_int, default=5, help="minimum target count (default 5)")
    dis.add_argument("--sheet", action="store_true", help="emit a review sheet for manual coding")
    dis.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    _add_lexicon_flags(dis)
    _add_scan_flags(dis)
    dis.add_argument("--output", metavar="PATH")
    dis.set_defaults(handler=run_discover)

    tra = sub.add_parser("trajectory", help="weekly usage series and gap reports per user")
    tra.add_argument("--input", required=True, metavar="PATH", help="posts JSON Lines")
    who = tra.add_mutually_exclusive_group(required=True)
    who.add_argument("--user", metavar="USER", help="one user id")
    who.add_argument("--all", action="store_true", help="every user in the corpus")
    tra.add_argument("--gaps", action="store_true", help="emit gap report instead of series")
    tra.add_argument("--min-gap-weeks", type=_positive_int, default=4, help="gap threshold (default 4)")
    tra.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    _add_lexicon_flags(tra)
    _add_scan_flags(tra)
    tra.add_argument("--output", metavar="PATH")
    tra.set_defaults(handler=run_trajectory)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage or version; fold into exit contract
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except BrokenPipeError:
        return 1
    except (LexiconFormatError, PostFormatError, DiscoveryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
