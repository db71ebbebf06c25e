"""Lexicon-driven analysis of coded in-group vocabulary in forum archives.

The package tracks a curated lexicon of roots and productive affixes,
decomposes unseen coinages built from them, counts usage across large
post corpora, surfaces new candidate terms against a background corpus,
and follows per-user usage over time.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .corpus import (
    FrequencyTable,
    Post,
    PostFormatError,
    ReadReport,
    build_affix_table,
    build_frequency_table,
    bucket_posts,
    iso_week,
    merge,
    parse_post_line,
    read_posts,
    scan_affix_table,
    scan_annotations,
    scan_frequency_table,
    scan_usage,
    week_index,
)
from .discovery import (
    DiscoveryError,
    LogRatioRow,
    filter_stoplist,
    import_review_sheet,
    load_stoplist,
    log_ratio_rank,
    review_sheet,
    rows_to_jsonl,
    rows_to_tsv,
)
from .lexicon import (
    CATEGORIES,
    KINDS,
    CategoryStats,
    Issue,
    Lexicon,
    LexiconEntry,
    LexiconFormatError,
    build_lexicon,
    category_stats,
    entries_to_jsonl,
    export_tsv,
    lexicon_from_tsv,
    load_blocklist,
    load_lexicon,
    load_seed_lexicon,
    validate,
)
from .morpho import (
    Annotation,
    Parse,
    Segment,
    Span,
    Token,
    annotate,
    annotate_text,
    decompose,
    normalize_token,
    reconstruct,
    strip_inflection,
    tokenize,
)
from .trajectory import (
    Gap,
    GapReport,
    UsageSeries,
    WeekBucket,
    detect_gaps,
    export_series,
    series_from_counts,
    usage_series,
)

__all__ = [
    "__version__",
    "CATEGORIES",
    "KINDS",
    "Annotation",
    "CategoryStats",
    "DiscoveryError",
    "FrequencyTable",
    "Gap",
    "GapReport",
    "Issue",
    "Lexicon",
    "LexiconEntry",
    "LexiconFormatError",
    "LogRatioRow",
    "Parse",
    "Post",
    "PostFormatError",
    "ReadReport",
    "Segment",
    "Span",
    "Token",
    "UsageSeries",
    "WeekBucket",
    "annotate",
    "annotate_text",
    "build_affix_table",
    "build_frequency_table",
    "build_lexicon",
    "bucket_posts",
    "category_stats",
    "decompose",
    "detect_gaps",
    "entries_to_jsonl",
    "export_series",
    "export_tsv",
    "filter_stoplist",
    "import_review_sheet",
    "iso_week",
    "lexicon_from_tsv",
    "load_blocklist",
    "load_lexicon",
    "load_seed_lexicon",
    "load_stoplist",
    "log_ratio_rank",
    "merge",
    "normalize_token",
    "parse_post_line",
    "read_posts",
    "reconstruct",
    "review_sheet",
    "rows_to_jsonl",
    "rows_to_tsv",
    "scan_affix_table",
    "scan_annotations",
    "scan_frequency_table",
    "scan_usage",
    "series_from_counts",
    "strip_inflection",
    "tokenize",
    "usage_series",
    "validate",
    "week_index",
]
