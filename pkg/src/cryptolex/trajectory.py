"""Per-user weekly usage series and break-and-rejoin gap detection.

The usage rate of a week bucket is matched lexicon tokens divided by total
tokens in that week. Buckets are sparse: a week without posts simply does
not appear. A gap is a long-enough run of absent weeks between two active
ones, and escalation compares token-weighted mean rates after versus
before the gap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from io import StringIO
from typing import Iterable

import csv

from .corpus import Post, iso_week, week_index
from .lexicon import Lexicon
from .morpho import annotate_text


@dataclass(frozen=True)
class WeekBucket:
    iso_week: str
    posts: int
    tokens: int
    matched: int
    rate: float


@dataclass(frozen=True)
class UsageSeries:
    user: str
    buckets: tuple[WeekBucket, ...]


@dataclass(frozen=True)
class Gap:
    last_active_week: str
    next_active_week: str
    gap_weeks: int
    pre_rate: float
    post_rate: float
    escalation: float | None  # None when pre_rate is 0 (undefined)


@dataclass(frozen=True)
class GapReport:
    user: str
    gaps: tuple[Gap, ...]


def series_from_counts(user: str, week_counts: dict[str, tuple[int, int, int]]) -> UsageSeries:
    """Build a series from {iso_week: (posts, tokens, matched)} aggregates."""
    buckets = []
    for week in sorted(week_counts):
        n_posts, n_tokens, n_matched = week_counts[week]
        rate = n_matched / n_tokens if n_tokens > 0 else 0.0
        buckets.append(WeekBucket(week, n_posts, n_tokens, n_matched, rate))
    return UsageSeries(user=user, buckets=tuple(buckets))


def usage_series(posts: Iterable[Post], lexicon: Lexicon, user: str | None = None) -> UsageSeries:
    """Weekly usage buckets for a single user's posts.

    All posts must carry the same user id; pass user= to pin the expected
    id (required for an empty stream, where it cannot be inferred).
    """
    week_counts: dict[str, list[int]] = {}
    cache: dict = {}
    series_user = user
    for post in posts:
        if series_user is None:
            series_user = post.user
        elif post.user != series_user:
            raise ValueError(
                f"mixed user ids: expected {series_user!r}, got {post.user!r} (post {post.id})"
            )
        ann = annotate_text(post.id, post.text, lexicon, cache)
        cell = week_counts.setdefault(iso_week(post.created_utc), [0, 0, 0])
        cell[0] += 1
        cell[1] += ann.token_count
        cell[2] += ann.matched_count
    return series_from_counts(series_user or "", {w: tuple(c) for w, c in week_counts.items()})


def _weighted_rate(buckets: Iterable[WeekBucket]) -> float:
    tokens = 0
    matched = 0
    for b in buckets:
        tokens += b.tokens
        matched += b.matched
    return matched / tokens if tokens > 0 else 0.0


def detect_gaps(series: UsageSeries, min_gap_weeks: int = 4) -> GapReport:
    """Find runs of at least min_gap_weeks absent weeks between active weeks.

    pre_rate and post_rate are token-weighted means over every active week
    strictly before and after the gap, not just the adjacent ones.
    """
    if min_gap_weeks < 1:
        raise ValueError("min_gap_weeks must be >= 1")
    buckets = series.buckets
    gaps = []
    for i in range(len(buckets) - 1):
        absent = week_index(buckets[i + 1].iso_week) - week_index(buckets[i].iso_week) - 1
        if absent >= min_gap_weeks:
            pre = _weighted_rate(buckets[: i + 1])
            post = _weighted_rate(buckets[i + 1 :])
            gaps.append(
                Gap(
                    last_active_week=buckets[i].iso_week,
                    next_active_week=buckets[i + 1].iso_week,
                    gap_weeks=absent,
                    pre_rate=pre,
                    post_rate=post,
                    escalation=(post / pre) if pre > 0 else None,
                )
            )
    return GapReport(user=series.user, gaps=tuple(gaps))


SERIES_COLUMNS = ("user", "iso_week", "posts", "tokens", "matched", "rate")
GAP_COLUMNS = (
    "user",
    "last_active_week",
    "next_active_week",
    "gap_weeks",
    "pre_rate",
    "post_rate",
    "escalation",
)


def _series_rows(series: UsageSeries) -> list[list]:
    return [
        [series.user, b.iso_week, b.posts, b.tokens, b.matched, f"{b.rate:.6f}"]
        for b in series.buckets
    ]


def _gap_rows(report: GapReport) -> list[list]:
    return [
        [
            report.user,
            g.last_active_week,
            g.next_active_week,
            g.gap_weeks,
            f"{g.pre_rate:.6f}",
            f"{g.post_rate:.6f}",
            "" if g.escalation is None else f"{g.escalation:.6f}",
        ]
        for g in report.gaps
    ]


def export_series(data, format: str = "csv") -> str:
    """Render series or gap reports as csv (header + rows) or jsonl.

    data may be one UsageSeries, one GapReport, or a homogeneous list of
    either; lists share a single header. Row order follows input order,
    so callers control grouping.
    """
    if format not in ("csv", "jsonl"):
        raise ValueError(f"format must be 'csv' or 'jsonl', got {format!r}")
    items = data if isinstance(data, list) else [data]
    if not items:
        raise ValueError("nothing to export")
    if all(isinstance(it, UsageSeries) for it in items):
        columns, row_fn = SERIES_COLUMNS, _series_rows
    elif all(isinstance(it, GapReport) for it in items):
        columns, row_fn = GAP_COLUMNS, _gap_rows
    else:
        raise ValueError("cannot mix series and gap reports in one export")

    if format == "csv":
        buffer = StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for item in items:
            writer.writerows(row_fn(item))
        return buffer.getvalue()

    lines = []
    for item in items:
        for row in row_fn(item):
            record = {}
            for name, value in zip(columns, row):
                if name in ("rate", "pre_rate", "post_rate", "escalation"):
                    value = None if value == "" else float(value)
                record[name] = value
            lines.append(json.dumps(record, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)
