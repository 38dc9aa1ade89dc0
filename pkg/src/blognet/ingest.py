"""Load, validate, and canonicalize raw dump files (line-delimited JSON).

Each loader is quarantine-not-crash: per-record problems are collected into
a quarantine list with the offending line number, structural corruption
(duplicate primary ids) is a hard error. Accepted + quarantined always adds
up to the number of input lines.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Iterator

GENDERS = ("male", "female", "unspecified")
EDUCATION_LEVELS = ("below-diploma", "diploma", "bachelor", "master", "doctorate", "unspecified")
MARITAL_STATUSES = ("single", "married", "unspecified")

AGE_MIN = 5
AGE_MAX = 120


class DuplicateIdError(ValueError):
    """A primary id occurs twice in one dump file (structural corruption)."""


@dataclass(frozen=True)
class RawPost:
    post_id: str
    blog_id: str
    title: str
    body: str
    published_at: datetime  # timezone-aware, UTC


@dataclass(frozen=True)
class RawComment:
    comment_id: str
    post_id: str
    commenter_blog_id: str | None  # None = anonymous commenter
    body: str
    created_at: datetime


@dataclass(frozen=True)
class BlogrollRecord:
    owner_blog_id: str
    target_url: str


@dataclass(frozen=True)
class ProfileRecord:
    blog_id: str
    age: int | None
    gender: str
    education: str
    marital_status: str


@dataclass(frozen=True)
class QuarantinedLine:
    file: str
    line: int
    reason: str


@dataclass
class LoadResult:
    """Accepted records plus the quarantine report for one file."""

    records: list
    quarantined: list[QuarantinedLine]


# RFC 3339 timestamp, seconds precision required, fraction tolerated and
# truncated. A missing offset is interpreted with ``assume_offset``.
_TS_RE = re.compile(
    r"^(\d{4}-\d{2}-\d{2})[Tt ](\d{2}:\d{2}:\d{2})(?:\.\d+)?([Zz]|[+-]\d{2}:\d{2})?$"
)


def parse_timestamp(value: str, assume_offset: timedelta = timedelta(0)) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime.

    Timestamps without an explicit offset are taken as local wall-clock at
    ``assume_offset`` (the dump's fixed UTC offset). Sub-second digits are
    dropped; the data model is seconds precision.
    """
    if not isinstance(value, str):
        raise ValueError("timestamp must be a string")
    m = _TS_RE.match(value.strip())
    if not m:
        raise ValueError(f"unparseable timestamp: {value!r}")
    date_part, time_part, offset = m.group(1), m.group(2), m.group(3)
    naive = datetime.fromisoformat(f"{date_part}T{time_part}")  # validates ranges
    if offset is None:
        tz = timezone(assume_offset)
    elif offset in ("Z", "z"):
        tz = timezone.utc
    else:
        sign = 1 if offset[0] == "+" else -1
        hours, minutes = int(offset[1:3]), int(offset[4:6])
        tz = timezone(sign * timedelta(hours=hours, minutes=minutes))
    return naive.replace(tzinfo=tz).astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Serialize back to the dump schema: UTC, seconds precision, Z suffix."""
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def canonical_slug(value: str) -> str:
    """Blog ids are case-insensitive slugs; fold to stripped lowercase."""
    return value.strip().lower()


def _jsonl_lines(path: Path) -> Iterator[tuple[int, str]]:
    with open(path, "r", encoding="utf-8-sig") as fh:
        for line_no, raw in enumerate(fh, start=1):
            yield line_no, raw.rstrip("\n").rstrip("\r")


def _string_field(obj: dict, key: str, *, allow_empty: bool = False) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise ValueError(f"field {key!r} missing or not a string")
    if not allow_empty and not value.strip():
        raise ValueError(f"field {key!r} is empty")
    return value


def _enum_field(obj: dict, key: str, allowed: tuple[str, ...]) -> str:
    value = obj.get(key)
    if value is None:
        return "unspecified"
    if not isinstance(value, str) or value not in allowed:
        raise ValueError(f"field {key!r} must be one of {allowed}")
    return value


def _load_jsonl(
    path: str | Path,
    parse_record,
    *,
    id_of=None,
) -> LoadResult:
    """Shared loader loop: JSON-decode each line, validate via parse_record.

    parse_record raises ValueError to quarantine a line. id_of extracts the
    primary id from an accepted record for duplicate detection (hard error).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    records: list = []
    quarantined: list[QuarantinedLine] = []
    seen_ids: set[str] = set()
    for line_no, raw in _jsonl_lines(path):
        if not raw.strip():
            quarantined.append(QuarantinedLine(path.name, line_no, "empty line"))
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as err:
            quarantined.append(QuarantinedLine(path.name, line_no, f"invalid JSON: {err.msg}"))
            continue
        if not isinstance(obj, dict):
            quarantined.append(QuarantinedLine(path.name, line_no, "line is not a JSON object"))
            continue
        try:
            record = parse_record(obj)
        except ValueError as err:
            quarantined.append(QuarantinedLine(path.name, line_no, str(err)))
            continue
        if id_of is not None:
            rid = id_of(record)
            if rid in seen_ids:
                raise DuplicateIdError(f"{path.name}:{line_no}: duplicate id {rid!r}")
            seen_ids.add(rid)
        records.append(record)
    return LoadResult(records, quarantined)


def load_posts(path: str | Path, utc_offset: timedelta = timedelta(0)) -> LoadResult:
    """Load posts.jsonl; see RawPost for the record schema."""

    def parse(obj: dict) -> RawPost:
        return RawPost(
            post_id=_string_field(obj, "post_id").strip(),
            blog_id=canonical_slug(_string_field(obj, "blog_id")),
            title=_string_field(obj, "title", allow_empty=True),
            body=_string_field(obj, "body", allow_empty=True),
            published_at=parse_timestamp(obj.get("published_at"), utc_offset),
        )

    return _load_jsonl(path, parse, id_of=lambda p: p.post_id)


def load_comments(
    path: str | Path,
    known_post_ids: set[str],
    utc_offset: timedelta = timedelta(0),
) -> LoadResult:
    """Load comments.jsonl; comments pointing at unknown posts are quarantined."""

    def parse(obj: dict) -> RawComment:
        post_id = _string_field(obj, "post_id").strip()
        if post_id not in known_post_ids:
            raise ValueError(f"unknown post_id {post_id!r}")
        commenter = obj.get("commenter_blog_id")
        if commenter is not None:
            if not isinstance(commenter, str):
                raise ValueError("field 'commenter_blog_id' must be a string or null")
            commenter = canonical_slug(commenter) or None
        return RawComment(
            comment_id=_string_field(obj, "comment_id").strip(),
            post_id=post_id,
            commenter_blog_id=commenter,
            body=_string_field(obj, "body", allow_empty=True),
            created_at=parse_timestamp(obj.get("created_at"), utc_offset),
        )

    return _load_jsonl(path, parse, id_of=lambda c: c.comment_id)


def load_blogroll(path: str | Path) -> LoadResult:
    """Load blogroll.jsonl; target URLs must be syntactically valid http(s)."""
    from urllib.parse import urlsplit

    def parse(obj: dict) -> BlogrollRecord:
        url = _string_field(obj, "target_url").strip()
        try:
            parts = urlsplit(url)
            host = parts.hostname
        except ValueError:
            raise ValueError(f"invalid URL {url!r}") from None
        if parts.scheme not in ("http", "https") or not host:
            raise ValueError(f"invalid URL {url!r}")
        return BlogrollRecord(
            owner_blog_id=canonical_slug(_string_field(obj, "owner_blog_id")),
            target_url=url,
        )

    return _load_jsonl(path, parse)


def load_profiles(path: str | Path) -> LoadResult:
    """Load profiles.jsonl; one profile per blog, age restricted to [5, 120]."""

    def parse(obj: dict) -> ProfileRecord:
        age = obj.get("age")
        if age is not None:
            if isinstance(age, bool) or not isinstance(age, int):
                raise ValueError("field 'age' must be an integer or null")
            if not AGE_MIN <= age <= AGE_MAX:
                raise ValueError(f"age {age} outside [{AGE_MIN}, {AGE_MAX}]")
        return ProfileRecord(
            blog_id=canonical_slug(_string_field(obj, "blog_id")),
            age=age,
            gender=_enum_field(obj, "gender", GENDERS),
            education=_enum_field(obj, "education", EDUCATION_LEVELS),
            marital_status=_enum_field(obj, "marital_status", MARITAL_STATUSES),
        )

    return _load_jsonl(path, parse, id_of=lambda p: p.blog_id)


# --- serialization back to the dump schema (round-trip safe) ---------------

def post_to_dict(p: RawPost) -> dict[str, Any]:
    return {
        "post_id": p.post_id,
        "blog_id": p.blog_id,
        "title": p.title,
        "body": p.body,
        "published_at": format_timestamp(p.published_at),
    }


def comment_to_dict(c: RawComment) -> dict[str, Any]:
    return {
        "comment_id": c.comment_id,
        "post_id": c.post_id,
        "commenter_blog_id": c.commenter_blog_id,
        "body": c.body,
        "created_at": format_timestamp(c.created_at),
    }


def blogroll_to_dict(r: BlogrollRecord) -> dict[str, Any]:
    return {"owner_blog_id": r.owner_blog_id, "target_url": r.target_url}


def profile_to_dict(p: ProfileRecord) -> dict[str, Any]:
    return {
        "blog_id": p.blog_id,
        "age": p.age,
        "gender": p.gender,
        "education": p.education,
        "marital_status": p.marital_status,
    }


def write_jsonl(path: str | Path, rows: Iterator[dict] | list[dict]) -> int:
    """Write dicts as one JSON object per line; returns the line count."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def quarantine_to_dict(q: QuarantinedLine) -> dict[str, Any]:
    return {"file": q.file, "line": q.line, "reason": q.reason}
