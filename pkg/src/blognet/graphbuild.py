"""Link-graph construction: extract blogroll, comment, and citation edge
layers, resolve platform URLs to blog ids, drop external targets and
self-loops, and merge the layers into one directed multigraph.

The trackback layer exists in the model for completeness but is never
populated: the studied platform does not support trackbacks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence
from urllib.parse import urlsplit

from .ingest import BlogrollRecord, RawComment, RawPost, canonical_slug


class Layer(str, Enum):
    BLOGROLL = "blogroll"
    COMMENT = "comment"
    CITATION = "citation"
    TRACKBACK = "trackback"


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    layer: Layer
    weight: int = 1                      # multiplicity within the layer
    sources: tuple[str, ...] = ()        # record ids this edge folds together

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("edge weight must be >= 1")


def canonical_blog_id(raw: str) -> str:
    """Canonical node id: lowercase slug, no scheme, no slashes."""
    slug = canonical_slug(raw)
    if not slug:
        raise ValueError("blog id is empty")
    if any(ch in slug for ch in "/:\\") or any(ch.isspace() for ch in slug):
        raise ValueError(f"not a bare blog slug: {raw!r}")
    return slug


class UrlResolver:
    """Maps URLs on the blogging platform to canonical blog ids.

    Two pattern shapes are supported, configurable together:
    ``{blog}.example.com`` (subdomain form; the path is ignored) and
    ``example.com/{blog}`` (path form; the first path segment names the
    blog). Host comparison is case-insensitive and tolerates a leading
    ``www.`` label. Anything else, including malformed URLs, resolves to
    None and is treated as external.
    """

    def __init__(self, patterns: Sequence[str]):
        self._subdomain_suffixes: list[str] = []
        self._path_hosts: list[str] = []
        for pattern in patterns:
            p = pattern.strip().lower()
            if p.startswith("{blog}."):
                self._subdomain_suffixes.append(p[len("{blog}"):])
            elif p.endswith("/{blog}"):
                self._path_hosts.append(p[: -len("/{blog}")])
            else:
                raise ValueError(
                    f"unsupported host pattern {pattern!r}; "
                    "use '{blog}.host' or 'host/{blog}'"
                )
        if not self._subdomain_suffixes and not self._path_hosts:
            raise ValueError("at least one host pattern is required")

    def resolve(self, url: str) -> str | None:
        try:
            parts = urlsplit(url.strip())
            host = parts.hostname
        except ValueError:
            return None
        if not host:
            return None
        if host.startswith("www."):
            host = host[4:]
        for suffix in self._subdomain_suffixes:
            if host.endswith(suffix):
                label = host[: -len(suffix)]
                if label and "." not in label:
                    return label
        for pattern_host in self._path_hosts:
            if host == pattern_host:
                segment = parts.path.lstrip("/").split("/", 1)[0]
                if segment:
                    return segment.lower()
        return None


def resolve_internal_url(url: str, patterns: Sequence[str]) -> str | None:
    """One-shot form of :meth:`UrlResolver.resolve`."""
    return UrlResolver(patterns).resolve(url)


# --- edge extraction ---------------------------------------------------------

def _fold(acc: dict, src: str, dst: str, source_id: str) -> None:
    key = (src, dst)
    if key in acc:
        acc[key].append(source_id)
    else:
        acc[key] = [source_id]


def _folded_edges(acc: dict, layer: Layer) -> list[Edge]:
    return [
        Edge(src, dst, layer, weight=len(ids), sources=tuple(ids))
        for (src, dst), ids in sorted(acc.items())
    ]


def extract_blogroll_edges(
    records: Sequence[BlogrollRecord], resolver: UrlResolver
) -> tuple[list[Edge], dict[str, int]]:
    """One owner->target edge per internal blogroll entry; duplicates fold
    into the weight. External targets are dropped and counted."""
    acc: dict = {}
    counters = {"records": len(records), "external_urls": 0}
    for i, rec in enumerate(records):
        target = resolver.resolve(rec.target_url)
        if target is None:
            counters["external_urls"] += 1
            continue
        _fold(acc, canonical_blog_id(rec.owner_blog_id), target, f"blogroll:{i}")
    return _folded_edges(acc, Layer.BLOGROLL), counters


def extract_comment_edges(
    comments: Sequence[RawComment],
    posts: Sequence[RawPost],
    toward_author: bool = True,
) -> tuple[list[Edge], dict[str, int]]:
    """Edge commenter -> post author (direction flips with toward_author=False),
    weight = number of such comments. Anonymous comments are skipped and
    counted."""
    owner = {p.post_id: canonical_blog_id(p.blog_id) for p in posts}
    acc: dict = {}
    counters = {"comments": len(comments), "anonymous": 0, "unmatched": 0}
    for c in comments:
        if not c.commenter_blog_id:
            counters["anonymous"] += 1
            continue
        author = owner.get(c.post_id)
        if author is None:
            counters["unmatched"] += 1
            continue
        commenter = canonical_blog_id(c.commenter_blog_id)
        src, dst = (commenter, author) if toward_author else (author, commenter)
        _fold(acc, src, dst, c.comment_id)
    return _folded_edges(acc, Layer.COMMENT), counters


_HREF_RE = re.compile(r"""href\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>]+))""", re.IGNORECASE)
_BARE_URL_RE = re.compile(r"""https?://[^\s"'<>()\[\]]+""", re.IGNORECASE)
_SCHEME_RE = re.compile(r"^[a-zA-Z][a-zA-Z0-9+.\-]*:")


def _candidate_links(html: str) -> list[tuple[str, bool]]:
    """(url, is_relative) pairs from href attributes plus bare URLs in text.

    href'd URLs are masked before the bare-URL scan so one markup occurrence
    is not counted twice.
    """
    out: list[tuple[str, bool]] = []
    spans: list[tuple[int, int]] = []
    for m in _HREF_RE.finditer(html):
        spans.append(m.span())
        value = (m.group(1) or m.group(2) or m.group(3) or "").strip()
        if not value or value.startswith("#"):
            continue
        absolute = bool(_SCHEME_RE.match(value)) or value.startswith("//")
        out.append((value, not absolute))
    masked = html
    for start, end in reversed(spans):
        masked = masked[:start] + " " * (end - start) + masked[end:]
    for m in _BARE_URL_RE.finditer(masked):
        out.append((m.group(), False))
    return out


def extract_citation_edges(
    posts: Sequence[RawPost], resolver: UrlResolver
) -> tuple[list[Edge], dict[str, int]]:
    """Scan raw post bodies (before HTML stripping) for hyperlinks into the
    platform; emit author -> target for every target other than the author's
    own blog. Relative URLs resolve to the author's blog and therefore never
    produce an edge."""
    acc: dict = {}
    counters = {"posts": len(posts), "links_found": 0, "external_urls": 0, "self_links": 0}
    for p in posts:
        author = canonical_blog_id(p.blog_id)
        for url, is_relative in _candidate_links(p.body):
            counters["links_found"] += 1
            target = author if is_relative else resolver.resolve(url)
            if target is None:
                counters["external_urls"] += 1
            elif target == author:
                counters["self_links"] += 1
            else:
                _fold(acc, author, target, p.post_id)
    return _folded_edges(acc, Layer.CITATION), counters


# --- cleaning and merging ----------------------------------------------------

def drop_external_links(
    edges: Sequence[Edge], node_universe: set[str]
) -> tuple[list[Edge], int]:
    """Remove edges whose destination is not a dataset blog; returns the
    removal count. Sources are dataset blogs by construction."""
    kept = [e for e in edges if e.dst in node_universe]
    return kept, len(edges) - len(kept)


def drop_self_loops(edges: Sequence[Edge]) -> tuple[list[Edge], int]:
    kept = [e for e in edges if e.src != e.dst]
    return kept, len(edges) - len(kept)


def blog_universe(
    posts: Sequence[RawPost] = (),
    comments: Sequence[RawComment] = (),
    blogroll: Sequence[BlogrollRecord] = (),
    profiles: Sequence = (),
) -> set[str]:
    """Every blog seen as a record owner or commenter in the dataset. Edges
    pointing outside this set are external."""
    universe = {canonical_blog_id(p.blog_id) for p in posts}
    universe.update(
        canonical_blog_id(c.commenter_blog_id)
        for c in comments
        if c.commenter_blog_id
    )
    universe.update(canonical_blog_id(r.owner_blog_id) for r in blogroll)
    universe.update(canonical_blog_id(p.blog_id) for p in profiles)
    return universe


@dataclass(frozen=True)
class LayeredGraph:
    """Directed multigraph over blog ids with per-edge layer tags.

    ``nodes`` covers every edge endpoint plus every blog seen in any input
    record, so blogs that are only linked (or only link out) are still
    nodes. (src, dst, layer) is unique; multiplicity lives in the weight.
    """

    nodes: tuple[str, ...]   # sorted
    edges: tuple[Edge, ...]  # sorted by (layer, src, dst)

    def layer_edges(self, layer: Layer) -> list[Edge]:
        return [e for e in self.edges if e.layer == layer]

    def collapsed_arcs(self) -> list[tuple[str, str]]:
        """Simple-digraph view: parallel edges across layers fold to one arc."""
        return sorted({(e.src, e.dst) for e in self.edges})

    def collapsed_arc_weights(self) -> dict[tuple[str, str], int]:
        """Total multiplicity per collapsed arc, summed across layers."""
        weights: dict[tuple[str, str], int] = {}
        for e in self.edges:
            key = (e.src, e.dst)
            weights[key] = weights.get(key, 0) + e.weight
        return weights


def merge_layers(
    layers: Iterable[Sequence[Edge]], extra_nodes: Iterable[str] = ()
) -> LayeredGraph:
    """Union of the per-layer edge lists; duplicate (src, dst, layer) entries
    fold (weights summed, provenance concatenated)."""
    folded: dict[tuple[str, str, Layer], Edge] = {}
    for layer_edges in layers:
        for e in layer_edges:
            key = (e.src, e.dst, e.layer)
            prev = folded.get(key)
            if prev is None:
                folded[key] = e
            else:
                folded[key] = Edge(
                    e.src, e.dst, e.layer,
                    weight=prev.weight + e.weight,
                    sources=prev.sources + e.sources,
                )
    edges = tuple(
        sorted(folded.values(), key=lambda e: (e.layer.value, e.src, e.dst))
    )
    nodes = {e.src for e in edges} | {e.dst for e in edges}
    nodes.update(canonical_blog_id(n) for n in extra_nodes)
    return LayeredGraph(nodes=tuple(sorted(nodes)), edges=edges)


def to_dot(graph: LayeredGraph) -> str:
    """Collapsed view as DOT for visualization tools."""
    lines = ["digraph blognet {"]
    for node in graph.nodes:
        lines.append(f'  "{node}";')
    for src, dst in graph.collapsed_arcs():
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
