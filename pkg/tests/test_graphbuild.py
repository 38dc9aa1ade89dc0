from datetime import datetime, timezone

import pytest

from blognet import graphbuild
from blognet.graphbuild import (
    Edge,
    Layer,
    UrlResolver,
    blog_universe,
    drop_external_links,
    drop_self_loops,
    extract_blogroll_edges,
    extract_citation_edges,
    extract_comment_edges,
    merge_layers,
    resolve_internal_url,
)
from blognet.ingest import BlogrollRecord, RawComment, RawPost

UTC = timezone.utc
PATTERNS = ["{blog}.parsiblog.com"]


def post(post_id, blog_id, body="", title=""):
    return RawPost(post_id, blog_id, title, body, datetime(2010, 4, 1, tzinfo=UTC))


def comment(comment_id, post_id, commenter):
    return RawComment(comment_id, post_id, commenter, "x", datetime(2010, 4, 2, tzinfo=UTC))


class TestUrlResolution:
    def test_subdomain_with_post_path(self):
        assert resolve_internal_url(
            "http://alishariaty.parsiblog.com/post/12", PATTERNS
        ) == "alishariaty"

    def test_external_host(self):
        assert resolve_internal_url("http://news.example.org/x", PATTERNS) is None

    def test_case_folded(self):
        assert resolve_internal_url("HTTP://AliShariaty.ParsiBlog.com", PATTERNS) == "alishariaty"

    def test_www_prefix_tolerated(self):
        assert resolve_internal_url("http://www.alishariaty.parsiblog.com", PATTERNS) == "alishariaty"

    def test_platform_root_is_external(self):
        assert resolve_internal_url("http://parsiblog.com/", PATTERNS) is None
        assert resolve_internal_url("http://www.parsiblog.com/", PATTERNS) is None

    def test_nested_subdomain_rejected(self):
        assert resolve_internal_url("http://a.b.parsiblog.com/", PATTERNS) is None

    def test_path_pattern(self):
        patterns = ["example.com/{blog}"]
        assert resolve_internal_url("https://example.com/myblog/post/3", patterns) == "myblog"
        assert resolve_internal_url("https://example.com/", patterns) is None

    def test_both_pattern_kinds_together(self):
        patterns = ["{blog}.parsiblog.com", "parsiblog.com/{blog}"]
        assert resolve_internal_url("http://x.parsiblog.com", patterns) == "x"
        assert resolve_internal_url("http://parsiblog.com/y", patterns) == "y"

    def test_malformed_url_is_external(self):
        assert resolve_internal_url("http://[broken", PATTERNS) is None
        assert resolve_internal_url("", PATTERNS) is None
        assert resolve_internal_url("mailto:x@y.com", PATTERNS) is None

    def test_bad_pattern_rejected(self):
        with pytest.raises(ValueError):
            UrlResolver(["no-placeholder.example.com"])
        with pytest.raises(ValueError):
            UrlResolver([])


class TestBlogrollExtraction:
    def test_internal_target_becomes_edge(self):
        records = [BlogrollRecord("a", "http://b.parsiblog.com/")]
        edges, counters = extract_blogroll_edges(records, UrlResolver(PATTERNS))
        assert edges == [Edge("a", "b", Layer.BLOGROLL, 1, ("blogroll:0",))]
        assert counters["external_urls"] == 0

    def test_external_target_counted_and_dropped(self):
        records = [BlogrollRecord("a", "http://cdn.images.example/x.png")]
        edges, counters = extract_blogroll_edges(records, UrlResolver(PATTERNS))
        assert edges == []
        assert counters["external_urls"] == 1

    def test_duplicates_fold_into_weight(self):
        records = [
            BlogrollRecord("a", "http://b.parsiblog.com/"),
            BlogrollRecord("a", "http://B.parsiblog.com"),
        ]
        edges, _ = extract_blogroll_edges(records, UrlResolver(PATTERNS))
        assert len(edges) == 1
        assert edges[0].weight == 2
        assert edges[0].sources == ("blogroll:0", "blogroll:1")


class TestCommentExtraction:
    def test_commenter_to_author_direction(self):
        posts = [post("p1", "y")]
        edges, _ = extract_comment_edges([comment("c1", "p1", "x")], posts)
        assert edges == [Edge("x", "y", Layer.COMMENT, 1, ("c1",))]

    def test_direction_flag_flips(self):
        posts = [post("p1", "y")]
        edges, _ = extract_comment_edges(
            [comment("c1", "p1", "x")], posts, toward_author=False
        )
        assert edges[0].src == "y" and edges[0].dst == "x"

    def test_anonymous_skipped_and_counted(self):
        posts = [post("p1", "y")]
        edges, counters = extract_comment_edges([comment("c1", "p1", None)], posts)
        assert edges == []
        assert counters["anonymous"] == 1

    def test_multiplicity_folds(self):
        posts = [post("p1", "y"), post("p2", "y")]
        comments = [
            comment("c1", "p1", "x"),
            comment("c2", "p1", "x"),
            comment("c3", "p2", "x"),
        ]
        edges, _ = extract_comment_edges(comments, posts)
        assert len(edges) == 1 and edges[0].weight == 3


class TestCitationExtraction:
    def test_href_to_other_blog(self):
        p = post("p1", "a", body='see <a href="http://b.parsiblog.com/post/7">this</a>')
        edges, counters = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert edges == [Edge("a", "b", Layer.CITATION, 1, ("p1",))]
        assert counters["links_found"] == 1

    def test_bare_url_detected(self):
        p = post("p1", "a", body="متن http://b.parsiblog.com/post/7 ادامه")
        edges, _ = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert len(edges) == 1 and edges[0].dst == "b"

    def test_href_not_double_counted_as_bare_url(self):
        p = post("p1", "a", body='<a href="http://b.parsiblog.com/x">t</a>')
        edges, counters = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert counters["links_found"] == 1
        assert edges[0].weight == 1

    def test_own_post_link_gives_no_edge(self):
        p = post("p1", "a", body='<a href="http://a.parsiblog.com/post/5">me</a>')
        edges, counters = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert edges == []
        assert counters["self_links"] == 1

    def test_relative_url_resolves_to_own_blog(self):
        p = post("p1", "a", body='<a href="/post/99">older</a>')
        edges, counters = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert edges == []
        assert counters["self_links"] == 1

    def test_image_cdn_dropped_as_external(self):
        p = post("p1", "a", body='<img href="https://cdn.host.example/i.png">')
        edges, counters = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert edges == []
        assert counters["external_urls"] == 1

    def test_fragment_href_ignored(self):
        p = post("p1", "a", body='<a href="#section">jump</a>')
        edges, counters = extract_citation_edges([p], UrlResolver(PATTERNS))
        assert counters["links_found"] == 0


class TestCleaningOps:
    def edges(self, pairs, layer=Layer.BLOGROLL):
        return [Edge(s, d, layer, 1, (f"{s}->{d}",)) for s, d in pairs]

    def test_drop_external_mixed(self):
        edges = self.edges([("a", "b"), ("a", "ghost"), ("b", "phantom")])
        kept, removed = drop_external_links(edges, {"a", "b"})
        assert [e.dst for e in kept] == ["b"]
        assert removed == 2

    def test_drop_external_empty_and_identity(self):
        assert drop_external_links([], {"a"}) == ([], 0)
        edges = self.edges([("a", "b")])
        assert drop_external_links(edges, {"a", "b"}) == (edges, 0)

    def test_drop_self_loops(self):
        edges = self.edges([("a", "a"), ("a", "b")])
        kept, removed = drop_self_loops(edges)
        assert [(e.src, e.dst) for e in kept] == [("a", "b")]
        assert removed == 1
        assert drop_self_loops([]) == ([], 0)


class TestMergeLayers:
    def test_parallel_edges_across_layers(self):
        blogroll = [Edge("a", "b", Layer.BLOGROLL, 1, ("r0",))]
        comments = [Edge("a", "b", Layer.COMMENT, 1, ("c0",))]
        g = merge_layers([blogroll, comments])
        assert len(g.edges) == 2
        assert g.collapsed_arcs() == [("a", "b")]
        assert g.collapsed_arc_weights() == {("a", "b"): 2}

    def test_disjoint_layers_sum(self):
        blogroll = [Edge("a", "b", Layer.BLOGROLL)]
        citations = [Edge("b", "c", Layer.CITATION)]
        g = merge_layers([blogroll, citations])
        assert len(g.edges) == 2
        assert len(g.collapsed_arcs()) == 2

    def test_empty_layers(self):
        g = merge_layers([[], []])
        assert g.nodes == () and g.edges == ()

    def test_extra_nodes_without_edges_are_nodes(self):
        g = merge_layers([[Edge("a", "b", Layer.BLOGROLL)]], extra_nodes=["Lonely"])
        assert g.nodes == ("a", "b", "lonely")

    def test_provenance_preserved(self):
        g = merge_layers([
            [Edge("a", "b", Layer.BLOGROLL, 2, ("r0", "r1"))],
            [Edge("a", "b", Layer.BLOGROLL, 1, ("r9",))],
        ])
        assert g.edges[0].weight == 3
        assert g.edges[0].sources == ("r0", "r1", "r9")
        assert all(e.sources for e in g.edges)

    def test_trackback_layer_unused_but_valid(self):
        g = merge_layers([[Edge("a", "b", Layer.TRACKBACK)]])
        assert g.edges[0].layer is Layer.TRACKBACK


class TestUniverse:
    def test_all_record_owners_included(self):
        posts = [post("p1", "writer")]
        comments = [comment("c1", "p1", "talker"), comment("c2", "p1", None)]
        blogroll = [BlogrollRecord("lister", "http://x.parsiblog.com/")]

        class P:
            blog_id = "profiled"

        universe = blog_universe(posts, comments, blogroll, [P()])
        assert universe == {"writer", "talker", "lister", "profiled"}


def test_cleaning_scan_property():
    # after external-drop then self-loop-drop, every edge has src != dst and
    # both endpoints inside the dataset universe
    rng = __import__("random").Random(12)
    universe = {f"b{i}" for i in range(8)}
    outsiders = ["ghost", "phantom", "void"]
    edges = []
    for i in range(300):
        src = f"b{rng.randrange(8)}"
        dst = rng.choice([f"b{rng.randrange(8)}", src, rng.choice(outsiders)])
        edges.append(Edge(src, dst, Layer.BLOGROLL, 1, (f"r{i}",)))
    kept, dropped_external = drop_external_links(edges, universe)
    kept, dropped_self = drop_self_loops(kept)
    assert len(kept) + dropped_external + dropped_self == len(edges)
    for e in kept:
        assert e.src != e.dst
        assert e.src in universe and e.dst in universe


def test_extraction_deterministic():
    records = [
        BlogrollRecord("b", "http://a.parsiblog.com/"),
        BlogrollRecord("a", "http://b.parsiblog.com/"),
        BlogrollRecord("a", "http://c.parsiblog.com/"),
    ]
    resolver = UrlResolver(PATTERNS)
    first, _ = extract_blogroll_edges(records, resolver)
    second, _ = extract_blogroll_edges(records, resolver)
    assert first == second
    assert [(e.src, e.dst) for e in first] == [("a", "b"), ("a", "c"), ("b", "a")]


def test_dot_export():
    g = merge_layers([[Edge("a", "b", Layer.BLOGROLL)]], extra_nodes=["c"])
    dot = graphbuild.to_dot(g)
    assert dot.startswith("digraph")
    assert '"a" -> "b";' in dot
    assert '"c";' in dot
