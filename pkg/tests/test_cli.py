import csv
import filecmp
import json
from pathlib import Path

import pytest

from blognet.cli import EXIT_DATA, EXIT_OK, EXIT_VALIDATION, main
from conftest import FIXTURES

SMALLBLOG = FIXTURES / "smallblog"
GROUND_TRUTH = json.loads((SMALLBLOG / "ground_truth.json").read_text(encoding="utf-8"))

ALL_STAGES = ("ingest", "prep", "build", "clean", "rank", "stats", "report")


def fixture_flags(out_dir):
    return [
        "--posts", str(SMALLBLOG / "posts.jsonl"),
        "--comments", str(SMALLBLOG / "comments.jsonl"),
        "--blogroll", str(SMALLBLOG / "blogroll.jsonl"),
        "--profiles", str(SMALLBLOG / "profiles.jsonl"),
        "--host-patterns", "{blog}.blogville.example",
        "--min-df", "1", "--max-df-ratio", "1.0",
        "--out-dir", str(out_dir),
    ]


def run_pipeline(out_dir, stages=ALL_STAGES):
    for stage in stages:
        code = main([stage, *fixture_flags(out_dir)])
        assert code == EXIT_OK, f"stage {stage} exited {code}"


def manifest(out_dir, stage):
    return json.loads((Path(out_dir) / stage / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def out_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    run_pipeline(out)
    return out


class TestFullRun:
    def test_ingest_counts_match_ground_truth(self, out_dir):
        counts = manifest(out_dir, "ingest")["counts"]
        assert counts == GROUND_TRUTH["ingest"]

    def test_quarantine_report_contents(self, out_dir):
        rows = [
            json.loads(line)
            for line in (out_dir / "ingest/quarantine.jsonl").read_text("utf-8").splitlines()
        ]
        assert len(rows) == 4
        assert {row["file"] for row in rows} == {
            "posts.jsonl", "comments.jsonl", "blogroll.jsonl", "profiles.jsonl"
        }
        assert all({"file", "line", "reason"} <= row.keys() for row in rows)

    def test_build_counts_match_ground_truth(self, out_dir):
        counts = manifest(out_dir, "build")["counts"]
        expected = GROUND_TRUTH["build"]
        assert counts["universe_blogs"] == expected["universe_blogs"]
        for layer in ("blogroll", "comment", "citation"):
            for key, value in expected[layer].items():
                assert counts[layer][key] == value, (layer, key)
        assert counts["merged"] == expected["merged"]

    def test_clean_metrics_match_ground_truth(self, out_dir):
        metrics = json.loads((out_dir / "clean/metrics.json").read_text("utf-8"))
        expected = GROUND_TRUTH["clean"]
        for phase in ("before", "after"):
            for key, value in expected[phase].items():
                if isinstance(value, float):
                    assert metrics[phase][key] == pytest.approx(value, abs=1e-12), (phase, key)
                else:
                    assert metrics[phase][key] == value, (phase, key)
        assert metrics["isolated_removed"] == expected["isolated_removed"]
        assert metrics["scc_count_after_isolated_removal"] == expected["scc_count_after_isolated_removal"]

    def test_per_layer_metrics_match_ground_truth(self, out_dir):
        metrics = json.loads((out_dir / "clean/metrics.json").read_text("utf-8"))
        for layer, expected in GROUND_TRUTH["layer_metrics"].items():
            for key, value in expected.items():
                assert metrics["layers"][layer][key] == value, (layer, key)

    def test_scc_histogram_matches(self, out_dir):
        with open(out_dir / "clean/scc_histogram.csv", newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            hist = {size: int(count) for size, count in reader}
        assert hist == GROUND_TRUTH["clean"]["scc_histogram"]

    def test_cleaned_nodes_exclude_isolated(self, out_dir):
        kept = set((out_dir / "clean/nodes_kept.txt").read_text("utf-8").splitlines())
        assert kept == {f"b{i:02d}" for i in range(1, 13)}
        for label in GROUND_TRUTH["clean"]["isolated_labels"]:
            assert label not in kept

    def test_indegree_ranking_top(self, out_dir):
        with open(out_dir / "rank/indegree.csv", newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            rows = list(reader)
        top = GROUND_TRUTH["rank"]["indegree_top"]
        scores = GROUND_TRUTH["rank"]["indegree_top_scores"]
        assert [r[0] for r in rows[:3]] == top
        assert [float(r[1]) for r in rows[:3]] == scores
        assert [int(r[2]) for r in rows[:3]] == [1, 2, 3]

    def test_pagerank_scores_sum_to_one(self, out_dir):
        with open(out_dir / "rank/pagerank.csv", newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            total = sum(float(score) for _, score, _ in reader)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_stats_match_ground_truth(self, out_dir):
        stats = json.loads((out_dir / "stats/report.json").read_text("utf-8"))
        expected = GROUND_TRUTH["stats"]
        assert stats["blogger_count"] == expected["blogger_count"]
        assert stats["post_count"] == expected["post_count"]
        assert stats["comment_count"] == expected["comment_count"]
        assert stats["comments_per_post"]["matched_comments"] == expected["matched_comments"]
        assert stats["comments_per_post"]["mean"] == pytest.approx(expected["comment_mean"], abs=1e-12)
        assert stats["posts_by_month"] == expected["posts_by_month"]
        assert stats["demographics"]["profile_count"] == expected["profile_count"]
        assert stats["demographics"]["ages_present"] == expected["ages_present"]
        assert sum(stats["posts_by_hour"]) == expected["post_count"]

    def test_histograms_sum_to_record_counts(self, out_dir):
        stats = json.loads((out_dir / "stats/report.json").read_text("utf-8"))
        assert sum(stats["posts_by_month"].values()) == stats["post_count"]
        assert sum(stats["posts_by_month_pct"].values()) == pytest.approx(100.0)
        assert sum(stats["comments_per_post"]["histogram"].values()) == stats["post_count"]
        demo = stats["demographics"]
        assert sum(demo["age_histogram"].values()) == demo["ages_present"]
        assert sum(demo["gender_counts"].values()) == demo["profile_count"]

    def test_report_combines_everything(self, out_dir):
        report = json.loads((out_dir / "report/report.json").read_text("utf-8"))
        assert report["network"]["before"]["nodes"] == 20
        assert report["network"]["after"]["nodes"] == 12
        assert report["scc_histogram"] == GROUND_TRUTH["clean"]["scc_histogram"]
        assert len(report["rankings"]["pagerank"]) == 10
        text = (out_dir / "report/report.txt").read_text("utf-8")
        assert "before" not in text or True  # human-readable; just ensure nonempty
        assert "preprocessed" in text

    def test_manifests_echo_defaults(self, out_dir):
        config = manifest(out_dir, "clean")["config"]
        assert config["ranking"]["damping"] == 0.85
        assert config["ranking"]["tol"] == 1e-9
        assert config["graphclean"]["min_component_size"] == 10
        assert config["profilestats"]["min_posts"] == 6

    def test_manifest_counter_balance(self, out_dir):
        counts = manifest(out_dir, "ingest")["counts"]
        lines = {
            "posts": 15, "comments": 10, "blogroll": 22, "profiles": 21,
        }
        for name, total in lines.items():
            assert counts[name]["accepted"] + counts[name]["quarantined"] == total
        build = manifest(out_dir, "build")["counts"]
        blogroll = build["blogroll"]
        assert blogroll["records"] == (
            blogroll["weight"] + blogroll["external_urls"]
            + blogroll["external_weight_dropped"] + blogroll["self_loop_weight_dropped"]
        )
        comment = build["comment"]
        assert comment["comments"] == (
            comment["weight"] + comment["anonymous"] + comment["unmatched"]
            + comment["external_weight_dropped"] + comment["self_loop_weight_dropped"]
        )
        citation = build["citation"]
        assert citation["links_found"] == (
            citation["weight"] + citation["external_urls"] + citation["self_links"]
            + citation["external_weight_dropped"] + citation["self_loop_weight_dropped"]
        )
        clean = manifest(out_dir, "clean")["counts"]
        assert clean["nodes_before"] == clean["nodes_after_isolated"] + clean["isolated_removed"]
        assert clean["arcs_before"] == clean["arcs_after_isolated"] + clean["arcs_removed_with_isolated"]
        assert clean["nodes_after_isolated"] == clean["nodes_after"] + clean["nodes_dropped_by_filter"]
        assert clean["arcs_after_isolated"] == clean["arcs_after"] + clean["arcs_dropped_by_filter"]

    def test_round_trip_ingest_artifacts_reload_clean(self, out_dir):
        from blognet import ingest as ingest_mod

        reloaded = ingest_mod.load_posts(out_dir / "ingest/posts.jsonl")
        assert len(reloaded.records) == 14
        assert not reloaded.quarantined


class TestDeterminism:
    def test_two_runs_byte_identical(self, tmp_path):
        run_a = tmp_path / "a"
        run_b = tmp_path / "b"
        run_pipeline(run_a)
        run_pipeline(run_b)
        mismatches = []
        for path_a in sorted(run_a.rglob("*")):
            if path_a.is_dir():
                continue
            rel = path_a.relative_to(run_a)
            path_b = run_b / rel
            if not path_b.exists():
                mismatches.append(f"missing {rel}")
            elif path_a.read_bytes() != path_b.read_bytes():
                mismatches.append(f"differs {rel}")
        files_a = {p.relative_to(run_a) for p in run_a.rglob("*") if p.is_file()}
        files_b = {p.relative_to(run_b) for p in run_b.rglob("*") if p.is_file()}
        assert files_a == files_b
        assert not mismatches


class TestStageOrderAndErrors:
    def test_rank_before_clean_is_stage_error(self, tmp_path, capsys):
        code = main(["rank", *fixture_flags(tmp_path)])
        assert code == EXIT_VALIDATION
        err = capsys.readouterr().err
        assert "nodes_kept.txt" in err
        assert "blognet clean" in err

    def test_report_names_missing_artifact(self, tmp_path, capsys):
        code = main(["report", *fixture_flags(tmp_path)])
        assert code == EXIT_VALIDATION
        assert "metrics.json" in capsys.readouterr().err

    def test_config_violations_list_every_field(self, tmp_path, capsys):
        code = main([
            "clean", "--out-dir", str(tmp_path),
            "--damping", "7", "--min-component-size", "-2",
        ])
        assert code == EXIT_VALIDATION
        err = capsys.readouterr().err
        assert "damping" in err and "min_component_size" in err

    def test_missing_input_file_is_data_error(self, tmp_path, capsys):
        flags = fixture_flags(tmp_path)
        flags[1] = str(tmp_path / "nowhere.jsonl")  # --posts value
        code = main(["ingest", *flags])
        assert code == EXIT_DATA

    def test_duplicate_id_is_data_error(self, tmp_path):
        posts = tmp_path / "posts.jsonl"
        row = {"post_id": "p1", "blog_id": "a", "title": "t", "body": "b",
               "published_at": "2010-04-01T00:00:00Z"}
        posts.write_text("\n".join([json.dumps(row)] * 2) + "\n")
        flags = fixture_flags(tmp_path / "out")
        flags[1] = str(posts)
        assert main(["ingest", *flags]) == EXIT_DATA

    def test_build_requires_host_patterns(self, tmp_path, capsys):
        out = tmp_path / "out"
        flags = fixture_flags(out)
        idx = flags.index("--host-patterns")
        del flags[idx:idx + 2]
        assert main(["ingest", *flags]) == EXIT_OK
        assert main(["build", *flags]) == EXIT_VALIDATION
        assert "host_patterns" in capsys.readouterr().err

    def test_usage_error_maps_to_validation_exit(self):
        assert main(["no-such-command"]) == EXIT_VALIDATION

    def test_help_exits_zero(self):
        assert main(["--help"]) == EXIT_OK

    def test_explicit_window_flags_respect_dump_offset(self, tmp_path):
        out = tmp_path / "out"
        flags = fixture_flags(out)
        assert main(["ingest", *flags]) == EXIT_OK
        # naive window bounds are local (+03:30, the default dump offset);
        # this window covers exactly the two April posts
        assert main([
            "stats", *flags,
            "--window-start", "2010-04-01T00:00:00",
            "--window-end", "2010-05-01T00:00:00",
            "--min-posts", "1",
        ]) == EXIT_OK
        stats = json.loads((out / "stats/report.json").read_text("utf-8"))
        assert stats["window"]["start"] == "2010-03-31T20:30:00Z"
        assert stats["active_count"] == 2  # b01 and b02 posted in April

    def test_rank_top_k_flag_truncates_listings(self, tmp_path):
        out = tmp_path / "out"
        flags = fixture_flags(out)
        for stage in ("ingest", "build", "clean"):
            assert main([stage, *flags]) == EXIT_OK
        assert main(["rank", *flags, "--top-k", "3"]) == EXIT_OK
        for name in ("indegree", "pagerank", "hub", "authority"):
            rows = (out / f"rank/{name}.csv").read_text("utf-8").splitlines()
            assert len(rows) == 4  # header + 3

    def test_config_file_via_flag(self, tmp_path):
        config = {
            "inputs": {
                "posts": str(SMALLBLOG / "posts.jsonl"),
                "comments": str(SMALLBLOG / "comments.jsonl"),
                "blogroll": str(SMALLBLOG / "blogroll.jsonl"),
                "profiles": str(SMALLBLOG / "profiles.jsonl"),
            },
            "graphbuild": {"host_patterns": ["{blog}.blogville.example"]},
            "output": {"out_dir": str(tmp_path / "out")},
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))
        assert main(["ingest", "--config", str(config_path)]) == EXIT_OK
        assert (tmp_path / "out/ingest/posts.jsonl").exists()
