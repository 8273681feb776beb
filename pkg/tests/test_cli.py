"""End-to-end CLI tests; subcommands stay thin over the library."""

from __future__ import annotations

from pathlib import Path

import pytest

from bitpath.cli import main

from conftest import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def movies_bp(tmp_path, capsys):
    out = tmp_path / "movies.bp"
    code, _, _ = run(capsys, "build-index", DATA / "movies.tsv", "-o", out)
    assert code == 0
    return out


class TestBuildIndex:
    def test_stats_block(self, tmp_path, capsys):
        out = tmp_path / "m.bp"
        code, stdout, _ = run(capsys, "build-index", DATA / "movies.tsv", "-o", out)
        assert code == 0
        assert "edges: 6" in stdout
        assert "nodes: 5" in stdout
        assert "labels: 4" in stdout
        assert "sccs: 0" in stdout
        assert "max-indeg: 2" in stdout
        assert "max-outdeg: 3" in stdout
        assert out.exists()

    def test_missing_graph_is_data_error(self, tmp_path, capsys):
        code, _, err = run(capsys, "build-index", tmp_path / "nope.tsv", "-o", tmp_path / "x.bp")
        assert code == 2
        assert "error:" in err

    def test_malformed_graph_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("only\ttwo\n")
        code, _, err = run(capsys, "build-index", bad, "-o", tmp_path / "x.bp")
        assert code == 2
        assert "line 1" in err


class TestQuery:
    def test_inline_yes(self, movies_bp, capsys):
        code, out, _ = run(
            capsys,
            "query",
            movies_bp,
            "--source", ":the_thirteenth_floor",
            "--dest", ":movie",
            "--labels", "rdf:type",
        )
        assert code == 0
        assert out.strip() == "YES"

    def test_inline_no(self, movies_bp, capsys):
        code, out, _ = run(
            capsys,
            "query", movies_bp,
            "--source", ":movie", "--dest", ":the_thirteenth_floor",
        )
        assert code == 0
        assert out.strip() == "NO"

    def test_unknown_node_exits_2_and_names_it(self, movies_bp, capsys):
        code, _, err = run(
            capsys,
            "query", movies_bp, "--source", ":the_14th_floor", "--dest", ":movie",
        )
        assert code == 2
        assert ":the_14th_floor" in err

    def test_query_file_emits_result_lines(self, movies_bp, tmp_path, capsys):
        qfile = tmp_path / "queries.tsv"
        qfile.write_text(
            ":the_thirteenth_floor\t:movie\trdf:type\n"
            ":the_thirteenth_floor\t:movie\t\n"
            ":movie\t:the_thirteenth_floor\t\n"
        )
        code, out, _ = run(capsys, "query", movies_bp, "--queries", qfile)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        verdicts = [line.split("\t")[0] for line in lines]
        assert verdicts == ["YES", "YES", "NO"]
        for line in lines:
            fields = line.split("\t")
            assert len(fields) == 4
            int(fields[1]), int(fields[2]), int(fields[3])

    @pytest.mark.parametrize("method", ["dfs", "fdfs", "bbfs"])
    def test_methods_agree_inline(self, movies_bp, capsys, method):
        code, out, _ = run(
            capsys,
            "query", movies_bp, "--method", method,
            "--source", ":the_thirteenth_floor", "--dest", ":movie",
            "--labels", "rdf:type",
        )
        assert code == 0
        assert out.strip() == "YES"


class TestUsageErrors:
    def test_unknown_subcommand_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_unknown_flag_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["build-index", "--wat"])
        assert exc.value.code == 1


class TestGenerators:
    def test_gen_rmat_deterministic_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        for out in (a, b):
            code, _, _ = run(
                capsys,
                "gen-rmat", "-o", out,
                "--nodes", 64, "--edges", 120, "--labels", 5, "--seed", 11,
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_gen_rmat_pipes_into_build_index(self, tmp_path, capsys):
        graph = tmp_path / "g.tsv"
        run(capsys, "gen-rmat", "-o", graph, "--nodes", 32, "--edges", 60, "--seed", 3)
        code, stdout, _ = run(capsys, "build-index", graph, "-o", tmp_path / "g.bp")
        assert code == 0
        # cycles may collapse, so only the node budget is exact
        assert "nodes: 32" in stdout
        assert (tmp_path / "g.bp").exists()

    def test_gen_worstcase_reports_queries(self, tmp_path, capsys):
        graph = tmp_path / "w.tsv"
        code, out, _ = run(capsys, "gen-worstcase", "-o", graph, "--e-param", 4)
        assert code == 0
        assert "satisfiable: x\ty\ta,b,c,d" in out
        assert "failing: x\ty\ta,b,d,c" in out
        assert graph.exists()

    def test_gen_queries_round_trip(self, tmp_path, capsys):
        graph = tmp_path / "g.tsv"
        run(
            capsys,
            "gen-rmat", "-o", graph,
            "--nodes", 64, "--edges", 150, "--labels", 6, "--seed", 5,
        )
        qfile = tmp_path / "q.tsv"
        code, out, _ = run(
            capsys,
            "gen-queries", graph, "-o", qfile,
            "--positives", 8, "--negatives", 8, "--seed", 2,
        )
        assert code == 0
        assert "wrote 16 queries" in out
        rows = [l.split("\t") for l in qfile.read_text().strip().splitlines()]
        assert all(len(r) == 4 for r in rows)
        assert {r[3] for r in rows} == {"pos", "neg"}


class TestBenchAndStats:
    def test_bench_csv_and_plot(self, movies_bp, tmp_path, capsys):
        qfile = tmp_path / "q.tsv"
        qfile.write_text(
            ":the_thirteenth_floor\t:movie\trdf:type\tpos\n"
            ":the_thirteenth_floor\t:movie\thasActor\tneg\n"
        )
        csv_out = tmp_path / "bench.csv"
        png_out = tmp_path / "bench.png"
        code, _, err = run(
            capsys,
            "bench", movies_bp, "--queries", qfile,
            "-o", csv_out, "--plot", png_out,
        )
        assert code == 0
        lines = csv_out.read_text().strip().splitlines()
        assert lines[0] == "method,length,count,mean_ns,stddev_ns,timeouts"
        assert len(lines) == 2  # both queries have length 1
        assert png_out.exists() and png_out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_bench_stdout(self, movies_bp, tmp_path, capsys):
        qfile = tmp_path / "q.tsv"
        qfile.write_text(":the_thirteenth_floor\t:movie\t\tpos\n")
        code, out, _ = run(capsys, "bench", movies_bp, "--queries", qfile)
        assert code == 0
        assert out.startswith("method,length,count")

    def test_stats_and_label_freq(self, movies_bp, tmp_path, capsys):
        freq = tmp_path / "freq.csv"
        fig = tmp_path / "freq.png"
        code, out, _ = run(
            capsys, "stats", movies_bp, "--label-freq", freq, "--plot", fig
        )
        assert code == 0
        assert "compression-ratio:" in out
        assert "section n-succ-e:" in out
        lines = freq.read_text().strip().splitlines()
        assert lines[0] == "label,frequency"
        assert lines[1] == "releasedIn,2"
        assert fig.exists()

    def test_stats_rejects_corrupt_index(self, movies_bp, tmp_path, capsys):
        blob = bytearray(Path(movies_bp).read_bytes())
        blob[len(blob) // 2] ^= 0x40
        bad = tmp_path / "bad.bp"
        bad.write_bytes(bytes(blob))
        code, _, err = run(capsys, "stats", bad)
        assert code == 2
        assert "error:" in err
