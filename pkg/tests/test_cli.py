import json
import math
from pathlib import Path

import pytest

from promises.cli import main

DATA = Path(__file__).parent / "data"


def _write_prices(path, rows):
    lines = ["entity,year,adj_close"] + [f"{e},{y},{p}" for e, y, p in rows]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def pipeline_files(tmp_path):
    """counts.csv and prices.csv for a small runnable regression."""
    corpus = tmp_path / "corpus"
    rng_words = {
        1993: "will will. shall.",
        1994: "will. going to win.",
        1995: "nothing here.",
    }
    import numpy as np

    rng = np.random.default_rng(0)
    price_rows = []
    for i in range(6):
        entity = f"E{i}"
        d = corpus / entity
        d.mkdir(parents=True)
        price = 100.0
        for year in (1993, 1994, 1995):
            d.joinpath(f"{year}.txt").write_text(
                rng_words[year] + " will" * int(rng.integers(0, 30))
            )
            price_rows.append((entity, year, round(price, 6)))
            price *= math.exp(rng.normal(0.05, 0.2))
        price_rows.append((entity, 1996, round(price, 6)))
    counts_csv = tmp_path / "counts.csv"
    prices_csv = tmp_path / "prices.csv"
    _write_prices(prices_csv, price_rows)
    assert main(["count", "--corpus", str(corpus), "--out", str(counts_csv)]) == 0
    return tmp_path, counts_csv, prices_csv


class TestCount:
    def test_golden_three_doc_fixture(self, tmp_path, capsys):
        out = tmp_path / "counts.csv"
        code = main(["count", "--corpus", str(DATA / "corpus3"), "--out", str(out)])
        assert code == 0
        golden = (DATA / "golden" / "counts3.csv").read_bytes()
        assert out.read_bytes() == golden

    def test_totals_row(self, tmp_path):
        out = tmp_path / "counts.csv"
        main(["count", "--corpus", str(DATA / "corpus3"), "--out", str(out), "--totals"])
        assert out.read_text().splitlines()[-1] == "TOTAL,,1,1,1,3"

    def test_manifest(self, tmp_path):
        out = tmp_path / "counts.csv"
        manifest = tmp_path / "manifest.csv"
        main([
            "count", "--corpus", str(DATA / "corpus3"),
            "--out", str(out), "--manifest", str(manifest),
        ])
        lines = manifest.read_text().splitlines()
        assert lines[0] == "entity,year,chars,source_file"
        assert len(lines) == 4

    def test_missing_corpus_exits_1(self, tmp_path, capsys):
        code = main(["count", "--corpus", str(tmp_path / "none"), "--out", "x.csv"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestPanelRegress:
    def test_panel_then_regress(self, pipeline_files, capsys):
        tmp_path, counts_csv, prices_csv = pipeline_files
        panel_csv = tmp_path / "panel.csv"
        drop_json = tmp_path / "drops.json"
        code = main([
            "panel", "--counts", str(counts_csv), "--prices", str(prices_csv),
            "--base-year", "1993", "--out", str(panel_csv),
            "--drop-report", str(drop_json),
        ])
        assert code == 0
        report = json.loads(drop_json.read_text())
        assert report["rows_kept"] == 18
        assert report["missing_return"] == 0

        out_dir = tmp_path / "reg"
        code = main([
            "regress", "--panel", str(panel_csv), "--model", "pooled",
            "--dep", "return", "--base-year", "1993", "--out-dir", str(out_dir),
        ])
        assert code == 0
        text = (out_dir / "report.txt").read_text()
        for needle in ("Coef.", "Std. Err.", "P>|z|", "[95% Conf. Interval]", "w_t"):
            assert needle in text
        doc = json.loads((out_dir / "result.json").read_text())
        assert doc["method"] == "pooled_cluster"
        assert doc["n_obs"] == 18

    def test_re_model_runs(self, pipeline_files):
        tmp_path, counts_csv, prices_csv = pipeline_files
        panel_csv = tmp_path / "panel.csv"
        main([
            "panel", "--counts", str(counts_csv), "--prices", str(prices_csv),
            "--base-year", "1993", "--out", str(panel_csv),
        ])
        out_dir = tmp_path / "reg_re"
        code = main([
            "regress", "--panel", str(panel_csv), "--model", "re",
            "--dep", "return", "--base-year", "1993", "--out-dir", str(out_dir),
        ])
        assert code == 0
        doc = json.loads((out_dir / "result.json").read_text())
        assert doc["method"] == "re_gls"
        assert doc["sigma_u2"] is not None

    def test_report_rerenders_identically(self, pipeline_files):
        tmp_path, counts_csv, prices_csv = pipeline_files
        panel_csv = tmp_path / "panel.csv"
        main([
            "panel", "--counts", str(counts_csv), "--prices", str(prices_csv),
            "--base-year", "1993", "--out", str(panel_csv),
        ])
        out_dir = tmp_path / "reg"
        main([
            "regress", "--panel", str(panel_csv), "--model", "re",
            "--dep", "return", "--base-year", "1993", "--out-dir", str(out_dir),
        ])
        rerendered = tmp_path / "again.txt"
        code = main([
            "report", "--result", str(out_dir / "result.json"),
            "--out", str(rerendered),
        ])
        assert code == 0
        assert rerendered.read_bytes() == (out_dir / "report.txt").read_bytes()


class TestDebateCommands:
    def test_predict_prints_2004_line(self, capsys):
        code = main(["debate-predict", "--fixtures", str(DATA / "elections.csv")])
        assert code == 0
        out = capsys.readouterr().out
        assert "2004: predicted BUSH" in out

    def test_predict_from_transcripts(self, capsys):
        code = main([
            "debate-predict", "--transcripts", str(DATA / "transcripts"),
            "--aliases", str(DATA / "aliases.json"),
        ])
        assert code == 0
        assert "2004: predicted BUSH" in capsys.readouterr().out

    def test_test_writes_chart(self, tmp_path, capsys):
        out_dir = tmp_path / "chart"
        code = main([
            "debate-test", "--fixtures", str(DATA / "elections.csv"),
            "--out-dir", str(out_dir),
        ])
        assert code == 0
        assert "significant at the 90% level" in capsys.readouterr().out
        assert (out_dir / "chart.svg").exists()
        lines = (out_dir / "chart.csv").read_text().splitlines()
        assert lines[0] == "year,winner,winner_total,loser,loser_total"
        assert len(lines) == 4

    def test_transcripts_without_aliases_fails(self, capsys):
        code = main(["debate-test", "--transcripts", str(DATA / "transcripts")])
        assert code == 1
        assert "aliases" in capsys.readouterr().err


class TestCliContract:
    def test_unknown_command_exits_2(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_unknown_flag_exits_2(self, capsys):
        assert main(["count", "--corpus", "x", "--out", "y", "--bogus"]) == 2

    def test_determinism_all_commands(self, pipeline_files, tmp_path):
        """Re-running every command on unchanged inputs is byte-identical."""
        base, counts_csv, prices_csv = pipeline_files

        def run_all(root: Path) -> dict[str, bytes]:
            root.mkdir(exist_ok=True)
            c = root / "counts.csv"
            m = root / "manifest.csv"
            main(["count", "--corpus", str(DATA / "corpus3"), "--out", str(c),
                  "--manifest", str(m), "--totals"])
            p = root / "panel.csv"
            d = root / "drops.json"
            main(["panel", "--counts", str(counts_csv), "--prices", str(prices_csv),
                  "--base-year", "1993", "--out", str(p), "--drop-report", str(d)])
            r = root / "reg"
            main(["regress", "--panel", str(p), "--model", "re", "--dep", "return",
                  "--base-year", "1993", "--out-dir", str(r)])
            e = root / "elections.csv"
            main(["debate-predict", "--fixtures", str(DATA / "elections.csv"),
                  "--out", str(e)])
            ch = root / "chart"
            main(["debate-test", "--fixtures", str(DATA / "elections.csv"),
                  "--out-dir", str(ch)])
            rr = root / "rerender.txt"
            main(["report", "--result", str(r / "result.json"), "--out", str(rr)])
            return {
                f.name: f.read_bytes()
                for f in [c, m, p, d, r / "report.txt", r / "result.json",
                          e, ch / "chart.csv", ch / "chart.svg", rr]
            }

        first = run_all(tmp_path / "run1")
        second = run_all(tmp_path / "run2")
        assert first == second
