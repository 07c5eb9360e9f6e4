"""The ``promises`` command line tool.

Subcommands wire the pipeline together: ``count`` (corpus -> marker counts),
``panel`` (counts + prices -> lagged panel), ``regress`` (panel -> tables),
``debate-predict`` / ``debate-test`` (election rule and t-test), and
``report`` (re-render a saved regression result).

All data artifacts are written atomically (temp file + rename) and contain
no timestamps, so re-running a command on unchanged inputs reproduces
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from promises import corpus as corpus_mod
from promises import debates as debates_mod
from promises import econometrics as econ
from promises import futuretense, reporting, returns

_COMMANDS = ("count", "panel", "regress", "debate-predict", "debate-test", "report")


@dataclass
class RunConfig:
    """Resolved invocation: one command plus its inputs and options."""

    command: str
    corpus: Path | None = None
    counts: Path | None = None
    prices: Path | None = None
    riskfree: Path | None = None
    panel: Path | None = None
    fixtures: Path | None = None
    transcripts: Path | None = None
    result: Path | None = None
    aliases: Path | None = None
    out: Path | None = None
    out_dir: Path | None = None
    manifest: Path | None = None
    drop_report: Path | None = None
    model: str = "re"
    dep: str = "return"
    base_year: int = 1993
    totals: bool = False
    seed: int = 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage; exit 2 on bad flags
        return int(exc.code or 0)
    config = _to_config(args)
    try:
        return run(config)
    except (
        corpus_mod.CorpusError,
        returns.PanelError,
        econ.EstimationError,
        debates_mod.DebateError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run(config: RunConfig) -> int:
    handler = {
        "count": _run_count,
        "panel": _run_panel,
        "regress": _run_regress,
        "debate-predict": _run_debate_predict,
        "debate-test": _run_debate_test,
        "report": _run_report,
    }[config.command]
    return handler(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promises",
        description="Count future-tense promises and regress them on next-year returns.",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="RNG seed for any synthetic-fixture generation (default 0; "
        "current commands are deterministic)",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="|".join(_COMMANDS))

    p = sub.add_parser("count", help="count markers over a filing corpus")
    p.add_argument("--corpus", type=Path, required=True, help="root of <entity>/<year>.txt|.htm tree")
    p.add_argument("--out", type=Path, required=True, help="counts CSV to write")
    p.add_argument("--manifest", type=Path, help="optional corpus manifest CSV")
    p.add_argument("--totals", action="store_true", help="append a grand-total row")

    p = sub.add_parser("panel", help="join counts to next-year returns")
    p.add_argument("--counts", type=Path, required=True, help="counts CSV from `count`")
    p.add_argument("--prices", type=Path, required=True, help="prices CSV: entity,year,adj_close")
    p.add_argument("--riskfree", type=Path, help="risk-free CSV: year,rate")
    p.add_argument("--base-year", type=int, default=1993, help="omitted dummy year (default 1993)")
    p.add_argument("--out", type=Path, required=True, help="panel CSV to write")
    p.add_argument("--drop-report", type=Path, help="optional JSON drop report")

    p = sub.add_parser("regress", help="estimate the panel regression")
    p.add_argument("--panel", type=Path, required=True, help="panel CSV from `panel`")
    p.add_argument("--model", choices=("re", "pooled"), required=True,
                   help="re = random-effects GLS, pooled = OLS with cluster-robust errors")
    p.add_argument("--dep", choices=("return", "excess"), required=True,
                   help="next-year return or excess return")
    p.add_argument("--base-year", type=int, default=1993, help="omitted dummy year (default 1993)")
    p.add_argument("--out-dir", type=Path, required=True,
                   help="directory for report.txt and result.json")

    p = sub.add_parser("debate-predict", help="apply the winner rule per election")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixtures", type=Path, help="CSV: year,candidate,total,actual_winner_flag")
    src.add_argument("--transcripts", type=Path, help="root of <year>/<debate>.txt transcripts")
    p.add_argument("--aliases", type=Path,
                   help="JSON election config (candidates, speaker aliases, actual winners); "
                   "required with --transcripts")
    p.add_argument("--out", type=Path, help="optional per-election table CSV")

    p = sub.add_parser("debate-test", help="loser-vs-winner paired t-test and chart")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixtures", type=Path)
    src.add_argument("--transcripts", type=Path)
    p.add_argument("--aliases", type=Path)
    p.add_argument("--out-dir", type=Path, help="directory for chart.svg and chart.csv")

    p = sub.add_parser("report", help="re-render a saved regression result")
    p.add_argument("--result", type=Path, required=True, help="result.json from `regress`")
    p.add_argument("--out", type=Path, help="write the table here instead of stdout")
    return parser


def _to_config(args: argparse.Namespace) -> RunConfig:
    fields = {k.replace("-", "_"): v for k, v in vars(args).items()}
    return RunConfig(**fields)


# ---------------------------------------------------------------------------
# handlers

def _run_count(config: RunConfig) -> int:
    corpus = corpus_mod.load_corpus(config.corpus)
    rows = futuretense.aggregate_counts(corpus)
    buf = io.StringIO()
    futuretense.write_counts_csv(rows, buf, include_total=config.totals)
    _write_atomic(config.out, buf.getvalue())
    if config.manifest is not None:
        mbuf = io.StringIO()
        corpus_mod.write_manifest(corpus_mod.corpus_manifest(config.corpus), mbuf)
        _write_atomic(config.manifest, mbuf.getvalue())
    print(f"counted {len(rows)} document(s) -> {config.out}")
    return 0


def _run_panel(config: RunConfig) -> int:
    with open(config.counts, newline="", encoding="utf-8") as fh:
        counts = futuretense.read_counts_csv(fh)
    with open(config.prices, newline="", encoding="utf-8") as fh:
        prices = returns.load_prices_csv(fh)
    rf = None
    if config.riskfree is not None:
        with open(config.riskfree, newline="", encoding="utf-8") as fh:
            rf = returns.load_riskfree_csv(fh)
    panel, report = returns.build_panel(counts, prices, rf, config.base_year)
    buf = io.StringIO()
    returns.write_panel_csv(panel, buf)
    _write_atomic(config.out, buf.getvalue())
    if config.drop_report is not None:
        doc = {
            "missing_return": report.missing_return,
            "missing_count": report.missing_count,
            "rows_kept": report.rows_kept,
        }
        _write_atomic(config.drop_report, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(
        f"panel: {report.rows_kept} row(s) kept, "
        f"{report.missing_return} missing-return drop(s), "
        f"{report.missing_count} unmatched return(s) -> {config.out}"
    )
    return 0


def _run_regress(config: RunConfig) -> int:
    with open(config.panel, newline="", encoding="utf-8") as fh:
        panel = returns.read_panel_csv(fh, base_year=config.base_year)
    design, y = econ.build_design(panel, config.dep)
    dep_label = "r_next" if config.dep == "return" else "excess"
    if config.model == "re":
        result = econ.re_gls(design, y, dep=dep_label)
    else:
        result = econ.pooled_cluster(design, y, dep=dep_label)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    text = reporting.render_text(result)
    _write_atomic(config.out_dir / "report.txt", text)
    _write_atomic(config.out_dir / "result.json", reporting.to_json(result))
    print(text, end="")
    return 0


def _load_records(config: RunConfig) -> list[debates_mod.ElectionRecord]:
    if config.fixtures is not None:
        with open(config.fixtures, newline="", encoding="utf-8") as fh:
            return debates_mod.read_elections_csv(fh)
    if config.aliases is None:
        raise debates_mod.DebateError("--aliases config is required with --transcripts")
    return debates_mod.load_election_records(config.transcripts, config.aliases)


def _run_debate_predict(config: RunConfig) -> int:
    records = _load_records(config)
    table = debates_mod.election_table(records)
    for row in table:
        line = f"{row['year']}: predicted {row['predicted']}"
        if row["actual"]:
            line += f" (actual {row['actual']}, {row['hit']})"
        print(line)
    if config.out is not None and table:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(table[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(table)
        _write_atomic(config.out, buf.getvalue())
    return 0


def _run_debate_test(config: RunConfig) -> int:
    records = _load_records(config)
    scored = [r for r in records if r.actual_winner is not None]
    res = debates_mod.loser_winner_ttest(scored)
    if res.t is None:
        print(
            f"t undefined (zero variance), mean diff {res.mean_diff:+.4f} "
            f"(sign {res.mean_sign:+d}), df={res.df}"
        )
    else:
        verdict = "significant" if res.significant_90 else "not significant"
        print(
            f"t = {res.t:.4f}, df = {res.df}, one-sided 90% critical = "
            f"{res.critical_90:.6f}: {verdict} at the 90% level"
        )
    if config.out_dir is not None:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        rows = debates_mod.chart_rows(scored)
        buf = io.StringIO()
        debates_mod.write_chart_csv(rows, buf)
        _write_atomic(config.out_dir / "chart.csv", buf.getvalue())
        _write_atomic(config.out_dir / "chart.svg", debates_mod.election_chart_svg(scored))
    return 0


def _run_report(config: RunConfig) -> int:
    result = reporting.result_from_json(Path(config.result).read_text(encoding="utf-8"))
    text = reporting.render_text(result)
    if config.out is not None:
        _write_atomic(config.out, text)
    else:
        print(text, end="")
    return 0


def _write_atomic(path: Path, content: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


if __name__ == "__main__":
    raise SystemExit(main())
