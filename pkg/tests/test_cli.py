"""Command line tests.

run_command talks to the service in-process by default, so these cover the
whole wiring: argv parsing, config assembly, request dispatch, summary
printing, and exit codes.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from toyspace import build_workspace

from text2gloss import __version__
from text2gloss.cli import run_command
from text2gloss.reorder import load_translations

STAGES = [
    ["ingest", "--split", "train"],
    ["ingest", "--split", "dev"],
    ["align", "--split", "train"],
    ["train-select"],
    ["train-classes"],
    ["train-preorder"],
    ["translate", "--split", "dev", "--reorder", "statistical"],
    ["translate", "--split", "dev", "--reorder", "constrained"],
    ["evaluate", "--split", "dev"],
]

# artifacts that must come out byte-identical on a rerun (latency timings,
# by nature, do not)
DETERMINISTIC_ARTIFACTS = [
    "corpus-train.jsonl",
    "corpus-dev.jsonl",
    "alignments-train.jsonl",
    "select-model.json",
    "classes.json",
    "preorder-model.json",
    "transition-model.json",
    "translations-dev-statistical.jsonl",
    "translations-dev-constrained.jsonl",
    "report-dev-statistical.json",
]


def run_stages(config: Path) -> None:
    for argv in STAGES:
        rc = run_command(argv + ["--config", str(config)])
        assert rc == 0, f"stage {argv} exited {rc}"


@pytest.fixture(scope="module")
def cli_root(tmp_path_factory) -> Path:
    root = build_workspace(tmp_path_factory.mktemp("cli"))
    run_stages(root / "config.json")
    return root


def test_version(capsys):
    assert run_command(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"text2gloss {__version__}"


def test_unknown_subcommand_is_usage_error(capsys):
    assert run_command(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error(capsys):
    assert run_command([]) == 1
    assert "usage" in capsys.readouterr().err


def test_ingest_summary(cli_root, capsys):
    rc = run_command(["ingest", "--split", "train", "--config", str(cli_root / "config.json")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "ingested 36 examples (1 dropped)" in out


def test_align_summary(cli_root, capsys):
    rc = run_command(["align", "--split", "train", "--config", str(cli_root / "config.json")])
    assert rc == 0
    assert "36 examples aligned" in capsys.readouterr().out


def test_translate_artifact_has_expected_gloss(cli_root):
    for mode in ("statistical", "constrained"):
        results = load_translations(
            cli_root / "work" / f"translations-dev-{mode}.jsonl"
        )
        by_id = {r.id: r for r in results}
        assert set(by_id) == {"e1", "e2", "e3"}
        e1 = by_id["e1"]
        assert e1.spo == ("WHAT", "*", "YOU", "NAME", "*")
        assert e1.gloss == ("YOU", "NAME", "WHAT")
        assert by_id["e2"].gloss == ("YOU", "SIGN", "WHERE")
        assert by_id["e3"].gloss == ("YOU", "AGE", "WHEN")


def test_evaluate_summary(cli_root, capsys):
    rc = run_command(["evaluate", "--split", "dev", "--config", str(cli_root / "config.json")])
    assert rc == 0
    assert "BLEU-1 100.00" in capsys.readouterr().out


def test_bench_summary(cli_root, capsys):
    rc = run_command(
        ["bench", "--split", "dev", "--repeats", "3", "--config", str(cli_root / "config.json")]
    )
    assert rc == 0
    assert "baseline translate-statistical" in capsys.readouterr().out


def test_bench_rejects_too_few_repeats(cli_root, capsys):
    rc = run_command(
        ["bench", "--split", "dev", "--repeats", "2", "--config", str(cli_root / "config.json")]
    )
    assert rc == 2
    assert "error (data)" in capsys.readouterr().err


def test_rerun_is_byte_identical(cli_root):
    work = cli_root / "work"
    before = {
        name: (work / name).read_bytes() for name in DETERMINISTIC_ARTIFACTS
    }
    run_stages(cli_root / "config.json")
    after = {name: (work / name).read_bytes() for name in DETERMINISTIC_ARTIFACTS}
    assert before == after


def test_pipeline_runs_without_pos_tags(tmp_path_factory):
    """POS is optional in the corpus schema; every stage must cope."""
    root = build_workspace(tmp_path_factory.mktemp("nopos"))
    for name in ("train.jsonl", "dev.jsonl"):
        path = root / name
        rows = [json.loads(line) for line in path.read_text().splitlines() if line]
        for row in rows:
            row.pop("pos", None)
        path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    run_stages(root / "config.json")
    results = load_translations(root / "work" / "translations-dev-statistical.jsonl")
    assert len(results) == 3


def test_jobs_flag_preserves_output(cli_root):
    """Parallel translation must keep corpus order in the artifact."""
    config = str(cli_root / "config.json")
    path = cli_root / "work" / "translations-dev-statistical.jsonl"
    reference = path.read_bytes()
    rc = run_command(
        ["translate", "--split", "dev", "--jobs", "4", "--config", config]
    )
    assert rc == 0
    assert path.read_bytes() == reference


def test_config_overrides_change_behavior(cli_root, tmp_path, capsys):
    """--work-dir redirects artifacts without touching the config file."""
    other = tmp_path / "override-work"
    rc = run_command(
        [
            "ingest",
            "--split",
            "dev",
            "--config",
            str(cli_root / "config.json"),
            "--work-dir",
            str(other),
        ]
    )
    assert rc == 0
    assert (other / "corpus-dev.jsonl").exists()


def test_invalid_override_value_is_data_error(cli_root, capsys):
    rc = run_command(
        ["ingest", "--config", str(cli_root / "config.json"), "--alpha", "2.0"]
    )
    assert rc == 2
    assert "error (data)" in capsys.readouterr().err


def test_malformed_config_file_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{]", encoding="utf-8")
    assert run_command(["ingest", "--config", str(bad)]) == 2
    assert "error (data)" in capsys.readouterr().err


def test_missing_corpus_file_is_data_error(tmp_path, capsys):
    config = tmp_path / "c.json"
    config.write_text(
        json.dumps(
            {
                "train_corpus": str(tmp_path / "absent.jsonl"),
                "work_dir": str(tmp_path / "work"),
            }
        ),
        encoding="utf-8",
    )
    assert run_command(["ingest", "--config", str(config)]) == 2
    assert "error (data)" in capsys.readouterr().err
