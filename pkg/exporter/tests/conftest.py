"""Fixtures around the tiny offline backend (see tiny_backend.py), plus the
acceptance-report hook for the exporter's one shipping criterion."""

from __future__ import annotations

import pytest
from tiny_backend import build_tiny_model, write_corpus


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory) -> str:
    return str(build_tiny_model(tmp_path_factory.mktemp("tiny-model")))


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "sample.jsonl"
    records = write_corpus(path)
    return path, records


@pytest.fixture(scope="session")
def backend(model_dir):
    """The same model the exporter loads, for direct-output comparisons."""
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_dir)
    model = AutoModel.from_pretrained(model_dir)
    model.eval()
    return tokenizer, model


_CRITERIA = {
    "test_exporter_contract": (
        "exporter contract (row counts match tokens; pooled vectors match "
        "direct model outputs)"
    ),
}


def pytest_runtest_logreport(report):
    if "test_exporter_acceptance" not in report.nodeid:
        return
    if report.when != "call":
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if name not in _CRITERIA:
        return
    outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    print(f"\n[ACCEPTANCE] {outcome}: {_CRITERIA[name]}", flush=True)
