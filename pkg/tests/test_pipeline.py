import copy
import json
import pytest
import pandas as pd
import sys
import os

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from config_loader import get_settings
from corpus import load_corpus
from errors import InputError, UnknownDiagram

@pytest.fixture
def settings():
    s = copy.deepcopy(get_settings())
    s["audit"]["max_crossings"] = 7
    s["audit"]["random_models"] = 10
    s["general"]["n_jobs"] = 1
    return s

def test_corpus_loading():
    """Bundled corpus parses and carries fixtures"""
    corpus = load_corpus()
    assert "trefoil" in corpus.names
    assert corpus.expected_det("7_2") == 11
    assert len(corpus.reidemeister_pairs) >= 4

    braid = corpus.get("trefoil_split")
    assert braid.n_crossings == 3
    assert braid.n_unknotted == 1
    assert corpus.skein_fixtures[0]["dets"] == [1, 11, 10]

    d = corpus.get("L10a18")
    assert d.name == "L10a18"
    assert d.n_crossings == 10
    assert corpus.get("L10a18") is d

    small = list(corpus.diagrams(max_crossings=3))
    assert all(x.n_crossings <= 3 for x in small)

def test_corpus_errors(tmp_path):
    """Unknown names, missing files and schema violations"""
    with pytest.raises(UnknownDiagram):
        load_corpus().get("nope")
    with pytest.raises(UnknownDiagram):
        load_corpus(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"diagrams": {"x": {"det": 3}}}))
    with pytest.raises(InputError):
        load_corpus(bad)

def test_batch(settings, tmp_path):
    """Batch writes one JSON per diagram and a summary CSV"""
    from pipeline import run_batch

    summary = run_batch(settings, out_dir=tmp_path)
    assert isinstance(summary, pd.DataFrame)
    assert (summary["crossings"] <= 7).all()

    trefoil = summary.set_index("diagram").loc["trefoil"]
    assert trefoil["det"] == 3
    assert trefoil["khr_total"] == 3
    assert trefoil["e2_total"] == 3

    assert (tmp_path / "summary.csv").exists()
    saved = pd.read_csv(tmp_path / "summary.csv")
    assert list(saved["diagram"]) == list(summary["diagram"])

    with open(tmp_path / "trefoil.json") as f:
        detail = json.load(f)
    assert detail["schema"] == 1
    assert detail["branched"]["det"] == 3

def test_batch_records_errors(settings, tmp_path):
    """A diagram over the crossing limit is reported, not fatal"""
    from pipeline import run_batch

    settings["khovanov"]["crossing_limit"] = 2
    summary = run_batch(settings, out_dir=tmp_path)
    row = summary.set_index("diagram").loc["trefoil"]
    assert "crossings" in row["error"]
    assert not (tmp_path / "trefoil.json").exists()

def test_audit(settings, tmp_path):
    """Every audit check passes with the crossing cap at seven"""
    from audit import run_checks

    corpus = load_corpus()
    report_path = tmp_path / "audit_report.json"
    report = run_checks(settings, report_path=report_path, corpus=corpus)

    failing = [k for k, v in report.items() if isinstance(v, dict) and not v["passed"]]
    assert failing == []
    assert report["passed"]

    with open(report_path) as f:
        saved = json.load(f)
    assert saved["schema"] == 1
    assert len(saved["random_models"]["cases"]) == 10
    assert saved["skein"]["cases"][0]["dets"] == [1, 11, 10]

    pairs = [tuple(case["pair"]) for case in saved["reidemeister_pairs"]["cases"]]
    assert ("trefoil_braid", "trefoil_braid_r3") in pairs
    assert ("pretzel_m2_3", "pretzel_m2_3_r2") in pairs
    assert all(case["passed"] for case in saved["reidemeister_pairs"]["cases"])
