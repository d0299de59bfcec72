import json
import math

import pytest
from gmpy2 import mpq

from artifact.cli import AnalysisConfig, SpecError, load_preset, load_spec, main, parse_spec_text, presets, run
from artifact.presets import PRESETS

from make_golden import GOLDEN_DIR, report_doc


def _write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def test_thirds_spec_file(tmp_path):
    m = load_spec(_write(tmp_path, PRESETS["thirds-255"], "thirds.json"))
    assert m.lam == mpq(1, 3) and not m.is_regular and m.name == "thirds"


def test_probability_sum_message(tmp_path):
    doc = {"maps": PRESETS["thirds-255"]["maps"], "probs": ["1/2", "1/2", "1/2"]}
    with pytest.raises(SpecError, match="probabilities sum to 3/2"):
        load_spec(_write(tmp_path, doc))


def test_golden_spec_over_field(tmp_path):
    m = load_spec(_write(tmp_path, PRESETS["golden-bernoulli"]))
    assert not m.field.is_rational
    assert abs(float(m.lam) - (math.sqrt(5) - 1) / 2) < 1e-12


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"maps": [{"r": 0.5, "d": "0"}, {"r": "1/2", "d": "1/2"}], "probs": ["1/2", "1/2"]}, "maps[0].r: float literal 0.5"),
        ({"maps": [{"r": "3/2", "d": "0"}, {"r": "1/2", "d": "1/2"}], "probs": ["1/2", "1/2"]}, "ratio"),
        ({"field": {"min_poly": [-1, 0, 1], "root_interval": ["0", "2"]}, "maps": [{"r": "1/2", "d": "0"}, {"r": "1/2", "d": "1/2"}], "probs": ["1/2", "1/2"]}, "reducible"),
        ({"maps": [{"r": "1/2"}, {"r": "1/2", "d": "1/2"}], "probs": ["1/2", "1/2"]}, "maps.0"),
        ({"moran": {"default": ["1/3", "2/3"], "overrides": [{"index_rule": "primes", "pair": ["1/4", "3/4"]}]}}, "unknown index rule"),
    ],
)
def test_spec_errors_are_specific(tmp_path, doc, fragment):
    with pytest.raises(SpecError) as err:
        load_spec(_write(tmp_path, doc))
    assert fragment in str(err.value)


def test_parse_error_names_the_line():
    with pytest.raises(SpecError, match="line 3"):
        parse_spec_text('{\n  "maps": [],\n  "probs": [,]\n}')


def test_unknown_preset():
    with pytest.raises(SpecError, match="unknown preset"):
        load_preset("nope")


def test_config_validation():
    with pytest.raises(SpecError, match="exceed 1"):
        AnalysisConfig("analyze", preset="osc", q_grid=(1.0,)).validate()
    with pytest.raises(SpecError, match="positive"):
        AnalysisConfig("analyze", preset="osc", delta_grid=(0.0,)).validate()
    with pytest.raises(SpecError, match="exactly one"):
        AnalysisConfig("analyze").validate()


def test_finite_type_emit(tmp_path):
    graph = tmp_path / "graph.json"
    code = main(["finite-type", "--preset", "notfull", "--emit", str(graph), "--out", str(tmp_path / "r")])
    assert code == 0
    doc = json.loads(graph.read_text())
    assert {"vertices", "edges", "closure_level"} <= set(doc)
    mats = [e["matrix"] for e in doc["edges"] if not e["is_gap"]]
    assert [["1/6", "0"], ["0", "1/2"]] in mats and [["1/6", "1/6"], ["0", "0"]] in mats


def test_hdelta_osc(tmp_path):
    code = main(["hdelta", "--preset", "osc", "--delta", "1.0", "--depth", "44", "--format", "json", "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["summary"]["hdelta"]["1.0"]["certified_lower_bound"] >= 2.0


def test_csv_layouts(tmp_path):
    assert main(["analyze", "--preset", "thirds-255", "--depth", "6", "--out", str(tmp_path)]) == 0
    heads = {p.stem: p.read_text().splitlines()[0] for p in tmp_path.glob("*.csv")}
    assert heads["q_sequence"] == "n,value_exact,value_float,verdict"
    assert heads["doubling"] == "q,n,value_exact,value_float,verdict"
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary["claims_discipline"]) == {"exact", "certified", "trend", "estimate"}


def test_net_tree_dump(tmp_path):
    assert main(["net-tree", "--preset", "notdoubling", "--depth", "3", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "net_tree.csv").read_text().splitlines()
    assert lines[0] == "level,left,right,length_float,P_n,neighbor_count,is_gap"


def test_budget_failure_keeps_partial(tmp_path, capsys):
    code = main(["separation", "--preset", "notdoubling", "--depth", "6", "--word-budget", "50", "--out", str(tmp_path)])
    assert code == 3
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["partial"] and "separation" in summary["partial"][0]
    assert "partial:" in capsys.readouterr().err


def test_module_errors_carry_reproduction(tmp_path, capsys, monkeypatch):
    import artifact.cli as cli

    def boom(*a, **k):
        raise RuntimeError("synthetic")

    monkeypatch.setattr(cli, "gap_report", boom)
    assert main(["separation", "--preset", "osc", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "error [cli]" in err or "error [" in err
    assert "reproduce with: python -m artifact separation --preset osc" in err


def test_spec_error_exit_code(tmp_path, capsys):
    bad = _write(tmp_path, {"maps": [{"r": "1/2", "d": "0"}], "probs": ["1"]})
    assert main(["analyze", "--spec", str(bad), "--out", str(tmp_path / "r")]) == 2
    assert "error [cli-report]" in capsys.readouterr().err


def test_moran_rejects_ifs_commands():
    with pytest.raises(SpecError, match="needs an IFS"):
        run(AnalysisConfig("separation", preset="cantor-strictex"))


def test_seeded_random_witnesses_are_reproducible(tmp_path):
    args = ["hdelta", "--preset", "thirds-255", "--depth", "12", "--random-witnesses", "5", "--seed", "3", "--format", "json"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def _close(got, want, where="") -> list[str]:
    if isinstance(want, float) or isinstance(got, float):
        ok = isinstance(got, (int, float)) and (got == want or abs(got - want) <= 1e-9 * max(1.0, abs(want)))
        return [] if ok else [f"{where}: {got!r} != {want!r}"]
    if isinstance(want, dict):
        if not isinstance(got, dict) or set(got) != set(want):
            return [f"{where}: keys differ"]
        return [m for k in want for m in _close(got[k], want[k], f"{where}.{k}")]
    if isinstance(want, list):
        if not isinstance(got, list) or len(got) != len(want):
            return [f"{where}: length differs"]
        return [m for i, (g, w) in enumerate(zip(got, want)) for m in _close(g, w, f"{where}[{i}]")]
    return [] if got == want else [f"{where}: {got!r} != {want!r}"]


@pytest.mark.parametrize("name", presets.preset_names())
def test_matches_golden_report(name):
    want = json.loads((GOLDEN_DIR / f"{name}.json").read_text())
    got = json.loads(json.dumps(report_doc(name), default=str))
    diffs = _close(got, want)
    assert not diffs, diffs[:5]
