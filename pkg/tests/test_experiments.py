import json
from pathlib import Path

import numpy as np
import pytest

from hgraph.cli import main
from hgraph.errors import ConfigError
from hgraph.experiments import (
    CSV_HEADER,
    Kind,
    RunRecord,
    ScenarioConfig,
    csv_text,
    dumps_json,
    emit_outputs,
    nodal_error,
    observed_orders,
    run_uniqueness,
    run_verify,
)
from hgraph.mesh import generate_strip_mesh, refine

from conftest import straight_strip

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def small_verify(**over):
    d = {
        "kind": "verify",
        "name": "small",
        "H": 1.0,
        "domain": {"x_range": [0.0, 6.0], "b_minus": -0.4, "b_plus": 0.4},
        "data": {"oracle": "cylinder"},
        "mesh": {"nx": 60, "ny": 12},
        "rect": {"a": 1.5, "b": 1.0, "center": [3.0, 0.0]},
        "checks": {"x0": [2.5, 3.5]},
    }
    d.update(over)
    return d


def write_toml(path, text):
    path.write_text(text)
    return str(path)


# -- config validation -------------------------------------------------------


def test_missing_H_rejected(tmp_path):
    d = small_verify()
    del d["H"]
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(d)
    cfg = write_toml(tmp_path / "bad.toml", 'kind = "verify"\n[domain]\nx_range = [0.0, 1.0]\n[mesh]\nnx = 2\nny = 2\n')
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(small_verify(colour="red"))
    d = small_verify()
    d["mesh"]["nz"] = 3
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(d)
    d = small_verify()
    d["mesh"]["nx"] = "many"
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(d)


def test_kind_specific_requirements():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"kind": "uniqueness", "H": 1.0, "domain": {}, "uniqueness": {"delta": 1.0}})
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(
            {"kind": "uniqueness", "H": 1.0, "domain": {}, "uniqueness": {"lengths": [8.0, 4.0], "delta": 1.0}}
        )
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"kind": "convergence", "H": 1.0, "mesh": {}, "convergence": {"oracle": "torus"}})
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"kind": "sideways", "H": 1.0})


def test_kind_must_match_subcommand(tmp_path):
    cfg = str(CONFIGS / "cap_convergence.toml")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_seed_override_changes_hash():
    a = ScenarioConfig.from_dict(small_verify())
    b = ScenarioConfig.from_dict(small_verify(), seed=3)
    assert b.seed == 3 and a.digest() != b.digest()
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(small_verify(), seed=-1)


# -- verify runs -------------------------------------------------------------


def test_verify_emits_three_files(tmp_path):
    rec = run_verify(ScenarioConfig.from_dict(small_verify()))
    assert rec.status == "ok" and rec.all_passed
    assert rec.diagnostics["oracle_linf_error"] < 5e-3
    paths = emit_outputs(rec, tmp_path)
    assert sorted(p.suffix for p in paths) == [".csv", ".json", ".svg"]
    assert all(p.exists() for p in paths)
    lines = paths[0].read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + len(rec.reports)
    for r in rec.reports:
        assert r.passed == r.recompute()


def test_json_round_trip(tmp_path):
    rec = run_verify(ScenarioConfig.from_dict(small_verify()))
    emit_outputs(rec, tmp_path)
    d = json.loads((tmp_path / "small.json").read_text())
    back = RunRecord.from_dict(d)
    assert back.reports == rec.reports
    assert dumps_json(back.to_dict()) == dumps_json(rec.to_dict())
    assert csv_text(back) == csv_text(rec)


def test_cli_verify_is_deterministic(tmp_path):
    cfg = str(CONFIGS / "random_verify.toml")
    outs = []
    for k in range(2):
        out = tmp_path / str(k)
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
        outs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"random_strip.csv", "random_strip.svg", "random_strip.json"}


def test_cli_wide_strip_exits_with_solver_error(tmp_path):
    cfg = str(CONFIGS / "wide_strip.toml")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2
    d = json.loads((tmp_path / "wide_strip.json").read_text())
    assert d["status"] == "solver_error"
    assert d["error"].split(":")[0] in ("GradientBlowup", "NoConvergence")


def test_cli_check_failure_exit_code(tmp_path, monkeypatch):
    import hgraph.cli as cli
    from hgraph.reports import EstimateReport

    real = cli.run

    def failing(cfg):
        rec = real(cfg)
        rec.reports.append(EstimateReport("forced", 1.0, 0.0, 0.0))
        return rec

    monkeypatch.setattr(cli, "run", failing)
    path = write_toml(
        tmp_path / "c.toml",
        'kind = "verify"\nH = 1.0\n[domain]\nx_range = [0.0, 2.0]\nb_minus = -0.3\nb_plus = 0.3\n[mesh]\nnx = 8\nny = 4\n',
    )
    assert main(["verify", "--config", path, "--out", str(tmp_path / "o")]) == 3


def test_cli_help_lists_schema(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for key in ("[domain]", "[uniqueness]", "exit codes", "verify", "convergence"):
        assert key in out


# -- uniqueness and convergence ----------------------------------------------


def test_uniqueness_zero_perturbation():
    cfg = ScenarioConfig.from_dict(
        {
            "kind": "uniqueness",
            "H": 1.0,
            "domain": {"b_minus": -0.4, "b_plus": 0.4},
            "mesh": {"ny": 8},
            "uniqueness": {"lengths": [2.0, 4.0], "delta": 0.0, "sites": [0.5, 1.0], "cells_per_unit": 8},
        }
    )
    rec = run_uniqueness(cfg)
    assert rec.status == "ok"
    for row in rec.tables["D"].values():
        assert max(row["D"]) == 0.0


def test_linear_interpolant_has_zero_error():
    mesh = generate_strip_mesh(straight_strip(0.4, 0, 4), 6, 3)

    def lin(x, y):
        return 0.3 * x - 1.7 * y + 2.0

    for _ in range(3):
        v = mesh.vertices
        assert nodal_error(mesh, lin(v[:, 0], v[:, 1]), lin) == 0.0
        mesh = refine(mesh)


def test_observed_orders():
    assert observed_orders([1.0, 0.25, 0.0625]) == [2.0, 2.0]


def test_cap_convergence_run():
    cfg = ScenarioConfig.load(CONFIGS / "cap_convergence.toml")
    from hgraph.experiments import run_convergence

    rec = run_convergence(cfg)
    errs = rec.tables["linf_error"]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert rec.all_passed and rec.kind is Kind.CONVERGENCE
    assert np.isfinite(rec.tables["order"]).all()
