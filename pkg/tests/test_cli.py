"""CLI: config handling, move grammar, subcommand smoke runs, and the
0/1/2 exit-code contract."""

import json

import pytest

from gcover.cli import main


def write_cfg(tmp_path, name="cfg.json", **overrides):
    cfg = {"group": {"kind": "cyclic", "k": 2},
           "target": [[1, 1, 0]],
           "bounds": {"max_cuts": 1, "max_block_size": 5,
                      "vertex_budget": 5000}}
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_validate_ok(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["validate", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert out.startswith("valid  [")
    assert "block b1" in out


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = write_cfg(tmp_path, extra=1)
    assert main(["validate", "--config", cfg]) == 2
    assert "unknown config keys: extra" in capsys.readouterr().err


def test_unknown_bounds_key_rejected(tmp_path, capsys):
    cfg = write_cfg(tmp_path, bounds={"max_cuts": 1, "fuel": 3})
    assert main(["validate", "--config", cfg]) == 2
    assert "unknown bounds keys: fuel" in capsys.readouterr().err


def test_malformed_json_rejected(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["validate", "--config", str(path)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_unrealizable_target_is_usage_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, group={"kind": "cyclic", "k": 3},
                    target=[[1, 1]])
    assert main(["validate", "--config", cfg]) == 2


def test_apply_path_prints_each_vertex(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["apply", "--config", cfg, "Z@b1; Z@b1; Z@b1"]) == 0
    out = capsys.readouterr().out
    assert out.count("after Z@b1") == 3


def test_apply_inapplicable_step_fails(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    # the seed has no cut c1 to glue
    assert main(["apply", "--config", cfg, "F@c1"]) == 1
    assert "not applicable" in capsys.readouterr().err


def test_apply_bad_grammar_is_usage_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["apply", "--config", cfg, "Q@b1"]) == 2
    # F inversion must be written as the opposite move
    assert main(["apply", "--config", cfg, "F@c1!"]) == 2


def test_orbit_lists_vertices(tmp_path, capsys):
    cfg = write_cfg(tmp_path, group={"kind": "cyclic", "k": 3},
                    target=[[]],
                    bounds={"max_cuts": 1, "max_block_size": 4})
    assert main(["orbit", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "orbit size=3" in out
    assert out.count("vertex [") == 3


def test_verify_relations_runs(tmp_path, capsys):
    cfg = write_cfg(tmp_path, group={"kind": "cyclic", "k": 3},
                    target=[[]],
                    bounds={"max_cuts": 1, "max_block_size": 4})
    assert main(["verify-relations", "--config", cfg]) == 0


def test_complex_verify_boundaryless(tmp_path, capsys):
    cfg = write_cfg(tmp_path, group={"kind": "cyclic", "k": 3},
                    target=[[]],
                    bounds={"max_cuts": 1, "max_block_size": 4})
    assert main(["complex", "verify", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "vertices=3 connected=true pi1=ProvenTrivial" in out


def test_complex_build_counts(tmp_path, capsys):
    cfg = write_cfg(tmp_path, group={"kind": "cyclic", "k": 3},
                    target=[[]],
                    bounds={"max_cuts": 1, "max_block_size": 4})
    assert main(["complex", "build", "--config", cfg]) == 0
    assert "vertices=3 edges=3 cells=5" in capsys.readouterr().out


def test_fiber_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path, target=[[0, 0]],
                    bounds={"max_cuts": 1, "max_block_size": 4})
    assert main(["fiber", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "size=2 connected=true pi1=ProvenTrivial" in out


def test_lifting_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["lifting", "--config", cfg, "Z@b1"]) == 0
    assert "fail=0" in capsys.readouterr().out


def test_lifting_rejects_label_move(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["lifting", "--config", cfg, "P@b1,x=1"]) == 2


def test_export_formats(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["export", "text", "--config", cfg]) == 0
    text = capsys.readouterr().out
    assert "block b1" in text
    assert main(["export", "dot", "--config", cfg]) == 0
    assert capsys.readouterr().out.startswith("graph")


def test_explicit_seed_roundtrip(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["export", "text", "--config", cfg]) == 0
    text = capsys.readouterr().out
    cfg2 = write_cfg(tmp_path, name="cfg2.json", seed=text)
    assert main(["validate", "--config", cfg2]) == 0


def test_missing_subcommand_is_usage_error(capsys):
    assert main([]) == 2
