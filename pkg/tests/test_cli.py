import json

import pytest

from src.cli import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_POINT_FAILURES, build_parser, collect_overrides, config_from_flags, main


SMALL = ["-N", "4", "--tmax", "0.5", "--steps", "5", "--no-progress"]


class TestParser:
    def test_sources_are_exclusive(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--preset", "fig1b1", "--model", "ising"])

    def test_overrides_skip_unset_flags(self):
        args = build_parser().parse_args(["--preset", "fig1b1", "-N", "8", "--hy", "0.5"])
        assert collect_overrides(args) == {"N": 8, "hy": 0.5}

    def test_several_values_scan_the_axis(self):
        args = build_parser().parse_args(["--model", "ising", "--hy", "0", "0.5", "--theta", "0.7"])
        overrides = collect_overrides(args)
        assert overrides["hy_values"] == [0.0, 0.5]
        assert overrides["theta_values"] == [0.7]

    def test_model_defaults(self):
        config = config_from_flags(build_parser().parse_args(["--model", "fermi"]))
        spec = config.resolved_spec()
        assert spec.n_sites == 6
        assert spec.U == 0.4
        assert spec.filling == 6

    def test_map_grid(self):
        args = build_parser().parse_args(
            ["--model", "ising", "--task", "map", "--hx-grid", "0", "2", "5", "--hy-grid", "0", "1", "3"]
        )
        config = config_from_flags(args)
        assert config.grid.hx == [0.0, 0.5, 1.0, 1.5, 2.0]
        assert config.grid.hy == [0.0, 0.5, 1.0]


class TestMain:
    def test_list_presets(self, capsys):
        assert main(["--list-presets"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "fig1b1" in out
        assert "figS3" in out

    def test_missing_source(self):
        assert main([]) == EXIT_CONFIG_ERROR

    def test_unknown_preset(self, tmp_path):
        assert main(["--preset", "fig9", "--out", str(tmp_path)]) == EXIT_CONFIG_ERROR

    def test_dense_over_cap(self, tmp_path):
        code = main(["--model", "ising", "-N", "16", "--method", "dense", "--out", str(tmp_path), "--no-progress"])
        assert code == EXIT_CONFIG_ERROR

    def test_explicit_model(self, tmp_path, capsys):
        code = main(["--model", "ising", "--hy", "0.5", "--dx", "0.1", "--out", str(tmp_path), *SMALL])
        assert code == EXIT_OK
        assert (tmp_path / "traces" / "ising_hy0.5.csv").exists()
        assert "Outputs in" in capsys.readouterr().out

    def test_preset_with_overrides(self, tmp_path):
        code = main(["--preset", "fig1b2", "--hy", "0.9", "--out", str(tmp_path), *SMALL])
        assert code == EXIT_OK
        index = json.loads((tmp_path / "index.json").read_text(encoding="utf-8"))
        assert [entry["point"] for entry in index["points"]] == ["ising_dx_hy0.9"]
        assert index["points"][0]["params"]["n_sites"] == 4

    def test_config_file(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({
            "name": "from_file",
            "model": {"kind": "heisenberg", "N": 4, "J": 0.5, "delta": [0.05, 0.0]},
            "hy_values": [0.0, 0.5],
            "t_max": 0.5,
            "steps": 5,
        }), encoding="utf-8")
        out = tmp_path / "run"
        assert main(["--config", str(path), "--out", str(out), "--no-progress"]) == EXIT_OK
        assert (out / "curves" / "from_file.csv").exists()

    def test_invalid_config_file(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"model": {"kind": "ising"}, "temperature": 1.0}), encoding="utf-8")
        assert main(["--config", str(path), "--no-progress"]) == EXIT_CONFIG_ERROR
        assert main(["--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG_ERROR

    def test_point_failures(self, tmp_path, monkeypatch):
        def explode(*args, **kwargs):
            raise RuntimeError("propagation failed")

        monkeypatch.setattr("src.orchestrator.orchestrator.spec_coherence_trace", explode)
        code = main(["--model", "ising", "--out", str(tmp_path), *SMALL])
        assert code == EXIT_POINT_FAILURES
