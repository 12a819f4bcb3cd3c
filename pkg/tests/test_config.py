import json
import logging
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from src.config.numerics import NumericsConfig
from src.config.paths import HOME_ENV, DecoherePaths
from src.utils import format_number, load_json, read_csv, setup_logging, write_csv, write_json


class TestDecoherePaths:
    def setup_method(self):
        DecoherePaths._cache.clear()

    def test_default_file(self, monkeypatch):
        monkeypatch.delenv(HOME_ENV, raising=False)
        paths = DecoherePaths.load()
        assert paths.root == Path("~/.decohere").expanduser()
        assert paths.runs == paths.root / "runs"
        assert paths.logs == paths.root / "logs" / "decohere.log"
        assert paths.presets == paths.root / "presets.json"

    def test_entries_hang_off_root(self, tmp_path, monkeypatch):
        monkeypatch.delenv(HOME_ENV, raising=False)
        config = tmp_path / "paths.json"
        config.write_text(json.dumps({"root": str(tmp_path / "home"), "runs": "out"}), encoding="utf-8")
        paths = DecoherePaths.load(config)
        assert paths.runs == tmp_path / "home" / "out"
        assert paths.logs == tmp_path / "home" / "logs" / "decohere.log"
        assert DecoherePaths.load(config) is paths

    def test_absolute_entry_is_kept(self, tmp_path, monkeypatch):
        monkeypatch.delenv(HOME_ENV, raising=False)
        config = tmp_path / "paths.json"
        config.write_text(json.dumps({"root": str(tmp_path), "logs": str(tmp_path / "elsewhere.log")}), encoding="utf-8")
        assert DecoherePaths.load(config).logs == tmp_path / "elsewhere.log"

    def test_home_variable_moves_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv(HOME_ENV, str(tmp_path / "moved"))
        paths = DecoherePaths.load()
        assert paths.root == tmp_path / "moved"
        assert paths.runs == tmp_path / "moved" / "runs"
        monkeypatch.delenv(HOME_ENV)
        assert DecoherePaths.load().root != paths.root

    def test_user_presets_only_when_present(self, tmp_path, monkeypatch):
        monkeypatch.setenv(HOME_ENV, str(tmp_path))
        assert DecoherePaths.load().user_presets() is None
        (tmp_path / "presets.json").write_text("{}", encoding="utf-8")
        assert DecoherePaths.load().user_presets() == tmp_path / "presets.json"

    def test_frozen(self):
        paths = DecoherePaths.load()
        with pytest.raises(ValidationError):
            paths.root = Path("/tmp")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            DecoherePaths.load(tmp_path / "absent.json")


class TestNumericsConfig:
    def test_shipped_defaults(self):
        numerics = NumericsConfig.load()
        assert numerics.dense_cap == 2 ** 14
        assert numerics.krylov_tol == 1e-12
        assert NumericsConfig.load() is numerics

    def test_partial_file(self, tmp_path):
        config = tmp_path / "numerics.json"
        config.write_text(json.dumps({"dense_cap": 64}), encoding="utf-8")
        numerics = NumericsConfig.load(config)
        assert numerics.dense_cap == 64
        assert numerics.krylov_dim == 30

    def test_invalid_values(self):
        with pytest.raises(ValidationError):
            NumericsConfig(krylov_tol=0.0)
        with pytest.raises(ValidationError):
            NumericsConfig().dense_cap = 8

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            NumericsConfig.load(tmp_path / "absent.json")


class TestFileUtils:
    def test_number_formatting(self):
        assert format_number(True) == "true"
        assert format_number(np.bool_(False)) == "false"
        assert format_number(np.int64(3)) == "3"
        assert format_number(0.1) == "0.1"
        assert float(format_number(np.float64(1 / 3))) == 1 / 3
        assert format_number("x") == "x"

    def test_csv(self, tmp_path):
        path = write_csv(tmp_path / "nested" / "table.csv", ("a", "b"), [(1, 0.5), (2, float("nan"))])
        header, rows = read_csv(path)
        assert header == ["a", "b"]
        assert rows == [["1", "0.5"], ["2", "nan"]]

    def test_json_is_stable(self, tmp_path):
        first = write_json(tmp_path / "a.json", {"b": 1, "a": [1.5]}).read_bytes()
        second = write_json(tmp_path / "b.json", {"a": [1.5], "b": 1}).read_bytes()
        assert first == second
        assert load_json(str(tmp_path / "a.json")) == {"a": [1.5], "b": 1}

    def test_load_json_lines(self, tmp_path):
        path = tmp_path / "rows.jsonl"
        path.write_text('{"x": 1}\n{"x": 2}\n', encoding="utf-8")
        assert load_json(str(path)) == [{"x": 1}, {"x": 2}]

    def test_load_json_errors(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_json(str(tmp_path / "absent.json"))
        path = tmp_path / "table.yaml"
        path.write_text("a: 1\n", encoding="utf-8")
        with pytest.raises(ValueError, match="Unsupported"):
            load_json(str(path))


class TestLogging:
    def setup_method(self):
        self.root = logging.getLogger()
        self.saved = (list(self.root.handlers), self.root.level)

    def teardown_method(self):
        for handler in list(self.root.handlers):
            self.root.removeHandler(handler)
            handler.close()
        handlers, level = self.saved
        for handler in handlers:
            self.root.addHandler(handler)
        self.root.setLevel(level)

    def test_file_handler(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        setup_logging(str(log_file), logging.DEBUG, force=True)
        logging.getLogger("src.test").debug("step control")
        for handler in self.root.handlers:
            handler.flush()
        assert "step control" in log_file.read_text(encoding="utf-8")

    def test_repeated_setup_is_a_noop(self, tmp_path):
        setup_logging(str(tmp_path / "a.log"), force=True)
        count = len(self.root.handlers)
        setup_logging(str(tmp_path / "b.log"))
        assert len(self.root.handlers) == count
        assert not Path(tmp_path / "b.log").exists()

    def test_unwritable_location_falls_back_to_console(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        setup_logging(str(blocker / "run.log"), force=True)
        assert len(self.root.handlers) == 1
