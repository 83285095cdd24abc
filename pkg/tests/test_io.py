import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from subfvas.errors import ArgumentError, ConfigError
from subfvas.grid import ProcessLabel, SamplePath, TimeGrid
from subfvas.io import grid_for, load_config, parse_config, read_path, write_path

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestCSV:
    @given(arrays(np.float64, 17, elements=finite), st.floats(0.01, 1e4))
    def test_round_trip_lossless(self, tmp_path_factory, vals, T):
        d = tmp_path_factory.mktemp("csv")
        p = SamplePath(TimeGrid(T, 16), vals, ProcessLabel.X, initial=float(vals[0]))
        write_path(p, d / "x.csv")
        q = read_path(d / "x.csv")
        assert np.array_equal(q.values, p.values) and q.grid == p.grid

    def test_format(self, tmp_path):
        p = SamplePath(TimeGrid(1.0, 2), [0.0, 0.1, -2.5], ProcessLabel.ZETA)
        write_path(p, tmp_path / "z.csv")
        raw = (tmp_path / "z.csv").read_bytes()
        assert raw == b"t,value\n0,0\n0.5,0.10000000000000001\n1,-2.5\n"

    @pytest.mark.parametrize("text,msg", [
        ("time,x\n0,0\n", ":1:"),
        ("t,value\n0,0\n1\n", ":3:"),
        ("t,value\n0,0\n0.5,abc\n1,0\n", "not a number"),
        ("t,value\n0,0\n1,0\n", "at least 3"),
        ("t,value\n0.1,0\n0.5,0\n1,0\n", "start at 0"),
        ("t,value\n0,0\n0.2,0\n1,0\n", "not uniform"),
    ])
    def test_malformed(self, tmp_path, text, msg):
        f = tmp_path / "bad.csv"
        f.write_text(text)
        with pytest.raises(ArgumentError, match=msg):
            read_path(f)

    def test_labels(self, tmp_path):
        f = tmp_path / "u.csv"
        f.write_text("t,value\n0,0\n0.5,1\n1,2\n")
        assert read_path(f, "U").label is ProcessLabel.U
        f.write_text("t,value\n0,1\n0.5,1\n1,2\n")
        with pytest.raises(ArgumentError):
            read_path(f, "U")


class TestConfig:
    def test_valid(self):
        cfg = parse_config('{"H": 0.7, "alpha": 1, "beta": 0.5, "x0": 0.2, "T": 2, "n_per_unit": 32, "seed": 1}')
        assert cfg.params().H == 0.7
        assert grid_for(cfg) == TimeGrid(2.0, 64)
        assert cfg.horizons() == [2]

    def test_malformed_json_position(self):
        with pytest.raises(ConfigError, match=r"c\.json:2:12: malformed JSON"):
            parse_config('{\n  "H": 0.7,,\n}', "c.json")

    def test_bad_value_names_key_and_line(self):
        with pytest.raises(ConfigError) as ei:
            parse_config('{\n  "alpha": 1,\n  "H": 1.2\n}', "c.json")
        assert "c.json:3" in str(ei.value) and "'H'" in str(ei.value)

    @pytest.mark.parametrize("text,msg", [
        ('{"gamma": 1}', "unknown key 'gamma'"),
        ('{"H": 0.7, "H": 0.8}', "duplicate key"),
        ('[1, 2]', "JSON object"),
        ('{"seed": 1.5}', "'seed'"),
        ('{"n_per_unit": 8}', "'n_per_unit'"),
        ('{"horizons": [2, 1]}', "'horizons'"),
        ('{"T": 1, "horizons": [1, 2]}', "either"),
        ('{"mode": "gamma"}', "'mode'"),
        ('{"alpha": true}', "'alpha'"),
    ])
    def test_rejections(self, text, msg):
        with pytest.raises(ConfigError, match=msg):
            parse_config(text)

    def test_missing_and_grid(self, tmp_path):
        cfg = parse_config('{"H": 0.7, "T": 1.5, "n_per_unit": 17}')
        with pytest.raises(ConfigError, match="alpha"):
            cfg.params()
        with pytest.raises(ConfigError, match="integer"):
            grid_for(cfg)
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.json")
        with pytest.raises(ConfigError, match="single horizon"):
            grid_for(parse_config('{"horizons": [1, 2], "n_per_unit": 16}'))
