"""HTTP service endpoints and the thin-client CLI."""

import json
import warnings

import pytest
from click.testing import CliRunner

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from starlette.testclient import TestClient

from delaykern.cli import main
from delaykern.service.app import app


@pytest.fixture(scope="module")
def client():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return TestClient(app, raise_server_exceptions=False)


class TestService:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}

    def test_circulant_design_contract(self, client):
        resp = client.post("/api/design/circulant", json={
            "n": 10, "a_row": [1, 1, 0.5, 0, 0, 0, 0, 0, 0.5, 1],
            "T": 0.01, "r": 1.0, "method": "small_delay"})
        assert resp.status_code == 200
        body = resp.json()
        assert set(body) == {"k_row", "k_modes", "self_gain", "cost", "stable"}
        assert body["stable"] is True
        assert abs(body["self_gain"] - 2.8) <= 0.1
        assert len(body["k_row"]) == 10

    def test_scalar_gain_endpoint(self, client):
        resp = client.post("/api/scalar/gain",
                           json={"a": -1.0, "T": 0.0, "r": 1.0})
        assert resp.status_code == 200
        body = resp.json()
        assert body["k_opt"] == pytest.approx(2 ** 0.5 - 1, rel=1e-10)
        assert body["interval_upper"] is None  # unbounded at T = 0

    def test_scalar_cost_endpoint(self, client):
        resp = client.post("/api/scalar/cost",
                           json={"a": -1.0, "T": 0.5, "r": 1.0, "k": 1.0})
        body = resp.json()
        assert body["f_value"] == pytest.approx(0.375, abs=1e-12)
        assert body["branch"] == "equal"

    def test_validation_error_is_422(self, client):
        resp = client.post("/api/scalar/gain",
                           json={"a": -1.0, "T": -2.0, "r": 1.0})
        assert resp.status_code == 422

    def test_domain_error_maps_to_400_exit_2(self, client):
        resp = client.post("/api/scalar/cost",
                           json={"a": -1.0, "T": 0.5, "r": 1.0, "k": 100.0})
        assert resp.status_code == 400
        assert resp.json()["exit_code"] == 2

    def test_unstabilizable_maps_to_409_exit_3(self, client):
        resp = client.post("/api/design/circulant", json={
            "n": 3, "a_row": [5.0, 1.0, 1.0], "T": 0.5, "r": 1.0,
            "method": "numerical_opt"})
        assert resp.status_code == 409
        assert resp.json()["exit_code"] == 3
        assert resp.json()["error"] == "UnstabilizableError"

    def test_artifact_endpoint_round_trip(self, client):
        resp = client.post("/api/regions", json={
            "a_min": -2.0, "a_max": 0.5, "n_points": 8, "T": 1.0,
            "formats": ["csv", "json"]})
        assert resp.status_code == 200
        files = resp.json()["files"]
        assert set(files) == {"regions.csv", "regions.json"}


class TestCli:
    def run(self, args, **kw):
        return CliRunner(mix_stderr=False).invoke(main, args, **kw) \
            if "mix_stderr" in CliRunner.__init__.__code__.co_varnames \
            else CliRunner().invoke(main, args, **kw)

    def test_regions_writes_artifacts(self, tmp_path):
        res = self.run(["regions", "--a-min", "-2", "--a-max", "0.5",
                        "--n-points", "8", "-T", "1.0",
                        "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "regions.csv").exists()
        assert (tmp_path / "regions.json").exists()
        assert (tmp_path / "regions.svg").exists()

    def test_single_format_flag(self, tmp_path):
        res = self.run(["regions", "--a-min", "-2", "--a-max", "0.5",
                        "--n-points", "8", "-T", "1.0", "--format", "csv",
                        "--out", str(tmp_path)])
        assert res.exit_code == 0
        assert list(p.name for p in tmp_path.iterdir()) == ["regions.csv"]

    def test_circulant_reports_and_writes(self, tmp_path):
        res = self.run(["circulant", "-n", "10",
                        "--a-row", "1,1,0.5,0,0,0,0,0,0.5,1",
                        "-T", "0.01", "-r", "1", "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        report = json.loads((tmp_path / "circulant.json").read_text())
        assert abs(report["self_gain"] - 2.8) <= 0.1

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 2, "a_row": [0.3, 0.1], "T": 0.5,
                                   "r": 1.0, "method": "numerical_opt"}))
        out = tmp_path / "out"
        res = self.run(["circulant", "--config", str(cfg), "-T", "0.01",
                        "--out", str(out)])
        assert res.exit_code == 0, res.output
        report = json.loads((out / "circulant.json").read_text())
        assert report["T"] == 0.01  # flag wins over config

    def test_config_error_exits_2(self, tmp_path):
        res = self.run(["regions", "--a-min", "2", "--a-max", "-1",
                        "--n-points", "5", "-T", "1.0",
                        "--out", str(tmp_path)])
        assert res.exit_code == 2

    def test_numerical_failure_exits_3(self, tmp_path):
        res = self.run(["circulant", "-n", "3", "--a-row", "5,1,1",
                        "-T", "0.5", "--out", str(tmp_path)])
        assert res.exit_code == 3

    def test_verify_small_grid(self, tmp_path):
        res = self.run(["verify", "--out", str(tmp_path), "--format", "json",
                        "--k-per-cell", "3",
                        "--config", self._verify_cfg(tmp_path)])
        assert res.exit_code == 0, res.output
        report = json.loads((tmp_path / "verify.json").read_text())
        assert report["max_rel_err_time"] < 1e-3

    @staticmethod
    def _verify_cfg(tmp_path):
        cfg = tmp_path / "verify_cfg.json"
        cfg.write_text(json.dumps({"a_values": [-1.0], "T_values": [0.5]}))
        return str(cfg)

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "one", tmp_path / "two"
        for out in (out1, out2):
            res = self.run(["scalar-sweep", "--a-min", "-2", "--a-max", "0.5",
                            "--n-points", "6", "--delays", "0,1",
                            "--out", str(out)])
            assert res.exit_code == 0, res.output
        for name in ("scalar_sweep.csv", "scalar_sweep.json",
                     "scalar_sweep.svg"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_env_var_configuration(self, tmp_path):
        res = CliRunner().invoke(
            main, ["regions", "--a-min", "-1", "--a-max", "0.5", "-T", "1.0",
                   "--out", str(tmp_path)],
            env={"DELAYKERN_REGIONS_N_POINTS": "5"},
            auto_envvar_prefix="DELAYKERN")
        assert res.exit_code == 0, res.output
        csv_rows = (tmp_path / "regions.csv").read_text().strip().splitlines()
        assert len(csv_rows) == 6  # header + 5 grid points
