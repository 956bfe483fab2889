import json

import pytest
from click.testing import CliRunner

from girthplant.cli import main
from girthplant.gadget import attach_pendants, high_girth_regular, subdivide
from girthplant.graphs import read_edge_list, write_edge_list
from girthplant.hosts import random_regular
from girthplant.linkage import EncodingBoundParams, encoding_bound, quadratic_form

from conftest import complete_graph, cycle_graph


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def host_file(tmp_path):
    path = tmp_path / "host.el"
    write_edge_list(random_regular(256, 4, seed=11), path)
    return path


class TestHosts:
    def test_random_writes_edge_list(self, runner, tmp_path):
        out = tmp_path / "g.el"
        result = runner.invoke(
            main,
            ["hosts", "random", "--n", "2000", "--d", "4", "--seed", "7", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        g = read_edge_list(out)
        assert g.n == 2000 and g.m == 4000
        assert all(g.degree(v) == 4 for v in range(g.n))

    def test_random_reproducible(self, runner, tmp_path):
        a, b = tmp_path / "a.el", tmp_path / "b.el"
        for out in (a, b):
            args = ["hosts", "random", "--n", "64", "--d", "3", "--seed", "5", "--out", str(out)]
            assert runner.invoke(main, args).exit_code == 0
        assert a.read_text() == b.read_text()

    def test_lps(self, runner, tmp_path):
        out = tmp_path / "g.el"
        result = runner.invoke(
            main, ["hosts", "lps", "--p", "5", "--q", "13", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert "n=1092" in result.output
        g = read_edge_list(out)
        assert g.n == 1092

    def test_bad_params_exit_2(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["hosts", "random", "--n", "5", "--d", "3", "--seed", "1",
             "--out", str(tmp_path / "x.el")],
        )
        assert result.exit_code == 2
        assert "error:" in result.output


class TestConstruct:
    def test_writes_graph_and_sidecar(self, runner, tmp_path, host_file):
        out = tmp_path / "gprime.el"
        result = runner.invoke(
            main,
            ["construct", "--host", str(host_file), "--d", "4", "--gamma", "4",
             "--seed", "1", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        g = read_edge_list(out)
        assert all(g.degree(v) == 4 for v in range(g.n))
        sidecar = json.loads((tmp_path / "gprime.el.json").read_text())
        assert sidecar["gamma"] == 4 and sidecar["d"] == 4
        assert len(sidecar["planted_u"]) == 4
        assert sidecar["matching"]
        assert sidecar["seeds"] == {"master": 1}

    def test_gamma_literal(self, runner, tmp_path, host_file):
        out = tmp_path / "gp.el"
        result = runner.invoke(
            main,
            ["construct", "--host", str(host_file), "--d", "4",
             "--gamma", "n^(1/3)", "--seed", "1", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        sidecar = json.loads((tmp_path / "gp.el.json").read_text())
        assert sidecar["gamma"] == 6


class TestSpectra:
    def test_adj_dense_json(self, runner, tmp_path):
        gpath = tmp_path / "k4.el"
        write_edge_list(complete_graph(4), gpath)
        jpath = tmp_path / "out.json"
        result = runner.invoke(
            main,
            ["spectra", "adj", "--in", str(gpath), "--mode", "dense",
             "--json", str(jpath)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(jpath.read_text())
        assert payload["lam"] == pytest.approx(1.0)
        assert payload["eigenvalues"][-1] == pytest.approx(3.0)
        assert payload["ramanujan_bound"] == pytest.approx(2 * 2**0.5)

    def test_nb_radius(self, runner, tmp_path):
        gpath = tmp_path / "c6.el"
        write_edge_list(cycle_graph(6), gpath)
        result = runner.invoke(main, ["spectra", "nb", "--in", str(gpath)])
        assert result.exit_code == 0, result.output
        assert "radius=1.0" in result.output

    def test_ihara_pass(self, runner, tmp_path):
        gpath = tmp_path / "pete.el"
        write_edge_list(random_regular(12, 3, seed=1), gpath)
        jpath = tmp_path / "ihara.json"
        result = runner.invoke(
            main, ["spectra", "ihara", "--in", str(gpath), "--json", str(jpath)]
        )
        assert result.exit_code == 0, result.output
        assert "pass" in result.output
        assert json.loads(jpath.read_text())["ok"]

    def test_xcheck_on_gadget(self, runner, tmp_path):
        core = high_girth_regular(6, 3, 4, seed=3)
        h, u_side, v_side = subdivide(core)
        gadget = attach_pendants(h, u_side, v_side, 4)
        gpath = tmp_path / "gadget.el"
        write_edge_list(gadget.graph, gpath)
        result = runner.invoke(
            main, ["spectra", "xcheck", "--in", str(gpath), "--depth", "2"]
        )
        assert result.exit_code == 0, result.output
        assert "pass" in result.output

    def test_xcheck_rejects_plain_graph(self, runner, tmp_path):
        gpath = tmp_path / "k4.el"
        write_edge_list(complete_graph(4), gpath)
        result = runner.invoke(main, ["spectra", "xcheck", "--in", str(gpath)])
        assert result.exit_code == 2


class TestLinkage:
    def test_value_only(self, runner, tmp_path):
        gpath = tmp_path / "c6.el"
        write_edge_list(cycle_graph(6), gpath)
        result = runner.invoke(
            main,
            ["linkage", "--in", str(gpath), "--edge", "0,1", "--k", "1", "--ell", "2"],
        )
        assert result.exit_code == 0, result.output
        value = quadratic_form(cycle_graph(6), (0, 1), 1, 2)
        assert f"value={value}" in result.output

    def test_check_bound_agrees_with_library(self, runner, tmp_path):
        g = cycle_graph(6)
        gpath = tmp_path / "c6.el"
        write_edge_list(g, gpath)
        result = runner.invoke(
            main,
            ["linkage", "--in", str(gpath), "--edge", "0,1", "--k", "1",
             "--ell", "2", "--check-bound"],
        )
        value = quadratic_form(g, (0, 1), 1, 2)
        bound = encoding_bound(EncodingBoundParams(k=1, ell=2, d=2))
        assert result.exit_code == (0 if value <= bound else 1), result.output

    def test_malformed_edge_exit_2(self, runner, tmp_path):
        gpath = tmp_path / "c6.el"
        write_edge_list(cycle_graph(6), gpath)
        result = runner.invoke(
            main,
            ["linkage", "--in", str(gpath), "--edge", "zero-one", "--k", "1", "--ell", "1"],
        )
        assert result.exit_code == 2


class TestAudit:
    def test_small_sets_on_lps(self, runner, tmp_path):
        gpath = tmp_path / "lps.el"
        result = runner.invoke(
            main, ["hosts", "lps", "--p", "5", "--q", "13", "--out", str(gpath)]
        )
        assert result.exit_code == 0
        jpath = tmp_path / "report.json"
        result = runner.invoke(
            main,
            ["audit", "small-sets", "--in", str(gpath), "--kappa", "0.25",
             "--trials", "200", "--seed", "1", "--json", str(jpath)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(jpath.read_text())
        assert payload["ok"] and payload["trials"] == 200


CONFIG_TEXT = """
host.kind = random
host.n = 256
host.d = 4
host.seed = 11
d = 4
gamma = 4
seeds = 11
checks = girth psi
"""


class TestExperiment:
    def test_run_writes_outputs(self, runner, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(
            CONFIG_TEXT
            + f"out.json = {tmp_path / 'bundle.json'}\n"
            + f"out.csv = {tmp_path / 'summary.csv'}\n"
        )
        result = runner.invoke(main, ["experiment", "run", "--config", str(cfg)])
        assert result.exit_code == 0, result.output
        assert "girth=pass" in result.output and "psi=pass" in result.output
        assert (tmp_path / "bundle.json").exists()
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "summary-report.png").stat().st_size > 0

    def test_run_failure_exit_1(self, runner, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(CONFIG_TEXT.replace("girth psi", "girth small_sets"))
        result = runner.invoke(main, ["experiment", "run", "--config", str(cfg)])
        assert result.exit_code == 1
        assert "FAILED" in result.output

    def test_sweep(self, runner, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(CONFIG_TEXT)
        csv_path = tmp_path / "rows.csv"
        result = runner.invoke(
            main,
            ["experiment", "sweep", "--config", str(cfg), "--vary", "gamma=4,6",
             "--csv", str(csv_path)],
        )
        assert result.exit_code == 0, result.output
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 3
        assert csv_path.with_suffix(".png").stat().st_size > 0

    def test_sweep_partial_failure_nonzero_exit(self, runner, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(CONFIG_TEXT)
        result = runner.invoke(
            main,
            ["experiment", "sweep", "--config", str(cfg), "--vary", "gamma=4,5"],
        )
        assert result.exit_code == 1
        assert "FAIL" in result.output

    def test_preset_list(self, runner):
        result = runner.invoke(main, ["experiment", "preset", "--list"])
        assert result.exit_code == 0
        assert len(result.output.strip().splitlines()) == 10

    def test_preset_runs(self, runner):
        result = runner.invoke(main, ["experiment", "preset", "ihara-bass-roundtrip"])
        assert result.exit_code == 0, result.output
        assert "pass" in result.output

    def test_unknown_preset_exit_2(self, runner):
        result = runner.invoke(main, ["experiment", "preset", "nope"])
        assert result.exit_code == 2
