"""End-to-end CLI behavior: artifacts, determinism, exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from bezierabc.cli import main
from bezierabc.metrics import surface_sample_for_metrics
from bezierabc.bezier import load_model
from bezierabc.problems import read_cloud_csv, write_cloud_csv
from bezierabc.seeds import derive_rng


def run(*argv) -> int:
    return main(list(argv))


def read_bytes(path) -> bytes:
    return Path(path).read_bytes()


def strip_timing_json(path) -> dict:
    payload = json.loads(Path(path).read_text())
    payload.pop("wall_seconds", None)
    return payload


def strip_timing_csv(path) -> list:
    lines = Path(path).read_text().splitlines()
    fields = lines[0].split(",")
    drop = [i for i, f in enumerate(fields) if "seconds" in f]
    out = []
    for line in lines:
        parts = line.split(",")
        out.append([p for i, p in enumerate(parts) if i not in drop])
    return out


class TestGen:
    def test_writes_expected_files(self, tmp_path):
        out = tmp_path / "d"
        assert run("gen", "--problem", "3-med", "--n", "40", "--sigma", "0.1",
                   "--seed", "7", "-o", str(out)) == 0
        assert {p.name for p in out.iterdir()} == {
            "truth.csv", "train.csv", "meta.json", "manifest.json"
        }
        meta = json.loads((out / "meta.json").read_text())
        assert meta == {"problem": "3-med", "M": 3, "count": 40, "sigma": 0.1, "seed": 7}
        assert read_cloud_csv(out / "train.csv").shape == (40, 3)

    def test_sigma_zero_train_equals_truth_bytes(self, tmp_path):
        out = tmp_path / "d"
        run("gen", "--problem", "schaffer", "--n", "25", "--sigma", "0", "-o", str(out))
        assert read_bytes(out / "train.csv") == read_bytes(out / "truth.csv")

    def test_byte_identical_rerun(self, tmp_path):
        out = tmp_path / "d"
        flags = ("gen", "--problem", "3-med", "--n", "30", "--sigma", "0.05",
                 "--seed", "3", "-o", str(out))
        run(*flags)
        first = {
            name: read_bytes(out / name)
            for name in ("truth.csv", "train.csv", "meta.json", "manifest.json")
        }
        run(*flags)  # identical flags into the same directory
        for name, blob in first.items():
            assert read_bytes(out / name) == blob

    def test_default_count_from_reference_table(self, tmp_path):
        out = tmp_path / "d"
        run("gen", "--problem", "schaffer", "-o", str(out))
        assert read_cloud_csv(out / "truth.csv").shape[0] == 201

    def test_bad_problem_is_usage_error(self, tmp_path):
        assert run("gen", "--problem", "zdt1", "-o", str(tmp_path / "x")) == 1

    def test_manifest_hashes_match(self, tmp_path):
        import hashlib

        out = tmp_path / "d"
        run("gen", "--problem", "3-med", "--n", "10", "-o", str(out))
        manifest = json.loads((out / "manifest.json").read_text())
        for name, digest in manifest["files"].items():
            assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest


class TestFit:
    @pytest.fixture()
    def dataset(self, tmp_path):
        out = tmp_path / "data"
        run("gen", "--problem", "3-med", "--n", "30", "--sigma", "0.05",
            "--seed", "1", "-o", str(out))
        return out

    def test_wabc_outputs_and_rerun_identical(self, dataset, tmp_path):
        fits = []
        for name in ("f1", "f2"):
            out = tmp_path / name
            assert run("fit", "--method", "wabc", "--degree", "2", "--n-abc", "25",
                       "--n-updates", "3", "--n-delta", "10", "--seed", "5",
                       str(dataset / "train.csv"), "-o", str(out)) == 0
            fits.append(out)
        assert read_bytes(fits[0] / "model.json") == read_bytes(fits[1] / "model.json")
        assert strip_timing_json(fits[0] / "report.json") == strip_timing_json(
            fits[1] / "report.json"
        )
        report = json.loads((fits[0] / "report.json").read_text())
        assert report["termination"] in (
            "rounds-exhausted", "covariance-collapsed", "proposal-budget-exhausted"
        )

    def test_aao_fit(self, dataset, tmp_path):
        out = tmp_path / "fit"
        assert run("fit", "--method", "aao", "--degree", "2",
                   str(dataset / "train.csv"), "-o", str(out)) == 0
        model = load_model(out / "model.json")
        assert model.order == 2 and model.dim == 3
        report = json.loads((out / "report.json").read_text())
        assert report["method"] == "aao"
        losses = report["cp_losses"]
        assert losses == sorted(losses, reverse=True) or len(losses) <= 2

    def test_missing_csv_is_data_error(self, tmp_path):
        assert run("fit", "--method", "aao", str(tmp_path / "nope.csv"),
                   "-o", str(tmp_path / "f")) == 2

    def test_malformed_csv_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("f1,f2\n1.0,huh\n")
        assert run("fit", "--method", "aao", str(bad), "-o", str(tmp_path / "f")) == 2


class TestEval:
    def test_self_surface_gives_zero_gd(self, tmp_path, capsys):
        data = tmp_path / "data"
        run("gen", "--problem", "3-med", "--n", "25", "--seed", "2", "-o", str(data))
        fit = tmp_path / "fit"
        run("fit", "--method", "aao", "--degree", "2", str(data / "train.csv"),
            "-o", str(fit))
        # validation cloud = the model's own surface sample at the same seed
        model = load_model(fit / "model.json")
        rng = derive_rng(9, "eval", "surface", 200)
        write_cloud_csv(tmp_path / "self.csv", surface_sample_for_metrics(model, 200, rng))
        assert run("eval", "--model", str(fit / "model.json"),
                   "--truth", str(tmp_path / "self.csv"),
                   "--count", "200", "--seed", "9") == 0
        row = capsys.readouterr().out.strip().splitlines()[-1].split(",")
        header = "problem,M,n,sigma,method,trial,seed,gd,igd,seconds".split(",")
        assert len(row) == len(header)
        assert float(row[header.index("gd")]) == 0.0

    def test_row_appended_with_meta(self, tmp_path, capsys):
        data = tmp_path / "data"
        run("gen", "--problem", "schaffer", "--n", "30", "--sigma", "0.1",
            "--seed", "4", "-o", str(data))
        fit = tmp_path / "fit"
        run("fit", "--method", "aao", "--degree", "2", str(data / "train.csv"),
            "-o", str(fit))
        out_csv = tmp_path / "rows.csv"
        for _ in range(2):
            assert run("eval", "--model", str(fit / "model.json"),
                       "--truth", str(data / "truth.csv"),
                       "--meta", str(data / "meta.json"),
                       "--method", "aao", "--trial", "0",
                       "--out", str(out_csv)) == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "problem,M,n,sigma,method,trial,seed,gd,igd,seconds"
        assert len(lines) == 3 and lines[1] == lines[2]
        assert lines[1].startswith("schaffer,2,30,0.1,aao,0,")

    def test_dimension_mismatch_is_data_error(self, tmp_path):
        data2 = tmp_path / "d2"
        run("gen", "--problem", "schaffer", "--n", "20", "-o", str(data2))
        data3 = tmp_path / "d3"
        run("gen", "--problem", "3-med", "--n", "20", "-o", str(data3))
        fit = tmp_path / "fit"
        run("fit", "--method", "aao", "--degree", "2", str(data2 / "train.csv"),
            "-o", str(fit))
        assert run("eval", "--model", str(fit / "model.json"),
                   "--truth", str(data3 / "truth.csv")) == 2


class TestBench:
    BENCH_FLAGS = (
        "bench", "--problems", "3-med", "--n", "20", "--sigma", "0.05",
        "--trials", "5", "--methods", "wabc,aao", "--degree", "2",
        "--n-abc", "15", "--n-updates", "3", "--n-delta", "10",
        "--eval-count", "200", "--seed", "11",
    )

    def test_outputs_and_determinism_modulo_seconds(self, tmp_path):
        outs = []
        for name in ("b1", "b2"):
            out = tmp_path / name
            assert run(*self.BENCH_FLAGS, "-o", str(out)) == 0
            outs.append(out)
        for fname in ("results.csv", "aggregate.csv"):
            assert strip_timing_csv(outs[0] / fname) == strip_timing_csv(outs[1] / fname)
        assert read_bytes(outs[0] / "pvalues.csv") == read_bytes(outs[1] / "pvalues.csv")

        lines = (outs[0] / "results.csv").read_text().splitlines()
        assert lines[0] == "problem,M,n,sigma,method,trial,seed,gd,igd,seconds"
        assert len(lines) == 1 + 5 * 2  # trials x methods

        pvals = (outs[0] / "pvalues.csv").read_text().splitlines()
        assert len(pvals) == 1 + 2  # gd and igd rows for the single cell
        assert all(row.count(",") == pvals[0].count(",") for row in pvals)
        # p-value present for every cell
        header = pvals[0].split(",")
        for row in pvals[1:]:
            assert row.split(",")[header.index("p_value")] != ""

    def test_parallel_jobs_match_serial(self, tmp_path):
        serial, parallel = tmp_path / "s", tmp_path / "p"
        assert run(*self.BENCH_FLAGS, "-o", str(serial)) == 0
        assert run(*self.BENCH_FLAGS, "--jobs", "2", "-o", str(parallel)) == 0
        assert strip_timing_csv(serial / "results.csv") == strip_timing_csv(
            parallel / "results.csv"
        )

    def test_unknown_method_is_usage_error(self, tmp_path):
        assert run("bench", "--problems", "3-med", "--n", "10", "--sigma", "0",
                   "--methods", "sgd", "-o", str(tmp_path / "x")) == 1


class TestScans:
    def test_bias_scan_artifacts(self, tmp_path):
        out = tmp_path / "scan"
        assert run("bias-scan", "--model", "gaussian", "--n", "15", "--n-abc", "150",
                   "--trials", "2", "--delta-min", "0.2", "--delta-max", "2.5",
                   "--delta-points", "6", "--max-proposals", "200000",
                   "--seed", "3", "-o", str(out)) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert {"slope_all", "slope_middle", "band", "passed"} <= set(summary)
        points = (out / "points.csv").read_text().splitlines()
        assert points[0] == "delta,bias,trial"
        loglog = (out / "loglog.csv").read_text().splitlines()
        assert loglog[0] == "log10_delta,log10_bias"
        assert len(loglog) == len(points)

    def test_accept_scan_artifacts_and_determinism(self, tmp_path):
        outs = []
        for name in ("a1", "a2"):
            out = tmp_path / name
            assert run("accept-scan", "--model", "gaussian", "--n", "2",
                       "--proposals", "20000", "--seed", "5", "-o", str(out)) == 0
            outs.append(out)
        assert read_bytes(outs[0] / "points.csv") == read_bytes(outs[1] / "points.csv")
        assert read_bytes(outs[0] / "summary.json") == read_bytes(outs[1] / "summary.json")
        summary = json.loads((outs[0] / "summary.json").read_text())
        assert summary["predicted_slope"] == 2
        rates = summary["rates"]
        assert all(a <= b for a, b in zip(rates, rates[1:]))

    def test_bad_grid_is_usage_error(self, tmp_path):
        assert run("accept-scan", "--delta-min", "2.0", "--delta-max", "1.0",
                   "-o", str(tmp_path / "x")) == 1


class TestConfigFile:
    def test_json_config_provides_defaults(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 17, "sigma": 0.2}))
        out = tmp_path / "d"
        assert run("--config", str(cfg), "gen", "--problem", "3-med",
                   "-o", str(out)) == 0
        meta = json.loads((out / "meta.json").read_text())
        assert meta["count"] == 17 and meta["sigma"] == 0.2

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 17}))
        out = tmp_path / "d"
        assert run("--config", str(cfg), "gen", "--problem", "3-med", "--n", "21",
                   "-o", str(out)) == 0
        assert json.loads((out / "meta.json").read_text())["count"] == 21

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus_flag": 1}))
        assert run("--config", str(cfg), "gen", "--problem", "3-med",
                   "-o", str(tmp_path / "d")) == 1
