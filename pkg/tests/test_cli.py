import json
from pathlib import Path

import pytest

from rlda.cli import main

FIXTURE = Path(__file__).parent / "data" / "separable.csv"


def run(args):
    return main([str(a) for a in args])


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestPipeline:
    def test_simulate_then_cv_round_trip(self, tmp_path):
        csv = tmp_path / "d.csv"
        out = tmp_path / "cv.json"
        assert run(["simulate", "--seed", 7, "--n", 12, "--m", 12, "--p", 6,
                    "--shift-count", 2, "--data-out", csv]) == 0
        assert csv.exists()
        assert run(["cv", "--data", csv, "--label", "group", "--folds", 3,
                    "--seed", 1, "--lambda-grid", "0.2,0.6", "--out", out]) == 0
        doc = read_json(out)
        assert 0.0 <= doc["accuracy_mean"] <= 1.0
        assert doc["config"]["folds"] == 3
        assert doc["tool_version"]

    def test_fit_predict_chol(self, tmp_path):
        model = tmp_path / "model.json"
        pred = tmp_path / "pred.json"
        assert run(["fit", "--data", FIXTURE, "--label", "cohort", "--target", "t1",
                    "--lambda", "0.3", "--mean-reg", "hard", "--delta", "0.4",
                    "--model", model, "--out", tmp_path / "fit.json"]) == 0
        assert run(["predict", "--model", model, "--data", FIXTURE, "--out", pred]) == 0
        doc = read_json(pred)
        assert doc["accuracy"] == 1.0
        assert set(doc["predictions"]) == {"low", "high"}

    def test_fit_predict_svd(self, tmp_path):
        model = tmp_path / "model.json"
        pred = tmp_path / "pred.json"
        assert run(["fit", "--data", FIXTURE, "--label", "cohort", "--algorithm", "svd",
                    "--lambda", "0.5", "--delta", "0.0", "--model", model,
                    "--out", tmp_path / "fit.json"]) == 0
        assert read_json(tmp_path / "fit.json")["algorithm"] == "svd"
        assert run(["predict", "--model", model, "--data", FIXTURE, "--out", pred]) == 0
        assert read_json(pred)["accuracy"] == 1.0

    def test_fit_with_cv_selection(self, tmp_path):
        model = tmp_path / "model.json"
        out = tmp_path / "fit.json"
        assert run(["fit", "--data", FIXTURE, "--label", "cohort", "--lambda", "cv",
                    "--folds", 3, "--seed", 2, "--model", model, "--out", out]) == 0
        doc = read_json(out)
        assert doc["lambda_rule"] == "cv"
        assert doc["cv_accuracy_mean"] == 1.0

    def test_fit_with_lw_selection(self, tmp_path):
        model = tmp_path / "model.json"
        out = tmp_path / "fit.json"
        assert run(["fit", "--data", FIXTURE, "--label", "cohort", "--lambda", "lw",
                    "--model", model, "--out", out]) == 0
        assert read_json(out)["lambda_rule"] == "lw"
        assert 0.0 <= read_json(out)["lambda"] <= 1.0

    def test_fit_lw_lambda_with_cv_delta(self, tmp_path):
        model = tmp_path / "model.json"
        out = tmp_path / "fit.json"
        assert run(["fit", "--data", FIXTURE, "--label", "cohort", "--lambda", "lw",
                    "--mean-reg", "l2", "--delta", "cv", "--folds", 3, "--seed", 1,
                    "--model", model, "--out", out]) == 0
        doc = read_json(out)
        assert doc["lambda_rule"] == "lw"
        assert 0.0 <= doc["delta"] <= 1.0

    def test_predict_on_foreign_labels_skips_accuracy(self, tmp_path):
        model = tmp_path / "model.json"
        assert run(["fit", "--data", FIXTURE, "--label", "cohort", "--lambda", "0.3",
                    "--model", model, "--out", tmp_path / "fit.json"]) == 0
        other = tmp_path / "other.csv"
        other.write_text("m1,m2,m3,cohort\n0,0,0,red\n8,-8,8,blue\n", encoding="utf-8")
        pred = tmp_path / "pred.json"
        assert run(["predict", "--model", model, "--data", other, "--out", pred]) == 0
        doc = read_json(pred)
        assert "accuracy" not in doc
        assert doc["predictions"] == ["low", "high"]


class TestExperimentCommand:
    def test_small_experiment_report(self, tmp_path):
        out = tmp_path / "report.json"
        args = ["experiment", "--seed", 3, "--n", 10, "--m", 10, "--p", 12,
                "--shift-count", 2, "--folds", 3, "--out", out]
        assert run(args) == 0
        doc = read_json(out)
        assert len(doc["rows"]) == 10

    def test_byte_identical_reports(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["experiment", "--seed", 3, "--n", 10, "--m", 10, "--p", 12,
                "--shift-count", 2, "--folds", 3]
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSmallCommands:
    def test_quantize_demo(self, tmp_path):
        out = tmp_path / "q.json"
        assert run(["quantize-demo", "--sigma2", 1.0, "--delta2", 1.0, "--n", 10,
                    "--p", 5, "--reps", 2000, "--seed", 4, "--out", out]) == 0
        doc = read_json(out)
        assert doc["mse_posterior"] < doc["mse_naive"]
        assert doc["replications"] == 2000
        assert doc["seed"] == 4

    def test_bayes_scalar_form(self, capsys):
        assert run(["bayes", "--xbar", "1,2,3", "--n", 4, "--theta", "0,0,0", "--c", 1.0]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["shrinkage_weight"] == pytest.approx(0.2)
        assert doc["mean"] == pytest.approx([0.8, 1.6, 2.4])

    def test_bayes_full_matrix_form(self, tmp_path, capsys):
        sigma = tmp_path / "sigma.csv"
        sigma.write_text("a,b\n1,0\n0,1\n", encoding="utf-8")
        prior = tmp_path / "prior.csv"
        prior.write_text("a,b\n1,0\n0,1\n", encoding="utf-8")
        assert run(["bayes", "--xbar", "2,0", "--n", 1, "--theta", "0,0",
                    "--sigma-csv", sigma, "--prior-cov-csv", prior]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["mean"] == pytest.approx([1.0, 0.0])
        assert doc["weight_kind"] == "matrix"

    def test_bench_report(self, tmp_path):
        out = tmp_path / "bench.json"
        assert run(["bench", "--sizes", "40x20", "--reps", 2, "--seed", 1, "--out", out]) == 0
        doc = read_json(out)
        row = doc["results"][0]
        assert row["p"] == 40 and row["n"] == 20
        assert row["cholesky_median_s"] > 0
        assert row["svd_median_s"] > 0
        assert row["svd_over_cholesky"] is not None

    def test_bench_instance_stream_deterministic(self):
        import numpy as np

        from rlda.cli import _bench_instance

        streams = []
        for _ in range(2):
            rng = np.random.default_rng(np.random.SeedSequence((1, 40, 20, 0)))
            data, queries = _bench_instance(rng, 40, 20)
            streams.append((data.values.copy(), queries.copy()))
        assert np.array_equal(streams[0][0], streams[1][0])
        assert np.array_equal(streams[0][1], streams[1][1])


class TestErrors:
    def test_predict_without_model_is_usage_error(self):
        assert run(["predict"]) == 2

    def test_unknown_flag(self):
        assert run(["simulate", "--seed", 1, "--data-out", "x.csv", "--bogus"]) == 2

    def test_missing_data_file(self, tmp_path):
        assert run(["cv", "--data", tmp_path / "nope.csv", "--label", "g"]) == 1

    def test_svd_needs_numeric_lambda(self, tmp_path):
        code = run(["fit", "--data", FIXTURE, "--label", "cohort", "--algorithm", "svd",
                    "--lambda", "cv", "--model", tmp_path / "m.json"])
        assert code == 1

    def test_conflicting_label_column(self, tmp_path):
        assert run(["cv", "--data", FIXTURE, "--label", "wrong"]) == 1

    def test_bayes_rejects_conflicting_prior_flags(self, tmp_path):
        sigma = tmp_path / "sigma.csv"
        sigma.write_text("a\n1\n", encoding="utf-8")
        code = run(["bayes", "--xbar", "1", "--n", 2, "--theta", "0",
                    "--c", 1.0, "--sigma-csv", sigma])
        assert code == 2
