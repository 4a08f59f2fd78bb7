"""Command-line contract: rendering, exit codes, determinism."""

import csv
import io
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from splmetrics.cli import main
from splmetrics.ingest import serialize_product_model

from conftest import product_from_names

DATA = Path(__file__).parent / "data" / "cproducts"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def micro_files(tmp_path, micro):
    paths = []
    for product in micro.products:
        path = tmp_path / f"{product.id}.yaml"
        path.write_text(serialize_product_model(product), encoding="utf-8")
        paths.append(str(path))
    return paths


@pytest.fixture
def identical_files(tmp_path):
    paths = []
    for pid in ("left", "right"):
        product = product_from_names(pid, ["a", "b", "c"])
        path = tmp_path / f"{pid}.yaml"
        path.write_text(serialize_product_model(product), encoding="utf-8")
        paths.append(str(path))
    return paths


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestAnalyzeCommand:
    def test_micro_table(self, runner, micro_files):
        result = runner.invoke(main, ["analyze", *micro_files])
        assert result.exit_code == 0
        assert "0.33" in result.stdout and "0.50" in result.stdout
        # n=3 gets the letter legend
        assert "A = shared by all three" in result.stdout
        assert "~p1" in result.stdout
        assert "total clusters" in result.stdout

    def test_single_file_usage_error(self, runner, micro_files):
        result = runner.invoke(main, ["analyze", micro_files[0]])
        assert result.exit_code == 2

    def test_csv_full_precision(self, runner, micro_files):
        result = runner.invoke(
            main, ["analyze", *micro_files, "--format", "csv"])
        assert result.exit_code == 0
        header, rows = parse_csv(result.stdout)
        assert header[0] == "N"
        assert "prr_p1" in header and "ir_p3" in header
        row = dict(zip(header, rows[0]))
        assert float(row["prr_p1"]) == 1 / 3
        assert float(row["ir_p3"]) == 0.5
        assert row["soc_count"] == "3"
        assert float(row["soc_ratio"]) == 3 / 8

    def test_table_and_csv_agree(self, runner, micro_files):
        table = runner.invoke(main, ["analyze", *micro_files]).stdout
        csv_out = runner.invoke(
            main, ["analyze", *micro_files, "--format", "csv"]).stdout
        header, rows = parse_csv(csv_out)
        row = dict(zip(header, rows[0]))
        for key in ("prr_p1", "ir_p1", "ir_p3"):
            assert f"{float(row[key]):.2f}" in table

    def test_structured_payload(self, runner, micro_files):
        result = runner.invoke(
            main, ["analyze", *micro_files, "--format", "structured"])
        payload = json.loads(result.stdout)
        assert payload["model"] == "exact"
        assert payload["soc"]["count"] == 3
        labels = {r["label"]: r for r in payload["regions"]}
        assert labels["A"]["clusters"] == 1
        assert labels["B"]["clusters"] == 1

    def test_parse_failure_exit_1(self, runner, tmp_path, micro_files):
        bad = tmp_path / "bad.yaml"
        bad.write_text("format_version: '1'\nproduct: {id: x\n")
        result = runner.invoke(main, ["analyze", micro_files[0], str(bad)])
        assert result.exit_code == 1
        assert "bad.yaml" in result.stderr

    def test_gradual_threshold_flags(self, runner, micro_files):
        result = runner.invoke(main, [
            "analyze", *micro_files, "--model", "gradual",
            "--threshold", "0.5", "--w-sig", "0.25", "--w-beh", "0.75"])
        assert result.exit_code == 0

    def test_bad_weights_usage_error(self, runner, micro_files):
        result = runner.invoke(main, [
            "analyze", *micro_files, "--model", "gradual",
            "--w-sig", "0.9", "--w-beh", "0.9"])
        assert result.exit_code == 2

    def test_bad_threshold_usage_error(self, runner, micro_files):
        result = runner.invoke(
            main, ["analyze", *micro_files, "--threshold", "1.5"])
        assert result.exit_code == 2

    def test_negative_precision_usage_error(self, runner, micro_files):
        result = runner.invoke(
            main, ["analyze", *micro_files, "--precision", "-1"])
        assert result.exit_code == 2

    def test_output_file(self, runner, micro_files, tmp_path):
        target = tmp_path / "report.csv"
        result = runner.invoke(main, [
            "analyze", *micro_files, "--format", "csv", "-o", str(target)])
        assert result.exit_code == 0
        assert target.read_text().startswith("N,")

    def test_precision_flag(self, runner, micro_files):
        result = runner.invoke(
            main, ["analyze", *micro_files, "--precision", "4"])
        assert "0.3333" in result.stdout


class TestSweepCommand:
    def test_default_schedule_14_rows(self, runner, micro_files):
        result = runner.invoke(
            main, ["sweep", *micro_files, "--format", "csv"])
        assert result.exit_code == 0
        _, rows = parse_csv(result.stdout)
        assert len(rows) == 14
        assert rows[0][0] == "0.99"
        assert rows[-1][0] == "0.0"

    def test_identical_products_flat(self, runner, identical_files):
        result = runner.invoke(
            main, ["sweep", *identical_files, "--format", "csv"])
        header, rows = parse_csv(result.stdout)
        for row in rows:
            record = dict(zip(header, row))
            assert float(record["prr_left"]) == 1.0
            assert float(record["prr_right"]) == 1.0
            assert float(record["ir_left"]) == 0.0
            assert float(record["ir_right"]) == 0.0

    def test_crossover_reported(self, runner, identical_files):
        result = runner.invoke(main, ["sweep", *identical_files])
        assert "Crossover thresholds" in result.stdout
        # identical products cross at the top of the schedule
        assert "all products: 0.99" in result.stdout

    def test_crossover_on_stderr_in_csv_mode(self, runner, identical_files):
        result = runner.invoke(
            main, ["sweep", *identical_files, "--format", "csv"])
        assert "Crossover" not in result.stdout
        assert "Crossover" in result.stderr

    def test_custom_schedule(self, runner, micro_files):
        result = runner.invoke(main, [
            "sweep", *micro_files, "--thresholds", "0.9,0.5", "--format", "csv"])
        _, rows = parse_csv(result.stdout)
        assert [r[0] for r in rows] == ["0.9", "0.5"]

    def test_malformed_schedule_usage_error(self, runner, micro_files):
        result = runner.invoke(
            main, ["sweep", *micro_files, "--thresholds", "0.9,zebra"])
        assert result.exit_code == 2

    def test_duplicate_schedule_usage_error(self, runner, micro_files):
        result = runner.invoke(
            main, ["sweep", *micro_files, "--thresholds", "0.5,0.5"])
        assert result.exit_code == 2

    def test_structured_contains_crossovers(self, runner, identical_files):
        result = runner.invoke(
            main, ["sweep", *identical_files, "--format", "structured"])
        payload = json.loads(result.stdout)
        assert payload["crossovers"]["all_products"] == 0.99
        assert len(payload["rows"]) == 14


class TestMatrixCommand:
    def test_two_singleton_products(self, runner, tmp_path):
        paths = []
        for pid in ("p1", "p2"):
            product = product_from_names(pid, ["a"])
            path = tmp_path / f"{pid}.yaml"
            path.write_text(serialize_product_model(product))
            paths.append(str(path))
        result = runner.invoke(
            main, ["matrix", *paths, "--format", "csv"])
        header, rows = parse_csv(result.stdout)
        assert header == ["product_a", "component_a", "product_b",
                          "component_b", "similarity"]
        assert len(rows) == 1
        assert rows[0][:4] == ["p1", "a", "p2", "a"]

    def test_spot_value(self, runner, tmp_path):
        specs = {"p1": ["t1", "t2", "t3", "t4"], "p2": ["t1", "t2", "t3", "t5"]}
        paths = []
        for pid, tokens in specs.items():
            text = (
                "format_version: '1'\n"
                f"product: {{id: {pid}}}\n"
                "components:\n"
                f"- {{id: c, kind: function, tokens: {tokens}}}\n"
            )
            path = tmp_path / f"{pid}.yaml"
            path.write_text(text)
            paths.append(str(path))
        result = runner.invoke(main, ["matrix", *paths, "--format", "csv"])
        _, rows = parse_csv(result.stdout)
        assert float(rows[0][4]) == 0.8

    def test_include_self(self, runner, micro_files):
        base = runner.invoke(
            main, ["matrix", *micro_files, "--format", "csv"])
        expanded = runner.invoke(main, [
            "matrix", *micro_files, "--include-self", "--format", "csv"])
        _, base_rows = parse_csv(base.stdout)
        _, all_rows = parse_csv(expanded.stdout)
        # 8 components: 21 cross-product pairs vs all 36 unordered pairs
        assert len(base_rows) == 21
        assert len(all_rows) == 36

    def test_stable_ordering(self, runner, micro_files):
        a = runner.invoke(main, ["matrix", *micro_files, "--format", "csv"])
        b = runner.invoke(main, ["matrix", *micro_files, "--format", "csv"])
        assert a.stdout == b.stdout


class TestExtractCommand:
    def test_two_function_file(self, runner, tmp_path):
        src = tmp_path / "src"
        src.mkdir()
        (src / "m.c").write_text(
            "int f(int a) { return a; }\nint g(int b) { return b; }\n")
        result = runner.invoke(
            main, ["extract", str(src), "--id", "demo"])
        assert result.exit_code == 0
        assert result.stdout.count("kind: function") == 2

    def test_reextraction_byte_identical(self, runner, tmp_path):
        out1 = tmp_path / "one.yaml"
        out2 = tmp_path / "two.yaml"
        for out in (out1, out2):
            result = runner.invoke(main, [
                "extract", str(DATA / "alpha"), "--id", "alpha",
                "-o", str(out)])
            assert result.exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_empty_dir_exit_1(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(main, ["extract", str(empty), "--id", "x"])
        assert result.exit_code == 1
        assert "no functions" in result.stderr

    def test_extensions_flag(self, runner, tmp_path):
        src = tmp_path / "src"
        src.mkdir()
        (src / "a.cxx").write_text("int f(void) { return 1; }\n")
        failing = runner.invoke(main, ["extract", str(src), "--id", "x"])
        assert failing.exit_code == 1
        result = runner.invoke(main, [
            "extract", str(src), "--id", "x", "--extensions", ".cxx"])
        assert result.exit_code == 0


class TestReproducibility:
    def test_analyze_byte_identical_across_workers(self, runner, micro_files):
        outputs = set()
        for workers in ("1", "2", "4"):
            result = runner.invoke(main, [
                "analyze", *micro_files, "--format", "csv",
                "--workers", workers])
            assert result.exit_code == 0
            outputs.add(result.stdout)
        assert len(outputs) == 1

    def test_fixture_pipeline_table(self, runner, tmp_path):
        models = []
        for pid in ("alpha", "beta", "gamma"):
            out = tmp_path / f"{pid}.yaml"
            result = runner.invoke(main, [
                "extract", str(DATA / pid), "--id", pid, "-o", str(out)])
            assert result.exit_code == 0
            models.append(str(out))
        result = runner.invoke(main, ["analyze", *models])
        assert result.exit_code == 0
        assert "A = shared by all three" in result.stdout
