"""Tests de la CLI de plumbr."""

from pathlib import Path
from typing import Any, Callable

import pytest
from typer.testing import CliRunner

from plumbr.cli import _decode_graph_text, app
from plumbr.errors import GraphParseError

runner = CliRunner()

JsonOutput = Callable[[str], Any]


class TestValidate:
    def test_file(self, sample_graph_file: Path, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["validate", str(sample_graph_file)])

        assert result.exit_code == 0
        summary = json_output(result.stdout)
        assert summary["det"] == 1
        assert summary["k0"] == [1, 0, -1, -5]

    def test_corpus_reference(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["validate", "@a2"])

        assert result.exit_code == 0
        assert json_output(result.stdout)["invariant_factors"] == [3]

    def test_stdin(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["validate", "-"], input="vertex a -2\n")

        assert result.exit_code == 0
        assert json_output(result.stdout)["det"] == -2

    def test_parse_error_exit_code(self, temp_dir: Path) -> None:
        path = temp_dir / "bad.txt"
        path.write_text("vertex a -2\nnode b\n")

        result = runner.invoke(app, ["validate", str(path)])

        assert result.exit_code == 2

    def test_invalid_utf8_file(self, temp_dir: Path) -> None:
        """Verifica que bytes no UTF-8 son un error de parseo (código 2)."""
        path = temp_dir / "bad.bin"
        path.write_bytes(b"\xff\xfe bad")

        result = runner.invoke(app, ["validate", str(path)])

        assert result.exit_code == 2
        assert not isinstance(result.exception, UnicodeDecodeError)

    def test_invalid_utf8_stdin(self) -> None:
        result = runner.invoke(app, ["verify", "-"], input=b"vertex a -2\n\xff\n")

        assert result.exit_code == 2

    def test_invalid_utf8_position(self) -> None:
        with pytest.raises(GraphParseError) as exc_info:
            _decode_graph_text(b"vertex a -2\nvertex \xff -3\n")

        assert exc_info.value.line == 2
        assert exc_info.value.column == 8
        assert "byte offset 19" in exc_info.value.message

    def test_cycle_exit_code(self) -> None:
        text = "vertex a -2\nvertex b -2\nvertex c -2\nedge a b\nedge b c\nedge c a\n"

        result = runner.invoke(app, ["validate", "-"], input=text)

        assert result.exit_code == 2

    def test_not_definite_exit_code(self) -> None:
        result = runner.invoke(app, ["validate", "-"], input="vertex a 0\n")

        assert result.exit_code == 3

    def test_missing_file(self, temp_dir: Path) -> None:
        result = runner.invoke(app, ["validate", str(temp_dir / "nope.txt")])

        assert result.exit_code == 2

    def test_unknown_corpus_graph(self) -> None:
        result = runner.invoke(app, ["validate", "@nope"])

        assert result.exit_code == 2


class TestRoot:
    def test_root(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["root", "@sigma_2_3_7"])

        assert result.exit_code == 0
        summary = json_output(result.stdout)
        assert summary["stable_level"] == 1
        assert summary["branch_count"] == 1

    def test_other_class_and_dot(self, temp_dir: Path) -> None:
        dot = temp_dir / "root.dot"

        result = runner.invoke(
            app, ["root", "@single_m2", "--class", "2", "--dot", str(dot)]
        )

        assert result.exit_code == 0
        assert dot.read_text().startswith("graph graded_root {")

    def test_invalid_class(self) -> None:
        result = runner.invoke(app, ["root", "@single_m2", "--class", "1"])

        assert result.exit_code == 2

    def test_budget_exit_code(self) -> None:
        result = runner.invoke(app, ["root", "@torus_8_11_surgery"])

        assert result.exit_code == 4


class TestBlowdownCommands:
    def test_blowdown(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["blowdown", "@sigma_2_3_7"])

        assert result.exit_code == 0
        trace = json_output(result.stdout)
        assert [r[0]["vertex"] for r in trace["rounds"]] == ["C", "A", "B"]

    def test_sset(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["sset", "@chain_m1_m2"])

        assert result.exit_code == 0
        report = json_output(result.stdout)
        assert report["s_size"] == report["c0_size"] == 4
        assert report["points"] == [[0, 0], [1, 0], [1, 1], [2, 1]]

    def test_sset_cap(self) -> None:
        result = runner.invoke(app, ["sset", "@chain_m1_m2", "--subset-cap", "1"])

        assert result.exit_code == 4


class TestVerify:
    """Tests del comando verify."""

    def test_rational_graph(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["verify", "@single_m1"])

        assert result.exit_code == 0
        report = json_output(result.stdout)
        assert report["rational"] is True
        assert report["height"] == "inf"

    def test_sigma(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["verify", "@sigma_2_3_7"])

        assert result.exit_code == 0
        report = json_output(result.stdout)
        assert report["rational"] is False
        assert report["height"] == "0"
        assert report["blowdown"]["s_size"] == 8

    def test_depth_too_shallow(self) -> None:
        result = runner.invoke(app, ["verify", "@sigma_2_3_7", "--depth", "1"])

        assert result.exit_code == 2

    def test_config_file(self, temp_dir: Path, json_output: JsonOutput) -> None:
        config = temp_dir / "plumbr.yaml"
        config.write_text("subset_cap: 0\nchain_margin: 3\n")

        result = runner.invoke(app, ["verify", "@chain_m1_m2", "--config", str(config)])

        assert result.exit_code == 0
        report = json_output(result.stdout)
        statuses = {c["name"]: c["status"] for c in report["checks"]}
        assert statuses["s_equals_c0"] == "skipped"


class TestOtherCommands:
    def test_rational(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["rational", "@e8"])

        assert result.exit_code == 0
        report = json_output(result.stdout)
        assert report["rational"] is True
        assert report["psi0_in_im_u"] is True
        assert report["agreement"] is True

    def test_models_check(self, json_output: JsonOutput) -> None:
        result = runner.invoke(app, ["models-check", "@single_m1", "--radius", "3"])

        assert result.exit_code == 0
        report = json_output(result.stdout)
        assert report["window_level"] == 5
        assert report["char_dimension"] == report["l_dimension"] == 3

    def test_models_misaligned(self) -> None:
        result = runner.invoke(app, ["models-check", "@single_m1", "--radius", "0"])

        assert result.exit_code == 2

    def test_export_dot(self, temp_dir: Path) -> None:
        out = temp_dir / "sigma.dot"

        result = runner.invoke(app, ["export-dot", "@sigma_2_3_7", str(out)])

        assert result.exit_code == 0
        assert "v2" in out.read_text()

    def test_corpus_listing(self) -> None:
        result = runner.invoke(app, ["corpus"])

        assert result.exit_code == 0

    def test_corpus_graph_text(self) -> None:
        result = runner.invoke(app, ["corpus", "chain_m1_m2"])

        assert result.exit_code == 0
        assert "vertex v1 -1" in result.stdout
        assert "edge v1 v2" in result.stdout

    def test_random_is_seeded(self, temp_dir: Path) -> None:
        """Verifica que la misma semilla da el mismo grafo y que se puede leer."""
        from plumbr.lattice.graph import parse_graph

        first = runner.invoke(app, ["random", "--seed", "3"])
        second = runner.invoke(app, ["random", "--seed", "3"])

        assert first.exit_code == 0
        assert first.stdout == second.stdout
        assert parse_graph(first.stdout).n >= 3

    def test_random_seed_from_config(self, temp_dir: Path) -> None:
        config = temp_dir / "plumbr.yaml"
        config.write_text("random_seed: 11\n")

        from_config = runner.invoke(app, ["random", "--config", str(config)])
        explicit = runner.invoke(app, ["random", "--seed", "11"])

        assert from_config.exit_code == 0
        assert from_config.stdout == explicit.stdout
