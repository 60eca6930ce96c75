"""Tests para los modelos Pydantic de plumbr."""

from pathlib import Path

import pytest
import yaml

from plumbr.corpus import corpus_graph
from plumbr.lattice.blowdown import blowdown_sequence
from plumbr.lattice.chars import canonical_class
from plumbr.lattice.form import IntersectionForm, intersection_form
from plumbr.lattice.graph import PlumbingGraph
from plumbr.lattice.roots import graded_root
from plumbr.schema import (
    SCHEMA_VERSION,
    BlowdownSummary,
    CheckResult,
    GraphDocument,
    GraphSummary,
    RootSummary,
    Settings,
    TraceReport,
    VerifyReport,
)


class TestSettings:
    def test_defaults(self):
        settings = Settings()
        assert settings.budget == 10_000_000
        assert settings.depth is None
        assert settings.subset_cap == 20
        assert settings.chain_margin == 5

    def test_packaged_defaults_match(self):
        """Verifica que defaults.yaml coincide con los valores del modelo."""
        assert Settings.default() == Settings()

    def test_bounds(self):
        with pytest.raises(ValueError):
            Settings(budget=0)
        with pytest.raises(ValueError):
            Settings(subset_cap=31)
        with pytest.raises(ValueError):
            Settings(depth=0)

    def test_yaml_round_trip(self, temp_dir: Path):
        settings = Settings(budget=5000, depth=6, max_level=4)
        path = temp_dir / "settings.yaml"

        settings.to_yaml(path)
        loaded = Settings.from_yaml(path)

        assert loaded == settings
        assert yaml.safe_load(path.read_text())["depth"] == 6

    def test_partial_yaml(self, temp_dir: Path):
        path = temp_dir / "partial.yaml"
        path.write_text("budget: 1234\n")

        settings = Settings.from_yaml(path)

        assert settings.budget == 1234
        assert settings.height_cap == 64


class TestGraphDocument:
    def test_from_graph(self, sigma_graph: PlumbingGraph):
        document = GraphDocument.from_graph(sigma_graph)

        assert [v.name for v in document.vertices] == ["C", "A", "B", "F"]
        assert document.to_graph() == sigma_graph

    def test_invalid_name(self):
        with pytest.raises(ValueError):
            GraphDocument.model_validate({"vertices": [{"name": "a b", "weight": -2}]})

    def test_empty_vertices(self):
        with pytest.raises(ValueError):
            GraphDocument(vertices=[])


class TestCheckResult:
    def test_constructors(self):
        assert CheckResult.ok("x").passed
        assert CheckResult.failed("x", "w").is_failure
        skipped = CheckResult.skipped("x", "too big")
        assert not skipped.passed
        assert not skipped.is_failure
        assert skipped.witness == "too big"

    def test_invalid_status(self):
        with pytest.raises(ValueError):
            CheckResult(name="x", status="maybe")


class TestSummaries:
    """Tests de los informes construidos desde el núcleo."""

    def test_graph_summary(self, sigma_form: IntersectionForm):
        summary = GraphSummary.from_form(sigma_form)

        assert summary.n == 4
        assert summary.det == 1
        assert summary.discriminant_order == 1
        assert summary.invariant_factors == []
        assert summary.k0 == [1, 0, -1, -5]
        assert summary.k0_squared == "-4"

    def test_graph_summary_fraction(self):
        summary = GraphSummary.from_form(intersection_form(corpus_graph("a2")))

        assert summary.k0_squared == "0"
        assert summary.invariant_factors == [3]

    def test_root_summary(self, sigma_form: IntersectionForm):
        root = graded_root(sigma_form, canonical_class(sigma_form))
        summary = RootSummary.from_root(root)

        assert summary.level_counts == {0: 2, 1: 1}
        assert summary.stable_level == 1
        assert summary.complete

    def test_trace_report(self, sigma_form: IntersectionForm):
        report = TraceReport.from_trace(blowdown_sequence(sigma_form))

        assert report.vertices == ["C", "A", "B", "F"]
        assert [[c.vertex for c in r] for r in report.rounds] == [["C"], ["A"], ["B"]]
        assert report.survivors[0].vector == [6, 3, 2, 1]
        assert report.survivor_intersections == []

    def test_verify_report(self, sigma_form: IntersectionForm):
        """Verifica passed, check() y la serialización JSON."""
        root = graded_root(sigma_form, canonical_class(sigma_form))
        report = VerifyReport(
            graph=GraphSummary.from_form(sigma_form),
            root=RootSummary.from_root(root),
            blowdown=BlowdownSummary(rounds=3, d_size=3, s_size=8),
            rational=False,
            height="0",
            checks=[CheckResult.ok("a"), CheckResult.skipped("b", "germ")],
        )

        assert report.passed
        assert report.check("b").status == "skipped"
        loaded = VerifyReport.model_validate_json(report.model_dump_json())
        assert loaded == report
        assert loaded.schema_version == SCHEMA_VERSION

        report.checks.append(CheckResult.failed("c", "boom"))
        assert not report.passed
