"""
Tests du format texte (.gsk) et des rapports.
"""

import json

import pytest

from src.graded_sheaf_kit.core.reports import Certificate, TABLE_COLUMNS, invariant_table
from src.graded_sheaf_kit.core.sections import global_sections
from src.graded_sheaf_kit.domain.diagnostics import Diagnostic
from src.graded_sheaf_kit.errors import DescriptionError
from src.graded_sheaf_kit.io.export import Report, module_table, reports_json
from src.graded_sheaf_kit.io.text_format import (
    dump_workspace,
    load_workspace,
    parse_matrix,
    parse_text,
    serialize,
    tokenize,
    workspace_signature,
)

FIXTURE_NAMES = ["pt", "line3", "line3_z", "sierpinski", "pseudo_circle", "line3_ringed"]

CYCLE = """
space X
point a
point b
cover a b
cover b a
"""

MISMATCH = """
space S
point c
point o
cover c o

sheaf F on S over F2
stalkmod c [] k^2
stalkmod o [] k
res c o [] [[1]]
"""


@pytest.mark.unit
class TestParsing:
    """Tests de lecture des descriptions."""

    def test_tokenize_keeps_brackets(self):
        assert tokenize("res c o [0] [[1, 0]]  # commentaire") == ["res", "c", "o", "[0]", "[[1, 0]]"]

    def test_parse_matrix(self):
        assert parse_matrix("[[1,2],[3,4]]").shape == (2, 2)
        assert parse_matrix("[]").size == 0
        with pytest.raises(ValueError):
            parse_matrix("[[1,2],[3]]")

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_fixtures_are_clean(self, fixtures_path, name):
        workspace = load_workspace([fixtures_path / f"{name}.gsk"])
        assert workspace.is_clean, [str(d) for d in workspace.diagnostics]

    def test_every_shipped_description_loads(self, fixtures_path):
        paths = sorted(fixtures_path.glob("*.gsk"))
        assert len(paths) == len(FIXTURE_NAMES)
        for path in paths:
            workspace = load_workspace([path])
            assert workspace.is_clean, (path.name, [str(d) for d in workspace.diagnostics])

    def test_lambda_and_send_records(self):
        workspace = parse_text(
            "space X\npoint c\npoint o\ncover c o\nlambda c Z/3\n\n"
            "space Y\npoint c\nlambda c Z/3\n\n"
            "map i Y X\nsend c c [[1]]\n"
        )
        assert workspace.is_clean, [str(d) for d in workspace.diagnostics]
        assert workspace.spaces["X"].lambdas["c"].label == "Z/3"
        assert workspace.maps["i"]("c") == "c"

    def test_ill_defined_lambda_restriction(self):
        """Λ_c = Z/2 → Λ_o = Z/3, 1 ↦ 1 est relevé comme diagnostic."""
        workspace = parse_text("space X\npoint c\npoint o\ncover c o\nlambda c Z/2\nlambda o Z/3\nlres c o [[1]]\n")
        assert "BAD_LAMBDA_RESTRICTION" in {d.code for d in workspace.diagnostics}

    def test_line3_objects(self, line3):
        assert set(line3.spaces) == {"LINE3", "U", "PT"}
        assert set(line3.sheaves) == {"F", "k", "sky"}
        assert set(line3.maps) == {"j", "p"}
        assert line3.lookup("sky") is line3.sheaves["sky"]

    def test_order_cycle(self):
        workspace = parse_text(CYCLE)
        assert not workspace.is_clean
        assert "ORDER_CYCLE" in {d.code for d in workspace.diagnostics}
        assert "X" not in workspace.spaces

    def test_degree_mismatch(self):
        workspace = parse_text(MISMATCH)
        assert "DEGREE_MISMATCH" in {d.code for d in workspace.diagnostics}
        assert "F" not in workspace.sheaves

    def test_unknown_record_has_line_number(self):
        with pytest.raises(DescriptionError) as info:
            parse_text("space X\npoint a\nbogus a\n", "bad.gsk")
        assert info.value.line_number == 3
        assert "bad.gsk:3" in str(info.value)

    def test_unknown_reference(self):
        with pytest.raises(DescriptionError) as info:
            parse_text("sheaf F on NOWHERE over F2\n")
        assert info.value.line_number == 1

    def test_duplicate_name(self):
        with pytest.raises(DescriptionError):
            parse_text("space X\npoint a\n\nspace X\npoint b\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DescriptionError):
            load_workspace([tmp_path / "absent.gsk"])


@pytest.mark.unit
class TestWriting:
    """Tests d'écriture : relire une description écrite redonne le même Workspace."""

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_round_trip(self, fixtures_path, name):
        workspace = load_workspace([fixtures_path / f"{name}.gsk"])
        again = parse_text(serialize(workspace))
        assert again.is_clean
        assert workspace_signature(again) == workspace_signature(workspace)

    def test_dump(self, line3, tmp_path):
        path = dump_workspace(line3, tmp_path / "copie.gsk")
        assert workspace_signature(load_workspace([path])) == workspace_signature(line3)


@pytest.mark.unit
class TestReports:
    """Tests des rapports texte et JSON."""

    def test_module_table(self, line3):
        table = module_table(global_sections(line3.sheaves["k"]))
        assert list(table.columns) == TABLE_COLUMNS
        assert int(table["rank"].sum()) == 1

    def test_json_is_stable(self, line3):
        report = Report("compute", "stalk", "k_c", invariant_table(line3.sheaves["k"]))
        data = json.loads(report.to_json())
        assert list(data) == ["command", "kind", "subject", "passed", "table"]
        assert data["passed"] is True
        assert {row["point"] for row in data["table"]} == {"c", "u-", "u+"}
        assert report.to_json() == report.to_json()

    def test_failed_certificate(self):
        certificate = Certificate("adjunction").fail("triangle non commutatif")
        report = Report("check", "adjunction", certificates=[certificate])
        assert not report.passed
        data = json.loads(report.to_json())
        assert data["summary"] == [{"law": "adjunction", "instances": 1, "passed": 0, "failed": 1}]
        assert "❌ Échec" in report.to_text()

    def test_error_diagnostic_fails(self):
        report = Report("validate", "workspace", diagnostics=[Diagnostic("ORDER_CYCLE", "X", "cycle")])
        assert not report.passed
        assert "[ORDER_CYCLE]" in report.to_text()

    def test_several_reports(self):
        reports = [Report("check", "a"), Report("check", "b", certificates=[Certificate("b").fail("x")])]
        data = json.loads(reports_json(reports))
        assert data["passed"] is False
        assert [r["kind"] for r in data["reports"]] == ["a", "b"]

    def test_write(self, tmp_path):
        path = Report("check", "a").write(tmp_path / "out" / "rapport.json")
        assert json.loads(path.read_text(encoding="utf-8"))["kind"] == "a"
