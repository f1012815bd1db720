"""
Tests de l'interface en ligne de commande : sorties et codes de retour.
"""

import json

import pytest

from src.graded_sheaf_kit.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, join_window_values, main, resolve_file
from src.graded_sheaf_kit.errors import DescriptionError


def run_cli(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    return info.value.code


@pytest.mark.unit
class TestResolveFile:
    """Tests de la résolution des noms de fixtures."""

    def test_fixture_name(self):
        assert resolve_file("line3").name == "line3.gsk"
        assert resolve_file("line3.gsk").name == "line3.gsk"

    def test_unknown(self):
        with pytest.raises(DescriptionError):
            resolve_file("introuvable")

    def test_window_value_is_joined(self):
        """Une fenêtre négative suit --degree-window sans être lue comme option."""
        argv = ["compute", "dual", "k", "--degree-window", "-2..3", "--json"]
        assert join_window_values(argv) == ["compute", "dual", "k", "--degree-window=-2..3", "--json"]
        assert join_window_values(["check", "--degree-window"]) == ["check", "--degree-window"]


@pytest.mark.integration
class TestValidate:
    """Tests de graded-sheaf validate."""

    def test_clean_fixture(self, capsys):
        assert run_cli(["validate", "line3"]) == EXIT_OK
        output = capsys.readouterr().out
        assert "validate workspace" in output
        assert "✅ Succès" in output

    def test_order_cycle(self, tmp_path, capsys):
        path = tmp_path / "cycle.gsk"
        path.write_text("space X\npoint a\npoint b\ncover a b\ncover b a\n", encoding="utf-8")
        assert run_cli(["validate", str(path), "--json"]) == EXIT_FAILURE
        data = json.loads(capsys.readouterr().out)
        assert data["passed"] is False
        assert "ORDER_CYCLE" in {d["code"] for d in data["diagnostics"]}

    def test_syntax_error(self, tmp_path, capsys):
        path = tmp_path / "bad.gsk"
        path.write_text("space X\nbogus\n", encoding="utf-8")
        assert run_cli(["validate", str(path)]) == EXIT_USAGE
        assert "bad.gsk:2" in capsys.readouterr().err

    def test_missing_file(self):
        assert run_cli(["validate", "introuvable"]) == EXIT_USAGE

    def test_file_flag(self, capsys):
        """validate accepte -f comme compute, seul ou avec des fichiers positionnels."""
        assert run_cli(["validate", "-f", "line3", "-f", "sierpinski"]) == EXIT_OK
        assert run_cli(["validate", "pt", "-f", "pseudo_circle"]) == EXIT_OK
        assert "✅ Succès" in capsys.readouterr().out

    def test_no_file(self):
        assert run_cli(["validate"]) == EXIT_USAGE


@pytest.mark.integration
class TestCompute:
    """Tests de graded-sheaf compute."""

    def test_sections(self, capsys):
        assert run_cli(["compute", "sections", "k", "-f", "line3", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["kind"] == "sections"
        assert sum(row["rank"] for row in data["table"]) == 1

    def test_sections_on_open(self, capsys):
        assert run_cli(["compute", "sections", "k", "u-,u+", "-f", "line3", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert sum(row["rank"] for row in data["table"]) == 2

    def test_stalk(self, capsys):
        assert run_cli(["compute", "stalk", "sky", "c", "-f", "line3"]) == EXIT_OK
        assert "sky_c" in capsys.readouterr().out

    def test_pushforward(self, capsys):
        assert run_cli(["compute", "pushforward", "j", "F", "-f", "line3", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert sum(row["rank"] for row in data["table"] if row["point"] == "c") == 6

    def test_cohomology(self, capsys):
        assert run_cli(["compute", "cohomology", "k", "-f", "pseudo_circle", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert sorted(row["n"] for row in data["table"]) == [0, 1]

    def test_infinite_support(self, capsys):
        assert run_cli(["compute", "pushforward", "j", "F", "-f", "line3_z"]) == EXIT_FAILURE
        assert "Erreur" in capsys.readouterr().err

    def test_window(self, capsys):
        argv = ["compute", "pushforward", "j", "F", "-f", "line3_z", "--degree-window", "-1..1", "--json"]
        assert run_cli(argv) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert "fenêtre de degrés -1..1" in data["notes"]

    def test_window_with_equals(self, capsys):
        argv = ["compute", "pushforward", "j", "F", "-f", "line3_z", "--degree-window=-2..3", "--json"]
        assert run_cli(argv) == EXIT_OK
        assert "fenêtre de degrés -2..3" in json.loads(capsys.readouterr().out)["notes"]

    @pytest.mark.parametrize("argv", [
        ["compute", "sections", "inconnu", "-f", "line3"],
        ["compute", "stalk", "k", "z", "-f", "line3"],
        ["compute", "pushforward", "F", "k", "-f", "line3"],
        ["compute", "shriek", "j", "-f", "line3"],
    ])
    def test_usage_errors(self, argv):
        assert run_cli(argv) == EXIT_USAGE

    def test_unknown_kind(self):
        assert run_cli(["compute", "volume", "k", "-f", "line3"]) == EXIT_USAGE


@pytest.mark.integration
class TestCheck:
    """Tests de graded-sheaf check."""

    def test_triangle(self, capsys):
        assert run_cli(["check", "triangle", "--count", "2", "--seed", "3"]) == EXIT_OK
        assert "basic-triangle" in capsys.readouterr().out

    def test_inject_fault(self, capsys):
        argv = ["check", "triangle", "--count", "5", "--seed", "3", "--inject-fault", "--json"]
        assert run_cli(argv) == EXIT_FAILURE
        data = json.loads(capsys.readouterr().out)
        assert data["passed"] is False
        assert "⚠️ défaut injecté" in data["notes"]

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "suite.yaml"
        path.write_text("check:\n  seed: 4\n  count: 1\n  gradings: ['0']\n", encoding="utf-8")
        assert run_cli(["check", "triangle", "--config", str(path)]) == EXIT_OK
        assert "graine 4, 1 instances" in capsys.readouterr().out
