"""
Tests des réglages YAML des suites de lois.
"""

import pytest
import yaml

from src.graded_sheaf_kit.algebra.grading import DegreeWindow, GradingGroup
from src.graded_sheaf_kit.io.config import DEFAULT_SETTINGS_PATH, KitSettings, load_settings, settings_from_dict


@pytest.mark.unit
class TestKitSettings:
    """Tests de KitSettings."""

    def test_default_file(self):
        settings = load_settings()
        assert DEFAULT_SETTINGS_PATH.exists()
        assert settings.seed == 1
        assert settings.count == 25
        assert settings.max_points == 4
        assert settings.base_field.label == "F2"
        assert settings.window is None
        assert GradingGroup.cyclic(3) in settings.gradings

    def test_overridden_ignores_none(self):
        settings = KitSettings().overridden(seed=7, count=None)
        assert settings.seed == 7
        assert settings.count == 25

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            KitSettings(count=0)
        with pytest.raises(ValueError):
            KitSettings(gradings=())

    def test_from_dict(self):
        settings = settings_from_dict({"seed": 3, "field": "F3", "gradings": ["Z/2"], "window": "-1..1"})
        assert settings.base_field.label == "F3"
        assert settings.gradings == (GradingGroup.cyclic(2),)
        assert settings.window == DegreeWindow.parse("-1..1")
        assert settings.to_dict()["window"] == "-1..1"

    @pytest.mark.parametrize("data", [{"colour": "bleu"}, {"field": "Z"}, {"field": "Z/4"}, {"window": "3"}])
    def test_rejected(self, data):
        with pytest.raises(ValueError):
            settings_from_dict(data)

    def test_load_file(self, tmp_path):
        path = tmp_path / "suite.yaml"
        path.write_text(yaml.safe_dump({"check": {"seed": 11, "count": 2, "max_points": 3}}), encoding="utf-8")
        settings = load_settings(path)
        assert (settings.seed, settings.count, settings.max_points) == (11, 2, 3)

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "cassé.yaml"
        path.write_text("check: [1, 2\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_settings(path)
        with pytest.raises(ValueError):
            load_settings(tmp_path / "absent.yaml")
