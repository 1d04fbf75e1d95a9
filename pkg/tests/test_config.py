import pytest

from fo2_trees.checks import ConfigError
from fo2_trees.config_path import CONFIG_PATH, PACKAGE_ROOT, load_config
from fo2_trees.gf2 import Gf2Settings
from fo2_trees.solver import Phase, SolverSettings


def test_repository_config_loads():
    assert CONFIG_PATH.parent == PACKAGE_ROOT / "configs"
    config = load_config()
    settings = SolverSettings.from_config(config["solver"])
    assert settings.search_budget == 200_000
    assert settings.phases[0] == Phase(1, 2, 1)
    assert len(settings.phases) == 4
    assert Gf2Settings.from_config(config["gf2"]) == Gf2Settings(search_budget=500_000, max_depth=64)
    assert config["oracle"]["max_nodes"] == 6


def test_missing_config(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "config.yaml")


def test_missing_section(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("solver:\n  search_budget: 5\n  max_extended_predicates: 3\n  phases: []\n")
    with pytest.raises(ConfigError, match="'gf2'"):
        load_config(path)


def test_missing_key(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("solver:\n  search_budget: 5\n")
    with pytest.raises(ConfigError, match="max_extended_predicates"):
        load_config(path, required={"solver": {"search_budget", "max_extended_predicates"}})


def test_empty_file_is_an_empty_mapping(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("")
    assert load_config(path, required={}) == {}
    with pytest.raises(ConfigError):
        load_config(path)


def test_empty_phases_fall_back_to_the_defaults():
    assert SolverSettings.from_config({"phases": []}).phases == SolverSettings().phases
