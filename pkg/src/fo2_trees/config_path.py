from pathlib import Path
from typing import Any

import yaml

from fo2_trees.checks import validate_config

# This file lives at: <repo>/src/fo2_trees/config_path.py
# Go to <repo> which is 2 levels up.
PACKAGE_ROOT = Path(__file__).resolve().parents[2]

CONFIG_PATH = PACKAGE_ROOT / "configs" / "config.yaml"

REQUIRED = {
    "solver": {"search_budget", "max_extended_predicates", "phases"},
    "gf2": {"search_budget"},
    "oracle": {"max_nodes"},
}


def load_config(path: str | Path = CONFIG_PATH, required: dict[str, set[str]] | None = None) -> dict[str, Any]:
    """
    # Read the YAML configuration and check its sections.

        Raises FileNotFoundError() if the file does not exist and
        ConfigError() if a required section or key is missing.

    Parameters
    ----------
    > path : string or Path object

    >> default : <repo>/configs/config.yaml

    > required : dictionary of section name -> set of key names

    >> default : the solver, gf2 and oracle sections

    Returns
    -------
    > dictionary

    Example
    -------
    > path = CONFIG_PATH

        return

            {'solver': {'search_budget': 200000, ...}, 'gf2': {...}, ...}
    #
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(
            f"Config file not found at {path}. "
            "Create <repo>/configs/config.yaml to run the solvers with their defaults"
        )
    with path.open("r") as f:
        config = yaml.safe_load(f) or {}

    validate_config(config, REQUIRED if required is None else required)
    return config
