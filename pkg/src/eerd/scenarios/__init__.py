"""Built-in scenario configurations shipped with the package.

``reference``
    Logarithmic thermal entropy, constant reaction rate, uniform permittivity.
``power_srh``
    Power-law thermal entropy with Shockley-Read-Hall recombination.
``heterogeneous``
    Logarithmic thermal entropy with a spatially varying permittivity.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

NAMES = ("reference", "power_srh", "heterogeneous")


def scenario_path(name: str) -> Path:
    if name not in NAMES:
        raise KeyError(f"unknown built-in scenario {name!r}; choose from {', '.join(NAMES)}")
    return Path(str(resources.files(__name__).joinpath(f"{name}.toml")))


def load(name: str):
    from ..config import parse_config

    return parse_config(scenario_path(name))


def load_all() -> list:
    return [load(n) for n in NAMES]


def resolve(spec: str):
    """Parse a config given as a file path or a built-in scenario name."""
    from ..config import parse_config

    if spec in NAMES and not Path(spec).exists():
        return load(spec)
    return parse_config(spec)
