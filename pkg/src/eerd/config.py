"""TOML run configuration.

Sections and keys (defaults in brackets)::

    [model]       sigma ("log" | "power"), a [1], alpha [0.5], b [1], beta [0.25],
                  rate ("constant" | "srh"), F0 [1], k1 [1], k2 [0], k3 [0]
    [domain]      L [1], N [256], eps [1] (scalar or per-cell list), eps_amplitude [0]
    [bounds]      c_theta, C_u                    (both required)
    [simulation]  t_end, t_end_rates [20], dt_init [1e-3], cfl [0.2],
                  sample_every [300], positivity_floor, steady_tol [1e-9],
                  E0 [1], amplitude [0.2], seed [0], initial_csv
    [verify]      states [1000], seed [0], margin [1.1], amplitude [0.3], N [128]
    [output]      out_dir ["out"], formats [["csv", "json", "svg"]]

``[model]``, ``[domain]`` and ``[bounds]`` must be present.  A scalar
``eps`` gives the cell permittivity ``eps * (1 + eps_amplitude * cos(pi x / L))``;
a list gives one value per cell (repeated piecewise on refined meshes).  Without an
explicit ``t_end`` the run length is ``t_end_rates / rate`` with the
predicted decay rate of the scenario.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .grid import Grid
from .model import SRH, ConstantRate, LogEntropy, ModelFunctions, PowerEntropy, PowerWeight, hypothesis_constants
from .state import Bounds

_SCHEMA = {
    "model": {
        "sigma": "log", "a": 1.0, "alpha": 0.5, "b": 1.0, "beta": 0.25,
        "rate": "constant", "F0": 1.0, "k1": 1.0, "k2": 0.0, "k3": 0.0,
    },
    "domain": {"L": 1.0, "N": 256, "eps": 1.0, "eps_amplitude": 0.0},
    "bounds": {"c_theta": None, "C_u": None},
    "simulation": {
        "t_end": None, "t_end_rates": 20.0, "dt_init": 1e-3, "cfl": 0.2, "sample_every": 300,
        "positivity_floor": None, "steady_tol": 1e-9, "E0": 1.0, "amplitude": 0.2, "seed": 0,
        "initial_csv": None,
    },
    "verify": {"states": 1000, "seed": 0, "margin": 1.1, "amplitude": 0.3, "N": 128},
    "output": {"out_dir": "out", "formats": ["csv", "json", "svg"]},
}
_REQUIRED_SECTIONS = ("model", "domain", "bounds")
_FORMATS = {"csv", "json", "svg"}


@dataclass
class RunConfig:
    name: str
    model: ModelFunctions
    bounds: Bounds
    domain: dict
    simulation: dict
    verify: dict
    output: dict
    source: Optional[str] = None
    raw_model: dict = field(default_factory=dict)

    def make_grid(self, N: Optional[int] = None) -> Grid:
        d = self.domain
        N = int(d["N"] if N is None else N)
        L = d["L"]
        if isinstance(d["eps"], list):
            eps = np.asarray(d["eps"], dtype=float)
            if eps.size != N:
                # per-cell values are given on the configured mesh; refine piecewise
                if N % eps.size:
                    raise ConfigError(f"cannot map {eps.size} permittivity values onto {N} cells")
                eps = np.repeat(eps, N // eps.size)
            return Grid(L, N, eps)
        x = (np.arange(N) + 0.5) * L / N
        eps = d["eps"] * (1.0 + d["eps_amplitude"] * np.cos(np.pi * x / L))
        return Grid(L, N, eps)

    @property
    def grid(self) -> Grid:
        return self.make_grid()

    @property
    def verify_grid(self) -> Grid:
        return self.make_grid(self.verify["N"])

    @property
    def E0(self) -> float:
        return float(self.simulation["E0"])

    @property
    def verify_amplitude(self) -> float:
        return float(self.verify["amplitude"])

    def to_dict(self) -> dict:
        """All sections with defaults filled in, in TOML key order."""
        return {
            "name": self.name,
            "model": dict(self.raw_model),
            "domain": dict(self.domain),
            "bounds": asdict(self.bounds),
            "simulation": dict(self.simulation),
            "verify": dict(self.verify),
            "output": dict(self.output),
        }


def _build_model(sec: dict) -> ModelFunctions:
    if sec["sigma"] == "log":
        sigma = LogEntropy(sec["a"])
    elif sec["sigma"] == "power":
        sigma = PowerEntropy(sec["a"], sec["alpha"])
    else:
        raise ConfigError(f"[model] sigma must be 'log' or 'power', got {sec['sigma']!r}")
    weight = PowerWeight(sec["b"], sec["beta"])
    if sec["rate"] == "constant":
        rate = ConstantRate(sec["F0"])
    elif sec["rate"] == "srh":
        rate = SRH(sec["k1"], sec["k2"], sec["k3"])
    else:
        raise ConfigError(f"[model] rate must be 'constant' or 'srh', got {sec['rate']!r}")
    return ModelFunctions(sigma, weight, rate)


def config_from_dict(data: dict, name: str = "config", source: Optional[str] = None) -> RunConfig:
    """Validate a parsed TOML document and fill in defaults.

    Raises
    ------
    ConfigError
        On missing sections, unknown sections or keys, or invalid values.
    HypothesisViolation
        If the weight exponent violates ``beta < 1/3``.
    """
    where = f"{source}: " if source else ""
    unknown = set(data) - set(_SCHEMA) - {"name"}
    if unknown:
        raise ConfigError(f"{where}unknown section(s): {', '.join(sorted(unknown))}")
    for sec in _REQUIRED_SECTIONS:
        if sec not in data:
            raise ConfigError(f"{where}missing required section [{sec}]")
    merged = {}
    for sec, defaults in _SCHEMA.items():
        given = data.get(sec, {})
        if not isinstance(given, dict):
            raise ConfigError(f"{where}[{sec}] must be a table")
        bad = set(given) - set(defaults)
        if bad:
            raise ConfigError(f"{where}unknown key(s) in [{sec}]: {', '.join(sorted(bad))}")
        vals = dict(defaults)
        vals.update(given)
        for key, v in vals.items():
            if v is None and defaults[key] is None and sec == "bounds":
                raise ConfigError(f"{where}[bounds] {key} is required")
        merged[sec] = vals

    try:
        model = _build_model(merged["model"])
        bounds = Bounds(float(merged["bounds"]["c_theta"]), float(merged["bounds"]["C_u"]))
        d = merged["domain"]
        d["N"] = int(d["N"])
        if isinstance(d["eps"], list):
            if d["eps_amplitude"] != 0:
                raise ConfigError("[domain] eps_amplitude applies to a scalar eps only")
            Grid(float(d["L"]), d["N"], d["eps"])
        else:
            Grid(float(d["L"]), d["N"], 1.0)
            if not d["eps"] > 0 or not 0 <= d["eps_amplitude"] < 1:
                raise ConfigError("[domain] needs eps > 0 and 0 <= eps_amplitude < 1")
        sim = merged["simulation"]
        for key in ("dt_init", "E0"):
            if not sim[key] > 0:
                raise ConfigError(f"[simulation] {key} must be positive")
        if not 0 < sim["cfl"] < 1:
            raise ConfigError("[simulation] cfl must lie in (0, 1)")
        if int(sim["sample_every"]) != sim["sample_every"] or sim["sample_every"] < 1:
            raise ConfigError("[simulation] sample_every must be a positive integer")
        if not 0 <= sim["amplitude"] < 1:
            raise ConfigError("[simulation] amplitude must lie in [0, 1)")
        ver = merged["verify"]
        if int(ver["states"]) != ver["states"] or ver["states"] < 0:
            raise ConfigError("[verify] states must be a nonnegative integer")
        if not ver["margin"] > 0 or not 0 <= ver["amplitude"] < 1:
            raise ConfigError("[verify] needs margin > 0 and 0 <= amplitude < 1")
        out = merged["output"]
        fmts = list(out["formats"])
        if set(fmts) - _FORMATS:
            raise ConfigError(f"[output] formats must be a subset of {sorted(_FORMATS)}")
        out["formats"] = fmts
    except ConfigError as exc:
        raise ConfigError(f"{where}{exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}{exc}") from exc

    # surfaces beta >= 1/3 at validation time; c_u only matters for G_sigma
    hypothesis_constants(model, bounds.c_u(model))
    return RunConfig(
        name=str(data.get("name", name)),
        model=model,
        bounds=bounds,
        domain=d,
        simulation=sim,
        verify=ver,
        output=out,
        source=source,
        raw_model=merged["model"],
    )


def parse_config(path) -> RunConfig:
    """Read and validate a TOML configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data, name=path.stem, source=str(path))
