"""Run configuration: solver, skyroad, and supervisor parameters."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError
from .landscape import LandscapeSpec
from .streamfield import SolverConfig
from .supervisor import DEFAULT_CLEAR_PERIOD


@dataclass
class RunConfig:
    """Pipeline parameters; unset skyroad lengths default from the grid spacing."""

    solver: SolverConfig = field(default_factory=SolverConfig)
    n_s: int = 10  # uniform streamline levels per floor
    delta_min_m: float | None = None  # min corridor bandwidth, default 2 * dx
    seg_length_m: float | None = None  # segment length, default dx
    r_v_m: float | None = None  # vertical transition radius, default 1.5 * dx
    n_t: int = DEFAULT_CLEAR_PERIOD
    prune: bool = True  # trim dead-end skyroad tails after edge building

    def __post_init__(self):
        if self.n_s < 2:
            raise ValidationError("config.n_s must be at least 2")
        if self.n_t <= 1:
            raise ValidationError("config.n_t must be greater than 1")
        for name in ("delta_min_m", "seg_length_m", "r_v_m"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValidationError(f"config.{name} must be positive")

    def resolved(self, landscape: LandscapeSpec) -> "RunConfig":
        d = landscape.dx
        return RunConfig(
            solver=self.solver,
            n_s=self.n_s,
            delta_min_m=self.delta_min_m if self.delta_min_m is not None else 2.0 * d,
            seg_length_m=self.seg_length_m if self.seg_length_m is not None else d,
            r_v_m=self.r_v_m if self.r_v_m is not None else 1.5 * d,
            n_t=self.n_t,
            prune=self.prune,
        )

    def to_dict(self) -> dict:
        return {
            "solver": {
                "tolerance": self.solver.tolerance,
                "max_iterations": self.solver.max_iterations,
                "relaxation_omega": self.solver.relaxation_omega,
            },
            "skyroads": {
                "n_s": self.n_s,
                "delta_min_m": self.delta_min_m,
                "seg_length_m": self.seg_length_m,
                "r_v_m": self.r_v_m,
                "prune": self.prune,
            },
            "supervisor": {"N_T": self.n_t},
        }


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ParseError("config: top level must be an object")
    solver_doc = doc.get("solver", {})
    sky = doc.get("skyroads", {})
    sup = doc.get("supervisor", {})
    try:
        return RunConfig(
            solver=SolverConfig(
                tolerance=float(solver_doc.get("tolerance", 1e-6)),
                max_iterations=int(solver_doc.get("max_iterations", 100_000)),
                relaxation_omega=float(solver_doc.get("relaxation_omega", 1.8)),
            ),
            n_s=int(sky.get("n_s", 10)),
            delta_min_m=sky.get("delta_min_m"),
            seg_length_m=sky.get("seg_length_m"),
            r_v_m=sky.get("r_v_m"),
            n_t=int(sup.get("N_T", DEFAULT_CLEAR_PERIOD)),
            prune=bool(sky.get("prune", True)),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"config document malformed: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)
