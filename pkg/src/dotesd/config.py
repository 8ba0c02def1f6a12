"""Run configuration: material, two dot blocks, time grid, and mode flags.

Config files are flat YAML; every physical quantity carries a unit-suffixed
key (a_total_uev, t_max_ns, ...) to keep units explicit. The built-in
defaults encode the identical-dot GaAs setup.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import yaml

from .material import GAAS, DotGeometry, IsotopeSpec, MaterialSpec


class ConfigError(Exception):
    """Invalid or malformed run configuration."""


@dataclass(frozen=True)
class DotConfig:
    """One quantum dot: physical bath plus box-simulation size.

    n_cells is the physical number of unit cells (sets the Overhauser spread
    and the dephasing bath); n_spins is the number of spins used in the exact
    box-model simulation of that bath.
    """

    n_spins: int = 50
    n_cells: int = 1_500_000
    a_total_uev: float = 83.0
    l_perp_nm: float = 20.0
    l_z_nm: float = 2.0
    seed: int = 0

    def geometry(self) -> DotGeometry:
        return DotGeometry(
            l_perp_nm=self.l_perp_nm,
            l_z_nm=self.l_z_nm,
            n_cells=self.n_cells,
            rng_seed=self.seed,
        )


@dataclass(frozen=True)
class GridConfig:
    t_max_ns: float = 100.0
    t_steps: int = 2000
    horizon_ns: float = 100.0


@dataclass(frozen=True)
class RunConfig:
    material: MaterialSpec = GAAS
    dots: tuple[DotConfig, DotConfig] = (DotConfig(seed=1), DotConfig(seed=2))
    grid: GridConfig = GridConfig()
    bell: str = "psi-plus"
    zero_tol: float = 1e-9

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.grid.t_max_ns, self.grid.t_steps)

    def validate(self) -> None:
        if len(self.dots) != 2:
            raise ConfigError("exactly two dot blocks are required")
        if self.grid.t_steps < 2 or self.grid.t_max_ns <= 0:
            raise ConfigError("grid needs t_max_ns > 0 and t_steps >= 2")
        if self.grid.horizon_ns > self.grid.t_max_ns:
            raise ConfigError("horizon_ns cannot exceed t_max_ns")
        for i, dot in enumerate(self.dots):
            if dot.n_spins < 1 or dot.n_cells < 1:
                raise ConfigError(f"dot {i + 1}: n_spins and n_cells must be >= 1")
            if dot.a_total_uev <= 0:
                raise ConfigError(f"dot {i + 1}: a_total_uev must be positive")
            if abs(self.material.mean_a0_per_cell() - dot.a_total_uev) > 0.1:
                raise ConfigError(
                    f"dot {i + 1}: a_total_uev inconsistent with the material "
                    f"isotope table ({self.material.mean_a0_per_cell():.2f} ueV/cell)"
                )


def default_config() -> RunConfig:
    return RunConfig()


def _build_material(node: dict) -> MaterialSpec:
    isotopes = tuple(
        IsotopeSpec(
            name=str(iso["name"]),
            a0_uev=float(iso["a0_uev"]),
            abundance=float(iso["abundance"]),
            sublattice=str(iso["sublattice"]),
            spin=float(iso.get("spin", 1.5)),
        )
        for iso in node["isotopes"]
    )
    return MaterialSpec(
        isotopes=isotopes,
        cell_volume_nm3=float(node.get("cell_volume_nm3", GAAS.cell_volume_nm3)),
        g_factor=float(node.get("g_factor", GAAS.g_factor)),
    )


_DOT_KEYS = {"n_spins", "n_cells", "a_total_uev", "l_perp_nm", "l_z_nm", "seed"}


def _build_dot(node: dict, index: int) -> DotConfig:
    unknown = set(node) - _DOT_KEYS
    if unknown:
        raise ConfigError(f"dot {index + 1}: unknown keys {sorted(unknown)}")
    base = DotConfig(seed=index + 1)
    ints = {k: int(node[k]) for k in ("n_spins", "n_cells", "seed") if k in node}
    floats = {k: float(node[k]) for k in ("a_total_uev", "l_perp_nm", "l_z_nm") if k in node}
    return replace(base, **ints, **floats)


def load_config(path: str) -> RunConfig:
    """Parse a YAML run configuration, filling omitted blocks with defaults."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if raw is None:
        return default_config()
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be a mapping")

    known = {"material", "dots", "grid", "bell", "zero_tol"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    try:
        material = _build_material(raw["material"]) if "material" in raw else GAAS
        if "dots" in raw:
            nodes = raw["dots"]
            if not isinstance(nodes, list) or len(nodes) != 2:
                raise ConfigError("dots must be a list of exactly two blocks")
            dots = (_build_dot(nodes[0], 0), _build_dot(nodes[1], 1))
        else:
            dots = (DotConfig(seed=1), DotConfig(seed=2))
        grid_node = raw.get("grid", {})
        grid = GridConfig(
            t_max_ns=float(grid_node.get("t_max_ns", 100.0)),
            t_steps=int(grid_node.get("t_steps", 2000)),
            horizon_ns=float(grid_node.get("horizon_ns", grid_node.get("t_max_ns", 100.0))),
        )
        config = RunConfig(
            material=material,
            dots=dots,
            grid=grid,
            bell=str(raw.get("bell", "psi-plus")),
            zero_tol=float(raw.get("zero_tol", 1e-9)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    config.validate()
    return config
