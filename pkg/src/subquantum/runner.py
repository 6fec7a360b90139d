"""Run orchestration: compute the requested products of a scenario and write them.

Product to file map (all inside ``out_dir``)::

    density       density.csv, density.ppm
    current       current.csv, current.ppm
    entangling    entangling.csv, entangling.ppm
    trajectories  trajectories.csv
    oracle-diff   oracle_diff.csv
    fdm           fdm_density.csv, fdm_check.csv

Every run also writes ``config.toml`` (the resolved scenario) and
``manifest.txt`` (file names with sha256 checksums). Timings stay in the
returned :class:`RunManifest` and never reach the disk, so repeated runs
are byte-identical.
"""

from __future__ import annotations

import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from . import fdm, writers
from .config import serialize
from .errors import IoError, PaletteMismatch
from .model import ScenarioConfig, validate_scenario
from .oracle import compare_with_oracle
from .superpose import superpose
from .trajectories import integrate, seed_positions

PRODUCT_FILES = {
    "density": ("density.csv", "density.ppm"),
    "current": ("current.csv", "current.ppm"),
    "entangling": ("entangling.csv", "entangling.ppm"),
    "trajectories": ("trajectories.csv",),
    "oracle-diff": ("oracle_diff.csv",),
    "fdm": ("fdm_density.csv", "fdm_check.csv"),
}


@dataclass
class RunManifest:
    name: str
    config: ScenarioConfig
    files: List[Tuple[str, str]] = field(default_factory=list)  # (file name, sha256)
    timings: Dict[str, float] = field(default_factory=dict)

    def text(self) -> str:
        lines = [f"scenario {self.name}", f"outputs {','.join(self.config.outputs)}"]
        lines += [f"{sha}  {name}" for name, sha in self.files]
        return "\n".join(lines) + "\n"

    def covers_outputs(self) -> bool:
        names = {n for n, _ in self.files}
        return all(any(f in names for f in PRODUCT_FILES[p]) for p in self.config.outputs)


def _signed_heatmap(values, grid, path):
    """Diverging palette for signed fields; all-zero or one-signed fields fall back to intensity."""
    try:
        return writers.render_heatmap(values, grid, "diverging", path)
    except PaletteMismatch:
        return writers.render_heatmap(np.abs(values), grid, "intensity", path)


@contextmanager
def _timed(timings, stage):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - t0


def run_scenario(cfg: ScenarioConfig, out_dir) -> RunManifest:
    cfg = validate_scenario(cfg)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc.strerror or exc}") from None
    if not os.access(out, os.W_OK):
        raise IoError(f"output directory {out} is not writable")

    manifest = RunManifest(cfg.name, cfg)
    written: List[Path] = []
    grid = cfg.grid
    wants = set(cfg.outputs)

    written.append(writers.write_bytes(out / "config.toml", serialize(cfg).encode("utf-8")))

    field_ = None
    if wants & {"density", "current", "entangling", "trajectories", "oracle-diff"}:
        with _timed(manifest.timings, "superpose"):
            field_ = superpose(cfg)

    with _timed(manifest.timings, "write-grids"):
        if "density" in wants:
            written.append(writers.write_grid(field_.P_tot, grid, out / "density.csv"))
            written.append(writers.render_heatmap(field_.P_tot, grid, "intensity", out / "density.ppm"))
        if "current" in wants:
            written.append(writers.write_grid(field_.J_tot, grid, out / "current.csv"))
            written.append(_signed_heatmap(field_.J_tot, grid, out / "current.ppm"))
        if "entangling" in wants:
            written.append(writers.write_grid(field_.J_e, grid, out / "entangling.csv"))
            written.append(_signed_heatmap(field_.J_e, grid, out / "entangling.ppm"))

    if "trajectories" in wants:
        with _timed(manifest.timings, "trajectories"):
            tset = integrate(cfg, seed_positions(cfg.slits, cfg.trajectory_seeds), field=field_)
            written.append(writers.write_trajectories(tset, out / "trajectories.csv"))

    if "oracle-diff" in wants:
        with _timed(manifest.timings, "oracle"):
            d = compare_with_oracle(field_)
            rows = [("P_tot", d.max_rel_P, d.mean_rel_P, d.points), ("J_tot", d.max_rel_J, d.mean_rel_J, d.points)]
            written.append(writers.write_table(("quantity", "max_rel", "mean_rel", "points"), rows,
                                               out / "oracle_diff.csv"))

    if "fdm" in wants:
        with _timed(manifest.timings, "fdm"):
            written.append(writers.write_grid(fdm.superpose_fdm(cfg), grid, out / "fdm_density.csv"))
            rows = []
            for i, s in enumerate(cfg.slits):
                if s.weight == 0:
                    continue
                hist = fdm.run(s, cfg.params, grid)
                drift = float(np.max(np.abs(hist.masses - hist.masses[0])))
                rows.append((i, hist.steps, hist.max_r, drift, fdm.linf_error(s, cfg.params, grid, hist=hist)))
            written.append(writers.write_table(("slit", "steps", "max_r", "mass_drift", "linf_rel_peak"), rows,
                                               out / "fdm_check.csv"))

    manifest.files = [(p.name, writers.sha256(p)) for p in written]
    writers.write_bytes(out / "manifest.txt", manifest.text().encode("ascii"))
    return manifest
