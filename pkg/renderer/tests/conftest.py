"""Synthetic CSV + sidecar fixtures matching the documented rydfloq formats.

Built with plain numpy so the renderer suite never invokes the primary
package or binary; shapes and columns mirror what the simulation CLI writes.
"""

import json
from pathlib import Path

import numpy as np
import pytest

FLOAT = "%.16e"


def write_csv(path: Path, columns: dict, figure_id: str, extra_meta: dict | None = None):
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            cells = []
            for name in names:
                value = columns[name][i]
                cells.append(value if isinstance(value, str) else FLOAT % value)
            fh.write(",".join(cells) + "\n")
    meta = {
        "format": "rydfloq-sweep",
        "figure_id": figure_id,
        "params": {"rabi": 1.0, "delta0": 0.0, "delta_mod": 15.0, "omega": 8.0, "v0": 0.0},
        "columns": names,
    }
    if extra_meta:
        meta.update(extra_meta)
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def sweep_1d(path, figure_id, axis_name, dim, ipr_names, char_label=None,
             overlays=(), extra_meta=None, n=60):
    x = np.linspace(0.0, 10.0, n)
    cols = {axis_name: x}
    for k in range(dim):
        cols[f"eps_{k + 1}"] = np.sin(x + k) * 0.4
    for name in ipr_names:
        cols[name] = 0.5 + 0.5 * np.cos(x + len(name))
    if char_label:
        for k in range(dim):
            cols[f"char_{char_label}_{k + 1}"] = np.abs(np.sin(0.5 * x + k)) ** 2
    for name, order in overlays:
        cols[name] = np.cos(x + order)  # stand-in curve; renderer just draws it
    return write_csv(path, cols, figure_id, extra_meta)


def sweep_2d(path, figure_id, y_name, value_name, nx=12, ny=9):
    x = np.linspace(0.0, 10.0, nx)
    y = np.linspace(0.0, 20.0, ny)
    gx, gy = np.meshgrid(x, y, indexing="ij")
    cols = {
        "alpha": gx.ravel(),
        y_name: gy.ravel(),
        "eps_1": np.sin(gx).ravel() * 0.3,
        "eps_2": np.cos(gx).ravel() * 0.3,
        "eps_3": (np.sin(gx) * np.cos(gy)).ravel() * 0.3,
        value_name: (1.0 + np.sin(gx) * np.cos(0.3 * gy)).ravel(),
        "ipr_gg": (1.0 + np.sin(gx)).ravel() * 0.5,
        "ipr_ee": (1.0 + np.cos(gy)).ravel() * 0.5,
        "regime": np.array(["blockade"] * (nx * ny), dtype=object),
    }
    return write_csv(path, cols, figure_id)


def trajectory(path, figure_id, with_entropy=False, n=160):
    t = np.linspace(0.0, 20.0, n)
    p1 = np.cos(0.4 * t) ** 2
    p2 = 0.5 * (1 - np.cos(0.4 * t) ** 2)
    cols = {
        "time": t,
        "pop_gg": p1,
        "pop_ge": p2,
        "pop_eg": p2,
        "pop_ee": np.zeros(n),
        "norm": np.ones(n),
    }
    if with_entropy:
        cols["entropy"] = 0.5 + 0.5 * np.sin(0.2 * t) ** 2
    return write_csv(path, cols, figure_id, {"format": "rydfloq-timeseries"})


@pytest.fixture
def fixture_csv(tmp_path):
    """Factory producing a schema-conformant CSV set for any figure id."""

    def make(figure_id: str) -> list[Path]:
        fid = figure_id
        base = tmp_path / f"fig{fid}.csv"
        if fid in ("1a", "1c", "1e"):
            axis = "delta0" if fid == "1a" else "alpha"
            return [sweep_1d(base, fid, axis, 2, ("ipr_g",), char_label="g")]
        if fid == "1b":
            return [sweep_1d(base, fid, "delta0", 2, ("ipr_g",))]
        if fid in ("1d", "1f"):
            order = 1 if fid == "1d" else 0
            return [sweep_1d(base, fid, "alpha", 2, ("ipr_g",),
                             overlays=((f"bessel_j{order}", order),))]
        if fid == "2":
            return [sweep_2d(base, fid, "delta0", "ipr_g")]
        if fid.startswith("3"):
            return [trajectory(base, fid)]
        if fid == "4a":
            return [sweep_1d(base, fid, "delta0", 4, ("ipr_gg", "ipr_ee"),
                             char_label="gg")]
        if fid in ("4b", "4c"):
            return [sweep_1d(base, fid, "delta0", 4, ("ipr_gg", "ipr_ee"))]
        if fid == "5":
            files = []
            for v0 in (0.2, 8.0):
                p = tmp_path / f"fig5_v0_{v0:g}.csv"
                files.append(
                    sweep_1d(p, fid, "alpha", 3, ("ipr_gg", "ipr_ee"),
                             char_label="gg",
                             overlays=(("bessel_j0", 0), ("bessel_jm1", -1)),
                             extra_meta={"params": {"v0": v0, "omega": 8.0}})
                )
            return files
        if fid in ("6a", "6b", "8a"):
            value = {"6a": "ipr_gg", "6b": "ipr_ee", "8a": "ipr_plus"}[fid]
            return [sweep_2d(base, fid, "v0", value)]
        if fid in ("7a", "7b"):
            files = []
            for tag, meta in (("x", {"v0": 0.01, "omega": 30.0}),
                              ("y", {"v0": 6.0, "omega": 30.0})):
                p = tmp_path / f"fig{fid}_{tag}.csv"
                files.append(sweep_1d(p, fid, "alpha", 3, ("ipr_gg",),
                                      extra_meta={"params": meta}))
            return files
        if fid == "8b":
            return [trajectory(tmp_path / "fig8b_trapped.csv", fid, with_entropy=True),
                    trajectory(tmp_path / "fig8b_blockade.csv", fid, with_entropy=True)]
        raise KeyError(fid)

    return make
