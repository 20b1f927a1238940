"""Draw one figure panel from CSV + sidecar inputs.

The renderer validates the sidecar's figure binding and the CSV column schema
before touching matplotlib, never recomputes physics (Bessel overlays and IPR
values are taken from the file), and embeds the plotted columns' extrema in
the image metadata so a consumer can check that no numerical transformation
happened beyond axis mapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .schema import FIGURE_SCHEMAS, FigureSchema


class RenderError(RuntimeError):
    pass


class SchemaError(RenderError):
    """CSV columns or sidecar binding do not match the requested figure."""


@dataclass(frozen=True)
class PlotSpec:
    figure_id: str
    inputs: tuple[Path, ...]
    output: Path
    colormap: str = "viridis"
    dpi: int = 150
    style: dict = field(default_factory=dict)


def _load(path: Path, schema: FigureSchema) -> tuple[pd.DataFrame, dict]:
    sidecar_path = path.with_suffix(".json")
    if not sidecar_path.exists():
        raise SchemaError(f"missing sidecar {sidecar_path}")
    meta = json.loads(sidecar_path.read_text())
    bound = meta.get("figure_id")
    if bound != schema.figure_id:
        raise SchemaError(
            f"{path} is bound to figure {bound!r}, not {schema.figure_id!r}"
        )
    frame = pd.read_csv(path)
    if frame.empty:
        raise SchemaError(f"{path} contains no data rows")
    missing = [c for c in schema.required if c not in frame.columns]
    if missing:
        raise SchemaError(
            f"{path} does not match the figure {schema.figure_id} schema; "
            f"missing columns: {missing}; found: {list(frame.columns)}"
        )
    return frame, meta


def _extrema(frames: list[pd.DataFrame], columns: set[str]) -> dict[str, str]:
    lo: dict[str, float] = {}
    hi: dict[str, float] = {}
    for frame in frames:
        for col in columns:
            if col not in frame.columns:
                continue
            values = pd.to_numeric(frame[col], errors="coerce").to_numpy(float)
            values = values[np.isfinite(values)]
            if values.size == 0:
                continue
            lo[col] = min(lo.get(col, np.inf), float(values.min()))
            hi[col] = max(hi.get(col, -np.inf), float(values.max()))
    payload = {col: [lo[col], hi[col]] for col in sorted(lo)}
    return {"data-extent": json.dumps(payload)}


def _eps_columns(frame: pd.DataFrame) -> list[str]:
    cols = [c for c in frame.columns if c.startswith("eps_")]
    return sorted(cols, key=lambda c: int(c.split("_")[1]))


def _char_columns(frame: pd.DataFrame, label: str) -> list[str]:
    cols = [c for c in frame.columns if c.startswith(f"char_{label}_")]
    return sorted(cols, key=lambda c: int(c.rsplit("_", 1)[1]))


def _overlay_columns(frame: pd.DataFrame, schema: FigureSchema) -> list[str]:
    return [c for c in frame.columns if c.startswith(schema.overlay_prefix)]


def _label_from_meta(meta: dict) -> str:
    params = meta.get("params", {})
    bits = []
    for key in ("v0", "omega"):
        if key in params:
            bits.append(f"{key}={params[key]:g}")
    return ", ".join(bits)


def _draw_spectrum(ax, frame, schema: FigureSchema, colormap: str):
    x = frame[schema.axis].to_numpy(float)
    char_label = "gg" if _char_columns(frame, "gg") else "g"
    chars = _char_columns(frame, char_label)
    mappable = None
    for k, eps in enumerate(_eps_columns(frame)):
        y = frame[eps].to_numpy(float)
        if chars:
            c = frame[chars[k]].to_numpy(float)
            mappable = ax.scatter(x, y, c=c, cmap=colormap, s=2.0, vmin=0.0, vmax=1.0)
        else:
            ax.plot(x, y, lw=1.0)
    ax.set_ylabel("quasi-energy (units of the Rabi coupling)")
    return mappable


def _draw_ipr_lines(ax, frames, metas, schema: FigureSchema):
    for frame, meta in zip(frames, metas):
        x = frame[schema.axis].to_numpy(float)
        ax.plot(x, frame[schema.value_column].to_numpy(float),
                lw=1.2, label=_label_from_meta(meta) or schema.value_column)
    for overlay in _overlay_columns(frames[0], schema):
        ax.plot(frames[0][schema.axis], frames[0][overlay], ls="--", lw=0.9,
                label=overlay)
    ax.set_ylabel(schema.value_column)
    if len(frames) > 1 or _overlay_columns(frames[0], schema):
        ax.legend(frameon=False, fontsize=8)


def _draw_heatmap(ax, fig, frame, schema: FigureSchema, colormap: str):
    x_name = schema.axis
    y_name = schema.required[1]
    x = np.unique(frame[x_name].to_numpy(float))
    y = np.unique(frame[y_name].to_numpy(float))
    z = frame[schema.value_column].to_numpy(float).reshape(x.size, y.size)
    mesh = ax.pcolormesh(x, y, z.T, cmap=colormap, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=schema.value_column)
    ax.set_ylabel(f"{y_name} (units of the Rabi coupling)")


def _draw_trajectory(ax, frame):
    t = frame["time"].to_numpy(float)
    for col in [c for c in frame.columns if c.startswith("pop_")]:
        ax.plot(t, frame[col].to_numpy(float), lw=1.0, label=col.removeprefix("pop_"))
    ax.set_ylabel("population")
    ax.legend(frameon=False, fontsize=8)


def _draw_entropy(ax, frames, metas):
    for frame, meta in zip(frames, metas):
        label = meta.get("binding_notes") or _label_from_meta(meta)
        suffix = Path(meta.get("source", "")).stem
        ax.plot(frame["time"].to_numpy(float), frame["entropy"].to_numpy(float),
                lw=1.2, label=suffix or label)
    ax.set_ylabel("entanglement entropy")
    ax.set_ylim(-0.05, 1.1)
    ax.legend(frameon=False, fontsize=8)


def _draw_ladder_panels(fig, frames, metas, schema: FigureSchema, colormap: str):
    n = len(frames)
    axes = fig.subplots(2, n, squeeze=False)
    mappable = None
    for i, (frame, meta) in enumerate(zip(frames, metas)):
        top, bottom = axes[0][i], axes[1][i]
        mappable = _draw_spectrum(top, frame, schema, colormap) or mappable
        top.set_title(_label_from_meta(meta), fontsize=9)
        x = frame[schema.axis].to_numpy(float)
        bottom.plot(x, frame["ipr_gg"], lw=1.1, label="ipr_gg")
        bottom.plot(x, frame["ipr_ee"], lw=1.1, label="ipr_ee")
        for overlay in _overlay_columns(frame, schema):
            bottom.plot(x, frame[overlay], ls="--", lw=0.8, label=overlay)
        bottom.set_xlabel(schema.axis)
        if i == 0:
            bottom.legend(frameon=False, fontsize=7)
    if mappable is not None:
        fig.colorbar(mappable, ax=[a for row in axes for a in row],
                     label="both-ground weight", shrink=0.8)


def render(spec: PlotSpec) -> Path:
    """Render one panel; returns the written image path.

    Raises SchemaError when the inputs do not carry the figure's binding or
    columns, and RenderError for unknown ids.
    """
    schema = FIGURE_SCHEMAS.get(spec.figure_id)
    if schema is None:
        raise RenderError(f"unknown figure id {spec.figure_id!r}")
    if not spec.inputs:
        raise RenderError("no input CSV given")
    if not schema.multi_input and len(spec.inputs) > 1:
        raise RenderError(f"figure {spec.figure_id} takes a single input CSV")

    loaded = [_load(Path(p), schema) for p in spec.inputs]
    frames = [frame for frame, _ in loaded]
    metas = [meta for _, meta in loaded]
    for meta, path in zip(metas, spec.inputs):
        meta["source"] = str(path)

    if schema.kind == "ladder":
        fig = plt.figure(figsize=(3.0 * len(frames) + 1.5, 5.0))
        _draw_ladder_panels(fig, frames, metas, schema, spec.colormap)
        fig.supxlabel(schema.axis)
    else:
        fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
        if schema.kind == "spectrum":
            mappable = _draw_spectrum(ax, frames[0], schema, spec.colormap)
            if mappable is not None:
                fig.colorbar(mappable, ax=ax, label="basis-state weight")
        elif schema.kind == "ipr-line":
            _draw_ipr_lines(ax, frames, metas, schema)
        elif schema.kind == "heatmap":
            _draw_heatmap(ax, fig, frames[0], schema, spec.colormap)
        elif schema.kind == "trajectory":
            _draw_trajectory(ax, frames[0])
        elif schema.kind == "entropy":
            _draw_entropy(ax, frames, metas)
        else:  # pragma: no cover - schema table is exhaustive
            raise RenderError(f"unhandled plot kind {schema.kind}")
        ax.set_xlabel(
            "time (inverse Rabi coupling)" if schema.axis == "time" else schema.axis
        )

    fig.suptitle(f"figure {spec.figure_id}", fontsize=10)

    metadata = _extrema(frames, set(sum((list(f.columns) for f in frames), [])))
    metadata["figure-id"] = spec.figure_id
    out = Path(spec.output)
    if out.suffix.lower() == ".svg":
        # The SVG writer only accepts Dublin Core keys; fold the payload into
        # Description and drop the date so output stays byte-stable.
        svg_meta = {
            "Description": json.dumps(metadata, sort_keys=True),
            "Date": None,
        }
        fig.savefig(out, format="svg", metadata=svg_meta)
    else:
        fig.savefig(out, format="png", dpi=spec.dpi, metadata=metadata)
    plt.close(fig)
    return out
