"""Figure ids, their plot kinds, and the CSV columns each one requires."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FigureSchema:
    figure_id: str
    kind: str  # spectrum | ipr-line | heatmap | trajectory | entropy | ladder
    axis: str
    required: tuple[str, ...]
    value_column: str | None = None  # heatmaps and single-curve line plots
    overlay_prefix: str = "bessel_"  # optional overlay columns, drawn if present
    multi_input: bool = False


FIGURE_SCHEMAS: dict[str, FigureSchema] = {
    "1a": FigureSchema("1a", "spectrum", "delta0", ("delta0", "eps_1", "eps_2")),
    "1b": FigureSchema("1b", "ipr-line", "delta0", ("delta0", "ipr_g"), "ipr_g"),
    "1c": FigureSchema("1c", "spectrum", "alpha", ("alpha", "eps_1", "eps_2")),
    "1d": FigureSchema("1d", "ipr-line", "alpha", ("alpha", "ipr_g"), "ipr_g"),
    "1e": FigureSchema("1e", "spectrum", "alpha", ("alpha", "eps_1", "eps_2")),
    "1f": FigureSchema("1f", "ipr-line", "alpha", ("alpha", "ipr_g"), "ipr_g"),
    "2": FigureSchema("2", "heatmap", "alpha", ("alpha", "delta0", "ipr_g"), "ipr_g"),
    "3a": FigureSchema("3a", "trajectory", "time", ("time", "pop_gg", "pop_ee")),
    "3b": FigureSchema("3b", "trajectory", "time", ("time", "pop_gg", "pop_ee")),
    "3c": FigureSchema("3c", "trajectory", "time", ("time", "pop_gg", "pop_ee")),
    "3d": FigureSchema("3d", "trajectory", "time", ("time", "pop_gg", "pop_ee")),
    "4a": FigureSchema("4a", "spectrum", "delta0",
                       ("delta0", "eps_1", "eps_2", "eps_3", "eps_4")),
    "4b": FigureSchema("4b", "ipr-line", "delta0", ("delta0", "ipr_gg"), "ipr_gg"),
    "4c": FigureSchema("4c", "ipr-line", "delta0", ("delta0", "ipr_ee"), "ipr_ee"),
    "5": FigureSchema("5", "ladder", "alpha",
                      ("alpha", "eps_1", "eps_2", "eps_3", "ipr_gg", "ipr_ee"),
                      multi_input=True),
    "6a": FigureSchema("6a", "heatmap", "alpha", ("alpha", "v0", "ipr_gg"), "ipr_gg"),
    "6b": FigureSchema("6b", "heatmap", "alpha", ("alpha", "v0", "ipr_ee"), "ipr_ee"),
    "7a": FigureSchema("7a", "ipr-line", "alpha", ("alpha", "ipr_gg"), "ipr_gg",
                       multi_input=True),
    "7b": FigureSchema("7b", "ipr-line", "alpha", ("alpha", "ipr_gg"), "ipr_gg",
                       multi_input=True),
    "8a": FigureSchema("8a", "heatmap", "alpha", ("alpha", "v0", "ipr_plus"), "ipr_plus"),
    "8b": FigureSchema("8b", "entropy", "time", ("time", "entropy"), "entropy",
                       multi_input=True),
}


def required_columns(figure_id: str) -> tuple[str, ...]:
    return FIGURE_SCHEMAS[figure_id].required
