"""Phase-plane heatmap of the entropic memory cost over two transition phases."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt
import numpy as np

from .common import CsvError, FIGSIZE, base_parser, finish, read_rows


def main(argv: list[str] | None = None) -> int:
    parser = base_parser("Plot a C^phi heatmap from a pair-scan CSV")
    args = parser.parse_args(argv)
    rows = read_rows(args.input, ["phi_1", "phi_2", "cq_bits"])
    phi1 = sorted({float(r["phi_1"]) for r in rows})
    phi2 = sorted({float(r["phi_2"]) for r in rows})
    if len(phi1) * len(phi2) != len(rows):
        raise CsvError("pair-scan CSV is not a complete grid")
    index1 = {v: i for i, v in enumerate(phi1)}
    index2 = {v: i for i, v in enumerate(phi2)}
    grid = np.full((len(phi1), len(phi2)), np.nan)
    for r in rows:
        grid[index1[float(r["phi_1"])], index2[float(r["phi_2"])]] = float(r["cq_bits"])

    fig, ax = plt.subplots(figsize=FIGSIZE)
    image = ax.imshow(
        grid.T,
        origin="lower",
        extent=[phi1[0], phi1[-1], phi2[0], phi2[-1]],
        aspect="auto",
        cmap="viridis",
    )
    fig.colorbar(image, ax=ax, label=r"$C^{\varphi}_q$ (bits)")
    i, j = np.unravel_index(np.nanargmin(grid), grid.shape)
    ax.plot(phi1[i], phi2[j], "r*", markersize=12, label="minimum")
    ax.set_xlabel(r"$\varphi_1$")
    ax.set_ylabel(r"$\varphi_2$")
    ax.legend(loc="upper right")
    return finish(fig, args)


if __name__ == "__main__":
    sys.exit(main())
