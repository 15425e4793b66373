"""Advantage-region map over the slippage family's (p, delta) plane.

Colour shows the entropic gap C_q - C^phi_min; the dashed curve marks the
slip rate with a dimensional advantage; the non-physical corner is hatched.
"""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt
import numpy as np

from .common import FIGSIZE, base_parser, finish, read_rows


def main(argv: list[str] | None = None) -> int:
    parser = base_parser("Plot the (p, delta) advantage regions from a region-sweep CSV")
    args = parser.parse_args(argv)
    rows = read_rows(
        args.input, ["p", "delta", "physical", "cq_bits", "cq_min_bits", "line_delta"]
    )
    ps = sorted({float(r["p"]) for r in rows})
    ds = sorted({float(r["delta"]) for r in rows})
    ip = {v: i for i, v in enumerate(ps)}
    idl = {v: i for i, v in enumerate(ds)}
    gap = np.full((len(ps), len(ds)), np.nan)
    for r in rows:
        if r["physical"] == "1" and r["cq_bits"]:
            gap[ip[float(r["p"])], idl[float(r["delta"])]] = float(r["cq_bits"]) - float(
                r["cq_min_bits"]
            )

    fig, ax = plt.subplots(figsize=FIGSIZE)
    masked = np.ma.masked_invalid(gap.T)
    cmap = plt.get_cmap("magma").copy()
    cmap.set_bad("gold")  # non-physical parameter corner
    image = ax.imshow(
        masked,
        origin="lower",
        extent=[ps[0], ps[-1], ds[0], ds[-1]],
        aspect="auto",
        cmap=cmap,
    )
    fig.colorbar(image, ax=ax, label=r"$C_q - C^{\varphi}_{q,\min}$ (bits)")
    line = sorted(
        {(float(r["p"]), float(r["line_delta"])) for r in rows if r["line_delta"]}
    )
    if line:
        ax.plot(*zip(*line), "w--", label="dimensional advantage")
        ax.legend(loc="upper right")
    ax.set_xlabel("p")
    ax.set_ylabel(r"$\delta$")
    return finish(fig, args)


if __name__ == "__main__":
    sys.exit(main())
