"""Memory cost versus cycle probability: C_q and its phase-optimized floor."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt

from .common import FIGSIZE, base_parser, finish, read_rows


def main(argv: list[str] | None = None) -> int:
    parser = base_parser("Plot C_q and C^phi_min curves from an optimize sweep CSV")
    args = parser.parse_args(argv)
    rows = read_rows(args.input, ["p", "cq_bits", "cq_min_bits"])
    rows.sort(key=lambda r: float(r["p"]))
    p = [float(r["p"]) for r in rows]

    fig, ax = plt.subplots(figsize=FIGSIZE)
    if "c_mu_bits" in rows[0]:
        ax.plot(p, [float(r["c_mu_bits"]) for r in rows], color="0.6", ls=":", label=r"$C_\mu$")
    ax.plot(p, [float(r["cq_bits"]) for r in rows], "o-", label=r"$C_q$")
    ax.plot(p, [float(r["cq_min_bits"]) for r in rows], "s-", label=r"$C^{\varphi}_{q,\min}$")
    ax.set_xlabel("p")
    ax.set_ylabel("memory (bits)")
    ax.legend()
    return finish(fig, args)


if __name__ == "__main__":
    sys.exit(main())
