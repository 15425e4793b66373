"""Comparison curves showing the ambiguity of optimality along a family scan."""

from __future__ import annotations

import sys

import matplotlib.pyplot as plt

from .common import FIGSIZE, base_parser, finish, read_rows


def main(argv: list[str] | None = None) -> int:
    parser = base_parser("Plot C^phi(cert), C_q, C^phi_min curves from an ambiguity-scan CSV")
    args = parser.parse_args(argv)
    rows = read_rows(args.input, ["p", "cq_zero", "cq_cert", "cq_min"])
    rows.sort(key=lambda r: float(r["p"]))
    p = [float(r["p"]) for r in rows]

    fig, ax = plt.subplots(figsize=FIGSIZE)
    with_cert = [(x, float(r["cq_cert"])) for x, r in zip(p, rows) if r["cq_cert"]]
    if with_cert:
        ax.plot(*zip(*with_cert), "^-", label=r"$C^{\varphi}_q$ at certificate")
    ax.plot(p, [float(r["cq_zero"]) for r in rows], "o-", label=r"$C_q$")
    ax.plot(p, [float(r["cq_min"]) for r in rows], "s-", label=r"$C^{\varphi}_{q,\min}$")
    shaded = [x for x, r in zip(p, rows) if r["ambiguous"] == "1"] if "ambiguous" in rows[0] else []
    for x in shaded:
        ax.axvline(x, color="0.85", zorder=0)
    ax.set_xlabel("p")
    ax.set_ylabel("memory (bits)")
    ax.legend()
    return finish(fig, args)


if __name__ == "__main__":
    sys.exit(main())
