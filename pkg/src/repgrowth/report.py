"""Report files: the g(n) table as TSV plus a convergence figure."""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .certificates import check_dual, check_primal, dual_from_pseudo_loop  # noqa: E402
from .core import ReplacementSystem  # noqa: E402
from .evaluator import fmt, g_table  # noqa: E402
from .io import dual_to_dict, loop_to_dict, primal_to_dict  # noqa: E402
from .rates import certificate_at_rate, witness_pseudo_loop  # noqa: E402


def witness_bundle(system: ReplacementSystem) -> dict:
    primal = certificate_at_rate(system)
    loop = witness_pseudo_loop(system)
    dual = dual_from_pseudo_loop(system, loop)
    primal_bad = check_primal(system, primal)
    dual_bad, objective = check_dual(system, dual)
    return {
        "rate": fmt(primal.theta),
        "loop": loop_to_dict(loop),
        "primal": primal_to_dict(system, primal),
        "dual": dual_to_dict(system, dual),
        "checks": {
            "loop_valid": not loop.problems(),
            "primal_feasible": not primal_bad,
            "dual_feasible": not dual_bad,
            "objective_equal": objective == primal.theta == loop.rate,
        },
    }


def table_rows(system: ReplacementSystem, n_max: int):
    """``(n, g(n), g(n)/n, n*rate + max z)`` for ``n = 1..n_max``."""
    cert = certificate_at_rate(system)
    top = max(cert.z)
    g = g_table(system, n_max)
    return [(n, g[n - 1], g[n - 1] / n, n * cert.theta + top) for n in range(1, n_max + 1)]


def write_tsv(rows, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n\tg\tg_over_n\tupper_bound\n")
        for n, g, avg, ub in rows:
            fh.write(f"{n}\t{fmt(g)}\t{fmt(avg)}\t{fmt(ub)}\n")


def plot_growth(system: ReplacementSystem, n_max: int, path: str, title: str | None = None):
    cert = certificate_at_rate(system)
    loop = witness_pseudo_loop(system)
    g = g_table(system, n_max)
    ns = list(range(1, n_max + 1))
    lam = float(cert.theta)
    top = float(max(cert.z))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(ns, [float(x) / n for x, n in zip(g, ns)], ".", ms=3, label="g(n)/n")
    ax1.axhline(lam, color="k", lw=0.8, label=f"rate = {fmt(cert.theta)}")
    ax1.plot(ns, [lam + top / n for n in ns], "--", lw=0.8, label="rate + max z / n")
    ax1.set_xlabel("n")
    ax1.set_ylabel("g(n)/n")
    ax1.legend(frameon=False, fontsize=8)

    resid = [float(x - n * cert.theta) for x, n in zip(g, ns)]
    ax2.plot(ns, resid, ".", ms=3, label="g(n) - n rate")
    ax2.axhline(top, color="C1", ls="--", lw=0.8, label="max z")
    q, c_root = loop.q, loop.system.values[loop.root]
    ks = [k for k in range(1, n_max) if k * q + 1 <= n_max]
    ax2.plot([k * q + 1 for k in ks],
             [float(k * loop.value + c_root - (k * q + 1) * cert.theta) for k in ks],
             "x", ms=4, color="C2", label="pumped witness")
    ax2.set_xlabel("n")
    ax2.legend(frameon=False, fontsize=8)

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(system: ReplacementSystem, n_max: int, out_dir: str,
                 title: str | None = None) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "table": os.path.join(out_dir, "gtable.tsv"),
        "figure": os.path.join(out_dir, "growth.png"),
        "witness": os.path.join(out_dir, "witness.json"),
        "dot": os.path.join(out_dir, "witness.dot"),
    }
    write_tsv(table_rows(system, n_max), paths["table"])
    plot_growth(system, n_max, paths["figure"], title)
    bundle = witness_bundle(system)
    with open(paths["witness"], "w", encoding="utf-8") as fh:
        json.dump(bundle, fh, indent=2)
        fh.write("\n")
    with open(paths["dot"], "w", encoding="utf-8") as fh:
        fh.write(witness_pseudo_loop(system).to_dot())
    return list(paths.values())
