"""Figures for the report path: every delimited output gets a rendered twin.

Headless by construction; import order forces the Agg backend before pyplot
loads so the module works in batch runs and CI.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _num(value):
    try:
        out = float(value)
    except (TypeError, ValueError):
        return None
    return out


def render_bundle_figure(bundle, path) -> Path:
    """One PNG per experiment bundle: check verdicts plus measured-vs-reference bars."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    run = bundle.runs[0]
    reports = run["reports"]

    fig, (ax_checks, ax_scalars) = plt.subplots(1, 2, figsize=(10, 4.2))

    names = list(reports)
    verdicts = [bool(reports[name].get("ok")) for name in names]
    colors = ["#2a9d4e" if v else "#cc3333" for v in verdicts]
    ypos = range(len(names))
    ax_checks.barh(list(ypos), [1] * len(names), color=colors)
    ax_checks.set_yticks(list(ypos))
    ax_checks.set_yticklabels(names)
    ax_checks.set_xticks([])
    ax_checks.invert_yaxis()
    ax_checks.set_title(f"checks (seed {run['seed']})")
    for y, v in zip(ypos, verdicts):
        ax_checks.text(0.5, y, "pass" if v else "FAIL", ha="center", va="center")

    pairs = []
    lam = reports.get("lambda", {})
    if _num(lam.get("lam")) is not None:
        pairs.append(("lambda", _num(lam["lam"]), _num(lam.get("ramanujan_bound"))))
    psi = reports.get("psi", {})
    if _num(psi.get("psi")) is not None:
        pairs.append(("psi(U)", _num(psi["psi"]), _num(psi.get("target"))))
    gr = reports.get("girth", {})
    if _num(gr.get("girth")) is not None:
        pairs.append(("girth", _num(gr["girth"]), _num(gr.get("lower_bound"))))
    if pairs:
        xpos = range(len(pairs))
        ax_scalars.bar(
            [x - 0.18 for x in xpos],
            [p[1] for p in pairs],
            width=0.36,
            label="measured",
            color="#33658a",
        )
        ax_scalars.bar(
            [x + 0.18 for x in xpos],
            [p[2] if p[2] is not None else 0.0 for p in pairs],
            width=0.36,
            label="reference",
            color="#b5b8bd",
        )
        ax_scalars.set_xticks(list(xpos))
        ax_scalars.set_xticklabels([p[0] for p in pairs])
        ax_scalars.legend(frameon=False)
    else:
        ax_scalars.text(0.5, 0.5, "no scalar reports", ha="center", va="center")
        ax_scalars.set_xticks([])
        ax_scalars.set_yticks([])
    cons = run["construction"]
    ax_scalars.set_title(
        f"n={cons.get('n', '?')} d={bundle.config['d']} gamma={cons.get('gamma', '?')}"
    )

    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def render_sweep_figure(rows, path) -> Path:
    """One PNG per sweep CSV: second eigenvalue and planted expansion across the grid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, (ax_lam, ax_psi) = plt.subplots(1, 2, figsize=(10, 4.2))

    by_d: dict = {}
    errors = 0
    for row in rows:
        if row.get("error"):
            errors += 1
            continue
        d = _num(row.get("d"))
        n = _num(row.get("n"))
        if d is None or n is None:
            continue
        by_d.setdefault(int(d), []).append(row)

    lam_lines = psi_lines = 0
    for d, group in sorted(by_d.items()):
        group = sorted(group, key=lambda r: _num(r["n"]))
        ns = [_num(r["n"]) for r in group]
        lams = [_num(r.get("lambda")) for r in group]
        psis = [_num(r.get("psi")) for r in group]
        if any(v is not None for v in lams):
            ax_lam.plot(ns, lams, "o-", label=f"d={d}")
            lam_lines += 1
            bound = _num(group[0].get("ramanujan_bound"))
            if bound is not None:
                ax_lam.axhline(bound, ls="--", lw=0.8, color="gray")
        if any(v is not None for v in psis):
            ax_psi.plot(ns, psis, "s-", label=f"d={d}")
            psi_lines += 1
            target = _num(group[0].get("psi_target"))
            if target is not None:
                ax_psi.axhline(target, ls="--", lw=0.8, color="gray")

    ax_lam.set_xlabel("n")
    ax_lam.set_ylabel("second eigenvalue")
    ax_lam.set_xscale("log")
    ax_psi.set_xlabel("n")
    ax_psi.set_ylabel("planted expansion")
    ax_psi.set_xscale("log")
    if lam_lines:
        ax_lam.legend(frameon=False)
    if psi_lines:
        ax_psi.legend(frameon=False)
    title = f"{len(rows)} grid points"
    if errors:
        title += f", {errors} failed"
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
