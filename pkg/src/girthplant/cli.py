"""Command line front end.

Graphs travel as edge-list files: an "n m" header line, then one "u v" line
per edge with u < v. Reports land on stdout and, when asked, as JSON files.
Exit codes: 0 all asserted checks passed, 1 a check failed, 2 bad input or a
domain error.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path

import click

from .errors import GirthplantError
from .expansion import audit_small_sets
from .gadget import Gadget, construct_pipeline
from .graphs import Graph, VertexSet, read_edge_list, write_edge_list
from .harness import (
    PRESETS,
    load_config,
    resolve_gamma,
    run_experiment,
    run_preset,
    sweep,
)
from .hosts import lps_graph, random_regular
from .linkage import EncodingBoundParams, encoding_bound, quadratic_form
from .spectral import (
    DENSE_ADJ_CAP,
    adjacency_spectrum,
    ihara_bass_check,
    nb_spectrum,
    verify_x_radius,
)


def _forward_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (GirthplantError, ValueError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _write_graph(g: Graph, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    write_edge_list(g, path)


def _write_json(payload: dict, path) -> None:
    if path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str))


@click.group()
def main():
    """Construct and audit planted-expansion graphs."""


@main.group()
def hosts():
    """Generate host graphs."""


@hosts.command("lps")
@click.option("--p", type=int, required=True)
@click.option("--q", type=int, required=True)
@click.option("--out", type=click.Path(), required=True)
@_forward_errors
def hosts_lps(p, q, out):
    """Ramanujan Cayley graph on PSL2/PGL2(F_q), degree p+1."""
    g = lps_graph(p, q)
    _write_graph(g, out)
    click.echo(f"wrote {out}: n={g.n} m={g.m} degree={p + 1}")


@hosts.command("random")
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(), required=True)
@_forward_errors
def hosts_random(n, d, seed, out):
    """Random d-regular graph from the pairing model, deterministic per seed."""
    g = random_regular(n, d, seed)
    _write_graph(g, out)
    click.echo(f"wrote {out}: n={g.n} m={g.m} degree={d}")


@main.command("construct")
@click.option("--host", "host_path", type=click.Path(exists=True), required=True)
@click.option("--d", type=int, required=True)
@click.option("--gamma", default="n^(1/3)", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--sidecar", type=click.Path(), default=None)
@_forward_errors
def construct(host_path, d, gamma, seed, out, sidecar):
    """Splice the planted gadget into a host; writes edge list plus JSON sidecar."""
    host = read_edge_list(host_path)
    try:
        gamma_value = int(gamma)
    except ValueError:
        gamma_value = resolve_gamma(gamma, host.n)
    sp = construct_pipeline(d, host, gamma_value, seed)
    _write_graph(sp.graph, out)
    payload = {
        "gamma": gamma_value,
        "d": d,
        "matching": [list(e) for e in sp.matching],
        "attachment": {str(k): list(v) for k, v in sorted(sp.attachment.items())},
        "planted_u": list(sp.planted_u.members),
        "seeds": {"master": seed},
        "host_n": sp.host_n,
        "meta": dict(sp.meta),
    }
    _write_json(payload, sidecar or f"{out}.json")
    click.echo(
        f"wrote {out}: n={sp.graph.n} m={sp.graph.m} "
        f"planted={len(sp.planted_u.members)} girth>={sp.meta['girth_lower_bound']}"
    )


def _gadget_from_graph(g: Graph) -> Gadget:
    """Rebuild the gadget view of a bare edge list.

    Degree-d vertices with one pendant neighbor form the U side, those with
    d-2 pendants the V side; unambiguous for d >= 4 where 1 != d-2.
    """
    from .errors import InvalidParams
    from .graphs import girth as girth_of

    d = max(g.degree(v) for v in range(g.n))
    if d < 4:
        raise InvalidParams("gadget recovery needs max degree >= 4")
    u_side, v_side, q_side, r_side = [], [], [], []
    for v in range(g.n):
        deg = g.degree(v)
        if deg == 1:
            continue
        if deg != d:
            raise InvalidParams(f"vertex {v} has degree {deg}, expected 1 or {d}")
        pendants = [z for z in g.adjacency[v] if g.degree(z) == 1]
        if len(pendants) == 1:
            u_side.append(v)
            q_side += pendants
        elif len(pendants) == d - 2:
            v_side.append(v)
            r_side += pendants
        else:
            raise InvalidParams(
                f"vertex {v} has {len(pendants)} pendants; expected 1 or {d - 2}"
            )
    return Gadget(
        graph=g,
        u_set=VertexSet.from_iterable(u_side, g.n),
        v_set=VertexSet.from_iterable(v_side, g.n),
        q_set=VertexSet.from_iterable(q_side, g.n),
        r_set=VertexSet.from_iterable(r_side, g.n),
        gamma=len(u_side),
        d=d,
        girth_h=girth_of(g),
    )


@main.group()
def spectra():
    """Eigenvalue reports and spectral checks."""


@spectra.command("adj")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--mode", type=click.Choice(["dense", "extremal"]), default="dense")
@click.option("--json", "json_path", type=click.Path(), default=None)
@_forward_errors
def spectra_adj(in_path, mode, json_path):
    """Adjacency spectrum with residual checks."""
    g = read_edge_list(in_path)
    rep = adjacency_spectrum(g, mode=mode, deflate_ones=(mode == "extremal"))
    payload = {
        "n": g.n,
        "m": g.m,
        "mode": rep.method,
        "lam": rep.lam,
        "residual": rep.residual,
        "eigenvalues": [float(x) for x in rep.eigenvalues],
    }
    d = g.regular_degree()
    if d is not None and d >= 2:
        payload["ramanujan_bound"] = 2 * math.sqrt(d - 1)
        payload["margin"] = rep.lam - payload["ramanujan_bound"]
    _write_json(payload, json_path)
    click.echo(f"lam={rep.lam:.9f} method={rep.method} residual={rep.residual:.3e}")


@spectra.command("nb")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--mode", type=click.Choice(["dense", "radius_only"]), default="dense")
@click.option("--json", "json_path", type=click.Path(), default=None)
@_forward_errors
def spectra_nb(in_path, mode, json_path):
    """Nonbacktracking spectral radius."""
    g = read_edge_list(in_path)
    rep = nb_spectrum(g, mode=mode)
    payload = {"n": g.n, "m": g.m, "mode": rep.method, "radius": rep.lam}
    d = g.regular_degree()
    if d is not None and d >= 2:
        payload["radius_bound"] = math.sqrt(d - 1)
        payload["margin"] = rep.lam - payload["radius_bound"]
    if rep.eigenvalues is not None:
        payload["eigenvalues"] = [
            [float(x.real), float(x.imag)] for x in rep.eigenvalues
        ]
    _write_json(payload, json_path)
    click.echo(f"radius={rep.lam:.9f} method={rep.method}")


@spectra.command("ihara")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
@_forward_errors
def spectra_ihara(in_path, json_path):
    """Nonbacktracking spectrum against its adjacency factorization; asserted."""
    g = read_edge_list(in_path)
    ok, rep = ihara_bass_check(g)
    payload = {"n": g.n, "ok": ok, **rep}
    _write_json(payload, json_path)
    click.echo(
        f"{'pass' if ok else 'FAIL'}: worst pairing distance "
        f"{rep['max_match_distance']:.3e} over {rep['pairs']} pairs"
    )
    sys.exit(0 if ok else 1)


@spectra.command("xcheck")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--depth", type=int, default=3, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
@_forward_errors
def spectra_xcheck(in_path, depth, json_path):
    """Top eigenvalue of the depth-extended gadget against 2*sqrt(d-1); asserted."""
    g = read_edge_list(in_path)
    gadget = _gadget_from_graph(g)
    ok, lam_max = verify_x_radius(gadget, depth)
    bound = 2 * math.sqrt(gadget.d - 1)
    payload = {
        "n": g.n,
        "d": gadget.d,
        "gamma": gadget.gamma,
        "depth": depth,
        "top_eigenvalue": lam_max,
        "bound": bound,
        "ok": ok,
    }
    _write_json(payload, json_path)
    click.echo(
        f"{'pass' if ok else 'FAIL'}: depth {depth} top eigenvalue "
        f"{lam_max:.9f} vs bound {bound:.9f}"
    )
    sys.exit(0 if ok else 1)


@main.command("linkage")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--edge", required=True, help="start edge as u,v")
@click.option("--k", type=int, required=True)
@click.option("--ell", type=int, required=True)
@click.option("--check-bound", is_flag=True, default=False)
@click.option("--json", "json_path", type=click.Path(), default=None)
@_forward_errors
def linkage(in_path, edge, k, ell, check_bound, json_path):
    """Closed-walk quadratic form at a directed edge; optional encoding bound."""
    g = read_edge_list(in_path)
    try:
        u, v = (int(t) for t in edge.split(","))
    except ValueError:
        click.echo(f"error: --edge wants u,v with integers, got {edge!r}", err=True)
        sys.exit(2)
    value = quadratic_form(g, (u, v), k, ell)
    payload = {"edge": [u, v], "k": k, "ell": ell, "value": value}
    ok = True
    if check_bound:
        from .errors import InvalidParams

        d = g.regular_degree()
        if d is None:
            raise InvalidParams("--check-bound needs a regular graph")
        bound = encoding_bound(EncodingBoundParams(k=k, ell=ell, d=d))
        ok = value <= bound
        payload.update({"bound": bound, "ok": ok})
        click.echo(
            f"{'pass' if ok else 'FAIL'}: value {value} vs bound {bound:.6g}"
        )
    else:
        click.echo(f"value={value}")
    _write_json(payload, json_path)
    sys.exit(0 if ok else 1)


@main.group()
def audit():
    """Randomized structural audits."""


@audit.command("small-sets")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--kappa", type=float, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
@_forward_errors
def audit_small_sets_cmd(in_path, kappa, trials, seed, json_path):
    """Boundary-expansion and contraction identities on sampled small sets."""
    g = read_edge_list(in_path)
    mode = "dense" if g.n <= DENSE_ADJ_CAP else "extremal"
    lam = adjacency_spectrum(g, mode=mode, deflate_ones=(mode == "extremal")).lam
    rep = audit_small_sets(g, lam, kappa=kappa, trials=trials, seed=seed)
    _write_json(rep, json_path)
    click.echo(
        f"{'pass' if rep['ok'] else 'FAIL'}: {rep['trials']} sets <= "
        f"{rep['max_size']} vertices, violations "
        f"ratio={rep['ratio_violations']} identity={rep['identity_failures']} "
        f"edges={rep['hs_edge_violations']} girth={rep['hs_girth_failures']}, "
        f"bound={rep['bound']:.3f} min_ratio={rep['min_ratio_observed']:.4f}"
    )
    sys.exit(0 if rep["ok"] else 1)


@main.group()
def experiment():
    """Config-driven end-to-end runs."""


@experiment.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@_forward_errors
def experiment_run(config_path):
    """Run one experiment config; exit 0 iff every asserted check passed."""
    cfg = load_config(config_path)
    bundle = run_experiment(cfg)
    for run in bundle.runs:
        cons = run["construction"]
        head = f"seed {run['seed']}:"
        if "error" in cons:
            click.echo(f"{head} FAIL ({cons['error']})")
            continue
        parts = []
        for name, rep in run["reports"].items():
            verdict = "pass" if rep.get("ok") else "FAIL"
            parts.append(f"{name}={verdict}")
        click.echo(f"{head} n={cons['n']} gamma={cons['gamma']} " + " ".join(parts))
    if cfg.json_out:
        click.echo(f"bundle: {cfg.json_out}")
    click.echo("ok" if bundle.ok else "FAILED")
    sys.exit(0 if bundle.ok else 1)


def _parse_vary(entries) -> dict:
    vary = {}
    for entry in entries:
        key, _, values = entry.partition("=")
        if not values:
            click.echo(f"error: --vary wants key=v1,v2,..., got {entry!r}", err=True)
            sys.exit(2)
        parsed = []
        for token in values.split(","):
            token = token.strip()
            try:
                parsed.append(int(token))
            except ValueError:
                try:
                    parsed.append(float(token))
                except ValueError:
                    parsed.append(token)
        vary[key.strip()] = parsed
    return vary


@experiment.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--vary", "vary_entries", multiple=True, required=True)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--fig", "fig_path", type=click.Path(), default=None)
@click.option("--workers", type=int, default=None)
@_forward_errors
def experiment_sweep(config_path, vary_entries, csv_path, fig_path, workers):
    """Fan a config over a grid; failed points become marked rows, exit nonzero."""
    cfg = load_config(config_path)
    vary = _parse_vary(vary_entries)
    rows, all_ok = sweep(cfg, vary, csv_out=csv_path, fig_out=fig_path, max_workers=workers)
    for row in rows:
        tag = "pass" if row.get("ok") and not row.get("error") else "FAIL"
        grid = " ".join(f"{k}={v}" for k, v in row.get("grid", {}).items())
        suffix = f" ({row['error']})" if row.get("error") else ""
        click.echo(f"{tag}: {grid}{suffix}")
    if csv_path:
        click.echo(f"csv: {csv_path}")
    click.echo("ok" if all_ok else "FAILED")
    sys.exit(0 if all_ok else 1)


@experiment.command("preset")
@click.argument("name", required=False)
@click.option("--list", "list_only", is_flag=True, default=False)
@_forward_errors
def experiment_preset(name, list_only):
    """Run a named reproduction preset, or all of them."""
    if list_only or name is None:
        for key, (_, description) in PRESETS.items():
            click.echo(f"{key}: {description}")
        sys.exit(0)
    names = list(PRESETS) if name == "all" else [name]
    all_ok = True
    for preset_name in names:
        report = run_preset(preset_name)
        all_ok = all_ok and report["ok"]
        click.echo(f"== {report['name']} ({report['elapsed']:.1f}s)")
        for line in report["lines"]:
            click.echo(f"   {line}")
        click.echo(f"   {'pass' if report['ok'] else 'FAIL'}")
    sys.exit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
