"""JSON payloads and text tables for command output."""

import json

import pandas as pd

from specseq import page_table_json

SCHEMA_VERSION = 1


def _payload(**fields):
    out = {"schema": SCHEMA_VERSION}
    out.update(fields)
    return out


def homology_payload(name, dims, reduced):
    return _payload(
        diagram=name,
        reduced=bool(reduced),
        table=dims.as_rows(),
        total_dim=dims.total,
    )


def branched_payload(name, summary):
    return _payload(
        diagram=name,
        det=summary["det"],
        h1_invariant_factors=list(summary["h1_invariant_factors"]),
        b1=summary["b1"],
    )


def spectral_payload(name, tables, e_infinity_total):
    return _payload(
        diagram=name,
        pages=page_table_json(tables),
        e_infinity_total=e_infinity_total,
    )


def hmr_payload(model, cutoff, dims, with_chi=False, formula=None, ordinary=None):
    out = _payload(
        model=model.name,
        cutoff=cutoff,
        towers=model.tower_count,
        irreducibles=[[n, g] for n, g, _ in model.irreducibles],
        table=dims.as_rows(),
        total_dim=dims.total,
        per_spinc=[[s, n] for s, n in sorted(dims.by_spinc.items())],
    )
    if with_chi:
        out["abs_chi"] = dims.abs_chi
        out["chi_formula"] = formula
        out["ordinary_abs_chi"] = ordinary
    return out


def skein_payload(name, crossing, triple, dets, check):
    return _payload(
        diagram=name,
        crossing=crossing,
        resolutions=[
            {"role": role, "pd": d.to_pd(), "crossings": d.n_crossings, "det": det}
            for role, d, det in zip(("K2", "K1", "K0"), triple, dets)
        ],
        dets=list(dets),
        triangle=check.to_json(),
    )


def dumps(payload):
    return json.dumps(payload, indent=2)


def bigraded_frame(dims):
    """Khovanov-style table: one row per q, one column per h."""
    rows = dims.as_rows()
    if not rows:
        return pd.DataFrame()
    df = pd.DataFrame(rows, columns=["h", "q", "dim"])
    table = df.pivot_table(index="q", columns="h", values="dim", aggfunc="sum", fill_value=0)
    return table.sort_index(ascending=False)


def render_homology(name, dims, reduced):
    title = f"{'Khr' if reduced else 'Kh'}({name})  total = {dims.total}"
    frame = bigraded_frame(dims)
    body = frame.to_string() if not frame.empty else "(empty)"
    return f"{title}\n{body}"


def render_pages(name, tables, e_infinity_total):
    records = [
        {"page": f"E{t.r}", "weight": w, "dim": n} for t in tables for w, n in sorted(t.dims.items())
    ]
    lines = [f"Spectral sequence of {name}"]
    if records:
        df = pd.DataFrame(records)
        grid = df.pivot_table(index="page", columns="weight", values="dim", aggfunc="sum", fill_value=0)
        grid = grid.reindex([f"E{t.r}" for t in tables], fill_value=0)
        grid["total"] = grid.sum(axis=1)
        lines.append(grid.to_string())
    else:
        lines.append("(empty)")
    lines.append(f"E_inf total = {e_infinity_total}")
    return "\n".join(lines)


def render_hmr(payload):
    lines = [f"HMR-tilde model {payload['model']} (N = {payload['cutoff']})"]
    df = pd.DataFrame(payload["table"], columns=["grading", "dim"])
    lines.append(df.to_string(index=False) if not df.empty else "(empty)")
    lines.append(f"total = {payload['total_dim']}")
    if "abs_chi" in payload:
        per = ", ".join(f"{s}:{n}" for s, n in payload["per_spinc"])
        lines.append(f"per spin-c = {per}")
        lines.append(f"|chi| = {payload['abs_chi']}  formula = {payload['chi_formula']}")
        lines.append(f"ordinary |chi| = {payload['ordinary_abs_chi']}")
    return "\n".join(lines)


def render_branched(payload):
    factors = payload["h1_invariant_factors"]
    return (
        f"{payload['diagram']}: det = {payload['det']}, "
        f"H1 = {' + '.join(f'Z/{f}' if f else 'Z' for f in factors) or '0'}, "
        f"b1 = {payload['b1']}"
    )


def render_skein(payload):
    df = pd.DataFrame(payload["resolutions"])[["role", "crossings", "det", "pd"]]
    tri = payload["triangle"]
    status = "pass" if tri["passed"] else "fail: " + "; ".join(tri["violations"])
    return f"{df.to_string(index=False)}\ntriangle {tuple(tri['dims'])}: {status}"


def render_triangle(check):
    status = "pass" if check.passed else "fail: " + "; ".join(check.violations)
    return f"triangle {check.dims}: {status}"
