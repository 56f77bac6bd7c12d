"""Analysis reports: JSON-safe conversion, schema validation and text rendering."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import metadata, resources

import numpy as np

from .symbol import GaussianRational

TOP_LEVEL_KEYS = ("input", "polyhedron", "classification", "hypo", "verification", "config", "version")


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def jsonable(obj):
    """Recursively convert to plain JSON types.

    Rationals become ``"p/q"``, complex numbers ``[re, im]``, and non-finite
    floats the strings ``"+inf"``, ``"-inf"`` or ``"n/a"``.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, GaussianRational):
        return [jsonable(obj.re), jsonable(obj.im)]
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "n/a"
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    return obj


def dumps(report: dict) -> str:
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(jsonable(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("hypogevrey").joinpath("report_schema.json").read_text())


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if the report does not match the schema."""
    import jsonschema

    jsonschema.validate(jsonable(report), load_schema())


# ---------------------------------------------------------------------------
# text

def _q(x) -> str:
    return x[:-2] if isinstance(x, str) and x.endswith("/1") else str(x)


def _fmt_vertices(vs) -> str:
    return "{" + ", ".join("(" + ", ".join(_q(x) for x in v) + ")" for v in vs) + "}"


def render_text(report: dict) -> str:
    r = jsonable(report)
    lines = [f"hypogevrey {r['version']}"]
    inp = r["input"]
    lines.append(f"symbol     {inp['symbol']}  (dimension {inp['dimension']})")
    if "polyhedron" in r:
        p = r["polyhedron"]
        lines.append(f"Γ(P)       vertices {_fmt_vertices(p['vertices'])}")
        lines.append(f"           regular {p['regular']}, formal order {_q(p['formal_order'])}")
    if "classification" in r:
        c = r["classification"]
        mq, hy = c["mq"], c["hypoelliptic"]
        lines.append(f"MQ         {mq['kind']}  ({mq['reason']})")
        if mq["witness_direction"] is not None:
            lines.append(f"           witness direction {mq['witness_direction']}")
        lines.append(f"hypoell.   {hy['kind']}  ({hy['reason']})")
        if hy["witness_direction"] is not None:
            lines.append(f"           witness direction {hy['witness_direction']}")
        ex = hy.get("exponents", {})
        if ex:
            lines.append(f"           d_hat {ex.get('d_hat')}  rho_hat {ex.get('rho_hat')}")
        lines.append(f"           [{mq['label']}]")
    if "hypo" in r:
        h = r["hypo"]
        if "error" in h:
            lines.append(f"H          not constructed: {h['error']}")
        else:
            lines.append(f"H          vertices {_fmt_vertices(h['vertices'])}")
            lines.append(f"σ          {_q(h['sigma'])}")
            lines.append(f"Q_H        {h['q_operator']}")
            g = h["gevrey"]
            lines.append(f"μ_H, μ_Q   {_q(g['mu_H'])}, {_q(g['mu_Q'])}")
            lines.append(f"paper_class  G^(s,H) with s = {_q(g['paper_class']['s'])}")
            lines.append(
                f"sharp_class  G^(s,σH) with s = {_q(g['sharp_class']['s'])} on {_fmt_vertices(g['sharp_class']['vertices'])}"
            )
            sens = g["sensitivity"]
            lines.append(f"H/2        σ = {sens['sigma']}, paper_class s = {_q(sens['paper_class_s'])}")
            if g["mq_case"] is not None:
                lines.append(f"MQ case    {g['mq_case']['note']}")
    if "verification" in r:
        v = r["verification"]
        t = v["iterate_growth"]
        lines.append(
            f"Q_H^j u    {t['count']} witnesses, j <= {v['jmax']}: sup fitted C {t['sup_fitted_C']}, "
            f"all satisfied {t['all_satisfied']}"
        )
        for name, fit in v["gevrey_fit"].items():
            lines.append(f"Gevrey fit {name}: C {fit['C']}, late/early {fit['late_over_early']}")
    return "\n".join(lines) + "\n"
