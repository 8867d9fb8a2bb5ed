"""File formats: group specs (JSON), metric grids (CSV) and static figures (SVG)."""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import metadata
from pathlib import Path

import numpy as np

from .group import FuchsianGroupSpec
from .moebius import DiskAutomorphism, Geodesic

SCHEMA_VERSION = "1.0"
NORMALIZATION_TOL = 1e-9
FIELD_COLUMNS = ("zeta_re", "zeta_im", "beta", "beta_certified", "alpha", "alpha_lo", "alpha_hi", "rho_lower")


class SpecFormatError(ValueError):
    """A group-spec file is malformed or its generators are not normalized."""


def package_version() -> str:
    try:
        return metadata.version("leafscope")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def provenance(command: str, **params) -> dict:
    """Header stored in every JSON output."""
    return {"schema_version": SCHEMA_VERSION, "package_version": package_version(), "command": command, **params}


def group_to_dict(group: FuchsianGroupSpec, extensions: dict | None = None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "generators": [
            {"label": lab, "a_re": g.a.real, "a_im": g.a.imag, "b_re": g.b.real, "b_im": g.b.imag}
            for lab, g in zip(group.labels, group.generators)
        ],
    }
    if extensions:
        out["extensions"] = extensions
    return out


def group_from_dict(data: dict) -> tuple[FuchsianGroupSpec, dict]:
    """Parse a group spec; returns ``(group, extensions)``."""
    if not isinstance(data, dict) or "generators" not in data:
        raise SpecFormatError("group spec needs a 'generators' list")
    version = str(data.get("schema_version", ""))
    if version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise SpecFormatError(f"unsupported schema version {version!r}")
    gens, labels = [], []
    for k, rec in enumerate(data["generators"]):
        try:
            a = complex(float(rec["a_re"]), float(rec["a_im"]))
            b = complex(float(rec["b_re"]), float(rec["b_im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"generator {k}: {exc}") from exc
        det = abs(a) ** 2 - abs(b) ** 2
        # |a|^2 - |b|^2 carries rounding of order eps |a|^2, so the tolerance is relative
        if abs(det - 1.0) > NORMALIZATION_TOL * max(1.0, abs(a) ** 2):
            raise SpecFormatError(f"generator {k}: |a|^2 - |b|^2 = {det!r} is not 1")
        gens.append(DiskAutomorphism(a, b))
        labels.append(str(rec.get("label", f"g{k + 1}")))
    return FuchsianGroupSpec(tuple(gens), tuple(labels)), dict(data.get("extensions") or {})


def write_json(path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False)
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")


def write_group(path, group: FuchsianGroupSpec, extensions: dict | None = None, header: dict | None = None) -> dict:
    payload = group_to_dict(group, extensions)
    if header:
        payload = {"provenance": header, **payload}
    write_json(path, payload)
    return payload


def read_group(path) -> tuple[FuchsianGroupSpec, dict]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"{path}: {exc}") from exc
    return group_from_dict(data)


# ---------------------------------------------------------------------------
# grids


def polar_grid(r_max: float, n_r: int, n_theta: int) -> np.ndarray:
    """Row-major polar grid: radii ``r_max * k / n_r`` (k = 1..n_r) times ``n_theta`` angles."""
    r = r_max * np.arange(1, n_r + 1) / n_r
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


def field_csv(records) -> str:
    """CSV text with fixed columns and round-trip float formatting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELD_COLUMNS)
    for rec in records:
        row = []
        for col in FIELD_COLUMNS:
            v = rec[col]
            row.append(str(bool(v)).lower() if col == "beta_certified" else repr(float(v)))
        w.writerow(row)
    return buf.getvalue()


def read_field_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        out.append({k: (r[k] == "true") if k == "beta_certified" else float(r[k]) for k in FIELD_COLUMNS})
    return out


# ---------------------------------------------------------------------------
# figures


def _geodesic_points(geo: Geodesic, n: int = 64) -> np.ndarray:
    p, q = (e.z for e in geo.endpoints)
    circ = geo.circle()
    if circ is None:
        return np.linspace(p, q, n)
    c, rad = circ
    t0, t1 = np.angle(p - c), np.angle(q - c)
    inner = np.angle(-c)
    # walk from p to q the short way, which passes the point nearest the origin
    d = (t1 - t0 + math.pi) % (2 * math.pi) - math.pi
    mid = (inner - t0 + math.pi) % (2 * math.pi) - math.pi
    if np.sign(mid) != np.sign(d) and abs(mid) > 1e-12:
        d = d - math.copysign(2 * math.pi, d)
    return c + rad * np.exp(1j * (t0 + d * np.linspace(0.0, 1.0, n)))


def render_svg(geodesics=(), limit_points=(), horocycles=(), size: int = 512) -> str:
    """Unit disk with geodesics (blue), limit-set samples (red) and horocycles (green)."""
    half = size / 2
    scale = 0.48 * size

    def xy(z):
        return half + scale * z.real, half - scale * z.imag

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{half:.3f}" cy="{half:.3f}" r="{scale:.3f}" fill="none" stroke="black" stroke-width="1"/>',
    ]
    for geo in geodesics:
        pts = " ".join("{:.3f},{:.3f}".format(*xy(z)) for z in _geodesic_points(geo))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1"/>')
    for h in horocycles:
        cx, cy = xy(h.center)
        parts.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{scale * h.radius:.3f}" fill="none" stroke="#2a8a3e" stroke-width="1"/>')
    for lp in limit_points:
        z = lp.point.z if hasattr(lp, "point") else complex(lp)
        cx, cy = xy(z)
        parts.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="1.5" fill="#c0392b"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
