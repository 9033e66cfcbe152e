"""CSV and SVG writers for sweep rows."""

import csv
import io
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .sweep import SweepRow

CSV_COLUMNS = (
    "magnitude",
    "alpha_sq",
    "nbar",
    "p_err_classical",
    "p_err_optimal",
    "p_err_pgm",
    "p_err_vqc",
    "ykl_residual",
    "train_iterations",
    "seed",
)
INT_COLUMNS = {"train_iterations", "seed"}
Y_MIN, Y_MAX = 1e-6, 1.0


def _fmt(name, value):
    if name in INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".12g")


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(c, getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(rows, path):
    """Write rows with the fixed header; reals use 12 significant digits."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_csv(rows))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return path


def parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for lineno, fields in enumerate(reader, start=2):
        if len(fields) != len(CSV_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(CSV_COLUMNS)} columns, got {len(fields)}")
        values = {c: (int(v) if c in INT_COLUMNS else float(v)) for c, v in zip(CSV_COLUMNS, fields)}
        rows.append(SweepRow(**values))
    return rows


def read_csv(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read CSV {path}: {exc.strerror or exc}") from exc
    return parse_csv(text)


# --- SVG -------------------------------------------------------------------

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=170, top=30, bottom=55)
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _series_label(row):
    if row.temperature_kelvin is not None:
        t = row.temperature_kelvin
        return f"T = {t * 1e3:g} mK" if t < 1 else f"T = {t:g} K"
    return f"nbar = {row.nbar:.4g}"


def _group_key(row):
    return row.temperature_kelvin if row.temperature_kelvin is not None else row.nbar


def clip_log(y):
    """Clip to ``[1e-6, 1]`` and take log10."""
    if not math.isfinite(y):
        return None
    return math.log10(min(max(y, Y_MIN), Y_MAX))


def format_svg(rows, title="Codeword error probability"):
    rows = list(rows)
    if not rows:
        raise ValueError("cannot plot an empty sweep")
    x_max = max(r.magnitude for r in rows) or 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    lo, hi = math.log10(Y_MIN), math.log10(Y_MAX)

    def sx(x):
        return MARGIN["left"] + pw * x / x_max

    def sy(ly):
        return MARGIN["top"] + ph * (hi - ly) / (hi - lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    for decade in range(int(lo), int(hi) + 1):
        y = sy(decade)
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{y:.2f}" x2="{MARGIN["left"]}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{y + 4:.2f}" text-anchor="end">1e{decade}</text>')
    for k in range(6):
        xv = x_max * k / 5
        x = sx(xv)
        base = MARGIN["top"] + ph
        out.append(f'<line x1="{x:.2f}" y1="{base}" x2="{x:.2f}" y2="{base + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{base + 18}" text-anchor="middle">{xv:.2g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">|α| (received amplitude)</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2})">p_err</text>')

    legend = []
    classical = sorted({(r.magnitude, r.p_err_classical) for r in rows})
    pts = " ".join(f"{sx(m):.2f},{sy(clip_log(p)):.2f}" for m, p in classical if clip_log(p) is not None)
    out.append(f'<polyline class="series line" data-series="classical" fill="none" stroke="black" '
               f'stroke-width="1.5" points="{pts}"/>')
    legend.append(("classical (2-pulse Helstrom)", "black", "line"))

    groups = {}
    for r in rows:
        groups.setdefault(_group_key(r), []).append(r)
    for i, key in enumerate(sorted(groups)):
        color = PALETTE[i % len(PALETTE)]
        label = _series_label(groups[key][0])
        for field, marker in (("p_err_optimal", "square"), ("p_err_vqc", "circle")):
            name = f"{'optimal POVM' if field == 'p_err_optimal' else 'variational'}, {label}"
            out.append(f'<g class="series points" data-series="{escape(name)}" fill="{color}" stroke="{color}">')
            for r in sorted(groups[key], key=lambda r: r.magnitude):
                ly = clip_log(getattr(r, field))
                if ly is None:
                    continue
                x, y = sx(r.magnitude), sy(ly)
                if marker == "circle":
                    out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5"/>')
                else:
                    out.append(f'<rect x="{x - 3:.2f}" y="{y - 3:.2f}" width="6" height="6" fill="none"/>')
            out.append("</g>")
            legend.append((name, color, marker))

    lx = WIDTH - MARGIN["right"] + 12
    for j, (name, color, kind) in enumerate(legend):
        y = MARGIN["top"] + 14 + 18 * j
        if kind == "line":
            out.append(f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 16}" y2="{y - 4}" stroke="{color}" stroke-width="1.5"/>')
        elif kind == "circle":
            out.append(f'<circle cx="{lx + 8}" cy="{y - 4}" r="3.5" fill="{color}"/>')
        else:
            out.append(f'<rect x="{lx + 5}" y="{y - 7}" width="6" height="6" fill="none" stroke="{color}"/>')
        out.append(f'<text x="{lx + 22}" y="{y}" font-size="10">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(rows, path, title="Codeword error probability"):
    """Self-contained SVG: log p_err against magnitude."""
    text = format_svg(rows, title)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc.strerror or exc}") from exc
    return path
