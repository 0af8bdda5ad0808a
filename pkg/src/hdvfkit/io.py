"""Text formats and result emitters.

Complex file, one cell per line::

    <id> <dim> <k> <face_1> ... <face_k>

Filtration file, cells in any order, stably sorted by value on load::

    <id> <dim> <value> <k> <face_1> ... <face_k>

Basis file, one generator per line::

    <q> <cell> <cell> ...

Grid file: a ``width height`` header followed by ``height`` rows of ``width``
non-negative integers (``0`` = empty pixel).  Rows may be written as
whitespace-separated numbers or, for 0/1 grids, as a packed string.

Blank lines and anything after ``#`` are ignored everywhere.
"""

from __future__ import annotations

import csv
import io
import json

from hdvfkit.complex import Chain, ChainComplex, build_from_boundary_lists
from hdvfkit.persistence import Filtration, PersistenceDiagram


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield no, body


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", no) from None


def _faces(tokens, no):
    k = _int(tokens[0], no, "face count")
    if k < 0 or len(tokens) != k + 1:
        raise ParseError(f"expected {k} faces, got {len(tokens) - 1}", no)
    return tokens[1:]


def parse_complex(text: str) -> ChainComplex:
    records = []
    for no, tok in _lines(text):
        if len(tok) < 3:
            raise ParseError("expected '<id> <dim> <k> <faces...>'", no)
        dim = _int(tok[1], no, "dimension")
        records.append((tok[0], dim, _faces(tok[2:], no)))
    return build_from_boundary_lists(records)


def format_complex(k: ChainComplex) -> str:
    out = []
    for cell in k.cells:
        faces = k.sorted_ids(k.faces(cell.id))
        out.append(" ".join([cell.id, str(cell.dim), str(len(faces)), *faces]))
    return "\n".join(out) + ("\n" if out else "")


def _number(tok: str, no: int):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"filtration value must be a number, got {tok!r}", no) from None


def parse_filtration(text: str) -> Filtration:
    records = []
    for no, tok in _lines(text):
        if len(tok) < 4:
            raise ParseError("expected '<id> <dim> <value> <k> <faces...>'", no)
        records.append((tok[0], _int(tok[1], no, "dimension"), _number(tok[2], no), _faces(tok[3:], no)))
    return Filtration.from_cells(records)


def format_filtration(f: Filtration) -> str:
    out = []
    k = f.complex
    for cid in f.order:
        faces = k.sorted_ids(k.faces(cid))
        value = f.value_at(f.step_of[cid])
        out.append(" ".join([cid, str(k.dim(cid)), str(value), str(len(faces)), *faces]))
    return "\n".join(out) + ("\n" if out else "")


def parse_grid(text: str) -> list[list[int]]:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("missing 'width height' header")
    no, head = lines[0]
    if len(head) != 2:
        raise ParseError("header must be 'width height'", no)
    width, height = (_int(t, no, "grid size") for t in head)
    if width < 0 or height < 0:
        raise ParseError("grid size must be non-negative", no)
    rows = []
    for no, tok in lines[1:]:
        if len(tok) == 1 and len(tok[0]) == width and width > 1:
            tok = list(tok[0])
        if len(tok) != width:
            raise ParseError(f"expected {width} pixels, got {len(tok)}", no)
        row = [_int(t, no, "pixel") for t in tok]
        if any(v < 0 for v in row):
            raise ParseError("pixels must be non-negative", no)
        rows.append(row)
    if len(rows) != height:
        raise ParseError(f"expected {height} rows, got {len(rows)}")
    return rows


def parse_basis(text: str, k: ChainComplex) -> dict[int, list[Chain]]:
    """Generators grouped by dimension, in file order."""
    out: dict[int, list[Chain]] = {}
    for no, tok in _lines(text):
        q = _int(tok[0], no, "dimension")
        for c in tok[1:]:
            if c not in k:
                raise ParseError(f"unknown cell {c!r}", no)
            if k.dim(c) != q:
                raise ParseError(f"cell {c!r} has dimension {k.dim(c)}, not {q}", no)
        out.setdefault(q, []).append(Chain.from_cells(q, tok[1:]))
    return out


# -- result document ----------------------------------------------------------

DOCUMENT_KEYS = ("betti", "generators", "diagram", "hdvf", "tripartition", "report", "verdict")


def chain_ids(k: ChainComplex, chain: Chain) -> list[str]:
    return k.sorted_ids(chain.support)


def result_document(**fields) -> dict:
    """Result with every key present; unknown keys are rejected."""
    bad = set(fields) - set(DOCUMENT_KEYS)
    if bad:
        raise KeyError(f"unknown result fields {sorted(bad)}")
    doc = {
        "betti": {},
        "generators": {},
        "diagram": [],
        "hdvf": {},
        "tripartition": None,
        "report": "",
        "verdict": None,
    }
    doc.update(fields)
    return doc


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def diagram_rows(diagram: PersistenceDiagram) -> list[list]:
    return [[p.q, p.birth, p.death] for p in diagram]


def diagram_csv(diagram: PersistenceDiagram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "birth", "death"])
    for p in diagram:
        w.writerow([p.q, p.birth, "inf" if p.death is None else p.death])
    return buf.getvalue()


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def diagram_svg(diagram: PersistenceDiagram, size: int = 320) -> str:
    """Birth on x, death on y; infinite points sit on a band above the plot."""
    pad, band = 36, 24
    finite = [p.death for p in diagram if p.death is not None]
    top = max([p.birth for p in diagram] + finite + [1]) + 1
    plot = size - 2 * pad
    y0 = pad + band

    def sx(v):
        return pad + plot * v / top

    def sy(v):
        return y0 + plot - plot * v / top

    height = y0 + plot + pad
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" '
        f'viewBox="0 0 {size} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{pad}" y="{y0}" width="{plot}" height="{plot}" fill="none" stroke="#888"/>',
        f'<line x1="{sx(0):.1f}" y1="{sy(0):.1f}" x2="{sx(top):.1f}" y2="{sy(top):.1f}" stroke="#aaa"/>',
        f'<line x1="{pad}" y1="{pad + band / 2:.1f}" x2="{pad + plot}" y2="{pad + band / 2:.1f}" '
        'stroke="#ccc" stroke-dasharray="4 3"/>',
        f'<text x="{pad - 4}" y="{pad + band / 2 + 4:.1f}" text-anchor="end">&#8734;</text>',
        f'<text x="{pad + plot / 2:.1f}" y="{height - 8}" text-anchor="middle">birth</text>',
        f'<text x="12" y="{y0 + plot / 2:.1f}" transform="rotate(-90 12 {y0 + plot / 2:.1f})" '
        'text-anchor="middle">death</text>',
    ]
    for p in diagram:
        cy = pad + band / 2 if p.death is None else sy(p.death)
        color = _COLORS[p.q % len(_COLORS)]
        out.append(
            f'<circle cx="{sx(p.birth):.1f}" cy="{cy:.1f}" r="4" fill="{color}">'
            f"<title>H{p.q} ({p.birth}, {'inf' if p.death is None else p.death})</title></circle>"
        )
    dims = sorted({p.q for p in diagram})
    for i, q in enumerate(dims):
        out.append(
            f'<text x="{pad + plot - 4}" y="{y0 + plot - 8 - 14 * i}" text-anchor="end" '
            f'fill="{_COLORS[q % len(_COLORS)]}">H{q}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def error_witness(exc: BaseException) -> str | None:
    """Cell or chain attached to a library error, as text."""
    for attr in ("cell", "witness"):
        w = getattr(exc, attr, None)
        if w is None:
            continue
        if isinstance(w, Chain):
            return " + ".join(sorted(w.support)) or "0"
        return str(w)
    report = getattr(exc, "report", None)
    if report is not None and getattr(report, "missing_private", None):
        return "generator " + ", ".join(map(str, report.missing_private))
    return None


def sorted_labels(k: ChainComplex, labels: dict) -> dict[str, str]:
    return {c: str(labels[c].value) for c in k.ids() if c in labels}
