"""
Text formats for matrices and graphs, and rendering of reports.

Dense matrix text: the first line holds n, the next n lines hold n
whitespace-separated numbers each. Coordinate text: a ``%SymCoord n m`` header
followed by m lines ``i j value`` with 1-based ``i <= j``.
"""
import json
import logging
import math
from pathlib import Path

from .exceptions import ParseError
from .matcore import SymMatrix
from .specgraph import read_graph_text

logger = logging.getLogger(__name__)

COORDINATE_HEADER = '%SymCoord'


def _tokens(text):
    return [line.split() for line in text.splitlines() if line.strip()]


def _number(token):
    try:
        value = float(token)
    except ValueError as exc:
        raise ParseError(f"not a number: {token!r}") from exc
    if not math.isfinite(value):
        raise ParseError(f"non-finite entry {token!r}")
    return value


def _read_coordinate(lines, tol):
    header = lines[0]
    if len(header) != 3:
        raise ParseError(f"coordinate header must be '{COORDINATE_HEADER} n m'")
    try:
        n, m = int(header[1]), int(header[2])
    except ValueError as exc:
        raise ParseError(f"malformed coordinate header: {exc}") from exc
    body = lines[1:]
    if n < 1 or len(body) != m:
        raise ParseError(f"header announces n={n}, m={m} but {len(body)} entries follow")

    entries = {}
    for row in body:
        if len(row) != 3:
            raise ParseError(f"coordinate line needs 'i j value', got {' '.join(row)!r}")
        try:
            i, j = int(row[0]), int(row[1])
        except ValueError as exc:
            raise ParseError(f"malformed index: {exc}") from exc
        if not 1 <= i <= j <= n:
            raise ParseError(f"entry ({i}, {j}) must satisfy 1 <= i <= j <= {n}")
        if (i, j) in entries:
            raise ParseError(f"duplicate entry ({i}, {j})")
        entries[(i, j)] = _number(row[2])
    return SymMatrix.from_upper(n, [(i - 1, j - 1, v) for (i, j), v in entries.items()], tol=tol)


def read_matrix_text(text, tol=None):
    lines = _tokens(text)
    if not lines:
        raise ParseError("empty matrix input")
    if lines[0][0] == COORDINATE_HEADER:
        return _read_coordinate(lines, tol)

    if len(lines[0]) != 1:
        raise ParseError("first line of a dense matrix must hold n alone")
    try:
        n = int(lines[0][0])
    except ValueError as exc:
        raise ParseError(f"malformed dimension: {exc}") from exc
    rows = lines[1:]
    if n < 1 or len(rows) != n or any(len(row) != n for row in rows):
        raise ParseError(f"expected {n} rows of {n} entries")
    return SymMatrix([[_number(t) for t in row] for row in rows], tol=tol)


def write_matrix_text(A, coordinate=False):
    if coordinate:
        entries = [(i, j, A[i, j]) for i in range(A.n) for j in range(i, A.n) if A[i, j] != 0.0]
        lines = [f"{COORDINATE_HEADER} {A.n} {len(entries)}"]
        lines.extend(f"{i + 1} {j + 1} {float(v)!r}" for i, j, v in entries)
    else:
        lines = [str(A.n)]
        lines.extend(' '.join(repr(float(v)) for v in row) for row in A.to_list())
    return "\n".join(lines) + "\n"


def read_matrix_file(path, tol=None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    logger.debug("read matrix file %s", path)
    return read_matrix_text(text, tol=tol)


def read_graph_file(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return read_graph_text(text)


# ==================== RENDERING ====================

def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True)


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], out)
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i + 1}", item, out)
    elif isinstance(value, list):
        out.append(f"{prefix}: {' '.join(str(v) for v in value)}")
    else:
        out.append(f"{prefix}: {value}")


def render_text(report):
    lines = []
    _flatten('', report, lines)
    return "\n".join(lines)
