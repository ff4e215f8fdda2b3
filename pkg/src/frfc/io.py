"""Plain-text serialization for problems, forecasters and datasets.

Document format (one item per line, ``#`` starts a comment)::

    frfc <kind> 1
    name = resource-allocation
    matrix c 1 20
    7.5 11.2 ...
    end

Scalars are ``key = value`` lines.  A ``matrix NAME ROWS COLS`` header is
followed by ``ROWS`` lines of ``COLS`` numbers written with ``repr`` so that
values round-trip exactly.  ``kind`` is ``problem``, ``instance``,
``affine`` or ``tree``.
"""
from __future__ import annotations

import csv
import io as _io
from typing import Dict, List, Tuple

import numpy as np

from .errors import InvalidParameter
from .forecasters import AffineForecaster, TreeForecaster, TreeHyper, TreeNode
from .two_stage import FrfcProblem

FORMAT_VERSION = 1


def _fmt(v: float) -> str:
    return repr(float(v))


class _Writer:
    def __init__(self, kind: str):
        self.lines = [f"frfc {kind} {FORMAT_VERSION}"]

    def scalar(self, key: str, value) -> None:
        self.lines.append(f"{key} = {value}")

    def matrix(self, name: str, M) -> None:
        M = np.atleast_2d(np.asarray(M, dtype=float))
        rows, cols = M.shape
        self.lines.append(f"matrix {name} {rows} {cols}")
        # an empty row has no text line
        for r in range(rows if cols else 0):
            self.lines.append(" ".join(_fmt(v) for v in M[r]))

    def text(self) -> str:
        return "\n".join(self.lines + ["end"]) + "\n"


def _parse(text: str) -> Tuple[str, Dict[str, str], Dict[str, np.ndarray], List[Tuple[str, ...]]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InvalidParameter("empty document")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "frfc":
        raise InvalidParameter("missing 'frfc <kind> <version>' header")
    if int(head[2]) != FORMAT_VERSION:
        raise InvalidParameter(f"unsupported format version {head[2]}")
    scalars: Dict[str, str] = {}
    matrices: Dict[str, np.ndarray] = {}
    records: List[Tuple[str, ...]] = []
    i = 1
    while i < len(lines):
        ln = lines[i]
        if ln == "end":
            return head[1], scalars, matrices, records
        if ln.startswith("matrix "):
            _, name, rows, cols = ln.split()
            rows, cols = int(rows), int(cols)
            n_lines = rows if cols else 0
            data = [list(map(float, lines[i + 1 + r].split())) for r in range(n_lines)]
            matrices[name] = np.array(data, dtype=float).reshape(rows, cols)
            i += 1 + n_lines
            continue
        if " = " in ln:
            key, value = ln.split(" = ", 1)
            scalars[key.strip()] = value.strip()
        else:
            records.append(tuple(ln.split()))
        i += 1
    raise InvalidParameter("document is missing its 'end' line")


def dump_problem(p: FrfcProblem, inst=None) -> str:
    """Serialize a problem; with ``inst`` the ``xi -> h`` map is stored too."""
    w = _Writer("instance" if inst is not None else "problem")
    w.scalar("name", p.name or "unnamed")
    w.matrix("c", p.c[None, :])
    w.matrix("A", p.A)
    w.matrix("b", p.b[None, :])
    w.matrix("W", p.W)
    w.matrix("q", p.q[None, :])
    w.matrix("T", p.T)
    if inst is not None:
        if not inst.fixed_T:
            raise InvalidParameter("only fixed-T instances have a text form")
        w.scalar("xi_dim", inst.xi_dim)
        w.matrix("xi_map", inst.xi_map)
        w.matrix("xi_offset", inst.xi_offset[None, :])
    return w.text()


def load_problem(text: str):
    """Inverse of :func:`dump_problem`: a problem, or an instance without closed forms."""
    kind, sc, mx, _ = _parse(text)
    if kind not in ("problem", "instance"):
        raise InvalidParameter(f"expected a problem document, got {kind!r}")
    p = FrfcProblem(mx["c"][0], mx["A"], mx["b"][0] if mx["b"].size else [],
                    mx["W"], mx["q"][0], mx["T"], name=sc.get("name", ""))
    if kind == "problem":
        return p
    from .problems import Instance

    return Instance(p, int(sc["xi_dim"]), xi_map=mx["xi_map"], xi_offset=mx["xi_offset"][0],
                    name=p.name)


def dump_forecaster(f) -> str:
    if isinstance(f, AffineForecaster):
        w = _Writer("affine")
        w.matrix("intercept", f.intercept[None, :])
        w.matrix("slopes", f.slopes)
        return w.text()
    if not isinstance(f, TreeForecaster):
        raise InvalidParameter(f"cannot serialize {type(f).__name__}")
    w = _Writer("tree")
    w.scalar("n_features", f.n_features)
    w.scalar("n_outputs", f.n_outputs)
    w.scalar("min_leaf", f.hyper.min_leaf)
    w.scalar("max_depth", "none" if f.hyper.max_depth is None else f.hyper.max_depth)
    for k, node in enumerate(f.nodes):
        w.lines.append(f"node {k} {node.feature} {_fmt(node.threshold)} {node.left} {node.right} {node.leaf}")
    for leaf, payload in enumerate(f.payloads):
        if payload is None:
            w.lines.append(f"leaf {leaf} none")
        elif isinstance(payload, AffineForecaster):
            w.lines.append(f"leaf {leaf} affine")
            w.matrix(f"intercept_{leaf}", payload.intercept[None, :])
            w.matrix(f"slopes_{leaf}", payload.slopes)
        else:
            w.lines.append(f"leaf {leaf} constant")
            w.matrix(f"value_{leaf}", np.asarray(payload)[None, :])
    return w.text()


def load_forecaster(text: str):
    kind, sc, mx, rec = _parse(text)
    if kind == "affine":
        return AffineForecaster(mx["intercept"][0], mx["slopes"])
    if kind != "tree":
        raise InvalidParameter(f"expected a forecaster document, got {kind!r}")
    nodes = []
    payloads = []
    for r in rec:
        if r[0] == "node":
            nodes.append(TreeNode(int(r[2]), float(r[3]), int(r[4]), int(r[5]), int(r[6])))
        elif r[0] == "leaf":
            leaf, what = int(r[1]), r[2]
            if what == "none":
                payloads.append(None)
            elif what == "affine":
                payloads.append(AffineForecaster(mx[f"intercept_{leaf}"][0], mx[f"slopes_{leaf}"]))
            else:
                payloads.append(mx[f"value_{leaf}"][0])
    depth = sc.get("max_depth", "none")
    hyper = TreeHyper(int(sc["min_leaf"]), None if depth == "none" else int(depth))
    return TreeForecaster(nodes, payloads, int(sc["n_features"]), int(sc["n_outputs"]), hyper)


def write_dataset(X, Xi, out=None, header=()) -> str:
    """CSV with columns ``x_1..x_s, xi_1..xi_m``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
    buf = _io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x_{i + 1}" for i in range(X.shape[1])] + [f"xi_{j + 1}" for j in range(Xi.shape[1])])
    for x, xi in zip(X, Xi):
        w.writerow([_fmt(v) for v in x] + [_fmt(v) for v in xi])
    text = buf.getvalue()
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def read_dataset(text: str):
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(rows)
    names = next(reader)
    s = sum(1 for n in names if n.startswith("x_"))
    data = np.array([[float(v) for v in r] for r in reader], dtype=float).reshape(-1, len(names))
    return data[:, :s], data[:, s:]
