"""CSV/JSON serialization and the flat key-value config reader."""

from __future__ import annotations

import json
import math
import re
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .derivative import GridFunction

_HEADER = re.compile(r"#\s*t,value;\s*domain=\[([^,\]]+),([^\]]+)\];\s*n=(\d+)\s*$")


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double."""
    return f"{float(x):.17g}"


def write_grid_csv(path: str | Path, g: GridFunction) -> None:
    lines = [f"# t,value; domain=[{fmt(g.a)},{fmt(g.b)}]; n={g.n}"]
    lines += [f"{fmt(t)},{fmt(v)}" for t, v in zip(g.t, g.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_grid_csv(path: str | Path) -> GridFunction:
    text = Path(path).read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty file")
    m = _HEADER.match(text[0].strip())
    if not m:
        raise ValueError(f"{path}: first line must be '# t,value; domain=[a,b]; n=N'")
    a, b, n = float(m.group(1)), float(m.group(2)), int(m.group(3))
    rows = [ln for ln in text[1:] if ln.strip() and not ln.lstrip().startswith("#")]
    values = np.array([float(r.split(",")[1]) for r in rows])
    if values.size != n:
        raise ValueError(f"{path}: header declares n={n} but has {values.size} rows")
    return GridFunction(a, b, values)


def write_table_csv(path: str | Path | None, columns: Mapping[str, Sequence[float]]) -> str:
    """Write named columns of equal length; returns the text (also when path is None)."""
    names = list(columns)
    cols = [np.asarray(columns[c], dtype=float) for c in names]
    if len({c.size for c in cols}) > 1:
        raise ValueError("columns must have equal length")
    lines = [",".join(names)]
    lines += [",".join(fmt(c[i]) for c in cols) for i in range(cols[0].size)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path | None, obj) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# config files
#
# One ``key = value`` per line, ``#`` starts a comment.  Values are numbers,
# true/false, double-quoted strings, bare words, or ``[a, b, ...]`` lists of
# those.  Keys use the long flag names with '-' or '_'.

_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _scalar(tok: str, where: str):
    tok = tok.strip()
    if not tok:
        raise ValueError(f"{where}: empty value")
    if tok.startswith('"'):
        if len(tok) < 2 or not tok.endswith('"'):
            raise ValueError(f"{where}: unterminated string")
        return tok[1:-1]
    if tok in ("true", "false"):
        return tok == "true"
    if _NUMBER.match(tok):
        return float(tok) if any(c in tok for c in ".eE") else int(tok)
    return tok


def _strip_comment(line: str) -> str:
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def parse_config(text: str, source: str = "<config>") -> dict:
    cfg: dict = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        where = f"{source}:{no}"
        if "=" not in line:
            raise ValueError(f"{where}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_-]*", key):
            raise ValueError(f"{where}: bad key {key!r}")
        key = key.replace("-", "_")
        if key in cfg:
            raise ValueError(f"{where}: duplicate key {key!r}")
        if value.startswith("["):
            if not value.endswith("]"):
                raise ValueError(f"{where}: unterminated list")
            body = value[1:-1].strip()
            cfg[key] = [_scalar(v, where) for v in body.split(",")] if body else []
        else:
            cfg[key] = _scalar(value, where)
    return cfg


def read_config(path: str | Path) -> dict:
    return parse_config(Path(path).read_text(), str(path))
