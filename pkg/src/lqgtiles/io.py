"""File formats: annotated CSV tables, tiling dumps, gnuplot emission.

CSV tables (format version 1) start with ``#``-prefixed metadata lines
(format, tool version, config hash, command-specific keys) followed by a
header row and data rows.  Column sets per table kind:

  kpz      epsilon,replica,count,unresolved_hits
  measure  epsilon,replica,count,rescaled
  ball     radius,replica,count,truncated
  ptp      epsilon,replica,distance,censored

Tiling dumps (format version 1) are line-oriented text: ``#`` metadata
(q, epsilon, depth_cap, domain, field id, restricted) then one record
``level ix iy mass flag`` per square, flag 0 = accepted, 1 = unresolved,
in deterministic (level, ix, iy) order.  Floats are written with repr so
round trips are bit-exact.
"""
import csv
import io as _io

import numpy as np

from .errors import ConfigError
from .params import params_from_q
from .squares import DyadicSquare
from .tiling import Tiling

CSV_FORMAT_VERSION = 1
TILING_FORMAT_VERSION = 1


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def render_csv(kind: str, columns, rows, meta: dict) -> str:
    """Render an annotated CSV table to a string (LF line endings)."""
    buf = _io.StringIO()
    buf.write(f"# lqgtiles-{kind} format={CSV_FORMAT_VERSION}\n")
    for k in sorted(meta):
        buf.write(f"# {k}={_fmt(meta[k])}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(path: str, kind: str, columns, rows, meta: dict) -> None:
    with open(path, "w", newline="") as f:
        f.write(render_csv(kind, columns, rows, meta))


def read_csv(path: str):
    """Read an annotated CSV table -> (kind, meta, columns, rows-as-strings)."""
    meta = {}
    kind = None
    with open(path) as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            text = line[1:].strip()
            if text.startswith("lqgtiles-"):
                kind = text.split()[0][len("lqgtiles-"):]
                for part in text.split()[1:]:
                    k, _, v = part.partition("=")
                    meta[k] = v
            elif "=" in text:
                k, _, v = text.partition("=")
                meta[k] = v
        else:
            body.append(line)
    if not body:
        raise ConfigError(f"{path}: no CSV header row")
    rows = list(csv.reader(body))
    return kind, meta, rows[0], rows[1:]


# -- tiling dumps -------------------------------------------------------------

def dump_tiling(tiling: Tiling, path: str) -> None:
    with open(path, "w") as f:
        f.write(f"# lqgtiles-tiling format={TILING_FORMAT_VERSION}\n")
        f.write(f"# q={_fmt(tiling.params.q)}\n")
        f.write(f"# epsilon={_fmt(tiling.epsilon)}\n")
        f.write(f"# depth_cap={tiling.depth_cap}\n")
        d = tiling.domain
        f.write(f"# domain={d.level} {d.ix} {d.iy}\n")
        f.write(f"# field={tiling.field_id}\n")
        f.write(f"# restricted={_fmt(tiling.restricted)}\n")
        f.write(f"# visited={tiling.visited}\n")
        for l, x, y, m in zip(tiling.levels, tiling.ixs, tiling.iys,
                              tiling.masses):
            f.write(f"{l} {x} {y} {_fmt(m)} 0\n")
        for l, x, y, m in zip(tiling.un_levels, tiling.un_ixs, tiling.un_iys,
                              tiling.un_masses):
            f.write(f"{l} {x} {y} {_fmt(m)} 1\n")


def load_tiling(path: str) -> Tiling:
    meta = {}
    recs = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                text = line[1:].strip()
                if text.startswith("lqgtiles-tiling"):
                    continue
                k, _, v = text.partition("=")
                meta[k.strip()] = v.strip()
            else:
                recs.append(line.split())
    for key in ("q", "epsilon", "depth_cap", "domain"):
        if key not in meta:
            raise ConfigError(f"{path}: missing tiling header key {key!r}")
    acc = [(int(l), int(x), int(y), float(m)) for l, x, y, m, fl in recs
           if fl == "0"]
    unr = [(int(l), int(x), int(y), float(m)) for l, x, y, m, fl in recs
           if fl == "1"]

    def _cols(items):
        if not items:
            return (np.array([], dtype=np.int64),) * 3 + (np.array([]),)
        a = list(zip(*items))
        return (np.array(a[0], dtype=np.int64), np.array(a[1], dtype=np.int64),
                np.array(a[2], dtype=np.int64), np.array(a[3], dtype=float))

    levels, ixs, iys, masses = _cols(acc)
    un_levels, un_ixs, un_iys, un_masses = _cols(unr)
    dl, dx, dy = (int(s) for s in meta["domain"].split())
    return Tiling(domain=DyadicSquare(dl, dx, dy),
                  epsilon=float(meta["epsilon"]),
                  params=params_from_q(float(meta["q"])),
                  field_id=meta.get("field", "unknown"),
                  depth_cap=int(meta["depth_cap"]),
                  levels=levels, ixs=ixs, iys=iys, masses=masses,
                  un_levels=un_levels, un_ixs=un_ixs, un_iys=un_iys,
                  un_masses=un_masses,
                  restricted=meta.get("restricted", "0") == "1",
                  visited=int(meta.get("visited", "0")))


def same_tiling(a: Tiling, b: Tiling) -> bool:
    """Bit-exact equality of two tilings (geometry, masses, metadata)."""
    return (a.domain == b.domain and a.epsilon == b.epsilon
            and a.params.q == b.params.q and a.depth_cap == b.depth_cap
            and a.restricted == b.restricted
            and all(np.array_equal(x, y) for x, y in (
                (a.levels, b.levels), (a.ixs, b.ixs), (a.iys, b.iys),
                (a.masses, b.masses), (a.un_levels, b.un_levels),
                (a.un_ixs, b.un_ixs), (a.un_iys, b.un_iys),
                (a.un_masses, b.un_masses))))


# -- gnuplot emission ---------------------------------------------------------

def emit_plot(prefix: str, title: str, xlabel: str, ylabel: str,
              series: dict, logscale: bool = True) -> tuple[str, str]:
    """Write <prefix>.dat (two columns per series, blank-line separated
    blocks) and <prefix>.gp (a gnuplot script reading it).  Returns the
    two paths."""
    dat = prefix + ".dat"
    gp = prefix + ".gp"
    names = list(series)
    with open(dat, "w") as f:
        for i, name in enumerate(names):
            xs, ys = series[name]
            f.write(f"# {name}\n")
            for x, y in zip(xs, ys):
                f.write(f"{_fmt(float(x))} {_fmt(float(y))}\n")
            if i != len(names) - 1:
                f.write("\n\n")
    with open(gp, "w") as f:
        f.write(f'set title "{title}"\n')
        f.write(f'set xlabel "{xlabel}"\n')
        f.write(f'set ylabel "{ylabel}"\n')
        if logscale:
            f.write("set logscale xy\n")
        f.write("set key left top\n")
        plots = ", ".join(
            f'"{dat}" index {i} using 1:2 with linespoints title "{name}"'
            for i, name in enumerate(names))
        f.write(f"plot {plots}\n")
    return dat, gp
