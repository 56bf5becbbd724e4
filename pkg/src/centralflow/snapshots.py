"""Raster file format for cell fields (saturation snapshots, permeability).

Layout: an ASCII header of ``key value`` lines terminated by ``end-header``,
then the payload -- one ``repr`` float per line in text mode (exact
round-trip), or little-endian 64-bit floats in raw mode (bit-exact
round-trip).  Payload order is the documented flat cell order (k outer, j
inner).  See docs/formats.md.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField, StructuredGrid

MAGIC = "centralflow-raster"
VERSION = "1"
TEXT = "text"
RAW = "raw"


class FormatError(ValueError):
    """Malformed raster file."""


@dataclass
class SnapshotFile:
    """A cell field plus the header metadata it was stored with."""

    field: ScalarField
    kind: str = "saturation"
    time_days: float = 0.0
    scheme: str = "-"
    config_hash: str = "-"
    mode: str = TEXT
    extra: dict = None

    @property
    def grid(self) -> StructuredGrid:
        return self.field.grid


def _format_float(x: float) -> str:
    return repr(float(x))


def write_snapshot(path, snap: SnapshotFile):
    """Write a raster file; byte-identical for identical inputs."""
    if snap.mode not in (TEXT, RAW):
        raise FormatError(f"unknown payload mode {snap.mode!r}")
    g = snap.grid
    header = [
        f"{MAGIC} {VERSION}",
        f"kind {snap.kind}",
        f"nx {g.nx}",
        f"ny {g.ny}",
        f"lx {_format_float(g.lx)}",
        f"ly {_format_float(g.ly)}",
        f"time_days {_format_float(snap.time_days)}",
        f"scheme {snap.scheme}",
        f"config_hash {snap.config_hash}",
        f"mode {snap.mode}",
        "end-header",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        flat = snap.field.flat()
        if snap.mode == RAW:
            fh.write(flat.astype("<f8").tobytes())
        else:
            fh.write("".join(_format_float(v) + "\n" for v in flat).encode("ascii"))


def read_snapshot(path) -> SnapshotFile:
    """Read a raster file written by :func:`write_snapshot`."""
    with open(path, "rb") as fh:
        data = fh.read()
    head_end = data.find(b"end-header\n")
    if head_end < 0:
        raise FormatError(f"{path}: missing end-header line")
    payload = data[head_end + len(b"end-header\n"):]
    meta = {}
    lines = data[:head_end].decode("ascii", errors="replace").splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise FormatError(f"{path}: not a {MAGIC} file")
    for line in lines[1:]:
        if not line.strip():
            continue
        key, _, value = line.partition(" ")
        meta[key] = value.strip()
    try:
        nx, ny = int(meta["nx"]), int(meta["ny"])
        lx, ly = float(meta["lx"]), float(meta["ly"])
        mode = meta["mode"]
    except KeyError as exc:
        raise FormatError(f"{path}: missing header field {exc}") from exc
    grid = StructuredGrid(nx, ny, lx, ly)
    n = nx * ny
    if mode == RAW:
        if len(payload) != 8 * n:
            raise FormatError(
                f"{path}: raw payload holds {len(payload) // 8} values, expected {n}"
            )
        flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    elif mode == TEXT:
        flat = np.loadtxt(io.BytesIO(payload), dtype=np.float64, ndmin=1)
        if flat.size != n:
            raise FormatError(f"{path}: text payload holds {flat.size} values, expected {n}")
    else:
        raise FormatError(f"{path}: unknown payload mode {mode!r}")
    known = {"kind", "nx", "ny", "lx", "ly", "time_days", "scheme", "config_hash", "mode"}
    return SnapshotFile(
        field=ScalarField.from_flat(grid, flat),
        kind=meta.get("kind", "field"),
        time_days=float(meta.get("time_days", 0.0)),
        scheme=meta.get("scheme", "-"),
        config_hash=meta.get("config_hash", "-"),
        mode=mode,
        extra={k: v for k, v in meta.items() if k not in known} or None,
    )
