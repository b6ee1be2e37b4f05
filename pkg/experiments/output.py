"""
Run artifacts: field snapshots and time series as CSV, a JSON manifest and a
16-bit PGM density map with a JSON sidecar.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import numpy as np

from core.errors import InsufficientSnapshots, IOFailure, NormalizationError
from core.utils import save_json_file

logger = logging.getLogger(__name__)

PGM_MAXVAL = 65535
NUMBER_FORMAT = "%.12e"

PathLike = Union[str, Path]


def ensure_dir(path: PathLike) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOFailure(f"cannot create output directory {path}: {exc}", path=str(path)) from exc
    return path


def field_filename(t: float) -> str:
    return f"fields_t{t:.4f}.csv"


def write_field_csv(field, path: PathLike) -> Path:
    """Columns x, re, im, abs2"""
    path = Path(path)
    data = np.column_stack([field.grid.x, field.amplitudes.real, field.amplitudes.imag, field.density])
    try:
        np.savetxt(path, data, delimiter=",", header="x,re,im,abs2", comments="", fmt=NUMBER_FORMAT)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}", path=str(path)) from exc
    return path


def write_fields(record, out_dir: PathLike, stride: int = 1) -> List[Path]:
    """fields_t*.csv for every stride-th stored snapshot (the last one always included)"""
    out_dir = ensure_dir(out_dir)
    written = []
    last = len(record.fields) - 1
    for i, snapshot in enumerate(record.fields):
        if i % stride == 0 or i == last:
            written.append(write_field_csv(snapshot, out_dir / field_filename(snapshot.t)))
    return written


def write_rows(rows: Iterable[Dict[str, Any]], path: PathLike) -> Path:
    """CSV with the union of row keys as columns, in first-seen order"""
    rows = list(rows)
    path = Path(path)
    fieldnames: List[str] = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=fieldnames, restval="")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _cell(value) for key, value in row.items()})
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}", path=str(path)) from exc
    return path


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return NUMBER_FORMAT % float(value)
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    return value


def write_manifest(manifest: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    if not save_json_file(str(path), manifest):
        raise IOFailure(f"cannot write manifest {path}", path=str(path))
    return path


def emit_density_pgm(record, path: PathLike, write_csv: bool = True) -> Dict[str, Any]:
    """
    Binary PGM (P5, 16-bit big-endian) of |Psi|^2 with rows = time, earliest on top

    Pixel values are round(65535 |Psi|^2 / max|Psi|^2). A JSON sidecar with the
    axis ranges and the normalisation constant is written next to the image,
    and a gnuplot-ready CSV (blank line between time rows) when write_csv is set.

    Args:
        record: PropagationRecord with >= 2 stored fields
        path: image path (e.g. run/density.pgm)
        write_csv: also write density.csv

    Returns:
        Sidecar dictionary

    Raises:
        InsufficientSnapshots: fewer than 2 stored fields
        NormalizationError: max|Psi|^2 = 0
        IOFailure: the image or sidecar cannot be written
    """
    fields = record.fields
    if len(fields) < 2:
        raise InsufficientSnapshots(f"density map needs >= 2 snapshots, got {len(fields)}", snapshots=len(fields))
    density = np.vstack([snapshot.density for snapshot in fields])
    peak = float(density.max())
    if not peak > 0.0:
        raise NormalizationError("density map is identically zero; max|Psi|^2 = 0")

    pixels = np.rint(PGM_MAXVAL * density / peak).astype(">u2")
    height, width = pixels.shape
    path = Path(path)
    grid = fields[0].grid
    times = [snapshot.t for snapshot in fields]
    sidecar = {
        "image": path.name,
        "format": "P5",
        "maxval": PGM_MAXVAL,
        "width": width,
        "height": height,
        "rows": "time, earliest at top",
        "columns": "x",
        "x_first": float(grid.x[0]),
        "x_last": float(grid.x[-1]),
        "dx": grid.dx,
        "t_first": times[0],
        "t_last": times[-1],
        "times": times,
        "normalization": peak,
    }
    try:
        with open(path, "wb") as handle:
            handle.write(f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii"))
            handle.write(pixels.tobytes())
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}", path=str(path)) from exc
    write_manifest(sidecar, path.with_suffix(".json"))

    if write_csv:
        csv_path = path.with_suffix(".csv")
        try:
            with open(csv_path, "w") as handle:
                handle.write("# t,x,abs2\n")
                for t, row in zip(times, density):
                    block = np.column_stack([np.full(width, t), grid.x, row])
                    np.savetxt(handle, block, delimiter=",", fmt=NUMBER_FORMAT)
                    handle.write("\n")
        except OSError as exc:
            raise IOFailure(f"cannot write {csv_path}: {exc}", path=str(csv_path)) from exc

    logger.info(f"Density map {width}x{height} written to {path}")
    return sidecar


def read_pgm(path: PathLike) -> np.ndarray:
    """Read back a 16-bit P5 image as an array of shape (height, width)"""
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise IOFailure(f"{path} is not a binary PGM", path=str(path))
    width, height = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[3], dtype=dtype).reshape(height, width)


def write_profiles(q: np.ndarray, columns: Dict[str, np.ndarray], path: PathLike) -> Path:
    """CSV of synthesized profiles: q followed by the named columns"""
    path = Path(path)
    names = ["q"] + list(columns)
    data = np.column_stack([q] + [np.asarray(columns[name], dtype=float) for name in columns])
    try:
        np.savetxt(path, data, delimiter=",", header=",".join(names), comments="", fmt=NUMBER_FORMAT)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}", path=str(path)) from exc
    return path
