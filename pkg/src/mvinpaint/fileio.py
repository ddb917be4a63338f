"""File formats: the MVI image container and PBM (P1) masks.

MVI layout: six ASCII header lines terminated by newlines,

    MVI1
    manifold <kind> [<param>]
    rows <R>
    cols <C>
    byteorder LE
    count <N>

followed immediately by N raw little-endian float64 values, row-major pixel
order, point components contiguous per pixel.  write/read round-trips are
bit exact.

Masks are plain PBM (P1): 1 marks an unknown pixel, 0 a known one, matching
the usual black-on-white convention for holes.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, FileFormatError
from .image import Mask, MvImage
from .manifolds import ManifoldDescriptor

MAGIC = "MVI1"


def _descriptor_tokens(desc: ManifoldDescriptor) -> str:
    if desc.kind in ("euclidean", "spd"):
        return f"{desc.kind} {desc.dim}"
    return desc.kind


def _descriptor_from_tokens(tokens) -> ManifoldDescriptor:
    if not tokens:
        raise FileFormatError("manifold line is empty")
    kind = tokens[0]
    try:
        if kind in ("euclidean", "spd"):
            if len(tokens) != 2:
                raise FileFormatError(f"manifold {kind} needs one size parameter")
            return ManifoldDescriptor(kind, int(tokens[1]))
        if kind in ("circle", "sphere2"):
            if len(tokens) != 1:
                raise FileFormatError(f"manifold {kind} takes no parameter")
            return ManifoldDescriptor(kind)
    except (ValueError, DimensionMismatch) as e:
        raise FileFormatError(f"bad manifold declaration: {e}") from e
    raise FileFormatError(f"unknown manifold kind {kind!r}")


def write_mvi(img: MvImage, path):
    """Write an image to an MVI file; payload bytes come straight from data."""
    img.validate()
    count = img.vertex_count * img.descriptor.point_len
    header = (
        f"{MAGIC}\n"
        f"manifold {_descriptor_tokens(img.descriptor)}\n"
        f"rows {img.rows}\n"
        f"cols {img.cols}\n"
        "byteorder LE\n"
        f"count {count}\n"
    )
    payload = np.ascontiguousarray(img.data, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def _read_header_line(fh, what):
    raw = bytearray()
    while True:
        ch = fh.read(1)
        if not ch:
            raise FileFormatError(f"truncated header while reading {what}")
        if ch == b"\n":
            break
        raw.extend(ch)
        if len(raw) > 256:
            raise FileFormatError(f"header line for {what} too long")
    try:
        return raw.decode("ascii").strip()
    except UnicodeDecodeError as e:
        raise FileFormatError(f"non-ascii header line for {what}") from e


def _parse_int_field(line, name):
    parts = line.split()
    if len(parts) != 2 or parts[0] != name:
        raise FileFormatError(f"expected '{name} <value>' line, got {line!r}")
    try:
        value = int(parts[1])
    except ValueError as e:
        raise FileFormatError(f"bad integer in {name!r} line") from e
    if value < 1:
        raise FileFormatError(f"{name} must be positive, got {value}")
    return value


def read_mvi(path) -> MvImage:
    """Read and validate an MVI file.

    Raises FileFormatError for malformed headers, payload size mismatches
    (reported with expected and actual byte counts) and pixels violating the
    manifold invariants (reported with the pixel index).
    """
    with open(path, "rb") as fh:
        magic = _read_header_line(fh, "magic")
        if magic != MAGIC:
            raise FileFormatError(f"not an MVI file: first line {magic!r}")
        man_line = _read_header_line(fh, "manifold")
        parts = man_line.split()
        if not parts or parts[0] != "manifold":
            raise FileFormatError(f"expected manifold line, got {man_line!r}")
        desc = _descriptor_from_tokens(parts[1:])
        rows = _parse_int_field(_read_header_line(fh, "rows"), "rows")
        cols = _parse_int_field(_read_header_line(fh, "cols"), "cols")
        order_line = _read_header_line(fh, "byteorder")
        if order_line != "byteorder LE":
            raise FileFormatError(f"expected 'byteorder LE', got {order_line!r}")
        count = _parse_int_field(_read_header_line(fh, "count"), "count")
        expected = rows * cols * desc.point_len
        if count != expected:
            raise FileFormatError(
                f"count {count} does not match rows*cols*point_len = {expected}"
            )
        payload = fh.read()
    if len(payload) != 8 * count:
        raise FileFormatError(
            f"payload size mismatch: expected {8 * count} bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(
        rows, cols, desc.point_len
    )
    img = MvImage(desc, data)
    try:
        img.validate()
    except DimensionMismatch as e:
        raise FileFormatError(str(e)) from e
    return img


def write_mask(mask: Mask, path):
    """Write a mask as PBM P1; 1 = unknown, 0 = known."""
    lines = [f"P1\n{mask.cols} {mask.rows}\n"]
    bits = (~mask.known).astype(np.uint8)
    for i in range(mask.rows):
        row = " ".join(str(int(b)) for b in bits[i])
        # keep PBM lines under the customary 70 character limit
        while len(row) > 68:
            cut = row.rfind(" ", 0, 68)
            lines.append(row[:cut] + "\n")
            row = row[cut + 1 :]
        lines.append(row + "\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(lines)


def read_mask(path) -> Mask:
    """Read a PBM P1 mask; accepts comments and arbitrary whitespace."""
    with open(path, "rb") as fh:
        text = fh.read()
    try:
        text = text.decode("ascii")
    except UnicodeDecodeError as e:
        raise FileFormatError("mask file is not ascii") from e
    tokens = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    if len(tokens) < 3 or tokens[0] != "P1":
        raise FileFormatError("not a PBM P1 file")
    try:
        cols = int(tokens[1])
        rows = int(tokens[2])
    except ValueError as e:
        raise FileFormatError("bad PBM dimensions") from e
    if rows < 1 or cols < 1:
        raise FileFormatError("PBM dimensions must be positive")
    bits = "".join(tokens[3:])  # P1 allows bits with or without separators
    if len(bits) != rows * cols:
        raise FileFormatError(
            f"PBM bit count mismatch: expected {rows * cols}, got {len(bits)}"
        )
    arr = np.empty(rows * cols, dtype=np.uint8)
    for n, b in enumerate(bits):
        if b == "0":
            arr[n] = 0
        elif b == "1":
            arr[n] = 1
        else:
            raise FileFormatError(f"bad PBM bit {b!r} at position {n}")
    known = (arr == 0).reshape(rows, cols)
    if not known.any():
        raise FileFormatError("mask marks every pixel unknown")
    return Mask(known)
