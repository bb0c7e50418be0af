"""Reading and writing polygon ensembles.

Text format::

    polyfile 1 <dim> <n> <closed:0|1> <count>
    # optional comment lines anywhere
    <n rows of dim coordinates, 17 significant digits>   (repeated count times)

Binary format: a fixed 36-byte little-endian preamble ``b"POLYFILE"``,
version, dim, closed (uint32 each), n, count (uint64 each), followed by
``count * n * dim`` little-endian float64 values. Both round-trip bit-exactly.
"""

import io
import struct
from dataclasses import dataclass

import numpy as np

__all__ = ["PolyFile", "PolyFileError", "write_text", "read_text", "write_binary", "read_binary", "write", "read"]

VERSION = 1
TEXT_TAG = "polyfile"
BINARY_MAGIC = b"POLYFILE"
_PREAMBLE = struct.Struct("<8sIIIQQ")


class PolyFileError(ValueError):
    pass


@dataclass(eq=False)
class PolyFile:
    """A header plus an edge array of shape ``(count, n, dim)``."""

    edges: np.ndarray
    closed: bool

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.float64)
        if self.edges.ndim != 3 or self.edges.shape[2] not in (2, 3):
            raise PolyFileError(f"edges must have shape (count, n, 2|3), got {self.edges.shape}")
        self.closed = bool(self.closed)

    @property
    def count(self):
        return self.edges.shape[0]

    @property
    def n(self):
        return self.edges.shape[1]

    @property
    def dim(self):
        return self.edges.shape[2]

    def polygons(self):
        from .sampler import Polygon

        return [Polygon(e, closed=self.closed) for e in self.edges]


def _header(pf):
    return f"{TEXT_TAG} {VERSION} {pf.dim} {pf.n} {int(pf.closed)} {pf.count}\n"


def write_text(pf, stream, comments=()):
    stream.write(_header(pf))
    for line in comments:
        stream.write(f"# {line}\n")
    rows = pf.edges.reshape(-1, pf.dim)
    buf = io.StringIO()
    np.savetxt(buf, rows, fmt="%.17g")
    stream.write(buf.getvalue())


def _data_lines(stream):
    for raw in stream:
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line


def read_text(stream):
    lines = _data_lines(stream)
    try:
        head = next(lines).split()
    except StopIteration:
        raise PolyFileError("empty polyfile") from None
    if len(head) != 6 or head[0] != TEXT_TAG:
        raise PolyFileError(f"bad polyfile header: {' '.join(head)!r}")
    version, dim, n, closed, count = (int(h) for h in head[1:])
    if version != VERSION:
        raise PolyFileError(f"unsupported polyfile version {version}")
    if dim not in (2, 3) or closed not in (0, 1):
        raise PolyFileError("header has invalid dim or closed flag")
    body = " ".join(lines)
    values = np.array(body.split(), dtype=np.float64) if body else np.empty(0)
    if values.size != count * n * dim:
        raise PolyFileError(f"expected {count * n * dim} coordinates, found {values.size}")
    return PolyFile(values.reshape(count, n, dim), bool(closed))


def write_binary(pf, stream):
    stream.write(_PREAMBLE.pack(BINARY_MAGIC, VERSION, pf.dim, int(pf.closed), pf.n, pf.count))
    stream.write(np.ascontiguousarray(pf.edges, dtype="<f8").tobytes())


def read_binary(stream):
    pre = stream.read(_PREAMBLE.size)
    if len(pre) != _PREAMBLE.size:
        raise PolyFileError("truncated binary polyfile preamble")
    magic, version, dim, closed, n, count = _PREAMBLE.unpack(pre)
    if magic != BINARY_MAGIC:
        raise PolyFileError("not a binary polyfile")
    if version != VERSION:
        raise PolyFileError(f"unsupported polyfile version {version}")
    if dim not in (2, 3) or closed not in (0, 1):
        raise PolyFileError("preamble has invalid dim or closed flag")
    nbytes = count * n * dim * 8
    data = stream.read(nbytes)
    if len(data) != nbytes:
        raise PolyFileError(f"expected {nbytes} data bytes, found {len(data)}")
    edges = np.frombuffer(data, dtype="<f8").astype(np.float64).reshape(count, n, dim)
    return PolyFile(edges, bool(closed))


def write(pf, path, fmt="text", comments=()):
    if fmt == "text":
        with open(path, "w", encoding="ascii", newline="\n") as f:
            write_text(pf, f, comments)
    elif fmt == "binary":
        with open(path, "wb") as f:
            write_binary(pf, f)
    else:
        raise ValueError(f"unknown polyfile format {fmt!r}")


def read(path):
    """Read either format, telling them apart by the leading bytes."""
    with open(path, "rb") as f:
        magic = f.read(len(BINARY_MAGIC))
    if magic == BINARY_MAGIC:
        with open(path, "rb") as f:
            return read_binary(f)
    with open(path, encoding="ascii") as f:
        return read_text(f)
