"""Binary and CSV persistence for traces.

Binary layout (".lktr"): a 64-byte header followed by channel-interleaved
little-endian float64 samples.

    bytes 0..3    magic "LKTR"
    bytes 4..7    format version (uint32, currently 1)
    bytes 8..15   sample interval dt in seconds (float64)
    bytes 16..23  sample count (uint64)
    bytes 24..27  channel mask (uint32): 1 intensity, 2 phase, 4 carriers
    bytes 28..35  seed (int64)
    bytes 36..63  reserved, zero

The CSV exporter writes t_ns, intensity and, when recorded, phase_rad and
carriers columns, preceded by '#' metadata comment lines.
"""

import struct

import numpy as np

from .integrator import Trace

MAGIC = b"LKTR"
VERSION = 1
CH_INTENSITY = 1
CH_PHASE = 2
CH_CARRIER = 4

_HEADER = struct.Struct("<4sIdQIq28x")
assert _HEADER.size == 64


class TraceFormatError(ValueError):
    """The file is not a valid binary trace."""


def write_trace(path, trace: Trace):
    """Write a trace in the binary format; returns the channel mask used."""
    mask = CH_INTENSITY
    columns = [trace.intensity]
    if trace.phase is not None:
        mask |= CH_PHASE
        columns.append(trace.phase)
    if trace.carriers is not None:
        mask |= CH_CARRIER
        columns.append(trace.carriers)
    seed = int(trace.meta.get("seed", 0))
    header = _HEADER.pack(MAGIC, VERSION, trace.dt, trace.intensity.size,
                          mask, seed)
    data = np.column_stack(columns).astype("<f8", copy=False)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())
    return mask


def read_trace(path) -> Trace:
    """Read a binary trace written by :func:`write_trace`."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise TraceFormatError(f"{path}: truncated header")
        magic, version, dt, count, mask, seed = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise TraceFormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise TraceFormatError(f"{path}: unsupported version {version}")
        nch = bin(mask & (CH_INTENSITY | CH_PHASE | CH_CARRIER)).count("1")
        if nch == 0:
            raise TraceFormatError(f"{path}: empty channel mask")
        data = np.frombuffer(fh.read(8 * nch * count), dtype="<f8")
    if data.size != nch * count:
        raise TraceFormatError(f"{path}: truncated payload")
    data = data.reshape(count, nch)
    col = 0
    intensity = phase = carriers = None
    if mask & CH_INTENSITY:
        intensity = np.ascontiguousarray(data[:, col])
        col += 1
    if mask & CH_PHASE:
        phase = np.ascontiguousarray(data[:, col])
        col += 1
    if mask & CH_CARRIER:
        carriers = np.ascontiguousarray(data[:, col])
        col += 1
    if intensity is None:
        raise TraceFormatError(f"{path}: trace has no intensity channel")
    return Trace(dt=dt, intensity=intensity, phase=phase, carriers=carriers,
                 meta={"seed": seed, "source": str(path)})


def metadata_lines(meta: dict):
    """Render trace metadata as CSV '#' comment lines."""
    lines = []
    for key in sorted(meta):
        lines.append(f"# {key} = {meta[key]!r}")
    return lines


def trace_to_csv(path, trace: Trace):
    """Export a trace as CSV with a metadata comment header."""
    with open(path, "w") as fh:
        for line in metadata_lines(trace.meta):
            fh.write(line + "\n")
        cols = ["t_ns", "intensity"]
        arrays = [trace.times * 1e9, trace.intensity]
        if trace.phase is not None:
            cols.append("phase_rad")
            arrays.append(trace.phase)
        if trace.carriers is not None:
            cols.append("carriers")
            arrays.append(trace.carriers)
        fh.write(",".join(cols) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
