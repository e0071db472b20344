"""Raw packet file format used by the codec CLI commands.

Layout: a 12-byte header of three little-endian uint32 fields
(packet count N, bits per packet L, padded flag 0/1) followed by N
packets of ceil(L/8) bytes each, bits packed MSB first.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .codec import PacketBlock

_HEADER = struct.Struct("<III")


class PacketFileError(ValueError):
    """Raised for malformed packet files."""


def write_packet_file(path: str | Path, block: PacketBlock, padded: bool) -> None:
    payload = block.packets.tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(block.n_count, block.bit_len, 1 if padded else 0))
        fh.write(payload)


def read_packet_file(path: str | Path) -> tuple[PacketBlock, bool]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise PacketFileError("truncated header")
    n, bit_len, flag = _HEADER.unpack_from(data)
    if n < 1:
        raise PacketFileError("packet count must be >= 1")
    if bit_len < 1:
        raise PacketFileError("bits per packet must be >= 1")
    if flag not in (0, 1):
        raise PacketFileError(f"padded flag must be 0 or 1, got {flag}")
    per = (bit_len + 7) // 8
    body = data[_HEADER.size :]
    if len(body) != n * per:
        raise PacketFileError(
            f"payload holds {len(body)} bytes, expected {n * per} "
            f"({n} packets of {per} bytes)"
        )
    mat = np.frombuffer(body, dtype=np.uint8).reshape(n, per).copy()
    try:
        block = PacketBlock(mat, bit_len)
    except ValueError as exc:
        raise PacketFileError(str(exc)) from exc
    return block, bool(flag)
