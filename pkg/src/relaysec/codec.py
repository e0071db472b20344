"""XOR self-encryption block code.

The code maps N equal-length packets (I_1, ..., I_N) to processed packets
(P_1, ..., P_N) with P_n = XOR of every input packet except I_n, i.e. the
generator matrix is all-ones minus identity over GF(2). For even N that
matrix is its own inverse, so decoding is the identical operation. The
point of the construction: any collection of at most N-2 processed packets
reveals nothing about any individual input packet, N-1 of them reveal
exactly one, and all N reveal everything.

Packets are stored as packed bytes (most significant bit first), so the
per-packet XOR is a word-level operation and the whole encode costs at
most 2N packet XORs regardless of packet length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "CodecMeta",
    "OpCounter",
    "PacketBlock",
    "decode",
    "encode",
    "pad_to_even",
    "recoverable_indices",
    "unpad",
]


def _n_bytes(bit_len: int) -> int:
    return (bit_len + 7) // 8


def _tail_mask(bit_len: int) -> int:
    # Mask for the last byte: keep the high (bit_len mod 8) bits, MSB first.
    rem = bit_len % 8
    return 0xFF if rem == 0 else (0xFF << (8 - rem)) & 0xFF


class PacketBlock:
    """An ordered block of equal-length bit packets.

    Parameters
    ----------
    packets : (N, ceil(L/8)) uint8 array
        Packed packet bits, MSB first within each byte. Bits beyond
        ``bit_len`` in the final byte must be zero.
    bit_len : int
        Number of significant bits L per packet, L >= 1.
    """

    __slots__ = ("packets", "bit_len")

    def __init__(self, packets: np.ndarray, bit_len: int):
        packets = np.ascontiguousarray(packets, dtype=np.uint8)
        if packets.ndim != 2:
            raise ValueError("packets must be a 2-D (N, bytes) array")
        if bit_len < 1:
            raise ValueError("bit_len must be >= 1")
        if packets.shape[0] < 1:
            raise ValueError("block must contain at least one packet")
        if packets.shape[1] != _n_bytes(bit_len):
            raise ValueError(
                f"packet rows have {packets.shape[1]} bytes, expected "
                f"{_n_bytes(bit_len)} for bit_len={bit_len}"
            )
        mask = _tail_mask(bit_len)
        if mask != 0xFF and np.any(packets[:, -1] & np.uint8(0xFF ^ mask)):
            raise ValueError("bits beyond bit_len must be zero in the last byte")
        self.packets = packets
        self.bit_len = int(bit_len)

    @property
    def n_count(self) -> int:
        return self.packets.shape[0]

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]]) -> "PacketBlock":
        """Build a block from explicit 0/1 bit rows (testing convenience)."""
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D bit array")
        packed = np.packbits(arr, axis=1)
        return cls(packed, arr.shape[1])

    @classmethod
    def from_bytes(cls, rows: Iterable[bytes], bit_len: int) -> "PacketBlock":
        mat = [np.frombuffer(r, dtype=np.uint8) for r in rows]
        lens = {m.shape[0] for m in mat}
        if len(lens) != 1:
            raise ValueError("packets have mismatched lengths")
        return cls(np.stack(mat), bit_len)

    @classmethod
    def random(cls, n: int, bit_len: int, rng: np.random.Generator) -> "PacketBlock":
        raw = rng.integers(0, 256, size=(n, _n_bytes(bit_len)), dtype=np.uint8)
        raw[:, -1] &= np.uint8(_tail_mask(bit_len))
        return cls(raw, bit_len)

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(self.packets, axis=1)[:, : self.bit_len]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PacketBlock):
            return NotImplemented
        return self.bit_len == other.bit_len and np.array_equal(
            self.packets, other.packets
        )

    def __repr__(self) -> str:
        return f"PacketBlock(n={self.n_count}, bit_len={self.bit_len})"


@dataclass(frozen=True)
class CodecMeta:
    """Padding record for a block that may have had a packet appended."""

    original_n: int
    padded: bool
    pad_seed: Optional[int] = None

    def __post_init__(self):
        if self.padded != (self.original_n % 2 == 1):
            raise ValueError("padded must be set iff original_n is odd")
        if self.padded and self.pad_seed is None:
            raise ValueError("padded blocks must record the pad seed")


@dataclass
class OpCounter:
    """Counts packet-level XOR operations; pass to encode/decode to audit cost."""

    xor_ops: int = 0

    def add(self, n: int = 1) -> None:
        self.xor_ops += n


def _check_even(block: PacketBlock, op: str) -> None:
    if block.n_count % 2 != 0:
        raise ValueError(
            f"{op} requires an even packet count, got {block.n_count}; "
            "call pad_to_even first"
        )


def encode(block: PacketBlock, counter: Optional[OpCounter] = None) -> PacketBlock:
    """Produce the processed block: output n is the XOR of all inputs but n.

    Runs as one pass accumulating the XOR of all packets (N-1 packet XORs)
    followed by one XOR per output packet, 2N-1 packet XORs total.
    """
    _check_even(block, "encode")
    total = block.packets[0].copy()
    for i in range(1, block.n_count):
        total ^= block.packets[i]
        if counter is not None:
            counter.add()
    out = block.packets ^ total[np.newaxis, :]
    if counter is not None:
        counter.add(block.n_count)
    return PacketBlock(out, block.bit_len)


def decode(block: PacketBlock, counter: Optional[OpCounter] = None) -> PacketBlock:
    """Invert :func:`encode`. The code matrix is an involution for even N,
    so this is the same computation under a clearer name."""
    _check_even(block, "decode")
    return encode(block, counter)


def recoverable_indices(received: Iterable[int], n_total: int) -> frozenset[int]:
    """Which original packets (1-based) follow from a set of processed ones.

    With fewer than ``n_total - 1`` processed packets nothing is
    recoverable; with exactly ``n_total - 1`` only the original whose index
    matches the missing processed packet; with all of them, everything.
    """
    if n_total < 2 or n_total % 2 != 0:
        raise ValueError("n_total must be an even integer >= 2")
    got = frozenset(int(i) for i in received)
    if not all(1 <= i <= n_total for i in got):
        raise ValueError(f"received indices must lie in 1..{n_total}")
    if len(got) <= n_total - 2:
        return frozenset()
    if len(got) == n_total - 1:
        (missing,) = frozenset(range(1, n_total + 1)) - got
        return frozenset({missing})
    return frozenset(range(1, n_total + 1))


def pad_to_even(block: PacketBlock, seed: int) -> tuple[PacketBlock, CodecMeta]:
    """Append one seeded-random packet when the count is odd.

    The pad content is random rather than fixed so an eavesdropper gains no
    known plaintext; the seed travels out of band (see CodecMeta). Even
    blocks pass through untouched.
    """
    if block.n_count % 2 == 0:
        return block, CodecMeta(original_n=block.n_count, padded=False)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    pad = rng.integers(0, 256, size=(1, block.packets.shape[1]), dtype=np.uint8)
    pad[:, -1] &= np.uint8(_tail_mask(block.bit_len))
    padded = np.concatenate([block.packets, pad], axis=0)
    meta = CodecMeta(original_n=block.n_count, padded=True, pad_seed=int(seed))
    return PacketBlock(padded, block.bit_len), meta


def unpad(block: PacketBlock, meta: CodecMeta) -> PacketBlock:
    """Drop the pad packet recorded in ``meta``."""
    if not meta.padded:
        return block
    if block.n_count != meta.original_n + 1:
        raise ValueError("block size does not match padding metadata")
    return PacketBlock(block.packets[:-1].copy(), block.bit_len)
