"""Packet file format: layout, roundtrips, and rejection of malformed input."""

import struct

import numpy as np
import pytest

from relaysec.codec import PacketBlock
from relaysec.packetfile import PacketFileError, read_packet_file, write_packet_file


def test_layout_is_header_plus_packed_rows(tmp_path):
    block = PacketBlock.from_bits([[1, 0, 1, 1, 0, 0, 1, 1], [0] * 8])
    path = tmp_path / "p.bin"
    write_packet_file(path, block, padded=False)
    raw = path.read_bytes()
    assert raw[:12] == struct.pack("<III", 2, 8, 0)
    assert raw[12:] == bytes([0b10110011, 0])


def test_roundtrip_odd_bit_len(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=3))
    block = PacketBlock.random(5, 13, rng)
    path = tmp_path / "p.bin"
    write_packet_file(path, block, padded=True)
    back, padded = read_packet_file(path)
    assert padded is True
    assert back == block


@pytest.mark.parametrize(
    "mutate,message",
    [
        (lambda raw: raw[:8], "truncated"),
        (lambda raw: struct.pack("<III", 0, 8, 0) + raw[12:], "packet count"),
        (lambda raw: struct.pack("<III", 2, 0, 0) + raw[12:], "bits per packet"),
        (lambda raw: struct.pack("<III", 2, 8, 9) + raw[12:], "padded flag"),
        (lambda raw: raw + b"\x00", "payload"),
        (lambda raw: raw[:-1], "payload"),
    ],
)
def test_malformed_files_rejected(tmp_path, mutate, message):
    block = PacketBlock.from_bits([[1, 0, 1, 1, 0, 0, 1, 1], [0] * 8])
    path = tmp_path / "p.bin"
    write_packet_file(path, block, padded=False)
    (tmp_path / "bad.bin").write_bytes(mutate(path.read_bytes()))
    with pytest.raises(PacketFileError, match=message):
        read_packet_file(tmp_path / "bad.bin")
