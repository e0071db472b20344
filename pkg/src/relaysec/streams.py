"""Counter-based random streams for reproducible parallel simulation.

Every uniform draw is addressed by (seed, slot, trial, column): each slot
gets its own Philox key derived from (seed, stream label, slot), and rows
within a slot are reached by advancing the counter, so a worker holding
trials [a, b) generates exactly the same numbers the full array would
contain in rows a..b. Results therefore cannot depend on how trials are
partitioned across workers.

Philox advances in blocks of four 64-bit outputs and a double consumes one
output, so the per-row draw count is padded up to a multiple of four.
"""

from __future__ import annotations

import numpy as np

__all__ = ["padded_stride", "slot_uniforms", "derive_generator"]


def padded_stride(columns: int) -> int:
    """Row stride in uniforms: columns rounded up to a multiple of 4."""
    if columns < 1:
        raise ValueError("columns must be >= 1")
    return (columns + 3) & ~3


def _slot_key(seed: int, label: int, slot: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=(int(seed) & (2**64 - 1), int(label), int(slot)))
    return ss.generate_state(2, np.uint64)


def slot_uniforms(
    seed: int,
    slot: int,
    row_start: int,
    rows: int,
    columns: int,
    label: int = 0,
) -> np.ndarray:
    """Uniforms for trials [row_start, row_start+rows) at one slot.

    Returns a (rows, columns) float64 array in [0, 1). The same
    (seed, label, slot, absolute row, column) always yields the same value.
    """
    stride = padded_stride(columns)
    bg = np.random.Philox(key=_slot_key(seed, label, slot))
    if row_start:
        bg.advance(row_start * stride // 4)
    out = np.random.Generator(bg).random((rows, stride))
    return out[:, :columns]


def derive_generator(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for an addressed sub-task (e.g. a sweep row)."""
    ss = np.random.SeedSequence(entropy=(int(seed) & (2**64 - 1), *map(int, path)))
    return np.random.Generator(np.random.Philox(key=ss.generate_state(2, np.uint64)))
