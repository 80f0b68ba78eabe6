"""Reproducible random streams for chunked Monte Carlo.

Paths are partitioned into fixed-size chunks; chunk i draws from an
independent generator spawned from SeedSequence(seed).  Chunks are
independent work units, so results are bit-identical regardless of how many
workers process them or in what order.  CHUNK_SIZE is part of the algorithm
definition (changing it changes the realized draws), not a tuning knob.
"""

from __future__ import annotations

from typing import Iterator, List, Tuple

import numpy as np

CHUNK_SIZE = 4096


def chunk_plan(seed: int, n_paths: int) -> List[Tuple[int, int, np.random.SeedSequence]]:
    """Fixed partition of path indices [0, n_paths) into seeded chunks."""
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths!r}")
    n_chunks = (n_paths + CHUNK_SIZE - 1) // CHUNK_SIZE
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    plan = []
    for i, child in enumerate(children):
        start = i * CHUNK_SIZE
        stop = min(start + CHUNK_SIZE, n_paths)
        plan.append((start, stop, child))
    return plan


def chunk_generators(seed: int, n_paths: int) -> Iterator[Tuple[int, int, np.random.Generator]]:
    for start, stop, child in chunk_plan(seed, n_paths):
        yield start, stop, np.random.Generator(np.random.PCG64(child))


def derive_seeds(seed: int, n: int) -> List[int]:
    """Deterministic child seeds for composite procedures that run several
    independent simulations under one master seed."""
    state = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [int(x) for x in state]
