"""Parallel batch verification as a map-reduce over epochs.

Map: each worker derives the leaf seeds of its epochs and reduces its
entries' ephemeral keys to per-epoch sums.  Reduce: the coordinator adds the
per-epoch sums mod q and performs the single group check.  Modular addition
is associative and commutative, so the result does not depend on how epochs
are split between workers or in which order they finish.
"""
from __future__ import annotations

import atexit
import os
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import primitives as prim
from .group import Q, commit_check
from .primitives import Suite
from .scheme_c import EpochSignature, PublicKeyC, _check_batches
from .seeds import SeedNode, SeedStack, leaf_seeds

CHUNK_BYTES = 64 * 1024 * 1024

_pools: dict[int, ProcessPoolExecutor] = {}


@dataclass(frozen=True)
class EpochKeyAggregate:
    epoch: int
    e_tilde: int


def default_workers() -> int:
    env = os.environ.get("POSLO_WORKERS")
    if env:
        return int(env)
    return 1


def get_pool(workers: int) -> ProcessPoolExecutor:
    """Shared process pool for ``workers`` processes, created on first use."""
    pool = _pools.get(workers)
    if pool is None:
        pool = _pools[workers] = ProcessPoolExecutor(max_workers=workers)
    return pool


@atexit.register
def shutdown_pools():
    for pool in _pools.values():
        pool.shutdown(wait=False, cancel_futures=True)
    _pools.clear()


def _map_chunk(suite: int, nodes: list[tuple[int, int, bytes]], epochs: list[int],
               batches: list[Sequence[bytes]]) -> list[int]:
    ds = SeedStack(tuple(SeedNode(*n) for n in nodes))
    seeds = leaf_seeds(Suite(suite), ds, epochs)
    return prim.challenge_sums(
        Suite(suite), [seeds[i] for i in epochs], [list(enumerate(b)) for b in batches])


def _split(items: list, parts: int) -> list[list]:
    k, r = divmod(len(items), parts)
    out, pos = [], 0
    for p in range(parts):
        n = k + (1 if p < r else 0)
        if n:
            out.append(items[pos:pos + n])
        pos += n
    return out


def agg_ekeys(suite: Suite, batches: Mapping[int, Sequence[bytes]], ds: SeedStack,
              workers: int = 1, executor: Executor | None = None) -> list[EpochKeyAggregate]:
    """Per-epoch ephemeral-key sums, ordered by epoch index.

    With ``workers == 1`` everything runs in the calling process; otherwise
    epochs are split into contiguous chunks mapped over a process pool.
    """
    if workers < 1:
        raise ValueError("workers must be a positive integer")
    epochs = sorted(batches)
    for i in epochs:
        ds.node_for(i)  # fail fast, in the coordinator, on undisclosed epochs
    nodes = [(n.depth, n.index, n.value) for n in ds]
    if workers == 1 and executor is None:
        sums = _map_chunk(int(suite), nodes, epochs, [batches[i] for i in epochs])
    else:
        pool = executor or get_pool(workers)
        chunks = _split(epochs, workers * 2 if len(epochs) >= workers * 2 else workers)
        futures = [pool.submit(_map_chunk, int(suite), nodes, c, [batches[i] for i in c])
                   for c in chunks]
        sums = [v for f in futures for v in f.result()]
    return [EpochKeyAggregate(i, e) for i, e in zip(epochs, sums)]


def paver(pk: PublicKeyC, batches: Mapping[int, Sequence[bytes]], sig: EpochSignature,
          workers: int = 1, executor: Executor | None = None) -> bool:
    """Parallel counterpart of :func:`poslo.scheme_c.verify`; same decision."""
    if not batches:
        raise ValueError("no epochs to verify")
    _check_batches(pk.config, batches)
    parts = agg_ekeys(pk.config.suite, batches, sig.ds, workers, executor)
    e_hat = 0
    for p in parts:
        e_hat = (e_hat + p.e_tilde) % Q
    R = sig.R_hat if sig.R_hat is not None else pk.commitment(sorted(batches))
    return R == commit_check(pk.Y, e_hat, sig.s_hat)


def paver_stream(pk: PublicKeyC, chunks: Iterable[Mapping[int, Sequence[bytes]]], sig: EpochSignature,
                 workers: int = 1, executor: Executor | None = None) -> bool:
    """:func:`paver` over epoch-aligned chunks, carrying the running e_hat."""
    e_hat = 0
    seen: list[int] = []
    for chunk in chunks:
        _check_batches(pk.config, chunk)
        for p in agg_ekeys(pk.config.suite, chunk, sig.ds, workers, executor):
            e_hat = (e_hat + p.e_tilde) % Q
        seen.extend(chunk)
    if not seen:
        raise ValueError("no epochs to verify")
    if len(set(seen)) != len(seen):
        raise ValueError("an epoch appears in more than one chunk")
    R = sig.R_hat if sig.R_hat is not None else pk.commitment(sorted(seen))
    return R == commit_check(pk.Y, e_hat, sig.s_hat)
