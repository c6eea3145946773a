"""PRF and message-hash primitives for the three instantiation suites.

========  =============  ==================
suite     PRF            message hash H
========  =============  ==================
1         SHA-256        SHA-256
2         MMO-AES-128    MDC-2-AES-128
3         MMO-AES-128    addition mod q
========  =============  ==================

Scalar helpers (:func:`prf`, :func:`hash_to_scalar`, ...) follow the
per-entry definitions directly.  The batched helpers (:func:`challenge_sums`,
:func:`nonce_sums`, :func:`prf_children`) compute the same values for whole
epochs at once and are what the signer and the verifiers use on the hot path.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from . import _aes
from .errors import LengthError, UnsupportedInput
from .group import Q

SEED_BYTES = 16
ADD_Q_MAX_BYTES = 31


class Suite(IntEnum):
    SHA256 = 1
    MMO_MDC2 = 2
    MMO_ADDQ = 3

    @property
    def prf_id(self) -> str:
        return "SHA256" if self is Suite.SHA256 else "MMO_AES128"

    @property
    def hash_id(self) -> str:
        return {1: "SHA256", 2: "MDC2_AES128", 3: "ADD_Q"}[int(self)]


@dataclass(frozen=True)
class SuiteConfig:
    """Primitive suite plus the epoch geometry of one key set."""

    suite: Suite
    n1: int
    n2: int
    n_u: int = 1
    kappa: int = 128

    def __post_init__(self):
        object.__setattr__(self, "suite", Suite(self.suite))
        if self.kappa != 128:
            raise ValueError("only kappa = 128 is supported")
        if self.n1 < 2 or self.n1 & (self.n1 - 1):
            raise ValueError("n1 must be a power of two")
        if self.n2 < 1:
            raise ValueError("n2 must be positive")
        if self.n_u < 1 or self.n1 % self.n_u:
            raise ValueError("n1 must be a multiple of the umbrella count")

    @property
    def depth(self) -> int:
        return self.n1.bit_length() - 1

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    @property
    def umbrella_width(self) -> int:
        return self.n1 // self.n_u


def enc32(v: int) -> bytes:
    return v.to_bytes(4, "big")


def _u8(data: bytes) -> np.ndarray:
    return np.frombuffer(data, dtype=np.uint8)


# ---------------------------------------------------------------------------
# block-cipher hashes
# ---------------------------------------------------------------------------

def mmo_hash(m: bytes) -> bytes:
    """16-byte Matyas-Meyer-Oseas digest over AES-128."""
    if not m:
        raise ValueError("MMO input must be non-empty")
    return _aes.mmo(_u8(m)).tobytes()


def mdc2_hash(m: bytes) -> bytes:
    """32-byte MDC-2 digest over AES-128 (two MMO chains, swapped halves)."""
    if not m:
        raise ValueError("MDC-2 input must be non-empty")
    return _aes.mdc2(_u8(m)).tobytes()


def _f(suite: Suite, data: bytes) -> bytes:
    if suite is Suite.SHA256:
        return hashlib.sha256(data).digest()
    return _aes.mmo(_u8(data)).tobytes()


# ---------------------------------------------------------------------------
# per-entry primitives
# ---------------------------------------------------------------------------

def prf(suite: Suite, j: int, x: bytes) -> bytes:
    """PRF_j(x) = F(x || j), truncated to a seed."""
    if len(x) != SEED_BYTES:
        raise LengthError(f"seed must be {SEED_BYTES} bytes, got {len(x)}")
    if j not in (0, 1):
        raise ValueError("PRF index must be 0 or 1")
    return _f(Suite(suite), x + bytes((j,)))[:SEED_BYTES]


def prf_expand(suite: Suite, data: bytes, nbytes: int = 64) -> bytes:
    """Concatenate F(data || 0x00), F(data || 0x01), ... up to ``nbytes``."""
    suite = Suite(suite)
    out = b""
    ctr = 0
    while len(out) < nbytes:
        out += _f(suite, data + bytes((ctr,)))
        ctr += 1
    return out[:nbytes]


def hash_to_scalar(suite: Suite, m: bytes, x: bytes) -> int:
    """Ephemeral key e = H(m || x) mod q."""
    suite = Suite(suite)
    if suite is Suite.SHA256:
        mx = m + x
        w = hashlib.sha256(mx).digest() + hashlib.sha256(b"\x01" + mx).digest()
    elif suite is Suite.MMO_MDC2:
        mx = m + x
        w = mdc2_hash(mx) + mdc2_hash(b"\x01" + mx)
    else:
        if len(m) > ADD_Q_MAX_BYTES:
            raise UnsupportedInput(f"additive hash takes entries under 32 bytes, got {len(m)}")
        return (int.from_bytes(m, "big") + int.from_bytes(x, "big")) % Q
    return int.from_bytes(w, "big") % Q


def nonce_to_scalar(suite: Suite, r: bytes, i: int, j: int) -> int:
    """Per-entry nonce r_i^j derived from the nonce master seed; never 0."""
    ctr = 0
    while True:
        s = int.from_bytes(prf_expand(suite, r + enc32(i) + enc32(j) + enc32(ctr)), "big") % Q
        if s:
            return s
        ctr += 1


def onetime_seed(suite: Suite, x0: bytes, j: int) -> bytes:
    """x_i^j = PRF_0(x_0[i] || j)."""
    return _f(Suite(suite), x0 + enc32(j) + b"\x00")[:SEED_BYTES]


# ---------------------------------------------------------------------------
# batched forms
# ---------------------------------------------------------------------------

def _f_rows(suite: Suite, rows: np.ndarray) -> np.ndarray:
    """F over each row of an equal-length (n, L) uint8 array; 16-byte outputs."""
    if suite is Suite.SHA256:
        buf = rows.tobytes()
        L = rows.shape[1]
        sha = hashlib.sha256
        out = b"".join(sha(buf[k:k + L]).digest()[:16] for k in range(0, len(buf), L))
        return _u8(out).reshape(-1, 16)
    return _aes.mmo_rows(np.ascontiguousarray(rows))


def prf_children(suite: Suite, seeds: Sequence[bytes]) -> list[bytes]:
    """[PRF_0(x), PRF_1(x)] for every x, flattened in order."""
    suite = Suite(suite)
    n = len(seeds)
    if n == 0:
        return []
    rows = np.empty((2 * n, SEED_BYTES + 1), dtype=np.uint8)
    rows[0::2, :SEED_BYTES] = _u8(b"".join(seeds)).reshape(n, SEED_BYTES)
    rows[1::2, :SEED_BYTES] = rows[0::2, :SEED_BYTES]
    rows[0::2, SEED_BYTES] = 0
    rows[1::2, SEED_BYTES] = 1
    out = _f_rows(suite, rows).tobytes()
    return [out[k:k + SEED_BYTES] for k in range(0, len(out), SEED_BYTES)]


def _seed_rows(x0s: Sequence[bytes], js: np.ndarray, owner: np.ndarray) -> np.ndarray:
    """Rows x0[owner[k]] || enc32(js[k]) || 0x00."""
    seeds = _u8(b"".join(x0s)).reshape(-1, SEED_BYTES)
    rows = np.zeros((len(js), SEED_BYTES + 5), dtype=np.uint8)
    rows[:, :SEED_BYTES] = seeds[owner]
    rows[:, SEED_BYTES:SEED_BYTES + 4] = (
        js.astype(">u4").view(np.uint8).reshape(-1, 4))
    return rows


def onetime_seeds(suite: Suite, x0s: Sequence[bytes], js: np.ndarray, owner: np.ndarray) -> np.ndarray:
    """(n, 16) array of x_{owner[k]}^{js[k]} for each requested entry."""
    return _f_rows(Suite(suite), _seed_rows(x0s, js, owner))


def _wide_sum(wide: np.ndarray, groups: np.ndarray, ngroups: int) -> list[int]:
    """Exact per-group sums of 512-bit big-endian rows, reduced mod q."""
    limbs = wide.view(">u4").astype(np.uint64)  # (n, 16) 32-bit limbs
    acc = np.zeros((ngroups, limbs.shape[1]), dtype=np.uint64)
    np.add.at(acc, groups, limbs)
    out = []
    for row in acc.tolist():
        v = 0
        for limb in row:
            v = (v << 32) + limb
        out.append(v % Q)
    return out


def challenge_sums(suite: Suite, x0s: Sequence[bytes], entries: Sequence[Sequence[tuple[int, bytes]]]) -> list[int]:
    """Per-epoch aggregate ephemeral keys.

    ``x0s[k]`` is the leaf seed of the k-th epoch and ``entries[k]`` its
    ``(j, m)`` pairs; returns ``sum_j H(m || x_k^j) mod q`` for every epoch.
    """
    suite = Suite(suite)
    counts = np.fromiter((len(e) for e in entries), dtype=np.int64, count=len(entries))
    owner = np.repeat(np.arange(len(entries)), counts)
    flat = [pair for ep in entries for pair in ep]
    if not flat:
        return [0] * len(entries)
    js = np.fromiter((j for j, _ in flat), dtype=np.int64, count=len(flat))
    msgs = [m for _, m in flat]
    seeds = onetime_seeds(suite, x0s, js, owner)
    if suite is Suite.MMO_MDC2:
        lens = np.fromiter((len(m) for m in msgs), dtype=np.int64, count=len(msgs))
        offsets = np.zeros(len(msgs) + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        data = _u8(b"".join(msgs))
        wide = _aes.seeded_mdc2_wide(data, offsets, seeds)
        return _wide_sum(wide, owner, len(entries))
    seed_bytes = seeds.tobytes()
    sums = [0] * len(entries)
    if suite is Suite.SHA256:
        sha = hashlib.sha256
        for k, m in enumerate(msgs):
            mx = m + seed_bytes[16 * k:16 * k + 16]
            w = sha(mx).digest() + sha(b"\x01" + mx).digest()
            sums[owner[k]] += int.from_bytes(w, "big")
    else:
        for k, m in enumerate(msgs):
            if len(m) > ADD_Q_MAX_BYTES:
                raise UnsupportedInput(f"additive hash takes entries under 32 bytes, got {len(m)}")
            sums[owner[k]] += int.from_bytes(m, "big") + int.from_bytes(seed_bytes[16 * k:16 * k + 16], "big")
    return [v % Q for v in sums]


def epoch_challenge_sum(suite: Suite, x0: bytes, msgs: Sequence[bytes]) -> int:
    return challenge_sums(suite, [x0], [list(enumerate(msgs))])[0]


def epoch_challenges(suite: Suite, x0: bytes, msgs: Sequence[bytes], first_j: int = 0) -> list[int]:
    """Individual ephemeral keys of consecutive entries of one epoch."""
    entries = [[(first_j + k, m)] for k, m in enumerate(msgs)]
    return challenge_sums(suite, [x0] * len(msgs), entries)


def nonce_sums(suite: Suite, r: bytes, epochs: Sequence[int], n2: int) -> list[int]:
    """sum_j r_i^j mod q for each requested epoch i."""
    suite = Suite(suite)
    epochs = list(epochs)
    if not epochs:
        return []
    nblocks = 4 if suite is not Suite.SHA256 else 2
    width = 32 if suite is Suite.SHA256 else 16
    E = len(epochs)
    head = np.zeros((E, n2, SEED_BYTES + 12), dtype=np.uint8)
    head[:, :, :SEED_BYTES] = _u8(r)
    head[:, :, 16:20] = np.asarray(epochs, dtype=">u4").view(np.uint8).reshape(E, 1, 4)
    head[:, :, 20:24] = np.arange(n2, dtype=">u4").view(np.uint8).reshape(1, n2, 4)
    head = head.reshape(E * n2, -1)
    rows = np.empty((E * n2, nblocks, SEED_BYTES + 13), dtype=np.uint8)
    rows[:, :, :-1] = head[:, None, :]
    rows[:, :, -1] = np.arange(nblocks, dtype=np.uint8)
    rows = rows.reshape(E * n2 * nblocks, -1)
    if suite is Suite.SHA256:
        buf = rows.tobytes()
        L = rows.shape[1]
        wide = b"".join(hashlib.sha256(buf[k:k + L]).digest() for k in range(0, len(buf), L))
    else:
        wide = _aes.mmo_rows(rows).tobytes()
    step = width * nblocks
    sums = []
    for e_idx, i in enumerate(epochs):
        acc = 0
        base = e_idx * n2
        for j in range(n2):
            k = base + j
            s = int.from_bytes(wide[k * step:(k + 1) * step], "big") % Q
            if s == 0:
                s = nonce_to_scalar(suite, r, i, j)
            acc += s
        sums.append(acc % Q)
    return sums
