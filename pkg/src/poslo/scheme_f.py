"""Fine-grained scheme: every log entry carries its own verifiable tag.

Commitments are produced online from a BPV table, a precomputed set of
``(r_i, alpha^r_i)`` pairs of which a random k-subset is summed per
signature, so the public key is a single group element.
"""
from __future__ import annotations

import secrets
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import primitives as prim
from ._wire import Reader, pack_header
from .errors import ExhaustedError, FormatError
from .group import (
    Q, GroupElement, combine_all, commit_check, exp_base, scalar_to_bytes,
)
from .primitives import SEED_BYTES, SuiteConfig
from .scheme_c import random_scalar
from .seeds import SeedNode, SeedStack, leaf_seeds, so, sr

SK_MAGIC = b"PSKF"
PK_MAGIC = b"PPKF"
SIG_MAGIC = b"PSF1"

BPV_V = 1024
BPV_K = 16


@dataclass(frozen=True)
class BpvTable:
    r: tuple[int, ...]
    R: tuple[GroupElement, ...]
    k: int

    @property
    def v(self) -> int:
        return len(self.r)

    def to_bytes(self) -> bytes:
        out = bytearray(self.v.to_bytes(4, "big") + self.k.to_bytes(4, "big"))
        for r, R in zip(self.r, self.R):
            out += scalar_to_bytes(r) + R.to_bytes()
        return bytes(out)

    @classmethod
    def read(cls, rd: Reader) -> "BpvTable":
        v, k = rd.u32(), rd.u32()
        if not 1 <= k <= v:
            raise FormatError("BPV table needs 1 <= k <= v")
        pairs = [(rd.scalar(), rd.element()) for _ in range(v)]
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), k)


def bpv_offline(k: int = BPV_K, v: int = BPV_V, rng=None) -> BpvTable:
    if not 1 <= k <= v:
        raise ValueError("BPV parameters need 1 <= k <= v")
    rng = rng or secrets.SystemRandom()
    rs = tuple(random_scalar(rng) for _ in range(v))
    return BpvTable(rs, tuple(exp_base(r) for r in rs), k)


def bpv_online(table: BpvTable, rng=None) -> tuple[int, GroupElement]:
    """One-time commitment pair from a random k-subset of the table."""
    rng = rng or secrets.SystemRandom()
    subset = rng.sample(range(table.v), table.k)
    r = sum(table.r[i] for i in subset) % Q
    return r, combine_all(table.R[i] for i in subset)


@dataclass
class SecretKeyF:
    config: SuiteConfig
    y: int
    r: bytes
    root: bytes
    table: BpvTable | None
    next_entry: int = 0
    ds: SeedStack = field(default_factory=SeedStack)

    @property
    def root_node(self) -> SeedNode:
        return SeedNode(self.config.depth, 0, self.root)

    def to_bytes(self) -> bytes:
        out = (pack_header(SK_MAGIC, self.config) + scalar_to_bytes(self.y) + self.r + self.root
               + self.next_entry.to_bytes(4, "big") + self.ds.to_bytes())
        if self.table is None:
            return out + b"\x00"
        return out + b"\x01" + self.table.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SecretKeyF":
        rd = Reader(data, "secret key")
        _, cfg = rd.header(SK_MAGIC)
        y, r, root, t, ds = rd.scalar(), rd.take(SEED_BYTES), rd.take(SEED_BYTES), rd.u32(), rd.stack()
        flag = rd.byte()
        if flag not in (0, 1):
            raise FormatError("bad BPV flag in secret key")
        table = BpvTable.read(rd) if flag else None
        rd.done()
        if y == 0 or t > cfg.n or ds.covered != -(-t // cfg.n2):
            raise FormatError("secret key state is inconsistent")
        return cls(cfg, y, r, root, table, t, ds)


@dataclass
class PublicKeyF:
    config: SuiteConfig
    Y: GroupElement

    def to_bytes(self) -> bytes:
        return pack_header(PK_MAGIC, self.config) + self.Y.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PublicKeyF":
        rd = Reader(data, "public key")
        _, cfg = rd.header(PK_MAGIC)
        Y = rd.element()
        rd.done()
        return cls(cfg, Y)


@dataclass(frozen=True)
class FineSignature:
    """Per-entry tag; the last entry of an epoch carries the seed stack instead of its seed."""

    s: int
    R: GroupElement
    seed: bytes | None = None
    ds: SeedStack | None = None

    def __post_init__(self):
        if (self.seed is None) == (self.ds is None):
            raise FormatError("a fine signature carries exactly one of seed or ds")

    def to_bytes(self) -> bytes:
        out = SIG_MAGIC + scalar_to_bytes(self.s) + self.R.to_bytes()
        if self.seed is not None:
            return out + b"\x00" + self.seed
        return out + b"\x01" + self.ds.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "FineSignature":
        rd = Reader(data, "fine signature")
        rd.magic(SIG_MAGIC)
        s, R, tag = rd.scalar(), rd.element(), rd.byte()
        if tag == 0:
            sig = cls(s, R, seed=rd.take(SEED_BYTES))
        elif tag == 1:
            sig = cls(s, R, ds=rd.stack())
        else:
            raise FormatError("bad tail tag in fine signature")
        rd.done()
        return sig


def keygen(config: SuiteConfig, rng=None, bpv: tuple[int, int] | None = (BPV_V, BPV_K)) -> tuple[SecretKeyF, PublicKeyF]:
    """Key pair; ``bpv=(v, k)`` sizes the table, ``None`` signs with a direct exponentiation."""
    rng = rng or secrets.SystemRandom()
    y = random_scalar(rng)
    r = rng.randbytes(SEED_BYTES)
    root = rng.randbytes(SEED_BYTES)
    table = bpv_offline(bpv[1], bpv[0], rng) if bpv is not None else None
    return SecretKeyF(config, y, r, root, table), PublicKeyF(config, exp_base(y))


def sign_entry(sk: SecretKeyF, m: bytes, rng=None) -> FineSignature:
    cfg = sk.config
    t = sk.next_entry
    if t >= cfg.n:
        raise ExhaustedError(f"all {cfg.n} entries have been signed")
    i, j = divmod(t, cfg.n2)
    if j == 0:
        ds, x0 = so(cfg.suite, sk.ds, sk.root_node, i)
    else:
        ds, x0 = sk.ds, sr(cfg.suite, sk.ds, i)
    x = prim.onetime_seed(cfg.suite, x0, j)
    e = prim.hash_to_scalar(cfg.suite, m, x)
    if sk.table is not None:
        r_t, R_t = bpv_online(sk.table, rng)
    else:
        r_t = prim.nonce_to_scalar(cfg.suite, sk.r, i, j)
        R_t = exp_base(r_t)
    sk.ds = ds
    sk.next_entry = t + 1
    s = (r_t - e * sk.y) % Q
    if j == cfg.n2 - 1:
        return FineSignature(s, R_t, ds=ds)
    return FineSignature(s, R_t, seed=x)


def entry_seed(cfg: SuiteConfig, sig: FineSignature) -> bytes:
    """The one-time seed bound into ``sig``'s challenge."""
    if sig.seed is not None:
        return sig.seed
    if sig.ds is None or sig.ds.covered == 0:
        raise FormatError("signature carries neither a seed nor a usable seed stack")
    i = sig.ds.last_epoch
    return prim.onetime_seed(cfg.suite, sr(cfg.suite, sig.ds, i), cfg.n2 - 1)


def verify_entry(pk: PublicKeyF, m: bytes, sig: FineSignature) -> bool:
    e = prim.hash_to_scalar(pk.config.suite, m, entry_seed(pk.config, sig))
    return sig.R == commit_check(pk.Y, e, sig.s)


def aggregate_signatures(sigs: Sequence[FineSignature]) -> tuple[int, GroupElement]:
    return sum(s.s for s in sigs) % Q, combine_all(s.R for s in sigs)


def entry_challenge(cfg: SuiteConfig, msgs: Mapping[int, bytes], ds: SeedStack) -> int:
    """Sum of ephemeral keys of the given global entry indices, seeds taken from ``ds``."""
    by_epoch: dict[int, list[tuple[int, bytes]]] = defaultdict(list)
    for t in sorted(msgs):
        if not 0 <= t < cfg.n:
            raise ValueError(f"entry {t} is outside this key's {cfg.n} entries")
        i, j = divmod(t, cfg.n2)
        by_epoch[i].append((j, msgs[t]))
    epochs = sorted(by_epoch)
    seeds = leaf_seeds(cfg.suite, ds, epochs)
    sums = prim.challenge_sums(cfg.suite, [seeds[i] for i in epochs], [by_epoch[i] for i in epochs])
    return sum(sums) % Q


def verify_batch(pk: PublicKeyF, msgs: Mapping[int, bytes], s: int, R: GroupElement, ds: SeedStack) -> bool:
    """Verify an aggregate ``(s, R)`` over entries keyed by global index."""
    if not msgs:
        raise ValueError("no entries to verify")
    return R == commit_check(pk.Y, entry_challenge(pk.config, msgs, ds), s)


def sign_stream(sk: SecretKeyF, entries: Sequence[bytes], rng=None) -> list[FineSignature]:
    return [sign_entry(sk, m, rng) for m in entries]
