"""Coarse-grained scheme: one aggregate tag per epoch of ``n2`` log entries.

Commitments for every epoch are fixed at key generation and published in the
public key, so signing an epoch costs hashing and a handful of modular
additions and no group operation at all.
"""
from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import primitives as prim
from ._wire import Reader, pack_header
from .errors import ExhaustedError, FormatError, StateError
from .group import (
    Q, GroupElement, combine_all, commit_check, exp_base,
    scalar_reduce_wide, scalar_to_bytes,
)
from .primitives import SEED_BYTES, SuiteConfig
from .seeds import SeedNode, SeedStack, leaf_seeds, so

SK_MAGIC = b"PSKC"
PK_MAGIC = b"PPKC"
SIG_MAGIC = b"PSC1"


def random_scalar(rng=None) -> int:
    """Uniform non-zero scalar."""
    rng = rng or secrets.SystemRandom()
    while True:
        s = scalar_reduce_wide(rng.randbytes(64))
        if s:
            return s


@dataclass
class SecretKeyC:
    config: SuiteConfig
    y: int
    r: bytes
    root: bytes
    next_epoch: int = 0
    ds: SeedStack = field(default_factory=SeedStack)

    @property
    def root_node(self) -> SeedNode:
        return SeedNode(self.config.depth, 0, self.root)

    def to_bytes(self) -> bytes:
        return (pack_header(SK_MAGIC, self.config) + scalar_to_bytes(self.y) + self.r
                + self.root + self.next_epoch.to_bytes(4, "big") + self.ds.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "SecretKeyC":
        rd = Reader(data, "secret key")
        _, cfg = rd.header(SK_MAGIC)
        sk = cls(cfg, rd.scalar(), rd.take(SEED_BYTES), rd.take(SEED_BYTES), rd.u32(), rd.stack())
        rd.done()
        if sk.y == 0 or sk.next_epoch > cfg.n1 or sk.ds.covered != sk.next_epoch:
            raise FormatError("secret key state is inconsistent")
        return sk


@dataclass
class PublicKeyC:
    config: SuiteConfig
    Y: GroupElement
    R_hat: dict[int, GroupElement]

    def remove(self, epoch: int) -> GroupElement:
        """Drop the commitment of a distilled epoch and return it."""
        try:
            return self.R_hat.pop(epoch)
        except KeyError:
            raise StateError(f"commitment for epoch {epoch} is not in the public key") from None

    def commitment(self, epochs: Iterable[int]) -> GroupElement:
        try:
            return combine_all(self.R_hat[i] for i in epochs)
        except KeyError as exc:
            raise StateError(f"commitment for epoch {exc.args[0]} is not in the public key") from None

    def to_bytes(self) -> bytes:
        out = bytearray(pack_header(PK_MAGIC, self.config) + self.Y.to_bytes())
        out += len(self.R_hat).to_bytes(4, "big")
        for i in sorted(self.R_hat):
            out += i.to_bytes(4, "big") + self.R_hat[i].to_bytes()
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PublicKeyC":
        rd = Reader(data, "public key")
        _, cfg = rd.header(PK_MAGIC)
        Y = rd.element()
        R_hat = {}
        for _ in range(rd.u32()):
            i = rd.u32()
            if i >= cfg.n1 or i in R_hat:
                raise FormatError("bad epoch index in public key")
            R_hat[i] = rd.element()
        rd.done()
        return cls(cfg, Y, R_hat)


@dataclass(frozen=True)
class EpochSignature:
    """Aggregate tag ``s_hat`` with the signer's disclosed seeds.

    ``R_hat`` is only present on aggregates produced by distillation.
    """

    s_hat: int
    ds: SeedStack
    R_hat: GroupElement | None = None

    @property
    def epoch(self) -> int:
        return self.ds.last_epoch

    def to_bytes(self) -> bytes:
        out = SIG_MAGIC + scalar_to_bytes(self.s_hat)
        out += b"\x01" + self.R_hat.to_bytes() if self.R_hat is not None else b"\x00"
        return out + self.ds.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "EpochSignature":
        rd = Reader(data, "epoch signature")
        rd.magic(SIG_MAGIC)
        s = rd.scalar()
        flag = rd.byte()
        if flag not in (0, 1):
            raise FormatError("bad commitment flag in epoch signature")
        R = rd.element() if flag else None
        ds = rd.stack()
        rd.done()
        return cls(s, ds, R)


def keygen(config: SuiteConfig, rng=None) -> tuple[SecretKeyC, PublicKeyC]:
    rng = rng or secrets.SystemRandom()
    y = random_scalar(rng)
    r = rng.randbytes(SEED_BYTES)
    root = rng.randbytes(SEED_BYTES)
    sums = prim.nonce_sums(config.suite, r, range(config.n1), config.n2)
    R_hat = {i: exp_base(s) for i, s in enumerate(sums)}
    return SecretKeyC(config, y, r, root), PublicKeyC(config, exp_base(y), R_hat)


def sign_epoch(sk: SecretKeyC, msgs: Sequence[bytes]) -> EpochSignature:
    """Sign the next epoch of exactly ``n2`` entries and advance the key state.

    The per-entry tags s_j = r_j - e_j*y are summed directly as
    sum(r_j) - y*sum(e_j).
    """
    cfg = sk.config
    i = sk.next_epoch
    if i >= cfg.n1:
        raise ExhaustedError(f"all {cfg.n1} epochs have been signed")
    if len(msgs) != cfg.n2:
        raise ValueError(f"an epoch holds exactly {cfg.n2} entries, got {len(msgs)}")
    ds, x0 = so(cfg.suite, sk.ds, sk.root_node, i)
    e_sum = prim.epoch_challenge_sum(cfg.suite, x0, msgs)
    r_sum = prim.nonce_sums(cfg.suite, sk.r, [i], cfg.n2)[0]
    sk.ds = ds
    sk.next_epoch = i + 1
    return EpochSignature((r_sum - e_sum * sk.y) % Q, ds)


def aggregate(parts, empty=0):
    """Keyless aggregation: scalars add mod q, group elements combine.

    An empty list yields ``empty`` (pass ``IDENTITY`` for commitments).
    """
    parts = list(parts)
    if not parts:
        return empty
    if all(isinstance(p, int) for p in parts):
        return sum(parts) % Q
    if all(isinstance(p, GroupElement) for p in parts):
        return combine_all(parts)
    raise TypeError("cannot aggregate a mix of scalars and group elements")


def aggregate_signatures(sigs: Sequence[EpochSignature]) -> EpochSignature:
    """Aggregate of several epoch tags, carrying the widest seed stack."""
    if not sigs:
        raise ValueError("nothing to aggregate")
    ds = max((s.ds for s in sigs), key=lambda d: d.covered)
    R = None
    if all(s.R_hat is not None for s in sigs):
        R = combine_all(s.R_hat for s in sigs)
    return EpochSignature(sum(s.s_hat for s in sigs) % Q, ds, R)


def _check_batches(cfg: SuiteConfig, batches: Mapping[int, Sequence[bytes]]):
    for i, msgs in batches.items():
        if not 0 <= i < cfg.n1:
            raise ValueError(f"epoch {i} is outside this key's {cfg.n1} epochs")
        if len(msgs) != cfg.n2:
            raise ValueError(f"epoch {i} has {len(msgs)} entries, expected {cfg.n2}")


def aggregate_challenge(cfg: SuiteConfig, batches: Mapping[int, Sequence[bytes]], ds: SeedStack) -> int:
    """e_hat = sum over epochs and entries of H(m || x_i^j) mod q."""
    _check_batches(cfg, batches)
    epochs = sorted(batches)
    seeds = leaf_seeds(cfg.suite, ds, epochs)
    sums = prim.challenge_sums(
        cfg.suite, [seeds[i] for i in epochs], [list(enumerate(batches[i])) for i in epochs])
    return sum(sums) % Q


def verify(pk: PublicKeyC, batches: Mapping[int, Sequence[bytes]], sig: EpochSignature) -> bool:
    """Batch-verify the epochs in ``batches`` against one aggregate tag.

    Raises :class:`SeedNotDisclosed` when an epoch is not covered by the
    signature's seed stack and :class:`StateError` when a needed commitment
    has already been removed from the public key.
    """
    if not batches:
        raise ValueError("no epochs to verify")
    _check_batches(pk.config, batches)
    e_hat = aggregate_challenge(pk.config, batches, sig.ds)
    R = sig.R_hat if sig.R_hat is not None else pk.commitment(sorted(batches))
    return R == commit_check(pk.Y, e_hat, sig.s_hat)


def sign_stream(sk: SecretKeyC, entries: Sequence[bytes]) -> list[EpochSignature]:
    n2 = sk.config.n2
    if len(entries) % n2:
        raise ValueError(f"stream length {len(entries)} is not a multiple of n2={n2}")
    return [sign_epoch(sk, entries[k:k + n2]) for k in range(0, len(entries), n2)]
