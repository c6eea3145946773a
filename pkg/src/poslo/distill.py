"""Verify-then-compress distillation into Cold Cryptographic Data (CCD).

The distiller verifies each incoming epoch and folds valid tags into one
running aggregate and into per-umbrella sub-aggregates; failing tags are kept
individually.  :func:`sebver` later checks the archive at three granularities:
``"V"`` (one check for everything valid), ``"U"`` (one per umbrella) and
``"I"`` (one per invalid record).
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import primitives as prim
from . import scheme_c, scheme_f
from ._wire import Reader
from .errors import FormatError, SeedNotDisclosed, SequenceError, StateError
from .group import IDENTITY, Q, GroupElement, commit_check, group_combine, negate, scalar_to_bytes
from .primitives import Suite, SuiteConfig
from .seeds import SeedStack, leaf_seeds, sc

MAGIC = b"PCCD"
SCHEMES = {"C": 0x43, "F": 0x46}


@dataclass(frozen=True)
class Record:
    """An aggregate (s, R) tagged with an umbrella, epoch or entry index."""

    index: int
    s: int
    R: GroupElement

    def to_bytes(self) -> bytes:
        return self.index.to_bytes(4, "big") + scalar_to_bytes(self.s) + self.R.to_bytes()


@dataclass
class CCD:
    scheme: str
    config: SuiteConfig
    valid_s: int = 0
    valid_R: GroupElement = IDENTITY
    umbrellas: list[Record] = field(default_factory=list)
    invalid: list[Record] = field(default_factory=list)
    ds: SeedStack = field(default_factory=SeedStack)

    @property
    def has_valid(self) -> bool:
        return not (self.valid_s == 0 and self.valid_R.is_identity())

    def invalid_epochs(self) -> set[int]:
        if self.scheme == "C":
            return {r.index for r in self.invalid}
        return {r.index // self.config.n2 for r in self.invalid}

    @property
    def distilled_epochs(self) -> int:
        last = max(self.invalid_epochs(), default=-1)
        return max(self.ds.covered, last + 1)

    def to_bytes(self) -> bytes:
        cfg = self.config
        out = bytearray(MAGIC + bytes((SCHEMES[self.scheme], int(cfg.suite))))
        out += cfg.n1.to_bytes(4, "big") + cfg.n2.to_bytes(4, "big") + cfg.n_u.to_bytes(4, "big")
        out += bytes((1 if self.has_valid else 0,))
        out += scalar_to_bytes(self.valid_s) + self.valid_R.to_bytes()
        for records in (self.umbrellas, self.invalid):
            out += len(records).to_bytes(4, "big")
            for rec in records:
                out += rec.to_bytes()
        out += self.ds.to_bytes()
        out += zlib.crc32(out).to_bytes(4, "big")
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes, check_crc: bool = True) -> "CCD":
        data = bytes(data)
        if len(data) < 4:
            raise FormatError("truncated cold data file")
        body, crc = data[:-4], int.from_bytes(data[-4:], "big")
        if check_crc and zlib.crc32(body) != crc:
            raise FormatError("cold data checksum mismatch")
        rd = Reader(body, "cold data")
        rd.magic(MAGIC)
        code = rd.byte()
        scheme = {v: k for k, v in SCHEMES.items()}.get(code)
        if scheme is None:
            raise FormatError("unknown scheme in cold data")
        suite = rd.byte()
        try:
            cfg = SuiteConfig(Suite(suite), rd.u32(), rd.u32(), rd.u32())
        except ValueError as exc:
            raise FormatError(f"invalid parameters in cold data: {exc}") from None
        flag = rd.byte()
        s, R = rd.scalar(), rd.element()
        if flag not in (0, 1) or (flag == 0 and (s or not R.is_identity())):
            raise FormatError("bad valid-aggregate block")
        lists = []
        for _ in range(2):
            lists.append([Record(rd.u32(), rd.scalar(), rd.element()) for _ in range(rd.u32())])
        ds = rd.stack()
        rd.done()
        ccd = cls(scheme, cfg, s, R, lists[0], lists[1], ds)
        idx = [r.index for r in ccd.invalid]
        if idx != sorted(set(idx)):
            raise FormatError("invalid records are not strictly increasing")
        return ccd


def _consistent(suite: Suite, old: SeedStack, new: SeedStack) -> bool:
    """Every node of ``old`` is reproduced by ``new``."""
    if new.covered < old.covered:
        return False
    for node in old:
        try:
            cover = new.node_for(node.first_leaf)
        except SeedNotDisclosed:
            return False
        if cover.depth < node.depth:
            return False
        if cover.depth == node.depth:
            if cover.value != node.value:
                return False
        elif sc(suite, cover, node.depth, node.index).value != node.value:
            return False
    return True


class Distiller:
    """Streaming distillation of one signer's log into a :class:`CCD`.

    Epochs must arrive in order.  A distiller can resume from an existing
    CCD: the partially filled umbrella is the valid aggregate minus the
    emitted umbrellas.
    """

    def __init__(self, pk, ccd: CCD | None = None):
        scheme = "C" if isinstance(pk, scheme_c.PublicKeyC) else "F"
        self.pk = pk
        self.config = pk.config
        if ccd is None:
            ccd = CCD(scheme, pk.config)
        elif ccd.scheme != scheme or ccd.config != pk.config:
            raise StateError("cold data does not belong to this public key")
        self.ccd = ccd
        # stack of the latest epoch that verified; a failed epoch's stack is only provisional
        self._trusted = ccd.ds
        self.next_epoch = ccd.distilled_epochs
        self._pending_s = ccd.valid_s
        self._pending_R = ccd.valid_R
        for u in ccd.umbrellas:
            self._pending_s = (self._pending_s - u.s) % Q
            self._pending_R = group_combine(self._pending_R, negate(u.R))
        self._pending_n = 0 if self.next_epoch % self.config.umbrella_width == 0 else None

    def _fold_valid(self, s: int, R: GroupElement):
        c = self.ccd
        c.valid_s = (c.valid_s + s) % Q
        c.valid_R = group_combine(c.valid_R, R)
        self._pending_s = (self._pending_s + s) % Q
        self._pending_R = group_combine(self._pending_R, R)
        if self._pending_n is not None:
            self._pending_n += 1

    def _close_epoch(self, i: int):
        w = self.config.umbrella_width
        if (i + 1) % w == 0:
            # resumed mid-umbrella: emptiness is unknown, so compare with the sentinel
            empty = (self._pending_n == 0 if self._pending_n is not None
                     else self._pending_s == 0 and self._pending_R.is_identity())
            if not empty:
                self.ccd.umbrellas.append(Record(i // w, self._pending_s, self._pending_R))
            self._pending_s, self._pending_R, self._pending_n = 0, IDENTITY, 0
        self.next_epoch = i + 1

    def _adopt(self, ds: SeedStack | None, i: int) -> bool:
        """Take ``ds`` as the current stack if it agrees with the last verified one."""
        if ds is None or ds.covered != i + 1:
            return False
        if not _consistent(self.config.suite, self._trusted, ds):
            return False
        self.ccd.ds = ds
        return True

    def add_epoch(self, msgs: Sequence[bytes], sig: scheme_c.EpochSignature) -> bool:
        """Distill one coarse epoch; returns whether it verified."""
        i = self.next_epoch
        if i >= self.config.n1:
            raise SequenceError("every epoch has already been distilled")
        if sig.epoch != i:
            raise SequenceError(f"expected epoch {i}, signature is for epoch {sig.epoch}")
        if i not in self.pk.R_hat:
            raise StateError(f"commitment for epoch {i} is not in the public key")
        ok = self._adopt(sig.ds, i) and scheme_c.verify(self.pk, {i: msgs}, sig)
        if ok:
            self._trusted = sig.ds
        R_i = self.pk.remove(i)
        if ok:
            self._fold_valid(sig.s_hat, R_i)
        else:
            self.ccd.invalid.append(Record(i, sig.s_hat, R_i))
        self._close_epoch(i)
        return ok

    def add_epoch_fine(self, msgs: Sequence[bytes], sigs: Sequence[scheme_f.FineSignature]) -> list[bool]:
        """Distill one epoch of fine-grained signatures; returns per-entry validity."""
        cfg = self.config
        i = self.next_epoch
        if i >= cfg.n1:
            raise SequenceError("every epoch has already been distilled")
        if len(msgs) != cfg.n2 or len(sigs) != cfg.n2:
            raise ValueError(f"an epoch holds exactly {cfg.n2} entries")
        adopted = self._adopt(sigs[-1].ds, i)
        if adopted:
            x0 = leaf_seeds(cfg.suite, self.ccd.ds, [i])[i]
            derived = [prim.onetime_seed(cfg.suite, x0, j) for j in range(cfg.n2)]
        results = []
        for j, (m, sig) in enumerate(zip(msgs, sigs)):
            ok = adopted
            if ok and sig.seed is not None:
                ok = sig.seed == derived[j]
            elif ok and j != cfg.n2 - 1:
                ok = False
            if ok:
                e = prim.hash_to_scalar(cfg.suite, m, derived[j])
                ok = sig.R == commit_check(self.pk.Y, e, sig.s)
            if ok:
                self._fold_valid(sig.s, sig.R)
            else:
                self.ccd.invalid.append(Record(i * cfg.n2 + j, sig.s, sig.R))
            results.append(ok)
        if any(results):
            self._trusted = self.ccd.ds
        self._close_epoch(i)
        return results


def distill_epoch(pk: scheme_c.PublicKeyC, ccd_prev: CCD | None, msgs: Sequence[bytes],
                  sig: scheme_c.EpochSignature) -> CCD:
    """Functional form of :meth:`Distiller.add_epoch`; updates ``pk`` and returns the CCD."""
    d = Distiller(pk, ccd_prev)
    d.add_epoch(msgs, sig)
    return d.ccd


# ---------------------------------------------------------------------------
# selective batch verification
# ---------------------------------------------------------------------------

def _need(messages: Mapping[int, Sequence[bytes]], epochs, n2: int):
    for i in epochs:
        if i not in messages:
            raise ValueError(f"messages for epoch {i} are missing")
        if len(messages[i]) != n2:
            raise ValueError(f"epoch {i} has {len(messages[i])} entries, expected {n2}")


def _check_c(pk, messages, epochs, s, R, ds, workers) -> bool:
    if not epochs:
        return s == 0 and R.is_identity()
    batch = {i: messages[i] for i in epochs}
    sig = scheme_c.EpochSignature(s, ds, R)
    if workers > 1:
        from .parallel import paver
        return paver(pk, batch, sig, workers)
    return scheme_c.verify(pk, batch, sig)


def _check_f(pk, messages, epochs, excluded: set[int], s, R, ds) -> bool:
    n2 = pk.config.n2
    entries = {i * n2 + j: messages[i][j] for i in epochs for j in range(n2)
               if i * n2 + j not in excluded}
    if not entries:
        return s == 0 and R.is_identity()
    return scheme_f.verify_batch(pk, entries, s, R, ds)


def sebver(pk, messages: Mapping[int, Sequence[bytes]], ccd: CCD, mode: str,
           workers: int = 1) -> list[bool]:
    """Selective batch verification of archived logs against their CCD.

    ``messages`` maps epoch index to that epoch's entries.  Mode ``"V"``
    returns one result, ``"U"`` one per umbrella, ``"I"`` one per invalid
    record.
    """
    cfg = ccd.config
    if pk.config != cfg:
        raise StateError("public key and cold data parameters differ")
    fine = ccd.scheme == "F"
    # archived epochs beyond the disclosed range are still in scope and fail loudly
    total = max(ccd.distilled_epochs, max(messages, default=-1) + 1)
    bad_epochs = ccd.invalid_epochs()
    excluded = {r.index for r in ccd.invalid}
    if fine:
        def keep(i):
            return any(i * cfg.n2 + j not in excluded for j in range(cfg.n2))
    else:
        def keep(i):
            return i not in bad_epochs

    def check(epochs, s, R):
        _need(messages, epochs, cfg.n2)
        if fine:
            return _check_f(pk, messages, epochs, excluded, s, R, ccd.ds)
        return _check_c(pk, messages, epochs, s, R, ccd.ds, workers)

    if mode == "V":
        if not ccd.has_valid:
            raise StateError("cold data holds no valid aggregate")
        return [check([i for i in range(total) if keep(i)], ccd.valid_s, ccd.valid_R)]
    if mode == "U":
        w = cfg.umbrella_width
        return [check([i for i in range(u.index * w, min((u.index + 1) * w, total)) if keep(i)],
                      u.s, u.R) for u in ccd.umbrellas]
    if mode == "I":
        out = []
        for rec in ccd.invalid:
            if fine:
                i, j = divmod(rec.index, cfg.n2)
                _need(messages, [i], cfg.n2)
                out.append(scheme_f.verify_batch(pk, {rec.index: messages[i][j]}, rec.s, rec.R, ccd.ds))
            else:
                _need(messages, [rec.index], cfg.n2)
                out.append(_check_c(pk, messages, [rec.index], rec.s, rec.R, ccd.ds, 1))
        return out
    raise ValueError(f"unknown verification mode {mode!r}; expected V, U or I")
