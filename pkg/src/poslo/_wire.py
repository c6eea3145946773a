"""Small helpers shared by the binary formats."""
from __future__ import annotations

from .errors import FormatError
from .group import ELEMENT_BYTES, SCALAR_BYTES, GroupElement, scalar_from_bytes
from .primitives import Suite, SuiteConfig
from .seeds import SeedStack

HEADER_BYTES = 4 + 1 + 12


def pack_header(magic: bytes, cfg: SuiteConfig) -> bytes:
    return (magic + bytes((int(cfg.suite),)) + cfg.n1.to_bytes(4, "big")
            + cfg.n2.to_bytes(4, "big") + cfg.n_u.to_bytes(4, "big"))


class Reader:
    def __init__(self, data: bytes, what: str = "record"):
        self.data = bytes(data)
        self.pos = 0
        self.what = what

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"truncated {self.what}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def byte(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def scalar(self) -> int:
        return scalar_from_bytes(self.take(SCALAR_BYTES))

    def element(self) -> GroupElement:
        return GroupElement.from_bytes(self.take(ELEMENT_BYTES))

    def stack(self) -> SeedStack:
        ds, self.pos = SeedStack.read(self.data, self.pos)
        return ds

    def magic(self, *expected: bytes) -> bytes:
        m = self.take(4)
        if m not in expected:
            raise FormatError(f"bad magic {m!r} for {self.what}")
        return m

    def header(self, *expected: bytes) -> tuple[bytes, SuiteConfig]:
        m = self.magic(*expected)
        suite = self.byte()
        try:
            cfg = SuiteConfig(Suite(suite), self.u32(), self.u32(), self.u32())
        except ValueError as exc:
            raise FormatError(f"invalid parameters in {self.what}: {exc}") from None
        return m, cfg

    def done(self):
        if self.pos != len(self.data):
            raise FormatError(f"trailing bytes after {self.what}")
