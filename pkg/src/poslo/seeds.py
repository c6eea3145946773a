"""Seed tree and the disclosed-seed stack.

Node ``x_d[i]`` sits at depth ``d`` (leaves are depth 0) and covers leaves
``[i * 2**d, (i + 1) * 2**d)``.  A left child is ``PRF_0(parent)``, a right
child ``PRF_1(parent)``.  The disclosed-seed stack holds the maximal subtrees
whose leaves have all been released, so it never grows past the tree depth.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ExhaustedError, FormatError, SeedNotDisclosed
from .primitives import SEED_BYTES, Suite, onetime_seed, prf, prf_children

__all__ = [
    "SeedNode", "SeedStack", "sc", "so", "sr", "onetime_seed", "leaf_seeds",
]

NODE_BYTES = 1 + 4 + SEED_BYTES


@dataclass(frozen=True)
class SeedNode:
    depth: int
    index: int
    value: bytes

    @property
    def first_leaf(self) -> int:
        return self.index << self.depth

    @property
    def end_leaf(self) -> int:
        return (self.index + 1) << self.depth

    def covers(self, leaf: int) -> bool:
        return self.first_leaf <= leaf < self.end_leaf


@dataclass(frozen=True)
class SeedStack:
    """Disclosed seeds, bottom to top.  Immutable; push/pop return new stacks."""

    nodes: tuple[SeedNode, ...] = ()

    def __len__(self):
        return len(self.nodes)

    def __iter__(self) -> Iterator[SeedNode]:
        return iter(self.nodes)

    def top(self) -> SeedNode | None:
        return self.nodes[-1] if self.nodes else None

    def push(self, node: SeedNode) -> "SeedStack":
        return SeedStack(self.nodes + (node,))

    def pop(self) -> tuple["SeedStack", SeedNode]:
        return SeedStack(self.nodes[:-1]), self.nodes[-1]

    @property
    def covered(self) -> int:
        """Number of leading leaves retrievable from this stack."""
        top = self.top()
        return top.end_leaf if top else 0

    @property
    def last_epoch(self) -> int:
        """Index of the most recent disclosed epoch (-1 if none)."""
        return self.covered - 1

    def node_for(self, leaf: int) -> SeedNode:
        # scan from the top without consuming the stack
        for node in reversed(self.nodes):
            if node.covers(leaf):
                return node
        raise SeedNotDisclosed(leaf)

    def to_bytes(self) -> bytes:
        out = bytearray((len(self.nodes),))
        for n in self.nodes:
            out += bytes((n.depth,)) + n.index.to_bytes(4, "big") + n.value
        return bytes(out)

    @classmethod
    def read(cls, data: bytes, offset: int = 0) -> tuple["SeedStack", int]:
        """Parse a stack block at ``offset``; returns the stack and the end offset."""
        if offset >= len(data):
            raise FormatError("truncated seed stack")
        count = data[offset]
        pos = offset + 1
        end = pos + count * NODE_BYTES
        if end > len(data):
            raise FormatError("truncated seed stack")
        nodes = []
        for _ in range(count):
            d = data[pos]
            i = int.from_bytes(data[pos + 1:pos + 5], "big")
            nodes.append(SeedNode(d, i, bytes(data[pos + 5:pos + NODE_BYTES])))
            pos += NODE_BYTES
        stack = cls(tuple(nodes))
        stack._check_shape()
        return stack, end

    @classmethod
    def from_bytes(cls, data: bytes) -> "SeedStack":
        stack, end = cls.read(data)
        if end != len(data):
            raise FormatError("trailing bytes after seed stack")
        return stack

    def _check_shape(self):
        expect = 0
        prev_depth = None
        for n in self.nodes:
            if n.first_leaf != expect or (prev_depth is not None and n.depth >= prev_depth):
                raise FormatError("seed stack nodes are not contiguous, left-aligned subtrees")
            expect = n.end_leaf
            prev_depth = n.depth


def sc(suite: Suite, source: SeedNode, depth: int, index: int) -> SeedNode:
    """Derive node (depth, index) by walking down from ``source``."""
    if depth > source.depth or (index >> (source.depth - depth)) != source.index:
        raise ValueError(
            f"node ({depth}, {index}) is outside the subtree of ({source.depth}, {source.index})")
    x = source.value
    rel = index - (source.index << (source.depth - depth))
    for bit in range(source.depth - depth - 1, -1, -1):
        x = prf(suite, (rel >> bit) & 1, x)
    return SeedNode(depth, index, x)


def so(suite: Suite, ds_prev: SeedStack, root: SeedNode, i: int) -> tuple[SeedStack, bytes]:
    """Disclose epoch ``i``: fold completed siblings into parents, push the cover node.

    Returns the new stack and the leaf seed ``x_0[i]``.
    """
    if not 0 <= i < (1 << root.depth):
        raise ExhaustedError(f"epoch {i} is beyond the {1 << root.depth} epochs of this tree")
    if ds_prev.covered != i:
        raise ValueError(f"stack covers {ds_prev.covered} epochs, cannot disclose epoch {i}")
    ds = ds_prev
    d, idx = 0, i
    while ds.nodes and ds.nodes[-1].depth == d:
        ds, _ = ds.pop()
        d += 1
        idx >>= 1
    node = sc(suite, root, d, idx)
    ds = ds.push(node)
    return ds, sc(suite, node, 0, i).value


def sr(suite: Suite, ds: SeedStack, i: int) -> bytes:
    """Leaf seed x_0[i] recovered from the stack; the stack is not modified."""
    if i < 0 or i >= ds.covered:
        raise SeedNotDisclosed(i)
    return sc(suite, ds.node_for(i), 0, i).value


def _expand(suite: Suite, node: SeedNode) -> list[bytes]:
    level = [node.value]
    for _ in range(node.depth):
        level = prf_children(suite, level)
    return level


def leaf_seeds(suite: Suite, ds: SeedStack, epochs: Iterable[int]) -> dict[int, bytes]:
    """Leaf seeds for many epochs, expanding densely requested subtrees level by level."""
    wanted: dict[SeedNode, list[int]] = {}
    for i in epochs:
        if i < 0 or i >= ds.covered:
            raise SeedNotDisclosed(i)
        wanted.setdefault(ds.node_for(i), []).append(i)
    out: dict[int, bytes] = {}
    for node, leaves in wanted.items():
        if len(leaves) * node.depth > (2 << node.depth):
            leaves_all = _expand(suite, node)
            for i in leaves:
                out[i] = leaves_all[i - node.first_leaf]
        else:
            for i in leaves:
                out[i] = sc(suite, node, 0, i).value
    return out


def entry_seed(suite: Suite, ds: SeedStack, i: int, j: int) -> bytes:
    return onetime_seed(suite, sr(suite, ds, i), j)


def stack_after(suite: Suite, root: SeedNode, epochs: int) -> SeedStack:
    """The stack a signer holds after disclosing ``epochs`` epochs."""
    ds = SeedStack()
    for i in range(epochs):
        ds, _ = so(suite, ds, root, i)
    return ds


def disclosed_nodes(ds: SeedStack) -> Sequence[tuple[int, int]]:
    return [(n.depth, n.index) for n in ds]
