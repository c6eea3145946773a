"""The disclosed-seed stack.

Every epoch's one-time seeds come from a leaf of a binary PRF tree.  After
signing epoch i the signer publishes a stack of subtree roots that lets
anyone recompute leaves 0..i and nothing beyond; completed sibling pairs are
folded into their parent, so the stack never holds more than log2(n1) nodes.
"""
from poslo.primitives import Suite
from poslo.seeds import SeedNode, SeedStack, disclosed_nodes, sc, so, sr

suite = Suite.SHA256
root = SeedNode(3, 0, bytes(range(16)))
ds = SeedStack()
for i in range(8):
    ds, leaf = so(suite, ds, root, i)
    nodes = ", ".join(f"x{d}[{k}]" for d, k in disclosed_nodes(ds))
    print(f"after epoch {i}: stack = {{{nodes}}}  ({len(ds)} nodes, {len(ds.to_bytes())} bytes)")

ds6 = SeedStack()
for i in range(7):
    ds6, _ = so(suite, ds6, root, i)
assert sr(suite, ds6, 3) == sc(suite, root, 0, 3).value
print("leaf 3 recovered from the epoch-6 stack:", sr(suite, ds6, 3).hex())
try:
    sr(suite, ds6, 7)
except Exception as exc:
    print("leaf 7 is not derivable yet:", exc)
