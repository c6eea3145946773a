"""The three primitive suites side by side.

Suite 1 hashes with SHA-256, suite 2 with MDC-2 over AES-128 (two MMO chains
whose right halves swap after every block), suite 3 replaces the message hash
by addition mod q for short entries.  This script times the per-entry key
derivation that dominates verification.
"""
import random
import time

from poslo import primitives as prim
from poslo.errors import UnsupportedInput
from poslo.primitives import Suite

rng = random.Random(6)
x0 = rng.randbytes(16)
msgs = [rng.randbytes(16) for _ in range(1 << 15)]
entries = [list(enumerate(msgs))]

print("mmo(b'abc')  =", prim.mmo_hash(b"abc").hex())
print("mdc2(b'abc') =", prim.mdc2_hash(b"abc").hex())
for suite in Suite:
    prim.challenge_sums(suite, [x0], [entries[0][:8]])  # compile outside the timing
    t = time.perf_counter()
    prim.challenge_sums(suite, [x0], entries)
    dt = time.perf_counter() - t
    print(f"suite {int(suite)} ({suite.prf_id} / {suite.hash_id}): {len(msgs) / dt:,.0f} keys/s")

try:
    prim.hash_to_scalar(Suite.MMO_ADDQ, b"x" * 40, x0)
except UnsupportedInput as exc:
    print("suite 3 with a 40-byte entry:", exc)
