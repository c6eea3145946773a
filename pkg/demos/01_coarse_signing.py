"""Coarse-grained signing: one aggregate tag per epoch, no group operations.

A logger signs a stream of entries in epochs of n2.  Commitments for every
epoch were fixed at key generation, so signing is hashing plus modular
arithmetic.  A verifier can check any set of epochs with a single group
check.
"""
import random

from poslo import count_ops, scheme_c
from poslo.primitives import Suite, SuiteConfig

rng = random.Random(1)
cfg = SuiteConfig(Suite.MMO_MDC2, n1=8, n2=64)
sk, pk = scheme_c.keygen(cfg, rng)
print(f"key pair for {cfg.n1} epochs of {cfg.n2} entries; public key {len(pk.to_bytes())} bytes")

entries = [f"2024-06-13T10:{k // 60:02d}:{k % 60:02d} login user={k % 7}".encode() for k in range(cfg.n)]
with count_ops() as ops:
    sigs = scheme_c.sign_stream(sk, entries)
print(f"signed {len(entries)} entries as {len(sigs)} epoch tags; "
      f"group exponentiations during signing: {ops.exp + ops.double_exp}")

batches = {i: entries[i * cfg.n2:(i + 1) * cfg.n2] for i in range(cfg.n1)}
agg = scheme_c.aggregate_signatures(sigs)
with count_ops() as ops:
    ok = scheme_c.verify(pk, batches, agg)
print(f"aggregate over all epochs verifies: {ok} (double exponentiations: {ops.double_exp})")

first_half = {i: batches[i] for i in range(4)}
half = scheme_c.aggregate_signatures(sigs[:4])
print("first four epochs alone verify:", scheme_c.verify(pk, first_half, half))

batches[5] = list(batches[5])
batches[5][10] = b"2024-06-13T10:00:10 login user=root"
print("after rewriting one entry:", scheme_c.verify(pk, batches, agg))
