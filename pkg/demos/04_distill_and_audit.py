"""Edge-side distillation and selective auditing.

An edge node verifies each incoming epoch and keeps only aggregates: one for
everything valid, one per umbrella (a fixed group of epochs), and each
failing epoch individually.  The result (cold data) has a constant size for
an honest stream.  Auditors later pick the granularity: V checks everything
at once, U localizes damage to an umbrella, I re-checks the failures.
"""
import random

from poslo import Distiller, scheme_c, sebver
from poslo.primitives import Suite, SuiteConfig

rng = random.Random(4)
cfg = SuiteConfig(Suite.MMO_MDC2, n1=16, n2=32, n_u=4)
sk, pk = scheme_c.keygen(cfg, rng)
entries = [rng.randbytes(24) for _ in range(cfg.n)]
sigs = scheme_c.sign_stream(sk, entries)
batches = {i: entries[i * cfg.n2:(i + 1) * cfg.n2] for i in range(cfg.n1)}

received = {i: list(b) for i, b in batches.items()}
received[9][3] = b"dropped in transit"
d = Distiller(pk)
flags = [d.add_epoch(received[i], sigs[i]) for i in range(cfg.n1)]
ccd = d.ccd
print("epochs that failed at the edge:", [i for i, ok in enumerate(flags) if not ok])
print(f"cold data: {len(ccd.to_bytes())} bytes, {len(ccd.umbrellas)} umbrellas, {len(ccd.invalid)} invalid record(s)")

print("audit V on the received logs:", sebver(pk, received, ccd, "V"))
print("audit I on the received logs:", sebver(pk, received, ccd, "I"))

archive = {i: list(b) for i, b in received.items()}
archive[13][0] = b"edited in the archive"
print("after later tampering, V:", sebver(pk, archive, ccd, "V"))
print("                       U:", sebver(pk, archive, ccd, "U"), "(umbrella 3 holds epochs 12-15)")
