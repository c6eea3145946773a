"""Map-reduce batch verification.

Workers each reduce their share of epochs to per-epoch key sums; the
coordinator adds them up and performs the one group check.  Modular addition
does not care about order, so the result is identical for any worker count.
"""
import os
import random
import time

from poslo import paver, scheme_c
from poslo.parallel import agg_ekeys
from poslo.primitives import Suite, SuiteConfig

rng = random.Random(5)
cfg = SuiteConfig(Suite.MMO_MDC2, n1=256, n2=256)
sk, pk = scheme_c.keygen(cfg, rng)
entries = [rng.randbytes(16) for _ in range(cfg.n)]
batches = {i: entries[i * cfg.n2:(i + 1) * cfg.n2] for i in range(cfg.n1)}
agg = scheme_c.aggregate_signatures(scheme_c.sign_stream(sk, entries))
print(f"{cfg.n} entries, {os.cpu_count()} CPU core(s) available")

for workers in (1, 2, 4):
    paver(pk, {0: batches[0]}, agg, workers)  # start the pool outside the timing
    t = time.perf_counter()
    ok = paver(pk, batches, agg, workers)
    dt = time.perf_counter() - t
    e_hat = sum(p.e_tilde for p in agg_ekeys(cfg.suite, batches, agg.ds, workers))
    print(f"workers={workers}: valid={ok} in {dt:.2f} s ({cfg.n / dt:,.0f} entries/s), e_hat ends ...{e_hat % 10**8:08d}")
