from poslo import scheme_c, scheme_f
from poslo.primitives import SuiteConfig


def random_entries(rng, count, size=None, max_size=48):
    return [rng.randbytes(size if size is not None else rng.randint(1, max_size)) for _ in range(count)]


def epochs_of(entries, n2):
    return {k // n2: entries[k:k + n2] for k in range(0, len(entries), n2)}


def signed_stream_c(rng, suite, n1, n2, n_u=1, size=None):
    """Key pair, per-epoch batches and per-epoch signatures of a full stream."""
    cfg = SuiteConfig(suite, n1, n2, n_u)
    sk, pk = scheme_c.keygen(cfg, rng)
    size = size if size is not None else (16 if int(suite) == 3 else None)
    batches = epochs_of(random_entries(rng, cfg.n, size, 31 if int(suite) == 3 else 48), n2)
    sigs = [scheme_c.sign_epoch(sk, batches[i]) for i in range(n1)]
    return sk, pk, batches, sigs


def signed_stream_f(rng, suite, n1, n2, n_u=1, bpv=(64, 8), size=None):
    cfg = SuiteConfig(suite, n1, n2, n_u)
    sk, pk = scheme_f.keygen(cfg, rng, bpv=bpv)
    size = size if size is not None else (16 if int(suite) == 3 else None)
    entries = random_entries(rng, cfg.n, size, 31 if int(suite) == 3 else 48)
    sigs = [scheme_f.sign_entry(sk, m, rng) for m in entries]
    return sk, pk, entries, sigs
