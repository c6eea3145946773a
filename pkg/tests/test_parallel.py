import pytest

from helpers import signed_stream_c
from poslo import scheme_c
from poslo.errors import SeedNotDisclosed
from poslo.group import Q
from poslo.parallel import agg_ekeys, default_workers, paver, paver_stream
from poslo.primitives import Suite


@pytest.fixture(scope="module")
def stream():
    import random
    return signed_stream_c(random.Random(7), Suite.MMO_MDC2, 16, 8)


@pytest.mark.parametrize("workers", [1, 2, 4])
def test_paver_matches_serial_verifier(stream, workers):
    sk, pk, batches, sigs = stream
    agg = scheme_c.aggregate_signatures(sigs)
    assert paver(pk, batches, agg, workers) is True
    bad = dict(batches)
    bad[9] = [b"x"] + list(bad[9][1:])
    assert paver(pk, bad, agg, workers) is scheme_c.verify(pk, bad, agg) is False


@pytest.mark.parametrize("workers", [1, 3])
def test_epoch_sums_reduce_to_aggregate_challenge(stream, workers):
    sk, pk, batches, sigs = stream
    ds = sigs[-1].ds
    parts = agg_ekeys(pk.config.suite, batches, ds, workers)
    assert [p.epoch for p in parts] == sorted(batches)
    assert sum(p.e_tilde for p in parts) % Q == scheme_c.aggregate_challenge(pk.config, batches, ds)


def test_stream_over_chunks(stream):
    sk, pk, batches, sigs = stream
    agg = scheme_c.aggregate_signatures(sigs)
    chunks = [{i: batches[i] for i in range(k, k + 4)} for k in range(0, 16, 4)]
    assert paver_stream(pk, chunks, agg, 2)
    with pytest.raises(ValueError):
        paver_stream(pk, chunks + chunks[:1], agg)
    with pytest.raises(ValueError):
        paver_stream(pk, [], agg)


def test_errors(stream, monkeypatch):
    sk, pk, batches, sigs = stream
    with pytest.raises(SeedNotDisclosed):
        paver(pk, batches, sigs[3], 2)
    with pytest.raises(ValueError):
        paver(pk, batches, sigs[-1], 0)
    with pytest.raises(ValueError):
        paver(pk, {}, sigs[-1])
    monkeypatch.setenv("POSLO_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.delenv("POSLO_WORKERS")
    assert default_workers() == 1
