import pytest

import oracles
from helpers import signed_stream_f
from poslo import scheme_f
from poslo.errors import ExhaustedError, FormatError
from poslo.group import Q, combine_all, count_ops, exp_base
from poslo.primitives import Suite, SuiteConfig


@pytest.mark.parametrize("suite", list(Suite))
@pytest.mark.parametrize("bpv", [(64, 8), None])
def test_entries_verify_individually_and_in_batch(suite, bpv, rng):
    sk, pk, entries, sigs = signed_stream_f(rng, suite, 4, 3, bpv=bpv)
    for m, sig in zip(entries, sigs):
        assert scheme_f.verify_entry(pk, m, sig)
    s, R = scheme_f.aggregate_signatures(sigs)
    assert scheme_f.verify_batch(pk, dict(enumerate(entries)), s, R, sigs[-1].ds)


def test_seeds_follow_the_tree(rng):
    sk, pk, entries, sigs = signed_stream_f(rng, Suite.SHA256, 4, 3)
    for t, sig in enumerate(sigs):
        i, j = divmod(t, 3)
        x0 = oracles.tree_node(1, sk.root, 2, 0, i)
        x = oracles.onetime_seed(1, x0, j)
        assert scheme_f.entry_seed(sk.config, sig) == x
        assert (sig.ds is not None) == (j == 2)
        # literal Schnorr check of the single tag
        assert oracles.verify_literal(1, pk.Y.to_bytes(), sig.R.to_bytes(), sig.s, [(entries[t], x)])


def test_partial_epochs_and_subsets(rng):
    sk, pk, entries, sigs = signed_stream_f(rng, Suite.MMO_MDC2, 4, 4)
    pick = [0, 2, 5, 11, 15]
    s = sum(sigs[t].s for t in pick) % Q
    R = combine_all(sigs[t].R for t in pick)
    assert scheme_f.verify_batch(pk, {t: entries[t] for t in pick}, s, R, sigs[-1].ds)
    assert not scheme_f.verify_batch(pk, {t: entries[t] for t in pick[:-1]}, s, R, sigs[-1].ds)


def test_tampering_detected(rng):
    sk, pk, entries, sigs = signed_stream_f(rng, Suite.SHA256, 2, 2)
    sig = sigs[0]
    assert not scheme_f.verify_entry(pk, entries[0] + b"x", sig)
    assert not scheme_f.verify_entry(pk, entries[0], scheme_f.FineSignature((sig.s + 1) % Q, sig.R, seed=sig.seed))
    flipped = bytes([sig.seed[0] ^ 1]) + sig.seed[1:]
    assert not scheme_f.verify_entry(pk, entries[0], scheme_f.FineSignature(sig.s, sig.R, seed=flipped))


def test_signing_cost(rng):
    cfg = SuiteConfig(Suite.MMO_MDC2, 4, 4)
    sk, _ = scheme_f.keygen(cfg, rng, bpv=(128, 16))
    with count_ops() as ops:
        for t in range(16):
            scheme_f.sign_entry(sk, b"entry %d" % t, rng)
    assert (ops.exp, ops.double_exp, ops.combine) == (0, 0, 16 * 16)
    sk, _ = scheme_f.keygen(cfg, rng, bpv=None)
    with count_ops() as ops:
        scheme_f.sign_entry(sk, b"m", rng)
    assert (ops.exp, ops.combine) == (1, 0)


def test_bpv_commitment_is_consistent(rng):
    table = scheme_f.bpv_offline(4, 32, rng)
    assert table.v == 32
    for _ in range(5):
        r, R = scheme_f.bpv_online(table, rng)
        assert R == exp_base(r)
    with pytest.raises(ValueError):
        scheme_f.bpv_offline(33, 32, rng)


def test_exhaustion(rng):
    sk, _ = scheme_f.keygen(SuiteConfig(1, 2, 1), rng, bpv=None)
    scheme_f.sign_entry(sk, b"a")
    scheme_f.sign_entry(sk, b"b")
    with pytest.raises(ExhaustedError):
        scheme_f.sign_entry(sk, b"c")


def test_serialization(rng):
    sk, pk, entries, sigs = signed_stream_f(rng, Suite.SHA256, 2, 3)
    for obj, cls in [(sk, scheme_f.SecretKeyF), (pk, scheme_f.PublicKeyF),
                     (sigs[0], scheme_f.FineSignature), (sigs[2], scheme_f.FineSignature)]:
        raw = obj.to_bytes()
        assert cls.from_bytes(raw).to_bytes() == raw
    sk2 = scheme_f.SecretKeyF.from_bytes(sk.to_bytes())
    assert sk2.table == sk.table and sk2.next_entry == 6
    with pytest.raises(FormatError):
        scheme_f.FineSignature(1, pk.Y)
    with pytest.raises(FormatError):
        scheme_f.FineSignature.from_bytes(sigs[0].to_bytes()[:-1])


def test_restored_key_continues(rng):
    cfg = SuiteConfig(1, 4, 3)
    sk, pk = scheme_f.keygen(cfg, rng, bpv=(32, 4))
    msgs = [b"m%d" % t for t in range(12)]
    sigs = [scheme_f.sign_entry(sk, m, rng) for m in msgs[:4]]
    sk = scheme_f.SecretKeyF.from_bytes(sk.to_bytes())
    sigs += scheme_f.sign_stream(sk, msgs[4:], rng)
    s, R = scheme_f.aggregate_signatures(sigs)
    assert scheme_f.verify_batch(pk, dict(enumerate(msgs)), s, R, sigs[-1].ds)
