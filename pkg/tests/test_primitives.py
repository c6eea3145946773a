import hashlib

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from poslo import _aes
from poslo import primitives as prim
from poslo.errors import LengthError, UnsupportedInput
from poslo.primitives import Suite, SuiteConfig

seeds16 = st.binary(min_size=16, max_size=16)
messages = st.binary(min_size=1, max_size=200)


@given(st.binary(min_size=16, max_size=16), st.binary(min_size=16, max_size=16))
def test_aes_matches_cryptography(key, block):
    got = _aes.aes128_encrypt(np.frombuffer(key, np.uint8), np.frombuffer(block, np.uint8))
    assert got.tobytes() == oracles.aes(key, block)


def test_aes_fips197_vector():
    key = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
    pt = bytes.fromhex("00112233445566778899aabbccddeeff")
    got = _aes.aes128_encrypt(np.frombuffer(key, np.uint8), np.frombuffer(pt, np.uint8))
    assert got.tobytes().hex() == "69c4e0d86a7b0430d8cdb78070b4c55a"


@given(messages)
def test_mmo_matches_reference(m):
    assert prim.mmo_hash(m) == oracles.mmo(m)


@given(messages)
def test_mdc2_matches_reference(m):
    d = prim.mdc2_hash(m)
    assert len(d) == 32
    assert d == oracles.mdc2(m)


@pytest.mark.parametrize("n", [15, 16, 17, 31, 32, 33])
def test_padding_boundaries(n):
    m = bytes(range(n))
    assert prim.mmo_hash(m) == oracles.mmo(m)
    assert prim.mdc2_hash(m) == oracles.mdc2(m)


def test_empty_hash_input_rejected():
    with pytest.raises(ValueError):
        prim.mmo_hash(b"")
    with pytest.raises(ValueError):
        prim.mdc2_hash(b"")


def test_mmo_rows_matches_scalar():
    rows = np.frombuffer(bytes(range(256)) * 2, np.uint8)[:17 * 30].reshape(30, 17)
    got = _aes.mmo_rows(np.ascontiguousarray(rows))
    for k in range(30):
        assert got[k].tobytes() == oracles.mmo(rows[k].tobytes())


@pytest.mark.parametrize("suite", list(Suite))
@given(x=seeds16, j=st.sampled_from([0, 1]))
def test_prf_matches_reference(suite, x, j):
    assert prim.prf(suite, j, x) == oracles.prf(int(suite), j, x)


def test_prf_rejects_bad_inputs():
    with pytest.raises(LengthError):
        prim.prf(Suite.SHA256, 0, bytes(15))
    with pytest.raises(ValueError):
        prim.prf(Suite.SHA256, 2, bytes(16))


def test_sha_prf_is_truncated_sha256():
    x = bytes(range(16))
    assert prim.prf(Suite.SHA256, 1, x) == hashlib.sha256(x + b"\x01").digest()[:16]


@pytest.mark.parametrize("suite", list(Suite))
@given(m=st.binary(min_size=1, max_size=31), x=seeds16)
def test_hash_to_scalar_matches_reference(suite, m, x):
    got = prim.hash_to_scalar(suite, m, x)
    assert got == oracles.hash_to_scalar(int(suite), m, x)
    assert 0 <= got < oracles.Q


def test_additive_hash_length_limit():
    x = bytes(16)
    prim.hash_to_scalar(Suite.MMO_ADDQ, b"a" * 31, x)
    with pytest.raises(UnsupportedInput):
        prim.hash_to_scalar(Suite.MMO_ADDQ, b"a" * 32, x)
    with pytest.raises(UnsupportedInput):
        prim.challenge_sums(Suite.MMO_ADDQ, [x], [[(0, b"a" * 32)]])


@pytest.mark.parametrize("suite", list(Suite))
def test_nonce_and_seed_match_reference(suite):
    r, x0 = bytes(range(16)), bytes(range(16, 32))
    for i, j in [(0, 0), (3, 7), (1000, 255)]:
        assert prim.nonce_to_scalar(suite, r, i, j) == oracles.nonce(int(suite), r, i, j)
        assert prim.onetime_seed(suite, x0, j) == oracles.onetime_seed(int(suite), x0, j)


@pytest.mark.parametrize("suite", list(Suite))
def test_batched_forms_match_scalar_forms(suite, rng):
    x0s = [rng.randbytes(16) for _ in range(5)]
    entries = [[(j, rng.randbytes(rng.randint(1, 31))) for j in range(rng.randint(0, 9))] for _ in x0s]
    sums = prim.challenge_sums(suite, x0s, entries)
    for x0, ep, s in zip(x0s, entries, sums):
        want = sum(prim.hash_to_scalar(suite, m, prim.onetime_seed(suite, x0, j)) for j, m in ep)
        assert s == want % oracles.Q
    r = rng.randbytes(16)
    got = prim.nonce_sums(suite, r, [0, 5, 9], 6)
    for i, s in zip([0, 5, 9], got):
        assert s == sum(prim.nonce_to_scalar(suite, r, i, j) for j in range(6)) % oracles.Q
    kids = prim.prf_children(suite, x0s)
    assert kids == [prim.prf(suite, b, x) for x in x0s for b in (0, 1)]


def test_epoch_challenges_individual(rng):
    x0 = rng.randbytes(16)
    msgs = [rng.randbytes(20) for _ in range(4)]
    es = prim.epoch_challenges(Suite.MMO_MDC2, x0, msgs, first_j=2)
    assert es == [prim.hash_to_scalar(Suite.MMO_MDC2, m, prim.onetime_seed(Suite.MMO_MDC2, x0, 2 + k))
                  for k, m in enumerate(msgs)]


def test_prf_expand_lengths():
    assert len(prim.prf_expand(Suite.SHA256, b"a")) == 64
    assert prim.prf_expand(Suite.MMO_MDC2, b"a") == oracles.expand64(2, b"a")


def test_suite_config_validation():
    cfg = SuiteConfig(2, 8, 256, 2)
    assert (cfg.depth, cfg.n, cfg.umbrella_width) == (3, 2048, 4)
    with pytest.raises(ValueError, match="n1 must be a power of two"):
        SuiteConfig(1, 7, 4)
    with pytest.raises(ValueError):
        SuiteConfig(1, 1, 4)
    with pytest.raises(ValueError):
        SuiteConfig(1, 8, 0)
    with pytest.raises(ValueError):
        SuiteConfig(1, 8, 4, 3)
    with pytest.raises(ValueError):
        SuiteConfig(1, 8, 4, kappa=127)
    with pytest.raises(ValueError):
        SuiteConfig(4, 8, 4)


def test_suite_identifiers():
    assert [s.hash_id for s in Suite] == ["SHA256", "MDC2_AES128", "ADD_Q"]
    assert Suite.MMO_ADDQ.prf_id == "MMO_AES128"
