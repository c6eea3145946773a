"""write -> read -> write is byte-identical for every binary format."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import signed_stream_c, signed_stream_f
from poslo import scheme_c, scheme_f
from poslo.cli import read_log, read_sigfile, sigfile_header, sigfile_record, write_log
from poslo.distill import CCD, Distiller
from poslo.errors import FormatError
from poslo.primitives import Suite

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=10)
@given(seeds, st.sampled_from(list(Suite)), st.sampled_from([2, 4, 8]), st.integers(1, 4))
def test_coarse_objects(seed, suite, n1, n2):
    rng = random.Random(seed)
    k = rng.randint(0, n1)
    sk, pk, batches, sigs = signed_stream_c(rng, suite, n1, n2)
    for raw in (sk.to_bytes(), pk.to_bytes(), sigs[k - 1].to_bytes()):
        cls = {b"PSKC": scheme_c.SecretKeyC, b"PPKC": scheme_c.PublicKeyC,
               b"PSC1": scheme_c.EpochSignature}[raw[:4]]
        assert cls.from_bytes(raw).to_bytes() == raw
    d = Distiller(pk)
    for i in range(k):
        d.add_epoch(batches[i] if rng.random() < 0.7 else [b"?"] * n2, sigs[i])
    raw = d.ccd.to_bytes()
    assert CCD.from_bytes(raw).to_bytes() == raw


@settings(max_examples=10)
@given(seeds, st.sampled_from([(16, 4), None]))
def test_fine_objects(seed, bpv):
    rng = random.Random(seed)
    sk, pk, entries, sigs = signed_stream_f(rng, Suite.SHA256, 2, 3, bpv=bpv)
    for raw, cls in [(sk.to_bytes(), scheme_f.SecretKeyF), (pk.to_bytes(), scheme_f.PublicKeyF)] + [
            (s.to_bytes(), scheme_f.FineSignature) for s in sigs]:
        assert cls.from_bytes(raw).to_bytes() == raw
    d = Distiller(pk)
    for i in range(2):
        d.add_epoch_fine(entries[3 * i:3 * i + 3], sigs[3 * i:3 * i + 3])
    raw = d.ccd.to_bytes()
    assert CCD.from_bytes(raw).to_bytes() == raw


@given(st.lists(st.binary(min_size=1, max_size=64), max_size=20))
def test_log_file(tmp_path_factory, entries):
    path = tmp_path_factory.mktemp("log") / "log.bin"
    write_log(path, entries)
    raw = path.read_bytes()
    assert read_log(path) == entries
    write_log(path, read_log(path))
    assert path.read_bytes() == raw


def test_signature_file(tmp_path, rng):
    sk, pk, entries, sigs = signed_stream_f(rng, Suite.SHA256, 2, 2)
    raw = sigfile_header("F", 0) + b"".join(sigfile_record(s) for s in sigs)
    (tmp_path / "s").write_bytes(raw)
    scheme, start, back = read_sigfile(tmp_path / "s")
    assert (scheme, start) == ("F", 0)
    assert sigfile_header(scheme, start) + b"".join(sigfile_record(s) for s in back) == raw
    (tmp_path / "t").write_bytes(raw[:-1])
    with pytest.raises(FormatError):
        read_sigfile(tmp_path / "t")


@given(st.binary(max_size=80))
def test_garbage_never_crashes_parsers(data):
    for parse in (scheme_c.SecretKeyC.from_bytes, scheme_c.PublicKeyC.from_bytes,
                  scheme_c.EpochSignature.from_bytes, scheme_f.FineSignature.from_bytes,
                  scheme_f.PublicKeyF.from_bytes, CCD.from_bytes):
        try:
            parse(data)
        except (FormatError, ValueError):
            pass
