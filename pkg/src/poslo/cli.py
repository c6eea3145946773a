"""Command-line driver: keygen, sign, distill, verify and bench over files.

Exit codes: 0 success and all checks valid, 1 a verification failed,
2 bad input, format or state error.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile
import time
from pathlib import Path
from typing import Iterable, Sequence

from . import scheme_c, scheme_f
from ._wire import Reader
from .distill import CCD, Distiller, sebver
from .errors import ExhaustedError, FormatError, PosloError
from .group import count_ops
from .parallel import default_workers, paver
from .primitives import Suite, SuiteConfig

EXIT_OK, EXIT_INVALID, EXIT_ERROR = 0, 1, 2

SIGFILE_MAGIC = b"PSGS"
SK_FILE, PK_FILE = "poslo.sk", "poslo.pk"


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def write_log(path, entries: Iterable[bytes]):
    """Length-prefixed log: 4-byte little-endian length, then the payload."""
    with open(path, "wb") as fh:
        for m in entries:
            if not m:
                raise FormatError("log entries must be non-empty")
            fh.write(len(m).to_bytes(4, "little") + m)


def read_log(path) -> list[bytes]:
    data = Path(path).read_bytes()
    out, pos = [], 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise FormatError(f"{path}: truncated record header at byte {pos}")
        n = int.from_bytes(data[pos:pos + 4], "little")
        if n == 0:
            raise FormatError(f"{path}: zero-length record at byte {pos}")
        if pos + 4 + n > len(data):
            raise FormatError(f"{path}: truncated record at byte {pos}")
        out.append(data[pos + 4:pos + 4 + n])
        pos += 4 + n
    return out


def sigfile_header(scheme: str, start: int) -> bytes:
    return SIGFILE_MAGIC + scheme.encode() + start.to_bytes(4, "big")


def sigfile_record(sig) -> bytes:
    body = sig.to_bytes()
    return len(body).to_bytes(4, "big") + body


def read_sigfile(path) -> tuple[str, int, list]:
    """Returns ``(scheme, start index, signatures)``."""
    rd = Reader(Path(path).read_bytes(), "signature file")
    rd.magic(SIGFILE_MAGIC)
    scheme = chr(rd.byte())
    if scheme not in "CF":
        raise FormatError("unknown scheme in signature file")
    start = rd.u32()
    cls = scheme_c.EpochSignature if scheme == "C" else scheme_f.FineSignature
    sigs = []
    while rd.pos < len(rd.data):
        sigs.append(cls.from_bytes(rd.take(rd.u32())))
    return scheme, start, sigs


def atomic_write(path, data: bytes):
    """Write to a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load_key(path, public: bool):
    data = Path(path).read_bytes()
    magic = data[:4]
    table = ({scheme_c.PK_MAGIC: scheme_c.PublicKeyC, scheme_f.PK_MAGIC: scheme_f.PublicKeyF} if public
             else {scheme_c.SK_MAGIC: scheme_c.SecretKeyC, scheme_f.SK_MAGIC: scheme_f.SecretKeyF})
    if magic not in table:
        raise FormatError(f"{path}: not a {'public' if public else 'secret'} key file")
    return table[magic].from_bytes(data)


def _read_logs(paths: Sequence[str]) -> list[bytes]:
    return [m for p in paths for m in read_log(p)]


def _read_sigs(paths: Sequence[str], scheme: str) -> list:
    out = []
    for p in paths:
        sch, start, sigs = read_sigfile(p)
        if sch != scheme:
            raise FormatError(f"{p}: signatures are for scheme {sch}, key is scheme {scheme}")
        if start != len(out):
            raise FormatError(f"{p}: starts at index {start}, expected {len(out)}")
        out.extend(sigs)
    return out


def _epochs(entries: list[bytes], n2: int) -> dict[int, list[bytes]]:
    if len(entries) % n2:
        raise FormatError(f"{len(entries)} log records is not a multiple of n2={n2}")
    return {k // n2: entries[k:k + n2] for k in range(0, len(entries), n2)}


def _scheme_of(key) -> str:
    return "C" if isinstance(key, (scheme_c.SecretKeyC, scheme_c.PublicKeyC)) else "F"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_keygen(args) -> int:
    cfg = SuiteConfig(Suite(args.suite), args.n1, args.n2, args.umbrella)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.scheme == "c":
        sk, pk = scheme_c.keygen(cfg)
    else:
        bpv = None
        if not args.no_bpv:
            v, k = (int(x) for x in args.bpv.split(","))
            bpv = (v, k)
        sk, pk = scheme_f.keygen(cfg, bpv=bpv)
    sk_bytes, pk_bytes = sk.to_bytes(), pk.to_bytes()
    atomic_write(out / SK_FILE, sk_bytes)
    atomic_write(out / PK_FILE, pk_bytes)
    print(f"scheme={args.scheme.upper()} suite={int(cfg.suite)} n1={cfg.n1} n2={cfg.n2} "
          f"umbrella={cfg.n_u} entries={cfg.n}")
    if args.scheme == "c":
        print(f"commitments={len(pk.R_hat)}")
    print(f"sk={out / SK_FILE} bytes={len(sk_bytes)}")
    print(f"pk={out / PK_FILE} bytes={len(pk_bytes)}")
    return EXIT_OK


def cmd_sign(args) -> int:
    sk = _load_key(args.key, public=False)
    scheme = _scheme_of(sk)
    cfg = sk.config
    entries = read_log(args.input)
    if scheme == "C":
        batches = _epochs(entries, cfg.n2)
        if sk.next_epoch + len(batches) > cfg.n1:
            raise ExhaustedError(
                f"{len(batches)} epochs requested, {cfg.n1 - sk.next_epoch} remain")
        start = sk.next_epoch
    else:
        if sk.next_entry + len(entries) > cfg.n:
            raise ExhaustedError(
                f"{len(entries)} entries requested, {cfg.n - sk.next_entry} remain")
        start = sk.next_entry
        batches = {k: entries[k:k + cfg.n2 - (start + k) % cfg.n2]
                   for k in _fine_cuts(start, len(entries), cfg.n2)}
    count = 0
    with open(args.out, "wb") as out:
        out.write(sigfile_header(scheme, start))
        for key in sorted(batches):
            if scheme == "C":
                sigs = [scheme_c.sign_epoch(sk, batches[key])]
            else:
                sigs = [scheme_f.sign_entry(sk, m) for m in batches[key]]
            atomic_write(args.key, sk.to_bytes())
            out.write(b"".join(sigfile_record(s) for s in sigs))
            out.flush()
            count += len(sigs)
    print(f"scheme={scheme} signatures={count} start={start} out={args.out}")
    return EXIT_OK


def _fine_cuts(start: int, count: int, n2: int) -> list[int]:
    """Offsets into the input where a new epoch begins (plus 0)."""
    cuts = [0]
    k = n2 - start % n2
    while k < count:
        cuts.append(k)
        k += n2
    return cuts


def cmd_distill(args) -> int:
    pk = _load_key(args.pk, public=True)
    scheme = _scheme_of(pk)
    cfg = pk.config
    batches = _epochs(_read_logs(args.logs), cfg.n2)
    sigs = _read_sigs(args.sigs, scheme)
    want = len(batches) if scheme == "C" else len(batches) * cfg.n2
    if len(sigs) != want:
        raise FormatError(f"{len(sigs)} signatures for {len(batches)} epochs, expected {want}")
    d = Distiller(pk)
    for i in sorted(batches):
        if scheme == "C":
            d.add_epoch(batches[i], sigs[i])
        else:
            d.add_epoch_fine(batches[i], sigs[i * cfg.n2:(i + 1) * cfg.n2])
    data = d.ccd.to_bytes()
    atomic_write(args.ccd, data)
    invalid = len(d.ccd.invalid)
    unit = "epochs" if scheme == "C" else "entries"
    print(f"scheme={scheme} {unit}={want}")
    print(f"valid: {want - invalid}")
    print(f"invalid: {invalid}")
    print(f"umbrellas: {len(d.ccd.umbrellas)}")
    print(f"ccd_bytes: {len(data)}")
    return EXIT_OK if invalid == 0 else EXIT_INVALID


def cmd_verify(args) -> int:
    pk = _load_key(args.pk, public=True)
    ccd = CCD.from_bytes(Path(args.ccd).read_bytes())
    if ccd.scheme != _scheme_of(pk):
        raise FormatError("cold data and public key are for different schemes")
    batches = _epochs(_read_logs(args.logs), pk.config.n2)
    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        raise ValueError("--workers must be at least 1")
    bits = sebver(pk, batches, ccd, args.mode, workers=workers)
    for b in bits:
        print(int(b))
    return EXIT_OK if all(bits) else EXIT_INVALID


def cmd_bench(args) -> int:
    suite = Suite(args.suite)
    n2 = min(256, args.entries)
    n1 = max(2, 1 << max(0, (args.entries // n2 - 1).bit_length()))
    cfg = SuiteConfig(suite, n1, n2)
    rng = random.Random(0)
    entries = [rng.randbytes(args.entry_size) for _ in range(n1 * n2)]
    batches = _epochs(entries, n2)
    workers = args.workers if args.workers is not None else default_workers()
    print(f"suite={int(suite)} n1={n1} n2={n2} entries={cfg.n} entry_size={args.entry_size} workers={workers}")

    t = time.perf_counter()
    sk, pk = scheme_c.keygen(cfg, rng)
    print(f"keygen_s={time.perf_counter() - t:.3f}")

    with count_ops() as ops:
        t = time.perf_counter()
        sigs = [scheme_c.sign_epoch(sk, batches[i]) for i in range(n1)]
        dt = time.perf_counter() - t
    print(f"sign_entries_per_s={cfg.n / dt:.0f}")
    print(f"sign_exponentiations={ops.exp + ops.double_exp}")
    agg = scheme_c.aggregate_signatures(sigs)

    t = time.perf_counter()
    ok1 = scheme_c.verify(pk, batches, agg)
    dt = time.perf_counter() - t
    print(f"aver_entries_per_s={cfg.n / dt:.0f}")

    t = time.perf_counter()
    ok2 = paver(pk, batches, agg, workers)
    dt = time.perf_counter() - t
    print(f"paver_entries_per_s={cfg.n / dt:.0f}")
    print(f"valid={int(ok1 and ok2)}")
    return EXIT_OK if ok1 and ok2 else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poslo", description="Aggregate signatures for secure logging.")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", help="generate a key pair")
    k.add_argument("--scheme", choices=["c", "f"], default="c")
    k.add_argument("--suite", type=int, choices=[1, 2, 3], default=1)
    k.add_argument("--n1", type=int, required=True, help="number of epochs (power of two)")
    k.add_argument("--n2", type=int, required=True, help="entries per epoch")
    k.add_argument("--umbrella", type=int, default=1, help="number of umbrellas")
    g = k.add_mutually_exclusive_group()
    g.add_argument("--bpv", default=f"{scheme_f.BPV_V},{scheme_f.BPV_K}", help="table size and subset size v,k")
    g.add_argument("--no-bpv", action="store_true", help="sign with a direct exponentiation")
    k.add_argument("--out", required=True, help="output directory")
    k.set_defaults(func=cmd_keygen)

    s = sub.add_parser("sign", help="sign a log file")
    s.add_argument("--key", required=True, help="secret key file, updated in place")
    s.add_argument("--input", required=True, help="log file")
    s.add_argument("--out", required=True, help="signature file to write")
    s.set_defaults(func=cmd_sign)

    d = sub.add_parser("distill", help="verify signatures and compress them into cold data")
    d.add_argument("--pk", required=True)
    d.add_argument("--logs", nargs="+", required=True)
    d.add_argument("--sigs", nargs="+", required=True)
    d.add_argument("--ccd", required=True, help="cold data file to write")
    d.set_defaults(func=cmd_distill)

    v = sub.add_parser("verify", help="verify archived logs against cold data")
    v.add_argument("--pk", required=True)
    v.add_argument("--logs", nargs="+", required=True)
    v.add_argument("--ccd", required=True)
    v.add_argument("--mode", choices=["V", "U", "I"], default="V")
    v.add_argument("--workers", type=int, default=None, help="default: $POSLO_WORKERS or 1")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="measure signing and verification throughput")
    b.add_argument("--suite", type=int, choices=[1, 2, 3], default=2)
    b.add_argument("--entries", type=int, default=1 << 16)
    b.add_argument("--entry-size", type=int, default=16)
    b.add_argument("--workers", type=int, default=None, help="default: $POSLO_WORKERS or 1")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PosloError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
