"""AES-128 and the MMO / MDC-2 chaining modes as numba kernels.

Both hash modes re-key the cipher with the chaining value on every block, so
the key schedule is part of the per-block cost.  The batched kernels release
the GIL and process whole epochs of log entries per call.
"""
import numpy as np
from numba import njit

BLOCK = 16

IV_H = 0x52
IV_H2 = 0x25


def _build_tables():
    sbox = np.zeros(256, dtype=np.int64)
    # multiplicative inverse in GF(2^8), then the affine map
    inv = [0] * 256
    for a in range(1, 256):
        for b in range(1, 256):
            x, y, r = a, b, 0
            while y:
                if y & 1:
                    r ^= x
                x <<= 1
                if x & 0x100:
                    x ^= 0x11B
                y >>= 1
            if r == 1:
                inv[a] = b
                break
    for a in range(256):
        b = inv[a]
        s = b
        for k in range(1, 5):
            s ^= ((b << k) | (b >> (8 - k))) & 0xFF
        sbox[a] = s ^ 0x63

    def xtime(v):
        v <<= 1
        return (v ^ 0x11B) & 0xFF if v & 0x100 else v

    te0 = np.zeros(256, dtype=np.int64)
    for a in range(256):
        s = int(sbox[a])
        s2 = xtime(s)
        s3 = s2 ^ s
        te0[a] = (s2 << 24) | (s << 16) | (s << 8) | s3

    def ror(t, n):
        return ((t >> n) | (t << (32 - n))) & 0xFFFFFFFF

    te1 = np.array([ror(int(t), 8) for t in te0], dtype=np.int64)
    te2 = np.array([ror(int(t), 16) for t in te0], dtype=np.int64)
    te3 = np.array([ror(int(t), 24) for t in te0], dtype=np.int64)
    rcon = np.zeros(10, dtype=np.int64)
    rc = 1
    for k in range(10):
        rcon[k] = rc << 24
        rc = xtime(rc)
    return sbox, te0, te1, te2, te3, rcon


SBOX, TE0, TE1, TE2, TE3, RCON = _build_tables()
M32 = 0xFFFFFFFF


@njit(cache=True, nogil=True)
def _load(b, off):
    return (np.int64(b[off]) << 24) | (np.int64(b[off + 1]) << 16) | (
        np.int64(b[off + 2]) << 8) | np.int64(b[off + 3])


@njit(cache=True, nogil=True)
def _store(w, out, off):
    out[off] = (w >> 24) & 0xFF
    out[off + 1] = (w >> 16) & 0xFF
    out[off + 2] = (w >> 8) & 0xFF
    out[off + 3] = w & 0xFF


@njit(cache=True, nogil=True)
def expand_key(key, koff, rk):
    for c in range(4):
        rk[c] = _load(key, koff + 4 * c)
    for r in range(10):
        t = rk[4 * r + 3]
        sub = (SBOX[(t >> 16) & 0xFF] << 24) | (SBOX[(t >> 8) & 0xFF] << 16) | (
            SBOX[t & 0xFF] << 8) | SBOX[(t >> 24) & 0xFF]
        rk[4 * r + 4] = rk[4 * r] ^ sub ^ RCON[r]
        rk[4 * r + 5] = rk[4 * r + 1] ^ rk[4 * r + 4]
        rk[4 * r + 6] = rk[4 * r + 2] ^ rk[4 * r + 5]
        rk[4 * r + 7] = rk[4 * r + 3] ^ rk[4 * r + 6]


@njit(cache=True, nogil=True)
def encrypt_block(rk, src, soff, dst, doff):
    s0 = _load(src, soff) ^ rk[0]
    s1 = _load(src, soff + 4) ^ rk[1]
    s2 = _load(src, soff + 8) ^ rk[2]
    s3 = _load(src, soff + 12) ^ rk[3]
    for r in range(1, 10):
        t0 = TE0[s0 >> 24] ^ TE1[(s1 >> 16) & 0xFF] ^ TE2[(s2 >> 8) & 0xFF] ^ TE3[s3 & 0xFF] ^ rk[4 * r]
        t1 = TE0[s1 >> 24] ^ TE1[(s2 >> 16) & 0xFF] ^ TE2[(s3 >> 8) & 0xFF] ^ TE3[s0 & 0xFF] ^ rk[4 * r + 1]
        t2 = TE0[s2 >> 24] ^ TE1[(s3 >> 16) & 0xFF] ^ TE2[(s0 >> 8) & 0xFF] ^ TE3[s1 & 0xFF] ^ rk[4 * r + 2]
        t3 = TE0[s3 >> 24] ^ TE1[(s0 >> 16) & 0xFF] ^ TE2[(s1 >> 8) & 0xFF] ^ TE3[s2 & 0xFF] ^ rk[4 * r + 3]
        s0, s1, s2, s3 = t0, t1, t2, t3
    o0 = (SBOX[s0 >> 24] << 24) ^ (SBOX[(s1 >> 16) & 0xFF] << 16) ^ (
        SBOX[(s2 >> 8) & 0xFF] << 8) ^ SBOX[s3 & 0xFF] ^ rk[40]
    o1 = (SBOX[s1 >> 24] << 24) ^ (SBOX[(s2 >> 16) & 0xFF] << 16) ^ (
        SBOX[(s3 >> 8) & 0xFF] << 8) ^ SBOX[s0 & 0xFF] ^ rk[41]
    o2 = (SBOX[s2 >> 24] << 24) ^ (SBOX[(s3 >> 16) & 0xFF] << 16) ^ (
        SBOX[(s0 >> 8) & 0xFF] << 8) ^ SBOX[s1 & 0xFF] ^ rk[42]
    o3 = (SBOX[s3 >> 24] << 24) ^ (SBOX[(s0 >> 16) & 0xFF] << 16) ^ (
        SBOX[(s1 >> 8) & 0xFF] << 8) ^ SBOX[s2 & 0xFF] ^ rk[43]
    _store(o0 & M32, dst, doff)
    _store(o1 & M32, dst, doff + 4)
    _store(o2 & M32, dst, doff + 8)
    _store(o3 & M32, dst, doff + 12)


@njit(cache=True, nogil=True)
def aes128_encrypt(key, block):
    """Single-block AES-128; used by tests and the scalar paths."""
    rk = np.empty(44, dtype=np.int64)
    expand_key(key, 0, rk)
    out = np.empty(16, dtype=np.uint8)
    encrypt_block(rk, block, 0, out, 0)
    return out


@njit(cache=True, nogil=True)
def _padded_len(n):
    return (n // BLOCK + 1) * BLOCK


@njit(cache=True, nogil=True)
def _pad_into(buf, n):
    # 10* padding; a full padding block when n is already block-aligned
    end = _padded_len(n)
    buf[n] = 0x80
    for k in range(n + 1, end):
        buf[k] = 0
    return end


@njit(cache=True, nogil=True)
def _mmo_chain(buf, end, h, rk, tmp):
    for off in range(0, end, BLOCK):
        expand_key(h, 0, rk)
        encrypt_block(rk, buf, off, tmp, 0)
        for k in range(BLOCK):
            h[k] = tmp[k] ^ buf[off + k]


@njit(cache=True, nogil=True)
def _mdc2_chain(buf, end, h, g, rk, tmp, tmp2):
    for off in range(0, end, BLOCK):
        expand_key(h, 0, rk)
        encrypt_block(rk, buf, off, tmp, 0)
        expand_key(g, 0, rk)
        encrypt_block(rk, buf, off, tmp2, 0)
        for k in range(8):
            h[k] = tmp[k] ^ buf[off + k]
            g[k] = tmp2[k] ^ buf[off + k]
        for k in range(8, BLOCK):
            # second halves cross over between the two chains
            h[k] = tmp2[k] ^ buf[off + k]
            g[k] = tmp[k] ^ buf[off + k]


@njit(cache=True, nogil=True)
def mmo(msg):
    n = msg.shape[0]
    buf = np.empty(_padded_len(n), dtype=np.uint8)
    buf[:n] = msg
    end = _pad_into(buf, n)
    h = np.full(BLOCK, IV_H, dtype=np.uint8)
    rk = np.empty(44, dtype=np.int64)
    tmp = np.empty(BLOCK, dtype=np.uint8)
    _mmo_chain(buf, end, h, rk, tmp)
    return h


@njit(cache=True, nogil=True)
def mdc2(msg):
    n = msg.shape[0]
    buf = np.empty(_padded_len(n), dtype=np.uint8)
    buf[:n] = msg
    end = _pad_into(buf, n)
    h = np.full(BLOCK, IV_H, dtype=np.uint8)
    g = np.full(BLOCK, IV_H2, dtype=np.uint8)
    rk = np.empty(44, dtype=np.int64)
    tmp = np.empty(BLOCK, dtype=np.uint8)
    tmp2 = np.empty(BLOCK, dtype=np.uint8)
    _mdc2_chain(buf, end, h, g, rk, tmp, tmp2)
    out = np.empty(2 * BLOCK, dtype=np.uint8)
    out[:BLOCK] = h
    out[BLOCK:] = g
    return out


@njit(cache=True, nogil=True)
def mmo_rows(data):
    """MMO digest of every row of an equal-length 2-D byte array."""
    n, L = data.shape
    out = np.empty((n, BLOCK), dtype=np.uint8)
    buf = np.empty(_padded_len(L), dtype=np.uint8)
    h = np.empty(BLOCK, dtype=np.uint8)
    rk = np.empty(44, dtype=np.int64)
    tmp = np.empty(BLOCK, dtype=np.uint8)
    for row in range(n):
        buf[:L] = data[row]
        end = _pad_into(buf, L)
        h[:] = IV_H
        _mmo_chain(buf, end, h, rk, tmp)
        out[row] = h
    return out


@njit(cache=True, nogil=True)
def seeded_mdc2_wide(flat, offsets, seeds):
    """Per entry k: mdc2(m_k || x_k) || mdc2(0x01 || m_k || x_k).

    ``flat``/``offsets`` hold the concatenated messages (offsets has n+1
    entries); ``seeds`` is an (n, 16) array of one-time seeds.
    """
    n = seeds.shape[0]
    maxlen = 0
    for k in range(n):
        ln = offsets[k + 1] - offsets[k]
        if ln > maxlen:
            maxlen = ln
    buf = np.empty(_padded_len(maxlen + BLOCK + 1), dtype=np.uint8)
    out = np.empty((n, 4 * BLOCK), dtype=np.uint8)
    h = np.empty(BLOCK, dtype=np.uint8)
    g = np.empty(BLOCK, dtype=np.uint8)
    rk = np.empty(44, dtype=np.int64)
    tmp = np.empty(BLOCK, dtype=np.uint8)
    tmp2 = np.empty(BLOCK, dtype=np.uint8)
    for k in range(n):
        a = offsets[k]
        ln = offsets[k + 1] - a
        for half in range(2):
            pre = half
            if pre:
                buf[0] = 0x01
            for t in range(ln):
                buf[pre + t] = flat[a + t]
            for t in range(BLOCK):
                buf[pre + ln + t] = seeds[k, t]
            end = _pad_into(buf, pre + ln + BLOCK)
            h[:] = IV_H
            g[:] = IV_H2
            _mdc2_chain(buf, end, h, g, rk, tmp, tmp2)
            base = 2 * BLOCK * half
            for t in range(BLOCK):
                out[k, base + t] = h[t]
                out[k, base + BLOCK + t] = g[t]
    return out
