"""Bit-exact LZ77-style codec used as a compression bound on algorithmic information.

Format (all multi-bit fields big-endian, bits packed MSB first)::

    header   32 bits   uncompressed length
    literal  0 + 8 bits byte
    match    1 + 15 bits (distance - 1) + 8 bits (length - 3)

Distances run 1..32768, lengths 3..258.  The encoder is greedy: at every
position it takes the longest match in the window, the nearest one on ties,
and emits a literal when no match of length 3 exists.  The final byte is
zero-padded.
"""
from __future__ import annotations

import numba
import numpy as np

WINDOW = 32768
MIN_MATCH = 3
MAX_MATCH = MIN_MATCH + 255
HASH_BITS = 16


@numba.njit(cache=True)
def _hash3(data, i):
    v = (np.uint32(data[i]) << 16) | (np.uint32(data[i + 1]) << 8) | np.uint32(data[i + 2])
    return ((v * np.uint32(2654435761)) & np.uint32(0xFFFFFFFF)) >> np.uint32(32 - HASH_BITS)


@numba.njit(cache=True)
def _compress(data):
    n = data.shape[0]
    out = np.zeros(4 + (n * 9) // 8 + 2, dtype=np.uint8)
    out[0] = (n >> 24) & 0xFF
    out[1] = (n >> 16) & 0xFF
    out[2] = (n >> 8) & 0xFF
    out[3] = n & 0xFF
    pos_out = 4
    acc = np.uint64(0)
    nbits = 0

    head = np.full(1 << HASH_BITS, -1, dtype=np.int64)
    prev = np.full(max(n, 1), -1, dtype=np.int64)
    inserted = 0  # positions < inserted are in the chains

    p = 0
    while p < n:
        best_len = 0
        best_dist = 0
        if p + MIN_MATCH <= n:
            maxlen = min(MAX_MATCH, n - p)
            lo = p - WINDOW
            c = head[_hash3(data, p)]
            while c >= 0 and c >= lo:
                if data[c + best_len] == data[p + best_len]:
                    length = 0
                    while length < maxlen and data[c + length] == data[p + length]:
                        length += 1
                    if length > best_len:
                        best_len = length
                        best_dist = p - c
                        if length == maxlen:
                            break
                c = prev[c]
        if best_len >= MIN_MATCH:
            token = (np.uint64(1) << np.uint64(23)) | (np.uint64(best_dist - 1) << np.uint64(8)) \
                | np.uint64(best_len - MIN_MATCH)
            acc = (acc << np.uint64(24)) | token
            nbits += 24
            step = best_len
        else:
            acc = (acc << np.uint64(9)) | np.uint64(data[p])
            nbits += 9
            step = 1
        while nbits >= 8:
            nbits -= 8
            out[pos_out] = np.uint8((acc >> np.uint64(nbits)) & np.uint64(0xFF))
            pos_out += 1
        acc &= (np.uint64(1) << np.uint64(nbits)) - np.uint64(1)
        end = p + step
        while inserted < end:
            if inserted + MIN_MATCH <= n:
                h = _hash3(data, inserted)
                prev[inserted] = head[h]
                head[h] = inserted
            inserted += 1
        p = end
    if nbits > 0:
        out[pos_out] = np.uint8((acc << np.uint64(8 - nbits)) & np.uint64(0xFF))
        pos_out += 1
    return out[:pos_out]


@numba.njit(cache=True)
def _decompress(blob, n):
    out = np.zeros(n, dtype=np.uint8)
    bitpos = 32
    total_bits = blob.shape[0] * 8
    o = 0
    while o < n:
        if bitpos + 9 > total_bits:
            return out, -1
        flag = (blob[bitpos >> 3] >> (7 - (bitpos & 7))) & 1
        bitpos += 1
        if flag == 0:
            v = 0
            for _ in range(8):
                v = (v << 1) | ((blob[bitpos >> 3] >> (7 - (bitpos & 7))) & 1)
                bitpos += 1
            out[o] = v
            o += 1
        else:
            if bitpos + 23 > total_bits:
                return out, -1
            v = 0
            for _ in range(23):
                v = (v << 1) | ((blob[bitpos >> 3] >> (7 - (bitpos & 7))) & 1)
                bitpos += 1
            dist = (v >> 8) + 1
            length = (v & 0xFF) + MIN_MATCH
            if dist > o or o + length > n:
                return out, -1
            for k in range(length):
                out[o] = out[o - dist]
                o += 1
    return out, 0


def compress(data: bytes) -> bytes:
    arr = np.frombuffer(bytes(data), dtype=np.uint8)
    if arr.shape[0] >= 1 << 32:
        raise ValueError("payload too large for the 32-bit length header")
    return _compress(arr).tobytes()


def decompress(blob: bytes) -> bytes:
    if len(blob) < 4:
        raise ValueError("truncated header")
    n = int.from_bytes(blob[:4], "big")
    out, status = _decompress(np.frombuffer(bytes(blob), dtype=np.uint8), n)
    if status != 0:
        raise ValueError("corrupt or truncated stream")
    return out.tobytes()
