"""Pluggable byte and integer compressors.

Two codec kinds exist. Textual codecs map bytes to bytes; integer codecs
map lists of non-negative integers to bytes. Builtin codecs are pure
Python/stdlib and byte-deterministic; external codecs shell out to a
command template ("{input}"/"{output}" placeholders) operating file to
file, mirroring how standalone compressors are normally benchmarked.

Bitstream conventions: MSB-first within bytes, varint (LEB128) headers.
"""

from __future__ import annotations

import bz2
import json
import os
import shlex
import shutil
import subprocess
import tempfile
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import CodecUnavailableError, GdcError, InputError

GDC_CODEC_CONFIG_ENV = "GDC_CODEC_CONFIG"


# Varint (LEB128) ------------------------------------------------------------


def uvarint(value: int) -> bytes:
    if value < 0 or value >= 1 << 64:
        raise InputError(f"varint value out of range: {value}")
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def read_uvarint(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise InputError("truncated varint stream")
        b = data[pos]
        pos += 1
        value |= (b & 0x7F) << shift
        if not b & 0x80:
            return value, pos
        shift += 7
        if shift > 63:
            raise InputError("varint longer than 64 bits")


def varint_encode(values) -> bytes:
    out = bytearray()
    for v in values:
        if v < 0 or v >= 1 << 64:
            raise InputError(f"varint value out of range: {v}")
        while True:
            b = v & 0x7F
            v >>= 7
            if v:
                out.append(b | 0x80)
            else:
                out.append(b)
                break
    return bytes(out)


def varint_decode(data: bytes, count: int | None = None) -> list[int]:
    """Decode a varint stream; with `count`, exactly that many values must
    consume the whole stream."""
    values: list[int] = []
    pos = 0
    while pos < len(data) and (count is None or len(values) < count):
        v, pos = read_uvarint(data, pos)
        values.append(v)
    if count is not None:
        if len(values) < count:
            raise InputError(f"truncated stream: {len(values)} of {count} values")
        if pos != len(data):
            raise InputError("trailing bytes after varint stream")
    return values


# Gap files ------------------------------------------------------------------


@dataclass
class GapFile:
    """Offset plus successive differences of a non-decreasing list."""

    offset: int
    gaps: list[int]


def gap_encode(sorted_values) -> GapFile:
    values = list(sorted_values)
    if not values:
        raise InputError("cannot gap-encode an empty list")
    gaps = []
    for prev, cur in zip(values, values[1:]):
        if cur < prev:
            raise InputError("input to gap_encode must be non-decreasing")
        gaps.append(cur - prev)
    return GapFile(values[0], gaps)


def gap_decode(g: GapFile, n: int) -> list[int]:
    if n != len(g.gaps) + 1:
        raise InputError(f"gap file holds {len(g.gaps) + 1} values, asked for {n}")
    values = [g.offset]
    for gap in g.gaps:
        if gap < 0:
            raise InputError("negative gap")
        values.append(values[-1] + gap)
    return values


# Bit I/O ---------------------------------------------------------------------


class BitWriter:
    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits == 0:
            return
        self._acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            self._buf.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def bit_length(self) -> int:
        return len(self._buf) * 8 + self._nbits

    def getvalue(self) -> bytes:
        if self._nbits:
            return bytes(self._buf) + bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return bytes(self._buf)


class BitReader:
    def __init__(self, data: bytes, start_bit: int = 0) -> None:
        self._data = data
        self._pos = start_bit

    def read(self, nbits: int) -> int:
        if nbits == 0:
            return 0
        end = self._pos + nbits
        if end > len(self._data) * 8:
            raise InputError("truncated bitstream")
        first = self._pos >> 3
        last = (end + 7) >> 3
        chunk = int.from_bytes(self._data[first:last], "big")
        self._pos = end
        return (chunk >> ((last << 3) - end)) & ((1 << nbits) - 1)


def _write_minimal_binary(w: BitWriter, x: int, r: int) -> None:
    # Minimal binary code for x in [0, r); r == 1 emits nothing.
    if r <= 1:
        return
    b = (r - 1).bit_length()
    t = (1 << b) - r
    if x < t:
        w.write(x, b - 1)
    else:
        w.write(x + t, b)


def _read_minimal_binary(r_reader: BitReader, r: int) -> int:
    if r <= 1:
        return 0
    b = (r - 1).bit_length()
    t = (1 << b) - r
    x = r_reader.read(b - 1)
    if x < t:
        return x
    return ((x << 1) | r_reader.read(1)) - t


# Binary interpolative coding --------------------------------------------------


def bic_encode(sorted_distinct, lo: int, hi: int) -> bytes:
    """Interpolative code for a strictly increasing list within [lo, hi].

    Recursive midpoint encoding with minimal-binary codes over shrinking
    ranges; a list that fills its range densely costs zero payload bits.
    """
    values = list(sorted_distinct)
    for prev, cur in zip(values, values[1:]):
        if cur <= prev:
            raise InputError("bic_encode input must be strictly increasing")
    if values and (values[0] < lo or values[-1] > hi):
        raise InputError(f"values outside range [{lo}, {hi}]")
    if len(values) > hi - lo + 1:
        raise InputError("more values than the range can hold")
    w = BitWriter()
    _bic_write(w, values, 0, len(values), lo, hi)
    return w.getvalue()


def _bic_write(w: BitWriter, values, i: int, j: int, lo: int, hi: int) -> None:
    n = j - i
    if n == 0:
        return
    if hi - lo + 1 == n:
        return  # dense range: content fully determined
    m = i + n // 2
    v = values[m]
    vlo = lo + (m - i)
    vhi = hi - (j - 1 - m)
    _write_minimal_binary(w, v - vlo, vhi - vlo + 1)
    _bic_write(w, values, i, m, lo, v - 1)
    _bic_write(w, values, m + 1, j, v + 1, hi)


def bic_decode(bits: bytes, n: int, lo: int, hi: int) -> list[int]:
    if n > hi - lo + 1:
        raise InputError("more values than the range can hold")
    out = [0] * n
    _bic_read(BitReader(bits), out, 0, n, lo, hi)
    return out


def _bic_read(r: BitReader, out, i: int, j: int, lo: int, hi: int) -> None:
    n = j - i
    if n == 0:
        return
    if hi - lo + 1 == n:
        for t in range(n):
            out[i + t] = lo + t
        return
    m = i + n // 2
    vlo = lo + (m - i)
    vhi = hi - (j - 1 - m)
    v = vlo + _read_minimal_binary(r, vhi - vlo + 1)
    out[m] = v
    _bic_read(r, out, i, m, lo, v - 1)
    _bic_read(r, out, m + 1, j, v + 1, hi)


# PFOR ------------------------------------------------------------------------

PFOR_BLOCK = 128


def pfor_encode(values, block: int = PFOR_BLOCK) -> bytes:
    """Fixed-block patched frame-of-reference coding.

    Per block, the bit width covers roughly the 90th percentile value;
    larger values keep their low bits in the packed area and are patched
    verbatim from an exception list.
    """
    values = list(values)
    out = bytearray(uvarint(len(values)))
    for start in range(0, len(values), block):
        chunk = values[start : start + block]
        for v in chunk:
            if v < 0 or v >= 1 << 32:
                raise InputError(f"pfor value out of range: {v}")
        ordered = sorted(chunk)
        width = ordered[(9 * (len(chunk) - 1)) // 10].bit_length()
        out += uvarint(width)
        if width:
            w = BitWriter()
            mask = (1 << width) - 1
            for v in chunk:
                w.write(v & mask, width)
            out += w.getvalue()
        exceptions = [(i, v) for i, v in enumerate(chunk) if v.bit_length() > width]
        out += uvarint(len(exceptions))
        for i, v in exceptions:
            out += uvarint(i)
            out += uvarint(v)
    return bytes(out)


def pfor_decode(data: bytes, block: int = PFOR_BLOCK) -> list[int]:
    total, pos = read_uvarint(data, 0)
    values: list[int] = []
    while len(values) < total:
        chunk_len = min(block, total - len(values))
        width, pos = read_uvarint(data, pos)
        if width > 32:
            raise InputError(f"corrupt pfor block width {width}")
        chunk = [0] * chunk_len
        if width:
            nbytes = (chunk_len * width + 7) // 8
            if pos + nbytes > len(data):
                raise InputError("truncated pfor block")
            r = BitReader(data[pos : pos + nbytes])
            for i in range(chunk_len):
                chunk[i] = r.read(width)
            pos += nbytes
        n_exc, pos = read_uvarint(data, pos)
        for _ in range(n_exc):
            i, pos = read_uvarint(data, pos)
            v, pos = read_uvarint(data, pos)
            if i >= chunk_len:
                raise InputError("corrupt pfor exception index")
            chunk[i] = v
        values.extend(chunk)
    if pos != len(data):
        raise InputError("trailing bytes after pfor stream")
    return values


# Codec specs and blobs --------------------------------------------------------


@dataclass(frozen=True)
class CodecSpec:
    id: str
    kind: str  # "textual" | "integer"
    backend: str  # "builtin" | "external"
    expects_fasta: bool = False  # external tools that only accept FASTA


@dataclass
class CompressedBlob:
    codec_id: str
    payload: bytes
    original_len: int  # plaintext bytes (textual) or value count (integer)


class _BuiltinTextual:
    backend = "builtin"

    def __init__(self, codec_id, compress_fn, decompress_fn):
        self.spec = CodecSpec(codec_id, "textual", "builtin")
        self._compress = compress_fn
        self._decompress = decompress_fn

    def compress(self, data: bytes) -> bytes:
        return self._compress(data)

    def decompress(self, payload: bytes, original_len: int) -> bytes:
        data = self._decompress(payload)
        if len(data) != original_len:
            raise InputError(
                f"corrupt payload: expected {original_len} bytes, got {len(data)}"
            )
        return data


class _BuiltinInteger:
    backend = "builtin"

    def __init__(self, codec_id, encode_fn, decode_fn):
        self.spec = CodecSpec(codec_id, "integer", "builtin")
        self._encode = encode_fn
        self._decode = decode_fn

    def encode(self, values) -> bytes:
        return self._encode(values)

    def decode(self, payload: bytes, count: int) -> list[int]:
        values = self._decode(payload, count)
        if len(values) != count:
            raise InputError(
                f"corrupt payload: expected {count} values, got {len(values)}"
            )
        return values


# twobit: DNA-aware byte packer. Head varint carries (original_len << 1 | mixed).
# Pure-ACGT inputs pack straight to 2 bits per base; anything else stores a
# 1-bit-per-byte base mask, the packed bases, then the literal bytes verbatim.

_TWOBIT_RANK = {65: 0, 67: 1, 84: 2, 71: 3}  # A C T G in DSK rank order
_TWOBIT_BASE = b"ACTG"

_RANK_LUT = np.zeros(256, dtype=np.uint8)
for _b, _r in _TWOBIT_RANK.items():
    _RANK_LUT[_b] = _r
_BASE_LUT = np.frombuffer(_TWOBIT_BASE, dtype=np.uint8)


def _pack_acgt(codes: np.ndarray) -> bytes:
    pad = (-len(codes)) % 4
    if pad:
        codes = np.concatenate([codes, np.zeros(pad, dtype=np.uint8)])
    quads = codes.reshape(-1, 4)
    packed = (
        (quads[:, 0] << 6) | (quads[:, 1] << 4) | (quads[:, 2] << 2) | quads[:, 3]
    )
    return packed.astype(np.uint8).tobytes()


def _unpack_acgt(packed: bytes, n: int) -> np.ndarray:
    raw = np.frombuffer(packed, dtype=np.uint8)
    codes = np.empty((len(raw), 4), dtype=np.uint8)
    codes[:, 0] = raw >> 6
    codes[:, 1] = (raw >> 4) & 3
    codes[:, 2] = (raw >> 2) & 3
    codes[:, 3] = raw & 3
    return _BASE_LUT[codes.reshape(-1)[:n]]


def twobit_compress(data: bytes) -> bytes:
    arr = np.frombuffer(data, dtype=np.uint8)
    is_base = np.isin(arr, (65, 67, 71, 84))
    if bool(is_base.all()):
        return uvarint(len(data) << 1) + _pack_acgt(_RANK_LUT[arr])
    out = bytearray(uvarint(len(data) << 1 | 1))
    out += np.packbits(is_base).tobytes()
    out += _pack_acgt(_RANK_LUT[arr[is_base]])
    out += arr[~is_base].tobytes()
    return bytes(out)


def twobit_decompress(payload: bytes) -> bytes:
    head, pos = read_uvarint(payload, 0)
    n, mixed = head >> 1, head & 1
    if not mixed:
        nbytes = (n + 3) // 4
        if len(payload) - pos < nbytes:
            raise InputError("truncated twobit payload")
        return _unpack_acgt(payload[pos:], n).tobytes()
    mask_bytes = (n + 7) // 8
    if len(payload) - pos < mask_bytes:
        raise InputError("truncated twobit payload")
    mask = np.unpackbits(
        np.frombuffer(payload[pos : pos + mask_bytes], dtype=np.uint8)
    )[:n].astype(bool)
    pos += mask_bytes
    n_bases = int(mask.sum())
    packed_bytes = (n_bases + 3) // 4
    n_literals = n - n_bases
    if len(payload) - pos != packed_bytes + n_literals:
        raise InputError("truncated twobit payload")
    out = np.empty(n, dtype=np.uint8)
    out[mask] = _unpack_acgt(payload[pos : pos + packed_bytes], n_bases)
    pos += packed_bytes
    out[~mask] = np.frombuffer(payload[pos:], dtype=np.uint8)
    return out.tobytes()


# BIC as a general integer codec: a prefix-sum of (value + 1) turns any
# non-negative list into a strictly increasing one, which the interpolative
# primitive encodes. Header: varint count, varint upper bound.


def bic_stream_encode(values) -> bytes:
    values = list(values)
    if not values:
        return uvarint(0)
    prefix = []
    acc = -1
    for v in values:
        if v < 0:
            raise InputError("integer codecs take non-negative values")
        acc += v + 1
        prefix.append(acc)
    return uvarint(len(values)) + uvarint(prefix[-1]) + bic_encode(prefix, 0, prefix[-1])


def bic_stream_decode(data: bytes, count: int) -> list[int]:
    n, pos = read_uvarint(data, 0)
    if n != count:
        raise InputError(f"bic stream holds {n} values, expected {count}")
    if n == 0:
        return []
    hi, pos = read_uvarint(data, pos)
    prefix = bic_decode(data[pos:], n, 0, hi)
    values = []
    prev = -1
    for p in prefix:
        values.append(p - prev - 1)
        prev = p
    return values


class ExternalCodec:
    """File-to-file adapter around an external compression tool."""

    def __init__(
        self,
        codec_id: str,
        compress_template: str,
        decompress_template: str,
        suffix: str = ".bin",
        kind: str = "textual",
        expects_fasta: bool = False,
    ):
        self.spec = CodecSpec(codec_id, kind, "external", expects_fasta)
        self.compress_template = compress_template
        self.decompress_template = decompress_template
        self.suffix = suffix

    def available(self) -> bool:
        argv0 = shlex.split(self.compress_template)[0]
        return shutil.which(argv0) is not None

    def _run(self, template: str, data: bytes) -> bytes:
        if not self.available():
            raise CodecUnavailableError(
                f"external codec {self.spec.id!r}: command not found"
            )
        with tempfile.TemporaryDirectory(prefix="gdc-codec-") as tmp:
            inp = os.path.join(tmp, "in" + self.suffix)
            outp = os.path.join(tmp, "out" + self.suffix)
            with open(inp, "wb") as fh:
                fh.write(data)
            argv = [
                a.format(input=inp, output=outp) for a in shlex.split(template)
            ]
            proc = subprocess.run(argv, capture_output=True)
            if proc.returncode != 0:
                raise GdcError(
                    f"external codec {self.spec.id!r} failed "
                    f"(exit {proc.returncode}): {proc.stderr.decode(errors='replace').strip()}"
                )
            if not os.path.exists(outp):
                raise GdcError(
                    f"external codec {self.spec.id!r} produced no output file"
                )
            with open(outp, "rb") as fh:
                return fh.read()

    def compress(self, data: bytes) -> bytes:
        return self._run(self.compress_template, data)

    def decompress(self, payload: bytes, original_len: int) -> bytes:
        data = self._run(self.decompress_template, payload)
        if len(data) != original_len:
            raise InputError(
                f"corrupt payload: expected {original_len} bytes, got {len(data)}"
            )
        return data


class CodecRegistry:
    def __init__(self) -> None:
        self._codecs: dict[str, object] = {}

    def register(self, codec) -> None:
        cid = codec.spec.id
        if cid in self._codecs:
            raise InputError(f"codec id {cid!r} already registered")
        self._codecs[cid] = codec

    def get(self, codec_id: str):
        try:
            return self._codecs[codec_id]
        except KeyError:
            raise CodecUnavailableError(f"unknown codec {codec_id!r}") from None

    def __contains__(self, codec_id: str) -> bool:
        return codec_id in self._codecs

    def ids(self, kind: str | None = None) -> list[str]:
        return [
            cid
            for cid, c in self._codecs.items()
            if kind is None or c.spec.kind == kind
        ]


def _make_builtins() -> list[object]:
    return [
        _BuiltinTextual("store", lambda d: d, lambda p: p),
        _BuiltinTextual("twobit", twobit_compress, twobit_decompress),
        _BuiltinTextual(
            "zlib", lambda d: zlib.compress(d, 6), zlib.decompress
        ),
        _BuiltinTextual(
            "bzip2", lambda d: bz2.compress(d, 9), bz2.decompress
        ),
        _BuiltinInteger(
            "varint", varint_encode, lambda p, n: varint_decode(p, n)
        ),
        _BuiltinInteger("bic", bic_stream_encode, bic_stream_decode),
        _BuiltinInteger("pfor", pfor_encode, lambda p, n: pfor_decode(p)),
    ]


def builtin_registry() -> CodecRegistry:
    reg = CodecRegistry()
    for codec in _make_builtins():
        reg.register(codec)
    return reg


def load_external_config(registry: CodecRegistry, path) -> None:
    """Register external codecs from a JSON config file.

    Schema: {"<id>": {"compress": "...{input}...{output}...",
    "decompress": "...", "suffix": ".xz", "kind": "textual",
    "expects_fasta": false}, ...}
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read codec config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise InputError("codec config must be a JSON object")
    for cid, entry in config.items():
        for key in ("compress", "decompress"):
            if key not in entry:
                raise InputError(f"codec {cid!r}: missing {key!r} template")
            if "{input}" not in entry[key] or "{output}" not in entry[key]:
                raise InputError(
                    f"codec {cid!r}: {key} template needs "
                    "{input} and {output} placeholders"
                )
        registry.register(
            ExternalCodec(
                cid,
                entry["compress"],
                entry["decompress"],
                suffix=entry.get("suffix", ".bin"),
                kind=entry.get("kind", "textual"),
                expects_fasta=bool(entry.get("expects_fasta", False)),
            )
        )


_default_registry: CodecRegistry | None = None


def default_registry(refresh: bool = False) -> CodecRegistry:
    """Builtins plus any external codecs named by $GDC_CODEC_CONFIG."""
    global _default_registry
    if _default_registry is None or refresh:
        reg = builtin_registry()
        config_path = os.environ.get(GDC_CODEC_CONFIG_ENV)
        if config_path:
            load_external_config(reg, config_path)
        _default_registry = reg
    return _default_registry


def compress_bytes(codec, data: bytes) -> CompressedBlob:
    if codec.spec.kind != "textual":
        raise InputError(f"codec {codec.spec.id!r} is not a textual codec")
    return CompressedBlob(codec.spec.id, codec.compress(data), len(data))


def decompress_bytes(blob: CompressedBlob, registry: CodecRegistry | None = None) -> bytes:
    codec = (registry or default_registry()).get(blob.codec_id)
    return codec.decompress(blob.payload, blob.original_len)


def encode_ints(codec, values) -> CompressedBlob:
    if codec.spec.kind != "integer":
        raise InputError(f"codec {codec.spec.id!r} is not an integer codec")
    values = list(values)
    return CompressedBlob(codec.spec.id, codec.encode(values), len(values))


def decode_ints(blob: CompressedBlob, registry: CodecRegistry | None = None) -> list[int]:
    codec = (registry or default_registry()).get(blob.codec_id)
    return codec.decode(blob.payload, blob.original_len)
