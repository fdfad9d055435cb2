"""Succinct-on-disk machinery: FM-index and a static frequency map.

The FM-index is built over one or more DNA strings, each terminated by its
own sentinel. Sentinels sort below letters and in string order, which makes
row t of the suffix array the t-th string terminator; extraction walks the
LF mapping backward from those rows, and counting is plain backward search.

The static frequency map is exact on the k-mers it was built from and
merely deterministic on anything else, the usual static-function contract.
"""

from __future__ import annotations

import struct
import zlib
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .archive import Archive, read_payload, write_archive
from .codecs import (
    CodecRegistry,
    default_registry,
    read_uvarint,
    uvarint,
    varint_encode,
)
from .errors import ArchiveError, InputError, InternalError
from .kmer import (
    KmerDictionary,
    canonicalize,
    is_canonical,
    iter_canonical_windows,
    pack_kmer,
    reverse_complement,
)
from .spss import build_spss

_LETTERS = "ACGT"
_LETTER_CODE = {"A": 0, "C": 1, "G": 2, "T": 3}  # index-internal order
_SENTINEL_CODE = 4
_OCC_STEP = 64

FM_MAGIC = b"GDCIDX1"
SFM_MAGIC = b"GDCSFM1"


def _suffix_array(keys: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling over integer keys."""
    n = len(keys)
    rank = keys.astype(np.int64)
    step = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        second[: n - step] = rank[step:]
        order = np.lexsort((second, rank))
        changed = np.empty(n, dtype=np.int64)
        changed[0] = 0
        changed[1:] = (rank[order][1:] != rank[order][:-1]) | (
            second[order][1:] != second[order][:-1]
        )
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[order] = np.cumsum(changed)
        rank = new_rank
        if rank[order[-1]] == n - 1:
            return order.astype(np.int64)
        step *= 2


@dataclass
class FmIndex:
    """BWT + rank checkpoints + cumulative counts + sampled suffix array."""

    string_count: int
    text_len: int
    sample_rate: int
    bwt: np.ndarray  # uint8 codes, 0..3 letters, 4 sentinel
    c_table: list[int]  # per letter code: # suffixes starting below it
    occ: np.ndarray  # checkpoints every _OCC_STEP rows, shape (ckpts, 4)
    sentinel_which: list[int]  # per sentinel-coded BWT row, its string index
    sa_samples: dict[int, int] = field(default_factory=dict)

    # -- queries ---------------------------------------------------------

    def _rank(self, code: int, row: int) -> int:
        """Occurrences of letter `code` in bwt[0:row]."""
        ckpt = row // _OCC_STEP
        base = int(self.occ[ckpt, code])
        tail = self.bwt[ckpt * _OCC_STEP : row]
        return base + int(np.count_nonzero(tail == code))

    def count(self, pattern: str) -> int:
        if not pattern:
            raise InputError("empty patterns are not accepted")
        lo, hi = 0, self.text_len
        for ch in reversed(pattern):
            code = _LETTER_CODE.get(ch)
            if code is None:
                raise InputError(f"invalid symbol {ch!r} in pattern")
            c = self.c_table[code]
            lo = c + self._rank(code, lo)
            hi = c + self._rank(code, hi)
            if lo >= hi:
                return 0
        return hi - lo

    def extract(self) -> list[str]:
        """Reproduce the indexed strings, in build order."""
        out = []
        for t in range(self.string_count):
            chars: list[str] = []
            row = t  # row t is the suffix at string t's terminator
            while True:
                code = int(self.bwt[row])
                if code == _SENTINEL_CODE:
                    break
                chars.append(_LETTERS[code])
                row = self.c_table[code] + self._rank(code, row)
            out.append("".join(reversed(chars)))
        return out

    def locate(self, row: int) -> int:
        """Text position of the suffix in `row` (sampled-SA walk)."""
        steps = 0
        while row not in self.sa_samples and row >= self.string_count:
            code = int(self.bwt[row])
            if code == _SENTINEL_CODE:
                row = self._sentinel_target(row)
            else:
                row = self.c_table[code] + self._rank(code, row)
            steps += 1
        if row in self.sa_samples:
            return self.sa_samples[row] + steps
        # rows below string_count hold the sentinel suffixes; their
        # positions were recorded as samples at build time
        raise InternalError("unsampled sentinel row")

    def _sentinel_target(self, row: int) -> int:
        idx = int(np.count_nonzero(self.bwt[:row] == _SENTINEL_CODE))
        return self.sentinel_which[idx]

    def size_bytes(self) -> int:
        return len(self.serialize())

    # -- serialization ---------------------------------------------------

    def serialize(self) -> bytes:
        head = FM_MAGIC + struct.pack(
            "<BQQI", 1, self.text_len, self.string_count, self.sample_rate
        )
        body = bytearray()
        body += self.bwt.tobytes()
        body += varint_encode(self.sentinel_which)
        samples = sorted(self.sa_samples.items())
        body += uvarint(len(samples))
        prev_row = 0
        for row, pos in samples:
            body += uvarint(row - prev_row)
            body += uvarint(pos)
            prev_row = row
        return head + bytes(body)

    @classmethod
    def deserialize(cls, data: bytes) -> "FmIndex":
        if data[: len(FM_MAGIC)] != FM_MAGIC:
            raise ArchiveError("not an FM-index file (bad magic)")
        off = len(FM_MAGIC)
        version, text_len, string_count, rate = struct.unpack_from("<BQQI", data, off)
        if version != 1:
            raise ArchiveError(f"unsupported FM-index version {version}")
        off += struct.calcsize("<BQQI")
        bwt = np.frombuffer(data[off : off + text_len], dtype=np.uint8).copy()
        if len(bwt) != text_len:
            raise ArchiveError("truncated FM-index file")
        off += text_len
        pos = off
        which = []
        for _ in range(string_count):
            v, pos = read_uvarint(data, pos)
            which.append(v)
        n_samples, pos = read_uvarint(data, pos)
        samples = {}
        row = 0
        for _ in range(n_samples):
            delta, pos = read_uvarint(data, pos)
            row += delta
            value, pos = read_uvarint(data, pos)
            samples[row] = value
        c_table, occ = _derive_tables(bwt, string_count)
        return cls(string_count, text_len, rate, bwt, c_table, occ, which, samples)


def _derive_tables(bwt: np.ndarray, string_count: int):
    counts = [int(np.count_nonzero(bwt == code)) for code in range(4)]
    c_table = []
    acc = string_count  # sentinels occupy the lowest rows
    for code in range(4):
        c_table.append(acc)
        acc += counts[code]
    ckpts = len(bwt) // _OCC_STEP + 1
    occ = np.zeros((ckpts, 4), dtype=np.int64)
    for code in range(4):
        hits = np.cumsum(bwt == code)
        rows = np.arange(1, ckpts) * _OCC_STEP
        occ[1:, code] = hits[rows - 1]
    return c_table, occ


def fm_build(text_or_strings, sample_rate: int = 32) -> FmIndex:
    """Index one string or a list of strings over {A,C,G,T}."""
    strings = (
        [text_or_strings] if isinstance(text_or_strings, str) else list(text_or_strings)
    )
    if not strings or sum(len(s) for s in strings) == 0:
        raise InputError("cannot index empty input")
    if sample_rate < 1:
        raise InputError("sample rate must be >= 1")
    m = len(strings)

    keys = []
    for t, s in enumerate(strings):
        if not s:
            raise InputError("cannot index an empty string")
        for ch in s:
            code = _LETTER_CODE.get(ch)
            if code is None:
                raise InputError(f"invalid symbol {ch!r} in input")
            keys.append(m + code)
        keys.append(t)  # per-string sentinel, ordered below all letters
    text = np.array(keys, dtype=np.int64)
    n = len(text)

    sa = _suffix_array(text)
    prev = np.where(sa > 0, sa - 1, n - 1)
    prev_keys = text[prev]
    bwt = np.where(prev_keys >= m, prev_keys - m, _SENTINEL_CODE).astype(np.uint8)

    # which string's sentinel sits behind each sentinel-coded BWT row,
    # in row order
    sentinel_rows = np.nonzero(bwt == _SENTINEL_CODE)[0]
    sentinel_which = [int(text[prev[r]]) for r in sentinel_rows]

    c_table, occ = _derive_tables(bwt, m)

    samples = {
        int(row): int(sa[row]) for row in np.nonzero(sa % sample_rate == 0)[0]
    }
    for row in range(m):  # sentinel suffix rows double as anchors for locate
        samples.setdefault(row, int(sa[row]))

    return FmIndex(m, n, sample_rate, bwt, c_table, occ, sentinel_which, samples)


def fm_count(ix: FmIndex, pattern: str) -> int:
    return ix.count(pattern)


def fm_extract(ix: FmIndex) -> list[str]:
    return ix.extract()


# Static frequency map -----------------------------------------------------


@dataclass
class StaticFreqMap:
    """Key->frequency static function over packed, DSK-sorted k-mers.

    Exact for every build key; queries outside the key set return an
    arbitrary but deterministic frequency, never an error.
    """

    k: int
    keys: list[int]  # packed 2-bit codes, ascending (== DSK order)
    freqs: list[int]

    @property
    def key_count(self) -> int:
        return len(self.keys)

    def query(self, kmer: str) -> int:
        if len(kmer) != self.k:
            raise InputError(f"expected a {self.k}-mer, got {kmer!r}")
        if not self.keys:
            return 0
        code = pack_kmer(kmer)
        i = bisect_left(self.keys, code)
        if i < len(self.keys) and self.keys[i] == code:
            return self.freqs[i]
        return self.freqs[min(i, len(self.keys) - 1)]

    def contains(self, kmer: str) -> bool:
        code = pack_kmer(kmer)
        i = bisect_left(self.keys, code)
        return i < len(self.keys) and self.keys[i] == code

    def serialize(self) -> bytes:
        key_width = (2 * self.k + 7) // 8
        head = SFM_MAGIC + struct.pack("<BIQ", 1, self.k, len(self.keys))
        body = bytearray()
        for key in self.keys:
            body += key.to_bytes(key_width, "little")
        body += varint_encode(self.freqs)
        return head + bytes(body)

    @classmethod
    def deserialize(cls, data: bytes) -> "StaticFreqMap":
        if data[: len(SFM_MAGIC)] != SFM_MAGIC:
            raise ArchiveError("not a frequency-map file (bad magic)")
        off = len(SFM_MAGIC)
        version, k, count = struct.unpack_from("<BIQ", data, off)
        if version != 1:
            raise ArchiveError(f"unsupported frequency-map version {version}")
        off += struct.calcsize("<BIQ")
        key_width = (2 * k + 7) // 8
        keys = []
        for i in range(count):
            start = off + i * key_width
            keys.append(int.from_bytes(data[start : start + key_width], "little"))
        pos = off + count * key_width
        freqs = []
        for _ in range(count):
            v, pos = read_uvarint(data, pos)
            freqs.append(v)
        return cls(k, keys, freqs)


def sfm_build(d: KmerDictionary) -> StaticFreqMap:
    keys = [pack_kmer(kmer) for kmer in d.kmers]  # DSK order == packed order
    return StaticFreqMap(d.k, keys, list(d.freqs))


def sfm_query(m: StaticFreqMap, kmer: str) -> int:
    return m.query(kmer)


# Scenario operations --------------------------------------------------------


def implicit_membership(ix: FmIndex, m: StaticFreqMap, query: str) -> int | None:
    """Frequency of a canonical k-mer against an index over an SPSS,
    or None when absent.

    The SPSS contains each k-mer in canonical or non-canonical orientation,
    so both forms are searched.
    """
    if len(query) != m.k:
        raise InputError(f"expected a {m.k}-mer, got {query!r}")
    if not is_canonical(query):
        raise InputError(
            f"query must be canonical; {query!r} canonicalizes to "
            f"{canonicalize(query)!r}"
        )
    if ix.count(query) > 0 or ix.count(reverse_complement(query)) > 0:
        return m.query(query)
    return None


def sd_recover(ix: FmIndex, m: StaticFreqMap, case: str) -> KmerDictionary:
    """Rebuild the dictionary from its succinct representation.

    Explicit: the indexed strings are the k-mers themselves. Implicit: the
    indexed strings form an SPSS, so scan windows and canonicalize.
    """
    strings = ix.extract()
    if case == "Explicit":
        kmers = strings
    elif case == "Implicit":
        seen: dict[str, None] = {}
        for s in strings:
            for kmer in iter_canonical_windows(s, m.k):
                seen[kmer] = None
        kmers = list(seen)
    else:
        raise InputError(f"unknown succinct case {case!r}")
    pairs = []
    for kmer in kmers:
        freq = m.query(kmer)
        if freq < 1:
            raise InternalError(
                f"frequency map returned {freq} for indexed k-mer {kmer!r}"
            )
        pairs.append((kmer, freq))
    return KmerDictionary.from_pairs(pairs, m.k, validate=False)


SD_CASES = ("Explicit", "Implicit")


def sd_compress(
    d: KmerDictionary,
    case: str,
    out_dir,
    codec_f: str = "store",
    registry: CodecRegistry | None = None,
    sample_rate: int = 32,
) -> Archive:
    """Build the succinct archive: an FM-index payload stored verbatim and
    a frequency-map payload run through a textual codec.

    The manifest also records how the index file would shrink under zlib,
    as a point of comparison only.
    """
    if case not in SD_CASES:
        raise InputError(f"unknown succinct case {case!r}")
    registry = registry or default_registry()
    codec = registry.get(codec_f)
    if codec.spec.kind != "textual":
        raise InputError(f"codec {codec_f!r} cannot compress the frequency map")

    if case == "Explicit":
        ix = fm_build(list(d.kmers), sample_rate)
    else:
        ix = fm_build(build_spss(d).strings, sample_rate)
    sfm = sfm_build(d)

    fm_bytes = ix.serialize()
    sfm_bytes = sfm.serialize()
    sfm_payload = codec.compress(sfm_bytes)

    return write_archive(
        out_dir,
        case,
        d.k,
        "store",
        codec_f,
        False,
        len(d),
        [
            ("fm.payload", "fm", "store", "raw", len(fm_bytes), fm_bytes),
            ("sfm.payload", "sfm", codec_f, "raw", len(sfm_bytes), sfm_payload),
        ],
        extra={"fm_zlib_bytes": len(zlib.compress(fm_bytes, 6))},
    )


def sd_load(archive: Archive, registry: CodecRegistry | None = None):
    registry = registry or default_registry()
    fm_data, _ = read_payload(archive, "fm")
    sfm_data, sfm_info = read_payload(archive, "sfm")
    codec = registry.get(sfm_info.codec)
    sfm_bytes = codec.decompress(sfm_data, sfm_info.original_len)
    ix = FmIndex.deserialize(fm_data)
    sfm = StaticFreqMap.deserialize(sfm_bytes)
    if sfm.k != archive.k:
        raise ArchiveError(f"frequency map k={sfm.k} but archive k={archive.k}")
    return ix, sfm


def sd_decompress(archive: Archive, registry: CodecRegistry | None = None) -> KmerDictionary:
    ix, sfm = sd_load(archive, registry)
    return sd_recover(ix, sfm, archive.case)
