"""Compressed-on-disk cases DP0..DP3.

All four cases write an Archive and invert back to the exact dictionary,
preserving the k-mer<->frequency bijection:

  DP0  both streams verbatim, in DSK order.
  DP1  k-mers re-sorted byte-lexicographically (the `sort` utility order on
       their ASCII text), frequencies permuted alongside.
  DP2  frequencies sorted non-decreasing, k-mers permuted alongside; the
       sorted stream may be stored as offset+gaps.
  DP3  k-mers carried implicitly by an SPSS; the frequency stream is
       re-aligned to window positions by a sort/merge/sort round so that
       position i of the SPSS window scan owns frequency i.
"""

from __future__ import annotations

from dataclasses import dataclass

from .archive import Archive, open_archive, read_payload, write_archive
from .archive import archive_size_bytes  # noqa: F401  (re-exported)
from .codecs import (
    CodecRegistry,
    default_registry,
    gap_decode,
    gap_encode,
    GapFile,
)
from .errors import ArchiveError, InputError, InternalError
from .kmer import KmerDictionary, dsk_key, parse_fasta
from .spss import Spss, build_spss, iter_windows, spss_from_fasta, spss_to_fasta

CASES = ("DP0", "DP1", "DP2", "DP3")


@dataclass
class PipelineConfig:
    case: str
    codec_d: str = "store"
    codec_f: str = "store"
    use_gaps: bool = False

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise InputError(f"unknown case {self.case!r}; expected one of {CASES}")


# Stream plaintext forms -------------------------------------------------------


def _kmer_text(kmers, fasta: bool) -> bytes:
    if fasta:
        return "".join(f">{i}\n{kmer}\n" for i, kmer in enumerate(kmers)).encode()
    return "".join(f"{kmer}\n" for kmer in kmers).encode()


def _kmer_untext(data: bytes, fasta: bool) -> list[str]:
    text = data.decode()
    if fasta:
        return [seq for _, seq in parse_fasta(text)]
    return [line for line in text.splitlines() if line]


def _int_lines(values) -> bytes:
    return "".join(f"{v}\n" for v in values).encode()


def _int_unlines(data: bytes) -> list[int]:
    try:
        return [int(line) for line in data.decode().splitlines() if line]
    except ValueError as exc:
        raise ArchiveError(f"corrupt integer stream: {exc}") from exc


def _encode_freq_stream(codec, values, use_gaps: bool):
    """Returns (payload_bytes, form, original_len)."""
    values = list(values)
    if use_gaps and values:
        g = gap_encode(values)
        values = [g.offset] + g.gaps
    if codec.spec.kind == "integer":
        payload = codec.encode(values)
        return payload, "ints", len(values)
    plaintext = _int_lines(values)
    return codec.compress(plaintext), "lines", len(plaintext)


def _decode_freq_stream(codec, payload: bytes, form: str, original_len: int,
                        use_gaps: bool, entry_count: int) -> list[int]:
    if codec.spec.kind == "integer":
        if form != "ints":
            raise ArchiveError(f"integer codec with form {form!r}")
        values = codec.decode(payload, original_len)
    else:
        values = _int_unlines(codec.decompress(payload, original_len))
    if use_gaps and entry_count > 0:
        values = gap_decode(GapFile(values[0], values[1:]), entry_count)
    if len(values) != entry_count:
        raise ArchiveError(
            f"frequency stream holds {len(values)} values, expected {entry_count}"
        )
    return values


def _d_codec(cfg: PipelineConfig, registry: CodecRegistry):
    codec = registry.get(cfg.codec_d)
    if codec.spec.kind != "textual":
        raise InputError(f"codec {cfg.codec_d!r} cannot compress a k-mer stream")
    return codec


# DP0..DP2 ----------------------------------------------------------------------


def _explicit_compress(d: KmerDictionary, cfg: PipelineConfig, out_dir,
                       registry: CodecRegistry) -> Archive:
    codec_d = _d_codec(cfg, registry)
    codec_f = registry.get(cfg.codec_f)

    if cfg.case == "DP0":
        pairs = d.pairs()  # already DSK-sorted
    elif cfg.case == "DP1":
        pairs = sorted(d.pairs(), key=lambda p: p[0])  # ASCII byte order
    elif cfg.case == "DP2":
        pairs = sorted(d.pairs(), key=lambda p: (p[1], dsk_key(p[0])))
    else:
        raise InternalError(f"not an explicit case: {cfg.case}")

    kmers = [p[0] for p in pairs]
    freqs = [p[1] for p in pairs]

    d_plain = _kmer_text(kmers, codec_d.spec.expects_fasta)
    d_payload = codec_d.compress(d_plain)
    f_payload, f_form, f_len = _encode_freq_stream(codec_f, freqs, cfg.use_gaps)

    return write_archive(
        out_dir,
        cfg.case,
        d.k,
        cfg.codec_d,
        cfg.codec_f,
        cfg.use_gaps,
        len(d),
        [
            ("d.payload", "d", cfg.codec_d,
             "fasta" if codec_d.spec.expects_fasta else "lines",
             len(d_plain), d_payload),
            ("f.payload", "f", cfg.codec_f, f_form, f_len, f_payload),
        ],
    )


def _explicit_decompress(archive: Archive, registry: CodecRegistry) -> KmerDictionary:
    codec_d = registry.get(archive.codec_d)
    codec_f = registry.get(archive.codec_f)

    d_data, d_info = read_payload(archive, "d")
    kmers = _kmer_untext(
        codec_d.decompress(d_data, d_info.original_len),
        d_info.form == "fasta",
    )
    f_data, f_info = read_payload(archive, "f")
    freqs = _decode_freq_stream(
        codec_f, f_data, f_info.form, f_info.original_len,
        archive.use_gaps, archive.entry_count,
    )
    if len(kmers) != len(freqs):
        raise ArchiveError(
            f"{len(kmers)} k-mers but {len(freqs)} frequencies in archive"
        )
    return KmerDictionary.from_pairs(zip(kmers, freqs), archive.k, validate=False)


def dp0_compress(d: KmerDictionary, cfg: PipelineConfig, out_dir,
                 registry: CodecRegistry | None = None) -> Archive:
    if cfg.case != "DP0":
        raise InputError(f"dp0_compress got case {cfg.case}")
    return _explicit_compress(d, cfg, out_dir, registry or default_registry())


def dp1_compress(d: KmerDictionary, cfg: PipelineConfig, out_dir,
                 registry: CodecRegistry | None = None) -> Archive:
    if cfg.case != "DP1":
        raise InputError(f"dp1_compress got case {cfg.case}")
    return _explicit_compress(d, cfg, out_dir, registry or default_registry())


def dp2_compress(d: KmerDictionary, cfg: PipelineConfig, out_dir,
                 registry: CodecRegistry | None = None) -> Archive:
    if cfg.case != "DP2":
        raise InputError(f"dp2_compress got case {cfg.case}")
    return _explicit_compress(d, cfg, out_dir, registry or default_registry())


# DP3 ----------------------------------------------------------------------------


def dp3_compress(d: KmerDictionary, cfg: PipelineConfig, out_dir,
                 registry: CodecRegistry | None = None,
                 spss: Spss | None = None) -> Archive:
    """Store the k-mers implicitly as an SPSS plus a position-aligned
    frequency stream.

    Every window of the SPSS (strings in file order, starts ascending, one
    global 0-based index) is paired with its position, the pairs are sorted
    by k-mer and merged against the DSK-sorted dictionary to pick up each
    frequency, then re-sorted by position. A supplied `spss` skips the
    construction step; the merge still cross-checks it against the
    dictionary either way.
    """
    if cfg.case != "DP3":
        raise InputError(f"dp3_compress got case {cfg.case}")
    if d.k < 2:
        raise InputError("DP3 requires k >= 2")
    registry = registry or default_registry()
    codec_d = _d_codec(cfg, registry)
    codec_f = registry.get(cfg.codec_f)

    supplied = spss is not None
    s = spss if supplied else build_spss(d)

    by_kmer = s.sorted_windows()
    if len(by_kmer) != len(d):
        err = InputError if supplied else InternalError
        raise err(
            f"SPSS yields {len(by_kmer)} windows but dictionary has {len(d)} k-mers"
        )
    freqs_by_pos = [0] * len(by_kmer)
    for (pos, win_kmer), (dict_kmer, freq) in zip(by_kmer, d.pairs()):
        if win_kmer != dict_kmer:
            err = InputError if supplied else InternalError
            raise err(
                f"merge mismatch: window k-mer {win_kmer!r} vs dictionary "
                f"{dict_kmer!r}; SPSS does not match the dictionary"
            )
        freqs_by_pos[pos] = freq

    s_plain = spss_to_fasta(s).encode()
    s_payload = codec_d.compress(s_plain)
    f_payload, f_form, f_len = _encode_freq_stream(codec_f, freqs_by_pos, cfg.use_gaps)

    return write_archive(
        out_dir,
        "DP3",
        d.k,
        cfg.codec_d,
        cfg.codec_f,
        cfg.use_gaps,
        len(d),
        [
            ("s.payload", "s", cfg.codec_d, "fasta", len(s_plain), s_payload),
            ("f.payload", "f", cfg.codec_f, f_form, f_len, f_payload),
        ],
        extra={"spss_strings": len(s.strings), "spss_chars": s.total_chars()},
    )


def dp3_decompress(archive: Archive, registry: CodecRegistry | None = None) -> KmerDictionary:
    registry = registry or default_registry()
    codec_d = registry.get(archive.codec_d)
    codec_f = registry.get(archive.codec_f)

    s_data, s_info = read_payload(archive, "s")
    s = spss_from_fasta(codec_d.decompress(s_data, s_info.original_len).decode(),
                        archive.k)
    f_data, f_info = read_payload(archive, "f")
    freqs = _decode_freq_stream(
        codec_f, f_data, f_info.form, f_info.original_len,
        archive.use_gaps, archive.entry_count,
    )

    pairs: dict[str, int] = {}
    count = 0
    for pos, kmer in iter_windows(s):
        if pos >= len(freqs):
            raise ArchiveError(
                f"frequency stream shorter than window count ({len(freqs)})"
            )
        if kmer in pairs:
            raise InternalError(f"duplicate window k-mer {kmer!r} in SPSS")
        pairs[kmer] = freqs[pos]
        count += 1
    if count != len(freqs):
        raise ArchiveError(
            f"{count} windows but {len(freqs)} frequencies in archive"
        )
    return KmerDictionary.from_pairs(pairs.items(), archive.k, validate=False)


# Dispatch -----------------------------------------------------------------------

_COMPRESSORS = {
    "DP0": dp0_compress,
    "DP1": dp1_compress,
    "DP2": dp2_compress,
    "DP3": dp3_compress,
}


def compress_case(d: KmerDictionary, cfg: PipelineConfig, out_dir,
                  registry: CodecRegistry | None = None,
                  spss: Spss | None = None) -> Archive:
    if cfg.case == "DP3":
        return dp3_compress(d, cfg, out_dir, registry, spss)
    return _COMPRESSORS[cfg.case](d, cfg, out_dir, registry)


def decompress_archive(archive_or_path, registry: CodecRegistry | None = None) -> KmerDictionary:
    archive = (
        archive_or_path
        if isinstance(archive_or_path, Archive)
        else open_archive(archive_or_path)
    )
    registry = registry or default_registry()
    if archive.case == "DP3":
        return dp3_decompress(archive, registry)
    if archive.case in ("DP0", "DP1", "DP2"):
        return _explicit_decompress(archive, registry)
    raise InputError(f"cannot decompress case {archive.case!r} as a dictionary archive")
