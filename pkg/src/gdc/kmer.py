"""DNA alphabet, canonical k-mers and k-mer dictionaries.

Canonicalization follows the rank order used by the DSK counter,
A < C < T < G, which differs from plain lexicographic order (A < C < G < T,
the KMC3 convention). A k-mer is canonical when it is not larger than its
reverse complement under that order.
"""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field

from .errors import InputError

BASES = "ACTG"  # in DSK rank order: A=0, C=1, T=2, G=3

DSK_RANK = {"A": 0, "C": 1, "T": 2, "G": 3}

# str.translate tables. _DSK_KEY maps bases to chr(rank) so that ordinary
# string comparison of translated strings realizes the DSK order.
_COMPLEMENT = str.maketrans("ACGT", "TGCA")
_DSK_KEY = str.maketrans("ACTG", "\x00\x01\x02\x03")

MAX_K = 64


def reverse_complement(kmer: str) -> str:
    """Reverse complement of a DNA string (A<->T, C<->G, reversed)."""
    return kmer.translate(_COMPLEMENT)[::-1]


def dsk_key(kmer: str) -> str:
    """Sort key realizing the DSK order A < C < T < G."""
    return kmer.translate(_DSK_KEY)


def compare_dsk(a: str, b: str) -> int:
    """Compare two equal-length k-mers under the DSK order.

    Returns -1, 0 or 1. Raises InputError on length mismatch.
    """
    if len(a) != len(b):
        raise InputError(f"cannot compare k-mers of lengths {len(a)} and {len(b)}")
    ka, kb = dsk_key(a), dsk_key(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def canonicalize(kmer: str) -> str:
    """The smaller of a k-mer and its reverse complement under the DSK order."""
    rc = reverse_complement(kmer)
    return kmer if dsk_key(kmer) <= dsk_key(rc) else rc


def is_canonical(kmer: str) -> bool:
    return dsk_key(kmer) <= dsk_key(reverse_complement(kmer))


def canonicalize_standard(kmer: str) -> str:
    """Canonical form under plain lexicographic order (KMC3 convention)."""
    rc = reverse_complement(kmer)
    return kmer if kmer <= rc else rc


def pack_kmer(kmer: str) -> int:
    """Pack a k-mer into an integer, 2 bits per base using DSK ranks."""
    code = 0
    for c in kmer:
        code = (code << 2) | DSK_RANK[c]
    return code


def unpack_kmer(code: int, k: int) -> str:
    out = []
    for _ in range(k):
        out.append(BASES[code & 3])
        code >>= 2
    return "".join(reversed(out))


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise InputError(f"k must be between 1 and {MAX_K}, got {k}")


@dataclass
class KmerDictionary:
    """Distinct canonical k-mers with their positive occurrence counts.

    `kmers` is kept sorted ascending in the DSK order and `freqs` is
    index-aligned with it; index i gives the k-mer<->frequency bijection.
    """

    k: int
    kmers: list[str] = field(default_factory=list)
    freqs: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        _check_k(self.k)
        if len(self.kmers) != len(self.freqs):
            raise InputError(
                f"{len(self.kmers)} k-mers but {len(self.freqs)} frequencies"
            )

    def __len__(self) -> int:
        return len(self.kmers)

    @classmethod
    def from_pairs(
        cls, pairs, k: int, *, validate: bool = True
    ) -> "KmerDictionary":
        """Build a dictionary from (kmer, count) pairs, sorting to DSK order."""
        ordered = sorted(pairs, key=lambda p: dsk_key(p[0]))
        d = cls(k, [p[0] for p in ordered], [p[1] for p in ordered])
        if validate:
            d.validate()
        return d

    def validate(self) -> None:
        prev = None
        for kmer, freq in zip(self.kmers, self.freqs):
            if len(kmer) != self.k:
                raise InputError(f"k-mer {kmer!r} has length {len(kmer)}, expected {self.k}")
            if any(c not in DSK_RANK for c in kmer):
                raise InputError(f"invalid character in k-mer {kmer!r}")
            if not is_canonical(kmer):
                raise InputError(f"k-mer {kmer!r} is not canonical under the DSK order")
            if freq < 1:
                raise InputError(f"k-mer {kmer!r} has non-positive count {freq}")
            key = dsk_key(kmer)
            if prev is not None and key <= prev:
                raise InputError(f"duplicate or out-of-order k-mer {kmer!r}")
            prev = key

    def pairs(self) -> list[tuple[str, int]]:
        return list(zip(self.kmers, self.freqs))

    def as_mapping(self) -> dict[str, int]:
        return dict(zip(self.kmers, self.freqs))


# FASTA handling ------------------------------------------------------------

_SEQUENCE_CHARS = set("ACGTNacgtn")


def parse_fasta(text: str) -> list[tuple[str, str]]:
    """Parse FASTA text into (header, sequence) records.

    Sequences are uppercased. Characters outside {A,C,G,T,N} (either case)
    are rejected. Leading sequence data without a '>' header gets an empty
    header, so plain one-sequence-per-file inputs also parse.
    """
    records: list[tuple[str, str]] = []
    header = None
    chunks: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            if header is not None or chunks:
                records.append((header or "", "".join(chunks)))
            header = line[1:].strip()
            chunks = []
        else:
            bad = set(line) - _SEQUENCE_CHARS
            if bad:
                raise InputError(
                    f"invalid character {sorted(bad)[0]!r} in sequence at line {lineno}"
                )
            chunks.append(line.upper())
    if header is not None or chunks:
        records.append((header or "", "".join(chunks)))
    return records


def read_fasta(path) -> list[tuple[str, str]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_fasta(fh.read())


def write_fasta(records, sink) -> None:
    for header, seq in records:
        sink.write(f">{header}\n{seq}\n")


# Counting ------------------------------------------------------------------


def _acgt_runs(seq: str):
    """Maximal runs of pure-ACGT characters; windows never span an N."""
    run_start = None
    for i, c in enumerate(seq):
        if c in "ACGT":
            if run_start is None:
                run_start = i
        else:
            if run_start is not None:
                yield seq[run_start:i]
                run_start = None
    if run_start is not None:
        yield seq[run_start:]


def iter_canonical_windows(seq: str, k: int):
    """Canonical form of every k-window of `seq` made solely of ACGT.

    Windows containing N (or any non-ACGT character) are skipped entirely.
    """
    for run in _acgt_runs(seq):
        n = len(run)
        if n < k:
            continue
        rc_run = reverse_complement(run)
        fwd_key = dsk_key(run)
        rc_key = dsk_key(rc_run)
        for i in range(n - k + 1):
            j = n - k - i
            if fwd_key[i : i + k] <= rc_key[j : j + k]:
                yield run[i : i + k]
            else:
                yield rc_run[j : j + k]


def count_kmers(records, k: int) -> KmerDictionary:
    """Tally canonical k-mers over all ACGT-only windows of the records.

    `records` is a list of sequence strings or of (header, sequence)
    tuples as produced by parse_fasta.
    """
    _check_k(k)
    tally: Counter[str] = Counter()
    for rec in records:
        seq = rec[1] if isinstance(rec, tuple) else rec
        seq = seq.upper()
        bad = set(seq) - _SEQUENCE_CHARS
        if bad:
            raise InputError(f"invalid character {sorted(bad)[0]!r} in sequence")
        tally.update(iter_canonical_windows(seq, k))
    return KmerDictionary.from_pairs(tally.items(), k, validate=False)


def count_kmers_standard(records, k: int) -> KmerDictionary:
    """Like count_kmers but canonicalizing under plain lexicographic order.

    Emulates a KMC3-style counter; the result keys are standard-canonical
    and generally NOT DSK-canonical (see recanonicalize_standard_to_dsk).
    """
    _check_k(k)
    tally: Counter[str] = Counter()
    for rec in records:
        seq = rec[1] if isinstance(rec, tuple) else rec
        seq = seq.upper()
        bad = set(seq) - _SEQUENCE_CHARS
        if bad:
            raise InputError(f"invalid character {sorted(bad)[0]!r} in sequence")
        for run in _acgt_runs(seq):
            if len(run) < k:
                continue
            for i in range(len(run) - k + 1):
                w = run[i : i + k]
                tally[canonicalize_standard(w)] += 1
    pairs = sorted(tally.items())
    return KmerDictionary(k, [p[0] for p in pairs], [p[1] for p in pairs])


def recanonicalize_standard_to_dsk(d: KmerDictionary) -> KmerDictionary:
    """Convert a dictionary keyed by standard-canonical k-mers to DSK keys.

    Each key is replaced by the DSK-canonical member of {key, rc(key)} and
    re-sorted; frequencies are carried over. Both conventions pick exactly
    one member per {x, rc(x)} class, so a collision means corrupted input.
    """
    seen: dict[str, int] = {}
    for kmer, freq in zip(d.kmers, d.freqs):
        target = canonicalize(kmer)
        if target in seen:
            raise InputError(
                f"duplicate canonical class for {kmer!r}: input is corrupted"
            )
        seen[target] = freq
    return KmerDictionary.from_pairs(seen.items(), d.k, validate=False)


# Text interchange format ---------------------------------------------------
#
# One "<KMER> <COUNT>" line per entry, DSK order, UTF-8, Unix newlines.


def serialize_dictionary(d: KmerDictionary, sink) -> None:
    for kmer, freq in zip(d.kmers, d.freqs):
        sink.write(f"{kmer} {freq}\n")


def dictionary_to_text(d: KmerDictionary) -> str:
    buf = io.StringIO()
    serialize_dictionary(d, buf)
    return buf.getvalue()


def parse_dictionary(source, k: int) -> KmerDictionary:
    """Parse the text format back into a dictionary.

    `source` is a string or a line-iterable. Raises InputError on malformed
    lines, wrong-length or non-canonical k-mers, duplicates and zero counts.
    """
    _check_k(k)
    if isinstance(source, str):
        source = source.splitlines()
    pairs: list[tuple[str, int]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected '<KMER> <COUNT>', got {line!r}")
        kmer, count_text = parts
        if len(kmer) != k or any(c not in DSK_RANK for c in kmer):
            raise InputError(f"line {lineno}: invalid {k}-mer {kmer!r}")
        if not is_canonical(kmer):
            raise InputError(f"line {lineno}: k-mer {kmer!r} is not DSK-canonical")
        if kmer in seen:
            raise InputError(f"line {lineno}: duplicate k-mer {kmer!r}")
        seen.add(kmer)
        try:
            count = int(count_text)
        except ValueError:
            raise InputError(f"line {lineno}: bad count {count_text!r}") from None
        if count < 1:
            raise InputError(f"line {lineno}: count must be >= 1, got {count}")
        pairs.append((kmer, count))
    return KmerDictionary.from_pairs(pairs, k, validate=False)
