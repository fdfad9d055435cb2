"""Spectrum preserving string sets.

A set of DNA strings whose k-windows canonicalize exactly to the k-mers of
a dictionary. The greedy constructor walks the bidirected de Bruijn graph
(nodes are canonical k-mers, edges are orientation-consistent (k-1)-base
overlaps) and emits one simplitig per path, so every dictionary k-mer
appears as exactly one window across all strings. That exactly-once
property is what makes position-aligned frequency streams well-defined.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError
from .kmer import (
    BASES,
    KmerDictionary,
    canonicalize,
    dsk_key,
    iter_canonical_windows,
    parse_fasta,
)


@dataclass
class Spss:
    k: int
    strings: list[str]
    _sorted_windows: list | None = field(default=None, repr=False, compare=False)

    def total_chars(self) -> int:
        return sum(len(s) for s in self.strings)

    def __len__(self) -> int:
        return len(self.strings)

    def sorted_windows(self) -> list[tuple[int, str]]:
        """(position, canonical k-mer) windows ordered by k-mer; cached,
        since strings are never mutated after construction."""
        if self._sorted_windows is None:
            self._sorted_windows = sorted(
                iter_windows(self), key=lambda t: dsk_key(t[1])
            )
        return self._sorted_windows


@dataclass
class SpssStats:
    total_chars: int
    string_count: int
    ratio_s_over_g: Fraction


def build_spss(d: KmerDictionary) -> Spss:
    """Greedy simplitig cover of the dictionary's de Bruijn graph.

    Start strings from each unvisited k-mer in DSK order; extend forward
    then backward while the adjacent k-mer is present and unvisited, trying
    next bases in DSK order (A, C, T, G) for determinism.
    """
    if d.k < 2:
        raise InputError("SPSS construction requires k >= 2")
    k = d.k
    members = set(d.kmers)
    visited: set[str] = set()
    strings: list[str] = []

    for start in d.kmers:  # already DSK-sorted
        if start in visited:
            continue
        visited.add(start)
        chars = list(start)

        while True:  # forward: append one base per step
            suffix = "".join(chars[-(k - 1):]) if k > 1 else ""
            for base in BASES:
                nxt = canonicalize(suffix + base)
                if nxt in members and nxt not in visited:
                    visited.add(nxt)
                    chars.append(base)
                    break
            else:
                break

        while True:  # backward: prepend one base per step
            prefix = "".join(chars[: k - 1])
            for base in BASES:
                prv = canonicalize(base + prefix)
                if prv in members and prv not in visited:
                    visited.add(prv)
                    chars.insert(0, base)
                    break
            else:
                break

        strings.append("".join(chars))

    return Spss(k, strings)


def recover_spectrum(s: Spss) -> set[str]:
    """Canonical form of every window of every string, deduplicated."""
    out: set[str] = set()
    for string in s.strings:
        if len(string) < s.k:
            raise InputError(
                f"string of length {len(string)} is shorter than k={s.k}"
            )
        out.update(iter_canonical_windows(string, s.k))
    return out


def iter_windows(s: Spss):
    """All windows in global order: strings in file order, starts ascending.

    Yields (global_index, canonical_kmer); the index is a single 0-based
    counter across strings.
    """
    i = 0
    for string in s.strings:
        if len(string) < s.k:
            raise InputError(
                f"string of length {len(string)} is shorter than k={s.k}"
            )
        for kmer in iter_canonical_windows(string, s.k):
            yield i, kmer
            i += 1


def spss_stats(s: Spss, genome_chars: int) -> SpssStats:
    if genome_chars <= 0:
        raise InputError("genome_chars must be positive")
    total = s.total_chars()
    return SpssStats(total, len(s.strings), Fraction(total, genome_chars))


# FASTA form: headers ">0", ">1", ... in string order.


def spss_to_fasta(s: Spss) -> str:
    buf = io.StringIO()
    for i, string in enumerate(s.strings):
        buf.write(f">{i}\n{string}\n")
    return buf.getvalue()


def spss_from_fasta(text: str, k: int) -> Spss:
    records = parse_fasta(text)
    return Spss(k, [seq for _, seq in records])


def sorted_members_check(s: Spss, d: KmerDictionary) -> bool:
    """True when the SPSS windows are exactly the dictionary's k-mer set."""
    return recover_spectrum(s) == set(d.kmers)
