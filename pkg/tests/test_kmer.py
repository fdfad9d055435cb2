import io
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdc.errors import InputError
from gdc.kmer import (
    BASES,
    KmerDictionary,
    canonicalize,
    compare_dsk,
    count_kmers,
    count_kmers_standard,
    dictionary_to_text,
    dsk_key,
    pack_kmer,
    parse_dictionary,
    parse_fasta,
    recanonicalize_standard_to_dsk,
    reverse_complement,
    serialize_dictionary,
    unpack_kmer,
)

kmers_st = st.text(alphabet="ACGT", min_size=1, max_size=24)


def naive_rc(kmer):
    comp = {"A": "T", "T": "A", "C": "G", "G": "C"}
    return "".join(comp[c] for c in kmer)[::-1]


class TestReverseComplement:
    def test_examples(self):
        assert reverse_complement("AAAA") == "TTTT"
        assert reverse_complement("GA") == "TC"
        assert reverse_complement("CG") == "CG"

    @given(kmers_st)
    def test_matches_character_oracle(self, kmer):
        assert reverse_complement(kmer) == naive_rc(kmer)

    @given(kmers_st)
    def test_involution(self, kmer):
        assert reverse_complement(reverse_complement(kmer)) == kmer


class TestCompareDsk:
    def test_examples(self):
        assert compare_dsk("TA", "GA") == -1  # T < G under DSK; flips standard order
        assert "TA" > "GA"
        assert compare_dsk("AC", "AC") == 0
        assert compare_dsk("AA", "AC") == -1

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            compare_dsk("A", "AA")

    def test_total_order_on_2mers(self):
        two_mers = ["".join(p) for p in itertools.product("ACGT", repeat=2)]
        ordered = sorted(two_mers, key=dsk_key)
        for a, b in zip(ordered, ordered[1:]):
            assert compare_dsk(a, b) == -1


class TestCanonicalize:
    def test_examples(self):
        assert canonicalize("AAAA") == "AAAA"
        assert canonicalize("GA") == "TC"  # standard order would keep GA
        assert canonicalize("CG") == "CG"

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_brute_force_all_kmers(self, k):
        for bases in itertools.product("ACGT", repeat=k):
            kmer = "".join(bases)
            rc = naive_rc(kmer)
            expected = min([kmer, rc], key=dsk_key)
            assert canonicalize(kmer) == expected

    @given(kmers_st)
    def test_idempotent_and_member(self, kmer):
        canon = canonicalize(kmer)
        assert canon in (kmer, reverse_complement(kmer))
        assert canonicalize(canon) == canon


class TestPacking:
    @given(kmers_st)
    def test_roundtrip(self, kmer):
        assert unpack_kmer(pack_kmer(kmer), len(kmer)) == kmer

    def test_rank_order_matches_dsk(self):
        three_mers = ["".join(p) for p in itertools.product("ACGT", repeat=3)]
        by_key = sorted(three_mers, key=dsk_key)
        by_pack = sorted(three_mers, key=pack_kmer)
        assert by_key == by_pack


class TestCountKmers:
    def test_basic(self):
        d = count_kmers(["ACGT"], 2)
        assert d.pairs() == [("AC", 2), ("CG", 1)]

    def test_single_kmer(self):
        assert count_kmers(["AAAA"], 4).pairs() == [("AAAA", 1)]

    def test_n_windows_skipped(self):
        assert count_kmers(["ACNGT"], 2).pairs() == [("AC", 2)]

    def test_case_insensitive(self):
        assert count_kmers(["acgt"], 2) == count_kmers(["ACGT"], 2)

    def test_invalid_character(self):
        with pytest.raises(InputError):
            count_kmers(["ACXT"], 2)

    def test_k_out_of_range(self):
        with pytest.raises(InputError):
            count_kmers(["ACGT"], 0)
        with pytest.raises(InputError):
            count_kmers(["ACGT"], 65)

    def test_empty_window_set_is_empty_dictionary(self):
        assert len(count_kmers(["ACG"], 4)) == 0
        assert len(count_kmers([""], 4)) == 0

    @given(st.text(alphabet="ACGTN", max_size=300), st.integers(1, 8))
    @settings(max_examples=60)
    def test_total_count_equals_window_count(self, seq, k):
        d = count_kmers([seq], k)
        runs = [r for r in seq.split("N") if len(r) >= k]
        assert sum(d.freqs) == sum(len(r) - k + 1 for r in runs)

    @given(st.text(alphabet="ACGT", min_size=8, max_size=200), st.integers(2, 8))
    @settings(max_examples=60)
    def test_invariant_under_reverse_complement(self, seq, k):
        assert count_kmers([seq], k) == count_kmers([naive_rc(seq)], k)

    def test_multi_record(self):
        d = count_kmers([("h1", "ACG"), ("h2", "CGT")], 2)
        assert d.as_mapping() == {"AC": 2, "CG": 2}


class TestDictionaryFormat:
    def test_serialize_example(self):
        d = count_kmers(["ACGT"], 2)
        assert dictionary_to_text(d) == "AC 2\nCG 1\n"

    def test_empty(self):
        assert len(parse_dictionary("", 4)) == 0
        buf = io.StringIO()
        serialize_dictionary(KmerDictionary(4), buf)
        assert buf.getvalue() == ""

    @given(st.text(alphabet="ACGT", min_size=6, max_size=400), st.integers(2, 6))
    @settings(max_examples=60)
    def test_roundtrip(self, seq, k):
        d = count_kmers([seq], k)
        assert parse_dictionary(dictionary_to_text(d), k) == d

    @pytest.mark.parametrize(
        "text,err",
        [
            ("AC two\n", "bad count"),
            ("AC\n", "expected"),
            ("GT 1\n", "not DSK-canonical"),
            ("AC 0\n", "count must be"),
            ("AC 1\nAC 2\n", "duplicate"),
            ("ACG 1\n", "invalid 2-mer"),
        ],
    )
    def test_malformed(self, text, err):
        with pytest.raises(InputError, match=err):
            parse_dictionary(text, 2)


class TestRecanonicalize:
    def test_flip_example(self):
        standard = KmerDictionary(2, ["GA"], [3])  # GA < TC lexicographically
        assert recanonicalize_standard_to_dsk(standard).pairs() == [("TC", 3)]

    def test_fixed_point(self):
        standard = KmerDictionary(2, ["AC"], [2])
        assert recanonicalize_standard_to_dsk(standard).pairs() == [("AC", 2)]

    def test_all_2mer_classes_against_brute_force(self):
        classes = {}
        for pair in itertools.product("ACGT", repeat=2):
            kmer = "".join(pair)
            key = frozenset((kmer, naive_rc(kmer)))
            classes[key] = classes.get(key, 0) + 1
        standard_keys = sorted(min(cls) for cls in classes)
        standard = KmerDictionary(2, standard_keys, [1] * len(standard_keys))
        converted = recanonicalize_standard_to_dsk(standard)
        expected = sorted((min(cls, key=dsk_key) for cls in classes), key=dsk_key)
        assert converted.kmers == expected

    def test_duplicate_class_detected(self):
        corrupted = KmerDictionary(2, ["GA", "TC"], [1, 1])  # same rc-class twice
        with pytest.raises(InputError, match="duplicate"):
            recanonicalize_standard_to_dsk(corrupted)

    def test_agrees_with_direct_counting(self):
        rng = random.Random(5)
        seq = "".join(rng.choice("ACGT") for _ in range(500))
        for k in (3, 7, 11):
            via_standard = recanonicalize_standard_to_dsk(
                count_kmers_standard([seq], k)
            )
            assert via_standard == count_kmers([seq], k)


class TestFasta:
    def test_multi_record_wrapped(self):
        text = ">a desc\nAC\nGT\n>b\nTTTT\n"
        assert parse_fasta(text) == [("a desc", "ACGT"), ("b", "TTTT")]

    def test_headerless(self):
        assert parse_fasta("ACGT\n") == [("", "ACGT")]

    def test_lowercase_normalized(self):
        assert parse_fasta(">x\nacgt\n") == [("x", "ACGT")]

    def test_rejects_bad_symbol(self):
        with pytest.raises(InputError, match="invalid character"):
            parse_fasta(">x\nAC-GT\n")


class TestDskOrderIsNotStandard:
    def test_base_ranks(self):
        assert list(BASES) == ["A", "C", "T", "G"]

    def test_dictionary_order_differs_from_standard_sort(self):
        d = count_kmers(["GCATA"], 2)
        assert d.kmers == ["AT", "CA", "TA", "GC"]
        assert d.kmers != sorted(d.kmers)
