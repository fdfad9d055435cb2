import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdc.archive import archive_size_bytes, open_archive, read_payload, verify_archive
from gdc.codecs import builtin_registry, varint_encode
from gdc.errors import ArchiveError, InputError
from gdc.kmer import KmerDictionary, count_kmers
from gdc.pipelines import (
    CASES,
    PipelineConfig,
    compress_case,
    decompress_archive,
    dp3_compress,
)
from gdc.spss import Spss

REG = builtin_registry()

genome_st = st.text(alphabet="ACGT", min_size=10, max_size=400)


@pytest.fixture
def two_entry():
    return count_kmers(["ACGT"], 2)  # {AC:2, CG:1}


def roundtrip(d, case, codec_d, codec_f, use_gaps, tmp_path, name="a"):
    cfg = PipelineConfig(case, codec_d, codec_f, use_gaps)
    archive = compress_case(d, cfg, tmp_path / name, REG)
    return archive, decompress_archive(archive, REG)


class TestDp0:
    def test_store_store(self, two_entry, tmp_path):
        archive, back = roundtrip(two_entry, "DP0", "store", "store", False, tmp_path)
        assert back == two_entry
        d_data, _ = read_payload(archive, "d")
        assert d_data == b"AC\nCG\n"  # DSK order, verbatim

    def test_twobit_varint(self, two_entry, tmp_path):
        _, back = roundtrip(two_entry, "DP0", "twobit", "varint", False, tmp_path)
        assert back == two_entry

    def test_larger_genome(self, tmp_path, rng):
        seq = "".join(rng.choice("ACGT") for _ in range(10_000))
        d = count_kmers([seq], 16)
        _, back = roundtrip(d, "DP0", "store", "varint", False, tmp_path)
        assert back == d


class TestDp1:
    def test_ascii_sort_flips_dsk_order(self, tmp_path):
        # TA before GC under DSK ranks, GC before TA in ASCII
        d = KmerDictionary.from_pairs([("TA", 1), ("GC", 5)], 2)
        assert d.kmers == ["TA", "GC"]
        archive, back = roundtrip(d, "DP1", "store", "store", False, tmp_path)
        d_data, _ = read_payload(archive, "d")
        assert d_data == b"GC\nTA\n"
        f_data, _ = read_payload(archive, "f")
        assert f_data == b"5\n1\n"  # permuted with the sort
        assert back == d

    def test_already_sorted(self, two_entry, tmp_path):
        archive, back = roundtrip(two_entry, "DP1", "store", "store", False, tmp_path)
        d_data, _ = read_payload(archive, "d")
        assert d_data == b"AC\nCG\n"
        assert back == two_entry

    @given(genome_st, st.sampled_from([2, 4, 8]))
    @settings(max_examples=40, deadline=None)
    def test_pair_set_roundtrip(self, seq, k):
        import tempfile

        d = count_kmers([seq], k)
        with tempfile.TemporaryDirectory() as tmp:
            cfg = PipelineConfig("DP1", "zlib", "varint")
            back = decompress_archive(compress_case(d, cfg, tmp, REG), REG)
        assert back == d


class TestDp2:
    def test_hand_trace(self, two_entry, tmp_path):
        cfg = PipelineConfig("DP2", "store", "varint", use_gaps=True)
        archive = compress_case(two_entry, cfg, tmp_path / "a", REG)
        d_data, _ = read_payload(archive, "d")
        assert d_data == b"CG\nAC\n"  # permuted by ascending frequency
        f_data, _ = read_payload(archive, "f")
        assert f_data == varint_encode([1, 1])  # offset 1, gap [1]
        assert decompress_archive(archive, REG) == two_entry

    def test_single_pair(self, tmp_path):
        d = KmerDictionary.from_pairs([("AAAA", 7)], 4)
        _, back = roundtrip(d, "DP2", "store", "store", False, tmp_path)
        assert back == d

    def test_tie_break_is_dsk_order(self, tmp_path):
        d = count_kmers(["GCATA"], 2)  # all frequencies 1
        archive, back = roundtrip(d, "DP2", "store", "store", False, tmp_path)
        d_data, _ = read_payload(archive, "d")
        assert d_data == b"AT\nCA\nTA\nGC\n"
        assert back == d

    @given(genome_st, st.sampled_from([2, 4, 8]), st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_pair_set_roundtrip(self, seq, k, gaps):
        import tempfile

        d = count_kmers([seq], k)
        with tempfile.TemporaryDirectory() as tmp:
            cfg = PipelineConfig("DP2", "bzip2", "pfor", gaps)
            back = decompress_archive(compress_case(d, cfg, tmp, REG), REG)
        assert back == d

    def test_gaps_never_worse_than_raw_under_varint(self, rng):
        import tempfile

        for _ in range(10):
            seq = "".join(rng.choice("ACGT") for _ in range(rng.randrange(50, 800)))
            d = count_kmers([seq], 4)
            with tempfile.TemporaryDirectory() as tmp:
                plain = compress_case(
                    d, PipelineConfig("DP2", "store", "varint", False), tmp + "/p", REG
                )
                gapped = compress_case(
                    d, PipelineConfig("DP2", "store", "varint", True), tmp + "/g", REG
                )
                f_plain = plain.payload_by_role("f").byte_size
                f_gap = gapped.payload_by_role("f").byte_size
                assert f_gap <= f_plain


class TestDp3:
    def test_hand_trace(self, two_entry, tmp_path):
        cfg = PipelineConfig("DP3", "store", "varint")
        archive = compress_case(two_entry, cfg, tmp_path / "a", REG)
        s_data, _ = read_payload(archive, "s")
        assert s_data == b">0\nACG\n"
        f_data, _ = read_payload(archive, "f")
        assert f_data == varint_encode([2, 1])  # window 0 = AC:2, window 1 = CG:1
        assert decompress_archive(archive, REG) == two_entry

    def test_single_kmer(self, tmp_path):
        d = KmerDictionary.from_pairs([("AAAA", 9)], 4)
        archive, back = roundtrip(d, "DP3", "store", "varint", False, tmp_path)
        assert back == d
        assert archive.payload_by_role("f").original_len == 1

    def test_freq_stream_length_equals_dictionary(self, tmp_path, rng):
        seq = "".join(rng.choice("ACGT") for _ in range(3000))
        d = count_kmers([seq], 8)
        cfg = PipelineConfig("DP3", "store", "varint")
        archive = compress_case(d, cfg, tmp_path / "a", REG)
        assert archive.payload_by_role("f").original_len == len(d)

    def test_supplied_spss_is_cross_checked(self, two_entry, tmp_path):
        wrong = Spss(2, ["ACGA"])  # windows AC, CG, GA->TC: not this dictionary
        with pytest.raises(InputError, match="mismatch|windows"):
            dp3_compress(
                two_entry, PipelineConfig("DP3"), tmp_path / "a", REG, spss=wrong
            )

    def test_k1_rejected(self, tmp_path):
        d = count_kmers(["ACGT"], 1)
        with pytest.raises(InputError):
            compress_case(d, PipelineConfig("DP3"), tmp_path / "a", REG)

    @given(genome_st, st.sampled_from([2, 4, 8, 16]))
    @settings(max_examples=40, deadline=None)
    def test_exact_roundtrip(self, seq, k):
        import tempfile

        d = count_kmers([seq], k)
        if len(d) == 0:
            return
        with tempfile.TemporaryDirectory() as tmp:
            cfg = PipelineConfig("DP3", "twobit", "bic")
            back = decompress_archive(compress_case(d, cfg, tmp, REG), REG)
        assert back == d


class TestAllCasesAllCodecs:
    @pytest.mark.parametrize("case", CASES)
    def test_full_builtin_grid_on_small_genome(self, case, tmp_path, rng):
        seq = "".join(rng.choice("ACGT") for _ in range(300))
        d = count_kmers([seq], 5)
        for codec_d in REG.ids("textual"):
            for codec_f in REG.ids("textual") + REG.ids("integer"):
                cfg = PipelineConfig(case, codec_d, codec_f, case == "DP2")
                name = f"{case}-{codec_d}-{codec_f}"
                archive = compress_case(d, cfg, tmp_path / name, REG)
                assert decompress_archive(archive, REG) == d, name


class TestEmptyDictionary:
    @pytest.mark.parametrize("case", CASES)
    def test_empty_roundtrip(self, case, tmp_path):
        d = KmerDictionary(4)
        cfg = PipelineConfig(case, "zlib", "varint")
        archive = compress_case(d, cfg, tmp_path / case, REG)
        assert decompress_archive(archive, REG) == d
        assert archive_size_bytes(archive) == sum(
            p.byte_size for p in archive.payloads
        )


class TestArchive:
    def test_size_is_sum_of_payload_files(self, two_entry, tmp_path):
        archive, _ = roundtrip(two_entry, "DP0", "store", "store", False, tmp_path)
        on_disk = sum(
            (archive.path / p.name).stat().st_size for p in archive.payloads
        )
        assert archive_size_bytes(archive) == on_disk == 10
        assert (
            archive_size_bytes(archive, include_manifest=True)
            == on_disk + archive.manifest_bytes()
        )

    def test_manifest_fields(self, two_entry, tmp_path):
        archive, _ = roundtrip(two_entry, "DP2", "zlib", "pfor", True, tmp_path)
        m = json.loads((archive.path / "manifest.json").read_text())
        assert m["format_version"] == 1
        assert m["case"] == "DP2"
        assert m["use_gaps"] is True
        assert m["codec_d"] == "zlib"
        assert m["codec_f"] == "pfor"
        assert {p["name"] for p in m["payloads"]} == {"d.payload", "f.payload"}

    def test_reopen_and_verify(self, two_entry, tmp_path):
        archive, _ = roundtrip(two_entry, "DP0", "zlib", "varint", False, tmp_path)
        reopened = open_archive(archive.path)
        verify_archive(reopened)
        assert decompress_archive(reopened, REG) == two_entry

    def test_checksum_mismatch_detected(self, two_entry, tmp_path):
        archive, _ = roundtrip(two_entry, "DP0", "store", "store", False, tmp_path)
        payload = archive.path / "d.payload"
        payload.write_bytes(b"AC\nCC\n")
        with pytest.raises(ArchiveError, match="checksum"):
            decompress_archive(open_archive(archive.path), REG)

    def test_missing_payload(self, two_entry, tmp_path):
        archive, _ = roundtrip(two_entry, "DP0", "store", "store", False, tmp_path)
        (archive.path / "f.payload").unlink()
        with pytest.raises(ArchiveError, match="missing"):
            archive_size_bytes(open_archive(archive.path))

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ArchiveError, match="manifest"):
            open_archive(tmp_path)


class TestBijectionPreserved:
    def test_frequencies_follow_kmers_everywhere(self, rng):
        import tempfile

        seq = "".join(rng.choice("ACGT") for _ in range(2000))
        truth = count_kmers([seq], 8).as_mapping()
        for case in CASES:
            with tempfile.TemporaryDirectory() as tmp:
                cfg = PipelineConfig(case, "zlib", "zlib", case == "DP2")
                d = count_kmers([seq], 8)
                back = decompress_archive(compress_case(d, cfg, tmp, REG), REG)
            assert back.as_mapping() == truth, case
