"""gdc: a compression workbench for genomic k-mer dictionaries.

Count canonical k-mers, compress the resulting dictionary under several
on-disk layouts (verbatim, re-sorted, or implicit via a spectrum preserving
string set), build succinct indexes with random access, benchmark codec
configurations, and extract Pareto-optimal size/time trade-offs.
"""

__version__ = "0.1.0"

from .bench import (
    BaseCaseResult,
    ParetoPoint,
    RunRecord,
    best_by,
    compare_base,
    pareto_frontier,
    run_base_case,
    run_matrix,
)
from .archive import Archive, archive_size_bytes, open_archive
from .codecs import CodecRegistry, builtin_registry, default_registry
from .errors import (
    ArchiveError,
    CodecUnavailableError,
    GdcError,
    InputError,
    InternalError,
)
from .kmer import (
    KmerDictionary,
    canonicalize,
    compare_dsk,
    count_kmers,
    parse_dictionary,
    recanonicalize_standard_to_dsk,
    reverse_complement,
    serialize_dictionary,
)
from .pipelines import PipelineConfig, compress_case, decompress_archive
from .report import emit_report, parse_runs_csv
from .spss import Spss, build_spss, recover_spectrum, spss_stats
from .succinct import (
    FmIndex,
    StaticFreqMap,
    fm_build,
    fm_count,
    fm_extract,
    implicit_membership,
    sd_compress,
    sd_decompress,
    sd_recover,
    sfm_build,
    sfm_query,
)

__all__ = [
    "Archive",
    "ArchiveError",
    "BaseCaseResult",
    "CodecRegistry",
    "CodecUnavailableError",
    "FmIndex",
    "GdcError",
    "InputError",
    "InternalError",
    "KmerDictionary",
    "ParetoPoint",
    "PipelineConfig",
    "RunRecord",
    "Spss",
    "StaticFreqMap",
    "archive_size_bytes",
    "best_by",
    "build_spss",
    "builtin_registry",
    "canonicalize",
    "compare_base",
    "compare_dsk",
    "compress_case",
    "count_kmers",
    "decompress_archive",
    "default_registry",
    "emit_report",
    "fm_build",
    "fm_count",
    "fm_extract",
    "implicit_membership",
    "open_archive",
    "pareto_frontier",
    "parse_dictionary",
    "parse_runs_csv",
    "recanonicalize_standard_to_dsk",
    "recover_spectrum",
    "reverse_complement",
    "run_base_case",
    "run_matrix",
    "sd_compress",
    "sd_decompress",
    "sd_recover",
    "serialize_dictionary",
    "sfm_build",
    "sfm_query",
    "spss_stats",
]
