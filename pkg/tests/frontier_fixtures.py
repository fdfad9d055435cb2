"""Published Pareto-frontier measurements used as frozen fixtures.

Three corpora of increasing size; each row is (case, codec_d, codec_f,
use_gaps, output bytes, post-processing seconds). Every row of each table
is non-dominated, so a correct frontier extraction must return all of them.
"""

SMALL_FRONTIER = [
    ("DP3", "MFC", "bzip2", False, 683623, 3.818),
    ("DP3", "MFC", "zstd", False, 685163, 3.771),
    ("DP3", "SPRING", "bzip2", False, 709530, 2.303),
    ("DP3", "SPRING", "zstd", False, 711070, 2.256),
    ("DP3", "zstd", "bzip2", False, 720870, 2.082),
    ("DP3", "zstd", "zstd", False, 722410, 2.035),
    ("DP3", "lz4", "zstd", False, 1091374, 2.034),
    ("DP0", "zstd", "bzip2", False, 13033265, 0.348),
    ("DP0", "zstd", "zstd", False, 13048104, 0.229),
    ("DP0", "zstd", "lz4", False, 13064701, 0.228),
]

MEDIUM_FRONTIER = [
    ("DP3", "MFC", "bzip2", False, 21225154, 74.567),
    ("DP3", "MFC", "zstd", False, 21448976, 71.896),
    ("DP3", "SPRING", "bzip2", False, 22268947, 56.867),
    ("DP3", "SPRING", "zstd", False, 22492769, 54.196),
    ("DP3", "zstd", "zstd", False, 23129127, 52.817),
    ("DP2", "zstd", "bzip2", True, 434172272, 11.936),
    ("DP2", "zstd", "bzip2", False, 434174212, 4.656),
    ("DP2", "zstd", "zstd", False, 434180711, 3.774),
    ("DP1", "zstd", "zstd", False, 434908387, 3.658),
]

LARGE_FRONTIER = [
    ("DP3", "MFC", "zstd", False, 1577641106, 3581.911),
    ("DP3", "zstd", "zstd", False, 1587689427, 2626.511),
    ("DP1", "zstd", "zstd", False, 15114316478, 1176.631),
]

ALL_FRONTIERS = {
    "small": SMALL_FRONTIER,
    "medium": MEDIUM_FRONTIER,
    "large": LARGE_FRONTIER,
}


def fixture_points(table):
    from gdc.bench import ParetoPoint

    points = []
    for case, codec_d, codec_f, use_gaps, size, seconds in table:
        f_name = "Gk" if use_gaps else "Fk"
        d_name = "S" if case == "DP3" else "Dk"
        label = f"{case}({codec_d}({d_name}), {codec_f}({f_name}))"
        points.append(ParetoPoint(size, seconds, label))
    return points


def fixture_records(table, dataset_id="fixture", k=32):
    from gdc.bench import RunRecord

    return [
        RunRecord(
            dataset_id=dataset_id,
            k=k,
            scenario="CD",
            case=case,
            codec_d=codec_d,
            codec_f=codec_f,
            use_gaps=use_gaps,
            bytes_out=size,
            pre_time_s=0.0,
            post_time_s=seconds,
            status="ok",
        )
        for case, codec_d, codec_f, use_gaps, size, seconds in table
    ]
