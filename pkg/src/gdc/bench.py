"""Configuration-matrix benchmarking and Pareto frontier extraction.

One RunRecord per (k, case, codec pair): output bytes on disk plus
pre-processing time (counting, SPSS/index construction, compression) and
post-processing time (decompression plus the scans that rebuild the
dictionary). Times are medians over repetitions of a monotonic wall clock;
unavailable codecs produce skipped records, never failures.
"""

from __future__ import annotations

import hashlib
import math
import statistics
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .archive import archive_size_bytes
from .codecs import CodecRegistry, default_registry
from .errors import CodecUnavailableError, InputError, InternalError
from .kmer import KmerDictionary, count_kmers, read_fasta
from .pipelines import CASES, PipelineConfig, compress_case, decompress_archive
from .succinct import SD_CASES, fm_build, FmIndex, sd_compress, sd_decompress

SCENARIOS = ("CD", "SD", "BaseCD", "BaseSD")


@dataclass
class RunRecord:
    dataset_id: str
    k: int
    scenario: str  # CD | SD | BaseCD | BaseSD
    case: str  # DP0..DP3 | Explicit | Implicit | n/a
    codec_d: str
    codec_f: str
    use_gaps: bool
    bytes_out: int
    pre_time_s: float
    post_time_s: float
    status: str  # ok | skipped
    reason: str = ""
    pre_samples: list[float] = field(default_factory=list)
    post_samples: list[float] = field(default_factory=list)

    def label(self) -> str:
        if self.scenario == "CD":
            d_name = "S" if self.case == "DP3" else "Dk"
            f_name = "Gk" if self.use_gaps else "Fk"
            return f"{self.case}({self.codec_d}({d_name}), {self.codec_f}({f_name}))"
        if self.scenario == "SD":
            d_name = "S" if self.case == "Implicit" else "Dk"
            return f"{self.case}(FM({d_name}), {self.codec_f}(SFM(Fk)))"
        if self.scenario == "BaseCD":
            return f"BaseCD({self.codec_d}(G))"
        if self.scenario == "BaseSD":
            return "BaseSD(FM(G))"
        return self.case


@dataclass
class ParetoPoint:
    bytes: int
    time_s: float
    label: str = ""


def dataset_id_for(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:12]


def _median(samples) -> float:
    return statistics.median(samples)


def _timed(fn, repetitions: int):
    """Run fn() `repetitions` times; return (last result, samples)."""
    samples = []
    result = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - t0)
    return result, samples


def _skipped(dataset_id, k, scenario, case, codec_d, codec_f, use_gaps, reason):
    return RunRecord(
        dataset_id, k, scenario, case, codec_d, codec_f, use_gaps,
        0, 0.0, 0.0, "skipped", reason,
    )


def _codec_usable(registry: CodecRegistry, codec_id: str, want_kind: str) -> str | None:
    """Reason string when the codec cannot run, else None."""
    try:
        codec = registry.get(codec_id)
    except CodecUnavailableError as exc:
        return str(exc)
    if want_kind and codec.spec.kind != want_kind:
        return f"codec {codec_id!r} is {codec.spec.kind}, expected {want_kind}"
    if codec.spec.backend == "external" and not codec.available():
        return f"external codec {codec_id!r}: command not found"
    return None


def _run_one_config(
    ground: KmerDictionary,
    count_time: float,
    dataset_id: str,
    scenario: str,
    case: str,
    codec_d: str,
    codec_f: str,
    use_gaps: bool,
    repetitions: int,
    registry: CodecRegistry,
    workdir: Path,
) -> RunRecord:
    k = ground.k
    # the succinct cases store the index verbatim; only codec_f matters there
    d_reason = _codec_usable(registry, codec_d, "textual") if scenario == "CD" else None
    f_kind = "" if scenario == "CD" else "textual"
    f_reason = _codec_usable(registry, codec_f, f_kind)
    reason = d_reason or f_reason
    if reason is not None:
        return _skipped(dataset_id, k, scenario, case, codec_d, codec_f, use_gaps, reason)
    if case == "DP3" and k < 2:
        return _skipped(
            dataset_id, k, scenario, case, codec_d, codec_f, use_gaps,
            "DP3 requires k >= 2",
        )

    gaps = use_gaps and case == "DP2"
    run_dir = workdir / f"{k}-{case}-{codec_d}-{codec_f}{'-gaps' if gaps else ''}"

    if scenario == "CD":
        cfg = PipelineConfig(case, codec_d, codec_f, gaps)
        archive, comp_samples = _timed(
            lambda: compress_case(ground, cfg, run_dir, registry), repetitions
        )
        recovered, post_samples = _timed(
            lambda: decompress_archive(archive, registry), repetitions
        )
    else:
        archive, comp_samples = _timed(
            lambda: sd_compress(ground, case, run_dir, codec_f, registry), repetitions
        )
        recovered, post_samples = _timed(
            lambda: sd_decompress(archive, registry), repetitions
        )

    if recovered != ground:
        raise InternalError(
            f"{case} {codec_d}/{codec_f}: round-trip does not match ground truth"
        )
    pre_samples = [count_time + s for s in comp_samples]
    return RunRecord(
        dataset_id, k, scenario, case, codec_d, codec_f, gaps,
        archive_size_bytes(archive),
        _median(pre_samples),
        _median(post_samples),
        "ok",
        "",
        pre_samples,
        post_samples,
    )


def run_matrix(
    dataset,
    k_list,
    cases,
    codecs_d,
    codecs_f,
    repetitions: int = 3,
    use_gaps: bool = False,
    registry: CodecRegistry | None = None,
    workdir=None,
    parallel: int = 0,
) -> list[RunRecord]:
    """One record per (k, case, codec_d, codec_f).

    `cases` may mix DP0..DP3 (scenario CD) and Explicit/Implicit (scenario
    SD). With `use_gaps`, DP2 stores its sorted frequency stream as
    offset+gaps; other cases ignore the flag. `parallel` > 1 shards runs
    across a thread pool, which only pays off for external codecs and
    forfeits timing fidelity.
    """
    registry = registry or default_registry()
    for case in cases:
        if case not in CASES and case not in SD_CASES:
            raise InputError(f"unknown case {case!r}")
    if repetitions < 1:
        raise InputError("repetitions must be >= 1")

    path = Path(dataset)
    try:
        records = read_fasta(path)
    except OSError as exc:
        raise InputError(f"cannot read dataset {path}: {exc}") from exc
    dataset_id = dataset_id_for(path)

    own_tmp = None
    if workdir is None:
        own_tmp = tempfile.TemporaryDirectory(prefix="gdc-bench-")
        workdir = own_tmp.name
    workdir = Path(workdir)

    results: list[RunRecord] = []
    try:
        for k in k_list:
            ground, count_samples = _timed(lambda: count_kmers(records, k), repetitions)
            count_time = _median(count_samples)
            configs = [
                (case, cd, cf)
                for case in cases
                for cd in codecs_d
                for cf in codecs_f
            ]

            def run(config):
                case, cd, cf = config
                scenario = "SD" if case in SD_CASES else "CD"
                return _run_one_config(
                    ground, count_time, dataset_id, scenario,
                    case, cd, cf, use_gaps, repetitions, registry, workdir,
                )

            if parallel and parallel > 1:
                with ThreadPoolExecutor(max_workers=parallel) as pool:
                    results.extend(pool.map(run, configs))
            else:
                results.extend(run(c) for c in configs)
    finally:
        if own_tmp is not None:
            own_tmp.cleanup()
    return results


# Base case: keep the compressed (or indexed) genome and recount ------------


def run_base_case(
    dataset,
    k: int,
    scenario: str = "BaseCD",
    codec_id: str = "zlib",
    repetitions: int = 3,
    registry: CodecRegistry | None = None,
    workdir=None,
) -> RunRecord:
    """Compress the genome itself; post-processing is decompress + recount.

    BaseCD stores the FASTA through a textual codec; BaseSD stores an
    FM-index of the sequences (split at non-ACGT characters, which leaves
    the k-mer once counts unchanged).
    """
    if scenario not in ("BaseCD", "BaseSD"):
        raise InputError(f"unknown base scenario {scenario!r}")
    registry = registry or default_registry()
    path = Path(dataset)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read dataset {path}: {exc}") from exc
    records = read_fasta(path)
    dataset_id = dataset_id_for(path)

    own_tmp = None
    if workdir is None:
        own_tmp = tempfile.TemporaryDirectory(prefix="gdc-base-")
        workdir = own_tmp.name
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    try:
        if scenario == "BaseCD":
            reason = _codec_usable(registry, codec_id, "textual")
            if reason is not None:
                return _skipped(dataset_id, k, scenario, "n/a", codec_id, "", False, reason)
            codec = registry.get(codec_id)
            payload_path = workdir / "genome.payload"

            def compress():
                payload = codec.compress(raw)
                payload_path.write_bytes(payload)
                return payload

            payload, pre_samples = _timed(compress, repetitions)

            def post():
                from .kmer import parse_fasta

                text = codec.decompress(payload_path.read_bytes(), len(raw))
                return count_kmers(parse_fasta(text.decode()), k)

            recovered, post_samples = _timed(post, repetitions)
            bytes_out = payload_path.stat().st_size
            codec_d = codec_id
        else:
            runs = [
                run
                for _, seq in records
                for run in _acgt_segments(seq)
            ]
            if not runs:
                raise InputError("dataset has no ACGT content to index")
            index_path = workdir / "genome.fmidx"

            def build():
                ix = fm_build(runs)
                index_path.write_bytes(ix.serialize())
                return ix

            _, pre_samples = _timed(build, repetitions)

            def post():
                ix = FmIndex.deserialize(index_path.read_bytes())
                return count_kmers(ix.extract(), k)

            recovered, post_samples = _timed(post, repetitions)
            bytes_out = index_path.stat().st_size
            codec_d = "fm"

        ground = count_kmers(records, k)
        if recovered != ground:
            raise InternalError(f"{scenario}: recount does not match ground truth")
        return RunRecord(
            dataset_id, k, scenario, "n/a", codec_d, "", False,
            bytes_out,
            _median(pre_samples),
            _median(post_samples),
            "ok",
            "",
            list(pre_samples),
            list(post_samples),
        )
    finally:
        if own_tmp is not None:
            own_tmp.cleanup()


def _acgt_segments(seq: str):
    from .kmer import _acgt_runs

    return list(_acgt_runs(seq.upper()))


# Pareto frontier -------------------------------------------------------------


def pareto_frontier(points) -> list[ParetoPoint]:
    """The non-dominated subset, sorted by bytes ascending.

    p dominates q when p.bytes <= q.bytes and p.time_s <= q.time_s with at
    least one strict; coincident copies of a retained point all stay.
    """
    points = list(points)
    if not points:
        raise InputError("pareto_frontier needs at least one point")
    for p in points:
        if p.bytes < 0 or p.time_s < 0 or not math.isfinite(p.time_s):
            raise InputError(f"point {p.label!r} has invalid coordinates")
    ordered = sorted(points, key=lambda p: (p.bytes, p.time_s, p.label))
    frontier: list[ParetoPoint] = []
    best_time = float("inf")
    i = 0
    while i < len(ordered):
        j = i
        while j < len(ordered) and ordered[j].bytes == ordered[i].bytes:
            j += 1
        group_min = ordered[i].time_s  # group is time-sorted
        if group_min < best_time:
            frontier.extend(p for p in ordered[i:j] if p.time_s == group_min)
            best_time = group_min
        i = j
    return frontier


def dominates(p: ParetoPoint, q: ParetoPoint) -> bool:
    return (
        p.bytes <= q.bytes
        and p.time_s <= q.time_s
        and (p.bytes < q.bytes or p.time_s < q.time_s)
    )


# Base-case convenience ratios -------------------------------------------------


@dataclass
class BaseCaseResult:
    dict_bytes: int
    base_bytes: int
    dict_post_s: float
    base_post_s: float
    size_ratio: float
    time_ratio: float
    size_verdict: str  # Y | N
    time_verdict: str

    def to_json(self) -> dict:
        return {
            "dict_bytes": self.dict_bytes,
            "base_bytes": self.base_bytes,
            "dict_post_s": self.dict_post_s,
            "base_post_s": self.base_post_s,
            "size_ratio": self.size_ratio,
            "time_ratio": self.time_ratio,
            "size_verdict": self.size_verdict,
            "time_verdict": self.time_verdict,
        }


def compare_base(dict_bytes, base_bytes, dict_post_s, base_post_s) -> BaseCaseResult:
    """Convenience of a stored dictionary vs. rebuilding from the genome.

    Both ratios must be strictly below one to earn a Y; exactly one is N.
    """
    if base_bytes <= 0:
        raise InputError(f"base bytes must be positive, got {base_bytes}")
    if base_post_s <= 0:
        raise InputError(f"base post time must be positive, got {base_post_s}")
    if dict_bytes < 0 or dict_post_s < 0:
        raise InputError("dictionary measurements must be non-negative")
    size_ratio = dict_bytes / base_bytes
    time_ratio = dict_post_s / base_post_s
    return BaseCaseResult(
        dict_bytes,
        base_bytes,
        dict_post_s,
        base_post_s,
        size_ratio,
        time_ratio,
        "Y" if size_ratio < 1 else "N",
        "Y" if time_ratio < 1 else "N",
    )


# Winner extraction ---------------------------------------------------------


_IMPLICIT_CASES = {"DP3", "Implicit"}


def best_by(records, objective: str) -> tuple[RunRecord, str]:
    """Winner under one objective plus the opposite family's loss bracket.

    Cases split into the explicit family (DP0..DP2, Explicit) and the
    implicit one (DP3, Implicit). The bracket is the ratio of the best
    opposite-family value to the winner's, formatted like "[2.05E+00]";
    with no opposite-family records it degenerates to [1.00E+00].
    """
    if objective not in ("bytes", "time"):
        raise InputError(f"objective must be 'bytes' or 'time', got {objective!r}")
    ok = [r for r in records if r.status == "ok"]
    if not ok:
        raise InputError("no successful records")
    value = (lambda r: r.bytes_out) if objective == "bytes" else (lambda r: r.post_time_s)
    winner = min(ok, key=lambda r: (value(r), r.label()))
    winner_family = winner.case in _IMPLICIT_CASES
    opposite = [r for r in ok if (r.case in _IMPLICIT_CASES) != winner_family]
    if opposite and value(winner) > 0:
        ratio = min(value(r) for r in opposite) / value(winner)
    else:
        ratio = 1.0
    return winner, f"[{ratio:.2E}]"
