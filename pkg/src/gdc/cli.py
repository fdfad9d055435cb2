"""Command-line surface.

Exit codes: 0 success, 1 user/input error, 2 internal assertion failure.
All paths are explicit flags; nothing is written implicitly to the
working directory.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .archive import archive_size_bytes, open_archive
from .bench import (
    compare_base,
    best_by,
    pareto_frontier,
    run_base_case,
    run_matrix,
)
from .codecs import default_registry
from .errors import GdcError, InputError, InternalError
from .kmer import (
    canonicalize,
    count_kmers,
    count_kmers_standard,
    dictionary_to_text,
    is_canonical,
    parse_dictionary,
    read_fasta,
    recanonicalize_standard_to_dsk,
)
from .pipelines import CASES, PipelineConfig, compress_case, decompress_archive
from .report import (
    emit_report,
    parse_runs_csv,
    records_to_points,
    write_frontier_csv,
    write_pareto_png,
    write_pareto_svg,
)
from .spss import build_spss, spss_stats, spss_to_fasta
from .succinct import (
    SD_CASES,
    implicit_membership,
    sd_compress,
    sd_decompress,
    sd_load,
)

ALL_CASES = CASES + SD_CASES


@click.group()
@click.version_option(__version__)
def cli() -> None:
    """Compression workbench for genomic k-mer dictionaries."""


def _infer_k(dict_path: Path, k: int | None) -> int:
    try:
        with open(dict_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    inferred = len(line.split(" ")[0])
                    if k is not None and k != inferred:
                        raise InputError(
                            f"--k {k} contradicts {inferred}-mers in {dict_path}"
                        )
                    return inferred
    except OSError as exc:
        raise InputError(f"cannot read {dict_path}: {exc}") from exc
    if k is None:
        raise InputError(f"{dict_path} is empty; pass --k explicitly")
    return k


def _load_dictionary(dict_path: Path, k: int | None):
    k = _infer_k(dict_path, k)
    with open(dict_path, "r", encoding="utf-8") as fh:
        return parse_dictionary(fh, k)


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="FASTA file to count.")
@click.option("--k", required=True, type=int, help="k-mer length (1..64).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output dictionary text file.")
@click.option("--from-kmc3", is_flag=True, help="Count under the standard canonical order (KMC3 convention) and convert the keys to the DSK order.")
def count(input_path, k, out_path, from_kmc3):
    """Count canonical k-mers of a FASTA file into a dictionary file."""
    records = read_fasta(input_path)
    if from_kmc3:
        d = recanonicalize_standard_to_dsk(count_kmers_standard(records, k))
    else:
        d = count_kmers(records, k)
    Path(out_path).write_text(dictionary_to_text(d), encoding="utf-8")
    click.echo(f"{len(d)} distinct canonical {k}-mers -> {out_path}")


@cli.command()
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Dictionary text file.")
@click.option("--k", type=int, default=None, help="k (inferred from the file when omitted).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output SPSS FASTA file.")
@click.option("--genome-chars", type=int, default=None, help="Genome length for the size-ratio statistic.")
def spss(dict_path, k, out_path, genome_chars):
    """Build a spectrum preserving string set from a dictionary."""
    d = _load_dictionary(Path(dict_path), k)
    s = build_spss(d)
    Path(out_path).write_text(spss_to_fasta(s), encoding="utf-8")
    line = f"{len(s.strings)} strings, {s.total_chars()} chars -> {out_path}"
    if genome_chars:
        stats = spss_stats(s, genome_chars)
        line += f", chars/genome = {float(stats.ratio_s_over_g):.4f}"
    click.echo(line)


@cli.command()
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Dictionary text file.")
@click.option("--k", type=int, default=None, help="k (inferred from the file when omitted).")
@click.option("--case", required=True, type=click.Choice(ALL_CASES), help="Compression case.")
@click.option("--codec-d", default="store", show_default=True, help="Codec for the k-mer/SPSS stream.")
@click.option("--codec-f", default="store", show_default=True, help="Codec for the frequency stream (or the frequency map for Explicit/Implicit).")
@click.option("--gaps", is_flag=True, help="Store the frequency stream as offset+gaps (sorted streams only).")
@click.option("--sample-rate", default=32, show_default=True, type=int, help="Suffix-array sample rate for Explicit/Implicit.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Archive directory to create.")
def compress(dict_path, k, case, codec_d, codec_f, gaps, sample_rate, out_dir):
    """Compress a dictionary into an archive directory."""
    d = _load_dictionary(Path(dict_path), k)
    registry = default_registry()
    if case in SD_CASES:
        archive = sd_compress(d, case, out_dir, codec_f, registry, sample_rate)
    else:
        cfg = PipelineConfig(case, codec_d, codec_f, gaps)
        archive = compress_case(d, cfg, out_dir, registry)
    click.echo(f"{case} archive: {archive_size_bytes(archive)} payload bytes -> {out_dir}")


@cli.command()
@click.option("--archive", "archive_dir", required=True, type=click.Path(exists=True, file_okay=False), help="Archive directory.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output dictionary text file.")
def decompress(archive_dir, out_path):
    """Recover the exact dictionary from an archive."""
    archive = open_archive(archive_dir)
    if archive.case in SD_CASES:
        d = sd_decompress(archive)
    else:
        d = decompress_archive(archive)
    Path(out_path).write_text(dictionary_to_text(d), encoding="utf-8")
    click.echo(f"{len(d)} entries -> {out_path}")


@cli.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False), help="Explicit/Implicit archive directory.")
@click.option("--kmer", "kmer_text", required=True, help="Canonical k-mer to look up.")
def query(index_dir, kmer_text):
    """Print the frequency of a canonical k-mer, or 'absent'."""
    archive = open_archive(index_dir)
    if archive.case not in SD_CASES:
        raise InputError(
            f"archive case {archive.case} does not support queries; "
            "build one with --case Explicit or Implicit"
        )
    kmer = kmer_text.upper()
    if len(kmer) != archive.k:
        raise InputError(f"index holds {archive.k}-mers, query has length {len(kmer)}")
    ix, sfm = sd_load(archive)
    if archive.case == "Implicit":
        freq = implicit_membership(ix, sfm, kmer)
    else:
        if not is_canonical(kmer):
            raise InputError(
                f"query must be canonical; {kmer!r} canonicalizes to "
                f"{canonicalize(kmer)!r}"
            )
        freq = sfm.query(kmer) if ix.count(kmer) > 0 else None
    click.echo("absent" if freq is None else str(freq))


def _csv_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="FASTA dataset.")
@click.option("--k", "k_values", required=True, multiple=True, type=int, help="k value (repeatable).")
@click.option("--cases", default="DP0,DP1,DP2,DP3", show_default=True, help="Comma-separated cases (DP0..DP3, Explicit, Implicit).")
@click.option("--codecs-d", default="store,twobit,zlib,bzip2", show_default=True, help="Comma-separated codecs for the k-mer/SPSS stream.")
@click.option("--codecs-f", default="store,zlib,bzip2,varint,bic,pfor", show_default=True, help="Comma-separated codecs for the frequency stream.")
@click.option("--reps", default=3, show_default=True, type=int, help="Timing repetitions (median reported).")
@click.option("--gaps", is_flag=True, help="Use offset+gap frequency encoding where the stream is sorted (DP2).")
@click.option("--parallel", default=0, show_default=True, type=int, help="Worker threads; forfeits timing fidelity.")
@click.option("--log-x", is_flag=True, help="Log-scaled byte axis in the plots.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Report directory.")
def bench(input_path, k_values, cases, codecs_d, codecs_f, reps, gaps, parallel, log_x, out_dir):
    """Run the configuration matrix and emit reports and plots."""
    records = run_matrix(
        input_path,
        list(k_values),
        _csv_list(cases),
        _csv_list(codecs_d),
        _csv_list(codecs_f),
        repetitions=reps,
        use_gaps=gaps,
        parallel=parallel,
    )
    ok = [r for r in records if r.status == "ok"]
    skipped = len(records) - len(ok)
    frontier = pareto_frontier(records_to_points(ok)) if ok else []
    emit_report(records, frontier, out_dir, log_x=log_x)
    click.echo(
        f"{len(records)} configurations ({len(ok)} ok, {skipped} skipped), "
        f"{len(frontier)} on the frontier -> {out_dir}"
    )
    if ok:
        smallest, bracket_b = best_by(records, "bytes")
        fastest, bracket_t = best_by(records, "time")
        click.echo(
            f"best compression: {smallest.label()} "
            f"({smallest.bytes_out} B) {bracket_b}"
        )
        click.echo(
            f"best post-processing: {fastest.label()} "
            f"({fastest.post_time_s:.6f} s) {bracket_t}"
        )


@cli.command()
@click.option("--runs", "runs_path", required=True, type=click.Path(exists=True, dir_okay=False), help="A runs.csv produced by bench.")
@click.option("--log-x", is_flag=True, help="Log-scaled byte axis in the plots.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
def pareto(runs_path, log_x, out_dir):
    """Extract the Pareto frontier from a runs.csv and plot it."""
    records = parse_runs_csv(runs_path)
    points = records_to_points(records)
    if not points:
        raise InputError("runs.csv has no successful records")
    frontier = pareto_frontier(points)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_frontier_csv(frontier, out / "frontier.csv")
    write_pareto_svg(points, frontier, out / "pareto.svg", log_x)
    write_pareto_png(points, frontier, out / "pareto.png", log_x)
    click.echo(f"{len(frontier)} of {len(points)} configurations on the frontier -> {out_dir}")


@cli.command("compare-base")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="FASTA dataset.")
@click.option("--k", required=True, type=int, help="k-mer length.")
@click.option("--case", default="DP0", show_default=True, type=click.Choice(ALL_CASES), help="Dictionary-side case.")
@click.option("--codec-d", default="zlib", show_default=True)
@click.option("--codec-f", default="zlib", show_default=True)
@click.option("--gaps", is_flag=True)
@click.option("--base-codec", default="zlib", show_default=True, help="Codec for the stored genome (BaseCD).")
@click.option("--reps", default=3, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Report directory.")
def compare_base_cmd(input_path, k, case, codec_d, codec_f, gaps, base_codec, reps, out_dir):
    """Compare keeping the compressed dictionary vs. recounting the genome.

    The base side stores the compressed genome (or its FM-index for
    Explicit/Implicit cases) and recounts after decompression; verdicts are
    Y when the dictionary side wins strictly.
    """
    dict_records = run_matrix(
        input_path, [k], [case], [codec_d], [codec_f],
        repetitions=reps, use_gaps=gaps,
    )
    record = dict_records[0]
    if record.status != "ok":
        raise InputError(f"dictionary-side run skipped: {record.reason}")
    base_scenario = "BaseSD" if case in SD_CASES else "BaseCD"
    base_record = run_base_case(
        input_path, k, base_scenario, base_codec, repetitions=reps
    )
    if base_record.status != "ok":
        raise InputError(f"base-side run skipped: {base_record.reason}")
    result = compare_base(
        record.bytes_out,
        base_record.bytes_out,
        record.post_time_s,
        base_record.post_time_s,
    )
    all_records = [record, base_record]
    frontier = pareto_frontier(records_to_points(all_records))
    emit_report(all_records, frontier, out_dir, base=result)
    click.echo(f"dictionary: {record.label()}, {result.dict_bytes} B, post {result.dict_post_s:.6f} s")
    click.echo(f"base:       {base_record.label()}, {result.base_bytes} B, post {result.base_post_s:.6f} s")
    click.echo(f"size ratio: {result.size_ratio:.4E} -> {result.size_verdict}")
    click.echo(f"time ratio: {result.time_ratio:.4E} -> {result.time_verdict}")


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    except GdcError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except (InternalError, AssertionError) as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
