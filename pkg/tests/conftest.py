import random

import pytest


def random_genome(rng: random.Random, n: int, with_n: bool = False) -> str:
    alphabet = "ACGTACGTACGTN" if with_n else "ACGT"
    return "".join(rng.choice(alphabet) for _ in range(n))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def tiny_fasta(tmp_path):
    path = tmp_path / "tiny.fa"
    path.write_text(">seq1\nACGT\n", encoding="utf-8")
    return path
