"""On-disk archives: a manifest.json plus compressed payload files.

One directory per run. The manifest records the case, k, codec ids, the
gap-encoding flag, and for each payload its size, SHA-256 and the original
(pre-codec) length needed to invert the codec.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ArchiveError

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"


@dataclass
class Payload:
    name: str
    role: str  # d | f | s | fm | sfm
    codec: str
    form: str  # lines | fasta | ints | raw
    original_len: int
    byte_size: int
    sha256: str

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "role": self.role,
            "codec": self.codec,
            "form": self.form,
            "original_len": self.original_len,
            "bytes": self.byte_size,
            "sha256": self.sha256,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Payload":
        return cls(
            name=obj["name"],
            role=obj["role"],
            codec=obj["codec"],
            form=obj["form"],
            original_len=obj["original_len"],
            byte_size=obj["bytes"],
            sha256=obj["sha256"],
        )


@dataclass
class Archive:
    path: Path
    case: str
    k: int
    codec_d: str
    codec_f: str
    use_gaps: bool
    entry_count: int
    payloads: list[Payload]
    extra: dict

    def payload_by_role(self, role: str) -> Payload:
        for p in self.payloads:
            if p.role == role:
                return p
        raise ArchiveError(f"archive has no {role!r} payload")

    def manifest_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "case": self.case,
            "k": self.k,
            "codec_d": self.codec_d,
            "codec_f": self.codec_f,
            "use_gaps": self.use_gaps,
            "entry_count": self.entry_count,
            "payloads": [p.to_json() for p in self.payloads],
            "extra": self.extra,
        }

    def manifest_bytes(self) -> int:
        return os.path.getsize(self.path / MANIFEST_NAME)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_archive(
    out_dir,
    case: str,
    k: int,
    codec_d: str,
    codec_f: str,
    use_gaps: bool,
    entry_count: int,
    payload_blobs,
    extra: dict | None = None,
) -> Archive:
    """Write payload files and manifest.json under out_dir.

    payload_blobs: iterable of (name, role, codec_id, form, original_len,
    payload bytes).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payloads = []
    for name, role, codec_id, form, original_len, data in payload_blobs:
        with open(out / name, "wb") as fh:
            fh.write(data)
        payloads.append(
            Payload(name, role, codec_id, form, original_len, len(data), _sha256(data))
        )
    archive = Archive(
        out, case, k, codec_d, codec_f, use_gaps, entry_count, payloads, extra or {}
    )
    with open(out / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(archive.manifest_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return archive


def open_archive(path) -> Archive:
    p = Path(path)
    manifest_path = p / MANIFEST_NAME
    if not manifest_path.exists():
        raise ArchiveError(f"{p}: no {MANIFEST_NAME} found")
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            m = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArchiveError(f"{p}: unreadable manifest: {exc}") from exc
    if m.get("format_version") != FORMAT_VERSION:
        raise ArchiveError(
            f"{p}: unsupported format_version {m.get('format_version')!r}"
        )
    return Archive(
        p,
        m["case"],
        m["k"],
        m["codec_d"],
        m["codec_f"],
        m["use_gaps"],
        m["entry_count"],
        [Payload.from_json(obj) for obj in m["payloads"]],
        m.get("extra", {}),
    )


def read_payload(archive: Archive, role: str) -> tuple[bytes, Payload]:
    """Read and checksum-verify one payload."""
    info = archive.payload_by_role(role)
    path = archive.path / info.name
    if not path.exists():
        raise ArchiveError(f"missing payload file {info.name}")
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) != info.byte_size:
        raise ArchiveError(
            f"payload {info.name}: size {len(data)} != manifest {info.byte_size}"
        )
    if _sha256(data) != info.sha256:
        raise ArchiveError(f"payload {info.name}: checksum mismatch")
    return data, info


def verify_archive(archive: Archive) -> None:
    for p in archive.payloads:
        read_payload(archive, p.role)


def archive_size_bytes(archive: Archive, include_manifest: bool = False) -> int:
    """Sum of on-disk payload sizes; the output-bytes quantity of a run."""
    total = 0
    for p in archive.payloads:
        path = archive.path / p.name
        if not path.exists():
            raise ArchiveError(f"missing payload file {p.name}")
        total += os.path.getsize(path)
    if include_manifest:
        total += archive.manifest_bytes()
    return total
