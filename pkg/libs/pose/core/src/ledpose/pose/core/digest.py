"""Content digests for produced files and seed derivation."""

import hashlib
from pathlib import Path

_CHUNK = 1 << 20


def file_digest(path: Path) -> str:
    """
    Compute the SHA256 digest of a file's bytes.

    Args:
        path: File to hash

    Returns:
        SHA256 hex digest string
    """
    hasher = hashlib.sha256()
    with open(path, "rb") as f:
        while chunk := f.read(_CHUNK):
            hasher.update(chunk)
    return hasher.hexdigest()


def derive_seed(seed: int, stream: str) -> int:
    """
    Derive an independent 63-bit seed for a named substream.

    One global seed fans out to "dataset", "init", "augment", "loader", ...
    so every random consumer is reproducible from a single number.
    """
    hasher = hashlib.sha256()
    hasher.update(f"{int(seed)}:{stream}".encode("utf-8"))
    return int.from_bytes(hasher.digest()[:8], "big") & ((1 << 63) - 1)
