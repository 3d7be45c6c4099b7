"""Run directories: overwrite protection, a write lock and the produced-files record."""

from __future__ import annotations

import os
import shutil
import sys
from collections.abc import Generator
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from ledpose.platform.config import dump_config_file
from ledpose.pose.core.digest import file_digest
from ledpose.pose.core.errors import LedPoseError, OutputExistsError

if sys.platform != "win32":
    import fcntl

LOCK_NAME = ".ledpose.lock"
RECORD_NAME = "run.yaml"


class RunLock:
    """Exclusive, non-blocking lock on a run directory."""

    def __init__(self, lock_path: Path):
        self.lock_path = lock_path
        self.lock_file: int | None = None

    def acquire(self) -> bool:
        self.lock_path.parent.mkdir(parents=True, exist_ok=True)
        if sys.platform == "win32":
            try:
                self.lock_file = os.open(str(self.lock_path), os.O_CREAT | os.O_EXCL | os.O_RDWR)
                return True
            except FileExistsError:
                return False
        self.lock_file = os.open(str(self.lock_path), os.O_CREAT | os.O_RDWR)
        try:
            fcntl.flock(self.lock_file, fcntl.LOCK_EX | fcntl.LOCK_NB)
            return True
        except OSError:
            os.close(self.lock_file)
            self.lock_file = None
            return False

    def release(self) -> None:
        if self.lock_file is None:
            return
        if sys.platform != "win32":
            fcntl.flock(self.lock_file, fcntl.LOCK_UN)
        os.close(self.lock_file)
        self.lock_file = None
        self.lock_path.unlink(missing_ok=True)


@contextmanager
def run_lock(run_dir: Path) -> Generator[None, None, None]:
    """
    Hold the run-directory lock for the duration of a command.

    Raises:
        LedPoseError: If another command is writing the same directory
    """
    lock = RunLock(run_dir / LOCK_NAME)
    if not lock.acquire():
        raise LedPoseError(f"Another ledpose command is writing {run_dir}. If this is incorrect, remove {LOCK_NAME}")
    try:
        yield
    finally:
        lock.release()


def prepare_output(path: Path, *, force: bool = False, is_dir: bool = True) -> Path:
    """Refuse to reuse an existing output path unless ``force``; clear it when forced."""
    if path.exists():
        if not force:
            raise OutputExistsError(f"{path} already exists (use --force to overwrite)")
        if path.is_dir():
            shutil.rmtree(path)
        else:
            path.unlink()
    if is_dir:
        path.mkdir(parents=True)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


class ProducedFile(BaseModel):
    path: str
    sha256: str


class RunRecord(BaseModel):
    """Contents of ``run.yaml``."""

    command: str
    seed: int | None = None
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S"))
    parameters: dict[str, Any] = Field(default_factory=dict)
    files: list[ProducedFile] = Field(default_factory=list)


def write_run_record(run_dir: Path, record: RunRecord, *, skip_suffixes: tuple[str, ...] = (".png",)) -> Path:
    """Digest every produced file under ``run_dir`` (images excluded by default) into ``run.yaml``."""
    files: list[ProducedFile] = []
    for p in sorted(run_dir.rglob("*")):
        if not p.is_file() or p.name in (LOCK_NAME, RECORD_NAME) or p.suffix in skip_suffixes:
            continue
        files.append(ProducedFile(path=p.relative_to(run_dir).as_posix(), sha256=file_digest(p)))
    record = record.model_copy(update={"files": files})
    path = run_dir / RECORD_NAME
    dump_config_file(path, record.model_dump(mode="json"))
    return path
