from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest


def _iter_src_dirs(root: Path) -> list[Path]:
    results: list[Path] = []
    seen: set[Path] = set()
    for base in (root / "apps", root / "libs"):
        if not base.exists():
            continue
        for candidate in base.rglob("src"):
            if candidate.is_dir():
                resolved = candidate.resolve()
                if resolved not in seen:
                    seen.add(resolved)
                    results.append(resolved)
    return results


_ROOT = Path(__file__).resolve().parent
for _path in _iter_src_dirs(_ROOT):
    sys.path.insert(0, str(_path))


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if os.environ.get("LEDPOSE_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="slow acceptance run; set LEDPOSE_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
