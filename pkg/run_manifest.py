"""
NashOverlap - Run manifest
Everything needed to reproduce a run: resolved parameters, input digests,
per-game convergence counts and per-stage timings. Keys under "runtime."
(thread count, timings, start time) are the only ones that vary between
reproductions.
"""

import hashlib
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterator, List


def file_digest(path: Path) -> str:
    """sha256 of a file's bytes"""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    if value is None:
        return "none"
    return str(value)


@dataclass
class RunManifest:
    """Line-oriented key=value record of one CLI run"""
    command: str = ""
    parameters: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    convergence: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    threads: int = 1
    started: datetime = field(default_factory=datetime.now)

    def record_input(self, name: str, path: Path) -> str:
        digest = file_digest(Path(path))
        self.inputs[name] = digest
        return digest

    def record_output(self, name: str, path: Path) -> str:
        digest = file_digest(Path(path))
        self.outputs[name] = digest
        return digest

    def record_games(self, prefix: str, passes: List[int], converged: List[bool]):
        self.convergence[f"{prefix}.games"] = len(passes)
        self.convergence[f"{prefix}.non_converged"] = sum(1 for c in converged if not c)
        self.convergence[f"{prefix}.max_passes"] = max(passes, default=0)
        self.convergence[f"{prefix}.passes"] = list(passes)

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Time a pipeline stage"""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    def to_lines(self, include_runtime: bool = True) -> List[str]:
        lines = [f"command={self.command}"]
        lines += [f"param.{k}={_format_value(v)}" for k, v in sorted(self.parameters.items())]
        lines += [f"input.{k}.sha256={v}" for k, v in sorted(self.inputs.items())]
        lines += [f"output.{k}.sha256={v}" for k, v in sorted(self.outputs.items())]
        lines += [f"convergence.{k}={_format_value(v)}" for k, v in sorted(self.convergence.items())]
        if include_runtime:
            lines.append(f"runtime.started={self.started.isoformat(timespec='seconds')}")
            lines.append(f"runtime.threads={self.threads}")
            lines += [f"runtime.time.{k}={v:.3f}" for k, v in sorted(self.timings.items())]
        return lines

    def to_text(self, include_runtime: bool = True) -> str:
        return "\n".join(self.to_lines(include_runtime)) + "\n"

    def write(self, path: Path) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self.to_text())


def parse_manifest(text: str, include_runtime: bool = False) -> Dict[str, str]:
    """key -> value, dropping runtime.* keys unless asked for"""
    entries = {}
    for line in text.splitlines():
        if '=' not in line:
            continue
        key, value = line.split('=', 1)
        if not include_runtime and key.startswith("runtime."):
            continue
        entries[key] = value
    return entries
