"""Run the CLI over a directory of problem files and summarize the verdicts.

    python3 scripts/run_corpus.py [fixtures/] --repeat 3
"""
from __future__ import annotations

import argparse
import hashlib
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path


@dataclass
class CorpusConfig:
    directory: Path = Path(__file__).resolve().parent.parent / "fixtures"
    repeat: int = 1


def run_once(path: Path) -> tuple[int, bytes]:
    proc = subprocess.run([sys.executable, "-m", "markovfactor", str(path)], capture_output=True, check=False)
    return proc.returncode, proc.stdout


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", nargs="?", type=Path, default=CorpusConfig.directory)
    ap.add_argument("--repeat", type=int, default=CorpusConfig.repeat)
    cfg = CorpusConfig(**vars(ap.parse_args(argv)))
    start = time.perf_counter()
    stable = True
    for path in sorted(cfg.directory.glob("*.json")):
        results = [run_once(path) for _ in range(cfg.repeat)]
        digests = {hashlib.sha256(out).hexdigest()[:12] for _, out in results}
        stable &= len(digests) == 1
        code = results[0][0]
        print(f"{path.name:<22} exit {code}  sha256 {', '.join(sorted(digests))}")
    print(f"\n{'byte-identical' if stable else 'NOT byte-identical'} across {cfg.repeat} run(s), "
          f"{time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
