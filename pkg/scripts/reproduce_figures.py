#!/usr/bin/env python3
"""
Figure Data Script

Runs every experiment for both reference systems and leaves one output
directory per figure under the chosen root. Desk-scale by default; pass
--runs to change the ensemble size.

Usage:
    python scripts/reproduce_figures.py --root outputs/figures --workers 8
"""

import argparse
import sys
from pathlib import Path

# Add parent directory to path so we can import microinit modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from microinit.main import main as microinit

CONFIGS = Path(__file__).parent.parent / "configs"


def jobs(root: Path, runs: int, workers: int):
    """(label, argv) for every figure"""
    for system in ("lorenz", "mackey_glass"):
        cfg = str(CONFIGS / f"{system}.cfg")
        common = ["--config", cfg, "--runs", str(runs), "--workers", str(workers)]
        yield f"{system} error profile", ["ensemble", *common, "--output-dir", str(root / system / "ensemble")]
        yield f"{system} horizon vs T", ["horizon", *common, "--T-list", "5:50:5", "--output-dir", str(root / system / "horizon")]
        yield f"{system} NSE_0 vs T", ["nse0", *common, "--T-list", "5:50:5", "--output-dir", str(root / system / "nse0")]
        yield f"{system} lyapunov", ["lyapunov", "--config", cfg, "--output-dir", str(root / system / "lyapunov")]
        yield f"{system} spectrum", ["spectrum", "--config", cfg, "--output-dir", str(root / system / "spectrum")]
        yield f"{system} optimizers", ["optim-compare", *common, "--output-dir", str(root / system / "optimizers")]
        yield f"{system} filtered noise", ["filter-study", "--config", cfg, "--output-dir", str(root / system / "filter")]
        yield f"{system} bounding sweep", ["bounding-sweep", *common, "--output-dir", str(root / system / "bounding")]

    mg = str(CONFIGS / "mackey_glass.cfg")
    yield "mackey_glass heatmap", [
        "heatmap", "--config", mg, "--runs", str(runs), "--workers", str(workers),
        "--T", "5:50:5", "--m", "1:5", "--output-dir", str(root / "mackey_glass" / "heatmap"),
    ]
    yield "lorenz operators", [
        "operator-compare", "--config", str(CONFIGS / "lorenz.cfg"), "--runs", str(runs),
        "--workers", str(workers), "--output-dir", str(root / "lorenz" / "operators"),
    ]
    yield "linear recovery", [
        "linear-study", "--n-x", "8", "--T", "1:8", "--m", "1:4", "--workers", str(workers),
        "--output-dir", str(root / "linear"),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--root", type=Path, default=Path("outputs/figures"))
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    print("=" * 60)
    print("Figure data")
    print("=" * 60)
    print()

    failures = []
    for label, argv in jobs(args.root, args.runs, args.workers):
        print(f"📊 {label}...")
        code = microinit(argv)
        if code != 0:
            print(f"❌ {label} failed with exit code {code}")
            failures.append(label)
        print()

    print("=" * 60)
    if failures:
        print(f"⚠️  {len(failures)} job(s) failed: {', '.join(failures)}")
        return 1
    print(f"✅ All figure data written under {args.root}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
