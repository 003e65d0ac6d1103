"""Run every scenario in configs/ through gauge, zeros, bounds and report.

    python scripts/run_experiments.py [--out runs] [--workers 4] [--only power lacunary]

Each scenario writes into <out>/<config stem>/; a one-line verdict per
scenario is printed at the end.
"""
import argparse
import contextlib
import io
import sys
import time
from pathlib import Path

from gaugezeros import cli

ROOT = Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", type=Path, default=ROOT / "configs")
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="config stems to run")
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args(argv)

    configs = sorted(args.configs.glob("*.ini"))
    if args.only:
        configs = [c for c in configs if c.stem in set(args.only)]
    if not configs:
        print("no configs selected", file=sys.stderr)
        return 2

    summary, worst = [], 0
    for cfg in configs:
        out = args.out / cfg.stem
        start = time.perf_counter()
        for cmd in ("gauge", "zeros", "bounds", "report"):
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                rc = cli.main([cmd, "--config", str(cfg), "--out", str(out), "--workers", str(args.workers)])
            if args.verbose:
                print(buf.getvalue(), end="")
            if rc:
                print(f"{cfg.stem}: {cmd} exited {rc}", file=sys.stderr)
                worst = max(worst, rc)
        verdict = next(out.glob("verdict_*.txt"), None)
        line = verdict.read_text().strip() if verdict else "no verdict"
        summary.append(f"{cfg.stem:<14} {time.perf_counter() - start:6.1f}s  {line}")

    print("\n".join(summary))
    return worst


if __name__ == "__main__":
    sys.exit(main())
