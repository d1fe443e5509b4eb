"""
Batch runner: walk reports and density verdicts for a family of
non-backtracking lifts of random 3-regular graphs.
"""

import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import argparse
import logging

import pandas as pd

from src.cli import EXIT_ASSERTION, LOG_FORMAT
from src.config import get_settings
from src.nbrw import CUTOFF_RATIO_CEILING, check_cutoff_family, cutoff_family


def run_cutoff_family(base_sizes, seeds, k: int = 3, eps: float = 0.25, r: float = 3.0,
                      dense_sizes: int = 2, out: str = None):
    """
    Run the family, print per-size medians and the density verdict, then
    enforce the cutoff ceiling, median ordering and density check.

    Args:
        base_sizes: Vertex counts of the base graphs (the lift has k times as many)
        seeds: Seeds per size
        k: Base degree
        eps: Mixing threshold
        r: Rate for the density check
        dense_sizes: Number of smallest sizes with a dense spectrum
        out: Optional CSV path for the per-instance rows
    """
    settings = get_settings()
    print("=" * 60)
    print("Densitometer - Cutoff Family")
    print("=" * 60)

    print(f"\nStep 1: Walk reports for {len(base_sizes) * len(seeds)} lifts ({settings.threads} threads)...")
    family = cutoff_family(base_sizes, seeds, k=k, eps=eps, r=r, dense_sizes=dense_sizes,
                           settings=settings, progress=True)

    df = pd.DataFrame([walk.model_dump() for walk in family.walks])
    for n, ratio in family.medians.items():
        print(f"  n = {n:>7d}  median t_mix / log_d n = {ratio:.4f}")
    print(f"✓ Largest ratio {df['cutoff_ratio'].max():.4f} (ceiling {CUTOFF_RATIO_CEILING})")

    print(f"\nStep 2: Spectral density at r = {r} (first seed per size)...")
    for report in family.spectra:
        print(f"  n = {report.n:>7d}  {report.mode:<5}  top = {report.top_nontrivial:.6f}  N(r) = {report.density_counts[0]}")
    verdict = family.density
    print(f"✓ slope {verdict.slope:.4f} vs allowed {verdict.allowed:.4f}: {'PASS' if verdict.passed else 'FAIL'}")

    if out:
        df.to_csv(out, index=False, lineterminator="\n")
        print(f"\n✓ Rows written to {out}")

    check_cutoff_family(family)
    print("\n" + "=" * 60)
    print("✓ Every instance within the ceiling, medians non-increasing, density PASS")
    print("=" * 60)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Cutoff and density experiments on random NB lifts")
    parser.add_argument("--sizes", default="1000,3334,10000,33334",
                        help="Base graph sizes, comma separated (default: lifts of ~3e3 to 1e5 vertices)")
    parser.add_argument("--seeds", default="1,2,3,4,5", help="Seeds per size (default: 1,2,3,4,5)")
    parser.add_argument("--k", type=int, default=3, help="Base degree (default: 3)")
    parser.add_argument("--eps", type=float, default=0.25, help="Mixing threshold (default: 0.25)")
    parser.add_argument("--r", type=float, default=3.0, help="Rate for the density check (default: 3)")
    parser.add_argument("--dense-sizes", type=int, default=2,
                        help="Smallest sizes that get a dense spectrum (default: 2)")
    parser.add_argument("--out", default=None, help="CSV file for per-instance rows")
    args = parser.parse_args()

    logging.basicConfig(level=get_settings().log_level, format=LOG_FORMAT, stream=sys.stderr)
    try:
        run_cutoff_family(
            [int(x) for x in args.sizes.split(",")],
            [int(x) for x in args.seeds.split(",")],
            k=args.k,
            eps=args.eps,
            r=args.r,
            dense_sizes=args.dense_sizes,
            out=args.out,
        )
    except KeyboardInterrupt:
        print("\n\nRun interrupted by user.")
        sys.exit(1)
    except AssertionError as e:
        print(f"\n✗ Family check failed: {e}")
        sys.exit(EXIT_ASSERTION)
    except Exception as e:
        print(f"\n\nError during run: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)
