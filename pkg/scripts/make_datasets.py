#!/usr/bin/env python3
"""Regenerate the bundled CSV datasets under data/.

Both tasks are synthetic and fully determined by the generator seed, so
the CSV files are reproducible artifacts; this script rewrites them.
"""

import argparse
from pathlib import Path

from aimcsim.datasets import export_dataset, make_dataset


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve()
                                             .parent.parent / "data"))
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("spirals", "digits64"):
        ds = make_dataset(name, seed=args.seed)
        paths = export_dataset(ds, out)
        for p in paths:
            print(p)


if __name__ == "__main__":
    main()
