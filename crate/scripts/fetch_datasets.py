#!/usr/bin/env python3
"""Download the Boston and California housing tables as headered CSVs.

Needs scikit-learn and network access. The target is the last column.
"""

import argparse
import pathlib

from sklearn.datasets import fetch_california_housing, fetch_openml


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data", help="output directory")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cal = fetch_california_housing(as_frame=True).frame
    cal.to_csv(out / "california.csv", index=False)

    boston = fetch_openml(name="boston", version=1, as_frame=True).frame
    for col in ("CHAS", "RAD"):
        boston[col] = boston[col].astype(float)
    boston.to_csv(out / "boston.csv", index=False)

    print(f"wrote {out / 'california.csv'} ({len(cal)} rows)")
    print(f"wrote {out / 'boston.csv'} ({len(boston)} rows)")


if __name__ == "__main__":
    main()
