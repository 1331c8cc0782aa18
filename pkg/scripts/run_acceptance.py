"""Run every acceptance check and write the JSON report.

usage: python3 scripts/run_acceptance.py [--seed N] [--out PATH]
"""

import argparse
import sys

from mackeyprod.acceptance import report_json, run_all


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    verdicts = run_all(args.seed)
    for v in verdicts:
        print(v.line(), file=sys.stderr)
    text = report_json(verdicts, args.seed)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0 if all(v.passed for v in verdicts) else 2


if __name__ == "__main__":
    sys.exit(main())
