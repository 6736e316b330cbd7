"""Run every verification suite at the default scale and print a per-check table.

    python3 scripts/run_verify.py --trials 500 --workers 4 --out report.json
"""

import argparse
import json
import time

from cstarmod import harness


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=None, help="also write the JSON report here")
    args = ap.parse_args()

    config = harness.RunConfig(master_seed=args.seed, trials=args.trials, workers=args.workers)
    start = time.perf_counter()
    report = harness.verify(config)
    elapsed = time.perf_counter() - start

    print(f"{'check':<15}{'trials':>8}{'passed':>8}{'failed':>8}{'degen':>8}  worst residual")
    for name, check in report["checks"].items():
        t = check["total"]
        worst = max(t["max_residual"].items(), key=lambda kv: kv[1], default=("-", 0.0))
        print(f"{name:<15}{t['trials']:>8}{t['passed']:>8}{t['failed']:>8}{t['degenerate']:>8}  "
              f"{worst[0]}={worst[1]:.2e}")
    print(f"failures: {report['failure_count']}   elapsed: {elapsed:.1f} s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 1 if report["failure_count"] else 0


if __name__ == "__main__":
    raise SystemExit(main())
