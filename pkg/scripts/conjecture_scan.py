"""Search random states just below the purity threshold for points outside the stabilizer polytope."""
import argparse
import json

import numpy as np

from tricrit.bounds import conjecture_scan


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=["membership", "criterion"], default="membership")
    a = ap.parse_args(argv)
    for n in a.n:
        rep = conjecture_scan(n, a.trials, np.random.default_rng([a.seed, n]), mode=a.mode)
        print(json.dumps(rep.to_dict() if hasattr(rep, "to_dict") else vars(rep), default=str))


if __name__ == "__main__":
    main()
