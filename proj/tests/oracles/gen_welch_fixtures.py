#!/usr/bin/env python3
"""Generate the Welch t-test reference fixtures used by test_stats.cpp.

Writes tests/data/welch_fixtures.tsv: one case per line,
  na <TAB> nb <TAB> a,csv <TAB> b,csv <TAB> t <TAB> df <TAB> p
with t/df/p taken from scipy.stats.ttest_ind(equal_var=False).

Run from the repository root:  python3 tests/oracles/gen_welch_fixtures.py
"""

import numpy as np
from scipy import stats

OUT = "tests/data/welch_fixtures.tsv"
N_CASES = 100
SEED = 20240811


def main():
    rng = np.random.default_rng(SEED)
    lines = []
    for i in range(N_CASES):
        na = int(rng.integers(2, 61))
        nb = int(rng.integers(2, 61))
        scale_a = float(rng.uniform(0.5, 3.0))
        scale_b = float(rng.uniform(0.5, 3.0))
        shift = float(rng.uniform(-2.0, 2.0))
        a = rng.normal(0.0, scale_a, na)
        b = rng.normal(shift, scale_b, nb)
        # a couple of hand-picked shapes alongside the random draws
        if i == 0:
            a = np.array([1.0, 2.0, 3.0, 4.0])
            b = np.array([1.0, 2.0, 3.0, 4.0])
        elif i == 1:
            a = np.array([0.84] * 3 + [0.85, 0.83])
            b = np.array([0.81] * 3 + [0.82, 0.80])
        elif i == 2:
            a = np.array([5.0, 5.0, 5.0])  # constant list, nonzero var in b
            b = rng.normal(0.0, 1.0, 10)
        res = stats.ttest_ind(a, b, equal_var=False)
        fmt = lambda xs: ",".join(repr(float(x)) for x in xs)
        lines.append(
            "%d\t%d\t%s\t%s\t%s\t%s\t%s"
            % (len(a), len(b), fmt(a), fmt(b),
               repr(float(res.statistic)), repr(float(res.df)), repr(float(res.pvalue)))
        )
    with open(OUT, "w") as f:
        f.write("# na\tnb\ta\tb\tt\tdf\tp  (scipy %s)\n" % stats.__name__)
        f.write("\n".join(lines) + "\n")
    print("wrote %s (%d cases)" % (OUT, len(lines)))


if __name__ == "__main__":
    main()
