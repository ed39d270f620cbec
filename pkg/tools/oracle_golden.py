# tools/oracle_golden.py
"""
Independent brute-force oracle for the 4-point golden dataset.

Pure Python, no project imports: every held-out model is rebuilt by sorting
the remaining points by (distance, row). Run directly before the test suite:

    python tools/oracle_golden.py

Exit code 0 when both the brute and the single-fit scores match the golden
values, 1 otherwise.
"""

import sys

X = [0.0, 1.0, 3.0, 7.0]
Y = [0.0, 1.0, 3.0, 7.0]
GOLDEN = {1: 5.5, 2: 8.875}
TOLERANCE = 1e-12


def nearest(xs, query, k, skip=None):
    ranked = sorted(((xs[i] - query) ** 2, i) for i in range(len(xs)) if i != skip)
    return [i for _, i in ranked[:k]]


def knn_predict(xs, ys, query, k, skip=None):
    rows = nearest(xs, query, k, skip)
    return sum(ys[i] for i in rows) / k


def brute_score(xs, ys, k):
    errors = [(knn_predict(xs, ys, xs[ell], k, skip=ell) - ys[ell]) ** 2 for ell in range(len(xs))]
    return sum(errors) / len(xs)


def single_fit_score(xs, ys, k):
    errors = [(knn_predict(xs, ys, xs[ell], k + 1) - ys[ell]) ** 2 for ell in range(len(xs))]
    return ((k + 1) / k) ** 2 * sum(errors) / len(xs)


def main() -> int:
    failed = 0
    for k, expected in GOLDEN.items():
        for name, score in (("brute", brute_score(X, Y, k)), ("single-fit", single_fit_score(X, Y, k))):
            ok = abs(score - expected) <= TOLERANCE
            failed += not ok
            print(f"[Oracle] k={k} {name:<10} score={score!r} expected={expected!r} {'OK' if ok else 'MISMATCH'}")
    print(f"[Oracle] {'all golden values reproduced' if not failed else f'{failed} mismatches'}")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
