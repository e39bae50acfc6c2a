#!/usr/bin/env python3
"""Survey the conductor-data decision over all finite residue fields with
at most a given number of elements.

For one branch with exponent one, the verdict is Free exactly on trivial
extensions; for two branches it is Free only over the two-element field.
The script prints the full verdict table so the pattern is visible.

Usage: python3 scripts/finite_field_survey.py [max_order]
"""

import sys

from igl.noeth import Branch, FiniteField, NoethInstance, decide_noeth
from igl.valgroup import Verdict

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)


def prime_powers(limit):
    for p in PRIMES:
        q, r = p, 1
        while q <= limit:
            yield p, r, q
            q, r = q * p, r + 1


def main() -> int:
    limit = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    pps = list(prime_powers(limit))

    print("one branch, radical conductor (Free iff L = k):")
    free = 0
    for p, s, ps in pps:
        for p2, r, pr in pps:
            if p2 != p or r % s:
                continue
            inst = NoethInstance(FiniteField(p, s), (Branch(FiniteField(p, r), 1),))
            v = decide_noeth(inst).verdict
            assert (v is Verdict.FREE) == (r == s)
            free += v is Verdict.FREE
    print(f"  {free} free verdicts, one per field, as predicted")

    print("two branches, radical conductor (Free iff everything is F2):")
    rows = []
    for p, s, ps in pps:
        subs = [(r, q) for p2, r, q in pps if p2 == p and r % s == 0]
        for r1, q1 in subs:
            for r2, q2 in subs:
                inst = NoethInstance(FiniteField(p, s),
                                     (Branch(FiniteField(p, r1), 1),
                                      Branch(FiniteField(p, r2), 1)))
                v = decide_noeth(inst).verdict
                if v is Verdict.FREE:
                    rows.append((ps, q1, q2))
                assert (v is Verdict.FREE) == (ps == q1 == q2 == 2)
    for ps, q1, q2 in rows:
        print(f"  Free: k=F{ps}, L1=F{q1}, L2=F{q2}")
    print(f"  (every other combination with orders <= {limit} is NotFree)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
