"""Independent oracles and random-instance generators for the test suite.

Everything here deliberately avoids the code paths it is used to check:
determinants are cofactor expansions rather than Bareiss, invariant
factors come from gcds of minors rather than Smith reduction, derived-set
bounds come from a max-search over a candidate grid rather than normal
form surgery, and tree ranks come from a direct structural recursion
rather than the cut-and-sum decision procedure.
"""

from __future__ import annotations

import random
from itertools import combinations, product
from math import gcd, lcm

from igl.abelian import (AmalgamPart, FgGroup, FgHom, direct_sum,
                         ds_inclusion, ds_projection, factor_through,
                         sub_quotient_sequence)
from igl.matrices import IntMatrix, hstack
from igl.prufer import PrimeNode, SpecTree
from igl.scattered import Ordinal
from igl.valgroup import ValueTower


# ---------------------------------------------------------------------------
# gcd-of-minors invariant factors
# ---------------------------------------------------------------------------

def cofactor_det(rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, head in enumerate(rows[0]):
        if head == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * head * cofactor_det(minor)
    return total


def minors_invariant_factors(m: IntMatrix) -> tuple[int, ...]:
    """Invariant factors as successive quotients of the gcds of k x k
    minors (the determinantal-divisor characterization)."""
    r, c = m.rows, m.cols
    out = []
    d_prev = 1
    for k in range(1, min(r, c) + 1):
        d_k = 0
        for rows_idx in combinations(range(r), k):
            for cols_idx in combinations(range(c), k):
                sub = [[m.entries[i][j] for j in cols_idx] for i in rows_idx]
                d_k = gcd(d_k, cofactor_det(sub))
                if d_k == d_prev:
                    break
            if d_k == d_prev:
                break
        if d_k == 0:
            out.extend([0] * (min(r, c) - k + 1))
            break
        out.append(d_k // d_prev)
        d_prev = d_k
    return tuple(out)


# ---------------------------------------------------------------------------
# Brute-force divisible elements
# ---------------------------------------------------------------------------

def divisible_elements_brute(torsion_factors: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All elements of ``⊕ Z/d`` divisible by every n up to the exponent,
    by exhaustive search over candidates and cofactors."""
    if not torsion_factors:
        return [()]
    exp = lcm(*torsion_factors)
    everyone = list(product(*[range(d) for d in torsion_factors]))
    out = []
    for x in everyone:
        ok = True
        for n in range(1, exp + 1):
            if not any(all((n * h[i] - x[i]) % torsion_factors[i] == 0
                           for i in range(len(x))) for h in everyone):
                ok = False
                break
        if ok:
            out.append(x)
    return sorted(out)


# ---------------------------------------------------------------------------
# Random exact ladders for the snake lemma
# ---------------------------------------------------------------------------

def random_matrix(rng: random.Random, rows: int, cols: int, bound: int) -> IntMatrix:
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)],
        cols=cols)


def random_row(rng: random.Random, n: int):
    """An exact sequence 0 -> L/rel -> Z^n/rel -> Z^n/L -> 0 built from a
    random relation lattice and a random larger lattice."""
    rel = random_matrix(rng, n, rng.randint(0, 2), 3)
    extra = random_matrix(rng, n, rng.randint(1, 2), 3)
    sub_gens = hstack(rel, extra) if rel.cols else extra
    mid = FgGroup(n, rel)
    return sub_quotient_sequence(mid, sub_gens), mid, sub_gens


def random_snake_input(rng: random.Random):
    n1 = rng.randint(1, 3)
    n2 = rng.randint(1, 3)
    rel1 = random_matrix(rng, n1, rng.randint(0, 2), 3)
    extra1 = random_matrix(rng, n1, rng.randint(1, 2), 3)
    sub1 = hstack(rel1, extra1) if rel1.cols else extra1
    b1 = FgGroup(n1, rel1)
    top = sub_quotient_sequence(b1, sub1)

    mg = random_matrix(rng, n2, n1, 2)
    rel2_rand = random_matrix(rng, n2, rng.randint(0, 2), 3)
    mapped_rel = mg @ rel1 if rel1.cols else IntMatrix.zeros(n2, 0)
    rel2 = hstack(rel2_rand, mapped_rel) if rel2_rand.cols or mapped_rel.cols \
        else IntMatrix.zeros(n2, 0)
    b2 = FgGroup(n2, rel2)
    extra2 = random_matrix(rng, n2, rng.randint(0, 1), 3)
    parts2 = [m for m in (rel2, mg @ sub1, extra2) if m.cols]
    sub2 = hstack(*parts2) if parts2 else IntMatrix.zeros(n2, 0)
    # the bottom sub-lattice must be a genuine lattice: ensure at least one column
    if sub2.cols == 0:
        sub2 = random_matrix(rng, n2, 1, 3)
    bottom = sub_quotient_sequence(b2, sub2)

    g = FgHom(b1, b2, mg)
    f = factor_through(top.inj.then(g), bottom.inj)
    h = FgHom(top.right, bottom.right, mg)
    return top, bottom, f, g, h


# ---------------------------------------------------------------------------
# Random certified amalgam parts
# ---------------------------------------------------------------------------

def random_invariants(rng: random.Random, max_rank: int = 3,
                      max_order: int = 6) -> tuple[int, ...]:
    out = []
    for _ in range(rng.randint(0, max_rank)):
        out.append(rng.choice([0, 0] + list(range(2, max_order + 1))))
    return tuple(out)


def random_unimodular_with_inverse(rng: random.Random, n: int,
                                   steps: int = 4) -> tuple[IntMatrix, IntMatrix]:
    w = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    winv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        # w <- E w  (row op), winv <- winv E^{-1} (column op)
        for t in range(n):
            w[i][t] += c * w[j][t]
        for t in range(n):
            winv[t][j] -= c * winv[t][i]
    return (IntMatrix.from_rows(w, cols=n), IntMatrix.from_rows(winv, cols=n))


def random_amalgam_instance(rng: random.Random, n_parts: int):
    g = FgGroup.from_invariants(*random_invariants(rng))
    parts = []
    expected = []
    for _ in range(n_parts):
        b = FgGroup.from_invariants(*random_invariants(rng))
        expected.append(b)
        pair = [b, g]
        a0 = direct_sum(pair)
        emb0 = ds_inclusion(pair, 1)
        proj0 = ds_projection(pair, 0)
        ret0 = ds_projection(pair, 1)
        w, winv = random_unimodular_with_inverse(rng, a0.generators)
        a = FgGroup(a0.generators, w @ a0.relations)
        parts.append(AmalgamPart(
            group=a,
            emb=FgHom(g, a, w @ emb0.matrix),
            complement=b,
            proj=FgHom(a, b, proj0.matrix @ winv),
            retract=FgHom(a, g, ret0.matrix @ winv)))
    expected.extend([g] * (n_parts - 1))
    return g, parts, direct_sum(expected)


# ---------------------------------------------------------------------------
# Random and exhaustive spectral trees
# ---------------------------------------------------------------------------

def random_tree(rng: random.Random, max_depth: int = 4, max_nodes: int = 12,
                q_prob: float = 0.0, multi_slot_prob: float = 0.2) -> SpecTree:
    counter = [0]
    budget = [rng.randint(2, max_nodes)]

    def label() -> ValueTower:
        n_slots = 2 if rng.random() < multi_slot_prob else 1
        names = ["Q" if rng.random() < q_prob else "Z" for _ in range(n_slots)]
        return ValueTower.from_names(names)

    def grow(depth: int) -> PrimeNode:
        counter[0] += 1
        budget[0] -= 1
        my_id = f"n{counter[0]}"
        children = []
        if depth < max_depth:
            want = rng.choice([0, 0, 1, 1, 2, 3])
            for _ in range(want):
                if budget[0] <= 0:
                    break
                children.append(grow(depth + 1))
        return PrimeNode(my_id, label(), tuple(children))

    kids = []
    for _ in range(rng.randint(1, 3)):
        if budget[0] <= 0:
            break
        kids.append(grow(1))
    if not kids:
        kids = [grow(1)]
    return SpecTree(PrimeNode("0", None, tuple(kids)))


def permuted_tree(rng: random.Random, tree: SpecTree) -> SpecTree:
    def shuffle(node: PrimeNode) -> PrimeNode:
        kids = [shuffle(c) for c in node.children]
        rng.shuffle(kids)
        return PrimeNode(node.node_id, node.label, tuple(kids), node.branched)
    return SpecTree(shuffle(tree.root), locally_finite=tree.locally_finite)


def all_parent_vectors(n: int):
    """Every rooted tree on nodes 0..n-1 (0 the root) as a parent vector."""
    if n == 1:
        yield []
        return
    for parents in product(*[range(i) for i in range(1, n)]):
        yield list(parents)


def tree_from_parents(parents: list[int]) -> SpecTree:
    n = len(parents) + 1
    children: dict[int, list[int]] = {i: [] for i in range(n)}
    for child, parent in enumerate(parents, start=1):
        children[parent].append(child)
    z = ValueTower.from_names(["Z"])

    def build(i: int) -> PrimeNode:
        return PrimeNode(str(i), None if i == 0 else z,
                         tuple(build(c) for c in children[i]))

    return SpecTree(build(0))


def tree_rank_oracle(tree: SpecTree) -> int:
    """Total free rank of the invertible group of an all-Z tree, by direct
    structural recursion: each edge contributes its slot count."""
    def rec(node: PrimeNode) -> int:
        total = 0
        for c in node.children:
            total += len(c.label) + rec(c)
        return total
    return rec(tree.root)


# ---------------------------------------------------------------------------
# Brute-force derived-set bounds
# ---------------------------------------------------------------------------

def ordinal_grid(max_exp: int, max_coeff: int):
    """All normal forms with exponents <= max_exp and coefficients
    <= max_coeff (possibly absent)."""
    out = []
    choices = [range(0, max_coeff + 1) for _ in range(max_exp + 1)]
    for coeffs in product(*choices):
        terms = tuple((e, c) for e, c in zip(range(max_exp, -1, -1), coeffs) if c)
        out.append(Ordinal(terms))
    return out


def derived_bound_oracle(bound: Ordinal) -> Ordinal | None:
    """The bound of the derived interval, via the characterization of the
    limit points of [0, a] as the multiples of w in the interval: search
    the largest b with w*b <= a over a grid that surely contains it."""
    max_exp = bound.leading_exponent()
    max_coeff = max((c for _, c in bound.terms), default=0)
    best = Ordinal.zero()
    for cand in ordinal_grid(max_exp, max_coeff):
        if cand.times_omega() <= bound and best < cand:
            best = cand
    if best.is_zero():
        return None
    if best.is_finite():
        return Ordinal.from_int(best.as_int() - 1)
    return best
