"""Finite spectral trees of semilocal Prüfer-type domains.

The prime spectrum of the modeled domain is a finite rooted tree: the
root is the zero ideal, leaves are exactly the maximal ideals, and every
edge carries a nonempty value-tower segment -- the value group of the
step between the prime and its parent.  Only branched, explicitly
represented primes appear as nodes; inputs about unbranched primes route
to ``Unknown``.

The decision procedures follow a cut-and-sum recursion:

* several dependency classes under the root decompose the group of
  invertible ideals into a direct sum over the classes;
* a single class has a least prime ``P`` below every maximal ideal
  ("divided"), which splits off the value group of the localization at
  ``P``: the group decomposes as the quotient tree's group plus that
  tower;
* base cases are fields (trivial group) and chains (valuation rings,
  whose invertible ideals form the value group itself).

Every divided cut emits its split sequence so that callers can replay it
through the exact engine on finitely generated stand-ins.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import SchemaError
from .valgroup import (CertStep, Certificate, GroupExpr, IntegersZ, R, TRIVIAL,
                       UNKNOWN, ValueTower, Verdict, direct_sum,
                       freeness_verdict, render_expr)


@dataclass(frozen=True)
class PrimeNode:
    """A prime ideal in the tree; the root (zero ideal) has no edge label."""

    node_id: str
    label: ValueTower | None
    children: tuple["PrimeNode", ...] = ()
    branched: bool = True

    @property
    def is_maximal(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class SpecTree:
    root: PrimeNode
    locally_finite: bool = True

    def __post_init__(self) -> None:
        if self.root.label is not None:
            raise SchemaError("the root (zero ideal) carries no edge label")
        seen: set[str] = set()
        for node in self.nodes():
            if node.node_id in seen:
                raise SchemaError(f"duplicate node id {node.node_id!r}")
            seen.add(node.node_id)
            if node is not self.root and (node.label is None or len(node.label) == 0):
                raise SchemaError(f"node {node.node_id!r} needs a nonempty edge label")

    def nodes(self) -> list[PrimeNode]:
        out: list[PrimeNode] = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(n.children))
        return out

    def leaves(self) -> list[PrimeNode]:
        """The maximal ideals: leaf nodes other than a bare root."""
        return [n for n in self.nodes() if n.is_maximal and n is not self.root]

    def node(self, node_id: str) -> PrimeNode:
        for n in self.nodes():
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    @cached_property
    def parents(self) -> dict[str, PrimeNode | None]:
        out: dict[str, PrimeNode | None] = {self.root.node_id: None}
        for n in self.nodes():
            for c in n.children:
                out[c.node_id] = n
        return out

    @property
    def dimension(self) -> int:
        def depth(n: PrimeNode) -> int:
            return 1 + max((depth(c) for c in n.children), default=-1)
        return depth(self.root)

    def edge_count(self) -> int:
        return len(self.nodes()) - 1

    def total_slots(self) -> int:
        return sum(len(n.label) for n in self.nodes() if n.label is not None)

    def is_chain(self) -> bool:
        node = self.root
        while node.children:
            if len(node.children) > 1:
                return False
            node = node.children[0]
        return True

    def all_slots_z(self) -> bool:
        return all(n.label.all_slots_z() for n in self.nodes() if n.label is not None)


def tree_from_payload(payload: dict, locally_finite: bool = True) -> SpecTree:
    """Build a tree from the nested instance format
    ``{id, label: [slot,...], children: [...]}`` (root label omitted)."""

    def build(rec: dict, is_root: bool) -> PrimeNode:
        if not isinstance(rec, dict):
            raise SchemaError("tree nodes must be objects")
        if "id" not in rec:
            raise SchemaError("tree node missing 'id'")
        label = None
        if not is_root:
            raw = rec.get("label")
            if not isinstance(raw, list) or not raw:
                raise SchemaError(f"node {rec['id']!r}: 'label' must be a nonempty list of slots")
            label = ValueTower.from_names(raw)
        children = tuple(build(c, False) for c in rec.get("children", []))
        return PrimeNode(str(rec["id"]), label, children,
                         branched=bool(rec.get("branched", True)))

    return SpecTree(build(payload, True), locally_finite=locally_finite)


# ---------------------------------------------------------------------------
# Tree geometry
# ---------------------------------------------------------------------------

def gamma_at(tree: SpecTree, node: PrimeNode | str) -> ValueTower:
    """The value group of the localization at a prime: the edge labels
    concatenated from the prime up to the root, the prime's own step on
    top.  The root has the trivial value group."""
    if isinstance(node, str):
        node = tree.node(node)
    slots: list = []
    branched: list[bool] = []
    cur: PrimeNode | None = node
    while cur is not None and cur.label is not None:
        slots.extend(cur.label.slots)
        branched.extend(cur.label.branched)
        cur = tree.parents[cur.node_id]
    return ValueTower(tuple(slots), tuple(branched))


def finitely_generated_maximal(tree: SpecTree, leaf: PrimeNode | str) -> bool:
    """Is the maximal ideal finitely generated?  Detected structurally: the
    top slot of its composed value tower is discrete."""
    if isinstance(leaf, str):
        leaf = tree.node(leaf)
    if not leaf.is_maximal or leaf is tree.root:
        raise SchemaError(f"{leaf.node_id!r} is not a maximal ideal")
    return isinstance(gamma_at(tree, leaf).slots[0], IntegersZ)


def branching_points(tree: SpecTree) -> list[PrimeNode]:
    """Non-maximal primes equal to the infimum of the maximal ideals above
    them.  In a finite tree these are exactly the internal nodes with at
    least two children (every subtree contains a leaf), the root included
    when it branches."""
    return [n for n in tree.nodes() if not n.is_maximal and len(n.children) >= 2]


def contracted_spectrum(tree: SpecTree) -> SpecTree:
    """The contraction to root, maximal ideals and branching points, with
    edge labels composed along the contracted paths.  For a finite tree
    the result is finite by construction."""
    keep = {tree.root.node_id} | {n.node_id for n in tree.leaves()} \
        | {n.node_id for n in branching_points(tree)}

    def contract(node: PrimeNode) -> PrimeNode:
        new_children = []
        for child in node.children:
            hop = child
            tower = hop.label
            while hop.node_id not in keep:
                # a skipped node has exactly one child (not a leaf, not branching)
                nxt = hop.children[0]
                tower = nxt.label.concat(tower)
                hop = nxt
            sub = contract(hop)
            new_children.append(PrimeNode(sub.node_id, tower, sub.children, sub.branched))
        return PrimeNode(node.node_id, None if node is tree.root else node.label,
                         tuple(new_children), node.branched)

    return SpecTree(contract(tree.root), locally_finite=tree.locally_finite)


def standard_decomposition(tree: SpecTree) -> list[SpecTree]:
    """One subtree per dependency class of maximal ideals: two maximal
    ideals are dependent when their root paths share a nonzero prime,
    i.e. when they lie in the same child subtree of the root.  Each class
    is re-rooted at a fresh zero ideal.  A finite family like this is
    always complete, independent and locally finite."""
    out = []
    for child in tree.root.children:
        fresh_root = PrimeNode(tree.root.node_id, None, (child,))
        out.append(SpecTree(fresh_root, locally_finite=tree.locally_finite))
    return out


def _quotient_tree(tree: SpecTree, p: PrimeNode) -> SpecTree:
    """The spectrum of the quotient modulo a divided prime: the subtree at
    ``p`` re-rooted, dropping ``p``'s own edge label."""
    return SpecTree(PrimeNode(p.node_id, None, p.children, p.branched),
                    locally_finite=tree.locally_finite)


# ---------------------------------------------------------------------------
# Invertible-ideal decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DividedCut:
    """One emitted split sequence
    ``0 → (quotient group) → (total group) → (tower of the cut prime) → 0``."""

    prime_id: str
    quotient_expr: GroupExpr
    step_expr: GroupExpr
    total_expr: GroupExpr


@dataclass(frozen=True)
class InvDecision:
    verdict: Verdict
    expr: GroupExpr
    certificate: Certificate
    cuts: tuple[DividedCut, ...] = ()
    leaf_verdicts: tuple[tuple[str, Verdict], ...] = ()


def _internal_gate(tree: SpecTree) -> tuple[bool, Certificate]:
    """Check that every non-maximal, non-root node of the contraction has
    a free value group; this is the hypothesis of both cut recursions."""
    hi = contracted_spectrum(tree)
    for node in hi.nodes():
        if node is hi.root or node.is_maximal:
            continue
        fv = freeness_verdict(gamma_at(tree, tree.node(node.node_id)).to_expr())
        if fv.verdict is not Verdict.FREE:
            return False, (
                CertStep.make("internal-gamma-not-free",
                              "the recursion requires a free value group at every "
                              "internal contraction node; the hypothesis fails here",
                              prime=node.node_id,
                              verdict=fv.verdict.value),)
    return True, ()


def _decompose(tree: SpecTree) -> tuple[GroupExpr, list[CertStep], list[DividedCut]]:
    root = tree.root
    if not root.children:
        return TRIVIAL, [CertStep.make(
            "field-trivial", "a field has trivial ideal groups")], []
    classes = standard_decomposition(tree)
    if len(classes) > 1:
        exprs, steps, cuts = [], [], []
        steps.append(CertStep.make(
            "class-sum",
            "dependency classes of maximal ideals are complete, independent "
            "and locally finite, so the invertible group is the direct sum "
            "over the classes",
            classes=len(classes)))
        for sub in classes:
            e, st, cu = _decompose(sub)
            exprs.append(e)
            steps.extend(st)
            cuts.extend(cu)
        return direct_sum(*exprs), steps, cuts
    if tree.is_chain():
        leaf = tree.leaves()[0]
        tower = gamma_at(tree, leaf)
        return tower.to_expr(), [CertStep.make(
            "valuation-inv-iso",
            "every invertible ideal of a valuation ring is principal, and "
            "principal ideals correspond to values: the invertible group is "
            "the value group",
            maximal=leaf.node_id, value_group=render_expr(tower.to_expr()))], []
    # single class, not a chain: walk down the unique-child spine to the
    # infimum of the maximal ideals, a divided prime
    node = root
    while len(node.children) == 1:
        node = node.children[0]
    p = node
    tower = gamma_at(tree, p)
    quotient = _quotient_tree(tree, p)
    q_expr, q_steps, q_cuts = _decompose(quotient)
    total = direct_sum(q_expr, tower.to_expr())
    cut = DividedCut(p.node_id, q_expr, tower.to_expr(), total)
    step = CertStep.make(
        "divided-cut",
        "the infimum of the maximal ideals is a divided prime; its free "
        "value group splits off: the invertible group is the quotient "
        "domain's group plus that value group",
        prime=p.node_id, value_group=render_expr(tower.to_expr()))
    return total, [step] + q_steps, [cut] + q_cuts


def decide_inv_free(tree: SpecTree) -> InvDecision:
    """Decide freeness of the group of invertible ideals of the modeled
    domain, with a certificate and the emitted cut sequences.

    Under the internal-gamma hypothesis the decision reduces to the
    leaves: the group is free exactly when every maximal ideal's value
    group is free."""
    ok, gate_cert = _internal_gate(tree)
    if not ok:
        return InvDecision(Verdict.UNKNOWN, UNKNOWN, gate_cert)
    leaf_fv = [(leaf.node_id, freeness_verdict(gamma_at(tree, leaf).to_expr()))
               for leaf in tree.leaves()]
    expr, steps, cuts = _decompose(tree)
    bad = [(lid, fv) for lid, fv in leaf_fv if fv.verdict is Verdict.NOT_FREE]
    unknown = [(lid, fv) for lid, fv in leaf_fv if fv.verdict is Verdict.UNKNOWN]
    if bad:
        lid, fv = bad[0]
        steps = steps + [CertStep.make(
            "leaf-gamma-not-free",
            "the decomposition shows the invertible group is free exactly "
            "when all maximal value groups are; this one is not",
            maximal=lid)] + list(fv.trace)
        verdict = Verdict.NOT_FREE
    elif unknown:
        lid, _ = unknown[0]
        steps = steps + [CertStep.make(
            "leaf-gamma-unknown",
            "a maximal ideal's value group could not be classified; "
            "no verdict follows", maximal=lid)]
        verdict = Verdict.UNKNOWN
    else:
        steps = steps + [CertStep.make(
            "all-leaf-gammas-free",
            "every maximal ideal's value group is free, so the decomposition "
            "exhibits the invertible group as a direct sum of free groups",
            leaves=len(leaf_fv))]
        verdict = Verdict.FREE
    return InvDecision(verdict, expr, tuple(steps), tuple(cuts),
                       tuple((lid, fv.verdict) for lid, fv in leaf_fv))


# ---------------------------------------------------------------------------
# Divisorial-ideal decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivDecision:
    verdict: Verdict
    certificate: Certificate
    witness_leaf: str | None = None


def decide_div_free(tree: SpecTree) -> DivDecision:
    """Decide freeness of the group of divisorial ideals.

    Requires every maximal ideal branched and the internal-gamma
    hypothesis; then the group is free exactly when every maximal ideal
    is finitely generated, detected as a discrete (Z) top slot of the
    composed tower.  A non-discrete top slot picks up a real summand in
    the corresponding valuation ring and is returned as the witness."""
    if not tree.root.children:
        return DivDecision(Verdict.FREE, (
            CertStep.make("field-trivial", "a field has trivial ideal groups"),))
    unbranched = [l.node_id for l in tree.leaves() if not l.branched]
    if unbranched:
        return DivDecision(Verdict.UNKNOWN, (
            CertStep.make("unbranched-maximal",
                          "the divisorial recursion handles only branched maximal "
                          "ideals; no verdict for this input",
                          maximal=unbranched[0]),))
    ok, gate_cert = _internal_gate(tree)
    if not ok:
        return DivDecision(Verdict.UNKNOWN, gate_cert)
    steps: list[CertStep] = []
    for leaf in tree.leaves():
        tower = gamma_at(tree, leaf)
        if not finitely_generated_maximal(tree, leaf):
            below = tower.root_segment(1).to_expr()
            witness_expr = direct_sum(R, below)
            return DivDecision(Verdict.NOT_FREE, tuple(steps) + (
                CertStep.make("nonprincipal-maximal-div",
                              "this maximal ideal is not finitely generated "
                              "(non-discrete top slot); its local divisorial group "
                              "is R plus the value group one step down, hence not "
                              "free, and the recursion propagates that",
                              maximal=leaf.node_id,
                              local_div=render_expr(witness_expr)),),
                witness_leaf=leaf.node_id)
    steps.append(CertStep.make(
        "all-maximals-finitely-generated",
        "every maximal ideal has a discrete top slot, so it is finitely "
        "generated and each local divisorial group equals the (free) value "
        "group; the cut-and-sum recursion makes the whole group free",
        leaves=len(tree.leaves())))
    return DivDecision(Verdict.FREE, tuple(steps))


# ---------------------------------------------------------------------------
# Strongly discrete trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SDDecision:
    verdict: Verdict
    certificate: Certificate


def strongly_discrete_decide(tree: SpecTree, codim_finite: bool) -> SDDecision:
    """Freeness for strongly discrete trees (every slot discrete, i.e. no
    idempotent primes).

    ``codim_finite`` declares that only finitely many primes fail to have
    maximal height.  With that flag, or with local finiteness, the answer
    is ``Free``; otherwise the question is open and the verdict stays
    ``Unknown`` -- this procedure never answers ``NotFree``."""
    if not tree.all_slots_z():
        return SDDecision(Verdict.UNKNOWN, (
            CertStep.make("not-strongly-discrete",
                          "a non-discrete slot means an idempotent prime; the "
                          "strongly discrete rule does not apply"),))
    if codim_finite:
        return SDDecision(Verdict.FREE, (
            CertStep.make("strongly-discrete-finite-codim",
                          "with only finitely many primes below maximal height, "
                          "induction over divided cuts of discrete steps keeps "
                          "every piece free"),))
    if tree.locally_finite:
        return SDDecision(Verdict.FREE, (
            CertStep.make("strongly-discrete-locally-finite",
                          "a locally finite strongly discrete domain has free "
                          "invertible group: every chain of discrete steps is a "
                          "free tower and the family is locally finite"),))
    return SDDecision(Verdict.UNKNOWN, (
        CertStep.make("strongly-discrete-open",
                      "whether every strongly discrete domain of this kind has a "
                      "free invertible group is an open conjecture; no verdict"),))
