"""Freeness of ideal groups of one-dimensional local Noetherian domains
from conductor and residue-field data.

The input is not a ring but its arithmetic shadow: the residue field
``k``, the maximal ideals of the integral closure with their conductor
exponents ``(L_1, e_1), ..., (L_n, e_n)``, and two flags (integrally
closed; conductor nonzero).  Residue fields are either honest finite
fields, whose unit groups are computed, or opaque labels carrying
declared unit-group properties that are echoed into certificates.

The decision runs through the three conductor cases:

* some exponent exceeds one (non-radical conductor): never free -- the
  unit quotient contains a nonzero quotient of a residue-field vector
  space, and the additive group of a field has no free quotients;
* one branch with exponent one: free exactly when ``U(L_1)/U(k)`` is;
* several branches, all exponents one: free exactly when every ``U(L_i)``
  is free with ``U(k)`` a direct summand -- and a residue characteristic
  other than 2 already rules freeness out, since ``-1`` is torsion.

Krull-type inputs (integrally closed and beyond) short-circuit: their
divisorial, invertible and principal groups are free on the height-one
primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import abelian
from .errors import PreconditionError, SchemaError
from .valgroup import (CertStep, Certificate, Cyclic, GroupExpr, Opaque,
                       Repeated, TRIVIAL, Verdict, direct_sum, normalize)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FiniteField:
    """The field with ``p^r`` elements; its unit group is cyclic of order
    ``p^r - 1`` and is computed, never declared."""

    p: int
    r: int = 1

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise SchemaError(f"{self.p} is not prime")
        if self.r < 1:
            raise SchemaError("field degree must be >= 1")

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def order(self) -> int:
        return self.p ** self.r

    @property
    def unit_order(self) -> int:
        return self.order - 1

    @property
    def label(self) -> str:
        return f"F{self.order}"


@dataclass(frozen=True)
class OpaqueField:
    """A field known only through declarations.

    ``unit_free`` declares whether the unit group is free;
    ``quotient_free`` whether ``U(self)/U(base)`` is free for the
    instance's base field; ``summand`` whether the base's unit group sits
    as a direct summand.  Unset declarations leave verdicts ``Unknown``.
    """

    label: str
    characteristic: int = 0
    unit_free: bool | None = None
    quotient_free: bool | None = None
    summand: bool | None = None

    def __post_init__(self) -> None:
        if self.characteristic != 0 and not _is_prime(self.characteristic):
            raise SchemaError("characteristic must be 0 or a prime")


FieldDesc = FiniteField | OpaqueField


def unit_group(f: FieldDesc) -> GroupExpr:
    """The unit group of a field description as a symbolic group.

    Finite fields give explicit cyclic groups.  Opaque fields give an
    opaque atom; in characteristic other than 2 the element ``-1`` is
    torsion, which the atom records, so the freeness verdict is NotFree
    without further declarations.
    """
    if isinstance(f, FiniteField):
        return normalize(Cyclic(f.unit_order)) if f.unit_order > 1 else TRIVIAL
    torsionfree = False if f.characteristic != 2 else None
    return Opaque(f"U({f.label})", is_free=f.unit_free, is_torsionfree=torsionfree)


@dataclass(frozen=True)
class Branch:
    field: FieldDesc
    e: int

    def __post_init__(self) -> None:
        if self.e < 1:
            raise SchemaError("conductor exponents must be >= 1")


@dataclass(frozen=True)
class NoethInstance:
    """Conductor data of a one-dimensional local Noetherian domain with
    reduced completion (nonzero conductor)."""

    residue: FieldDesc
    branches: tuple[Branch, ...]
    integrally_closed: bool = False
    conductor_nonzero: bool = True
    local: bool = True

    def __post_init__(self) -> None:
        if not self.branches:
            raise SchemaError("at least one branch is required")
        chars = {self.residue.characteristic} | {b.field.characteristic for b in self.branches}
        if len(chars) > 1:
            raise SchemaError("residue fields of an extension share their characteristic")
        for b in self.branches:
            if isinstance(self.residue, FiniteField) and isinstance(b.field, FiniteField):
                if b.field.p != self.residue.p or b.field.r % self.residue.r != 0:
                    raise SchemaError(
                        f"{self.residue.label} does not embed into {b.field.label}")

    @property
    def characteristic(self) -> int:
        return self.residue.characteristic

    def case(self) -> str:
        if self.integrally_closed:
            return "integrally-closed"
        if any(b.e > 1 for b in self.branches):
            return "a"
        return "b" if len(self.branches) == 1 else "c"


# ---------------------------------------------------------------------------
# Per-branch unit-group facts
# ---------------------------------------------------------------------------

def _quotient_free(k: FieldDesc, L: FieldDesc) -> tuple[bool | None, str]:
    """Is ``U(L)/U(k)`` free?  Computed for finite fields, declared for
    opaque ones."""
    if isinstance(k, FiniteField) and isinstance(L, FiniteField):
        quot = L.unit_order // k.unit_order
        return quot == 1, (f"U({L.label})/U({k.label}) is cyclic of order {quot}; "
                           "a finite group is free only when trivial")
    if isinstance(L, OpaqueField) and L.quotient_free is not None:
        return L.quotient_free, f"declared: U({L.label})/U(k) free={L.quotient_free}"
    return None, "no declaration for the unit quotient; verdict stays open"


def _unit_free(f: FieldDesc) -> tuple[bool | None, str]:
    if isinstance(f, FiniteField):
        free = f.unit_order == 1
        return free, f"U({f.label}) is cyclic of order {f.unit_order}"
    if f.characteristic != 2:
        return False, f"characteristic {f.characteristic or 0} != 2: -1 is torsion in U({f.label})"
    if f.unit_free is not None:
        return f.unit_free, f"declared: U({f.label}) free={f.unit_free}"
    return None, f"no declaration for U({f.label})"


def _summand(k: FieldDesc, L: FieldDesc) -> tuple[bool | None, str]:
    if isinstance(k, FiniteField) and isinstance(L, FiniteField):
        m, n = k.unit_order, L.unit_order
        if n == 1:
            return True, "trivial unit group is a summand of itself"
        ok = gcd(m, n // m) == 1
        return ok, (f"cyclic orders {m} | {n}: a summand exists iff "
                    f"gcd({m}, {n // m}) = 1")
    if isinstance(L, OpaqueField) and L.summand is not None:
        return L.summand, f"declared: U(k) summand of U({L.label})={L.summand}"
    return None, f"no summand declaration for U({L.label})"


# ---------------------------------------------------------------------------
# The main decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoethDecision:
    verdict: Verdict
    certificate: Certificate
    case: str
    target_group: str  # "Inv" for local instances, "Princ" otherwise


def decide_noeth(inst: NoethInstance) -> NoethDecision:
    """Decide freeness of the invertible-ideal group (principal-ideal
    group when the instance is not local) from conductor data."""
    if not inst.conductor_nonzero:
        raise PreconditionError(
            "zero conductor (analytically ramified): outside this decision's hypotheses")
    target = "Inv" if inst.local else "Princ"
    steps: list[CertStep] = []
    if not inst.local:
        steps.append(CertStep.make(
            "nonlocal-scope",
            "for a non-local ring only the principal-ideal group inherits the "
            "unit-quotient verdict; the invertible group may differ"))
    case = inst.case()

    if case == "integrally-closed":
        kr = krull_verdict("krull")
        steps.append(CertStep.make(
            "integrally-closed",
            "an integrally closed one-dimensional local Noetherian domain is a "
            "discrete valuation ring, hence Krull; all its ideal groups are free"))
        return NoethDecision(Verdict.FREE, tuple(steps) + kr.certificate, case, target)

    if case == "a":
        exps = [b.e for b in inst.branches]
        steps.append(CertStep.make(
            "conductor-not-radical",
            "a repeated conductor factor makes the unit quotient contain a "
            "nonzero quotient of a residue-field vector space; the additive "
            "group of a field has no nonzero free quotients, so the group "
            "is not free",
            exponents=exps))
        return NoethDecision(Verdict.NOT_FREE, tuple(steps), case, target)

    if case == "b":
        L = inst.branches[0].field
        free, why = _quotient_free(inst.residue, L)
        steps.append(CertStep.make(
            "conductor-maximal",
            "with a radical conductor that is the closure's only maximal "
            "ideal, the group is free exactly when the residue unit quotient "
            "U(L)/U(k) is free",
            detail=why))
        if free is True:
            return NoethDecision(Verdict.FREE, tuple(steps), case, target)
        if free is False:
            return NoethDecision(Verdict.NOT_FREE, tuple(steps), case, target)
        return NoethDecision(Verdict.UNKNOWN, tuple(steps), case, target)

    # case "c": several branches, radical conductor
    if inst.characteristic != 2:
        steps.append(CertStep.make(
            "residue-char-not-two",
            "with several branches, freeness forces every residue unit group "
            "to be free, hence the residue characteristic to be 2; here it "
            "is not",
            characteristic=inst.characteristic))
        return NoethDecision(Verdict.NOT_FREE, tuple(steps), case, target)
    verdicts: list[bool | None] = []
    for i, b in enumerate(inst.branches):
        uf, why_u = _unit_free(b.field)
        sm, why_s = _summand(inst.residue, b.field)
        steps.append(CertStep.make(
            "branch-units",
            "the group is free exactly when every branch has a free unit "
            "group containing the residue units as a direct summand",
            branch=i, unit_free=why_u, summand=why_s))
        if uf is False or sm is False:
            verdicts.append(False)
        elif uf is True and sm is True:
            verdicts.append(True)
        else:
            verdicts.append(None)
    if any(v is False for v in verdicts):
        return NoethDecision(Verdict.NOT_FREE, tuple(steps), case, target)
    if all(v is True for v in verdicts):
        return NoethDecision(Verdict.FREE, tuple(steps), case, target)
    return NoethDecision(Verdict.UNKNOWN, tuple(steps), case, target)


# ---------------------------------------------------------------------------
# The symbolic unit-quotient sequence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicSeq:
    """``0 → left → (principal group) → right → 0`` with the split
    decomposition of the middle term; ``right`` is free (the closure is
    Krull), so the sequence always splits."""

    left: GroupExpr
    right: GroupExpr
    decomposition: GroupExpr
    case: str
    certificate: Certificate


def unit_quotient_seq(inst: NoethInstance) -> SymbolicSeq:
    """The split sequence expressing the principal-ideal group as the
    closure's principal group plus the unit quotient, with the quotient
    rewritten modulo the conductor and, for several branches, expanded
    through the amalgamated-quotient isomorphism.  Finite-field instances
    are computed exactly through the integer engine."""
    if not inst.conductor_nonzero:
        raise PreconditionError(
            "zero conductor (analytically ramified): outside this decision's hypotheses")
    princ_bar = Opaque("Princ(closure)", is_free=True)
    case = inst.case()
    steps = [CertStep.make(
        "units-modulo-conductor",
        "the conductor is a common ideal inside both Jacobson radicals, so "
        "the unit quotient of the extension equals the unit quotient of the "
        "Artinian quotients modulo the conductor"),
        CertStep.make(
        "free-quotient-split",
        "the closure is Krull, its principal group is free, and a sequence "
        "onto a free group splits")]

    if case == "integrally-closed":
        left: GroupExpr = TRIVIAL
        steps.insert(0, CertStep.make(
            "integrally-closed", "the domain equals its closure; the unit quotient is trivial"))
    elif case == "a":
        char = inst.characteristic
        left = Opaque("U(closure)/U(D) [non-radical conductor]",
                      is_free=False,
                      is_torsionfree=False if char > 0 else None,
                      has_divisible=True if char == 0 else None)
        steps.insert(0, CertStep.make(
            "conductor-not-radical",
            "the unit quotient contains a nonzero quotient of a residue-field "
            "vector space and cannot be free"))
    elif case == "b":
        k, L = inst.residue, inst.branches[0].field
        if isinstance(k, FiniteField) and isinstance(L, FiniteField):
            left = normalize(Cyclic(L.unit_order // k.unit_order))
        else:
            qf = L.quotient_free if isinstance(L, OpaqueField) else None
            left = Opaque(f"U({L.label})/U({k.label})", is_free=qf)
        steps.insert(0, CertStep.make(
            "conductor-maximal",
            "one branch: the unit quotient is the residue unit quotient"))
    else:  # case "c"
        k = inst.residue
        if isinstance(k, FiniteField) and all(isinstance(b.field, FiniteField)
                                              for b in inst.branches):
            orders = [b.field.unit_order for b in inst.branches]
            m = k.unit_order
            summands = [abelian.FgGroup.cyclic(n) for n in orders]
            base = abelian.FgGroup.cyclic(m)
            total = abelian.direct_sum(summands)
            # the diagonal embedding of a cyclic group of order m into each
            # cyclic factor of order n sends the generator to (n/m)·generator
            diag = abelian.IntMatrix.from_rows([[n // m] for n in orders], cols=1)
            phi = abelian.FgHom(base, total, diag)
            quot = abelian.cokernel(phi)
            left = quot.to_expr()
            steps.insert(0, CertStep.make(
                "units-amalgam",
                "the unit quotient is the cokernel of the diagonal embedding "
                "of the residue units into the branch units; computed exactly",
                invariants=quot.invariant_factors))
        else:
            n = len(inst.branches)
            parts: list[GroupExpr] = []
            for b in inst.branches:
                uf = _unit_free(b.field)[0]
                parts.append(Opaque(f"U({b.field.label})/U({k.label}) complement",
                                    is_free=True if uf else None))
            parts.append(Repeated(unit_group(k), n - 1))
            left = direct_sum(*parts)
            steps.insert(0, CertStep.make(
                "units-amalgam",
                "the diagonal unit embedding quotient decomposes as the "
                "complements of the residue units in each branch plus "
                "copies of the residue units",
                copies=n - 1))
    decomposition = direct_sum(princ_bar, left)
    return SymbolicSeq(left, princ_bar, decomposition, case, tuple(steps))


# ---------------------------------------------------------------------------
# Krull verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KrullReport:
    kind: str
    verdicts: tuple[tuple[str, Verdict], ...]
    basis: str
    certificate: Certificate


def krull_verdict(kind: str) -> KrullReport:
    """All three ideal groups of a Krull-type domain are free, with the
    height-one primes as a basis of the divisorial group."""
    if kind not in ("krull", "dedekind", "UFD"):
        raise SchemaError(f"unknown Krull variant {kind!r}")
    steps = [CertStep.make(
        "krull-free-basis",
        "for a Krull domain the divisorial group is free on the height-one "
        "primes; the invertible and principal groups are subgroups, and "
        "subgroups of free groups are free")]
    if kind == "dedekind":
        steps.append(CertStep.make(
            "dedekind-specialization",
            "a Dedekind domain is a one-dimensional Krull domain"))
    elif kind == "UFD":
        steps.append(CertStep.make(
            "factorial-specialization",
            "in a factorial domain every height-one prime is principal"))
    verdicts = (("Div", Verdict.FREE), ("Inv", Verdict.FREE), ("Princ", Verdict.FREE))
    return KrullReport(kind, verdicts, "height-one primes", tuple(steps))
