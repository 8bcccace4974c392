"""Symmetric-group side: conjugacy classes, fixed-point characters, the
subgroup lattice up to conjugacy, coset characters, and the constraint scan.

Everything here is desk scale (degree at most 6), so the algorithms are the
blunt exact ones: explicit element sets, explicit conjugation, explicit
fixed-point counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import MismatchError, PreconditionError, SizeLimitError
from .trees import Permutation, all_permutations, enumerate_trees, relabel

MAX_SUBGROUP_DEGREE = 6
MAX_TREE_CHARACTER_DEGREE = 5


# ---------------------------------------------------------------------------
# conjugacy classes

@dataclass(frozen=True)
class ConjugacyClass:
    partition: tuple        # cycle type, longest first, fixed points included
    representative: Permutation
    size: int
    label: str


def _partitions(n: int):
    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for head in range(min(rest, cap), 0, -1):
            for tail in rec(rest - head, head):
                yield (head,) + tail
    yield from rec(n, n)


def _class_size(n: int, partition) -> int:
    z = 1
    for length in set(partition):
        mult = partition.count(length)
        z *= length ** mult * math.factorial(mult)
    return math.factorial(n) // z


def _class_rep(n: int, partition) -> Permutation:
    images = list(range(1, n + 1))
    start = 1
    for length in sorted(l for l in partition if l > 1):
        block = list(range(start, start + length))
        for i, v in enumerate(block):
            images[v - 1] = block[(i + 1) % length]
        start += length
    return Permutation(tuple(images))


def _class_label(partition) -> str:
    cycles = sorted(l for l in partition if l > 1)
    if not cycles:
        return "id"
    out = []
    start = 1
    for length in cycles:
        out.append("(" + "".join(str(x) for x in range(start, start + length)) + ")")
        start += length
    return "".join(out)


@lru_cache(maxsize=None)
def conjugacy_classes(n: int) -> tuple:
    """All classes of the degree-n symmetric group, in the fixed display
    order: fewer moved points first, then ascending non-trivial cycle
    lengths (id, (12), (123), (12)(34), (1234), (12)(345), (12345) at n=5)."""
    items = []
    for p in _partitions(n):
        key = (sum(l for l in p if l > 1), tuple(sorted(l for l in p if l > 1)))
        items.append((key, ConjugacyClass(
            partition=p,
            representative=_class_rep(n, p),
            size=_class_size(n, p),
            label=_class_label(p),
        )))
    items.sort(key=lambda t: t[0])
    return tuple(cc for _, cc in items)


# ---------------------------------------------------------------------------
# character rows

@dataclass(frozen=True)
class CharacterRow:
    """A class function, one integer per conjugacy class in display order."""
    n: int
    name: str
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(conjugacy_classes(self.n)):
            raise MismatchError("one value per conjugacy class")

    def value(self, partition) -> int:
        want = tuple(sorted(partition, reverse=True))
        for cc, v in zip(conjugacy_classes(self.n), self.values):
            if cc.partition == want:
                return v
        raise PreconditionError(f"{partition} is not a cycle type of degree {self.n}")

    def value_at(self, g: Permutation) -> int:
        return self.value(g.cycle_type())

    def inner(self, other: "CharacterRow") -> Fraction:
        if self.n != other.n:
            raise MismatchError("characters live on one group")
        total = sum(cc.size * a * b for cc, a, b
                    in zip(conjugacy_classes(self.n), self.values, other.values))
        return Fraction(total, math.factorial(self.n))

    def pointwise_leq(self, other: "CharacterRow") -> bool:
        return all(a <= b for a, b in zip(self.values, other.values))

    def minus(self, other: "CharacterRow", name: str) -> "CharacterRow":
        if self.n != other.n:
            raise MismatchError("characters live on one group")
        return CharacterRow(self.n, name,
                            tuple(a - b for a, b in zip(self.values, other.values)))


def tree_fixed_character(n: int) -> CharacterRow:
    """Count the labelled rooted trees each class representative fixes."""
    if n > MAX_TREE_CHARACTER_DEGREE:
        raise SizeLimitError(f"tree character needs n <= {MAX_TREE_CHARACTER_DEGREE}")
    trees = enumerate_trees(n)
    vals = tuple(
        sum(1 for t in trees if relabel(t, cc.representative) == t)
        for cc in conjugacy_classes(n)
    )
    return CharacterRow(n, "tree_fixed_points", vals)


def sign_natural_character(d: int) -> CharacterRow:
    """Signature times the point-permutation character on 2d+1 points."""
    n = 2 * d + 1
    vals = tuple(
        cc.representative.sign() * cc.representative.fixed_points()
        for cc in conjugacy_classes(n)
    )
    return CharacterRow(n, "sign_times_natural", vals)


def reduced_tree_character(d: int = 2) -> CharacterRow:
    """Tree character minus the sign-times-natural row, on 2d+1 points."""
    n = 2 * d + 1
    return tree_fixed_character(n).minus(sign_natural_character(d),
                                         "reduced_difference")


def character_table(n: int = 5) -> list:
    if n % 2 == 0 or n < 1:
        raise PreconditionError("the table lives on an odd number of points")
    d = (n - 1) // 2
    return [tree_fixed_character(n), sign_natural_character(d),
            reduced_tree_character(d)]


# ---------------------------------------------------------------------------
# subgroups up to conjugacy

@dataclass(frozen=True)
class SubgroupClass:
    order: int
    generators: tuple
    elements: frozenset
    cycle_profile: tuple     # sorted cycle types of all elements
    class_size: int          # number of conjugate subgroups
    fixes_point: bool
    label: str


def _closure(n: int, gens) -> frozenset:
    ident = Permutation.identity(n)
    elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x.compose(g)
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return frozenset(elems)


def _profile(elems) -> tuple:
    return tuple(sorted(e.cycle_type() for e in elems))


def _conjugate_into(gens, target: frozenset, group) -> bool:
    """Does some group element carry every generator into target?"""
    for s in group:
        si = s.inverse()
        if all(s.compose(g).compose(si) in target for g in gens):
            return True
    return False


@lru_cache(maxsize=None)
def subgroup_classes(n: int = 5) -> tuple:
    """Every subgroup of the degree-n symmetric group, one per conjugacy
    class, grown by single-generator extensions from the trivial group.

    Dedup: order + cycle-type profile as a cheap key, explicit conjugation
    of generator sets as the decider.  A generator is tried once per orbit
    of conjugation by the current subgroup (conjugate generators generate
    conjugate extensions).
    """
    if n > MAX_SUBGROUP_DEGREE:
        raise SizeLimitError(f"subgroup classification needs n <= {MAX_SUBGROUP_DEGREE}")
    group = all_permutations(n)
    ident = Permutation.identity(n)
    trivial = frozenset({ident})
    found = [(trivial, (), _profile(trivial))]

    def seen(elems, profile):
        order = len(elems)
        for elems2, gens2, profile2 in found:
            if len(elems2) == order and profile2 == profile:
                if _conjugate_into(gens2 or (ident,), elems, group):
                    return True
        return False

    frontier = [(trivial, ())]
    while frontier:
        grown = []
        for elems, gens in frontier:
            tried = set(elems)
            for g in group:
                if g in tried:
                    continue
                for h in elems:
                    tried.add(h.compose(g).compose(h.inverse()))
                bigger = _closure(n, gens + (g,))
                profile = _profile(bigger)
                if not seen(bigger, profile):
                    found.append((bigger, gens + (g,), profile))
                    grown.append((bigger, gens + (g,)))
        frontier = grown

    order_of_g = math.factorial(n)
    records = []
    for elems, gens, profile in found:
        normalizer = sum(
            1 for s in group
            if all(s.compose(g).compose(s.inverse()) in elems for g in (gens or (ident,)))
        )
        fixes = any(all(e(q) == q for e in elems) for q in range(1, n + 1))
        records.append((elems, gens, profile, order_of_g // normalizer, fixes))
    records.sort(key=lambda r: (len(r[0]), r[2]))
    out = []
    by_order: dict = {}
    for elems, gens, profile, csize, fixes in records:
        order = len(elems)
        suffix = by_order.get(order, 0)
        by_order[order] = suffix + 1
        label = f"order{order}{chr(ord('a') + suffix)}"
        out.append(SubgroupClass(order=order, generators=tuple(gens),
                                 elements=elems, cycle_profile=profile,
                                 class_size=csize, fixes_point=fixes, label=label))
    return tuple(out)


def point_stabilizer_class(n: int) -> SubgroupClass:
    """The class of the full stabilizer of one point."""
    for sub in subgroup_classes(n):
        if sub.order == math.factorial(n - 1) and sub.fixes_point:
            return sub
    raise PreconditionError("no point stabilizer found")  # cannot happen


# ---------------------------------------------------------------------------
# coset characters and the constraint scan

def coset_character(sub: SubgroupClass, n: int | None = None) -> CharacterRow:
    """Fixed cosets of each class representative acting by left translation."""
    degree = next(iter(sub.elements)).degree
    if n is not None and n != degree:
        raise MismatchError(f"subgroup lives in degree {degree}, not {n}")
    n = degree
    group = all_permutations(n)
    in_sub = sub.elements
    reps = []
    covered = set()
    for x in group:
        if x not in covered:
            reps.append(x)
            for h in in_sub:
                covered.add(x.compose(h))
    vals = []
    for cc in conjugacy_classes(n):
        g = cc.representative
        vals.append(sum(1 for x in reps
                        if x.inverse().compose(g).compose(x) in in_sub))
    return CharacterRow(n, f"cosets_mod_{sub.label}", tuple(vals))


@dataclass(frozen=True)
class ScanSurvivor:
    subgroup: SubgroupClass
    values: tuple
    final_lhs: int
    final_rhs: int
    contradiction: bool

    def to_json_dict(self) -> dict:
        return {
            "label": self.subgroup.label,
            "order": self.subgroup.order,
            "generators": [list(g.images) for g in self.subgroup.generators],
            "fixesPoint": self.subgroup.fixes_point,
            "cosetValues": list(self.values),
            "finalTest": {"lhs": self.final_lhs, "rhs": self.final_rhs,
                          "contradiction": self.contradiction},
        }


@dataclass(frozen=True)
class ScanReport:
    n: int
    class_count: int
    reference: CharacterRow
    survivors: tuple

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "classCount": self.class_count,
            "reference": {"name": self.reference.name,
                          "values": list(self.reference.values)},
            "survivorCount": len(self.survivors),
            "survivors": [s.to_json_dict() for s in self.survivors],
        }


def constraint_scan(reference: CharacterRow | None = None) -> ScanReport:
    """Sieve the subgroup classes whose coset character fits under the
    reference row: pointwise at most the reference, equal values (at least
    one) on the two order-4 classes, zero on the order-6 and order-5
    classes.  Each survivor also gets the final doubling test
    2 * value(123) <= reference(123) recorded.
    """
    n = 5
    ref = reference if reference is not None else reduced_tree_character(2)
    if ref.n != n:
        raise MismatchError("the scan runs on five points")
    labels = [cc.label for cc in conjugacy_classes(n)]
    i_double = labels.index("(12)(34)")
    i_four = labels.index("(1234)")
    i_mixed = labels.index("(12)(345)")
    i_five = labels.index("(12345)")
    i_three = labels.index("(123)")
    survivors = []
    subs = subgroup_classes(n)
    for sub in subs:
        row = coset_character(sub)
        v = row.values
        if not row.pointwise_leq(ref):
            continue
        if not (v[i_double] == v[i_four] and v[i_double] >= 1):
            continue
        if v[i_mixed] != 0 or v[i_five] != 0:
            continue
        lhs = 2 * v[i_three]
        rhs = ref.values[i_three]
        survivors.append(ScanSurvivor(subgroup=sub, values=v, final_lhs=lhs,
                                      final_rhs=rhs, contradiction=lhs > rhs))
    return ScanReport(n=n, class_count=len(subs), reference=ref,
                      survivors=tuple(survivors))
