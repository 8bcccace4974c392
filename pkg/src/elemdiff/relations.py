"""Exact linear algebra over evaluation columns.

Soundness layout:
  * entries are exact integers (random integer jets, value at the origin);
  * a nonsingular square minor modulo the configured prime proves the same
    minor is nonsingular over the rationals, so modular rank is an exact
    lower bound once the minor is re-checked;
  * candidate row relations are lifted from the modular nullspace by
    rational reconstruction and then verified exhaustively on monomial
    inputs, which is complete because an arity-n evaluation applies exactly
    n-1 derivatives: on monomial inputs the value at the origin vanishes
    identically off the total-degree-(n-1) layer, term by term;
  * upper bound = rows - verified independent relations.  The two bounds
    either meet ("certified") or the result is reported inconclusive; a
    wrong number is never emitted.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Sequence

from .config import RunConfig
from .differentials import monomial_term, tree_value_at_zero
from .errors import (MismatchError, PreconditionError, SizeLimitError,
                     SpanInstabilityError)
from .jets import monomials_up_to, random_jet_tuple
from .multiindex import MultiIndex, enumerate_multi_indices, project_arities
from .trees import Tree, Permutation, enumerate_trees, relabel

# ---------------------------------------------------------------------------
# rows: a plain Tree, or (Tree, labels) with labels[v-1] = input slot of v


def _row_tree(row) -> Tree:
    return row[0] if isinstance(row, tuple) else row


def _row_labels(row, n: int) -> tuple[int, ...]:
    if isinstance(row, tuple):
        return tuple(row[1])
    return tuple(range(1, n + 1))


def _rows_shape(rows):
    """(n, input_count, weights) shared by all rows; raises on mixtures."""
    if not rows:
        raise PreconditionError("need at least one row")
    n = _row_tree(rows[0]).size
    labelled = isinstance(rows[0], tuple)
    if labelled:
        ell = max(max(row[1]) for row in rows)
        profile = None
        for row in rows:
            tree, labels = row
            if tree.size != n or len(labels) != n:
                raise MismatchError("rows must share one arity")
            counts = tuple(list(labels).count(i) for i in range(1, ell + 1))
            if profile is None:
                profile = counts
            elif counts != profile:
                raise MismatchError("labelled rows must share one multiplicity profile")
        return n, ell, profile
    for row in rows:
        if row.size != n:
            raise MismatchError("rows must share one arity")
    return n, n, tuple([1] * n)


# ---------------------------------------------------------------------------
# column schemes and the evaluation matrix

@dataclass(frozen=True)
class RandomColumns:
    tuples: int
    seed: int
    bound: int = 3

    def describe(self) -> dict:
        return {"scheme": "randomColumns", "tuples": self.tuples,
                "seed": self.seed, "bound": self.bound}


@dataclass(frozen=True)
class ExhaustiveMonomials:
    def describe(self) -> dict:
        return {"scheme": "exhaustiveMonomials"}


@dataclass
class EvalMatrix:
    rows: tuple
    d: int
    degree: int
    input_count: int
    col_index: tuple  # (tuple position, output component)
    data: list        # list of integer row vectors
    tuples: tuple     # the jet tuples behind the columns
    provenance: dict

    @property
    def ncols(self) -> int:
        return len(self.col_index)

    def check_entry(self, r: int, c: int) -> bool:
        """Recompute one entry from scratch (spot-check hook)."""
        t, comp = self.col_index[c]
        row = self.rows[r]
        tree = _row_tree(row)
        labels = _row_labels(row, tree.size)
        jets = {v: self.tuples[t][labels[v - 1] - 1] for v in tree.vertices}
        value = tree_value_at_zero(tree, jets)[comp - 1]
        return value == self.data[r][c]


def build_matrix(rows: Sequence, d: int, scheme, config: RunConfig,
                 degree: Optional[int] = None) -> EvalMatrix:
    """Evaluate every row on every column tuple, reading values at the origin."""
    rows = tuple(rows)
    n, ell, _weights = _rows_shape(rows)
    degree = n - 1 if degree is None else degree
    if isinstance(scheme, RandomColumns):
        if scheme.tuples * d > config.column_budget:
            raise SizeLimitError(
                f"{scheme.tuples * d} columns exceed the budget {config.column_budget}")
        rng = random.Random(scheme.seed)
        tuples = tuple(
            random_jet_tuple(rng, ell, d, degree, scheme.bound) for _ in range(scheme.tuples)
        )
        data = _entries_random(rows, tuples, n, ell, d, degree, scheme.bound)
    elif isinstance(scheme, ExhaustiveMonomials):
        from .jets import monomial_basis_size
        count = monomial_basis_size(d, degree) ** ell
        if count * d > config.column_budget:
            raise SizeLimitError(
                f"exhaustive scheme wants {count * d} columns, budget {config.column_budget}")
        monos = [(alpha, k) for alpha in monomials_up_to(d, degree) for k in range(1, d + 1)]
        tuples = tuple(itertools.product(monos, repeat=ell))
        data = []
        for row in rows:
            tree = _row_tree(row)
            labels = _row_labels(row, n)
            out = []
            for tup in tuples:
                slots = {v: tup[labels[v - 1] - 1] for v in tree.vertices}
                val = monomial_term(tree, slots)
                for k in range(1, d + 1):
                    if val.coeff and val.comp == k and not any(val.exponent):
                        out.append(val.coeff)
                    else:
                        out.append(0)
            data.append(out)
        tuples = tuple(
            tuple(_monomial_as_jet(d, degree, alpha, k) for alpha, k in tup) for tup in tuples
        )
    else:
        raise PreconditionError(f"unknown column scheme {scheme!r}")
    col_index = tuple((t, k) for t in range(len(tuples)) for k in range(1, d + 1))
    return EvalMatrix(rows=rows, d=d, degree=degree, input_count=ell,
                      col_index=col_index, data=data, tuples=tuples,
                      provenance=scheme.describe())


def _monomial_as_jet(d, degree, alpha, k):
    from .jets import monomial_jet
    return monomial_jet(d, degree, alpha, k)


def _entries_random(rows, tuples, n, ell, d, degree, bound):
    worst = (d ** n) * ((math.factorial(n - 1) * bound) ** n)
    if worst < (1 << 62):
        try:
            return _entries_random_batched(rows, tuples, n, ell, d, degree, bound)
        except ImportError:
            pass
    return _entries_random_exact(rows, tuples, n, ell, d)


def _entries_random_exact(rows, tuples, n, ell, d):
    data = []
    for row in rows:
        tree = _row_tree(row)
        labels = _row_labels(row, n)
        out = []
        for tup in tuples:
            jets = {v: tup[labels[v - 1] - 1] for v in tree.vertices}
            values = tree_value_at_zero(tree, jets)
            for q in values:
                if q.denominator != 1:
                    raise PreconditionError("integer jets produced a non-integer value")
                out.append(q.numerator)
        data.append(out)
    return data


def _entries_random_batched(rows, tuples, n, ell, d, degree, bound):
    """numpy int64 path; the caller proved the worst-case magnitude fits."""
    import numpy as np

    nt = len(tuples)
    gammas = monomials_up_to(d, degree)
    weight = {g: math.prod(math.factorial(x) for x in g) for g in gammas}
    table = {}
    for i in range(1, ell + 1):
        for j in range(1, d + 1):
            for g in gammas:
                w = weight[g]
                table[(i, j, g)] = np.fromiter(
                    (int(tuples[t][i - 1].coeff(g, j)) * w for t in range(nt)),
                    dtype=np.int64, count=nt)
    assignments = list(itertools.product(range(1, d + 1), repeat=n))
    data = []
    for row in rows:
        tree = _row_tree(row)
        labels = _row_labels(row, n)
        verts = list(tree.vertices)
        pos = {v: i for i, v in enumerate(verts)}
        acc = [np.zeros(nt, dtype=np.int64) for _ in range(d)]
        kids = {v: tree.children(v) for v in verts}
        root_i = pos[tree.root]
        for js in assignments:
            prod = None
            for v in verts:
                gamma = [0] * d
                for c in kids[v]:
                    gamma[js[pos[c]] - 1] += 1
                vec = table[(labels[v - 1], js[pos[v]], tuple(gamma))]
                prod = vec if prod is None else prod * vec
            acc[js[root_i] - 1] += prod
        stacked = np.stack(acc, axis=1).reshape(-1)
        data.append([int(x) for x in stacked])
    return data


# ---------------------------------------------------------------------------
# modular elimination and exact rank

@dataclass
class Elimination:
    rank: int
    pivot_rows: list
    pivot_cols: list
    null_rows: list      # positions of rows that reduced to zero
    null_vectors: list   # left-nullspace vectors mod p, aligned with null_rows


def eliminate_mod(matrix, p: int, track_nullspace: bool = False) -> Elimination:
    """Left-looking, no row swaps: each row is reduced against the pivots in
    creation order, so a vanishing row yields a nullspace vector supported on
    itself plus earlier pivot rows - an echelon structure that makes the
    reported vectors independent for free."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    pivots = []  # (row position, pivot column, reduced row, reduced aug)
    null_rows, null_vectors = [], []
    for pos in range(nrows):
        row = [x % p for x in matrix[pos]]
        aug = None
        if track_nullspace:
            aug = [0] * nrows
            aug[pos] = 1
        for ppos, pcol, prow, paug in pivots:
            f = row[pcol]
            if f:
                row[pcol:] = [(a - f * b) % p for a, b in zip(row[pcol:], prow[pcol:])]
                if track_nullspace:
                    aug = [(a - f * b) % p for a, b in zip(aug, paug)]
        lead = next((c for c in range(ncols) if row[c]), None)
        if lead is None:
            null_rows.append(pos)
            if track_nullspace:
                null_vectors.append(aug)
            continue
        inv = pow(row[lead], p - 2, p)
        row[lead:] = [a * inv % p for a in row[lead:]]
        if track_nullspace:
            aug = [a * inv % p for a in aug]
        pivots.append((pos, lead, row, aug))
    return Elimination(
        rank=len(pivots),
        pivot_rows=[t[0] for t in pivots],
        pivot_cols=[t[1] for t in pivots],
        null_rows=null_rows,
        null_vectors=null_vectors,
    )


def minor_is_nonsingular_mod(matrix, row_positions, col_positions, p: int) -> bool:
    """Fresh elimination (with pivoting) of the selected square minor mod p.
    Nonzero determinant mod p proves a nonzero determinant over the integers."""
    k = len(row_positions)
    if k != len(col_positions):
        raise PreconditionError("minor must be square")
    sub = [[matrix[r][c] % p for c in col_positions] for r in row_positions]
    for i in range(k):
        piv = next((r for r in range(i, k) if sub[r][i]), None)
        if piv is None:
            return False
        if piv != i:
            sub[i], sub[piv] = sub[piv], sub[i]
        inv = pow(sub[i][i], p - 2, p)
        sub[i] = [x * inv % p for x in sub[i]]
        for r in range(i + 1, k):
            f = sub[r][i]
            if f:
                sub[r] = [(a - f * b) % p for a, b in zip(sub[r], sub[i])]
    return True


def exact_rank(matrix, method: str = "auto") -> tuple:
    """Exact rank of a small matrix; returns (rank, pivot_rows, pivot_cols).

    method "bareiss" runs fraction-free integer elimination, "gauss" rational
    elimination in a different sweep order; they are each other's oracle.
    """
    if isinstance(matrix, EvalMatrix):
        matrix = matrix.data
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if nrows * ncols > 2_000_000:
        raise SizeLimitError("exact_rank is for desk-size matrices; use certificates")
    if method == "auto":
        method = "bareiss"
    if method == "bareiss":
        return _rank_bareiss(matrix)
    if method == "gauss":
        return _rank_gauss(matrix)
    raise PreconditionError(f"unknown method {method!r}")


def _rank_bareiss(matrix):
    lcm = 1
    for row in matrix:
        for x in row:
            q = Fraction(x)
            lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
    m = [[int(Fraction(x) * lcm) for x in row] for row in matrix]
    nrows, ncols = len(m), len(m[0]) if m else 0
    pivot_rows, pivot_cols = [], []
    denom = 1
    used_rows = set()
    for c in range(ncols):
        piv = next((i for i in range(nrows) if i not in used_rows and m[i][c]), None)
        if piv is None:
            continue
        used_rows.add(piv)
        pivot_rows.append(piv)
        pivot_cols.append(c)
        pv = m[piv][c]
        for i in range(nrows):
            if i in used_rows:
                continue
            f = m[i][c]
            m[i] = [(pv * a - f * b) // denom for a, b in zip(m[i], m[piv])]
        denom = pv
    return len(pivot_rows), pivot_rows, pivot_cols


def _rank_gauss(matrix):
    m = [[Fraction(x) for x in row] for row in matrix]
    nrows, ncols = len(m), len(m[0]) if m else 0
    pivot_rows, pivot_cols = [], []
    used = set()
    for pos in range(nrows):
        row = m[pos]
        lead = next((c for c in range(ncols) if row[c]), None)
        if lead is None:
            continue
        inv = 1 / row[lead]
        row = [x * inv for x in row]
        m[pos] = row
        pivot_rows.append(pos)
        pivot_cols.append(lead)
        used.add(pos)
        for i in range(nrows):
            if i not in used and m[i][lead]:
                f = m[i][lead]
                m[i] = [a - f * b for a, b in zip(m[i], row)]
    return len(pivot_rows), pivot_rows, pivot_cols


# ---------------------------------------------------------------------------
# rational reconstruction

def rational_reconstruct(a: int, p: int) -> Optional[Fraction]:
    """Wang lifting: the unique fraction with |num|, den <= sqrt(p/2), or None."""
    a %= p
    if a == 0:
        return Fraction(0)
    bound = isqrt(p // 2)
    r0, t0, r1, t1 = p, 0, a, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(r1, abs(t1)) != 1:
        return None
    cand = Fraction(r1, t1)
    if (cand.numerator - a * cand.denominator) % p != 0:
        return None
    return cand


# ---------------------------------------------------------------------------
# identity certification by exhaustive monomial sweep

@dataclass(frozen=True)
class SweepWitness:
    slots: tuple        # ((alpha, component), ...) one per input slot
    component: int      # output coordinate carrying the nonzero value
    value: object       # int when the combination is integral

    def to_json_dict(self) -> dict:
        return {
            "inputs": [{"exponent": list(a), "component": k} for a, k in self.slots],
            "outputComponent": self.component,
            "value": str(self.value),
        }


@dataclass(frozen=True)
class CertifyResult:
    holds: bool
    witness: Optional[SweepWitness]
    tuples_checked: int
    tuples_skipped_off_layer: int


def _slot_choices(d: int, w: int, budget: int):
    """(item, weighted spend) choices for one input slot.  A slot of weight
    zero never reaches the evaluation, so it is pinned to one constant."""
    if w == 0:
        return [(((0,) * d, 1), 0)]
    out = []
    for t in range(budget // w + 1):
        for alpha in sorted(_exponents_of_degree(d, t)):
            for k in range(1, d + 1):
                out.append(((alpha, k), w * t))
    return out


def _layer_tuples(d: int, slots: int, weights, total: int):
    """Monomial inputs, one (alpha, component) per slot, with the weighted
    total degree pinned to `total` (the only tuples that can contribute at
    the origin; everything else vanishes term by term)."""
    def rec(i, remaining):
        if i == slots:
            if remaining == 0:
                yield ()
            return
        for item, spend in _slot_choices(d, weights[i], remaining):
            for rest in rec(i + 1, remaining - spend):
                yield (item,) + rest

    yield from rec(0, total)


def _exponents_of_degree(d, total):
    if d == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _exponents_of_degree(d - 1, total - head):
            yield (head,) + rest


def certify_relation(terms, d: int, config: RunConfig,
                     exhaustive: bool = False) -> CertifyResult:
    """True iff the rational combination of rows is the zero map in dimension d.

    The sweep runs over monomial input tuples of truncation degree n-1.  In
    layer mode only tuples of weighted total degree n-1 are touched; every
    other tuple evaluates to zero at the origin separately for every term
    (the closed form carries total degree minus n-1), so skipping them loses
    nothing.  `exhaustive` sweeps every tuple instead - same verdict, used
    as a cross-check oracle on small cases.
    """
    terms = [(Fraction(c), row) for c, row in terms]
    rows = [row for _, row in terms]
    n, ell, weights = _rows_shape(rows)
    degree = n - 1

    prepared = []
    for coeff, row in terms:
        tree = _row_tree(row)
        labels = _row_labels(row, n)
        prepared.append((coeff, tree, labels))

    def value_on(tup):
        out = {}
        for coeff, tree, labels in prepared:
            slots = {v: tup[labels[v - 1] - 1] for v in tree.vertices}
            val = monomial_term(tree, slots)
            if val.coeff and not any(val.exponent):
                out[val.comp] = out.get(val.comp, Fraction(0)) + coeff * val.coeff
        return {k: q for k, q in out.items() if q}

    if exhaustive:
        monos = [(alpha, k) for alpha in monomials_up_to(d, degree) for k in range(1, d + 1)]
        stream = itertools.product(monos, repeat=ell)
        skipped = 0
    else:
        stream = _layer_tuples(d, ell, weights, degree)
        full = (len(monomials_up_to(d, degree)) * d) ** ell
        skipped = None  # filled below
    checked = 0
    witness = None
    threads = config.resolved_threads()
    if threads > 1 and not exhaustive:
        witness, checked = _sweep_parallel(d, ell, weights, degree, value_on, threads)
    else:
        for tup in stream:
            checked += 1
            bad = value_on(tup)
            if bad:
                comp = min(bad)
                witness = SweepWitness(slots=tup, component=comp,
                                       value=int(bad[comp]) if bad[comp].denominator == 1
                                       else bad[comp])
                break
    if not exhaustive and skipped is None:
        skipped = full - checked if witness is None else 0
    return CertifyResult(holds=witness is None, witness=witness,
                         tuples_checked=checked,
                         tuples_skipped_off_layer=skipped or 0)


def _sweep_parallel(d, ell, weights, degree, value_on, threads):
    """Chunk the layer by the first slot's choice; verdicts merge in chunk
    order so the reported witness does not depend on the thread count."""
    def run_chunk(arg):
        item, spend = arg
        count = 0
        for rest in _layer_tuples(d, ell - 1, weights[1:], degree - spend):
            tup = (item,) + rest
            count += 1
            bad = value_on(tup)
            if bad:
                comp = min(bad)
                return count, SweepWitness(slots=tup, component=comp,
                                           value=int(bad[comp]) if bad[comp].denominator == 1
                                           else bad[comp])
        return count, None

    checked = 0
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for count, wit in pool.map(run_chunk, _slot_choices(d, weights[0], degree)):
            checked += count
            if wit is not None:
                return wit, checked
    return None, checked


# ---------------------------------------------------------------------------
# two-sided dimension certificates

@dataclass(frozen=True)
class CertifiedRelation:
    leading: int                      # row position the relation eliminates
    coeffs: tuple                     # ((row position, Fraction), ...) incl. leading 1
    verified: bool

    def to_json_dict(self) -> dict:
        return {
            "coeffs": [[pos, str(q)] for pos, q in self.coeffs],
            "leading": self.leading,
            "verified": self.verified,
        }


@dataclass
class DimensionCertificate:
    status: str                       # "certified" | "inconclusive"
    dimension: Optional[int]
    lower: int
    upper: int
    rank: int
    minor_rows: tuple
    minor_cols: tuple
    relations: tuple                  # CertifiedRelation, echelon leadings
    prime: int
    seed: int
    scheme: dict
    columns: int
    row_count: int

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "dimension": self.dimension,
            "certified": self.certified,
            "lower": self.lower,
            "upper": self.upper,
            "rank": self.rank,
            "minorRows": list(self.minor_rows),
            "minorCols": list(self.minor_cols),
            "relations": [r.to_json_dict() for r in self.relations],
            "prime": self.prime,
            "seed": self.seed,
            "scheme": self.scheme,
            "columns": self.columns,
            "rows": self.row_count,
        }


def dimension_certificate(rows: Sequence, d: int, config: RunConfig,
                          max_batches: int = 4) -> DimensionCertificate:
    """Two-sided dimension of the span of the rows' evaluation maps.

    Columns grow in batches (1.5x the row count to start) until the bounds
    meet or the modular rank has been stable for two consecutive batches;
    more columns cannot repair an unverified relation, only a thin sample.
    """
    rows = tuple(rows)
    if config.column_budget < len(rows):
        raise PreconditionError(
            "certified answers need a column budget of at least the row count")
    p = config.prime
    batch_tuples = max(1, -(-3 * len(rows) // (2 * d)))  # ceil(1.5 * rows / d)
    total_tuples = 0
    last = None
    prev_rank = None
    for _ in range(max_batches):
        want = min(total_tuples + batch_tuples, config.column_budget // d)
        if want <= total_tuples:
            break
        total_tuples = want
        scheme = RandomColumns(tuples=total_tuples, seed=config.seed,
                               bound=config.random_bound)
        matrix = build_matrix(rows, d, scheme, config)
        data = matrix.data
        elim = eliminate_mod(data, p, track_nullspace=True)
        if not minor_is_nonsingular_mod(data, elim.pivot_rows, elim.pivot_cols, p):
            raise PreconditionError("pivot minor failed its own recheck")
        lower = elim.rank
        relations = []
        for pos, vec in zip(elim.null_rows, elim.null_vectors):
            lifted = _lift_relation(vec, p)
            if lifted is None:
                relations.append(CertifiedRelation(leading=pos, coeffs=(), verified=False))
                continue
            terms = [(q, rows[r]) for r, q in lifted]
            ok = certify_relation(terms, d, config).holds
            relations.append(CertifiedRelation(leading=pos, coeffs=tuple(lifted),
                                               verified=ok))
        verified = [r for r in relations if r.verified]
        upper = len(rows) - len(verified)
        last = DimensionCertificate(
            status="certified" if lower == upper else "inconclusive",
            dimension=lower if lower == upper else None,
            lower=lower, upper=upper, rank=elim.rank,
            minor_rows=tuple(elim.pivot_rows), minor_cols=tuple(elim.pivot_cols),
            relations=tuple(relations), prime=p, seed=config.seed,
            scheme=matrix.provenance, columns=matrix.ncols, row_count=len(rows),
        )
        if last.certified:
            return last
        if prev_rank == elim.rank:
            break
        prev_rank = elim.rank
    if last is None:
        raise SizeLimitError("column budget cannot fit a single column batch")
    return last


def _lift_relation(vec_mod_p, p):
    """Sparse rational lift of a modular nullspace vector; None on failure."""
    out = []
    for pos, a in enumerate(vec_mod_p):
        if a:
            q = rational_reconstruct(a, p)
            if q is None:
                return None
            out.append((pos, q))
    return out


# ---------------------------------------------------------------------------
# named spans

def span_rows(n: int, linear_only: bool = False) -> list:
    trees = enumerate_trees(n)
    if linear_only:
        from .trees import is_linear
        trees = [t for t in trees if is_linear(t)]
    return trees


def _dimension_guard(d: int, n: int):
    if d >= 3 and n > 4:
        raise SizeLimitError("dimension runs need n <= 4 when d >= 3")
    if n > 5:
        raise SizeLimitError("dimension runs need n <= 5")


def dimension_w(d: int, n: int, linear: bool = False,
                config: Optional[RunConfig] = None) -> DimensionCertificate:
    """Certified dimension of the span of all (or all linear) arity-n rows."""
    config = config or RunConfig()
    _dimension_guard(d, n)
    return dimension_certificate(span_rows(n, linear_only=linear), d, config)


def dimension_lw(d: int, n: int,
                 config: Optional[RunConfig] = None) -> DimensionCertificate:
    return dimension_w(d, n, linear=True, config=config)


def nullspace_relations(rows: Sequence, d: int, config: RunConfig):
    """Certified relation basis of the rows' span (may be empty)."""
    cert = dimension_certificate(rows, d, config)
    if not cert.certified:
        raise PreconditionError("nullspace request did not certify; grow the budget")
    return [r for r in cert.relations if r.verified], cert


def relation_vector(rel: CertifiedRelation, nrows: int):
    v = [Fraction(0)] * nrows
    for pos, q in rel.coeffs:
        v[pos] = q
    return v


def reduce_against(vector, relations, nrows: int):
    """Remainder of a row-combination vector modulo echelonised relations."""
    v = list(vector)
    for rel in relations:
        lead = rel.leading
        if v[lead]:
            f = v[lead]  # relation has coefficient 1 at its leading position
            for pos, q in rel.coeffs:
                v[pos] -= f * q
    return v


def in_relation_span(vector, relations, nrows: int) -> bool:
    return not any(reduce_against(vector, relations, nrows))


# ---------------------------------------------------------------------------
# traces of the relabelling action on a span

def trace_on_span(rows: Sequence, sigma: Permutation, d: int,
                  certificate: Optional[DimensionCertificate] = None,
                  config: Optional[RunConfig] = None) -> Fraction:
    """Trace of the induced action of sigma on the span of the rows.

    Basis: rows that are not eliminated by a certified relation.  A permuted
    basis row is again a row (exact set check); if it lands on an eliminated
    row its expansion is read straight off that relation.
    """
    rows = tuple(rows)
    for row in rows:
        if isinstance(row, tuple):
            raise PreconditionError("traces are defined for plain tree rows")
    if certificate is None:
        certificate = dimension_certificate(rows, d, config or RunConfig())
    if not certificate.certified:
        raise PreconditionError("trace needs a certified span")
    position = {row: i for i, row in enumerate(rows)}
    for row in rows:
        if relabel(row, sigma) not in position:
            raise SpanInstabilityError("relabelled row left the row set")
    expansions = {}
    for rel in certificate.relations:
        if not rel.verified:
            continue
        # row_lead = -sum of the other coefficients times their rows
        expansions[rel.leading] = {pos: -q for pos, q in rel.coeffs if pos != rel.leading}
    basis = [i for i in range(len(rows)) if i not in expansions]
    trace = Fraction(0)
    for b in basis:
        j = position[relabel(rows[b], sigma)]
        if j == b:
            trace += 1
        elif j in expansions:
            trace += expansions[j].get(b, Fraction(0))
    return trace


# ---------------------------------------------------------------------------
# block decomposition by arity multi-index

@dataclass(frozen=True)
class Block:
    mi: MultiIndex
    dimension: int
    basis: tuple  # trees

    def to_json_dict(self) -> dict:
        return {
            "arity": list(self.mi.arities),
            "dimension": self.dimension,
            "basis": [t.parent_list() for t in self.basis],
        }


def block_basis(d: int, n: int, orbit_code: Optional[str] = None,
                mi: Optional[MultiIndex] = None,
                config: Optional[RunConfig] = None) -> list:
    """Greedy bases of the per-multi-index sub-spans.

    One block per single multi-index; an orbit code groups the blocks of all
    its relabellings for reporting.  Each basis element's one-dimensional
    restriction is pinned against the multi-index evaluation as a check.
    """
    config = config or RunConfig()
    if (orbit_code is None) == (mi is None):
        raise PreconditionError("pass exactly one of orbit_code / mi")
    mis = [mi] if mi is not None else [
        m for m in enumerate_multi_indices(n) if m.orbit_code() == orbit_code]
    if not mis:
        raise PreconditionError(f"no multi-index matches orbit {orbit_code!r}")
    trees_by_mi = {}
    for t in enumerate_trees(n):
        trees_by_mi.setdefault(project_arities(t), []).append(t)
    out = []
    for m in mis:
        rows = trees_by_mi.get(m, [])
        if not rows:
            raise PreconditionError(f"no tree projects to {m.text()}")  # unreachable
        pivot_rows = _stable_greedy_rows(rows, d, config)
        basis = [rows[i] for i in pivot_rows]
        _check_block_restriction(basis, m, config)
        out.append(Block(mi=m, dimension=len(basis), basis=tuple(basis)))
    return out


def _stable_greedy_rows(rows, d, config):
    n = rows[0].size
    tuples = max(2, -(-3 * len(rows) // (2 * d)))
    prev = None
    for attempt in range(4):
        scheme = RandomColumns(tuples=tuples, seed=config.seed, bound=config.random_bound)
        matrix = build_matrix(rows, d, scheme, config)
        rank, pivot_rows, _ = exact_rank(matrix.data, method="gauss")
        if prev is not None and rank == prev[0]:
            return pivot_rows
        prev = (rank, pivot_rows)
        tuples *= 2
    return prev[1]


def _check_block_restriction(basis, m, config):
    """Light faithfulness check of the one-dimensional shadow of each block row."""
    rng = random.Random(config.seed ^ 0x5B10C)
    from .jets import random_jet
    from .differentials import eval_tree, eval_multiindex
    n = m.n
    for _ in range(2):
        tup = [random_jet(rng, 1, n - 1, config.random_bound, ncomps=1) for _ in range(n)]
        expected = eval_multiindex(m, tup)
        for t in basis:
            got = eval_tree(t, tup)
            if got != expected:
                raise PreconditionError("block element strayed from its one-dim shadow")
