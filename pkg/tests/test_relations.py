import random
from fractions import Fraction

import pytest

from elemdiff import (
    ExhaustiveMonomials,
    PreconditionError,
    RandomColumns,
    RunConfig,
    SizeLimitError,
    SpanInstabilityError,
    Permutation,
    build_matrix,
    block_basis,
    certify_relation,
    chain_tree,
    dimension_certificate,
    dimension_w,
    eliminate_mod,
    enumerate_multi_indices,
    exact_rank,
    nullspace_relations,
    rational_reconstruct,
    span_rows,
    trace_on_span,
)
from elemdiff.relations import (
    in_relation_span,
    minor_is_nonsingular_mod,
    reduce_against,
    relation_vector,
)

CFG = RunConfig(threads=1)


# ---------------------------------------------------------------------------
# evaluation matrices


def test_build_matrix_shape_and_entries():
    rows = span_rows(3)
    m = build_matrix(rows, 2, RandomColumns(tuples=6, seed=99), CFG)
    assert m.degree == 2
    assert m.ncols == 12
    assert len(m.data) == 9
    assert all(isinstance(x, int) for row in m.data for x in row)
    rng = random.Random(0)
    for _ in range(25):
        r, c = rng.randrange(9), rng.randrange(12)
        assert m.check_entry(r, c)


def test_build_matrix_reproducible():
    rows = span_rows(3)
    a = build_matrix(rows, 2, RandomColumns(tuples=4, seed=7), CFG)
    b = build_matrix(rows, 2, RandomColumns(tuples=4, seed=7), CFG)
    assert a.data == b.data
    c = build_matrix(rows, 2, RandomColumns(tuples=4, seed=8), CFG)
    assert a.data != c.data


def test_batched_and_exact_entry_paths_agree():
    from elemdiff.relations import _entries_random_exact, _rows_shape
    import random as _random
    rows = tuple(span_rows(3))
    scheme = RandomColumns(tuples=5, seed=31)
    m = build_matrix(rows, 2, scheme, CFG)
    n, ell, _ = _rows_shape(rows)
    exact = _entries_random_exact(rows, m.tuples, n, ell, 2)
    assert exact == m.data


def test_exhaustive_scheme_matches_random_rank():
    rows = span_rows(3)
    cfg = CFG.with_options(column_budget=20000)
    me = build_matrix(rows, 1, ExhaustiveMonomials(), cfg)
    mr = build_matrix(rows, 1, RandomColumns(tuples=30, seed=5), cfg)
    assert exact_rank(me)[0] == exact_rank(mr)[0] == 6


def test_build_matrix_respects_budget():
    with pytest.raises(SizeLimitError):
        build_matrix(span_rows(3), 2, RandomColumns(tuples=10**6, seed=1), CFG)


# ---------------------------------------------------------------------------
# rank machinery


def random_int_matrix(rng, nrows, ncols, rank):
    a = [[rng.randint(-4, 4) for _ in range(rank)] for _ in range(nrows)]
    b = [[rng.randint(-4, 4) for _ in range(ncols)] for _ in range(rank)]
    return [[sum(a[i][k] * b[k][j] for k in range(rank)) for j in range(ncols)]
            for i in range(nrows)]


def test_exact_rank_methods_agree():
    rng = random.Random(17)
    for _ in range(10):
        target = rng.randint(1, 4)
        m = random_int_matrix(rng, 6, 5, target)
        rb = exact_rank(m, method="bareiss")
        rg = exact_rank(m, method="gauss")
        assert rb[0] == rg[0] <= target


def test_exact_rank_known_cases():
    assert exact_rank([[1, 2], [2, 4]])[0] == 1
    assert exact_rank([[0, 0], [0, 0]])[0] == 0
    assert exact_rank([[1, 0], [0, 1]])[0] == 2
    rank, prows, pcols = exact_rank([[0, 1, 1], [0, 2, 2], [1, 0, 3]])
    assert rank == 2
    assert len(prows) == len(pcols) == 2


def test_eliminate_mod_agrees_with_exact_rank():
    rng = random.Random(23)
    p = CFG.prime
    for _ in range(10):
        m = random_int_matrix(rng, 7, 6, rng.randint(1, 5))
        elim = eliminate_mod(m, p)
        assert elim.rank == exact_rank(m)[0]  # entries tiny next to p, no bad prime


def test_eliminate_mod_nullspace_annihilates():
    rng = random.Random(29)
    p = CFG.prime
    m = random_int_matrix(rng, 8, 5, 3)
    elim = eliminate_mod(m, p, track_nullspace=True)
    assert len(elim.null_rows) == 8 - elim.rank
    for vec in elim.null_vectors:
        for j in range(5):
            assert sum(vec[i] * m[i][j] for i in range(8)) % p == 0


def test_minor_recheck():
    rng = random.Random(31)
    p = CFG.prime
    m = random_int_matrix(rng, 6, 6, 4)
    elim = eliminate_mod(m, p)
    assert minor_is_nonsingular_mod(m, elim.pivot_rows, elim.pivot_cols, p)
    # a deliberately dependent row choice fails
    if elim.rank >= 2:
        bad_rows = [elim.pivot_rows[0]] * 2 + list(elim.pivot_rows[2:])
        assert not minor_is_nonsingular_mod(m, bad_rows, elim.pivot_cols, p)


def test_rational_reconstruct_round_trip():
    p = CFG.prime
    for q in [Fraction(3, 7), Fraction(-22, 5), Fraction(0), Fraction(10**8),
              Fraction(1, 911)]:
        residue = q.numerator * pow(q.denominator, -1, p) % p
        assert rational_reconstruct(residue, p) == q
    # a residue with no small representation comes back None
    assert rational_reconstruct(pow(2, 101, p) + 12345, p) is None


# ---------------------------------------------------------------------------
# identity certification


def same_fiber_pair():
    # equal arity vectors, different wiring: indistinguishable iff d=1
    return chain_tree([1, 2, 3]), chain_tree([2, 1, 3])


def test_certify_true_relation_d1():
    t1, t2 = same_fiber_pair()
    res = certify_relation([(1, t1), (-1, t2)], 1, CFG)
    assert res.holds
    assert res.witness is None
    assert res.tuples_checked > 0
    assert res.tuples_skipped_off_layer > 0


def test_certify_layer_agrees_with_exhaustive():
    t1, t2 = same_fiber_pair()
    lay = certify_relation([(1, t1), (-1, t2)], 1, CFG)
    exh = certify_relation([(1, t1), (-1, t2)], 1, CFG, exhaustive=True)
    assert lay.holds == exh.holds is True
    assert exh.tuples_skipped_off_layer == 0
    assert exh.tuples_checked >= lay.tuples_checked


def test_certify_false_relation_yields_checkable_witness():
    from elemdiff import monomial_term
    t1, t2 = same_fiber_pair()
    res = certify_relation([(1, t1), (-1, t2)], 2, CFG)
    assert not res.holds
    w = res.witness
    assert w is not None
    slots1 = {v: w.slots[v - 1] for v in t1.vertices}
    v1, v2 = monomial_term(t1, slots1), monomial_term(t2, slots1)
    total = Fraction(0)
    for val, sgn in ((v1, 1), (v2, -1)):
        if val.coeff and val.comp == w.component and not any(val.exponent):
            total += sgn * val.coeff
    assert total == w.value != 0


def test_certify_scale_invariance():
    t1, t2 = same_fiber_pair()
    res = certify_relation([(Fraction(2, 3), t1), (Fraction(-2, 3), t2)], 1, CFG)
    assert res.holds


def test_witness_independent_of_thread_count():
    t1, t2 = same_fiber_pair()
    r1 = certify_relation([(1, t1), (-1, t2)], 2, CFG.with_options(threads=1))
    r2 = certify_relation([(1, t1), (-1, t2)], 2, CFG.with_options(threads=3))
    assert r1.witness == r2.witness


# ---------------------------------------------------------------------------
# dimension certificates


def test_dimension_n3_full():
    cert = dimension_certificate(span_rows(3), 2, CFG)
    assert cert.certified
    assert cert.dimension == 9
    assert cert.lower == cert.upper == 9
    assert not cert.relations
    assert len(cert.minor_rows) == 9


def test_dimension_certificate_json_shape():
    cert = dimension_certificate(span_rows(3), 2, CFG)
    obj = cert.to_json_dict()
    for key in ("status", "dimension", "certified", "lower", "upper", "rank",
                "minorRows", "minorCols", "relations", "prime", "seed",
                "scheme", "columns", "rows"):
        assert key in obj
    assert obj["certified"] is True
    assert obj["dimension"] == 9


def test_dimension_d1_sees_only_arities():
    # 9 trees on 3 vertices collapse onto the 6 arity vectors
    assert dimension_w(1, 3, config=CFG).dimension == 6
    cert = dimension_w(1, 4, config=CFG)
    assert cert.certified
    assert cert.dimension == 20
    assert len(cert.relations) == 64 - 20
    assert all(rel.verified for rel in cert.relations)


def test_dimension_guard():
    with pytest.raises(SizeLimitError):
        dimension_w(3, 5, config=CFG)
    with pytest.raises(SizeLimitError):
        dimension_w(2, 6, config=CFG)


def test_span_rows_counts():
    assert len(span_rows(3)) == 9
    assert len(span_rows(4)) == 64
    assert len(span_rows(3, linear_only=True)) == 6
    assert len(span_rows(4, linear_only=True)) == 24
    assert len(span_rows(5, linear_only=True)) == 120


def test_linear_span_n3_has_no_relations_in_two_variables():
    cert = dimension_w(2, 3, linear=True, config=CFG)
    assert cert.certified
    assert cert.dimension == 6


# ---------------------------------------------------------------------------
# relations as vectors


def test_nullspace_relations_reduce_to_zero():
    rows = span_rows(4)
    rels, cert = nullspace_relations(rows, 1, CFG)
    assert cert.certified
    assert len(rels) == 44
    nrows = len(rows)
    for rel in rels[:6]:
        vec = relation_vector(rel, nrows)
        assert in_relation_span(vec, rels, nrows)
        assert all(q == 0 for q in reduce_against(vec, rels, nrows))
    # a lone basis row is not in the span of the relations
    basis_vec = [Fraction(0)] * nrows
    basis_vec[cert.minor_rows[0]] = Fraction(1)
    assert not in_relation_span(basis_vec, rels, nrows)


def test_relation_leading_structure():
    rows = span_rows(4)
    rels, _ = nullspace_relations(rows, 1, CFG)
    leadings = [rel.leading for rel in rels]
    assert len(set(leadings)) == len(leadings)  # echelon: distinct leading rows
    for rel in rels:
        assert dict(rel.coeffs)[rel.leading] == 1


# ---------------------------------------------------------------------------
# traces


def test_trace_identity_is_dimension():
    rows = span_rows(3)
    assert trace_on_span(rows, Permutation.identity(3), 2, config=CFG) == 9


def test_trace_transposition_counts_fixed_trees():
    # no relations at n=3, d=2, so the trace counts relabel-fixed basis rows
    rows = span_rows(3)
    s = Permutation.from_cycles(3, (1, 2))
    assert trace_on_span(rows, s, 2, config=CFG) == 1


def test_trace_rejects_unstable_span():
    rows = [chain_tree([1, 2, 3])]
    with pytest.raises(SpanInstabilityError):
        trace_on_span(rows, Permutation.from_cycles(3, (1, 2)), 2, config=CFG)


# ---------------------------------------------------------------------------
# blocks


def test_block_basis_selector_validation():
    with pytest.raises(PreconditionError):
        block_basis(2, 3)
    with pytest.raises(PreconditionError):
        block_basis(2, 3, orbit_code="x", mi=enumerate_multi_indices(3)[0])


def test_single_block_dimensions_d1():
    for mi in enumerate_multi_indices(3):
        blocks = block_basis(1, 3, mi=mi, config=CFG)
        assert len(blocks) == 1
        assert blocks[0].dimension == 1  # one variable: the arity vector is everything
        assert len(blocks[0].basis) == 1


def test_orbit_blocks_sum_to_full_dimension_n3():
    total = 0
    seen_codes = set()
    for mi in enumerate_multi_indices(3):
        seen_codes.add(mi.orbit_code())
    for code in sorted(seen_codes):
        for block in block_basis(2, 3, orbit_code=code, config=CFG):
            total += block.dimension
    assert total == 9
