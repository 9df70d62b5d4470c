import random
from fractions import Fraction

import pytest

from quadaz import linalg as la
from quadaz.errors import DegenerateForm, InvalidWitness, NonIntegralEntries, NotSimpleDegeneration, NonUnitValue
from quadaz.fieldtower import PAdic, PrimeField, Rationals, parse_field, parse_valuation, squareclass_reduce
from quadaz.quadform import (
    Generator,
    QuadForm,
    Similarity,
    cancel,
    degeneration_report,
    diagonalize,
    diagonalize_local,
    discriminant,
    eichler_E,
    eichler_E_star,
    eichler_decompose,
    eichler_maps,
    hyperbolic_alpha,
    hyperbolic_beta,
    hyperbolic_conjugation_check,
    hyperbolic_plane,
    identity_similarity,
    isotropic_complete,
    parse_form,
    radical,
    reflection,
    represents_local,
    transport,
)

Q = Rationals()
F5 = PrimeField(5)
F7 = PrimeField(7)
F5T = parse_field("Fun:Fp:5:t")
T = F5T.gen()
AT_T = parse_valuation(F5T, "t")


def rand_vec(F, rng, n):
    return tuple(F.random(rng) for _ in range(n))


# --- field level ------------------------------------------------------------


def test_radical_examples():
    assert radical(QuadForm.diagonal(Q, [1, 0])) == [(0, 1)]
    assert len(radical(QuadForm.diagonal(Q, [1, -1, 1, 0]))) == 1
    assert radical(hyperbolic_plane(Q)) == []


@pytest.mark.parametrize(
    "text, expected",
    [("diag(1,2,3,30)", 5), ("diag(1,1,1,1)", 1), ("diag(3,-3)", -1), ("gram[[2,1],[1,2]]", 3)],
)
def test_discriminant_examples(text, expected):
    assert discriminant(parse_form(text, Q)) == expected


def test_discriminant_of_hyperbolic_plane():
    assert discriminant(hyperbolic_plane(Q)) == -1
    with pytest.raises(DegenerateForm):
        discriminant(QuadForm.diagonal(Q, [1, 0]))


def test_diagonalize_examples():
    h = diagonalize(hyperbolic_plane(Q))
    assert squareclass_reduce(-h.values[0] * h.values[1], Q) == 1  # <u, -u> up to squares
    d = diagonalize(QuadForm.diagonal(Q, [1, 2, 3]))
    assert d.values == (1, 2, 3)
    assert d.basis == la.identity(Q, 3)
    g = diagonalize(parse_form("gram[[2,1],[1,2]]", Q))
    assert g.values == (1, Fraction(3, 4))
    assert squareclass_reduce(g.values[0] * g.values[1], Q) == 3


@pytest.mark.parametrize("F", [Q, F5, F7])
def test_diagonalize_random_preserves_discriminant(F):
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 4)
        rows = [[F.random(rng) for _ in range(n)] for _ in range(n)]
        G = [[rows[i][j] + rows[j][i] for j in range(n)] for i in range(n)]
        q = QuadForm.from_gram(F, G)
        d = diagonalize(q)
        assert d.to_diag.holds()
        nz = [x for x in d.values if x != 0]
        assert all(x == 0 for x in d.values[len(nz):])  # radical last
        if q.det() != 0:
            assert F.squareclass(q.det()) == F.squareclass(d.form.det())


# --- DVR level ----------------------------------------------------------------


def test_degeneration_report_examples():
    assert degeneration_report(QuadForm.diagonal(F5T, [1, T, T]), AT_T).verdict == "not-simple"
    assert degeneration_report(QuadForm.diagonal(F5T, [1, 1, 1, T]), AT_T).verdict == "simple(1)"
    assert degeneration_report(QuadForm.diagonal(F5T, [1, 1, 1, 1]), AT_T).verdict == "regular"
    with pytest.raises(NonIntegralEntries):
        degeneration_report(QuadForm.diagonal(F5T, [1, 1 / T]), AT_T)


def test_diagonalize_local_examples():
    ld = diagonalize_local(QuadForm.diagonal(F5T, [1, 1, T]), AT_T)
    assert ld.units == (1, 1) and ld.top == T and ld.multiplicity == 1
    assert diagonalize_local(QuadForm.diagonal(F5T, [1, 1, T**3]), AT_T).multiplicity == 3
    q = parse_form("gram[[2*t+2,2],[2,2]]", F5T)
    ld = diagonalize_local(q, AT_T)
    assert len(ld.units) == 1 and AT_T.val(ld.units[0]) == 0
    assert AT_T.val(ld.top) == ld.multiplicity == 1
    # with <t> appended the residue radical has rank 2
    with pytest.raises(NotSimpleDegeneration):
        diagonalize_local(parse_form("gram[[2*t+2,2,0],[2,2,0],[0,0,2*t]]", F5T), AT_T)
    with pytest.raises(NotSimpleDegeneration):
        diagonalize_local(QuadForm.diagonal(F5T, [1, T, T]), AT_T)


@pytest.mark.parametrize("e", [1, 2, 3])
def test_report_inverts_local_diagonalization(e):
    rng = random.Random(e)
    for _ in range(20):
        units = []
        while len(units) < 4:
            u = F5T.random(rng)
            if u != 0 and AT_T.val(u) == 0:
                units.append(u)
        q = QuadForm.diagonal(F5T, units[:3] + [units[3] * T**e])
        assert degeneration_report(q, AT_T).verdict == f"simple({e})"
        ld = diagonalize_local(q, AT_T)
        assert [AT_T.val(x) for x in ld.values].count(0) == 3
        assert AT_T.val(ld.top) == e


def test_represents_local_examples():
    ok, w, exact = represents_local(QuadForm.diagonal(F5T, [1, T]), 1, AT_T)
    assert ok and exact and w == (1, 0)
    ok, reason, _ = represents_local(QuadForm.diagonal(Q, [3, 5]), 1, PAdic(5))
    assert not ok and "does not represent" in reason
    for u in [1, 2, 3, T + 1]:
        ok, w, exact = represents_local(QuadForm.diagonal(F5T, [1, -1, T]), u, AT_T)
        assert ok
        q = QuadForm.diagonal(F5T, [1, -1, T])
        assert q.q(w) == u if exact else AT_T.val(q.q(w) - u) >= 8
    with pytest.raises(NonUnitValue):
        represents_local(QuadForm.diagonal(F5T, [1, T]), T, AT_T)


def test_represents_local_brute_force_mod_p():
    # <a, b*5> over Z_5 represents u iff a*x^2 = u has a solution mod 5
    for a in range(1, 5):
        for u in range(1, 5):
            q = QuadForm.diagonal(Q, [a, 5])
            ok = represents_local(q, u, PAdic(5))[0]
            assert ok == any((a * x * x - u) % 5 == 0 for x in range(5))


def test_isotropic_complete_examples():
    assert isotropic_complete(QuadForm.diagonal(F5T, [1, -1, T]), AT_T)
    assert isotropic_complete(QuadForm.diagonal(Q, [1, 1, 1, 1]), PAdic(7))
    assert isotropic_complete(QuadForm.diagonal(F5T, [1, 1, T]), AT_T)
    assert not isotropic_complete(QuadForm.diagonal(F5T, [1, 2, T, 2 * T]), AT_T)


# --- reflections, transport, cancellation ------------------------------------


def test_reflection_properties():
    rng = random.Random(11)
    q = QuadForm.diagonal(Q, [1, 2, -3])
    for _ in range(50):
        v = rand_vec(Q, rng, 3)
        if q.q(v) == 0:
            continue
        r = reflection(q, v)
        assert r.holds()
        assert r.apply(v) == tuple(-x for x in v)
        assert la.det(r.matrix) == -1
        assert la.mat_mul(r.matrix, r.matrix) == la.identity(Q, 3)
        w = rand_vec(Q, rng, 3)
        perp = tuple(wi - q.b(v, w) / (2 * q.q(v)) * vi for wi, vi in zip(w, v))
        assert r.apply(perp) == perp


def test_reflection_moves_v_to_w():
    q = QuadForm.diagonal(Q, [1, 1])
    r = reflection(q, (1, -1))
    assert r.apply((1, 0)) == (0, 1)


def test_transport_examples():
    q = QuadForm.diagonal(Q, [1, 1])
    t = transport(q, (Q.one, Q.zero), (Q.zero, Q.one))
    assert len(t.reflections) == 1
    assert t.isometry.apply((1, 0)) == (0, 1)
    same = transport(q, (Q.one, Q.zero), (Q.one, Q.zero))
    assert same.isometry.matrix == la.identity(Q, 2)


@pytest.mark.parametrize("F", [F5, F7, Q])
def test_transport_random(F):
    rng = random.Random(str(F))
    q = QuadForm.diagonal(F, [1, 1, 1, 1])
    done = 0
    while done < 200:
        v = rand_vec(F, rng, 4)
        if q.q(v) == 0:
            continue
        # a second vector with the same value: image of v under a random isometry
        x = rand_vec(F, rng, 4)
        if q.q(x) == 0:
            continue
        w = reflection(q, x).apply(v)
        t = transport(q, v, w)
        assert t.isometry.holds()
        assert t.isometry.apply(v) == w
        assert len(t.reflections) <= 2
        done += 1


def test_cancel_examples():
    one = QuadForm.diagonal(Q, [1])
    two = QuadForm.diagonal(Q, [1, 1])
    swap = Similarity(la.mat([[0, 1], [1, 0]]), Q.one, two, two)
    out = cancel(one, one, one, swap)
    assert out.holds() and out.source == one and out.target == one
    out = cancel(one, one, one, identity_similarity(two))
    assert out.matrix == la.identity(Q, 1)
    bad = Similarity(la.mat([[2, 0], [0, 1]]), Q.one, two, two)
    with pytest.raises(InvalidWitness):
        cancel(one, one, one, bad)


def test_cancel_random_f7():
    rng = random.Random(5)
    pad = QuadForm.diagonal(F7, [1, 3])
    for _ in range(50):
        q1 = QuadForm.diagonal(F7, [rng.randrange(1, 7), rng.randrange(1, 7)])
        # q2 isometric to q1 through a random product of reflections
        big = q1.perp(pad)
        iso = identity_similarity(big)
        for _ in range(3):
            x = rand_vec(F7, rng, 4)
            if big.q(x) != 0:
                iso = iso.compose(reflection(big, x))
        q2 = q1
        out = cancel(q1, q2, pad, iso)
        assert out.holds()


# --- Eichler maps -------------------------------------------------------------


def test_eichler_examples():
    q = QuadForm.diagonal(Q, [1])
    E, Es = eichler_maps(q, (Q.zero,))
    assert E.matrix == la.identity(Q, 3) and Es.matrix == la.identity(Q, 3)
    E, _ = eichler_maps(q, (Q.one,))
    assert E.apply((0, 1, 0)) == (0, 1, 0)  # E_v(e) = e
    assert E.apply((0, 0, 1)) == (-1, Fraction(-1, 2), 1)  # E_v(f) = -v - q(v)/2 e + f


@pytest.mark.parametrize("field", ["Q", "Fun:Fp:11:t"])
def test_eichler_additivity_and_conjugation(field):
    F = parse_field(field)
    rng = random.Random(field)
    q = QuadForm.diagonal(F, [1, 2, 3])
    u = F.gen() if hasattr(F, "gen") else F.coerce(3)
    for _ in range(20):
        v, w = rand_vec(F, rng, 3), rand_vec(F, rng, 3)
        vw = tuple(a + b for a, b in zip(v, w))
        assert eichler_E(q, vw).matrix == la.mat_mul(eichler_E(q, v).matrix, eichler_E(q, w).matrix)
        assert eichler_E_star(q, vw).matrix == la.mat_mul(eichler_E_star(q, v).matrix, eichler_E_star(q, w).matrix)
        assert eichler_E(q, v).holds() and eichler_E_star(q, v).holds()
        assert hyperbolic_conjugation_check(q, v, u)
        assert hyperbolic_conjugation_check(q, v, F.one)


def test_reflection_as_eichler_word():
    q = QuadForm.diagonal(Q, [2, 3, -1])
    x = (Q.one, Fraction(2), Q.zero)
    c = q.q(x)
    W = la.identity(Q, 5)
    for M in [
        eichler_E(q, x).matrix,
        eichler_E_star(q, tuple(2 / c * a for a in x)).matrix,
        eichler_E(q, x).matrix,
        hyperbolic_beta(q, -c / 2).matrix,
    ]:
        W = la.mat_mul(W, M)
    assert W == la.block_diag(Q, reflection(q, x).matrix, la.identity(Q, 2))


def test_eichler_decompose_examples():
    q = QuadForm.diagonal(Q, [1, 2])
    dec = eichler_decompose(hyperbolic_alpha(q, 3), q)
    assert dec.generators == () and dec.tail.kind == "alpha"
    E = eichler_E(q, (Q.one, Q.one))
    dec = eichler_decompose(E, q)
    assert len(dec.generators) == 1 and dec.product(q) == E.matrix


def test_eichler_decompose_random_products_f7():
    rng = random.Random(17)
    q = QuadForm.diagonal(F7, [1, 3])
    for _ in range(50):
        gens = []
        for _ in range(5):
            kind = rng.choice(["E", "E*", "alpha", "beta"])
            if kind in ("E", "E*"):
                gens.append(Generator(kind, rand_vec(F7, rng, 2)))
            else:
                gens.append(Generator(kind, F7.coerce(rng.randrange(1, 7))))
        M = la.identity(F7, 4)
        for g in gens:
            M = la.mat_mul(M, g.matrix(q))
        phi = Similarity(M, F7.one, eichler_E(q, (0, 0)).source, eichler_E(q, (0, 0)).source)
        dec = eichler_decompose(phi, q)
        assert dec.product(q) == M
        assert dec.tail.kind in ("alpha", "beta")
