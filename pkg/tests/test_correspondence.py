import itertools
import random
from fractions import Fraction

import pytest

from quadaz.correspondence import (
    azumaya_from_form,
    brauer_compare,
    dvr_isometry_decide,
    dvr_model,
    dvr_similarity_decide,
    form_for_symbol,
    form_from_azumaya,
    isotropy_rank4,
    local_global_certificate,
    similar_rank4,
)
from quadaz.errors import DegenerateForm, EvenDiscValuation, NotSimpleDegeneration, PreconditionViolation
from quadaz.fieldtower import PrimeField, Rationals, parse_field, parse_valuation
from quadaz.quadform import QuadForm, degeneration_report, discriminant, hyperbolic_plane
from quadaz.quaternion import QuaternionAlgebra

Q = Rationals()
F5 = PrimeField(5)
F7 = PrimeField(7)


def bounded_isotropic(values, bound):
    """Oracle: a nonzero integer vector with sum a_i x_i^2 = 0, |x_i| <= bound."""
    r = range(-bound, bound + 1)
    for x in itertools.product(r, repeat=len(values)):
        if any(x) and sum(a * c * c for a, c in zip(values, x)) == 0:
            return x
    return None


# --- the two directions -------------------------------------------------------


def test_form_from_azumaya_examples():
    rec = form_from_azumaya(Q, 2, 3, 5)
    assert rec.form.fmt() == "diag(1,2,3,30)" and rec.disc == 5 and rec.verified
    rec = form_from_azumaya(Q, 1, 1, 1)
    assert rec.form.fmt() == "diag(1,1,1,1)"
    assert rec.algebra.L.split
    rec = form_from_azumaya(Q, -1, -1, 1)
    assert rec.form.fmt() == "diag(1,-1,-1,1)" and discriminant(rec.form) == 1 and rec.verified


def test_form_for_symbol_has_symbol_as_c0():
    q = form_for_symbol(Q, 2, 3, 5)
    res = azumaya_from_form(q)
    assert (res.record.algebra.a, res.record.algebra.b) == (2, 3)


@pytest.mark.parametrize("p", [3, 5])
def test_round_trip_exhaustive_small_fields(p):
    F = PrimeField(p)
    for a, b, d in itertools.product(range(1, p), repeat=3):
        rec = form_from_azumaya(F, a, b, d)
        assert rec.verified
        assert discriminant(rec.form) == F.squareclass(d)


def test_round_trip_random_q():
    rng = random.Random(6)
    for _ in range(40):
        a, b, d = (Fraction(rng.choice([-1, 1]) * rng.randint(1, 10), rng.randint(1, 10)) for _ in range(3))
        rec = form_from_azumaya(Q, a, b, d)
        assert rec.verified
        back = azumaya_from_form(rec.form)
        assert back.back_similarity.holds()
        assert similar_rank4(rec.form, back.back).equal


def test_azumaya_from_form_examples():
    hh = hyperbolic_plane(Q).perp(hyperbolic_plane(Q))
    res = azumaya_from_form(hh)
    assert res.record.algebra.L.split and res.record.verified
    with pytest.raises(DegenerateForm):
        azumaya_from_form(QuadForm.diagonal(Q, [1, 1, 1, 0]))


def test_azumaya_from_form_random_f7():
    rng = random.Random(8)
    done = 0
    while done < 30:
        rows = [[rng.randrange(7) for _ in range(4)] for _ in range(4)]
        G = [[rows[i][j] + rows[j][i] for j in range(4)] for i in range(4)]
        q = QuadForm.from_gram(F7, G)
        if q.det() == 0:
            continue
        res = azumaya_from_form(q)
        assert res.record.verified and res.back_similarity.holds()
        done += 1


def test_brauer_compare():
    L = parse_field("Ext:Q:5")
    A = QuaternionAlgebra.make(L, -1, -1)
    assert brauer_compare(A, A).equal
    assert not brauer_compare(A, QuaternionAlgebra.make(L, 1, -1)).equal


# --- isotropy -------------------------------------------------------------------


def test_isotropy_examples():
    q = QuadForm.diagonal(Q, [1, -1, 1, -1])
    r = isotropy_rank4(q)
    assert r.verdict == "isotropic" and q.q(r.witness) == 0
    q = QuadForm.diagonal(Q, [1, 1, 1, 1])
    r = isotropy_rank4(q)
    assert r.verdict == "anisotropic" and set(r.certificate.places) == {"inf", "2"}


def test_isotropy_over_f5_always():
    for vals in itertools.product(range(1, 5), repeat=4):
        q = QuadForm.diagonal(F5, list(vals))
        r = isotropy_rank4(q)
        assert r.verdict == "isotropic" and q.q(r.witness) == 0


def test_isotropy_agrees_with_bounded_search():
    rng = random.Random(12)
    for _ in range(60):
        vals = [rng.choice([-1, 1]) * rng.randint(1, 8) for _ in range(4)]
        r = isotropy_rank4(QuadForm.diagonal(Q, vals))
        found = bounded_isotropic(vals, 4)
        if found is not None:
            assert r.verdict == "isotropic"
        if r.verdict == "isotropic" and r.witness is not None:
            assert sum(a * x * x for a, x in zip(vals, r.witness)) == 0
        if all(v > 0 for v in vals) or all(v < 0 for v in vals):
            assert r.verdict == "anisotropic"


# --- DVR models and decisions --------------------------------------------------

F5T = parse_field("Fun:Fp:5:t")
F7T = parse_field("Fun:Fp:7:t")


def test_dvr_model_examples():
    t = F5T.gen()
    v = parse_valuation(F5T, "t")
    m = dvr_model(QuadForm.diagonal(F5T, [1, 1, 1, t]), v)
    assert m.form.fmt() == "diag(1,1,1,t)"
    m = dvr_model(QuadForm.diagonal(F5T, [1, 1, 1, t**3]), v)
    assert m.form.fmt() == "diag(1,1,1,t)" and m.similarity.holds()
    m = dvr_model(QuadForm.diagonal(F5T, [t, t, t, 2 * t**2]), v)
    assert m.form.fmt() == "diag(1,1,1,2*t)"
    assert m.similarity.factor == t and m.similarity.holds()
    with pytest.raises(EvenDiscValuation):
        dvr_model(QuadForm.diagonal(F5T, [1, 1, 1, t**2]), v)


@pytest.mark.parametrize("K", [F5T, F7T])
def test_dvr_model_postcondition_random(K):
    rng = random.Random(str(K))
    t = K.gen()
    v = parse_valuation(K, "t")
    done = 0
    while done < 40:
        vals = [K.coerce(rng.randrange(1, K.base.p)) * t ** rng.randint(0, 3) for _ in range(4)]
        q = QuadForm.diagonal(K, vals)
        try:
            m = dvr_model(q, v)
        except EvenDiscValuation:
            assert sum(v.val(x) for x in vals) % 2 == 0
            continue
        assert degeneration_report(m.form, v).verdict == "simple(1)"
        assert m.similarity.holds()
        done += 1


def _springer_isometric(q1, q2, v):
    """Oracle: for diagonal <u1,u2,u3,u4 pi>, R-isometry holds iff the unit
    parts have the same residue discriminant and the pi-parts agree mod squares."""
    kap = v.residue_field

    def invariants(q):
        vals = q.values()
        units = [x for x in vals if v.val(x) == 0]
        top = [x for x in vals if v.val(x) == 1][0]
        d = kap.one
        for u in units:
            d = d * v.residue(u)
        return kap.is_square(d), kap.is_square(v.residue(v.unit_part(top)))

    return invariants(q1) == invariants(q2)


@pytest.mark.parametrize("K", [F5T, F7T])
def test_dvr_isometry_matches_residue_oracle(K):
    rng = random.Random(31)
    t = K.gen()
    v = parse_valuation(K, "t")
    p = K.base.p

    def rand_sd():
        vals = [K.coerce(rng.randrange(1, p)) for _ in range(3)] + [K.coerce(rng.randrange(1, p)) * t]
        rng.shuffle(vals)
        return QuadForm.diagonal(K, vals)

    for _ in range(50):
        q1, q2 = rand_sd(), rand_sd()
        d12 = dvr_isometry_decide(q1, q2, v)
        assert d12.isometric == dvr_isometry_decide(q2, q1, v).isometric
        assert d12.isometric == _springer_isometric(q1, q2, v)
        assert dvr_isometry_decide(q1, q1, v).isometric


def test_dvr_isometry_examples():
    t = F5T.gen()
    v = parse_valuation(F5T, "t")
    q = QuadForm.diagonal(F5T, [1, 1, 1, t])
    assert dvr_isometry_decide(q, q, v).isometric
    d = dvr_isometry_decide(q, QuadForm.diagonal(F5T, [1, 1, 2, 2 * t]), v)
    assert not d.isometric and d.invariant
    d = dvr_isometry_decide(q, QuadForm.diagonal(F5T, [1, 1, 1, 2 * t]), v)
    assert not d.isometric
    with pytest.raises(PreconditionViolation):
        dvr_isometry_decide(q, QuadForm.diagonal(F5T, [1, 1, t, t]), v)


def test_nonsquare_disc_scaling_flips_isometry():
    for K in (F5T, F7T):
        t = K.gen()
        v = parse_valuation(K, "t")
        n = K.coerce(K.base.nonresidue())
        for vals in itertools.product(range(1, K.base.p), repeat=3):
            q = QuadForm.diagonal(K, list(vals) + [t])
            flipped = QuadForm.diagonal(K, list(vals) + [n * t])
            assert dvr_isometry_decide(q, q, v).isometric
            assert not dvr_isometry_decide(q, flipped, v).isometric


def test_dvr_similarity_examples():
    t = F7T.gen()
    v = parse_valuation(F7T, "t")
    q = QuadForm.diagonal(F7T, [1, 1, 1, t])
    assert dvr_similarity_decide(q, q.scaled(3), v).similar
    tq = dvr_model(q.scaled(t), v).form
    assert dvr_similarity_decide(q, tq, v).similar
    other = QuadForm.diagonal(F7T, [1, 1, 3, t])  # unit discriminant differs by a nonsquare
    assert not dvr_similarity_decide(q, other, v).similar


# --- local-global certificates ------------------------------------------------


def test_local_global_certificate_complete():
    K = parse_field("Fun:Fun:Fp:5:x:y")
    x, y = K.base.gen(), K.gen()
    vals = [parse_valuation(K, s) for s in ["y", "y-2", "x+1", "x-1"]]
    cert = local_global_certificate(K, -x, 1 - y, y, vals)
    assert cert.status == "complete"
    assert cert.verify()
    assert cert.lines()[-1] == "self-check: pass"
    for entry in cert.local:
        assert entry.report.verdict in ("regular", "simple(1)")


def test_local_global_certificate_refuses_isotropic():
    K = parse_field("Fun:Fp:5:t")
    t = K.gen()
    cert = local_global_certificate(K, -1, t, t, [parse_valuation(K, "t")])
    assert cert.status == "refused"


def test_local_global_certificate_rejects_non_simple():
    K = parse_field("Fun:Fp:5:t")
    t = K.gen()
    with pytest.raises(NotSimpleDegeneration):
        local_global_certificate(K, t, t, 2, [parse_valuation(K, "t")])
