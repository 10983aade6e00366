import math
import random

import pytest

from commlab.errors import (
    ExponentMismatch,
    NotAHomomorphism,
    NotDivisible,
    OutOfDomain,
    SingularMatrix,
)
from commlab.f2poly import F2LaurentPoly as P
from commlab.f2poly import mask_mul
from commlab.lamplighter import (
    CommInftyElt,
    LampComm,
    LampElement,
    SubmoduleBasis,
    VDerElt,
    comm_apply,
    comm_compose,
    comm_domain,
    comm_from_partial,
    comm_infty_raise,
    comm_invert,
    diagonal_embed,
    lamp_inv,
    lamp_mul,
    quotient_dim,
    random_comm,
    random_submodule,
    theta_sign,
    vder_raise,
)
from commlab.matrices import MatF2Rat
from commlab.ratfun import F2RatFun as R

E0 = LampElement.lamp(0)
T = LampElement.shift(1)
IDENT = LampComm.identity()
FLIP = LampComm.flip_class()


def mult_by(text: str) -> LampComm:
    c = CommInftyElt.from_entries(1, [[R.from_string(text)]])
    return LampComm.make(VDerElt.zero(), c, False)


def domain_point(comms, rng, span=4):
    """A group element inside the domain of every given class and of
    their pairwise composites."""
    level = math.lcm(*(c.level for c in comms))
    q = 1
    for c in comms:
        lifted = c.lin.raise_to(level)
        q = mask_mul(q, lifted.den)
        q = mask_mul(q, lifted.flip_conj().den)
    qpoly = P._raw(q, 0).spread(level)
    k = qpoly * P([e for e in range(-span, span + 1) if rng.random() < 0.3])
    return LampElement(k, level * rng.randrange(-2, 3))


# ----------------------------------------------------------------- group law


def test_lamp_mul_examples():
    assert lamp_mul(E0, E0) == LampElement.identity()
    assert lamp_mul(lamp_mul(T, E0), lamp_inv(T)) == LampElement.lamp(1)
    g = LampElement(P([0]), 1)
    assert lamp_mul(g, g) == LampElement(P([0, 1]), 2)


def test_lamp_inv_examples():
    assert lamp_inv(LampElement.shift(5)) == LampElement.shift(-5)
    assert lamp_inv(E0) == E0
    assert lamp_inv(LampElement(P([0]), 1)) == LampElement(P([-1]), -1)


def test_lamp_group_axioms_sampled():
    from commlab.lamplighter import random_element

    rng = random.Random(20)
    for _ in range(200):
        g, h, k = (random_element(rng) for _ in range(3))
        assert lamp_mul(lamp_mul(g, h), k) == lamp_mul(g, lamp_mul(h, k))
        assert lamp_mul(g, lamp_inv(g)) == LampElement.identity()
        assert lamp_mul(lamp_inv(g), g) == LampElement.identity()


def test_lamp_json_round_trip():
    g = LampElement(P([-2, 0, 5]), -3)
    assert LampElement.from_json(g.to_json()) == g


# ----------------------------------------------------- virtual derivations


def test_vder_raise_examples():
    assert vder_raise(VDerElt(1, P([0])), 2) == VDerElt(2, P([0, 1]))
    assert vder_raise(VDerElt(3, P.zero()), 6).value == P.zero()
    assert vder_raise(VDerElt(2, P([1])), 4) == VDerElt(4, P([1, 3]))


def test_vder_raise_errors_and_injectivity():
    with pytest.raises(NotDivisible):
        vder_raise(VDerElt(2, P([0])), 3)
    rng = random.Random(21)
    seen = {}
    for _ in range(100):
        v = VDerElt(1, P([e for e in range(-3, 4) if rng.random() < 0.4]))
        raised = vder_raise(v, 6)
        assert seen.setdefault(raised, v) == v  # injective


def test_vder_raise_path_independence():
    rng = random.Random(22)
    for _ in range(50):
        v = VDerElt(2, P([e for e in range(-3, 4) if rng.random() < 0.4]))
        assert vder_raise(vder_raise(v, 4), 12) == vder_raise(v, 12)


def test_vder_canonical_inverts_raise():
    rng = random.Random(23)
    for _ in range(50):
        v = VDerElt(1, P([e for e in range(-4, 5) if rng.random() < 0.4]))
        for n in (2, 3, 6):
            assert vder_raise(v, n).canonical() == v.canonical()


# ------------------------------------------- equivariant commensurations


def test_comm_infty_raise_examples():
    ident = CommInftyElt.identity(1)
    assert comm_infty_raise(ident, 2).matrix == MatF2Rat.identity(2)
    mult_t = CommInftyElt.from_entries(1, [[R.t_power(1)]])
    assert comm_infty_raise(mult_t, 2).matrix == MatF2Rat([["0", "t"], ["1", "0"]])
    assert comm_infty_raise(comm_infty_raise(mult_t, 2), 4) == comm_infty_raise(mult_t, 4)


def test_comm_infty_raise_respects_action():
    # the raised matrix represents the same additive map on K
    rng = random.Random(24)
    for _ in range(30):
        c = random_comm(rng, max_level=3).lin
        n = c.level * rng.choice([2, 3])
        raised = c.raise_to(n)
        k = P([e for e in range(-6, 7) if rng.random() < 0.3])
        k = k * P._raw(mask_mul(c.den, c.den), 0).spread(c.level)
        assert c.apply(k) == raised.apply(k)


def test_comm_infty_raise_multiplicative():
    rng = random.Random(25)
    for _ in range(30):
        a = random_comm(rng, max_level=2).lin
        b = random_comm(rng, max_level=2).lin
        lev = math.lcm(a.level, b.level)
        a, b = a.raise_to(lev), b.raise_to(lev)
        n = 2 * lev
        assert a.compose(b).raise_to(n) == a.raise_to(n).compose(b.raise_to(n))


def test_comm_infty_raise_injective():
    rng = random.Random(60)
    seen = {}
    for _ in range(60):
        c = random_comm(rng, max_level=2).lin
        raised = c.raise_to(2 * c.level).raise_to(4 * c.level)
        key = (c.level, raised)
        assert seen.setdefault(key, c) == c


def test_vder_raise_additive():
    # derivations at one level add pointwise, and raising is linear
    rng = random.Random(61)
    for _ in range(50):
        a = VDerElt(2, P([e for e in range(-4, 5) if rng.random() < 0.4]))
        b = VDerElt(2, P([e for e in range(-4, 5) if rng.random() < 0.4]))
        summed = VDerElt(2, a.value + b.value)
        assert vder_raise(summed, 6).value == (
            vder_raise(a, 6).value + vder_raise(b, 6).value
        )


def test_window_width_env_override(monkeypatch):
    from commlab.lamplighter import window_width

    assert window_width(2, 8) == 40
    monkeypatch.setenv("COMMLAB_WINDOW", "17")
    assert window_width(2, 8) == 17
    monkeypatch.delenv("COMMLAB_WINDOW")
    k1 = SubmoduleBasis(1, [[P([0, 1])]])
    monkeypatch.setenv("COMMLAB_WINDOW", "30")
    assert quotient_dim(k1, 2) == 2


def test_comm_infty_canonical_inverts_raise():
    rng = random.Random(26)
    for _ in range(30):
        c = random_comm(rng, max_level=3).lin.canonical()
        for k in (2, 3):
            assert c.raise_to(k * c.level).canonical() == c


def test_comm_infty_singular_rejected():
    with pytest.raises(SingularMatrix):
        CommInftyElt.from_entries(2, [["1", "1"], ["1", "1"]])


def test_flip_conj_is_involution_and_antihomomorphism():
    rng = random.Random(27)
    for _ in range(30):
        a = random_comm(rng, max_level=4).lin
        b = random_comm(rng, max_level=4).lin
        lev = math.lcm(a.level, b.level)
        a, b = a.raise_to(lev), b.raise_to(lev)
        assert a.flip_conj().flip_conj() == a
        assert a.compose(b).flip_conj() == a.flip_conj().compose(b.flip_conj())


def test_flip_conj_of_mult_by_t():
    mult_t = CommInftyElt.from_entries(1, [[R.t_power(1)]])
    assert mult_t.flip_conj().matrix == MatF2Rat([["t^-1"]])
    lvl2 = mult_t.raise_to(2)
    assert lvl2.flip_conj().matrix == MatF2Rat([["0", "1"], ["t^-1", "0"]])


def test_apply_agrees_with_coordinate_matrix_route():
    # independent route: apply the F2(s) matrix to rational coordinate
    # vectors and clear denominators by hand
    from commlab.lamplighter import coords_to_k, k_to_coords

    rng = random.Random(62)
    for _ in range(40):
        lin = random_comm(rng, max_level=4).lin
        m = lin.level
        qpoly = P._raw(lin.den, 0).spread(m)
        k = qpoly * P([e for e in range(-5, 6) if rng.random() < 0.3])
        coords = [R.from_poly(p) for p in k_to_coords(k, m)]
        image = lin.matrix * MatF2Rat([[x] for x in coords], ncols=1)
        polys = [image.entry(i, 0).to_poly() for i in range(m)]
        assert lin.apply(k) == coords_to_k(polys, m)


def test_flip_conj_agrees_with_flipped_application():
    # flip-conjugation must satisfy conj(A)(k) = flip(A(flip k)) pointwise
    rng = random.Random(63)
    for _ in range(40):
        lin = random_comm(rng, max_level=4).lin
        m = lin.level
        conj = lin.flip_conj()
        qpoly = (
            P._raw(lin.den, 0).spread(m) * P._raw(conj.den, 0).spread(m)
        )
        k = (qpoly * qpoly.flip()) * P([e for e in range(-4, 5) if rng.random() < 0.3])
        lhs = conj.apply(k)
        rhs = lin.apply(k.flip())
        assert lhs is not None and rhs is not None
        assert lhs == rhs.flip()


def test_vder_canonical_is_gcd_closed():
    # if a value arises by raising from two divisor levels it also
    # arises from their gcd, so the ascending scan finds the minimum
    rng = random.Random(64)
    for _ in range(100):
        n = rng.choice([4, 6, 8, 12])
        v = VDerElt(n, P([e for e in range(-6, 7) if rng.random() < 0.35]))
        good = []
        for d in range(1, n + 1):
            if n % d:
                continue
            mult = P.geometric(d, n // d)
            if v.value.exact_div(mult) is not None:
                good.append(d)
        for d1 in good:
            for d2 in good:
                assert math.gcd(d1, d2) in good
        assert v.canonical().level == min(good)


# ------------------------------------------------------- full commensurations


def test_compose_identity_and_flip():
    rng = random.Random(28)
    for _ in range(20):
        c = random_comm(rng)
        assert comm_compose(IDENT, c) == c
        assert comm_compose(c, IDENT) == c
    assert comm_compose(FLIP, FLIP) == IDENT


def test_compose_mult_by_t_squares():
    ct = mult_by("t")
    assert comm_compose(ct, ct).lin.matrix == MatF2Rat([["t^2"]])


def test_group_axioms_sampled():
    rng = random.Random(29)
    comms = [random_comm(rng) for _ in range(90)]
    for i in range(0, 87, 3):
        a, b, c = comms[i], comms[i + 1], comms[i + 2]
        assert comm_compose(comm_compose(a, b), c) == comm_compose(a, comm_compose(b, c))
    for c in comms:
        ci = comm_invert(c)
        assert comm_compose(c, ci) == IDENT
        assert comm_compose(ci, c) == IDENT


def test_apply_examples():
    assert comm_apply(IDENT, LampElement(P([2]), 3)) == LampElement(P([2]), 3)
    assert comm_apply(FLIP, LampElement(P([2]), 0)) == LampElement(P([-2]), 0)
    assert comm_apply(mult_by("1+t"), E0) == LampElement(P([0, 1]), 0)


def test_apply_out_of_domain():
    c = mult_by("(1)/(1+t)")
    with pytest.raises(OutOfDomain):
        comm_apply(c, E0)
    lvl2 = diagonal_embed(2, [[0, 1], [1, 0]])
    with pytest.raises(OutOfDomain):
        comm_apply(lvl2, LampElement(P.zero(), 1))


def test_apply_compose_compatibility_sampled():
    rng = random.Random(30)
    for _ in range(40):
        c1, c2 = random_comm(rng), random_comm(rng)
        c12 = comm_compose(c1, c2)
        g = domain_point([c1, c2, c12], rng)
        assert comm_apply(c12, g) == comm_apply(c1, comm_apply(c2, g))


def test_apply_is_homomorphism_on_domain():
    rng = random.Random(31)
    for _ in range(40):
        c = random_comm(rng)
        g = domain_point([c], rng)
        h = domain_point([c], rng)
        assert comm_apply(c, g * h) == comm_apply(c, g) * comm_apply(c, h)


def test_theta_sign():
    assert theta_sign(IDENT) == 1
    assert theta_sign(FLIP) == -1
    conj = comm_from_partial(
        1, SubmoduleBasis.full(1), [E0], LampElement(P([0, 1]), 1)
    )
    assert theta_sign(conj) == 1
    rng = random.Random(32)
    for _ in range(50):
        c1, c2 = random_comm(rng), random_comm(rng)
        assert theta_sign(comm_compose(c1, c2)) == theta_sign(c1) * theta_sign(c2)


def test_compose_deepens_level_when_denominators_require():
    # applying mult-by-1/(1+t) to the derivation with value 1 leaves K,
    # so the composite only exists at level 2, where the geometric
    # multiplier cancels the denominator
    c_den = mult_by("(1)/(1+t)")
    c_der = LampComm.make(VDerElt(1, P([0])), CommInftyElt.identity(1), False)
    comp = comm_compose(c_den, c_der)
    assert comp.level == 2
    assert comp.der == VDerElt(2, P([0]))
    # pointwise agreement on the common domain
    for ell in (-2, -1, 1, 2):
        for k_mult in (P.zero(), P([0, 1]), P([1, 2])):
            g = LampElement(P([0, 1]) * k_mult, 2 * ell)
            assert comm_apply(comp, g) == comm_apply(c_den, comm_apply(c_der, g))
    # the deepened class still satisfies the group laws
    inv = comm_invert(comp)
    assert comm_compose(comp, inv) == IDENT
    assert comm_compose(inv, comp) == IDENT


def test_compose_deepening_with_flip():
    c_den = LampComm.make(
        VDerElt.zero(),
        CommInftyElt.from_entries(1, [[R.from_string("(1)/(1+t+t^2)")]]),
        True,
    )
    c_der = LampComm.make(VDerElt(1, P([1])), CommInftyElt.identity(1), False)
    comp = comm_compose(c_den, c_der)
    assert comm_compose(comm_invert(comp), comp) == IDENT
    g = LampElement(P([0, 1, 2]) * P([0, 3]), comp.level)
    assert comm_apply(comp, g) == comm_apply(c_den, comm_apply(c_der, g))


# ------------------------------------------------------------------ domains


def test_domain_examples():
    basis, level = comm_domain(IDENT)
    assert basis == SubmoduleBasis.full(1) and level == 1
    basis, level = comm_domain(FLIP)
    assert basis == SubmoduleBasis.full(1) and level == 1
    basis, level = comm_domain(mult_by("(1)/(1+t)"))
    assert level == 1 and basis.index_log2 == 1
    assert basis.rows[0][0] == P([0, 1])


def test_domain_of_flip_class_with_asymmetric_denominator():
    # 1 + t + t^3 is not palindromic, so the flip class and the plain
    # class have genuinely different domains
    plain = LampComm.make(
        VDerElt.zero(),
        CommInftyElt.from_entries(1, [[R.from_string("(1)/(1+t+t^3)")]]),
        False,
    )
    flipped = LampComm.make(plain.der, plain.lin, True)
    d_plain, _ = comm_domain(plain)
    d_flip, _ = comm_domain(flipped)
    assert d_plain.rows[0][0] == P([0, 1, 3])
    assert d_flip.rows[0][0] == P([0, 2, 3])  # reversed polynomial
    assert d_plain != d_flip
    # membership in the reported domain is exactly applicability
    for k in (P([0, 1, 3]), P([0, 2, 3]), P([0, 1, 3]) * P([1])):
        for c, dom in ((plain, d_plain), (flipped, d_flip)):
            if dom.contains(k):
                comm_apply(c, LampElement(k, 0))
            else:
                with pytest.raises(OutOfDomain):
                    comm_apply(c, LampElement(k, 0))


def test_domain_is_exact():
    rng = random.Random(33)
    for _ in range(25):
        c = random_comm(rng, max_level=3)
        basis, level = comm_domain(c)
        assert level == c.level
        for g in basis.generators_as_k():
            comm_apply(c, LampElement(g, 0))  # never raises
        # elements outside the domain are rejected
        for _ in range(10):
            k = P([e for e in range(-5, 6) if rng.random() < 0.3])
            if basis.contains(k):
                comm_apply(c, LampElement(k, 0))
            else:
                with pytest.raises(OutOfDomain):
                    comm_apply(c, LampElement(k, 0))


def test_domain_image_is_finite_index():
    from commlab.lamplighter import k_to_coords

    rng = random.Random(34)
    for _ in range(15):
        c = random_comm(rng, max_level=3)
        basis, level = comm_domain(c)
        images = [
            comm_apply(c, LampElement(g, 0)).k for g in basis.generators_as_k()
        ]
        img = SubmoduleBasis.from_generators(
            level, [k_to_coords(k, level) for k in images]
        )
        assert img.index_log2 >= 0


# ------------------------------------------------------- diagonal embedding


def test_diagonal_embed_examples():
    assert diagonal_embed(1, [[1]]) == IDENT
    sw = diagonal_embed(2, [[0, 1], [1, 0]])
    assert sw.level == 2
    for k in (-2, 0, 2):
        assert comm_apply(sw, LampElement.lamp(k)) == LampElement.lamp(k + 1)
        assert comm_apply(sw, LampElement.lamp(k + 1)) == LampElement.lamp(k)
    with pytest.raises(SingularMatrix):
        diagonal_embed(2, [[1, 1], [1, 1]])


def test_diagonal_embed_homomorphism_sampled():
    import itertools

    from commlab.polymat import BitMat

    mats = []
    for bits in itertools.product([0, 1], repeat=9):
        rows = [list(bits[0:3]), list(bits[3:6]), list(bits[6:9])]
        if BitMat.from_lists(rows).is_invertible():
            mats.append(rows)
    assert len(mats) == 168
    rng = random.Random(35)
    embeds = {}
    for rows in mats:
        embeds[tuple(map(tuple, rows))] = diagonal_embed(3, rows)
    assert len(set(embeds.values())) == 168  # injective
    for _ in range(300):
        m1, m2 = rng.choice(mats), rng.choice(mats)
        prod = [
            [sum(m1[i][k] * m2[k][j] for k in range(3)) % 2 for j in range(3)]
            for i in range(3)
        ]
        assert comm_compose(
            embeds[tuple(map(tuple, m1))], embeds[tuple(map(tuple, m2))]
        ) == embeds[tuple(map(tuple, prod))]


# -------------------------------------------------------------- quotient dim


def test_quotient_dim_examples():
    K = SubmoduleBasis.full(1)
    assert quotient_dim(K, 1) == 1
    assert quotient_dim(K, 3) == 3
    K2 = SubmoduleBasis(1, [[P([0, 1])]])
    assert quotient_dim(K2, 2) == 2


def test_quotient_dim_matches_claim():
    rng = random.Random(36)
    for _ in range(30):
        k1 = random_submodule(rng, max_level=2)
        for m in range(1, 9):
            if m % k1.level == 0:
                assert quotient_dim(k1, m) == m


def test_quotient_dim_level_mismatch():
    ZERO, ONE = P.zero(), P.one()
    k1 = SubmoduleBasis(2, [[P([0, 1]), ZERO], [ZERO, ONE]])
    with pytest.raises(NotDivisible):
        quotient_dim(k1, 3)
    assert quotient_dim(k1, 4) == 4


# -------------------------------------------------- reconstruction round trip


def test_comm_from_partial_examples():
    conj = comm_from_partial(
        1, SubmoduleBasis.full(1), [E0], LampElement(P([0, 1]), 1)
    )
    assert conj.der == VDerElt(1, P([0, 1]))
    assert conj.lin.matrix == MatF2Rat.identity(1)
    assert not conj.flip
    assert comm_from_partial(
        1, SubmoduleBasis.full(1), [E0], LampElement(P.zero(), 1)
    ) == IDENT
    assert comm_from_partial(
        1, SubmoduleBasis.full(1), [E0], LampElement(P.zero(), -1)
    ) == FLIP


def test_comm_from_partial_errors():
    full = SubmoduleBasis.full(1)
    with pytest.raises(ExponentMismatch):
        comm_from_partial(1, full, [E0], LampElement(P.zero(), 2))
    with pytest.raises(NotAHomomorphism):
        comm_from_partial(1, full, [LampElement(P([0]), 1)], LampElement(P.zero(), 1))
    full2 = SubmoduleBasis.full(2)
    with pytest.raises(NotAHomomorphism):
        comm_from_partial(
            2, full2, [E0, E0], LampElement(P.zero(), 2)
        )  # dependent images


def test_round_trip_through_generator_images():
    rng = random.Random(38)
    for _ in range(30):
        c = random_comm(rng, max_level=4)
        basis, level = comm_domain(c)
        gen_images = [
            comm_apply(c, LampElement(g, 0)) for g in basis.generators_as_k()
        ]
        t_image = comm_apply(c, LampElement(P.zero(), level))
        assert comm_from_partial(level, basis, gen_images, t_image) == c


# ------------------------------------------------------------- serialization


def test_lampcomm_json_round_trip():
    rng = random.Random(39)
    for _ in range(25):
        c = random_comm(rng)
        assert LampComm.from_json(c.to_json()) == c
