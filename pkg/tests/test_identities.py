from fractions import Fraction

import pytest
from sympy import divisors

from quatlat import binary as bf
from quatlat.identities import (
    average_binary,
    check_certificates,
    check_identity,
    configuration_from_json,
    configuration_to_json,
    count_represented,
    decompositions,
    genus_mass,
    genus_omax,
    lhs_identity,
    lhs_prime_level,
    proof_inequality,
    proposition_by_summation,
    rhs_identity,
    rpd_average,
    siegel_average,
    theorem_reports,
    verify_proposition,
)
from quatlat.lattice import count_binary, count_unary

CONFIGS = [(2, 2), (3, 3), (5, 5), (11, 11), (6, 2), (6, 3), (10, 2), (10, 5), (15, 3), (15, 5)]


def test_decompositions():
    assert decompositions(6) == [2, 3]
    assert decompositions(30) == [2, 3, 5, 30]
    with pytest.raises(ValueError):
        decompositions(12)


@pytest.mark.parametrize("N, N1", CONFIGS)
def test_certificates(config, N, N1):
    assert check_certificates(config(N, N1)) == []


def test_average_binary_n2_d3(config):
    cfg = config(2, 2)
    L = cfg.quaternary[(1, 1)]
    assert average_binary(L, 3) == Fraction(count_binary(L, (1, 1, 1)), 6)


def test_average_independent_of_representative(config):
    L = config(11, 11).quaternary[(1, 2)]
    for T in bf.class_list(44):
        moved = bf.apply_sl2(T.as_tuple(), ((3, 1), (2, 1)))
        assert count_binary(L, moved) == count_binary(L, T.as_tuple())


def test_prime_level_small_case(config):
    cfg = config(2, 2)
    rec = check_identity(cfg, 1, 1, 3)
    assert rec.prime_applicable and rec.prime_match
    assert rec.prime_lhs == Fraction(rhs_identity(cfg, 1, 1, 3), 2)


@pytest.mark.parametrize("N, N1", CONFIGS)
def test_identity_all_d(config, N, N1):
    cfg = config(N, N1)
    for d in range(3, 121):
        if not bf.is_discriminant(-d):
            continue
        for i, j in cfg.pairs():
            rec = check_identity(cfg, i, j, d)
            assert rec.match, (N, N1, i, j, d, rec.lhs, rec.rhs)
            if rec.prime_applicable:
                assert rec.prime_match, (N, i, j, d)


def test_identity_vanishes_with_rhs(config):
    cfg = config(2, 2)
    assert rhs_identity(cfg, 1, 1, 7) == 0
    assert lhs_identity(cfg, 1, 1, 7) == 0


def test_n6_coprime_fundamental(config):
    cfg = config(6, 2)
    for d in [7, 19, 23, 31, 35, 43, 47]:
        total = sum(average_binary(cfg.rpd[(1, 1, s)], d, True) for s in divisors(6))
        assert total == rhs_identity(cfg, 1, 1, d)


def test_prime_level_at_multiples_of_n(config):
    """At N | d the level part N_d is 1, and the sum carries no factor 1/2."""
    cfg = config(2, 2)
    for d in [4, 8, 20, 24]:
        assert lhs_prime_level(cfg, 1, 1, d) == lhs_identity(cfg, 1, 1, d) == rhs_identity(cfg, 1, 1, d)


def test_siegel_single_class(config):
    cfg = config(2, 2)
    assert len(cfg.genus) == 1
    assert genus_mass(cfg.genus) == Fraction(1, 1152) and genus_omax(cfg.genus) == 1152
    L = cfg.genus[0].lattice
    assert siegel_average(cfg.genus, (1, 1, 1)) == count_binary(L, (1, 1, 1))


@pytest.mark.parametrize("N, N1", CONFIGS)
def test_siegel_t_independence(config, N, N1):
    cfg = config(N, N1)
    for d in [20, 23, 47, 56, 71, 84]:
        vals = {siegel_average(cfg.genus, T) for T in bf.class_list(d)}
        assert len(vals) == 1


@pytest.mark.parametrize("N, N1", CONFIGS)
def test_partial_duals_stay_in_genus(config, N, N1):
    """Every I_ij^{*,s} is isometric to some I_ij, so the genus classes are those of the I_ij."""
    cfg = config(N, N1)
    base = {cfg.genus_index[(i, j, 1)] for i, j in cfg.pairs()}
    assert set(cfg.genus_index.values()) == base == set(range(len(cfg.genus)))
    for key, L in cfg.rpd.items():
        assert L.discriminant() == N * N and L.level() == N


@pytest.mark.parametrize("N, N1", CONFIGS)
def test_weighted_proposition(config, N, N1):
    cfg = config(N, N1)
    for d in range(3, 121):
        if bf.is_fundamental(d):
            p = verify_proposition(cfg, d)
            assert p.t_independent
            assert p.weighted_match, (N, N1, d)
            assert proposition_by_summation(cfg, d) == p.rhs


def test_proposition_literal_ratio_is_eps(config):
    cfg = config(11, 11)
    for d in range(3, 121):
        if bf.is_fundamental(d):
            p = verify_proposition(cfg, d)
            if p.rhs:
                assert p.ratio == bf.unit_count(bf.class_list(d)[0])


def test_proposition_rejects_nonfundamental(config):
    with pytest.raises(ValueError):
        verify_proposition(config(2, 2), 12)


def test_local_obstruction_zero(config):
    cfg = config(2, 2)
    p = verify_proposition(cfg, 7)
    assert p.lhs == p.rhs == 0


@pytest.mark.parametrize("N, N1", CONFIGS)
def test_inequality_per_lattice(config, N, N1):
    cfg = config(N, N1)
    for d in range(3, 101):
        if bf.is_fundamental(d):
            for rec in proof_inequality(cfg, d):
                assert rec.holds_termwise
                assert rec.rpd <= bf.divisor_count(bf.Nd(N, d)) * rec.bound


def test_nu_containment(config):
    cfg = config(15, 3)
    for d in range(3, 80):
        if not bf.is_discriminant(-d):
            continue
        for i, j in cfg.pairs():
            nu, nu_p = count_represented(cfg, i, j, bf.Nd(15, d), d)
            assert nu_p <= nu <= bf.class_number(d)


def test_nu_prime_matches_average(config):
    cfg = config(11, 11)
    for i, j in cfg.pairs():
        _, nu_p = count_represented(cfg, i, j, 11, 3)
        assert (nu_p > 0) == (average_binary(cfg.quaternary[(i, j)], 3) > 0)


def test_rpd_average_sum(config):
    cfg = config(6, 3)
    d = 23
    assert rpd_average(cfg, 1, 1, 6, d) == sum(average_binary(cfg.rpd[(1, 1, s)], d) for s in (1, 2, 3, 6))
    with pytest.raises(ValueError):
        rpd_average(cfg, 1, 1, 5, d)


def test_reports(config):
    cfg = config(11, 11)
    rep = theorem_reports(cfg, range(0, 61))
    assert rep.failures() == []
    assert all(r.residual is not None for r in rep.rows if r.fundamental)
    assert all(r.nu <= r.h for r in rep.rows)
    empty = theorem_reports(cfg, [])
    assert empty.rows == [] and empty.failures() == []
    only = theorem_reports(cfg, range(3, 61), fundamental_only=True)
    assert all(r.fundamental for r in only.rows)
    with pytest.raises(ValueError):
        theorem_reports(cfg, [3], kappa=Fraction(3, 2))


def test_report_serialisation(config):
    cfg = config(6, 2)
    rep = theorem_reports(cfg, range(3, 30))
    data = rep.to_data()
    assert data["rows"][0]["lhs"].count("/") == 1
    lines = rep.csv_text().splitlines()
    assert lines[0].startswith("N,N1,N2,i,j,d,fundamental,admissible,h,lhs,rhs,match,nu,nu_prime,bound_rhs")
    assert len(lines) == 1 + len(rep.rows)


def test_configuration_json_roundtrip(config):
    cfg = config(11, 11)
    back = configuration_from_json(configuration_to_json(cfg))
    assert back.genus == cfg.genus and back.rpd == cfg.rpd and back.ternaries == cfg.ternaries
    assert back.classes.unit_counts == cfg.classes.unit_counts


@pytest.mark.parametrize("N, N1", CONFIGS + [(7, 7), (13, 13)])
def test_local_criterion_matches_genus(config, N, N1):
    """Some L_i represents a fundamental d exactly when d is locally admissible."""
    cfg = config(N, N1)
    for d in range(3, 301):
        if bf.is_fundamental(d):
            assert bf.local_admissible(d, N1, N // N1) == any(count_unary(L, d) > 0 for L in cfg.ternaries), d
