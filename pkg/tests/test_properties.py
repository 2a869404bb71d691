"""Randomized identities on the coordinate family and on rational points
of the SU(2) family.  Exact arithmetic throughout."""

import pytest
from hypothesis import given

from flagcalc.catalog import coordinate_pseudo_flag, full_report, su2_family
from flagcalc.dsl import parse_scalar
from flagcalc.reduction import (curvature_coefficients, embed_to_connection, normalize,
                                perturb, reduce_pseudo_flag)
from strategies import coordinate_functions, polynomials, su2_points

shifts = polynomials(("u", "v", "w", "a"), max_terms=3, max_degree=2, complex_ok=True)


def structure(fg):
    f, g, consts = fg
    return coordinate_pseudo_flag(f, g, consts)


def holds(r):
    return all(v.is_zero() for v in r.residuals().values())


def same_reduction(r1, r2):
    return ((r1.theta11 - r2.theta11).is_zero() and (r1.tau1 - r2.tau1).is_zero()
            and (r1.tau2 - r2.tau2).is_zero())


@given(coordinate_functions())
def test_reduction_is_normalized(fg):
    r = reduce_pseudo_flag(structure(fg))
    assert holds(r)
    assert r.tau11 == 0 and r.tau22 == 0


@given(coordinate_functions(), shifts)
def test_normalize_idempotent(fg, A):
    r = normalize(perturb(reduce_pseudo_flag(structure(fg)), A))
    assert same_reduction(normalize(r), r)


@given(coordinate_functions(), shifts)
def test_unique_under_perturbation(fg, A):
    r = reduce_pseudo_flag(structure(fg))
    shifted = perturb(r, A)
    assert holds(shifted)
    assert same_reduction(normalize(shifted), r)


CHECKS = {"S11 = tau12*tau21", "S22 = tau12*tau21", "R0 = W12 - W21",
          "G from S11 identity = G from S22 identity"}


def identities_hold(fg):
    r = reduce_pseudo_flag(structure(fg))
    rep = curvature_coefficients(r)
    embed_to_connection(r, rep)
    assert set(rep.checks) >= CHECKS
    assert rep.failed_checks() == []


@given(coordinate_functions(symbolic=False))
def test_curvature_identities_rational(fg):
    identities_hold(fg)


@given(coordinate_functions(symbolic=True))
def test_curvature_identities_symbolic(fg):
    identities_hold(fg)


@given(coordinate_functions())
def test_full_pipeline(fg):
    rep = full_report(structure(fg))
    assert rep.failed_checks() == []
    assert rep.structure.ok and rep.bianchi.ok and rep.integrand.agrees


@given(su2_points())
def test_su2_rational_points(pt):
    x, y, z = pt
    rep = full_report(su2_family(x=x, y=y, z=z))
    assert rep.failed_checks() == []
    assert rep.R == -x
    assert rep.S11 == rep.S22 == y * z


@given(su2_points(), polynomials(("x", "a"), max_terms=3, max_degree=2))
def test_su2_unique_under_perturbation(pt, A):
    x, y, z = pt
    r = reduce_pseudo_flag(su2_family(x=x, y=y, z=z))
    assert same_reduction(normalize(perturb(r, A)), r)


@pytest.mark.parametrize("xs", ["x", "2*x - 1", "1/3"])
def test_su2_symbolic_x(xs):
    # y = 1, z = -(1 + x^2) keeps the family symbolic without a relation
    x = parse_scalar(xs)
    rep = full_report(su2_family(x=x, y=1, z=-(1 + x * x)))
    assert rep.failed_checks() == []
