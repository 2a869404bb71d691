from fractions import Fraction

import pytest
from hypothesis import given

from flagcalc.catalog import (FIXTURES, StructureConstants, abelian_constants, fixture_text,
                              frame_from_structure_constants, full_report, su2_constants,
                              su2_family)
from flagcalc.dsl import parse_document
from flagcalc.errors import InputError, JacobiViolation, NotAPseudoFlag, NotSupported
from flagcalc.exterior import exterior_derivative, wedge
from flagcalc.reduction import ConjugationSpec, check_cr_reality
from flagcalc.scalar import I, symbols
from strategies import rationals, su2_points

x, y, z, a = symbols("x y z a")


def test_su2_frame():
    f = frame_from_structure_constants(su2_constants())
    al, be, ga = f.basis_forms()
    assert (exterior_derivative(al) + wedge(be, ga)).is_zero()
    assert (exterior_derivative(ga) + wedge(al, be)).is_zero()


def test_abelian_frame():
    f = frame_from_structure_constants(abelian_constants(3))
    assert all(exterior_derivative(b).is_zero() for b in f.basis_forms())


def test_antisymmetry_filled_in():
    sc = StructureConstants(3, {(1, 2, 3): 1})
    assert sc[(1, 3, 2)] == -1


def test_antisymmetry_conflict():
    with pytest.raises(InputError):
        StructureConstants(3, {(1, 2, 3): 1, (1, 3, 2): 1})


def test_jacobi_violation():
    # d s1 = s2 s3, d s2 = s1 s2, d s3 = 0 gives d^2 s1 = s1 s2 s3
    sc = StructureConstants(3, {(1, 2, 3): -1, (2, 1, 2): -1})
    with pytest.raises(JacobiViolation):
        frame_from_structure_constants(sc)


def test_standard_point():
    out = full_report(su2_family(r1=1, r2=0, s1=0, s2=1))
    assert out.failed_checks() == []
    assert out.reduction.structure.params == {"x": 0, "y": -1, "z": 1}
    assert out.flat


def test_rs_matches_xyz():
    r1, r2, s1 = Fraction(2), Fraction(1, 3), Fraction(-1)
    rs = full_report(su2_family(r1=r1, r2=r2, s1=s1))
    p = rs.reduction.structure.params
    xyz = full_report(su2_family(**p))
    assert rs.Q1 == xyz.Q1 and rs.Q2 == xyz.Q2 and rs.G == xyz.G


def test_rs_symbolic():
    out = full_report(su2_family(r1="r1", r2="r2", s1="s1"))
    assert out.failed_checks() == [] and out.structure.ok


def test_r1_zero_needs_s2():
    with pytest.raises(InputError):
        su2_family(r1=0, r2=1, s1=1)


def test_fiber_dependent_parameter():
    with pytest.raises(NotSupported):
        su2_family(x="a", y=1, z="-1-a^2")


def test_off_relation():
    with pytest.raises(NotAPseudoFlag):
        su2_family(x=1, y=1, z=1)


def test_mixed_parameters():
    with pytest.raises(InputError):
        su2_family(x=0, r1=1, r2=0, s1=0)


def test_real_form_point():
    # x imaginary and z = conj(y) put the point on the real form
    out = full_report(su2_family(x=I * Fraction(5, 4), y=Fraction(3, 4), z=Fraction(3, 4)))
    assert out.failed_checks() == []
    conj = ConjugationSpec.parse(out.reduction.xframe, {
        "a": "1/a", "theta": "theta", "theta1": "-i*theta2", "theta2": "-i*theta1",
        "lam": "-lam"})
    rr = check_cr_reality(out.connection, conj, out)
    assert rr.ok
    assert out.Q1 == conj.scalar(out.Q2, out.relations)


def test_fixtures_parse():
    for name in FIXTURES:
        frame, rep = parse_document(fixture_text(name)).build_frame()
        assert rep.usable


def test_unknown_fixture():
    with pytest.raises(InputError):
        fixture_text("nope.flag")


@given(su2_points())
def test_flat_iff_x_zero(pt):
    px, py, pz = pt
    out = full_report(su2_family(x=px, y=py, z=pz))
    assert out.failed_checks() == []
    assert out.flat == (px == 0)


@given(rationals, rationals, rationals)
def test_rs_points(r1, r2, s1):
    if r1 == 0:
        return
    out = full_report(su2_family(r1=r1, r2=r2, s1=s1))
    p = out.reduction.structure.params
    assert p["x"] ** 2 + p["y"] * p["z"] == -1
    assert out.flat == (p["x"] == 0)
