import pytest
from hypothesis import given

from flagcalc.catalog import fixture_text
from flagcalc.dsl import parse_document, parse_expression, parse_scalar
from flagcalc.errors import DuplicateDeclaration, ParseError, UndeclaredName
from flagcalc.exterior import FrameSpace, coefficient, wedge
from flagcalc.scalar import I, ONE, symbols
from strategies import scalars

x, y, z, a = symbols("x y z a")


@pytest.fixture(scope="module")
def frame():
    return FrameSpace.build("theta Z1 Z2 lam",
                            {"theta": "Z1^Z2", "Z1": "0", "Z2": "0", "lam": "0", "a": "a*lam"},
                            constants="x y z", fiber="a")


def test_wedge_binds_looser_than_product(frame):
    th, Z1, Z2, lam = frame.basis_forms()
    f = parse_expression("x*theta^Z1 + 2*Z2^lam", frame=frame)
    assert (f - wedge(th * x, Z1) - wedge(Z2, lam) * 2).is_zero()
    g = parse_expression("theta^(x*Z1 + y*Z2)", frame=frame)
    assert coefficient(g, ["theta", "Z2"]) == y


def test_caret_integer_is_power(frame):
    assert parse_expression("x^2*y", frame=frame) == x * x * y
    assert parse_expression("x^-2", frame=frame) == ONE / (x * x)
    assert parse_expression("(1+i)^2", frame=frame) == 2 * I


def test_rational_literals_and_unit():
    assert parse_scalar("3/2*x*y*a^2") == x * y * a ** 2 * 3 / 2
    assert parse_scalar("i*i") == -ONE


def test_unicode_identifiers():
    f = FrameSpace.build("θ ω", {"θ": "ω^θ", "ω": "0"})
    assert str(parse_expression("θ^ω", frame=f)) == "θ^ω"


def test_parse_error_position_and_expected(frame):
    with pytest.raises(ParseError) as info:
        parse_expression("x + * y", frame=frame)
    e = info.value
    assert (e.line, e.column) == (1, 5)
    assert "name" in e.expected


def test_undeclared_name_in_expression(frame):
    with pytest.raises(UndeclaredName):
        parse_expression("q*theta", frame=frame)


def test_document_su2():
    doc = parse_document(fixture_text("su2.flag"))
    assert doc.basis == ["theta", "Z1", "Z2", "lam"]
    assert doc.constants == ["x", "y", "z"] and doc.fiber == ["a"]
    assert set(doc.gauge) == {"alpha", "beta", "gamma", "delta", "epsilon"}
    frame, report = doc.build_frame()
    assert report.usable
    assert "x^2 -> -y*z - 1" in repr(frame.relations)
    lam = frame.basis_form("lam")
    assert (frame.fiber_d[frame.fiber_ids[0]] - lam * a).is_zero()


def test_relation_as_equation():
    doc = parse_document("[constants]\nx y\n[relations]\nx^2 = y - 1\n[frame]\ne\n"
                         "[differentials]\nd e = 0\n")
    frame, _ = doc.build_frame()
    assert frame.relations.is_zero(x * x - y + 1)


def test_duplicate_and_undeclared_positions():
    with pytest.raises(DuplicateDeclaration) as info:
        parse_document("[frame]\ne f\n[constants]\nx e\n")
    assert (info.value.line, info.value.column) == (4, 3)
    with pytest.raises(UndeclaredName) as info:
        parse_document("[frame]\ne\n[differentials]\nd e = q*e^e\n")
    assert (info.value.line, info.value.column) == (4, 7)
    with pytest.raises(DuplicateDeclaration):
        parse_document("[frame]\ne\n[differentials]\nd e = 0\nd e = 0\n")


def test_structural_errors():
    with pytest.raises(ParseError):
        parse_document("e f\n")
    with pytest.raises(ParseError):
        parse_document("[nonsense]\n")
    with pytest.raises(ParseError):
        parse_document("[coordinates]\na b\n")
    with pytest.raises(ParseError):
        parse_document("[frame]\ne\n[pseudoflag]\ncontact = e\n")
    with pytest.raises(ParseError):
        parse_document("[constants]\nx\n[differentials]\nd x = 0\n")


def test_gauge_aliases_map_to_greek():
    doc = parse_document("[frame]\ne\n[differentials]\nd e = 0\n[gauge]\na = alpha\nb = 2\n")
    assert doc.gauge["alpha"].text == "alpha" and doc.gauge["beta"].text == "2"
    assert doc.gauge_symbols == ["alpha"]


@given(scalars())
def test_scalar_round_trip(s):
    assert parse_scalar(str(s)) == s
