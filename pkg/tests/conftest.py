import pytest

from etalecover.arith import make_extension
from etalecover.cover import build_etale_cover
from etalecover.geometry import VarietyInstance
from etalecover.ideal import HomIdeal
from etalecover.poly import ProjPoint, parse_form
from etalecover.sections import SectionSearchConfig


def point(p, k, *coords):
    field_ = make_extension(p, k)
    return ProjPoint(tuple(field_.element(c) for c in coords))


def conic_instance():
    p = 3
    F = parse_form("x*z-y^2", p, 3)
    D = HomIdeal([parse_form("y", p, 3), parse_form("z", p, 3)])
    return VarietyInstance(p, F, divisor_D=D, S=[point(p, 1, 0, 0, 1)])


@pytest.fixture(scope="session")
def conic_V():
    return conic_instance()


@pytest.fixture(scope="session")
def conic_cover(conic_V):
    return build_etale_cover(conic_V, SectionSearchConfig())
