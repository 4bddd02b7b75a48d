from fractions import Fraction

import pytest

from fields.field import TruncationWindow
from lattice.cosets import mv_module, vpp_module
from lattice.fock import Params


@pytest.fixture(scope="session")
def P32():
    return Params(3, 2)


@pytest.fixture(scope="session")
def V32(P32):
    return vpp_module(P32)


@pytest.fixture(scope="session")
def MV32(P32):
    return mv_module(P32)


@pytest.fixture(scope="session")
def window2(P32):
    return TruncationWindow.on_vpp(P32, Fraction(2))


@pytest.fixture(scope="session")
def window3(P32):
    return TruncationWindow.on_vpp(P32, Fraction(3))
