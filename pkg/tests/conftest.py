"""
Pytest configuration and shared fixtures.

The q=3, n=1 complex (5,616 triangles) is built once per session; every fixture that
derives from it is session-scoped as well. Tests that mutate a code call
`fresh_code3` instead of sharing `code3`.
"""

import numpy as np
import pytest

from hdxcodes.services import global_code as gc
from hdxcodes.services.algebra import Ring, counter_rng, primitive_modulus
from hdxcodes.services.coset_complex import ComplexInstance, build_complex


@pytest.fixture(scope="session")
def ring3() -> Ring:
    """F_3[t]/<t + 1>, the ring of the reference instance."""
    return primitive_modulus(3, 1).as_ring(3)


@pytest.fixture(scope="session")
def complex3(ring3: Ring) -> ComplexInstance:
    return build_complex(ring3)


@pytest.fixture(scope="session")
def code3(complex3: ComplexInstance) -> gc.GlobalCodeSpec:
    return gc.assemble_code(complex3, (1, 1, 1))


@pytest.fixture
def fresh_code3(complex3: ComplexInstance) -> gc.GlobalCodeSpec:
    return gc.assemble_code(complex3, (1, 1, 1))


@pytest.fixture
def rng() -> np.random.Generator:
    return counter_rng(1234, 0)


@pytest.fixture(scope="session")
def member3(code3: gc.GlobalCodeSpec) -> np.ndarray:
    """A fixed codeword of C_(1,1,1) on the q=3 instance."""
    return gc.random_codeword(code3, counter_rng(99, 1))
