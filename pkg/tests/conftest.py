import pytest

import fracloop.dressed as dr
import fracloop.fock as fk


@pytest.fixture(scope="session")
def fock():
    return fk.FockSpace(fk.build_structure_constants("su2"), n_f=3)


@pytest.fixture(scope="session")
def dctx():
    return dr.build_dressed_context(n_f=3, p=0, seed=7)
