from __future__ import annotations

import pytest

from spinchern import MoleculeSpec

from _oracles import DATA_DIR


@pytest.fixture(scope="session")
def molecule2() -> MoleculeSpec:
    return MoleculeSpec.from_json(DATA_DIR / "two_spin.json")


@pytest.fixture(scope="session")
def molecule3() -> MoleculeSpec:
    return MoleculeSpec.from_json(DATA_DIR / "three_spin.json")


@pytest.fixture(scope="session")
def molecule4() -> MoleculeSpec:
    return MoleculeSpec.from_json(DATA_DIR / "four_spin.json")
