import json

import pytest

from novsweep import generate_example, run_sssa
from novsweep.complex import random_complexes
from novsweep.ring import parse_scalar

CORPUS_SIZE = 240


def chain(**coeffs):
    """chain(h4="1", h3="1/(t-1)") -> {4: 1, 3: 1/(t-1)}."""
    return {int(k[1:]): parse_scalar(v) for k, v in coeffs.items()}


@pytest.fixture(scope="session")
def torus_a():
    return generate_example("torus_a")


@pytest.fixture(scope="session")
def torus_b():
    return generate_example("torus_b")


@pytest.fixture(scope="session")
def sweep_a(torus_a):
    return run_sssa(torus_a)


@pytest.fixture(scope="session")
def sweep_b(torus_b):
    return run_sssa(torus_b)


@pytest.fixture(scope="session")
def corpus():
    return list(random_complexes(CORPUS_SIZE, max_size=14))


def write_doc(path, m, indices, entries):
    doc = {"m": m, "indices": indices, "entries": entries}
    path.write_text(json.dumps(doc))
    return str(path)
