import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anticyclo.eigenforms import EigenformRecord
from anticyclo.padic import local_ring
from anticyclo.quadfield import QuadFieldContext

from oracles import synth_eigen_coeffs

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "anticyclo" / "data"


@pytest.fixture(scope="session")
def form_11a():
    from anticyclo.eigenforms import load_form

    return load_form(DATA_DIR / "form_11a.json")


@pytest.fixture(scope="session")
def form_19a():
    from anticyclo.eigenforms import load_form

    return load_form(DATA_DIR / "form_19a.json")


def make_synthetic_pair(seed: int = 0, bound: int = 200):
    """Congruent-mod-5 formal pair at levels 2 and 3; every gating
    hypothesis holds over Q(sqrt(-71)) with p = 5."""
    rng = random.Random(seed)
    base = {2: 1, 3: -1, 5: 2}

    def ap_a(q):
        if q in base:
            return base[q]
        return (q % 5) - 2 + 5 * rng.randrange(-1, 2)

    cache = {}

    def ap_a_cached(q):
        if q not in cache:
            cache[q] = ap_a(q)
        return cache[q]

    def ap_b(q):
        if q == 3:
            return -1  # multiplicative coefficient at B's level prime
        return ap_a_cached(q) + 5 * rng.randrange(-1, 2)

    a = EigenformRecord(f"synthA{seed}", 2, 2,
                        tuple(synth_eigen_coeffs(2, ap_a_cached, bound)))
    b = EigenformRecord(f"synthB{seed}", 3, 2,
                        tuple(synth_eigen_coeffs(3, ap_b, bound)))
    return a, b


@pytest.fixture(scope="session")
def synthetic_pair():
    return make_synthetic_pair(0)


@pytest.fixture(scope="session")
def ctx71():
    return QuadFieldContext.create(-71, 5, prec=12)


@pytest.fixture(scope="session")
def ctx164_p5():
    return QuadFieldContext.create(-164, 5, prec=12)


@pytest.fixture(scope="session")
def ctx164_p3():
    return QuadFieldContext.create(-164, 3, prec=12)


@pytest.fixture
def rng():
    return random.Random(20240811)


@pytest.fixture(scope="session")
def z5():
    return local_ring(5)


def write_form(tmp_path: Path, record: EigenformRecord) -> str:
    path = tmp_path / f"{record.label}.json"
    path.write_text(json.dumps(record.to_json_dict()), encoding="utf-8")
    return str(path)
