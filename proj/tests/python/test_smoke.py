import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import mgaopt

SRC = Path(os.environ.get("MGA_SOURCE_DIR", Path(__file__).resolve().parents[2]))
CATALOG = SRC / "data" / "catalog.json"
TOY = SRC / "tests" / "data" / "earth_mars.json"


@pytest.fixture(scope="module")
def catalog():
    return mgaopt.Catalog.load(CATALOG)


@pytest.fixture(scope="module")
def toy():
    return mgaopt.Problem.load(TOY)


def test_catalog_lookup(catalog):
    assert 3 in catalog and 4 in catalog
    assert catalog.id(catalog.name(3)) == 3
    r = catalog.position(3, 0.0)
    assert 0.97 < math.hypot(*r) / 1.495978707e8 < 1.03


def test_dates_round_trip():
    assert mgaopt.mjd2000(2000, 1, 1) == 0.0
    assert mgaopt.date(mgaopt.mjd2000(1997, 10, 6)).startswith("1997-10-06")


def test_problem_shape(toy):
    assert toy.dimension == len(toy.lower) == len(toy.upper) == len(toy.variables)
    assert all(lo <= hi for lo, hi in zip(toy.lower, toy.upper))


def test_objective_matches_decode(toy):
    y = [(lo + hi) / 2 for lo, hi in zip(toy.lower, toy.upper)]
    f = toy.objective(y)
    d = toy.decode(y)
    assert d["total_dv_kms"] == pytest.approx(f, rel=1e-12)
    assert len(d["legs"]) == toy.n_phases


def test_wrong_length_raises(toy):
    with pytest.raises(mgaopt.ValidationError):
        toy.decode([0.0])


def test_search_is_reproducible_and_within_budget(toy):
    params = mgaopt.SearchParams.from_problem_file(TOY)
    params.max_evals = 3000
    params.seed = 7
    a = mgaopt.search(toy, params)
    b = mgaopt.search(toy, params)
    assert a.evals <= params.max_evals
    assert a.entries == b.entries
    assert a.best_f == pytest.approx(toy.objective(a.best_y), rel=1e-12)
    assert a.best_f < mgaopt.PENALTY


def test_minimize_python_objective():
    params = mgaopt.SearchParams()
    params.max_evals = 4000
    r = mgaopt.minimize(lambda y: sum((v - 0.3) ** 2 for v in y), [-1.0] * 3, [1.0] * 3, params)
    assert r.best_f < 1e-6
    assert np.allclose(r.best_y, 0.3, atol=1e-3)


def test_bad_params_raise():
    params = mgaopt.SearchParams()
    params.max_evals = 0
    with pytest.raises(mgaopt.ValidationError):
        params.validate()


def test_multistart_budget(toy):
    r = mgaopt.multistart(toy, samples=20, best=2, runs=2, seed=3, max_evals=1500)
    assert 0 < r.evals <= 1500
    assert len(r.run_best) == 2
    assert r.best_f == min(f for _, f in r.entries)


def test_grid_matches_pointwise_cost(catalog):
    t0, tof, dv = mgaopt.grid(catalog, 3, 4, (0.0, 600.0), (150.0, 350.0), resolution=4)
    assert dv.shape == (4, 4)
    assert dv[2, 1] == mgaopt.two_impulse_cost(catalog, 3, 4, t0[2], tof[1])


def test_write_archive(toy, tmp_path):
    params = mgaopt.SearchParams.from_problem_file(TOY)
    params.max_evals = 2000
    r = mgaopt.search(toy, params)
    r.write(tmp_path, toy)
    doc = json.loads((tmp_path / "archive.json").read_text())
    assert len(doc["entries"]) == len(r.entries)
    rows = (tmp_path / "archive.csv").read_text().splitlines()
    assert len(rows) == len(r.entries) + 1
