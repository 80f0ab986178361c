"""End-to-end properties on the fixtures and small seeded batteries."""
import random
import time

import pytest

from gentlekit.algebra.cohen_macaulay import cm_report
from gentlekit.algebra.quiver import nonzero_paths
from gentlekit.algebra.representation import regular_representation
from gentlekit.algebra.strings import format_string
from gentlekit.exceptions import VerificationFailure
from gentlekit.schemas import AnalysisRequest, Command, SuiteName
from gentlekit.services.suite_service import SuiteService, get_suite_service

SATURATED_SECONDS = 60


def _suite(gf, name, count, **options):
    req = AnalysisRequest(command=Command.SUITE, suite=name, count=count, seed=7, **options)
    return get_suite_service().run(req, gf)


def test_d6_reproduction(d6, gf):
    report = cm_report(d6, 2, 6, field=gf)
    assert [format_string(e.word) for e in report.cm_modules] == ["@3", "@6", "e", "b"]
    assert report.sets_agree


@pytest.mark.parametrize("name", ["a3c", "loop", "ej8"])
def test_cycle_calculus_on_fixtures(load_bq, gf, name):
    get_suite_service().check_cycle_calculus(load_bq(name), 6, gf, rng=random.Random(0))


@pytest.mark.parametrize("name", ["a3c", "loop"])
def test_cycle_calculus_without_sampling(load_bq, gf, name):
    get_suite_service().check_cycle_calculus(load_bq(name), 4, gf)


@pytest.mark.parametrize("name", ["lin3", "a3c", "loop", "ej8", "d6"])
def test_path_basis_matches_regular_representation(load_bq, gf, name):
    bq = load_bq(name)
    assert regular_representation(bq, gf).total_dim == len(nonzero_paths(bq))


def test_block_round_trips(gf):
    section = _suite(gf, SuiteName.BLOCKS, 10)
    assert section.failures == [], section.failures
    assert section.passed == 10


def test_saturated_cycles_of_glued_algebras(gf):
    section = _suite(gf, SuiteName.SATURATED, 5, max_letters=4)
    assert section.failures == [], section.failures


def test_saturated_suite_runs_in_time(gf):
    start = time.perf_counter()
    section = _suite(gf, SuiteName.SATURATED, 10)
    elapsed = time.perf_counter() - start
    assert section.failures == [], section.failures
    assert elapsed < SATURATED_SECONDS, f"saturated suite took {elapsed:.1f}s"


@pytest.mark.parametrize("n, m", [(3, 1), (4, 1), (5, 1), (3, 2), (4, 2), (2, 3)])
def test_disk_angulations(gf, n, m):
    section = _suite(gf, SuiteName.DISK, 3, n=n, m=m, max_letters=4)
    assert section.failures == [], section.failures
    assert section.parameters == {"seed": 7, "n": n, "m": m}


def test_annulus_angulations(gf):
    section = _suite(gf, SuiteName.ANNULUS, 3, max_letters=4)
    assert section.failures == [], section.failures


def test_oracle_parity(gf):
    section = _suite(gf, SuiteName.PARITY, 3, max_letters=3)
    assert section.failures == [], section.failures


def test_parity_covers_every_fixture(gf, fixtures_dir):
    names = sorted(path.name for path in fixtures_dir.glob("*.bq"))
    section = _suite(gf, SuiteName.PARITY, 1, max_letters=2)
    assert section.failures == [], section.failures
    assert section.count == len(names) + 1
    assert section.parameters == {"seed": 7, "max_letters": 2}


@pytest.mark.parametrize("name", ["lin3", "a3c", "loop", "ej8", "ej8_figure", "d6"])
def test_parity_on_fixture(load_bq, gf, name):
    get_suite_service().check_parity(load_bq(name), 2, gf)


def test_failed_checks_are_recorded(gf, monkeypatch):
    service = SuiteService()

    def failing(seed, req, field):
        if seed % 2:
            raise VerificationFailure(f"odd seed {seed}")

    monkeypatch.setitem(service._suites, SuiteName.BLOCKS, failing)
    req = AnalysisRequest(command=Command.SUITE, suite=SuiteName.BLOCKS, count=4, seed=7)
    section = service.run(req, gf)
    assert section.passed == 2
    assert [(f.instance, f.seed, f.reason) for f in section.failures] == [
        ("seed 7", 7, "odd seed 7"),
        ("seed 9", 9, "odd seed 9"),
    ]
