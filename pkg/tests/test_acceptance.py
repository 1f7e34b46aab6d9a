"""Acceptance criteria 1 to 13, one test each, plus the mutation and runtime checks."""

import numpy as np
import pytest

from hardylab import acceptance, beltrami

NUMBERS = sorted(acceptance.CRITERIA)


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in acceptance.run_all(NUMBERS)}


@pytest.mark.parametrize("number", NUMBERS, ids=[f"criterion_{k:02d}" for k in NUMBERS])
def test_criterion(number, results, capsys):
    r = results[number]
    with capsys.disabled():
        print(f"\n{r.line()}  {r.details}")
    assert r.passed, r.details


def test_selftest_budget(results):
    assert sum(r.seconds for r in results.values()) < 300


def test_sign_flip_in_alpha_from_nu_is_caught(monkeypatch):
    original = beltrami.alpha_from_nu

    def flipped(nu):
        a = original(nu)
        return beltrami.AlphaField(a.values.like(-np.asarray(a.values.values)))

    monkeypatch.setattr(beltrami, "alpha_from_nu", flipped)
    r = acceptance.run(8)
    assert not r.passed
