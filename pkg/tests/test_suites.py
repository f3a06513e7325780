"""Tests for the suite runner: determinism, reporting, and the oracles."""

import json

import numpy as np
import pytest

from qfdiv.channels import random_state
from qfdiv.divergence import minimal_reverse_test, reverse_test_value
from qfdiv.generators import builtin
from qfdiv.oracles import (concat_reverse_tests, disjoint_reverse_test,
                           random_reverse_test, refine_reverse_test)
from qfdiv.suites import SUITE_NAMES, SuiteConfig, run_suite, trial_rng


def _strip_time(report_json: str) -> dict:
    obj = json.loads(report_json)
    obj.pop("wall_time_s", None)
    return obj


class TestRunner:
    def test_deterministic_reports(self):
        cfg = SuiteConfig(suite="dpi", dims=(2, 3), trials=30, seed=42)
        a = run_suite(cfg).to_json()
        b = run_suite(cfg).to_json()
        assert _strip_time(a) == _strip_time(b)
        # byte-identical apart from the timing field
        assert json.dumps(_strip_time(a), sort_keys=True) == \
            json.dumps(_strip_time(b), sort_keys=True)

    def test_different_seeds_differ(self):
        cfg_a = SuiteConfig(suite="dpi", trials=10, seed=1)
        cfg_b = SuiteConfig(suite="dpi", trials=10, seed=2)
        ra = [r.lhs for r in run_suite(cfg_a).rows]
        rb = [r.lhs for r in run_suite(cfg_b).rows]
        assert ra != rb

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite(SuiteConfig(suite="does-not-exist"))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            run_suite(SuiteConfig(suite="convexity", trials=0))
        with pytest.raises(ValueError):
            run_suite(SuiteConfig(suite="convexity", dims=(1,)))

    def test_catalog_complete(self):
        assert set(SUITE_NAMES) == {
            "dpi", "convexity", "sigma-monotonicity", "perturbation-limit",
            "rho-tilde-maximality", "umegaki-bound",
            "reverse-test-reconstruction", "reverse-test-optimality",
            "equality-preservation", "rld-second-derivative",
            "lowner-quadrature", "geometric-mean-symmetry",
            "commutative-oracle"}

    def test_all_suites_pass_smoke(self):
        for name in SUITE_NAMES:
            rep = run_suite(SuiteConfig(suite=name, trials=12, seed=3))
            assert rep.ok(), f"{name}: {[r for r in rep.rows if not r.passed]}"

    def test_csv_schema(self):
        rep = run_suite(SuiteConfig(suite="umegaki-bound", trials=5, seed=0))
        lines = rep.to_csv().strip().splitlines()
        assert lines[0] == "suite,dim,seed,lhs,rhs,margin,pass"
        assert len(lines) == 1 + len(rep.rows)
        first = lines[1].split(",")
        assert first[-1] in ("0", "1")
        float(first[3]), float(first[4]), float(first[5])

    def test_property_summary_structure(self):
        rep = run_suite(SuiteConfig(suite="perturbation-limit", trials=6, seed=5))
        props = rep.property_summary()
        assert set(props) == {"neg-power-limit", "square-divergence"}
        for entry in props.values():
            assert entry["fail"] == 0
            assert entry["failing_seeds"] == []

    def test_failing_seed_reproduces(self):
        # force failures with an absurd tolerance and replay one trial
        cfg = SuiteConfig(suite="rld-second-derivative", dims=(2,), trials=4,
                          seed=9, tol=1e-300)
        rep = run_suite(cfg)
        assert rep.total_fail > 0
        props = rep.property_summary()
        seeds = [s for e in props.values() for s in e["failing_seeds"]]
        assert seeds
        # per-trial streams are pure functions of (master seed, index)
        np.testing.assert_array_equal(
            trial_rng(9, seeds[0]).standard_normal(4),
            trial_rng(9, seeds[0]).standard_normal(4))


class TestAlternativeReverseTests:
    def test_exact_families_reconstruct(self):
        rng = np.random.default_rng(0)
        rho = random_state(3, 3, rng)
        sigma = random_state(3, 2, rng)
        minimal = minimal_reverse_test(rho, sigma)
        for alt in (disjoint_reverse_test(rho, sigma, rng),
                    refine_reverse_test(minimal, rng, 3),
                    concat_reverse_tests(minimal,
                                         disjoint_reverse_test(rho, sigma, rng),
                                         0.4)):
            rho_hat, sigma_hat = alt.reconstruct()
            assert np.abs(rho_hat - rho).max() < 1e-12
            assert np.abs(sigma_hat - sigma).max() < 1e-12

    def test_alternatives_never_beat_minimal(self):
        rng = np.random.default_rng(1)
        half = builtin("neg_power", 0.5)
        for _ in range(20):
            dim = int(rng.integers(2, 5))
            rho = random_state(dim, dim, rng)
            sigma = random_state(dim, int(rng.integers(1, dim + 1)), rng)
            minimal = minimal_reverse_test(rho, sigma)
            best = reverse_test_value(minimal, half)
            for alt in (disjoint_reverse_test(rho, sigma, rng),
                        refine_reverse_test(minimal, rng, 2),
                        random_reverse_test(rho, sigma, rng)):
                if alt is None:
                    continue
                assert reverse_test_value(alt, half) >= best - 1e-8

    def test_nnls_solution_when_feasible(self):
        rng = np.random.default_rng(2)
        rho = random_state(2, 2, rng)
        sigma = random_state(2, 2, rng)
        alt = random_reverse_test(rho, sigma, rng)
        if alt is not None:
            rho_hat, sigma_hat = alt.reconstruct()
            assert np.abs(rho_hat - rho).max() < 1e-8
            assert np.abs(sigma_hat - sigma).max() < 1e-8
