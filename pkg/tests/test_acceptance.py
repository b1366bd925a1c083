"""Acceptance gate: one test per numbered criterion.

Each test is marked ``acceptance(n)``; the conftest hooks print one
"acceptance criterion n: PASS/FAIL" line per criterion after the run.
The slow end-to-end criterion (8) uses a frozen configuration whose
tuning history lives outside the package.
"""

import math
import time

import numpy as np
import pytest

from votespan import cli
from votespan.algebra import exact_recovery_weights, ideal_vector
from votespan.errors import RepresentationalDeficiencyError
from votespan.estimation import dependence_process_votes, estimate_p
from votespan.harness import (
    GridConfig,
    MethodSpec,
    rbf_dataset,
    run_experiment_grid,
    write_reports,
)
from votespan.pli import (
    DependenceProfile,
    SizingRequest,
    pli_enumeration_oracle,
    pli_exact,
    pli_monte_carlo,
    pli_uniform,
    solve_inc,
)


@pytest.mark.acceptance(1)
def test_criterion_1_worked_example():
    profile = DependenceProfile(2, (0.5,))
    request = SizingRequest(0.99)

    def compute():
        values = [pli_exact(profile, n) for n in (2, 3, 4, 8)]
        return values, solve_inc(profile, request)

    elapsed = min(_timed(compute) for _ in range(5))
    values, inc = compute()
    assert inc == 8
    for got, want in zip(values, (0.5, 0.75, 0.875, 0.9921875)):
        assert got == pytest.approx(want, abs=1e-9)
    assert elapsed < 1e-3


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


@pytest.mark.acceptance(2)
def test_criterion_2_oracle_equivalence():
    rng = np.random.default_rng(202601)
    for _ in range(500):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(m, 21))
        profile = DependenceProfile(
            m, tuple(rng.uniform(0.0, 0.97, size=m - 1))
        )
        value, terms = pli_enumeration_oracle(profile, n)
        assert abs(pli_exact(profile, n) - value) <= 1e-12
        assert terms == math.comb(n - 1, m - 1)


@pytest.mark.acceptance(3)
def test_criterion_3_uniform_consistency():
    rng = np.random.default_rng(202602)
    for _ in range(500):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(max(1, m - 1), 21))
        p = float(rng.uniform(0.0, 0.97))
        uniform = pli_uniform(m, p, n)
        exact = pli_exact(DependenceProfile.uniform(m, p), n)
        assert abs(uniform - exact) <= 1e-12
        if m == 2:
            assert uniform == 1.0 - p ** (n - 1)


@pytest.mark.acceptance(4)
def test_criterion_4_growth_properties():
    rng = np.random.default_rng(202603)
    capped = SizingRequest(1.0 - 1e-6, 10_000)
    for _ in range(1000):
        m = int(rng.integers(2, 9))
        profile = DependenceProfile(
            m, tuple(rng.uniform(0.0, 0.9, size=m - 1))
        )
        curve = [pli_exact(profile, n) for n in range(1, m + 25)]
        assert all(a <= b + 1e-15 for a, b in zip(curve, curve[1:]))
        assert solve_inc(profile, capped) is not None
    for _ in range(100):
        m = int(rng.integers(2, 9))
        p = rng.uniform(0.0, 1.0, size=m - 1)
        p[rng.integers(m - 1)] = 1.0
        profile = DependenceProfile(m, tuple(p))
        for n in (m, m + 3, m + 17):
            assert pli_exact(profile, n) == 0.0


@pytest.mark.acceptance(5)
def test_criterion_5_exact_recovery():
    rng = np.random.default_rng(202604)
    for _ in range(1000):
        m = int(rng.integers(2, 11))
        votes = rng.dirichlet(np.ones(m), size=m)
        label = int(rng.integers(m))
        weights = exact_recovery_weights(votes, label)
        residual = votes.T @ weights - ideal_vector(m, label)
        assert np.max(np.abs(residual)) <= 1e-9
        assert abs(weights.sum() - 1.0) <= 1e-9
    deficient = np.array([[0.6, 0.4], [0.6, 0.4]])
    with pytest.raises(RepresentationalDeficiencyError):
        exact_recovery_weights(deficient, 0)


@pytest.mark.acceptance(6)
def test_criterion_6_estimator_consistency():
    start = time.perf_counter()
    cases = {
        2: (0.4,),
        3: (0.2, 0.55),
        4: (0.3, 0.45, 0.6),
    }
    instances = 100_000
    for m, truth in cases.items():
        profile = DependenceProfile(m, truth)
        n = 2 * m + 4
        votes = dependence_process_votes(profile, n, instances,
                                         seed=500 + m)
        report = estimate_p(list(votes))
        for l in range(m - 1):
            attempts = report.counters.attempts[l]
            stderr = math.sqrt(truth[l] * (1 - truth[l]) / attempts)
            assert abs(report.profile.p[l] - truth[l]) <= 3 * stderr
        expected = pli_exact(profile, n)
        stderr = math.sqrt(expected * (1 - expected) / instances)
        assert abs(report.full_rank_fraction - expected) <= 3 * stderr
    assert time.perf_counter() - start < 30.0


@pytest.mark.acceptance(7)
def test_criterion_7_monte_carlo_agreement():
    rng = np.random.default_rng(202605)
    for case in range(50):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(m, m + 7))
        profile = DependenceProfile(
            m, tuple(rng.uniform(0.35, 0.85, size=m - 1))
        )
        estimate, stderr = pli_monte_carlo(profile, n, trials=100_000,
                                           seed=case)
        assert abs(estimate - pli_exact(profile, n)) <= 4 * stderr


FROZEN_DATASET = dict(m=4, n_features=6, n_centroids=16, spread=16.0)
FROZEN_METHOD = MethodSpec(
    name="oza", combiner="majority", learner="ht",
    learner_params=(("grace_period", 50), ("delta", 1e-5)),
)
FROZEN_GRID = GridConfig(sizes=(2, 4, 8, 16, 32), seeds=5,
                         instance_limit=100_000)


@pytest.mark.acceptance(8)
def test_criterion_8_desk_scale_experiment():
    start = time.perf_counter()
    dataset = rbf_dataset("rbf4", **FROZEN_DATASET)
    result = run_experiment_grid([dataset], [FROZEN_METHOD], FROZEN_GRID)
    elapsed = time.perf_counter() - start

    accuracy = {row.size: row.mean_accuracy for row in result.rows}
    best = max(accuracy.values())
    (summary,) = result.summaries
    assert accuracy[32] >= 0.99 * best
    assert summary.correlation is not None
    assert summary.correlation >= 0.5
    assert summary.inc is not None
    assert summary.acc_pct_of_max >= 99.0
    assert elapsed < 600.0


@pytest.mark.acceptance(9)
def test_criterion_9_unreachable_inc(tmp_path):
    # members that never train keep emitting one identical uniform vote,
    # so every added row stays inside the first row's span
    dataset = rbf_dataset("toy", m=3, n_features=4)
    frozen = MethodSpec(name="frozen", combiner="majority", learner="nb",
                        bag_lambda=0.0)
    config = GridConfig(sizes=(2, 4), seeds=2, instance_limit=300,
                        accuracy_window=100)
    result = run_experiment_grid([dataset], [frozen], config)
    (summary,) = result.summaries
    assert summary.profile == (1.0, 1.0)
    assert summary.inc is None
    assert summary.sinc is None
    assert all(cell.full_rank_fraction == 0.0 for cell in result.cells)

    paths = write_reports(result, tmp_path, reproducible=True)
    summary_lines = paths["summary"].read_text().splitlines()
    assert summary_lines[1] == "toy,frozen,3,--,--,--,--,--"
    profile_lines = paths["profiles"].read_text().splitlines()[1:]
    assert all(line.endswith(",1") for line in profile_lines)


CLI_FLAGS = (
    "experiment", "--dataset", "rbf", "--m", "3", "--features", "4",
    "--centroids", "8", "--learner", "nb", "--sizes", "2,4",
    "--seeds", "2", "--instances", "300", "--workers", "1",
    "--reproducible", "--no-plot",
)
REPORT_NAMES = ("results_raw.csv", "results_summary.csv",
                "p_profiles.csv", "pli_curve.csv")


@pytest.mark.acceptance(10)
def test_criterion_10_cli_determinism(tmp_path, capsys):
    first = tmp_path / "first"
    second = tmp_path / "second"
    assert cli.main(list(CLI_FLAGS) + ["--out", str(first)]) == 0
    assert cli.main(list(CLI_FLAGS) + ["--out", str(second)]) == 0
    capsys.readouterr()
    for name in REPORT_NAMES:
        assert (first / name).read_bytes() == (second / name).read_bytes()
