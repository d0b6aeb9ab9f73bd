import json

import numpy as np
import pytest

from banditlab import transfer as tr
from helpers import random_latent, random_witness_latent, reference_latent


def test_latent_validation():
    with pytest.raises(ValueError):
        tr.LatentInstance(("z",), ("u",), np.array([[0.5]]), np.array([[[0.5]], [[0.5]]]))  # tie
    with pytest.raises(ValueError):
        tr.LatentInstance(("z",), ("u", "v"), np.array([[0.6, 0.6]]), np.zeros((2, 1, 2)))
    with pytest.raises(ValueError):
        tr.LatentInstance(("z",), ("u",), np.array([[1.0]]), np.array([[[1.5]], [[0.2]]]))


def test_oracle_statistics_reference_latent(reference):
    stats = tr.oracle_statistics(reference)
    assert stats.p[0].tolist() == pytest.approx([0.95, 0.05, 0.0, 0.0, 0.0], abs=1e-12)
    assert stats.mu_z[0] == pytest.approx(0.9943, abs=1e-12)
    assert stats.mu_zk[0, 0] == pytest.approx(0.9443, abs=1e-12)
    assert stats.mu_zk[0, 1] == pytest.approx(0.05, abs=1e-12)
    agent = reference.agent_means
    assert agent[0, 0] == pytest.approx(0.9593, abs=1e-12)
    assert agent[1, 0] == pytest.approx(0.99145, abs=1e-12)
    assert agent[2, 0] == pytest.approx(0.3, abs=1e-12)


def test_oracle_statistics_single_hidden_context():
    latent = tr.LatentInstance(
        ("z",), ("u",), np.array([[1.0]]), np.array([[[0.9]], [[0.4]]])
    )
    stats = tr.oracle_statistics(latent)
    assert stats.p[0].tolist() == [1.0, 0.0]
    assert stats.mu_z[0] == 0.9
    assert stats.mu_zk[0, 0] == 0.9


def test_gaps_reference_latent(reference):
    lo, hi = tr.gaps(reference)
    assert lo[0] == pytest.approx(0.001, abs=1e-12)
    assert hi[0] == pytest.approx(0.7, abs=1e-12)


def test_gaps_constant_gap_and_rejections():
    latent = tr.LatentInstance(
        ("z",), ("u", "v"),
        np.array([[0.5, 0.5]]),
        np.array([[[0.8, 0.6]], [[0.5, 0.3]]]),
    )
    lo, hi = tr.gaps(latent)
    assert lo[0] == pytest.approx(0.3) and hi[0] == pytest.approx(0.3)
    single = tr.LatentInstance(("z",), ("u",), np.array([[1.0]]), np.array([[[0.5]]]))
    with pytest.raises(ValueError):
        tr.gaps(single)


def test_transfer_bounds_reference_latent(reference):
    tb = tr.transfer_bounds(tr.oracle_statistics(reference))
    assert tb.upper[0, 0] == pytest.approx(0.99425, abs=1e-10)
    assert tb.upper[0, 1] == pytest.approx(0.99335, abs=1e-10)
    assert tb.upper[0, 2] == pytest.approx(0.9933, abs=1e-10)
    assert tb.lower[0, 0] == pytest.approx(0.9593, abs=1e-10)
    assert tb.lower[0, 1] == pytest.approx(0.3293, abs=1e-10)
    assert tb.lower[0, 2] == pytest.approx(0.2943, abs=1e-10)
    assert tb.large_reward_arms(0, 0) == (1,)
    assert tb.large_reward_arms(0, 1) == (0,)
    assert tb.large_reward_arms(0, 2) == (0, 1)
    # the largest derived lower bound belongs to arm 1
    assert int(np.argmax(tb.lower[0])) == 0
    assert float(tb.lower[0].max()) == pytest.approx(0.9593, abs=1e-10)


def test_transfer_bounds_deterministic_oracle():
    latent = tr.LatentInstance(
        ("z",), ("u", "v"),
        np.array([[0.5, 0.5]]),
        np.array([[[0.9, 0.7]], [[0.5, 0.4]]]),
    )
    stats = tr.oracle_statistics(latent)
    tb = tr.transfer_bounds(stats)
    lo, hi = tr.gaps(latent)
    mu_z = stats.mu_z[0]
    assert tb.upper[0, 0] == pytest.approx(mu_z)
    assert tb.upper[0, 1] == pytest.approx(mu_z - lo[0])


def test_lower_bound_zero_for_unlogged_arm_with_empty_large_set():
    # the suboptimal arm sits at 0, so gap_hi equals mu* and no arm clears
    # the large-reward threshold for arm 2
    latent = tr.LatentInstance(
        ("z",), ("u",), np.array([[1.0]]), np.array([[[0.6]], [[0.0]]])
    )
    tb = tr.transfer_bounds(tr.oracle_statistics(latent))
    assert tb.large_reward_arms(0, 1) == ()
    assert tb.lower[0, 1] == 0.0


def test_transfer_bounds_inconsistent_statistics_rejected():
    stats = tr.LogStatistics(
        ("z",),
        p=np.array([[0.5, 0.5]]),
        mu_z=np.array([0.5]),
        mu_zk=np.array([[0.4, 0.1]]),
        gap_lo=np.array([0.9]),
        gap_hi=np.array([0.95]),
    )
    with pytest.raises(ValueError):
        tr.transfer_bounds(stats)


def test_soundness_brute_force_small():
    rng = np.random.default_rng(77)
    for _ in range(200):
        latent = random_latent(rng)
        tb = tr.transfer_bounds(tr.oracle_statistics(latent))
        agent = latent.agent_means.T  # (Z, K)
        assert np.all(tb.lower <= agent + 1e-12)
        assert np.all(agent <= tb.upper + 1e-12)


def test_looser_gaps_never_shrink_the_interval():
    rng = np.random.default_rng(3)
    for _ in range(50):
        latent = random_latent(rng)
        stats = tr.oracle_statistics(latent)
        tb = tr.transfer_bounds(stats)
        loose = stats.with_gaps(stats.gap_lo * 0.5, np.minimum(1.0, stats.gap_hi + 0.1))
        tb2 = tr.transfer_bounds(loose)
        assert np.all(tb2.lower <= tb.lower + 1e-12)
        assert np.all(tb2.upper >= tb.upper - 1e-12)


def test_unlogged_arms_still_receive_bounds(reference):
    stats = tr.oracle_statistics(reference)
    tb = tr.transfer_bounds(stats)
    for k in (2, 3, 4):
        assert stats.p[0, k] == 0.0
        assert tb.upper[0, k] == pytest.approx(float(stats.mu_z[0] - stats.gap_lo[0]), abs=1e-12)
        assert tb.lower[0, k] > 0.0


def test_empirical_statistics_consistency():
    records = [
        tr.LogRecord("z", 0, 0.2),
        tr.LogRecord("z", 0, 0.2),
        tr.LogRecord("z", 0, 0.2),
        tr.LogRecord("z", 1, 0.8),
    ]
    stats = tr.empirical_statistics(records, "z", n_arms=2, gap_lo=0.01, gap_hi=0.9)
    assert stats.p[0].tolist() == [0.75, 0.25]
    assert stats.mu_z[0] == pytest.approx(0.35)
    assert stats.mu_zk[0].tolist() == pytest.approx([0.15, 0.2])
    assert stats.counts[0].tolist() == [3, 1]


def test_empirical_statistics_single_record():
    stats = tr.empirical_statistics([tr.LogRecord("z", 1, 0.7)], "z", 3, 0.05, 0.9)
    assert stats.p[0].tolist() == [0.0, 1.0, 0.0]
    assert stats.mu_z[0] == pytest.approx(0.7)
    assert stats.mu_zk[0, 1] == pytest.approx(0.7)
    with pytest.raises(ValueError):
        tr.empirical_statistics([], "z", 3, 0.05, 0.9)


def test_empirical_statistics_concentrate(reference):
    exact = tr.oracle_statistics(reference)
    hits = 0
    for seed in range(20):
        records = tr.sample_log(reference, 100_000, seed)
        stats = tr.empirical_log_statistics(records, reference.n_arms, 0.001, 0.7, reference.z_labels)
        ok = (
            np.all(np.abs(stats.p - exact.p) < 0.01)
            and np.all(np.abs(stats.mu_z - exact.mu_z) < 0.01)
            and np.all(np.abs(stats.mu_zk - exact.mu_zk) < 0.01)
        )
        hits += ok
    assert hits >= 19


def test_finite_log_budget_split():
    # 2 arms, 1 context: 5 widened scalars sharing the 0.05 failure budget
    records = [tr.LogRecord("z", 0, 1.0)] * 9 + [tr.LogRecord("z", 1, 0.0)]
    stats = tr.empirical_log_statistics(records, 2, 0.05, 0.9)
    tb = tr.finite_log_bounds(stats, confidence=0.95)
    assert tb.failure_prob.sum() == pytest.approx(0.05, abs=1e-12)
    with pytest.raises(ValueError):
        tr.finite_log_bounds(stats, confidence=1.5)
    with pytest.raises(ValueError):
        tr.finite_log_bounds(tr.oracle_statistics(reference_latent()), 0.95)


def test_widened_bounds_contain_exact_interval(reference):
    exact = tr.transfer_bounds(tr.oracle_statistics(reference))
    records = tr.sample_log(reference, 20_000, 5)
    stats = tr.empirical_log_statistics(records, reference.n_arms, 0.001, 0.7, reference.z_labels)
    tb = tr.finite_log_bounds(stats, confidence=0.95)
    assert np.all(tb.lower <= exact.lower + 1e-12)
    assert np.all(tb.upper >= exact.upper - 1e-12)


def test_widened_bounds_tighten_with_data(reference):
    sizes = (500, 5_000, 200_000)
    widths = []
    for n in sizes:
        records = tr.sample_log(reference, n, 11)
        stats = tr.empirical_log_statistics(records, reference.n_arms, 0.001, 0.7, reference.z_labels)
        tb = tr.finite_log_bounds(stats, confidence=0.95)
        widths.append(float((tb.upper - tb.lower).mean()))
    assert widths[0] > widths[1] > widths[2]
    exact = tr.transfer_bounds(tr.oracle_statistics(reference))
    assert widths[2] <= float((exact.upper - exact.lower).mean()) + 0.05


def test_tight_upper_instance_hits_bounds(reference):
    witness = tr.tight_upper_instance(reference)
    tb = tr.transfer_bounds(tr.oracle_statistics(reference))
    assert witness.agent_means[0, 0] == pytest.approx(0.99425, abs=1e-12)
    assert np.allclose(witness.agent_means.T, tb.upper, atol=1e-12)
    ok, violations = tr.admissible_check(witness, tr.oracle_statistics(reference), tol=1e-12)
    assert ok, violations


def test_tight_lower_instance_hits_bounds(reference):
    stats = tr.oracle_statistics(reference)
    tb = tr.transfer_bounds(stats)
    witness = tr.tight_lower_instance(reference, 1)
    assert witness.agent_means[1, 0] == pytest.approx(0.3293, abs=1e-12)
    ok, violations = tr.admissible_check(witness, stats, tol=1e-12)
    assert ok, violations
    # idempotent on the agent mean: rebuilding from the witness changes nothing
    again = tr.tight_lower_instance(witness, 1)
    assert again.agent_means[1, 0] == pytest.approx(witness.agent_means[1, 0], abs=1e-12)


def test_witnesses_on_random_instances():
    rng = np.random.default_rng(19)
    for _ in range(40):
        latent = random_witness_latent(rng)
        stats = tr.oracle_statistics(latent)
        tb = tr.transfer_bounds(stats)
        upper = tr.tight_upper_instance(latent)
        assert np.allclose(upper.agent_means.T, tb.upper, atol=1e-12)
        ok, violations = tr.admissible_check(upper, stats, tol=1e-12)
        assert ok, violations
        for k in range(latent.n_arms):
            lower = tr.tight_lower_instance(latent, k)
            assert np.allclose(lower.agent_means[k], tb.lower[:, k], atol=1e-12)
            ok, violations = tr.admissible_check(lower, stats, tol=1e-12)
            assert ok, violations


def test_admissible_check_reflexive_and_detects_best_arm_change(reference):
    stats = tr.oracle_statistics(reference)
    ok, _ = tr.admissible_check(reference, stats, tol=1e-12)
    assert ok
    means = np.array(reference.means, copy=True)
    means[2, 0, 0] = 0.999  # raise a suboptimal arm above the context best
    bad = reference.with_means(means)
    ok, violations = tr.admissible_check(bad, stats, tol=1e-9)
    assert not ok
    assert any("best arm" in v for v in violations)


def test_admissible_check_shape_mismatch(reference):
    other = reference_latent(n_arms=3)
    with pytest.raises(ValueError):
        tr.admissible_check(other, tr.oracle_statistics(reference), tol=1e-9)


def test_sample_log_basics(reference):
    single = tr.LatentInstance(("z",), ("u",), np.array([[1.0]]), np.array([[[0.7]], [[0.2]]]))
    rec = tr.sample_log(single, 1, seed=4)
    assert len(rec) == 1
    assert rec[0].z == "z" and rec[0].k == 0 and rec[0].y in (0.0, 1.0)
    a = tr.sample_log(reference, 500, seed=8)
    b = tr.sample_log(reference, 500, seed=8)
    assert a == b


def test_sample_log_frequencies(reference):
    records = tr.sample_log(reference, 1_000_000, seed=1)
    stats = tr.empirical_log_statistics(records, reference.n_arms, 0.001, 0.7, reference.z_labels)
    exact = tr.oracle_statistics(reference)
    assert np.all(np.abs(stats.p - exact.p) < 0.005)


def test_validate_external_gaps(reference):
    tr.validate_external_gaps(reference, 0.0005, 0.8)
    with pytest.raises(ValueError):
        tr.validate_external_gaps(reference, 0.01, 0.8)  # tighter than true gap_lo
    with pytest.raises(ValueError):
        tr.validate_external_gaps(reference, 0.0005, 0.5)  # below true gap_hi


def test_latent_json_roundtrip(tmp_path, reference):
    path = tmp_path / "latent.json"
    tr.save_latent(reference, path)
    loaded = tr.load_latent(path)
    assert loaded.z_labels == reference.z_labels
    assert np.array_equal(loaded.means, reference.means)
    assert np.array_equal(loaded.p_u_given_z, reference.p_u_given_z)
    data = json.loads(path.read_text())
    assert set(data) >= {"contexts_visible", "contexts_hidden", "p_u_given_z", "means"}


def test_log_csv_roundtrip(tmp_path, reference):
    records = tr.sample_log(reference, 50, seed=2)
    path = tmp_path / "log.csv"
    tr.write_log_csv(records, path)
    assert path.read_text().splitlines()[0] == "z,k,y"
    loaded = tr.read_log_csv(path)
    assert loaded == records


def test_logstatistics_invariants_enforced():
    good = dict(
        p=np.array([[0.5, 0.5]]),
        mu_z=np.array([0.6]),
        mu_zk=np.array([[0.4, 0.2]]),
        gap_lo=np.array([0.1]),
        gap_hi=np.array([0.5]),
    )
    tr.LogStatistics(("z",), **good)
    bad = dict(good, mu_zk=np.array([[0.6, 0.2]]))  # exceeds p and breaks the sum
    with pytest.raises(ValueError):
        tr.LogStatistics(("z",), **bad)
    with pytest.raises(ValueError):
        tr.LogStatistics(("z",), **dict(good, gap_lo=np.array([0.0])))
    with pytest.raises(ValueError):
        tr.LogStatistics(("z",), **dict(good, gap_hi=np.array([1.5])))


def test_finite_log_failure_feeds_uncertain_addon(reference):
    from banditlab.analysis import uncertain_bounds_addon

    records = tr.sample_log(reference, 5000, seed=1)
    stats = tr.empirical_log_statistics(records, reference.n_arms, 0.001, 0.7, reference.z_labels)
    tb = tr.finite_log_bounds(stats, confidence=0.95)
    carrier = tb.bounded_with_failure(0)
    n = 10_000
    addon = uncertain_bounds_addon(carrier, n)
    # one context: the whole 0.05 budget lands here, so the add-on is n * 0.05
    assert addon == pytest.approx(n * 0.05, rel=1e-12)


def test_bounds_json_structure(reference):
    tb = tr.transfer_bounds(tr.oracle_statistics(reference))
    data = tr.bounds_to_dict(tb)
    assert set(data) == {"z0"}
    assert len(data["z0"]) == reference.n_arms
    assert set(data["z0"][0]) == {"lower", "upper", "failure_prob"}
