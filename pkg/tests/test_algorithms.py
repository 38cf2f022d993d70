import numpy as np
import pytest

from mfcoverage import algorithms, geometry, mfgp
from mfcoverage.algorithms import (
    COVER,
    LEARN,
    DmlcState,
    SmlcState,
    coverage_phase_length,
    dmlc_epoch,
    dmlc_virtual_sampling,
    initial_max_variance,
    known_density_baseline,
    learn_probability,
    single_fidelity_model,
    smlc_iteration,
)
from mfcoverage.geometry import DensitySpec, TeamConfiguration, eval_test_density
from mfcoverage.mfgp import FidelityDataset, KernelParams, MfgpHyper, MfgpModel

PHI_HIGH = DensitySpec(10.0, 0.05, (0.75, 0.75))


def noiseless_sampler(x, rng):
    return geometry.eval_density_at(PHI_HIGH, x)


def noisy_sampler(x, rng):
    return geometry.eval_density_at(PHI_HIGH, x) + rng.normal(0.0, 1.0)


def two_fid_model(noise=(1.0, 1.0), bounds=None):
    hyper = MfgpHyper((KernelParams(5.0, 0.2), KernelParams(10.0, 0.05)),
                      (1.0,), noise)
    return MfgpModel(hyper, bounds=bounds)


def seeded_model(rng, n_low=8, noise=(1.0, 1.0)):
    model = two_fid_model(noise)
    for _ in range(n_low):
        x = rng.uniform(0, 1, 2)
        model = model.add_observation(1, x, rng.normal(0, 2))
    return model


class TestLearnProbability:
    def test_unit_ratio_gives_certain_learning(self):
        assert learn_probability(4.0, 4.0, 1.0) == 1.0

    def test_zero_variance_gives_pure_coverage(self):
        assert learn_probability(0.0, 4.0, 1.0) == 0.0

    def test_clamped_to_unit_interval(self):
        assert learn_probability(8.0, 4.0, 1.0) == 1.0
        assert 0.0 <= learn_probability(2.0, 4.0, 0.3) <= 1.0

    def test_gamma_shapes_the_curve(self):
        assert learn_probability(1.0, 4.0, 2.0) == pytest.approx(0.0625)


class TestSmlcIteration:
    def test_fresh_model_learns_everywhere_on_first_iteration(self, unit_grid, rng):
        # constant prior variance makes every cell's ratio exactly 1
        model = two_fid_model()
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = SmlcState(model, config, config.positions.copy(), m0, 1.0)
        state, outcome = smlc_iteration(state, unit_grid, noisy_sampler, rng)
        assert all(acts[0].kind == LEARN for acts in outcome.actions)
        assert len(outcome.samples) == 4
        assert state.model.n_total == 4

    def test_vanishing_variance_means_pure_lloyd(self, unit_grid, rng):
        # a numerically dead variance field drives every probability to 0
        hyper = MfgpHyper((KernelParams(1e-12, 0.2),), (), (1.0,))
        model = MfgpModel(hyper)
        config = TeamConfiguration.at(rng.uniform(0, 1, (3, 2)))
        state = SmlcState(model, config, config.positions.copy(), 1.0, 1.0)
        state, outcome = smlc_iteration(state, unit_grid, noisy_sampler, rng)
        assert all(acts[0].kind == COVER for acts in outcome.actions)
        assert outcome.samples == []
        # with a flat estimate the agents drive to geometric cell centers
        part = geometry.voronoi_partition(unit_grid, config.positions)
        _, cents = geometry.partition_centroids(
            unit_grid, part, np.zeros(unit_grid.n_points), config.positions)
        np.testing.assert_allclose(state.config.positions, cents, atol=1e-12)

    def test_identical_seeds_give_identical_trajectories(self, unit_grid):
        def run(seed):
            rng = np.random.default_rng(seed)
            model = seeded_model(np.random.default_rng(7))
            config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
            m0 = initial_max_variance(model, unit_grid)
            state = SmlcState(model, config, config.positions.copy(), m0, 1.0)
            trail = []
            for _ in range(10):
                state, outcome = smlc_iteration(state, unit_grid, noisy_sampler, rng)
                trail.append(state.config.positions.copy())
            return np.asarray(trail)

        np.testing.assert_array_equal(run(3), run(3))
        assert not np.array_equal(run(3), run(4))

    def test_positions_stay_inside_domain(self, unit_grid, rng):
        model = seeded_model(rng)
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = SmlcState(model, config, config.positions.copy(), m0, 1.0)
        for _ in range(15):
            state, _ = smlc_iteration(state, unit_grid, noisy_sampler, rng)
            assert unit_grid.bounds.contains(state.config.positions).all()

    def test_probabilities_do_not_rise_without_new_samples(self, unit_grid):
        # track max-in-cell variance ratios over a run; whenever an iteration
        # folds no samples the next iteration's probabilities cannot exceed it
        rng = np.random.default_rng(11)
        model = seeded_model(np.random.default_rng(5), n_low=20)
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = SmlcState(model, config, config.positions.copy(), m0, 1.0)

        def probs(st):
            part = geometry.voronoi_partition(unit_grid, st.sites)
            _, var = st.model.posterior(unit_grid.points)
            out = []
            for i in range(st.config.n_agents):
                idx = np.nonzero(part == i)[0]
                mv = var[idx].max() if idx.size else 0.0
                out.append(learn_probability(mv, st.m0, st.gamma))
            return np.asarray(out)

        for _ in range(20):
            p_before = probs(state)
            assert ((p_before >= 0) & (p_before <= 1)).all()
            state, outcome = smlc_iteration(state, unit_grid, noisy_sampler, rng)
            if not outcome.samples:
                p_after = probs(state)
                assert (p_after <= p_before + 1e-9).all()


class TestVirtualSampling:
    def test_target_above_current_max_returns_empty(self, unit_grid, rng):
        model = seeded_model(rng)
        m0 = initial_max_variance(model, unit_grid)
        acquired = dmlc_virtual_sampling(model, unit_grid, m0 * 1.01)
        assert acquired.shape == (0, 2)

    def test_noiseless_sampling_never_repeats_points(self, unit_grid, rng):
        model = two_fid_model(noise=(1.0, 0.0))
        m0 = initial_max_variance(model, unit_grid)
        acquired = dmlc_virtual_sampling(model, unit_grid, 0.5 * m0)
        assert acquired.shape[0] >= 1
        assert len({tuple(x) for x in acquired}) == acquired.shape[0]

    def test_model_left_untouched(self, unit_grid, rng):
        model = seeded_model(rng)
        before = model.n_total
        dmlc_virtual_sampling(model, unit_grid, 0.8 * initial_max_variance(model, unit_grid))
        assert model.n_total == before

    def test_real_samples_hit_target_exactly(self, unit_grid, rng):
        # variance depends on locations only: really sampling the virtual
        # set (any values) must reach the target with no tolerance
        model = seeded_model(rng, n_low=12)
        target = 0.4 * initial_max_variance(model, unit_grid)
        acquired = dmlc_virtual_sampling(model, unit_grid, target)
        assert acquired.shape[0] > 0
        for x in acquired:
            model = model.add_observation(2, x, rng.normal(0, 3))
        _, variances = model.posterior(unit_grid.points)
        assert float(variances.max()) <= target

    def test_bad_target_rejected(self, unit_grid, rng):
        with pytest.raises(ValueError):
            dmlc_virtual_sampling(seeded_model(rng), unit_grid, 0.0)


class TestDmlcEpoch:
    def test_coverage_lengths_follow_geometric_schedule(self):
        assert [coverage_phase_length(4, 2.0, e) for e in (1, 2, 3, 4)] == [4, 8, 16, 32]
        assert [coverage_phase_length(3, 1.5, e) for e in (1, 2, 3)] == [3, 5, 7]

    def test_epoch_reduces_max_variance_to_target(self, unit_grid, rng):
        model = seeded_model(rng, n_low=10)
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = DmlcState(model, config, config.positions.copy(), m0,
                          alpha=1.0 / np.sqrt(2.0), beta=2.0, first_epoch_len=4)
        for expected_epoch in (1, 2):
            state, outcomes = dmlc_epoch(state, unit_grid, noisy_sampler, rng)
            _, variances = state.model.posterior(unit_grid.points)
            assert variances.max() <= state.alpha ** expected_epoch * m0
            n_cov = sum(1 for o in outcomes if o.phase == "coverage")
            assert n_cov == coverage_phase_length(4, 2.0, expected_epoch)
        assert state.epoch == 3

    def test_agent_without_acquisition_points_idles_then_covers(self, unit_grid, rng):
        model = seeded_model(rng, n_low=10)
        # park one agent far in a corner; bias acquisition to elsewhere by
        # seeding the corner heavily with prior samples
        for _ in range(20):
            model = model.add_observation(2, rng.uniform(0, 0.3, 2), rng.normal())
        config = TeamConfiguration.at([[0.05, 0.05], [0.8, 0.8]])
        m0 = initial_max_variance(model, unit_grid)
        state = DmlcState(model, config, config.positions.copy(), m0,
                          alpha=0.8, beta=2.0, first_epoch_len=2)
        state, outcomes = dmlc_epoch(state, unit_grid, noisy_sampler, rng)
        learning = outcomes[0]
        assert learning.phase == "learning"
        idlers = [i for i, acts in enumerate(learning.actions) if not acts]
        for i in idlers:
            assert learning.distance_delta[i] == 0.0
        coverage = [o for o in outcomes if o.phase == "coverage"]
        assert coverage and all(
            acts[0].kind == COVER for o in coverage for acts in o.actions)

    def test_max_coverage_cap_respected(self, unit_grid, rng):
        model = seeded_model(rng)
        config = TeamConfiguration.at(rng.uniform(0, 1, (3, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = DmlcState(model, config, config.positions.copy(), m0,
                          alpha=0.7, beta=2.0, first_epoch_len=8)
        _, outcomes = dmlc_epoch(state, unit_grid, noisy_sampler, rng,
                                 max_coverage_iters=3)
        assert sum(1 for o in outcomes if o.phase == "coverage") == 3

    def test_travel_charged_segment_by_segment(self, unit_grid, rng):
        model = seeded_model(rng, n_low=6)
        config = TeamConfiguration.at(rng.uniform(0, 1, (2, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = DmlcState(model, config, config.positions.copy(), m0,
                          alpha=0.5, beta=2.0, first_epoch_len=1)
        state, outcomes = dmlc_epoch(state, unit_grid, noisy_sampler, rng)
        total = sum(o.distance_delta for o in outcomes)
        np.testing.assert_allclose(state.config.travel, total, atol=1e-12)


class TestBaseline:
    def test_uniform_single_agent_converges_in_one_step(self, unit_grid):
        config = TeamConfiguration.at([[0.1, 0.9]])
        traj = known_density_baseline(config, unit_grid, np.ones(unit_grid.n_points), 3)
        np.testing.assert_allclose(traj[1].positions[0], [0.5, 0.5], atol=1e-12)

    def test_regret_decays_to_near_zero(self, unit_grid, rng):
        density = eval_test_density(PHI_HIGH, unit_grid)
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        traj = known_density_baseline(config, unit_grid, density, 60)
        regrets = [geometry.instantaneous_regret(unit_grid, c, density) for c in traj]
        assert regrets[-1] < 1e-3 * max(regrets[0], 1e-12)

    def test_sixty_iterations_run_fast(self, unit_grid, rng):
        import time
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        density = eval_test_density(PHI_HIGH, unit_grid)
        start = time.perf_counter()
        known_density_baseline(config, unit_grid, density, 60)
        assert time.perf_counter() - start < 1.0


class TestSingleFidelityVariant:
    def test_collapsed_dataset_size(self, rng):
        low = FidelityDataset(1, rng.uniform(0, 1, (25, 2)), rng.normal(0, 1, 25))
        high = FidelityDataset(2, rng.uniform(0, 1, (10, 2)), rng.normal(0, 1, 10))
        model = single_fidelity_model([low, high], KernelParams(10.0, 0.05), 1.0)
        assert model.n_total == 35
        assert model.hyper.s == 1

    def test_overconfident_at_low_fidelity_sample_sites(self, rng):
        kernel_high = KernelParams(10.0, 0.05)
        x0 = np.array([0.5, 0.5])
        low = FidelityDataset(1, x0.reshape(1, 2), [5.0])
        multi_hyper = MfgpHyper((KernelParams(5.0, 0.2), kernel_high), (1.0,), (1.0, 1.0))
        multi = MfgpModel(multi_hyper, [low, mfgp.empty_dataset(2)])
        single = single_fidelity_model([low], kernel_high, 1.0)
        _, v_multi = multi.posterior_at(x0)
        _, v_single = single.posterior_at(x0)
        assert v_single < v_multi

    def test_matches_multi_fidelity_when_rho_terms_inert(self, unit_grid):
        # with no low-fidelity data and a negligible first-level kernel, the
        # two-fidelity posterior collapses onto the plain GP with the same
        # top-level kernel: identical decisions, numerically equal paths
        kernel_high = KernelParams(10.0, 0.05)
        inert = MfgpHyper((KernelParams(1e-16, 0.2), kernel_high), (1e-8,), (1.0, 1.0))
        multi = MfgpModel(inert)
        single = single_fidelity_model([], kernel_high, 1.0)
        for fid_model, fid in ((multi, 2), (single, 1)):
            for k, (x, y) in enumerate([((0.2, 0.3), 1.0), ((0.7, 0.6), 3.0),
                                        ((0.4, 0.8), -0.5)]):
                new = fid_model.add_observation(fid, x, y)
                fid_model = new
            if fid == 2:
                multi = fid_model
            else:
                single = fid_model

        def run(model, seed):
            rng = np.random.default_rng(seed)
            config = TeamConfiguration.at(np.array([[0.3, 0.3], [0.7, 0.7]]))
            m0 = initial_max_variance(model, unit_grid)
            state = SmlcState(model, config, config.positions.copy(), m0, 1.0)
            kinds, traces = [], []
            for _ in range(6):
                state, outcome = smlc_iteration(state, unit_grid, noiseless_sampler, rng)
                kinds.append([a[0].kind for a in outcome.actions])
                traces.append(state.config.positions.copy())
            return kinds, np.asarray(traces)

        kinds_m, trace_m = run(multi, 21)
        kinds_s, trace_s = run(single, 21)
        assert kinds_m == kinds_s
        np.testing.assert_allclose(trace_m, trace_s, atol=1e-9)


class TestMseDecay:
    def test_estimate_improves_across_learning_events(self, unit_grid):
        # noiseless sampling: grid MSE decays across learning events. A GP
        # update can nudge the global MSE up by a few percent transiently
        # (measured <= 6% on desk-scale traces), so monotonicity carries a
        # small relative tolerance while the overall decay is strict.
        rng = np.random.default_rng(2)
        model = two_fid_model(noise=(1.0, 0.0))
        true_field = eval_test_density(PHI_HIGH, unit_grid)
        config = TeamConfiguration.at(rng.uniform(0, 1, (4, 2)))
        m0 = initial_max_variance(model, unit_grid)
        state = SmlcState(model, config, config.positions.copy(), m0, 1.0)
        event_mse = [float(((state.model.posterior(unit_grid.points)[0]
                             - true_field) ** 2).mean())]
        for _ in range(30):
            state, outcome = smlc_iteration(state, unit_grid, noiseless_sampler, rng)
            if outcome.samples:
                event_mse.append(float(((state.model.posterior(unit_grid.points)[0]
                                         - true_field) ** 2).mean()))
        assert len(event_mse) >= 5
        for prev, nxt in zip(event_mse, event_mse[1:]):
            assert nxt <= 1.10 * prev
        assert event_mse[-1] < 0.01 * event_mse[0]
