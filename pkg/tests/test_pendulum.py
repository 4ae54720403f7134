import math

import numpy as np
import pytest

from it2fuzzy.decomposed import UndefinedOutput
from it2fuzzy.pendulum import (
    Metrics,
    PendulumState,
    PlantParams,
    SimConfig,
    SimulationDiverged,
    Trace,
    compute_metrics,
    controller_input,
    dynamics,
    gaussian_noise,
    rk4,
    rk4_step,
    run_closed_loop,
)

G = 9.8
PLANT = PlantParams()


class TestDynamics:
    def test_upright_equilibrium(self):
        assert dynamics(PendulumState(0.0, 0.0, 0.0), 0.0, PLANT) == (0.0, 0.0, 0.0)

    def test_pure_force_response(self):
        # with the pole upright, 1.5 N of filtered force gives -2 rad/s^2
        dy, dy_dot, df = dynamics(PendulumState(0.0, 0.0, 1.5), 0.0, PLANT)
        assert dy == 0.0
        assert dy_dot == pytest.approx(-2.0, abs=1e-12)
        assert df == pytest.approx(-150.0, abs=1e-12)

    def test_horizontal_pole_feels_only_gravity(self):
        # cos kills the force coupling, leaving g / (2/3)
        _, dy_dot, _ = dynamics(PendulumState(math.pi / 2, 0.0, 0.0), 0.0, PLANT)
        assert dy_dot == pytest.approx(1.5 * G, abs=1e-12)

    def test_non_finite_state_rejected(self):
        with pytest.raises(ValueError):
            dynamics(PendulumState(math.nan, 0.0, 0.0), 0.0, PLANT)

    def test_gravity_validation(self):
        with pytest.raises(ValueError):
            PlantParams(gravity=0.0)


class TestRk4:
    def test_actuator_subsystem_matches_exponential(self):
        # first-order lag toward a unit command has the closed form
        # 1 - exp(-100 t); the integrator must track it to 1e-6 at dt=1e-3
        dt = 1e-3
        command = 1.0
        state = np.array([0.0])
        deriv = lambda s: np.array([-100.0 * s[0] + 100.0 * command])
        worst = 0.0
        for step in range(1, 101):
            state = rk4(deriv, state, dt)
            exact = command * (1.0 - math.exp(-100.0 * step * dt))
            worst = max(worst, abs(state[0] - exact))
        assert worst < 1e-6

    def test_fourth_order_convergence_on_actuator(self):
        command = 1.0
        deriv = lambda s: np.array([-100.0 * s[0] + 100.0 * command])

        def endpoint_error(dt):
            steps = int(round(0.05 / dt))
            state = np.array([0.0])
            for _ in range(steps):
                state = rk4(deriv, state, dt)
            return abs(state[0] - command * (1.0 - math.exp(-100.0 * steps * dt)))

        ratio = endpoint_error(2e-3) / endpoint_error(1e-3)
        assert 8 < ratio < 32

    def test_full_plant_step_halving(self):
        # halving dt changes the open-loop endpoint like a fourth-order method

        def endpoint(dt):
            state = PendulumState(0.01, 0.0, 0.0)
            for _ in range(int(round(1.0 / dt))):
                state = rk4_step(state, 0.0, dt, PLANT)
            return state.angle

        d1 = abs(endpoint(4e-3) - endpoint(2e-3))
        d2 = abs(endpoint(2e-3) - endpoint(1e-3))
        assert 6 < d1 / d2 < 40

    def test_equilibrium_is_fixed_point(self):
        state = PendulumState(0.0, 0.0, 0.0)
        assert rk4_step(state, 0.0, 1e-3, PLANT) == state

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            rk4_step(PendulumState(0.0, 0.0, 0.0), 0.0, 0.0, PLANT)

    def test_divergence_detected(self):
        with pytest.raises((SimulationDiverged, ValueError)):
            state = PendulumState(0.0, 1e200, 0.0)
            for _ in range(10):
                state = rk4_step(state, 0.0, 1e-3, PLANT)


class TestControllerInput:
    def test_sign_convention(self):
        e, e_dot = controller_input(PendulumState(0.1, 0.0, 0.0), 0.0, math.pi / 4)
        assert e == -0.1
        assert e_dot == 0.0

    def test_saturation(self):
        e, _ = controller_input(PendulumState(-1.0, 0.0, 0.0), 0.0, math.pi / 4)
        assert e == math.pi / 4
        _, e_dot = controller_input(PendulumState(0.0, 2.0, 0.0), 0.0, math.pi / 4)
        assert e_dot == -math.pi / 4

    def test_noise_is_additive_on_error_only(self):
        e, e_dot = controller_input(PendulumState(0.0, 0.0, 0.0), 0.02, math.pi / 4)
        assert e == 0.02
        assert e_dot == 0.0


class TestGaussianNoise:
    def test_zero_sigma_is_exactly_zero(self):
        rng = np.random.default_rng(1)
        assert all(gaussian_noise(rng, 0.0) == 0.0 for _ in range(100))

    def test_sample_std(self):
        rng = np.random.default_rng(2)
        samples = [gaussian_noise(rng, 0.01) for _ in range(100_000)]
        assert np.std(samples) == pytest.approx(0.01, rel=0.02)
        assert np.mean(samples) == pytest.approx(0.0, abs=5e-4)

    def test_seed_reproducibility(self):
        a = [gaussian_noise(np.random.default_rng(3), 0.5) for _ in range(5)]
        b = [gaussian_noise(np.random.default_rng(3), 0.5) for _ in range(5)]
        assert a == b

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            gaussian_noise(np.random.default_rng(0), -1.0)


class TestRunClosedLoop:
    def test_exact_equilibrium_start_stays_upright(self, t1_system):
        cfg = SimConfig(controller=t1_system, theta0=0.0, duration=2.0)
        trace = run_closed_loop(cfg)
        assert np.max(np.abs(trace.angle)) < 1e-12

    def test_open_loop_diverges_from_upright(self):
        cfg = SimConfig(controller=lambda e, e_dot: 0.0, theta0=0.01, duration=1.0)
        trace = run_closed_loop(cfg)
        assert abs(trace.angle[-1]) > 10 * 0.01

    def test_determinism_bitwise(self, it2_system):
        cfg = SimConfig(controller=it2_system, noise_sigma=0.01, rng_seed=9, duration=0.5)
        a, b = run_closed_loop(cfg), run_closed_loop(cfg)
        for col_a, col_b in zip(a.columns(), b.columns()):
            np.testing.assert_array_equal(col_a, col_b)

    def test_trajectory_negation_symmetry(self, t1_system):
        base = dict(controller=t1_system, theta0=0.1, theta_dot0=0.05, duration=2.0)
        plus = run_closed_loop(SimConfig(**base))
        minus = run_closed_loop(SimConfig(**{**base, "theta0": -0.1, "theta_dot0": -0.05}))
        np.testing.assert_allclose(plus.angle, -minus.angle, atol=1e-9)

    def test_undefined_controller_output_counts_and_zero_force(self):
        def always_undefined(e, e_dot):
            raise UndefinedOutput("nothing fired")

        cfg = SimConfig(controller=always_undefined, theta0=0.01, duration=0.05)
        trace = run_closed_loop(cfg)
        assert trace.undefined_output_count == len(trace) == 50
        assert np.all(trace.force_command == 0.0)

    def test_divergence_aborts_with_partial_trace(self):
        cfg = SimConfig(controller=lambda e, e_dot: 1e160, theta0=0.0, duration=1.0)
        trace = run_closed_loop(cfg)
        assert trace.aborted
        assert trace.abort_reason is not None
        assert len(trace) < 1000

    def test_rejects_unknown_controller(self):
        with pytest.raises(TypeError):
            run_closed_loop(SimConfig(controller="pid"))

    def test_config_validation(self, t1_system):
        with pytest.raises(ValueError):
            SimConfig(controller=t1_system, dt=-1.0)
        with pytest.raises(ValueError):
            SimConfig(controller=t1_system, noise_sigma=-0.1)
        with pytest.raises(ValueError):
            SimConfig(controller=t1_system, duration=1e-9)


class TestTraceCsv:
    def test_round_trip_is_exact(self, t1_system, tmp_path):
        cfg = SimConfig(controller=t1_system, noise_sigma=0.01, rng_seed=4, duration=0.2)
        trace = run_closed_loop(cfg)
        path = tmp_path / "trace.csv"
        trace.write_csv(path)
        loaded = Trace.read_csv(path)
        for col_a, col_b in zip(trace.columns(), loaded.columns()):
            np.testing.assert_array_equal(col_a, col_b)

    def test_header(self, t1_system, tmp_path):
        cfg = SimConfig(controller=t1_system, duration=0.01)
        path = tmp_path / "trace.csv"
        run_closed_loop(cfg).write_csv(path)
        assert path.read_text().splitlines()[0] == "t,y,y_dot,f_bar,e_measured,f_command"


def _synthetic_trace(y: np.ndarray, dt: float = 1e-3) -> Trace:
    n = y.size
    zeros = np.zeros(n)
    return Trace(
        t=np.arange(n) * dt,
        angle=y,
        angular_velocity=zeros,
        actuator_force=zeros,
        error_measured=-y,
        force_command=zeros,
    )


class TestMetrics:
    def test_constant_zero_trace(self):
        m = compute_metrics(_synthetic_trace(np.zeros(1000)))
        assert m.settled and m.settling_time == 0.0
        assert m.overshoot == 0.0
        assert m.ise == 0.0
        assert m.post_settle_rms == 0.0

    def test_exponential_decay_settling_time(self):
        dt = 1e-3
        t = np.arange(0, 5.0, dt)
        m = compute_metrics(_synthetic_trace(0.1 * np.exp(-t)), band=0.005)
        assert m.settled
        assert m.settling_time == pytest.approx(math.log(20.0), abs=0.01)
        # the ise is a left-endpoint rectangle sum, so the exact expected
        # value is the geometric series of 0.01 exp(-2 i dt)
        expected = 0.01 * dt * (1 - math.exp(-2 * t.size * dt)) / (1 - math.exp(-2 * dt))
        assert m.ise == pytest.approx(expected, rel=1e-9)

    def test_growing_trace_never_settles(self):
        t = np.arange(0, 2.0, 1e-3)
        m = compute_metrics(_synthetic_trace(0.01 * np.exp(t)), band=0.005)
        assert not m.settled
        assert m.settling_time is None

    def test_overshoot_past_upright(self):
        y = np.concatenate([np.linspace(0.1, -0.03, 500), np.full(500, -0.001)])
        m = compute_metrics(_synthetic_trace(y), band=0.05)
        assert m.overshoot == pytest.approx(0.03, abs=1e-12)

    def test_no_crossing_means_no_overshoot(self):
        t = np.arange(0, 1.0, 1e-3)
        m = compute_metrics(_synthetic_trace(0.1 * np.exp(-t)))
        assert m.overshoot == 0.0

    def test_requires_rows(self):
        with pytest.raises(ValueError):
            compute_metrics(_synthetic_trace(np.array([0.1])))
