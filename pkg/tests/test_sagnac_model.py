"""Interferometer pipeline tests: scenario validation, planning, port physics."""

import math

import numpy as np
import pytest

from sagnacsim import (
    LoopLossSpec,
    Scenario,
    build_and_run,
    loop_photon_number,
    photon_moments,
    plan_pipeline,
)


def ph(g=2.0, n_seed=10.0, **kw):
    return Scenario(
        model="degenerate",
        detection="parametric_homodyne",
        g=g,
        seed=complex(math.sqrt(n_seed)),
        **kw,
    )


def dd(g=2.0, n_seed=10.0, **kw):
    return Scenario(
        model="degenerate", detection="direct", g=g, seed=complex(math.sqrt(n_seed)), **kw
    )


class TestScenarioValidation:
    def test_defaults(self):
        sc = dd()
        assert sc.g_m == sc.g
        assert sc.pump_phase_loop == 0.0
        assert sc.pump_phase_meas == math.pi
        assert sc.detector_efficiency == 1.0
        assert sc.num_modes == 2

    def test_nondegenerate_uses_four_modes(self):
        sc = Scenario(model="nondegenerate", detection="direct", g=1.0, seed=(1 + 0j, 0j))
        assert sc.num_modes == 4

    @pytest.mark.parametrize(
        "kw",
        [
            {"model": "triple"},
            {"detection": "heterodyne"},
            {"g": -0.5},
            {"g": float("nan")},
            {"detector_efficiency": 1.2},
            {"detector_efficiency": -0.1},
            {"snl_convention": "other"},
        ],
    )
    def test_bad_fields_rejected(self, kw):
        base = dict(model="degenerate", detection="direct", g=1.0, seed=1 + 0j)
        base.update(kw)
        with pytest.raises(ValueError):
            Scenario(**base)

    def test_degenerate_rejects_seed_pair(self):
        with pytest.raises(ValueError):
            Scenario(model="degenerate", detection="direct", g=1.0, seed=(1 + 0j, 0j))

    def test_nondegenerate_requires_seed_pair(self):
        with pytest.raises(ValueError):
            Scenario(model="nondegenerate", detection="direct", g=1.0, seed=1 + 0j)

    def test_measured_modes_choices(self):
        for mm in ("signal", "idler", "both"):
            Scenario(model="nondegenerate", detection="direct", g=1.0, seed=(1 + 0j, 0j),
                     measured_modes=mm)
        with pytest.raises(ValueError):
            Scenario(model="nondegenerate", detection="direct", g=1.0, seed=(1 + 0j, 0j),
                     measured_modes="all")

    def test_imaginary_seed_warns(self):
        # formulas assume a real seed; complex input is allowed but flagged
        with pytest.warns(UserWarning):
            Scenario(model="degenerate", detection="direct", g=1.0, seed=1 + 0.5j)


class TestLoopLossSpec:
    def test_symmetric_split(self):
        spec = LoopLossSpec(total_transmission=0.49)
        assert np.allclose(spec.arm_transmissions(), [0.7, 0.7, 0.7, 0.7])

    def test_opa_at_bs_puts_all_loss_after(self):
        spec = LoopLossSpec(total_transmission=0.6, placement="opa_at_bs")
        assert np.allclose(spec.arm_transmissions(), [1.0, 0.6, 0.6, 1.0])

    def test_custom_fraction(self):
        spec = LoopLossSpec(total_transmission=0.25, placement="custom", cw_pre_fraction=0.5)
        assert np.allclose(spec.arm_transmissions(), [0.5, 0.5, 0.5, 0.5])

    def test_transmissions_multiply_to_total(self):
        spec = LoopLossSpec(total_transmission=0.3, placement="custom", cw_pre_fraction=0.2)
        pre_cw, post_cw, pre_ccw, post_ccw = spec.arm_transmissions()
        assert np.allclose(pre_cw * post_cw, 0.3)
        assert np.allclose(pre_ccw * post_ccw, 0.3)

    @pytest.mark.parametrize(
        "kw",
        [
            {"total_transmission": -0.1},
            {"total_transmission": 1.5},
            {"placement": "everywhere"},
            {"placement": "custom"},
            {"placement": "custom", "cw_pre_fraction": 1.5},
            {"placement": "symmetric", "cw_pre_fraction": 0.5},
        ],
    )
    def test_bad_specs_rejected(self, kw):
        base = dict(total_transmission=0.7)
        base.update(kw)
        with pytest.raises(ValueError):
            LoopLossSpec(**base)


class TestPlanPipeline:
    def test_degenerate_step_order(self):
        plan = plan_pipeline(dd(), 0.01)
        ops = [op for op, _ in plan.steps]
        assert ops == [
            "displace",
            "beamsplitter",
            "single_squeezer",
            "single_squeezer",
            "phase",
            "phase",
            "beamsplitter",
        ]
        assert plan.num_modes == 2

    def test_unit_transmission_emits_no_loss_steps(self):
        plan = plan_pipeline(ph(detector_efficiency=1.0), 0.01)
        assert all(op != "loss" for op, _ in plan.steps)

    def test_loss_steps_respect_placement(self):
        sc = dd(loop_loss=LoopLossSpec(total_transmission=0.6, placement="opa_at_bs"))
        plan = plan_pipeline(sc, 0.01)
        ops = [op for op, _ in plan.steps]
        # opa_at_bs: no pre-amplifier loss, both post-loop arms attenuated
        assert ops.count("loss") == 2
        etas = [p["eta"] for op, p in plan.steps if op == "loss"]
        assert np.allclose(etas, 0.6)

    def test_include_loss_flag_strips_loss(self):
        sc = dd(loop_loss=LoopLossSpec(total_transmission=0.5), detector_efficiency=0.8)
        plan = plan_pipeline(sc, 0.01, include_loss=False)
        assert all(op != "loss" for op, _ in plan.steps)

    def test_counter_propagating_phases_are_opposite(self):
        plan = plan_pipeline(dd(), 0.03)
        thetas = sorted(p["theta"] for op, p in plan.steps if op == "phase")
        assert np.allclose(thetas, [-0.03, 0.03])

    def test_measurement_amplifier_only_for_parametric_homodyne(self):
        plan_dd = plan_pipeline(dd(), 0.01)
        plan_ph = plan_pipeline(ph(g_m=3.0), 0.01)
        n_sq_dd = sum(op == "single_squeezer" for op, _ in plan_dd.steps)
        n_sq_ph = sum(op == "single_squeezer" for op, _ in plan_ph.steps)
        assert n_sq_ph == n_sq_dd + 1
        op, params = plan_ph.steps[-1]
        assert op == "single_squeezer"
        assert params["g"] == 3.0
        assert params["pump_phase"] == math.pi

    def test_markers_bracket_the_loop(self):
        sc = ph(loop_loss=LoopLossSpec(total_transmission=0.7), detector_efficiency=0.9)
        plan = plan_pipeline(sc, 0.05)
        # steps[:loop_end] is the loop body; the recombining splitter follows
        assert plan.steps[plan.loop_end][0] == "beamsplitter"
        assert plan.recombine_end == plan.loop_end + 1
        assert plan.steps[plan.loop_end - 1][0] == "loss"
        assert plan.dark_modes == (1,)
        assert plan.bright_modes == (0,)
        assert plan.measured_modes == plan.dark_modes

    def test_nondegenerate_uses_pair_squeezers(self):
        sc = Scenario(model="nondegenerate", detection="direct", g=0.5, seed=(1 + 0j, 1 + 0j))
        plan = plan_pipeline(sc, 0.02)
        ops = [op for op, _ in plan.steps]
        assert ops.count("two_mode_squeezer") == 2
        assert ops.count("phase") == 4
        assert plan.num_modes == 4

    def test_nondegenerate_measured_mode_selection(self):
        base = dict(model="nondegenerate", detection="direct", g=0.5, seed=(1 + 0j, 1 + 0j))
        assert plan_pipeline(Scenario(**base, measured_modes="signal"), 0.01).measured_modes == (2,)
        assert plan_pipeline(Scenario(**base, measured_modes="idler"), 0.01).measured_modes == (3,)
        assert plan_pipeline(Scenario(**base), 0.01).measured_modes == (2, 3)


class TestDarkPortPhysics:
    def test_dark_port_mean_vanishes_at_zero_phase(self):
        # classical amplitude interferes destructively for any seed
        for n_seed in (0.0, 1.0, 10.0, 1e6):
            rep = build_and_run(dd(n_seed=n_seed), 0.0)
            assert np.allclose(rep.dark_port_state.mean, 0.0, atol=1e-12)

    def test_dark_port_is_squeezed_vacuum_at_zero_phase(self):
        rep = build_and_run(dd(g=2.0), 0.0)
        dark = rep.dark_port_state
        assert np.allclose(dark.cov, np.diag([math.exp(4.0) / 4, math.exp(-4.0) / 4]))
        mean_n = photon_moments(dark, (0,)).mean_n
        assert np.allclose(mean_n, math.sinh(2.0) ** 2)
        assert np.allclose(mean_n, 13.1541, atol=1e-4)

    def test_classical_fringe(self):
        # g=0: dark-port intensity follows the plain interferometer fringe
        for phi in (0.05, 0.3, 1.0):
            rep = build_and_run(dd(g=0.0, n_seed=10.0), phi)
            mean_n = photon_moments(rep.dark_port_state, (0,)).mean_n
            assert np.allclose(mean_n, 10.0 * math.sin(phi) ** 2)

    def test_dark_port_quadrature_mean_grows_with_gain(self):
        rep = build_and_run(dd(g=2.0, n_seed=10.0), 0.01)
        y_mean = rep.dark_port_state.mean[1]
        assert np.allclose(y_mean, 0.23365, atol=1e-4)

    def test_phase_parity(self):
        sc = dd(g=1.5, n_seed=4.0)
        plus = build_and_run(sc, 0.07)
        minus = build_and_run(sc, -0.07)
        n_plus = photon_moments(plus.dark_port_state, (0,)).mean_n
        n_minus = photon_moments(minus.dark_port_state, (0,)).mean_n
        assert np.allclose(n_plus, n_minus)
        assert np.allclose(plus.dark_port_state.mean[1], -minus.dark_port_state.mean[1])

    def test_ports_conserve_loop_photons(self):
        sc = dd(g=1.2, n_seed=7.0)
        rep = build_and_run(sc, 0.13)
        dark = photon_moments(rep.dark_port_state, (0,)).mean_n
        bright = photon_moments(rep.bright_port_state, (0,)).mean_n
        assert abs(dark + bright - rep.n_in) < 1e-9

    def test_dark_port_intensity_model(self):
        # amplified fringe plus spontaneous floor
        g, alpha2, phi = 1.3, 9.0, 0.04
        rep = build_and_run(dd(g=g, n_seed=alpha2), phi)
        mean_n = photon_moments(rep.dark_port_state, (0,)).mean_n
        expected = alpha2 * math.exp(2 * g) * math.sin(phi) ** 2 + math.sinh(g) ** 2
        assert np.allclose(mean_n, expected)


class TestLoopPhotonNumber:
    def test_matches_closed_form(self):
        assert np.allclose(loop_photon_number(dd(g=2.0, n_seed=10.0)), 572.288, atol=1e-3)
        exact = 10.0 * math.exp(4.0) + 2.0 * math.sinh(2.0) ** 2
        assert np.allclose(loop_photon_number(dd(g=2.0, n_seed=10.0)), exact, atol=1e-10)

    def test_trivial_limits(self):
        assert loop_photon_number(dd(g=0.0, n_seed=0.0)) == pytest.approx(0.0, abs=1e-12)
        assert loop_photon_number(dd(g=0.0, n_seed=10.0)) == pytest.approx(10.0)

    def test_ignores_loss(self):
        # the reference photon number is defined on the lossless variant
        lossy = dd(loop_loss=LoopLossSpec(total_transmission=0.5))
        assert np.allclose(loop_photon_number(lossy), loop_photon_number(dd()))

    def test_nondegenerate_total(self):
        g = 0.8
        a_s, a_i = math.sqrt(3.0), math.sqrt(2.0)
        sc = Scenario(
            model="nondegenerate",
            detection="direct",
            g=g,
            seed=(complex(a_s), complex(a_i)),
        )
        ch, sh = math.cosh(g), math.sinh(g)
        expected = (ch * a_s + sh * a_i) ** 2 + (ch * a_i + sh * a_s) ** 2 + 4 * sh**2
        assert np.allclose(loop_photon_number(sc), expected)


class TestBuildAndRun:
    def test_report_shape(self):
        rep = build_and_run(ph(), 0.01)
        assert rep.measured_modes == (1,)
        assert rep.detector_state.num_modes == 2
        assert rep.n_in > 0
        assert rep.n_in_lossy == pytest.approx(rep.n_in)

    def test_lossy_photon_count_is_reported_separately(self):
        sc = dd(loop_loss=LoopLossSpec(total_transmission=0.4), detector_efficiency=0.9)
        rep = build_and_run(sc, 0.02)
        assert rep.n_in_lossy < rep.n_in

    def test_placement_is_inert_without_loss(self):
        # eta=1 makes every placement the identity
        reps = [
            build_and_run(dd(loop_loss=LoopLossSpec(1.0, placement=pl)), 0.03)
            for pl in ("symmetric", "opa_at_bs")
        ]
        assert np.allclose(reps[0].detector_state.cov, reps[1].detector_state.cov)
        assert np.allclose(reps[0].detector_state.mean, reps[1].detector_state.mean)

    def test_parametric_homodyne_unsqueezes_dark_port_at_zero_phase(self):
        # balanced measurement amplifier undoes the loop squeezing exactly
        rep = build_and_run(ph(g=1.0), 0.0)
        mean_n = photon_moments(rep.detector_state, rep.measured_modes).mean_n
        assert abs(mean_n) < 1e-12

    def test_detector_loss_applies_only_to_measured_modes(self):
        sc = dd(detector_efficiency=0.5)
        rep = build_and_run(sc, 0.1)
        bright = photon_moments(rep.detector_state, (0,)).mean_n
        lossless = build_and_run(dd(), 0.1)
        bright_ref = photon_moments(lossless.detector_state, (0,)).mean_n
        assert np.allclose(bright, bright_ref)

    def test_nondegenerate_symmetric_seed_matches_degenerate_ratio_curve(self):
        # equal seeding with joint detection mimics the single-frequency layout
        # in the large-seed regime
        n_total, g, phi = 1e8, 1.5, 0.01
        deg = dd(g=g, n_seed=n_total)
        half = complex(math.sqrt(n_total / 2.0))
        nd = Scenario(model="nondegenerate", detection="direct", g=g, seed=(half, half))
        rep_d = build_and_run(deg, phi)
        rep_n = build_and_run(nd, phi)
        n_d = photon_moments(rep_d.detector_state, rep_d.measured_modes)
        n_n = photon_moments(rep_n.detector_state, rep_n.measured_modes)
        # identical fringe terms; spontaneous floors differ (two pair modes
        # emit twice the single-frequency floor)
        sh2 = math.sinh(g) ** 2
        assert np.allclose(n_n.mean_n - 2 * sh2, n_d.mean_n - sh2, rtol=1e-10)

    def test_finite_output_for_extreme_inputs(self):
        rep = build_and_run(dd(g=5.0, n_seed=1e10), 0.2)
        assert np.isfinite(rep.detector_state.cov).all()
        assert np.isfinite(photon_moments(rep.detector_state, rep.measured_modes).var_n)
