import math

import numpy as np
import pytest

from ncspectral.action_assembly import (
    CutoffMoments,
    DivergentMomentError,
    ExpansionReport,
    assemble,
    cutoff_moments,
    moment_quadrature,
)


class TestCutoffMoments:
    def test_exponential_analytic(self):
        m = cutoff_moments({"family": "exponential"}, [1, 2, 3, 4])
        assert m.phi0 == 1.0
        assert m.phi(2) == pytest.approx(0.5)
        assert m.phi(3) == pytest.approx(math.sqrt(math.pi) / 4)
        assert m.phi(4) == pytest.approx(0.5)
        assert m.provenance[2] == "analytic"

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_quadrature_matches_gamma(self, k):
        val, err = moment_quadrature(lambda t: math.exp(-t), k)
        assert val == pytest.approx(0.5 * math.gamma(k / 2.0), abs=1e-8)
        assert err < 1e-8

    def test_gaussian_family(self):
        m = cutoff_moments({"family": "gaussian"}, [2])
        val, _ = moment_quadrature(lambda t: math.exp(-t * t), 2)
        assert m.phi(2) == pytest.approx(val, abs=1e-10)

    def test_callable_path(self):
        m = cutoff_moments(lambda t: math.exp(-t), [2, 3])
        assert m.phi(2) == pytest.approx(0.5, abs=1e-8)
        assert m.provenance[3] == "quadrature"
        assert m.error_bound <= 1e-8

    def test_tabulated_cutoff(self):
        ts = np.linspace(0.0, 30.0, 400)
        table = [[t, math.exp(-t)] for t in ts]
        m = cutoff_moments({"table": table}, [2, 4])
        assert m.phi(2) == pytest.approx(0.5, abs=1e-6)
        assert m.phi(4) == pytest.approx(0.5, abs=1e-6)
        assert m.phi0 == pytest.approx(1.0)

    def test_step_like_cutoff_passes_phi0_through(self):
        # smoothed indicator: Phi(0) = 1 regardless of the decay profile
        ts = np.linspace(0.0, 4.0, 200)
        table = [[t, 1.0 / (1.0 + math.exp(40 * (t - 1.0)))] for t in ts]
        m = cutoff_moments({"table": table}, [2])
        assert m.phi0 == pytest.approx(1.0, abs=1e-6)

    def test_divergent_moment_rejected(self):
        with pytest.raises(DivergentMomentError):
            moment_quadrature(lambda t: math.exp(-t), 0)

    def test_growing_table_rejected(self):
        table = [[t, math.exp(t)] for t in np.linspace(0, 5, 50)]
        with pytest.raises(DivergentMomentError):
            cutoff_moments({"table": table}, [2])

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            cutoff_moments({"family": "boxcar"}, [2])

    def test_scaling_property(self):
        base = cutoff_moments({"family": "exponential"}, [1, 2, 3])
        scaled = cutoff_moments(
            {"family": "exponential", "params": {"scale": 3.0}}, [1, 2, 3])
        assert scaled.phi0 == pytest.approx(3.0 * base.phi0)
        for k in (1, 2, 3):
            assert scaled.phi(k) == pytest.approx(3.0 * base.phi(k))


class TestAssemble:
    def setup_method(self):
        self.moments = cutoff_moments({"family": "exponential"}, [1, 2, 3])

    def test_suq2_zero_fluctuation_shape(self):
        rep = assemble({3: 2.0, 2: 0.0, 1: -0.5}, 0.0, self.moments, 2.0)
        phi3 = math.sqrt(math.pi) / 4
        phi1 = math.sqrt(math.pi) / 2
        assert rep.coefficient(3) == pytest.approx(2 * phi3)
        assert rep.coefficient(2) == 0.0
        assert rep.coefficient(1) == pytest.approx(-0.5 * phi1)
        assert rep.total == pytest.approx(2 * phi3 * 8 - 0.5 * phi1 * 2)

    def test_torus_n2_shape(self):
        m = cutoff_moments({"family": "exponential"}, [2])
        rep = assemble({2: 4 * math.pi}, 0.0, m, 5.0)
        assert rep.total == pytest.approx(4 * math.pi * 0.5 * 25)

    def test_all_zero(self):
        rep = assemble({3: 0.0, 2: 0.0, 1: 0.0}, 0.0, self.moments, 1.0)
        assert rep.total == 0.0

    def test_linearity_in_each_coefficient(self):
        base = assemble({3: 1.0, 2: 0.5, 1: -1.0}, 2.0, self.moments, 1.5)
        doubled = assemble({3: 2.0, 2: 0.5, 1: -1.0}, 2.0, self.moments, 1.5)
        delta = doubled.total - base.total
        assert delta == pytest.approx(self.moments.phi(3) * 1.0 * 1.5 ** 3)

    def test_strictly_decreasing_powers_enforced(self):
        with pytest.raises(ValueError):
            ExpansionReport(entries=[(1, 1.0, "a"), (2, 1.0, "b")], lam=1.0)

    def test_positive_lambda_required(self):
        with pytest.raises(ValueError):
            assemble({1: 1.0}, 0.0, self.moments, -2.0)

    def test_report_serialization(self):
        rep = assemble({2: 1.0, 1: 1.0j}, 0.25, self.moments, 2.0)
        doc = rep.to_dict()
        assert doc["lambda"] == 2.0
        assert doc["terms"][0]["power"] == 2
        assert doc["terms"][1]["coefficient"] == {"re": 0.0,
                                                  "im": self.moments.phi(1)}
