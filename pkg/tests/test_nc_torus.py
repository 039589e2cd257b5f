import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncspectral.lattice_zeta import AssumptionError
from ncspectral.action_assembly import cutoff_moments
from ncspectral.nc_torus import (
    OneFormTorus,
    Theta,
    TorusElement,
    adjoint,
    commutator,
    cs_sums,
    curvature,
    curvature_from_coefficients,
    delta_mu,
    dirac_truncated,
    gauge_transform,
    load_potential,
    tau,
    torus_action,
    weyl_mul,
    yang_mills,
    zeta0_shift,
    zeta0_shift_via_power_sums,
)

GOLDEN = (math.sqrt(5) - 1) / 2


def irrational_theta(n):
    vals = [GOLDEN, GOLDEN / 2, 1 / math.pi, GOLDEN / 4, GOLDEN / 10, 2 * GOLDEN]
    th = np.zeros((n, n))
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            th[i, j] = 2 * math.pi * vals[idx % len(vals)]
            th[j, i] = -th[i, j]
            idx += 1
    return Theta(th)


def random_element(rng, n, support=3, scale=0.5):
    coeffs = {}
    for _ in range(support):
        k = tuple(int(x) for x in rng.integers(-2, 3, size=n))
        coeffs[k] = complex(rng.normal(scale=scale), rng.normal(scale=scale))
    return TorusElement(n, coeffs)


def random_one_form(rng, n=4, nmodes=3):
    entries = []
    for _ in range(nmodes):
        alpha = int(rng.integers(1, n + 1))
        l = tuple(int(x) for x in rng.integers(-2, 3, size=n))
        if not any(l):
            continue
        entries.append((alpha, l, complex(rng.normal(scale=0.4),
                                          rng.normal(scale=0.4))))
    return OneFormTorus.from_entries(n, entries)


# strategy: small sparse elements of the 2-torus algebra
modes2 = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
coeff = st.complex_numbers(min_magnitude=0.0, max_magnitude=2.0,
                           allow_nan=False, allow_infinity=False)
elements2 = st.dictionaries(modes2, coeff, min_size=0, max_size=5).map(
    lambda d: TorusElement(2, d))


class TestWeylAlgebra:
    def test_unit_is_neutral(self):
        theta = irrational_theta(2)
        rng = np.random.default_rng(0)
        a = random_element(rng, 2)
        one = TorusElement.unit(2)
        assert weyl_mul(a, one, theta).allclose(a)
        assert weyl_mul(one, a, theta).allclose(a)

    def test_commutator_closed_form(self):
        theta = irrational_theta(2)
        k, l = (1, 0), (0, 1)
        uk = TorusElement.weyl(2, k)
        ul = TorusElement.weyl(2, l)
        comm = commutator(uk, ul, theta)
        expected = TorusElement(
            2, {(1, 1): -2j * math.sin(0.5 * theta.pairing(k, l))})
        assert comm.allclose(expected)

    def test_zero_theta_is_commutative(self):
        theta = Theta.zero(2)
        rng = np.random.default_rng(1)
        a, b = random_element(rng, 2), random_element(rng, 2)
        assert commutator(a, b, theta).norm1() < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(elements2, elements2, elements2)
    def test_associativity(self, a, b, c):
        theta = irrational_theta(2)
        left = weyl_mul(weyl_mul(a, b, theta), c, theta)
        right = weyl_mul(a, weyl_mul(b, c, theta), theta)
        assert (left - right).norm1() <= 1e-12 * max(
            1.0, a.norm1() * b.norm1() * c.norm1())

    @settings(max_examples=40, deadline=None)
    @given(elements2, elements2)
    def test_trace_property(self, a, b):
        theta = irrational_theta(2)
        lhs = weyl_mul(a, b, theta).tau()
        rhs = weyl_mul(b, a, theta).tau()
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, a.norm1() * b.norm1()))

    @settings(max_examples=40, deadline=None)
    @given(elements2, elements2)
    def test_adjoint_antimultiplicative(self, a, b):
        theta = irrational_theta(2)
        lhs = weyl_mul(a, b, theta).adjoint()
        rhs = weyl_mul(b.adjoint(), a.adjoint(), theta)
        assert (lhs - rhs).norm1() <= 1e-12 * max(1.0, a.norm1() * b.norm1())

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            weyl_mul(TorusElement.unit(2), TorusElement.unit(3), Theta.zero(2))


class TestAdjointTauDelta:
    def test_adjoint_of_scaled_weyl(self):
        a = TorusElement.weyl(2, (1, 0), 1j)
        assert a.adjoint().allclose(TorusElement.weyl(2, (-1, 0), -1j))

    def test_selfadjoint_fixed_point(self):
        a = TorusElement(2, {(1, 0): 1 + 2j, (-1, 0): 1 - 2j})
        assert a.is_selfadjoint()
        assert a.adjoint().allclose(a)

    def test_tau_values(self):
        assert TorusElement.unit(2).tau() == 1.0
        assert TorusElement.weyl(2, (1, 0)).tau() == 0.0

    def test_functional_forms(self):
        a = TorusElement.weyl(2, (1, 0), 2j)
        assert adjoint(a).allclose(a.adjoint())
        assert tau(a) == a.tau()
        assert delta_mu(a, 1).allclose(a.delta(1))

    def test_delta_on_weyl(self):
        a = TorusElement.weyl(2, (2, 0))
        assert a.delta(1).allclose(TorusElement.weyl(2, (2, 0), 2j))
        assert a.delta(2).allclose(TorusElement.weyl(2, (2, 0), 0.0))
        assert TorusElement.unit(2).delta(1).norm1() == 0.0

    @settings(max_examples=40, deadline=None)
    @given(elements2, elements2)
    def test_leibniz(self, a, b):
        theta = irrational_theta(2)
        for mu in (1, 2):
            lhs = weyl_mul(a, b, theta).delta(mu)
            rhs = (weyl_mul(a.delta(mu), b, theta)
                   + weyl_mul(a, b.delta(mu), theta))
            assert (lhs - rhs).norm1() <= 1e-11 * max(1.0, a.norm1() * b.norm1())

    def test_delta_index_range(self):
        with pytest.raises(IndexError):
            TorusElement.unit(2).delta(3)


class TestOneFormAndCurvature:
    def test_skew_completion(self):
        A = OneFormTorus.from_entries(2, [(1, (1, 0), 0.5 + 0.5j)])
        comp = A.component(1)
        assert comp.coeffs[(1, 0)] == pytest.approx(0.5 + 0.5j)
        assert comp.coeffs[(-1, 0)] == pytest.approx(-0.5 + 0.5j)
        assert comp.is_selfadjoint() is False
        assert (comp + comp.adjoint()).norm1() < 1e-14

    def test_conflicting_entries_rejected(self):
        with pytest.raises(ValueError):
            OneFormTorus.from_entries(
                2, [(1, (1, 0), 1.0), (1, (-1, 0), 1.0)])

    def test_zero_mode_must_be_imaginary(self):
        # at l = 0 the completion forces c = -conj(c)
        A = OneFormTorus.from_entries(2, [(1, (0, 0), 0.7j)])
        assert A.component(1).coeffs[(0, 0)] == pytest.approx(0.7j)
        with pytest.raises(ValueError):
            OneFormTorus.from_entries(2, [(1, (0, 0), 0.5)])

    def test_non_skew_component_rejected(self):
        bad = TorusElement(2, {(1, 0): 1.0})
        with pytest.raises(ValueError):
            OneFormTorus([bad, TorusElement(2)])

    def test_constant_potential_is_flat(self):
        A = OneFormTorus.from_entries(2, [(1, (0, 0), 1j), (2, (0, 0), 2j)])
        F = curvature(A, irrational_theta(2))
        assert F.component(1, 2).norm1() < 1e-14

    def test_curvature_antisymmetry_and_abelian_limit(self):
        rng = np.random.default_rng(5)
        A = random_one_form(rng, n=4)
        theta = irrational_theta(4)
        F = curvature(A, theta)
        for a in range(1, 5):
            for b in range(1, 5):
                assert (F.component(a, b) + F.component(b, a)).norm1() < 1e-12
        # theta = 0: commutator term drops exactly
        F0 = curvature(A, Theta.zero(4))
        for a in range(1, 5):
            for b in range(a + 1, 5):
                expected = A.component(b).delta(a) - A.component(a).delta(b)
                assert F0.component(a, b).allclose(expected)

    def test_two_curvature_paths_agree(self):
        rng = np.random.default_rng(6)
        theta = irrational_theta(4)
        for _ in range(5):
            A = random_one_form(rng, n=4)
            F1 = curvature(A, theta)
            F2 = curvature_from_coefficients(A, theta)
            for a in range(1, 5):
                for b in range(a + 1, 5):
                    assert (F1.component(a, b) - F2.component(a, b)).norm1() < 1e-11


class TestYangMillsAndGauge:
    def test_zero_potential(self):
        assert yang_mills(OneFormTorus.zero(4), irrational_theta(4)) == 0.0

    def test_abelian_single_mode_value(self):
        # theta = 0, one-mode potential: hand expansion of the field strength
        t = 0.7
        l = (0, 1, 0, 0)
        A = OneFormTorus.from_entries(4, [(1, l, 1j * t)])
        got = yang_mills(A, Theta.zero(4))
        # F_{1b} = -i sum_k a_{1,k} k_b U_k; only b = 2 survives with
        # tau(F_{12} F_{12}) = -2 t^2, counted twice by index symmetry
        assert got == pytest.approx(-4 * t * t, abs=1e-12)

    def test_gauge_invariance_under_weyl_unitaries(self):
        rng = np.random.default_rng(7)
        theta = irrational_theta(4)
        for _ in range(20):
            A = random_one_form(rng)
            k = tuple(int(x) for x in rng.integers(-2, 3, size=4))
            u = TorusElement.weyl(4, k)
            assert yang_mills(A, theta) == pytest.approx(
                yang_mills(gauge_transform(A, u, theta), theta), abs=1e-10)

    def test_pure_gauge_of_unit_mode(self):
        theta = irrational_theta(4)
        k = (1, 0, -1, 2)
        u = TorusElement.weyl(4, k)
        A = gauge_transform(OneFormTorus.zero(4), u, theta)
        for a in range(1, 5):
            expected = TorusElement(4, {(0, 0, 0, 0): -1j * k[a - 1]})
            assert A.component(a).allclose(expected)

    def test_identity_gauge(self):
        theta = irrational_theta(4)
        rng = np.random.default_rng(8)
        A = random_one_form(rng)
        A2 = gauge_transform(A, TorusElement.unit(4), theta)
        for a in range(1, 5):
            assert A.component(a).allclose(A2.component(a))

    def test_double_transform_composes(self):
        theta = irrational_theta(4)
        rng = np.random.default_rng(9)
        A = random_one_form(rng)
        u = TorusElement.weyl(4, (1, 0, 0, 0))
        v = TorusElement.weyl(4, (0, -1, 1, 0))
        lhs = gauge_transform(gauge_transform(A, v, theta), u, theta)
        rhs = gauge_transform(A, weyl_mul(u, v, theta), theta)
        for a in range(1, 5):
            assert (lhs.component(a) - rhs.component(a)).norm1() < 1e-10

    def test_non_unitary_rejected(self):
        theta = irrational_theta(4)
        u = TorusElement.weyl(4, (1, 0, 0, 0), 2.0)
        with pytest.raises(ValueError):
            gauge_transform(OneFormTorus.zero(4), u, theta)


class TestClosedFormAction:
    def test_cs_sums_vanish_for_zero_potential(self):
        theta = irrational_theta(4)
        A = OneFormTorus.zero(4)
        for q in (2, 3, 4):
            assert cs_sums(A, theta, q) == 0.0

    def test_cs_sum_single_mode_quadratic(self):
        t = 0.3
        l = (0, 1, 0, 0)
        A = OneFormTorus.from_entries(4, [(1, l, 1j * t)])
        c = 4 * math.pi ** 2 / 3
        # sum over modes +-l of a a (l_1^2 - |l|^2) = 2 (it)(it)(0 - 1) = 2 t^2
        assert cs_sums(A, irrational_theta(4), 2) == pytest.approx(
            2 * c * 2 * t * t, abs=1e-12)

    def test_zeta_shift_two_paths_and_yang_mills(self):
        rng = np.random.default_rng(10)
        theta = irrational_theta(4)
        c = 4 * math.pi ** 2 / 3
        for _ in range(10):
            A = random_one_form(rng)
            z_direct = zeta0_shift(A, theta, 4, diophantine_asserted=True)
            z_sums = zeta0_shift_via_power_sums(A, theta,
                                                diophantine_asserted=True)
            assert z_direct == pytest.approx(z_sums, abs=1e-10)
            assert z_direct == pytest.approx(-c * yang_mills(A, theta),
                                             abs=1e-10)

    def test_zeta_shift_n2_vanishes(self):
        rng = np.random.default_rng(11)
        theta = irrational_theta(2)
        A = OneFormTorus.from_entries(2, [(1, (1, 0), 0.4j), (2, (0, 1), 1.0)])
        assert zeta0_shift(A, theta, 2, diophantine_asserted=True) == 0.0

    def test_flag_required(self):
        A = OneFormTorus.zero(4)
        with pytest.raises(AssumptionError):
            zeta0_shift(A, irrational_theta(4), 4)
        with pytest.raises(AssumptionError):
            zeta0_shift_via_power_sums(A, irrational_theta(4))

    def test_unsupported_dimension(self):
        A = OneFormTorus.zero(3)
        with pytest.raises(ValueError):
            zeta0_shift(A, Theta.zero(3), 3, diophantine_asserted=True)


class TestNoTadpole:
    def test_linear_residue_factor_vanishes(self):
        # the term linear in the potential carries Res_s sum' k_mu |k|^(-s-2),
        # which has no pole at the evaluation point and odd sphere moments
        from ncspectral.lattice_zeta import LatticePoly, residue_lattice_sum
        for n in (2, 4):
            for mu in range(n):
                expo = [0] * n
                expo[mu] = 1
                poly = LatticePoly.monomial(n, expo)
                assert residue_lattice_sum(n, poly, 2) == 0
                assert residue_lattice_sum(n, poly, n + 1) == 0

    def test_scale_invariant_term_is_at_least_quadratic(self):
        rng = np.random.default_rng(21)
        theta = irrational_theta(4)
        A = random_one_form(rng)
        shifts = []
        for t in (1e-2, 1e-3):
            scaled = OneFormTorus([t * A.component(a) for a in range(1, 5)])
            shifts.append(abs(zeta0_shift(scaled, theta, 4,
                                          diophantine_asserted=True)))
        order = math.log(shifts[0] / shifts[1]) / math.log(10.0)
        assert order > 1.9


class TestTorusAction:
    def setup_method(self):
        self.moments = cutoff_moments({"family": "exponential"}, [1, 2, 3, 4])

    def test_n2_expansion(self):
        A = OneFormTorus.from_entries(2, [(1, (1, 0), 0.2j)])
        rep = torus_action(A, irrational_theta(2), 2, self.moments, 10.0,
                           diophantine_asserted=True)
        assert rep.coefficient(2) == pytest.approx(4 * math.pi * 0.5)
        assert rep.coefficient(1) == 0.0
        assert rep.coefficient(0) == 0.0
        assert rep.total == pytest.approx(4 * math.pi * 0.5 * 100.0)

    def test_n4_zero_potential(self):
        rep = torus_action(OneFormTorus.zero(4), irrational_theta(4), 4,
                           self.moments, 2.0, diophantine_asserted=True)
        assert rep.coefficient(4) == pytest.approx(8 * math.pi ** 2 * 0.5)
        for p in (3, 2, 1, 0):
            assert rep.coefficient(p) == 0.0

    def test_n4_constant_term(self):
        rng = np.random.default_rng(12)
        theta = irrational_theta(4)
        A = random_one_form(rng)
        rep = torus_action(A, theta, 4, self.moments, 3.0,
                           diophantine_asserted=True)
        c = 4 * math.pi ** 2 / 3
        assert rep.coefficient(0) == pytest.approx(
            -c * yang_mills(A, theta), rel=1e-12)
        assert rep.coefficient(3) == 0.0
        assert rep.coefficient(1) == 0.0


class TestDiracOracle:
    def test_n2_kernel_and_first_shell(self):
        spectrum = dirac_truncated(2, 1)
        assert spectrum.kernel_dim == 2
        assert spectrum.abs_multiplicity(1.0) == 8

    def test_n4_kernel(self):
        assert dirac_truncated(4, 1).kernel_dim == 4

    @pytest.mark.parametrize("n,K", [(2, 3), (4, 2), (4, 3)])
    def test_multiplicity_pattern(self, n, K):
        from ncspectral.lattice_zeta import radial_counts
        spectrum = dirac_truncated(n, K)
        counts = radial_counts(n, K * K)
        half_fiber = 2 ** (n // 2 - 1)
        for m in range(1, K * K + 1):
            expected = int(counts[m]) * half_fiber
            got_plus = spectrum.multiplicity(math.sqrt(m))
            got_minus = spectrum.multiplicity(-math.sqrt(m))
            assert got_plus == expected
            assert got_minus == expected

    def test_memory_guard(self):
        with pytest.raises(MemoryError):
            dirac_truncated(4, 40)

    def test_radius_validation(self):
        with pytest.raises(ValueError):
            dirac_truncated(2, 0)


class TestJsonInterface:
    def test_load_round_trip(self):
        doc = {
            "n": 4,
            "theta": irrational_theta(4).entries.tolist(),
            "diophantine_asserted": True,
            "A": [{"alpha": 1, "l": [1, 0, 0, 0], "re": 0.0, "im": 0.25},
                  {"alpha": 2, "l": [0, 1, 0, 0], "re": 0.1, "im": 0.0}],
        }
        parsed = load_potential(doc)
        assert parsed["n"] == 4
        assert parsed["diophantine_asserted"] is True
        comp1 = parsed["A"].component(1)
        assert comp1.coeffs[(1, 0, 0, 0)] == pytest.approx(0.25j)
        assert comp1.coeffs[(-1, 0, 0, 0)] == pytest.approx(0.25j)

    def test_schema_violations(self):
        with pytest.raises(ValueError):
            load_potential({"theta": [[0.0]]})
        with pytest.raises(ValueError):
            load_potential({"n": 2, "theta": [[0, 1], [1, 0]], "A": []})
        with pytest.raises(ValueError):
            load_potential({"n": 2, "theta": [[0, 0.3], [-0.3, 0]],
                            "A": [{"alpha": 5, "l": [1, 0], "re": 1.0}]})
