import math

import mpmath
import numpy as np
import pytest

from qjdr.exceptions import CutoffTooSmall, DimensionMismatch, TruncationRisk
from qjdr.transduction import (
    CoherentPulse,
    TransductionParams,
    azimuth,
    bloch_vector,
    displacement_operator,
    nbar_from_temperature,
    thermal_state,
    thermal_trace_deficit,
    transduce_pulse,
)
from qjdr.validation import check_density_matrix

from conftest import ket, proj


def jc_coherent_oracle(beta, gt, levels=80):
    """Reduced qubit state for |beta>|g> under a|e><g| + h.c., from the ladder solution.

    |n, g> -> cos(sqrt(n) gt) |n, g> - i sin(sqrt(n) gt) |n-1, e>.
    """
    c = [complex(mpmath.exp(-abs(beta) ** 2 / 2) * mpmath.mpc(beta) ** n / mpmath.sqrt(mpmath.factorial(n)))
         for n in range(levels)]
    ee = sum(abs(c[n]) ** 2 * math.sin(math.sqrt(n) * gt) ** 2 for n in range(levels))
    ge = sum(
        c[k] * np.conj(c[k + 1]) * math.cos(math.sqrt(k) * gt) * 1j * math.sin(math.sqrt(k + 1) * gt)
        for k in range(levels - 1)
    )
    return np.array([[1 - ee, ge], [np.conj(ge), ee]])


class TestTypes:
    def test_phase_normalised(self):
        assert CoherentPulse(1.0, 2 * math.pi + 0.5).phase == pytest.approx(0.5)
        assert CoherentPulse(1.0, -math.pi / 2).phase == pytest.approx(1.5 * math.pi)

    @pytest.mark.parametrize("kwargs", [
        dict(efficiency=1.5), dict(efficiency=-0.1), dict(thermal_occupancy=-1),
        dict(fock_cutoff=1), dict(fock_cutoff=2.5), dict(coupling_time=0.0),
    ])
    def test_params_validation(self, kwargs):
        with pytest.raises(ValueError):
            TransductionParams(**kwargs)

    def test_negative_magnitude(self):
        with pytest.raises(ValueError):
            CoherentPulse(-0.1, 0.0)


class TestNbar:
    def test_zero_temperature_limit(self):
        assert nbar_from_temperature(1e-6, 10e9) == 0.0
        values = [nbar_from_temperature(t, 10e9) for t in (0.5, 0.1, 0.05, 0.02)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_one_kelvin(self):
        # independent evaluation with the exact SI constants
        x = mpmath.mpf("6.62607015e-34") * 10**10 / (mpmath.mpf("1.380649e-23") * 1)
        assert float(x) == pytest.approx(0.47992, abs=1e-5)
        expected = float(1 / (mpmath.exp(x) - 1))
        assert nbar_from_temperature(1.0, 10e9) == pytest.approx(expected, rel=1e-12)
        assert nbar_from_temperature(1.0, 10e9) == pytest.approx(1.6235, abs=1e-4)

    def test_one_millikelvin(self):
        assert nbar_from_temperature(1e-3, 10e9) < 1e-200

    @pytest.mark.parametrize("t,f", [(0, 1e9), (1, 0), (-1, 1e9)])
    def test_rejects_nonpositive(self, t, f):
        with pytest.raises(ValueError):
            nbar_from_temperature(t, f)


class TestThermalState:
    def test_vacuum(self):
        np.testing.assert_array_equal(thermal_state(0.0, 5), proj([1, 0, 0, 0, 0, 0]))

    def test_geometric_populations(self):
        rho = thermal_state(1.0, 40)
        assert rho[0, 0].real == pytest.approx(0.5)
        assert rho[1, 1].real == pytest.approx(0.25)
        assert np.count_nonzero(rho - np.diag(np.diag(rho))) == 0

    def test_trace_deficit(self):
        rho = thermal_state(1.0, 40)
        assert 1 - np.trace(rho).real == pytest.approx(2.0**-41, rel=1e-6)
        assert abs(np.trace(rho) - 1) < 1e-6
        assert thermal_trace_deficit(1.0, 40) == pytest.approx(2.0**-41)

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffTooSmall):
            thermal_state(1.6235, 20)
        thermal_state(1.6235, 40)


class TestDisplacement:
    def test_zero(self):
        np.testing.assert_allclose(displacement_operator(0, 10), np.eye(11), atol=1e-15)

    def test_vacuum_overlap(self):
        d = displacement_operator(1.0, 20)
        assert d[0, 0].real == pytest.approx(math.exp(-0.5), abs=1e-6)
        assert d[0, 0].real == pytest.approx(0.60653, abs=1e-5)

    @pytest.mark.parametrize("beta", [1.0, 0.7 - 0.4j, 1j])
    def test_coherent_amplitudes(self, beta):
        d = displacement_operator(beta, 20)
        for n in range(6):
            expected = math.exp(-abs(beta) ** 2 / 2) * beta**n / math.sqrt(math.factorial(n))
            assert abs(d[n, 0] - expected) < 1e-6

    def test_unitary(self):
        d = displacement_operator(0.8 + 0.3j, 30)
        assert np.max(np.abs(d @ d.conj().T - np.eye(31))) < 1e-8

    def test_truncation_guard(self):
        with pytest.raises(TruncationRisk):
            displacement_operator(2.5, 20)
        displacement_operator(2.2, 20)


class TestTransducePulse:
    def test_vacuum_in_ground_out(self):
        for eta in (0.0, 0.3, 1.0):
            rho = transduce_pulse(CoherentPulse(0.0, 0.0), TransductionParams(efficiency=eta))
            np.testing.assert_allclose(rho, proj([1, 0]), atol=1e-14)
            np.testing.assert_allclose(bloch_vector(rho), (0, 0, 1), atol=1e-14)

    def test_thermal_vacuum_excitation(self):
        rho = transduce_pulse(CoherentPulse(0.0, 0.0), TransductionParams(thermal_occupancy=1.0))
        # p(n) = 2^-(n+1); brute force over the ladder
        expected = sum(2.0 ** -(n + 1) * math.sin(math.sqrt(n) * math.pi / 2) ** 2 for n in range(200))
        assert rho[1, 1].real == pytest.approx(expected, abs=1e-9)
        assert abs(rho[0, 1]) < 1e-14

    @pytest.mark.parametrize("magnitude,phase,gt", [
        (0.25, 0.0, math.pi / 2), (0.5, 1.0, math.pi / 2), (1.0, 2.5, math.pi / 2), (0.7, 0.3, 1.1),
    ])
    def test_pure_input_matches_ladder_solution(self, magnitude, phase, gt):
        pulse = CoherentPulse(magnitude, phase)
        rho = transduce_pulse(pulse, TransductionParams(coupling_time=gt))
        expected = jc_coherent_oracle(pulse.amplitude, gt)
        assert np.max(np.abs(rho - expected)) < 1e-9

    def test_azimuth_offset_golden(self):
        # the -i of the swap puts phase 0 at azimuth 3π/2
        rho = transduce_pulse(CoherentPulse(0.5, 0.0), TransductionParams())
        assert azimuth(rho) == pytest.approx(1.5 * math.pi, abs=1e-12)

    @pytest.mark.parametrize("delta", np.linspace(0.1, 2 * math.pi, 7))
    def test_phase_equivariance(self, delta):
        params = TransductionParams(thermal_occupancy=0.5)
        base = transduce_pulse(CoherentPulse(0.6, 0.4), params)
        shifted = transduce_pulse(CoherentPulse(0.6, 0.4 + delta), params)
        rot = np.diag([np.exp(-0.5j * delta), np.exp(0.5j * delta)])
        assert np.max(np.abs(shifted - rot @ base @ rot.conj().T)) <= 1e-8

    def test_attenuation_depends_only_on_beta(self):
        a = transduce_pulse(CoherentPulse(0.8, 1.0), TransductionParams(efficiency=0.36, thermal_occupancy=0.3))
        b = transduce_pulse(CoherentPulse(0.8 * 0.6, 1.0), TransductionParams(efficiency=1.0, thermal_occupancy=0.3))
        np.testing.assert_allclose(a, b, atol=1e-14)

    @pytest.mark.parametrize("magnitude", [0.1, 0.5, 1.0])
    def test_monotone_dephasing(self, magnitude):
        lengths = []
        for nbar in (0.0, 0.5, 1.0, 1.6):
            x, y, _ = bloch_vector(transduce_pulse(CoherentPulse(magnitude, 0.7), TransductionParams(thermal_occupancy=nbar)))
            lengths.append(math.hypot(x, y))
        assert all(a >= b for a, b in zip(lengths, lengths[1:]))

    def test_output_is_density_matrix(self):
        rho = transduce_pulse(CoherentPulse(1.0, 0.2), TransductionParams(thermal_occupancy=1.6))
        check_density_matrix(rho, dim=2)
        assert np.linalg.norm(bloch_vector(rho)) <= 1 + 1e-9

    def test_truncation_propagates(self):
        with pytest.raises(TruncationRisk):
            transduce_pulse(CoherentPulse(2.0, 0.0), TransductionParams(fock_cutoff=10))

    def test_cutoff_propagates(self):
        with pytest.raises(CutoffTooSmall):
            transduce_pulse(CoherentPulse(0.5, 0.0), TransductionParams(thermal_occupancy=1.6, fock_cutoff=20))


class TestBlochVector:
    def test_basis_states(self):
        assert bloch_vector(proj([1, 0])) == pytest.approx((0, 0, 1))
        assert bloch_vector(proj(ket(1, 1))) == pytest.approx((1, 0, 0))
        assert bloch_vector(np.eye(2) / 2) == pytest.approx((0, 0, 0))
        assert bloch_vector(proj(ket(1, 1j))) == pytest.approx((0, 1, 0))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            bloch_vector(np.eye(4) / 4)
