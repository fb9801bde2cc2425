import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.analysis import (
    Perturbation,
    apply_H,
    assemble_L1,
    assemble_L2,
    coercivity_report,
    constraint_directions,
    correlation,
    eigs_lowest,
    expansion_defect,
    gram_schmidt_project,
    hessian_loc_form,
    kernel_directions,
    negative_direction,
    negative_value,
    quadratic_form_decomposed,
    quadratic_form_H,
    random_perturbation,
    random_profile,
)
from src.observables import CutoffFamily
from src.solitons import SolitonSpec, SystemParams, phi_derivative, phi_profile, soliton_state
from src.spectral import integrate, make_grid


class TestScalarOperators:
    @pytest.mark.parametrize("omega, c", [(0.0, 0.0), (0.5, 0.5), (0.3, -0.6)])
    def test_L1_ground_state(self, params, grid, omega, c):
        spec = SolitonSpec(omega=omega, c=c)
        expected = -3.0 * spec.gap / (1.0 - c ** 2)
        pairs = eigs_lowest(assemble_L1(spec, params, grid), 2)
        assert abs(pairs[0].value - expected) < 1e-6
        assert pairs[0].value < pairs[1].value

    def test_standing_ground_value_is_minus_three(self, params, standing, grid):
        assert abs(eigs_lowest(assemble_L1(standing, params, grid), 1)[0].value + 3.0) < 1e-6

    def test_L1_kernel_is_translation(self, params, moving, grid):
        second = eigs_lowest(assemble_L1(moving, params, grid), 2)[1]
        assert abs(second.value) < 1e-7
        assert correlation(second.vector, phi_derivative(moving, params, grid), grid) > 1 - 1e-8

    def test_L2_kernel_is_the_profile(self, params, moving, grid):
        lowest = eigs_lowest(assemble_L2(moving, params, grid), 1)[0]
        assert abs(lowest.value) < 1e-7
        assert correlation(lowest.vector, phi_profile(moving, params, grid), grid) > 1 - 1e-8

    def test_exactly_one_negative_direction(self, params, moving, grid):
        values = [p.value for p in eigs_lowest(assemble_L1(moving, params, grid), 4)]
        assert sum(v < -1e-7 for v in values) == 1

    def test_eigenvectors_normalized(self, params, standing, grid):
        for pair in eigs_lowest(assemble_L1(standing, params, grid), 3):
            assert_allclose(integrate(pair.vector ** 2, grid), 1.0, rtol=1e-10)
            assert pair.residual < 1e-8

    def test_count_bounds(self, params, standing, grid):
        op = assemble_L1(standing, params, grid)
        with pytest.raises(ValueError):
            eigs_lowest(op, 0)
        with pytest.raises(ValueError):
            eigs_lowest(op, 11)

    def test_form_matches_operator(self, params, moving, grid, rng):
        op = assemble_L2(moving, params, grid)
        f = random_profile(grid, rng, (0.0,), complex_valued=False)
        assert_allclose(op.form(f), integrate(op.apply(f) * f, grid), rtol=1e-12)


class TestHessian:
    @pytest.mark.parametrize("spec, t", [
        (SolitonSpec(omega=0.5, c=0.5), 0.0),
        (SolitonSpec(omega=0.3, c=-0.4, x0=2.0, gamma0=0.7), 1.5),
    ])
    def test_kernel(self, params, grid, spec, t):
        for direction in kernel_directions(spec, params, grid, t):
            assert apply_H(spec, params, direction, t).norm() < 1e-8

    def test_kernel_with_cubic_term(self, grid):
        params = SystemParams(alpha=1.0, beta=0.5)
        spec = SolitonSpec(omega=0.4, c=0.2)
        for direction in kernel_directions(spec, params, grid):
            assert apply_H(spec, params, direction).norm() < 1e-8

    def test_symmetric(self, params, moving, grid, rng):
        a = random_perturbation(grid, rng)
        b = random_perturbation(grid, rng)
        assert_allclose(apply_H(moving, params, a).pairing(b), a.pairing(apply_H(moving, params, b)),
                        rtol=1e-10)

    def test_negative_direction_standing(self, params, standing, grid):
        upsilon = negative_direction(standing, params, grid)
        assert abs(quadratic_form_H(standing, params, upsilon) + 8.0) < 1e-6
        assert negative_value(standing) == pytest.approx(-8.0)

    @pytest.mark.parametrize("spec, t", [
        (SolitonSpec(omega=0.5, c=0.5), 0.0),
        (SolitonSpec(omega=0.2, c=-0.3, x0=-1.0), 2.0),
        (SolitonSpec(omega=0.4, c=0.0), 0.0),
    ])
    def test_negative_direction_closed_form(self, params, grid, spec, t):
        upsilon = negative_direction(spec, params, grid, t)
        value = quadratic_form_H(spec, params, upsilon, t)
        assert_allclose(value, negative_value(spec), rtol=1e-6)

    @pytest.mark.parametrize("spec, t", [
        (SolitonSpec(omega=0.5, c=0.5), 0.0),
        (SolitonSpec(omega=0.3, c=-0.4, x0=1.5, gamma0=0.2), 0.7),
    ])
    def test_decomposed_form_agrees(self, params, grid, rng, spec, t):
        center = spec.center(t)
        for _ in range(50):
            eta = random_perturbation(grid, rng, centers=(center,))
            direct = quadratic_form_H(spec, params, eta, t)
            terms = quadratic_form_decomposed(spec, params, eta, t)
            scale = abs(terms.l1) + abs(terms.l2) + terms.square + terms.coupling
            assert abs(direct - terms.total) < 1e-9 * scale
            assert terms.square >= 0 and terms.coupling >= 0


class TestLocalizedForm:
    def test_single_soliton_is_half_hessian(self, params, grid, rng):
        spec = SolitonSpec(omega=0.4, c=0.2, x0=-1.0)
        t = 3.0
        family = CutoffFamily.from_specs([spec])
        tilde = [soliton_state(spec, params, grid, t)]
        eps = random_perturbation(grid, rng, centers=(spec.center(t),))
        local = hessian_loc_form(eps, tilde, params, family, t, [spec.omega], [spec.c], include_quartic=False)
        assert_allclose(local, 0.5 * quadratic_form_H(spec, params, eps, t), rtol=1e-10)

    def test_expansion_defect_is_the_cubic_term(self, params, grid, rng):
        spec = SolitonSpec(omega=0.4, c=0.2)
        t = 2.0
        family = CutoffFamily.from_specs([spec])
        tilde = [soliton_state(spec, params, grid, t)]
        eps = random_perturbation(grid, rng, centers=(spec.center(t),)).scaled(0.1)
        state = tilde[0] + eps.to_state(t)
        defect = expansion_defect(state, tilde, params, family, t, [spec.omega], [spec.c])
        cubic = params.alpha * integrate(np.abs(eps.eta1) ** 2 * eps.eta3, grid)
        # the soliton is a critical point only up to the profile residual
        assert_allclose(defect, cubic, rtol=1e-5, atol=1e-9)

    def test_soliton_order_does_not_matter(self, params, grid, rng):
        specs = [SolitonSpec(omega=0.4, c=0.3, x0=8.0), SolitonSpec(omega=0.1, c=-0.3, x0=-8.0)]
        t = 2.0
        family = CutoffFamily.from_specs(specs)
        centers = [spec.center(t) for spec in specs]
        eps = random_perturbation(grid, rng, centers=centers).scaled(0.05)

        def evaluate(ordered):
            tilde = [soliton_state(spec, params, grid, t) for spec in ordered]
            omegas, speeds = [s.omega for s in ordered], [s.c for s in ordered]
            state = tilde[0] + tilde[1] + eps.to_state(t)
            return (hessian_loc_form(eps, tilde, params, family, t, omegas, speeds),
                    expansion_defect(state, tilde, params, family, t, omegas, speeds))

        given, ordered = evaluate(specs), evaluate(specs[::-1])
        assert_allclose(given, ordered, rtol=1e-12, atol=1e-14)

    def test_defect_shrinks_cubically(self, params, grid, rng):
        spec = SolitonSpec(omega=0.3, c=0.0)
        family = CutoffFamily.from_specs([spec])
        tilde = [soliton_state(spec, params, grid, 1.0)]
        eps = random_perturbation(grid, rng)

        def defect(h):
            state = tilde[0] + eps.scaled(h).to_state(1.0)
            return expansion_defect(state, tilde, params, family, 1.0, [spec.omega], [spec.c])

        assert_allclose(defect(0.02) / defect(0.01), 8.0, rtol=1e-3)


class TestCoercivity:
    def test_projection_is_orthogonal(self, params, moving, grid, rng):
        directions = constraint_directions(moving, params, grid)
        f = gram_schmidt_project(random_profile(grid, rng, (0.0,)), directions, grid)
        for d in directions:
            assert abs(integrate(np.real(f * np.conj(d)), grid)) < 1e-10

    def test_random_profile_ignores_resolution(self):
        coarse, fine = make_grid(256, 40.0), make_grid(512, 40.0)
        a = random_profile(coarse, np.random.default_rng(7), (0.0, 3.0))
        b = random_profile(fine, np.random.default_rng(7), (0.0, 3.0))
        assert_allclose(a, b[::2], atol=1e-12)

    def test_report_signs(self, params, grid):
        report = coercivity_report([SolitonSpec(omega=0.5, c=0.0)], params, grid, samples=10, seed=3, t=5.0)
        entry = report.solitons[0]
        assert entry.delta > 0
        assert entry.delta_l1 > 0
        assert entry.delta_l2 > 0
        assert entry.negative_quotient < 0
        assert report.localized_k > 0
        assert report.to_rows()[0]['samples'] == 10

    def test_constants_survive_grid_doubling(self, params):
        specs = [SolitonSpec(omega=0.5, c=-0.2, x0=-6.0), SolitonSpec(omega=0.3, c=0.3, x0=6.0)]
        rows = [coercivity_report(specs, params, make_grid(n, 60.0), samples=10, seed=11, t=5.0).to_rows()
                for n in (512, 1024)]
        for coarse, fine in zip(*rows):
            for key in ('delta', 'delta_l1', 'delta_l2', 'negative_quotient', 'localized_k'):
                assert_allclose(coarse[key], fine[key], rtol=1e-4)

    def test_needs_enough_samples(self, params, moving, grid):
        with pytest.raises(ValueError):
            coercivity_report([moving], params, grid, samples=5)

    def test_perturbation_algebra(self, grid, rng):
        a = random_perturbation(grid, rng)
        assert_allclose((a + a).norm(), a.scaled(2.0).norm(), rtol=1e-14)
        assert_allclose(Perturbation.from_state(a.to_state()).pairing(a), a.pairing(a), rtol=1e-14)


@pytest.mark.slow
def test_spectrum_sweep(params, fine_grid):
    grid = make_grid(2048, 80.0)
    for omega in np.linspace(0.0, 0.6, 5):
        for c in np.linspace(-0.6, 0.6, 5):
            spec = SolitonSpec(omega=float(omega), c=float(c))
            if spec.gap <= 0.05:
                continue
            pairs = eigs_lowest(assemble_L1(spec, params, grid), 2)
            expected = -3.0 * spec.gap / (1.0 - c ** 2)
            assert_allclose(pairs[0].value, expected, rtol=1e-5)
            assert abs(pairs[1].value) < 1e-7
            assert correlation(pairs[1].vector, phi_derivative(spec, params, grid), grid) > 1 - 1e-8
            lowest_l2 = eigs_lowest(assemble_L2(spec, params, grid), 1)[0]
            assert abs(lowest_l2.value) < 1e-7
            assert correlation(lowest_l2.vector, phi_profile(spec, params, grid), grid) > 1 - 1e-8
