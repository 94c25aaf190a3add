"""Transport products, per-harmonic Neumann solves, and the projection."""

import itertools
import math

import numpy as np
import pytest

from slipchan.core import SIN, Friction, PlanarCoeffs, PressureFamily, WaveIndex, ZProfile
from slipchan.errors import HypothesisViolated, ResonanceImpossible, SlipchanError
from slipchan.fields import PlanarField, ScalarField
from slipchan.helmholtz import convect, leray_project, neumann_profile, triple_product
from slipchan.modes import build_mode

B1 = Friction.finite(1.0)
NAVIER = Friction.navier()
NONCONST = PressureFamily.NONCONSTANT


def mode(m, n, p, friction=B1, **coeffs):
    return build_mode(WaveIndex(m, n, p), friction, PlanarCoeffs(**coeffs))


def norm(field: PlanarField) -> float:
    return math.sqrt(max(field.inner(field), 0.0))


def random_flat_modes(rng, count):
    out = []
    while len(out) < count:
        m, n, p = int(rng.integers(0, 3)), int(rng.integers(0, 3)), int(rng.integers(0, 2))
        raw = {k: float(rng.standard_normal()) for k in "abcd"}
        try:
            out.append(mode(m, n, p, **raw))
        except SlipchanError:
            continue  # zero-velocity picks on degenerate indices
    return out


# ---------------------------------------------------------------------------
# convect
# ---------------------------------------------------------------------------


class TestConvect:
    def test_matched_pick_self_transport_vanishes(self):
        # coefficient picks with a = -c, b = d ride their own streamlines
        cases = [
            dict(a=0.6, b=-0.3, c=-0.6, d=-0.3),
            dict(a=1.0, c=-1.0),
            dict(b=0.8, d=0.8),
        ]
        for coeffs in cases:
            m = mode(1, 1, 0, **coeffs)
            assert convect(m, m).is_zero(), coeffs
        m21 = mode(2, 1, 0, a=1.0, c=-1.0)
        assert convect(m21, m21).is_zero()

    def test_planar_shear_pair_vanishes(self):
        # two x-independent modes advect each other trivially
        a = mode(0, 1, 0, a=1)
        b = mode(0, 2, 1, a=1)
        assert convect(a, b).is_zero()
        assert convect(b, a).is_zero()

    def test_matches_directional_finite_difference(self):
        a = mode(1, 1, 0, a=1, b=0.5)
        b = mode(2, 1, 0, a=0.3, d=-1.1)
        conv = convect(a, b)
        fa = PlanarField.from_mode(a)
        fb = PlanarField.from_mode(b)
        rng = np.random.default_rng(17)
        h = 1e-5
        for _ in range(10):
            x, y = rng.uniform(0, 2 * math.pi, 2)
            z = rng.uniform(-0.9, 0.9)
            au = fa.eval_component("u", x, y, z)
            av = fa.eval_component("v", x, y, z)
            for comp in ("u", "v"):
                dx = (fb.eval_component(comp, x + h, y, z)
                      - fb.eval_component(comp, x - h, y, z)) / (2 * h)
                dy = (fb.eval_component(comp, x, y + h, z)
                      - fb.eval_component(comp, x, y - h, z)) / (2 * h)
                expected = au * dx + av * dy
                got = conv.eval_component(comp, x, y, z)
                assert abs(got - expected) < 1e-6
            assert conv.eval_component("w", x, y, z) == 0.0

    def test_rejects_pressure_carrying_modes(self):
        flat = mode(1, 1, 0, a=1)
        carrier = build_mode(
            WaveIndex(1, 1, 0, NONCONST), B1, PlanarCoeffs(a=1)
        )
        with pytest.raises(HypothesisViolated):
            convect(carrier, flat)
        with pytest.raises(HypothesisViolated):
            convect(flat, carrier)

    def test_rejects_modes_with_vertical_velocity(self):
        # free-slip overtones on a full wavenumber pair couple into w
        rich = build_mode(WaveIndex(1, 1, 1), NAVIER, PlanarCoeffs(a=1))
        assert not PlanarField.from_mode(rich).component("w").is_zero()
        with pytest.raises(HypothesisViolated):
            convect(rich, rich)

    def test_accepts_axis_modes_whose_planar_factor_kills_w(self):
        axis = build_mode(WaveIndex(1, 0, 1), NAVIER, PlanarCoeffs(a=1))
        assert PlanarField.from_mode(axis).component("w").is_zero()
        out = convect(axis, axis)  # no error; result is a legal field
        assert out.component("w").is_zero()


# ---------------------------------------------------------------------------
# neumann_profile
# ---------------------------------------------------------------------------


def bvp_residual(sol: ZProfile, rhs: ZProfile, k2: float) -> float:
    zs = np.linspace(-1.0, 1.0, 96)
    lhs = sol.derivative().derivative().eval(zs) - k2 * sol.eval(zs)
    return float(np.max(np.abs(lhs - rhs.eval(zs))))


class TestNeumannProfile:
    def test_zero_forcing_gives_zero(self):
        assert neumann_profile(ZProfile.zero(), 5.0).is_zero

    def test_cosine_squared_forcing(self):
        # rhs = cos(z)^2 expanded into atoms, squared harmonic 2^2 + 3^2
        rhs = ZProfile.const(0.5) + ZProfile.cos(2.0, 0.5)
        sol = neumann_profile(rhs, 13.0)
        assert sol.at(0.3) == pytest.approx(-0.06406274154004521, rel=1e-13)
        assert bvp_residual(sol, rhs, 13.0) < 1e-12
        assert abs(sol.derivative().at(1.0)) < 1e-15
        assert abs(sol.derivative().at(-1.0)) < 1e-15
        kinds = sorted(kind for kind, _, _ in sol.terms)
        assert kinds == ["cos", "cosh", "poly"]

    def test_sine_product_forcing(self):
        # rhs = sin(z)*sin(z) = (1 - cos 2z)/2
        rhs = ZProfile.const(0.5) - ZProfile.cos(2.0, 0.5)
        sol = neumann_profile(rhs, 13.0)
        assert bvp_residual(sol, rhs, 13.0) < 1e-12
        assert sol.derivative().at(1.0) == pytest.approx(0.0, abs=1e-15)
        assert sol.derivative().at(-1.0) == pytest.approx(0.0, abs=1e-15)

    def test_odd_forcing(self):
        rhs = ZProfile.sin(3.0) + ZProfile.poly(3, 0.25)
        sol = neumann_profile(rhs, 2.0)
        assert bvp_residual(sol, rhs, 2.0) < 1e-12
        assert abs(sol.derivative().at(1.0)) < 1e-14
        assert abs(sol.derivative().at(-1.0)) < 1e-14

    def test_requires_positive_harmonic(self):
        with pytest.raises(ValueError):
            neumann_profile(ZProfile.const(1.0), 0.0)

    def test_resonance_guard_is_a_package_error(self):
        assert issubclass(ResonanceImpossible, SlipchanError)


# ---------------------------------------------------------------------------
# leray_project
# ---------------------------------------------------------------------------


def wall_normal_trace(field: PlanarField) -> float:
    xs = np.linspace(0, 2 * math.pi, 9, endpoint=False)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    worst = 0.0
    for wall in (-1.0, 1.0):
        Z = np.full_like(X, wall)
        worst = max(worst, float(np.max(np.abs(field.eval_component("w", X, Y, Z)))))
    return worst


def sampled_divergence(field: PlanarField) -> float:
    div = field.divergence()
    xs = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    zs = np.linspace(-1, 1, 33)
    X, Y, Z = np.meshgrid(xs, xs, zs, indexing="ij")
    return float(np.max(np.abs(div.eval(X, Y, Z))))


class TestLerayProject:
    def test_identity_on_divergence_free_fields(self):
        for m in (mode(1, 1, 0, a=1), mode(2, 1, 1, b=1),
                  build_mode(WaveIndex(1, 1, 0, NONCONST), B1, PlanarCoeffs(a=1))):
            field = PlanarField.from_mode(m)
            assert norm(leray_project(field) - field) < 1e-12

    def test_kills_gradients(self):
        potential = ScalarField(
            [(ZProfile.cosh(math.sqrt(2.0)), 1, 1, SIN, SIN, 1.0)]
        )
        assert norm(leray_project(potential.gradient())) < 1e-10

    def test_idempotent_on_transport_terms(self):
        a = mode(1, 1, 0, a=1)
        b = mode(1, 2, 0, a=0.4, b=-0.9)
        once = leray_project(convect(a, b))
        twice = leray_project(once)
        assert norm(twice - once) < 1e-12

    def test_split_is_orthogonal_and_clean(self):
        rng = np.random.default_rng(8)
        modes = random_flat_modes(rng, 10)
        for k in range(0, 10, 2):
            raw = convect(modes[k], modes[k + 1])
            projected = leray_project(raw)
            gradient_part = (raw - projected)
            assert abs(gradient_part.inner(projected)) < 1e-10
            assert sampled_divergence(projected) < 1e-10
            assert wall_normal_trace(projected) < 1e-12

    def test_orthogonality_over_many_samples(self):
        rng = np.random.default_rng(99)
        modes = random_flat_modes(rng, 12)
        checked = 0
        for a, b in itertools.combinations(modes, 2):
            raw = convect(a, b)
            if raw.is_zero():
                continue
            projected = leray_project(raw)
            assert abs((raw - projected).inner(projected)) < 1e-10
            checked += 1
            if checked >= 20:
                break
        assert checked >= 20


# ---------------------------------------------------------------------------
# triple_product
# ---------------------------------------------------------------------------


class TestTripleProduct:
    def test_tangential_branch_vanishes(self):
        # all three picks drawn from the (a, b) slots
        picks = [dict(a=1.0), dict(b=1.0), dict(a=0.7, b=-0.4)]
        indices = [(1, 1, 0), (1, 2, 0), (2, 1, 0)]
        for pa, pb, pc in itertools.product(picks, repeat=3):
            a = mode(*indices[0], **pa)
            b = mode(*indices[1], **pb)
            c = mode(*indices[2], **pc)
            assert abs(triple_product(a, b, c)) < 1e-10

    def test_other_flat_branches_vanish(self):
        # (a, d) and (b, d) slot pairs are transport-silent as well
        for branch in (dict(a=0.5, d=1.0), dict(b=0.5, d=-1.0)):
            ms = [mode(1, 1, 0, **branch), mode(1, 2, 1, **branch),
                  mode(2, 1, 0, **branch)]
            assert abs(triple_product(*ms)) < 1e-10

    def test_antisymmetry_in_the_last_two_slots(self):
        rng = np.random.default_rng(23)
        modes = random_flat_modes(rng, 6)
        for a, b, c in itertools.permutations(modes[:4], 3):
            lhs = triple_product(a, b, c)
            rhs = triple_product(a, c, b)
            assert abs(lhs + rhs) < 1e-10

    def test_diagonal_vanishes(self):
        rng = np.random.default_rng(31)
        for m in random_flat_modes(rng, 4):
            assert abs(triple_product(m, m, m)) < 1e-12

    def test_cross_slot_witness_is_nonzero(self):
        a = mode(1, 1, 0, c=1)
        b = mode(1, 2, 0, c=1)
        c = mode(2, 1, 0, c=1)
        value = triple_product(a, b, c)
        assert abs(value) > 1e-4
        assert value == pytest.approx(-0.09737045295323836, rel=1e-6)

    def test_more_cross_slot_witnesses(self):
        cases = [
            ((1, 1, 0), (1, 2, 1), (2, 1, 1), -0.08906403),
            ((1, 1, 0), (1, 3, 0), (2, 2, 0), -0.14515130),
        ]
        for ia, ib, ic, expected in cases:
            got = triple_product(
                mode(*ia, c=1), mode(*ib, c=1), mode(*ic, c=1)
            )
            assert got == pytest.approx(expected, abs=1e-6)

    def test_consistent_with_projected_inner_product(self):
        rng = np.random.default_rng(41)
        modes = random_flat_modes(rng, 6)
        for a, b, c in [modes[:3], modes[3:], (modes[0], modes[2], modes[4])]:
            direct = triple_product(a, b, c)
            via_projection = leray_project(convect(a, b)).inner(
                PlanarField.from_mode(c)
            )
            assert abs(direct - via_projection) < 1e-10
