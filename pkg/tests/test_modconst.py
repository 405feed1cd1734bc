import math

import numpy as np
import pytest

from plurihull import modconst
from plurihull.core import builtin_phi
from plurihull.modconst import ModuleQuery
from plurihull.optimize import Bracket, Status


@pytest.fixture
def inverse_phi():
    return builtin_phi("inverse", 64)


def test_query_validation(inverse_phi):
    with pytest.raises(ValueError, match="unit disk"):
        ModuleQuery(inverse_phi, 1.0, 1.0, 2)

    with pytest.raises(ValueError, match="allow_origin"):
        ModuleQuery(inverse_phi, 0.0, 1.0, 2)

    with pytest.raises(ValueError, match=">= 1"):
        ModuleQuery(inverse_phi, 0.5, 1.0, 0)

    with pytest.raises(ValueError, match="too few"):
        ModuleQuery(inverse_phi, 0.5, 1.0, 16)

    assert ModuleQuery(inverse_phi, 0.0, 1.0, 2, allow_origin=True).z == 0j


def test_module_program_layout(inverse_phi):
    prog = modconst.module_program(ModuleQuery(inverse_phi, 0.5, 2.0, 3))

    assert prog.shape == (64, 8)
    assert np.allclose(prog.objective, [1, 0.5, 0.25, 0.125, 2, 1, 0.5, 0.25])


def test_exact_interior_value_gives_flat_constant(inverse_phi):
    for d in (2, 4):
        bracket = modconst.module_constant(ModuleQuery(inverse_phi, 0.5, 2.0, d))

        assert bracket.lb <= 2.0 * (1 + 1e-9)
        assert bracket.ub >= 2.0 * (1 - 1e-9)
        assert bracket.width <= 0.01


def test_wrong_interior_value_is_not_bounded(inverse_phi):
    # a = 1, b = -z vanishes on the circle but not at z under λ = 3
    bracket = modconst.module_constant(ModuleQuery(inverse_phi, 0.5, 3.0, 2))

    assert bracket.status is Status.UNBOUNDED


def test_split_witness_is_feasible_on_circle(inverse_phi):
    q = ModuleQuery(inverse_phi, 0.5, 2.0, 3)
    bracket = modconst.module_constant(q)

    a, b = modconst.split_witness(bracket, 3)
    values = np.polynomial.polynomial.polyval(inverse_phi.points, a.coeffs)
    values += np.polynomial.polynomial.polyval(inverse_phi.points, b.coeffs) * inverse_phi.samples

    assert a.degree == 3 and b.degree == 3
    assert np.max(np.abs(values)) <= 1 + 1e-9

    with pytest.raises(ValueError, match="no witness"):
        modconst.split_witness(Bracket(0.0, math.inf, Status.INFEASIBLE_NUMERICS), 3)


def test_rudin_regime_for_zero_data():
    zero = builtin_phi("zero", 64)

    assert modconst.rudin_test(ModuleQuery(zero, 0.5, 0.0, 4))
    assert not modconst.rudin_test(ModuleQuery(zero, 0.5, 1.0, 4))


def _brackets(*pairs, status=Status.BOUNDED):
    return {d: Bracket(lb, ub, status) for d, (lb, ub) in zip((4, 8, 16), pairs)}


def test_verdict_for_bounded_and_growing_sweeps():
    assert modconst.verdict_for(_brackets((1.0, 1.01), (1.0, 1.02), (1.0, 1.05))) == (
        "bounded",
        (),
    )
    assert modconst.verdict_for(_brackets((1.0, 1.1), (2.0, 2.2), (4.0, 4.4))) == (
        "growing",
        (),
    )
    assert modconst.verdict_for(_brackets((1.0, 1.1), (1.2, 1.3), (3.0, 3.3)))[0] == "inconclusive"


def test_verdict_for_flags_unbounded_and_numerics():
    brackets = _brackets((1.0, 1.0), (2.0, 2.0), (3.0, 3.0))
    brackets[16] = Bracket(math.inf, math.inf, Status.UNBOUNDED)
    assert modconst.verdict_for(brackets) == ("growing", ("unbounded at d=16",))

    brackets[16] = Bracket(1.0, math.inf, Status.INFEASIBLE_NUMERICS)
    assert modconst.verdict_for(brackets) == ("inconclusive", ("infeasible-numerics at d=16",))


def test_classify_module_validates_degrees(inverse_phi):
    with pytest.raises(ValueError, match="at least 3"):
        modconst.classify_module(inverse_phi, [0.5], lambda z: 1 / z, (2, 4))

    with pytest.raises(ValueError, match="growth_ratio"):
        modconst.classify_module(inverse_phi, [0.5], lambda z: 1 / z, (1, 2, 4), 1.0)


def test_classify_module_double_pole_is_bounded():
    phi = builtin_phi("pole_m", 128, m=2)

    serial = modconst.classify_module(phi, [0.5], lambda z: z**-2, (4, 8, 16))
    threaded = modconst.classify_module(phi, [0.5], lambda z: z**-2, (4, 8, 16), threads=3)

    assert serial[0].verdict == "bounded"
    assert serial[0].lam == pytest.approx(4.0)
    assert serial[0].curve.entries == threaded[0].curve.entries


def test_scalar_multiple_of_data_keeps_brackets_consistent(rng):
    phi = builtin_phi("cos", 32)
    for _ in range(5):
        c = complex(rng.normal(), rng.normal())
        base = modconst.module_constant(ModuleQuery(phi, 0.4, 1.45, 2))
        scaled = modconst.module_constant(ModuleQuery(phi.scaled(c), 0.4, 1.45 * c, 2))

        assert base.lb <= scaled.ub * (1 + 1e-9)
        assert scaled.lb <= base.ub * (1 + 1e-9)


def test_rational_data_stays_bounded_at_degree_24():
    cos_phi = builtin_phi("cos", 256)

    bracket = modconst.module_constant(ModuleQuery(cos_phi, 0.5, 1.25, 24))

    # a = -(ζ² + 1), b = 2ζ vanishes on the circle and at (z, λ) alike
    assert bracket.status is Status.BOUNDED
    assert bracket.lb >= 1 - 1e-9
    assert bracket.ub <= bracket.lb * 1.005


@pytest.mark.parametrize("name, m, lam", [("inverse", None, 2.0), ("pole_m", 2, 4.0)])
def test_pole_data_constants_are_exact_at_degree_24(name, m, lam):
    phi = builtin_phi(name, 256, m=m)

    bracket = modconst.module_constant(ModuleQuery(phi, 0.5, lam, 24))

    assert bracket.status is Status.BOUNDED
    assert bracket.lb <= lam * (1 + 1e-9)
    assert bracket.ub >= lam * (1 - 1e-9)
    assert bracket.width <= 0.005 * lam


def test_rotating_data_matches_rotating_the_point():
    phi = builtin_phi("cos", 64)
    steps = 8
    turn = np.exp(2j * np.pi * steps / 64)
    z = 0.4 + 0.1j
    h = (turn * z + 1 / (turn * z)) / 2

    for lam in (h, h + 1):
        for d in (2, 4):
            rotated = modconst.module_constant(ModuleQuery(phi.rotated(steps), z, lam, d))
            moved = modconst.module_constant(ModuleQuery(phi, turn * z, lam, d))

            assert rotated.status is moved.status
            if rotated.is_bounded:
                assert rotated.lb <= moved.ub * (1 + 1e-9)
                assert moved.lb <= rotated.ub * (1 + 1e-9)


def test_essential_singularity_grows():
    phi = builtin_phi("exp_cos", 256)

    verdict = modconst.classify_module(
        phi, [0.2], lambda z: np.exp((z + 1 / z) / 2), (8, 16, 24)
    )[0]

    assert verdict.verdict == "growing"
