import math

import numpy as np
import pytest

from ncstat.algebra import AlgebraSpec, State
from ncstat.entropy import (
    InfiniteRegimeReport,
    chain_rule_report,
    conditional_entropy,
    convex_sum_morphisms,
    convex_sum_objects,
    functoriality_defect,
    re_expansions,
    re_functor,
    relative_entropy,
    tensor_inclusion_morphism,
    von_neumann_entropy,
)
from ncstat.errors import AlgebraMismatchError
from ncstat.generators import (
    GeneratorConfig,
    gen_composable_pair,
    gen_density,
    gen_morphism,
    gen_optimal_morphism,
    rng_for,
)
from ncstat.hypotheses import (
    AlphaFamily,
    build_hypothesis_from_alphas,
    identity_morphism,
    is_optimal,
    rectify_pair,
    validate_morphism,
)
from ncstat.maps import StarHom

CFG = GeneratorConfig(seed=2024, trials=10)

LN2 = math.log(2)


def qubit_state(d):
    return State(AlgebraSpec((2,)), (np.asarray(d, dtype=complex),))


def test_von_neumann_entropy_values():
    s = State(AlgebraSpec((3,)), (np.diag([0.5, 0.25, 0.25]),))
    assert abs(von_neumann_entropy(s) - 1.5 * LN2) < 1e-12

    pure = qubit_state(np.diag([1.0, 0.0]))
    assert abs(von_neumann_entropy(pure)) < 1e-12

    mixed = State(AlgebraSpec((4,)), (np.eye(4) / 4,))
    assert abs(von_neumann_entropy(mixed) - math.log(4)) < 1e-12

    # blocks contribute independently
    two = State(AlgebraSpec((2, 1)), (np.eye(2) / 4, np.array([[0.5]])))
    assert abs(von_neumann_entropy(two) - 1.5 * LN2) < 1e-12


def test_entropy_basis_independent():
    rng = np.random.default_rng(17)
    u = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    d = np.diag([0.5, 0.3, 0.2])
    assert (
        abs(
            von_neumann_entropy(State(AlgebraSpec((3,)), (u @ d @ u.conj().T,)))
            - von_neumann_entropy(State(AlgebraSpec((3,)), (d,)))
        )
        < 1e-12
    )


def test_classical_kl_spot_value():
    alg = AlgebraSpec((1, 1))
    p = State(alg, (np.array([[0.5]]), np.array([[0.5]])))
    q = State(alg, (np.array([[0.75]]), np.array([[0.25]])))
    assert abs(relative_entropy(p, q) - 0.5 * math.log(4.0 / 3.0)) < 1e-14


def test_relative_entropy_self_is_zero():
    rng = np.random.default_rng(23)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    d = g @ g.conj().T
    s = State(AlgebraSpec((3,)), (d / np.trace(d).real,))
    assert abs(relative_entropy(s, s)) < 1e-12


def test_relative_entropy_pure_vs_mixed():
    pure = qubit_state(np.diag([1.0, 0.0]))
    mixed = qubit_state(np.eye(2) / 2)
    assert abs(relative_entropy(pure, mixed) - LN2) < 1e-12
    assert math.isinf(relative_entropy(mixed, pure))


def test_relative_entropy_noncommuting_spot():
    rho = qubit_state(np.diag([0.75, 0.25]))
    sigma = qubit_state(np.array([[0.5, 0.25], [0.25, 0.5]]))
    assert abs(relative_entropy(rho, sigma) - math.log(3) / 4) < 1e-12


def test_relative_entropy_orthogonal_supports():
    a = qubit_state(np.diag([1.0, 0.0]))
    b = qubit_state(np.diag([0.0, 1.0]))
    assert math.isinf(relative_entropy(a, b))


def test_relative_entropy_algebra_mismatch():
    with pytest.raises(AlgebraMismatchError):
        relative_entropy(
            qubit_state(np.eye(2) / 2), State(AlgebraSpec((3,)), (np.eye(3) / 3,))
        )


def test_re_functor_vanishes_on_optimal():
    for t in range(5):
        m = gen_optimal_morphism(CFG, rng_for(CFG, t))
        assert abs(re_functor(m)) < 1e-9


def test_re_functor_positive_off_optimal():
    m = gen_morphism(CFG, rng_for(CFG, 1), faithful=True)
    flag, residual = is_optimal(m)
    if not flag:
        assert re_functor(m) > 0.0


def test_conditional_entropy_values():
    # flipped sign: tr(rho ln rho) - tr(rho_cond ln rho_cond)
    prod = State(AlgebraSpec((4,)), (np.eye(4) / 4,))
    assert abs(conditional_entropy(prod, (2, 2)) + LN2) < 1e-12

    corr = State(AlgebraSpec((4,)), (np.diag([0.5, 0.0, 0.0, 0.5]),))
    assert abs(conditional_entropy(corr, (2, 2))) < 1e-12

    bell = np.zeros((4, 4))
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    assert abs(conditional_entropy(State(AlgebraSpec((4,)), (bell,)), (2, 2)) - LN2) < 1e-12


def test_conditional_entropy_two_factors_conditioned():
    s = State(AlgebraSpec((8,)), (np.eye(8) / 8,))
    assert abs(conditional_entropy(s, (2, 2, 2), num_conditioned=2) + LN2) < 1e-12


def test_tensor_inclusion_morphism_valid():
    rng = np.random.default_rng(31)
    rho = gen_density(rng, 6)
    m = tensor_inclusion_morphism(rho, 2)
    assert validate_morphism(m).ok
    # optimal exactly when the joint is uniform (x) marginal
    marginal = m.source.state.densities[0]
    uniform = np.kron(np.eye(2) / 2, marginal)
    flag, residual = is_optimal(m)
    assert flag == (np.linalg.norm(rho - uniform) < 1e-9)


def test_chain_rule_ghz():
    psi = np.zeros(8)
    psi[0] = psi[7] = 1 / math.sqrt(2)
    rep = chain_rule_report(np.outer(psi, psi), (2, 2, 2))
    assert abs(rep.re_composite - 3 * LN2) < 1e-9
    assert abs(rep.re_inner - LN2) < 1e-9
    assert abs(rep.re_outer - 2 * LN2) < 1e-9
    assert rep.max_defect < 1e-9


def test_chain_rule_maximally_mixed():
    rep = chain_rule_report(np.eye(8) / 8, (2, 2, 2))
    assert abs(rep.re_composite) < 1e-10
    assert abs(rep.re_inner) < 1e-10
    assert abs(rep.re_outer) < 1e-10
    assert rep.max_defect < 1e-10


def test_chain_rule_random_densities():
    rng = np.random.default_rng(55)
    for _ in range(10):
        rho = gen_density(rng, 8, faithful=bool(rng.random() < 0.5))
        rep = chain_rule_report(rho, (2, 2, 2))
        assert rep.max_defect < 1e-9


def test_functoriality_finite():
    inner, outer = gen_composable_pair(CFG, rng_for(CFG, 2))
    defect = functoriality_defect(inner, outer)
    assert isinstance(defect, float) and defect < 1e-8


def test_functoriality_infinite_regime_reported():
    # a rank-deficient alpha confines the pushed-back state to one copy, so a
    # full-support target has infinite relative entropy
    src = AlgebraSpec((2,))
    tgt = AlgebraSpec((4,))
    hom = StarHom(src, tgt, ((2,),), (np.eye(4),))
    xi = State(src, (np.eye(2) / 2,))
    omega = State(tgt, (np.eye(4) / 4,))
    fam = AlphaFamily(hom.mult, ((np.diag([1.0, 0.0]),),))
    outer = build_hypothesis_from_alphas(hom, xi, fam, target_state=omega)
    assert validate_morphism(outer).ok
    inner = identity_morphism(outer.source)
    result = functoriality_defect(inner, outer)
    assert isinstance(result, InfiniteRegimeReport)
    assert result.any_infinite
    assert math.isinf(result.re_outer) and result.re_inner == 0.0


def test_re_expansions_on_rectified_pair():
    inner, outer = gen_composable_pair(CFG, rng_for(CFG, 3))
    g, f = rectify_pair(inner, outer).morphisms
    check = re_expansions(g, f)
    assert max(check.defects) < 1e-8


def test_affinity_spot():
    m1 = gen_morphism(CFG, rng_for(CFG, 4), faithful=True)
    m2 = gen_morphism(CFG, rng_for(CFG, 5), faithful=True)
    r1, r2 = re_functor(m1), re_functor(m2)
    for lam in (0.0, 0.3, 1.0):
        combined = convex_sum_morphisms(lam, m1, m2)
        assert validate_morphism(combined).ok
        assert abs(re_functor(combined) - (lam * r1 + (1 - lam) * r2)) < 1e-9


def test_convex_sum_objects_normalization():
    o1 = gen_morphism(CFG, rng_for(CFG, 6)).source
    o2 = gen_morphism(CFG, rng_for(CFG, 7)).source
    combined = convex_sum_objects(0.25, o1, o2)
    total = sum(np.trace(d).real for d in combined.state.densities)
    assert abs(total - 1.0) < 1e-12
    with pytest.raises(ValueError):
        convex_sum_objects(1.5, o1, o2)
