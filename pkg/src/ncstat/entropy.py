"""Entropy functionals on block states and the relative entropy of hypotheses.

All quantities are in nats.  Relative entropy returns math.inf when the first
state's support is not contained in the second's; Python floats already form
the extended reals needed here (addition saturates at infinity).

Sign convention for conditional entropy: this module uses
trace(rho ln rho) - trace(rho_cond ln rho_cond), the negative of the textbook
conditional von Neumann entropy, so that the chain rule composes additively
with the relative entropy identities implemented below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    DEFAULT_ATOL,
    DEFAULT_CUTOFF,
    AlgebraSpec,
    State,
    absolutely_continuous,
    hermitian_eigen,
    hermitian_log,
    partial_trace_left,
)
from .errors import AlgebraMismatchError, ShapeError
from .hypotheses import (
    AlphaFamily,
    NCMorphism,
    NCObject,
    build_hypothesis_from_alphas,
    compose_morphisms,
    extract_alphas,
)
from .maps import (
    StarHom,
    cpu_pushforward_state,
    direct_sum_cpus,
    direct_sum_homs,
    pushforward_state,
)


def _supported_spectrum(d: np.ndarray, cutoff: float):
    eig = hermitian_eigen(d, atol=1e-6)
    vals = eig.eigenvalues
    top = vals[-1] if vals.size else 0.0
    if top <= 0:
        return np.zeros(0), eig.eigenvectors[:, :0]
    mask = vals > cutoff * top
    return vals[mask], eig.eigenvectors[:, mask]


def _entropy_sum(d: np.ndarray, cutoff: float) -> float:
    """trace(d ln d) over the support, with 0 ln 0 = 0."""
    vals, _ = _supported_spectrum(d, cutoff)
    if vals.size == 0:
        return 0.0
    return float(np.sum(vals * np.log(vals)))


def von_neumann_entropy(s: State, cutoff: float = DEFAULT_CUTOFF) -> float:
    """Entropy of a block state; mixes the block weights with the block entropies."""
    return -sum(_entropy_sum(d, cutoff) for d in s.densities)


def relative_entropy(s1: State, s2: State, cutoff: float = DEFAULT_CUTOFF) -> float:
    """Relative entropy of s1 with respect to s2, infinite off the support.

    Computed blockwise from the two eigendecompositions: the entropy sum of s1
    minus the cross term pairing the eigenvalues of s1 against the logarithms
    of the supported eigenvalues of s2 through squared eigenvector overlaps.
    """
    if s1.algebra != s2.algebra:
        raise AlgebraMismatchError("states live on different algebras")
    if not absolutely_continuous(s1, s2, cutoff):
        return math.inf
    total = 0.0
    for d1, d2 in zip(s1.densities, s2.densities):
        lam, u = _supported_spectrum(d1, cutoff)
        if lam.size == 0:
            continue
        mu, v = _supported_spectrum(d2, cutoff)
        if mu.size == 0:
            return math.inf  # weight on a block the reference state misses
        total += float(np.sum(lam * np.log(lam)))
        overlaps = np.abs(u.conj().T @ v) ** 2
        total -= float(lam @ overlaps @ np.log(mu))
    return total


def re_functor(m: NCMorphism, cutoff: float = DEFAULT_CUTOFF) -> float:
    """Relative entropy assigned to a hypothesis.

    The target state is compared against the source state pushed back through
    the CPU map; an optimal hypothesis scores zero.
    """
    back = cpu_pushforward_state(m.source.state, m.cpu)
    return relative_entropy(m.target.state, back, cutoff)


def conditional_entropy(
    s: State,
    dims: Sequence[int],
    num_conditioned: int = 1,
    cutoff: float = DEFAULT_CUTOFF,
) -> float:
    """Flipped-sign conditional entropy of a single-block state on a tensor product.

    dims declares the tensor factorization of the block; the last
    num_conditioned factors are the conditioning system.  Returns
    trace(rho ln rho) - trace(rho_cond ln rho_cond), where rho_cond is the
    reduction onto the conditioning factors.
    """
    if s.algebra.num_blocks != 1:
        raise ShapeError("conditional entropy needs a single-block algebra")
    dims = tuple(int(d) for d in dims)
    if not 0 < num_conditioned < len(dims):
        raise ShapeError("num_conditioned must leave at least one factor on each side")
    if math.prod(dims) != s.algebra.block_dims[0]:
        raise ShapeError(
            f"factor dims {dims} do not multiply to block side {s.algebra.block_dims[0]}"
        )
    head = math.prod(dims[: len(dims) - num_conditioned])
    tail = math.prod(dims[len(dims) - num_conditioned :])
    rho = s.densities[0]
    rho_tail = partial_trace_left(rho, head, tail)
    return _entropy_sum(rho, cutoff) - _entropy_sum(rho_tail, cutoff)


# ---------------------------------------------------------------------------
# Convex sums


def convex_sum_objects(lam: float, o1: NCObject, o2: NCObject) -> NCObject:
    """Convex combination: concatenated algebra, densities scaled by the weights."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {lam}")
    from .algebra import direct_sum_algebras

    alg = direct_sum_algebras(o1.algebra, o2.algebra)
    densities = tuple(lam * d for d in o1.state.densities) + tuple(
        (1.0 - lam) * d for d in o2.state.densities
    )
    return NCObject.from_state(State(alg, densities))


def convex_sum_morphisms(lam: float, m1: NCMorphism, m2: NCMorphism) -> NCMorphism:
    """Direct sum of two hypotheses between the convex sums of their objects."""
    src = convex_sum_objects(lam, m1.source, m2.source)
    tgt = convex_sum_objects(lam, m1.target, m2.target)
    return NCMorphism(
        source=src,
        target=tgt,
        hom=direct_sum_homs(m1.hom, m2.hom),
        cpu=direct_sum_cpus(m1.cpu, m2.cpu),
    )


# ---------------------------------------------------------------------------
# Functoriality


@dataclass(frozen=True)
class InfiniteRegimeReport:
    """Functoriality terms when at least one relative entropy is infinite."""

    re_composite: float
    re_inner: float
    re_outer: float

    @property
    def any_infinite(self) -> bool:
        return any(
            math.isinf(v) for v in (self.re_composite, self.re_inner, self.re_outer)
        )


def functoriality_defect(
    g: NCMorphism, f: NCMorphism, cutoff: float = DEFAULT_CUTOFF
) -> float | InfiniteRegimeReport:
    """Additivity defect of the relative entropy over a composable pair.

    Returns |RE(composite) - RE(inner) - RE(outer)| when all three terms are
    finite, and the raw terms otherwise.
    """
    re_inner = re_functor(g, cutoff)
    re_outer = re_functor(f, cutoff)
    re_comp = re_functor(compose_morphisms(g, f), cutoff)
    if any(math.isinf(v) for v in (re_inner, re_outer, re_comp)):
        return InfiniteRegimeReport(re_comp, re_inner, re_outer)
    return abs(re_comp - re_inner - re_outer)


@dataclass(frozen=True)
class ExpansionCheck:
    """The three closed-form expansions of the relative entropies of a pair.

    Each rhs value is assembled from the negative entropy of the outer target
    state, the segment weights of the outer CPU map, and the logarithms of the
    intermediate and pushed-back densities; each direct value is the plain
    relative entropy computation.
    """

    rhs_outer: float
    rhs_inner: float
    rhs_composite: float
    direct_outer: float
    direct_inner: float
    direct_composite: float

    @property
    def defects(self) -> tuple[float, float, float]:
        return (
            abs(self.rhs_outer - self.direct_outer),
            abs(self.rhs_inner - self.direct_inner),
            abs(self.rhs_composite - self.direct_composite),
        )


def re_expansions(
    g: NCMorphism,
    f: NCMorphism,
    cutoff: float = DEFAULT_CUTOFF,
    atol: float = DEFAULT_ATOL,
) -> ExpansionCheck:
    """Evaluate the additivity expansions on a standard-form composable pair.

    Requires both homomorphisms standard form, faithful data, and the outer CPU
    map in disintegration form (so its segment weights can be extracted).
    """
    if not (g.hom.is_standard() and f.hom.is_standard()):
        raise ShapeError("re_expansions expects a rectified (standard-form) pair")
    alphas = extract_alphas(f, atol, cutoff)
    omega = f.target.state
    xi = f.source.state
    mid = cpu_pushforward_state(g.source.state, g.cpu)  # intermediate pushback
    imap = f.hom.index_map
    dims_src = f.hom.source.block_dims

    s_omega = von_neumann_entropy(omega, cutoff)
    log_xi = [hermitian_log(d, cutoff) for d in xi.densities]
    log_mid = [hermitian_log(d, cutoff) for d in mid.densities]

    term_alpha = 0.0
    term_xi = 0.0
    term_mid = 0.0
    for x in range(f.hom.target.num_blocks):
        d = omega.densities[x]
        for y, n in enumerate(dims_src):
            c = f.hom.mult[y][x]
            if c == 0:
                continue
            seg = imap.extract(d, x, y, y)
            log_alpha = hermitian_log(alphas.get(y, x), cutoff)
            term_alpha += float(
                np.trace(seg @ np.kron(log_alpha, np.eye(n))).real
            )
            reduced = partial_trace_left(seg, c, n)
            term_xi += float(np.trace(reduced @ log_xi[y]).real)
            term_mid += float(np.trace(reduced @ log_mid[y]).real)

    rhs_outer = -s_omega - term_alpha - term_xi
    rhs_inner = term_xi - term_mid
    rhs_composite = -s_omega - term_alpha - term_mid
    return ExpansionCheck(
        rhs_outer=rhs_outer,
        rhs_inner=rhs_inner,
        rhs_composite=rhs_composite,
        direct_outer=re_functor(f, cutoff),
        direct_inner=re_functor(g, cutoff),
        direct_composite=re_functor(compose_morphisms(g, f), cutoff),
    )


# ---------------------------------------------------------------------------
# The tensor-inclusion triple and the chain rule


def _uniform_alpha(c: int) -> AlphaFamily:
    return AlphaFamily(((c,),), ((np.eye(c) / c,),))


def tensor_inclusion_morphism(rho_joint: np.ndarray, head_dim: int) -> NCMorphism:
    """Hypothesis for including M_tail into M_(head*tail) as identity kron tail.

    The CPU map traces out the head factor against the uniform density, and the
    target state is the supplied joint density; the source state is its
    reduction.
    """
    rho_joint = np.asarray(rho_joint, dtype=np.complex128)
    side = rho_joint.shape[0]
    if rho_joint.shape != (side, side) or side % head_dim:
        raise ShapeError("joint density side must be divisible by the head dimension")
    tail = side // head_dim
    alg_top = AlgebraSpec((side,))
    alg_bot = AlgebraSpec((tail,))
    hom = StarHom(alg_bot, alg_top, ((head_dim,),), (np.eye(side),))
    omega = State(alg_top, (rho_joint,))
    xi = pushforward_state(omega, hom)
    return build_hypothesis_from_alphas(
        hom, xi, _uniform_alpha(head_dim), target_state=omega
    )


def chain_rule_triple(
    rho_abc: np.ndarray, dims: Sequence[int]
) -> tuple[NCMorphism, NCMorphism]:
    """The composable pair of tensor inclusions under a tripartite density.

    dims is (d_first, d_second, d_third); the inner morphism includes the third
    factor into the last two, the outer includes the last two into all three.
    """
    da, db, dc = (int(d) for d in dims)
    rho_abc = np.asarray(rho_abc, dtype=np.complex128)
    if rho_abc.shape != (da * db * dc, da * db * dc):
        raise ShapeError(
            f"density must be {(da * db * dc,) * 2}, got {rho_abc.shape}"
        )
    f = tensor_inclusion_morphism(rho_abc, da)
    rho_bc = f.source.state.densities[0]
    g = tensor_inclusion_morphism(rho_bc, db)
    return g, f


@dataclass(frozen=True)
class ChainRuleReport:
    """Conditional entropies of a tripartite state and the matching RE identities."""

    h_first_given_rest: float
    h_second_given_third: float
    h_firsttwo_given_third: float
    chain_defect: float
    re_outer: float
    re_inner: float
    re_composite: float
    identity_defects: tuple[float, float, float]

    @property
    def max_defect(self) -> float:
        return max(self.chain_defect, *self.identity_defects)


def chain_rule_report(
    rho_abc: np.ndarray, dims: Sequence[int], cutoff: float = DEFAULT_CUTOFF
) -> ChainRuleReport:
    """Check the entropy chain rule and its relative entropy form on one density.

    The chain rule is h(first two | third) == h(first | last two) +
    h(second | third) in the flipped-sign convention.  Each conditional entropy
    plus the log dimension of the included factor must match the relative
    entropy of the corresponding tensor-inclusion hypothesis.
    """
    da, db, dc = (int(d) for d in dims)
    g, f = chain_rule_triple(rho_abc, dims)
    omega = f.target.state
    xi = f.source.state

    h_first = conditional_entropy(omega, (da, db, dc), num_conditioned=2, cutoff=cutoff)
    h_two = conditional_entropy(omega, (da * db, dc), num_conditioned=1, cutoff=cutoff)
    h_second = conditional_entropy(xi, (db, dc), num_conditioned=1, cutoff=cutoff)
    chain_defect = abs(h_two - h_first - h_second)

    re_outer = re_functor(f, cutoff)
    re_inner = re_functor(g, cutoff)
    re_comp = re_functor(compose_morphisms(g, f), cutoff)
    identity_defects = (
        abs(re_comp - (h_two + math.log(da) + math.log(db))),
        abs(re_inner - (h_second + math.log(db))),
        abs(re_outer - (h_first + math.log(da))),
    )
    return ChainRuleReport(
        h_first_given_rest=h_first,
        h_second_given_third=h_second,
        h_firsttwo_given_third=h_two,
        chain_defect=chain_defect,
        re_outer=re_outer,
        re_inner=re_inner,
        re_composite=re_comp,
        identity_defects=identity_defects,
    )
