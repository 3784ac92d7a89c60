"""Executable law suite: every module invariant as a seeded property check.

Each law runs one trial per derived RNG stream and reports a scalar defect;
run_laws aggregates defects against the law's tolerance over cfg.trials
streams.  Laws that need faithful data generate it regardless of the
faithful_only flag; laws that tolerate the infinite regime log occurrences
instead of failing on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import entropy as ent
from .algebra import (
    AlgebraElement,
    AlgebraSpec,
    State,
    absolutely_continuous,
    hermitian_exp,
    hermitian_log,
    partial_trace_left,
    state_distance,
    support_projection,
    validate_state,
)
from .generators import (
    GeneratorConfig,
    gen_algebra,
    gen_alpha_family,
    gen_classical_distribution,
    gen_composable_pair,
    gen_density,
    gen_element,
    gen_morphism,
    gen_optimal_morphism,
    gen_star_hom,
    gen_state,
    rng_for,
)
from .hypotheses import (
    NoDisintegration,
    build_hypothesis_from_alphas,
    compose_morphisms,
    construct_optimal_hypothesis,
    extract_alphas,
    is_optimal,
    rectify_morphism,
    rectify_pair,
    validate_morphism,
)
from .maps import (
    apply_cpu,
    apply_hom,
    compose_homs,
    cpu_pushforward_state,
    hom_from_raw,
    hom_to_raw,
    identity_hom,
    pushforward_state,
    validate_cpu,
)


@dataclass(frozen=True)
class TrialOutcome:
    defect: float = 0.0
    infinite: bool = False
    skipped: bool = False


@dataclass(frozen=True)
class LawResult:
    name: str
    tolerance: float
    trials: int
    failures: int
    max_defect: float
    failing_trials: tuple[int, ...]
    infinite_count: int

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "tolerance": self.tolerance,
            "trials": self.trials,
            "failures": self.failures,
            "max_defect": self.max_defect,
            "failing_trials": list(self.failing_trials),
            "infinite_count": self.infinite_count,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class LawReport:
    config: GeneratorConfig
    results: tuple[LawResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def summary(self) -> str:
        lines = []
        width = max(len(r.name) for r in self.results)
        for r in self.results:
            status = "pass" if r.passed else "FAIL"
            extra = f" inf={r.infinite_count}" if r.infinite_count else ""
            lines.append(
                f"{status}  {r.name:<{width}}  trials={r.trials}"
                f"  max_defect={r.max_defect:.3e}  tol={r.tolerance:.1e}{extra}"
            )
        verdict = "all laws pass" if self.ok else "LAW FAILURES PRESENT"
        lines.append(verdict)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "seed": self.config.seed,
            "trials": self.config.trials,
            "max_blocks": self.config.max_blocks,
            "max_block_dim": self.config.max_block_dim,
            "faithful_only": self.config.faithful_only,
            "ok": self.ok,
            "laws": [r.to_json() for r in self.results],
        }


# ---------------------------------------------------------------------------
# individual laws; each function runs a single trial


def _law_state_validity(rng, cfg) -> TrialOutcome:
    s = gen_state(gen_algebra(rng, cfg), cfg, rng)
    rep = validate_state(s, cfg.atol)
    worst = max((v.residual for v in rep.violations), default=0.0)
    return TrialOutcome(defect=worst)


def _law_partial_trace(rng, cfg) -> TrialOutcome:
    a = int(rng.integers(1, cfg.max_block_dim + 1))
    b = int(rng.integers(1, cfg.max_block_dim + 1))
    left = rng.standard_normal((a, a)) + 1j * rng.standard_normal((a, a))
    right = rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
    d1 = np.linalg.norm(
        partial_trace_left(np.kron(left, right), a, b) - np.trace(left) * right
    )
    t = rng.standard_normal((a * b, a * b)) + 1j * rng.standard_normal((a * b, a * b))
    d2 = abs(np.trace(partial_trace_left(t, a, b)) - np.trace(t))
    return TrialOutcome(defect=float(max(d1, d2)))


def _law_spectral_roundtrip(rng, cfg) -> TrialOutcome:
    n = int(rng.integers(1, 2 * cfg.max_block_dim + 1))
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (h + h.conj().T) / 2
    defect = np.linalg.norm(hermitian_log(hermitian_exp(h)) - h) / max(
        1.0, np.linalg.norm(h)
    )
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    p = g @ g.conj().T + 0.1 * np.eye(n)
    defect2 = np.linalg.norm(hermitian_exp(hermitian_log(p)) - p) / np.linalg.norm(p)
    return TrialOutcome(defect=float(max(defect, defect2)))


def _law_support_projection(rng, cfg) -> TrialOutcome:
    n = int(rng.integers(1, 2 * cfg.max_block_dim + 1))
    rank = int(rng.integers(1, n + 1))
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    d = g @ g.conj().T
    p = support_projection(d)
    defect = max(
        np.linalg.norm(p @ p - p),
        np.linalg.norm(p - p.conj().T),
        np.linalg.norm(p @ d @ p - d) / max(1.0, np.linalg.norm(d)),
    )
    return TrialOutcome(defect=float(defect))


def _law_absolute_continuity(rng, cfg) -> TrialOutcome:
    alg = gen_algebra(rng, cfg)
    s3 = gen_state(alg, cfg, rng, faithful=True)
    # nested projections per block give a genuine support chain s1 <= s2 <= s3
    outer_blocks, inner_blocks = [], []
    strict = False
    for d in s3.densities:
        n = d.shape[0]
        basis = np.linalg.qr(
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        )[0]
        k2 = int(rng.integers(1, n + 1))
        k1 = int(rng.integers(1, k2 + 1))
        strict = strict or k2 < n
        p2 = basis[:, :k2] @ basis[:, :k2].conj().T
        p1 = basis[:, :k1] @ basis[:, :k1].conj().T
        outer_blocks.append(p2 @ d @ p2)
        inner_blocks.append(p1 @ d @ p1)

    def renorm(blocks) -> State:
        total = sum(np.trace(b).real for b in blocks)
        return State(alg, tuple(b / total for b in blocks))

    s2 = renorm(outer_blocks)
    s1 = renorm(inner_blocks)
    bad = 0.0
    if not absolutely_continuous(s3, s3):
        bad = 1.0
    if not (
        absolutely_continuous(s1, s2)
        and absolutely_continuous(s2, s3)
        and absolutely_continuous(s1, s3)
    ):
        bad = 1.0
    if strict and absolutely_continuous(s3, s2):
        bad = 1.0
    return TrialOutcome(defect=bad)


def _law_hom_axioms(rng, cfg) -> TrialOutcome:
    alg = gen_algebra(rng, cfg)
    f = gen_star_hom(rng, alg, cfg)
    a = gen_element(rng, alg)
    b = gen_element(rng, alg)
    d1 = apply_hom(f, a @ b).distance(apply_hom(f, a) @ apply_hom(f, b))
    d2 = apply_hom(f, a.adjoint()).distance(apply_hom(f, a).adjoint())
    d3 = apply_hom(f, alg.identity()).distance(f.target.identity())
    return TrialOutcome(defect=float(max(d1, d2, d3)))


def _law_hom_raw_roundtrip(rng, cfg) -> TrialOutcome:
    alg = gen_algebra(rng, cfg)
    f = gen_star_hom(rng, alg, cfg)
    back = hom_from_raw(hom_to_raw(f))
    if back.mult != f.mult:
        return TrialOutcome(defect=1.0)
    worst = 0.0
    for _, _, _, e in alg.matrix_units():
        worst = max(worst, apply_hom(back, e).distance(apply_hom(f, e)))
    return TrialOutcome(defect=worst)


def _law_hom_composition(rng, cfg) -> TrialOutcome:
    bottom = gen_algebra(rng, cfg)
    g = gen_star_hom(rng, bottom, cfg)
    f = gen_star_hom(rng, g.target, cfg)
    h = compose_homs(f, g)
    expected_mult = np.array(g.mult, dtype=int) @ np.array(f.mult, dtype=int)
    if not np.array_equal(np.array(h.mult, dtype=int), expected_mult):
        return TrialOutcome(defect=1.0)
    worst = 0.0
    for _, _, _, e in bottom.matrix_units():
        worst = max(worst, apply_hom(h, e).distance(apply_hom(f, apply_hom(g, e))))
    left = compose_homs(identity_hom(f.target), f)
    right = compose_homs(f, identity_hom(f.source))
    a = gen_element(rng, f.source)
    worst = max(worst, apply_hom(left, a).distance(apply_hom(f, a)))
    worst = max(worst, apply_hom(right, a).distance(apply_hom(f, a)))
    return TrialOutcome(defect=worst)


def _law_pushforward_definitional(rng, cfg) -> TrialOutcome:
    alg = gen_algebra(rng, cfg)
    f = gen_star_hom(rng, alg, cfg)
    omega = gen_state(f.target, cfg, rng)
    xi = pushforward_state(omega, f)
    worst = 0.0
    for y, n in enumerate(alg.block_dims):
        direct = np.zeros((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                unit = [np.zeros((d, d)) for d in alg.block_dims]
                unit[y][j, i] = 1.0
                direct[i, j] = omega.evaluate(
                    apply_hom(f, AlgebraElement(alg, tuple(unit)))
                )
        worst = max(worst, float(np.linalg.norm(direct - xi.densities[y])))
    return TrialOutcome(defect=worst)


def _law_cpu_validity(rng, cfg) -> TrialOutcome:
    m = gen_morphism(cfg, rng, faithful=True)
    rep = validate_cpu(m.cpu, cfg.atol)
    worst = max((v.residual for v in rep.violations), default=0.0)
    a = gen_element(rng, m.cpu.source)
    psd = a @ a.adjoint()
    image = apply_cpu(m.cpu, psd)
    for b in image.blocks:
        vals = np.linalg.eigvalsh((b + b.conj().T) / 2)
        if vals.size:
            worst = max(worst, max(0.0, -float(vals[0])))
    return TrialOutcome(defect=worst)


def _law_cpu_dual_pairing(rng, cfg) -> TrialOutcome:
    m = gen_morphism(cfg, rng, faithful=True)
    s = gen_state(m.cpu.target, cfg, rng, faithful=True)
    a = gen_element(rng, m.cpu.source)
    lhs = s.evaluate(apply_cpu(m.cpu, a))
    rhs = cpu_pushforward_state(s, m.cpu).evaluate(a)
    return TrialOutcome(defect=float(abs(lhs - rhs)))


def _law_morphism_validity(rng, cfg) -> TrialOutcome:
    m = gen_morphism(cfg, rng)
    rep = validate_morphism(m, cfg.atol)
    worst = max((v.residual for v in rep.violations), default=0.0)
    return TrialOutcome(defect=worst)


def _law_optimal_vanishing(rng, cfg) -> TrialOutcome:
    m = gen_optimal_morphism(cfg, rng)
    flag, residual = is_optimal(m, cfg.atol)
    if not flag:
        return TrialOutcome(defect=residual)
    value = ent.re_functor(m)
    return TrialOutcome(defect=abs(value))


def _law_rectification_invariance(rng, cfg) -> TrialOutcome:
    m = gen_morphism(cfg, rng)
    r = rectify_morphism(m)
    rect = r.morphism
    worst = max(
        (v.residual for v in validate_morphism(rect, cfg.atol).violations),
        default=0.0,
    )
    _, before_res = is_optimal(m, cfg.atol)
    _, after_res = is_optimal(rect, cfg.atol)
    worst = max(worst, abs(before_res - after_res))
    before = ent.re_functor(m)
    after = ent.re_functor(rect)
    if math.isinf(before) or math.isinf(after):
        return TrialOutcome(
            defect=0.0 if math.isinf(before) == math.isinf(after) else 1.0,
            infinite=True,
        )
    return TrialOutcome(defect=max(worst, abs(before - after)))


def _law_pair_rectification(rng, cfg) -> TrialOutcome:
    inner, outer = gen_composable_pair(cfg, rng)
    r = rectify_pair(inner, outer)
    g, f = r.morphisms
    if not (g.hom.is_standard() and f.hom.is_standard()):
        return TrialOutcome(defect=1.0)
    worst = state_distance(f.source.state, g.target.state)
    worst = max(
        worst,
        abs(ent.re_functor(g) - ent.re_functor(inner)),
        abs(ent.re_functor(f) - ent.re_functor(outer)),
    )
    for m in (g, f):
        worst = max(
            worst,
            max(
                (v.residual for v in validate_morphism(m, cfg.atol).violations),
                default=0.0,
            ),
        )
    return TrialOutcome(defect=worst)


def _law_composition_closure(rng, cfg) -> TrialOutcome:
    inner, outer = gen_composable_pair(cfg, rng)
    comp = compose_morphisms(inner, outer)
    rep = validate_morphism(comp, cfg.atol)
    worst = max((v.residual for v in rep.violations), default=0.0)
    return TrialOutcome(defect=worst)


def _law_composite_state_expansion(rng, cfg) -> TrialOutcome:
    inner, outer = gen_composable_pair(cfg, rng)
    r = rectify_pair(inner, outer)
    g, f = r.morphisms
    alphas = extract_alphas(f, cfg.atol)
    mid = cpu_pushforward_state(g.source.state, g.cpu)
    back = cpu_pushforward_state(
        g.source.state, compose_morphisms(g, f).cpu
    )
    imap = f.hom.index_map
    worst = 0.0
    for x, m in enumerate(f.hom.target.block_dims):
        assembled = np.zeros((m, m), dtype=np.complex128)
        for y in range(f.hom.source.num_blocks):
            c = f.hom.mult[y][x]
            if c == 0:
                continue
            rows, cols = imap.segment(x, y, y)
            assembled[rows, cols] = np.kron(alphas.get(y, x), mid.densities[y])
        worst = max(worst, float(np.linalg.norm(assembled - back.densities[x])))
    return TrialOutcome(defect=worst)


def _law_extract_build_roundtrip(rng, cfg) -> TrialOutcome:
    alg = gen_algebra(rng, cfg)
    hom = gen_star_hom(rng, alg, cfg, standard=True)
    xi = gen_state(alg, cfg, rng, faithful=True)
    alphas = gen_alpha_family(rng, hom.mult)
    m = build_hypothesis_from_alphas(hom, xi, alphas)
    back = extract_alphas(m, cfg.atol)
    worst = 0.0
    for y, row in enumerate(alphas.blocks):
        for x, a in enumerate(row):
            if a is None:
                continue
            worst = max(worst, float(np.linalg.norm(back.get(y, x) - a)))
    return TrialOutcome(defect=worst)


def _law_disintegration_success(rng, cfg) -> TrialOutcome:
    m = gen_optimal_morphism(cfg, rng)
    result = construct_optimal_hypothesis(m.hom, m.target.state, cfg.atol)
    if isinstance(result, NoDisintegration):
        return TrialOutcome(defect=1.0)
    flag, residual = is_optimal(result, cfg.atol)
    value = ent.re_functor(result)
    return TrialOutcome(defect=max(residual, abs(value)))


def _law_re_nonnegative(rng, cfg) -> TrialOutcome:
    alg = gen_algebra(rng, cfg)
    s1 = gen_state(alg, cfg, rng)
    s2 = gen_state(alg, cfg, rng)
    value = ent.relative_entropy(s1, s2)
    if math.isinf(value):
        return TrialOutcome(infinite=True)
    self_value = ent.relative_entropy(s1, s1)
    return TrialOutcome(defect=max(-value, abs(self_value)))


def _law_infinity_coverage(rng, cfg) -> TrialOutcome:
    if cfg.faithful_only:
        return TrialOutcome(skipped=True)
    alg = gen_algebra(rng, cfg)
    s1 = gen_state(alg, cfg, rng, faithful=True)
    s2 = gen_state(alg, cfg, rng, faithful=False)
    value = ent.relative_entropy(s1, s2)
    return TrialOutcome(infinite=math.isinf(value))


def _law_functoriality(rng, cfg) -> TrialOutcome:
    inner, outer = gen_composable_pair(cfg, rng)
    defect = ent.functoriality_defect(inner, outer)
    if isinstance(defect, ent.InfiniteRegimeReport):
        return TrialOutcome(defect=1.0, infinite=True)
    return TrialOutcome(defect=defect)


def _law_re_expansions(rng, cfg) -> TrialOutcome:
    inner, outer = gen_composable_pair(cfg, rng)
    r = rectify_pair(inner, outer)
    check = ent.re_expansions(r.morphisms[0], r.morphisms[1])
    return TrialOutcome(defect=max(check.defects))


def _law_affinity(rng, cfg) -> TrialOutcome:
    m1 = gen_morphism(cfg, rng, faithful=True)
    m2 = gen_morphism(cfg, rng, faithful=True)
    r1 = ent.re_functor(m1)
    r2 = ent.re_functor(m2)
    worst = 0.0
    for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
        combined = ent.convex_sum_morphisms(lam, m1, m2)
        value = ent.re_functor(combined)
        worst = max(worst, abs(value - (lam * r1 + (1 - lam) * r2)))
    return TrialOutcome(defect=worst)


def _law_chain_rule(rng, cfg) -> TrialOutcome:
    rho = gen_density(rng, 8, faithful=True)
    report = ent.chain_rule_report(rho, (2, 2, 2))
    return TrialOutcome(defect=report.max_defect)


def _law_classical_kl(rng, cfg) -> TrialOutcome:
    n = int(rng.integers(2, 6))
    alg = AlgebraSpec((1,) * n)
    p = gen_classical_distribution(rng, n)
    q = gen_classical_distribution(rng, n)
    sp = State(alg, tuple(np.array([[v]]) for v in p))
    sq = State(alg, tuple(np.array([[v]]) for v in q))
    value = ent.relative_entropy(sp, sq)
    scalar = float(sum(pi * math.log(pi / qi) for pi, qi in zip(p, q)))
    return TrialOutcome(defect=abs(value - scalar))


def _law_generator_determinism(rng, cfg) -> TrialOutcome:
    # rng is ignored: determinism is about rebuilding the same trial stream
    trial = int(rng.integers(0, cfg.trials))
    a = gen_state(AlgebraSpec((2, 3)), cfg, rng_for(cfg, trial))
    b = gen_state(AlgebraSpec((2, 3)), cfg, rng_for(cfg, trial))
    same = all(
        np.array_equal(x, y) for x, y in zip(a.densities, b.densities)
    )
    return TrialOutcome(defect=0.0 if same else 1.0)


LAWS: tuple[tuple[str, float, object], ...] = (
    ("state-validity", 1e-9, _law_state_validity),
    ("partial-trace", 1e-10, _law_partial_trace),
    ("spectral-roundtrip", 1e-8, _law_spectral_roundtrip),
    ("support-projection", 1e-9, _law_support_projection),
    ("absolute-continuity-preorder", 0.5, _law_absolute_continuity),
    ("hom-axioms", 1e-10, _law_hom_axioms),
    ("hom-raw-roundtrip", 1e-8, _law_hom_raw_roundtrip),
    ("hom-composition", 1e-12, _law_hom_composition),
    ("pushforward-definitional", 1e-10, _law_pushforward_definitional),
    ("cpu-positivity-unitality", 1e-9, _law_cpu_validity),
    ("cpu-dual-pairing", 1e-10, _law_cpu_dual_pairing),
    ("morphism-validity", 1e-9, _law_morphism_validity),
    ("optimal-morphisms-vanish", 1e-9, _law_optimal_vanishing),
    ("rectification-invariance", 1e-9, _law_rectification_invariance),
    ("pair-rectification", 1e-9, _law_pair_rectification),
    ("composition-closure", 1e-9, _law_composition_closure),
    ("composite-state-expansion", 1e-9, _law_composite_state_expansion),
    ("extract-build-roundtrip", 1e-10, _law_extract_build_roundtrip),
    ("disintegration-success", 1e-9, _law_disintegration_success),
    ("relative-entropy-nonnegative", 1e-10, _law_re_nonnegative),
    ("relative-entropy-infinity-coverage", 0.5, _law_infinity_coverage),
    ("functoriality", 1e-8, _law_functoriality),
    ("re-expansion-identities", 1e-8, _law_re_expansions),
    ("affinity", 1e-9, _law_affinity),
    ("chain-rule", 1e-9, _law_chain_rule),
    ("classical-kl-reduction", 1e-12, _law_classical_kl),
    ("generator-determinism", 0.5, _law_generator_determinism),
)


def run_laws(cfg: GeneratorConfig) -> LawReport:
    """Run every law over cfg.trials derived streams and aggregate the defects.

    The infinity-coverage law additionally fails when faithful_only is off but
    no infinite instance showed up across all its trials.
    """
    results = []
    for name, tol, fn in LAWS:
        failures = []
        max_defect = 0.0
        infinite = 0
        ran = 0
        for trial in range(cfg.trials):
            out = fn(rng_for(cfg, trial), cfg)
            if out.skipped:
                continue
            ran += 1
            infinite += int(out.infinite)
            max_defect = max(max_defect, out.defect)
            if out.defect > tol:
                failures.append(trial)
        if (
            name == "relative-entropy-infinity-coverage"
            and not cfg.faithful_only
            and ran
            and infinite == 0
        ):
            failures.append(-1)  # coverage shortfall, not tied to one trial
        results.append(
            LawResult(
                name=name,
                tolerance=tol,
                trials=ran,
                failures=len(failures),
                max_defect=max_defect,
                failing_trials=tuple(failures[:10]),
                infinite_count=infinite,
            )
        )
    return LawReport(config=cfg, results=tuple(results))
