"""Unital *-homomorphisms in multiplicity form and completely positive unital maps.

Conventions fixed project-wide:

- vec is column-major: vec(A)[i + m*j] = A[i, j].
- The Choi matrix of a linear map f: M_m -> M_n is the (m*n) x (m*n) matrix
  with C[(i,k), (j,l)] = f(E_ij)[k, l], input index major.  f is completely
  positive iff C is positive semidefinite, and f(A) is recovered by pairing A
  against the input index.
- A homomorphism from blocks (n_1..n_t) to blocks (m_1..m_s) is stored as a
  nonnegative integer multiplicity matrix mult[y][x] plus one unitary per
  target block.  Inside target block x the source blocks occupy consecutive
  diagonal segments, ordered by y; within the segment for y the copy index is
  the outer tensor factor and the internal index the inner one, matching
  kron(identity_c, B_y).  Unitality forces sum_y mult[y][x] * n_y == m_x
  exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    DEFAULT_ATOL,
    AlgebraElement,
    AlgebraSpec,
    State,
    ValidationReport,
    Violation,
    partial_trace_left,
)
from .errors import (
    AlgebraMismatchError,
    NonIntegralMultiplicityError,
    NotAHomomorphismError,
    ShapeError,
)

UNITARY_ATOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BlockIndexMap:
    """Row/column bookkeeping for the standard-form segments of one homomorphism.

    Segment (y, y') of target block x covers the rows of source block y and the
    columns of source block y', with shape (c_yx * n_y) x (c_y'x * n_y').
    The diagonal segments partition [0, m_x).
    """

    source_dims: tuple[int, ...]
    mult: tuple[tuple[int, ...], ...]

    def offset(self, x: int, y: int) -> int:
        return sum(
            self.mult[yp][x] * self.source_dims[yp] for yp in range(y)
        )

    def segment(self, x: int, y: int, yp: int) -> tuple[slice, slice]:
        ry = self.offset(x, y)
        cy = self.offset(x, yp)
        return (
            slice(ry, ry + self.mult[y][x] * self.source_dims[y]),
            slice(cy, cy + self.mult[yp][x] * self.source_dims[yp]),
        )

    def extract(self, block: np.ndarray, x: int, y: int, yp: int) -> np.ndarray:
        rows, cols = self.segment(x, y, yp)
        return block[rows, cols]


@dataclass(frozen=True, eq=False)
class StarHom:
    """A unital *-homomorphism between block algebras in standard form.

    The action on an element B is, per target block x,
    conjugators[x] @ blockdiag_y(kron(eye(mult[y][x]), B_y)) @ conjugators[x]^H.
    """

    source: AlgebraSpec
    target: AlgebraSpec
    mult: tuple[tuple[int, ...], ...]
    conjugators: tuple[np.ndarray, ...]

    def __post_init__(self):
        t, s = self.source.num_blocks, self.target.num_blocks
        mult = tuple(tuple(int(c) for c in row) for row in self.mult)
        if len(mult) != t or any(len(row) != s for row in mult):
            raise ShapeError(f"multiplicity matrix must be {t}x{s}")
        if any(c < 0 for row in mult for c in row):
            raise ShapeError("multiplicities must be nonnegative")
        for x, m in enumerate(self.target.block_dims):
            got = sum(
                mult[y][x] * n for y, n in enumerate(self.source.block_dims)
            )
            if got != m:
                raise ShapeError(
                    f"unitality fails at target block {x}: "
                    f"sum of mult * source dims is {got}, block dim is {m}"
                )
        if len(self.conjugators) != s:
            raise ShapeError(f"expected {s} conjugators, got {len(self.conjugators)}")
        conj = []
        for x, (u, m) in enumerate(zip(self.conjugators, self.target.block_dims)):
            u = np.array(u, dtype=np.complex128)
            if u.shape != (m, m):
                raise ShapeError(f"conjugator {x} must be {m}x{m}, got {u.shape}")
            defect = np.linalg.norm(u.conj().T @ u - np.eye(m), 2)
            if defect > UNITARY_ATOL:
                raise ShapeError(
                    f"conjugator {x} is not unitary (defect {defect:.3e})"
                )
            u.setflags(write=False)
            conj.append(u)
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "conjugators", tuple(conj))

    @property
    def index_map(self) -> BlockIndexMap:
        return BlockIndexMap(self.source.block_dims, self.mult)

    @property
    def mult_array(self) -> np.ndarray:
        return np.array(self.mult, dtype=int)

    def is_standard(self, atol: float = UNITARY_ATOL) -> bool:
        """Whether every conjugator is the identity within atol."""
        return all(
            np.linalg.norm(u - np.eye(u.shape[0]), 2) <= atol
            for u in self.conjugators
        )


def _standard_block(
    source_blocks: Sequence[np.ndarray],
    source_dims: Sequence[int],
    mult_col: Sequence[int],
) -> np.ndarray:
    m = sum(c * n for c, n in zip(mult_col, source_dims))
    out = np.zeros((m, m), dtype=np.complex128)
    off = 0
    for b, (c, n) in zip(source_blocks, zip(mult_col, source_dims)):
        if c:
            out[off : off + c * n, off : off + c * n] = np.kron(np.eye(c), b)
            off += c * n
    return out


def apply_hom(f: StarHom, a: AlgebraElement) -> AlgebraElement:
    """Image of a source element under the homomorphism."""
    if a.algebra != f.source:
        raise AlgebraMismatchError("element does not live on the source algebra")
    out = []
    for x in range(f.target.num_blocks):
        col = [f.mult[y][x] for y in range(f.source.num_blocks)]
        std = _standard_block(a.blocks, f.source.block_dims, col)
        u = f.conjugators[x]
        out.append(u @ std @ u.conj().T)
    return AlgebraElement(f.target, tuple(out))


def identity_hom(algebra: AlgebraSpec) -> StarHom:
    s = algebra.num_blocks
    mult = tuple(
        tuple(1 if x == y else 0 for x in range(s)) for y in range(s)
    )
    return StarHom(
        algebra, algebra, mult, tuple(np.eye(d) for d in algebra.block_dims)
    )


def strip_conjugators(f: StarHom) -> StarHom:
    """The standard-form homomorphism with the same multiplicities."""
    return StarHom(
        f.source,
        f.target,
        f.mult,
        tuple(np.eye(d) for d in f.target.block_dims),
    )


def compose_homs(outer: StarHom, inner: StarHom) -> StarHom:
    """Composite outer after inner, again in multiplicity/conjugator form.

    Multiplicities multiply as integer matrices.  The composite conjugator per
    target block is U_x @ W_x @ P_x, with W_x the standard-form expansion of
    the inner conjugators and P_x the permutation regrouping the nested copy
    labels (source-block y of the middle algebra, copy within outer, copy
    within inner) into the lexicographic standard order of the composite.
    """
    if inner.target != outer.source:
        raise AlgebraMismatchError("inner target does not match outer source")
    o_dims = inner.source.block_dims
    n_dims = inner.target.block_dims
    c_in = inner.mult_array  # (z, y)
    c_out = outer.mult_array  # (y, x)
    c_tot = c_in @ c_out  # (z, x)
    u = len(o_dims)
    t = len(n_dims)

    conjugators = []
    for x, m in enumerate(outer.target.block_dims):
        w = np.zeros((m, m), dtype=np.complex128)
        off = 0
        for y in range(t):
            c = c_out[y, x]
            if c:
                size = c * n_dims[y]
                w[off : off + size, off : off + size] = np.kron(
                    np.eye(c), inner.conjugators[y]
                )
                off += size
        # inner segment offsets within each middle block y
        off_out = [0] * t
        acc = 0
        for y in range(t):
            off_out[y] = acc
            acc += c_out[y, x] * n_dims[y]
        off_in = [[0] * u for _ in range(t)]
        for y in range(t):
            acc = 0
            for z in range(u):
                off_in[y][z] = acc
                acc += c_in[z, y] * o_dims[z]
        perm = np.empty(m, dtype=int)
        pos = 0
        for z in range(u):
            for y in range(t):
                for k_out in range(c_out[y, x]):
                    for k_in in range(c_in[z, y]):
                        base = (
                            off_out[y]
                            + k_out * n_dims[y]
                            + off_in[y][z]
                            + k_in * o_dims[z]
                        )
                        for j in range(o_dims[z]):
                            perm[pos] = base + j
                            pos += 1
        if pos != m:
            raise ShapeError("composite index enumeration does not fill the block")
        p = np.zeros((m, m), dtype=np.complex128)
        p[perm, np.arange(m)] = 1.0
        conjugators.append(outer.conjugators[x] @ w @ p)

    mult = tuple(tuple(int(c) for c in row) for row in c_tot)
    return StarHom(inner.source, outer.target, mult, tuple(conjugators))


def pushforward_state(s: State, f: StarHom) -> State:
    """The state s composed with f, living on the source algebra of f.

    Per source block, the density is the sum over target blocks of the partial
    trace (over the copy factor) of the matching diagonal segment of the
    conjugated density.
    """
    if s.algebra != f.target:
        raise AlgebraMismatchError("state does not live on the target algebra")
    imap = f.index_map
    dims = f.source.block_dims
    out = [np.zeros((n, n), dtype=np.complex128) for n in dims]
    for x, d in enumerate(s.densities):
        u = f.conjugators[x]
        dt = u.conj().T @ d @ u
        for y, n in enumerate(dims):
            c = f.mult[y][x]
            if c:
                seg = imap.extract(dt, x, y, y)
                out[y] += partial_trace_left(seg, c, n)
    return State(f.source, tuple(out))


def conjugate_state(s: State, u: AlgebraElement) -> State:
    """The state a -> s(u a u^H), with densities u^H D u per block."""
    if s.algebra != u.algebra:
        raise AlgebraMismatchError("unitary lives on a different algebra")
    return State(
        s.algebra,
        tuple(b.conj().T @ d @ b for d, b in zip(s.densities, u.blocks)),
    )


# ---------------------------------------------------------------------------
# Raw (vectorized) linear maps and extraction of the standard form


def vec_element(a: AlgebraElement) -> np.ndarray:
    """Column-major vectorization, blocks concatenated in order."""
    return np.concatenate([b.flatten(order="F") for b in a.blocks])


def unvec_element(algebra: AlgebraSpec, v: np.ndarray) -> AlgebraElement:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (algebra.dim,):
        raise ShapeError(f"expected a vector of length {algebra.dim}, got {v.shape}")
    blocks = []
    off = 0
    for d in algebra.block_dims:
        blocks.append(v[off : off + d * d].reshape(d, d, order="F"))
        off += d * d
    return AlgebraElement(algebra, tuple(blocks))


@dataclass(frozen=True, eq=False)
class RawLinearMap:
    """A linear map between algebras as a dense matrix on vectorized elements."""

    source: AlgebraSpec
    target: AlgebraSpec
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (self.target.dim, self.source.dim):
            raise ShapeError(
                f"expected shape {(self.target.dim, self.source.dim)}, got {m.shape}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.source:
            raise AlgebraMismatchError("element does not live on the source algebra")
        return unvec_element(self.target, self.matrix @ vec_element(a))


def hom_to_raw(f: StarHom) -> RawLinearMap:
    cols = [
        vec_element(apply_hom(f, e)) for _, _, _, e in f.source.matrix_units()
    ]
    return RawLinearMap(f.source, f.target, np.column_stack(cols))


def hom_from_raw(raw: RawLinearMap, atol: float = DEFAULT_ATOL) -> StarHom:
    """Recover multiplicities and conjugators from a raw unital *-homomorphism.

    Verifies the homomorphism axioms on the matrix-unit basis first, then reads
    multiplicities off the traces of the image projections and assembles each
    conjugator from an orthonormal basis of the range of the image of the
    first matrix unit of each source block.
    """
    src, tgt = raw.source, raw.target
    n_dims = src.block_dims
    images: list[list[list[AlgebraElement]]] = [
        [[None] * n for _ in range(n)] for n in n_dims  # type: ignore[list-item]
    ]
    for y, i, j, e in src.matrix_units():
        images[y][i][j] = raw.apply(e)

    unital_defect = raw.apply(src.identity()).distance(tgt.identity())
    if unital_defect > atol:
        raise NotAHomomorphismError("unital", unital_defect)

    adj_defect = 0.0
    for y, n in enumerate(n_dims):
        for i in range(n):
            for j in range(n):
                adj_defect = max(
                    adj_defect,
                    images[y][j][i].distance(images[y][i][j].adjoint()),
                )
    if adj_defect > atol:
        raise NotAHomomorphismError("adjoint", adj_defect)

    mult_defect = 0.0
    for y, n in enumerate(n_dims):
        for yp, np_ in enumerate(n_dims):
            for i in range(n):
                for j in range(n):
                    for k in range(np_):
                        for l in range(np_):
                            prod = images[y][i][j] @ images[yp][k][l]
                            if y == yp and j == k:
                                expected = images[y][i][l]
                                mult_defect = max(
                                    mult_defect, prod.distance(expected)
                                )
                            else:
                                mult_defect = max(mult_defect, prod.norm())
    if mult_defect > atol:
        raise NotAHomomorphismError("multiplicative", mult_defect)

    s = tgt.num_blocks
    t = src.num_blocks
    block_ids = []
    for y, n in enumerate(n_dims):
        acc = images[y][0][0]
        for i in range(1, n):
            acc = acc + images[y][i][i]
        block_ids.append(acc)

    mult = [[0] * s for _ in range(t)]
    for y, n in enumerate(n_dims):
        for x in range(s):
            tr = np.trace(block_ids[y].blocks[x]).real / n
            c = round(tr)
            if abs(tr - c) > atol:
                raise NonIntegralMultiplicityError(
                    f"multiplicity of source block {y} in target block {x} "
                    f"is {tr:.6f}, not an integer within tolerance"
                )
            mult[y][x] = int(c)
    for x, m in enumerate(tgt.block_dims):
        if sum(mult[y][x] * n_dims[y] for y in range(t)) != m:
            raise NonIntegralMultiplicityError(
                f"multiplicities do not fill target block {x}"
            )

    conjugators = []
    for x, m in enumerate(tgt.block_dims):
        u = np.zeros((m, m), dtype=np.complex128)
        pos = 0
        for y, n in enumerate(n_dims):
            c = mult[y][x]
            if c == 0:
                continue
            proj = images[y][0][0].blocks[x]
            vals, vecs = np.linalg.eigh((proj + proj.conj().T) / 2)
            range_vecs = vecs[:, vals > 0.5]
            if range_vecs.shape[1] != c:
                raise NotAHomomorphismError(
                    "projection-rank",
                    float(abs(range_vecs.shape[1] - c)),
                    f"rank of the unit-image projection in target block {x} is "
                    f"{range_vecs.shape[1]}, expected {c}",
                )
            for k in range(c):
                v = range_vecs[:, k]
                for j in range(n):
                    u[:, pos] = images[y][j][0].blocks[x] @ v
                    pos += 1
        conjugators.append(u)

    result = StarHom(src, tgt, tuple(tuple(r) for r in mult), tuple(conjugators))
    recon = 0.0
    for y, i, j, e in src.matrix_units():
        recon = max(recon, apply_hom(result, e).distance(images[y][i][j]))
    if recon > max(atol, 1e-7):
        raise NotAHomomorphismError("reconstruction", recon)
    return result


# ---------------------------------------------------------------------------
# CPU maps through block Choi matrices


def choi_from_function(
    fn: Callable[[np.ndarray], np.ndarray], m: int, n: int
) -> np.ndarray:
    """Choi matrix of a linear map M_m -> M_n given by its action on matrices."""
    c = np.zeros((m * n, m * n), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            e = np.zeros((m, m), dtype=np.complex128)
            e[i, j] = 1.0
            fe = np.asarray(fn(e), dtype=np.complex128)
            if fe.shape != (n, n):
                raise ShapeError(f"map output must be {n}x{n}, got {fe.shape}")
            c[i * n : (i + 1) * n, j * n : (j + 1) * n] = fe
    return c


def apply_choi(choi: np.ndarray, a: np.ndarray, m: int, n: int) -> np.ndarray:
    """Apply the map with the given Choi matrix to an m x m input."""
    return np.einsum("ij,ikjl->kl", a, choi.reshape(m, n, m, n))


def dual_apply_choi(choi: np.ndarray, e: np.ndarray, m: int, n: int) -> np.ndarray:
    """Apply the trace dual: trace(dual(e) @ a) == trace(e @ map(a)) for all a."""
    return np.einsum("ikjl,lk->ji", choi.reshape(m, n, m, n), e)


def compose_choi(
    inner: np.ndarray, outer: np.ndarray, m: int, n: int, o: int
) -> np.ndarray:
    """Choi matrix of outer (M_n -> M_o) after inner (M_m -> M_n)."""
    return np.einsum(
        "iajb,akbl->ikjl", inner.reshape(m, n, m, n), outer.reshape(n, o, n, o)
    ).reshape(m * o, m * o)


def identity_choi(m: int) -> np.ndarray:
    return choi_from_function(lambda e: e, m, m)


@dataclass(frozen=True, eq=False)
class CPUMap:
    """A linear map between block algebras stored as one Choi matrix per block pair.

    components[y][x] is the Choi matrix of the component from source block x
    (side m_x) to target block y (side n_y).  Complete positivity is each
    component Choi being PSD; unitality is sum_x component(1_x) == 1_y.
    """

    source: AlgebraSpec
    target: AlgebraSpec
    components: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        t = self.target.num_blocks
        s = self.source.num_blocks
        if len(self.components) != t or any(len(row) != s for row in self.components):
            raise ShapeError(f"components must form a {t}x{s} grid")
        rows = []
        for y, n in enumerate(self.target.block_dims):
            row = []
            for x, m in enumerate(self.source.block_dims):
                c = np.array(self.components[y][x], dtype=np.complex128)
                if c.shape != (m * n, m * n):
                    raise ShapeError(
                        f"component ({y},{x}) must be {(m * n, m * n)}, got {c.shape}"
                    )
                c.setflags(write=False)
                row.append(c)
            rows.append(tuple(row))
        object.__setattr__(self, "components", tuple(rows))

    def component(self, y: int, x: int) -> np.ndarray:
        return self.components[y][x]


def cpu_from_functions(
    source: AlgebraSpec,
    target: AlgebraSpec,
    fn: Callable[[int, int, np.ndarray], np.ndarray],
) -> CPUMap:
    """Build a CPUMap from the componentwise action fn(y, x, input_matrix)."""
    comps = []
    for y, n in enumerate(target.block_dims):
        row = []
        for x, m in enumerate(source.block_dims):
            row.append(choi_from_function(lambda e, y=y, x=x: fn(y, x, e), m, n))
        comps.append(tuple(row))
    return CPUMap(source, target, tuple(comps))


def identity_cpu(algebra: AlgebraSpec) -> CPUMap:
    comps = []
    for y, n in enumerate(algebra.block_dims):
        row = []
        for x, m in enumerate(algebra.block_dims):
            if x == y:
                row.append(identity_choi(m))
            else:
                row.append(np.zeros((m * n, m * n), dtype=np.complex128))
        comps.append(tuple(row))
    return CPUMap(algebra, algebra, tuple(comps))


def apply_cpu(q: CPUMap, a: AlgebraElement) -> AlgebraElement:
    if a.algebra != q.source:
        raise AlgebraMismatchError("element does not live on the source algebra")
    out = []
    for y, n in enumerate(q.target.block_dims):
        acc = np.zeros((n, n), dtype=np.complex128)
        for x, m in enumerate(q.source.block_dims):
            acc += apply_choi(q.components[y][x], a.blocks[x], m, n)
        out.append(acc)
    return AlgebraElement(q.target, tuple(out))


def compose_cpu(outer: CPUMap, inner: CPUMap) -> CPUMap:
    """Composite outer after inner on the Choi level."""
    if inner.target != outer.source:
        raise AlgebraMismatchError("inner target does not match outer source")
    comps = []
    for z, o in enumerate(outer.target.block_dims):
        row = []
        for x, m in enumerate(inner.source.block_dims):
            acc = np.zeros((m * o, m * o), dtype=np.complex128)
            for y, n in enumerate(inner.target.block_dims):
                acc += compose_choi(
                    inner.components[y][x], outer.components[z][y], m, n, o
                )
            row.append(acc)
        comps.append(tuple(row))
    return CPUMap(inner.source, outer.target, tuple(comps))


def cpu_pushforward_state(s: State, q: CPUMap) -> State:
    """The state s composed with q, via the trace duals of the components."""
    if s.algebra != q.target:
        raise AlgebraMismatchError("state does not live on the target algebra")
    out = []
    for x, m in enumerate(q.source.block_dims):
        acc = np.zeros((m, m), dtype=np.complex128)
        for y, n in enumerate(q.target.block_dims):
            acc += dual_apply_choi(q.components[y][x], s.densities[y], m, n)
        out.append((acc + acc.conj().T) / 2)
    return State(q.source, tuple(out))


def validate_cpu(q: CPUMap, atol: float = DEFAULT_ATOL) -> ValidationReport:
    """Check complete positivity (componentwise Choi PSD) and unitality."""
    violations = []
    for y, n in enumerate(q.target.block_dims):
        for x, m in enumerate(q.source.block_dims):
            c = q.components[y][x]
            herm = np.linalg.norm(c - c.conj().T, 2)
            if herm > atol:
                violations.append(
                    Violation("choi-hermiticity", f"component ({y},{x})", float(herm))
                )
            vals = np.linalg.eigvalsh((c + c.conj().T) / 2)
            if vals.size and vals[0] < -atol:
                violations.append(
                    Violation("cp", f"component ({y},{x})", float(-vals[0]))
                )
    one = apply_cpu(q, q.source.identity())
    for y, n in enumerate(q.target.block_dims):
        defect = np.linalg.norm(one.blocks[y] - np.eye(n), 2)
        if defect > atol:
            violations.append(
                Violation("unitality", f"target block {y}", float(defect))
            )
    return ValidationReport(tuple(violations))


def ad_hom(u: AlgebraElement, atol: float = UNITARY_ATOL) -> StarHom:
    """Conjugation by a unitary element as a homomorphism of its algebra."""
    for x, (b, d) in enumerate(zip(u.blocks, u.algebra.block_dims)):
        defect = np.linalg.norm(b.conj().T @ b - np.eye(d), 2)
        if defect > atol:
            raise np.linalg.LinAlgError(
                f"block {x} is not unitary (defect {defect:.3e})"
            )
    s = u.algebra.num_blocks
    mult = tuple(tuple(1 if x == y else 0 for x in range(s)) for y in range(s))
    return StarHom(u.algebra, u.algebra, mult, u.blocks)


def ad_cpu(u: AlgebraElement, atol: float = UNITARY_ATOL) -> CPUMap:
    """Conjugation by a unitary element as a CPU map of its algebra."""
    hom = ad_hom(u, atol)  # reuses the unitarity check
    comps = []
    dims = u.algebra.block_dims
    for y, n in enumerate(dims):
        row = []
        for x, m in enumerate(dims):
            if x == y:
                b = u.blocks[x]
                row.append(
                    choi_from_function(lambda e, b=b: b @ e @ b.conj().T, m, n)
                )
            else:
                row.append(np.zeros((m * n, m * n), dtype=np.complex128))
        comps.append(tuple(row))
    return CPUMap(u.algebra, u.algebra, tuple(comps))


def ad_unitary(
    u: AlgebraElement, atol: float = UNITARY_ATOL
) -> tuple[StarHom, CPUMap]:
    """Conjugation by a unitary, returned in both representations."""
    return ad_hom(u, atol), ad_cpu(u, atol)


def direct_sum_homs(f: StarHom, g: StarHom) -> StarHom:
    """Block-diagonal direct sum acting on the concatenated algebras."""
    from .algebra import direct_sum_algebras

    src = direct_sum_algebras(f.source, g.source)
    tgt = direct_sum_algebras(f.target, g.target)
    t1, s1 = f.source.num_blocks, f.target.num_blocks
    t2, s2 = g.source.num_blocks, g.target.num_blocks
    mult = []
    for y in range(t1 + t2):
        row = []
        for x in range(s1 + s2):
            if y < t1 and x < s1:
                row.append(f.mult[y][x])
            elif y >= t1 and x >= s1:
                row.append(g.mult[y - t1][x - s1])
            else:
                row.append(0)
        mult.append(tuple(row))
    return StarHom(src, tgt, tuple(mult), f.conjugators + g.conjugators)


def direct_sum_cpus(q: CPUMap, r: CPUMap) -> CPUMap:
    from .algebra import direct_sum_algebras

    src = direct_sum_algebras(q.source, r.source)
    tgt = direct_sum_algebras(q.target, r.target)
    t1, s1 = q.target.num_blocks, q.source.num_blocks
    comps = []
    for y, n in enumerate(tgt.block_dims):
        row = []
        for x, m in enumerate(src.block_dims):
            if y < t1 and x < s1:
                row.append(q.components[y][x])
            elif y >= t1 and x >= s1:
                row.append(r.components[y - t1][x - s1])
            else:
                row.append(np.zeros((m * n, m * n), dtype=np.complex128))
        comps.append(tuple(row))
    return CPUMap(src, tgt, tuple(comps))
