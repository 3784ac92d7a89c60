"""Dense block-matrix algebra: elements, states, spectral calculus, validity checks.

An algebra here is a direct sum of full complex matrix blocks, described by the
ordered list of block side lengths.  Elements and states carry one square
matrix per block.  States store unnormalized densities (block weight times the
normalized density), so weight-zero blocks need no special casing and convex
combinations stay closed.  All logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import AlgebraMismatchError, ShapeError

DEFAULT_ATOL = 1e-9
DEFAULT_CUTOFF = 1e-10


def _frozen_complex(m: object, side: int | None = None) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if side is not None and a.shape[0] != side:
        raise ShapeError(f"expected side {side}, got {a.shape[0]}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AlgebraSpec:
    """Direct sum of full matrix algebras, recorded as ordered block side lengths."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims:
            raise ShapeError("an algebra needs at least one block")
        if any(d < 1 for d in dims):
            raise ShapeError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        """Linear dimension: the sum of squared block sizes."""
        return sum(d * d for d in self.block_dims)

    @property
    def side(self) -> int:
        """Total matrix side length of the block-diagonal picture."""
        return sum(self.block_dims)

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(d) for d in self.block_dims))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((d, d)) for d in self.block_dims))

    def matrix_units(self) -> Iterator[tuple[int, int, int, "AlgebraElement"]]:
        """Yield (block, row, col, element) for every matrix unit.

        Iteration order matches the column-major vectorization used by
        ``RawLinearMap``: blocks in order, columns outer, rows inner.
        """
        for b, d in enumerate(self.block_dims):
            for j in range(d):
                for i in range(d):
                    blocks = [np.zeros((k, k)) for k in self.block_dims]
                    blocks[b][i, j] = 1.0
                    yield b, i, j, AlgebraElement(self, tuple(blocks))

    def maximally_mixed(self) -> "State":
        side = self.side
        return State(self, tuple(np.eye(d) / side for d in self.block_dims))


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """One square complex matrix per block of an :class:`AlgebraSpec`."""

    algebra: AlgebraSpec
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != self.algebra.num_blocks:
            raise ShapeError(
                f"expected {self.algebra.num_blocks} blocks, got {len(self.blocks)}"
            )
        frozen = tuple(
            _frozen_complex(b, d) for b, d in zip(self.blocks, self.algebra.block_dims)
        )
        object.__setattr__(self, "blocks", frozen)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(b.conj().T for b in self.blocks))

    def _check_same_algebra(self, other: "AlgebraElement"):
        if self.algebra != other.algebra:
            raise AlgebraMismatchError(
                f"elements on {self.algebra.block_dims} vs {other.algebra.block_dims}"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_algebra(other)
        return AlgebraElement(
            self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks))
        )

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_algebra(other)
        return AlgebraElement(
            self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks))
        )

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same_algebra(other)
        return AlgebraElement(
            self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks))
        )

    def __rmul__(self, scalar: complex) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(scalar * b for b in self.blocks))

    def norm(self) -> float:
        """Frobenius norm over all blocks."""
        return float(np.sqrt(sum(np.linalg.norm(b) ** 2 for b in self.blocks)))

    def distance(self, other: "AlgebraElement") -> float:
        return (self - other).norm()

    def is_hermitian(self, atol: float = DEFAULT_ATOL) -> bool:
        return all(np.linalg.norm(b - b.conj().T, 2) <= atol for b in self.blocks)


@dataclass(frozen=True, eq=False)
class State:
    """A linear functional stored as one unnormalized density matrix per block.

    Evaluation pairs by trace: the value on an element is the sum over blocks
    of trace(density @ block).  A valid state has Hermitian PSD densities
    whose traces sum to one.
    """

    algebra: AlgebraSpec
    densities: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.densities) != self.algebra.num_blocks:
            raise ShapeError(
                f"expected {self.algebra.num_blocks} densities, got {len(self.densities)}"
            )
        frozen = tuple(
            _frozen_complex(d, k)
            for d, k in zip(self.densities, self.algebra.block_dims)
        )
        object.__setattr__(self, "densities", frozen)

    @property
    def block_weights(self) -> np.ndarray:
        """Real part of the per-block traces."""
        return np.array([np.trace(d).real for d in self.densities])

    def evaluate(self, a: AlgebraElement) -> complex:
        if a.algebra != self.algebra:
            raise AlgebraMismatchError("element lives on a different algebra")
        return complex(sum(np.trace(d @ b) for d, b in zip(self.densities, a.blocks)))

    def normalized_block(self, x: int, tol: float = DEFAULT_ATOL) -> np.ndarray | None:
        """Density of block x normalized to unit trace, or None below weight tol."""
        w = np.trace(self.densities[x]).real
        if w <= tol:
            return None
        return self.densities[x] / w


def state_distance(s1: State, s2: State) -> float:
    """Frobenius distance between the density tuples of two states."""
    if s1.algebra != s2.algebra:
        raise AlgebraMismatchError("states live on different algebras")
    return float(
        np.sqrt(
            sum(
                np.linalg.norm(a - b) ** 2
                for a, b in zip(s1.densities, s2.densities)
            )
        )
    )


@dataclass(frozen=True, eq=False)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix: ascending eigenvalues, unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eigen(m: np.ndarray, atol: float = DEFAULT_ATOL) -> HermitianEigen:
    """Eigendecompose m, insisting it is Hermitian within atol in operator norm."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    herm_defect = np.linalg.norm(m - m.conj().T, 2) if m.size else 0.0
    if herm_defect > atol:
        raise np.linalg.LinAlgError(
            f"matrix is not Hermitian within tolerance (defect {herm_defect:.3e})"
        )
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return HermitianEigen(vals, vecs)


def partial_trace_left(t: np.ndarray, a: int, b: int) -> np.ndarray:
    """Trace out the left factor of a matrix on the tensor product C^a (x) C^b.

    For kron(A, B) this returns trace(A) * B.
    """
    t = np.asarray(t, dtype=np.complex128)
    if t.shape != (a * b, a * b):
        raise ShapeError(f"expected shape {(a * b, a * b)}, got {t.shape}")
    return np.einsum("ikil->kl", t.reshape(a, b, a, b))


def _spectral_apply(
    m: np.ndarray,
    fn,
    cutoff: float = DEFAULT_CUTOFF,
    atol: float = DEFAULT_ATOL,
    require_psd: bool = False,
) -> np.ndarray:
    eig = hermitian_eigen(m, atol)
    vals = eig.eigenvalues
    top = vals[-1] if vals.size else 0.0
    if require_psd and vals.size and vals[0] < -atol:
        raise np.linalg.LinAlgError(
            f"matrix is not positive semidefinite (min eigenvalue {vals[0]:.3e})"
        )
    out = np.zeros_like(vals)
    if top > 0:
        mask = vals > cutoff * top
        out[mask] = fn(vals[mask])
    return (eig.eigenvectors * out) @ eig.eigenvectors.conj().T


def hermitian_exp(m: np.ndarray, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix via its eigendecomposition."""
    eig = hermitian_eigen(m, atol)
    return (eig.eigenvectors * np.exp(eig.eigenvalues)) @ eig.eigenvectors.conj().T


def hermitian_log(
    m: np.ndarray, cutoff: float = DEFAULT_CUTOFF, atol: float = DEFAULT_ATOL
) -> np.ndarray:
    """Matrix logarithm on the support of a Hermitian PSD matrix.

    Eigenvalues at or below cutoff times the largest eigenvalue are treated as
    zero and contribute zero to the result (the 0 log 0 = 0 convention).
    """
    return _spectral_apply(m, np.log, cutoff, atol, require_psd=True)


def support_projection(
    m: np.ndarray, cutoff: float = DEFAULT_CUTOFF, atol: float = DEFAULT_ATOL
) -> np.ndarray:
    """Orthogonal projection onto eigenspaces above the relative cutoff."""
    return _spectral_apply(m, np.ones_like, cutoff, atol, require_psd=True)


def hermitian_pinv(
    m: np.ndarray, cutoff: float = DEFAULT_CUTOFF, atol: float = DEFAULT_ATOL
) -> np.ndarray:
    """Pseudo-inverse of a Hermitian PSD matrix with a relative spectral cutoff."""
    return _spectral_apply(m, lambda v: 1.0 / v, cutoff, atol, require_psd=True)


def absolutely_continuous(
    s1: State, s2: State, cutoff: float = DEFAULT_CUTOFF
) -> bool:
    """Whether the support of s1 is contained in the support of s2, blockwise.

    Tested as norm((1 - P2) P1 (1 - P2)) <= cutoff per block, with the support
    projections built at the same relative spectral cutoff.
    """
    if s1.algebra != s2.algebra:
        raise AlgebraMismatchError("states live on different algebras")
    for d1, d2 in zip(s1.densities, s2.densities):
        p1 = support_projection(d1, cutoff)
        p2 = support_projection(d2, cutoff)
        comp = np.eye(d2.shape[0]) - p2
        if np.linalg.norm(comp @ p1 @ comp, 2) > cutoff:
            return False
    return True


@dataclass(frozen=True)
class Violation:
    kind: str
    where: str
    residual: float

    def __str__(self):
        return f"{self.kind} at {self.where}: residual {self.residual:.3e}"


@dataclass(frozen=True)
class ValidationReport:
    """Numeric violations found by a validity check; empty means valid."""

    violations: tuple[Violation, ...] = ()
    faithful: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            if self.faithful is None:
                return "valid"
            return "valid (faithful)" if self.faithful else "valid (not faithful)"
        return "; ".join(str(v) for v in self.violations)


def validate_state(s: State, atol: float = DEFAULT_ATOL) -> ValidationReport:
    """Check Hermiticity, positivity, and unit total trace of a state.

    Also reports faithfulness: every eigenvalue of every block above atol.
    """
    violations = []
    total = 0.0
    min_eig = np.inf
    for x, d in enumerate(s.densities):
        herm = np.linalg.norm(d - d.conj().T, 2)
        if herm > atol:
            violations.append(Violation("hermiticity", f"block {x}", float(herm)))
        vals = np.linalg.eigvalsh((d + d.conj().T) / 2)
        if vals.size:
            min_eig = min(min_eig, float(vals[0]))
            if vals[0] < -atol:
                violations.append(
                    Violation("positivity", f"block {x}", float(-vals[0]))
                )
        total += float(np.trace(d).real)
    if abs(total - 1.0) > atol:
        violations.append(Violation("normalization", "total trace", abs(total - 1.0)))
    return ValidationReport(tuple(violations), faithful=bool(min_eig > atol))


def direct_sum_algebras(a: AlgebraSpec, b: AlgebraSpec) -> AlgebraSpec:
    return AlgebraSpec(a.block_dims + b.block_dims)


def element_from_blocks(algebra: AlgebraSpec, blocks: Sequence[np.ndarray]) -> AlgebraElement:
    return AlgebraElement(algebra, tuple(blocks))
