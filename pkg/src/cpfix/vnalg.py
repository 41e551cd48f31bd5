"""Finite-dimensional von Neumann algebras M = ⊕_i M_{n_i}.

Elements are lists of complex blocks.  The module provides the
block-diagonal embedding into one big matrix, projections and their
spectral rounding, corner algebras N = pMp with explicit isometries,
the compression E(x) = pxp, and matrix amplifications M_k(M).

Coordinates: an element is identified with the concatenation of its
row-major flattened blocks, a vector in C^D with D = sum(n_i^2).  The
trace inner product <x, y> = sum_i tr(x_i* y_i) then coincides with the
standard Hermitian inner product of coordinate vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotProjection, ShapeMismatch
from .matcore import as_matrix, op_norm

PROJ_TOL = 1e-9
SNAP_TOL = 1e-6


@dataclass(frozen=True)
class BlockStructure:
    """Block dimensions (n_1, ..., n_k) of a multi-matrix algebra."""

    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ShapeMismatch(f"invalid block dims {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def coord_dim(self) -> int:
        """Dimension of the coordinate space, sum of n_i^2."""
        return sum(n * n for n in self.block_dims)

    @property
    def space_dim(self) -> int:
        """Dimension of the underlying Hilbert space, sum of n_i."""
        return sum(self.block_dims)

    def coord_slices(self):
        out, off = [], 0
        for n in self.block_dims:
            out.append(slice(off, off + n * n))
            off += n * n
        return out

    def space_slices(self):
        out, off = [], 0
        for n in self.block_dims:
            out.append(slice(off, off + n))
            off += n
        return out


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of ⊕_i M_{n_i}: one square complex block per summand."""

    structure: BlockStructure
    blocks: tuple

    def __post_init__(self):
        dims = self.structure.block_dims
        if len(self.blocks) != len(dims):
            raise ShapeMismatch(f"expected {len(dims)} blocks, got {len(self.blocks)}")
        fixed = []
        for n, b in zip(dims, self.blocks):
            # complex arrays produced by our own arithmetic skip re-validation
            if not (isinstance(b, np.ndarray) and b.dtype == np.complex128):
                b = as_matrix(b, "block")
            if b.shape != (n, n):
                raise ShapeMismatch(f"block is {b.shape}, expected ({n}, {n})")
            fixed.append(b)
        object.__setattr__(self, "blocks", tuple(fixed))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.structure, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.structure, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, c) -> "AlgebraElement":
        return AlgebraElement(self.structure, tuple(c * b for b in self.blocks))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return self * (-1.0)

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        """Blockwise product; the algebra multiplication."""
        self._same(other)
        return AlgebraElement(self.structure, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.structure, tuple(b.conj().T for b in self.blocks))

    def norm(self) -> float:
        """Operator norm of the block-diagonal embedding: max block norm."""
        return max(op_norm(b) for b in self.blocks)

    def coords(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def distance(self, other: "AlgebraElement") -> float:
        return (self - other).norm()

    def _same(self, other: "AlgebraElement"):
        if self.structure != other.structure:
            raise ShapeMismatch("elements live on different block structures")


def identity_element(structure: BlockStructure) -> AlgebraElement:
    return AlgebraElement(structure, tuple(np.eye(n, dtype=complex) for n in structure.block_dims))


def zero_element(structure: BlockStructure) -> AlgebraElement:
    return AlgebraElement(structure, tuple(np.zeros((n, n), dtype=complex) for n in structure.block_dims))


def element_from_coords(structure: BlockStructure, v: np.ndarray) -> AlgebraElement:
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != structure.coord_dim:
        raise ShapeMismatch(f"coordinate vector has length {v.size}, expected {structure.coord_dim}")
    blocks = [v[s].reshape(n, n) for n, s in zip(structure.block_dims, structure.coord_slices())]
    return AlgebraElement(structure, tuple(blocks))


def element_from_blocks(structure: BlockStructure, blocks) -> AlgebraElement:
    return AlgebraElement(structure, tuple(blocks))


def random_element(structure: BlockStructure, rng: np.random.Generator, hermitian: bool = False) -> AlgebraElement:
    from .matcore import random_complex, random_hermitian

    blocks = []
    for n in structure.block_dims:
        blocks.append(random_hermitian(rng, n) if hermitian else random_complex(rng, n, n))
    return AlgebraElement(structure, tuple(blocks))


def adjoint_coords(structure: BlockStructure, v: np.ndarray) -> np.ndarray:
    """Coordinates of x* given coordinates of x."""
    return element_from_coords(structure, v).adjoint().coords()


def embed(x: AlgebraElement) -> np.ndarray:
    """Block-diagonal matrix of size space_dim x space_dim."""
    t = x.structure.space_dim
    out = np.zeros((t, t), dtype=complex)
    for b, s in zip(x.blocks, x.structure.space_slices()):
        out[s, s] = b
    return out


def validate_projection(p: AlgebraElement, tol: float = PROJ_TOL, snap_tol: float = SNAP_TOL) -> AlgebraElement:
    """Check p = p* = p^2 blockwise, spectrally rounding first if needed.

    Eigenvalues within snap_tol of {0, 1} are snapped; anything further
    away raises NotProjection.  Returns the (possibly rounded) element.
    """
    blocks = []
    for b in p.blocks:
        herm = op_norm(b - b.conj().T)
        idem = op_norm(b @ b - b)
        if herm <= tol and idem <= tol:
            blocks.append(b)
            continue
        if herm > snap_tol:
            raise NotProjection(f"block is not self-adjoint (defect {herm:g})")
        w, u = np.linalg.eigh(0.5 * (b + b.conj().T))
        snapped = np.where(np.abs(w) <= snap_tol, 0.0, np.where(np.abs(w - 1.0) <= snap_tol, 1.0, np.nan))
        if np.any(np.isnan(snapped)):
            bad = w[np.isnan(snapped)]
            raise NotProjection(f"eigenvalues {bad} not within {snap_tol:g} of {{0, 1}}")
        blocks.append((u * snapped) @ u.conj().T)
    return AlgebraElement(p.structure, tuple(blocks))


@dataclass(frozen=True, eq=False)
class CornerEmbedding:
    """The corner N = pMp with explicit isometries u_i: C^{r_i} -> C^{n_i}.

    Blocks where p has rank zero are dropped from the corner; `kept`
    records which ambient blocks survive.
    """

    ambient: BlockStructure
    corner: BlockStructure
    projection: AlgebraElement
    isometries: tuple
    kept: tuple

    @property
    def is_full(self) -> bool:
        return self.corner == self.ambient and all(
            np.allclose(u, np.eye(u.shape[0])) for u in self.isometries
        )


def _range_basis(b: np.ndarray, rank: int) -> np.ndarray:
    """Deterministic orthonormal basis of ran(b): Gram-Schmidt over columns."""
    n = b.shape[0]
    cols = []
    for j in range(n):
        v = b[:, j].copy()
        for q in cols:
            v -= q * (q.conj() @ v)
        for q in cols:
            v -= q * (q.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
        if len(cols) == rank:
            break
    if len(cols) != rank:
        raise NotProjection(f"rank {rank} projection block yielded only {len(cols)} directions")
    return np.column_stack(cols) if cols else np.zeros((n, 0), dtype=complex)


def corner(structure: BlockStructure, p: AlgebraElement) -> CornerEmbedding:
    """Build the corner embedding for a projection p."""
    p = validate_projection(p)
    dims, isoms, kept = [], [], []
    for i, (n, b) in enumerate(zip(structure.block_dims, p.blocks)):
        r = int(round(np.trace(b).real))
        if r == 0:
            continue
        u = _range_basis(b, r)
        if op_norm(u.conj().T @ u - np.eye(r)) > 1e-9 or op_norm(u @ u.conj().T - b) > 1e-9:
            raise NotProjection("projection block failed isometry reconstruction")
        dims.append(r)
        isoms.append(u)
        kept.append(i)
    if not dims:
        raise NotProjection("projection is zero; corner algebra is trivial")
    return CornerEmbedding(structure, BlockStructure(tuple(dims)), p, tuple(isoms), tuple(kept))


def compress(emb: CornerEmbedding, x: AlgebraElement) -> AlgebraElement:
    """E(x) = pxp read inside the corner: blocks u_i* x_i u_i."""
    if x.structure != emb.ambient:
        raise ShapeMismatch("element does not live on the ambient structure")
    blocks = [u.conj().T @ x.blocks[i] @ u for u, i in zip(emb.isometries, emb.kept)]
    return AlgebraElement(emb.corner, tuple(blocks))


def inject(emb: CornerEmbedding, y: AlgebraElement) -> AlgebraElement:
    """The corner element y regarded inside M: blocks u_i y u_i*."""
    if y.structure != emb.corner:
        raise ShapeMismatch("element does not live on the corner structure")
    blocks = [np.zeros((n, n), dtype=complex) for n in emb.ambient.block_dims]
    for u, i, b in zip(emb.isometries, emb.kept, y.blocks):
        blocks[i] = u @ b @ u.conj().T
    return AlgebraElement(emb.ambient, tuple(blocks))


def amplify(structure: BlockStructure, k: int) -> BlockStructure:
    """Block structure of M_k(M) = ⊕_i M_{k n_i}."""
    if k < 1:
        raise ShapeMismatch(f"amplification level must be >= 1, got {k}")
    return BlockStructure(tuple(k * n for n in structure.block_dims))


def amplify_element(grid) -> AlgebraElement:
    """Assemble a k x k array of elements of M into one element of M_k(M).

    grid[a][b] occupies the (a, b) cell of each amplified block.
    """
    k = len(grid)
    if any(len(row) != k for row in grid):
        raise ShapeMismatch("amplification grid must be square")
    st = grid[0][0].structure
    for row in grid:
        for x in row:
            if x.structure != st:
                raise ShapeMismatch("grid entries live on different structures")
    blocks = []
    for i in range(st.num_blocks):
        blocks.append(np.block([[grid[a][b].blocks[i] for b in range(k)] for a in range(k)]))
    return AlgebraElement(amplify(st, k), tuple(blocks))


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """np.kron without its shape-juggling overhead (square inputs)."""
    k, n = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(k * n, k * n)


def amplify_combination(coeffs, elements) -> AlgebraElement:
    """Sum of kron(C_j, x_j) in M_k(M) for k x k coefficient matrices C_j."""
    if len(coeffs) != len(elements) or not elements:
        raise ShapeMismatch("need matching nonempty coefficient and element lists")
    st = elements[0].structure
    k = np.asarray(coeffs[0]).shape[0]
    amp = amplify(st, k)
    blocks = [np.zeros((k * n, k * n), dtype=complex) for n in st.block_dims]
    for c, x in zip(coeffs, elements):
        c = np.asarray(c, dtype=complex)
        for i in range(st.num_blocks):
            blocks[i] += _kron(c, x.blocks[i])
    return AlgebraElement(amp, tuple(blocks))


def amplify_embedding(emb: CornerEmbedding, k: int) -> CornerEmbedding:
    """Corner embedding for the amplified projection on M_k(M)."""
    amb = amplify(emb.ambient, k)
    cor = amplify(emb.corner, k)
    eye = np.eye(k)
    isoms = tuple(np.kron(eye, u) for u in emb.isometries)
    pblocks = [np.zeros((k * n, k * n), dtype=complex) for n in emb.ambient.block_dims]
    for i, b in enumerate(emb.projection.blocks):
        pblocks[i] = np.kron(eye, b)
    p = AlgebraElement(amb, tuple(pblocks))
    return CornerEmbedding(amb, cor, p, isoms, emb.kept)
