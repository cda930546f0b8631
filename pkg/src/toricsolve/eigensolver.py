"""Numerical core: Res matrix, cokernel, multiplication maps, Schur clusters.

The solution count and coordinates come out of linear algebra on one big
structured matrix.  Res stacks the multiplication maps

    (q_1, ..., q_s) -> q_1 f_1 + ... + q_s f_s,

written on the monomial bases of the graded pieces S_{beta - alpha_i} and
S_beta.  Its cokernel N has delta_plus rows; restricting the monomial
multiplication maps N_b to a well-conditioned column subset W gives
commuting matrices M_{x^b / h_0} whose joint eigenvalues evaluate the
degree-zero functions x^b / h_0 at the solutions.  A reordered Schur
factorization of a random member groups repeated eigenvalues into blocks
whose traces are stable even for multiple points.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .cox import graded_basis
from .errors import (
    BasepointError,
    ClusteringError,
    InputError,
    RankAmbiguousError,
)
from .toric import DivisorClass

__all__ = [
    "ResMatrix",
    "CokernelMap",
    "MultiplicationFamily",
    "SchurClustering",
    "assemble_res",
    "cokernel",
    "multiplication_family",
    "schur_cluster",
]


def _as_divisor(fan, deg):
    if isinstance(deg, DivisorClass):
        if deg.fan is not fan:
            raise InputError("divisor class belongs to a different fan")
        return deg
    return fan.divisor(deg)


class ResMatrix:
    """The stacked multiplication-by-f_i map at one degree.

    Attributes:
        rows: GradedBasis of S_beta; row order is its monomial order.
        col_blocks: (equation index, GradedBasis of S_{beta - alpha_i})
            pairs, one per equation, in equation order.
        matrix: dense complex matrix, rows x total block width.
        tol_rank: relative singular value threshold used downstream.
    """

    __slots__ = ("rows", "col_blocks", "matrix", "tol_rank")

    def __init__(self, rows, col_blocks, matrix, tol_rank):
        self.rows = rows
        self.col_blocks = col_blocks
        self.matrix = matrix
        self.tol_rank = tol_rank

    @property
    def shape(self):
        return self.matrix.shape

    def block_widths(self):
        return [len(b) for _, b in self.col_blocks]

    def __repr__(self):
        return f"ResMatrix(shape={self.matrix.shape}, blocks={self.block_widths()})"


def assemble_res(system, beta, tol_rank=1e-8, allow_empty=False):
    """Assemble Res at degree beta for a homogeneous system.

    Entry placement is exact index arithmetic: the column of monomial x^c
    in block i scatters the coefficients of f_i to the rows x^{b + c}.

    Args:
        system: HomogeneousSystem.
        beta: DivisorClass or representative vector for the row degree.
        tol_rank: stored on the result for downstream rank decisions.
        allow_empty: accept a Res with zero columns instead of raising.
            Pair verification probes low degrees where that is legitimate
            (the cokernel is then all of S_beta).

    Returns:
        ResMatrix with lexicographic row and column order.

    Raises:
        InputError: every column block is empty (degree too low) and
            allow_empty is False.
    """
    fan = system.fan
    beta = _as_divisor(fan, beta)
    rows = graded_basis(fan, beta)

    col_blocks = []
    for i, div in enumerate(system.degrees):
        diff = tuple(b - a for b, a in zip(beta.a, div.a))
        col_blocks.append((i, graded_basis(fan, diff)))
    width = sum(len(b) for _, b in col_blocks)
    if len(system) > 0 and width == 0 and not allow_empty:
        raise InputError("degree too low: every column block of Res is empty")

    matrix = np.zeros((len(rows), width), dtype=complex)
    col = 0
    for i, block in col_blocks:
        fterms = system.polys[i].terms()
        for cexp in block.monomials:
            for bexp, coeff in fterms:
                rexp = tuple(x + y for x, y in zip(bexp, cexp))
                r = rows.position(rexp)
                # b + c always lands in P_beta: the section polytopes add
                matrix[r, col] += coeff
            col += 1
    return ResMatrix(rows, col_blocks, matrix, tol_rank)


class CokernelMap:
    """Orthonormal cokernel of a ResMatrix.

    Attributes:
        N: complex (delta_plus x dim S_beta) with orthonormal rows and
            ker N = im Res up to tol_rank.
        delta_plus: corank of Res against its row dimension.
        singular_values: full singular value list, for diagnostics.
        res: the ResMatrix this was computed from.
    """

    __slots__ = ("N", "delta_plus", "singular_values", "res")

    def __init__(self, N, delta_plus, singular_values, res):
        self.N = N
        self.delta_plus = delta_plus
        self.singular_values = singular_values
        self.res = res

    def __repr__(self):
        return f"CokernelMap(delta_plus={self.delta_plus})"


def cokernel(res, tol_rank=None, gap_ratio=1e3):
    """Compute the cokernel of Res by SVD with a guarded rank decision.

    The rank is the number of singular values above tol_rank * sigma_1 and
    the corank is counted against the row dimension, so a matrix with few
    columns exposes its structural cokernel too.

    Raises:
        RankAmbiguousError: the singular values straddling the cut differ
            by less than gap_ratio, so the corank is not trustworthy.
    """
    tol = res.tol_rank if tol_rank is None else tol_rank
    A = res.matrix
    nrows = A.shape[0]
    if A.shape[1] == 0:
        return CokernelMap(np.eye(nrows, dtype=complex), nrows,
                           np.zeros(0), res)
    full = A.shape[0] > A.shape[1]
    U, s, _ = np.linalg.svd(A, full_matrices=full)
    rank = 0 if s[0] == 0.0 else int(np.sum(s > tol * s[0]))
    if 0 < rank < len(s):
        ratio = np.inf if s[rank] == 0.0 else s[rank - 1] / s[rank]
        if ratio < gap_ratio:
            raise RankAmbiguousError(
                f"ambiguous rank: singular values {s[rank - 1]:.3e} and "
                f"{s[rank]:.3e} straddle the corank cut with ratio "
                f"{ratio:.1e} < {gap_ratio:.0e}"
            )
    delta_plus = nrows - rank
    N = U[:, rank:].conj().T
    return CokernelMap(N, delta_plus, s, res)


class MultiplicationFamily:
    """Commuting multiplication matrices M_{x^b / h_0} for b in S_alpha0.

    Attributes:
        matrices: {exponent tuple of x^b: delta_plus x delta_plus matrix},
            in the monomial order of S_alpha0.
        basis_columns: indices into the S_alpha basis selected by pivoted
            QR, or None when the SVD subspace selector was used.
        Mh0_inv_factor: LU factorization of the restricted N_{h_0}.
        h0_coeffs: coefficients of the random h_0 over S_alpha0.
        alpha_basis / alpha0_basis: the GradedBasis pair used.
        delta_plus: matrix dimension.
        cond: condition number of the restricted N_{h_0}.
    """

    __slots__ = ("matrices", "basis_columns", "Mh0_inv_factor", "h0_coeffs",
                 "alpha_basis", "alpha0_basis", "delta_plus", "cond")

    def __init__(self, matrices, basis_columns, Mh0_inv_factor, h0_coeffs,
                 alpha_basis, alpha0_basis, delta_plus, cond):
        self.matrices = matrices
        self.basis_columns = basis_columns
        self.Mh0_inv_factor = Mh0_inv_factor
        self.h0_coeffs = h0_coeffs
        self.alpha_basis = alpha_basis
        self.alpha0_basis = alpha0_basis
        self.delta_plus = delta_plus
        self.cond = cond

    @property
    def monomials(self):
        return self.alpha0_basis.monomials

    def combination(self, coeffs):
        """Sum of coeffs[j] * M_{b_j / h_0} over the S_alpha0 monomials."""
        out = np.zeros((self.delta_plus, self.delta_plus), dtype=complex)
        for c, b in zip(coeffs, self.monomials):
            out += c * self.matrices[b]
        return out

    def __repr__(self):
        return (f"MultiplicationFamily({len(self.matrices)} matrices, "
                f"delta_plus={self.delta_plus})")


def multiplication_family(cok, system, pair, seed=0, cond_max=1e8,
                          retries_max=3, basis_select="qr"):
    """Build the multiplication matrices from a cokernel at alpha + alpha0.

    The monomial maps N_b: S_alpha -> C^delta are exact column gathers of
    N (exponent b + a indexes a monomial of S_{alpha+alpha0}); h_0 is a
    random complex Gaussian combination over S_alpha0, and the invertible
    restriction is chosen by column-pivoted QR on N_{h_0} (or by its top
    right-singular subspace with basis_select="svd").

    Args:
        cok: CokernelMap computed at degree alpha + alpha0.
        system: the HomogeneousSystem.
        pair: (alpha, alpha0) as DivisorClass or representative vectors,
            or any object with .alpha / .alpha0 attributes.
        seed: seeds the h_0 draw; retries continue the same stream.
        cond_max: condition limit on the restricted N_{h_0}.
        retries_max: extra h_0 draws allowed before giving up.
        basis_select: "qr" for a monomial column subset, "svd" for an
            orthonormal subspace.

    Raises:
        BasepointError: every h_0 draw was ill-conditioned, which is the
            symptom of alpha0 having basepoints on the solution set.
    """
    fan = system.fan
    if hasattr(pair, "alpha"):
        alpha, alpha0 = pair.alpha, pair.alpha0
    else:
        alpha, alpha0 = pair
    alpha = _as_divisor(fan, alpha)
    alpha0 = _as_divisor(fan, alpha0)
    rows = cok.res.rows
    expected = tuple(x + y for x, y in zip(alpha.a, alpha0.a))
    if tuple(rows.degree.a) != expected:
        raise InputError(
            f"cokernel degree {tuple(rows.degree.a)} does not match "
            f"alpha + alpha0 = {expected}"
        )
    if basis_select not in ("qr", "svd"):
        raise InputError(f"unknown basis selector {basis_select!r}")

    s_alpha = graded_basis(fan, alpha)
    s_alpha0 = graded_basis(fan, alpha0)
    delta = cok.delta_plus
    if len(s_alpha0) == 0:
        raise InputError("S_alpha0 is empty: nothing to multiply by")
    if len(s_alpha) < delta:
        raise InputError(
            f"dim S_alpha = {len(s_alpha)} < delta_plus = {delta}; "
            "the pair cannot carry an invertible restriction"
        )

    nb = {}
    for bexp in s_alpha0.monomials:
        idx = [rows.position(tuple(x + y for x, y in zip(bexp, aexp)))
               for aexp in s_alpha.monomials]
        nb[bexp] = cok.N[:, idx]
    stack = np.stack([nb[b] for b in s_alpha0.monomials])

    if delta == 0:
        empty = {b: np.zeros((0, 0), dtype=complex) for b in s_alpha0.monomials}
        coeffs = np.zeros(len(s_alpha0), dtype=complex)
        return MultiplicationFamily(empty, (), None, coeffs,
                                    s_alpha, s_alpha0, 0, 0.0)

    # stage-specific substream: the same user seed must not reproduce the
    # h_0 draw in other stages (a Schur driver equal to h_0 separates nothing)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    chosen = None
    for _ in range(retries_max + 1):
        coeffs = (rng.standard_normal(len(s_alpha0))
                  + 1j * rng.standard_normal(len(s_alpha0)))
        n_h0 = np.tensordot(coeffs, stack, axes=(0, 0))
        if basis_select == "qr":
            _, _, piv = scipy.linalg.qr(n_h0, pivoting=True, mode="economic")
            columns = tuple(sorted(int(p) for p in piv[:delta]))
            sub = n_h0[:, columns]
            project = None
        else:
            _, _, vh = np.linalg.svd(n_h0, full_matrices=False)
            project = vh[:delta].conj().T
            columns = None
            sub = n_h0 @ project
        cond = np.linalg.cond(sub)
        if np.isfinite(cond) and cond <= cond_max:
            chosen = (coeffs, columns, project, sub, cond)
            break
    if chosen is None:
        raise BasepointError(
            f"no well-conditioned multiplier after {retries_max + 1} draws; "
            "alpha0 may have basepoints on the solution set"
        )
    coeffs, columns, project, sub, cond = chosen

    factor = scipy.linalg.lu_factor(sub)
    matrices = {}
    for bexp in s_alpha0.monomials:
        rhs = nb[bexp][:, columns] if columns is not None else nb[bexp] @ project
        matrices[bexp] = scipy.linalg.lu_solve(factor, rhs)
    return MultiplicationFamily(matrices, columns, factor, coeffs,
                                s_alpha, s_alpha0, delta, float(cond))


class SchurClustering:
    """Joint block triangularization of a multiplication family.

    Attributes:
        U: unitary; U^H M U is block upper triangular for every member.
        block_sizes: cluster multiplicities mu_i, summing to delta_plus.
        tables: per cluster, {exponent of x^b: Trace(Delta_i^b) / mu_i}.
        leakage: largest relative below-block-diagonal norm over members.
        leakage_by_member: that norm for every family member, in
            family.monomials order (diagnostics export).
        cluster_gap: the threshold that produced the clusters.
        driver_coeffs: coefficients of the random Schur driver.
    """

    __slots__ = ("U", "block_sizes", "tables", "leakage", "cluster_gap",
                 "driver_coeffs", "leakage_by_member")

    def __init__(self, U, block_sizes, tables, leakage, cluster_gap,
                 driver_coeffs, leakage_by_member=()):
        self.U = U
        self.block_sizes = block_sizes
        self.tables = tables
        self.leakage = leakage
        self.cluster_gap = cluster_gap
        self.driver_coeffs = driver_coeffs
        self.leakage_by_member = tuple(leakage_by_member)

    @property
    def blocks(self):
        return list(zip(self.block_sizes, self.tables))

    def __len__(self):
        return len(self.block_sizes)

    def __repr__(self):
        return (f"SchurClustering(sizes={list(self.block_sizes)}, "
                f"leakage={self.leakage:.2e})")


def _cluster_labels(values, gap):
    """Union-find grouping with |vi - vj| <= gap * (1 + (|vi|+|vj|)/2)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            tol = gap * (1.0 + (abs(values[i]) + abs(values[j])) / 2.0)
            if abs(values[i] - values[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    labels = [find(i) for i in range(n)]
    order = {}
    for lab in labels:
        if lab not in order:
            order[lab] = len(order)
    return [order[lab] for lab in labels]


def _swap_adjacent(T, Z, i):
    """Exchange the Schur eigenvalues at positions i, i+1 in place.

    Uses the unitary whose first column is the eigenvector of the 2x2
    block for the lower eigenvalue; falls back to a plain transposition
    when the block is (numerically) a repeated scalar.
    """
    t11 = T[i, i]
    t12 = T[i, i + 1]
    t22 = T[i + 1, i + 1]
    v0, v1 = t12, t22 - t11
    nv = np.hypot(abs(v0), abs(v1))
    scale = abs(t11) + abs(t12) + abs(t22)
    if nv <= 1e-300 + 1e-15 * scale:
        G = np.array([[0, 1], [1, 0]], dtype=complex)
    else:
        a, b = v0 / nv, v1 / nv
        G = np.array([[a, -np.conj(b)], [b, np.conj(a)]])
    T[:, i:i + 2] = T[:, i:i + 2] @ G
    T[i:i + 2, :] = G.conj().T @ T[i:i + 2, :]
    T[i + 1, i] = 0.0
    Z[:, i:i + 2] = Z[:, i:i + 2] @ G


def _reorder(T, Z, labels):
    """Bubble equal-label Schur values into contiguous runs, in place.

    Cluster order is first appearance along the diagonal; within a
    cluster the original relative order is preserved.
    """
    labels = list(labels)
    seen = []
    for lab in labels:
        if lab not in seen:
            seen.append(lab)
    pos = 0
    for lab in seen:
        count = labels.count(lab)
        for _ in range(count):
            q = pos
            while labels[q] != lab:
                q += 1
            for j in range(q, pos, -1):
                _swap_adjacent(T, Z, j - 1)
                labels[j - 1], labels[j] = labels[j], labels[j - 1]
            pos += 1
    return T, Z, labels


_GAP_CEILING = 0.1


def schur_cluster(family, seed=0, cluster_gap=1e-4, leak_tol=1e-6):
    """Cluster the joint spectrum of a multiplication family.

    Takes the complex Schur form of a random member M_{h/h_0}, groups
    nearby diagonal values, reorders them into contiguous blocks, and
    reads every member through the same unitary.

    A multiple eigenvalue with a nontrivial Jordan block scatters its
    computed copies over a radius like eps**(1/mu), far wider than any
    fixed grouping threshold.  When the blocks leak, the gap is widened
    tenfold and the diagonal is regrouped, up to a relative ceiling of
    0.1; distinct solutions of a random combination sit O(1) apart, so
    the widening merges scattered copies without fusing true clusters.

    Raises:
        ClusteringError: some member leaks below the block diagonal by
            more than leak_tol (relative) at every attempted gap,
            meaning the clusters do not bound joint invariant subspaces.
    """
    mons = family.monomials
    delta = family.delta_plus
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2,)))
    driver_coeffs = (rng.standard_normal(len(mons))
                     + 1j * rng.standard_normal(len(mons)))
    if delta == 0:
        return SchurClustering(np.zeros((0, 0), dtype=complex), (), (),
                               0.0, cluster_gap, driver_coeffs)

    M = family.combination(driver_coeffs)
    T0, Z0 = scipy.linalg.schur(M, output="complex")
    eigs = np.diag(T0).copy()

    gap = cluster_gap
    leakage = 0.0
    while True:
        T, Z = T0.copy(), Z0.copy()
        labels = _cluster_labels(eigs, gap)
        T, Z, labels = _reorder(T, Z, labels)

        sizes = []
        start = 0
        for p in range(1, delta + 1):
            if p == delta or labels[p] != labels[start]:
                sizes.append(p - start)
                start = p
        slices = []
        off = 0
        for mu in sizes:
            slices.append(slice(off, off + mu))
            off += mu

        tables = [dict() for _ in sizes]
        by_member = []
        leakage = 0.0
        for bexp in mons:
            Mb = family.matrices[bexp]
            Tb = Z.conj().T @ Mb @ Z
            low = 0.0
            for jb, sj in enumerate(slices):
                for ib in range(jb):
                    low += float(np.sum(np.abs(Tb[sj, slices[ib]]) ** 2))
            norm = float(np.linalg.norm(Mb))
            by_member.append(float(np.sqrt(low) / max(1.0, norm)))
            leakage = max(leakage, by_member[-1])
            for ci, si in enumerate(slices):
                mu = sizes[ci]
                tables[ci][bexp] = complex(np.trace(Tb[si, si]) / mu)
        if leakage <= leak_tol:
            return SchurClustering(Z, tuple(sizes), tuple(tables),
                                   float(leakage), gap, driver_coeffs,
                                   by_member)
        if gap >= _GAP_CEILING:
            raise ClusteringError(
                f"clustering failed (leakage {leakage:.2e} > "
                f"{leak_tol:.0e}) at every gap up to {gap:.0e}; "
                "loosen leak_tol or reseed"
            )
        gap = min(gap * 10.0, _GAP_CEILING)
