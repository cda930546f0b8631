"""End-to-end pipeline: Laurent system in, solution set out.

Stages: homogenize into the Cox ring, pick (or accept) a degree pair,
verify it by corank comparison, build the multiplication family on the
cokernel basis, cluster the joint Schur form, and recover coordinates
per cluster. Every stage failure carries its stage tag in the raised
error; a single seed drives all randomized choices.
"""

import time

import numpy as np

from .cox import HomogeneousSystem, homogenize
from .eigensolver import assemble_res, cokernel, multiplication_family, schur_cluster
from .errors import PairSelectionError, RecoveryError
from .recovery import EigenvalueTable, recover_boundary_point, recover_torus_point
from .regularity import RegularityPair, improved_pair, user_pair, verify_pair

__all__ = ["SolutionSet", "solve"]


class SolutionSet:
    """All recovered solutions plus provenance for reproducibility.

    Attributes:
        solutions: list of Solution, in Schur cluster order.
        delta: number of distinct points.
        delta_plus: total multiplicity (sum of cluster sizes).
        pair: the RegularityPair used.
        seed: RNG seed for the run.
        tolerances: dict of every tolerance the run used.
        timings: stage name -> wall milliseconds.
        system: the HomogeneousSystem that was solved.
        diagnostics: numeric traces for export (singular values of the
            restriction map, per-member block leakage norms).
    """

    __slots__ = ("solutions", "delta", "delta_plus", "pair", "seed",
                 "tolerances", "timings", "system", "diagnostics")

    def __init__(self, solutions, delta_plus, pair, seed, tolerances, timings,
                 system, diagnostics=None):
        self.solutions = list(solutions)
        self.delta = len(self.solutions)
        self.delta_plus = int(delta_plus)
        self.pair = pair
        self.seed = seed
        self.tolerances = dict(tolerances)
        self.timings = dict(timings)
        self.system = system
        self.diagnostics = dict(diagnostics or
                                {"res_singular_values": (), "block_leakage": ()})

    def __len__(self):
        return len(self.solutions)

    def on_torus(self):
        return [s for s in self.solutions if s.on_torus]

    def on_boundary(self):
        return [s for s in self.solutions if not s.on_torus]

    def max_residual(self):
        worst = 0.0
        for s in self.solutions:
            if s.residuals:
                worst = max(worst, max(s.residuals))
        return worst

    def __repr__(self):
        return (f"SolutionSet(delta={self.delta}, delta_plus={self.delta_plus}, "
                f"torus={len(self.on_torus())}, boundary={len(self.on_boundary())})")


def solve(system, rays=None, pair=None, seed=0, tol_rank=1e-8, gap_ratio=1e3,
          cond_max=1e8, retries_max=3, cluster_gap=1e-4, leak_tol=1e-6,
          zero_tol=1e-6, ratio_tol=1e-6, verify=True, basis_select="qr"):
    """Solve a sparse (Laurent) polynomial system with finite solution set.

    Args:
        system: HomogeneousSystem, or a list of Laurent equations
            (each a list of (exponent tuple, coefficient) terms).
        rays: optional explicit ray order when `system` is Laurent input.
        pair: None for the automatic improved pair, an (alpha, alpha0)
            tuple of divisor vectors, or a RegularityPair.
        seed: drives the random multiplier h0 and the Schur shuffle.
        tol_rank, gap_ratio: singular value cutoff and required gap.
        cond_max, retries_max: basis conditioning guard for h0 retries.
        cluster_gap, leak_tol: eigenvalue clustering controls.
        zero_tol, ratio_tol: recovery controls.
        verify: compare coranks at alpha and alpha + alpha0 before
            committing to the pair (recommended; small extra cost).
        basis_select: "qr" for pivoted monomial basis, "svd" for an
            orthonormal projector basis.

    Returns:
        SolutionSet. Sum of multiplicities equals the corank delta+.

    Raises:
        InputError, PairSelectionError, RankAmbiguousError,
        ClusteringError, RecoveryError: tagged per stage.
    """
    tolerances = {
        "tol_rank": tol_rank, "gap_ratio": gap_ratio, "cond_max": cond_max,
        "cluster_gap": cluster_gap, "leak_tol": leak_tol,
        "zero_tol": zero_tol, "ratio_tol": ratio_tol,
    }
    timings = {}
    clock = time.perf_counter

    t0 = clock()
    if not isinstance(system, HomogeneousSystem):
        system = homogenize(system, rays=rays)
    timings["homogenize_ms"] = 1e3 * (clock() - t0)

    t0 = clock()
    if pair is None:
        pair = improved_pair(system)
    elif not isinstance(pair, RegularityPair):
        alpha, alpha0 = pair
        pair = user_pair(system, alpha, alpha0)
    timings["pair_ms"] = 1e3 * (clock() - t0)

    t0 = clock()
    res = assemble_res(system, pair.top, tol_rank=tol_rank)
    cok = cokernel(res, gap_ratio=gap_ratio)
    if verify:
        lo = cokernel(
            assemble_res(system, pair.alpha, tol_rank=tol_rank, allow_empty=True),
            gap_ratio=gap_ratio,
        )
        pair.coranks = (lo.delta_plus, cok.delta_plus)
        pair.verified = lo.delta_plus == cok.delta_plus
        pair.delta_plus = lo.delta_plus if pair.verified else None
        if not pair.verified:
            raise PairSelectionError(
                f"pair failed corank verification: {lo.delta_plus} at alpha vs "
                f"{cok.delta_plus} at alpha + alpha0"
            )
    timings["cokernel_ms"] = 1e3 * (clock() - t0)

    diagnostics = {
        "res_singular_values": tuple(float(x) for x in cok.singular_values),
        "block_leakage": (),
    }
    if cok.delta_plus == 0:
        return SolutionSet([], 0, pair, seed, tolerances, timings, system,
                           diagnostics)

    t0 = clock()
    family = multiplication_family(
        cok, system, pair, seed=seed, cond_max=cond_max,
        retries_max=retries_max, basis_select=basis_select,
    )
    timings["family_ms"] = 1e3 * (clock() - t0)

    t0 = clock()
    clustering = schur_cluster(
        family, seed=seed, cluster_gap=cluster_gap, leak_tol=leak_tol
    )
    timings["schur_ms"] = 1e3 * (clock() - t0)
    diagnostics["block_leakage"] = clustering.leakage_by_member

    t0 = clock()
    solutions = []
    for i in range(len(clustering.block_sizes)):
        table = EigenvalueTable.from_clustering(family, clustering, i)
        try:
            sol = recover_torus_point(system.fan, table, ratio_tol=ratio_tol)
        except RecoveryError as exc:
            # spanning failures indict alpha0 itself, not this cluster
            if "affinely span" in str(exc):
                raise
            sol = recover_boundary_point(
                system.fan, table, zero_tol=zero_tol, ratio_tol=ratio_tol
            )
        sol.residuals = tuple(system.residuals(sol.z))
        solutions.append(sol)
    timings["recover_ms"] = 1e3 * (clock() - t0)

    return SolutionSet(solutions, cok.delta_plus, pair, seed, tolerances,
                       timings, system, diagnostics)
