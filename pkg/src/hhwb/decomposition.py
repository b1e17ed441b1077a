"""Partition combinatorics and the symmetric-power decomposition check.

The left side sums, over partitions λ of n, the S-invariants of the twisted
homology of the n-th tensor power with the block-cyclic twist σ_λ.  The right
side is the t-degree-n piece of the super-symmetric algebra on one copy of
the untwisted homology per t-power.  Both sides are compared degreewise with
truncation certificates tracked throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .dgcore import DgCategory, Permutation, identity_nat, permutation_functor
from .hochschild import (
    HomologySummary,
    StandardComplex,
    TwistSpec,
    build_complex,
    homology_action,
    induced_chain_map,
    total_homology,
)
from .kunneth import dims_convolve
from .qlinalg import (
    EXACT,
    RankMode,
    SparseMatrix,
    StructuralError,
    projector_invariant_dim,
)


@dataclass(frozen=True)
class Partition:
    """A partition of n, stored as a weakly increasing tuple of parts."""

    parts: tuple

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise StructuralError("parts must be positive")
        if list(self.parts) != sorted(self.parts):
            raise StructuralError("parts must be weakly increasing")

    @property
    def n(self) -> int:
        return sum(self.parts)

    def multiplicities(self) -> dict:
        out = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out

    def num_permutations(self) -> int:
        """Size of the conjugacy class with this cycle type in S_n."""
        denom = 1
        for size, mult in self.multiplicities().items():
            denom *= size ** mult * factorial(mult)
        return factorial(self.n) // denom

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions(n: int) -> list:
    """All partitions of n, deterministically ordered (lexicographic on the
    weakly increasing part tuples)."""
    if n < 0:
        raise StructuralError("n must be non-negative")

    def gen(total, minimum):
        if total == 0:
            yield ()
            return
        for first in range(minimum, total + 1):
            for rest in gen(total - first, first):
                yield (first,) + rest

    return [Partition(p) for p in sorted(gen(n, 1))]


def _blocks(lam: Partition):
    start = 1
    for p in lam.parts:
        yield list(range(start, start + p))
        start += p


def sigma_of(lam: Partition) -> Permutation:
    """The block-cyclic permutation with cycle lengths equal to the parts,
    acting on consecutive blocks of {1..n}."""
    cycles = [tuple(b) for b in _blocks(lam) if len(b) > 1]
    return Permutation.from_cycles(lam.n, cycles)


@dataclass
class CentralizerPresentation:
    n: int
    partition: Partition
    c_generators: list  # one block rotation per part of size >= 2
    s_generators: list  # adjacent swaps of equal-size blocks

    @property
    def s_order(self) -> int:
        out = 1
        for mult in self.partition.multiplicities().values():
            out *= factorial(mult)
        return out


def centralizer_gens(lam: Partition) -> CentralizerPresentation:
    n = lam.n
    blocks = list(_blocks(lam))
    sigma = sigma_of(lam)
    c_gens = [Permutation.from_cycles(n, [tuple(b)])
              for b in blocks if len(b) > 1]
    s_gens = []
    for i in range(len(blocks) - 1):
        a, b = blocks[i], blocks[i + 1]
        if len(a) == len(b):
            s_gens.append(Permutation.from_cycles(
                n, [(x, y) for x, y in zip(a, b)]))
    for g in c_gens + s_gens:
        if g.after(sigma) != sigma.after(g):
            raise StructuralError(f"generator {g} does not commute with sigma")
    return CentralizerPresentation(n, lam, c_gens, s_gens)


def group_closure(generators, n: int) -> list:
    """All products of the generators (plus the identity), by closure."""
    ident = Permutation.identity(n)
    seen = {ident.images: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in generators:
                h = s.after(g)
                if h.images not in seen:
                    seen[h.images] = h
                    nxt.append(h)
        frontier = nxt
    return sorted(seen.values(), key=lambda p: p.images)


# -- the two sides of the comparison ---------------------------------------


def _lambda_complex(c: DgCategory, n: int, lam: Partition, max_level: int,
                    normalized: bool = True) -> StandardComplex:
    return build_complex(c, TwistSpec.perm(n, sigma_of(lam)), max_level,
                         normalized=normalized)


def twisted_summand_dims(c: DgCategory, n: int, lam: Partition, degrees,
                         max_level: int, normalized: bool = True,
                         mode: RankMode = EXACT) -> HomologySummary:
    """Homology of the n-th tensor power twisted by σ_λ, before invariants."""
    if lam.n != n:
        raise StructuralError(f"{lam} is not a partition of {n}")
    sc = _lambda_complex(c, n, lam, max_level, normalized)
    return total_homology(sc, degrees, mode=mode)


def _action_matrices(base: DgCategory, sc: StandardComplex, h: Permutation,
                     degrees, mode: RankMode = EXACT) -> dict:
    phi = permutation_functor(base, len(h.images), h, power=sc.category)
    cm = induced_chain_map(phi, identity_nat(phi), sc, sc)
    return homology_action(cm, degrees, mode=mode)


def invariant_dims(c: DgCategory, n: int, lam: Partition, degrees,
                   max_level: int, normalized: bool = True,
                   mode: RankMode = EXACT, check_rotations: bool = True,
                   strict: bool = False, _sc: StandardComplex | None = None
                   ) -> dict:
    """Dimensions of the S-invariants of the λ-summand per degree.

    Rotations act trivially on homology, so only the block-permutation part
    S of the centralizer is averaged; strict=True additionally averages over
    the rotations as a redundancy check.
    """
    sc = _sc if _sc is not None else _lambda_complex(c, n, lam, max_level,
                                                     normalized)
    pres = centralizer_gens(lam)
    gens = list(pres.s_generators)
    if strict:
        gens += pres.c_generators
    group = group_closure(gens, n)
    if not strict and len(group) != pres.s_order:
        raise StructuralError("block-swap group has unexpected order")
    actions = [_action_matrices(c, sc, h, degrees, mode=mode) for h in group]
    out = {}
    for k in degrees:
        hdim = actions[0][k].rows
        acc = SparseMatrix.zeros(hdim, hdim)
        for act in actions:
            acc = acc.add(act[k])
        proj = acc.scale(Fraction(1, len(group)))
        out[k] = projector_invariant_dim(proj, mode=mode)
    if check_rotations:
        for rot in pres.c_generators:
            act = _action_matrices(c, sc, rot, degrees, mode=mode)
            for k in degrees:
                if act[k] != SparseMatrix.identity(act[k].rows):
                    raise StructuralError(
                        f"rotation {rot} acts non-trivially in degree {k}")
    return out


def super_sym_power_dims(h: dict, a: int) -> dict:
    """Graded dimensions of the a-th super-symmetric power of a graded space
    with dimensions h: symmetric on even degrees, exterior on odd ones."""
    if a < 0:
        raise StructuralError("power must be non-negative")
    # coefficient of x^a in prod_{k even} (1-q^k x)^{-h_k}
    #                     * prod_{k odd} (1+q^k x)^{h_k}
    per_x = [dict() for _ in range(a + 1)]
    per_x[0][0] = 1
    for k, dim in sorted(h.items()):
        if dim == 0:
            continue
        if dim < 0:
            raise StructuralError("dimensions must be non-negative")
        if k % 2 == 0:
            terms = [(t, comb(dim + t - 1, t)) for t in range(a + 1)]
        else:
            terms = [(t, comb(dim, t)) for t in range(min(a, dim) + 1)]
        new = [dict() for _ in range(a + 1)]
        for t, count in terms:
            if count == 0:
                continue
            for xa in range(a + 1 - t):
                for q, d in per_x[xa].items():
                    tgt = new[xa + t]
                    tgt[q + k * t] = tgt.get(q + k * t, 0) + d * count
        per_x = new
    return {q: d for q, d in per_x[a].items() if d}


def rhs_dims(h: dict, n: int, degrees=None, allow_truncated: bool = False
             ) -> dict:
    """The t-degree-n component of the super-symmetric algebra on one copy
    of h per t-power i ≥ 1."""
    support = [k for k, d in h.items() if d]
    if support and min(support) < 0 < max(support) and not allow_truncated:
        raise StructuralError(
            "mixed-sign degrees: the comparison window is not closed under "
            "convolution; pass allow_truncated=True to proceed anyway")
    total = {}
    for lam in partitions(n):
        term = {0: 1}
        for _size, mult in lam.multiplicities().items():
            term = dims_convolve(term, super_sym_power_dims(h, mult))
        for q, d in term.items():
            total[q] = total.get(q, 0) + d
    total = {q: d for q, d in total.items() if d}
    if degrees is not None:
        total = {q: total.get(q, 0) for q in degrees}
    return total


def kunneth_factor_check(c: DgCategory, lam: Partition, degrees,
                         max_level: int, normalized: bool = True,
                         mode: RankMode = EXACT) -> list:
    """Check that the λ-summand dims equal the degreewise convolution of the
    single-cycle summands over the parts, on certified degrees."""
    diags = []
    lo = min(degrees)
    window = list(range(lo, 1))
    whole = twisted_summand_dims(c, lam.n, lam, window, max_level,
                                 normalized, mode)
    conv = {0: 1}
    factors = []
    for p in lam.parts:
        f = twisted_summand_dims(c, p, Partition((p,)), window, max_level,
                                 normalized, mode)
        factors.append(f)
        conv = dims_convolve(conv, f.dims())
    for k in degrees:
        pieces_ok = all(
            f.degrees[i].certificate == "exact"
            for f in factors for i in range(k, 1))
        if whole.degrees[k].certificate != "Exact" or not pieces_ok:
            continue
        if whole.degrees[k].dim != conv.get(k, 0):
            diags.append(
                f"degree {k}: summand dim {whole.degrees[k].dim} != "
                f"convolved {conv.get(k, 0)}")
    return diags


# -- report assembly --------------------------------------------------------


@dataclass
class PartitionSummary:
    partition: Partition
    twisted: dict        # degree -> dim
    invariant: dict      # degree -> dim
    certified: dict      # degree -> bool
    group_order: int


@dataclass
class DecompositionReport:
    category: str
    n: int
    degrees: list
    per_partition: list
    lhs_totals: dict
    rhs_totals: dict
    verdicts: dict       # degree -> "Equal" | "Mismatch" | "Heuristic"
    max_level: int
    normalized: bool
    mode: str

    @property
    def all_equal(self) -> bool:
        return all(v == "Equal" for v in self.verdicts.values())

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "n": self.n,
            "degrees": list(self.degrees),
            "per_partition": [
                {
                    "partition": list(p.partition.parts),
                    "twisted": {str(k): v for k, v in sorted(p.twisted.items())},
                    "invariant": {str(k): v
                                  for k, v in sorted(p.invariant.items())},
                    "certified": {str(k): v
                                  for k, v in sorted(p.certified.items())},
                    "group_order": p.group_order,
                }
                for p in self.per_partition
            ],
            "lhs_totals": {str(k): v for k, v in sorted(self.lhs_totals.items())},
            "rhs_totals": {str(k): v for k, v in sorted(self.rhs_totals.items())},
            "verdicts": {str(k): v for k, v in sorted(self.verdicts.items())},
            "max_level": self.max_level,
            "normalized": self.normalized,
            "mode": self.mode,
        }


def verify_decomposition(c: DgCategory, n: int, degrees, max_level: int,
                         normalized: bool = True, mode: RankMode = EXACT,
                         strict: bool = False) -> DecompositionReport:
    """Compare, degree by degree, the sum over partitions of invariant
    twisted dims with the super-symmetric-power prediction from the
    untwisted homology of a single factor."""
    degrees = sorted(set(degrees), reverse=True)
    window = list(range(min(degrees), 1))
    per_partition = []
    lhs_totals = {k: 0 for k in degrees}
    lhs_cert = {k: True for k in degrees}
    for lam in partitions(n):
        sc = _lambda_complex(c, n, lam, max_level, normalized)
        summary = total_homology(sc, window, mode=mode)
        certified = {k: summary.degrees[k].certificate == "exact"
                     for k in degrees}
        action_degrees = [k for k in degrees if certified[k]]
        inv = invariant_dims(c, n, lam, action_degrees, max_level, normalized,
                             mode=mode, strict=strict, _sc=sc)
        pres = centralizer_gens(lam)
        per_partition.append(PartitionSummary(
            partition=lam,
            twisted={k: summary.degrees[k].dim for k in degrees},
            invariant=inv,
            certified=certified,
            group_order=pres.s_order,
        ))
        for k in degrees:
            if certified[k]:
                lhs_totals[k] += inv[k]
            else:
                lhs_cert[k] = False
    factor = build_complex(c, TwistSpec.identity(), max_level,
                           normalized=normalized)
    factor_summary = total_homology(factor, window, mode=mode)
    h = factor_summary.dims()
    rhs = rhs_dims({k: v for k, v in h.items() if v}, n)
    rhs_totals = {k: rhs.get(k, 0) for k in degrees}
    rhs_cert = {
        k: all(factor_summary.degrees[i].certificate == "exact"
               for i in range(k, 1))
        for k in degrees
    }
    verdicts = {}
    for k in degrees:
        if not (lhs_cert[k] and rhs_cert[k]):
            verdicts[k] = "Heuristic"
        elif lhs_totals[k] == rhs_totals[k]:
            verdicts[k] = "Equal"
        else:
            verdicts[k] = "Mismatch"
    return DecompositionReport(
        category=c.name,
        n=n,
        degrees=degrees,
        per_partition=per_partition,
        lhs_totals=lhs_totals,
        rhs_totals=rhs_totals,
        verdicts=verdicts,
        max_level=max_level,
        normalized=normalized,
        mode=mode.kind if hasattr(mode, "kind") else str(mode),
    )
