"""Shuffle map between standard complexes and Künneth verification.

The tensor product of two standard complexes is never materialized as one
complex; the shuffle map is stored blockwise, one sparse matrix per pair of
levels (k, l), with columns indexed by pairs of source chains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .dgcore import TENSOR_SEP, functor_equal, tensor, tensor_functor
from .hochschild import StandardComplex
from .qlinalg import EXACT, RankMode, SparseMatrix, StructuralError, rank, solve


def _tid(a_id, b_id):
    return f"{a_id}{TENSOR_SEP}{b_id}"


@dataclass
class ShuffleMap:
    a: StandardComplex
    b: StandardComplex
    target: StandardComplex
    blocks: dict  # (k, l) -> SparseMatrix into target level k+l

    def col(self, k, l, i, j) -> int:
        return i * len(self.b.levels[l]) + j

    def block_shape(self, k, l):
        return (len(self.target.levels[k + l]),
                len(self.a.levels[k]) * len(self.b.levels[l]))


def _total_deg(ch, level):
    return ch.degree - level


def shuffle_map(a: StandardComplex, b: StandardComplex,
                target: StandardComplex | None = None) -> ShuffleMap:
    if target is None:
        cat_t = tensor(a.category, b.category)
        twist = tensor_functor(a.twist, b.twist, cat_t, cat_t)
        target = StandardComplex(cat_t, twist, max(a.max_level, b.max_level),
                                 a.normalized)
    if target.normalized != a.normalized or target.normalized != b.normalized:
        raise StructuralError("normalization modes of factors and target differ")
    expected_twist = tensor_functor(a.twist, b.twist,
                                    target.category, target.category)
    if not functor_equal(target.twist, expected_twist):
        raise StructuralError("target twist is not the tensor of the factor twists")
    cat_a, cat_b = a.category, b.category
    blocks = {}
    for k in range(a.max_level + 1):
        for l in range(b.max_level + 1):
            if k + l > target.max_level:
                continue
            nb = len(b.levels[l])
            acc = {}
            for i, x in enumerate(a.levels[k]):
                f_degs = [cat_a.deg(s) for s in x.slots]
                for j, y in enumerate(b.levels[l]):
                    col = i * nb + j
                    g_degs = [cat_b.deg(s) for s in y.slots]
                    base_eps = cat_b.deg(y.coeff) * sum(f_degs)
                    coeff_id = _tid(x.coeff, y.coeff)
                    for f_pos in itertools.combinations(range(k + l), k):
                        fset = set(f_pos)
                        cur_c, cur_b = 1, 1
                        objs = [_tid(x.objects[0], y.objects[0])]
                        slots = []
                        exp = base_eps
                        gs_placed = 0
                        gs_deg = 0
                        for p in range(k + l):
                            oc = x.objects[cur_c % (k + 1)]
                            ob = y.objects[cur_b % (l + 1)]
                            objs.append(_tid(oc, ob))
                            if p in fset:
                                slots.append(_tid(x.slots[cur_c - 1],
                                                  cat_b.unit(ob)))
                                exp += gs_placed + gs_deg * f_degs[cur_c - 1]
                                cur_c += 1
                            else:
                                slots.append(_tid(cat_a.unit(oc),
                                                  y.slots[cur_b - 1]))
                                gs_placed += 1
                                gs_deg += g_degs[cur_b - 1]
                                cur_b += 1
                        ch_deg = x.degree + y.degree
                        from .hochschild import Chain
                        ch = Chain(tuple(objs), coeff_id, tuple(slots), ch_deg)
                        row = target.index[k + l].get(ch)
                        if row is None:
                            raise StructuralError(
                                f"shuffle image missing from target catalog: {ch}")
                        s = acc.get((row, col), 0) + Fraction((-1) ** exp)
                        if s:
                            acc[(row, col)] = s
                        else:
                            acc.pop((row, col), None)
            blocks[(k, l)] = SparseMatrix(len(target.levels[k + l]),
                                          len(a.levels[k]) * nb, acc)
    return ShuffleMap(a, b, target, blocks)


def _kron_left(m: SparseMatrix, nb: int) -> SparseMatrix:
    """m ⊗ identity on the b-factor of a pair-indexed space."""
    ent = {}
    for (r, i), v in m.entries.items():
        for j in range(nb):
            ent[(r * nb + j, i * nb + j)] = v
    return SparseMatrix(m.rows * nb, m.cols * nb, ent)


def _kron_right(na: int, m: SparseMatrix, signs) -> SparseMatrix:
    """identity ⊗ m with a per-a-chain Koszul sign."""
    ent = {}
    for (r, j), v in m.entries.items():
        for i in range(na):
            ent[(i * m.rows + r, i * m.cols + j)] = signs[i] * v
    return SparseMatrix(na * m.rows, na * m.cols, ent)


def verify_shuffle_chain_map(sh: ShuffleMap) -> list[str]:
    """Exact chain-map identity on every block with k + l <= N - 1."""
    diags = []
    a, b, tgt = sh.a, sh.b, sh.target
    for (k, l), blk in sh.blocks.items():
        if k + l > tgt.max_level - 1:
            continue
        na, nb = len(a.levels[k]), len(b.levels[l])
        signs = [Fraction((-1) ** _total_deg(ch, k)) for ch in a.levels[k]]
        # level-raising (internal) part; the (-1)^l compensates the level
        # alteration (-1)^m being taken at level k on the factor but k + l
        # on the target
        lhs1 = tgt.d1[k + l].mul(blk)
        rhs1 = blk.mul(_kron_left(a.d1[k], nb).scale((-1) ** l).add(
            _kron_right(na, b.d1[l], signs)))
        if lhs1 != rhs1:
            diags.append(f"internal differential mismatch on block ({k},{l})")
        # face part
        lhs2 = tgt.d2[k + l].mul(blk)
        rhs2 = SparseMatrix(len(tgt.levels[k + l - 1]) if k + l >= 1 else 0,
                            na * nb)
        if k >= 1:
            rhs2 = rhs2.add(sh.blocks[(k - 1, l)].mul(_kron_left(a.d2[k], nb)))
        if l >= 1:
            # the face part of the second factor enters with the constant
            # sign (-1)^k, not a per-chain Koszul sign
            face_signs = [Fraction((-1) ** k)] * na
            rhs2 = rhs2.add(sh.blocks[(k, l - 1)].mul(
                _kron_right(na, b.d2[l], face_signs)))
        if lhs2 != rhs2:
            diags.append(f"face differential mismatch on block ({k},{l})")
    return diags


def dims_convolve(h1: dict, h2: dict) -> dict:
    out = {}
    for i, d1 in h1.items():
        for j, d2 in h2.items():
            if d1 and d2:
                out[i + j] = out.get(i + j, 0) + d1 * d2
    return out


def shuffle_push(sh: ShuffleMap, i: int, j: int, za: dict, zb: dict) -> dict:
    """Push a pair of total-degree (i, j) cycles through Sh; result lives in
    target degree_block(i + j) coordinates."""
    a, b, tgt = sh.a, sh.b, sh.target
    blk_a = a.degree_block(i)
    blk_b = b.degree_block(j)
    tgt_pos = {coord: t for t, coord in enumerate(tgt.degree_block(i + j))}
    out = {}
    for pa, ca in za.items():
        k, ia = blk_a[pa]
        for pb, cb in zb.items():
            l, ib = blk_b[pb]
            if (k, l) not in sh.blocks:
                raise StructuralError(
                    f"needed shuffle block ({k},{l}) outside truncation")
            col = ia * len(b.levels[l]) + ib
            for (r, c), v in sh.blocks[(k, l)].entries.items():
                if c != col:
                    continue
                key = tgt_pos[(k + l, r)]
                s = out.get(key, 0) + v * ca * cb
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return out


@dataclass
class DegreeKunneth:
    convolved_dim: int
    target_dim: int
    induced_rank: int
    certified: bool

    @property
    def ok(self):
        return self.convolved_dim == self.target_dim == self.induced_rank


@dataclass
class KunnethReport:
    chain_map_diags: list
    degrees: dict  # total degree -> DegreeKunneth

    @property
    def ok(self):
        return not self.chain_map_diags and all(d.ok for d in self.degrees.values())


def kunneth_verify(a: StandardComplex, b: StandardComplex, degrees,
                   target: StandardComplex | None = None,
                   mode: RankMode = EXACT) -> KunnethReport:
    sh = shuffle_map(a, b, target)
    tgt = sh.target
    chain_diags = verify_shuffle_chain_map(sh)
    degrees = list(degrees)
    # factor homology over every degree that can contribute to a request;
    # certified homology is concentrated in nonpositive total degrees, so
    # degree k only receives products with k <= i, j <= 0
    window = range(min(degrees), 1)
    dims_a = {i: len(a.homology_basis(i)[0]) for i in window if a.certified(i)}
    dims_b = {j: len(b.homology_basis(j)[0]) for j in window if b.certified(j)}
    out = {}
    for kdeg in degrees:
        certified = (tgt.certified(kdeg)
                     and all(i in dims_a and kdeg - i in dims_b
                             for i in range(kdeg, 1)))
        conv = sum(dims_a.get(i, 0) * dims_b.get(kdeg - i, 0)
                   for i in range(kdeg, 1))
        reps_t, bnd_t = tgt.homology_basis(kdeg)
        # coordinates of each pushed pair of representatives in homology
        h_t = len(reps_t)
        dim_blk = tgt.block_dim(kdeg)
        ent = {}
        for idx, v in enumerate(reps_t):
            for r, val in v.items():
                ent[(r, idx)] = val
        for idx, v in enumerate(bnd_t):
            for r, val in v.items():
                ent[(r, h_t + idx)] = val
        basis_matrix = SparseMatrix(dim_blk, h_t + len(bnd_t), ent)
        cols = {}
        ncol = 0
        for i in range(kdeg, 1):
            j = kdeg - i
            for za in (a.homology_basis(i)[0] if dims_a.get(i) else []):
                for zb in (b.homology_basis(j)[0] if dims_b.get(j) else []):
                    img = shuffle_push(sh, i, j, za, zb)
                    x = solve(basis_matrix, img)
                    if x is None:
                        raise StructuralError(
                            f"shuffle image of a cycle pair is not a cycle "
                            f"at degree {kdeg}")
                    for r in range(h_t):
                        v = x.get(r, 0)
                        if v:
                            cols[(r, ncol)] = v
                    ncol += 1
        induced = SparseMatrix(h_t, ncol, cols)
        out[kdeg] = DegreeKunneth(conv, h_t, rank(induced, mode), certified)
    return KunnethReport(chain_diags, out)


def s2_check(a: StandardComplex, target: StandardComplex | None = None) -> list[str]:
    """Sh ∘ (Koszul swap of complex factors) = (swap functor, id)_* ∘ Sh,
    as exact matrix identities on all constructed blocks."""
    from .dgcore import Permutation, identity_nat, permutation_functor
    from .hochschild import induced_chain_map

    sh = shuffle_map(a, a, target)
    tgt = sh.target
    swap = permutation_functor(a.category, 2, Permutation.from_cycles(2, [(1, 2)]),
                               power=tgt.category)
    cm = induced_chain_map(swap, identity_nat(swap), tgt, tgt)
    diags = []
    na_levels = [len(lv) for lv in a.levels]
    for (k, l), blk in sh.blocks.items():
        na, nb = na_levels[k], na_levels[l]
        # (x, y) -> ±(y, x) into the (l, k) pair space.  The sign that makes
        # the equivariance exact is the Koszul sign on internal (bar)
        # degrees times the simplicial transposition sign (-1)^{kl}; the
        # plain total-degree sign fails in odd examples.
        ent = {}
        for i, x in enumerate(a.levels[k]):
            for j, y in enumerate(a.levels[l]):
                sign = (-1) ** (x.degree * y.degree + k * l)
                ent[(j * na + i, i * nb + j)] = Fraction(sign)
        tau = SparseMatrix(nb * na, na * nb, ent)
        lhs = sh.blocks[(l, k)].mul(tau)
        rhs = cm.blocks[k + l].mul(blk)
        if lhs != rhs:
            diags.append(f"S2 equivariance fails on block ({k},{l})")
    return diags
