"""Exact rational and multi-modular sparse linear algebra.

Everything is done over Q with `fractions.Fraction`; the modular path
projects to GF(p) for large primes and is only used as a fast lower-bound
oracle for ranks (equal to the rational rank for all but finitely many
primes).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

# First two primes above 2^20.
DEFAULT_PRIMES = (1048583, 1048589)

# Above this many nonzeros, callers should prefer modular ranks.
MODULAR_NNZ_THRESHOLD = 20000


class StructuralError(ValueError):
    """Shape, composability or idempotency violations."""


class ModularFailure(RuntimeError):
    """A prime divides a denominator, or all supplied primes failed."""


@dataclass(frozen=True)
class RankMode:
    kind: str = "exact"  # "exact" | "modular"
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("exact", "modular"):
            raise StructuralError(f"unknown rank mode {self.kind!r}")
        if self.kind == "modular":
            if not self.primes:
                raise StructuralError("modular mode needs a non-empty prime list")
            if len(set(self.primes)) != len(self.primes):
                raise StructuralError("modular primes must be distinct")
            for p in self.primes:
                if p <= 1 << 20:
                    raise StructuralError(f"modular prime {p} must exceed 2^20")

    @staticmethod
    def exact() -> "RankMode":
        return RankMode("exact")

    @staticmethod
    def modular(primes=DEFAULT_PRIMES) -> "RankMode":
        return RankMode("modular", tuple(primes))


EXACT = RankMode.exact()


def default_mode(nnz: int, threshold: int = MODULAR_NNZ_THRESHOLD) -> RankMode:
    """Exact below the nonzero threshold, two-prime modular above it."""
    return EXACT if nnz <= threshold else RankMode.modular()


class SparseMatrix:
    """Immutable-by-convention sparse matrix over Q.

    Entries are a dict {(row, col): Fraction} with no explicit zeros.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise StructuralError("negative dimensions")
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (i, j), v in (entries.items() if isinstance(entries, dict) else entries):
                if not (0 <= i < rows and 0 <= j < cols):
                    raise StructuralError(f"entry ({i},{j}) out of range {rows}x{cols}")
                v = Fraction(v)
                if v:
                    if (i, j) in ent:
                        raise StructuralError(f"duplicate entry at ({i},{j})")
                    ent[(i, j)] = v
        self.entries = ent

    @classmethod
    def from_triples(cls, rows, cols, triples):
        return cls(rows, cols, {(i, j): v for i, j, v in triples})

    @classmethod
    def from_dense(cls, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        ent = {}
        for i, row in enumerate(rows_list):
            for j, v in enumerate(row):
                if v:
                    ent[(i, j)] = Fraction(v)
        return cls(rows, cols, ent)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def to_triples(self):
        """Canonical row-major listing for reproducible serialization."""
        return [(i, j, self.entries[(i, j)]) for i, j in sorted(self.entries)]

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def scale(self, c) -> "SparseMatrix":
        c = Fraction(c)
        if not c:
            return SparseMatrix(self.rows, self.cols)
        return SparseMatrix(self.rows, self.cols,
                            {k: c * v for k, v in self.entries.items()})

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise StructuralError("shape mismatch in add")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent.get(k, 0) + v
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return SparseMatrix(self.rows, self.cols, ent)

    def sub(self, other: "SparseMatrix") -> "SparseMatrix":
        return self.add(other.scale(-1))

    def mul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise StructuralError("shape mismatch in mul")
        by_row = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        ent = {}
        for (i, k), v in self.entries.items():
            for j, w in by_row.get(k, ()):
                s = ent.get((i, j), 0) + v * w
                if s:
                    ent[(i, j)] = s
                else:
                    ent.pop((i, j), None)
        return SparseMatrix(self.rows, other.cols, ent)

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse column vector {index: Fraction}."""
        out = {}
        by_col = {}
        for (i, j), v in self.entries.items():
            by_col.setdefault(j, []).append((i, v))
        for j, c in vec.items():
            for i, v in by_col.get(j, ()):
                s = out.get(i, 0) + v * c
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return out

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise StructuralError("trace of non-square matrix")
        return sum((v for (i, j), v in self.entries.items() if i == j), Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix)
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def _row_dicts(m: SparseMatrix):
    rows = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
    return [r for r in rows.values() if r]


def _eliminate_rank(rows) -> int:
    """Rank of a list of sparse row dicts over a field.

    Pivot choice is sparsity-aware: the sparsest remaining row, then its
    column with the fewest occurrences elsewhere, to limit fill-in.
    """
    rows = [dict(r) for r in rows if r]
    rank = 0
    while rows:
        rows.sort(key=len)
        piv_row = rows.pop(0)
        col_count = {}
        for r in rows:
            for c in r:
                col_count[c] = col_count.get(c, 0) + 1
        piv_col = min(piv_row, key=lambda c: (col_count.get(c, 0), c))
        piv_val = piv_row[piv_col]
        rank += 1
        nxt = []
        for r in rows:
            if piv_col in r:
                factor = r[piv_col] / piv_val
                for c, v in piv_row.items():
                    s = r.get(c, 0) - factor * v
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
            if r:
                nxt.append(r)
        rows = nxt
    return rank


class _GFp:
    """Wraps an int mod p so the generic elimination can divide."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = v % p
        self.p = p

    def __bool__(self):
        return self.v != 0

    def __truediv__(self, other):
        return _GFp(self.v * pow(other.v, -1, self.p), self.p)

    def __mul__(self, other):
        return _GFp(self.v * other.v, self.p)

    def __sub__(self, other):
        return _GFp(self.v - other.v, self.p)

    def __rsub__(self, other):  # 0 - self via r.get(c, 0)
        return _GFp(other - self.v, self.p)

    def __rmul__(self, other):
        return _GFp(other * self.v, self.p)


def _rows_mod_p(m: SparseMatrix, p: int):
    rows = {}
    for (i, j), v in m.entries.items():
        if v.denominator % p == 0:
            raise ModularFailure(f"prime {p} divides a denominator")
        r = (v.numerator * pow(v.denominator, -1, p)) % p
        if r:
            rows.setdefault(i, {})[j] = _GFp(r, p)
    return [r for r in rows.values() if r]


@dataclass(frozen=True)
class RankResult:
    value: int
    mode: RankMode
    per_prime: tuple[tuple[int, int], ...] = ()  # (prime, rank) pairs
    failed_primes: tuple[int, ...] = ()

    @property
    def agreed(self) -> bool:
        return len({r for _, r in self.per_prime}) <= 1


def rank_info(m: SparseMatrix, mode: RankMode = EXACT) -> RankResult:
    if mode.kind == "exact":
        return RankResult(_eliminate_rank(_row_dicts(m)), mode)
    per_prime = []
    failed = []
    for p in mode.primes:
        try:
            per_prime.append((p, _eliminate_rank(_rows_mod_p(m, p))))
        except ModularFailure:
            failed.append(p)
    if not per_prime:
        raise ModularFailure(f"all primes {mode.primes} divide some denominator")
    value = max(r for _, r in per_prime)
    return RankResult(value, mode, tuple(per_prime), tuple(failed))


def rank(m: SparseMatrix, mode: RankMode = EXACT) -> int:
    return rank_info(m, mode).value


def _rref(rows_list, cols):
    """Reduced row echelon form over Q.

    Returns (pivots, reduced_rows) where pivots is the sorted list of pivot
    columns and reduced_rows[i] has leading 1 in pivots[i].
    """
    rows = [dict(r) for r in rows_list if r]
    pivots = []
    reduced = []
    for col in range(cols):
        hit = None
        for idx, r in enumerate(rows):
            if col in r:
                hit = idx
                break
        if hit is None:
            continue
        piv = rows.pop(hit)
        inv = 1 / piv[col]
        piv = {c: v * inv for c, v in piv.items()}
        for r in rows:
            if col in r:
                f = r[col]
                for c, v in piv.items():
                    s = r.get(c, 0) - f * v
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
        for r in reduced:
            if col in r:
                f = r[col]
                for c, v in piv.items():
                    s = r.get(c, 0) - f * v
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
        pivots.append(col)
        reduced.append(piv)
        rows = [r for r in rows if r]
        if not rows:
            break
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [pivots[i] for i in order], [reduced[i] for i in order]


def kernel_basis(m: SparseMatrix) -> list[dict]:
    """Exact kernel basis as sparse column vectors {row index: Fraction}."""
    pivots, reduced = _rref(_row_dicts(m), m.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec = {free: Fraction(1)}
        for pcol, row in zip(pivots, reduced):
            v = row.get(free, 0)
            if v:
                vec[pcol] = -v
        basis.append(vec)
    return basis


def column_space_basis(m: SparseMatrix) -> list[dict]:
    """An exact basis of the column space, as sparse column vectors."""
    _, reduced = _rref(_row_dicts(m.transpose()), m.rows)
    return [dict(r) for r in reduced]


def homology_dimension(d_in: SparseMatrix, d_out: SparseMatrix,
                       mode: RankMode = EXACT) -> int:
    """dim ker(d_out) - rank(d_in) for a two-step complex d_in, then d_out."""
    if d_in.rows != d_out.cols:
        raise StructuralError(
            f"levels do not compose: d_in lands in dim {d_in.rows}, "
            f"d_out starts from dim {d_out.cols}")
    if not d_out.mul(d_in).is_zero():
        raise StructuralError("d_out . d_in != 0: not a complex at this level")
    dim_ker = d_out.cols - rank(d_out, mode)
    return dim_ker - rank(d_in, mode)


def projector_invariant_dim(p: SparseMatrix, mode: RankMode = EXACT) -> int:
    """Rank of an idempotent; equals its trace over Q."""
    if p.rows != p.cols:
        raise StructuralError("projector must be square")
    if mode.kind == "exact":
        if p.mul(p) != p:
            raise StructuralError("matrix is not idempotent")
    r = rank(p, mode)
    if mode.kind == "exact":
        tr = p.trace()
        if tr != r:
            raise StructuralError(f"idempotent rank {r} != trace {tr}")
    return r


def solve(m: SparseMatrix, b: dict):
    """One exact solution x of m x = b, or None if inconsistent.

    b is a sparse column vector {row: Fraction}.
    """
    rows = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
    aug = []
    BCOL = m.cols  # augmented column index
    for i in range(m.rows):
        r = dict(rows.get(i, {}))
        if b.get(i):
            r[BCOL] = Fraction(b[i])
        if r:
            aug.append(r)
    pivots, reduced = _rref(aug, m.cols + 1)
    x = {}
    for pcol, row in zip(pivots, reduced):
        if pcol == BCOL:
            return None  # leading entry in augmented column: inconsistent
        v = row.get(BCOL, 0)
        if v:
            x[pcol] = v
    return x  # free variables are zero
