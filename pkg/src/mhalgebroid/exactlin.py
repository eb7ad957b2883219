"""Exact linear algebra over the rationals and the Gaussian rationals.

Everything downstream (algebras, balanced tensor quotients, solving for
counits, antipodes and integrals) runs on the small toolkit in this file:
dense matrices for small systems, a sparse incremental echelon form for the
big tensor quotients, and quotient spaces with a projection and a section.

Pivoting is deterministic: the pivot of a row is its smallest key, so every
quotient basis is reproducible bit for bit.
"""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

try:
    from gmpy2 import mpq as Q  # same semantics as Fraction, much faster
    RATIONAL = (int, Fraction, type(Q(0)))
except ImportError:  # pragma: no cover
    Q = Fraction
    RATIONAL = (int, Fraction)


class Gaussian:
    """a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Q(re)
        self.im = Q(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, RATIONAL):
            return Gaussian(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        return Gaussian((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = Gaussian._lift(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conj(self):
        return Gaussian(self.re, -self.im)

    def __repr__(self):
        return f"Gaussian({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


I = Gaussian(0, 1)


def conj(s):
    """Complex conjugation; the identity on plain rationals."""
    return s.conj() if isinstance(s, Gaussian) else s


_EXACT = (type(Q(0)), Gaussian)


def simplify(s):
    """Drop a vanishing imaginary part."""
    if isinstance(s, Gaussian) and s.im == 0:
        return s.re
    return s


def scalar(x):
    """Coerce ints (and numeric strings) to exact scalars."""
    if isinstance(x, RATIONAL) and not isinstance(x, (int, bool)):
        return x
    if isinstance(x, Gaussian):
        return x
    return parse_scalar(x)


def is_real(s) -> bool:
    return not isinstance(s, Gaussian) or s.im == 0


_GAUSS = re.compile(r"^\s*([^*]*?)\s*([+-])\s*([^-+*]*?)\s*\*?\s*i\s*$")


def parse_scalar(x):
    """Parse "p/q", an int, a Fraction, or "p/q+r/s*i"."""
    if isinstance(x, Fraction):
        return Q(x)
    if isinstance(x, Gaussian) or (isinstance(x, RATIONAL) and not isinstance(x, int)):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Q(x)
    if not isinstance(x, str):
        raise TypeError(f"cannot parse scalar from {type(x).__name__}")
    s = x.strip()
    if s.endswith("i"):
        m = _GAUSS.match(s)
        if m:
            re_part = Q(m.group(1)) if m.group(1) else Q(0)
            im_part = Q(m.group(3)) if m.group(3) else Q(1)
            if m.group(2) == "-":
                im_part = -im_part
            return Gaussian(re_part, im_part)
        body = s[:-1].rstrip("*").strip()
        if body in ("", "+"):
            return Gaussian(0, 1)
        if body == "-":
            return Gaussian(0, -1)
        return Gaussian(0, Q(body))
    return Q(s)


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(s) -> str:
    if isinstance(s, Gaussian):
        if s.im == 0:
            return _fmt_q(s.re)
        sign = "-" if s.im < 0 else "+"
        return f"{_fmt_q(s.re)}{sign}{_fmt_q(abs(s.im))}*i"
    if isinstance(s, int):
        return str(s)
    return _fmt_q(Q(s))


# ---------------------------------------------------------------- spaces


@dataclass(frozen=True)
class LabeledSpace:
    labels: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be pairwise distinct")

    @property
    def dim(self) -> int:
        return len(self.labels)

    @staticmethod
    def standard(n: int, prefix: str = "e") -> "LabeledSpace":
        return LabeledSpace(tuple(f"{prefix}{i}" for i in range(n)))


class Matrix:
    """Dense matrix of exact scalars. Treated as immutable."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: Optional[int] = None):
        self.rows = [[x if isinstance(x, _EXACT) else scalar(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")

    @staticmethod
    def zero(nrows: int, ncols: int) -> "Matrix":
        return Matrix([[Q(0)] * ncols for _ in range(nrows)], ncols)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix([[Q(1) if i == j else Q(0) for j in range(n)] for i in range(n)], n)

    @staticmethod
    def from_columns(cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return Matrix([[c[i] for c in cols] for i in range(nrows)], len(cols))

    def column(self, j: int) -> List:
        return [r[j] for r in self.rows]

    def columns(self) -> List[List]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)], self.nrows)

    def apply(self, v: Sequence) -> List:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for {self.nrows}x{self.ncols} matrix")
        nz = [(j, x) for j, x in enumerate(v) if x != 0]
        out = []
        for r in self.rows:
            s = Q(0)
            for j, x in nz:
                if r[j] != 0:
                    s += r[j] * x
            out.append(s)
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        cols = [self.apply(other.column(j)) for j in range(other.ncols)]
        return Matrix([[c[i] for c in cols] for i in range(self.nrows)], other.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def scale(self, c) -> "Matrix":
        return Matrix([[c * a for a in r] for r in self.rows], self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.nrows == other.nrows and self.ncols == other.ncols and self.rows == other.rows

    __hash__ = None

    def __repr__(self):
        body = "; ".join(" ".join(format_scalar(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: {body})"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    # -- elimination

    def rref(self) -> Tuple[List[List], List[int]]:
        """Reduced row echelon form; pivot = first nonzero entry in column order."""
        m = [list(r) for r in self.rows]
        pivots: List[int] = []
        piv_r = 0
        for c in range(self.ncols):
            if piv_r == len(m):
                break
            for i in range(piv_r, len(m)):
                if m[i][c] != 0:
                    break
            else:
                continue
            if i != piv_r:
                m[piv_r], m[i] = m[i], m[piv_r]
            p = m[piv_r][c]
            if p != 1:
                m[piv_r] = [x / p for x in m[piv_r]]
            prow = m[piv_r]
            for r in range(len(m)):
                if r != piv_r and m[r][c] != 0:
                    f = m[r][c]
                    m[r] = [x - f * y for x, y in zip(m[r], prow)]
            pivots.append(c)
            piv_r += 1
        return m[: len(pivots)], pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> List[List]:
        rows, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in set(pivots)]
        basis = []
        for f in free:
            v = [Q(0)] * self.ncols
            v[f] = Q(1)
            for r, p in zip(rows, pivots):
                v[p] = -r[f]
            basis.append(v)
        return basis

    def image(self) -> List[List]:
        _, pivots = self.rref()
        return [self.column(p) for p in pivots]

    def solve(self, b: Sequence) -> Tuple[Optional[List], List[List]]:
        """Particular solution (or None) and kernel basis of self @ x = b."""
        if len(b) != self.nrows:
            raise ValueError("right-hand side has the wrong length")
        aug = Matrix([list(r) + [bb] for r, bb in zip(self.rows, b)], self.ncols + 1)
        rows, pivots = aug.rref()
        if pivots and pivots[-1] == self.ncols:
            return None, self.kernel()
        x = [Q(0)] * self.ncols
        for r, p in zip(rows, pivots):
            x[p] = r[-1]
        return x, self.kernel()

    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        aug = Matrix([list(r) + [Q(1) if i == j else Q(0) for j in range(n)] for i, r in enumerate(self.rows)], 2 * n)
        rows, pivots = aug.rref()
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise ZeroDivisionError("matrix is singular")
        return Matrix([r[n:] for r in rows[:n]], n)


# ---------------------------------------------------------------- maps


@dataclass(frozen=True, eq=False)
class LinearMap:
    source: LabeledSpace
    target: LabeledSpace
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.nrows != self.target.dim or self.matrix.ncols != self.source.dim:
            raise ValueError("matrix shape does not match source/target")

    def __call__(self, v):
        return self.matrix.apply(v)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if other.target.dim != self.source.dim:
            raise ValueError("cannot compose: dimension mismatch")
        return LinearMap(other.source, self.target, self.matrix @ other.matrix)

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.matrix == other.matrix

    @staticmethod
    def identity(space: LabeledSpace) -> "LinearMap":
        return LinearMap(space, space, Matrix.identity(space.dim))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of linearly independent vectors; equality compares spans."""

    ambient: LabeledSpace
    basis: Tuple[Tuple, ...]

    @staticmethod
    def span(ambient: LabeledSpace, vectors: Iterable[Sequence]) -> "Subspace":
        keep: List[Tuple] = []
        ech = SparseEchelon()
        for v in vectors:
            if len(v) != ambient.dim:
                raise ValueError("vector does not lie in the ambient space")
            v = tuple(scalar(x) for x in v)
            if ech.add({i: x for i, x in enumerate(v) if x != 0}):
                keep.append(v)
        return Subspace(ambient, tuple(keep))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def canonical(self) -> Tuple[Tuple, ...]:
        if not self.basis:
            return ()
        rows, _ = Matrix(self.basis, self.ambient.dim).rref()
        return tuple(tuple(r) for r in rows)

    def contains(self, v: Sequence) -> bool:
        if not self.basis:
            return all(x == 0 for x in v)
        return Matrix([list(r) for r in self.basis] + [list(v)], self.ambient.dim).rank() == self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient.dim == other.ambient.dim and self.canonical() == other.canonical()

    __hash__ = None


@dataclass(frozen=True)
class RowReduction:
    rank: int
    kernel: Subspace
    image: Subspace


def rref(m: LinearMap) -> RowReduction:
    mat = m.matrix
    return RowReduction(
        rank=mat.rank(),
        kernel=Subspace.span(m.source, mat.kernel()),
        image=Subspace.span(m.target, mat.image()),
    )


@dataclass(frozen=True)
class AffineSolution:
    particular: Tuple
    kernel: Subspace

    def contains(self, v: Sequence) -> bool:
        return self.kernel.contains([a - b for a, b in zip(v, self.particular)])


def solve(m: LinearMap, target_vector: Sequence) -> Optional[AffineSolution]:
    x, ker = m.matrix.solve([scalar(t) for t in target_vector])
    if x is None:
        return None
    return AffineSolution(tuple(x), Subspace.span(m.source, ker))


# ---------------------------------------------------------------- sparse


class SparseEchelon:
    """Incremental echelon form of sparse vectors {key: scalar}.

    A row's pivot is its smallest key and is normalised to 1. While rows are
    being added the form is only semi-reduced; ``finalize`` back-substitutes
    so that no row contains another row's pivot, after which reduction of a
    vector is a single pass.
    """

    def __init__(self):
        self.rows: Dict[Hashable, Dict[Hashable, object]] = {}
        self.reduced = True

    def __len__(self):
        return len(self.rows)

    def _reduce_heap(self, v: Dict) -> Dict:
        rows = self.rows
        heap = [k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            k = heapq.heappop(heap)
            c = v.get(k)
            if c is None:
                continue
            for kk, val in rows[k].items():
                if kk in v:
                    nv = v[kk] - c * val
                    if nv == 0:
                        del v[kk]
                    else:
                        v[kk] = nv
                else:
                    v[kk] = -c * val
                    if kk in rows:
                        heapq.heappush(heap, kk)
        return v

    def reduce(self, vec: Dict) -> Dict:
        v = {k: scalar(c) for k, c in vec.items() if c != 0}
        if not self.reduced:
            return self._reduce_heap(v)
        rows = self.rows
        for k in [k for k in v if k in rows]:
            c = v.pop(k)
            for kk, val in rows[k].items():
                if kk == k:
                    continue
                nv = v.get(kk, 0) - c * val
                if nv == 0:
                    v.pop(kk, None)
                else:
                    v[kk] = nv
        return v

    def add(self, vec: Dict) -> bool:
        """Insert a vector; returns False if it was already in the span."""
        v = self.reduce(vec) if self.reduced else self._reduce_heap({k: scalar(c) for k, c in vec.items() if c != 0})
        if not v:
            return False
        p = min(v)
        c = v[p]
        if c != 1:
            v = {k: x / c for k, x in v.items()}
        self.rows[p] = v
        self.reduced = False
        return True

    def finalize(self) -> "SparseEchelon":
        if self.reduced:
            return self
        rows = self.rows
        for p in sorted(rows, reverse=True):
            r = rows[p]
            hits = [k for k in r if k != p and k in rows]
            for k in hits:
                c = r.pop(k)
                for kk, val in rows[k].items():
                    if kk == k:
                        continue
                    nv = r.get(kk, 0) - c * val
                    if nv == 0:
                        r.pop(kk, None)
                    else:
                        r[kk] = nv
        self.reduced = True
        return self


class QuotientSpace:
    """Quotient of a coordinate space with hashable, ordered keys.

    The section sends the i-th quotient basis vector to the standard ambient
    vector at the i-th non-pivot key, and projection reads off non-pivot
    coordinates after full reduction, so projection . section = identity.
    """

    def __init__(self, ambient_keys: Sequence, relations: Iterable[Dict], labels: Optional[Sequence[str]] = None):
        self.ambient_keys = list(ambient_keys)
        keyset = set(self.ambient_keys)
        ech = SparseEchelon()
        for r in relations:
            for k in r:
                if k not in keyset:
                    raise ValueError(f"relation key {k!r} outside the ambient space")
            ech.add(r)
        self.echelon = ech.finalize()
        self.basis_keys = [k for k in self.ambient_keys if k not in ech.rows]
        self.index = {k: i for i, k in enumerate(self.basis_keys)}
        self._labels = labels

    @property
    def dim(self) -> int:
        return len(self.basis_keys)

    @property
    def relation_rank(self) -> int:
        return len(self.echelon.rows)

    def project(self, vec: Dict) -> List:
        out = [Q(0)] * self.dim
        for k, c in self.echelon.reduce(vec).items():
            out[self.index[k]] = c
        return out

    def project_sparse(self, vec: Dict) -> Dict:
        return self.echelon.reduce(vec)

    def is_zero(self, vec: Dict) -> bool:
        return not self.echelon.reduce(vec)

    def lift(self, coords: Sequence) -> Dict:
        return {self.basis_keys[i]: c for i, c in enumerate(coords) if c != 0}

    def section_key(self, i: int):
        return self.basis_keys[i]

    # dense views, for small spaces and for the documented interface

    @property
    def ambient(self) -> LabeledSpace:
        labels = self._labels or [str(k) for k in self.ambient_keys]
        return LabeledSpace(tuple(labels))

    @property
    def space(self) -> LabeledSpace:
        return LabeledSpace.standard(self.dim, "q")

    @property
    def relations(self) -> Subspace:
        pos = {k: i for i, k in enumerate(self.ambient_keys)}
        vecs = []
        for p in sorted(self.echelon.rows):
            v = [Q(0)] * len(self.ambient_keys)
            for k, c in self.echelon.rows[p].items():
                v[pos[k]] = c
            vecs.append(v)
        return Subspace.span(self.ambient, vecs)

    @property
    def projection(self) -> LinearMap:
        cols = [self.project({k: Q(1)}) for k in self.ambient_keys]
        return LinearMap(self.ambient, self.space, Matrix.from_columns(cols, self.dim))

    @property
    def section(self) -> LinearMap:
        pos = {k: i for i, k in enumerate(self.ambient_keys)}
        cols = []
        for k in self.basis_keys:
            v = [Q(0)] * len(self.ambient_keys)
            v[pos[k]] = Q(1)
            cols.append(v)
        return LinearMap(self.space, self.ambient, Matrix.from_columns(cols, len(self.ambient_keys)))


def quotient_by(ambient: LabeledSpace, relations: Sequence[Sequence]) -> QuotientSpace:
    rels = []
    for r in relations:
        if len(r) != ambient.dim:
            raise ValueError(f"relation of length {len(r)} in a space of dimension {ambient.dim}")
        rels.append({i: c for i, c in enumerate(r) if c != 0})
    return QuotientSpace(range(ambient.dim), rels, ambient.labels)


@dataclass
class SparseSolution:
    particular: Optional[List]
    kernel: List[List]
    free: List[int] = None  # kernel[i] is 1 at free[i] and 0 at every other free variable

    @property
    def unique(self) -> bool:
        return self.particular is not None and not self.kernel


def solve_sparse(equations: Iterable[Tuple[Dict[int, object], object]], nvars: int) -> SparseSolution:
    """Solve sum_k row[k] x_k = rhs for all rows; variables are 0..nvars-1."""
    ech = SparseEchelon()
    rhs_key = nvars
    inconsistent = False
    for row, rhs in equations:
        v = {k: c for k, c in row.items() if c != 0}
        if rhs != 0:
            v[rhs_key] = -scalar(rhs)
        if not v:
            continue
        ech.add(v)
        if rhs_key in ech.rows:
            inconsistent = True
            break
    ech.finalize()
    pivots = set(ech.rows)
    free = [k for k in range(nvars) if k not in pivots]
    kernel = []
    for f in free:
        x = [Q(0)] * nvars
        x[f] = Q(1)
        for p, r in ech.rows.items():
            if f in r:
                x[p] = -r[f]
        kernel.append(x)
    if inconsistent:
        return SparseSolution(None, kernel, free)
    x = [Q(0)] * nvars
    for p, r in ech.rows.items():
        x[p] = -r.get(rhs_key, Q(0))
    return SparseSolution(x, kernel, free)


def sparse_rank(vectors: Iterable[Dict]) -> int:
    ech = SparseEchelon()
    for v in vectors:
        ech.add(v)
    return len(ech)
