"""Finite-dimensional algebras given by structure constants.

Elements are dense coordinate lists; tensors of rank k are sparse dicts keyed
by k-tuples of basis indices. Functional bimodule convention throughout:
(a.w.b)(c) = w(b c a), so a.w = w( . a) and w.b = w(b . ).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exactlin import (
    LabeledSpace,
    LinearMap,
    Matrix,
    Q,
    conj,
    format_scalar,
    parse_scalar,
    scalar,
    solve_sparse,
    sparse_rank,
)

Vec = List
Tensor = Dict[Tuple[int, ...], object]


def zero(n: int) -> Vec:
    return [Q(0)] * n


def basis_vec(n: int, i: int) -> Vec:
    v = [Q(0)] * n
    v[i] = Q(1)
    return v


def add(u: Vec, v: Vec) -> Vec:
    return [a + b for a, b in zip(u, v)]


def sub(u: Vec, v: Vec) -> Vec:
    return [a - b for a, b in zip(u, v)]


def smul(c, v: Vec) -> Vec:
    return [c * a for a in v]


def dot(u: Sequence, v: Sequence):
    s = Q(0)
    for a, b in zip(u, v):
        if a != 0 and b != 0:
            s += a * b
    return s


def is_zero_vec(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def tensor_add(*ts: Tensor) -> Tensor:
    out: Tensor = {}
    for t in ts:
        for k, c in t.items():
            nv = out.get(k, 0) + c
            if nv == 0:
                out.pop(k, None)
            else:
                out[k] = nv
    return out


def tensor_scale(c, t: Tensor) -> Tensor:
    if c == 0:
        return {}
    return {k: c * v for k, v in t.items()}


def tensor_sub(s: Tensor, t: Tensor) -> Tensor:
    return tensor_add(s, tensor_scale(Q(-1), t))


def elementary(*vecs: Sequence) -> Tensor:
    """a (x) b (x) ... as a sparse tensor."""
    out: Tensor = {(): Q(1)}
    for v in vecs:
        nxt: Tensor = {}
        nz = [(i, c) for i, c in enumerate(v) if c != 0]
        for k, c in out.items():
            for i, x in nz:
                nxt[k + (i,)] = c * x
        out = nxt
    return out


class StructureAlgebra:
    """e_i e_j = sum_k mult[(i, j)][k] e_k, with an optional conjugate-linear star.

    ``star`` is a matrix whose i-th column holds the coordinates of e_i*; the
    star of a general element is star @ conj(coordinates).
    """

    def __init__(self, labels: Sequence[str], mult: Dict[Tuple[int, int], Dict[int, object]],
                 star: Optional[Matrix] = None, name: str = ""):
        self.space = LabeledSpace(tuple(labels))
        self.n = self.space.dim
        self.name = name
        table: Dict[Tuple[int, int], List[Tuple[int, object]]] = {}
        for (i, j), out in mult.items():
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"product index ({i},{j}) out of range")
            row = []
            for k, c in out.items():
                if not 0 <= k < self.n:
                    raise ValueError(f"product e{i}e{j} has component {k} out of range")
                c = scalar(c)
                if c != 0:
                    row.append((k, c))
            if row:
                table[(i, j)] = sorted(row)
        self.table = table
        if star is not None and (star.nrows != self.n or star.ncols != self.n):
            raise ValueError("star matrix has the wrong shape")
        self.star = star
        self._unit = None
        self._unit_done = False

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.space.labels

    @property
    def dim(self) -> int:
        return self.n

    # -- products

    def basis_product(self, i: int, j: int) -> List[Tuple[int, object]]:
        return self.table.get((i, j), [])

    def mul(self, a: Sequence, b: Sequence) -> Vec:
        out = [Q(0)] * self.n
        bn = [(j, y) for j, y in enumerate(b) if y != 0]
        table = self.table
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in bn:
                row = table.get((i, j))
                if row:
                    xy = x * y
                    for k, c in row:
                        out[k] += xy * c
        return out

    def mul_many(self, *factors: Sequence) -> Vec:
        out = list(factors[0])
        for f in factors[1:]:
            out = self.mul(out, f)
        return out

    def e(self, i: int) -> Vec:
        return basis_vec(self.n, i)

    def left_mult_matrix(self, a: Sequence) -> Matrix:
        """Matrix of x -> a x."""
        return Matrix.from_columns([self.mul(a, self.e(j)) for j in range(self.n)], self.n)

    def right_mult_matrix(self, a: Sequence) -> Matrix:
        """Matrix of x -> x a."""
        return Matrix.from_columns([self.mul(self.e(j), a) for j in range(self.n)], self.n)

    # -- tensors

    def tensor_mul(self, s: Tensor, t: Tensor) -> Tensor:
        """Legwise product of two tensors of the same rank."""
        out: Tensor = {}
        table = self.table
        for ks, cs in s.items():
            for kt, ct in t.items():
                partial: Tensor = {(): cs * ct}
                for a, b in zip(ks, kt):
                    row = table.get((a, b))
                    if not row:
                        partial = {}
                        break
                    partial = {p + (k,): c * x for p, c in partial.items() for k, x in row}
                for k, c in partial.items():
                    nv = out.get(k, 0) + c
                    if nv == 0:
                        out.pop(k, None)
                    else:
                        out[k] = nv
        return out

    def lmul_leg(self, t: Tensor, leg: int, a: Sequence) -> Tensor:
        """Multiply leg ``leg`` of t on the left by a."""
        anz = [(i, x) for i, x in enumerate(a) if x != 0]
        out: Tensor = {}
        table = self.table
        for key, c in t.items():
            j = key[leg]
            for i, x in anz:
                row = table.get((i, j))
                if not row:
                    continue
                cx = c * x
                for k, y in row:
                    nk = key[:leg] + (k,) + key[leg + 1:]
                    nv = out.get(nk, 0) + cx * y
                    if nv == 0:
                        out.pop(nk, None)
                    else:
                        out[nk] = nv
        return out

    def rmul_leg(self, t: Tensor, leg: int, a: Sequence) -> Tensor:
        """Multiply leg ``leg`` of t on the right by a."""
        anz = [(i, x) for i, x in enumerate(a) if x != 0]
        out: Tensor = {}
        table = self.table
        for key, c in t.items():
            j = key[leg]
            for i, x in anz:
                row = table.get((j, i))
                if not row:
                    continue
                cx = c * x
                for k, y in row:
                    nk = key[:leg] + (k,) + key[leg + 1:]
                    nv = out.get(nk, 0) + cx * y
                    if nv == 0:
                        out.pop(nk, None)
                    else:
                        out[nk] = nv
        return out

    def flip(self, t: Tensor) -> Tensor:
        return {(k[1], k[0]): c for k, c in t.items()}

    def apply_leg(self, t: Tensor, leg: int, f: Callable[[Vec], Vec]) -> Tensor:
        """Apply a linear map to one leg, via its values on basis vectors."""
        cache: Dict[int, Vec] = {}
        out: Tensor = {}
        for key, c in t.items():
            j = key[leg]
            if j not in cache:
                cache[j] = f(self.e(j))
            for k, y in enumerate(cache[j]):
                if y == 0:
                    continue
                nk = key[:leg] + (k,) + key[leg + 1:]
                nv = out.get(nk, 0) + c * y
                if nv == 0:
                    out.pop(nk, None)
                else:
                    out[nk] = nv
        return out

    def contract(self, t: Tensor, f: Callable[..., object]) -> object:
        """sum over t of f(indices) * coefficient, for scalar-valued f."""
        s = Q(0)
        for key, c in t.items():
            v = f(*key)
            if v != 0:
                s += c * v
        return s

    # -- unit and health

    def unit(self) -> Optional[Vec]:
        if not self._unit_done:
            self._unit = self._solve_unit()
            self._unit_done = True
        return self._unit

    def _solve_unit(self) -> Optional[Vec]:
        n = self.n
        eqs = []
        for j in range(n):
            for side in (0, 1):
                rows: Dict[int, Dict[int, object]] = {}
                for u in range(n):
                    pr = self.basis_product(u, j) if side == 0 else self.basis_product(j, u)
                    for k, c in pr:
                        rows.setdefault(k, {})[u] = c
                for k in range(n):
                    eqs.append((rows.get(k, {}), Q(1) if k == j else Q(0)))
        sol = solve_sparse(eqs, n)
        return sol.particular

    @property
    def unital(self) -> bool:
        return self.unit() is not None

    def associativity_defect(self) -> Optional[Tuple[int, int, int]]:
        for i in range(self.n):
            ei = self.e(i)
            for j in range(self.n):
                eij = self.mul(ei, self.e(j))
                for k in range(self.n):
                    ek = self.e(k)
                    if self.mul(eij, ek) != self.mul(ei, self.mul(self.e(j), ek)):
                        return (i, j, k)
        return None

    # -- involution

    def star_vec(self, a: Sequence) -> Vec:
        if self.star is None:
            raise ValueError("algebra has no involution")
        return self.star.apply([conj(x) for x in a])

    def star_defect(self) -> Optional[str]:
        """None if star is a conjugate-linear anti-multiplicative involution."""
        if self.star is None:
            return "no involution"
        for i in range(self.n):
            if self.star_vec(self.star_vec(self.e(i))) != self.e(i):
                return f"(e{i}*)* != e{i}"
        for i in range(self.n):
            for j in range(self.n):
                lhs = self.star_vec(self.mul(self.e(i), self.e(j)))
                rhs = self.mul(self.star_vec(self.e(j)), self.star_vec(self.e(i)))
                if lhs != rhs:
                    return f"(e{i}e{j})* != e{j}* e{i}*"
        return None

    # -- serialization

    def to_json(self) -> dict:
        mult = [[i, j, k, format_scalar(c)] for (i, j), row in sorted(self.table.items()) for k, c in row]
        d = {"labels": list(self.labels), "mult": mult}
        if self.star is not None:
            d["star"] = [[format_scalar(x) for x in r] for r in self.star.rows]
        return d

    @staticmethod
    def from_json(d: dict, name: str = "") -> "StructureAlgebra":
        labels = d["labels"]
        mult: Dict[Tuple[int, int], Dict[int, object]] = {}
        for entry in d["mult"]:
            if len(entry) != 4:
                raise ValueError(f"malformed structure constant {entry!r}")
            i, j, k, c = entry
            slot = mult.setdefault((int(i), int(j)), {})
            slot[int(k)] = slot.get(int(k), 0) + parse_scalar(c)
        star = None
        if d.get("star") is not None:
            star = Matrix([[parse_scalar(x) for x in r] for r in d["star"]])
        return StructureAlgebra(labels, mult, star, name)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return f"StructureAlgebra({self.name or 'anonymous'}, dim={self.n})"


# ---------------------------------------------------------------- health


@dataclass(frozen=True)
class AlgebraHealth:
    nondegenerate: bool
    idempotent: bool
    unital: bool
    local_units: bool
    unit: Optional[Tuple] = None
    note: str = "finite dimension: local units exist exactly when a unit exists"


def check_algebra_health(A: StructureAlgebra) -> AlgebraHealth:
    n = A.n
    # a -> (x -> a x) injective, and a -> (x -> x a) injective
    left_cols = [{(j, k): c for j in range(n) for k, c in A.basis_product(i, j)} for i in range(n)]
    right_cols = [{(j, k): c for j in range(n) for k, c in A.basis_product(j, i)} for i in range(n)]
    nondeg = sparse_rank(left_cols) == n and sparse_rank(right_cols) == n
    products = [{k: c for k, c in A.basis_product(i, j)} for i in range(n) for j in range(n)]
    idem = sparse_rank(products) == n
    u = A.unit()
    return AlgebraHealth(nondeg, idem, u is not None, u is not None, tuple(u) if u is not None else None)


# ---------------------------------------------------------------- multipliers


@dataclass(frozen=True, eq=False)
class Multiplier:
    """Pair (t_L, t_R) with t_L(x) = m x and t_R(x) = x m."""

    left_action: LinearMap
    right_action: LinearMap

    def defect(self, A: StructureAlgebra) -> Optional[str]:
        L, R = self.left_action.matrix, self.right_action.matrix
        for a in range(A.n):
            ea = A.e(a)
            Ra = R.apply(ea)
            La = L.apply(ea)
            for b in range(A.n):
                eb = A.e(b)
                if A.mul(Ra, eb) != A.mul(ea, L.apply(eb)):
                    return f"t_R(e{a})e{b} != e{a}t_L(e{b})"
                ab = A.mul(ea, eb)
                if L.apply(ab) != A.mul(La, eb):
                    return f"t_L(e{a}e{b}) != t_L(e{a})e{b}"
                if R.apply(ab) != A.mul(ea, R.apply(eb)):
                    return f"t_R(e{a}e{b}) != e{a}t_R(e{b})"
        return None

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        # (mn)x = m(nx), x(mn) = (xm)n
        return Multiplier(self.left_action @ other.left_action, other.right_action @ self.right_action)

    @staticmethod
    def of_element(A: StructureAlgebra, a: Sequence) -> "Multiplier":
        return Multiplier(LinearMap(A.space, A.space, A.left_mult_matrix(a)),
                          LinearMap(A.space, A.space, A.right_mult_matrix(a)))


@dataclass(frozen=True, eq=False)
class MultiplierAlgebra:
    algebra: StructureAlgebra
    multipliers: Tuple[Multiplier, ...]
    embedding: LinearMap

    @property
    def is_isomorphism(self) -> bool:
        return self.embedding.matrix.nrows == self.embedding.matrix.ncols and self.embedding.matrix.rank() == self.algebra.n


def multiplier_algebra(A: StructureAlgebra) -> MultiplierAlgebra:
    """All compatible pairs (t_L, t_R), solved as a linear subspace of End(A) + End(A)."""
    h = check_algebra_health(A)
    if not h.nondegenerate:
        raise ValueError("multiplier algebra needs a non-degenerate algebra")
    if not h.idempotent:
        raise ValueError("multiplier algebra needs an idempotent algebra")
    n = A.n
    # unknown L[k][j] = coefficient of e_k in t_L(e_j) -> index k*n + j ; R likewise offset by n*n
    def li(k, j):
        return k * n + j

    def ri(k, j):
        return n * n + k * n + j

    eqs = []
    for a in range(n):
        for b in range(n):
            # t_R(e_a) e_b - e_a t_L(e_b) = 0
            rows: Dict[int, Dict[int, object]] = {}
            for k in range(n):
                for m, c in A.basis_product(k, b):
                    rows.setdefault(m, {})
                    rows[m][ri(k, a)] = rows[m].get(ri(k, a), 0) + c
                for m, c in A.basis_product(a, k):
                    rows.setdefault(m, {})
                    rows[m][li(k, b)] = rows[m].get(li(k, b), 0) - c
            eqs.extend((r, 0) for r in rows.values())
            # t_L(e_a e_b) = t_L(e_a) e_b and t_R(e_a e_b) = e_a t_R(e_b)
            ab = A.basis_product(a, b)
            for side in ("L", "R"):
                rows = {}
                for p, c in ab:
                    for m in range(n):
                        idx = li(m, p) if side == "L" else ri(m, p)
                        rows.setdefault(m, {})
                        rows[m][idx] = rows[m].get(idx, 0) + c
                for k in range(n):
                    pr = A.basis_product(k, b) if side == "L" else A.basis_product(a, k)
                    idx = li(k, a) if side == "L" else ri(k, b)
                    for m, c in pr:
                        rows.setdefault(m, {})
                        rows[m][idx] = rows[m].get(idx, 0) - c
                eqs.extend((r, 0) for r in rows.values())
    sol = solve_sparse(eqs, 2 * n * n)
    free = sol.free

    def unpack(v):
        L = Matrix([[v[li(k, j)] for j in range(n)] for k in range(n)], n)
        R = Matrix([[v[ri(k, j)] for j in range(n)] for k in range(n)], n)
        return Multiplier(LinearMap(A.space, A.space, L), LinearMap(A.space, A.space, R))

    def pack(m: Multiplier):
        L, R = m.left_action.matrix.rows, m.right_action.matrix.rows
        return [L[k][j] for k in range(n) for j in range(n)] + [R[k][j] for k in range(n) for j in range(n)]

    def coords(m: Multiplier):
        v = pack(m)
        return [v[f] for f in free]

    mults = [unpack(v) for v in sol.kernel]
    d = len(mults)
    table: Dict[Tuple[int, int], Dict[int, object]] = {}
    for i in range(d):
        for j in range(d):
            c = coords(mults[i] * mults[j])
            table[(i, j)] = {k: x for k, x in enumerate(c) if x != 0}
    M = StructureAlgebra([f"m{i}" for i in range(d)], table, name=f"M({A.name})")
    emb = Matrix.from_columns([coords(Multiplier.of_element(A, A.e(i))) for i in range(n)], d)
    return MultiplierAlgebra(M, tuple(mults), LinearMap(A.space, M.space, emb))


# ---------------------------------------------------------------- modules


@dataclass(frozen=True, eq=False)
class ModuleStructure:
    algebra: StructureAlgebra
    carrier: LabeledSpace
    action: Callable[[Sequence, Sequence], Vec]
    side: str = "left"

    def defect(self) -> Optional[str]:
        A = self.algebra
        m = self.carrier.dim
        for i in range(A.n):
            for j in range(A.n):
                xy = A.mul(A.e(i), A.e(j))
                for k in range(m):
                    v = basis_vec(m, k)
                    if self.side == "left":
                        lhs = self.action(A.e(i), self.action(A.e(j), v))
                        rhs = self.action(xy, v)
                    else:
                        lhs = self.action(self.action(v, A.e(i)), A.e(j))
                        rhs = self.action(v, xy)
                    if lhs != rhs:
                        return f"action not multiplicative at (e{i}, e{j}, m{k})"
        return None


# ---------------------------------------------------------------- functionals


@dataclass(frozen=True, eq=False)
class Functional:
    algebra: StructureAlgebra
    coefficients: Tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(scalar(c) for c in self.coefficients))
        if len(self.coefficients) != self.algebra.n:
            raise ValueError("functional has the wrong number of coefficients")

    def __call__(self, a: Sequence):
        return dot(self.coefficients, a)

    def left_by(self, a: Sequence) -> "Functional":
        """a.w = w( . a)."""
        A = self.algebra
        return Functional(A, tuple(self(A.mul(A.e(c), a)) for c in range(A.n)))

    def right_by(self, b: Sequence) -> "Functional":
        """w.b = w(b . )."""
        A = self.algebra
        return Functional(A, tuple(self(A.mul(b, A.e(c))) for c in range(A.n)))

    def compose(self, m: Matrix) -> "Functional":
        """w o T for a linear endomorphism T."""
        return Functional(self.algebra, tuple(m.T.apply(list(self.coefficients))))

    def __eq__(self, other):
        if not isinstance(other, Functional):
            return NotImplemented
        return self.coefficients == other.coefficients

    __hash__ = None

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(self.algebra, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def scale(self, c) -> "Functional":
        return Functional(self.algebra, tuple(c * a for a in self.coefficients))

    def gram(self) -> Matrix:
        """G[j][k] = w(e_j e_k)."""
        A = self.algebra
        return Matrix([[self(A.mul(A.e(j), A.e(k))) for k in range(A.n)] for j in range(A.n)], A.n)


def is_faithful(w: Functional) -> bool:
    """d -> d.w and d -> w.d both injective."""
    G = w.gram()
    n = w.algebra.n
    # (d.w)(c) = w(c d) = (G d)_c ; (w.d)(c) = w(d c) = (G^T d)_c
    return G.rank() == n and G.T.rank() == n


def modular_automorphism_of(w: Functional) -> Optional[Matrix]:
    """sigma with w(ab) = w(b sigma(a)), checked to be an algebra automorphism."""
    if not is_faithful(w):
        raise ValueError("modular automorphism requires a faithful functional")
    A = w.algebra
    n = A.n
    G = w.gram()
    # column i solves sum_k G[j][k] s_k = w(e_i e_j) for all j
    cols = []
    for i in range(n):
        rhs = [w(A.mul(A.e(i), A.e(j))) for j in range(n)]
        x, ker = G.solve(rhs)
        if x is None:
            return None
        cols.append(x)
    S = Matrix.from_columns(cols, n)
    if S.rank() != n:
        return None
    for i in range(n):
        si = S.apply(A.e(i))
        for j in range(n):
            if S.apply(A.mul(A.e(i), A.e(j))) != A.mul(si, S.apply(A.e(j))):
                return None
    return S
