"""Base weights, adapted functionals, integrals, convolution operators and
modular data on a verified (unital, finite-dimensional) Hopf algebroid.

Sweedler-free conventions used throughout, with a, b basis elements:

    D_B(b)(a (x) 1) = T_lambda(a (x) b)     D_B(a)(1 (x) b) = T_rho(a (x) b)
    (a (x) 1)D_C(b) = lT(a (x) b)           (1 (x) b)D_C(a) = rT(a (x) b)

Functional actions: (a.w)(b) = w(ba), (w.a)(b) = w(ab).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import (Functional, Multiplier, StructureAlgebra, Tensor, add, basis_vec, is_faithful,
                      modular_automorphism_of, multiplier_algebra, sub, zero)
from .algebroid import HopfAlgebroid, VerificationReport, canonical_tag
from .exactlin import LabeledSpace, LinearMap, Matrix, Q, Subspace, conj, is_real

Vec = List


def _nonneg(c) -> bool:
    if not is_real(c):
        return False
    return (c.re if hasattr(c, "re") else c) >= 0


@dataclass
class BaseWeight:
    """Functionals on B and C, given by their values on the chosen bases."""

    mu_B: Tuple
    mu_C: Tuple

    def __post_init__(self):
        from .exactlin import scalar
        self.mu_B = tuple(scalar(c) for c in self.mu_B)
        self.mu_C = tuple(scalar(c) for c in self.mu_C)

    def to_json(self) -> dict:
        from .exactlin import format_scalar
        return {"mu_B": [format_scalar(c) for c in self.mu_B], "mu_C": [format_scalar(c) for c in self.mu_C]}


@dataclass
class AdaptedFunctional:
    """A functional together with its four factorizations through the base weight."""

    omega: Functional
    omega_Bleft: LinearMap   # A -> B, omega(xa) = mu_B(x . omega_Bleft(a))
    omega_Bright: LinearMap  # A -> B, omega(ax) = mu_B(omega_Bright(a) . x)
    omega_Cleft: LinearMap   # A -> C
    omega_Cright: LinearMap  # A -> C
    H: HopfAlgebroid = field(repr=False, compare=False, default=None)

    def bl(self, a) -> Vec:
        return self.H.B.vec(self.omega_Bleft(a))

    def br(self, a) -> Vec:
        return self.H.B.vec(self.omega_Bright(a))

    def cl(self, a) -> Vec:
        return self.H.C.vec(self.omega_Cleft(a))

    def cr(self, a) -> Vec:
        return self.H.C.vec(self.omega_Cright(a))

    @property
    def coefficients(self):
        return self.omega.coefficients


@dataclass
class Integral:
    base: AdaptedFunctional
    side: str  # "left" | "right"
    full: bool
    faithful: bool

    @property
    def functional(self) -> Functional:
        return self.base.omega


@dataclass
class InvarianceResult:
    delta_B: bool
    delta_C: bool
    bimodule: bool
    strong: bool
    witness: str = ""

    @property
    def invariant(self) -> bool:
        return self.delta_B and self.delta_C and self.bimodule

    @property
    def consistent(self) -> bool:
        """The three characterizations agree."""
        return self.delta_B == self.delta_C == self.strong


@dataclass
class ConvolutionOperators:
    """Columns are images of basis elements; the unprimed variants use the left
    factorizations, the primed ones the right factorizations."""

    lam: Matrix        # lambda(_B u)
    lam_prime: Matrix  # lambda(u_B)
    rho: Matrix        # rho(_C u)
    rho_prime: Matrix  # rho(u_C)

    def lam_multiplier(self, A: StructureAlgebra, a) -> Multiplier:
        return Multiplier(LinearMap(A.space, A.space, A.left_mult_matrix(self.lam.apply(a))),
                          LinearMap(A.space, A.space, A.right_mult_matrix(self.lam_prime.apply(a))))

    def rho_multiplier(self, A: StructureAlgebra, a) -> Multiplier:
        return Multiplier(LinearMap(A.space, A.space, A.left_mult_matrix(self.rho.apply(a))),
                          LinearMap(A.space, A.space, A.right_mult_matrix(self.rho_prime.apply(a))))


@dataclass
class ModularData:
    sigma_phi: Matrix
    sigma_psi: Matrix
    delta: Multiplier
    delta_dag: Multiplier
    delta_vec: Vec
    delta_dag_vec: Vec
    theta: Matrix  # on B-coordinates, defined on the image of phi_B
    psi: "Integral"
    sigmas_commute: bool


@dataclass
class TensorFunctional:
    tag: str
    values: Dict[Tuple[int, int], object]
    well_defined: bool
    witness: str = ""

    def __call__(self, t: Tensor):
        return sum((c * self.values[k] for k, c in t.items()), Q(0))


class Integration:
    """Integration theory for a verified algebroid H with base weight mu."""

    def __init__(self, H: HopfAlgebroid, mu: BaseWeight):
        if H.unit is None:
            raise ValueError("integration requires a unital total algebra")
        if H.antipode() is None or H.counits() is None:
            raise ValueError("integration requires counits and antipode")
        if len(mu.mu_B) != H.B.dim or len(mu.mu_C) != H.C.dim:
            raise ValueError("base weight has the wrong number of coefficients")
        self.H, self.mu, self.A, self.n = H, mu, H.A, H.n
        self.spaceB = LabeledSpace.standard(H.B.dim, "x")
        self.spaceC = LabeledSpace.standard(H.C.dim, "y")
        self.G_B = Matrix([[self.muB(H.A.mul(x, xx)) for xx in H.B.vectors] for x in H.B.vectors], H.B.dim)
        self.G_C = Matrix([[self.muC(H.A.mul(y, yy)) for yy in H.C.vectors] for y in H.C.vectors], H.C.dim)
        self._tcache: Dict[str, Dict] = {k: {} for k in H._T}
        self._S2 = H.antipode() @ H.antipode()
        self._Sinv = H.antipode().inverse()

    # ------------------------------------------------------------ base weight

    def muB(self, x) -> object:
        c = self.H.B.coords(x)
        if c is None:
            raise ValueError("mu_B applied outside B")
        return sum((a * b for a, b in zip(self.mu.mu_B, c)), Q(0))

    def muC(self, y) -> object:
        c = self.H.C.coords(y)
        if c is None:
            raise ValueError("mu_C applied outside C")
        return sum((a * b for a, b in zip(self.mu.mu_C, c)), Q(0))

    def faithful_base(self) -> bool:
        return self.G_B.rank() == self.H.B.dim and self.G_C.rank() == self.H.C.dim

    def sigma_B(self) -> Matrix:
        """S_B^-1 S_C^-1 on B-coordinates."""
        return (self.H.S_C @ self.H.S_B).inverse()

    def sigma_C(self) -> Matrix:
        """S_B S_C on C-coordinates."""
        return self.H.S_B @ self.H.S_C

    def check_base_weight(self) -> Tuple[bool, str]:
        H, A = self.H, self.A
        if not self.faithful_base():
            return False, "mu_B or mu_C is not faithful"
        for i, y in enumerate(H.C.vectors):
            if self.muB(H.S_C_apply(y)) != self.muC(y):
                return False, f"mu_B(S_C(y{i})) != mu_C(y{i})"
        for i, x in enumerate(H.B.vectors):
            if self.muC(H.S_B_apply(x)) != self.muB(x):
                return False, f"mu_C(S_B(x{i})) != mu_B(x{i})"
        for a in range(self.n):
            ea = A.e(a)
            if self.muB(H.eps_B(ea)) != self.muC(H.eps_C(ea)):
                return False, f"mu_B(eps_B(e{a})) != mu_C(eps_C(e{a}))"
        if A.star is not None:
            for base, mu, nm in ((H.B, self.muB, "mu_B"), (H.C, self.muC, "mu_C")):
                vs = base.vectors
                samples = list(vs) + [add(u, v) for u, v in itertools.combinations(vs, 2)]
                for i, x in enumerate(vs):
                    if mu(A.star_vec(x)) != conj(mu(x)):
                        return False, f"{nm} is not self-adjoint"
                for x in samples:
                    if not _nonneg(mu(A.mul(A.star_vec(x), x))):
                        return False, f"{nm} is not positive"
        return True, ""

    def check_counit_kms(self) -> Tuple[bool, str]:
        H, A = self.H, self.A
        for base, mu, sig, nm in ((H.B, self.muB, self.sigma_B(), "B"), (H.C, self.muC, self.sigma_C(), "C")):
            for i, x in enumerate(base.vectors):
                sx = base.vec(sig.apply(basis_vec(base.dim, i)))
                for j, xx in enumerate(base.vectors):
                    if mu(A.mul(x, xx)) != mu(A.mul(xx, sx)):
                        return False, f"modular relation fails on {nm} basis pair ({i}, {j})"
        return True, ""

    # ------------------------------------------------------------ factorization

    def factorize(self, omega: Functional) -> Optional[AdaptedFunctional]:
        """The four factorizations, or None when omega is not adapted."""
        H, A, n = self.H, self.A, self.n
        if not self.faithful_base():
            return None
        w = omega
        mats = []
        for base, G, left in ((H.B, self.G_B, True), (H.B, self.G_B, False), (H.C, self.G_C, True),
                              (H.C, self.G_C, False)):
            M = G if left else G.T
            cols = []
            for a in range(n):
                ea = A.e(a)
                rhs = [w(A.mul(x, ea)) if left else w(A.mul(ea, x)) for x in base.vectors]
                x, ker = M.solve(rhs)
                if x is None or ker:
                    return None
                cols.append(x)
            mats.append(Matrix.from_columns(cols, base.dim))
        sp = (self.spaceB, self.spaceB, self.spaceC, self.spaceC)
        maps = [LinearMap(A.space, s, m) for s, m in zip(sp, mats)]
        af = AdaptedFunctional(w, *maps, H=H)
        # the module identities are what make this a factorization; confirm them
        for a in range(n):
            ea = A.e(a)
            for x in H.B.vectors:
                if w(A.mul(x, ea)) != self.muB(A.mul(x, af.bl(ea))) or w(A.mul(ea, x)) != self.muB(A.mul(af.br(ea), x)):
                    return None
            for y in H.C.vectors:
                if w(A.mul(y, ea)) != self.muC(A.mul(y, af.cl(ea))) or w(A.mul(ea, y)) != self.muC(A.mul(af.cr(ea), y)):
                    return None
        return af

    def functional(self, coeffs) -> Functional:
        return Functional(self.A, tuple(coeffs))

    # ------------------------------------------------------------ tensors from the canonical maps

    def T(self, name: str, a: int, b: int) -> Tensor:
        c = self._tcache[name]
        if (a, b) not in c:
            c[(a, b)] = self.H._T[name]({(a, b): Q(1)})
        return c[(a, b)]

    def _contract(self, t: Tensor, f: Callable[[int, int], Vec]) -> Vec:
        out = zero(self.n)
        for (p, q), c in t.items():
            v = f(p, q)
            for k, x in enumerate(v):
                if x != 0:
                    out[k] += c * x
        return out

    def _table(self, f: Callable[[Vec], Vec]) -> List[Vec]:
        return [f(self.A.e(i)) for i in range(self.n)]

    # ------------------------------------------------------------ invariance

    def _left_pieces(self, af: AdaptedFunctional):
        H, A = self.H, self.A
        u = self._table(lambda a: H.S_B_inv_apply(af.cl(a)))      # S_B^-1 _C phi
        v = self._table(lambda a: H.S_C_apply(af.cr(a)))          # S_C phi_C
        cl = self._table(af.cl)
        cr = self._table(af.cr)
        return u, v, cl, cr

    def left_defects(self, af: AdaptedFunctional) -> Tuple[List[Vec], List[Vec]]:
        """Residuals of the Delta_B and Delta_C left-invariance identities over all basis pairs."""
        A, n = self.A, self.n
        u, v, cl, cr = self._left_pieces(af)
        dB, dC = [], []
        for a in range(n):
            for b in range(n):
                ea, eb = A.e(a), A.e(b)
                lhs = self._contract(self.T("T_lambda", a, b), lambda p, q: A.mul(u[q], A.e(p)))
                dB.append(sub(lhs, A.mul(cl[b], ea)))
                lhs = self._contract(self.T("lT", a, b), lambda p, q: A.mul(A.e(p), v[q]))
                dC.append(sub(lhs, A.mul(ea, cr[b])))
        return dB, dC

    def right_defects(self, af: AdaptedFunctional) -> Tuple[List[Vec], List[Vec]]:
        A, H, n = self.A, self.H, self.n
        u = self._table(lambda a: H.S_B_apply(af.bl(a)))
        v = self._table(lambda a: H.S_C_inv_apply(af.br(a)))
        bl, br = self._table(af.bl), self._table(af.br)
        dB, dC = [], []
        for a in range(n):
            for b in range(n):
                ea, eb = A.e(a), A.e(b)
                lhs = self._contract(self.T("T_rho", a, b), lambda p, q: A.mul(u[p], A.e(q)))
                dB.append(sub(lhs, A.mul(bl[a], eb)))
                lhs = self._contract(self.T("rT", a, b), lambda p, q: A.mul(A.e(q), v[p]))
                dC.append(sub(lhs, A.mul(eb, br[a])))
        return dB, dC

    def strong_left_defects(self, f: Callable[[Vec], Vec]) -> List[Vec]:
        """S(sum S_B^-1(f(q)) p over D_B(a)(1 (x) b)) - sum p S_C(f(q)) over (1 (x) a)D_C(b)."""
        A, H, n = self.A, self.H, self.n
        u = self._table(lambda a: H.S_B_inv_apply(f(a)))
        v = self._table(lambda a: H.S_C_apply(f(a)))
        out = []
        for a in range(n):
            for b in range(n):
                lhs = H.S(self._contract(self.T("T_rho", a, b), lambda p, q: A.mul(u[q], A.e(p))))
                rhs = self._contract(self.T("rT", b, a), lambda p, q: A.mul(A.e(p), v[q]))
                out.append(sub(lhs, rhs))
        return out

    def strong_right_defects(self, f: Callable[[Vec], Vec]) -> List[Vec]:
        """S(sum q S_C^-1(f(p)) over (a (x) 1)D_C(b)) - sum S_B(f(p)) q over D_B(a)(b (x) 1)."""
        A, H, n = self.A, self.H, self.n
        u = self._table(lambda a: H.S_C_inv_apply(f(a)))
        v = self._table(lambda a: H.S_B_apply(f(a)))
        out = []
        for a in range(n):
            for b in range(n):
                lhs = H.S(self._contract(self.T("lT", a, b), lambda p, q: A.mul(A.e(q), u[p])))
                rhs = self._contract(self.T("T_lambda", b, a), lambda p, q: A.mul(v[p], A.e(q)))
                out.append(sub(lhs, rhs))
        return out

    @staticmethod
    def _first_nonzero(ds: List[Vec]) -> Optional[int]:
        for i, d in enumerate(ds):
            if any(x != 0 for x in d):
                return i
        return None

    def is_left_integral(self, af: AdaptedFunctional) -> InvarianceResult:
        n = self.n
        dB, dC = self.left_defects(af)
        iB, iC = self._first_nonzero(dB), self._first_nonzero(dC)
        bim = all(af.cl(self.A.e(a)) == af.cr(self.A.e(a)) for a in range(n))
        st = self._first_nonzero(self.strong_left_defects(af.cl))
        w = ""
        for nm, i in (("Delta_B", iB), ("Delta_C", iC), ("strong", st)):
            if i is not None:
                w = f"{nm} left invariance fails at pair ({i // n}, {i % n})"
                break
        return InvarianceResult(iB is None, iC is None, bim, st is None, w)

    def is_right_integral(self, af: AdaptedFunctional) -> InvarianceResult:
        n = self.n
        dB, dC = self.right_defects(af)
        iB, iC = self._first_nonzero(dB), self._first_nonzero(dC)
        bim = all(af.bl(self.A.e(a)) == af.br(self.A.e(a)) for a in range(n))
        st = self._first_nonzero(self.strong_right_defects(af.bl))
        w = ""
        for nm, i in (("Delta_B", iB), ("Delta_C", iC), ("strong", st)):
            if i is not None:
                w = f"{nm} right invariance fails at pair ({i // n}, {i % n})"
                break
        return InvarianceResult(iB is None, iC is None, bim, st is None, w)

    def integral_space(self, side: str) -> Subspace:
        """All adapted functionals satisfying both invariance identities on the given side."""
        n = self.n
        cols = []
        for m in range(n):
            af = self.factorize(self.functional(basis_vec(n, m)))
            if af is None:
                raise ValueError("base weight is not faithful")
            dB, dC = self.left_defects(af) if side == "left" else self.right_defects(af)
            col = [x for d in dB + dC for x in d]
            cols.append(col)
        M = Matrix.from_columns(cols, len(cols[0]))
        return Subspace.span(self.A.space, M.kernel())

    def make_integral(self, omega: Functional, side: str) -> Optional[Integral]:
        af = self.factorize(omega)
        if af is None:
            return None
        inv = self.is_left_integral(af) if side == "left" else self.is_right_integral(af)
        if not inv.invariant:
            return None
        return Integral(af, side, self.is_full(af, side), is_faithful(omega))

    def is_full(self, af: AdaptedFunctional, side: str) -> bool:
        if side == "left":
            return af.omega_Bleft.matrix.rank() == self.H.B.dim and af.omega_Bright.matrix.rank() == self.H.B.dim
        return af.omega_Cleft.matrix.rank() == self.H.C.dim and af.omega_Cright.matrix.rank() == self.H.C.dim

    def find_full_faithful(self, side: str) -> Optional[Integral]:
        """A full and faithful integral from the solution space, preferring simple combinations."""
        sp = self.integral_space(side)
        basis = [list(v) for v in sp.basis]
        if not basis:
            return None
        cands = list(basis) + [[sum(c) for c in zip(*basis)]]
        for k, (u, v) in enumerate(itertools.combinations(basis, 2)):
            cands.append([x + (k + 2) * y for x, y in zip(u, v)])
        for c in cands:
            I = self.make_integral(self.functional(c), side)
            if I is not None and I.full and I.faithful:
                return I
        return None

    # ------------------------------------------------------------ antipode transport

    def antipode_transport(self, I: Integral, inverse: bool = False) -> Integral:
        """omega o S (or omega o S^-1) with factorizations from the transport formulas."""
        H, A = self.H, self.A
        S = self._Sinv if inverse else H.antipode()
        af = I.base
        w = I.functional.compose(S)
        if inverse:
            fB, fC = H.S_C, H.S_B   # C -> B, B -> C
        else:
            fB, fC = H.S_B.inverse(), H.S_C.inverse()
        bl = fB @ af.omega_Cright.matrix @ S
        br = fB @ af.omega_Cleft.matrix @ S
        cl = fC @ af.omega_Bright.matrix @ S
        cr = fC @ af.omega_Bleft.matrix @ S
        new = AdaptedFunctional(w, LinearMap(A.space, self.spaceB, bl), LinearMap(A.space, self.spaceB, br),
                                LinearMap(A.space, self.spaceC, cl), LinearMap(A.space, self.spaceC, cr), H=H)
        side = "right" if I.side == "left" else "left"
        return Integral(new, side, self.is_full(new, side), is_faithful(w))

    @staticmethod
    def same_factorization(x: AdaptedFunctional, y: AdaptedFunctional) -> bool:
        return (x.omega == y.omega and x.omega_Bleft == y.omega_Bleft and x.omega_Bright == y.omega_Bright
                and x.omega_Cleft == y.omega_Cleft and x.omega_Cright == y.omega_Cright)

    # ------------------------------------------------------------ convolution operators

    def lam_left(self, f: Callable[[Vec], Vec]) -> Matrix:
        """a -> sum S_B(f(p)) q over D_B(a), for f: A -> B left B-linear."""
        H, A = self.H, self.A
        u = self._table(lambda a: H.S_B_apply(f(a)))
        return Matrix.from_columns([self._contract(H.D_B[a], lambda p, q: A.mul(u[p], A.e(q)))
                                    for a in range(self.n)], self.n)

    def lam_right(self, f: Callable[[Vec], Vec]) -> Matrix:
        """a -> sum q S_C^-1(f(p)) over D_C(a), for f: A -> B right B-linear."""
        H, A = self.H, self.A
        u = self._table(lambda a: H.S_C_inv_apply(f(a)))
        return Matrix.from_columns([self._contract(H.D_C[a], lambda p, q: A.mul(A.e(q), u[p]))
                                    for a in range(self.n)], self.n)

    def rho_left(self, f: Callable[[Vec], Vec]) -> Matrix:
        """a -> sum S_B^-1(f(q)) p over D_B(a), for f: A -> C left C-linear."""
        H, A = self.H, self.A
        u = self._table(lambda a: H.S_B_inv_apply(f(a)))
        return Matrix.from_columns([self._contract(H.D_B[a], lambda p, q: A.mul(u[q], A.e(p)))
                                    for a in range(self.n)], self.n)

    def rho_right(self, f: Callable[[Vec], Vec]) -> Matrix:
        """a -> sum p S_C(f(q)) over D_C(a), for f: A -> C right C-linear."""
        H, A = self.H, self.A
        u = self._table(lambda a: H.S_C_apply(f(a)))
        return Matrix.from_columns([self._contract(H.D_C[a], lambda p, q: A.mul(A.e(p), u[q]))
                                    for a in range(self.n)], self.n)

    def convolution_operators(self, af: AdaptedFunctional) -> ConvolutionOperators:
        return ConvolutionOperators(self.lam_left(af.bl), self.lam_right(af.br),
                                    self.rho_left(af.cl), self.rho_right(af.cr))

    # ------------------------------------------------------------ relative tensor products of functionals

    def functional_tensor(self, u: AdaptedFunctional, w: AdaptedFunctional, tag: str) -> TensorFunctional:
        """The functional induced by u and w on the balanced tensor product with the given tag."""
        H, A, n = self.H, self.A, self.n
        tag = canonical_tag(tag)
        if u is None or w is None:
            raise ValueError("both functionals need factorizations")
        U, W = u.omega, w.omega
        if tag == "oob":
            f1 = lambda a, b: U(A.mul(A.e(a), w.bl(A.e(b))))
            f2 = lambda a, b: W(A.mul(u.br(A.e(a)), A.e(b)))
        elif tag == "ooB":
            f1 = lambda a, b: U(A.mul(w.br(A.e(b)), A.e(a)))
            f2 = lambda a, b: W(A.mul(A.e(b), u.bl(A.e(a))))
        elif tag == "ool":
            f1 = lambda a, b: U(A.mul(H.S_B_inv_apply(w.cl(A.e(b))), A.e(a)))
            f2 = lambda a, b: W(A.mul(H.S_B_apply(u.bl(A.e(a))), A.e(b)))
        elif tag == "ooc":
            f1 = lambda a, b: U(A.mul(A.e(a), w.cl(A.e(b))))
            f2 = lambda a, b: W(A.mul(u.cr(A.e(a)), A.e(b)))
        elif tag == "ooC":
            f1 = lambda a, b: U(A.mul(w.cr(A.e(b)), A.e(a)))
            f2 = lambda a, b: W(A.mul(A.e(b), u.cl(A.e(a))))
        elif tag == "oor":
            f1 = lambda a, b: U(A.mul(A.e(a), H.S_C_apply(w.cr(A.e(b)))))
            f2 = lambda a, b: W(A.mul(A.e(b), H.S_C_inv_apply(u.br(A.e(a)))))
        else:
            raise ValueError(f"unknown tensor variant {tag!r}")
        vals = {}
        ok, wit = True, ""
        for a in range(n):
            for b in range(n):
                v1 = f1(a, b)
                vals[(a, b)] = v1
                if ok and v1 != f2(a, b):
                    ok, wit = False, f"the two factorized forms differ at ({a}, {b})"
        tf = TensorFunctional(tag, vals, ok, wit)
        if ok:
            for r in H.relations(tag):
                if tf(r) != 0:
                    tf.well_defined, tf.witness = False, "does not annihilate the balancing relations"
                    break
        return tf

    # ------------------------------------------------------------ modular data

    def modular_data(self, phi: Integral) -> ModularData:
        if phi.side != "left" or not phi.full or not phi.faithful:
            raise ValueError("modular data requires a full and faithful left integral")
        A, H, n = self.A, self.H, self.n
        w = phi.functional
        sig = modular_automorphism_of(w)
        psi = self.antipode_transport(phi, inverse=True)
        sig_psi = modular_automorphism_of(psi.functional)
        if sig is None or sig_psi is None:
            raise ValueError("no modular automorphism")
        G = w.gram()
        delta, k1 = G.T.solve(list(psi.functional.coefficients))      # phi o S^-1 = phi . delta
        phiS = w.compose(H.antipode())
        delta_dag, k2 = G.solve(list(phiS.coefficients))              # phi o S = delta_dag . phi
        theta = self.theta(phi.base)
        return ModularData(sig, sig_psi, Multiplier.of_element(A, delta), Multiplier.of_element(A, delta_dag),
                           delta, delta_dag, theta, psi, sig @ sig_psi == sig_psi @ sig)

    def theta(self, af: AdaptedFunctional) -> Optional[Matrix]:
        """phi_B(a) -> _B phi(a) on B-coordinates; None if not well defined on the image."""
        R, L = af.omega_Bright.matrix, af.omega_Bleft.matrix
        dB = self.H.B.dim
        for k in R.kernel():
            if any(x != 0 for x in L.apply(k)):
                return None
        cols = []
        for i in range(dB):
            x, _ = R.solve(basis_vec(dB, i))
            if x is None:
                return None
            cols.append(L.apply(x))
        return Matrix.from_columns(cols, dB)


# ====================================================================== the report


_NAMES = ("base-weight", "counit-kms", "base-counit", "base-counit-mult", "invariance-canonical-left",
          "invariance-canonical-right", "dg:strong-invariance-left", "dg:strong-invariance-right",
          "integrals-oo-left", "integrals-oo-right", "integrals-antipode", "integrals-uniqueness",
          "uniqueness-phi-psi", "uniqueness-full", "corollary-full", "convolution-counit", "convolution",
          "dual-strong-invariance", "modular", "modular-automorphism", "bphi-phib", "modular-element",
          "modular-element-second", "modular-intertwining", "integrals-faithful", "extension-multipliers")


@dataclass
class MeasuredData:
    """Everything the later stages need from a successful integration run."""

    integ: Integration
    phi: Integral
    psi: Integral
    modular: ModularData


def _span(A: StructureAlgebra, funcs: Sequence[Functional]) -> Subspace:
    return Subspace.span(A.space, [list(f.coefficients) for f in funcs])


def _span_vecs(A: StructureAlgebra, vecs) -> Subspace:
    return Subspace.span(A.space, [list(v) for v in vecs])


def verify_integration(H: HopfAlgebroid, mu: BaseWeight, phi: Optional[Functional] = None,
                       psi: Optional[Functional] = None, axioms_ok: bool = True
                       ) -> Tuple[VerificationReport, Optional[MeasuredData]]:
    """Run every integration check; returns the report and, if measured, the data."""
    rep = VerificationReport()
    done = set()

    def add(nm, ok, w=""):
        rep.add(nm, ok, w)
        done.add(nm)

    def skip_rest(reason):
        for nm in _NAMES:
            if nm not in done:
                rep.skip(nm, reason)
                done.add(nm)

    if not axioms_ok or H.counits() is None or H.antipode() is None or H.unit is None:
        skip_rest("regular")
        rep.summary["measured"] = False
        return rep, None
    try:
        I = Integration(H, mu)
    except ValueError as ex:
        add("base-weight", False, str(ex))
        skip_rest("base-weight")
        rep.summary["measured"] = False
        return rep, None
    A, n = H.A, H.n
    e = A.e

    ok, w = I.check_base_weight()
    add("base-weight", ok, w)
    if not ok:
        skip_rest("base-weight")
        rep.summary["measured"] = False
        return rep, None
    add("counit-kms", *I.check_counit_kms())

    # counit functional
    eps = Functional(A, tuple(I.muB(H.eps_B(e(a))) for a in range(n)))
    ea = I.factorize(eps)
    ok, w = ea is not None, "counit functional is not adapted"
    if ok:
        checks = [
            (ea.omega_Bleft.matrix == H.counits()[0], "_B eps != left counit"),
            (ea.omega_Cright.matrix == H.counits()[1], "eps_C != right counit"),
            (ea.omega_Bright.matrix == H.S_C @ H.counits()[1], "eps_B != S_C o eps_C"),
            (ea.omega_Cleft.matrix == H.S_B @ H.counits()[0], "_C eps != S_B o eps_B"),
            (eps.compose(H.antipode()) == eps, "eps o S != eps"),
        ]
        for c, msg in checks:
            if not c:
                ok, w = False, msg
                break
    add("base-counit", ok, w)
    ok, w = ea is not None, "no counit functional"
    if ok:
        for tag in ("oob", "ooc"):
            tf = I.functional_tensor(ea, ea, tag)
            if not tf.well_defined:
                ok, w = False, f"eps (x) eps on {tag}: {tf.witness}"
                break
            for a in range(n):
                for b in range(n):
                    if eps(A.mul(e(a), e(b))) != tf.values[(a, b)]:
                        ok, w = False, f"eps o m != eps (x) eps on {tag} at ({a}, {b})"
                        break
                if not ok:
                    break
            if not ok:
                break
    add("base-counit-mult", ok, w)

    # integrals
    if phi is not None:
        phiI = I.make_integral(phi, "left")
        af = I.factorize(phi)
    else:
        phiI = I.find_full_faithful("left")
        af = phiI.base if phiI else None
    if phiI is None and af is not None:
        res = I.is_left_integral(af)
        add("invariance-canonical-left", False, res.witness or "left invariance fails")
    elif phiI is None:
        add("invariance-canonical-left", False, "no left integral found")
    else:
        add("invariance-canonical-left", True, "")
    if psi is not None:
        psiI = I.make_integral(psi, "right")
        bf = I.factorize(psi)
    elif phiI is not None:
        psiI = I.antipode_transport(phiI, inverse=True)
        if not I.is_right_integral(psiI.base).invariant:
            psiI = None
        bf = psiI.base if psiI else None
    else:
        psiI = I.find_full_faithful("right")
        bf = psiI.base if psiI else None
    if psiI is None:
        wit = I.is_right_integral(bf).witness if bf is not None else "no right integral found"
        add("invariance-canonical-right", False, wit or "right invariance fails")
    else:
        add("invariance-canonical-right", True, "")

    # strong invariance and its equivalence with ordinary invariance, on the integral and all point masses
    for side, nm in (("left", "dg:strong-invariance-left"), ("right", "dg:strong-invariance-right")):
        target = phiI if side == "left" else psiI
        if target is None:
            rep.skip(nm, f"invariance-canonical-{side}")
            done.add(nm)
            continue
        ok, w = True, ""
        res = I.is_left_integral(target.base) if side == "left" else I.is_right_integral(target.base)
        if not res.strong:
            ok, w = False, res.witness
        for m in range(n):
            if not ok:
                break
            fm = I.factorize(I.functional(basis_vec(n, m)))
            r = I.is_left_integral(fm) if side == "left" else I.is_right_integral(fm)
            if not r.consistent:
                ok, w = False, f"invariance characterizations disagree on the point functional e{m}*"
        add(nm, ok, w)

    if phiI is None or psiI is None:
        skip_rest("invariance")
        rep.summary["measured"] = False
        return rep, None

    pf, qf = phiI.base, psiI.base
    point = [I.factorize(I.functional(basis_vec(n, m))) for m in range(n)]

    # tensor product identities for integrals
    def oo_check(pairs):
        for (lhs_u, lhs_w, lhs_tag, tmap, rhs_u, rhs_w, rhs_tag) in pairs:
            L = I.functional_tensor(lhs_u, lhs_w, lhs_tag)
            R = I.functional_tensor(rhs_u, rhs_w, rhs_tag)
            if not (L.well_defined and R.well_defined):
                return False, f"relative tensor functional not well defined on {lhs_tag if not L.well_defined else rhs_tag}"
            for a in range(n):
                for b in range(n):
                    if L(I.T(tmap, a, b)) != R.values[(a, b)]:
                        return False, f"{lhs_tag} o {tmap} != {rhs_tag} at ({a}, {b})"
        return True, ""

    ok, w = oo_check([(u, pf, "ool", "T_lambda", u, pf, "ooC") for u in point]
                     + [(u, pf, "oor", "lT", u, pf, "ooc") for u in point])
    add("integrals-oo-left", ok, w)
    ok, w = oo_check([(qf, u, "ool", "T_rho", qf, u, "oob") for u in point]
                     + [(qf, u, "oor", "rT", qf, u, "ooB") for u in point])
    add("integrals-oo-right", ok, w)

    # antipode transport
    ok, w = True, ""
    for I0 in (phiI, psiI):
        for inv in (False, True):
            tr = I.antipode_transport(I0, inverse=inv)
            fz = I.factorize(tr.functional)
            if fz is None or not Integration.same_factorization(fz, tr.base):
                ok, w = False, "transported factorizations disagree with direct factorization"
                break
            r = I.is_left_integral(tr.base) if tr.side == "left" else I.is_right_integral(tr.base)
            if not r.invariant:
                ok, w = False, f"transport of a {I0.side} integral is not a {tr.side} integral"
                break
            if I0.full and not tr.full:
                ok, w = False, "transport does not preserve fullness"
                break
        if not ok:
            break
    left_sp, right_sp = I.integral_space("left"), I.integral_space("right")
    if ok:
        S = H.antipode()
        img = _span(A, [Functional(A, tuple(v)).compose(S) for v in left_sp.basis])
        img2 = _span(A, [Functional(A, tuple(v)).compose(S) for v in right_sp.basis])
        if img != right_sp or img2 != left_sp:
            ok, w = False, "composition with S is not a bijection between left and right integrals"
    add("integrals-antipode", ok, w)

    # uniqueness
    ok, w = True, f"dim left = {left_sp.dim}, dim right = {right_sp.dim}"
    xs = [I.functional(phiI.functional.left_by(x).coefficients) for x in H.B.vectors]
    xs2 = [phiI.functional.right_by(x) for x in H.B.vectors]
    ys = [psiI.functional.left_by(y) for y in H.C.vectors]
    ys2 = [psiI.functional.right_by(y) for y in H.C.vectors]
    if not (phiI.full and phiI.faithful and psiI.full and psiI.faithful):
        ok, w = False, "integrals are not full and faithful"
    elif _span(A, xs).dim != H.B.dim or _span(A, ys).dim != H.C.dim:
        ok, w = False, "x -> x.phi is not injective"
    elif not (left_sp == _span(A, xs) == _span(A, xs2)):
        ok, w = False, "left integrals differ from B.phi or phi.B"
    elif not (right_sp == _span(A, ys) == _span(A, ys2)):
        ok, w = False, "right integrals differ from C.psi or psi.C"
    add("integrals-uniqueness", ok, w)

    phiF, psiF = phiI.functional, psiI.functional
    AbA = _span_vecs(A, [A.mul(e(i), pf.bl(e(j))) for i in range(n) for j in range(n)])
    AcA = _span_vecs(A, [A.mul(e(i), qf.cl(e(j))) for i in range(n) for j in range(n)])
    bAA = _span_vecs(A, [A.mul(pf.br(e(j)), e(i)) for i in range(n) for j in range(n)])
    cAA = _span_vecs(A, [A.mul(qf.cr(e(j)), e(i)) for i in range(n) for j in range(n)])
    ok, w = True, ""
    if _span(A, [psiF.left_by(z) for z in AbA.basis]) != _span(A, [phiF.left_by(z) for z in AcA.basis]):
        ok, w = False, "(A _B phi(A)).psi != (A _C psi(A)).phi"
    elif _span(A, [psiF.right_by(z) for z in bAA.basis]) != _span(A, [phiF.right_by(z) for z in cAA.basis]):
        ok, w = False, "psi.(phi_B(A)A) != phi.(psi_C(A)A)"
    add("uniqueness-phi-psi", ok, w)

    def Aw(f):
        return _span(A, [f.left_by(e(i)) for i in range(n)])

    def wA(f):
        return _span(A, [f.right_by(e(i)) for i in range(n)])

    ok, w = True, ""
    others = [Functional(A, tuple(v)) for v in list(left_sp.basis) + list(right_sp.basis)]
    for full in (phiF, psiF):
        big_l, big_r = Aw(full), wA(full)
        for o in others:
            if not all(big_l.contains(v) for v in Aw(o).basis) or not all(big_r.contains(v) for v in wA(o).basis):
                ok, w = False, "A.w' is not contained in A.w for a full integral w"
                break
    add("uniqueness-full", ok, w)

    ok = (pf.omega_Cleft.matrix.rank() == H.C.dim and qf.omega_Bleft.matrix.rank() == H.B.dim)
    add("corollary-full", ok, "" if ok else "_C phi or _B psi is not surjective")

    # convolution operators
    ident = Matrix.identity(n)
    ops_eps = I.convolution_operators(ea)
    ok = ops_eps.lam == ops_eps.rho == ops_eps.lam_prime == ops_eps.rho_prime == ident
    add("convolution-counit", ok, "" if ok else "convolution by the counit is not the identity")

    ok, w = _check_convolution(I, point, eps)
    add("convolution", ok, w)

    ok, w = True, ""
    for a in range(n):
        for b in range(n):
            f1 = lambda c, a=a: pf.cr(A.mul(e(a), c))
            f2 = lambda c, b=b: pf.cl(A.mul(c, e(b)))
            lhs = I.rho_right(f1).column(b)
            rhs = H.S(I.rho_left(f2).column(a))
            if lhs != rhs:
                ok, w = False, f"rho(phi_C.a)(b) != S(rho(b._C phi)(a)) at ({a}, {b})"
                break
            g1 = lambda c, a=a: qf.bl(A.mul(c, e(a)))
            g2 = lambda c, b=b: qf.br(A.mul(e(b), c))
            if I.lam_left(g1).column(b) != H.S(I.lam_right(g2).column(a)):
                ok, w = False, f"lambda(a._B psi)(b) != S(lambda(psi_B.b)(a)) at ({a}, {b})"
                break
        if not ok:
            break
    add("dual-strong-invariance", ok, w)

    ok = Aw(phiF) == wA(phiF) and Aw(psiF) == wA(psiF)
    add("modular", ok, "" if ok else "A.w != w.A for a full integral")

    try:
        md = I.modular_data(phiI)
    except ValueError as ex:
        add("modular-automorphism", False, str(ex))
        skip_rest("modular-automorphism")
        rep.summary["measured"] = False
        return rep, None

    add("modular-automorphism", *_check_modular_automorphism(I, md))
    add("bphi-phib", *_check_bphi_phib(I, phiI, md))
    add("modular-element", *_check_modular_element(I, phiI, right_sp))
    add("modular-element-second", *_check_modular_element_second(I, phiI, md, ea))
    add("modular-intertwining", *_check_modular_intertwining(I, md))

    ok, w = True, ""
    for sp, side in ((left_sp, "left"), (right_sp, "right")):
        for v in sp.basis:
            J = I.make_integral(Functional(A, tuple(v)), side)
            if J is not None and J.full and not J.faithful:
                ok, w = False, f"a full {side} integral is not faithful"
    add("integrals-faithful", ok, w or "full implies faithful on every sampled integral")

    add("extension-multipliers", *_check_extension(I, phiF, psiF))
    rep.summary["measured"] = rep.all_passed
    rep.summary["sigmas_commute"] = md.sigmas_commute
    return rep, MeasuredData(I, phiI, psiI, md)


def _check_convolution(I: Integration, point: List[AdaptedFunctional], eps: Functional) -> Tuple[bool, str]:
    A, H, n = I.A, I.H, I.n
    ops = [I.convolution_operators(u) for u in point]
    S = H.antipode()
    for m, (u, op) in enumerate(zip(point, ops)):
        if not (op.lam == op.lam_prime and op.rho == op.rho_prime):
            return False, f"left and right variants of the convolution operators differ for e{m}*"
        for M in (op.lam, op.rho):
            if eps.compose(M) != u.omega:
                return False, f"eps o convolution(e{m}*) != e{m}*"
        for a in range(n):
            if op.lam_multiplier(A, A.e(a)).defect(A) is not None:
                return False, "lambda(u)(a) is not a two-sided multiplier"
            if op.rho_multiplier(A, A.e(a)).defect(A) is not None:
                return False, "rho(u)(a) is not a two-sided multiplier"
    for i, j in itertools.product(range(n), repeat=2):
        ui, wj = point[i], point[j]
        oi, oj = ops[i], ops[j]
        if oi.lam @ oj.rho != oj.rho @ oi.lam:
            return False, f"lambda(e{i}*) and rho(e{j}*) do not commute"
        if ui.omega.compose(oj.rho) != wj.omega.compose(oi.lam):
            return False, f"u o rho(w) != w o lambda(u) for (e{i}*, e{j}*)"
        # products of convolution operators
        c = I.factorize(ui.omega.compose(oj.rho))
        if c is None or I.convolution_operators(c).rho != oi.rho @ oj.rho:
            return False, f"rho(u o rho(w)) != rho(u) rho(w) for (e{i}*, e{j}*)"
        c = I.factorize(ui.omega.compose(oj.lam))
        if c is None or I.convolution_operators(c).lam != oi.lam @ oj.lam:
            return False, f"lambda(u o lambda(w)) != lambda(u) lambda(w) for (e{i}*, e{j}*)"
    for m, (u, op) in enumerate(zip(point, ops)):
        uS = I.factorize(u.omega.compose(S))
        oS = I.convolution_operators(uS)
        if op.rho @ S != S @ oS.lam or op.lam @ S != S @ oS.rho:
            return False, f"convolution operators do not intertwine S for e{m}*"
    return True, ""


def _check_modular_automorphism(I: Integration, md: ModularData) -> Tuple[bool, str]:
    A, H, n = I.A, I.H, I.n
    S2 = I._S2
    S2inv = S2.inverse()
    sig, sp = md.sigma_phi, md.sigma_psi
    sC, sB = I.sigma_C(), I.sigma_B()
    for i, y in enumerate(H.C.vectors):
        if sig.apply(y) != S2.apply(y) or sig.apply(y) != H.C.vec(sC.apply(basis_vec(H.C.dim, i))):
            return False, f"sigma^phi(y{i}) != S^2(y{i})"
        if not H.C.contains(sp.apply(y)):
            return False, "sigma^psi does not preserve C"
    for i, x in enumerate(H.B.vectors):
        if sp.apply(x) != S2inv.apply(x) or sp.apply(x) != H.B.vec(sB.apply(basis_vec(H.B.dim, i))):
            return False, f"sigma^psi(x{i}) != S^-2(x{i})"
        if not H.B.contains(sig.apply(x)):
            return False, "sigma^phi does not preserve B"
    qL, qR = H.quot("ool"), H.quot("oor")

    def apply2(t, f, g):
        out = {}
        for (p, q), c in t.items():
            fp, gq = f.column(p), g.column(q)
            for a, x in enumerate(fp):
                if x == 0:
                    continue
                for b, yv in enumerate(gq):
                    if yv != 0:
                        out[(a, b)] = out.get((a, b), 0) + c * x * yv
        return {k: v for k, v in out.items() if v != 0}

    for a in range(n):
        for nm, D, lift, q in (("Delta_B", H.D_B, H.lift_DB, qL), ("Delta_C", H.D_C, H.lift_DC, qR)):
            for s, f, g in (("sigma^phi", S2, sig), ("sigma^psi", sp, S2inv)):
                M = sig if s == "sigma^phi" else sp
                lhs = lift(M.column(a))
                rhs = apply2(D[a], f, g)
                if not q.is_zero({k: lhs.get(k, 0) - rhs.get(k, 0) for k in set(lhs) | set(rhs)}):
                    return False, f"{nm} o {s} intertwining fails at e{a}"
    return True, "sigma^phi sigma^psi " + ("commute" if md.sigmas_commute else "do not commute")


def _check_bphi_phib(I: Integration, phi: Integral, md: ModularData) -> Tuple[bool, str]:
    A, H, n = I.A, I.H, I.n
    af = phi.base
    sig, S2 = md.sigma_phi, I._S2
    comp = (sig @ S2).inverse()
    for i, x in enumerate(H.B.vectors):
        s2x = S2.apply(sig.apply(x))
        cx = comp.apply(x)
        for a in range(n):
            ea = A.e(a)
            if af.br(A.mul(x, ea)) != A.mul(s2x, af.br(ea)):
                return False, f"phi_B(x{i} e{a}) != S^2 sigma(x{i}) phi_B(e{a})"
            if af.bl(A.mul(ea, x)) != A.mul(cx, af.bl(ea)):
                return False, f"_B phi(e{a} x{i}) != (sigma S^2)^-1(x{i}) _B phi(e{a})"
    # images are ideals, kernels agree
    for M, nm in ((af.omega_Bleft.matrix, "_B phi"), (af.omega_Bright.matrix, "phi_B")):
        img = [H.B.vec(v) for v in M.image()]
        for v in img:
            for x in H.B.vectors:
                for prod in (A.mul(x, v), A.mul(v, x)):
                    c = H.B.coords(prod)
                    if c is None or not Subspace.span(I.spaceB, M.image()).contains(c):
                        return False, f"image of {nm} is not an ideal of B"
    kers = []
    w = phi.functional
    rows = []
    for x in H.B.vectors:
        for xx in H.B.vectors:
            rows.append([w(A.mul_many(x, A.e(a), xx)) for a in range(n)])
    kers.append(Subspace.span(A.space, Matrix(rows, n).kernel()))
    kers.append(Subspace.span(A.space, af.omega_Bleft.matrix.kernel()))
    kers.append(Subspace.span(A.space, af.omega_Bright.matrix.kernel()))
    if not (kers[0] == kers[1] == kers[2]):
        return False, "kernels of _B phi, phi_B and {a : phi(BaB) = 0} differ"
    th = md.theta
    if th is None:
        return False, "theta is not well defined"
    for i, x in enumerate(H.B.vectors):
        tx = H.B.vec(th.apply(basis_vec(H.B.dim, i)))
        if I.muB(tx) != I.muB(x):
            return False, "mu_B o theta != mu_B"
        for j, xx in enumerate(H.B.vectors):
            v1 = I.muB(A.mul(x, sig.apply(xx)))
            v2 = I.muB(A.mul(xx, tx))
            v3 = I.muB(A.mul(S2.apply(tx), xx))
            if not v1 == v2 == v3:
                return False, f"mu_B(x sigma(x')) = mu_B(x' theta(x)) fails at ({i}, {j})"
    return True, ""


def _check_modular_element(I: Integration, phi: Integral, right_sp: Subspace) -> Tuple[bool, str]:
    A, n = I.A, I.n
    G = phi.functional.gram()
    for v in right_sp.basis + (tuple(sum(c) for c in zip(*right_sp.basis)),):
        f = Functional(A, tuple(v))
        d, ker = G.solve(list(f.coefficients))   # f = d . phi
        if d is None or ker:
            return False, "modular element does not exist or is not unique"
        if Functional(A, tuple(phi.functional(A.mul(A.e(b), d)) for b in range(n))) != f:
            return False, "psi != delta_psi . phi"
        J = I.make_integral(f, "right")
        ff = J is not None and J.full and J.faithful
        inv = A.left_mult_matrix(d).rank() == n
        if ff != inv:
            return False, "invertibility of delta_psi does not match fullness and faithfulness of psi"
    return True, ""


def _check_modular_element_second(I: Integration, phi: Integral, md: ModularData,
                                  eps_af: AdaptedFunctional) -> Tuple[bool, str]:
    A, H, n = I.A, I.H, I.n
    af = phi.base
    d, dd = md.delta_vec, md.delta_dag_vec
    if d is None or dd is None:
        return False, "modular elements not found"
    lam = I.lam_left(af.bl)
    for a in range(n):
        ea = A.e(a)
        la = lam.column(a)
        if A.mul(af.bl(ea), dd) != la or A.mul(d, af.br(ea)) != la:
            return False, f"_B phi(e{a}) delta_dag = lambda(phi)(e{a}) = delta phi_B(e{a}) fails"
    if A.mul(H.S(dd), d) != H.unit or A.mul(d, H.S(dd)) != H.unit:
        return False, "S(delta_dag) != delta^-1"
    eps = eps_af.omega
    for a in range(n):
        ea = A.e(a)
        if eps(A.mul(d, ea)) != eps(ea) or eps(A.mul(ea, dd)) != eps(ea):
            return False, "eps.delta != eps or delta_dag.eps != eps"
    from .algebra import elementary, tensor_sub
    qL, qR = H.quot("ool"), H.quot("oor")
    for lhs, rhs, q, nm in ((H.lift_DB(d), elementary(dd, d), qL, "Delta_B(delta) != delta_dag (x) delta"),
                            (H.lift_DC(dd), elementary(d, dd), qR, "Delta_C(delta_dag) != delta (x) delta_dag"),
                            (H.lift_DC(d), elementary(d, d), qR, "Delta_C(delta) != delta (x) delta"),
                            (H.lift_DB(dd), elementary(dd, dd), qL, "Delta_B(delta_dag) != delta_dag (x) delta_dag")):
        if not q.is_zero(tensor_sub(lhs, rhs)):
            return False, nm
    if A.star is not None:
        w = phi.functional
        selfadj = all(w(A.star_vec(A.e(a))) == conj(w(A.e(a))) for a in range(n))
        if selfadj and A.star_vec(d) != dd:
            return False, "delta_dag != delta* for a self-adjoint phi"
    return True, ""


def _check_modular_intertwining(I: Integration, md: ModularData) -> Tuple[bool, str]:
    A, H = I.A, I.H
    d, dd = md.delta_vec, md.delta_dag_vec
    sig, S2, S = md.sigma_phi, I._S2, H.antipode()
    for i, x in enumerate(H.B.vectors):
        if A.mul(d, x) != A.mul(d, S2.apply(sig.apply(x))):
            return False, f"delta x{i} != delta S^2(sigma(x{i}))"
        if A.mul(x, dd) != A.mul(dd, sig.apply(S2.apply(x))):
            return False, f"x{i} delta_dag != delta_dag sigma(S^2(x{i}))"
        if A.mul(S.apply(x), d) != A.mul(d, S.apply(sig.apply(S2.apply(x)))):
            return False, f"S(x{i}) delta != delta S(sigma(S^2(x{i})))"
        if A.mul(dd, H.S_inv(x)) != A.mul(S.apply(sig.apply(x)), dd):
            return False, f"delta_dag S^-1(x{i}) != S(sigma(x{i})) delta_dag"
    return True, ""


def _check_extension(I: Integration, phi: Functional, psi: Functional) -> Tuple[bool, str]:
    """Evaluate each dual element on M(A) through its four representations."""
    A, n = I.A, I.n
    MA = multiplier_algebra(A)
    Gp, Gs = phi.gram(), psi.gram()
    for m in range(n):
        f = Functional(A, tuple(basis_vec(n, m)))
        # f = a.phi = phi.b = a'.psi = psi.b'
        a, _ = Gp.solve(list(f.coefficients))
        b, _ = Gp.T.solve(list(f.coefficients))
        a2, _ = Gs.solve(list(f.coefficients))
        b2, _ = Gs.T.solve(list(f.coefficients))
        if None in (a, b, a2, b2):
            return False, "integrals are not faithful"
        for t, T in enumerate(MA.multipliers):
            L, R = T.left_action, T.right_action
            vals = {phi(L(a)), phi(R(b)), psi(L(a2)), psi(R(b2))}
            if len(vals) != 1:
                return False, f"extension to M(A) is inconsistent at e{m}* and multiplier {t}"
    return True, f"dim M(A) = {len(MA.multipliers)}"
