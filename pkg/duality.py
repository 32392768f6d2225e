"""
Duality
The dual Â of a finite algebraic quantum groupoid, built from a faithful set
of left integrals. Â lives on the coordinate dual basis (key k is the
functional x ↦ x[k]), but its product, coproduct slices and counit are
computed through the integral formulas; transposes of the primal structure
maps are kept as an independent oracle.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from exact_linalg import (
    ONE,
    ZERO,
    FinVec,
    InconsistentSystem,
    Key,
    LinMap,
    Scalar,
    accumulate,
    rank,
    same_span,
    solve_linear,
    tensor,
)
from cg_algebra import build_cg
from integrals import (
    Functional,
    compose_antipode,
    enumerate_left_integrals,
    faithful_set_check,
    is_right_invariant,
    kernel_faithful,
)
from kg_algebra import build_kg
from wmha_core import CheckSettings, Law, LawReport, Multiplier, Wmha, check_isomorphism, run_laws

logger = logging.getLogger(__name__)


class DualityError(ValueError):
    """The dual cannot be formed or a representation is ill-defined."""


FORMS = ("φ(·a)", "φ(a·)", "ψ(·a)", "ψ(a·)")


@dataclass(frozen=True)
class Representation:
    """ω = Σ_i f_i(form with a_i); kernel lists the representations of 0."""

    form: str
    terms: tuple[tuple[int, FinVec], ...]
    kernel: tuple[tuple[tuple[int, FinVec], ...], ...] = ()


@dataclass(frozen=True)
class DualElement:
    """Σ_i φ_i(·a_i), with the single a when a designated faithful φ exists."""

    terms: tuple[tuple[int, FinVec], ...]
    canonical: FinVec | None = None


def _split(vec: FinVec, count: int) -> tuple[tuple[int, FinVec], ...]:
    """Unknowns keyed (i, k) → one element per integral index."""
    parts = {i: {} for i in range(count)}
    for (i, k), v in vec.items():
        parts[i][k] = v
    return tuple((i, FinVec(entries)) for i, entries in parts.items() if entries)


class DualWmha(Wmha):
    """Â for a primal Wmha with a faithful set of left integrals."""

    def __init__(self, primal: Wmha, integrals: Sequence[Functional], name: str | None = None):
        if not integrals or not faithful_set_check(list(integrals), primal):
            raise DualityError(f"faithful set required to build the dual of {primal.name}")
        self.primal = primal
        self.integrals = tuple(integrals)
        self.right_integrals = tuple(compose_antipode(phi, primal) for phi in integrals)
        super().__init__(primal.basis, name or f"dual({primal.name})")
        self._form_rows: dict = {}
        self._reps: dict = {}
        self._left_legs: dict = {}
        self._right_legs: dict = {}
        logger.info("built %r from %d integral(s)", self, len(self.integrals))

    @property
    def designated(self) -> Functional | None:
        return self.integrals[0] if len(self.integrals) == 1 else None

    # representations

    def _rows(self, form: str) -> list[FinVec]:
        if form not in self._form_rows:
            A = self.primal
            functionals = self.integrals if form.startswith("φ") else self.right_integrals
            a_on_right = form.endswith("(·a)")
            rows = []
            for x in A.basis:
                ex = A.element(x)
                rows.append(FinVec(
                    ((i, k), f(A.multiply(ex, A.element(k)) if a_on_right else A.multiply(A.element(k), ex)))
                    for i, f in enumerate(functionals) for k in A.basis
                ))
            self._form_rows[form] = rows
        return self._form_rows[form]

    def represent(self, omega: FinVec, form: str = "φ(·a)") -> Representation:
        """Write a functional ω (values on basis keys) in one of the four integral forms."""
        if form not in FORMS:
            raise ValueError(f"unknown form {form!r}")
        cache_key = (form, omega)
        if cache_key not in self._reps:
            unknowns = [(i, k) for i in range(len(self.integrals)) for k in self.primal.basis]
            constraints = [(row, omega[x]) for row, x in zip(self._rows(form), self.primal.basis)]
            try:
                space = solve_linear(constraints, unknowns)
            except InconsistentSystem as e:
                raise DualityError(f"functional is not of the form {form} on {self.primal.name}") from e
            count = len(self.integrals)
            self._reps[cache_key] = Representation(
                form, _split(space.particular, count), tuple(_split(v, count) for v in space.basis)
            )
        return self._reps[cache_key]

    def to_dual_element(self, omega: FinVec) -> DualElement:
        rep = self.represent(omega)
        canonical = None
        if self.designated is not None:
            canonical = rep.terms[0][1] if rep.terms else FinVec()
        return DualElement(rep.terms, canonical)

    def evaluate(self, element: DualElement) -> FinVec:
        return accumulate(
            (ONE, self.integrals[i].right_translate(self.primal, a).values) for i, a in element.terms
        )

    # algebra

    def basis_product(self, left: Key, right: Key) -> FinVec:
        """ωω′ = Σ φ_i(b_i ·) with b_i = ((ω∘S)⊗ι)Δ(a_i) for ω′ = Σ φ_i(a_i ·)."""
        A = self.primal
        total = FinVec()
        for i, a in self.represent(FinVec.basis(right), "φ(a·)").terms:
            b = accumulate((c * A.antipode_basis(m)[left], A.element(n)) for (m, n), c in A.coproduct(a).items())
            total = total + self.integrals[i].left_translate(A, b).values
        return total

    def unit(self) -> FinVec:
        """ε_A is the unit of Â."""
        return FinVec((k, self.primal.counit_basis(k)) for k in self.basis)

    # coproduct slices

    def _u_leg(self, j: Key, m: Key) -> FinVec:
        """x ↦ (e_x S(e_m))[j]"""
        if (j, m) not in self._left_legs:
            A = self.primal
            self._left_legs[(j, m)] = FinVec(
                (x, A.multiply(A.element(x), A.antipode_basis(m))[j]) for x in A.basis
            )
        return self._left_legs[(j, m)]

    def _v_leg(self, i: int, n: Key) -> FinVec:
        """y ↦ φ_i(e_n e_y)"""
        if (i, n) not in self._right_legs:
            self._right_legs[(i, n)] = self.integrals[i].left_translate(self.primal, self.primal.element(n)).values
        return self._right_legs[(i, n)]

    def delta_right_basis(self, a: Key, b: Key) -> FinVec:
        """T̂1(ω⊗φ(c·)) = Σ ω(·S(c1)) ⊗ φ(c2·)"""
        A = self.primal
        terms = []
        for i, c in self.represent(FinVec.basis(b), "φ(a·)").terms:
            for (m, n), coeff in A.coproduct(c).items():
                terms.append((coeff, tensor(self._u_leg(a, m), self._v_leg(i, n))))
        return accumulate(terms)

    def delta_left_basis(self, c: Key, a: Key) -> FinVec:
        """T̂2(ψ(·d)⊗ω′) = Σ ψ(·d1) ⊗ ω′(S(d2)·)"""
        A = self.primal
        terms = []
        for i, d in self.represent(FinVec.basis(c), "ψ(·a)").terms:
            psi = self.right_integrals[i]
            for (m, n), coeff in A.coproduct(d).items():
                first = psi.right_translate(A, A.element(m)).values
                second = FinVec((y, A.multiply(A.antipode_basis(n), A.element(y))[a]) for y in A.basis)
                terms.append((coeff, tensor(first, second)))
        return accumulate(terms)

    def counit_basis(self, key: Key) -> Scalar:
        """ε̂(φ(a·)) = φ(ae) for a local unit e of a."""
        A = self.primal
        total = ZERO
        for i, a in self.represent(FinVec.basis(key), "φ(a·)").terms:
            total = total + self.integrals[i](A.multiply(a, A.local_unit([a])))
        return total

    def antipode_basis(self, key: Key) -> FinVec:
        """Ŝ(ω) = ω∘S"""
        A = self.primal
        return FinVec((x, A.antipode_basis(x)[key]) for x in A.basis)

    def antipode_inverse_basis(self, key: Key) -> FinVec:
        A = self.primal
        return FinVec((x, A.antipode_inverse_basis(x)[key]) for x in A.basis)

    def canonical_idempotent(self) -> Multiplier:
        """Ê with ⟨a⊗a′, Ê⟩ = ε(aa′)."""
        A = self.primal
        element = FinVec(((x, y), A.counit(A.product(x, y))) for x in A.basis for y in A.basis)
        return Multiplier.of_element(element, self.multiply_tensor, "Ê")


def pair(a: FinVec, omega: FinVec) -> Scalar:
    """⟨a, ω⟩ = ω(a) on the coordinate dual basis."""
    return a.dot(omega)


def dual_product(D: DualWmha, omega, omega_prime):
    """Product in Â for functionals (FinVec) or DualElements."""
    if isinstance(omega, DualElement):
        values = D.multiply(D.evaluate(omega), D.evaluate(omega_prime))
        return D.to_dual_element(values)
    return D.multiply(omega, omega_prime)


def dual_canonical_maps(D: DualWmha) -> tuple[Callable, Callable, Callable, Callable]:
    """(T̂1, T̂2, R̂1, R̂2) on Â⊗Â."""
    return D.t1_map, D.t2_map, D.r1_map, D.r2_map


# --- Transpose oracles ---

def transpose_product(D: DualWmha, j: Key, k: Key) -> FinVec:
    """x ↦ (e^j⊗e^k)(Δ(e_x))"""
    return FinVec((x, D.primal.coproduct_basis(x)[(j, k)]) for x in D.primal.basis)


def transpose_slices(D: DualWmha, j: Key, k: Key) -> tuple[FinVec, FinVec]:
    """T̂1 and T̂2 of e^j⊗e^k as transposes of T2 and T1."""
    A = D.primal
    pairs = [(x, y) for x in A.basis for y in A.basis]
    return (
        FinVec(((x, y), A.t2_basis(x, y)[(j, k)]) for x, y in pairs),
        FinVec(((x, y), A.t1_basis(x, y)[(j, k)]) for x, y in pairs),
    )


# --- Actions and extended pairings ---

def actions(D: DualWmha, a: FinVec, omega: FinVec) -> tuple[FinVec, FinVec, FinVec, FinVec]:
    """(a▷ω, ω◁a, a◁ω, ω▷a): ω(·a), ω(a·), Σ ω(a1)a2, Σ a1ω(a2)."""
    A = D.primal
    delta = A.coproduct(a)
    return (
        FinVec((x, pair(A.multiply(A.element(x), a), omega)) for x in A.basis),
        FinVec((x, pair(A.multiply(a, A.element(x)), omega)) for x in A.basis),
        accumulate((c * omega[m], A.element(n)) for (m, n), c in delta.items()),
        accumulate((c * omega[n], A.element(m)) for (m, n), c in delta.items()),
    )


def extend_pairing_primal(D: DualWmha, m: Multiplier, omega: FinVec) -> Scalar:
    """⟨m, ω⟩ for m in M(A): write ω = e▷ω with e a local unit of the a_i in ω = Σφ_i(·a_i)."""
    A = D.primal
    rep = D.represent(omega)

    def value(terms) -> Scalar:
        elements = [a for _, a in terms]
        e = A.local_unit(elements) if elements else A.unit()
        return pair(m.left_act(e), omega)

    result = value(rep.terms)
    for kernel_vec in rep.kernel:
        shifted = _add_terms(rep.terms, kernel_vec)
        if value(shifted) != result:
            raise DualityError("extended pairing depends on the decomposition")
    return result


def _add_terms(first, second):
    merged: dict = {}
    for i, a in tuple(first) + tuple(second):
        merged[i] = merged[i] + a if i in merged else a
    return tuple(sorted(merged.items(), key=lambda t: t[0]))


def extend_pairing_dual(D: DualWmha, a: FinVec, mu: Multiplier) -> Scalar:
    """⟨a, μ⟩ for μ in M(Â), through a = a◁ε."""
    return pair(a, mu.right_act(D.unit()))


def dual_multiplier(D: DualWmha, omega: FinVec) -> Multiplier:
    """ω as a multiplier of Â: ω′ ↦ (ω⊗ω′)Δ and ω′ ↦ (ω′⊗ω)Δ."""
    A = D.primal

    def left(x: FinVec) -> FinVec:
        return FinVec(
            (k, sum((c * omega[m] * x[n] for (m, n), c in A.coproduct_basis(k).items()), ZERO))
            for k in A.basis
        )

    def right(x: FinVec) -> FinVec:
        return FinVec(
            (k, sum((c * x[m] * omega[n] for (m, n), c in A.coproduct_basis(k).items()), ZERO))
            for k in A.basis
        )

    return Multiplier(left_act=left, right_act=right, element=omega, label="ω")


def is_dual_multiplier(D: DualWmha, omega: FinVec) -> bool:
    """The operator pair of ω is compatible: (x·ω)y = x(ω·y) on basis pairs of Â.

    The slices (ω⊗ι)Δ(a) and (ι⊗ω)Δ(a) are finite sums here, so they always lie in A.
    """
    mult = dual_multiplier(D, omega)
    basis = [FinVec.basis(k) for k in D.basis]
    return mult.is_compatible(D.multiply, [(x, y) for x in basis for y in basis])


# --- Dual integrals ---

def dual_integral(D: DualWmha, a: FinVec) -> Functional:
    """ψ_a(ω) = Σ φ_i(a ε_s(c_i)) for ω = Σ φ_i(·c_i); a right integral on Â."""
    A = D.primal

    def value(terms) -> Scalar:
        total = ZERO
        for i, c in terms:
            total = total + D.integrals[i](A.multiply(a, A.source_element(c)))
        return total

    values = {}
    for k in D.basis:
        rep = D.represent(FinVec.basis(k))
        for kernel_vec in rep.kernel:
            if value(kernel_vec):
                raise DualityError("ψ_a is not well defined on this representation")
        values[k] = value(rep.terms)
    return Functional(FinVec(values), label="ψ_a")


def dual_integral_family(D: DualWmha) -> list[Functional]:
    return [dual_integral(D, D.primal.element(k)) for k in D.primal.basis]


def single_faithful_dual_integral(D: DualWmha, p: Functional | None = None) -> Functional:
    """ψ̂(φ(·c)) = p(ε_s(c)); with p = ε this is ψ̂(φ(·c)) = ε(c)."""
    if D.designated is None:
        raise DualityError("a single faithful integral on the primal is required")
    A = D.primal
    if p is None:
        p = Functional(FinVec((k, A.counit_basis(k)) for k in A.basis), label="ε")
    values = {}
    for k in D.basis:
        canonical = D.to_dual_element(FinVec.basis(k)).canonical
        values[k] = p(A.source_element(canonical))
    return Functional(FinVec(values), label="ψ̂")


# --- Building duals ---

def default_integrals(W: Wmha) -> list[Functional]:
    """The instance's designated integral, else a faithful sum or basis of left integrals."""
    designated = W.designated_integral()
    if designated is not None:
        return [designated]
    basis = enumerate_left_integrals(W)
    if basis:
        total = basis[0]
        for phi in basis[1:]:
            total = total + phi
        if kernel_faithful([total], W):
            return [Functional(total.values, "left")]
    return basis


def build_dual(W: Wmha, integrals: Sequence[Functional] | None = None) -> DualWmha:
    return DualWmha(W, list(integrals) if integrals is not None else default_integrals(W))


def bidual(W: Wmha) -> DualWmha:
    """dual(dual(W)) with ψ̂∘Ŝ, or the family {ψ_a∘Ŝ} when W has no single faithful integral."""
    D = build_dual(W)
    if D.designated is not None:
        left = [compose_antipode(single_faithful_dual_integral(D), D)]
    else:
        left = [compose_antipode(psi, D) for psi in dual_integral_family(D)]
        left = [phi for phi in left if phi]
    return DualWmha(D, left, name=f"dual(dual({W.name}))")


def biduality_iso(W: Wmha, DD: DualWmha) -> LinMap:
    """a ↦ (ω ↦ ω(a)); on coordinate dual bases this is the identity on keys."""
    if set(DD.basis) != set(W.basis):
        raise DualityError("bidual basis does not match the primal basis")
    return LinMap.identity(W.basis)


def dual_to_cg_witness(G, settings: CheckSettings = CheckSettings()):
    """Dual of K(G) against CG: λ_p ↔ evaluation at p. Returns (dual, CG, bijection table, report)."""
    D = build_dual(build_kg(G))
    C = build_cg(G)
    table = {p: p for p in G.arrows}
    phi = LinMap(D.basis, {p: FinVec.basis(table[p]) for p in D.basis})
    return D, C, table, check_isomorphism(D, C, phi, settings)


# --- Source and target algebras ---

def gamma_s(W: Wmha, D: DualWmha, y: FinVec) -> FinVec:
    """γ_s(y) in Â with ⟨ya, b⟩ = ⟨a, bγ_s(y)⟩."""
    constraints = []
    for kb in D.basis:
        images = {k: D.product(kb, k) for k in D.basis}
        for ka in W.basis:
            constraints.append((FinVec((k, img[ka]) for k, img in images.items()),
                                W.multiply(y, W.element(ka))[kb]))
    return _unique(solve_linear(constraints, D.basis), "γ_s")


def gamma_t(W: Wmha, D: DualWmha, x: FinVec) -> FinVec:
    """γ_t(x) in Â with ⟨ax, b⟩ = ⟨a, γ_t(x)b⟩."""
    constraints = []
    for kb in D.basis:
        images = {k: D.product(k, kb) for k in D.basis}
        for ka in W.basis:
            constraints.append((FinVec((k, img[ka]) for k, img in images.items()),
                                W.multiply(W.element(ka), x)[kb]))
    return _unique(solve_linear(constraints, D.basis), "γ_t")


def _unique(space, label: str) -> FinVec:
    if not space.unique:
        raise DualityError(f"{label} is not uniquely determined")
    return space.particular


@dataclass(frozen=True)
class _StContext:
    W: Wmha
    D: DualWmha


def _gamma_hom(which: str):
    def check(ctx: _StContext, _):
        W, D = ctx.W, ctx.D
        gamma, domain, codomain = (
            (gamma_s, W.source_basis(), D.target_basis()) if which == "s"
            else (gamma_t, W.target_basis(), D.source_basis())
        )
        try:
            images = [gamma(W, D, y) for y in domain]
        except (DualityError, InconsistentSystem) as e:
            return str(e)
        if rank(images) != len(domain):
            return f"γ_{which} is not injective"
        if not same_span(images, codomain):
            return f"image of γ_{which} is not {'ε_t' if which == 's' else 'ε_s'}(Â)"
        for y, gy in zip(domain, images):
            for z, gz in zip(domain, images):
                if gamma(W, D, W.multiply(y, z)) != D.multiply(gy, gz):
                    return f"γ_{which} is not multiplicative"
    return check


def _self_duality(which: str):
    def check(ctx: _StContext, keys):
        a, b = keys
        W, D = ctx.W, ctx.D
        primal = W.source_element if which == "s" else W.target_element
        dual = D.source_element if which == "s" else D.target_element
        if pair(W.element(a), dual(D.element(b))) != pair(primal(W.element(a)), D.element(b)):
            return f"⟨a, ε_{which}(b)⟩ != ⟨ε_{which}(a), b⟩"
    return check


SOURCE_TARGET_LAWS: tuple[Law, ...] = (
    Law("gamma_s isomorphism", 0, _gamma_hom("s")),
    Law("gamma_t isomorphism", 0, _gamma_hom("t")),
    Law("source self-duality", 2, _self_duality("s")),
    Law("target self-duality", 2, _self_duality("t")),
)


def source_target_dualities(W: Wmha, D: DualWmha, settings: CheckSettings = CheckSettings()) -> LawReport:
    return run_laws(SOURCE_TARGET_LAWS, _StContext(W, D), W.basis, settings)


# --- Pairing laws ---

def _dual_product_oracle(D: DualWmha, keys):
    j, k = keys
    if D.product(j, k) != transpose_product(D, j, k):
        return "integral-formula product != transpose of Δ"


def _pairing_coproduct(D: DualWmha, keys):
    x, y, k = keys
    if D.primal.product(x, y)[k] != D.coproduct_basis(k)[(x, y)]:
        return "⟨aa′, b⟩ != ⟨a⊗a′, Δ̂(b)⟩"


def _slice_adjointness(D: DualWmha, keys):
    j, k = keys
    t1_oracle, t2_oracle = transpose_slices(D, j, k)
    if D.t1_basis(j, k) != t1_oracle:
        return "T̂1 is not the transpose of T2"
    if D.t2_basis(j, k) != t2_oracle:
        return "T̂2 is not the transpose of T1"


def _r_adjointness(D: DualWmha, keys):
    j, k = keys
    A = D.primal
    x = FinVec.basis((j, k))
    pairs = [(p, q) for p in A.basis for q in A.basis]
    r1_oracle = FinVec((pq, A.r2_map(FinVec.basis(pq))[(j, k)]) for pq in pairs)
    r2_oracle = FinVec((pq, A.r1_map(FinVec.basis(pq))[(j, k)]) for pq in pairs)
    if D.r1_map(x) != r1_oracle:
        return "R̂1 is not the transpose of R2"
    if D.r2_map(x) != r2_oracle:
        return "R̂2 is not the transpose of R1"


def _antipode_adjointness(D: DualWmha, keys):
    a, k = keys
    if D.antipode_basis(k)[a] != D.primal.antipode_basis(a)[k]:
        return "⟨a, Ŝ(b)⟩ != ⟨S(a), b⟩"


def _E_pairing(D: DualWmha, keys):
    x, y = keys
    if D.idempotent_element()[(x, y)] != D.primal.counit(D.primal.product(x, y)):
        return "⟨a⊗a′, Ê⟩ != ε(aa′)"


def _F1_identity(D: DualWmha, keys):
    x, c, j = keys
    A = D.primal
    F1 = D.F_multipliers()[0].element
    lifted = D.multiply_tensor(tensor(D.element(j), D.unit()), F1)
    lhs = A.multiply(A.element(x), A.source_element(A.element(c)))[j]
    if lhs != lifted[(x, c)]:
        return "ω(x ε_s(c)) != ⟨x⊗c, (ω⊗1)F̂1⟩"


def _counit_pairing(D: DualWmha, keys):
    (a,) = keys
    unit = Multiplier.of_element(D.unit(), D.multiply, "1")
    if extend_pairing_dual(D, D.primal.element(a), unit) != D.primal.counit_basis(a):
        return "⟨a, 1⟩ != ε(a)"


DUAL_LAWS: tuple[Law, ...] = (
    Law("dual product oracle", 2, _dual_product_oracle),
    Law("pairing coproduct", 3, _pairing_coproduct),
    Law("slice adjointness", 2, _slice_adjointness),
    Law("generalized inverse adjointness", 2, _r_adjointness),
    Law("antipode adjointness", 2, _antipode_adjointness),
    Law("E pairing", 2, _E_pairing),
    Law("F1 identity", 3, _F1_identity),
    Law("counit pairing", 1, _counit_pairing),
)


def check_dual(D: DualWmha, settings: CheckSettings = CheckSettings()) -> LawReport:
    """Pairing laws tying Â to its primal."""
    return run_laws(DUAL_LAWS, D, D.basis, settings)


def check_dual_integrals(D: DualWmha) -> dict:
    """Right invariance and faithfulness of the ψ_a family and, when available, ψ̂."""
    family = [psi for psi in dual_integral_family(D) if psi]
    result = {
        "family_right_invariant": all(is_right_invariant(psi, D) for psi in family),
        "family_faithful": faithful_set_check(family, D, side="right"),
    }
    if D.designated is not None:
        hat = single_faithful_dual_integral(D)
        result["single_right_invariant"] = is_right_invariant(hat, D)
        result["single_faithful"] = kernel_faithful([hat], D)
    return result

