"""
Separability Idempotents
Validation of (B, C, E, S_B, S_C), the derived functionals and KMS
automorphisms, the algebra A = C⊗B with Δ(c⊗b) = c⊗E⊗b, and its dual
realised as the ◇-algebra B◇C together with its integrals and modular data.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from exact_linalg import (
    ONE,
    ZERO,
    FinVec,
    InconsistentSystem,
    Key,
    LinMap,
    Scalar,
    accumulate,
    extend,
    format_scalar,
    leg_span,
    rank,
    same_span,
    scalar,
    solve_linear,
    tensor,
)
from groupoid import ValidationReport, Violation
from integrals import (
    Functional,
    enumerate_left_integrals,
    enumerate_right_integrals,
    is_left_invariant,
    is_right_invariant,
    modular_automorphism,
)
from wmha_core import (
    Algebra,
    CheckSettings,
    Law,
    LawReport,
    Multiplier,
    StructureAlgebra,
    Wmha,
    WmhaError,
    check_isomorphism,
    run_laws,
)

logger = logging.getLogger(__name__)


class SeparabilityError(ValueError):
    """Invalid separability data; carries the violation list."""

    def __init__(self, message: str, violations: Sequence[Violation] = ()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True, eq=False)
class SepIdemData:
    """E in B⊗C (keys (b, c)) with S_B: B → C and S_C: C → B."""

    B: Algebra
    C: Algebra
    E: FinVec
    S_B: LinMap
    S_C: LinMap
    name: str = "sep"


@dataclass(frozen=True)
class SepFunctionals:
    phi_B: Functional
    phi_C: Functional
    sigma_B: LinMap
    sigma_C: LinMap


def _mul_bc(data: SepIdemData, x: FinVec, y: FinVec) -> FinVec:
    """Product in B⊗C."""
    return accumulate(
        (cx * cy, tensor(data.B.product(b1, b2), data.C.product(c1, c2)))
        for (b1, c1), cx in x.items() for (b2, c2), cy in y.items()
        if data.B.product(b1, b2) and data.C.product(c1, c2)
    )


def _algebra_violations(alg: Algebra, label: str) -> list[Violation]:
    found = []
    for a in alg.basis:
        for b in alg.basis:
            for c in alg.basis:
                if alg.multiply(alg.product(a, b), FinVec.basis(c)) != alg.multiply(FinVec.basis(a), alg.product(b, c)):
                    found.append(Violation("associativity", (label, str(a), str(b), str(c))))
                    return found
    for a in alg.basis:
        if not any(alg.product(a, b) for b in alg.basis) or not any(alg.product(b, a) for b in alg.basis):
            found.append(Violation("nondegeneracy", (label, str(a))))
    return found


def _is_anti_homomorphism(S: LinMap, source: Algebra, target: Algebra) -> tuple[str, str] | None:
    for a in source.basis:
        for b in source.basis:
            if S(source.product(a, b)) != target.multiply(S.image_of(b), S.image_of(a)):
                return str(a), str(b)
    return None


def validate_sep(data: SepIdemData) -> ValidationReport:
    """Check every defining identity of a regular separability idempotent."""
    B, C, E = data.B, data.C, data.E
    violations = _algebra_violations(B, "B") + _algebra_violations(C, "C")
    if violations:
        return ValidationReport(tuple(violations))

    if _mul_bc(data, E, E) != E:
        violations.append(Violation("idempotent", (), "E² != E"))
    if rank(leg_span(E, 0)) < B.dimension:
        violations.append(Violation("fullness", ("B",), "first leg of E does not span B"))
    if rank(leg_span(E, 1)) < C.dimension:
        violations.append(Violation("fullness", ("C",), "second leg of E does not span C"))

    for label, S, source, target in (("S_B", data.S_B, B, C), ("S_C", data.S_C, C, B)):
        if set(S.domain) != set(source.basis) or source.dimension != target.dimension or not S.is_injective():
            violations.append(Violation("regularity", (label,), "not a bijection"))
            continue
        witness = _is_anti_homomorphism(S, source, target)
        if witness:
            violations.append(Violation("regularity", (label,) + witness, "not an anti-homomorphism"))
    if violations:
        return ValidationReport(tuple(violations))

    try:
        one_B, one_C = B.unit(), C.unit()
    except WmhaError as e:
        return ValidationReport((Violation("unit", (), str(e)),))
    for b in B.basis:
        lhs = _mul_bc(data, E, tensor(FinVec.basis(b), one_C))
        rhs = _mul_bc(data, E, tensor(one_B, data.S_B.image_of(b)))
        if lhs != rhs:
            violations.append(Violation("S_B compatibility", (str(b),), "E(b⊗1) != E(1⊗S_B(b))"))
    for c in C.basis:
        lhs = _mul_bc(data, tensor(one_B, FinVec.basis(c)), E)
        rhs = _mul_bc(data, tensor(data.S_C.image_of(c), one_C), E)
        if lhs != rhs:
            violations.append(Violation("S_C compatibility", (str(c),), "(1⊗c)E != (S_C(c)⊗1)E"))
    if violations:
        return ValidationReport(tuple(violations))

    try:
        functionals = _solve_functionals(data)
    except SeparabilityError as e:
        return ValidationReport(tuple(e.violations))
    for label, alg, phi, sigma in (
        ("φ_B", B, functionals.phi_B, functionals.sigma_B),
        ("φ_C", C, functionals.phi_C, functionals.sigma_C),
    ):
        for a in alg.basis:
            for b in alg.basis:
                if phi(alg.product(a, b)) != phi(alg.multiply(FinVec.basis(b), sigma.image_of(a))):
                    violations.append(Violation("KMS", (label, str(a), str(b))))
                    break
    return ValidationReport(tuple(violations))


def _solve_functionals(data: SepIdemData) -> SepFunctionals:
    B, C, E = data.B, data.C, data.E
    solutions = {}
    for label, target, fixed_leg in (("φ_B", C, 0), ("φ_C", B, 1)):
        # (φ_B⊗ι)E = 1_C and (ι⊗φ_C)E = 1_B
        free_leg = 1 - fixed_leg
        rows: dict = {}
        for key, coeff in E.items():
            rows.setdefault(key[free_leg], {})
            rows[key[free_leg]][key[fixed_leg]] = rows[key[free_leg]].get(key[fixed_leg], ZERO) + coeff
        unit = target.unit()
        unknowns = B.basis if fixed_leg == 0 else C.basis
        constraints = [(FinVec(rows.get(k, {})), unit[k]) for k in target.basis]
        try:
            space = solve_linear(constraints, unknowns)
        except InconsistentSystem as e:
            raise SeparabilityError(f"{label} does not exist", [Violation("counit functional", (label,))]) from e
        if not space.unique:
            raise SeparabilityError(f"{label} is not unique", [Violation("counit functional", (label,), "not unique")])
        solutions[label] = Functional(space.particular, label)
    sigma_C = data.S_B.compose(data.S_C)
    sigma_B = data.S_C.compose(data.S_B).inverse(B.basis)
    return SepFunctionals(solutions["φ_B"], solutions["φ_C"], sigma_B, sigma_C)


def require_valid_sep(data: SepIdemData) -> SepIdemData:
    report = validate_sep(data)
    if not report.ok:
        first = report.violations[0]
        raise SeparabilityError(
            f"invalid separability data {data.name!r}: {first.axiom} {first.detail}".strip(),
            report.violations,
        )
    return data


def derive_functionals(data: SepIdemData) -> SepFunctionals:
    """φ_B, φ_C from (φ_B⊗ι)E = 1 and (ι⊗φ_C)E = 1; σ_B = (S_C S_B)⁻¹, σ_C = S_B S_C."""
    return _solve_functionals(require_valid_sep(data))


# --- Generators ---

def _diag_algebra(points: Sequence[str], name: str) -> StructureAlgebra:
    return StructureAlgebra(points, {(x, x): {x: 1} for x in points}, name)


def bijection_data(points: Sequence[str], tau: Mapping[str, str], drop: Sequence[str] = ()) -> SepIdemData:
    """B = C = K(X), E = Σ δ_x⊗δ_τ(x); S_B(δ_x) = δ_τ(x), S_C(δ_z) = δ_τ⁻¹(z).

    Points listed in drop are left out of E (a non-full control case) and the
    result is returned unvalidated in that case.
    """
    points = list(points)
    if sorted(tau) != sorted(points) or sorted(tau.values()) != sorted(points):
        raise SeparabilityError("tau must be a bijection of the point set")
    inverse = {y: x for x, y in tau.items()}
    data = SepIdemData(
        B=_diag_algebra(points, "K(X)"),
        C=_diag_algebra(points, "K(X)"),
        E=FinVec(((x, tau[x]), ONE) for x in points if x not in drop),
        S_B=LinMap(points, {x: FinVec.basis(tau[x]) for x in points}),
        S_C=LinMap(points, {z: FinVec.basis(inverse[z]) for z in points}),
        name=f"bijection{len(points)}",
    )
    return data if drop else require_valid_sep(data)


def _e(i: int, j: int) -> str:
    return f"e{i}{j}"


def _f(i: int, j: int) -> str:
    return f"f{i}{j}"


def matrix_data(a_weights: Sequence, b_weights: Sequence) -> SepIdemData:
    """B = M_n, C = M_n^op, E = Σ a_i b_j e_ij⊗f_ji with Σ a_i b_i = 1.

    S_B(e_kl) = (b_k/b_l) f_kl and S_C(f_kl) = (a_k/a_l) e_kl.
    """
    a = [scalar(x) for x in a_weights]
    b = [scalar(x) for x in b_weights]
    n = len(a)
    if len(b) != n or not all(a) or not all(b):
        raise SeparabilityError("matrix weights must be two nonzero lists of equal length")
    total = ZERO
    for x, y in zip(a, b):
        total = total + x * y
    if total != ONE:
        raise SeparabilityError("matrix weights must satisfy Σ a_i b_i = 1")
    idx = range(1, n + 1)
    B = StructureAlgebra(
        [_e(i, j) for i in idx for j in idx],
        {(_e(i, j), _e(k, l)): {_e(i, l): 1} for i in idx for j in idx for k in idx for l in idx if j == k},
        f"M{n}",
    )
    C = StructureAlgebra(
        [_f(i, j) for i in idx for j in idx],
        {(_f(i, j), _f(k, l)): {_f(k, j): 1} for i in idx for j in idx for k in idx for l in idx if l == i},
        f"M{n}op",
    )
    data = SepIdemData(
        B=B,
        C=C,
        E=FinVec(((_e(i, j), _f(j, i)), a[i - 1] * b[j - 1]) for i in idx for j in idx),
        S_B=LinMap(B.basis, {_e(k, l): FinVec.basis(_f(k, l), b[k - 1] / b[l - 1]) for k in idx for l in idx}),
        S_C=LinMap(C.basis, {_f(k, l): FinVec.basis(_e(k, l), a[k - 1] / a[l - 1]) for k in idx for l in idx}),
        name=f"matrix{n}",
    )
    return require_valid_sep(data)


# --- File format ---

def _algebra_from_dict(fields: Mapping, name: str) -> StructureAlgebra:
    table = {}
    for k1, k2, value in fields["product"]:
        table[(k1, k2)] = {k: scalar(v) for k, v in value.items()}
    return StructureAlgebra(fields["basis"], table, name)


def _linmap_from_dict(fields: Mapping, domain: Sequence[str]) -> LinMap:
    return LinMap(domain, {k: FinVec((t, scalar(v)) for t, v in fields.get(k, {}).items()) for k in domain})


def from_generator(fields: Mapping) -> SepIdemData:
    kind = fields.get("kind")
    if kind == "bijection":
        return bijection_data(fields["points"], fields["tau"], fields.get("drop", ()))
    if kind == "matrix":
        return matrix_data(fields["a"], fields["b"])
    raise SeparabilityError(f"unknown separability generator: {kind!r}")


def sep_from_dict(data: Mapping) -> SepIdemData:
    """Explicit structure constants or a generator entry; explicit data is validated."""
    if "generator" in data:
        return from_generator(data["generator"])
    try:
        B = _algebra_from_dict(data["B"], "B")
        C = _algebra_from_dict(data["C"], "C")
        E = FinVec(((b, c), scalar(v)) for b, c, v in data["E"])
        sep = SepIdemData(B, C, E, _linmap_from_dict(data["S_B"], B.basis), _linmap_from_dict(data["S_C"], C.basis),
                      data.get("name", "sep"))
    except (KeyError, TypeError, ValueError) as e:
        raise SeparabilityError(f"malformed separability file: {e}") from e
    return require_valid_sep(sep)


def sep_to_dict(data: SepIdemData) -> dict:
    def algebra(alg: Algebra) -> dict:
        return {
            "basis": list(alg.basis),
            "product": [
                [k1, k2, {k: format_scalar(v) for k, v in alg.product(k1, k2).items()}]
                for k1 in alg.basis for k2 in alg.basis if alg.product(k1, k2)
            ],
        }

    def linmap(S: LinMap) -> dict:
        return {k: {t: format_scalar(v) for t, v in S.image_of(k).items()} for k in S.domain}

    return {
        "name": data.name,
        "B": algebra(data.B),
        "C": algebra(data.C),
        "E": [[b, c, format_scalar(v)] for (b, c), v in data.E.items()],
        "S_B": linmap(data.S_B),
        "S_C": linmap(data.S_C),
    }


def load_sep(path: str | Path) -> SepIdemData:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SeparabilityError(f"could not read {path}: {e}") from e
    data = sep_from_dict(raw)
    logger.info("loaded separability data %r from %s", data.name, path)
    return data


def save_sep(data: SepIdemData, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(sep_to_dict(data), f, indent=2)


# --- A = C⊗B ---

class SepWmha(Wmha):
    """Basis (c, b) for c⊗b."""

    def __init__(self, data: SepIdemData):
        self.data = require_valid_sep(data)
        self.functionals = _solve_functionals(data)
        self.C, self.B = data.C, data.B
        super().__init__([(c, b) for c in data.C.basis for b in data.B.basis], name=f"A({data.name})")
        self._S_B_inv = data.S_B.inverse(data.C.basis)
        self._S_C_inv = data.S_C.inverse(data.B.basis)
        logger.info("built %r", self)

    def basis_product(self, left: Key, right: Key) -> FinVec:
        return tensor(self.C.product(left[0], right[0]), self.B.product(left[1], right[1]))

    def unit(self) -> FinVec:
        return tensor(self.C.unit(), self.B.unit())

    def delta_right_basis(self, a: Key, b: Key) -> FinVec:
        (c, b0), (c1, b1) = a, b
        second_b = self.B.product(b0, b1)
        return accumulate(
            (coeff, tensor(FinVec.basis((c, bi)), tensor(self.C.product(cj, c1), second_b)))
            for (bi, cj), coeff in self.data.E.items()
        )

    def delta_left_basis(self, c: Key, a: Key) -> FinVec:
        (c1, b1), (c0, b0) = c, a
        first_c = self.C.product(c1, c0)
        return accumulate(
            (coeff, tensor(tensor(first_c, self.B.product(b1, bi)), FinVec.basis((cj, b0))))
            for (bi, cj), coeff in self.data.E.items()
        )

    def counit_basis(self, key: Key) -> Scalar:
        """ε(c⊗b) = φ_B(S_C(c)b)"""
        c, b = key
        return self.functionals.phi_B(self.B.multiply(self.data.S_C.image_of(c), FinVec.basis(b)))

    def antipode_basis(self, key: Key) -> FinVec:
        """S(c⊗b) = S_B(b)⊗S_C(c)"""
        c, b = key
        return tensor(self.data.S_B.image_of(b), self.data.S_C.image_of(c))

    def antipode_inverse_basis(self, key: Key) -> FinVec:
        c, b = key
        return tensor(self._S_C_inv.image_of(b), self._S_B_inv.image_of(c))

    def canonical_idempotent(self) -> Multiplier:
        one_B, one_C = self.B.unit(), self.C.unit()
        element = accumulate(
            (coeff, tensor(tensor(one_C, FinVec.basis(bi)), tensor(FinVec.basis(cj), one_B)))
            for (bi, cj), coeff in self.data.E.items()
        )
        return Multiplier.of_element(element, self.multiply_tensor, "E")

    # integrals

    def left_integral(self, g: Functional) -> Functional:
        """c⊗b ↦ φ_C(c) g(b)"""
        phi_C = self.functionals.phi_C
        return Functional(FinVec(((c, b), phi_C.at(c) * g.at(b)) for c, b in self.basis), "left")

    def right_integral(self, f: Functional) -> Functional:
        """c⊗b ↦ f(c) φ_B(b)"""
        phi_B = self.functionals.phi_B
        return Functional(FinVec(((c, b), f.at(c) * phi_B.at(b)) for c, b in self.basis), "right")

    def designated_integral(self) -> Functional:
        """c⊗b ↦ φ_C(c)φ_B(b): faithful, left and right."""
        return Functional(self.left_integral(self.functionals.phi_B).values, "φ_C⊗φ_B")

    def sigma(self) -> LinMap:
        """σ_C⊗σ_B"""
        sC, sB = self.functionals.sigma_C, self.functionals.sigma_B
        return LinMap(self.basis, {(c, b): tensor(sC.image_of(c), sB.image_of(b)) for c, b in self.basis})


def build_sep_wmha(data: SepIdemData) -> SepWmha:
    return SepWmha(data)


# --- The ◇-algebra B◇C ---

class DiamondKey(NamedTuple):
    """u◇v for basis u of B and v of C."""

    u: Key
    v: Key


def _diamond(x: FinVec, y: FinVec) -> FinVec:
    """u◇v for u in B, v in C."""
    return FinVec((DiamondKey(ku, kv), cu * cv) for ku, cu in x.items() for kv, cv in y.items())


class SepDual(Wmha):
    """B◇C with (u◇v)(u′◇v′) = φ_C(vS_B(u′)) u◇v′."""

    def __init__(self, data: SepIdemData):
        self.data = require_valid_sep(data)
        self.functionals = _solve_functionals(data)
        self.B, self.C = data.B, data.C
        super().__init__([DiamondKey(u, v) for u in data.B.basis for v in data.C.basis], name=f"B◇C({data.name})")
        self._S_B_inv = data.S_B.inverse(data.C.basis)
        self._S_C_inv = data.S_C.inverse(data.B.basis)
        self._delta_B: dict = {}
        self._delta_C: dict = {}
        logger.info("built %r", self)

    def pairing_value(self, v: FinVec, u: FinVec) -> Scalar:
        """ε(v⊗u) = φ_C(v S_B(u))"""
        return self.functionals.phi_C(self.C.multiply(v, self.data.S_B(u)))

    def basis_product(self, left: Key, right: Key) -> FinVec:
        value = self.pairing_value(FinVec.basis(left.v), FinVec.basis(right.u))
        return FinVec.basis(DiamondKey(left.u, right.v), value) if value else FinVec()

    def delta_B(self, u: Key) -> FinVec:
        """Δ_B(u) = Σ E1 ⊗ S_C(E2) u"""
        if u not in self._delta_B:
            self._delta_B[u] = accumulate(
                (coeff, tensor(FinVec.basis(bi), self.B.multiply(self.data.S_C.image_of(cj), FinVec.basis(u))))
                for (bi, cj), coeff in self.data.E.items()
            )
        return self._delta_B[u]

    def delta_C(self, v: Key) -> FinVec:
        """Δ_C(v) = Σ v S_B(E1) ⊗ E2"""
        if v not in self._delta_C:
            self._delta_C[v] = accumulate(
                (coeff, tensor(self.C.multiply(FinVec.basis(v), self.data.S_B.image_of(bi)), FinVec.basis(cj)))
                for (bi, cj), coeff in self.data.E.items()
            )
        return self._delta_C[v]

    def coproduct_basis(self, key: Key) -> FinVec:
        """Δ̂(u◇v) = Σ (u1◇v1)⊗(u2◇v2)"""
        if key not in self._delta:
            self._delta[key] = FinVec(
                ((DiamondKey(u1, v1), DiamondKey(u2, v2)), cu * cv)
                for (u1, u2), cu in self.delta_B(key.u).items()
                for (v1, v2), cv in self.delta_C(key.v).items()
            )
        return self._delta[key]

    def delta_right_basis(self, a: Key, b: Key) -> FinVec:
        return extend(
            self.coproduct_basis(a),
            lambda key: FinVec(((key[0], k), v) for k, v in self.product(key[1], b).items()),
        )

    def delta_left_basis(self, c: Key, a: Key) -> FinVec:
        return extend(
            self.coproduct_basis(a),
            lambda key: FinVec(((k, key[1]), v) for k, v in self.product(c, key[0]).items()),
        )

    def counit_basis(self, key: Key) -> Scalar:
        return self.functionals.phi_B.at(key.u) * self.functionals.phi_C.at(key.v)

    def antipode_basis(self, key: Key) -> FinVec:
        """Ŝ(u◇v) = S_B⁻¹(v)◇S_C⁻¹(u)"""
        return _diamond(self._S_B_inv.image_of(key.v), self._S_C_inv.image_of(key.u))

    def antipode_inverse_basis(self, key: Key) -> FinVec:
        """Ŝ⁻¹(u◇v) = S_C(v)◇S_B(u)"""
        return _diamond(self.data.S_C.image_of(key.v), self.data.S_B.image_of(key.u))

    def canonical_idempotent(self) -> Multiplier:
        """Ê acts by u⊗u′ ↦ (uu′⊗1)F1 on the left and v⊗v′ ↦ (1⊗vv′)F2 on the right."""
        data, B, C = self.data, self.B, self.C

        def left(x: FinVec) -> FinVec:
            terms = []
            for (w1, w2), coeff in x.items():
                uu = B.product(w1.u, w2.u)
                for (bi, cj), e in data.E.items():
                    first = B.multiply(uu, FinVec.basis(bi))
                    second = data.S_C.image_of(cj)
                    terms.append((coeff * e, FinVec(
                        ((DiamondKey(p, w1.v), DiamondKey(q, w2.v)), vp * vq)
                        for p, vp in first.items() for q, vq in second.items()
                    )))
            return accumulate(terms)

        def right(x: FinVec) -> FinVec:
            terms = []
            for (w1, w2), coeff in x.items():
                vv = C.product(w1.v, w2.v)
                for (bi, cj), e in data.E.items():
                    first = data.S_B.image_of(bi)
                    second = C.multiply(FinVec.basis(cj), vv)
                    terms.append((coeff * e, FinVec(
                        ((DiamondKey(w1.u, p), DiamondKey(w2.u, q)), vp * vq)
                        for p, vp in first.items() for q, vq in second.items()
                    )))
            return accumulate(terms)

        return Multiplier(left_act=left, right_act=right, label="Ê")

    # integrals and modular data

    def left_integral(self, y: FinVec) -> Functional:
        """φ̂_y(u◇v) = φ_B(u y S_C(v)) for y in B."""
        phi_B, S_C = self.functionals.phi_B, self.data.S_C
        return Functional(FinVec(
            (k, phi_B(self.B.multiply(self.B.multiply(FinVec.basis(k.u), y), S_C.image_of(k.v))))
            for k in self.basis
        ), "φ̂_y")

    def right_integral(self, x: FinVec) -> Functional:
        """ψ̂_x(u◇v) = φ_C(S_B(u) x v) for x in C."""
        phi_C, S_B = self.functionals.phi_C, self.data.S_B
        return Functional(FinVec(
            (k, phi_C(self.C.multiply(self.C.multiply(S_B.image_of(k.u), x), FinVec.basis(k.v))))
            for k in self.basis
        ), "ψ̂_x")

    def designated_integral(self) -> Functional:
        return self.left_integral(self.B.unit())

    def modular_multiplier(self) -> Multiplier:
        """δ: δ(u◇v) = σ_B⁻²(u)◇v and (u◇v)δ = u◇σ_C⁻²(v)."""
        sB_inv = self.functionals.sigma_B.inverse(self.B.basis)
        sC_inv = self.functionals.sigma_C.inverse(self.C.basis)
        return _diamond_multiplier(sB_inv.compose(sB_inv), sC_inv.compose(sC_inv), "δ")

    def modular_multiplier_inverse(self) -> Multiplier:
        sB, sC = self.functionals.sigma_B, self.functionals.sigma_C
        return _diamond_multiplier(sB.compose(sB), sC.compose(sC), "δ⁻¹")

    def source_map(self, v: FinVec) -> FinVec:
        """v ↦ E1◇E2v, onto ε_s(B◇C)."""
        return accumulate(
            (coeff, _diamond(FinVec.basis(bi), self.C.multiply(FinVec.basis(cj), v)))
            for (bi, cj), coeff in self.data.E.items()
        )

    def target_map(self, u: FinVec) -> FinVec:
        """u ↦ uE1◇E2, onto ε_t(B◇C)."""
        return accumulate(
            (coeff, _diamond(self.B.multiply(u, FinVec.basis(bi)), FinVec.basis(cj)))
            for (bi, cj), coeff in self.data.E.items()
        )


def _diamond_multiplier(on_u: LinMap, on_v: LinMap, label: str) -> Multiplier:
    """Left action through a map on the u-part, right action through a map on the v-part."""
    def left(x: FinVec) -> FinVec:
        return accumulate((c, _diamond(on_u.image_of(k.u), FinVec.basis(k.v))) for k, c in x.items())

    def right(x: FinVec) -> FinVec:
        return accumulate((c, _diamond(FinVec.basis(k.u), on_v.image_of(k.v))) for k, c in x.items())

    return Multiplier(left_act=left, right_act=right, label=label)


def build_sep_dual(data: SepIdemData) -> SepDual:
    return SepDual(data)


def adjointable_multiplier(dual: SepDual, gamma: LinMap) -> Multiplier:
    """The multiplier u◇v ↦ γ(u)◇v, v ↦ γᵗ(v) with ε(vγ(u)) = ε(γᵗ(v)u)."""
    B, C = dual.B, dual.C
    columns = {}
    for v in C.basis:
        # unknown γᵗ(v) in C: ε(γᵗ(v)⊗u) = ε(v⊗γ(u)) for every basis u
        constraints = [
            (FinVec((w, dual.pairing_value(FinVec.basis(w), FinVec.basis(u))) for w in C.basis),
             dual.pairing_value(FinVec.basis(v), gamma.image_of(u)))
            for u in B.basis
        ]
        try:
            columns[v] = solve_linear(constraints, C.basis).particular
        except InconsistentSystem as e:
            raise SeparabilityError("map on B has no adjoint for the ◇ pairing") from e
    return _diamond_multiplier(gamma, LinMap(C.basis, columns), "γ")


def pairing_map(data: SepIdemData, dual: SepDual, A: SepWmha) -> LinMap:
    """u◇v ↦ the functional c⊗b ↦ φ_C(S_B(u)c) φ_B(bS_C(v))."""
    f = dual.functionals
    columns = {}
    for k in dual.basis:
        left = data.S_B.image_of(k.u)
        right = data.S_C.image_of(k.v)
        columns[k] = FinVec(
            ((c, b), f.phi_C(data.C.multiply(left, FinVec.basis(c))) * f.phi_B(data.B.multiply(FinVec.basis(b), right)))
            for c, b in A.basis
        )
    return LinMap(dual.basis, columns)


def check_identification(dual: SepDual, generic, settings: CheckSettings = CheckSettings()) -> LawReport:
    """B◇C against the integral-built dual of A = C⊗B, through the pairing map."""
    phi = pairing_map(dual.data, dual, generic.primal)
    return check_isomorphism(dual, generic, phi, settings)


@dataclass(frozen=True)
class ModularData:
    sigma_A: LinMap
    sigma_B: LinMap
    sigma_C: LinMap
    matches: bool


def modular_data(A: SepWmha) -> ModularData:
    """Modular automorphism of φ_C⊗φ_B compared with σ_C⊗σ_B."""
    sigma_A = modular_automorphism(A.designated_integral(), A)
    return ModularData(sigma_A, A.functionals.sigma_B, A.functionals.sigma_C, sigma_A == A.sigma())


# --- Property checks ---

def _pair_1(dual: SepDual, c: FinVec, u: FinVec) -> Scalar:
    """⟨c, u⟩₁ = φ_C(S_B(u)c)"""
    return dual.functionals.phi_C(dual.C.multiply(dual.data.S_B(u), c))


def _pair_2(dual: SepDual, b: FinVec, v: FinVec) -> Scalar:
    """⟨b, v⟩₂ = φ_B(bS_C(v))"""
    return dual.functionals.phi_B(dual.B.multiply(b, dual.data.S_C(v)))


def _coassociative(delta, keys) -> bool:
    for k in keys:
        d = delta(k)
        left = extend(d, lambda key: FinVec((pair + (key[1],), v) for pair, v in delta(key[0]).items()))
        right = extend(d, lambda key: FinVec(((key[0],) + pair, v) for pair, v in delta(key[1]).items()))
        if left != right:
            return False
    return True


def _law_coassociativity(dual: SepDual, _):
    if not _coassociative(dual.delta_B, dual.B.basis):
        return "Δ_B is not coassociative"
    if not _coassociative(dual.delta_C, dual.C.basis):
        return "Δ_C is not coassociative"


def _law_delta_B_dual(dual: SepDual, keys):
    c1, c2, u = keys
    if c1 not in dual.C.basis or c2 not in dual.C.basis or u not in dual.B.basis:
        return None
    lhs = _pair_1(dual, dual.C.product(c1, c2), FinVec.basis(u))
    rhs = sum(
        (coeff * _pair_1(dual, FinVec.basis(c1), FinVec.basis(x)) * _pair_1(dual, FinVec.basis(c2), FinVec.basis(y))
         for (x, y), coeff in dual.delta_B(u).items()),
        ZERO,
    )
    if lhs != rhs:
        return "⟨cc′, u⟩₁ != ⟨c⊗c′, Δ_B(u)⟩₁"


def _law_delta_C_dual(dual: SepDual, keys):
    b1, b2, v = keys
    if b1 not in dual.B.basis or b2 not in dual.B.basis or v not in dual.C.basis:
        return None
    lhs = _pair_2(dual, dual.B.product(b1, b2), FinVec.basis(v))
    rhs = sum(
        (coeff * _pair_2(dual, FinVec.basis(b1), FinVec.basis(x)) * _pair_2(dual, FinVec.basis(b2), FinVec.basis(y))
         for (x, y), coeff in dual.delta_C(v).items()),
        ZERO,
    )
    if lhs != rhs:
        return "⟨bb′, v⟩₂ != ⟨b⊗b′, Δ_C(v)⟩₂"


def _law_m_F(dual: SepDual, _):
    data = dual.data
    m_B_F1 = accumulate((coeff, data.B.multiply(FinVec.basis(bi), data.S_C.image_of(cj))) for (bi, cj), coeff in data.E.items())
    if m_B_F1 != data.B.unit():
        return "Σ E1 S_C(E2) != 1"
    m_C_F2 = accumulate((coeff, data.C.multiply(data.S_B.image_of(bi), FinVec.basis(cj))) for (bi, cj), coeff in data.E.items())
    if m_C_F2 != data.C.unit():
        return "Σ S_B(E1) E2 != 1"


def _law_counit_forms(dual: SepDual, _):
    data, f = dual.data, dual.functionals
    for c in data.C.basis:
        for b in data.B.basis:
            first = f.phi_B(data.B.multiply(data.S_C.image_of(c), FinVec.basis(b)))
            second = f.phi_C(data.C.multiply(FinVec.basis(c), data.S_B.image_of(b)))
            if first != second:
                return f"φ_B(S_C(c)b) != φ_C(cS_B(b)) at ({c},{b})"
    if f.phi_C.precompose(data.S_B.image_of, data.B.basis) != Functional(f.phi_B.values):
        return "φ_C∘S_B != φ_B"
    if f.phi_B.precompose(data.S_C.image_of, data.C.basis) != Functional(f.phi_C.values):
        return "φ_B∘S_C != φ_C"


def _law_source_target_maps(dual: SepDual, _):
    B, C = dual.B, dual.C
    for label, fn, alg, span in (
        ("v ↦ E1◇E2v", dual.source_map, C, dual.source_basis()),
        ("u ↦ uE1◇E2", dual.target_map, B, dual.target_basis()),
    ):
        images = {k: fn(FinVec.basis(k)) for k in alg.basis}
        if rank(images.values()) != alg.dimension or not same_span(list(images.values()), span):
            return f"{label} is not onto its algebra"
        for x in alg.basis:
            for y in alg.basis:
                if fn(alg.product(x, y)) != dual.multiply(images[x], images[y]):
                    return f"{label} is not multiplicative"


def _law_eps_formulas(dual: SepDual, keys):
    (k,) = keys
    f = dual.functionals
    w = FinVec.basis(k)
    expected_s = dual.source_map(FinVec.basis(k.v)).scale(f.phi_B.at(k.u))
    expected_t = dual.target_map(FinVec.basis(k.u)).scale(f.phi_C.at(k.v))
    if dual.source_element(w) != expected_s:
        return "ε_s(u◇v) != φ_B(u) E1◇E2v"
    if dual.target_element(w) != expected_t:
        return "ε_t(u◇v) != φ_C(v) uE1◇E2"


def _law_adjointable(dual: SepDual, keys):
    (k,) = keys
    B = dual.B
    family = [LinMap(B.basis, {u: B.product(k.u, u) for u in B.basis})]
    basis = [FinVec.basis(x) for x in dual.basis]
    for gamma in family:
        m = adjointable_multiplier(dual, gamma)
        if not m.is_compatible(dual.multiply, [(x, y) for x in basis for y in basis]):
            return "adjointable pair is not a multiplier"
    # u◇v itself acts as the rank-one adjointable pair
    rank_one = LinMap(B.basis, {
        u: FinVec.basis(k.u, dual.pairing_value(FinVec.basis(k.v), FinVec.basis(u))) for u in B.basis
    })
    m = adjointable_multiplier(dual, rank_one)
    element = Multiplier.of_element(FinVec.basis(k), dual.multiply)
    if not m.agrees_with(element, basis):
        return "u◇v is not its own adjointable pair"


SEP_LAWS: tuple[Law, ...] = (
    Law("Δ_B Δ_C coassociative", 0, _law_coassociativity),
    Law("Δ_B dual to C product", 0, lambda d, _: _all_triples(d, _law_delta_B_dual, d.C.basis, d.C.basis, d.B.basis)),
    Law("Δ_C dual to B product", 0, lambda d, _: _all_triples(d, _law_delta_C_dual, d.B.basis, d.B.basis, d.C.basis)),
    Law("m F = 1", 0, _law_m_F),
    Law("counit forms", 0, _law_counit_forms),
    Law("source target isomorphisms", 0, _law_source_target_maps),
    Law("diamond eps formulas", 1, _law_eps_formulas),
    Law("adjointable multipliers", 1, _law_adjointable),
)


def _all_triples(dual, check, first, second, third):
    for x in first:
        for y in second:
            for z in third:
                detail = check(dual, (x, y, z))
                if detail:
                    return f"{detail} at ({x},{y},{z})"
    return None


def check_sep_properties(dual: SepDual, settings: CheckSettings = CheckSettings()) -> LawReport:
    return run_laws(SEP_LAWS, dual, dual.basis, settings)


# --- Integrals and Radford's formula ---

@dataclass(frozen=True)
class RadfordResult:
    right_integrals: tuple[Functional, ...]
    left_integrals: tuple[Functional, ...]
    delta: Multiplier
    report: LawReport


def _radford_laws(dual: SepDual) -> tuple[Law, ...]:
    f = dual.functionals
    delta = dual.modular_multiplier()
    delta_inv = dual.modular_multiplier_inverse()
    phi_hat = dual.designated_integral()
    sC_inv = f.sigma_C.inverse(dual.C.basis)

    def right_family(d, _):
        for x in d.C.basis:
            if not is_right_invariant(d.right_integral(FinVec.basis(x)), d):
                return f"ψ̂_{x} is not right invariant"

    def left_family(d, _):
        for y in d.B.basis:
            if not is_left_invariant(d.left_integral(FinVec.basis(y)), d):
                return f"φ̂_{y} is not left invariant"

    def completeness(d, _):
        if len(enumerate_right_integrals(d)) != d.C.dimension:
            return "right integral space is not {ψ̂_x}"
        if len(enumerate_left_integrals(d)) != d.B.dimension:
            return "left integral space is not {φ̂_y}"

    def modular(d, keys):
        (k,) = keys
        w = FinVec.basis(k)
        if phi_hat(d.antipode(w)) != phi_hat(delta.right_act(w)):
            return "φ̂(Ŝw) != φ̂(wδ)"

    def square(d, keys):
        (k,) = keys
        expected = _diamond(f.sigma_B.image_of(k.u), sC_inv.image_of(k.v))
        if d.antipode(d.antipode_basis(k)) != expected:
            return "Ŝ²(u◇v) != σ_B(u)◇σ_C⁻¹(v)"

    def radford(d, keys):
        (k,) = keys
        w = FinVec.basis(k)
        s4 = d.antipode(d.antipode(d.antipode(d.antipode_basis(k))))
        if s4 != delta.right_act(delta_inv.left_act(w)):
            return "Ŝ⁴ != δ⁻¹(·)δ"

    return (
        Law("right integrals ψ̂_x", 0, right_family),
        Law("left integrals φ̂_y", 0, left_family),
        Law("integral completeness", 0, completeness),
        Law("modular element", 1, modular),
        Law("S² formula", 1, square),
        Law("Radford S⁴", 1, radford),
    )


def sep_dual_integrals_and_radford(dual: SepDual, settings: CheckSettings = CheckSettings()) -> RadfordResult:
    report = run_laws(_radford_laws(dual), dual, dual.basis, settings)
    return RadfordResult(
        right_integrals=tuple(dual.right_integral(FinVec.basis(x)) for x in dual.C.basis),
        left_integrals=tuple(dual.left_integral(FinVec.basis(y)) for y in dual.B.basis),
        delta=dual.modular_multiplier(),
        report=report,
    )
