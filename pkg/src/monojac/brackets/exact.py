"""Exact-tier brackets for point particles.

Observables are :class:`Polynomial` objects over the particle variables
``X<label>1..3, V<label>1..3``; fields are :class:`PolyVec3` over ``x1, x2,
x3`` and are evaluated at a particle by substitution. With fields held
fixed the bracket is purely polynomial, so Jacobi residuals are exact.

The full two-particle bracket with dynamical fields also needs functional
derivatives with respect to ``E`` and ``B`` and the constant ``4*pi``. Its
values are kept exact as a Laurent series in ``4*pi`` with polynomial
coefficients (:class:`FourPiSeries`).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ..polyalg import (
    PolyVec3,
    Polynomial,
    VariableMismatchError,
    cross3,
    curl3,
    div3,
    dot3,
    random_polynomial,
    triple3,
)
from .kinds import BracketError, BracketKind
from .report import JacobiReport

FIELD_VARS = ("x1", "x2", "x3")


@dataclass(frozen=True)
class Particle:
    label: str
    mass: Fraction
    electric_charge: Fraction = Fraction(0)
    magnetic_charge: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("mass", "electric_charge", "magnetic_charge"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.mass <= 0:
            raise ValueError(f"particle {self.label!r}: mass must be positive")
        if not self.label.isidentifier():
            raise ValueError(f"particle label {self.label!r} must be an identifier")

    @property
    def position(self) -> tuple[str, str, str]:
        return tuple(f"X{self.label}{i}" for i in (1, 2, 3))

    @property
    def velocity(self) -> tuple[str, str, str]:
        return tuple(f"V{self.label}{i}" for i in (1, 2, 3))


@dataclass(frozen=True)
class ParticleSystem:
    """Particles in (possibly dynamical) polynomial fields ``E(x)``, ``B(x)``."""

    particles: tuple[Particle, ...]
    E: PolyVec3
    B: PolyVec3
    c: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        object.__setattr__(self, "c", Fraction(self.c))
        if not self.particles:
            raise ValueError("need at least one particle")
        if len({p.label for p in self.particles}) != len(self.particles):
            raise ValueError("particle labels must be distinct")
        if self.c <= 0:
            raise ValueError("c must be positive")
        for F in (self.E, self.B):
            if F.variables != FIELD_VARS:
                raise VariableMismatchError(f"fields must be over {FIELD_VARS}, got {F.variables}")

    @property
    def variables(self) -> tuple[str, ...]:
        out: list[str] = []
        for p in self.particles:
            out += p.position + p.velocity
        return tuple(out)

    def at(self, field_: PolyVec3 | Polynomial, particle: Particle):
        """A field (or scalar) over ``x1..x3`` evaluated at a particle position."""
        variables = self.variables
        mapping = {x: Polynomial.variable(X, variables) for x, X in zip(FIELD_VARS, particle.position)}
        return field_.substitute(mapping, variables)

    def observable(self, text: str) -> Polynomial:
        from ..expr import to_polynomial

        return to_polynomial(text, self.variables)


def _vgrad(F: Polynomial, p: Particle) -> PolyVec3:
    return PolyVec3(*(F.partial(v) for v in p.velocity))


def _xgrad(F: Polynomial, p: Particle) -> PolyVec3:
    return PolyVec3(*(F.partial(x) for x in p.position))


def _check(system: ParticleSystem, *polys: Polynomial) -> None:
    for P in polys:
        if P.variables != system.variables:
            raise VariableMismatchError(
                f"observable over {P.variables}, system expects {system.variables}")


def _rotation(system: ParticleSystem, p: Particle) -> PolyVec3:
    """``(e B(X) - g E(X)) / (m^2 c)`` at the particle."""
    vec = (system.at(system.B, p).scale(p.electric_charge)
           - system.at(system.E, p).scale(p.magnetic_charge))
    return vec.scale(1 / (p.mass**2 * system.c))


def bracket_particle(F: Polynomial, G: Polynomial, system: ParticleSystem) -> Polynomial:
    """Particle bracket with the fields held fixed (external fields)."""
    _check(system, F, G)
    out = Polynomial.zero(system.variables)
    for p in system.particles:
        dF, dG = _vgrad(F, p), _vgrad(G, p)
        canon = dot3(_xgrad(F, p), dG) - dot3(_xgrad(G, p), dF)
        out = out + canon.scale(1 / p.mass) + dot3(_rotation(system, p), cross3(dF, dG))
    return out


def jacobi_direct_exact(F: Polynomial, G: Polynomial, H: Polynomial,
                        system: ParticleSystem) -> Polynomial:
    """``{{F,G},H} + {{G,H},F} + {{H,F},G}`` by nested evaluation."""
    b = lambda P, Q: bracket_particle(P, Q, system)  # noqa: E731
    return b(b(F, G), H) + b(b(G, H), F) + b(b(H, F), G)


def jacobi_closed_form_exact(F: Polynomial, G: Polynomial, H: Polynomial,
                             system: ParticleSystem) -> Polynomial:
    """``sum_p (e_p div B - g_p div E)(X_p) / (m_p^3 c) * dF.(dG x dH)``."""
    _check(system, F, G, H)
    divB = div3(system.B, FIELD_VARS)
    divE = div3(system.E, FIELD_VARS)
    out = Polynomial.zero(system.variables)
    for p in system.particles:
        source = (divB.scale(p.electric_charge) - divE.scale(p.magnetic_charge))
        if source.is_zero():
            continue
        coeff = system.at(source, p).scale(1 / (p.mass**3 * system.c))
        out = out + coeff * triple3(_vgrad(F, p), _vgrad(G, p), _vgrad(H, p))
    return out


def jacobi_report_exact(F: Polynomial, G: Polynomial, H: Polynomial, system: ParticleSystem,
                        description: str = "") -> JacobiReport:
    direct = jacobi_direct_exact(F, G, H, system)
    closed = jacobi_closed_form_exact(F, G, H, system)
    meta = {
        "state": description,
        "c": system.c,
        "particles": [{"label": p.label, "mass": p.mass, "electric_charge": p.electric_charge,
                       "magnetic_charge": p.magnetic_charge} for p in system.particles],
        "E": [str(q) for q in system.E],
        "B": [str(q) for q in system.B],
        "functionals": [str(F), str(G), str(H)],
    }
    return JacobiReport("exact", BracketKind.PARTICLE_IN_EXTERNAL_FIELD.value, direct, closed,
                        direct - closed, {}, meta)


# ---------------------------------------------------------------------------
# randomized trials


def _rand_fraction(rng: random.Random, lo: int = 1, hi: int = 5, signed: bool = True) -> Fraction:
    q = Fraction(rng.randint(lo, hi), rng.randint(1, 4))
    return -q if signed and rng.random() < 0.5 else q


def random_field(rng: random.Random, max_degree: int = 2, n_terms: int = 4) -> PolyVec3:
    return PolyVec3(*(random_polynomial(rng, FIELD_VARS, max_degree, n_terms) for _ in range(3)))


def random_system(rng: random.Random, n_particles: int, field_degree: int = 2,
                  dyons: bool = True) -> ParticleSystem:
    labels = ("e", "m", "a", "b")[:n_particles]
    parts = []
    for k, label in enumerate(labels):
        e = _rand_fraction(rng) if (dyons or k % 2 == 0) else Fraction(0)
        g = _rand_fraction(rng) if (dyons or k % 2 == 1) else Fraction(0)
        parts.append(Particle(label, _rand_fraction(rng, signed=False), e, g))
    return ParticleSystem(tuple(parts), random_field(rng, field_degree),
                          random_field(rng, field_degree), _rand_fraction(rng, signed=False))


def random_trial(rng: random.Random, n_particles: int, degree: int = 3, n_terms: int = 4):
    """A random system and three random observables of degree ``<= degree``."""
    system = random_system(rng, n_particles)
    F, G, H = (random_polynomial(rng, system.variables, degree, n_terms) for _ in range(3))
    return system, F, G, H


def random_vector_potential(rng: random.Random, degree: int = 3) -> PolyVec3:
    return random_field(rng, degree)


def satisfying_fields(rng: random.Random, particles, field_degree: int = 2):
    """Fields with ``e_p div B = g_p div E`` identically for every particle.

    With a uniform charge ratio ``g/e = k`` this is ``B = k E + curl A``; a
    pure monopole (``e = 0``) needs ``div E = 0``. When the ratios differ
    both fields must be solenoidal.
    """
    charged = [p for p in particles if p.electric_charge or p.magnetic_charge]
    ratios = {(p.electric_charge, p.magnetic_charge) for p in charged}
    curl = lambda: curl3(random_field(rng, field_degree + 1), FIELD_VARS)  # noqa: E731
    uniform = all(e1 * g2 == e2 * g1 for e1, g1 in ratios for e2, g2 in ratios)
    if not charged:
        return random_field(rng, field_degree), random_field(rng, field_degree)
    if uniform:
        e, g = next(iter(ratios))
        if e == 0:
            return curl(), random_field(rng, field_degree)
        E = random_field(rng, field_degree)
        return E, E.scale(g / e) + curl()
    return curl(), curl()


# ---------------------------------------------------------------------------
# two-particle bracket with dynamical fields


class FourPiSeries:
    """``sum_k P_k (4 pi)^k`` with exact polynomial coefficients ``P_k``."""

    __slots__ = ("variables", "coeffs")

    def __init__(self, variables, coeffs: dict[int, Polynomial] | None = None):
        self.variables = tuple(variables)
        self.coeffs = {k: p for k, p in (coeffs or {}).items() if not p.is_zero()}

    def __add__(self, other: FourPiSeries) -> FourPiSeries:
        out = dict(self.coeffs)
        for k, p in other.coeffs.items():
            out[k] = out[k] + p if k in out else p
        return FourPiSeries(self.variables, out)

    def __sub__(self, other: FourPiSeries) -> FourPiSeries:
        return self + other.scale(-1)

    def scale(self, q) -> FourPiSeries:
        return FourPiSeries(self.variables, {k: p.scale(q) for k, p in self.coeffs.items()})

    def shifted(self, k: int) -> FourPiSeries:
        return FourPiSeries(self.variables, {j + k: p for j, p in self.coeffs.items()})

    @classmethod
    def of(cls, P: Polynomial, power: int = 0) -> FourPiSeries:
        return cls(P.variables, {power: P})

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, point) -> float:
        return sum(float(p.evaluate(point)) * (4 * math.pi) ** k for k, p in self.coeffs.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, FourPiSeries) and (self - other).is_zero()

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"(4pi)^{k}*({p})" for k, p in sorted(self.coeffs.items()))


@dataclass(frozen=True)
class ParticleFunctional:
    """``F = P(X, V) + (4 pi)^power * int (a_E . E + a_B . B) dx``.

    ``dE`` and ``dB`` are the functional derivatives (``a_E``, ``a_B``) over
    ``x1..x3``, scaled by ``(4 pi)^power``; ``FieldEnergy`` is ``power=-1``
    with ``dE = E``, ``dB = B``.
    """

    poly: Polynomial
    dE: PolyVec3 | None = None
    dB: PolyVec3 | None = None
    power: int = 0


def field_energy_functional(system: ParticleSystem) -> ParticleFunctional:
    return ParticleFunctional(Polynomial.zero(system.variables), system.E, system.B, -1)


def kinetic_polynomial(system: ParticleSystem) -> Polynomial:
    out = Polynomial.zero(system.variables)
    for p in system.particles:
        for v in p.velocity:
            V = Polynomial.variable(v, system.variables)
            out = out + (V * V).scale(p.mass / 2)
    return out


def two_particle_hamiltonian(system: ParticleSystem) -> ParticleFunctional:
    return ParticleFunctional(kinetic_polynomial(system), system.E, system.B, -1)


def _zero3() -> PolyVec3:
    return PolyVec3.zero(FIELD_VARS)


def bracket_two_particle(F: ParticleFunctional, G: ParticleFunctional, system: ParticleSystem,
                         box: tuple = (-1, 1)) -> FourPiSeries:
    """Two-particle bracket with dynamical fields.

    The pure-field term ``4 pi c int (F_E . curl G_B - G_E . curl F_B) dx``
    is integrated exactly over the cube ``box^3``; the field derivatives are
    taken as zero outside it.
    """
    _check(system, F.poly, G.poly)
    out = FourPiSeries.of(bracket_particle(F.poly, G.poly, system))
    V = system.variables
    FE, FB = F.dE or _zero3(), F.dB or _zero3()
    GE, GB = G.dE or _zero3(), G.dB or _zero3()
    for p in system.particles:
        dF, dG = _vgrad(F.poly, p), _vgrad(G.poly, p)
        for q, fF, fG in ((p.electric_charge, FE, GE), (p.magnetic_charge, FB, GB)):
            if not q:
                continue
            a = dot3(system.at(fG, p), dF).scale(q / p.mass)
            b = dot3(system.at(fF, p), dG).scale(q / p.mass)
            out = out + FourPiSeries.of(a, 1 + G.power) - FourPiSeries.of(b, 1 + F.power)
    density = dot3(FE, curl3(GB, FIELD_VARS)) - dot3(GE, curl3(FB, FIELD_VARS))
    lo, hi = box
    integral = density.integrate_box({x: (lo, hi) for x in FIELD_VARS}).constant_term()
    out = out + FourPiSeries.of(Polynomial.constant(integral * system.c, V), 1 + F.power + G.power)
    return out


def generated_particle_rates(system: ParticleSystem) -> dict[str, FourPiSeries]:
    """``{X, H}`` and ``{V, H}`` for every particle coordinate."""
    H = two_particle_hamiltonian(system)
    rates = {}
    for name in system.variables:
        coord = ParticleFunctional(Polynomial.variable(name, system.variables))
        rates[name] = bracket_two_particle(coord, H, system)
    return rates


def hand_particle_rates(system: ParticleSystem) -> dict[str, Polynomial]:
    """Lorentz force for electric charge, ``g (B - V x E / c)`` for magnetic charge."""
    V = system.variables
    rates = {}
    for p in system.particles:
        vel = PolyVec3(*(Polynomial.variable(v, V) for v in p.velocity))
        E, B = system.at(system.E, p), system.at(system.B, p)
        force = (E + cross3(vel, B).scale(1 / system.c)).scale(p.electric_charge) + \
            (B - cross3(vel, E).scale(1 / system.c)).scale(p.magnetic_charge)
        for x, v, comp, acc in zip(p.position, p.velocity, vel, force.scale(1 / p.mass)):
            rates[x] = comp
            rates[v] = acc
    return rates


__all__ = [
    "FIELD_VARS",
    "BracketError",
    "FourPiSeries",
    "Particle",
    "ParticleFunctional",
    "ParticleSystem",
    "bracket_particle",
    "bracket_two_particle",
    "field_energy_functional",
    "generated_particle_rates",
    "hand_particle_rates",
    "jacobi_closed_form_exact",
    "jacobi_direct_exact",
    "jacobi_report_exact",
    "kinetic_polynomial",
    "random_field",
    "random_system",
    "random_trial",
    "satisfying_fields",
    "two_particle_hamiltonian",
]
