import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from monojac.brackets.exact import (
    FIELD_VARS,
    FourPiSeries,
    Particle,
    ParticleFunctional,
    ParticleSystem,
    bracket_particle,
    bracket_two_particle,
    field_energy_functional,
    generated_particle_rates,
    hand_particle_rates,
    jacobi_closed_form_exact,
    jacobi_direct_exact,
    jacobi_report_exact,
    random_system,
    random_trial,
    satisfying_fields,
)
from monojac.expr import to_polynomial
from monojac.polyalg import PolyVec3, Polynomial, VariableMismatchError, random_polynomial

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def vec(texts):
    return PolyVec3(*(to_polynomial(t, FIELD_VARS) for t in texts))


def unit_electron(B=("x1", "x2", "x3"), E=("0", "0", "0")):
    return ParticleSystem((Particle("e", 1, 1, 0),), vec(E), vec(B), 1)


def test_hand_value_is_three():
    system = unit_electron()
    F, G, H = (system.observable(v) for v in ("Ve1", "Ve2", "Ve3"))
    rep = jacobi_report_exact(F, G, H, system)
    assert rep.direct_residual == Polynomial.constant(3, system.variables)
    assert rep.passed_exact


def test_solenoidal_field_gives_zero():
    system = unit_electron(B=("x2", "x3", "x1"))
    F, G, H = (system.observable(v) for v in ("Ve1", "Ve2", "Ve3"))
    assert jacobi_direct_exact(F, G, H, system).is_zero()


def test_pure_monopole_sees_div_E():
    # g div E enters with the opposite sign to e div B
    system = ParticleSystem((Particle("m", 2, 0, 3),), vec(("x1", "0", "0")), vec(("0", "0", "0")),
                            Fraction(1, 2))
    F, G, H = (system.observable(v) for v in ("Vm1", "Vm2", "Vm3"))
    want = Fraction(-3, 8 * Fraction(1, 2))
    assert jacobi_direct_exact(F, G, H, system) == Polynomial.constant(want, system.variables)


def sympy_bracket(F, G, system):
    """Independent transcription of the particle bracket in sympy."""
    syms = {n: sp.Symbol(n) for n in system.variables + FIELD_VARS}

    def S(p):
        out = sp.Integer(0)
        for exps, c in p.terms.items():
            t = sp.Rational(c.numerator, c.denominator)
            for n, e in zip(p.variables, exps):
                t *= syms[n] ** e
            out += t
        return out

    f, g = S(F), S(G)
    out = sp.Integer(0)
    for p in system.particles:
        X = [syms[n] for n in p.position]
        V = [syms[n] for n in p.velocity]
        at = {syms[x]: Xi for x, Xi in zip(FIELD_VARS, X)}
        E = sp.Matrix([S(c).subs(at, simultaneous=True) for c in system.E])
        B = sp.Matrix([S(c).subs(at, simultaneous=True) for c in system.B])
        m, e, q, c = (sp.Rational(str(z)) for z in (p.mass, p.electric_charge,
                                                     p.magnetic_charge, system.c))
        dfx = sp.Matrix([sp.diff(f, x) for x in X])
        dgx = sp.Matrix([sp.diff(g, x) for x in X])
        dfv = sp.Matrix([sp.diff(f, v) for v in V])
        dgv = sp.Matrix([sp.diff(g, v) for v in V])
        out += (dfx.dot(dgv) - dgx.dot(dfv)) / m
        out += (e * B - q * E).dot(dfv.cross(dgv)) / (m**2 * c)
    return sp.expand(out)


@settings(max_examples=15)
@given(seeds)
def test_bracket_matches_sympy_transcription(seed):
    rng = random.Random(seed)
    system, F, G, _ = random_trial(rng, 2, degree=2, n_terms=3)
    got = bracket_particle(F, G, system)
    syms = {n: sp.Symbol(n) for n in system.variables}
    want = sympy_bracket(F, G, system)
    mine = sp.Integer(0)
    for exps, c in got.terms.items():
        t = sp.Rational(c.numerator, c.denominator)
        for n, e in zip(got.variables, exps):
            t *= syms[n] ** e
        mine += t
    assert sp.expand(mine - want) == 0


@settings(max_examples=25)
@given(seeds, st.sampled_from([1, 2]))
def test_direct_equals_closed_form(seed, n):
    system, F, G, H = random_trial(random.Random(seed), n)
    assert jacobi_direct_exact(F, G, H, system) == jacobi_closed_form_exact(F, G, H, system)


@given(seeds)
def test_bracket_antisymmetric_and_leibniz(seed):
    rng = random.Random(seed)
    system, F, G, H = random_trial(rng, 2, degree=2, n_terms=3)
    assert bracket_particle(F, G, system) == -bracket_particle(G, F, system)
    assert bracket_particle(F * G, H, system) == (bracket_particle(F, H, system) * G
                                                   + F * bracket_particle(G, H, system))


@settings(max_examples=20)
@given(seeds, st.sampled_from([1, 2, 3]))
def test_satisfying_fields_make_the_residual_vanish(seed, n):
    rng = random.Random(seed)
    base = random_system(rng, n, dyons=bool(seed % 2))
    E, B = satisfying_fields(rng, base.particles)
    system = ParticleSystem(base.particles, E, B, base.c)
    F, G, H = (random_polynomial(rng, system.variables, 3, 4) for _ in range(3))
    assert jacobi_direct_exact(F, G, H, system).is_zero()


def test_uniform_ratio_dyons_with_divergent_fields():
    # e = 1, g = 2 for both: div B = 2 div E keeps Jacobi, though neither is zero
    parts = (Particle("a", 1, 1, 2), Particle("b", 3, -2, -4))
    E = vec(("x1^2", "x2", "0"))
    system = ParticleSystem(parts, E, E.scale(2), 1)
    F = system.observable("Va1*Vb2 + Xa3*Va3")
    G = system.observable("Va2^2 + Vb1*Vb3")
    H = system.observable("Va3*Vb3 + Xb1")
    assert jacobi_direct_exact(F, G, H, system).is_zero()
    bad = ParticleSystem(parts, E, E, 1)
    assert not jacobi_direct_exact(F, G, H, bad).is_zero()


def test_two_particle_rates_reproduce_the_force_laws():
    parts = (Particle("e", 1, -1, 0), Particle("m", 3, 0, 2))
    system = ParticleSystem(parts, vec(("x2", "x1*x3", "1")), vec(("x3", "0", "x1^2")),
                            Fraction(3, 2))
    gen = generated_particle_rates(system)
    hand = hand_particle_rates(system)
    assert set(gen) == set(hand)
    for name in gen:
        assert gen[name] == FourPiSeries.of(hand[name]), name


def test_two_particle_bracket_is_antisymmetric():
    parts = (Particle("e", 1, -1, 0), Particle("m", 2, 0, 1))
    system = ParticleSystem(parts, vec(("x2", "x3^2", "1")), vec(("x3", "x1", "x2")), 1)
    F = ParticleFunctional(system.observable("Ve1*Vm2 + Xe3"), vec(("1", "x1", "0")), None, 0)
    G = field_energy_functional(system)
    assert bracket_two_particle(F, G, system) == bracket_two_particle(G, F, system).scale(-1)
    assert bracket_two_particle(G, G, system).is_zero()


def test_four_pi_series_arithmetic():
    V = ("a",)
    one = Polynomial.constant(1, V)
    s = FourPiSeries.of(one, 1) + FourPiSeries.of(one.scale(2), -1)
    assert s.evaluate({"a": 0}) == pytest.approx(4 * 3.141592653589793 + 2 / (4 * 3.141592653589793))
    assert (s - s).is_zero()
    assert s.shifted(1).coeffs.keys() == {2, 0}


@pytest.mark.parametrize("make", [
    lambda: Particle("e", 0, 1, 0),
    lambda: Particle("1x", 1, 1, 0),
    lambda: ParticleSystem((Particle("e", 1), Particle("e", 2)), vec(("0",) * 3), vec(("0",) * 3)),
    lambda: ParticleSystem((), vec(("0",) * 3), vec(("0",) * 3)),
    lambda: ParticleSystem((Particle("e", 1),), vec(("0",) * 3), vec(("0",) * 3), 0),
])
def test_invalid_particle_setups_rejected(make):
    with pytest.raises(ValueError):
        make()


def test_observables_must_live_on_the_system_variables():
    system = unit_electron()
    stray = Polynomial.variable("x1", FIELD_VARS)
    with pytest.raises(VariableMismatchError):
        bracket_particle(stray, stray, system)
