"""Independent symbolic oracles used to derive frozen reference values.

Creation operators are treated as commuting polynomial variables; a Fock
state |n1, n2, ...> is the monomial x1^n1 x2^n2 ... / sqrt(n1! n2! ...).
"""

from __future__ import annotations

import sympy as sp


def _fock_coeff(poly, variables, occ):
    """Amplitude of |occ> in a creation-operator polynomial acting on vacuum."""
    mono = sp.Mul(*[v**n for v, n in zip(variables, occ)])
    c = sp.Poly(sp.expand(poly), *variables).coeff_monomial(mono)
    return c * sp.sqrt(sp.Mul(*[sp.factorial(n) for n in occ]))


def scissors_output(alpha, beta, T, g):
    """Heralded output of quantum scissors on the lossy qubit alpha|0> + beta|1>.

    Loss is unravelled into two pure branches. Each branch meets the resource
    sqrt(eta)|1_a 0_v> + sqrt(1-eta)|0_a 1_v> on a 50:50 splitter; the two
    single-click outcomes are pooled after undoing the phase flip on v.
    Returns (2x2 sympy matrix on v, total success probability).
    """
    xe, xa, xv = sp.symbols("x_e x_a x_v")
    eta = sp.Integer(1) / (1 + g**2)
    r = sp.sqrt(sp.Rational(1, 2))
    sub = {xe: r * (xe + xa), xa: r * (xe - xa)}
    branches = [alpha + beta * sp.sqrt(T) * xe, beta * sp.sqrt(1 - T) * sp.Integer(1)]
    rho = sp.zeros(2, 2)
    for b in branches:
        joint = sp.expand(b * (sp.sqrt(eta) * xa + sp.sqrt(1 - eta) * xv))
        joint = sp.expand(joint.xreplace(sub))
        for click, sign in (((1, 0), 1), ((0, 1), -1)):
            vec = sp.Matrix(
                [
                    _fock_coeff(joint, (xe, xa, xv), (*click, 0)),
                    sign * _fock_coeff(joint, (xe, xa, xv), (*click, 1)),
                ]
            )
            rho += vec * vec.H
    p = sp.simplify(rho.trace())
    return sp.simplify(rho / p), p


def fidelity_s3(b, T, g):
    """Overlap <psi|rho|psi> of the input qubit with the amplified lossy output."""
    a = sp.sqrt(1 - b)
    beta = sp.sqrt(b)
    num = beta**2 * (1 - T) * a**2 + (a * a + g * sp.sqrt(T) * beta * beta) ** 2
    return num / (1 + T * b * (g**2 - 1))


def biased_pair(eps, T):
    """Biased pair after loss on e and amplification with g sqrt(eps T) = sqrt(1 - eps).

    Returns the normalized 4x4 matrix in the (f, e) basis |00>, |01>, |10>, |11>.
    """
    g = sp.sqrt((1 - eps) / (eps * T))
    # Kraus branches of loss on e; amplification multiplies |1_e> by g
    k0 = sp.Matrix([0, sp.sqrt(eps) * sp.sqrt(T) * g, sp.sqrt(1 - eps), 0])
    k1 = sp.Matrix([sp.sqrt(eps) * sp.sqrt(1 - T), 0, 0, 0])
    rho = k0 * k0.T + k1 * k1.T
    return sp.simplify(rho / rho.trace())


def concurrence_subspace(rho):
    return 2 * sp.Max(sp.Abs(rho[1, 2]) - sp.sqrt(rho[0, 0] * rho[3, 3]), 0)
