"""
Exact calculus on the step-two group
====================================

Vector fields, brackets and the carre du champ operators with rational
coefficients. Every equality printed here is an exact polynomial identity.
"""

from fractions import Fraction

from threebm.algebra import MultiPoly, X, Y, gamma, gamma2, lie_bracket, sublaplacian, theta
from threebm.radial import first_proof_certificate, lift_radial, radial_gens

# the horizontal fields and their brackets
print("X1 =", X(1))
print("[X1, X2] == Y3:", lie_bracket(X(1), X(2)) == Y(3))
print("[theta1, theta2] == theta3:", lie_bracket(theta(1), theta(2)) == theta(3))

# the radial coordinates
x1, x2, x3, y1, y2, y3 = MultiPoly.gens()
r1 = x1 * x1 + x2 * x2 + x3 * x3
r2 = y1 * y1 + y2 * y2 + y3 * y3
z = x1 * y1 + x2 * y2 + x3 * y3
print("L r2 =", sublaplacian(r2))
print("Gamma(r2) =", gamma(r2))

# Gamma_2 can be negative for a general polynomial ...
f = x1 * y2
p = [1, 0, 0, 0, 0, 0]
print("Gamma_2(x1 y2) at", p, "=", gamma2(f)(p))

# ... but not for a radial one; the certificate writes it as squares
R1, R2, Z = radial_gens()
F = R1 * R2 - Z * Z * 2 + R1
g = [Fraction(1, 2), 1, 0, Fraction(-1, 4), Fraction(1, 2), 1]
cert = first_proof_certificate(F, g)
print("degree of F in the six coordinates:", lift_radial(F).degree())
print("Gamma_2(F) * |x cross y|^2 =", cert.lhs, " residual of the square sum:", cert.residual)
