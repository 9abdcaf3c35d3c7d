"""Builtin models used by the demos, benchmarks, and tests."""

from __future__ import annotations

from .dsl import parse_model
from .errors import UnknownModelError
from .graph import Graph

# Two independent standard normals feeding one mixing operation; the
# canonical small example of dependency sparsity.
SIMPLE_SOURCE = """\
input u1 ~ Normal(0, 1)
input u2 ~ Normal(0, 1)
output f = cos(u1) + exp(-u2)
"""

# Cycle time in seconds of a reciprocating piston driven by gas pressure.
# Weight M, surface area S, and initial gas volume V0 are uncertain; the
# spring constant and gas conditions are fixed.  Note the model is only
# real-valued on part of R^3: far tails (S or V0 well below zero) make the
# inner square root negative, so quadrature grids with many points per
# axis (k >= 5) and unrestricted Monte Carlo sampling raise DomainError.
PISTON_SOURCE = """\
input M ~ Normal(50, 10)
input S ~ Normal(0.01, 0.005)
input V0 ~ Normal(0.005, 0.002)
param k_spring = 3000
param P0 = 100000
param Ta = 293
param T0 = 350
A = P0*S + 19.62*M - k_spring*V0/S
V = S/(2*k_spring) * (sqrt(A^2 + 4*k_spring*(P0*V0/T0)*Ta) - A)
output C = 2*pi*sqrt(M/(k_spring + S^2*P0*V0*Ta/(T0*V^2)))
"""

# Synthetic two-segment analysis: each uncertain input drives one segment
# and only the final summation mixes them, mimicking multi-point mission
# models where each operating point has its own uncertain condition.
MULTIPOINT_SOURCE = """\
input v1 ~ Normal(0.3, 0.03)
input v2 ~ Normal(0.5, 0.05)
seg1 = exp(sin(v1))*v1^2 + log(1 + v1^2)
seg2 = exp(sin(v2))*v2^2 + log(1 + v2^2)
output f = seg1 + seg2
"""

BUILTIN_SOURCES = {
    "simple": SIMPLE_SOURCE,
    "piston": PISTON_SOURCE,
    "multipoint": MULTIPOINT_SOURCE,
}


def builtin_model(name: str) -> Graph:
    """Parse and return a builtin model by name.

    Raises UnknownModelError for anything outside BUILTIN_SOURCES.
    """
    try:
        source = BUILTIN_SOURCES[name]
    except KeyError:
        raise UnknownModelError(name) from None
    return parse_model(source)
