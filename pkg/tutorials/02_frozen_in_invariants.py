# %% [markdown]
# # Frozen-in fields, the symmetry hierarchy and helicity
#
# A scenario bundles an incompressible velocity `v`, a frozen-in field `B`,
# a Lagrangian invariant `phi` and a conserved function `h1`. From these the
# engine builds a closed two-form on spacetime, a hierarchy of commuting
# symmetry fields, and a family of helicity densities.

# %%
import math
import warnings

from flowforms import expr as ex
from flowforms.fluid import (
    abc_flow,
    bracket_closure,
    build_hierarchy,
    build_symplectic,
    euler_check,
    helicity_integral,
    nambu_bracket,
    verify_scenario,
)
from flowforms.harness import load_scenario
from flowforms.helicity import (
    RelativeClassWarning,
    eulerian_residual,
    gauge_transform,
    helicity_three_form,
    invariant_two_form,
    lagrangian_residual,
    potential_one_form,
)

# %% [markdown]
# ## Scenarios
#
# Three flows are built in. Rigid rotation about the z axis with a vertical
# frozen-in field is the richest of them.

# %%
s = load_scenario("rotation")
print(s.v, "|", s.B, "|", ex.to_text(s.phi), "|", ex.to_text(s.h1))
print(verify_scenario(s).to_text())

# %% [markdown]
# ## The closed two-form
#
# `Omega` combines the flux of `B` with a time component. Its square is the
# invariant volume.

# %%
S = build_symplectic(s)
print(S.Omega)
print(ex.to_text(S.rho))
for c in S.checks:
    print(c.line())

# %% [markdown]
# ## The hierarchy
#
# `u0 = -B/rho` seeds the hierarchy. Each `W_k` commutes with the suspended
# flow `d_t + v` and comes with a conserved Hamiltonian `h_k`. For rotation
# the hierarchy stops at `k = 3`.

# %%
H = build_hierarchy(s, 3)
print("sign", H.sign, "-", H.sign_note)
for k in range(1, 4):
    W = H.field(k).map(ex.expand)
    print(f"W_{k} = {W}    h_{k} = {ex.to_text(ex.expand(H.hamiltonian(k)))}")

# %% [markdown]
# Brackets of hierarchy fields close on the Nambu bracket of their
# Hamiltonians.

# %%
print(ex.to_text(nambu_bracket("x", "y", s)))
_, h12, rep = bracket_closure(s, H, 1, 2)
print(ex.to_text(ex.expand(h12)))
print(rep.to_text())

# %% [markdown]
# ## Helicity densities
#
# Pairing a potential of one invariant two-form with another invariant
# two-form gives a conserved density. With the plain potential the density is
# transported with the flow. For rotation the mixed density `H_12` happens to
# vanish identically, so its residuals are pure rounding.

# %%
P = potential_one_form(s, H, 1)
T2 = invariant_two_form(s, H, 2)
D = helicity_three_form(P, T2)
print(ex.to_text(ex.expand(D.H)))
print("lagrangian", lagrangian_residual(D, s)[0], "eulerian", eulerian_residual(D, s)[0])

# %% [markdown]
# A gauge change `theta -> theta + d(lambda)` keeps the Eulerian law but can
# break the Lagrangian one. With `lambda = x` the transport term `W_2(chi)`
# is nonzero.

# %%
G = gauge_transform(P, "x")
Dg = helicity_three_form(G, T2)
print("chi =", ex.to_text(G.chi), "class", G.gauge_class)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RelativeClassWarning)
    print("lagrangian", lagrangian_residual(Dg, s)[0])
print("eulerian", eulerian_residual(Dg, s)[0])

# %% [markdown]
# ## Euler flows
#
# Rigid rotation solves the Euler equations with pressure `(x^2 + y^2)/2`.
# The vorticity then plays the role of the frozen-in field.

# %%
theta, rep = euler_check(s)
print(rep.to_text())

# %% [markdown]
# ## Helicity of the ABC flow
#
# ABC flows are Beltrami fields, so their helicity over the periodic box is
# the box volume times `A^2 + B^2 + C^2`.

# %%
value = helicity_integral(abc_flow(1, 1, 1), 64)
print(value, 3 * (2 * math.pi) ** 3)
