# %% [markdown]
# # Extensions, bivectors and Jacobi brackets
#
# Any conserved function `phi_k` can replace `phi` as the Hamiltonian of the
# suspended flow. The extended two-form `Omega_k` is again closed and
# nondegenerate wherever `W . n` stays away from zero. Two extensions
# combine into a conformally symplectic form and, after inversion, into a
# Jacobi structure `(Lambda, E)`.

# %%
import numpy as np

from flowforms import expr as ex
from flowforms.fluid import build_hierarchy
from flowforms.forms import Form, residual_norm
from flowforms.harness import load_scenario
from flowforms.jacobi import (
    DegenerateExtensionError,
    conformal_pair,
    extend_symplectic,
    hamiltonian_vector_field,
    jacobi_bracket,
    jacobi_identity,
    jacobi_pair,
    schouten_bracket,
)
from flowforms.randomfields import random_polynomial

s = load_scenario("rotation")
H = build_hierarchy(s, 2)

# %% [markdown]
# ## Extensions
#
# `k = 0` reproduces the frozen-in form. The catalog gives rotation the
# extension Hamiltonian `x cos(t) + y sin(t) + 10`, which is conserved.

# %%
e0 = extend_symplectic(s, H, 0)
e1 = extend_symplectic(s, H, 1)
print(ex.to_text(e1.phi_k))
for c in e1.checks:
    print(c.line())

# %% [markdown]
# Hamiltonians whose gradient is orthogonal to the hierarchy field give a
# degenerate form and are rejected.

# %%
try:
    extend_symplectic(s, H, 1, "z + x^2 + y^2")
except DegenerateExtensionError as err:
    print("rejected:", err)

# %% [markdown]
# ## Bivectors
#
# The inverse of `Omega_0` is a Poisson bivector, so its Schouten square
# vanishes.

# %%
P = e0.P
print(residual_norm(schouten_bracket(P, P), e0.grid))

# %% [markdown]
# ## Conformal and Jacobi pairs
#
# `Omega_kl = Omega_l / phi_k` satisfies `d Omega_kl = alpha ^ Omega_kl` with
# `alpha = d log phi_k`. Its inverse is `Lambda` and `E = Lambda(alpha)`.

# %%
C = conformal_pair(e1.phi_k, e0)
print(C.alpha, "shift", C.shift)
J = jacobi_pair(e1, e0)
for c in J.checks:
    print(c.line())

# %% [markdown]
# The bracket of two constants is not zero in general. It satisfies the
# Jacobi identity but not the Leibniz rule.

# %%
g = J.grid
one_x = jacobi_bracket("1", "x", J)
print("max |{1, x}| =", residual_norm(Form.scalar(one_x), g)[0])

rng = np.random.default_rng(0)
f, gg, h = (random_polynomial(rng, degree=2, terms=3) for _ in range(3))
print("jacobi identity", residual_norm(Form.scalar(jacobi_identity(f, gg, h, J)), g)[0])

V, defect = hamiltonian_vector_field("x*y", J)
print("V_f vs P_l(d(f/phi_k))", residual_norm(Form.one_form(list(defect.comps)), g)[0])
