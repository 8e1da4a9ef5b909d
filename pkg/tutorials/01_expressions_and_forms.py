# %% [markdown]
# # Expressions and differential forms
#
# Everything in `flowforms` is built on two layers: an exact expression tree
# over the coordinates `t, x, y, z`, and differential forms on 4D spacetime
# whose components are such expressions. Derivatives are symbolic. Residuals
# are evaluated numerically on a sample grid.

# %%
import numpy as np

from flowforms import expr as ex
from flowforms.forms import (
    Form,
    SampleGrid,
    VectorField,
    d,
    dt,
    dx,
    dy,
    dz,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    residual_norm,
    wedge,
)

# %% [markdown]
# ## Expressions
#
# Parsing returns interned nodes, so structurally equal expressions are the
# same object. Note that unary minus binds tighter than `^`.

# %%
e = ex.parse_expression("x*sin(y) + exp(-t)*z^2")
print(ex.to_text(e))
print(ex.to_text(ex.differentiate(e, "z")))
print(ex.parse_expression("x*sin(y)") is ex.parse_expression("x * sin(y)"))
print(ex.evaluate("-x^2", ex.Point4.of(x=3)))

# %% [markdown]
# `simplify` folds constants and trivial identities only. `expand` gives a
# polynomial normal form for display.

# %%
print(ex.to_text(ex.simplify("0*sin(z) + x*1")))
print(ex.to_text(ex.expand("(x + y)^2 - x^2")))

# %% [markdown]
# Evaluation is vectorised over numpy arrays.

# %%
xs = np.linspace(0, 1, 5)
print(ex.evaluate_array(e, {"t": 0 * xs, "x": xs, "y": xs, "z": xs}))

# %% [markdown]
# ## Forms
#
# Basis one-forms `dt, dx, dy, dz` combine with `wedge`. Components are kept in
# the index order t < x < y < z.

# %%
omega = wedge(dy, dz) + wedge(dz, dx)
print(omega)
print(wedge(omega, omega).is_zero)

a = Form.one_form([0, "t*y", 0, "x*z"])
print(d(a))
print(d(d(a)).is_zero)

# %% [markdown]
# Vector fields act on forms through the interior product and the Lie
# derivative.

# %%
X = VectorField.coordinate("x")
print(interior_product(X, wedge(dx, dy)))
print(lie_derivative_form(X, Form.one_form([0, 0, "x", 0])))

rot = VectorField.spatial("-y", "x", 0)
print(lie_bracket(rot, VectorField.spatial(0, 0, 1)).is_zero)

# %% [markdown]
# ## Residuals on a grid
#
# Identities are checked as max and RMS norms over a tensor grid. The default
# grid has 8 points per spatial axis on [0, 2 pi) and three time slices.

# %%
grid = SampleGrid()
print(grid.size)
cartan = lie_derivative_form(rot, a) - (interior_product(rot, d(a)) + d(interior_product(rot, a)))
print(residual_norm(cartan, grid))
print(residual_norm(wedge(dt, dx), grid))
