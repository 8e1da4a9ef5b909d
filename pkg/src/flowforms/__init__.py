"""Symbolic exterior calculus on time-extended space and residual checks of
helicity-type invariants generated by particle-relabelling symmetries.

The expression layer (:mod:`flowforms.expr`) gives exact derivatives; every
identity is then sampled on a grid and reported as a max/rms residual.
"""

from . import expr, forms
from .expr import Expression, parse_expression, to_text
from .fluid import (
    FlowScenario,
    abc_flow,
    bracket_closure,
    build_hierarchy,
    build_symplectic,
    check_symmetry,
    euler_check,
    helicity_integral,
    nambu_bracket,
    verify_scenario,
)
from .forms import Form, Multivector, SampleGrid, VectorField
from .harness import CATALOG, emit_report, load_scenario, run_checks
from .helicity import (
    gauge_transform,
    helicity_three_form,
    invariant_two_form,
    potential_one_form,
)
from .jacobi import conformal_pair, extend_symplectic, jacobi_bracket, jacobi_pair
from .report import VERSION as __version__
from .report import Check, VerificationReport

__all__ = [
    "expr", "forms", "Expression", "parse_expression", "to_text",
    "Form", "Multivector", "SampleGrid", "VectorField",
    "FlowScenario", "verify_scenario", "build_symplectic", "check_symmetry", "build_hierarchy",
    "nambu_bracket", "bracket_closure", "euler_check", "helicity_integral", "abc_flow",
    "invariant_two_form", "potential_one_form", "gauge_transform", "helicity_three_form",
    "extend_symplectic", "conformal_pair", "jacobi_pair", "jacobi_bracket",
    "CATALOG", "load_scenario", "run_checks", "emit_report",
    "Check", "VerificationReport", "__version__",
]
