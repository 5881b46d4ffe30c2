"""Numerical geometry of parametrised quantum state families.

Quantum geometric tensors, chart pullbacks (including a real realisation of
the Wick-rotated time axis), signature classification and curvature scans.
"""
__version__ = "0.1.0"

from .charts import (  # noqa: E402
    complex_pair_line_element,
    complexify_pairs,
    hopf_chart,
    jacobian,
    minkowski_line_element,
    pullback_metric,
    wick_chart,
)
from .curvature import christoffel, flatness_scan, riemann  # noqa: E402
from .expr_dsl import canonical_print, eval_expression, parse_expression, parse_family_file  # noqa: E402
from .finite_diff import DifferentiationScheme  # noqa: E402
from .quantum_metric import (  # noqa: E402
    assemble_real_metric,
    eta_coefficients,
    g_component_wirtinger,
    qgt,
    signature,
)
from .state_families import (  # noqa: E402
    builtin_family,
    differentiate_state,
    evaluate_state,
    inner_product,
    load_family,
)
