"""Exact solvers for block-structured integer programs.

Three structured routes (aggregate all-ones row, n-fold Smith elimination,
4-block Smith elimination with cell enumeration) plus an exhaustive oracle,
hardness-reduction encoders and seeded instance generators.
"""

from .model import (
    EvaluationReport,
    FourBlockInstance,
    GeneralizedNFoldInstance,
    Infeasible,
    IntMatrix,
    Solution,
    StructureClass,
    classify,
    evaluate,
    validate,
)

__all__ = [
    "EvaluationReport",
    "FourBlockInstance",
    "GeneralizedNFoldInstance",
    "Infeasible",
    "IntMatrix",
    "Solution",
    "StructureClass",
    "classify",
    "evaluate",
    "validate",
]

__version__ = "0.1.0"
