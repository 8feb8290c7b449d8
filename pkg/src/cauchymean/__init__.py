"""Solutions of [phi(y) - phi(x)] psi'(h) = [psi(y) - psi(x)] phi'(h) over
quasi-arithmetic means h(x, y) = H^-1(alpha H(x) + beta H(y))."""
from .classify import ClassificationReport, ClassifyOptions, classify_original, classify_pair, decompose_support
from .expr import DomainError, ExprError, ParseError, differentiate, evaluate, parse, serialize
from .families import (DEPENDENT, EXPONENTIAL, QUADRATIC, TRIGONOMETRIC, FamilySpec, build_pair,
                       counterexample_pair)
from .funcmodel import Func1D, Interval, SamplePlan, finite_window, parse_interval, sample
from .qam import (Generator, GeneratorError, MeanWeights, MonotonicityError, QuasiArithmeticMean,
                  builtin_generator, inverse, make_generator, mean, power_mean_generator, resolve_generator)
from .residual import locate_mean_points, reduce, scaled_residual, verify_grid

__all__ = [
    "ClassificationReport", "ClassifyOptions", "classify_original", "classify_pair", "decompose_support",
    "DomainError", "ExprError", "ParseError", "differentiate", "evaluate", "parse", "serialize",
    "DEPENDENT", "EXPONENTIAL", "QUADRATIC", "TRIGONOMETRIC", "FamilySpec", "build_pair", "counterexample_pair",
    "Func1D", "Interval", "SamplePlan", "finite_window", "parse_interval", "sample",
    "Generator", "GeneratorError", "MeanWeights", "MonotonicityError", "QuasiArithmeticMean",
    "builtin_generator", "inverse", "make_generator", "mean", "power_mean_generator", "resolve_generator",
    "locate_mean_points", "reduce", "scaled_residual", "verify_grid",
]
