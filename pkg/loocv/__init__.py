# loocv/__init__.py
from loocv.benchmark import BenchRow, run_benchmark, time_call
from loocv.scores import BruteVariant, LoocvResult, Method, loocv_brute, loocv_efficient, scaling_factor
from loocv.sweep import (
    Discrepancy,
    SweepResult,
    argmin_k,
    default_k_range,
    loocv_sweep,
    relative_discrepancy,
    select_best_k,
)

__all__ = [
    "BenchRow",
    "BruteVariant",
    "Discrepancy",
    "LoocvResult",
    "Method",
    "SweepResult",
    "argmin_k",
    "default_k_range",
    "loocv_brute",
    "loocv_efficient",
    "loocv_sweep",
    "relative_discrepancy",
    "run_benchmark",
    "scaling_factor",
    "select_best_k",
    "time_call",
]
