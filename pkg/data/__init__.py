# data/__init__.py
from data.io import load_csv, write_csv
from data.preprocess import Scaling, standardize
from data.synth import make_synthetic, true_function
from data.ties import TieReport, detect_ties, find_duplicate_groups, resolve_duplicates

__all__ = [
    "Scaling",
    "TieReport",
    "detect_ties",
    "find_duplicate_groups",
    "load_csv",
    "make_synthetic",
    "resolve_duplicates",
    "standardize",
    "true_function",
    "write_csv",
]
