"""Deterministic initial partitions for k-means clustering of mixed data."""

__version__ = "0.1.0"

from .consensus import anmi, combine, hgpa, mcla, nmi
from .dataset import Dataset, MissingPolicy, Schema, load_csv, normalize, read_schema
from .codist import DistanceModel, build_model
from .estimator import KMCMD, InitKmix
from .initkmix import run_initkmix, std_normal_quantile
from .kmcmd import iterate
from .metrics import accuracy, accuracy_sd, mean_accuracy

__all__ = [
    "KMCMD",
    "InitKmix",
    "Dataset",
    "DistanceModel",
    "MissingPolicy",
    "Schema",
    "accuracy",
    "accuracy_sd",
    "anmi",
    "build_model",
    "combine",
    "hgpa",
    "iterate",
    "load_csv",
    "mcla",
    "mean_accuracy",
    "nmi",
    "normalize",
    "read_schema",
    "run_initkmix",
    "std_normal_quantile",
]
