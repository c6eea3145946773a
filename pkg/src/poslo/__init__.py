"""Aggregate signatures for secure logging with commitment-free epoch signing."""
from . import group, primitives, scheme_c, scheme_f, seeds
from .distill import CCD, Distiller, Record, distill_epoch, sebver
from .errors import (
    ExhaustedError, FormatError, LengthError, PosloError, SeedNotDisclosed,
    SequenceError, StateError, UnsupportedInput,
)
from .group import GENERATOR, IDENTITY, Q, GroupElement, count_ops
from .parallel import agg_ekeys, paver, paver_stream
from .primitives import Suite, SuiteConfig
from .seeds import SeedNode, SeedStack, sc, so, sr

__all__ = [
    "CCD", "Distiller", "Record", "distill_epoch", "sebver",
    "ExhaustedError", "FormatError", "LengthError", "PosloError", "SeedNotDisclosed",
    "SequenceError", "StateError", "UnsupportedInput",
    "GENERATOR", "IDENTITY", "Q", "GroupElement", "count_ops",
    "agg_ekeys", "paver", "paver_stream",
    "Suite", "SuiteConfig", "SeedNode", "SeedStack", "sc", "so", "sr",
    "group", "primitives", "scheme_c", "scheme_f", "seeds",
]
