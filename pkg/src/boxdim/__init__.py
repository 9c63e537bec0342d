"""Exact touching representations by comparable boxes, their verifiers,
constructions, and randomized grid deletion with certified tree decompositions."""

from .geometry import Box, Interval, as_rational, format_rational, parse_rational
from .graph import Graph, KTreePlan, TreeDecomp, verify_coloring, verify_tree_decomposition
from .representation import (
    Ball,
    CertificateError,
    CsRep,
    EnvelopeRep,
    Report,
    TouchingRep,
    envelope_from_boxes,
    verify_cs_rep,
    verify_envelope_rep,
    verify_touching_rep,
)

__version__ = "0.1.0"
