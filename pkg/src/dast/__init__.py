"""Semantic complexity toolkit: rule-based derivation of text meaning,
complexity measures over the derivation lattice, judgment scoring and
difficulty-ratio corpus analysis."""

from .complexity import (
    DimensionPolicy,
    SemanticPoint,
    ValueConfig,
    dastex,
    node_complexity,
    overall_complexity,
    semantic_point,
)
from .engine import DerivationLimits, Lattice, LatticeNode, derive
from .errors import (
    DastError,
    DataSchemaError,
    DerivationError,
    DSLSyntaxError,
    LimitExceeded,
    LogicError,
    QuantizationError,
)
from .logic import SemanticLogic, load_logic, parse_logic, quantize_text, render_logic

__version__ = "0.1.0"
