"""Block sensitivity of minterm-transitive Boolean functions at desk scale."""

from .core import (
    BitString,
    CyclicGroup,
    ExplicitGroup,
    Pattern,
    Permutation,
    agree,
    apply_permutation,
    enumerate_group,
    flip,
    is_transitive,
)
from .errors import (
    ConstructionFailure,
    InvalidArgumentError,
    LogicError,
    MintermError,
    ResourceLimitError,
)
from .functions import MintermFunction

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "ConstructionFailure",
    "CyclicGroup",
    "ExplicitGroup",
    "InvalidArgumentError",
    "LogicError",
    "MintermError",
    "MintermFunction",
    "Pattern",
    "Permutation",
    "ResourceLimitError",
    "agree",
    "apply_permutation",
    "enumerate_group",
    "flip",
    "is_transitive",
]
