"""Construction and verification of group divisible designs with block size 4."""

from .core import (
    DesignFormatError,
    GroupedDesign,
    Provenance,
    TypeSignature,
    blocks_for_signature,
    cross_pair_count,
    expected_block_count,
    signature_of,
)
from .verify import VerificationReport, verify, verify_dgdd_profile

__version__ = "0.1.0"
