"""Explicit 3-player NOF exactly-N protocol and the corner-free sets it induces."""

from .carry_code import (binary_entropy, decode_carry, encode_carry, encode_carry_raw,
                         entropy_bound_bits, make_buckets)
from .corners import (behrend_ap3_set, behrend_corner_free, density_report, find_corner,
                      largest_class, transcript_classes, verify_corner_free)
from .errors import (CoverError, InvalidSizeError, MalformedCodeError, MalformedVectorError,
                     NOFError, ParseError, RangeError, ShapeError)
from .protocol import (Message, Outcome, Transcript, exactly_n, measure_costs, run_smeared,
                       run_typical, trans, verify_sweep)
from .radix import (LAMBDA, ProtocolParams, carry_vector, eta, from_digits, select_params,
                    to_digits, zeta)
from .shift_cover import (GridSet, ShiftFamily, find_uncovered, fractional_cover_check,
                          good_set, greedy_cover, randomized_cover, verify_cover)
from .vector_addition import GDecision, decide_g, norm_field_width

__version__ = "0.1.0"
