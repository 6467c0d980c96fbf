"""Desk-scale verification of Goldbach-type decompositions and prime offsets."""

from .errors import Anomaly, CounterexampleCandidate, FormNotPrime, InvalidInterval, NotPrime, RangeTooLarge
from .forms import (
    FormWitness,
    conjecture2_witness,
    conjecture3_witness,
    conjecture4_verify,
    construct_even_target,
    construct_odd_target,
    identity_suite,
)
from .harness import RangeReport, VerifyJob, emit_report, run_job, show_witness
from .goldbach import (
    GoldbachPartition,
    MidpointWitness,
    bijection_audit,
    is_goldbach,
    midpoint_witnesses,
    parity_split,
    partitions,
)
from .primes import (
    CensusRow,
    PrimeTable,
    ResidueClass,
    classify_mod4,
    is_prime,
    miller_rabin,
    residue_census,
    sieve_range,
)
from .progressions import (
    Collapse,
    OffsetWitness,
    ProgressionReport,
    ProgressionSpec,
    coprime_witness,
    gcd_collapse_check,
    odd_pair_witness,
    offset_witnesses,
    progression_primes,
    reduce_odd_progression,
)

__version__ = "0.1.0"
