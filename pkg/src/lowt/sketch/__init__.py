"""Randomized parity sketches, their exact error oracles, and PDT depth."""

from .core import (
    FormulaInner,
    FourierSampler,
    Lit,
    OrInner,
    ParitySketch,
    SignedThreshold,
    Threshold,
    Xor,
    and_,
    binomial_upper_tail,
    choose_k_fourier,
    choose_k_or,
    eval_sketch,
    exact_error_fourier,
    exact_error_or,
    hoeffding_bound,
    iter_nodes,
    or_,
    sample_fourier_sketch,
    sample_or_sketch,
    threshold_cutoff,
)
from .generators import (
    TABLE_FAMILIES,
    FourierSamplingGenerator,
    GapHammingWeightGenerator,
    HammingWeightGenerator,
    OrReductionGenerator,
    ParityOrGenerator,
    RankOneGenerator,
    SketchGenerator,
    hw_rep_false_accept,
    meq_rows,
    rank_detect_probability,
    rpdt_table_construction,
)
from .pdt import PDT_MAX_ARITY, determined_by, pdt_min_depth, rref_bases
from .serialize import sketch_from_json, sketch_to_json

__all__ = [name for name in dir() if not name.startswith("_")]
