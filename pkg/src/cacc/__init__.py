"""Communication complexity of one-dimensional cellular automata."""

from .classifier import (
    BOUNDED_44,
    ClassReport,
    GrowthClass,
    classify_all,
    classify_growth,
    rank_vs_cc1_report,
    sweep,
)
from .config import Config, load_config
from .errors import BudgetExceeded, CAError, InvalidInput, Unsupported
from .matrix import (
    CCProfile,
    FoolingSet,
    IterationMatrix,
    SplitSpec,
    build_matrix,
    cc1_profile,
    distinct_counts,
    export_matrix_image,
    partition_number_exact,
    rank_lower_bound,
    verify_fooling_set,
)
from .protocols import (
    OneRoundProtocol,
    additive,
    linear_protocol,
    rule178_fooling_set,
    rule178_protocol,
    rule218_lower_bound_family,
    rule218_params,
    rule218_protocol,
    verify_one_round,
)
from .rescaling import (
    InjectionWitness,
    RescalingParams,
    check_simulation,
    compare_cc_sequences,
    find_subautomaton,
    pack,
    packed_splits,
    rescale,
    unpack,
)
from .rules import (
    LinearityCertificate,
    RuleTable,
    canonical_codes,
    dependent_cells,
    detect_linearity,
    format_rule,
    iterate,
    make_eca,
    make_rule,
    parse_rule,
    symmetry,
)
from .tree import TreeInstance, tree_matrix, tree_multiround_cost, tree_value

__version__ = "0.1.0"
