"""Square functions comparing moving averages with dyadic martingale expectations."""
from .adversary import AdversaryResult, adversarial_bmo, best_assignment, envelope
from .constructions import (
    halfline_example,
    indicator,
    integer_example,
    pn_table,
    ring_interval,
    theorem1ii_example,
    theorem1ii_scales,
)
from .dyadic import (
    DyadicInterval,
    cell,
    enumerate_dyadic,
    expectation,
    expectation_at,
    expectation_profile,
)
from .errors import ContractError
from .moving import (
    WindowExtrema,
    moving_average,
    window_extrema,
    window_extrema_naive,
    window_sums_at,
)
from .norms import (
    OscillationReport,
    Theorem2Certificate,
    bmo_dyadic,
    certify_sweep,
    lp_norm,
    mean_oscillation,
    theorem2_certificate,
)
from .selector import (
    CenteredSelector,
    LeftSelector,
    MembershipSelector,
    RandomSelector,
    RightSelector,
    Selector,
    TabulatedSelector,
    load_selector,
    parse_selector,
    save_selector,
    select,
)
from .signal import INTEGER, REAL, GridSpec, Signal, integral, load_signal, make_signal, save_signal
from .sqfn import ScaleRange, SquareFunctionResult, s_inf, s_selector, s_sup, tail_bound

__version__ = "0.1.0"
