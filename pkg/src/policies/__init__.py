# Online offloading policies and baselines
from .base import OffloadPolicy
from .settings import PolicyConfig, parse_policy_config, LCB_POLICIES
from .lcb import (
    LcbState, LcbPolicy, lcb_phi_lite, lcb_phi, lcb_phi_prefix_table, lcb_gamma, decide, update
)
from .hedge import HedgeState, HedgePolicy, hedge_decide, hedge_update, auto_eta
from .baselines import OptimalPolicy, AlwaysOffload, AlwaysAccept, optimal_decide
from .factory import make_policy
