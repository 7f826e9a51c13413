# Domain types and instance-level math
from .types import (
    AccuracyProfile, ConfidenceGrid, CostModel, CostVariant, Decision,
    GapVector, InstanceSpec, Partition
)
from .instance import (
    partition_phi, gap_vector, expected_step_cost,
    threshold_index, expected_policy_cost, synthetic_instance
)
from .schema import (
    instance_from_dict, instance_to_dict, load_instance, save_instance,
    instance_fingerprint
)
