from ..core.types import Decision, Partition
from .base import OffloadPolicy


def optimal_decide(partition: Partition, i: int) -> Decision:
    '''The optimal static threshold policy: accept exactly on Phi_H'''
    return Decision.ACCEPT if partition.accepts(i) else Decision.OFFLOAD


class OptimalPolicy(OffloadPolicy):
    '''Benchmark that knows the true instance'''
    name = 'optimal'

    def __init__(self, partition: Partition):
        self.partition = partition

    def decide(self, index: int) -> Decision:
        return optimal_decide(self.partition, index)


class AlwaysOffload(OffloadPolicy):
    name = 'always-offload'

    def decide(self, index: int) -> Decision:
        return Decision.OFFLOAD


class AlwaysAccept(OffloadPolicy):
    name = 'always-accept'

    def decide(self, index: int) -> Decision:
        return Decision.ACCEPT
