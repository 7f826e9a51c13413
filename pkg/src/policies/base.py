from abc import ABC, abstractmethod

from ..core.types import Decision
from ..environment.stream import Feedback, Round


class OffloadPolicy(ABC):
    '''Online offloading rule.

    Each round the runner calls decide() with the sample's grid index, then
    update() with the feedback that decision earned. Full-information
    baselines additionally get observe() with the whole round.
    '''
    name: str = 'policy'
    full_information: bool = False
    deterministic: bool = True

    @abstractmethod
    def decide(self, index: int) -> Decision:
        ...

    def update(self, index: int, feedback: Feedback, decision: Decision) -> None:
        pass

    def observe(self, round: Round) -> None:
        pass

    def check_invariants(self) -> None:
        pass

    def __repr__(self) -> str:
        return f'<{type(self).__name__} {self.name}>'
