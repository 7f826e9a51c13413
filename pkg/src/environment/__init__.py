# Arrival, correctness and cost generation with common random numbers
from .stream import (
    ArrivalMode, ArrivalProcess, Feedback, Round, RoundStream, RNG_ALGORITHM,
    make_stream, realize_feedback, realized_loss, load_adversarial_sequence, substream, POLICY
)
