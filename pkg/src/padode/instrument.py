"""Operation tallies, used by tests to pin down where divisions happen and
by the CLI to prove that dry runs do no series arithmetic.

Counting is off unless a `tracking` block is active, so the hooks cost one
dict lookup on the hot paths.
"""

from collections import Counter
from contextlib import contextmanager

DIVISIONS = "divisions"
SERIES_OPS = "series_ops"

_stacks: dict[str, list[Counter]] = {}


def bump(channel, key, n=1):
    stack = _stacks.get(channel)
    if not stack:
        return
    for tally in stack:
        tally[key] += n


@contextmanager
def tracking(channel):
    """Collect counts on `channel` for the duration of the block."""
    tally = Counter()
    _stacks.setdefault(channel, []).append(tally)
    try:
        yield tally
    finally:
        _stacks[channel].remove(tally)
