"""Counter-based random streams (numpy Philox) with documented splitting.

Every random draw in the package flows through a Philox generator keyed by
``(base_seed, stream_tag)``.  The stream tag is a 64-bit mix of small
integer labels (replica index, layer index, block coordinates, ...), so
distinct replicas / layers / blocks get independent, reproducible streams
regardless of query order or thread scheduling.

Tag layout: labels are folded left-to-right with the splitmix64 finalizer,
so ``stream(seed, "layer", n, bx, by)`` is a pure function of its inputs.
"""
import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_tag(*labels) -> int:
    """Fold labels (ints or short strings) into one 64-bit stream tag."""
    acc = 0x243F6A8885A308D3  # arbitrary non-zero start
    for lab in labels:
        if isinstance(lab, str):
            v = int.from_bytes(lab.encode()[:8].ljust(8, b"\0"), "little")
        else:
            v = int(lab) & _MASK64
        acc = _splitmix64(acc ^ v)
    return acc


def stream(seed: int, *labels) -> np.random.Generator:
    """Generator for the (seed, labels) stream."""
    key = np.array([int(seed) & _MASK64, stream_tag(*labels)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def replica_seed(seed: int, replica: int) -> int:
    """Derived 64-bit seed for one replica of a campaign."""
    return _splitmix64((int(seed) & _MASK64) ^ stream_tag("replica", replica))
