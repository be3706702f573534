"""Counter-based random number generation.

Every random draw in the factorization is a pure function of
(seed, elimination index, star index, draw index).  That makes
factorizations reproducible bit-for-bit, lets the lower-triangular and
row-operation output paths consume the identical sample stream, and lets
the pure-Python reference eliminator replay exactly what the compiled
kernel does.

The mixer is the splitmix64 finalizer; the compiled twin lives in
``_kernels.py`` and ``tests/test_rng.py`` pins the two to equality.
"""

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment
_SALT = 0xA0761D6478BD642F


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def counter_u01(seed: int, elim: int, star: int, draw: int) -> float:
    """Uniform double in [0, 1) keyed by (seed, elim, star, draw)."""
    h = mix64(seed ^ _SALT)
    h = mix64((h + _GAMMA * (elim + 1)) & MASK64)
    h = mix64((h + _GAMMA * (star + 1)) & MASK64)
    h = mix64((h + _GAMMA * (draw + 1)) & MASK64)
    return (h >> 11) * 2.0 ** -53


_ORDER_SALT = 0x52414E444F524452


def random_permutation(n: int, seed: int):
    """Seeded Fisher-Yates permutation (the ac-random elimination order)."""
    perm = list(range(n))
    s2 = mix64((seed & MASK64) ^ _ORDER_SALT)
    for i in range(n - 1, 0, -1):
        j = int(counter_u01(s2, i, 0, 0) * (i + 1))
        if j > i:
            j = i
        perm[i], perm[j] = perm[j], perm[i]
    return perm


class SampleStream:
    """Draw context for one vertex elimination: fixes (seed, elim index)."""

    def __init__(self, seed: int, elim_index: int = 0):
        self.seed = int(seed)
        self.elim_index = int(elim_index)

    def u01(self, star: int, draw: int) -> float:
        return counter_u01(self.seed, self.elim_index, star, draw)

    def at(self, elim_index: int) -> "SampleStream":
        return SampleStream(self.seed, elim_index)
