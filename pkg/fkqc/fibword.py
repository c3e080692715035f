"""
Fibonacci substitution words.

The one-sided word u is the fixed point of a -> ab, b -> a; the two-sided
word w reads the reversal of u, then "ba", then the bar, then u.
"""

import bisect
import logging
import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .config import get_settings
from .errors import ValidationError, WindowError
from .golden import SQRT5, TAU_FLOAT, tau_power
from .models import FreqPair, Letter, Word

logger = logging.getLogger(__name__)

SUBSTITUTION = {"a": "ab", "b": "a"}
SUBSTITUTION_MATRIX = ((1, 1), (1, 2))

# _fib_table[k] holds f_{k-1}, starting from f_{-1} = 0, f_0 = 1
_fib_table: List[int] = [0, 1]


def fibonacci(i: int) -> int:
    """f_i with f_{-1} = 0, f_0 = 1 and f_{i+2} = f_{i+1} + f_i."""
    if i < -1:
        raise ValidationError(f"fibonacci index must be >= -1, got {i}")
    while len(_fib_table) <= i + 1:
        _fib_table.append(_fib_table[-1] + _fib_table[-2])
    return _fib_table[i + 1]


def fibonacci_closed_form(i: int) -> float:
    """(tau^(i+1) - (1 - tau)^(i+1)) / sqrt(5), valid for i >= -2."""
    return (TAU_FLOAT ** (i + 1) - (1.0 - TAU_FLOAT) ** (i + 1)) / math.sqrt(5.0)


def _largest_fib_index(n: int) -> int:
    """Largest k >= 2 with f_k <= n, for n >= 2."""
    fibonacci(_level_for_length(n) + 1)
    return bisect.bisect_right(_fib_table, n) - 2


def _level_for_length(n: int) -> int:
    """Smallest level k >= 1 with f_k >= n."""
    k = 1
    while fibonacci(k) < n:
        k += 1
    return k


def _check_index(i: int) -> None:
    cap = get_settings().index_level_cap
    if abs(i) >= fibonacci(cap):
        raise WindowError(f"Index {i} exceeds the lazy access cap f_{cap}")


def substitute(word: Word) -> Word:
    """Apply a -> ab, b -> a letter by letter."""
    return Word("".join(SUBSTITUTION[c] for c in word.letters))


@lru_cache(maxsize=None)
def _u_string(level: int) -> str:
    cache_dir = get_settings().cache_dir
    path = cache_dir / f"u_{level}.txt" if cache_dir else None
    if path is not None and path.exists():
        text = path.read_text(encoding="ascii").strip()
        if len(text) == fibonacci(level):
            logger.debug("Loaded u^(%d) from %s", level, path)
            return text
        logger.warning("Ignoring corrupt word cache %s", path)

    prev, cur = "b", "a"  # u^(0), u^(1)
    for _ in range(level - 1):
        prev, cur = cur, cur + prev
    logger.debug("Built u^(%d) with %d letters", level, len(cur))

    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(cur, encoding="ascii")
        except OSError as e:
            logger.warning("Could not write word cache %s: %s", path, e)
    return cur


def one_sided_word(level: int) -> Word:
    """u^(level): u^(1) = a, u^(level+1) = rho(u^(level))."""
    if level < 1:
        raise ValidationError(f"level must be >= 1, got {level}")
    cap = get_settings().word_level_cap
    if level > cap:
        raise WindowError(f"level {level} exceeds the materialisation cap {cap}")
    return Word(_u_string(level))


def _prefix(n: int) -> str:
    """First n letters of u."""
    if n <= 0:
        return ""
    return one_sided_word(max(2, _level_for_length(n))).letters[:n]


def letter_counts(level: int) -> Tuple[int, int]:
    """(#a, #b) in u^(level) = (f_{level-1}, f_{level-2})."""
    if level < 1:
        raise ValidationError(f"level must be >= 1, got {level}")
    return fibonacci(level - 1), fibonacci(level - 2)


def one_sided_letter(i: int) -> Letter:
    """u_i in O(log i) without materialising u."""
    if i < 0:
        raise ValidationError(f"one-sided index must be >= 0, got {i}")
    _check_index(i)
    # u^(k+1) = u^(k) u^(k-1): positions [f_k, f_{k+1}) repeat the prefix
    while i >= 2:
        i -= fibonacci(_largest_fib_index(i))
    return Letter.A if i == 0 else Letter.B


def count_a_prefix(n: int) -> int:
    """Number of a's among u_0 .. u_{n-1}."""
    if n < 0:
        raise ValidationError(f"prefix length must be >= 0, got {n}")
    _check_index(n)
    count = 0
    while n >= 2:
        k = _largest_fib_index(n)
        count += fibonacci(k - 1)
        n -= fibonacci(k)
    return count + n


def two_sided_letter(i: int) -> Letter:
    """w_i: u_i for i >= 0, then w_-1 = a, w_-2 = b, w_-j = u_{j-3}."""
    if i >= 0:
        return one_sided_letter(i)
    if i == -1:
        return Letter.A
    if i == -2:
        return Letter.B
    return one_sided_letter(-i - 3)


def two_sided_window(start: int, stop: int) -> Word:
    """w[start:stop] with the bar placed before w_0 when it falls inside."""
    if stop < start:
        raise ValidationError(f"empty window [{start}, {stop})")
    m = max(0, -start - 2)
    left = _prefix(m)[::-1] + "ba"
    text = left + _prefix(max(stop, 0))
    off = len(left)
    ref = -start if start <= 0 <= stop else None
    return Word(text[start + off:stop + off], ref)


def is_palindrome_core(i: int) -> bool:
    """u^(i) without its last two letters reads the same reversed (i >= 3)."""
    if i < 3:
        raise ValidationError(f"palindrome property needs level >= 3, got {i}")
    core = one_sided_word(i).letters[:-2]
    return core == core[::-1]


def contains_forbidden(word: Word) -> bool:
    return "bb" in word.letters or "aaa" in word.letters


def repetitivity_holds(i: int, span: int) -> bool:
    """Every window of 2^(i+3) - 2 letters of w[-span, span) contains u^(i+3)."""
    target = one_sided_word(i + 3).letters
    width = 2 ** (i + 3) - 2
    text = two_sided_window(-span, span).letters
    return all(target in text[k:k + width] for k in range(len(text) - width + 1))


@lru_cache(maxsize=None)
def _super_strings(l: int) -> Tuple[str, str]:
    if l == 1:
        return "aba", "ababa"
    a, b = _super_strings(l - 1)
    return a + b, a + b + b


def super_words(l: int) -> Tuple[Word, Word]:
    """A_l and B_l with A_1 = aba, B_1 = ababa, A_{l+1} = A_l B_l, B_{l+1} = A_l B_l B_l."""
    if l < 1:
        raise ValidationError(f"super-word level must be >= 1, got {l}")
    if 2 * l + 2 > get_settings().word_level_cap:
        raise WindowError(f"super-words of level {l} exceed the materialisation cap")
    a, b = _super_strings(l)
    return Word(a), Word(b)


def center_word(l: int) -> Word:
    """c_l = w[-f_{2l}, f_{2l}), the patch that marks a level-l super-point."""
    if l < 1:
        raise ValidationError(f"level must be >= 1, got {l}")
    half = fibonacci(2 * l)
    return two_sided_window(-half, half)


def block_words(l: int) -> Tuple[Word, Word]:
    """The two ways a level-l super-point continues: c_l's left half, the block, c_l's right half."""
    c = center_word(l)
    left, right = c.letters[:c.ref_index], c.letters[c.ref_index:]
    a, b = super_words(l)
    return (Word(left + a.letters + right, len(left)),
            Word(left + b.letters + right, len(left)))


def super_indices(l: int, lo: int, hi: int) -> List[int]:
    """Indices p in [lo, hi] where w around p spells c_l."""
    if hi < lo:
        return []
    half = fibonacci(2 * l)
    pattern = center_word(l).letters
    text = two_sided_window(lo - half, hi + half).letters
    out = []
    k = text.find(pattern)
    while k != -1 and k <= hi - lo:
        out.append(lo + k)
        k = text.find(pattern, k + 1)
    return out


def substitution_matrix_power(n: int) -> np.ndarray:
    """M^n for M = [[1, 1], [1, 2]], exact in Python integers."""
    if n < 0:
        raise ValidationError(f"matrix power must be >= 0, got {n}")
    m = np.array(SUBSTITUTION_MATRIX, dtype=object)
    return np.linalg.matrix_power(m, n)


def substitution_matrix_closed_form(n: int) -> np.ndarray:
    """M^n = [[f_{2n-2}, f_{2n-1}], [f_{2n-1}, f_{2n}]] through the tau-power formula."""
    f = fibonacci_closed_form
    return np.array([[f(2 * n - 2), f(2 * n - 1)], [f(2 * n - 1), f(2 * n)]])


def absolute_frequency(l: int) -> FreqPair:
    """Occurrences of A_l and B_l per unit length: 1/(sqrt5 tau^(2l+2)), 1/(sqrt5 tau^(2l+1))."""
    if l < 1:
        raise ValidationError(f"level must be >= 1, got {l}")
    freq_a = 1.0 / float(SQRT5 * tau_power(2 * l + 2))
    freq_b = 1.0 / float(SQRT5 * tau_power(2 * l + 1))
    return FreqPair(freq_a, freq_b)


def empirical_frequency(l: int, level: int) -> FreqPair:
    """Count A_l/B_l blocks between level-l super-points of w[-f_level, f_level]."""
    span = fibonacci(level)
    idx = super_indices(l, -span, span)
    if len(idx) < 2:
        raise WindowError(f"window f_{level} holds fewer than two level-{l} super-points")
    gaps = np.diff(idx)
    n_a = int(np.count_nonzero(gaps == fibonacci(2 * l + 1)))
    n_b = int(np.count_nonzero(gaps == fibonacci(2 * l + 2)))
    length = n_a * float(tau_power(2 * l + 1)) + n_b * float(tau_power(2 * l + 2))
    return FreqPair(n_a / length, n_b / length)
