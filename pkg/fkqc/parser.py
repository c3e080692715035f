"""
Anchor table parser.

A table lists one anchor value per line as ``i, h_i``. Values are rational
literals (``2.5``, ``-7/3``) or golden literals (``1/2 + 3/2*tau``, ``-tau``).
Comments use ``//``, ``#`` or ``/* ... */`` and an ``i,h`` header line is
optional.
"""

import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

from .errors import ValidationError
from .golden import GoldenNumber
from .models import AnchorFn

logger = logging.getLogger(__name__)

_HEADER = re.compile(r'^\s*i\s*,\s*h(_i)?\s*$', re.IGNORECASE)
_ROW = re.compile(r'^\s*([+-]?\d+)\s*,\s*(.+?)\s*$')
_UNSIGNED = r'(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?'
_RATIONAL = r'[+-]?' + _UNSIGNED
_GOLDEN = re.compile(
    rf'^(?:(?P<a>{_RATIONAL})\s*(?=[+-]))?\s*(?P<sign>[+-])?\s*'
    rf'(?:(?P<b>{_UNSIGNED})\s*\*?\s*)?tau$'
)


class AnchorTableParser:
    """Parses anchor tables and keeps the parsed anchors by name."""

    def __init__(self):
        self.tables_cache: Dict[str, AnchorFn] = {}

    def parse_file(self, filename: str) -> AnchorFn:
        """Parse an anchor table file and return the anchor."""
        path = Path(filename)
        if not path.exists():
            raise FileNotFoundError(f"Anchor file not found: {filename}")

        with open(path, 'r', encoding='utf-8') as f:
            content = f.read()

        return self.parse_table(content, path.stem)

    def parse_table(self, content: str, name: Optional[str] = None) -> AnchorFn:
        """Parse table content into an anchor."""
        content = self._remove_comments(content)
        values: Dict[int, GoldenNumber] = {}

        lines = [line.strip() for line in content.splitlines()]
        lines = [line for line in lines if line]
        if lines and _HEADER.match(lines[0]):
            lines = lines[1:]

        for line in lines:
            match = _ROW.match(line)
            if not match:
                raise ValidationError(f"Invalid anchor table format - bad line: {line!r}")
            i = int(match.group(1))
            if i in values:
                raise ValidationError(f"Invalid anchor table format - index {i} listed twice")
            values[i] = self.parse_value(match.group(2))

        if not values:
            raise ValidationError("Invalid anchor table format - no rows found")

        anchor = AnchorFn.from_table(values, name or "table")
        self.tables_cache[anchor.name] = anchor
        logger.debug("parsed anchor %s with %d rows", anchor.name, len(values))
        return anchor

    @staticmethod
    def parse_value(text: str) -> GoldenNumber:
        """Read a rational or ``a + b*tau`` literal exactly."""
        text = text.strip().replace(' ', '')
        try:
            return GoldenNumber(Fraction(text), 0)
        except (ValueError, ZeroDivisionError):
            pass
        match = _GOLDEN.match(text)
        if not match:
            raise ValidationError(f"Invalid anchor table format - bad value: {text!r}")
        a = Fraction(match.group('a')) if match.group('a') else Fraction(0)
        b = Fraction(match.group('b')) if match.group('b') else Fraction(1)
        if match.group('sign') == '-':
            b = -b
        return GoldenNumber(a, b)

    def _remove_comments(self, content: str) -> str:
        """Remove //, # and /* */ comments."""
        content = re.sub(r'/\*.*?\*/', '', content, flags=re.DOTALL)
        content = re.sub(r'(//|#).*$', '', content, flags=re.MULTILINE)
        return content

    def get_anchor(self, name: str) -> Optional[AnchorFn]:
        """Get a parsed anchor from the cache or try ``<name>.txt``."""
        if name in self.tables_cache:
            return self.tables_cache[name]

        try:
            return self.parse_file(f"{name}.txt")
        except FileNotFoundError:
            return None
