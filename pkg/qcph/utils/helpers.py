"""
Utility helper functions for the quotient-complex descriptor pipeline.
"""

import math
from typing import Any, Dict, Iterable

import psutil


def format_duration(seconds: float) -> str:
    """Format duration in seconds to human-readable string."""
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes = int(seconds // 60)
    remaining_seconds = int(seconds % 60)
    return f"{minutes}m {remaining_seconds}s"


def safe_divide(numerator: float, denominator: float, default: float = 0.0) -> float:
    """Safely divide two numbers, returning default on division by zero."""
    return numerator / denominator if denominator != 0 else default


def deep_update(base_dict: Dict, update_dict: Dict) -> Dict:
    """Deep update dictionary with nested updates."""
    result = base_dict.copy()
    for key, value in update_dict.items():
        if isinstance(value, dict) and key in result and isinstance(result[key], dict):
            result[key] = deep_update(result[key], value)
        else:
            result[key] = value
    return result


def json_pointer(location: Iterable[Any]) -> str:
    """Turn a validation error location tuple into a JSON pointer."""
    parts = [str(part).replace("~", "~0").replace("/", "~1") for part in location]
    return "/" + "/".join(parts)


def round_significant(value: float, digits: int) -> float:
    """Round a float to a number of significant digits."""
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def format_significant(value: float, digits: int) -> str:
    """Format a float with at most `digits` significant digits."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.{digits}g}"
    return "0" if text == "-0" else text


def wrap_unit(x: float) -> float:
    """Reduce a fractional coordinate into [0, 1)."""
    wrapped = x - math.floor(x)
    # x slightly below an integer can round up to exactly 1.0
    return 0.0 if wrapped >= 1.0 else wrapped + 0.0


def physical_core_count() -> int:
    """Number of physical cores, falling back to logical ones."""
    count = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True)
    return max(1, count or 1)
