"""
Helpers to format wall times in a readable form.

Used by run reports and benchmark logs.
"""


def format_duration(seconds: float) -> str:
    """
    Format a duration in seconds.

    Args:
        seconds (float): Duration in seconds

    Returns:
        str: Formatted duration (ex: "850 µs", "12.4 ms", "3.21 s", "2 minutes 5 seconds")
    """
    if seconds < 0:
        return "0 s"
    if seconds < 1e-3:
        return f"{seconds * 1e6:.0f} µs"
    if seconds < 1.0:
        return f"{seconds * 1e3:.1f} ms"
    if seconds < 60.0:
        return f"{seconds:.2f} s"

    total_seconds = int(round(seconds))
    minutes = total_seconds // 60
    remaining_seconds = total_seconds % 60

    parts = ["1 minute" if minutes == 1 else f"{minutes} minutes"]
    if remaining_seconds == 1:
        parts.append("1 second")
    elif remaining_seconds > 1:
        parts.append(f"{remaining_seconds} seconds")
    return " ".join(parts)


def format_duration_short(seconds: float) -> str:
    """
    Short format in milliseconds (ex: "12.40ms"), for tabular output.

    Args:
        seconds (float): Duration in seconds

    Returns:
        str: Formatted duration
    """
    if seconds < 0:
        return "0.00ms"
    return f"{seconds * 1e3:.2f}ms"
