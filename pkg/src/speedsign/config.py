"""Flat key=value config files for the detection pipeline thresholds.

Format: one ``key = value`` per line; ``#`` starts a comment; blank lines
ignored. Values are parsed as bool (``true``/``false``), int, or float.
Unknown keys are rejected loudly. Keys and defaults:

    gray.wr = 0.299            grayscale weights (BT.601)
    gray.wg = 0.587
    gray.wb = 0.114
    red.h_min = 0.8            inclusive HSV red band
    red.h_max = 0.94
    red.s_min = 0.45
    red.v_min = 0.5
    red.h_wrap_max = -1.0      zero-adjacent red band; negative = disabled
    canny.sigma = 1.4
    canny.low = 0.1
    canny.high = 0.3
    canny.relative = true      thresholds as fractions of the max gradient
    detect.se_size = 3
    detect.metric_low = 0.9
    detect.metric_high = 1.0
    detect.red_ratio_min = 0.3
    detect.min_area = 400
"""

from __future__ import annotations

from .detector import DetectionParams
from .edges import CannyParams
from .raster import GRAY_WEIGHTS, RedThresholds

DEFAULTS = {
    "gray.wr": GRAY_WEIGHTS[0],
    "gray.wg": GRAY_WEIGHTS[1],
    "gray.wb": GRAY_WEIGHTS[2],
    "red.h_min": 0.8,
    "red.h_max": 0.94,
    "red.s_min": 0.45,
    "red.v_min": 0.5,
    "red.h_wrap_max": -1.0,
    "canny.sigma": 1.4,
    "canny.low": 0.1,
    "canny.high": 0.3,
    "canny.relative": True,
    "detect.se_size": 3,
    "detect.metric_low": 0.9,
    "detect.metric_high": 1.0,
    "detect.red_ratio_min": 0.3,
    "detect.min_area": 400,
}


def _parse_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse config value {text!r}")


def load_config(path) -> dict:
    """Defaults overridden by the file's ``key = value`` entries."""
    values = dict(DEFAULTS)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in DEFAULTS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_value(val.strip())
    return values


def write_default_config(path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write("# detection pipeline thresholds\n")
        for key, val in DEFAULTS.items():
            if isinstance(val, bool):
                val = "true" if val else "false"
            f.write(f"{key} = {val}\n")


def detection_params(values: dict | None = None) -> DetectionParams:
    """Build DetectionParams from a config dict (defaults when None)."""
    v = dict(DEFAULTS)
    if values:
        v.update(values)
    return DetectionParams(
        canny=CannyParams(
            sigma=float(v["canny.sigma"]),
            low=float(v["canny.low"]),
            high=float(v["canny.high"]),
            relative=bool(v["canny.relative"]),
        ),
        se_size=int(v["detect.se_size"]),
        metric_low=float(v["detect.metric_low"]),
        metric_high=float(v["detect.metric_high"]),
        red_ratio_min=float(v["detect.red_ratio_min"]),
        min_area=int(v["detect.min_area"]),
        red=RedThresholds(
            h_min=float(v["red.h_min"]),
            h_max=float(v["red.h_max"]),
            s_min=float(v["red.s_min"]),
            v_min=float(v["red.v_min"]),
            h_wrap_max=float(v["red.h_wrap_max"]),
        ),
        gray_weights=(float(v["gray.wr"]), float(v["gray.wg"]), float(v["gray.wb"])),
    )
