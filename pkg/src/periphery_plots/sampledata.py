"""Deterministic synthetic daily-weather sample dataset.

Roughly 68 years of daily observations with seasonal structure, light
missingness, and a categorical sky condition, sized so the context
zones of the bundled figure spec are dense enough to exercise the
automatic summarization transitions. Output is a pure function of the
seed, so regenerated files are byte-identical.
"""

from __future__ import annotations

import json
from datetime import date, timedelta

import numpy as np

N_DAYS = 25_000
START_DAY = date(1950, 1, 1)
SEED = 20190425


def generate_weather(n_days: int = N_DAYS, seed: int = SEED) -> list[tuple]:
    """Rows of (iso_date, tmax, tmin, precipitation, wind, sky); None = missing cell."""
    rng = np.random.default_rng(seed)
    day_index = np.arange(n_days)
    angle = 2 * np.pi * (day_index % 365.25) / 365.25

    seasonal = 10.5 * np.sin(angle - np.pi / 2)
    drift = 0.8 * np.sin(2 * np.pi * day_index / (365.25 * 11))  # slow multi-year wobble
    tmax = 14.5 + seasonal + drift + rng.normal(0, 2.6, n_days)
    tmin = tmax - (4.5 + rng.gamma(2.0, 1.2, n_days))

    wet_p = np.clip(0.28 - 0.22 * np.sin(angle - np.pi / 2), 0.04, 0.95)
    wet = rng.random(n_days) < wet_p
    precip = np.where(wet, rng.gamma(1.4, 4.2, n_days), 0.0)
    precip = np.round(precip, 1)

    wind = np.clip(2.8 + 1.1 * np.sin(angle * 2 + 1.0) + rng.gamma(2.0, 0.9, n_days), 0, None)

    sky = np.where(precip == 0.0, "sun", "rain")
    sky = np.where((precip > 0) & (precip < 1.5), "drizzle", sky)
    sky = np.where((precip > 0) & (tmax < 2.0), "snow", sky)
    foggy = (precip == 0.0) & (rng.random(n_days) < 0.12)
    sky = np.where(foggy, "fog", sky)

    missing_tmax = rng.random(n_days) < 0.015
    missing_wind = rng.random(n_days) < 0.03

    rows = []
    for i in range(n_days):
        d = START_DAY + timedelta(days=int(i))
        rows.append((
            d.isoformat(),
            None if missing_tmax[i] else round(float(tmax[i]), 1),
            round(float(tmin[i]), 1),
            float(precip[i]),
            None if missing_wind[i] else round(float(wind[i]), 1),
            str(sky[i]),
        ))
    return rows


def weather_csv(n_days: int = N_DAYS, seed: int = SEED) -> str:
    lines = ["date,tmax,tmin,precipitation,wind,sky"]
    for d, tmax, tmin, precip, wind, sky in generate_weather(n_days, seed):
        cells = [
            d,
            "" if tmax is None else f"{tmax}",
            f"{tmin}",
            f"{precip}",
            "" if wind is None else f"{wind}",
            sky,
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def weather_spec(n_days: int = N_DAYS) -> dict:
    """Figure spec for the sample: 4 tracks, context/focus/context zones.

    The focus sits about 60% of the way in and spans half a year (less
    for short datasets), so both context zones are dense enough to
    trigger the grid-level summarization on the auto tracks.
    """
    last = START_DAY + timedelta(days=n_days - 1)
    focus_start = START_DAY + timedelta(days=int(n_days * 0.6))
    focus_days = min(182, max(n_days // 5, 1))
    focus_end = focus_start + timedelta(days=focus_days)
    return {
        "time_column": "date",
        "time_format": "date_only",
        "tracks": [
            {
                "series": "tmax",
                "value_kind": "continuous",
                "focus_plot": "line",
                "periphery_policy": {"mode": "auto", "path": "value_preserving",
                                     "t1": 50, "t2": 5000},
                "annotations": ["mean_line", "quantile_band"],
            },
            {
                "series": "precipitation",
                "value_kind": "continuous",
                "focus_plot": "bar",
                "periphery_policy": {"mode": "auto", "path": "time_preserving",
                                     "t1": 50, "t2": 5000},
                "histogram_bins": 16,
            },
            {
                "series": "wind",
                "value_kind": "continuous",
                "focus_plot": "dot",
                "periphery_policy": {"mode": "fixed", "plot_type": "vap"},
                "annotations": ["mean_line"],
            },
            {
                "series": "sky",
                "value_kind": "categorical",
                "focus_plot": "event_ticks",
            },
        ],
        "initial_zones": [
            {"kind": "context", "start": START_DAY.isoformat(),
             "end": focus_start.isoformat()},
            {"kind": "focus", "start": focus_start.isoformat(),
             "end": focus_end.isoformat()},
            {"kind": "context", "start": focus_end.isoformat(),
             "end": (last + timedelta(days=1)).isoformat()},
        ],
        "axis_domain": {
            "start": START_DAY.isoformat(),
            "end": (last + timedelta(days=1)).isoformat(),
        },
        "layout": {
            "focus_fraction": 0.5,
            "control_height_px": 40,
            "min_zone_width_ms": 86_400_000,
        },
    }


def write_sample(csv_path: str, spec_path: str, n_days: int = N_DAYS, seed: int = SEED) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(weather_csv(n_days, seed))
    with open(spec_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(weather_spec(n_days), indent=2) + "\n")
