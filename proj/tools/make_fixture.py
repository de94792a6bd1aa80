#!/usr/bin/env python3
"""Generates data/states_sample.csv: a synthetic, deterministic state-level
case file in the covid19india `states.csv` layout (DD-Mon-YY dates).

The curves are shaped like a second wave (logistic growth in cumulative
confirmed, lagged recoveries, ~1% deaths, weekday reporting dips). Two
feed defects are injected on purpose: a missing day for Delhi and a one-day
downward correction of Kerala's recovered count.
"""
import datetime as dt
import math

import numpy as np

STATES = [
    # name, base confirmed, wave size, midpoint day, growth rate
    ("Karnataka", 950_000, 1_150_000, 70, 0.085),
    ("Maharashtra", 2_050_000, 3_100_000, 55, 0.070),
    ("Delhi", 640_000, 700_000, 62, 0.110),
    ("Kerala", 1_030_000, 900_000, 75, 0.080),
]
START = dt.date(2021, 2, 10)
DAYS = 90


def series(rng, base, size, mid, rate):
    t = np.arange(DAYS)
    smooth = base + size / (1.0 + np.exp(-rate * (t - mid)))
    daily = np.diff(smooth, prepend=smooth[0] - size * rate * 0.01)
    weekday = np.array([0.78 if (START + dt.timedelta(days=int(d))).weekday() == 0 else 1.0 for d in t])
    daily = np.maximum(daily * weekday * rng.lognormal(0.0, 0.06, DAYS), 0.0)
    confirmed = np.floor(base + np.cumsum(daily)).astype(np.int64)
    lag = 14
    recovered = np.empty(DAYS, dtype=np.int64)
    for i in range(DAYS):
        j = max(i - lag, 0)
        recovered[i] = int(0.955 * confirmed[j] * (0.97 + 0.03 * min(i, lag) / lag))
    deceased = np.floor(0.0115 * confirmed + rng.normal(0, 20, DAYS).cumsum().clip(min=0)).astype(np.int64)
    deceased = np.maximum.accumulate(deceased)
    recovered = np.maximum.accumulate(recovered)
    recovered = np.minimum(recovered, confirmed - deceased)
    return confirmed, recovered, deceased


def main():
    rng = np.random.default_rng(20210510)
    rows = []
    for name, base, size, mid, rate in STATES:
        c, r, d = series(rng, base, size, mid, rate)
        for i in range(DAYS):
            date = START + dt.timedelta(days=i)
            if name == "Delhi" and i == 40:
                continue  # missing report
            rec = int(r[i])
            if name == "Kerala" and i == 60:
                rec = int(r[i - 1]) - 800  # reconciliation correction
            tested = int(c[i] * 12.5)
            rows.append((date, name, int(c[i]), rec, int(d[i]), 0, tested))
    rows.sort(key=lambda x: (x[0], x[1]))
    with open("data/states_sample.csv", "w") as out:
        out.write("Date,State,Confirmed,Recovered,Deceased,Other,Tested\n")
        for date, name, c, r, d, o, t in rows:
            out.write(f"{date.day:02d}-{date.strftime('%b')}-{date.strftime('%y')},{name},{c},{r},{d},{o},{t}\n")


if __name__ == "__main__":
    main()
