"""Shared synthetic-data helpers for the test suite."""

import numpy as np
import pandas as pd
import pytest

from egpdreg.egpd import egpd_quantile_arrays


def sample_egpd(n, xi, psi, family_id, kappas, seed):
    """Inverse-transform sample with (possibly per-row) parameter arrays."""
    rng = np.random.default_rng(seed)
    return egpd_quantile_arrays(rng.random(n), xi, psi, family_id, kappas)


def seasonal_table(n, seed, xi=0.2, psi=1.5, amp=0.4, level=0.5, family_id="model1"):
    """Synthetic response with a seasonal first carrier parameter."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 366.0, n)
    kappa = np.exp(level + amp * np.sin(2.0 * np.pi * t / 366.0))
    y = egpd_quantile_arrays(rng.random(n), xi, psi, family_id, (kappa,))
    return pd.DataFrame({"precip_mm": y, "day_of_year": t}), kappa


def constant_table(n, seed, xi=0.2, psi=1.5, kappa=2.0, family_id="model1"):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 366.0, n)
    y = egpd_quantile_arrays(rng.random(n), xi, psi, family_id, (np.full(n, kappa),))
    return pd.DataFrame({"precip_mm": y, "day_of_year": t})


def write_six_minute_csv(path, n_stations=8, n_days=30, seed=5, start="2017-01-01"):
    """Raw 6-minute gauge file: one year-round block per station."""
    rng = np.random.default_rng(seed)
    times = pd.date_range(start, periods=n_days * 240, freq="6min")
    frames = []
    for s in range(n_stations):
        lon = float(np.round(rng.uniform(-4.5, 2.0), 3))
        lat = float(np.round(rng.uniform(46.0, 49.5), 3))
        wet = rng.random(len(times)) < 0.12
        amounts = np.where(wet, np.round(rng.gamma(0.6, 0.5, len(times)), 1), 0.0)
        frames.append(
            pd.DataFrame(
                {
                    "station_id": f"S{s:03d}",
                    "lon": lon,
                    "lat": lat,
                    "timestamp": times.strftime("%Y-%m-%d %H:%M:%S"),
                    "precip_mm": amounts,
                }
            )
        )
    df = pd.concat(frames, ignore_index=True)
    df.to_csv(path, index=False)
    return df


@pytest.fixture(scope="session")
def model1_params():
    from egpdreg.carriers import CarrierFamily
    from egpdreg.egpd import EgpdParams

    return EgpdParams(0.2, 1.5, CarrierFamily("model1", (2.0,)))
