import numpy as np
import pytest

from etpasens.config import (
    CONTINUOUS_WAVE,
    PULSED,
    ExperimentConfig,
    _exact_inverse,
    builtin,
    builtin_table,
)


@pytest.fixture(scope="session")
def table():
    return builtin_table()


@pytest.fixture(scope="session")
def geneva():
    return builtin("geneva")


@pytest.fixture(scope="session")
def boulder_fs():
    return builtin("boulder fs")


@pytest.fixture(scope="session")
def this_work():
    return builtin("this work")


def random_config(rng: np.random.Generator, **overrides) -> ExperimentConfig:
    """A random physically-plausible config for property tests."""

    def logu(lo, hi):
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

    T = logu(1e-13, 1e-6)
    A = logu(1e-8, 1e-4)
    cw = bool(rng.random() < 0.4)
    if cw:
        pump_mode, f_rep = CONTINUOUS_WAVE, _exact_inverse(T)
    else:
        pump_mode = PULSED
        f_rep = min(logu(1e5, 1e8), 0.5 / T)
    values = dict(
        label="random",
        T_int=logu(1e2, 1e5),
        eta_s=float(rng.uniform(0.3, 1.0)),
        eta_i=float(rng.uniform(0.3, 1.0)),
        eta_d=float(rng.uniform(0.005, 0.3)),
        A=A,
        T=T,
        A_e=A * logu(1e-3, 1.0),
        T_e=max(T * logu(1e-6, 1.0), 1e-15),
        N_P=logu(1.0, 1e8),
        f_rep=f_rep,
        f_dark=0.0 if rng.random() < 0.15 else logu(1.0, 1e4),
        sigma_h=0.0 if rng.random() < 0.15 else logu(1e-42, 1e-36),
        N_t_raw=logu(1e-16, 1e-11),
        pump_mode=pump_mode,
        n_sigma=float(rng.uniform(0.5, 3.0)),
        extra_enhancement=1.0 if rng.random() < 0.7 else logu(1.0, 1e2),
    )
    values.update(overrides)
    return ExperimentConfig(**values)
