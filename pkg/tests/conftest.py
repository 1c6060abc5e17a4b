import pytest
from hypothesis import HealthCheck, settings

import qschwarz as qz

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def solved_specs():
    """Float pole data for n=1..4, solved once per session."""
    out = {}
    for n in range(1, 5):
        sol = qz.solve(qz.ResidueSystem(n), tol=1e-12)
        out[n] = qz.FormSpec(n, sol.xs)
    return out
