"""Shared test configuration.

Hypothesis runs derandomized so the suite is reproducible end to end; the
statistical tests pin their own seeds for the same reason.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "artifact",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("artifact")
