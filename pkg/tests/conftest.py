import flagcalc.catalog  # noqa: F401  (fixes the symbol print order x, y, z, ..., a)
from hypothesis import HealthCheck, settings

settings.register_profile(
    "flagcalc", max_examples=100, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("flagcalc")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
