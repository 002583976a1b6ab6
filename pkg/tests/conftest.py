import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by test_acceptance.record: (criterion, check name, passed, detail)
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    by_criterion = {}
    for n, name, ok, detail in ACCEPTANCE_RESULTS:
        by_criterion.setdefault(n, []).append((name, ok, detail))
    for n in sorted(by_criterion):
        checks = by_criterion[n]
        status = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        parts = "; ".join(f"{name} {'ok' if ok else 'FAILED'} ({detail})"
                          for name, ok, detail in checks)
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {parts}")
