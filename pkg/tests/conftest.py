"""Shared fixtures and the acceptance-verdict summary hook.

The reference-grid ray enumerations are the expensive shared inputs,
so they are built once per session and reused across test modules.
"""

import pytest

from bernrays import ClassSpec, rays_corr, rays_mean

D = 100
SCENARIO_P = {"A": 0.003, "BBB": 0.017, "B": 0.266}
RHO_VALUES = {"1/6": 1 / 6, "1/2": 1 / 2, "5/6": 5 / 6}
ALPHAS = (0.90, 0.95, 0.99)


@pytest.fixture(scope="session")
def mean_rays():
    """Mean-class ray sets for the three rating scenarios at d=100."""
    return {
        name: rays_mean.enumerate_rays(ClassSpec(D, p))
        for name, p in SCENARIO_P.items()
    }


@pytest.fixture(scope="session")
def corr_rays():
    """Correlation-class ray sets on the nine (scenario, rho) cells."""
    out = {}
    for name, p in SCENARIO_P.items():
        for label, rho in RHO_VALUES.items():
            out[name, label] = rays_corr.enumerate_rays(
                ClassSpec(D, p, rho)
            )
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of a run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, ()):
            nodeid = getattr(report, "nodeid", "")
            when = getattr(report, "when", None)
            if "test_acceptance" not in nodeid:
                continue
            if when != "call" and not (when == "setup" and outcome != "passed"):
                continue
            verdict = "PASS" if outcome == "passed" else "FAIL"
            lines.append(f"{verdict}  {nodeid.split('::')[-1]}")
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in sorted(lines, key=lambda s: s.split()[-1]):
            terminalreporter.write_line("  " + line)
