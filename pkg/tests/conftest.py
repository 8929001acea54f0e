import sys

import pytest

from softook import _backend, _pykernels, convcode, demod

BACKENDS = {"python": _pykernels}
try:
    from softook import _kernels

    BACKENDS["cython"] = _kernels
except ImportError:
    pass


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run a test once per available kernel implementation."""
    mod = BACKENDS[request.param]
    monkeypatch.setattr(convcode, "kernels", mod)
    monkeypatch.setattr(demod, "kernels", mod)
    monkeypatch.setattr(_backend, "kernels", mod)
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    report = getattr(mod, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for line in sorted(report, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
