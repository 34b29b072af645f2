import pytest

from chaospso import _pure

try:
    from chaospso import _kernels
except ImportError:  # extension not built
    _kernels = None

ACCEPTANCE_LINES = []


@pytest.fixture
def compiled():
    if _kernels is None:
        pytest.skip("compiled extension not built")
    return _kernels


@pytest.fixture
def pure():
    return _pure


@pytest.fixture
def with_core(monkeypatch):
    """Swap the kernel module behind the sources layer for one test."""
    from chaospso import functions, sources

    def use(mod):
        monkeypatch.setattr(sources, "core", mod)
        monkeypatch.setattr(functions, "core", mod)
        sources._kernel.cache_clear()
        return mod

    yield use
    sources._kernel.cache_clear()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
