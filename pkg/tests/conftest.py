import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=["numba", "numpy"])
def kernel_backend(request):
    from cachedof import _kernels

    if request.param == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    prev = _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(prev)
