import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def record(request):
    """Attach a measured-value summary to an acceptance test's report line."""
    def _record(text):
        request.node.user_properties.append(("detail", text))
    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = "; ".join(v for k, v in item.user_properties if k == "detail")
        status = "PASS" if rep.passed else "FAIL"
        item.config._acceptance_lines.append(f"[{status}] C{marker.args[0]:>2} {marker.args[1]}"
                                             + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines, key=lambda s: int(s.split("C", 1)[1].split()[0])):
            terminalreporter.write_line(ln)
