import pytest

_criterion_lines = []


@pytest.fixture
def criterion_report():
    """Record one PASS/FAIL line per acceptance criterion.

    Lines are echoed immediately (visible with -s) and replayed in the
    terminal summary so they appear in default captured runs too.
    """
    def _report(num, ok, detail):
        line = f"criterion {num} [{'PASS' if ok else 'FAIL'}] {detail}"
        _criterion_lines.append(line)
        print("\n" + line)
    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
