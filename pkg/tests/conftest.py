import numpy as np
import pytest

from vmaflab.media import Clip


def luma_clip(planes, bit_depth=8):
    return Clip.from_luma([np.asarray(p) for p in planes], bit_depth=bit_depth)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def textured(rng):
    """Smooth-ish 64x64 8-bit texture: blurred noise plus a gradient."""
    from vmaflab.filters import gaussian_blur

    noise = gaussian_blur(rng.normal(0, 40, (64, 64)), 1.2)
    yy, xx = np.mgrid[0:64, 0:64]
    return np.clip(np.round(128 + noise + 0.6 * xx - 0.3 * yy), 0, 255).astype(np.uint8)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _verdict(number, title, ok, detail, seconds):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail}; {seconds:.1f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
