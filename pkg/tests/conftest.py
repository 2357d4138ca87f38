import math

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("ci")

R8 = 8 * math.log(10) / 20  # 8 dB
FOCK_T = 1 / math.sqrt(2)

# wide, fine x-lattice; the trapezoid sum is spectrally accurate for these Gaussians
X = np.linspace(-25.0, 25.0, 10001)
DX = X[1] - X[0]


def overlap(psi_a, psi_b):
    """<a|b> on the shared lattice from sampled wavefunctions."""
    return np.sum(np.conj(psi_a) * psi_b) * DX


def random_params(rng, count, r_max=1.3, n_max=5):
    from heralded.scheme import SchemeParams

    out = []
    while len(out) < count:
        p = SchemeParams(
            float(rng.uniform(0.05, r_max)),
            float(rng.uniform(0.1, math.pi)),
            float(rng.uniform(0.05, 0.95)),
            int(rng.integers(0, n_max + 1)),
        )
        out.append(p)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion; lines are echoed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
