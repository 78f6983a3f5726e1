import random

import pytest
from hypothesis import strategies as st

from algebrarium import Element, DomainId
from algebrarium.taskgen import GenerationConfig, sample_element

# acceptance criteria append (number, passed, detail) here; printed at session end
ACCEPTANCE_LOG: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LOG):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")


WIDE = GenerationConfig(counts={}, eh_magnitude=(0, 3000), knit_length=(0, 10), cube_length=(0, 6))


@pytest.fixture
def rng():
    return random.Random(20260101)


def random_elements(domain, count, seed=0, cfg=WIDE):
    r = random.Random(f"{seed}:{domain.value}")
    return [sample_element(domain, cfg, r) for _ in range(count)]


_faces = st.sampled_from("RLUDFB")
_turns = st.integers(1, 3)

raw_payloads = {
    DomainId.ENCRYPTED_HISTORY: st.integers(-10**6, 10**6),
    DomainId.ENIGMA: st.tuples(*(st.integers(-100, 100),) * 3),
    DomainId.KNITTING: st.text(alphabet="kpKP", max_size=14),
    DomainId.RUBIKS_CUBE: st.lists(st.tuples(_faces, _turns), max_size=10),
}


def elements(domain):
    return raw_payloads[domain].map(lambda p: Element(domain, p))


any_domain = st.sampled_from(list(DomainId))
